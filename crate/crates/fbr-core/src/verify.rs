//! Independent solution verification and small-instance exact oracles.
//!
//! Nothing here shares a code path with the solvers' own feasibility
//! checks: biconnectivity is established by per-vertex removal searches
//! and certified by vertex-disjoint path witnesses from a unit-capacity
//! flow with vertex splitting.

use crate::error::{FbrError, Result};
use crate::geometry::{Point, RobotConfig, TAU_GEO};
use crate::graph::CommGraph;
use crate::relocate::{mm_opt, EdgeConstraintSet, MoveSolution};
use std::collections::VecDeque;

/// Two internally vertex-disjoint paths between a source and destination.
#[derive(Debug, Clone)]
pub struct FlowWitness {
    pub source: usize,
    pub dest: usize,
    pub path_a: Vec<usize>,
    pub path_b: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub biconnected: bool,
    pub minmax: f64,
    pub violated_pairs: Vec<(usize, usize)>,
    pub witness_samples: Vec<FlowWitness>,
}

/// Finds two internally vertex-disjoint paths from `s` to `d` if they
/// exist, via a value-2 max flow on the vertex-split graph: vertex `v`
/// becomes `v_in -> v_out` with capacity one (unbounded at the terminals),
/// and each edge contributes an arc of capacity one in both directions.
pub fn vertex_disjoint_two_paths(g: &CommGraph, s: usize, d: usize) -> Option<FlowWitness> {
    assert!(s != d, "source and destination must differ");
    let n = g.n();
    let node_in = |v: usize| 2 * v;
    let node_out = |v: usize| 2 * v + 1;

    // arcs as (tail, head, capacity); residual via paired indices
    let mut arcs: Vec<(usize, usize, i32)> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let push_arc = |arcs: &mut Vec<(usize, usize, i32)>,
                        adj: &mut Vec<Vec<usize>>,
                        t: usize,
                        h: usize,
                        cap: i32| {
        adj[t].push(arcs.len());
        arcs.push((t, h, cap));
        adj[h].push(arcs.len());
        arcs.push((h, t, 0));
    };
    for v in 0..n {
        let cap = if v == s || v == d { 2 } else { 1 };
        push_arc(&mut arcs, &mut adj, node_in(v), node_out(v), cap);
    }
    for &(a, b) in g.edges() {
        push_arc(&mut arcs, &mut adj, node_out(a), node_in(b), 1);
        push_arc(&mut arcs, &mut adj, node_out(b), node_in(a), 1);
    }

    let source = node_out(s);
    let sink = node_in(d);
    let mut flow = 0;
    for _ in 0..2 {
        // BFS augmenting path on the residual graph
        let mut pred: Vec<Option<usize>> = vec![None; 2 * n];
        let mut seen = vec![false; 2 * n];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        'bfs: while let Some(u) = queue.pop_front() {
            for &id in &adj[u] {
                let (_, head, cap) = arcs[id];
                if cap > 0 && !seen[head] {
                    seen[head] = true;
                    pred[head] = Some(id);
                    if head == sink {
                        break 'bfs;
                    }
                    queue.push_back(head);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        let mut x = sink;
        while x != source {
            let id = pred[x].unwrap();
            arcs[id].2 -= 1;
            arcs[id ^ 1].2 += 1;
            x = arcs[id].0;
        }
        flow += 1;
    }
    if flow < 2 {
        return None;
    }

    // decompose: forward arcs with remaining capacity 0 carry one unit
    let mut used = vec![false; arcs.len()];
    let mut extract_path = || -> Vec<usize> {
        let mut path = vec![s];
        let mut at = source;
        while at != sink {
            let id = adj[at]
                .iter()
                .copied()
                .find(|&id| id % 2 == 0 && !used[id] && arcs[id].0 == at && arcs[id].2 == 0)
                .expect("flow conservation yields a successor");
            used[id] = true;
            at = arcs[id].1;
            let v = at / 2;
            if path.last() != Some(&v) {
                path.push(v);
            }
        }
        path
    };
    let path_a = extract_path();
    let path_b = extract_path();
    Some(FlowWitness {
        source: s,
        dest: d,
        path_a,
        path_b,
    })
}

/// Distance-predicate communication graph, written out here so the
/// verifier does not depend on the solver-side constructor.
fn recompute_comm_graph(positions: &[Point], h: f64) -> CommGraph {
    let mut edges = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i].dist(positions[j]) <= h + TAU_GEO {
                edges.push((i, j));
            }
        }
    }
    CommGraph::from_edges(positions.len(), edges)
}

fn connected_skipping(g: &CommGraph, skip: Option<usize>) -> bool {
    let n = g.n();
    let start = match (0..n).find(|&v| Some(v) != skip) {
        Some(s) => s,
        None => return true,
    };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if Some(v) == skip || seen[v] {
                continue;
            }
            seen[v] = true;
            count += 1;
            queue.push_back(v);
        }
    }
    count == n - usize::from(skip.is_some())
}

/// Brute-force biconnectivity: connected, and still connected after
/// removing any single vertex.
fn biconnected_by_removal(g: &CommGraph) -> bool {
    g.n() >= 3 && connected_skipping(g, None) && (0..g.n()).all(|v| connected_skipping(g, Some(v)))
}

/// Recomputes the communication graph of a solution, its biconnectivity,
/// and the achieved minmax; optionally lists constraint pairs violated at
/// the geometric tolerance.
pub fn verify_solution(
    config: &RobotConfig,
    solution: &MoveSolution,
    constraints: Option<&EdgeConstraintSet>,
) -> Result<VerificationReport> {
    if solution.new_positions.len() != config.n() {
        return Err(FbrError::InvalidInput(format!(
            "solution has {} positions for {} robots",
            solution.new_positions.len(),
            config.n()
        )));
    }
    let h = config.h();
    let g = recompute_comm_graph(&solution.new_positions, h);
    let biconnected = biconnected_by_removal(&g);
    let minmax = config.max_displacement(&solution.new_positions);

    let violated_pairs = constraints
        .map(|cs| {
            cs.pairs()
                .iter()
                .copied()
                .filter(|&(i, j)| {
                    solution.new_positions[i].dist(solution.new_positions[j]) > h + TAU_GEO
                })
                .collect()
        })
        .unwrap_or_default();

    let mut witness_samples = Vec::new();
    if biconnected {
        let n = config.n();
        let mut sample_pairs = vec![(0, n - 1), (0, n / 2), (n / 2, n - 1)];
        sample_pairs.dedup();
        for (s, d) in sample_pairs {
            if s != d {
                if let Some(w) = vertex_disjoint_two_paths(&g, s, d) {
                    witness_samples.push(w);
                }
            }
        }
    }

    Ok(VerificationReport {
        biconnected,
        minmax,
        violated_pairs,
        witness_samples,
    })
}

/// Exact minmax optimum for instances with at most 6 robots, by
/// enumerating minimally biconnected spanning edge sets (in increasing
/// edge count, pruned by the movement lower bound) and solving the convex
/// relocation problem for each.
pub fn opt_oracle_small_n(config: &RobotConfig) -> Result<MoveSolution> {
    let n = config.n();
    if n > 6 {
        return Err(FbrError::InvalidInput(format!(
            "exact oracle is capped at 6 robots, got {n}"
        )));
    }
    let g = recompute_comm_graph(config.positions(), config.h());
    if biconnected_by_removal(&g) {
        return Ok(MoveSolution::identity(config));
    }

    let all_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let m = all_pairs.len();

    let graph_of = |mask: u32| -> CommGraph {
        CommGraph::from_edges(
            n,
            all_pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p),
        )
    };
    let biconnected_mask = |mask: u32| biconnected_by_removal(&graph_of(mask));

    let mut masks: Vec<u32> = (1..1u32 << m).collect();
    masks.sort_by_key(|mask| (mask.count_ones(), *mask));

    let pts = config.positions();
    let h = config.h();
    let mut best: Option<MoveSolution> = None;
    for mask in masks {
        if (mask.count_ones() as usize) < n {
            continue; // a spanning biconnected graph needs at least a cycle
        }
        let lb = all_pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &(i, j))| (pts[i].dist(pts[j]) - h).max(0.0) / 2.0)
            .fold(0.0f64, f64::max);
        if let Some(b) = &best {
            if lb >= b.minmax {
                continue;
            }
        }
        if !biconnected_mask(mask) {
            continue;
        }
        // skip non-minimal sets: their minimal subsets were enumerated earlier
        let minimal = (0..m)
            .filter(|k| mask >> k & 1 == 1)
            .all(|k| !biconnected_mask(mask & !(1 << k)));
        if !minimal {
            continue;
        }
        let constraints = EdgeConstraintSet::new(
            all_pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p),
        );
        let sol = mm_opt(config, &constraints);
        let better = match &best {
            None => true,
            Some(b) => sol.minmax < b.minmax,
        };
        if better {
            best = Some(sol);
        }
    }
    best.ok_or_else(|| FbrError::SolverFailure("no biconnected topology found".into()))
}
