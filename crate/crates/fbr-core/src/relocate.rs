//! Movement minimization: realize a set of edge constraints while keeping
//! every robot's displacement small.
//!
//! Two solvers: a sequential cascaded-relocation heuristic, and an optimal
//! convex method that bisects the displacement radius and decides each
//! radius by cyclic projections onto the constraint sets.

use crate::augment::AugmentationSet;
use crate::error::{FbrError, Result};
use crate::geometry::{Point, RobotConfig, TAU_GEO};
use crate::graph::{comm_graph, CommGraph};
use std::collections::VecDeque;

/// Maximum violation allowed on a distance constraint.
pub const TAU_FEAS: f64 = 1e-6;
/// Probe tolerance inside the bisection solver: kept below the geometric
/// edge tolerance so accepted positions verify as connected.
const TAU_PROBE: f64 = 1e-10;
/// Projection sweeps before a feasibility probe gives up.
pub const MAX_SWEEPS: usize = 10_000;
/// Verify-and-repair passes before the cascaded solver reports failure.
pub const MAX_REPAIR_PASSES: usize = 50;

/// Unordered index pairs that must end up within the communication radius.
#[derive(Debug, Clone)]
pub struct EdgeConstraintSet {
    /// Sorted, deduplicated, self-loop free.
    pairs: Vec<(usize, usize)>,
}

impl EdgeConstraintSet {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut list: Vec<(usize, usize)> = pairs
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        list.sort_unstable();
        list.dedup();
        EdgeConstraintSet { pairs: list }
    }

    /// Existing communication edges plus the augmentation set.
    pub fn from_graph_and_augmentation(g: &CommGraph, ea: &AugmentationSet) -> Self {
        Self::new(g.edges().iter().copied().chain(ea.pairs()))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// New positions with the achieved displacement and solver bookkeeping
/// (repair passes or bisection probes, depending on the solver).
#[derive(Debug, Clone)]
pub struct MoveSolution {
    pub new_positions: Vec<Point>,
    pub minmax: f64,
    pub iterations: u32,
}

impl MoveSolution {
    /// `minmax` is always the recomputed maximum displacement.
    pub fn from_positions(config: &RobotConfig, new_positions: Vec<Point>, iterations: u32) -> Self {
        let minmax = config.max_displacement(&new_positions);
        MoveSolution {
            new_positions,
            minmax,
            iterations,
        }
    }

    pub fn identity(config: &RobotConfig) -> Self {
        MoveSolution {
            new_positions: config.positions().to_vec(),
            minmax: 0.0,
            iterations: 0,
        }
    }
}

/// Moves robot `r` to `target`, then visits the remaining robots in
/// breadth-first layers by hop distance from `r` over `graph`; any visited
/// robot farther than `h` from its BFS parent moves straight toward the
/// parent's new position until the distance equals `h`.
pub fn cascaded_relocation(
    positions: &[Point],
    graph: &CommGraph,
    r: usize,
    target: Point,
    h: f64,
) -> Vec<Point> {
    let mut pos = positions.to_vec();
    pos[r] = target;
    let mut parent = vec![usize::MAX; graph.n()];
    let mut order = Vec::with_capacity(graph.n());
    let mut queue = VecDeque::from([r]);
    parent[r] = r;
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if parent[v] == usize::MAX {
                parent[v] = u;
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    for v in order {
        let p = parent[v];
        let d = pos[v].dist(pos[p]);
        if d > h {
            pos[v] = pos[p].add(pos[v].sub(pos[p]).scale(h / d));
        }
    }
    pos
}

/// Realizes one constraint pair: the lower-index robot moves toward the
/// other by half the current slack, then the other closes the remaining
/// gap; both moves cascade over `graph`.
fn realize_pair(pos: &mut Vec<Point>, graph: &CommGraph, i: usize, j: usize, h: f64) {
    let d = pos[i].dist(pos[j]);
    let w = (d - h).max(0.0);
    if w > 0.0 {
        let target = pos[i].add(pos[j].sub(pos[i]).scale(0.5 * w / d));
        *pos = cascaded_relocation(pos, graph, i, target, h);
    }
    let d = pos[j].dist(pos[i]);
    if d > h {
        let target = pos[j].add(pos[i].sub(pos[j]).scale((d - h) / d));
        *pos = cascaded_relocation(pos, graph, j, target, h);
    }
}

fn violated_pairs(pos: &[Point], pairs: &[(usize, usize)], h: f64) -> Vec<(usize, usize, f64)> {
    pairs
        .iter()
        .filter_map(|&(i, j)| {
            let excess = pos[i].dist(pos[j]) - h;
            (excess > TAU_GEO).then_some((i, j, excess))
        })
        .collect()
}

/// Re-cascades violated constraint edges until every pair holds, worst
/// violation first. Returns the positions and the number of passes.
pub fn repair_edges(
    mut pos: Vec<Point>,
    pairs: &[(usize, usize)],
    n: usize,
    h: f64,
) -> Result<(Vec<Point>, u32)> {
    let graph = CommGraph::from_edges(n, pairs.iter().copied());
    let mut passes = 0u32;
    loop {
        let mut violated = violated_pairs(&pos, pairs, h);
        if violated.is_empty() {
            return Ok((pos, passes));
        }
        if passes as usize >= MAX_REPAIR_PASSES {
            let listing: Vec<String> = violated
                .iter()
                .map(|(i, j, e)| format!("({i},{j}) over by {e:.3e}"))
                .collect();
            return Err(FbrError::SolverFailure(format!(
                "repair loop did not converge within {MAX_REPAIR_PASSES} passes; violated: {}",
                listing.join(", ")
            )));
        }
        passes += 1;
        violated.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0).then(a.1.cmp(&b.1))));
        for (i, j, _) in violated {
            if pos[i].dist(pos[j]) > h + TAU_GEO {
                realize_pair(&mut pos, &graph, i, j, h);
            }
        }
    }
}

/// Sequential cascaded relocation: realizes each augmentation edge in
/// descending order of its current slack (ties by index pair), cascading
/// over the graph of existing plus already-realized edges, then runs a
/// verify-and-repair loop until every constraint in the union holds.
pub fn scr(config: &RobotConfig, ea: &AugmentationSet) -> Result<MoveSolution> {
    let g = comm_graph(config);
    let h = config.h();
    let mut pos = config.positions().to_vec();
    if ea.edges.is_empty() {
        return Ok(MoveSolution::identity(config));
    }

    let mut realized: Vec<(usize, usize)> = g.edges().to_vec();
    let mut remaining: Vec<(usize, usize)> = ea.pairs().collect();
    while !remaining.is_empty() {
        let (idx, _) = remaining
            .iter()
            .enumerate()
            .map(|(idx, &(i, j))| {
                let w = (pos[i].dist(pos[j]) - h).max(0.0);
                (idx, (i, j), w)
            })
            // descending weight, ties by ascending index pair
            .max_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(b.1.cmp(&a.1)))
            .map(|(idx, pair, _)| (idx, pair))
            .unwrap();
        let (i, j) = remaining.remove(idx);
        let graph = CommGraph::from_edges(config.n(), realized.iter().copied());
        realize_pair(&mut pos, &graph, i, j, h);
        realized.push((i, j));
    }

    let constraints = EdgeConstraintSet::new(realized);
    let (pos, passes) = repair_edges(pos, constraints.pairs(), config.n(), h)?;
    Ok(MoveSolution::from_positions(config, pos, passes))
}

/// Any feasible solution must close at least half of the largest
/// constraint slack, so this is a certified lower bound on the minmax.
pub fn mm_lower_bound(config: &RobotConfig, constraints: &EdgeConstraintSet) -> f64 {
    let pts = config.positions();
    let h = config.h();
    constraints
        .pairs()
        .iter()
        .map(|&(i, j)| (pts[i].dist(pts[j]) - h).max(0.0) / 2.0)
        .fold(0.0, f64::max)
}

fn constraint_residual(
    pos: &[Point],
    original: &[Point],
    pairs: &[(usize, usize)],
    rho: f64,
    h: f64,
) -> f64 {
    let ball = pos
        .iter()
        .zip(original)
        .map(|(p, o)| p.dist(*o) - rho)
        .fold(0.0f64, f64::max);
    let pair = pairs
        .iter()
        .map(|&(i, j)| pos[i].dist(pos[j]) - h)
        .fold(0.0f64, f64::max);
    ball.max(pair)
}

/// One cyclic-projection feasibility probe. Pair projections run first and
/// ball projections last, so accepted iterates never exceed the radius.
fn feasibility_probe(
    config: &RobotConfig,
    pairs: &[(usize, usize)],
    rho: f64,
    start: &[Point],
    max_sweeps: usize,
    tol: f64,
) -> (bool, Vec<Point>) {
    let original = config.positions();
    let h = config.h();
    let mut pos = start.to_vec();

    if rho <= 0.0 {
        // nothing may move: feasible iff the start positions already satisfy everything
        let pos = original.to_vec();
        let ok = constraint_residual(&pos, original, pairs, 0.0, h) <= tol;
        return (ok, pos);
    }

    let mut best_residual = f64::INFINITY;
    let mut last_improvement = 0usize;
    for sweep in 0..max_sweeps {
        for &(i, j) in pairs {
            let d = pos[i].dist(pos[j]);
            if d > h {
                let shift = (d - h) / 2.0 / d;
                let delta = pos[j].sub(pos[i]).scale(shift);
                pos[i] = pos[i].add(delta);
                pos[j] = pos[j].sub(delta);
            }
        }
        for (p, o) in pos.iter_mut().zip(original) {
            let d = p.dist(*o);
            if d > rho {
                *p = o.add(p.sub(*o).scale(rho / d));
            }
        }
        let residual = constraint_residual(&pos, original, pairs, rho, h);
        if residual <= tol {
            return (true, pos);
        }
        if residual < best_residual - tol * 1e-3 {
            best_residual = residual;
            last_improvement = sweep;
        } else if sweep - last_improvement > 200 {
            // converged to a limit cycle: treat as infeasible (safe direction)
            return (false, pos);
        }
    }
    (false, pos)
}

/// Decides whether positions exist within displacement `rho` of the
/// originals satisfying every pair constraint. One-sided: a `false` answer
/// may also mean the projections failed to converge.
pub fn mm_feasible(
    config: &RobotConfig,
    constraints: &EdgeConstraintSet,
    rho: f64,
) -> (bool, Vec<Point>) {
    feasibility_probe(
        config,
        constraints.pairs(),
        rho,
        config.positions(),
        MAX_SWEEPS,
        TAU_FEAS,
    )
}

/// Optimal movement minimization by bisection on the displacement radius.
/// `upper` optionally supplies a known feasible radius with its witness
/// positions (for instance from [`scr`]); otherwise everyone-to-the-centroid
/// is used as the initial bracket.
pub fn mm_opt_with_upper(
    config: &RobotConfig,
    constraints: &EdgeConstraintSet,
    upper: Option<(f64, Vec<Point>)>,
) -> MoveSolution {
    let original = config.positions();
    let pairs = constraints.pairs();
    let tau_bis = (config.diameter() * 1e-8).max(1e-12);

    let mut lo = mm_lower_bound(config, constraints);
    let (feasible_at_lo, pos_lo) =
        feasibility_probe(config, pairs, lo, original, MAX_SWEEPS, TAU_PROBE);
    if feasible_at_lo {
        return MoveSolution::from_positions(config, pos_lo, 1);
    }

    let (mut hi, mut best_pos) = match upper {
        Some((u, witness)) => (u, witness),
        None => {
            let inv = 1.0 / config.n() as f64;
            let centroid = original
                .iter()
                .fold(Point::default(), |acc, p| acc.add(*p))
                .scale(inv);
            let radius = original
                .iter()
                .map(|p| p.dist(centroid))
                .fold(0.0, f64::max);
            (radius, vec![centroid; config.n()])
        }
    };

    let mut probes = 1u32;
    while hi - lo > tau_bis {
        let mid = 0.5 * (lo + hi);
        probes += 1;
        // warm start from the best feasible witness so far
        let (ok, pos) = feasibility_probe(config, pairs, mid, &best_pos, MAX_SWEEPS, TAU_PROBE);
        if ok {
            hi = mid;
            best_pos = pos;
        } else {
            lo = mid;
        }
    }
    MoveSolution::from_positions(config, best_pos, probes)
}

/// Optimal movement minimization for a constraint set, bracketed by the
/// certified lower bound and a centroid fallback.
pub fn mm_opt(config: &RobotConfig, constraints: &EdgeConstraintSet) -> MoveSolution {
    mm_opt_with_upper(config, constraints, None)
}
