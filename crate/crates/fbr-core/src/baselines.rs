//! Competing reference algorithms: block translation (whole leaf blocks
//! slide toward their parent cut vertex until blocks merge) and single
//! cascaded relocation (the removed robot's best neighbor slides into the
//! hole it left).

use crate::error::{FbrError, Result};
use crate::geometry::{Point, RobotConfig};
use crate::graph::{block_cut_tree, comm_graph, is_connected, BlockCutTree};
use crate::relocate::MoveSolution;
use std::collections::VecDeque;

/// Where the failed robot was, and which robots were adjacent to it.
#[derive(Debug, Clone)]
pub struct RemovedVertexInfo {
    pub position: Point,
    pub neighbor_indices: Vec<usize>,
}

/// BT translation step, as a fraction of the communication radius.
const BT_STEP_DIVISOR: f64 = 20.0;
const BT_REFINE_STEPS: usize = 10;

fn rooted_parents(t: &BlockCutTree, root: usize) -> Vec<usize> {
    let adj = t.adjacency();
    let mut parent = vec![usize::MAX; t.node_count()];
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    parent
}

/// True when every vertex of both sets lies in one common block.
fn blocks_merged(positions: &[Point], h: f64, set_a: &[usize], set_b: &[usize]) -> Result<bool> {
    let config = RobotConfig::new(positions.to_vec(), h)?;
    let g = comm_graph(&config);
    if !is_connected(&g) {
        return Ok(false);
    }
    let t = block_cut_tree(&g)?;
    Ok(t.blocks
        .iter()
        .any(|b| set_a.iter().chain(set_b).all(|v| b.contains(v))))
}

/// Block translation: repeatedly root the block-cut tree at the largest
/// block and slide every leaf block (minus its anchoring cut vertex)
/// toward that cut vertex until leaf and parent block merge, re-deriving
/// the tree after each pass, until a single block remains.
pub fn bt(config: &RobotConfig) -> Result<MoveSolution> {
    let h = config.h();
    let n = config.n();
    let mut pos = config.positions().to_vec();

    for iteration in 0..n as u32 {
        let g = comm_graph(&RobotConfig::new(pos.clone(), h)?);
        if !is_connected(&g) {
            return Err(FbrError::SolverFailure(
                "block translation disconnected the graph".into(),
            ));
        }
        let t = block_cut_tree(&g)?;
        if t.blocks.len() == 1 {
            return Ok(MoveSolution::from_positions(config, pos, iteration));
        }
        // root block: maximum vertex count, ties by lowest block id
        let root = (0..t.blocks.len())
            .max_by(|&a, &b| t.blocks[a].len().cmp(&t.blocks[b].len()).then(b.cmp(&a)))
            .unwrap();
        let parent = rooted_parents(&t, root);
        let adj = t.adjacency();
        let leaves: Vec<usize> = (0..t.blocks.len())
            .filter(|&b| b != root && adj[b].len() == 1)
            .collect();

        for leaf in leaves {
            let cut_node = parent[leaf];
            let cut_vertex = t.cut_vertex(cut_node);
            let parent_block = parent[cut_node];
            let moving: Vec<usize> = t.blocks[leaf]
                .iter()
                .copied()
                .filter(|&v| v != cut_vertex)
                .collect();
            if moving.is_empty() {
                continue;
            }
            let centroid = moving
                .iter()
                .fold(Point::default(), |acc, &v| acc.add(pos[v]))
                .scale(1.0 / moving.len() as f64);
            let to_cut = pos[cut_vertex].sub(centroid);
            let reach = to_cut.dist(Point::default());
            if reach < 1e-12 {
                continue;
            }
            let dir = to_cut.scale(1.0 / reach);
            let step = h / BT_STEP_DIVISOR;
            let max_steps = ((reach + 4.0 * h) / step).ceil() as usize;

            let base = pos.clone();
            let translated = |dist: f64| -> Vec<Point> {
                let mut p = base.clone();
                for &v in &moving {
                    p[v] = base[v].add(dir.scale(dist));
                }
                p
            };
            let mut merged_at = None;
            for k in 1..=max_steps {
                let candidate = translated(step * k as f64);
                if blocks_merged(&candidate, h, &t.blocks[leaf], &t.blocks[parent_block])? {
                    merged_at = Some(k);
                    break;
                }
            }
            let k = merged_at.ok_or_else(|| {
                FbrError::SolverFailure(format!(
                    "leaf block failed to merge within {max_steps} steps"
                ))
            })?;
            // bisection refine between the last non-merged and first merged step
            let mut lo = step * (k - 1) as f64;
            let mut hi = step * k as f64;
            for _ in 0..BT_REFINE_STEPS {
                let mid = 0.5 * (lo + hi);
                if blocks_merged(&translated(mid), h, &t.blocks[leaf], &t.blocks[parent_block])? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            pos = translated(hi);
        }
    }
    Err(FbrError::SolverFailure(format!(
        "block translation exceeded the {n}-iteration cap"
    )))
}

/// Earliest parameter t in [0,1] along the segment where the moving point
/// is within `h` of every anchor; `None` if no such point exists.
fn earliest_covering_t(from: Point, to: Point, anchors: &[Point], h: f64) -> Option<f64> {
    let seg = to.sub(from);
    let seg_len2 = seg.x * seg.x + seg.y * seg.y;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for &a in anchors {
        // |from + t*seg - a|^2 <= h^2, quadratic in t
        let rel = from.sub(a);
        let qa = seg_len2;
        let qb = 2.0 * (rel.x * seg.x + rel.y * seg.y);
        let qc = rel.x * rel.x + rel.y * rel.y - h * h;
        if qa < 1e-18 {
            if qc > 0.0 {
                return None;
            }
            continue;
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        lo = lo.max((-qb - sq) / (2.0 * qa));
        hi = hi.min((-qb + sq) / (2.0 * qa));
    }
    (lo <= hi).then_some(lo)
}

/// Cascaded relocation baseline: the former neighbor closest to the
/// removed robot's position slides along the segment toward it, stopping
/// at the earliest point within range of all former neighbors (or at the
/// removed position if none exists), then one cascaded relocation plus a
/// verify-and-repair loop restores its broken edges.
pub fn cr(config: &RobotConfig, removed: &RemovedVertexInfo) -> Result<MoveSolution> {
    if removed.neighbor_indices.is_empty() {
        return Err(FbrError::InvalidInput(
            "removed vertex has no recorded neighbors".into(),
        ));
    }
    if let Some(&bad) = removed
        .neighbor_indices
        .iter()
        .find(|&&v| v >= config.n())
    {
        return Err(FbrError::InvalidInput(format!(
            "neighbor index {bad} out of range"
        )));
    }
    let h = config.h();
    let pts = config.positions();
    let g = comm_graph(config);

    let bn = removed
        .neighbor_indices
        .iter()
        .copied()
        .min_by(|&a, &b| {
            pts[a]
                .dist(removed.position)
                .partial_cmp(&pts[b].dist(removed.position))
                .unwrap()
                .then(a.cmp(&b))
        })
        .unwrap();

    let anchors: Vec<Point> = removed
        .neighbor_indices
        .iter()
        .filter(|&&v| v != bn)
        .map(|&v| pts[v])
        .collect();
    let t = earliest_covering_t(pts[bn], removed.position, &anchors, h).unwrap_or(1.0);
    let target = pts[bn].lerp(removed.position, t);

    let pos = crate::relocate::cascaded_relocation(pts, &g, bn, target, h);
    let (pos, passes) = crate::relocate::repair_edges(pos, g.edges(), config.n(), h)?;

    let out = RobotConfig::new(pos.clone(), h)?;
    let g_out = comm_graph(&out);
    if !crate::graph::is_biconnected(&g_out) {
        return Err(FbrError::SolverFailure(
            "cascaded relocation did not restore biconnectivity".into(),
        ));
    }
    Ok(MoveSolution::from_positions(config, pos, passes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::ea_scr;
    use crate::graph::is_biconnected;

    fn config(pts: &[(f64, f64)], h: f64) -> RobotConfig {
        RobotConfig::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), h).unwrap()
    }

    #[test]
    fn bt_zero_movement_when_biconnected() {
        let c = config(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)], 1.0);
        let sol = bt(&c).unwrap();
        assert_eq!(sol.minmax, 0.0);
    }

    #[test]
    fn bt_biconnects_three_robot_path() {
        let c = config(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 1.0);
        let sol = bt(&c).unwrap();
        let out = RobotConfig::new(sol.new_positions.clone(), c.h()).unwrap();
        assert!(is_biconnected(&comm_graph(&out)));
        assert!(sol.minmax > 0.0);
    }

    /// Three triangle blocks in an L shape: the block translations move
    /// whole groups and end up strictly worse than edge augmentation plus
    /// cascaded relocation.
    #[test]
    fn bt_worse_than_ea_scr_on_l_shaped_blocks() {
        let pts = [
            (0.0, 0.0),   // 0 block A
            (0.4, 0.8),   // 1 block A
            (1.0, 0.0),   // 2 cut A/B
            (2.0, 0.0),   // 3 cut B/C
            (1.6, 0.8),   // 4 block B
            (2.0, -1.0),  // 5 block C
            (2.8, -0.6),  // 6 block C
        ];
        let c = config(&pts, 1.0);
        let g = comm_graph(&c);
        assert!(is_connected(&g) && !is_biconnected(&g));
        let t = block_cut_tree(&g).unwrap();
        assert_eq!(t.blocks.len(), 3);

        let bt_sol = bt(&c).unwrap();
        let scr_sol = ea_scr(&c).unwrap();
        let out = RobotConfig::new(bt_sol.new_positions.clone(), c.h()).unwrap();
        assert!(is_biconnected(&comm_graph(&out)));
        assert!(
            scr_sol.minmax < bt_sol.minmax,
            "ea-scr {} should beat bt {}",
            scr_sol.minmax,
            bt_sol.minmax
        );
    }

    #[test]
    fn bt_moves_leaf_blocks_rigidly() {
        let pts = [
            (0.0, 0.0),
            (0.4, 0.8),
            (1.0, 0.0),
            (2.0, 0.0),
            (1.6, 0.8),
            (2.0, -1.0),
            (2.8, -0.6),
        ];
        let c = config(&pts, 1.0);
        let g = comm_graph(&c);
        let t = block_cut_tree(&g).unwrap();
        let sol = bt(&c).unwrap();
        // within each original block, pairwise distances among vertices
        // that moved together stay equal (they only ever translate)
        for block in &t.blocks {
            let moved: Vec<usize> = block
                .iter()
                .copied()
                .filter(|&v| sol.new_positions[v] != c.positions()[v])
                .collect();
            for (ai, &a) in moved.iter().enumerate() {
                for &b in &moved[ai + 1..] {
                    let before = c.positions()[a].dist(c.positions()[b]);
                    let after = sol.new_positions[a].dist(sol.new_positions[b]);
                    assert!(
                        (before - after).abs() < 1e-9,
                        "block pair ({a},{b}) deformed"
                    );
                }
            }
        }
    }

    #[test]
    fn cr_slides_into_ring_hole() {
        // arc of 5 robots around a removed hub: hub + arc was biconnected,
        // the arc alone is a bare path
        let removed_pos = Point::new(0.0, 0.0);
        let pts: Vec<(f64, f64)> = (0..5)
            .map(|k| {
                let ang = k as f64 * std::f64::consts::TAU / 6.0;
                (0.95 * ang.cos(), 0.95 * ang.sin())
            })
            .collect();
        let c = config(&pts, 1.0);
        let g = comm_graph(&c);
        assert!(is_connected(&g) && !is_biconnected(&g));
        let removed = RemovedVertexInfo {
            position: removed_pos,
            neighbor_indices: (0..5).collect(),
        };
        let sol = cr(&c, &removed).unwrap();
        let out = RobotConfig::new(sol.new_positions.clone(), c.h()).unwrap();
        assert!(is_biconnected(&comm_graph(&out)));
        // the best neighbor slid most of the way into the hole
        assert!(sol.minmax > 0.5);
    }

    #[test]
    fn cr_zero_movement_when_bn_already_covers() {
        // diamond: removing nothing to fix; BN is already within h of all
        // former neighbors, and the graph is already biconnected
        let pts = [(0.0, 0.0), (0.9, 0.0), (0.45, 0.7), (0.45, -0.7)];
        let c = config(&pts, 1.0);
        let removed = RemovedVertexInfo {
            position: Point::new(0.45, 0.1),
            neighbor_indices: vec![0, 1, 2],
        };
        let sol = cr(&c, &removed).unwrap();
        assert_eq!(sol.minmax, 0.0);
    }

    #[test]
    fn cr_requires_neighbors() {
        let c = config(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 1.0);
        let removed = RemovedVertexInfo {
            position: Point::new(1.0, 1.0),
            neighbor_indices: vec![],
        };
        assert!(cr(&c, &removed).is_err());
    }
}
