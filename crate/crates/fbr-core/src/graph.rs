//! Communication/repair graphs, connectivity, biconnectivity, and the
//! block-cut tree.

use crate::error::{FbrError, Result};
use crate::geometry::{edge_weight, RobotConfig, TAU_GEO};
use std::collections::VecDeque;

/// Unweighted communication graph: an edge per robot pair within the
/// communication radius. Also used as a plain undirected graph container
/// for augmented (abstract) edge sets.
#[derive(Debug, Clone)]
pub struct CommGraph {
    n: usize,
    /// Sorted adjacency lists.
    adj: Vec<Vec<usize>>,
    /// Lexicographically sorted edge list, each pair with `i < j`.
    edges: Vec<(usize, usize)>,
}

impl CommGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut list: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &list {
            debug_assert!(a != b && b < n);
            adj[a].push(b);
            adj[b].push(a);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        CommGraph { n, adj, edges: list }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&(a, b)).is_ok()
    }
}

/// Builds the communication graph of a config: an edge wherever the pair
/// distance is at most `h + TAU_GEO`.
pub fn comm_graph(config: &RobotConfig) -> CommGraph {
    let pts = config.positions();
    let h = config.h();
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].dist(pts[j]) <= h + TAU_GEO {
                edges.push((i, j));
            }
        }
    }
    CommGraph::from_edges(pts.len(), edges)
}

/// Complete weighted graph over the robots; the weight of a pair is its
/// slack beyond the communication radius (zero on communication edges).
#[derive(Debug, Clone)]
pub struct RepairGraph {
    n: usize,
    /// Upper-triangular weights, row-major over pairs `i < j`.
    weights: Vec<f64>,
}

impl RepairGraph {
    fn index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // offset of row a in the strict upper triangle
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[self.index(i, j)]
    }

    pub fn pair_count(&self) -> usize {
        self.weights.len()
    }
}

pub fn repair_graph(config: &RobotConfig) -> RepairGraph {
    let pts = config.positions();
    let h = config.h();
    let n = pts.len();
    let mut weights = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            weights.push(edge_weight(pts[i], pts[j], h));
        }
    }
    RepairGraph { n, weights }
}

pub fn is_connected(g: &CommGraph) -> bool {
    if g.n == 0 {
        return true;
    }
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == g.n
}

/// State for the lowpoint depth-first traversal shared by the articulation
/// point search and the block decomposition.
struct LowpointDfs<'a> {
    g: &'a CommGraph,
    disc: Vec<usize>,
    low: Vec<usize>,
    timer: usize,
    is_cut: Vec<bool>,
    edge_stack: Vec<(usize, usize)>,
    block_edges: Vec<Vec<(usize, usize)>>,
}

const UNSET: usize = usize::MAX;

impl<'a> LowpointDfs<'a> {
    fn new(g: &'a CommGraph) -> Self {
        LowpointDfs {
            g,
            disc: vec![UNSET; g.n],
            low: vec![UNSET; g.n],
            timer: 0,
            is_cut: vec![false; g.n],
            edge_stack: Vec::new(),
            block_edges: Vec::new(),
        }
    }

    fn run(&mut self, root: usize) {
        self.visit(root, UNSET);
    }

    fn visit(&mut self, u: usize, parent: usize) {
        self.disc[u] = self.timer;
        self.low[u] = self.timer;
        self.timer += 1;
        let mut children = 0;
        for idx in 0..self.g.neighbors(u).len() {
            let v = self.g.neighbors(u)[idx];
            if v == parent {
                continue;
            }
            if self.disc[v] == UNSET {
                children += 1;
                self.edge_stack.push((u, v));
                self.visit(v, u);
                self.low[u] = self.low[u].min(self.low[v]);
                if self.low[v] >= self.disc[u] {
                    if parent != UNSET {
                        self.is_cut[u] = true;
                    }
                    // pop one block's edges, (u, v) inclusive
                    let mut block = Vec::new();
                    while let Some(e) = self.edge_stack.pop() {
                        block.push(e);
                        if e == (u, v) {
                            break;
                        }
                    }
                    self.block_edges.push(block);
                }
            } else if self.disc[v] < self.disc[u] {
                self.edge_stack.push((u, v));
                self.low[u] = self.low[u].min(self.disc[v]);
            }
        }
        if parent == UNSET && children > 1 {
            self.is_cut[u] = true;
        }
    }
}

/// Articulation points of a connected graph with at least 3 vertices.
pub fn articulation_points(g: &CommGraph) -> Result<Vec<usize>> {
    if g.n < 3 {
        return Err(FbrError::InvalidInput(format!(
            "articulation points need n >= 3, got {}",
            g.n
        )));
    }
    if !is_connected(g) {
        return Err(FbrError::Disconnected);
    }
    let mut dfs = LowpointDfs::new(g);
    dfs.run(0);
    Ok((0..g.n).filter(|&v| dfs.is_cut[v]).collect())
}

/// True iff the graph is connected and has no articulation point.
pub fn is_biconnected(g: &CommGraph) -> bool {
    if g.n < 3 || !is_connected(g) {
        return false;
    }
    articulation_points(g).map(|c| c.is_empty()).unwrap_or(false)
}

/// Bipartite tree over the blocks (maximal 2-connected subgraphs; bridges
/// count as 2-vertex blocks) and cut vertices of a connected graph.
///
/// Tree nodes are numbered blocks first: block `b` is node `b`, cut
/// `cuts[k]` is node `blocks.len() + k`.
#[derive(Debug, Clone)]
pub struct BlockCutTree {
    /// Sorted vertex sets, ordered lexicographically.
    pub blocks: Vec<Vec<usize>>,
    /// Sorted cut vertex indices.
    pub cuts: Vec<usize>,
    /// Pairs (block node id, cut node id); an edge exists iff the cut
    /// vertex is a member of the block.
    pub tree_edges: Vec<(usize, usize)>,
    /// BC-tree node of each graph vertex: its cut node if it is a cut
    /// vertex, otherwise its unique containing block.
    vertex_node: Vec<usize>,
}

impl BlockCutTree {
    pub fn node_count(&self) -> usize {
        self.blocks.len() + self.cuts.len()
    }

    pub fn is_block_node(&self, node: usize) -> bool {
        node < self.blocks.len()
    }

    /// The graph vertex behind a cut node.
    pub fn cut_vertex(&self, node: usize) -> usize {
        self.cuts[node - self.blocks.len()]
    }

    pub fn vertex_node(&self, v: usize) -> usize {
        self.vertex_node[v]
    }

    /// Sorted adjacency over tree nodes.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(b, c) in &self.tree_edges {
            adj[b].push(c);
            adj[c].push(b);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        adj
    }
}

/// Decomposes a connected graph into its block-cut tree. A biconnected
/// input yields a single block node and no cut nodes.
pub fn block_cut_tree(g: &CommGraph) -> Result<BlockCutTree> {
    if g.n < 2 {
        return Err(FbrError::InvalidInput(format!(
            "block-cut tree needs n >= 2, got {}",
            g.n
        )));
    }
    if !is_connected(g) {
        return Err(FbrError::Disconnected);
    }
    let mut dfs = LowpointDfs::new(g);
    dfs.run(0);

    let mut blocks: Vec<Vec<usize>> = dfs
        .block_edges
        .iter()
        .map(|edges| {
            let mut verts: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            verts.sort_unstable();
            verts.dedup();
            verts
        })
        .collect();
    blocks.sort();

    let cuts: Vec<usize> = (0..g.n).filter(|&v| dfs.is_cut[v]).collect();
    let cut_node = |v: usize| -> Option<usize> {
        cuts.binary_search(&v).ok().map(|k| blocks.len() + k)
    };

    let mut vertex_node = vec![UNSET; g.n];
    let mut tree_edges = Vec::new();
    for (b, verts) in blocks.iter().enumerate() {
        for &v in verts {
            match cut_node(v) {
                Some(c) => tree_edges.push((b, c)),
                None => vertex_node[v] = b,
            }
        }
    }
    for (k, &v) in cuts.iter().enumerate() {
        vertex_node[v] = blocks.len() + k;
    }
    tree_edges.sort_unstable();

    Ok(BlockCutTree {
        blocks,
        cuts,
        tree_edges,
        vertex_node,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn config(pts: &[(f64, f64)], h: f64) -> RobotConfig {
        RobotConfig::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), h).unwrap()
    }

    #[test]
    fn comm_graph_distance_predicate() {
        let c = config(&[(0.0, 0.0), (0.0, 1.0), (0.0, 3.0)], 1.0);
        let g = comm_graph(&c);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn comm_graph_boundary_distance_counts() {
        // equilateral triangle with side exactly h
        let c = config(&[(0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0)], 1.0);
        let g = comm_graph(&c);
        assert_eq!(g.edges().len(), 3);
    }

    #[test]
    fn comm_graph_dense_square_is_complete() {
        // any 8 points in a unit square are pairwise within 1.5 (diameter sqrt(2))
        let pts = [
            (0.12, 0.94),
            (0.31, 0.05),
            (0.55, 0.47),
            (0.68, 0.92),
            (0.03, 0.33),
            (0.97, 0.11),
            (0.84, 0.61),
            (0.46, 0.76),
        ];
        let g = comm_graph(&config(&pts, 1.5));
        assert_eq!(g.edges().len(), 8 * 7 / 2);
    }

    #[test]
    fn repair_graph_collinear_weights() {
        let c = config(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 1.0);
        let k = repair_graph(&c);
        assert_eq!(k.pair_count(), 3);
        assert_eq!(k.weight(0, 1), 0.0);
        assert_eq!(k.weight(1, 2), 0.0);
        assert!((k.weight(0, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repair_graph_zero_iff_comm_edge() {
        let pts = [(0.0, 0.0), (0.9, 0.1), (1.7, 0.0), (0.4, 1.2), (2.2, 0.9)];
        let c = config(&pts, 1.0);
        let g = comm_graph(&c);
        let k = repair_graph(&c);
        for i in 0..c.n() {
            for j in i + 1..c.n() {
                assert_eq!(g.has_edge(i, j), k.weight(i, j) <= TAU_GEO, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn connectivity_cases() {
        assert!(is_connected(&CommGraph::from_edges(3, [(0, 1), (1, 2)])));
        assert!(!is_connected(&CommGraph::from_edges(3, [(0, 1)])));
        assert!(is_connected(&CommGraph::from_edges(
            4,
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        )));
    }

    #[test]
    fn articulation_of_path_is_middle() {
        let g = CommGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(articulation_points(&g).unwrap(), vec![1]);
    }

    #[test]
    fn articulation_of_cycle_is_empty() {
        let g = CommGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(articulation_points(&g).unwrap().is_empty());
    }

    #[test]
    fn articulation_of_bowtie_is_shared_vertex() {
        let g = CommGraph::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(articulation_points(&g).unwrap(), vec![2]);
    }

    #[test]
    fn articulation_rejects_disconnected() {
        let g = CommGraph::from_edges(4, [(0, 1), (2, 3)]);
        assert!(matches!(
            articulation_points(&g),
            Err(FbrError::Disconnected)
        ));
    }

    #[test]
    fn biconnectivity_cases() {
        let cycle5 = CommGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(is_biconnected(&cycle5));
        let path5 = CommGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(!is_biconnected(&path5));
        let k4_minus = CommGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]);
        assert!(is_biconnected(&k4_minus));
    }

    #[test]
    fn bct_of_path() {
        let g = CommGraph::from_edges(3, [(0, 1), (1, 2)]);
        let t = block_cut_tree(&g).unwrap();
        assert_eq!(t.blocks, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(t.cuts, vec![1]);
        assert_eq!(t.tree_edges, vec![(0, 2), (1, 2)]);
        assert_eq!(t.node_count(), 3);
    }

    #[test]
    fn bct_of_cycle_is_single_block() {
        let g = CommGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let t = block_cut_tree(&g).unwrap();
        assert_eq!(t.blocks, vec![vec![0, 1, 2, 3]]);
        assert!(t.cuts.is_empty());
        assert!(t.tree_edges.is_empty());
    }

    /// Brute-force block enumeration: maximal vertex sets that induce a
    /// connected subgraph with no cut vertex (an edge for two-vertex sets).
    fn brute_blocks(g: &CommGraph) -> Vec<Vec<usize>> {
        let n = g.n();
        assert!(n <= 8);
        let qualifies = |mask: u32| -> bool {
            let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if verts.len() < 2 {
                return false;
            }
            let mut idx = vec![usize::MAX; n];
            for (k, &v) in verts.iter().enumerate() {
                idx[v] = k;
            }
            let sub = CommGraph::from_edges(
                verts.len(),
                g.edges()
                    .iter()
                    .filter(|&&(a, b)| idx[a] != usize::MAX && idx[b] != usize::MAX)
                    .map(|&(a, b)| (idx[a], idx[b])),
            );
            if verts.len() == 2 {
                return sub.edges().len() == 1;
            }
            is_biconnected(&sub)
        };
        let mut maximal = Vec::new();
        for mask in 1u32..1 << n {
            if !qualifies(mask) {
                continue;
            }
            let is_max = (0..n)
                .filter(|&v| mask >> v & 1 == 0)
                .all(|v| !qualifies(mask | 1 << v));
            if is_max {
                let mut verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                verts.sort_unstable();
                maximal.push(verts);
            }
        }
        maximal.sort();
        maximal
    }

    #[test]
    fn bct_of_bowtie_matches_brute_force() {
        let g = CommGraph::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]);
        let t = block_cut_tree(&g).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert_eq!(t.cuts, vec![2]);
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.tree_edges.len(), 2);
        assert_eq!(t.blocks, brute_blocks(&g));
    }

    #[test]
    fn bct_with_bridge_matches_brute_force() {
        // triangle 0-1-2, bridge 2-3, triangle 3-4-5
        let g = CommGraph::from_edges(
            6,
            [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
        );
        let t = block_cut_tree(&g).unwrap();
        assert_eq!(t.blocks, brute_blocks(&g));
        assert_eq!(t.cuts, vec![2, 3]);
        // bridge becomes a 2-vertex block
        assert!(t.blocks.contains(&vec![2, 3]));
    }

    #[test]
    fn bct_invariants_on_samples() {
        let samples = [
            CommGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]),
            CommGraph::from_edges(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]),
            CommGraph::from_edges(
                7,
                [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (4, 6)],
            ),
        ];
        for g in &samples {
            let t = block_cut_tree(g).unwrap();
            // union of blocks covers V
            let mut covered = vec![false; g.n()];
            for b in &t.blocks {
                for &v in b {
                    covered[v] = true;
                }
            }
            assert!(covered.iter().all(|&c| c));
            // pairwise block intersections are single cut vertices
            for i in 0..t.blocks.len() {
                for j in i + 1..t.blocks.len() {
                    let inter: Vec<usize> = t.blocks[i]
                        .iter()
                        .filter(|v| t.blocks[j].contains(v))
                        .copied()
                        .collect();
                    assert!(inter.len() <= 1);
                    if let Some(&v) = inter.first() {
                        assert!(t.cuts.contains(&v));
                    }
                }
            }
            // every cut vertex appears in at least two blocks
            for &c in &t.cuts {
                let count = t.blocks.iter().filter(|b| b.contains(&c)).count();
                assert!(count >= 2, "cut {c} in {count} blocks");
            }
            // the tree is a tree: connected with node_count - 1 edges
            assert_eq!(t.tree_edges.len(), t.node_count() - 1);
            let tree = CommGraph::from_edges(t.node_count(), t.tree_edges.iter().copied());
            assert!(is_connected(&tree));
            // tree edges join a block node and a cut node
            for &(b, c) in &t.tree_edges {
                assert!(t.is_block_node(b));
                assert!(!t.is_block_node(c));
                assert!(t.blocks[b].contains(&t.cut_vertex(c)));
            }
        }
    }
}
