//! Undirected simple graphs with hop-count shortest paths.
//!
//! Nodes are the dense integers `0..n`. Adjacency lists are kept sorted so
//! that membership tests are binary searches and every traversal visits
//! neighbors in the same order on every run.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Marker for nodes that cannot be reached from the BFS source.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

/// Node positions for spatial models, one `(x, y)` pair per node.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Coordinates(pub Vec<(f64, f64)>);

/// Hop distances from a single source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceRow {
    pub source: usize,
    /// `UNREACHABLE` where no path exists.
    pub dist: Vec<u32>,
}

impl DistanceRow {
    pub fn get(&self, node: usize) -> Option<u32> {
        match self.dist[node] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge iterator, rejecting self-loops and repeats.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from neighbor sets that are already symmetric and loop-free.
    pub(crate) fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let degree_sum: usize = adjacency.iter().map(Vec::len).sum();
        debug_assert!(adjacency.iter().all(|a| a.windows(2).all(|w| w[0] < w[1])));
        Graph {
            adjacency,
            edge_count: degree_sum / 2,
        }
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Graph::from_sorted_adjacency(adjacency)
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 nodes");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    /// Star with node 0 as the hub and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star edges are valid")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Number of unordered node pairs that are not yet joined by an edge.
    pub fn non_adjacent_pairs(&self) -> usize {
        let n = self.node_count();
        n * n.saturating_sub(1) / 2 - self.edge_count
    }

    fn check_node(&self, node: usize) -> Result<(), GraphError> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node,
                n: self.node_count(),
            })
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let pos_u = match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u, v)),
            Err(pos) => pos,
        };
        self.adjacency[u].insert(pos_u, v);
        let pos_v = self.adjacency[v]
            .binary_search(&u)
            .expect_err("adjacency lists out of sync");
        self.adjacency[v].insert(pos_v, u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn bfs_distances(&self, source: usize) -> Result<DistanceRow, GraphError> {
        self.check_node(source)?;
        let mut dist = vec![UNREACHABLE; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &v in &self.adjacency[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
        Ok(DistanceRow { source, dist })
    }

    pub fn is_connected(&self) -> bool {
        match self.node_count() {
            0 => true,
            _ => self
                .bfs_distances(0)
                .map(|row| row.dist.iter().all(|&d| d != UNREACHABLE))
                .unwrap_or(false),
        }
    }

    /// Average shortest path length over all unordered pairs.
    ///
    /// Sources are processed 64 at a time: each node carries one bit per
    /// source in the current block, and a BFS level is a single pass of
    /// word-wide ORs over the edge list.
    pub fn aspl(&self) -> Result<f64, GraphError> {
        let n = self.node_count();
        if n < 2 {
            return Err(GraphError::TooSmall(n));
        }
        let blocks: Vec<usize> = (0..n).step_by(64).collect();
        let totals: Vec<Option<u64>> = blocks
            .par_iter()
            .map(|&start| self.distance_sum_block(start, (start + 64).min(n)))
            .collect();
        let mut sum = 0u64;
        for block in totals {
            sum += block.ok_or(GraphError::DisconnectedGraph)?;
        }
        // `sum` counts each unordered pair twice.
        Ok(sum as f64 / (n as f64 * (n - 1) as f64))
    }

    /// Sum of distances from sources `start..end` to every node, or `None`
    /// if some source cannot reach some node.
    fn distance_sum_block(&self, start: usize, end: usize) -> Option<u64> {
        let n = self.node_count();
        let width = end - start;
        let full: u64 = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let mut visited = vec![0u64; n];
        let mut frontier = vec![0u64; n];
        let mut next = vec![0u64; n];
        for (bit, s) in (start..end).enumerate() {
            visited[s] |= 1 << bit;
            frontier[s] |= 1 << bit;
        }
        let mut sum = 0u64;
        let mut level = 0u64;
        loop {
            level += 1;
            let mut grew = false;
            for v in 0..n {
                if visited[v] == full {
                    next[v] = 0;
                    continue;
                }
                let mut reach = 0u64;
                for &u in &self.adjacency[v] {
                    reach |= frontier[u];
                }
                reach &= !visited[v];
                next[v] = reach;
                if reach != 0 {
                    grew = true;
                    sum += level * u64::from(reach.count_ones());
                }
            }
            if !grew {
                break;
            }
            for v in 0..n {
                visited[v] |= next[v];
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        visited.iter().all(|&w| w == full).then_some(sum)
    }

    /// Nodes at hop distance exactly 2 from `u`, ascending.
    pub fn second_neighborhood(&self, u: usize) -> Result<Vec<usize>, GraphError> {
        self.check_node(u)?;
        let mut out: Vec<usize> = self.adjacency[u]
            .iter()
            .flat_map(|&w| self.adjacency[w].iter().copied())
            .filter(|&x| x != u && !self.has_edge(u, x))
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Largest connected component, relabelled densely in ascending original id.
    ///
    /// Ties between equally large components go to the one holding the
    /// smallest original id. The mapping has one entry per original node.
    pub fn largest_connected_component(&self) -> (Graph, Vec<Option<usize>>) {
        let n = self.node_count();
        let mut best: Vec<usize> = Vec::new();
        for comp in self.connected_components() {
            // components arrive ordered by smallest member, so `>` keeps the first of a tie
            if comp.len() > best.len() {
                best = comp;
            }
        }
        let mut mapping = vec![None; n];
        for (new, &old) in best.iter().enumerate() {
            mapping[old] = Some(new);
        }
        let adjacency = best
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .map(|&v| mapping[v].expect("neighbor lies in the same component"))
                    .collect()
            })
            .collect();
        (Graph::from_sorted_adjacency(adjacency), mapping)
    }

    /// Order-sensitive FNV-1a digest of the edge set, used to confirm
    /// that different runs start from the same instance.
    pub fn fingerprint(&self) -> u64 {
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for byte in x.to_le_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(PRIME);
            }
        };
        feed(self.node_count() as u64);
        for (u, v) in self.edges() {
            feed(u as u64);
            feed(v as u64);
        }
        hash
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::complete(3)
    }

    #[test]
    fn add_edge_closes_path_into_triangle() {
        let mut g = Graph::path(3);
        g.add_edge(0, 2).unwrap();
        assert_eq!(g, triangle());
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn add_edge_errors() {
        let mut g = Graph::new(2);
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(triangle().add_edge(0, 1), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(triangle().add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            triangle().add_edge(0, 3),
            Err(GraphError::NodeOutOfRange { node: 3, n: 3 })
        );
    }

    #[test]
    fn bfs_on_path() {
        let row = Graph::path(4).bfs_distances(0).unwrap();
        assert_eq!(row.dist, vec![0, 1, 2, 3]);
        assert!(Graph::path(4).bfs_distances(4).is_err());
    }

    #[test]
    fn single_shortcut_shrinks_distance() {
        // A = 0, B = 5; a detour hangs off the path but never shortens it
        let mut g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 6), (6, 7), (7, 3)])
            .unwrap();
        assert_eq!(g.bfs_distances(0).unwrap().get(5), Some(5));
        g.add_edge(0, 4).unwrap();
        assert_eq!(g.bfs_distances(0).unwrap().get(5), Some(2));
    }

    #[test]
    fn unreachable_marker() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let row = g.bfs_distances(0).unwrap();
        assert_eq!(row.get(2), None);
        assert_eq!(row.dist[2], UNREACHABLE);
    }

    #[test]
    fn aspl_small_cases() {
        assert_eq!(triangle().aspl().unwrap(), 1.0);
        assert!((Graph::path(4).aspl().unwrap() - 10.0 / 6.0).abs() < 1e-12);
        assert_eq!(Graph::new(1).aspl(), Err(GraphError::TooSmall(1)));
        assert_eq!(
            Graph::from_edges(3, [(0, 1)]).unwrap().aspl(),
            Err(GraphError::DisconnectedGraph)
        );
    }

    #[test]
    fn aspl_spans_multiple_blocks() {
        // 150 nodes exercises a full 64-wide block and a partial one
        let n = 150;
        let expected = (n as f64 + 1.0) / 3.0;
        assert!((Graph::path(n).aspl().unwrap() - expected).abs() < 1e-12);
        for n in [2, 63, 64, 65, 128, 130] {
            assert_eq!(Graph::complete(n).aspl().unwrap(), 1.0, "K_{n}");
        }
    }

    #[test]
    fn lcc_tie_goes_to_smallest_id() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let (lcc, mapping) = g.largest_connected_component();
        assert_eq!(lcc, triangle());
        assert_eq!(mapping, vec![Some(0), Some(1), Some(2), None, None, None]);
    }

    #[test]
    fn lcc_identity_and_isolated() {
        let p = Graph::path(5);
        let (lcc, mapping) = p.largest_connected_component();
        assert_eq!(lcc, p);
        assert_eq!(mapping, (0..5).map(Some).collect::<Vec<_>>());

        let g = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let (lcc, mapping) = g.largest_connected_component();
        assert_eq!(lcc, Graph::path(3));
        assert_eq!(mapping[3], None);

        // larger component wins regardless of ids
        let g = Graph::from_edges(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
        let (lcc, mapping) = g.largest_connected_component();
        assert_eq!(lcc, Graph::path(3));
        assert_eq!(mapping, vec![None, None, Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn second_neighborhoods() {
        assert_eq!(Graph::path(4).second_neighborhood(0).unwrap(), vec![2]);
        assert!(triangle().second_neighborhood(0).unwrap().is_empty());
        assert_eq!(Graph::star(3).second_neighborhood(1).unwrap(), vec![2, 3]);
    }

    #[test]
    fn non_adjacent_pairs_counts() {
        assert_eq!(Graph::complete(5).non_adjacent_pairs(), 0);
        assert_eq!(Graph::path(4).non_adjacent_pairs(), 3);
    }

    #[test]
    fn fingerprint_tracks_edges() {
        let mut g = Graph::path(4);
        let before = g.fingerprint();
        assert_eq!(before, Graph::path(4).fingerprint());
        g.add_edge(0, 3).unwrap();
        assert_ne!(before, g.fingerprint());
    }
}
