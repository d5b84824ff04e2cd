//! Communication-graph analytics: degree of connectivity, connected
//! components, and classification of detached groups.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::arena::Vec2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {0} is not in the graph")]
    UnknownNode(usize),
    #[error("partition does not cover 0..{0} exactly once")]
    BadPartition(usize),
}

/// Undirected, irreflexive graph over nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    adjacency: Vec<Vec<usize>>,
}

impl ConnectivityGraph {
    pub fn empty(n: usize) -> Self {
        ConnectivityGraph {
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds `a — b`. Self-loops and repeated edges are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(
            a < self.len() && b < self.len(),
            "edge endpoint out of range"
        );
        if a == b || self.adjacency[a].contains(&b) {
            return;
        }
        for (x, y) in [(a, b), (b, a)] {
            let list = &mut self.adjacency[x];
            let at = list.partition_point(|&v| v < y);
            list.insert(at, y);
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, node: usize) -> Result<&[usize], GraphError> {
        self.adjacency
            .get(node)
            .map(Vec::as_slice)
            .ok_or(GraphError::UnknownNode(node))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|list| list.binary_search(&b).is_ok())
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Degree of connectivity `k` of one robot.
    pub fn degree(&self, node: usize) -> Result<usize, GraphError> {
        self.neighbors(node).map(<[usize]>::len)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.len() as f64
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<Option<usize>>, GraphError> {
        self.neighbors(source)?;
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have a distance");
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Largest hop distance from `node` to any node it can reach.
    pub fn eccentricity(&self, node: usize) -> Result<usize, GraphError> {
        Ok(self
            .bfs_distances(node)?
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0))
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut parts = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut part = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        part.push(v);
                        queue.push_back(v);
                    }
                }
            }
            part.sort_unstable();
            parts.push(part);
        }
        parts
    }
}

/// Edge `(i, j)` iff the robots are within `radius` of each other.
pub fn build_graph(positions: &[Vec2], radius: f64) -> ConnectivityGraph {
    let mut g = ConnectivityGraph::empty(positions.len());
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i].distance(positions[j]) <= radius {
                g.add_edge(i, j);
            }
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterLabel {
    Main,
    /// Detached but large enough (at least a third of the swarm) to run its
    /// own activity.
    ParallelProcess,
    Lost,
}

impl ClusterLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClusterLabel::Main => "Main",
            ClusterLabel::ParallelProcess => "ParallelProcess",
            ClusterLabel::Lost => "Lost",
        }
    }
}

impl fmt::Display for ClusterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterReport {
    pub components: Vec<Vec<usize>>,
    pub labels: Vec<ClusterLabel>,
}

impl ClusterReport {
    pub fn main(&self) -> &[usize] {
        let at = self
            .labels
            .iter()
            .position(|l| *l == ClusterLabel::Main)
            .expect("a nonempty report has a Main component");
        &self.components[at]
    }

    pub fn label_of(&self, node: usize) -> Option<ClusterLabel> {
        self.components
            .iter()
            .position(|c| c.contains(&node))
            .map(|k| self.labels[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], ClusterLabel)> {
        self.components
            .iter()
            .map(Vec::as_slice)
            .zip(self.labels.iter().copied())
    }
}

/// Labels the largest component `Main` (ties go to the one holding the
/// smallest id), any other with `size / n >= 1/3` `ParallelProcess`, and the
/// rest `Lost`.
pub fn classify(partition: &[Vec<usize>], n: usize) -> Result<ClusterReport, GraphError> {
    let mut covered = vec![false; n];
    for part in partition {
        for &v in part {
            if v >= n || covered[v] {
                return Err(GraphError::BadPartition(n));
            }
            covered[v] = true;
        }
    }
    if covered.iter().any(|c| !c) || partition.iter().any(Vec::is_empty) {
        return Err(GraphError::BadPartition(n));
    }

    let mut components: Vec<Vec<usize>> = partition
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.sort_unstable();
            p
        })
        .collect();
    components.sort_by_key(|p| p[0]);

    let main = components
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .map(|(k, _)| k);
    let labels = components
        .iter()
        .enumerate()
        .map(|(k, part)| {
            if Some(k) == main {
                ClusterLabel::Main
            } else if 3 * part.len() >= n {
                ClusterLabel::ParallelProcess
            } else {
                ClusterLabel::Lost
            }
        })
        .collect();
    Ok(ClusterReport { components, labels })
}

/// Components of the radius graph over `positions`, classified.
pub fn cluster_report(positions: &[Vec2], radius: f64) -> ClusterReport {
    let parts = build_graph(positions, radius).components();
    classify(&parts, positions.len()).expect("components always partition the nodes")
}
