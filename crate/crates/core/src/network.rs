//! Communication graph and neighborhood queries.
//!
//! Node indices are 0-based internally. Scenario files and printed output use
//! 1-based labels.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("node index {index} out of range for a {n_nodes}-node network")]
    IndexOutOfRange { index: usize, n_nodes: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected: node {0} unreachable from node 0")]
    DisconnectedGraph(usize),
    #[error("network must have at least one node")]
    Empty,
}

/// Undirected, connected communication graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    /// Ascending neighbor lists excluding the node itself.
    adjacency: Vec<Vec<usize>>,
    /// Ascending neighbor lists including the node itself.
    closed: Vec<Vec<usize>>,
}

impl Topology {
    /// Validates and builds a topology from 0-based edge pairs.
    pub fn new(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        if n_nodes == 0 {
            return Err(TopologyError::Empty);
        }
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(i, j) in edges {
            for index in [i, j] {
                if index >= n_nodes {
                    return Err(TopologyError::IndexOutOfRange { index, n_nodes });
                }
            }
            if i == j {
                return Err(TopologyError::SelfLoop(i));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(TopologyError::DuplicateEdge(i, j));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        // Breadth-first reachability from node 0.
        let mut reached = vec![false; n_nodes];
        let mut frontier = vec![0];
        reached[0] = true;
        while let Some(k) = frontier.pop() {
            for &l in &adjacency[k] {
                if !reached[l] {
                    reached[l] = true;
                    frontier.push(l);
                }
            }
        }
        if let Some(isolated) = reached.iter().position(|r| !r) {
            return Err(TopologyError::DisconnectedGraph(isolated));
        }

        let closed = adjacency
            .iter()
            .enumerate()
            .map(|(k, list)| {
                let mut c = list.clone();
                c.push(k);
                c.sort_unstable();
                c
            })
            .collect();

        Ok(Self {
            n_nodes,
            edges: seen.into_iter().collect(),
            adjacency,
            closed,
        })
    }

    /// Builds a topology from 1-based labels as written in scenario files.
    pub fn from_labels(n_nodes: usize, edges: &[[usize; 2]]) -> Result<Self, TopologyError> {
        let mut zero_based = Vec::with_capacity(edges.len());
        for &[a, b] in edges {
            for label in [a, b] {
                if label == 0 || label > n_nodes {
                    return Err(TopologyError::IndexOutOfRange {
                        index: label.wrapping_sub(1),
                        n_nodes,
                    });
                }
            }
            zero_based.push((a - 1, b - 1));
        }
        Self::new(n_nodes, &zero_based)
    }

    /// Two fully connected triangles {1,2,3} and {5,6,7} bridged by node 4,
    /// which links to all six others.
    pub fn default_seven_node() -> Self {
        const EDGES: [[usize; 2]; 12] = [
            [1, 2],
            [1, 3],
            [2, 3],
            [5, 6],
            [5, 7],
            [6, 7],
            [4, 1],
            [4, 2],
            [4, 3],
            [4, 5],
            [4, 6],
            [4, 7],
        ];
        Self::from_labels(7, &EDGES).expect("default topology is valid")
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Edge list as sorted, 0-based `(low, high)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edge list with 1-based labels, in sorted order.
    pub fn edge_labels(&self) -> Vec<[usize; 2]> {
        self.edges.iter().map(|&(i, j)| [i + 1, j + 1]).collect()
    }

    /// Ascending neighbor list of `k`, with or without `k` itself.
    pub fn neighbors(&self, k: usize, include_self: bool) -> Result<&[usize], TopologyError> {
        if k >= self.n_nodes {
            return Err(TopologyError::IndexOutOfRange {
                index: k,
                n_nodes: self.n_nodes,
            });
        }
        Ok(if include_self {
            &self.closed[k]
        } else {
            &self.adjacency[k]
        })
    }

    /// Number of neighbors excluding the node itself.
    pub fn degree(&self, k: usize) -> usize {
        self.adjacency[k].len()
    }
}
