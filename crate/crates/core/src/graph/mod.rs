//! DAGs, completed PDAGs and Markov equivalence-class operations.
//!
//! Nodes are identified by index. Names travel with the graphs for
//! serialization and reporting but never take part in comparisons made by
//! the algorithms.

mod cpdag;
mod dag;
mod equivalence;
mod json;

use std::collections::BTreeSet;

use thiserror::Error;

pub use cpdag::Cpdag;
pub use dag::{topological_order, Dag};
pub use equivalence::{apply_meek_rules, cpdag_to_dag, dag_to_cpdag};
pub(crate) use equivalence::force_extension;
pub use json::GraphJson;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge set contains a directed cycle")]
    CycleDetected,
    #[error("partially directed graph admits no consistent DAG extension")]
    NoConsistentExtension,
    #[error("graph must contain at least one node")]
    Empty,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("node index {index} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { index: usize, node_count: usize },
    #[error("{expected} node names required, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("a DAG cannot contain undirected edges")]
    UndirectedInDag,
}

/// Unshielded collider `a -> collider <- b`; parents stored with `parents.0 < parents.1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VStructure {
    pub collider: usize,
    pub parents: (usize, usize),
}

impl VStructure {
    pub fn new(collider: usize, a: usize, b: usize) -> Self {
        let parents = if a < b { (a, b) } else { (b, a) };
        VStructure { collider, parents }
    }
}

/// Read access shared by [`Dag`] and [`Cpdag`].
pub trait MixedGraph {
    fn node_count(&self) -> usize;
    fn node_names(&self) -> &[String];
    /// True if any edge (either direction, or undirected) joins `u` and `v`.
    fn is_adjacent(&self, u: usize, v: usize) -> bool;
    /// True only for a directed edge `u -> v`.
    fn is_directed(&self, u: usize, v: usize) -> bool;
    /// Nodes with a directed edge into `v`, ascending.
    fn directed_parents(&self, v: usize) -> Vec<usize>;
}

/// Unordered adjacent pairs `(u, v)` with `u < v`.
pub fn skeleton<G: MixedGraph + ?Sized>(g: &G) -> BTreeSet<(usize, usize)> {
    let n = g.node_count();
    let mut out = BTreeSet::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if g.is_adjacent(u, v) {
                out.insert((u, v));
            }
        }
    }
    out
}

/// Every `a -> c <- b` with both edges directed and `a`, `b` non-adjacent.
pub fn v_structures<G: MixedGraph + ?Sized>(g: &G) -> BTreeSet<VStructure> {
    let mut out = BTreeSet::new();
    for c in 0..g.node_count() {
        let parents = g.directed_parents(c);
        for (i, &a) in parents.iter().enumerate() {
            for &b in &parents[i + 1..] {
                if !g.is_adjacent(a, b) {
                    out.insert(VStructure::new(c, a, b));
                }
            }
        }
    }
    out
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("X{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skeleton_examples() {
        let g = Dag::new(2, [(0, 1)]).unwrap();
        assert_eq!(skeleton(&g), BTreeSet::from([(0, 1)]));
        let empty = Dag::new(3, []).unwrap();
        assert!(skeleton(&empty).is_empty());
        let collider = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(skeleton(&collider), BTreeSet::from([(0, 2), (1, 2)]));
    }

    #[test]
    fn v_structure_examples() {
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(v_structures(&chain).is_empty());
        let collider = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(
            v_structures(&collider),
            BTreeSet::from([VStructure { collider: 2, parents: (0, 1) }])
        );
        let shielded = Dag::new(3, [(0, 2), (1, 2), (0, 1)]).unwrap();
        assert!(v_structures(&shielded).is_empty());
    }

    #[test]
    fn v_structures_ignore_undirected_edges() {
        let g = Cpdag::new(3, [(0, 2)], [(1, 2)]).unwrap();
        assert!(v_structures(&g).is_empty());
        assert_eq!(skeleton(&g).len(), 2);
    }
}
