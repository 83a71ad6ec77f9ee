use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{default_names, GraphError, MixedGraph};

/// Directed acyclic graph over nodes `0..n`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG with default names `X0..X{n-1}`.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        Self::with_names(default_names(node_count), edges)
    }

    pub fn with_names(
        names: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = names.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut edge_list = Vec::new();
        for (u, v) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(GraphError::NodeOutOfRange { index, node_count: n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            parents[v].push(u);
            children[u].push(v);
            edge_list.push((u, v));
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        for (v, ps) in parents.iter().enumerate() {
            if let Some(w) = ps.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(w[0], v));
            }
        }
        topological_order(n, &edge_list)?;
        Ok(Dag { names, parents, children })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(node_count: usize) -> Self {
        Self::new(node_count, []).expect("edgeless graph is a DAG")
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Replaces the presentation names; the count must match.
    pub fn renamed(mut self, names: Vec<String>) -> Result<Self, GraphError> {
        if names.len() != self.node_count() {
            return Err(GraphError::NameCount { expected: self.node_count(), got: names.len() });
        }
        self.names = names;
        Ok(self)
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.children[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(u, cs)| cs.iter().map(move |&v| (u, v)))
            .collect()
    }

    /// Topological order, smallest available index first.
    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(self.node_count(), &self.edges()).expect("Dag is acyclic by construction")
    }

    /// `result[u]` is true iff `u` is a proper ancestor of `v`.
    pub fn ancestors(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = self.parents[v].clone();
        while let Some(u) = stack.pop() {
            if !seen[u] {
                seen[u] = true;
                stack.extend_from_slice(&self.parents[u]);
            }
        }
        seen
    }

    /// Copy with every edge into `v` removed.
    pub fn without_parents_of(&self, v: usize) -> Dag {
        let mut out = self.clone();
        for &p in &self.parents[v] {
            let pos = out.children[p].binary_search(&v).expect("edge present");
            out.children[p].remove(pos);
        }
        out.parents[v].clear();
        out
    }
}

impl MixedGraph for Dag {
    fn node_count(&self) -> usize {
        Dag::node_count(self)
    }
    fn node_names(&self) -> &[String] {
        &self.names
    }
    fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) || self.has_edge(v, u)
    }
    fn is_directed(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
    fn directed_parents(&self, v: usize) -> Vec<usize> {
        self.parents[v].clone()
    }
}

/// Kahn's algorithm over an arbitrary edge list; ties go to the smallest index.
pub fn topological_order(node_count: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, GraphError> {
    let mut indegree = vec![0usize; node_count];
    let mut out_edges = vec![Vec::new(); node_count];
    for &(u, v) in edges {
        for index in [u, v] {
            if index >= node_count {
                return Err(GraphError::NodeOutOfRange { index, node_count });
            }
        }
        indegree[v] += 1;
        out_edges[u].push(v);
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..node_count).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(node_count);
    while let Some(Reverse(u)) = ready.pop() {
        order.push(u);
        for &v in &out_edges[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    if order.len() == node_count {
        Ok(order)
    } else {
        Err(GraphError::CycleDetected)
    }
}
