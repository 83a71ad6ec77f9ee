use super::{default_names, Dag, GraphError, MixedGraph};

/// Partially directed graph representing a Markov equivalence class.
///
/// Stored as an `n x n` mark matrix: `u -> v` is `mark(u, v) && !mark(v, u)`,
/// `u - v` is `mark(u, v) && mark(v, u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpdag {
    names: Vec<String>,
    n: usize,
    marks: Vec<bool>,
}

impl Cpdag {
    pub fn new(
        node_count: usize,
        directed: impl IntoIterator<Item = (usize, usize)>,
        undirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        Self::with_names(default_names(node_count), directed, undirected)
    }

    /// Checks structural invariants only; whether a consistent extension
    /// exists is answered by [`super::cpdag_to_dag`].
    pub fn with_names(
        names: Vec<String>,
        directed: impl IntoIterator<Item = (usize, usize)>,
        undirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = names.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut g = Cpdag { names, n, marks: vec![false; n * n] };
        let check = |u: usize, v: usize, g: &Cpdag| -> Result<(), GraphError> {
            for index in [u, v] {
                if index >= n {
                    return Err(GraphError::NodeOutOfRange { index, node_count: n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if g.is_adjacent(u, v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            Ok(())
        };
        for (u, v) in directed {
            check(u, v, &g)?;
            g.set(u, v, true);
        }
        for (u, v) in undirected {
            check(u, v, &g)?;
            g.set(u, v, true);
            g.set(v, u, true);
        }
        Ok(g)
    }

    /// Graph with every edge of `dag` kept directed.
    pub fn from_dag(dag: &Dag) -> Self {
        let mut g = Self::skeleton_of(dag);
        for (u, v) in dag.edges() {
            g.set(v, u, false);
        }
        g
    }

    /// Undirected graph on the same adjacencies as `g`.
    pub(crate) fn skeleton_of<G: MixedGraph + ?Sized>(g: &G) -> Self {
        let n = g.node_count();
        let mut out = Cpdag { names: g.node_names().to_vec(), n, marks: vec![false; n * n] };
        for u in 0..n {
            for v in (u + 1)..n {
                if g.is_adjacent(u, v) {
                    out.set(u, v, true);
                    out.set(v, u, true);
                }
            }
        }
        out
    }

    /// Graph without edges.
    pub fn empty(names: Vec<String>) -> Self {
        let n = names.len();
        Cpdag { names, n, marks: vec![false; n * n] }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    #[inline]
    fn mark(&self, u: usize, v: usize) -> bool {
        self.marks[u * self.n + v]
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize, value: bool) {
        self.marks[u * self.n + v] = value;
    }

    #[inline]
    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.mark(u, v) || self.mark(v, u)
    }

    #[inline]
    pub fn is_directed(&self, u: usize, v: usize) -> bool {
        self.mark(u, v) && !self.mark(v, u)
    }

    #[inline]
    pub fn is_undirected(&self, u: usize, v: usize) -> bool {
        self.mark(u, v) && self.mark(v, u)
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.is_directed(u, v)).collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.is_directed(v, u)).collect()
    }

    /// Nodes joined to `v` by an undirected edge.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.is_undirected(u, v)).collect()
    }

    pub fn adjacent(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.is_adjacent(u, v)).collect()
    }

    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if self.is_directed(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Undirected edges as `(u, v)` with `u < v`.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.is_undirected(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.directed_edges().len() + self.undirected_edges().len()
    }

    /// True when every node in `nodes` is adjacent to every other.
    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, &a)| nodes[i + 1..].iter().all(|&b| self.is_adjacent(a, b)))
    }

    /// Turns `u - v` (or `v -> u`) into `u -> v`.
    pub(crate) fn orient(&mut self, u: usize, v: usize) {
        self.set(u, v, true);
        self.set(v, u, false);
    }

    pub(crate) fn add_directed(&mut self, u: usize, v: usize) {
        self.orient(u, v);
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        self.set(u, v, false);
        self.set(v, u, false);
    }
}

impl MixedGraph for Cpdag {
    fn node_count(&self) -> usize {
        self.n
    }
    fn node_names(&self) -> &[String] {
        &self.names
    }
    fn is_adjacent(&self, u: usize, v: usize) -> bool {
        Cpdag::is_adjacent(self, u, v)
    }
    fn is_directed(&self, u: usize, v: usize) -> bool {
        Cpdag::is_directed(self, u, v)
    }
    fn directed_parents(&self, v: usize) -> Vec<usize> {
        self.parents(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_sets_are_disjoint() {
        assert_eq!(Cpdag::new(3, [(0, 1)], [(1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(Cpdag::new(3, [(0, 1), (1, 0)], []), Err(GraphError::DuplicateEdge(0, 1)));
        let g = Cpdag::new(3, [(0, 1)], [(2, 1)]).unwrap();
        assert_eq!(g.directed_edges(), vec![(0, 1)]);
        assert_eq!(g.undirected_edges(), vec![(1, 2)]);
        assert_eq!(g.parents(1), vec![0]);
        assert_eq!(g.neighbors(1), vec![2]);
        assert_eq!(g.adjacent(1), vec![0, 2]);
    }

    #[test]
    fn orientation_edits() {
        let mut g = Cpdag::new(2, [], [(0, 1)]).unwrap();
        g.orient(1, 0);
        assert!(g.is_directed(1, 0));
        g.remove_edge(0, 1);
        assert_eq!(g.edge_count(), 0);
    }
}
