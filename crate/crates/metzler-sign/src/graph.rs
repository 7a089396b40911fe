//! Directed graphs of matrices, cycle detection and topological relabeling.
//!
//! The graph of a square matrix has an edge (j, i) for every nonzero
//! off-diagonal entry (i, j). Note the transposed orientation: the edge
//! points from the influencing column index to the affected row index. One
//! fixed orientation is used everywhere to prevent silent transposition bugs.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::signs::{NonzeroPattern, QualMatrix};

/// Immutable directed graph on nodes 0..n without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (from, to) in edges {
            if from >= n || to >= n {
                return Err(Error::Invalid {
                    message: format!("edge ({from},{to}) out of range for {n} nodes"),
                });
            }
            if from == to {
                return Err(Error::Invalid {
                    message: format!("self-loop at node {from}"),
                });
            }
            set.insert((from, to));
        }
        let mut adj = vec![Vec::new(); n];
        for &(f, t) in &set {
            adj[f].push(t);
        }
        Ok(Digraph { n, edges: set, adj })
    }

    /// The directed graph of a square matrix: edge (j, i) iff entry (i, j)
    /// is nonzero and i != j. Indefinite sign entries count as nonzero.
    pub fn of_matrix<M: NonzeroPattern>(m: &M) -> Result<Self> {
        let (rows, cols) = (m.pattern_rows(), m.pattern_cols());
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let mut edges = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                if i != j && m.entry_nonzero(i, j) {
                    edges.push((j, i));
                }
            }
        }
        Digraph::from_edges(rows, edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn out_neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    /// Iterative depth-first search for a cycle. Returns None iff the graph
    /// is acyclic. Roots and neighbors are visited in ascending index, so
    /// the witness is deterministic.
    pub fn find_cycle(&self) -> Option<CycleWitness> {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color = vec![WHITE; self.n];
        for root in 0..self.n {
            if color[root] != WHITE {
                continue;
            }
            // stack of (node, next neighbor index)
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            color[root] = GRAY;
            while let Some(&mut (u, ref mut idx)) = stack.last_mut() {
                if *idx < self.adj[u].len() {
                    let v = self.adj[u][*idx];
                    *idx += 1;
                    match color[v] {
                        WHITE => {
                            color[v] = GRAY;
                            stack.push((v, 0));
                        }
                        GRAY => {
                            // back edge u -> v closes a cycle along the stack
                            let pos = stack
                                .iter()
                                .position(|&(node, _)| node == v)
                                .expect("gray node is on the stack");
                            let mut nodes: Vec<usize> =
                                stack[pos..].iter().map(|&(node, _)| node).collect();
                            nodes.push(v);
                            return Some(CycleWitness { nodes });
                        }
                        _ => {}
                    }
                } else {
                    color[u] = BLACK;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Relabeling that makes every edge point from a higher new index to a
    /// lower one, i.e. the relabeled matrix is upper-triangular. Returns the
    /// node order: `perm[k]` is the original index placed at position k.
    /// Ties are broken by ascending original index. Errors on cyclic input.
    pub fn topo_permutation(&self) -> Result<Vec<usize>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let mut remaining_out = vec![0usize; self.n];
        let mut in_adj = vec![Vec::new(); self.n];
        for &(f, t) in &self.edges {
            remaining_out[f] += 1;
            in_adj[t].push(f);
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..self.n)
            .filter(|&v| remaining_out[v] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &p in &in_adj[v] {
                remaining_out[p] -= 1;
                if remaining_out[p] == 0 {
                    ready.push(Reverse(p));
                }
            }
        }
        if order.len() < self.n {
            return Err(Error::CyclicGraph);
        }
        Ok(order)
    }

    /// All-pairs reachability by repeated DFS: entry `[j][i]` is true iff a
    /// directed path of length >= 1 leads from j to i.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let mut reach = vec![vec![false; self.n]; self.n];
        let mut stack = Vec::new();
        for start in 0..self.n {
            stack.clear();
            stack.extend(self.adj[start].iter().copied());
            while let Some(v) = stack.pop() {
                if !reach[start][v] {
                    reach[start][v] = true;
                    stack.extend(self.adj[v].iter().copied());
                }
            }
        }
        reach
    }

    /// Strong connectivity (every node reaches every other). Trivially true
    /// for a single node.
    pub fn is_strongly_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let reach = self.reachability();
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || reach[i][j]))
    }

    /// DOT rendering with numeric node labels; node and edge lines are
    /// emitted in lexicographic order so the output is byte-stable.
    pub fn to_dot(&self) -> String {
        self.dot_with(|v| v.to_string())
    }

    /// DOT rendering of a bipartite graph built by [`bipartite_graph`]: the
    /// first `n_first` nodes are labeled s0, s1, ... and the rest p0, p1, ...
    pub fn to_dot_bipartite(&self, n_first: usize) -> String {
        self.dot_with(|v| {
            if v < n_first {
                format!("s{v}")
            } else {
                format!("p{}", v - n_first)
            }
        })
    }

    fn dot_with(&self, label: impl Fn(usize) -> String) -> String {
        let mut node_lines: Vec<String> = (0..self.n).map(|v| format!("  {};", label(v))).collect();
        node_lines.sort();
        let mut edge_lines: Vec<String> = self
            .edges
            .iter()
            .map(|&(f, t)| format!("  {} -> {};", label(f), label(t)))
            .collect();
        edge_lines.sort();
        let mut out = String::from("digraph {\n");
        for line in node_lines.into_iter().chain(edge_lines) {
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("}\n");
        out
    }
}

/// A closed walk v0, ..., vk with vk = v0 whose consecutive pairs are edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    pub nodes: Vec<usize>,
}

impl CycleWitness {
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Edge-by-edge verification against a graph.
    pub fn validate(&self, g: &Digraph) -> bool {
        if self.nodes.len() < 3 || self.nodes.first() != self.nodes.last() {
            return false;
        }
        let inner = &self.nodes[..self.nodes.len() - 1];
        let distinct: BTreeSet<_> = inner.iter().collect();
        if distinct.len() != inner.len() || inner.len() < 2 {
            return false;
        }
        self.nodes.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }
}

impl fmt::Display for CycleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.nodes.iter().map(|v| v.to_string()).collect();
        f.write_str(&labels.join(" -> "))
    }
}

/// The 2n-node directed bipartite graph of two nonnegative square patterns.
/// Nodes 0..n form the first partition, n..2n the second; edges run from the
/// second partition into the first according to `m1` and back according to
/// `m2`, both with the same transposed orientation as [`Digraph::of_matrix`].
pub fn bipartite_graph(m1: &QualMatrix, m2: &QualMatrix) -> Result<Digraph> {
    if !m1.is_square() || !m2.is_square() || m1.rows() != m2.rows() {
        return Err(Error::ShapeMismatch {
            left: (m1.rows(), m1.cols()),
            right: (m2.rows(), m2.cols()),
        });
    }
    m1.require_nonneg()?;
    m2.require_nonneg()?;
    let n = m1.rows();
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if m1.entry_nonzero(j, i) {
                edges.push((n + i, j));
            }
            if m2.entry_nonzero(j, i) {
                edges.push((i, n + j));
            }
        }
    }
    Digraph::from_edges(2 * n, edges)
}

/// Cycle-freeness of the bipartite graph of two nonnegative patterns. True
/// iff every realization of the product has zero spectral radius.
pub fn bipartite_cycle_free(
    m1: &QualMatrix,
    m2: &QualMatrix,
) -> Result<(bool, Option<CycleWitness>)> {
    let g = bipartite_graph(m1, m2)?;
    let cycle = g.find_cycle();
    Ok((cycle.is_none(), cycle))
}
