//! Undirected labelled graphs, chordality and clique trees.
//!
//! Vertices are `0..n` in this API. The text formats in the companion crate
//! shift them to `1..=n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Simple undirected graph. Immutable once built; edges are kept sorted as
/// `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<bool>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate pairs (in either
    /// orientation) collapse to one edge.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![false; n * n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u * n + v] = true;
            adj[v * n + u] = true;
        }
        let mut list = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if adj[u * n + v] {
                    list.push((u, v));
                }
            }
        }
        Ok(Self { n, edges: list, adj })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new(), adj: vec![false; n * n] }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph edges are valid")
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).expect("path edges are valid")
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter("a cycle needs at least 3 vertices"));
        }
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u * self.n + v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&w| self.adj[v * self.n + w])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Vertex pairs `(u, v)`, `u < v`, that are not edges, in lexicographic order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.adj[u * self.n + v] {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| vertices[i + 1..].iter().all(|&v| u != v && self.has_edge(u, v)))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    /// Copy of the graph with `{u, v}` added.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        self.check_pair(u, v)?;
        if self.has_edge(u, v) {
            return Err(Error::PairIsEdge(u, v));
        }
        Self::new(self.n, self.edges.iter().copied().chain(core::iter::once((u, v))))
    }

    /// Copy of the graph with `{u, v}` removed.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Self> {
        self.check_pair(u, v)?;
        if !self.has_edge(u, v) {
            return Err(Error::NotAnEdge(u, v));
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        Self::new(self.n, self.edges.iter().copied().filter(|&e| e != (a, b)))
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        for &v in vertices {
            self.check_vertex(v)?;
        }
        let mut edges = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    edges.push((i, j));
                }
            }
        }
        Self::new(vertices.len(), edges)
    }

    /// True when the graph has no chordless cycle of length four or more.
    pub fn is_chordal(&self) -> bool {
        perfect_elimination_ordering(self).is_some()
    }

    /// All maximal cliques (Bron–Kerbosch with pivoting). Each clique is sorted and
    /// the list is sorted lexicographically.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut r = Vec::new();
        let p: Vec<usize> = (0..self.n).collect();
        self.bron_kerbosch(&mut r, p, Vec::new(), &mut out);
        for c in out.iter_mut() {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<usize>, p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| self.has_edge(u, v)).count())
            .expect("p is non-empty");
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !self.has_edge(pivot, v)).collect();
        let mut p = p;
        for v in candidates {
            let p_next = p.iter().copied().filter(|&w| self.has_edge(v, w)).collect();
            let x_next = x.iter().copied().filter(|&w| self.has_edge(v, w)).collect();
            r.push(v);
            self.bron_kerbosch(r, p_next, x_next, out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
}

/// Maximum cardinality search. Returns vertices in visiting order; ties go to
/// the smallest label.
pub fn maximum_cardinality_search(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if !visited[v] && best.is_none_or(|b| weight[v] > weight[b]) {
                best = Some(v);
            }
        }
        let v = best.expect("an unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for w in g.neighbors(v) {
            if !visited[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Checks that every vertex's later neighbours (in `order`) form a clique.
pub fn is_perfect_elimination_ordering(g: &Graph, order: &[usize]) -> bool {
    let Some(pos) = positions(g.n(), order) else {
        return false;
    };
    for &v in order {
        let later: Vec<usize> = g.neighbors(v).filter(|&w| pos[w] > pos[v]).collect();
        let Some(&first) = later.iter().min_by_key(|&&w| pos[w]) else {
            continue;
        };
        if !later.iter().all(|&w| w == first || g.has_edge(first, w)) {
            return false;
        }
    }
    true
}

fn positions(n: usize, order: &[usize]) -> Option<Vec<usize>> {
    if order.len() != n {
        return None;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return None;
        }
        pos[v] = i;
    }
    Some(pos)
}

/// Perfect elimination ordering from maximum cardinality search, or `None`
/// when the graph is not chordal.
pub fn perfect_elimination_ordering(g: &Graph) -> Option<Vec<usize>> {
    let mut peo = maximum_cardinality_search(g);
    peo.reverse();
    is_perfect_elimination_ordering(g, &peo).then_some(peo)
}

/// Chordality flag together with the certifying ordering.
pub fn is_chordal(g: &Graph) -> (bool, Option<Vec<usize>>) {
    let peo = perfect_elimination_ordering(g);
    (peo.is_some(), peo)
}

/// Maximal cliques of a chordal graph in running-intersection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueDecomposition {
    /// Sorted vertex sets.
    pub cliques: Vec<Vec<usize>>,
    /// `separators[i]` belongs to `cliques[i + 1]`; may be empty.
    pub separators: Vec<Vec<usize>>,
}

impl CliqueDecomposition {
    /// Checks edge cover, completeness of every clique, and the running-intersection
    /// property. Used by tests and by callers that build decompositions by hand.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        if self.separators.len() + 1 != self.cliques.len().max(1) {
            return false;
        }
        if !self.cliques.iter().all(|c| g.is_clique(c)) {
            return false;
        }
        let covered = |u: usize, v: usize| self.cliques.iter().any(|c| c.contains(&u) && c.contains(&v));
        if !g.edges().iter().all(|&(u, v)| covered(u, v)) {
            return false;
        }
        let mut seen = vec![false; g.n()];
        for (i, clique) in self.cliques.iter().enumerate() {
            if i > 0 {
                let expected: Vec<usize> = clique.iter().copied().filter(|&v| seen[v]).collect();
                let sep = &self.separators[i - 1];
                if *sep != expected {
                    return false;
                }
                // separator must sit inside a single earlier clique
                if !self.cliques[..i].iter().any(|c| sep.iter().all(|v| c.contains(v))) {
                    return false;
                }
            }
            for &v in clique {
                seen[v] = true;
            }
        }
        (0..g.n()).all(|v| seen[v])
    }
}

/// Clique tree of a chordal graph from a perfect elimination ordering.
///
/// Candidate cliques are `{v} ∪ later_neighbours(v)`; the maximal ones are joined by
/// a maximum-weight spanning tree of their intersection graph (Prim), and emitted in
/// the order Prim attaches them, which gives the running-intersection property.
pub fn clique_decomposition(g: &Graph, peo: &[usize]) -> Result<CliqueDecomposition> {
    if positions(g.n(), peo).is_none() {
        return Err(Error::InvalidOrdering);
    }
    if !is_perfect_elimination_ordering(g, peo) {
        return Err(Error::NotChordal);
    }
    let pos = positions(g.n(), peo).expect("checked above");
    // reverse elimination order
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for &v in peo.iter().rev() {
        let mut c: Vec<usize> = g.neighbors(v).filter(|&w| pos[w] > pos[v]).collect();
        c.push(v);
        c.sort_unstable();
        candidates.push(c);
    }
    let maximal: Vec<Vec<usize>> = candidates
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !candidates.iter().enumerate().any(|(j, d)| {
                j != *i && d.len() >= c.len() && c.iter().all(|v| d.contains(v)) && (d.len() > c.len() || j < *i)
            })
        })
        .map(|(_, c)| c.clone())
        .collect();

    let k = maximal.len();
    let overlap = |a: &[usize], b: &[usize]| a.iter().filter(|v| b.contains(v)).count();
    let mut in_tree = vec![false; k];
    let mut cliques = Vec::with_capacity(k);
    let mut separators = Vec::with_capacity(k.saturating_sub(1));
    if k == 0 {
        return Ok(CliqueDecomposition { cliques, separators });
    }
    in_tree[0] = true;
    cliques.push(maximal[0].clone());
    let mut attached = vec![0usize];
    for _ in 1..k {
        let mut best: Option<(usize, usize, usize)> = None; // (weight, new, parent)
        for j in (0..k).filter(|&j| !in_tree[j]) {
            for &i in &attached {
                let w = overlap(&maximal[i], &maximal[j]);
                if best.is_none_or(|(bw, _, _)| w > bw) {
                    best = Some((w, j, i));
                }
            }
        }
        let (_, j, parent) = best.expect("an unattached clique remains");
        in_tree[j] = true;
        attached.push(j);
        let sep: Vec<usize> = maximal[j].iter().copied().filter(|v| maximal[parent].contains(v)).collect();
        cliques.push(maximal[j].clone());
        separators.push(sep);
    }
    Ok(CliqueDecomposition { cliques, separators })
}

/// Clique tree using the ordering from maximum cardinality search.
pub fn decompose(g: &Graph) -> Result<CliqueDecomposition> {
    let peo = perfect_elimination_ordering(g).ok_or(Error::NotChordal)?;
    clique_decomposition(g, &peo)
}

/// Partition of the other `n - 2` vertices by adjacency to a non-adjacent pair
/// `(v1, v2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClassification {
    /// adjacent to neither endpoint
    pub w: usize,
    /// adjacent to `v2` only
    pub x: usize,
    /// adjacent to `v1` only
    pub y: usize,
    /// common neighbours
    pub s: usize,
}

/// Classifies the remaining vertices against a non-edge `(v1, v2)` of `g`.
pub fn classify_pair(g: &Graph, v1: usize, v2: usize) -> Result<PairClassification> {
    g.check_pair(v1, v2)?;
    if g.has_edge(v1, v2) {
        return Err(Error::PairIsEdge(v1, v2));
    }
    let mut c = PairClassification { w: 0, x: 0, y: 0, s: 0 };
    for v in (0..g.n()).filter(|&v| v != v1 && v != v2) {
        match (g.has_edge(v1, v), g.has_edge(v2, v)) {
            (false, false) => c.w += 1,
            (false, true) => c.x += 1,
            (true, false) => c.y += 1,
            (true, true) => c.s += 1,
        }
    }
    Ok(c)
}

/// Number of common neighbours of the endpoints of the edge `{u, v}`.
pub fn common_neighbor_count(g: &Graph, u: usize, v: usize) -> Result<usize> {
    g.check_pair(u, v)?;
    if !g.has_edge(u, v) {
        return Err(Error::NotAnEdge(u, v));
    }
    Ok(g.neighbors(u).filter(|&w| w != v && g.has_edge(v, w)).count())
}
