//! Monotonicity graphs: dense weighted digraphs over variables, primed
//! variables and constants. An edge `x -k-> y` stands for the gap clause
//! `x - y >= k`, so a graph denotes the conjunction of its edges.
//!
//! Closed graphs carry, for every ordered pair, the least upper bound of the
//! path weights between the pair. Before closing, every ordered pair of
//! distinct constants `c, d` gets the implicit edge `c -(c-d)-> d`; with these
//! edges a closed graph is satisfiable iff all self-weights are zero.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::constraint::{GapClause, Node, Valuation};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MgError {
    #[error("clause `{clause}` mentions `{node}`, which is not a declared node")]
    UnknownNode { node: Node, clause: GapClause },
    #[error("unknown node `{0}`")]
    UnknownEndpoint(Node),
    #[error("monotonicity graph is unsatisfiable")]
    Unsatisfiable,
    #[error("monotonicity graphs range over different node sets")]
    NodeMismatch,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonotonicityGraph {
    nodes: Arc<[Node]>,
    /// Row-major `n * n`; `weights[i * n + j]` bounds `nodes[i] - nodes[j]` from below.
    weights: Vec<Weight>,
    closed: bool,
}

impl MonotonicityGraph {
    /// The graph without edges; it denotes every valuation.
    pub fn edgeless(nodes: Arc<[Node]>) -> Self {
        let n = nodes.len();
        MonotonicityGraph {
            nodes,
            weights: vec![Weight::NegInf; n * n],
            closed: false,
        }
    }

    /// One edge per clause, keeping the maximal weight when a pair repeats.
    pub fn from_constraint(nodes: Arc<[Node]>, clauses: &[GapClause]) -> Result<Self, MgError> {
        let mut g = Self::edgeless(nodes);
        for clause in clauses {
            let lookup = |node: &Node| {
                g.index_of(node).ok_or_else(|| MgError::UnknownNode {
                    node: node.clone(),
                    clause: clause.clone(),
                })
            };
            let (i, j) = (lookup(&clause.lhs)?, lookup(&clause.rhs)?);
            g.raise(i, j, Weight::Finite(clause.offset));
        }
        Ok(g)
    }

    pub fn from_edges<'a, I>(nodes: Arc<[Node]>, edges: I) -> Result<Self, MgError>
    where
        I: IntoIterator<Item = (&'a Node, &'a Node, Weight)>,
    {
        let mut g = Self::edgeless(nodes);
        for (from, to, w) in edges {
            let i = g
                .index_of(from)
                .ok_or_else(|| MgError::UnknownEndpoint(from.clone()))?;
            let j = g
                .index_of(to)
                .ok_or_else(|| MgError::UnknownEndpoint(to.clone()))?;
            g.raise(i, j, w);
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &Arc<[Node]> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn index_of(&self, node: &Node) -> Option<usize> {
        self.nodes.iter().position(|n| n == node)
    }

    pub fn weight(&self, from: &Node, to: &Node) -> Option<Weight> {
        Some(self.at(self.index_of(from)?, self.index_of(to)?))
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> Weight {
        self.weights[i * self.nodes.len() + j]
    }

    pub(crate) fn weights(&self) -> &[Weight] {
        &self.weights
    }

    fn raise(&mut self, i: usize, j: usize, w: Weight) {
        let n = self.nodes.len();
        let slot = &mut self.weights[i * n + j];
        if w > *slot {
            *slot = w;
            self.closed = false;
        }
    }

    /// All edges with weight above `-inf`, self-loops included.
    pub fn edges(&self) -> impl Iterator<Item = (&Node, &Node, Weight)> + '_ {
        let n = self.nodes.len();
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != Weight::NegInf)
            .map(move |(idx, w)| (&self.nodes[idx / n], &self.nodes[idx % n], *w))
    }

    /// The closure `|M|`: every pair carries the supremum of its path weights.
    pub fn closure(&self) -> Self {
        if self.closed {
            return self.clone();
        }
        let mut g = self.clone();
        close_in_place(&g.nodes, &mut g.weights);
        g.closed = true;
        g
    }

    pub fn is_satisfiable(&self) -> bool {
        if self.closed {
            closed_is_satisfiable(self)
        } else {
            closed_is_satisfiable(&self.closure())
        }
    }

    /// Largest `k` such that some edge has weight `-k`; zero if there is none.
    pub fn degree(&self) -> u64 {
        self.weights
            .iter()
            .filter_map(|w| w.finite())
            .filter(|&k| k < 0)
            .map(|k| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Norm of the graph seen as a vector: `degree + w + 1` for finite `w`, 0 for `-inf`.
    pub fn norm(&self) -> u64 {
        let d = self.degree() as i128;
        self.weights
            .iter()
            .filter_map(|w| w.finite())
            .map(|k| (d + k as i128 + 1).max(0) as u64)
            .max()
            .unwrap_or(0)
    }

    /// Maximal subgraph on the named variables and all constants. Primed
    /// nodes are dropped.
    pub fn restrict<S: AsRef<str>>(&self, vars: &[S]) -> Self {
        let keep: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, node)| match node {
                Node::Const(_) => true,
                Node::Var(name) => vars.iter().any(|v| v.as_ref() == name),
                Node::Primed(_) => false,
            })
            .map(|(i, _)| i)
            .collect();
        let nodes: Arc<[Node]> = keep.iter().map(|&i| self.nodes[i].clone()).collect();
        self.submatrix(&keep, nodes)
    }

    /// `Proj(M, V)`: the closure restricted to `V ∪ Const`. Its models are
    /// exactly the restrictions of the models of `self`.
    pub fn project<S: AsRef<str>>(&self, vars: &[S]) -> Self {
        self.closure().restrict(vars)
    }

    fn submatrix(&self, keep: &[usize], nodes: Arc<[Node]>) -> Self {
        let n = self.nodes.len();
        let mut weights = Vec::with_capacity(keep.len() * keep.len());
        for &i in keep {
            for &j in keep {
                weights.push(self.weights[i * n + j]);
            }
        }
        MonotonicityGraph {
            nodes,
            weights,
            closed: self.closed,
        }
    }

    /// `M ⊗ N`: pointwise maximum. Denotes the intersection.
    pub fn intersect(&self, other: &Self) -> Result<Self, MgError> {
        if self.nodes != other.nodes {
            return Err(MgError::NodeMismatch);
        }
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (*a).max(*b))
            .collect();
        Ok(MonotonicityGraph {
            nodes: self.nodes.clone(),
            weights,
            closed: false,
        })
    }

    /// `N ⊑ self`: every closure weight of `other` is at most the matching
    /// closure weight of `self`. Then `Sat(self) ⊆ Sat(other)`.
    pub fn covers(&self, other: &Self) -> bool {
        if self.nodes != other.nodes {
            return false;
        }
        let (a, b) = (self.closure(), other.closure());
        b.weights.iter().zip(&a.weights).all(|(n, m)| n <= m)
    }

    /// [`covers`](Self::covers) for graphs already known to be closed.
    #[inline]
    pub(crate) fn covers_closed(&self, other: &Self) -> bool {
        other.weights.iter().zip(&self.weights).all(|(n, m)| n <= m)
    }

    /// Evaluates the graph under an assignment of all non-constant nodes.
    ///
    /// # Panics
    ///
    /// If `value` returns `None` for a node touched by an edge.
    pub fn evaluate_with(&self, value: impl Fn(&Node) -> Option<i64>) -> bool {
        let n = self.nodes.len();
        let mut values = Vec::with_capacity(n);
        for node in self.nodes.iter() {
            values.push(value(node));
        }
        for i in 0..n {
            for j in 0..n {
                match self.weights[i * n + j] {
                    Weight::NegInf => {}
                    Weight::PosInf => return false,
                    Weight::Finite(k) => {
                        let (vi, vj) = match (values[i], values[j]) {
                            (Some(a), Some(b)) => (a, b),
                            _ => panic!(
                                "valuation does not assign {} or {}",
                                self.nodes[i], self.nodes[j]
                            ),
                        };
                        if (vi as i128) - (vj as i128) < k as i128 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `v ⊨ M` for a graph over unprimed variables and constants.
    pub fn evaluate(&self, v: &Valuation) -> bool {
        self.evaluate_with(|node| v.value_of(node))
    }

    /// `v ⊕ next ⊨ M` for a transitional graph.
    pub fn evaluate_step(&self, v: &Valuation, next: &Valuation) -> bool {
        self.evaluate_with(|node| v.combined_value(next, node))
    }

    /// Closed form, suitable for equality and serialization. Two graphs with
    /// the same closure canonicalize to equal values.
    pub fn canonicalize(&self) -> Result<Self, MgError> {
        let c = self.closure();
        if closed_is_satisfiable(&c) {
            Ok(c)
        } else {
            Err(MgError::Unsatisfiable)
        }
    }

    /// Edges used for display and JSON: finite closure edges without
    /// self-loops and without constant pairs (those are implied).
    pub fn display_edges(&self) -> Vec<(Node, Node, Weight)> {
        let c = self.closure();
        let n = c.nodes.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = c.weights[i * n + j];
                if i == j || w == Weight::NegInf {
                    continue;
                }
                if c.nodes[i].is_const() && c.nodes[j].is_const() && w.is_finite() {
                    continue;
                }
                out.push((c.nodes[i].clone(), c.nodes[j].clone(), w));
            }
        }
        out
    }

    /// A small clause set whose graph (plus implicit constant edges) has the
    /// same closure as `self`. Edges are dropped greedily, largest absolute
    /// weight first, whenever the remaining edges still imply them.
    ///
    /// Requires a satisfiable graph.
    pub fn basis(&self) -> Vec<GapClause> {
        let c = self.closure();
        debug_assert!(closed_is_satisfiable(&c));
        let n = c.nodes.len();
        let mut edges: Vec<(usize, usize, i64)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || (c.nodes[i].is_const() && c.nodes[j].is_const()) {
                    continue;
                }
                if let Weight::Finite(k) = c.weights[i * n + j] {
                    edges.push((i, j, k));
                }
            }
        }
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by_key(|&e| (std::cmp::Reverse(edges[e].2.unsigned_abs()), e));
        let mut alive = vec![true; edges.len()];
        for e in order {
            alive[e] = false;
            let (src, dst, k) = edges[e];
            let best = longest_path(&c.nodes, &edges, &alive, src, dst);
            if best < Weight::Finite(k) {
                alive[e] = true;
            }
        }
        edges
            .iter()
            .zip(&alive)
            .filter(|(_, a)| **a)
            .map(|(&(i, j, k), _)| GapClause::new(c.nodes[i].clone(), c.nodes[j].clone(), k))
            .collect()
    }

    /// Adds `i - j >= k` to a closed satisfiable graph in `O(n^2)`, keeping it
    /// closed. Returns `false` (leaving `self` unspecified) if the result is
    /// unsatisfiable.
    pub(crate) fn add_edge_closed(&mut self, i: usize, j: usize, k: i64) -> bool {
        debug_assert!(self.closed);
        let n = self.nodes.len();
        let w = Weight::Finite(k);
        if self.weights[i * n + j] >= w {
            return true;
        }
        if self.weights[j * n + i] + w > Weight::ZERO {
            return false;
        }
        for a in 0..n {
            let wai = self.weights[a * n + i];
            if wai == Weight::NegInf {
                continue;
            }
            let head = wai + w;
            for b in 0..n {
                let wjb = self.weights[j * n + b];
                if wjb == Weight::NegInf {
                    continue;
                }
                let cand = head + wjb;
                let slot = &mut self.weights[a * n + b];
                if cand > *slot {
                    *slot = cand;
                }
            }
        }
        true
    }
}

/// Closure of the edgeless graph: self-loops and constant edges only.
pub(crate) fn closed_full(nodes: Arc<[Node]>) -> MonotonicityGraph {
    MonotonicityGraph::edgeless(nodes).closure()
}

fn closed_is_satisfiable(g: &MonotonicityGraph) -> bool {
    let n = g.nodes.len();
    (0..n).all(|i| g.weights[i * n + i] <= Weight::ZERO)
}

/// Max-plus Floyd–Warshall with constant seeding and `+inf` promotion for
/// pairs connected through a positive cycle.
fn close_in_place(nodes: &[Node], w: &mut [Weight]) {
    let n = nodes.len();
    for i in 0..n {
        if let Node::Const(ci) = nodes[i] {
            for j in 0..n {
                if let Node::Const(cj) = nodes[j] {
                    if i != j {
                        let seed = Weight::Finite(ci.saturating_sub(cj));
                        if seed > w[i * n + j] {
                            w[i * n + j] = seed;
                        }
                    }
                }
            }
        }
        if w[i * n + i] < Weight::ZERO {
            w[i * n + i] = Weight::ZERO;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let wik = w[i * n + k];
            if wik == Weight::NegInf {
                continue;
            }
            for j in 0..n {
                let wkj = w[k * n + j];
                if wkj == Weight::NegInf {
                    continue;
                }
                let cand = wik + wkj;
                if cand > w[i * n + j] {
                    w[i * n + j] = cand;
                }
            }
        }
    }
    let positive: Vec<usize> = (0..n).filter(|&k| w[k * n + k] > Weight::ZERO).collect();
    for k in positive {
        for i in 0..n {
            if w[i * n + k] == Weight::NegInf {
                continue;
            }
            for j in 0..n {
                if w[k * n + j] != Weight::NegInf {
                    w[i * n + j] = Weight::PosInf;
                }
            }
        }
    }
}

/// Bellman–Ford longest path over the live edges plus constant edges.
/// Assumes no positive cycle.
fn longest_path(
    nodes: &[Node],
    edges: &[(usize, usize, i64)],
    alive: &[bool],
    src: usize,
    dst: usize,
) -> Weight {
    let n = nodes.len();
    let mut dist = vec![Weight::NegInf; n];
    dist[src] = Weight::ZERO;
    for _ in 0..n {
        let mut changed = false;
        for (e, &(i, j, k)) in edges.iter().enumerate() {
            if !alive[e] || dist[i] == Weight::NegInf {
                continue;
            }
            let cand = dist[i] + Weight::Finite(k);
            if cand > dist[j] {
                dist[j] = cand;
                changed = true;
            }
        }
        for i in 0..n {
            let (Node::Const(ci), true) = (&nodes[i], dist[i] != Weight::NegInf) else {
                continue;
            };
            for j in 0..n {
                if let Node::Const(cj) = &nodes[j] {
                    let cand = dist[i] + Weight::Finite(ci - cj);
                    if cand > dist[j] {
                        dist[j] = cand;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist[dst]
}

/// Precomputed composition with a fixed transitional graph `G`, mapping state
/// graphs `M` to `G ∘ M = Proj(M[Var ↦ Var'] ⊗ G, Var)`.
#[derive(Clone, Debug)]
pub(crate) struct Composer {
    state_nodes: Arc<[Node]>,
    trans_len: usize,
    /// state index -> transitional index of the renamed (primed) node
    renamed: Vec<usize>,
    /// state index -> transitional index of the same node
    kept: Vec<usize>,
    /// raw edges of `G`, constant-pinning clauses first
    edges: Vec<(usize, usize, i64)>,
    satisfiable: bool,
}

impl Composer {
    pub(crate) fn new(g: &MonotonicityGraph, state_nodes: Arc<[Node]>) -> Result<Self, MgError> {
        let index: HashMap<&Node, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let find = |node: &Node| {
            index
                .get(node)
                .copied()
                .ok_or_else(|| MgError::UnknownEndpoint(node.clone()))
        };
        let mut renamed = Vec::with_capacity(state_nodes.len());
        let mut kept = Vec::with_capacity(state_nodes.len());
        for node in state_nodes.iter() {
            if node.is_primed() {
                return Err(MgError::NodeMismatch);
            }
            renamed.push(find(&node.prime())?);
            kept.push(find(node)?);
        }
        // every constant of G must exist in the state universe, or the seeded
        // constant edges of M would be incomplete
        if g.nodes.iter().filter(|n| n.is_const()).count()
            != state_nodes.iter().filter(|n| n.is_const()).count()
        {
            return Err(MgError::NodeMismatch);
        }
        let n = g.nodes.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                match g.weights[i * n + j] {
                    Weight::NegInf => {}
                    Weight::Finite(k) => edges.push((i, j, k)),
                    Weight::PosInf => edges.push((i, j, i64::MAX / 4)),
                }
            }
        }
        edges.sort_by_key(|&(i, j, _)| !(g.nodes[i].is_const() || g.nodes[j].is_const()));
        let satisfiable = g.is_satisfiable();
        Ok(Composer {
            state_nodes,
            trans_len: n,
            renamed,
            kept,
            edges,
            satisfiable,
        })
    }

    /// `G ∘ m` for a closed satisfiable `m`, or `None` when it is empty.
    pub(crate) fn apply(&self, m: &MonotonicityGraph) -> Option<MonotonicityGraph> {
        debug_assert!(m.closed);
        if !self.satisfiable {
            return None;
        }
        let t = self.trans_len;
        let s = self.state_nodes.len();
        let mut view = IncrementalMatrix {
            n: t,
            weights: vec![Weight::NegInf; t * t],
        };
        for i in 0..t {
            view.weights[i * t + i] = Weight::ZERO;
        }
        for a in 0..s {
            let ra = self.renamed[a];
            for b in 0..s {
                view.weights[ra * t + self.renamed[b]] = m.weights[a * s + b];
            }
        }
        for &(i, j, k) in &self.edges {
            if !view.add_edge(i, j, k) {
                return None;
            }
        }
        let mut weights = Vec::with_capacity(s * s);
        for a in 0..s {
            let ka = self.kept[a];
            for b in 0..s {
                weights.push(view.weights[ka * t + self.kept[b]]);
            }
        }
        Some(MonotonicityGraph {
            nodes: Arc::clone(&self.state_nodes),
            weights,
            closed: true,
        })
    }
}

struct IncrementalMatrix {
    n: usize,
    weights: Vec<Weight>,
}

impl IncrementalMatrix {
    fn add_edge(&mut self, i: usize, j: usize, k: i64) -> bool {
        let n = self.n;
        let w = Weight::Finite(k);
        if self.weights[i * n + j] >= w {
            return true;
        }
        if self.weights[j * n + i] + w > Weight::ZERO {
            return false;
        }
        for a in 0..n {
            let wai = self.weights[a * n + i];
            if wai == Weight::NegInf {
                continue;
            }
            let head = wai + w;
            for b in 0..n {
                let wjb = self.weights[j * n + b];
                if wjb == Weight::NegInf {
                    continue;
                }
                let cand = head + wjb;
                let slot = &mut self.weights[a * n + b];
                if cand > *slot {
                    *slot = cand;
                }
            }
        }
        true
    }
}

/// `G ∘ M = Proj(M[Var ↦ Var'] ⊗ G, Var)` for a transitional `g` and a state
/// graph `m`. The result ranges over the nodes of `m` and denotes the
/// `g`-predecessors of `Sat(m)`.
pub fn compose(
    g: &MonotonicityGraph,
    m: &MonotonicityGraph,
) -> Result<MonotonicityGraph, MgError> {
    let composer = Composer::new(g, Arc::clone(&m.nodes))?;
    let closed = m.closure();
    if closed_is_satisfiable(&closed) {
        if let Some(r) = composer.apply(&closed) {
            return Ok(r);
        }
    }
    // empty result: build it the slow way so the `+inf` pattern is the exact closure
    let t = g.nodes.len();
    let s = m.nodes.len();
    let mut raw = g.clone();
    for a in 0..s {
        for b in 0..s {
            let idx = composer.renamed[a] * t + composer.renamed[b];
            raw.weights[idx] = raw.weights[idx].max(m.weights[a * s + b]);
        }
    }
    raw.closed = false;
    let closed = raw.closure();
    let mut weights = Vec::with_capacity(s * s);
    for a in 0..s {
        for b in 0..s {
            weights.push(closed.weights[composer.kept[a] * t + composer.kept[b]]);
        }
    }
    Ok(MonotonicityGraph {
        nodes: Arc::clone(&m.nodes),
        weights,
        closed: true,
    })
}

impl fmt::Debug for MonotonicityGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MG{{")?;
        let mut first = true;
        for (a, b, w) in self.edges() {
            if a == b && w == Weight::ZERO {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{a} -{w}-> {b}")?;
        }
        write!(f, "}}{}", if self.closed { "*" } else { "" })
    }
}

impl fmt::Display for MonotonicityGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.display_edges();
        if edges.is_empty() {
            return f.write_str("true");
        }
        for (i, (a, b, w)) in edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{a} - {b} >= {w}")?;
        }
        Ok(())
    }
}
