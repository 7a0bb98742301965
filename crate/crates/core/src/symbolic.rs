//! Finite unions of monotonicity graphs as sets of valuations, and the
//! predecessor operators over them.
//!
//! Every member of a [`SymbolicSet`] is closed and satisfiable, the members
//! form an antichain under covering, and they are kept sorted, so equal
//! representations print and serialize identically.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::constraint::{GapClause, Node, Valuation};
use crate::error::EngineError;
use crate::gcs::Gcs;
use crate::mg::{closed_full, Composer, MgError, MonotonicityGraph};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicSet {
    nodes: Arc<[Node]>,
    members: Vec<MonotonicityGraph>,
}

impl SymbolicSet {
    pub fn empty(nodes: Arc<[Node]>) -> Self {
        SymbolicSet {
            nodes,
            members: Vec::new(),
        }
    }

    /// All valuations: a single edgeless graph.
    pub fn full(nodes: Arc<[Node]>) -> Self {
        let g = closed_full(Arc::clone(&nodes));
        SymbolicSet {
            nodes,
            members: vec![g],
        }
    }

    pub fn from_graph(g: &MonotonicityGraph) -> Self {
        Self::from_closed(Arc::clone(g.nodes()), vec![g.closure()])
    }

    pub fn from_graphs<I>(nodes: Arc<[Node]>, graphs: I) -> Result<Self, MgError>
    where
        I: IntoIterator<Item = MonotonicityGraph>,
    {
        let mut closed = Vec::new();
        for g in graphs {
            if **g.nodes() != *nodes {
                return Err(MgError::NodeMismatch);
            }
            closed.push(g.closure());
        }
        Ok(Self::from_closed(nodes, closed))
    }

    /// Drops unsatisfiable graphs, then reduces and sorts.
    fn from_closed(nodes: Arc<[Node]>, graphs: Vec<MonotonicityGraph>) -> Self {
        let sat: Vec<_> = graphs.into_iter().filter(|g| g.is_satisfiable()).collect();
        SymbolicSet {
            nodes,
            members: reduce(sat),
        }
    }

    pub fn nodes(&self) -> &Arc<[Node]> {
        &self.nodes
    }

    pub fn members(&self) -> &[MonotonicityGraph] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.members.iter().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn max_norm(&self) -> u64 {
        self.members.iter().map(|m| m.norm()).max().unwrap_or(0)
    }

    fn same_universe(&self, other: &Self) {
        assert!(
            self.nodes == other.nodes,
            "symbolic sets over different node sets"
        );
    }

    pub fn union(&self, other: &Self) -> Self {
        self.same_universe(other);
        let mut all = self.members.clone();
        all.extend(other.members.iter().cloned());
        SymbolicSet {
            nodes: Arc::clone(&self.nodes),
            members: reduce(all),
        }
    }

    /// Pairwise products of members, unsatisfiable products dropped.
    pub fn intersect(&self, other: &Self) -> Self {
        self.same_universe(other);
        let mut out = Vec::new();
        for a in &self.members {
            for b in &other.members {
                if let Some(m) = meet_closed(a, b) {
                    out.push(m);
                }
            }
        }
        SymbolicSet {
            nodes: Arc::clone(&self.nodes),
            members: reduce(out),
        }
    }

    /// De Morgan: each member contributes the disjunction of its negated
    /// basis clauses; the conjunction over members is distributed back into a
    /// union, pruning and reducing after every member.
    pub fn complement(&self) -> Self {
        let full = closed_full(Arc::clone(&self.nodes));
        let mut acc = vec![full.clone()];
        for m in &self.members {
            let negated: Vec<GapClause> = m.basis().iter().map(GapClause::negate).collect();
            acc = reduce(meet_with_any(&acc, &negated));
            if acc.is_empty() {
                break;
            }
        }
        SymbolicSet {
            nodes: Arc::clone(&self.nodes),
            members: acc,
        }
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        self.members.iter().any(|m| m.evaluate(v))
    }

    /// `self ⊆ other`, decided member by member as emptiness of
    /// `m ∩ complement(other)`, with the complement expanded lazily.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.same_universe(other);
        self.members.iter().all(|m| member_subset(m, other))
    }

    /// Same denotation (inclusion both ways).
    pub fn same_set(&self, other: &Self) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }
}

/// Sort, dedup, and drop every member that covers another one (it denotes a
/// subset of that one).
fn reduce(mut graphs: Vec<MonotonicityGraph>) -> Vec<MonotonicityGraph> {
    graphs.sort_by(|a, b| a.weights().cmp(b.weights()));
    graphs.dedup();
    let n = graphs.len();
    let redundant: Vec<bool> = (0..n)
        .map(|i| (0..n).any(|j| j != i && graphs[i].covers_closed(&graphs[j])))
        .collect();
    graphs
        .into_iter()
        .zip(redundant)
        .filter(|(_, r)| !r)
        .map(|(g, _)| g)
        .collect()
}

/// `a ⊗ b` for closed graphs, closed again; `None` if unsatisfiable.
fn meet_closed(a: &MonotonicityGraph, b: &MonotonicityGraph) -> Option<MonotonicityGraph> {
    let n = a.len();
    let raised: Vec<(usize, usize, i64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| b.at(i, j) > a.at(i, j))
        .filter_map(|(i, j)| match b.at(i, j) {
            Weight::Finite(k) => Some((i, j, k)),
            _ => None,
        })
        .collect();
    if raised.len() <= n {
        let mut m = a.clone();
        for (i, j, k) in raised {
            if !m.add_edge_closed(i, j, k) {
                return None;
            }
        }
        Some(m)
    } else {
        let m = a.intersect(b).ok()?.closure();
        m.is_satisfiable().then_some(m)
    }
}

/// `⋃_{g ∈ graphs} ⋃_{c ∈ clauses} (g ∧ c)`.
fn meet_with_any(graphs: &[MonotonicityGraph], clauses: &[GapClause]) -> Vec<MonotonicityGraph> {
    let mut out = Vec::new();
    for g in graphs {
        for c in clauses {
            let (Some(i), Some(j)) = (g.index_of(&c.lhs), g.index_of(&c.rhs)) else {
                continue;
            };
            let mut h = g.clone();
            if h.add_edge_closed(i, j, c.offset) {
                out.push(h);
            }
        }
    }
    out
}

fn member_subset(m: &MonotonicityGraph, other: &SymbolicSet) -> bool {
    if other.members.iter().any(|t| m.covers_closed(t)) {
        return true;
    }
    let mut rest = vec![m.clone()];
    for t in &other.members {
        let negated: Vec<GapClause> = t.basis().iter().map(GapClause::negate).collect();
        rest = reduce(meet_with_any(&rest, &negated));
        if rest.is_empty() {
            return true;
        }
    }
    false
}

/// Resource limits for the predecessor fixpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Largest pool a single pre* run may build before failing.
    pub pool_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { pool_cap: 100_000 }
    }
}

/// Counters for one pre* run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PreStarStats {
    pub pool_size: usize,
    pub graphs_created: u64,
    pub max_norm: u64,
    pub degree: u64,
}

/// Size counters collected while evaluating. None of these are bounds; they
/// only report what was built.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub graphs_created: u64,
    /// Largest pool of any pre* run.
    pub pool_size: usize,
    pub max_norm: u64,
    /// Largest degree seen on any pre* result.
    pub degree_bound: u64,
    /// Largest absolute constant of the system.
    pub constants_magnitude: u64,
    /// `(|Var| + |Const|)^2`
    pub dimension: u64,
    pub constraint_count: u64,
    pub nesting_depth: usize,
    pub prestar_runs: Vec<PreStarStats>,
}

impl Metrics {
    pub fn for_system(gcs: &Gcs) -> Self {
        let width = (gcs.vars().len() + gcs.consts().len()) as u64;
        Metrics {
            constants_magnitude: gcs.consts().iter().map(|c| c.unsigned_abs()).max().unwrap_or(0),
            dimension: width * width,
            constraint_count: gcs.rules().len() as u64,
            ..Metrics::default()
        }
    }

    fn record(&mut self, run: PreStarStats) {
        self.pool_size = self.pool_size.max(run.pool_size);
        self.max_norm = self.max_norm.max(run.max_norm);
        self.degree_bound = self.degree_bound.max(run.degree);
        self.prestar_runs.push(run);
    }
}

/// `Pre_G(S)` for one transitional graph.
pub fn pre_constraint(g: &MonotonicityGraph, s: &SymbolicSet) -> Result<SymbolicSet, MgError> {
    let composer = Composer::new(g, Arc::clone(&s.nodes))?;
    let out = s.members.iter().filter_map(|m| composer.apply(m)).collect();
    Ok(SymbolicSet::from_closed(Arc::clone(&s.nodes), out))
}

fn composers(
    gcs: &Gcs,
    actions: Option<&[String]>,
    guard: &[GapClause],
) -> Result<Vec<Composer>, EngineError> {
    if let Some(acts) = actions {
        if let Some(a) = acts.iter().find(|a| !gcs.has_action(a)) {
            return Err(EngineError::UnknownAction(a.clone()));
        }
    }
    let guard_graph = MonotonicityGraph::from_constraint(Arc::clone(gcs.trans_nodes()), guard)?;
    let mut out = Vec::new();
    for rule in gcs.rules() {
        if actions.is_some_and(|acts| !acts.contains(&rule.label)) {
            continue;
        }
        let g = gcs.rule_graph(rule)?.intersect(&guard_graph)?;
        out.push(Composer::new(&g, Arc::clone(gcs.state_nodes()))?);
    }
    Ok(out)
}

/// `Pre_a(S)`: union of `Pre_δ(S)` over rules labeled `a`.
pub fn pre_action(gcs: &Gcs, action: &str, s: &SymbolicSet) -> Result<SymbolicSet, EngineError> {
    pre_action_guarded(gcs, action, &[], s)
}

/// `Pre_a(S)` where each step must also satisfy the transitional `guard`.
pub fn pre_action_guarded(
    gcs: &Gcs,
    action: &str,
    guard: &[GapClause],
    s: &SymbolicSet,
) -> Result<SymbolicSet, EngineError> {
    if !gcs.has_action(action) {
        return Err(EngineError::UnknownAction(action.to_string()));
    }
    let acts = [action.to_string()];
    let comps = composers(gcs, Some(&acts), guard)?;
    let out = s
        .members
        .iter()
        .flat_map(|m| comps.iter().filter_map(move |c| c.apply(m)))
        .collect();
    Ok(SymbolicSet::from_closed(Arc::clone(&s.nodes), out))
}

/// Backward reachability `Pre*(S)`, optionally restricted to some actions
/// and to steps satisfying a positive transitional guard.
///
/// Worklist exploration in FIFO order. A new graph is discarded when it is
/// empty or covers a graph already in the pool (it adds no valuations, and
/// its predecessors are covered by the predecessors of the pool graph).
#[derive(Clone, Debug)]
pub struct PreStar<'a> {
    gcs: &'a Gcs,
    guard: Vec<GapClause>,
    actions: Option<Vec<String>>,
    limits: Limits,
}

impl<'a> PreStar<'a> {
    pub fn new(gcs: &'a Gcs) -> Self {
        PreStar {
            gcs,
            guard: Vec::new(),
            actions: None,
            limits: Limits::default(),
        }
    }

    pub fn guard(mut self, guard: Vec<GapClause>) -> Self {
        self.guard = guard;
        self
    }

    pub fn actions(mut self, actions: Option<Vec<String>>) -> Self {
        self.actions = actions;
        self
    }

    pub fn limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn run(&self, s: &SymbolicSet, metrics: &mut Metrics) -> Result<SymbolicSet, EngineError> {
        if let Some(c) = self.guard.iter().find(|c| !c.is_positive()) {
            return Err(EngineError::NonPositiveGuard(c.clone()));
        }
        let comps = composers(self.gcs, self.actions.as_deref(), &self.guard)?;
        let mut stats = PreStarStats::default();
        let mut pool: Vec<MonotonicityGraph> = Vec::new();
        let mut queue = VecDeque::new();
        for m in &s.members {
            if !pool.iter().any(|p| m.covers_closed(p)) {
                pool.push(m.clone());
                queue.push_back(pool.len() - 1);
            }
        }
        while let Some(idx) = queue.pop_front() {
            for comp in &comps {
                stats.graphs_created += 1;
                let Some(next) = comp.apply(&pool[idx]) else {
                    continue;
                };
                if pool.iter().any(|p| next.covers_closed(p)) {
                    continue;
                }
                if pool.len() >= self.limits.pool_cap {
                    metrics.graphs_created += stats.graphs_created;
                    return Err(EngineError::ResourceLimit {
                        cap: self.limits.pool_cap,
                    });
                }
                stats.max_norm = stats.max_norm.max(next.norm());
                pool.push(next);
                queue.push_back(pool.len() - 1);
            }
        }
        stats.pool_size = pool.len();
        stats.max_norm = stats.max_norm.max(s.max_norm());
        let out = SymbolicSet {
            nodes: Arc::clone(&s.nodes),
            members: reduce(pool),
        };
        stats.degree = out.degree();
        metrics.graphs_created += stats.graphs_created;
        metrics.record(stats);
        Ok(out)
    }
}

/// `Pre*(S)` over all actions, without a guard, under default limits.
pub fn pre_star(gcs: &Gcs, s: &SymbolicSet) -> Result<SymbolicSet, EngineError> {
    PreStar::new(gcs).run(s, &mut Metrics::for_system(gcs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{equality, state_nodes};
    use crate::gcs::tests::countdown;

    fn xy0() -> Arc<[Node]> {
        state_nodes(&["x".to_string(), "y".to_string()], &[0])
    }

    fn set(clauses: &[GapClause]) -> SymbolicSet {
        SymbolicSet::from_graph(&MonotonicityGraph::from_constraint(xy0(), clauses).unwrap())
    }

    fn ge(var: &str, k: i64) -> GapClause {
        GapClause::new(Node::var(var), Node::constant(0), k)
    }

    fn y_zero() -> Vec<GapClause> {
        equality(Node::var("y"), Node::constant(0)).to_vec()
    }

    fn v(x: i64, y: i64) -> Valuation {
        Valuation::from_pairs([("x", x), ("y", y)])
    }

    #[test]
    fn union_examples() {
        let a = set(&[ge("x", 5)]);
        let e = SymbolicSet::empty(xy0());
        assert_eq!(a.union(&e), a);
        let b = set(&[ge("x", 3)]);
        assert_eq!(a.union(&b), b);
        let c = set(&[ge("y", 0)]);
        assert_eq!(a.union(&c).len(), 2);
    }

    #[test]
    fn intersection_examples() {
        let a = set(&[ge("x", 5)]);
        assert_eq!(a.intersect(&SymbolicSet::full(xy0())), a);
        let b = set(&[GapClause::new(Node::var("y"), Node::var("x"), -4)]);
        let ab = a.intersect(&b);
        assert_eq!(ab.len(), 1);
        assert!(ab.contains(&v(5, 1)));
        assert!(!ab.contains(&v(10, 5)));
        assert!(a.intersect(&a.complement()).is_empty());
    }

    #[test]
    fn complement_worked_example() {
        let s = set(&[GapClause::new(Node::var("x"), Node::var("y"), 5)]);
        let c = s.complement();
        assert_eq!(c.len(), 1);
        assert_eq!(c.degree(), 4);
        let expected = set(&[GapClause::new(Node::var("y"), Node::var("x"), -4)]);
        assert_eq!(c, expected);
        assert!(c.complement().same_set(&s));
    }

    #[test]
    fn complement_of_full_and_empty() {
        assert!(SymbolicSet::full(xy0()).complement().is_empty());
        assert_eq!(SymbolicSet::empty(xy0()).complement(), SymbolicSet::full(xy0()));
    }

    #[test]
    fn pre_action_examples() {
        let g = countdown();
        let pre = pre_action(&g, "b", &set(&y_zero())).unwrap();
        assert!(pre.same_set(&set(&[ge("y", 1)])));
        assert!(pre_action(&g, "a", &SymbolicSet::empty(xy0())).unwrap().is_empty());
        assert!(matches!(
            pre_action(&g, "c", &set(&y_zero())),
            Err(EngineError::UnknownAction(_))
        ));
    }

    #[test]
    fn pre_constraint_worked_example() {
        let g = countdown();
        let m = g.rule_graph(&g.rules()[0]).unwrap();
        let mut target = y_zero();
        target.push(ge("x", 1));
        let pre = pre_constraint(&m, &set(&target)).unwrap();
        let mut expected = y_zero();
        expected.push(ge("x", 2));
        assert_eq!(pre, set(&expected));
        assert!(pre.contains(&v(2, 0)));
        assert!(!pre.contains(&v(2, 1)));
    }

    #[test]
    fn pre_action_sums_rules_with_same_label() {
        let mut rules = countdown().rules().to_vec();
        rules[1].label = "a".into();
        let g = Gcs::new(vec!["x".into(), "y".into()], vec![0], vec!["a".into()], rules);
        let target = set(&y_zero());
        let both = pre_action(&g, "a", &target).unwrap();
        let c0 = pre_constraint(&g.rule_graph(&g.rules()[0]).unwrap(), &target).unwrap();
        let c1 = pre_constraint(&g.rule_graph(&g.rules()[1]).unwrap(), &target).unwrap();
        assert!(both.same_set(&c0.union(&c1)));
    }

    #[test]
    fn countdown_prestar() {
        let g = countdown();
        let mut origin = y_zero();
        origin.extend(equality(Node::var("x"), Node::constant(0)));
        let s = set(&origin);
        let r = pre_star(&g, &s).unwrap();
        let mut expected_b = y_zero();
        expected_b.push(ge("x", 0));
        let expected = set(&[ge("y", 1)]).union(&set(&expected_b));
        assert!(r.same_set(&expected));
        assert!(s.is_subset_of(&r));
    }

    #[test]
    fn prestar_trivial_cases() {
        let g = countdown();
        let full = SymbolicSet::full(xy0());
        assert_eq!(pre_star(&g, &full).unwrap(), full);
        let empty = SymbolicSet::empty(xy0());
        assert!(pre_star(&g, &empty).unwrap().is_empty());
    }

    #[test]
    fn prestar_rejects_negative_guard() {
        let g = countdown();
        let guard = vec![GapClause::new(Node::var("x"), Node::primed("x"), -1)];
        let err = PreStar::new(&g)
            .guard(guard)
            .run(&set(&y_zero()), &mut Metrics::default())
            .unwrap_err();
        assert!(matches!(err, EngineError::NonPositiveGuard(_)));
    }

    #[test]
    fn prestar_pool_cap_fails_cleanly() {
        let g = countdown();
        let mut origin = y_zero();
        origin.extend(equality(Node::var("x"), Node::constant(0)));
        let err = PreStar::new(&g)
            .limits(Limits { pool_cap: 1 })
            .run(&set(&origin), &mut Metrics::default())
            .unwrap_err();
        assert_eq!(err, EngineError::ResourceLimit { cap: 1 });
    }

    #[test]
    fn prestar_records_metrics() {
        let g = countdown();
        let mut m = Metrics::for_system(&g);
        let r = PreStar::new(&g).run(&set(&y_zero()), &mut m).unwrap();
        assert_eq!(m.prestar_runs.len(), 1);
        let run = &m.prestar_runs[0];
        assert!(run.pool_size >= r.len());
        assert!(run.graphs_created >= run.pool_size as u64 - 1);
        assert!(run.max_norm >= r.max_norm());
        assert_eq!(m.dimension, 9);
    }

    #[test]
    fn subset_examples() {
        let a = set(&[ge("x", 5)]);
        let b = set(&[ge("x", 3)]);
        assert!(a.is_subset_of(&a));
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        // a union covering a set without any single member covering it
        let split = set(&[ge("y", 0)]).union(&set(&[GapClause::new(Node::constant(0), Node::var("y"), 1)]));
        assert!(SymbolicSet::full(xy0()).is_subset_of(&split));
    }
}
