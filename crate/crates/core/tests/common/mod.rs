#![allow(dead_code)]

use std::sync::Arc;

use gapcheck::{Gcs, GapClause, MonotonicityGraph, Node, SymbolicSet, TransitionRule, Valuation};
use proptest::prelude::*;

pub const VARS: [&str; 3] = ["x", "y", "z"];
pub const CONSTS: [i64; 2] = [0, 2];

/// Vars x, y, z and constants 0, 2, without rules. Only its node sets are used.
pub fn universe() -> Gcs {
    Gcs::new(
        VARS.iter().map(|s| s.to_string()).collect(),
        CONSTS.to_vec(),
        vec!["a".into()],
        vec![],
    )
}

pub fn state_nodes() -> Arc<[Node]> {
    universe().state_nodes().clone()
}

pub fn trans_nodes() -> Arc<[Node]> {
    universe().trans_nodes().clone()
}

fn distinct_pair(nodes: Arc<[Node]>) -> impl Strategy<Value = (Node, Node)> {
    let n = nodes.len();
    (0..n, 1..n).prop_map(move |(i, d)| (nodes[i].clone(), nodes[(i + d) % n].clone()))
}

pub fn state_clause(offsets: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = GapClause> {
    (distinct_pair(state_nodes()), offsets).prop_map(|((a, b), k)| GapClause::new(a, b, k))
}

pub fn positive_step_clause() -> impl Strategy<Value = GapClause> {
    (distinct_pair(trans_nodes()), 0..=3i64).prop_map(|((a, b), k)| GapClause::new(a, b, k))
}

/// A raw (unclosed) state graph from up to four clauses with offsets in -4..=4.
pub fn state_graph() -> impl Strategy<Value = MonotonicityGraph> {
    prop::collection::vec(state_clause(-4..=4), 0..=4)
        .prop_map(|cs| MonotonicityGraph::from_constraint(state_nodes(), &cs).unwrap())
}

pub fn satisfiable_state_graph() -> impl Strategy<Value = MonotonicityGraph> {
    state_graph().prop_filter("satisfiable", |m| m.is_satisfiable())
}

/// A positive transitional graph from up to four clauses.
pub fn step_graph() -> impl Strategy<Value = MonotonicityGraph> {
    prop::collection::vec(positive_step_clause(), 0..=4)
        .prop_map(|cs| MonotonicityGraph::from_constraint(trans_nodes(), &cs).unwrap())
}

pub fn symbolic_set() -> impl Strategy<Value = SymbolicSet> {
    prop::collection::vec(state_graph(), 0..=3)
        .prop_map(|gs| SymbolicSet::from_graphs(state_nodes(), gs).unwrap())
}

pub fn valuation(lo: i64, hi: i64) -> impl Strategy<Value = Valuation> {
    prop::collection::vec(lo..=hi, VARS.len())
        .prop_map(|vs| Valuation::from_pairs(VARS.iter().copied().zip(vs)))
}

/// Current and next valuations for step checks.
pub fn step_valuations(lo: i64, hi: i64) -> impl Strategy<Value = (Valuation, Valuation)> {
    (valuation(lo, hi), valuation(lo, hi))
}

pub fn countdown() -> Gcs {
    let (x, y, x2, y2) = (Node::var("x"), Node::var("y"), Node::primed("x"), Node::primed("y"));
    let zero = Node::constant(0);
    let cx = vec![
        GapClause::new(x.clone(), x2.clone(), 1),
        GapClause::new(x2.clone(), zero.clone(), 0),
        GapClause::new(y2.clone(), y.clone(), 0),
        GapClause::new(y.clone(), y2.clone(), 0),
    ];
    let cy = vec![
        GapClause::new(y.clone(), y2.clone(), 1),
        GapClause::new(x2, x, 0),
        GapClause::new(y2, zero, 0),
    ];
    Gcs::new(
        vec!["x".into(), "y".into()],
        vec![0],
        vec!["a".into(), "b".into()],
        vec![TransitionRule::new("CX", "a", cx), TransitionRule::new("CY", "b", cy)],
    )
}
