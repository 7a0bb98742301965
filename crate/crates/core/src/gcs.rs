//! Gap-order constraint systems and their concrete step semantics.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::bisim::FiniteLts;
use crate::constraint::{self, equality, GapClause, Node, Valuation};
use crate::mg::{MgError, MonotonicityGraph};

/// A labeled positive transitional gap constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionRule {
    pub name: String,
    pub constraint: Vec<GapClause>,
    pub label: String,
}

impl TransitionRule {
    pub fn new(name: impl Into<String>, label: impl Into<String>, constraint: Vec<GapClause>) -> Self {
        TransitionRule {
            name: name.into(),
            constraint,
            label: label.into(),
        }
    }

    /// `v ⊕ next ⊨ constraint`, evaluated clause by clause.
    pub fn holds(&self, v: &Valuation, next: &Valuation) -> bool {
        self.constraint
            .iter()
            .all(|c| c.holds_with(|n| v.combined_value(next, n)).unwrap_or(false))
    }
}

/// Problems found by [`Gcs::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("rule `{rule}`: clause `{clause}` has a negative offset; rules must be positive")]
    NegativeOffset { rule: String, clause: GapClause },
    #[error("rule `{rule}`: unknown symbol `{node}`")]
    UnknownSymbol { rule: String, node: Node },
    #[error("rule `{rule}` is labeled with undeclared action `{label}`")]
    UnknownAction { rule: String, label: String },
    #[error("rule `{rule}` has no action label")]
    Unlabeled { rule: String },
    #[error("duplicate rule name `{rule}`")]
    DuplicateRule { rule: String },
    #[error("variable `{var}` is declared twice")]
    DuplicateVar { var: String },
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GcsError {
    #[error("window [{lo}, {hi}] over {dims} variables has {count} points, above the cap of {cap}")]
    WindowTooLarge {
        lo: i64,
        hi: i64,
        dims: usize,
        count: u128,
        cap: u128,
    },
    #[error("empty window [{lo}, {hi}]")]
    EmptyWindow { lo: i64, hi: i64 },
    #[error("valuation must assign exactly the variables {expected:?}, got {got:?}")]
    BadValuation { expected: Vec<String>, got: Vec<String> },
}

/// Default cap on the number of window points enumerated by explicit stepping.
pub const DEFAULT_WINDOW_CAP: u128 = 1 << 20;

/// A system `(Var, Const, Act, Δ, λ)`. Labels live on the rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gcs {
    vars: Vec<String>,
    consts: Vec<i64>,
    acts: Vec<String>,
    rules: Vec<TransitionRule>,
    state_nodes: Arc<[Node]>,
    trans_nodes: Arc<[Node]>,
}

impl Gcs {
    /// Constants are sorted and deduplicated. No validation happens here; see
    /// [`Gcs::validate`].
    pub fn new(
        vars: Vec<String>,
        mut consts: Vec<i64>,
        acts: Vec<String>,
        rules: Vec<TransitionRule>,
    ) -> Self {
        consts.sort_unstable();
        consts.dedup();
        let state_nodes = constraint::state_nodes(&vars, &consts);
        let trans_nodes = constraint::transitional_nodes(&vars, &consts);
        Gcs {
            vars,
            consts,
            acts,
            rules,
            state_nodes,
            trans_nodes,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn consts(&self) -> &[i64] {
        &self.consts
    }

    pub fn acts(&self) -> &[String] {
        &self.acts
    }

    pub fn rules(&self) -> &[TransitionRule] {
        &self.rules
    }

    /// `Var ∪ Const`, the nodes of state graphs.
    pub fn state_nodes(&self) -> &Arc<[Node]> {
        &self.state_nodes
    }

    /// `Var ∪ Var' ∪ Const`, the nodes of transitional graphs.
    pub fn trans_nodes(&self) -> &Arc<[Node]> {
        &self.trans_nodes
    }

    pub fn rule_graph(&self, rule: &TransitionRule) -> Result<MonotonicityGraph, MgError> {
        MonotonicityGraph::from_constraint(Arc::clone(&self.trans_nodes), &rule.constraint)
    }

    /// A state graph for a conjunction of unprimed clauses.
    pub fn state_graph(&self, clauses: &[GapClause]) -> Result<MonotonicityGraph, MgError> {
        MonotonicityGraph::from_constraint(Arc::clone(&self.state_nodes), clauses)
    }

    pub fn has_action(&self, a: &str) -> bool {
        self.acts.iter().any(|x| x == a)
    }

    fn knows(&self, node: &Node) -> bool {
        match node {
            Node::Var(n) | Node::Primed(n) => self.vars.contains(n),
            Node::Const(c) => self.consts.binary_search(c).is_ok(),
        }
    }

    /// One diagnostic per violated invariant; empty when the system is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for v in &self.vars {
            if !seen.insert(v) {
                out.push(Diagnostic::DuplicateVar { var: v.clone() });
            }
        }
        let mut names = BTreeSet::new();
        for rule in &self.rules {
            if !names.insert(&rule.name) {
                out.push(Diagnostic::DuplicateRule {
                    rule: rule.name.clone(),
                });
            }
            if rule.label.is_empty() {
                out.push(Diagnostic::Unlabeled {
                    rule: rule.name.clone(),
                });
            } else if !self.has_action(&rule.label) {
                out.push(Diagnostic::UnknownAction {
                    rule: rule.name.clone(),
                    label: rule.label.clone(),
                });
            }
            for clause in &rule.constraint {
                for node in clause.nodes() {
                    if !self.knows(node) {
                        out.push(Diagnostic::UnknownSymbol {
                            rule: rule.name.clone(),
                            node: node.clone(),
                        });
                    }
                }
                if !clause.is_positive() {
                    out.push(Diagnostic::NegativeOffset {
                        rule: rule.name.clone(),
                        clause: clause.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn check_valuation(&self, v: &Valuation) -> Result<(), GcsError> {
        let expected: BTreeSet<&str> = self.vars.iter().map(String::as_str).collect();
        let got: BTreeSet<&str> = v.vars().collect();
        if expected == got {
            Ok(())
        } else {
            Err(GcsError::BadValuation {
                expected: self.vars.clone(),
                got: v.vars().map(str::to_string).collect(),
            })
        }
    }

    /// Actions `a` with `v -a-> next`, in declaration order.
    pub fn step(&self, v: &Valuation, next: &Valuation) -> Vec<String> {
        self.acts
            .iter()
            .filter(|a| {
                self.rules
                    .iter()
                    .any(|r| &r.label == *a && r.holds(v, next))
            })
            .cloned()
            .collect()
    }

    /// All successors of `v` whose components lie in `[lo, hi]`, ordered by
    /// action (declaration order) and then lexicographically by valuation.
    pub fn successors_in_window(
        &self,
        v: &Valuation,
        lo: i64,
        hi: i64,
    ) -> Result<Vec<(String, Valuation)>, GcsError> {
        self.successors_in_window_capped(v, lo, hi, DEFAULT_WINDOW_CAP)
    }

    pub fn successors_in_window_capped(
        &self,
        v: &Valuation,
        lo: i64,
        hi: i64,
        cap: u128,
    ) -> Result<Vec<(String, Valuation)>, GcsError> {
        let points = window_points(&self.vars, lo, hi, cap)?;
        let mut out = Vec::new();
        for a in &self.acts {
            for next in &points {
                if self
                    .rules
                    .iter()
                    .any(|r| &r.label == a && r.holds(v, next))
                {
                    out.push((a.clone(), next.clone()));
                }
            }
        }
        Ok(out)
    }
}

/// Every valuation of `vars` over `[lo, hi]`, lexicographic in variable order.
pub fn window_points(
    vars: &[String],
    lo: i64,
    hi: i64,
    cap: u128,
) -> Result<Vec<Valuation>, GcsError> {
    if lo > hi {
        return Err(GcsError::EmptyWindow { lo, hi });
    }
    let width = (hi as i128 - lo as i128 + 1) as u128;
    let count = width.checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if count > cap {
        return Err(GcsError::WindowTooLarge {
            lo,
            hi,
            dims: vars.len(),
            count,
            cap,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![lo; vars.len()];
    loop {
        out.push(Valuation::from_pairs(
            vars.iter().cloned().zip(digits.iter().copied()),
        ));
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if digits[pos] < hi {
                digits[pos] += 1;
                break;
            }
            digits[pos] = lo;
        }
    }
}

/// Name of the control variable introduced by [`encode_finite_lts`].
pub const STATE_VAR: &str = "state";

/// Simulates a finite LTS with one variable `state` over the constants
/// `1..=n`: the `i`-th state (0-based) is `state = i + 1`, and each
/// transition `p -a-> q` becomes the rule `state = [p] & state' = [q]`.
pub fn encode_finite_lts(l: &FiniteLts) -> Gcs {
    let n = l.states().len() as i64;
    let state = Node::var(STATE_VAR);
    let state_next = Node::primed(STATE_VAR);
    let rules = l
        .transitions()
        .enumerate()
        .map(|(idx, (p, a, q))| {
            let mut clauses = Vec::with_capacity(4);
            clauses.extend(equality(state.clone(), Node::Const(p as i64 + 1)));
            clauses.extend(equality(state_next.clone(), Node::Const(q as i64 + 1)));
            TransitionRule::new(format!("t{idx}"), l.acts()[a].clone(), clauses)
        })
        .collect();
    Gcs::new(
        vec![STATE_VAR.to_string()],
        (1..=n).collect(),
        l.acts().to_vec(),
        rules,
    )
}

/// The valuation `state = i + 1` standing for the `i`-th LTS state.
pub fn encoded_state(index: usize) -> Valuation {
    Valuation::from_pairs([(STATE_VAR, index as i64 + 1)])
}
