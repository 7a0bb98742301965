//! Ground truth at desk scale: explicit-state evaluation of formulas on a
//! finite window of valuations, the syntactic window-closedness check that
//! makes such evaluation exact, a brute-force QBF evaluator, and a seeded
//! differential harness comparing the symbolic engine against all of it.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::constraint::{GapClause, Node, Valuation};
use crate::frontend;
use crate::gcs::{window_points, Gcs, GcsError, TransitionRule, DEFAULT_WINDOW_CAP};
use crate::logic::{Checker, Formula};
use crate::reductions::{Qbf, Quantifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    System(#[from] GcsError),
    #[error("valuation {0} lies outside the window")]
    OutsideWindow(Valuation),
    #[error("{operator} is not evaluated; only the EF fragment is supported")]
    Undecidable { operator: &'static str },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("atom `{0}` mentions an unknown or primed symbol")]
    BadAtom(GapClause),
    #[error("QBF has {count} variables; the evaluator handles at most {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error("QBF is malformed: {0}")]
    MalformedQbf(String),
}

/// All valuations of a system in `[lo, hi]^|Var|` with the labeled steps
/// between them.
#[derive(Clone, Debug)]
pub struct WindowGraph {
    gcs: Gcs,
    lo: i64,
    hi: i64,
    states: Vec<Valuation>,
    index: HashMap<Valuation, usize>,
    /// per state: `(rule index, target state)`
    edges: Vec<Vec<(usize, usize)>>,
}

impl WindowGraph {
    pub fn new(gcs: &Gcs, lo: i64, hi: i64) -> Result<Self, OracleError> {
        Self::with_cap(gcs, lo, hi, DEFAULT_WINDOW_CAP)
    }

    pub fn with_cap(gcs: &Gcs, lo: i64, hi: i64, cap: u128) -> Result<Self, OracleError> {
        let states = window_points(gcs.vars(), lo, hi, cap)?;
        let index: HashMap<Valuation, usize> =
            states.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let edges = states
            .iter()
            .map(|v| {
                let mut out = Vec::new();
                for (r, rule) in gcs.rules().iter().enumerate() {
                    for (j, w) in states.iter().enumerate() {
                        if rule.holds(v, w) {
                            out.push((r, j));
                        }
                    }
                }
                out
            })
            .collect();
        Ok(WindowGraph {
            gcs: gcs.clone(),
            lo,
            hi,
            states,
            index,
            edges,
        })
    }

    pub fn gcs(&self) -> &Gcs {
        &self.gcs
    }

    pub fn bounds(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn states(&self) -> &[Valuation] {
        &self.states
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, v: &Valuation) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Labeled successors `(action, target index)` of state `i`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.edges[i]
            .iter()
            .map(|&(r, j)| (self.gcs.rules()[r].label.as_str(), j))
    }

    /// States of the window from which some state of `target` is reachable.
    pub fn reaches(&self, target: &[bool]) -> Vec<bool> {
        self.backward(target, |_, _, _| true)
    }

    /// Truth value of `f` at every window state, in state order.
    pub fn evaluate(&self, f: &Formula) -> Result<Vec<bool>, OracleError> {
        let mut memo = HashMap::new();
        self.eval(f, &mut memo)
    }

    fn eval(
        &self,
        f: &Formula,
        memo: &mut HashMap<*const Formula, Vec<bool>>,
    ) -> Result<Vec<bool>, OracleError> {
        let mut sub = |c: &Arc<Formula>| -> Result<Vec<bool>, OracleError> {
            let key = Arc::as_ptr(c);
            if let Some(v) = memo.get(&key) {
                return Ok(v.clone());
            }
            let v = self.eval(c, memo)?;
            memo.insert(key, v.clone());
            Ok(v)
        };
        let n = self.states.len();
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::Atom(c) => {
                let mut out = Vec::with_capacity(n);
                for v in &self.states {
                    out.push(
                        c.holds_with(|node| v.value_of(node))
                            .ok_or_else(|| OracleError::BadAtom(c.clone()))?,
                    );
                }
                out
            }
            Formula::Not(g) => sub(g)?.into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (a, b) = (sub(a)?, sub(b)?);
                a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
            }
            Formula::Or(a, b) => {
                let (a, b) = (sub(a)?, sub(b)?);
                a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
            }
            Formula::Diamond {
                action,
                guard,
                body,
            } => {
                self.known_action(action)?;
                let target = sub(body)?;
                self.pre(&target, |r, i, j| self.allowed(r, i, j, Some(std::slice::from_ref(action)), guard))
            }
            Formula::Box { action, body } => {
                self.known_action(action)?;
                let escape: Vec<bool> = sub(body)?.into_iter().map(|b| !b).collect();
                self.pre(&escape, |r, i, j| self.allowed(r, i, j, Some(std::slice::from_ref(action)), &[]))
                    .into_iter()
                    .map(|b| !b)
                    .collect()
            }
            Formula::Ef {
                guard,
                actions,
                body,
            } => {
                for a in actions.iter().flatten() {
                    self.known_action(a)?;
                }
                let target = sub(body)?;
                self.backward(&target, |r, i, j| self.allowed(r, i, j, actions.as_deref(), guard))
            }
            Formula::Ag(g) => {
                let bad: Vec<bool> = sub(g)?.into_iter().map(|b| !b).collect();
                self.reaches(&bad).into_iter().map(|b| !b).collect()
            }
            Formula::Eg(_) => return Err(OracleError::Undecidable { operator: "EG" }),
            Formula::Eu(..) => return Err(OracleError::Undecidable { operator: "EU" }),
        })
    }

    fn known_action(&self, a: &str) -> Result<(), OracleError> {
        if self.gcs.has_action(a) {
            Ok(())
        } else {
            Err(OracleError::UnknownAction(a.to_string()))
        }
    }

    fn allowed(&self, r: usize, i: usize, j: usize, actions: Option<&[String]>, guard: &[GapClause]) -> bool {
        let rule = &self.gcs.rules()[r];
        if actions.is_some_and(|acts| !acts.contains(&rule.label)) {
            return false;
        }
        let (v, w) = (&self.states[i], &self.states[j]);
        guard
            .iter()
            .all(|c| c.holds_with(|n| v.combined_value(w, n)) == Some(true))
    }

    fn pre(&self, target: &[bool], ok: impl Fn(usize, usize, usize) -> bool) -> Vec<bool> {
        (0..self.states.len())
            .map(|i| self.edges[i].iter().any(|&(r, j)| target[j] && ok(r, i, j)))
            .collect()
    }

    /// Least fixpoint of `X = target ∪ pre(X)` over the allowed edges.
    fn backward(&self, target: &[bool], ok: impl Fn(usize, usize, usize) -> bool) -> Vec<bool> {
        let n = self.states.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for &(r, j) in &self.edges[i] {
                if ok(r, i, j) {
                    rev[j].push(i);
                }
            }
        }
        let mut out = target.to_vec();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| out[i]).collect();
        while let Some(j) = queue.pop_front() {
            for &i in &rev[j] {
                if !out[i] {
                    out[i] = true;
                    queue.push_back(i);
                }
            }
        }
        out
    }
}

/// `v ⊨ f` by explicit evaluation on the window.
pub fn explicit_check(w: &WindowGraph, v: &Valuation, f: &Formula) -> Result<bool, OracleError> {
    let i = w.index_of(v).ok_or_else(|| OracleError::OutsideWindow(v.clone()))?;
    Ok(w.evaluate(f)?[i])
}

/// Outcome of [`window_closed`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowClosedCertificate {
    pub closed: bool,
    /// First rule and variable whose next value is not syntactically bounded.
    pub violation: Option<(String, String)>,
}

/// Whether every rule confines every next-state variable to `[lo, hi]` by
/// one of its own clauses: a lower bound `x' - c >= k` with `c + k >= lo` and
/// an upper bound `c - x' >= k` with `c - k <= hi`, for constants `c`.
pub fn window_closed(g: &Gcs, lo: i64, hi: i64) -> WindowClosedCertificate {
    for rule in g.rules() {
        for x in g.vars() {
            if !bounds_next(rule, x, lo, hi) {
                return WindowClosedCertificate {
                    closed: false,
                    violation: Some((rule.name.clone(), x.clone())),
                };
            }
        }
    }
    WindowClosedCertificate {
        closed: true,
        violation: None,
    }
}

fn bounds_next(rule: &TransitionRule, x: &str, lo: i64, hi: i64) -> bool {
    let next = Node::primed(x);
    let lower = rule.constraint.iter().any(|c| match (&c.lhs, &c.rhs) {
        (l, Node::Const(k)) if *l == next => k.saturating_add(c.offset) >= lo,
        _ => false,
    });
    let upper = rule.constraint.iter().any(|c| match (&c.lhs, &c.rhs) {
        (Node::Const(k), r) if *r == next => k.saturating_sub(c.offset) <= hi,
        _ => false,
    });
    lower && upper
}

/// Largest number of QBF variables [`qbf_eval`] accepts.
pub const QBF_VARIABLE_CAP: usize = 20;

/// Truth value of a closed prenex QBF by exhaustive expansion.
pub fn qbf_eval(q: &Qbf) -> Result<bool, OracleError> {
    if q.prefix.len() > QBF_VARIABLE_CAP {
        return Err(OracleError::TooManyVariables {
            count: q.prefix.len(),
            cap: QBF_VARIABLE_CAP,
        });
    }
    if let Some(p) = q.problems().into_iter().next() {
        return Err(OracleError::MalformedQbf(p));
    }
    fn go(q: &Qbf, i: usize, env: &mut Vec<(String, bool)>) -> bool {
        if i == q.prefix.len() {
            let lookup = |x: &str| env.iter().rev().find(|(y, _)| y == x).map(|(_, b)| *b);
            return q.matrix.eval(&lookup).expect("closed formula");
        }
        let (quant, x) = &q.prefix[i];
        let mut branch = |b: bool| {
            env.push((x.clone(), b));
            let r = go(q, i + 1, env);
            env.pop();
            r
        };
        match quant {
            Quantifier::Exists => branch(false) || branch(true),
            Quantifier::Forall => branch(false) && branch(true),
        }
    }
    Ok(go(q, 0, &mut Vec::new()))
}

/// Shape of the random instances of [`differential_run`].
#[derive(Clone, Debug, Serialize)]
pub struct DiffConfig {
    pub max_vars: usize,
    pub max_rules: usize,
    pub max_depth: usize,
    /// The constants, which also bound the window.
    pub consts: Vec<i64>,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            max_vars: 3,
            max_rules: 4,
            max_depth: 3,
            consts: (0..=4).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Mismatch {
    pub case: usize,
    pub system: String,
    pub formula: String,
    pub valuation: String,
    pub symbolic: bool,
    pub explicit: bool,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct DiffMetrics {
    pub states_checked: u64,
    pub engine_errors: u64,
    pub prestar_runs: u64,
    pub graphs_created: u64,
    pub max_pool_size: usize,
    pub max_norm: u64,
    pub max_denotation_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffReport {
    pub seed: u64,
    pub cases: usize,
    pub mismatches: Vec<Mismatch>,
    /// Cases where the engine returned an error instead of a verdict.
    pub errors: Vec<String>,
    pub metrics: DiffMetrics,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.errors.is_empty()
    }
}

/// Random window-closed systems and EF formulas; the symbolic verdict is
/// compared with the explicit one on every window state.
pub fn differential_run(seed: u64, cases: usize) -> DiffReport {
    differential_run_with(seed, cases, &DiffConfig::default())
}

pub fn differential_run_with(seed: u64, cases: usize, cfg: &DiffConfig) -> DiffReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DiffReport {
        seed,
        cases,
        mismatches: Vec::new(),
        errors: Vec::new(),
        metrics: DiffMetrics::default(),
    };
    let lo = *cfg.consts.iter().min().expect("constants");
    let hi = *cfg.consts.iter().max().expect("constants");
    for case in 0..cases {
        let gcs = random_gcs(&mut rng, cfg);
        let f = random_formula(&mut rng, &gcs, cfg.max_depth);
        let window = WindowGraph::new(&gcs, lo, hi).expect("small window");
        let explicit = window.evaluate(&f).expect("generated formulas are EF");
        let mut checker = Checker::new(&gcs);
        let set = match checker.denote_set(&f) {
            Ok(s) => s,
            Err(e) => {
                report.metrics.engine_errors += 1;
                report.errors.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let m = checker.metrics();
        report.metrics.prestar_runs += m.prestar_runs.len() as u64;
        report.metrics.graphs_created += m.graphs_created;
        report.metrics.max_pool_size = report.metrics.max_pool_size.max(m.pool_size);
        report.metrics.max_norm = report.metrics.max_norm.max(m.max_norm);
        report.metrics.max_denotation_size = report.metrics.max_denotation_size.max(set.len());
        for (i, v) in window.states().iter().enumerate() {
            report.metrics.states_checked += 1;
            let symbolic = set.contains(v);
            if symbolic != explicit[i] {
                report.mismatches.push(Mismatch {
                    case,
                    system: frontend::gcs_to_text(&gcs),
                    formula: f.to_string(),
                    valuation: v.to_string(),
                    symbolic,
                    explicit: explicit[i],
                });
            }
        }
    }
    report
}

const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];
const ACTIONS: [&str; 2] = ["a", "b"];

fn random_node(rng: &mut impl Rng, vars: &[String], consts: &[i64], primed: bool) -> Node {
    let pool = vars.len() * if primed { 2 } else { 1 } + consts.len();
    let i = rng.gen_range(0..pool);
    if i < vars.len() {
        Node::var(vars[i].clone())
    } else if primed && i < 2 * vars.len() {
        Node::primed(vars[i - vars.len()].clone())
    } else {
        Node::constant(consts[i - vars.len() * if primed { 2 } else { 1 }])
    }
}

fn random_clause(rng: &mut impl Rng, vars: &[String], consts: &[i64], primed: bool, offsets: (i64, i64)) -> GapClause {
    loop {
        let a = random_node(rng, vars, consts, primed);
        let b = random_node(rng, vars, consts, primed);
        if a != b {
            return GapClause::new(a, b, rng.gen_range(offsets.0..=offsets.1));
        }
    }
}

/// A window-closed system: every rule bounds every next value into
/// `[min consts, max consts]`, plus up to three random positive clauses.
pub fn random_gcs(rng: &mut impl Rng, cfg: &DiffConfig) -> Gcs {
    let nvars = rng.gen_range(1..=cfg.max_vars.min(VAR_NAMES.len()));
    let vars: Vec<String> = VAR_NAMES[..nvars].iter().map(|s| s.to_string()).collect();
    let lo = *cfg.consts.iter().min().expect("constants");
    let hi = *cfg.consts.iter().max().expect("constants");
    let nrules = rng.gen_range(0..=cfg.max_rules);
    let rules = (0..nrules)
        .map(|r| {
            let mut cs = Vec::new();
            for x in &vars {
                cs.push(GapClause::new(Node::primed(x.clone()), Node::constant(lo), 0));
                cs.push(GapClause::new(Node::constant(hi), Node::primed(x.clone()), 0));
            }
            for _ in 0..rng.gen_range(0..=3) {
                cs.push(random_clause(rng, &vars, &cfg.consts, true, (0, 2)));
            }
            let label = *ACTIONS.choose(rng).expect("actions");
            TransitionRule::new(format!("r{r}"), label, cs)
        })
        .collect();
    Gcs::new(
        vars,
        cfg.consts.clone(),
        ACTIONS.iter().map(|s| s.to_string()).collect(),
        rules,
    )
}

fn random_atom(rng: &mut impl Rng, g: &Gcs) -> Formula {
    Formula::atom(random_clause(rng, g.vars(), g.consts(), false, (-2, 3)))
}

/// A random EF formula of nesting depth at most `depth` over the system's
/// symbols. Guards on `<a>` may be arbitrary transitional clauses; guards on
/// `EF` are positive.
pub fn random_formula(rng: &mut impl Rng, g: &Gcs, depth: usize) -> Formula {
    let choice = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..11) };
    match choice {
        0 => random_atom(rng, g),
        1 => {
            if rng.gen_bool(0.2) {
                Formula::True
            } else {
                random_atom(rng, g)
            }
        }
        2 => Formula::and(random_formula(rng, g, depth), random_formula(rng, g, depth - 1)),
        3 => Formula::or(random_formula(rng, g, depth - 1), random_formula(rng, g, depth)),
        4 => Formula::not(random_formula(rng, g, depth - 1)),
        5 => {
            let a = *ACTIONS.choose(rng).expect("actions");
            Formula::diamond(a, random_formula(rng, g, depth - 1))
        }
        6 => {
            let a = *ACTIONS.choose(rng).expect("actions");
            let guard = vec![random_clause(rng, g.vars(), g.consts(), true, (-2, 2))];
            Formula::diamond_guarded(a, guard, random_formula(rng, g, depth - 1))
        }
        7 => Formula::ef(random_formula(rng, g, depth - 1)),
        8 => {
            let acts = vec![ACTIONS.choose(rng).expect("actions").to_string()];
            let guard = if rng.gen_bool(0.5) {
                vec![random_clause(rng, g.vars(), g.consts(), true, (0, 1))]
            } else {
                Vec::new()
            };
            Formula::ef_restricted(guard, Some(acts), random_formula(rng, g, depth - 1))
        }
        9 => Formula::ag(random_formula(rng, g, depth - 1)),
        _ => {
            let a = *ACTIONS.choose(rng).expect("actions");
            Formula::boxed(a, random_formula(rng, g, depth - 1))
        }
    }
}
