//! Hard reachability instances: quantified boolean formulas are compiled to
//! boolean programs, and boolean programs to gap-order constraint systems.
//!
//! The program checks a prenex QBF top down. A run from `eval_i` to `out_i`
//! certifies the suffix formula starting at quantifier `i`; the matrix is
//! checked by one guarded transition `eval_{k+1} -> out_{k+1}`. A universal
//! quantifier uses a flag `y_i` that records that the `x_i = 0` branch has
//! already been certified.

use std::collections::BTreeMap;
use std::fmt;

use crate::constraint::{equality, GapClause, Node, Valuation};
use crate::gcs::{Gcs, TransitionRule};
use crate::logic::Formula;

/// Name of the control-state variable in generated systems.
pub const STATE_VAR: &str = "state";
/// The single action label of generated systems.
pub const STEP_ACTION: &str = "step";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    Var(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
    Iff(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(name: impl Into<String>) -> Self {
        BoolExpr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Iff(Box::new(a), Box::new(b))
    }

    /// `None` if a variable is unassigned.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<bool>) -> Option<bool> {
        Some(match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(v) => env(v)?,
            BoolExpr::Not(e) => !e.eval(env)?,
            BoolExpr::And(a, b) => a.eval(env)? && b.eval(env)?,
            BoolExpr::Or(a, b) => a.eval(env)? || b.eval(env)?,
            BoolExpr::Implies(a, b) => !a.eval(env)? || b.eval(env)?,
            BoolExpr::Iff(a, b) => a.eval(env)? == b.eval(env)?,
        })
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            BoolExpr::Not(e) => e.collect_vars(out),
            BoolExpr::And(a, b)
            | BoolExpr::Or(a, b)
            | BoolExpr::Implies(a, b)
            | BoolExpr::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Disjunctive normal form as a list of consistent literal sets
    /// (variable -> polarity). Contradictory terms are dropped, so an
    /// unsatisfiable expression yields no terms; `true` yields one empty term.
    pub fn dnf(&self) -> Vec<BTreeMap<String, bool>> {
        let mut terms = self.dnf_with(true);
        terms.sort();
        terms.dedup();
        terms
    }

    fn dnf_with(&self, positive: bool) -> Vec<BTreeMap<String, bool>> {
        match (self, positive) {
            (BoolExpr::Const(b), p) => {
                if *b == p {
                    vec![BTreeMap::new()]
                } else {
                    vec![]
                }
            }
            (BoolExpr::Var(v), p) => vec![BTreeMap::from([(v.clone(), p)])],
            (BoolExpr::Not(e), p) => e.dnf_with(!p),
            (BoolExpr::And(a, b), true) | (BoolExpr::Or(a, b), false) => {
                product(&a.dnf_with(positive), &b.dnf_with(positive))
            }
            (BoolExpr::Or(a, b), true) | (BoolExpr::And(a, b), false) => {
                let mut out = a.dnf_with(positive);
                out.extend(b.dnf_with(positive));
                out
            }
            (BoolExpr::Implies(a, b), true) => {
                let mut out = a.dnf_with(false);
                out.extend(b.dnf_with(true));
                out
            }
            (BoolExpr::Implies(a, b), false) => product(&a.dnf_with(true), &b.dnf_with(false)),
            (BoolExpr::Iff(a, b), p) => {
                let mut out = product(&a.dnf_with(true), &b.dnf_with(p));
                out.extend(product(&a.dnf_with(false), &b.dnf_with(!p)));
                out
            }
        }
    }
}

fn product(
    xs: &[BTreeMap<String, bool>],
    ys: &[BTreeMap<String, bool>],
) -> Vec<BTreeMap<String, bool>> {
    let mut out = Vec::new();
    for x in xs {
        'term: for y in ys {
            let mut t = x.clone();
            for (v, p) in y {
                match t.get(v) {
                    Some(q) if q != p => continue 'term,
                    _ => {
                        t.insert(v.clone(), *p);
                    }
                }
            }
            out.push(t);
        }
    }
    out
}

/// Binding strength: `<->` < `->` < `|` < `&` < `!`.
fn prec(e: &BoolExpr) -> u8 {
    match e {
        BoolExpr::Iff(..) => 1,
        BoolExpr::Implies(..) => 2,
        BoolExpr::Or(..) => 3,
        BoolExpr::And(..) => 4,
        _ => 5,
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // binary operators are printed left-associatively except `->`, which
        // associates to the right
        let side = |f: &mut fmt::Formatter<'_>, e: &BoolExpr, min: u8| {
            if prec(e) < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let p = prec(self);
        match self {
            BoolExpr::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            BoolExpr::Var(v) => f.write_str(v),
            BoolExpr::Not(e) => {
                f.write_str("!")?;
                side(f, e, 5)
            }
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) | BoolExpr::Iff(a, b) => {
                let op = match self {
                    BoolExpr::And(..) => " & ",
                    BoolExpr::Or(..) => " | ",
                    _ => " <-> ",
                };
                side(f, a, p)?;
                f.write_str(op)?;
                side(f, b, p + 1)
            }
            BoolExpr::Implies(a, b) => {
                side(f, a, p + 1)?;
                f.write_str(" -> ")?;
                side(f, b, p)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// A prenex QBF `Q1 x1 ... Qk xk. matrix`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Qbf {
    pub prefix: Vec<(Quantifier, String)>,
    pub matrix: BoolExpr,
}

impl Qbf {
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: BoolExpr) -> Self {
        Qbf { prefix, matrix }
    }

    /// Matrix variables without a quantifier, and variables quantified twice.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let bound: Vec<&String> = self.prefix.iter().map(|(_, v)| v).collect();
        for (i, v) in bound.iter().enumerate() {
            if bound[..i].contains(v) {
                out.push(format!("variable `{v}` is quantified twice"));
            }
        }
        for v in self.matrix.vars() {
            if !bound.contains(&&v) {
                out.push(format!("variable `{v}` is free"));
            }
        }
        out
    }
}

impl fmt::Display for Qbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            let q = match q {
                Quantifier::Exists => "exists",
                Quantifier::Forall => "forall",
            };
            write!(f, "{q} {v}. ")?;
        }
        write!(f, "{}", self.matrix)
    }
}

/// `from -guard/assign-> to`; `assign = None` leaves every variable unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolTransition {
    pub from: usize,
    pub guard: BoolExpr,
    pub assign: Option<(String, bool)>,
    pub to: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BooleanProgram {
    pub states: Vec<String>,
    pub vars: Vec<String>,
    pub transitions: Vec<BoolTransition>,
}

impl BooleanProgram {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Explicit state reachability from `start` with all variables 0.
    pub fn reachable(&self, start: usize, target: usize) -> bool {
        let n = self.vars.len();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![(start, vec![false; n])];
        while let Some((s, v)) = stack.pop() {
            if s == target {
                return true;
            }
            if !seen.insert((s, v.clone())) {
                continue;
            }
            for t in self.transitions.iter().filter(|t| t.from == s) {
                let env = |x: &str| self.vars.iter().position(|y| y == x).map(|i| v[i]);
                if t.guard.eval(&env) != Some(true) {
                    continue;
                }
                let mut next = v.clone();
                if let Some((x, b)) = &t.assign {
                    let i = self.vars.iter().position(|y| y == x).expect("declared variable");
                    next[i] = *b;
                }
                stack.push((t.to, next));
            }
        }
        false
    }
}

fn fresh(taken: &[String], base: String) -> String {
    let mut name = base;
    while taken.contains(&name) || name == STATE_VAR {
        name.push('_');
    }
    name
}

/// Compiles `q` into a program; returns `(program, eval_1, out_1)`.
pub fn qbf_to_boolean_program(q: &Qbf) -> (BooleanProgram, usize, usize) {
    let k = q.prefix.len();
    let mut states = Vec::new();
    for i in 1..=k + 1 {
        states.push(format!("eval_{i}"));
        states.push(format!("out_{i}"));
    }
    let eval = |i: usize| 2 * (i - 1);
    let out = |i: usize| 2 * (i - 1) + 1;

    let mut vars: Vec<String> = Vec::new();
    for (_, x) in &q.prefix {
        let name = fresh(&vars, x.clone());
        vars.push(name);
    }
    let mut flags = BTreeMap::new();
    for (i, (quant, _)) in q.prefix.iter().enumerate() {
        if *quant == Quantifier::Forall {
            let name = fresh(&vars, format!("y{}", i + 1));
            vars.push(name.clone());
            flags.insert(i + 1, name);
        }
    }
    let matrix_flag = fresh(&vars, format!("y{}", k + 1));
    vars.push(matrix_flag.clone());

    // the prefix names may have been renamed; rename the matrix to match
    let renaming: BTreeMap<&str, &str> = q
        .prefix
        .iter()
        .map(|(_, x)| x.as_str())
        .zip(vars.iter().map(String::as_str))
        .collect();
    let matrix = rename(&q.matrix, &renaming);

    let tt = BoolExpr::Const(true);
    let is = |v: &str, b: bool| {
        if b {
            BoolExpr::var(v)
        } else {
            BoolExpr::not(BoolExpr::var(v))
        }
    };
    let mut transitions = vec![BoolTransition {
        from: eval(k + 1),
        guard: matrix,
        assign: Some((matrix_flag, true)),
        to: out(k + 1),
    }];
    for (idx, (quant, _)) in q.prefix.iter().enumerate() {
        let i = idx + 1;
        let x = vars[idx].clone();
        match quant {
            Quantifier::Exists => {
                for b in [false, true] {
                    transitions.push(BoolTransition {
                        from: eval(i),
                        guard: tt.clone(),
                        assign: Some((x.clone(), b)),
                        to: eval(i + 1),
                    });
                }
                transitions.push(BoolTransition {
                    from: out(i + 1),
                    guard: tt.clone(),
                    assign: None,
                    to: out(i),
                });
            }
            Quantifier::Forall => {
                let y = &flags[&i];
                transitions.push(BoolTransition {
                    from: eval(i),
                    guard: is(y, false),
                    assign: Some((x.clone(), false)),
                    to: eval(i + 1),
                });
                transitions.push(BoolTransition {
                    from: eval(i),
                    guard: is(y, true),
                    assign: Some((x.clone(), true)),
                    to: eval(i + 1),
                });
                transitions.push(BoolTransition {
                    from: out(i + 1),
                    guard: is(y, false),
                    assign: Some((y.clone(), true)),
                    to: eval(i),
                });
                transitions.push(BoolTransition {
                    from: out(i + 1),
                    guard: is(y, true),
                    assign: Some((y.clone(), false)),
                    to: out(i),
                });
            }
        }
    }
    (
        BooleanProgram {
            states,
            vars,
            transitions,
        },
        eval(1),
        out(1),
    )
}

fn rename(e: &BoolExpr, map: &BTreeMap<&str, &str>) -> BoolExpr {
    let r = |x: &BoolExpr| Box::new(rename(x, map));
    match e {
        BoolExpr::Const(b) => BoolExpr::Const(*b),
        BoolExpr::Var(v) => BoolExpr::Var(map.get(v.as_str()).map_or(v.clone(), |s| s.to_string())),
        BoolExpr::Not(x) => BoolExpr::Not(r(x)),
        BoolExpr::And(a, b) => BoolExpr::And(r(a), r(b)),
        BoolExpr::Or(a, b) => BoolExpr::Or(r(a), r(b)),
        BoolExpr::Implies(a, b) => BoolExpr::Implies(r(a), r(b)),
        BoolExpr::Iff(a, b) => BoolExpr::Iff(r(a), r(b)),
    }
}

/// A system simulating a boolean program, with its start valuation and the
/// reachability query for the target state.
#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub gcs: Gcs,
    pub initial: Valuation,
    pub target: Formula,
    /// Transitions whose guard has no satisfiable disjunct.
    pub diagnostics: Vec<String>,
}

/// Control state `i` is `state = i + 1`; the constants are `0..=|states|`,
/// so every reachable valuation stays within `[0, |states|]`. Each
/// transition becomes one rule per satisfiable disjunct of its guard.
pub fn boolean_program_to_gcs(p: &BooleanProgram, start: usize, target: usize) -> GeneratedInstance {
    let n = p.states.len() as i64;
    let state = || Node::var(STATE_VAR);
    let zero = || Node::constant(0);
    let one = || Node::constant(1);
    let mut rules = Vec::new();
    let mut diagnostics = Vec::new();
    for (ti, t) in p.transitions.iter().enumerate() {
        let terms = t.guard.dnf();
        if terms.is_empty() {
            diagnostics.push(format!(
                "transition {ti} ({} -> {}) has an unsatisfiable guard and was dropped",
                p.states[t.from], p.states[t.to]
            ));
        }
        for (di, term) in terms.iter().enumerate() {
            let mut cs = Vec::new();
            cs.extend(equality(state(), Node::constant(t.from as i64 + 1)));
            cs.extend(equality(Node::primed(STATE_VAR), Node::constant(t.to as i64 + 1)));
            for (x, positive) in term {
                cs.push(if *positive {
                    GapClause::new(Node::var(x.clone()), one(), 0)
                } else {
                    GapClause::new(zero(), Node::var(x.clone()), 0)
                });
            }
            for x in &p.vars {
                let next = Node::primed(x.clone());
                match &t.assign {
                    Some((y, b)) if y == x => {
                        cs.extend(equality(next.clone(), Node::constant(*b as i64)));
                    }
                    _ => cs.extend(equality(next.clone(), Node::var(x.clone()))),
                }
                cs.push(GapClause::new(next.clone(), zero(), 0));
                cs.push(GapClause::new(one(), next, 0));
            }
            let name = if terms.len() == 1 {
                format!("t{ti}")
            } else {
                format!("t{ti}_{di}")
            };
            rules.push(TransitionRule::new(name, STEP_ACTION, cs));
        }
    }
    let mut vars = vec![STATE_VAR.to_string()];
    vars.extend(p.vars.iter().cloned());
    let gcs = Gcs::new(vars, (0..=n).collect(), vec![STEP_ACTION.to_string()], rules);
    let mut initial = Valuation::new();
    initial.set(STATE_VAR, start as i64 + 1);
    for x in &p.vars {
        initial.set(x.clone(), 0);
    }
    let target = Formula::ef(Formula::clauses(equality(
        state(),
        Node::constant(target as i64 + 1),
    )));
    GeneratedInstance {
        gcs,
        initial,
        target,
        diagnostics,
    }
}

/// Both compilation steps.
pub fn qbf_to_gcs(q: &Qbf) -> GeneratedInstance {
    let (p, start, target) = qbf_to_boolean_program(q);
    boolean_program_to_gcs(&p, start, target)
}
