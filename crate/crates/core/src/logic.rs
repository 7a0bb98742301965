//! EF formulas over gap-order constraint systems and their symbolic
//! denotations.
//!
//! Evaluation is bottom up: atoms become single graphs, negation is set
//! complement, `<a>` is the one-step predecessor and `EF` the predecessor
//! fixpoint. `EG` and `E U` parse but are rejected before any work happens.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::constraint::{GapClause, Valuation};
use crate::error::EngineError;
use crate::gcs::Gcs;
use crate::symbolic::{pre_action_guarded, Limits, Metrics, PreStar, SymbolicSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Atom(GapClause),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    /// `<a>_guard f`: some `a`-step whose transition also satisfies `guard`
    /// (which may be any transitional gap constraint) leads into `f`.
    Diamond {
        action: String,
        guard: Vec<GapClause>,
        body: Arc<Formula>,
    },
    /// `EF f`, optionally through steps labeled in `actions` that each satisfy
    /// the positive transitional `guard`.
    Ef {
        guard: Vec<GapClause>,
        actions: Option<Vec<String>>,
        body: Arc<Formula>,
    },
    /// `AG f = !EF !f`
    Ag(Arc<Formula>),
    /// `[a] f = !<a> !f`
    Box { action: String, body: Arc<Formula> },
    Eg(Arc<Formula>),
    Eu(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::True
    }

    pub fn ff() -> Formula {
        Formula::not(Formula::True)
    }

    pub fn atom(c: GapClause) -> Formula {
        Formula::Atom(c)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::And(Arc::new(f), Arc::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(Arc::new(f), Arc::new(g))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
        fs.into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
        fs.into_iter().reduce(Formula::or).unwrap_or_else(Formula::ff)
    }

    /// Conjunction of atoms.
    pub fn clauses<I: IntoIterator<Item = GapClause>>(cs: I) -> Formula {
        Formula::conj(cs.into_iter().map(Formula::Atom))
    }

    pub fn diamond(action: impl Into<String>, f: Formula) -> Formula {
        Formula::diamond_guarded(action, Vec::new(), f)
    }

    pub fn diamond_guarded(action: impl Into<String>, guard: Vec<GapClause>, f: Formula) -> Formula {
        Formula::Diamond {
            action: action.into(),
            guard,
            body: Arc::new(f),
        }
    }

    pub fn ef(f: Formula) -> Formula {
        Formula::ef_restricted(Vec::new(), None, f)
    }

    pub fn ef_restricted(guard: Vec<GapClause>, actions: Option<Vec<String>>, f: Formula) -> Formula {
        Formula::Ef {
            guard,
            actions,
            body: Arc::new(f),
        }
    }

    pub fn ag(f: Formula) -> Formula {
        Formula::Ag(Arc::new(f))
    }

    pub fn boxed(action: impl Into<String>, f: Formula) -> Formula {
        Formula::Box {
            action: action.into(),
            body: Arc::new(f),
        }
    }

    pub fn eg(f: Formula) -> Formula {
        Formula::Eg(Arc::new(f))
    }

    pub fn eu(f: Formula, g: Formula) -> Formula {
        Formula::Eu(Arc::new(f), Arc::new(g))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Not(f) if **f == Formula::True)
    }

    fn children(&self) -> Vec<&Arc<Formula>> {
        match self {
            Formula::True | Formula::Atom(_) => vec![],
            Formula::Not(f) | Formula::Ag(f) | Formula::Eg(f) => vec![f],
            Formula::Diamond { body, .. } | Formula::Ef { body, .. } | Formula::Box { body, .. } => {
                vec![body]
            }
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Eu(f, g) => vec![f, g],
        }
    }

    /// First `EG`/`EU` operator found, if any. Shared subterms are visited once.
    pub fn undecidable_operator(&self) -> Option<&'static str> {
        fn walk(f: &Formula, seen: &mut std::collections::HashSet<*const Formula>) -> Option<&'static str> {
            match f {
                Formula::Eg(_) => return Some("EG"),
                Formula::Eu(..) => return Some("EU"),
                _ => {}
            }
            for c in f.children() {
                if seen.insert(Arc::as_ptr(c)) {
                    if let Some(op) = walk(c, seen) {
                        return Some(op);
                    }
                }
            }
            None
        }
        walk(self, &mut Default::default())
    }

    /// Longest chain of nested `!`, `<a>`, `[a]`, `EF`, `AG`, `EG`, `EU`
    /// operators; boolean connectives and atoms count zero.
    pub fn nesting_depth(&self) -> usize {
        fn walk(f: &Formula, memo: &mut HashMap<*const Formula, usize>) -> usize {
            let inner = f
                .children()
                .into_iter()
                .map(|c| {
                    let key = Arc::as_ptr(c);
                    if let Some(&d) = memo.get(&key) {
                        return d;
                    }
                    let d = walk(c, memo);
                    memo.insert(key, d);
                    d
                })
                .max()
                .unwrap_or(0);
            match f {
                Formula::True | Formula::Atom(_) | Formula::And(..) | Formula::Or(..) => inner,
                _ => inner + 1,
            }
        }
        walk(self, &mut HashMap::new())
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Operand of a unary operator: binary connectives need parentheses.
struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::And(..) | Formula::Or(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}

/// Prints in the concrete syntax accepted by the formula parser; `!`, `<a>`,
/// `[a]`, `EF`, `AG` bind tighter than `&`, which binds tighter than `|`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            _ if self.is_false() => f.write_str("false"),
            Formula::Atom(c) => write!(f, "{c}"),
            Formula::Not(g) => write!(f, "!{}", Operand(g)),
            Formula::And(a, b) => {
                match **a {
                    Formula::Or(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                f.write_str(" & ")?;
                match **b {
                    Formula::Or(..) | Formula::And(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Formula::Or(a, b) => {
                write!(f, "{a} | ")?;
                match **b {
                    Formula::Or(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Formula::Diamond {
                action,
                guard,
                body,
            } => {
                write!(f, "<{action}>")?;
                if !guard.is_empty() {
                    f.write_str("{")?;
                    write_list(f, guard)?;
                    f.write_str("}")?;
                }
                write!(f, " {}", Operand(body))
            }
            Formula::Ef {
                guard,
                actions,
                body,
            } => {
                f.write_str("EF")?;
                if let Some(acts) = actions {
                    f.write_str("[")?;
                    write_list(f, acts)?;
                    f.write_str("]")?;
                }
                if !guard.is_empty() {
                    f.write_str("{")?;
                    write_list(f, guard)?;
                    f.write_str("}")?;
                }
                write!(f, " {}", Operand(body))
            }
            Formula::Ag(g) => write!(f, "AG {}", Operand(g)),
            Formula::Box { action, body } => write!(f, "[{action}] {}", Operand(body)),
            Formula::Eg(g) => write!(f, "EG {}", Operand(g)),
            Formula::Eu(a, b) => write!(f, "E {} U {}", Operand(a), Operand(b)),
        }
    }
}

/// A formula with its set of satisfying valuations.
#[derive(Clone, Debug)]
pub struct Denotation {
    pub formula: Formula,
    pub set: SymbolicSet,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    True,
    Atom(GapClause),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Diamond(String, Vec<GapClause>, usize),
    Ef(Vec<GapClause>, Option<Vec<String>>, usize),
    Ag(usize),
    Box(String, usize),
}

/// Evaluates formulas over one system, sharing work between structurally
/// equal subformulas across calls.
#[derive(Debug)]
pub struct Checker<'g> {
    gcs: &'g Gcs,
    limits: Limits,
    metrics: Metrics,
    by_ptr: HashMap<*const Formula, usize>,
    /// keeps the subformulas behind `by_ptr` alive so addresses stay unique
    pinned: Vec<Arc<Formula>>,
    by_key: HashMap<Key, usize>,
    sets: Vec<SymbolicSet>,
}

impl<'g> Checker<'g> {
    pub fn new(gcs: &'g Gcs) -> Self {
        Checker {
            gcs,
            limits: Limits::default(),
            metrics: Metrics::for_system(gcs),
            by_ptr: HashMap::new(),
            pinned: Vec::new(),
            by_key: HashMap::new(),
            sets: Vec::new(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn gcs(&self) -> &Gcs {
        self.gcs
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn denote(&mut self, f: &Formula) -> Result<Denotation, EngineError> {
        let set = self.denote_set(f)?;
        self.metrics.nesting_depth = self.metrics.nesting_depth.max(f.nesting_depth());
        Ok(Denotation {
            formula: f.clone(),
            set,
            metrics: self.metrics.clone(),
        })
    }

    pub fn denote_set(&mut self, f: &Formula) -> Result<SymbolicSet, EngineError> {
        if let Some(operator) = f.undecidable_operator() {
            return Err(EngineError::Undecidable { operator });
        }
        let id = self.node(f)?;
        Ok(self.sets[id].clone())
    }

    pub fn check(&mut self, v: &Valuation, f: &Formula) -> Result<bool, EngineError> {
        self.gcs.check_valuation(v)?;
        Ok(self.denote_set(f)?.contains(v))
    }

    fn child(&mut self, c: &Arc<Formula>) -> Result<usize, EngineError> {
        let ptr = Arc::as_ptr(c);
        if let Some(&id) = self.by_ptr.get(&ptr) {
            return Ok(id);
        }
        let id = self.node(c)?;
        self.by_ptr.insert(ptr, id);
        self.pinned.push(Arc::clone(c));
        Ok(id)
    }

    fn node(&mut self, f: &Formula) -> Result<usize, EngineError> {
        let key = match f {
            Formula::True => Key::True,
            Formula::Atom(c) => Key::Atom(c.clone()),
            Formula::Not(g) => Key::Not(self.child(g)?),
            Formula::And(a, b) => Key::And(self.child(a)?, self.child(b)?),
            Formula::Or(a, b) => Key::Or(self.child(a)?, self.child(b)?),
            Formula::Diamond {
                action,
                guard,
                body,
            } => Key::Diamond(action.clone(), guard.clone(), self.child(body)?),
            Formula::Ef {
                guard,
                actions,
                body,
            } => Key::Ef(guard.clone(), actions.clone(), self.child(body)?),
            Formula::Ag(g) => Key::Ag(self.child(g)?),
            Formula::Box { action, body } => Key::Box(action.clone(), self.child(body)?),
            Formula::Eg(_) => return Err(EngineError::Undecidable { operator: "EG" }),
            Formula::Eu(..) => return Err(EngineError::Undecidable { operator: "EU" }),
        };
        if let Some(&id) = self.by_key.get(&key) {
            return Ok(id);
        }
        let set = self.evaluate(&key)?;
        let id = self.sets.len();
        self.sets.push(set);
        self.by_key.insert(key, id);
        Ok(id)
    }

    fn evaluate(&mut self, key: &Key) -> Result<SymbolicSet, EngineError> {
        let nodes = self.gcs.state_nodes();
        Ok(match key {
            Key::True => SymbolicSet::full(nodes.clone()),
            Key::Atom(c) => {
                if c.is_transitional() {
                    return Err(crate::mg::MgError::UnknownEndpoint(
                        if c.lhs.is_primed() { c.lhs.clone() } else { c.rhs.clone() },
                    )
                    .into());
                }
                SymbolicSet::from_graph(&self.gcs.state_graph(std::slice::from_ref(c))?)
            }
            Key::Not(a) => self.sets[*a].complement(),
            Key::And(a, b) => self.sets[*a].intersect(&self.sets[*b]),
            Key::Or(a, b) => self.sets[*a].union(&self.sets[*b]),
            Key::Diamond(action, guard, a) => {
                pre_action_guarded(self.gcs, action, guard, &self.sets[*a])?
            }
            Key::Box(action, a) => {
                let inner = self.sets[*a].complement();
                pre_action_guarded(self.gcs, action, &[], &inner)?.complement()
            }
            Key::Ef(guard, actions, a) => {
                let s = self.sets[*a].clone();
                self.pre_star(guard, actions.clone(), &s)?
            }
            Key::Ag(a) => {
                let s = self.sets[*a].complement();
                self.pre_star(&[], None, &s)?.complement()
            }
        })
    }

    fn pre_star(
        &mut self,
        guard: &[GapClause],
        actions: Option<Vec<String>>,
        s: &SymbolicSet,
    ) -> Result<SymbolicSet, EngineError> {
        PreStar::new(self.gcs)
            .guard(guard.to_vec())
            .actions(actions)
            .limits(self.limits)
            .run(s, &mut self.metrics)
    }
}

/// `⟦f⟧` with a fresh checker.
pub fn denote(gcs: &Gcs, f: &Formula) -> Result<Denotation, EngineError> {
    Checker::new(gcs).denote(f)
}

/// `v ⊨ f` with a fresh checker.
pub fn check(gcs: &Gcs, v: &Valuation, f: &Formula) -> Result<bool, EngineError> {
    Checker::new(gcs).check(v, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{equality, Node};
    use crate::gcs::tests::countdown;
    use crate::mg::MonotonicityGraph;

    fn origin() -> Formula {
        let mut cs = equality(Node::var("x"), Node::constant(0)).to_vec();
        cs.extend(equality(Node::var("y"), Node::constant(0)));
        Formula::clauses(cs)
    }

    fn v(x: i64, y: i64) -> Valuation {
        Valuation::from_pairs([("x", x), ("y", y)])
    }

    #[test]
    fn ef_origin_on_countdown() {
        let g = countdown();
        let mut c = Checker::new(&g);
        let f = Formula::ef(origin());
        assert!(c.check(&v(3, 1), &f).unwrap());
        assert!(!c.check(&v(-1, 0), &f).unwrap());
        assert!(c.check(&v(7, 0), &f).unwrap());
        assert!(c.check(&v(-5, 3), &f).unwrap());
    }

    #[test]
    fn diamond_true_is_x_positive() {
        let g = countdown();
        let d = denote(&g, &Formula::diamond("a", Formula::tt())).unwrap();
        let expected = MonotonicityGraph::from_constraint(
            g.state_nodes().clone(),
            &[GapClause::new(Node::var("x"), Node::constant(0), 1)],
        )
        .unwrap();
        assert_eq!(d.set, SymbolicSet::from_graph(&expected));
    }

    #[test]
    fn true_and_not_false() {
        let g = countdown();
        assert_eq!(denote(&g, &Formula::tt()).unwrap().set, SymbolicSet::full(g.state_nodes().clone()));
        assert!(check(&g, &v(-9, 4), &Formula::not(Formula::ff())).unwrap());
    }

    #[test]
    fn eg_and_eu_are_rejected() {
        let g = countdown();
        let err = denote(&g, &Formula::eg(Formula::tt())).unwrap_err();
        assert!(err.to_string().contains("undecidable"));
        let nested = Formula::and(Formula::tt(), Formula::eu(Formula::tt(), origin()));
        assert!(matches!(denote(&g, &nested), Err(EngineError::Undecidable { operator: "EU" })));
    }

    #[test]
    fn nesting_depth_examples() {
        assert_eq!(origin().nesting_depth(), 0);
        let f = Formula::ef(Formula::not(Formula::diamond("a", Formula::tt())));
        assert_eq!(f.nesting_depth(), 3);
        let g = countdown();
        let d = denote(&g, &f).unwrap();
        assert_eq!(d.metrics.nesting_depth, 3);
    }

    #[test]
    fn box_and_ag_are_dual() {
        let g = countdown();
        let mut c = Checker::new(&g);
        let p = Formula::atom(GapClause::new(Node::var("x"), Node::constant(0), 2));
        let boxed = c.denote_set(&Formula::boxed("a", p.clone())).unwrap();
        let dual = c
            .denote_set(&Formula::not(Formula::diamond("a", Formula::not(p.clone()))))
            .unwrap();
        assert!(boxed.same_set(&dual));
        let ag = c.denote_set(&Formula::ag(p.clone())).unwrap();
        let dual = c.denote_set(&Formula::not(Formula::ef(Formula::not(p)))).unwrap();
        assert!(ag.same_set(&dual));
    }

    #[test]
    fn shared_subformulas_are_evaluated_once() {
        let g = countdown();
        let mut c = Checker::new(&g);
        let base = Arc::new(Formula::ef(origin()));
        let f = Formula::And(Arc::clone(&base), Arc::clone(&base));
        c.denote_set(&f).unwrap();
        assert_eq!(c.metrics().prestar_runs.len(), 1);
        c.denote_set(&Formula::ef(origin())).unwrap();
        assert_eq!(c.metrics().prestar_runs.len(), 1);
    }

    #[test]
    fn atoms_over_unknown_symbols_fail() {
        let g = countdown();
        let f = Formula::atom(GapClause::new(Node::var("z"), Node::constant(0), 0));
        assert!(matches!(denote(&g, &f), Err(EngineError::Graph(_))));
        let f = Formula::atom(GapClause::new(Node::primed("x"), Node::constant(0), 0));
        assert!(denote(&g, &f).is_err());
    }

    #[test]
    fn display_parenthesizes_by_precedence() {
        let a = Formula::atom(GapClause::new(Node::var("x"), Node::constant(0), 1));
        let f = Formula::and(Formula::or(a.clone(), Formula::tt()), Formula::not(Formula::and(a.clone(), a.clone())));
        assert_eq!(f.to_string(), "(x - 0 >= 1 | true) & !(x - 0 >= 1 & x - 0 >= 1)");
        let f = Formula::ef_restricted(vec![], Some(vec!["tau".into()]), Formula::diamond("a", Formula::ff()));
        assert_eq!(f.to_string(), "EF[tau] <a> false");
    }
}
