//! Finite labeled transition systems, bisimulation by partition refinement,
//! and equivalence checking of GCS states against finite processes through
//! characteristic EF formulas.
//!
//! # The characteristic formula
//!
//! For a state `s` of an `n`-state LTS, `φ_s^k` is the depth-`k`
//! Hennessy–Milner formula of `s`:
//!
//! ```text
//! φ_s^0     = true
//! φ_s^(k+1) = ⋀_a ( ⋀_{s -a-> s'} ◊_a φ_s'^k  ∧  ¬◊_a ¬ ⋁_{s -a-> s'} φ_s'^k )
//! ```
//!
//! and `Θ_s = φ_s^n ∧ AG ⋁_t φ_t^n`. A state `u` of any system satisfies
//! `Θ_s` iff it is bisimilar to `s`:
//!
//! * Within the LTS, `t ⊨ φ_s^k` iff `s` and `t` share a level-`k` class, by
//!   induction on `k`. The level partitions over `n` states stop changing
//!   after at most `n - 1` rounds, so level `n - 1` and level `n` coincide
//!   with bisimilarity.
//! * Let `R` relate `u` to `t` when `u` is reachable from a state satisfying
//!   `Θ_s` and `u ⊨ φ_t^n`. The `AG` conjunct gives every such reachable `u`
//!   some `t`. If `u ⊨ φ_t^n` and `u -a-> u'`, the box part of `φ_t^n` yields
//!   an `a`-successor `t'` of `t` with `u' ⊨ φ_t'^(n-1)`; the `AG` conjunct
//!   gives `u' ⊨ φ_t''^n` for some `t''`, which implies `u' ⊨ φ_t''^(n-1)`.
//!   Two level-`(n-1)` formulas holding at one point put `t'` and `t''` in one
//!   level-`(n-1)` class, hence `t' ~ t''` and `u' ⊨ φ_t'^n` (formulas agree
//!   on bisimilar states). The diamond part matches moves of `t` the same way,
//!   so `R` is a bisimulation.
//! * Conversely a state bisimilar to `s` satisfies `φ_s^n`, and everything it
//!   reaches is bisimilar to some LTS state.
//!
//! Formulas are built once per class and level and shared through `Arc`, so
//! their size grows with the number of classes, not with the branching.
//!
//! In weak mode the same construction runs over the saturated relation `⇒`
//! with `◊_τ = EF_τ` and `◊_a = EF_τ <a> EF_τ` for visible `a`, where `EF_τ`
//! is reachability restricted to `τ`-steps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::constraint::Valuation;
use crate::error::EngineError;
use crate::gcs::Gcs;
use crate::logic::{Checker, Formula};
use crate::symbolic::SymbolicSet;

/// Default name of the silent action.
pub const TAU: &str = "tau";

/// A finite LTS. States and actions are interned by name; the first state
/// added is the initial one by convention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteLts {
    states: Vec<String>,
    acts: Vec<String>,
    transitions: BTreeSet<(usize, usize, usize)>,
}

impl FiniteLts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, name: &str) -> usize {
        intern(&mut self.states, name)
    }

    pub fn add_action(&mut self, name: &str) -> usize {
        intern(&mut self.acts, name)
    }

    pub fn add_transition(&mut self, src: &str, action: &str, dst: &str) {
        let s = self.add_state(src);
        let a = self.add_action(action);
        let t = self.add_state(dst);
        self.transitions.insert((s, a, t));
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn acts(&self) -> &[String] {
        &self.acts
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `(source, action, target)` index triples in sorted order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.transitions.iter().copied()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.acts.iter().position(|a| a == name)
    }

    /// Sorted `a`-successors of state `s`.
    pub fn successors(&self, s: usize, a: usize) -> Vec<usize> {
        self.transitions
            .range((s, a, 0)..=(s, a, usize::MAX))
            .map(|&(_, _, t)| t)
            .collect()
    }

    /// Both systems side by side; states of `other` are renamed with a `'`
    /// suffix when their names clash. Returns the index of `other`'s first state.
    pub fn disjoint_union(&self, other: &FiniteLts) -> (FiniteLts, usize) {
        let mut out = self.clone();
        let offset = out.states.len();
        let mut names = Vec::with_capacity(other.states.len());
        for s in &other.states {
            let mut name = s.clone();
            while out.states.contains(&name) {
                name.push('\'');
            }
            out.states.push(name.clone());
            names.push(name);
        }
        for a in &other.acts {
            out.add_action(a);
        }
        for (s, a, t) in other.transitions() {
            let a = out.add_action(&other.acts[a]);
            out.transitions.insert((s + offset, a, t + offset));
        }
        (out, offset)
    }
}

fn intern(list: &mut Vec<String>, name: &str) -> usize {
    match list.iter().position(|x| x == name) {
        Some(i) => i,
        None => {
            list.push(name.to_string());
            list.len() - 1
        }
    }
}

/// An LTS whose transitions are the weak steps of another one: `⇒τ` is the
/// reflexive-transitive closure of `-τ->` and `⇒a = ⇒τ -a-> ⇒τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakLts {
    lts: FiniteLts,
    tau: String,
}

impl WeakLts {
    pub fn lts(&self) -> &FiniteLts {
        &self.lts
    }

    pub fn tau(&self) -> &str {
        &self.tau
    }
}

/// Saturates `l`; the result always declares `tau`.
pub fn weak_closure(l: &FiniteLts, tau: &str) -> WeakLts {
    let n = l.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    if let Some(t) = l.action_index(tau) {
        for (s, a, d) in l.transitions() {
            if a == t {
                reach[s][d] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
    }
    let mut out = FiniteLts {
        states: l.states.clone(),
        acts: l.acts.clone(),
        transitions: BTreeSet::new(),
    };
    let t = out.add_action(tau);
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] {
                out.transitions.insert((i, t, j));
            }
        }
    }
    for (s, a, d) in l.transitions() {
        if l.acts[a] == tau {
            continue;
        }
        for i in (0..n).filter(|&i| reach[i][s]) {
            for j in (0..n).filter(|&j| reach[d][j]) {
                out.transitions.insert((i, a, j));
            }
        }
    }
    WeakLts {
        lts: out,
        tau: tau.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Strong,
    Weak,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Mode::Strong),
            "weak" => Ok(Mode::Weak),
            other => Err(format!("unknown mode `{other}` (expected strong or weak)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        })
    }
}

/// Class assignment of the level-`level` approximant. Class ids are numbered
/// by first occurrence in state order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub class: Vec<usize>,
    pub level: usize,
}

impl Partition {
    pub fn same_class(&self, s: usize, t: usize) -> bool {
        self.class[s] == self.class[t]
    }

    pub fn class_count(&self) -> usize {
        self.class.iter().max().map_or(0, |m| m + 1)
    }

    /// Every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let n = self.class.len();
        (0..n).all(|s| (0..n).all(|t| !self.same_class(s, t) || coarser.same_class(s, t)))
    }

    fn coarsest(n: usize) -> Partition {
        Partition {
            class: vec![0; n],
            level: 0,
        }
    }

    /// Splits classes by the classes reachable per action.
    fn split(&self, l: &FiniteLts) -> Partition {
        let mut ids: BTreeMap<(usize, Vec<BTreeSet<usize>>), usize> = BTreeMap::new();
        let mut class = Vec::with_capacity(l.len());
        for s in 0..l.len() {
            let sig: Vec<BTreeSet<usize>> = (0..l.acts.len())
                .map(|a| l.successors(s, a).into_iter().map(|t| self.class[t]).collect())
                .collect();
            let next = ids.len();
            class.push(*ids.entry((self.class[s], sig)).or_insert(next));
        }
        Partition {
            class,
            level: self.level + 1,
        }
    }
}

fn relation(l: &FiniteLts, mode: Mode, tau: &str) -> FiniteLts {
    match mode {
        Mode::Strong => l.clone(),
        Mode::Weak => weak_closure(l, tau).lts,
    }
}

/// Approximants `0..=depth` of (weak) bisimilarity on `l`.
pub fn refinement_levels(l: &FiniteLts, depth: usize, mode: Mode, tau: &str) -> Vec<Partition> {
    let rel = relation(l, mode, tau);
    let mut levels = vec![Partition::coarsest(l.len())];
    for _ in 0..depth {
        let next = levels.last().unwrap().split(&rel);
        levels.push(next);
    }
    levels
}

/// The (weak) bisimilarity partition, refined until stable.
pub fn refine(l: &FiniteLts, mode: Mode, tau: &str) -> Partition {
    let rel = relation(l, mode, tau);
    let mut p = Partition::coarsest(l.len());
    loop {
        let next = p.split(&rel);
        if next.class == p.class {
            return p;
        }
        p = next;
    }
}

/// Per-level formula tables for one LTS.
struct FormulaBuilder {
    rel: FiniteLts,
    mode: Mode,
    tau: String,
    levels: Vec<Partition>,
    /// `tables[k][c]` is the formula of level-`k` class `c`
    tables: Vec<Vec<Arc<Formula>>>,
}

impl FormulaBuilder {
    fn new(l: &FiniteLts, depth: usize, mode: Mode, tau: &str) -> Self {
        let levels = refinement_levels(l, depth, mode, tau);
        let mut b = FormulaBuilder {
            rel: relation(l, mode, tau),
            mode,
            tau: tau.to_string(),
            levels,
            tables: vec![vec![Arc::new(Formula::True)]],
        };
        for k in 0..depth {
            let row = b.next_row(k);
            b.tables.push(row);
        }
        b
    }

    fn restricted_ef(&self, f: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Ef {
            guard: Vec::new(),
            actions: Some(vec![self.tau.clone()]),
            body: f,
        })
    }

    /// `◊_a f`
    fn possibly(&self, a: &str, f: Arc<Formula>) -> Arc<Formula> {
        match self.mode {
            Mode::Strong => Arc::new(Formula::Diamond {
                action: a.to_string(),
                guard: Vec::new(),
                body: f,
            }),
            Mode::Weak if a == self.tau => self.restricted_ef(f),
            Mode::Weak => {
                let step = Arc::new(Formula::Diamond {
                    action: a.to_string(),
                    guard: Vec::new(),
                    body: self.restricted_ef(f),
                });
                self.restricted_ef(step)
            }
        }
    }

    fn next_row(&self, k: usize) -> Vec<Arc<Formula>> {
        let prev = &self.tables[k];
        let cur = &self.levels[k];
        let next = &self.levels[k + 1];
        let mut row: Vec<Option<Arc<Formula>>> = vec![None; next.class_count()];
        let mut diamonds: BTreeMap<(usize, usize), Arc<Formula>> = BTreeMap::new();
        for s in 0..self.rel.len() {
            let c = next.class[s];
            if row[c].is_some() {
                continue;
            }
            let mut parts = Vec::new();
            for (a, name) in self.rel.acts.iter().enumerate() {
                let targets: BTreeSet<usize> = self
                    .rel
                    .successors(s, a)
                    .into_iter()
                    .map(|t| cur.class[t])
                    .collect();
                for &t in &targets {
                    let d = diamonds
                        .entry((a, t))
                        .or_insert_with(|| self.possibly(name, Arc::clone(&prev[t])));
                    parts.push(Arc::clone(d));
                }
                let allowed = disj_arc(targets.iter().map(|&t| Arc::clone(&prev[t])));
                let escape = self.possibly(name, Arc::new(Formula::Not(allowed)));
                parts.push(Arc::new(Formula::Not(escape)));
            }
            row[c] = Some(conj_arc(parts));
        }
        row.into_iter().map(|f| f.expect("every class has a state")).collect()
    }

    fn formula(&self, s: usize, k: usize) -> Arc<Formula> {
        Arc::clone(&self.tables[k][self.levels[k].class[s]])
    }
}

fn conj_arc(fs: Vec<Arc<Formula>>) -> Arc<Formula> {
    fs.into_iter()
        .reduce(|a, b| Arc::new(Formula::And(a, b)))
        .unwrap_or_else(|| Arc::new(Formula::True))
}

fn disj_arc<I: Iterator<Item = Arc<Formula>>>(fs: I) -> Arc<Formula> {
    fs.reduce(|a, b| Arc::new(Formula::Or(a, b)))
        .unwrap_or_else(|| Arc::new(Formula::ff()))
}

/// `φ_s^depth` for state index `s` of `l` (see the module docs).
pub fn hm_formula(l: &FiniteLts, s: usize, depth: usize, mode: Mode, tau: &str) -> Formula {
    let b = FormulaBuilder::new(l, depth, mode, tau);
    (*b.formula(s, depth)).clone()
}

/// `Θ_s = φ_s^n ∧ AG ⋁_t φ_t^n` with `n = |states|`.
pub fn characteristic_formula(l: &FiniteLts, s: usize, mode: Mode, tau: &str) -> Formula {
    let n = l.len();
    let b = FormulaBuilder::new(l, n, mode, tau);
    let everywhere = disj_arc(b.tables[n].iter().cloned());
    Formula::And(b.formula(s, n), Arc::new(Formula::Ag(everywhere)))
}

/// Checks a GCS against an LTS for one mode, sharing work across queries.
///
/// The alphabets are merged: the LTS must not use a visible action unknown
/// to the system, while system actions missing from the LTS are added to it
/// (the LTS simply never performs them). `tau` is added to the system when
/// absent, with no rules.
pub struct EquivChecker {
    gcs: Gcs,
    lts: FiniteLts,
    mode: Mode,
    tau: String,
}

impl EquivChecker {
    pub fn new(gcs: &Gcs, lts: &FiniteLts, mode: Mode, tau: &str) -> Result<Self, EngineError> {
        if let Some(a) = lts
            .acts()
            .iter()
            .find(|a| *a != tau && !gcs.has_action(a))
        {
            return Err(EngineError::AlphabetMismatch(a.clone()));
        }
        let mut l = lts.clone();
        for a in gcs.acts() {
            l.add_action(a);
        }
        let mut acts = gcs.acts().to_vec();
        if !gcs.has_action(tau) && (mode == Mode::Weak || l.action_index(tau).is_some()) {
            acts.push(tau.to_string());
        }
        let g = Gcs::new(gcs.vars().to_vec(), gcs.consts().to_vec(), acts, gcs.rules().to_vec());
        Ok(EquivChecker {
            gcs: g,
            lts: l,
            mode,
            tau: tau.to_string(),
        })
    }

    pub fn gcs(&self) -> &Gcs {
        &self.gcs
    }

    pub fn lts(&self) -> &FiniteLts {
        &self.lts
    }

    pub fn state(&self, name: &str) -> Result<usize, EngineError> {
        self.lts
            .state_index(name)
            .ok_or_else(|| EngineError::UnknownState(name.to_string()))
    }

    pub fn formula(&self, s: usize) -> Formula {
        characteristic_formula(&self.lts, s, self.mode, &self.tau)
    }

    /// All system states (weakly) bisimilar to LTS state `s`.
    pub fn class_of(&self, checker: &mut Checker<'_>, s: usize) -> Result<SymbolicSet, EngineError> {
        checker.denote_set(&self.formula(s))
    }

    pub fn checker(&self) -> Checker<'_> {
        Checker::new(&self.gcs)
    }
}

/// Whether system state `v` is (weakly) bisimilar to state `s` of `l`.
pub fn equiv_check(
    g: &Gcs,
    v: &Valuation,
    l: &FiniteLts,
    s: &str,
    mode: Mode,
    tau: &str,
) -> Result<bool, EngineError> {
    let ec = EquivChecker::new(g, l, mode, tau)?;
    let idx = ec.state(s)?;
    let mut checker = ec.checker();
    checker.check(v, &ec.formula(idx))
}

/// The gap-definable set of system states equivalent to `s`.
pub fn equivalence_class(
    g: &Gcs,
    l: &FiniteLts,
    s: &str,
    mode: Mode,
    tau: &str,
) -> Result<SymbolicSet, EngineError> {
    let ec = EquivChecker::new(g, l, mode, tau)?;
    let idx = ec.state(s)?;
    let mut checker = ec.checker();
    ec.class_of(&mut checker, idx)
}
