//! Text formats for systems, formulas, valuations, LTSs and QBFs, and the
//! JSON form of monotonicity graphs and symbolic sets.
//!
//! ```text
//! gcs {
//!   vars: x, y;
//!   consts: 0;
//!   acts: a, b;          # optional, defaults to the labels in use
//! }
//! rule CX [a]: x > x' & x' >= 0 & y = y';
//! rule CY [b]: y > y' & x' >= x & y' >= 0;
//! ```
//!
//! A clause is `t - u >= k`, or `t op u` / `t - u op k` with `op` one of
//! `>=`, `>`, `<=`, `<`, `=`; the shorthands expand to `>=` clauses. Terms
//! are variables, primed variables (in rules and guards) and integers. An
//! integer that is not a declared constant is rewritten against the nearest
//! declared one (`x >= 3` over constant `0` becomes `x - 0 >= 3`).

mod lexer;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bisim::FiniteLts;
use crate::constraint::{GapClause, Node, Valuation};
use crate::gcs::{Gcs, TransitionRule};
use crate::logic::Formula;
use crate::mg::{MgError, MonotonicityGraph};
use crate::reductions::{BoolExpr, Qbf, Quantifier};
use crate::symbolic::SymbolicSet;
use crate::weight::Weight;

use lexer::{Cursor, Tok};

/// Action given to rules written without a label.
pub const DEFAULT_ACTION: &str = "step";

const KEYWORDS: [&str; 7] = ["true", "false", "EF", "AG", "EG", "E", "U"];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("invalid system:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Graph(#[from] MgError),
}

/// Symbols visible while parsing clauses.
struct Scope<'a> {
    vars: &'a [String],
    consts: &'a [i64],
    primed: bool,
}

enum Term {
    Node(Node),
    Int(i64),
}

fn term(cur: &mut Cursor, scope: &Scope) -> Result<Term, ParseError> {
    match cur.peek() {
        Some(Tok::Int(_)) | Some(Tok::Minus) => Ok(Term::Int(cur.int()?)),
        Some(Tok::Ident(name)) => {
            let name = name.clone();
            if KEYWORDS.contains(&name.as_str()) {
                return Err(cur.unexpected("a variable or integer"));
            }
            if !scope.vars.contains(&name) {
                return Err(cur.error(format!("unknown variable `{name}`")));
            }
            cur.next();
            if cur.peek() == Some(&Tok::Prime) {
                if !scope.primed {
                    return Err(cur.error("primed variables are only allowed in rules and step guards"));
                }
                cur.next();
                Ok(Term::Node(Node::primed(name)))
            } else {
                Ok(Term::Node(Node::var(name)))
            }
        }
        _ => Err(cur.unexpected("a variable or integer")),
    }
}

/// Resolves a term on side `lhs`/`rhs` of `lhs - rhs >= k` into a node and
/// the correction to `k` caused by substituting an undeclared integer.
fn resolve(t: Term, is_lhs: bool, scope: &Scope, cur: &Cursor) -> Result<(Node, i64), ParseError> {
    match t {
        Term::Node(n) => Ok((n, 0)),
        Term::Int(c) if scope.consts.contains(&c) => Ok((Node::Const(c), 0)),
        Term::Int(c) => {
            let d = scope
                .consts
                .iter()
                .copied()
                .min_by_key(|d| ((*d as i128 - c as i128).abs(), *d))
                .ok_or_else(|| cur.error(format!("integer `{c}` used but no constants are declared")))?;
            Ok((Node::Const(d), if is_lhs { d - c } else { c - d }))
        }
    }
}

/// One clause in surface syntax, expanded to `>=` form.
fn clause(cur: &mut Cursor, scope: &Scope) -> Result<Vec<GapClause>, ParseError> {
    let lhs = term(cur, scope)?;
    let (rhs, op, k) = if cur.eat(&Tok::Minus) {
        let rhs = term(cur, scope)?;
        let op = comparison(cur)?;
        (rhs, op, cur.int()?)
    } else {
        let op = comparison(cur)?;
        (term(cur, scope)?, op, 0)
    };
    let (l, dl) = resolve(lhs, true, scope, cur)?;
    let (r, dr) = resolve(rhs, false, scope, cur)?;
    let shift = dl + dr;
    let ge = |a: &Node, b: &Node, k: i64| GapClause::new(a.clone(), b.clone(), k);
    // l - r op k
    Ok(match op {
        Tok::Ge => vec![ge(&l, &r, k + shift)],
        Tok::Gt => vec![ge(&l, &r, k + 1 + shift)],
        Tok::Le => vec![ge(&r, &l, -k - shift)],
        Tok::Lt => vec![ge(&r, &l, 1 - k - shift)],
        _ => vec![ge(&l, &r, k + shift), ge(&r, &l, -k - shift)],
    })
}

fn comparison(cur: &mut Cursor) -> Result<Tok, ParseError> {
    match cur.peek() {
        Some(t @ (Tok::Ge | Tok::Gt | Tok::Le | Tok::Lt | Tok::Eq)) => {
            let t = t.clone();
            cur.next();
            Ok(t)
        }
        _ => Err(cur.unexpected("a comparison (`>=`, `>`, `<=`, `<`, `=`)")),
    }
}

/// Clauses joined by `&` or `,`; the keyword `true` stands for none.
fn clause_list(cur: &mut Cursor, scope: &Scope, stop: &Tok) -> Result<Vec<GapClause>, ParseError> {
    let mut out = Vec::new();
    if cur.eat_keyword("true") {
        return Ok(out);
    }
    if cur.peek() == Some(stop) {
        return Ok(out);
    }
    loop {
        out.extend(clause(cur, scope)?);
        if !(cur.eat(&Tok::Amp) || cur.eat(&Tok::Comma)) {
            return Ok(out);
        }
    }
}

fn ident_list(cur: &mut Cursor, end: &Tok) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    if cur.eat(end) {
        return Ok(out);
    }
    loop {
        out.push(cur.ident()?);
        if cur.eat(end) {
            return Ok(out);
        }
        cur.expect(&Tok::Comma)?;
    }
}

/// Parses and validates a system description.
pub fn parse_gcs(text: &str) -> Result<Gcs, FrontendError> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("gcs")?;
    cur.expect(&Tok::LBrace)?;
    let mut vars = None;
    let mut consts = None;
    let mut acts = None;
    while !cur.eat(&Tok::RBrace) {
        let key = cur.ident()?;
        cur.expect(&Tok::Colon)?;
        match key.as_str() {
            "vars" if vars.is_none() => {
                let list = ident_list(&mut cur, &Tok::Semi)?;
                if let Some(k) = list.iter().find(|v| KEYWORDS.contains(&v.as_str())) {
                    return Err(cur.error(format!("`{k}` is a keyword and cannot name a variable")).into());
                }
                vars = Some(list);
            }
            "acts" if acts.is_none() => acts = Some(ident_list(&mut cur, &Tok::Semi)?),
            "consts" if consts.is_none() => {
                let mut list = Vec::new();
                if !cur.eat(&Tok::Semi) {
                    loop {
                        list.push(cur.int()?);
                        if cur.eat(&Tok::Semi) {
                            break;
                        }
                        cur.expect(&Tok::Comma)?;
                    }
                }
                consts = Some(list);
            }
            "vars" | "acts" | "consts" => {
                return Err(cur.error(format!("`{key}` is declared twice")).into())
            }
            other => {
                return Err(cur
                    .error(format!("unknown section `{other}` (expected vars, consts or acts)"))
                    .into())
            }
        }
    }
    let vars = vars.unwrap_or_default();
    let mut consts = consts.unwrap_or_default();
    consts.sort_unstable();
    consts.dedup();
    let scope = Scope {
        vars: &vars,
        consts: &consts,
        primed: true,
    };
    let mut rules = Vec::new();
    let mut lines = Vec::new();
    while !cur.at_end() {
        lines.push(cur.error("").line);
        cur.expect_keyword("rule")?;
        let name = cur.ident()?;
        let label = if cur.eat(&Tok::LBracket) {
            let l = cur.ident()?;
            cur.expect(&Tok::RBracket)?;
            l
        } else {
            DEFAULT_ACTION.to_string()
        };
        cur.expect(&Tok::Colon)?;
        let clauses = clause_list(&mut cur, &scope, &Tok::Semi)?;
        cur.expect(&Tok::Semi)?;
        rules.push(TransitionRule::new(name, label, clauses));
    }
    let acts = acts.unwrap_or_else(|| {
        let mut seen = Vec::new();
        for r in &rules {
            if !seen.contains(&r.label) {
                seen.push(r.label.clone());
            }
        }
        seen
    });
    let g = Gcs::new(vars, consts, acts, rules);
    let problems = g.validate();
    if problems.is_empty() {
        return Ok(g);
    }
    let line_of = |rule: &str| {
        g.rules()
            .iter()
            .position(|r| r.name == rule)
            .map(|i| lines[i])
    };
    Err(FrontendError::Invalid(
        problems
            .iter()
            .map(|d| {
                use crate::gcs::Diagnostic::*;
                let rule = match d {
                    NegativeOffset { rule, .. }
                    | UnknownSymbol { rule, .. }
                    | UnknownAction { rule, .. }
                    | Unlabeled { rule }
                    | DuplicateRule { rule } => Some(rule.as_str()),
                    _ => None,
                };
                match rule.and_then(line_of) {
                    Some(line) => format!("line {line}: {d}"),
                    None => d.to_string(),
                }
            })
            .collect(),
    ))
}

fn write_clauses(out: &mut String, cs: &[GapClause]) {
    if cs.is_empty() {
        out.push_str("true");
    }
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            out.push_str(" & ");
        }
        out.push_str(&c.to_string());
    }
}

/// Normalized text form; [`parse_gcs`] reads it back to an equal system.
pub fn gcs_to_text(g: &Gcs) -> String {
    let list = |items: Vec<String>| items.join(", ");
    let mut out = String::from("gcs {\n");
    out.push_str(&format!("  vars: {};\n", list(g.vars().to_vec())));
    out.push_str(&format!(
        "  consts: {};\n",
        list(g.consts().iter().map(|c| c.to_string()).collect())
    ));
    out.push_str(&format!("  acts: {};\n", list(g.acts().to_vec())));
    out.push_str("}\n");
    for r in g.rules() {
        out.push_str(&format!("rule {} [{}]: ", r.name, r.label));
        write_clauses(&mut out, &r.constraint);
        out.push_str(";\n");
    }
    out
}

struct FormulaParser<'g> {
    cur: Cursor,
    gcs: &'g Gcs,
}

fn scope(g: &Gcs, primed: bool) -> Scope<'_> {
    Scope {
        vars: g.vars(),
        consts: g.consts(),
        primed,
    }
}

impl FormulaParser<'_> {

    fn action(&mut self) -> Result<String, ParseError> {
        let a = self.cur.ident()?;
        if !self.gcs.has_action(&a) {
            return Err(self.cur.error(format!("unknown action `{a}`")));
        }
        Ok(a)
    }

    fn guard(&mut self) -> Result<Vec<GapClause>, ParseError> {
        if !self.cur.eat(&Tok::LBrace) {
            return Ok(Vec::new());
        }
        let scope = scope(self.gcs, true);
        let cs = clause_list(&mut self.cur, &scope, &Tok::RBrace)?;
        self.cur.expect(&Tok::RBrace)?;
        Ok(cs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and()?;
        while self.cur.eat(&Tok::Bar) {
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.cur.eat(&Tok::Amp) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.cur.eat(&Tok::Bang) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.cur.eat(&Tok::Lt) {
            let a = self.action()?;
            self.cur.expect(&Tok::Gt)?;
            let guard = self.guard()?;
            return Ok(Formula::diamond_guarded(a, guard, self.unary()?));
        }
        if self.cur.eat(&Tok::LBracket) {
            let a = self.action()?;
            self.cur.expect(&Tok::RBracket)?;
            return Ok(Formula::boxed(a, self.unary()?));
        }
        if self.cur.eat_keyword("EF") {
            let actions = if self.cur.eat(&Tok::LBracket) {
                let mut acts = Vec::new();
                if !self.cur.eat(&Tok::RBracket) {
                    loop {
                        acts.push(self.action()?);
                        if self.cur.eat(&Tok::RBracket) {
                            break;
                        }
                        self.cur.expect(&Tok::Comma)?;
                    }
                }
                Some(acts)
            } else {
                None
            };
            let guard = self.guard()?;
            return Ok(Formula::ef_restricted(guard, actions, self.unary()?));
        }
        if self.cur.eat_keyword("AG") {
            return Ok(Formula::ag(self.unary()?));
        }
        if self.cur.eat_keyword("EG") {
            return Ok(Formula::eg(self.unary()?));
        }
        if self.cur.eat_keyword("E") {
            if self.cur.eat(&Tok::LParen) {
                let f = self.or()?;
                if self.cur.eat_keyword("U") {
                    let g = self.or()?;
                    self.cur.expect(&Tok::RParen)?;
                    return Ok(Formula::eu(f, g));
                }
                self.cur.expect(&Tok::RParen)?;
                self.cur.expect_keyword("U")?;
                return Ok(Formula::eu(f, self.unary()?));
            }
            let f = self.unary()?;
            self.cur.expect_keyword("U")?;
            return Ok(Formula::eu(f, self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.cur.eat_keyword("true") {
            return Ok(Formula::True);
        }
        if self.cur.eat_keyword("false") {
            return Ok(Formula::ff());
        }
        if self.cur.eat(&Tok::LParen) {
            let f = self.or()?;
            self.cur.expect(&Tok::RParen)?;
            return Ok(f);
        }
        let scope = scope(self.gcs, false);
        let cs = clause(&mut self.cur, &scope)?;
        Ok(Formula::clauses(cs))
    }
}

/// Parses a formula over the symbols of `g`. `EG` and `E U` are accepted
/// here and rejected by the evaluator.
pub fn parse_formula(text: &str, g: &Gcs) -> Result<Formula, FrontendError> {
    let mut p = FormulaParser {
        cur: Cursor::new(text)?,
        gcs: g,
    };
    let f = p.or()?;
    p.cur.finish()?;
    Ok(f)
}

/// A step guard: clauses over current and primed variables joined by `&`
/// or `,`.
pub fn parse_guard(text: &str, g: &Gcs) -> Result<Vec<GapClause>, FrontendError> {
    let mut cur = Cursor::new(text)?;
    let cs = clause_list(&mut cur, &scope(g, true), &Tok::Semi)?;
    cur.finish()?;
    Ok(cs)
}

/// `x=3, y=0`; must assign exactly the variables of `g`.
pub fn parse_valuation(text: &str, g: &Gcs) -> Result<Valuation, FrontendError> {
    let mut cur = Cursor::new(text)?;
    let mut v = Valuation::new();
    while !cur.at_end() {
        let name = cur.ident()?;
        if !g.vars().contains(&name) {
            return Err(cur.error(format!("unknown variable `{name}`")).into());
        }
        if v.get(&name).is_some() {
            return Err(cur.error(format!("`{name}` is assigned twice")).into());
        }
        cur.expect(&Tok::Eq)?;
        v.set(name, cur.int()?);
        if !cur.eat(&Tok::Comma) {
            cur.finish()?;
        }
    }
    let missing: Vec<&String> = g.vars().iter().filter(|x| v.get(x).is_none()).collect();
    if !missing.is_empty() {
        let names: Vec<&str> = missing.iter().map(|s| s.as_str()).collect();
        return Err(cur.error(format!("missing values for {}", names.join(", "))).into());
    }
    Ok(v)
}

pub fn valuation_to_text(v: &Valuation) -> String {
    v.to_string()
}

/// One transition `s -a-> t` or lone state `s` per line; an optional
/// `acts: a, b` line declares actions. The first state mentioned is the
/// initial one.
pub fn parse_lts(text: &str) -> Result<FiniteLts, FrontendError> {
    let mut l = FiniteLts::new();
    let valid = |s: &str| {
        !s.is_empty()
            && s.chars()
                .all(|c| c.is_alphanumeric() || c == '_' || c == '.' || c == '\'')
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let line = line.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ParseError {
            line: line_no,
            col: raw.find(line).unwrap_or(0) + 1,
            message,
        };
        if let Some(rest) = line.strip_prefix("acts:") {
            for a in rest.split(',').map(str::trim).filter(|a| !a.is_empty()) {
                if !valid(a) {
                    return Err(err(format!("bad action name `{a}`")).into());
                }
                l.add_action(a);
            }
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [s] if valid(s) => {
                l.add_state(s);
            }
            [s, arrow, t] => {
                let a = arrow
                    .strip_prefix('-')
                    .and_then(|x| x.strip_suffix("->"))
                    .filter(|a| valid(a))
                    .ok_or_else(|| err(format!("expected `-action->`, found `{arrow}`")))?;
                if !valid(s) || !valid(t) {
                    return Err(err("bad state name".into()).into());
                }
                l.add_transition(s, a, t);
            }
            _ => return Err(err("expected `state -action-> state` or a state name".into()).into()),
        }
    }
    if l.is_empty() {
        return Err(ParseError {
            line: 1,
            col: 1,
            message: "LTS has no states".into(),
        }
        .into());
    }
    Ok(l)
}

/// Text form read back by [`parse_lts`] to an equal LTS: actions, then every
/// state in order, then transitions.
pub fn lts_to_text(l: &FiniteLts) -> String {
    let mut out = format!("acts: {}\n", l.acts().join(", "));
    for s in l.states() {
        out.push_str(s);
        out.push('\n');
    }
    for (s, a, t) in l.transitions() {
        out.push_str(&format!("{} -{}-> {}\n", l.states()[s], l.acts()[a], l.states()[t]));
    }
    out
}

struct QbfParser {
    cur: Cursor,
}

impl QbfParser {
    fn iff(&mut self) -> Result<BoolExpr, ParseError> {
        let mut e = self.implies()?;
        while self.cur.eat(&Tok::Iff) {
            e = BoolExpr::iff(e, self.implies()?);
        }
        Ok(e)
    }

    fn implies(&mut self) -> Result<BoolExpr, ParseError> {
        let e = self.or()?;
        if self.cur.eat(&Tok::Arrow) {
            return Ok(BoolExpr::implies(e, self.implies()?));
        }
        Ok(e)
    }

    fn or(&mut self) -> Result<BoolExpr, ParseError> {
        let mut e = self.and()?;
        while self.cur.eat(&Tok::Bar) {
            e = BoolExpr::or(e, self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<BoolExpr, ParseError> {
        let mut e = self.unary()?;
        while self.cur.eat(&Tok::Amp) {
            e = BoolExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<BoolExpr, ParseError> {
        if self.cur.eat(&Tok::Bang) {
            return Ok(BoolExpr::not(self.unary()?));
        }
        if self.cur.eat(&Tok::LParen) {
            let e = self.iff()?;
            self.cur.expect(&Tok::RParen)?;
            return Ok(e);
        }
        match self.cur.peek() {
            Some(Tok::Int(0)) => {
                self.cur.next();
                Ok(BoolExpr::Const(false))
            }
            Some(Tok::Int(1)) => {
                self.cur.next();
                Ok(BoolExpr::Const(true))
            }
            Some(Tok::Ident(s)) if s == "true" || s == "false" => {
                let b = s == "true";
                self.cur.next();
                Ok(BoolExpr::Const(b))
            }
            Some(Tok::Ident(s)) if s == "forall" || s == "exists" => {
                Err(self.cur.error("quantifiers must come first (prenex form)"))
            }
            Some(Tok::Ident(_)) => Ok(BoolExpr::Var(self.cur.ident()?)),
            _ => Err(self.cur.unexpected("a variable, constant or `(`")),
        }
    }
}

/// `forall x. exists y z. (x <-> y) | z` with `!`, `&`, `|`, `->`, `<->`,
/// `0`/`1`/`true`/`false`.
pub fn parse_qbf(text: &str) -> Result<Qbf, FrontendError> {
    let mut p = QbfParser {
        cur: Cursor::new(text)?,
    };
    let mut prefix = Vec::new();
    loop {
        let q = if p.cur.eat_keyword("forall") {
            Quantifier::Forall
        } else if p.cur.eat_keyword("exists") {
            Quantifier::Exists
        } else {
            break;
        };
        loop {
            prefix.push((q, p.cur.ident()?));
            if p.cur.eat(&Tok::Dot) {
                break;
            }
            p.cur.eat(&Tok::Comma);
        }
    }
    let matrix = p.iff()?;
    p.cur.finish()?;
    let q = Qbf::new(prefix, matrix);
    if let Some(problem) = q.problems().into_iter().next() {
        return Err(p.cur.error(problem).into());
    }
    Ok(q)
}

/// An edge weight in JSON: an integer, or `"-inf"` / `"+inf"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonWeight {
    Finite(i64),
    Infinite(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub from: String,
    pub to: String,
    pub weight: JsonWeight,
}

/// A graph as `{nodes: [...], edges: [{from, to, weight}]}`. Edges of
/// weight `-inf` are omitted, and so are self-loops and the arithmetic
/// edges between constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<JsonEdge>,
}

pub fn graph_to_json(m: &MonotonicityGraph) -> JsonGraph {
    JsonGraph {
        nodes: m.nodes().iter().map(Node::to_string).collect(),
        edges: m
            .display_edges()
            .into_iter()
            .map(|(a, b, w)| JsonEdge {
                from: a.to_string(),
                to: b.to_string(),
                weight: match w {
                    Weight::Finite(k) => JsonWeight::Finite(k),
                    other => JsonWeight::Infinite(other.to_string()),
                },
            })
            .collect(),
    }
}

pub fn set_to_json(s: &SymbolicSet) -> Vec<JsonGraph> {
    s.members().iter().map(graph_to_json).collect()
}

/// Pretty-printed JSON array of the members, in canonical order.
pub fn set_to_json_string(s: &SymbolicSet) -> String {
    serde_json::to_string_pretty(&set_to_json(s)).expect("plain data serializes")
}

fn node_from_name(name: &str) -> Node {
    if let Ok(c) = name.parse::<i64>() {
        Node::Const(c)
    } else if let Some(base) = name.strip_suffix('\'') {
        Node::primed(base)
    } else {
        Node::var(name)
    }
}

fn weight_from_json(w: &JsonWeight) -> Result<Weight, FrontendError> {
    match w {
        JsonWeight::Finite(k) => Ok(Weight::Finite(*k)),
        JsonWeight::Infinite(s) if s == "-inf" => Ok(Weight::NegInf),
        JsonWeight::Infinite(s) if s == "+inf" || s == "inf" => Ok(Weight::PosInf),
        JsonWeight::Infinite(s) => Err(FrontendError::Json(format!("bad weight `{s}`"))),
    }
}

/// Reads a JSON graph over the state nodes of `g`.
pub fn graph_from_json(j: &JsonGraph, g: &Gcs) -> Result<MonotonicityGraph, FrontendError> {
    let known: BTreeSet<Node> = g.state_nodes().iter().cloned().collect();
    for name in &j.nodes {
        if !known.contains(&node_from_name(name)) {
            return Err(FrontendError::Json(format!("node `{name}` is not a state node of the system")));
        }
    }
    let mut edges = Vec::new();
    for e in &j.edges {
        edges.push((node_from_name(&e.from), node_from_name(&e.to), weight_from_json(&e.weight)?));
    }
    Ok(MonotonicityGraph::from_edges(
        g.state_nodes().clone(),
        edges.iter().map(|(a, b, w)| (a, b, *w)),
    )?)
}

pub fn set_from_json(text: &str, g: &Gcs) -> Result<SymbolicSet, FrontendError> {
    let graphs: Vec<JsonGraph> =
        serde_json::from_str(text).map_err(|e| FrontendError::Json(e.to_string()))?;
    let graphs = graphs
        .iter()
        .map(|j| graph_from_json(j, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SymbolicSet::from_graphs(g.state_nodes().clone(), graphs)?)
}

/// A set given either as a JSON array of graphs or as a modality-free
/// formula (`x >= 1 | y = 0`).
pub fn parse_set(text: &str, g: &Gcs) -> Result<SymbolicSet, FrontendError> {
    if text.trim_start().starts_with('[') {
        return set_from_json(text, g);
    }
    let f = parse_formula(text, g)?;
    if !modality_free(&f) {
        return Err(FrontendError::Json(
            "a set must be a JSON array or a formula without modalities".into(),
        ));
    }
    crate::logic::denote(g, &f)
        .map(|d| d.set)
        .map_err(|e| FrontendError::Json(e.to_string()))
}

fn modality_free(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::Atom(_) => true,
        Formula::Not(g) => modality_free(g),
        Formula::And(a, b) | Formula::Or(a, b) => modality_free(a) && modality_free(b),
        _ => false,
    }
}

/// One member per line in clause form; `false` for the empty set.
pub struct SetText<'a>(pub &'a SymbolicSet);

impl fmt::Display for SetText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return writeln!(f, "false");
        }
        for m in self.0.members() {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}
