//! Gap clauses, graph nodes and valuations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A node of a monotonicity graph: a variable, its primed (next-state) copy,
/// or an integer constant. A valuation maps a constant node to itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Var(String),
    Primed(String),
    Const(i64),
}

impl Node {
    pub fn var(name: impl Into<String>) -> Node {
        Node::Var(name.into())
    }

    pub fn primed(name: impl Into<String>) -> Node {
        Node::Primed(name.into())
    }

    pub fn constant(value: i64) -> Node {
        Node::Const(value)
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Node::Const(_))
    }

    pub fn is_primed(&self) -> bool {
        matches!(self, Node::Primed(_))
    }

    /// Variable name of a `Var` or `Primed` node.
    pub fn name(&self) -> Option<&str> {
        match self {
            Node::Var(n) | Node::Primed(n) => Some(n),
            Node::Const(_) => None,
        }
    }

    /// `x` becomes `x'`; constants are unchanged.
    pub fn prime(&self) -> Node {
        match self {
            Node::Var(n) => Node::Primed(n.clone()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Var(n) => f.write_str(n),
            Node::Primed(n) => write!(f, "{n}'"),
            Node::Const(c) => write!(f, "{c}"),
        }
    }
}

/// The gap clause `lhs - rhs >= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapClause {
    pub lhs: Node,
    pub rhs: Node,
    pub offset: i64,
}

impl GapClause {
    pub fn new(lhs: Node, rhs: Node, offset: i64) -> Self {
        GapClause { lhs, rhs, offset }
    }

    /// Positive clauses (offset >= 0) are the only ones allowed in transition rules.
    pub fn is_positive(&self) -> bool {
        self.offset >= 0
    }

    pub fn is_transitional(&self) -> bool {
        self.lhs.is_primed() || self.rhs.is_primed()
    }

    /// `not (x - y >= k)` is `y - x >= 1 - k`.
    pub fn negate(&self) -> GapClause {
        GapClause {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            offset: 1 - self.offset,
        }
    }

    pub fn nodes(&self) -> [&Node; 2] {
        [&self.lhs, &self.rhs]
    }

    /// Evaluates the clause under `value`, which must assign every non-constant endpoint.
    pub fn holds_with(&self, value: impl Fn(&Node) -> Option<i64>) -> Option<bool> {
        let l = value(&self.lhs)?;
        let r = value(&self.rhs)?;
        Some((l as i128) - (r as i128) >= self.offset as i128)
    }
}

impl fmt::Display for GapClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - {} >= {}", self.lhs, self.rhs, self.offset)
    }
}

/// `x - y >= k` and `y - x >= -k` for `x = y + k`; both positive only when `k = 0`.
pub fn equality(lhs: Node, rhs: Node) -> [GapClause; 2] {
    [
        GapClause::new(lhs.clone(), rhs.clone(), 0),
        GapClause::new(rhs, lhs, 0),
    ]
}

/// A total assignment of integers to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(BTreeMap<String, i64>);

impl Valuation {
    pub fn new() -> Self {
        Valuation(BTreeMap::new())
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        Valuation(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn get(&self, var: &str) -> Option<i64> {
        self.0.get(var).copied()
    }

    pub fn set(&mut self, var: impl Into<String>, value: i64) {
        self.0.insert(var.into(), value);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Value of an unprimed node; constants evaluate to themselves.
    pub fn value_of(&self, node: &Node) -> Option<i64> {
        match node {
            Node::Var(n) => self.get(n),
            Node::Const(c) => Some(*c),
            Node::Primed(_) => None,
        }
    }

    /// Value of a node under the combination `self ⊕ next`.
    pub fn combined_value(&self, next: &Valuation, node: &Node) -> Option<i64> {
        match node {
            Node::Var(n) => self.get(n),
            Node::Primed(n) => next.get(n),
            Node::Const(c) => Some(*c),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Node list `vars ++ consts` used by state graphs.
pub fn state_nodes(vars: &[String], consts: &[i64]) -> Arc<[Node]> {
    vars.iter()
        .map(|v| Node::Var(v.clone()))
        .chain(consts.iter().map(|&c| Node::Const(c)))
        .collect()
}

/// Node list `vars ++ primed(vars) ++ consts` used by transitional graphs.
pub fn transitional_nodes(vars: &[String], consts: &[i64]) -> Arc<[Node]> {
    vars.iter()
        .map(|v| Node::Var(v.clone()))
        .chain(vars.iter().map(|v| Node::Primed(v.clone())))
        .chain(consts.iter().map(|&c| Node::Const(c)))
        .collect()
}
