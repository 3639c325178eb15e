//! Propositional formulas in negation-normal form over node variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::truth::{and3, not3, or3, TruthValue3};
use crate::error::{Error, Result};
use crate::graph::{NodeId, Sign};

/// Negation only ever sits on a variable or a frontier leaf; [`Formula::negate`]
/// pushes a general negation inward. Serialized as its DSL text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(NodeId),
    NegVar(NodeId),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    True,
    False,
    /// Stand-in for an appended construction whose value is `ξ`.
    Frontier { tag: String, negated: bool },
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_dsl())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::format::parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

impl Formula {
    pub fn var(id: impl Into<NodeId>) -> Self {
        Formula::Var(id.into())
    }

    pub fn neg(id: impl Into<NodeId>) -> Self {
        Formula::NegVar(id.into())
    }

    pub fn literal(id: impl Into<NodeId>, sign: Sign) -> Self {
        match sign {
            Sign::Positive => Formula::Var(id.into()),
            Sign::Negative => Formula::NegVar(id.into()),
        }
    }

    pub fn frontier(tag: impl Into<String>) -> Self {
        Formula::Frontier {
            tag: tag.into(),
            negated: false,
        }
    }

    /// Conjunction; the empty conjunction is `True`, a singleton is returned as is.
    pub fn conj(mut items: Vec<Formula>) -> Self {
        match items.len() {
            0 => Formula::True,
            1 => items.pop().unwrap(),
            _ => Formula::And(items),
        }
    }

    /// Disjunction; the empty disjunction is `False`, a singleton is returned as is.
    pub fn disj(mut items: Vec<Formula>) -> Self {
        match items.len() {
            0 => Formula::False,
            1 => items.pop().unwrap(),
            _ => Formula::Or(items),
        }
    }

    /// `v ∨ ¬v`
    pub fn tautology_on(id: impl Into<NodeId>) -> Self {
        let id = id.into();
        Formula::Or(vec![Formula::Var(id.clone()), Formula::NegVar(id)])
    }

    /// De Morgan dual; stays in negation-normal form.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Var(v) => Formula::NegVar(v.clone()),
            Formula::NegVar(v) => Formula::Var(v.clone()),
            Formula::And(items) => Formula::Or(items.iter().map(Formula::negate).collect()),
            Formula::Or(items) => Formula::And(items.iter().map(Formula::negate).collect()),
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Frontier { tag, negated } => Formula::Frontier {
                tag: tag.clone(),
                negated: !negated,
            },
        }
    }

    /// Rejects empty connectives anywhere in the tree.
    pub fn validate(&self) -> Result<()> {
        match self {
            Formula::And(items) | Formula::Or(items) => {
                if items.is_empty() {
                    return Err(Error::EmptyConnective);
                }
                items.iter().try_for_each(Formula::validate)
            }
            _ => Ok(()),
        }
    }

    pub fn variables(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        self.visit_literals(&mut |lit| {
            if let LeafRef::Var(v, _) = lit {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Polarities with which each variable occurs.
    pub fn polarities(&self) -> BTreeMap<NodeId, BTreeSet<Sign>> {
        let mut out: BTreeMap<NodeId, BTreeSet<Sign>> = BTreeMap::new();
        self.visit_literals(&mut |lit| {
            if let LeafRef::Var(v, s) = lit {
                out.entry(v.clone()).or_default().insert(s);
            }
        });
        out
    }

    pub fn frontier_tags(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_literals(&mut |lit| {
            if let LeafRef::Frontier(t) = lit {
                out.insert(t.to_string());
            }
        });
        out
    }

    pub fn has_frontier(&self) -> bool {
        !self.frontier_tags().is_empty()
    }

    /// `Some(literals)` when the formula is a single literal or a flat
    /// conjunction of node literals.
    pub fn literal_conjunction(&self) -> Option<Vec<(NodeId, Sign)>> {
        fn leaf(f: &Formula) -> Option<(NodeId, Sign)> {
            match f {
                Formula::Var(v) => Some((v.clone(), Sign::Positive)),
                Formula::NegVar(v) => Some((v.clone(), Sign::Negative)),
                _ => None,
            }
        }
        match self {
            Formula::And(items) => items.iter().map(leaf).collect(),
            other => leaf(other).map(|l| vec![l]),
        }
    }

    /// Replaces every occurrence of a variable by the formula returned from
    /// `subst` (negated occurrences by its negation). Variables for which
    /// `subst` returns `None` are kept.
    pub fn substitute(&self, subst: &impl Fn(&NodeId) -> Option<Formula>) -> Formula {
        match self {
            Formula::Var(v) => subst(v).unwrap_or_else(|| self.clone()),
            Formula::NegVar(v) => subst(v).map(|f| f.negate()).unwrap_or_else(|| self.clone()),
            Formula::And(items) => Formula::And(items.iter().map(|f| f.substitute(subst)).collect()),
            Formula::Or(items) => Formula::Or(items.iter().map(|f| f.substitute(subst)).collect()),
            _ => self.clone(),
        }
    }

    /// Replaces frontier leaves using `subst(tag)`; negated leaves get the negation.
    pub fn substitute_frontier(&self, subst: &impl Fn(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Frontier { tag, negated } => match subst(tag) {
                Some(f) if *negated => f.negate(),
                Some(f) => f,
                None => self.clone(),
            },
            Formula::And(items) => {
                Formula::And(items.iter().map(|f| f.substitute_frontier(subst)).collect())
            }
            Formula::Or(items) => {
                Formula::Or(items.iter().map(|f| f.substitute_frontier(subst)).collect())
            }
            _ => self.clone(),
        }
    }

    /// Replaces one literal occurrence `(var, sign)` by `with`.
    pub fn replace_literal(&self, var: &NodeId, sign: Sign, with: &Formula) -> Formula {
        match self {
            Formula::Var(v) if v == var && sign == Sign::Positive => with.clone(),
            Formula::NegVar(v) if v == var && sign == Sign::Negative => with.clone(),
            Formula::And(items) => Formula::And(
                items
                    .iter()
                    .map(|f| f.replace_literal(var, sign, with))
                    .collect(),
            ),
            Formula::Or(items) => Formula::Or(
                items
                    .iter()
                    .map(|f| f.replace_literal(var, sign, with))
                    .collect(),
            ),
            _ => self.clone(),
        }
    }

    fn visit_literals<'a>(&'a self, visit: &mut impl FnMut(LeafRef<'a>)) {
        match self {
            Formula::Var(v) => visit(LeafRef::Var(v, Sign::Positive)),
            Formula::NegVar(v) => visit(LeafRef::Var(v, Sign::Negative)),
            Formula::Frontier { tag, .. } => visit(LeafRef::Frontier(tag)),
            Formula::And(items) | Formula::Or(items) => {
                items.iter().for_each(|f| f.visit_literals(visit))
            }
            Formula::True | Formula::False => {}
        }
    }

    /// ASCII rendering accepted by the DSL parser.
    pub fn to_dsl(&self) -> String {
        let mut s = String::new();
        write_formula(&mut s, self, Style::Ascii, false);
        s
    }
}

enum LeafRef<'a> {
    Var(&'a NodeId, Sign),
    Frontier(&'a str),
}

/// Classical evaluation.
pub fn eval2(f: &Formula, assignment: &BTreeMap<NodeId, bool>) -> Result<bool> {
    eval2_with(f, &|v: &NodeId| assignment.get(v).copied())
}

pub(crate) fn eval2_with(f: &Formula, lookup: &impl Fn(&NodeId) -> Option<bool>) -> Result<bool> {
    Ok(match f {
        Formula::Var(v) => lookup(v).ok_or_else(|| Error::Unassigned(v.to_string()))?,
        Formula::NegVar(v) => !lookup(v).ok_or_else(|| Error::Unassigned(v.to_string()))?,
        Formula::And(items) => {
            let mut acc = true;
            for item in items {
                acc &= eval2_with(item, lookup)?;
            }
            acc
        }
        Formula::Or(items) => {
            let mut acc = false;
            for item in items {
                acc |= eval2_with(item, lookup)?;
            }
            acc
        }
        Formula::True => true,
        Formula::False => false,
        Formula::Frontier { tag, .. } => return Err(Error::FrontierInClassical(tag.clone())),
    })
}

/// Three-valued evaluation; frontier leaves look their value up by tag.
pub fn eval3(
    f: &Formula,
    assignment: &BTreeMap<NodeId, TruthValue3>,
    frontier: &BTreeMap<String, TruthValue3>,
) -> Result<TruthValue3> {
    eval3_with(f, &|v: &NodeId| assignment.get(v).copied(), frontier)
}

pub(crate) fn eval3_with(
    f: &Formula,
    lookup: &impl Fn(&NodeId) -> Option<TruthValue3>,
    frontier: &BTreeMap<String, TruthValue3>,
) -> Result<TruthValue3> {
    Ok(match f {
        Formula::Var(v) => lookup(v).ok_or_else(|| Error::Unassigned(v.to_string()))?,
        Formula::NegVar(v) => not3(lookup(v).ok_or_else(|| Error::Unassigned(v.to_string()))?),
        Formula::And(items) => {
            let mut acc = TruthValue3::T;
            for item in items {
                acc = and3(acc, eval3_with(item, lookup, frontier)?);
            }
            acc
        }
        Formula::Or(items) => {
            let mut acc = TruthValue3::F;
            for item in items {
                acc = or3(acc, eval3_with(item, lookup, frontier)?);
            }
            acc
        }
        Formula::True => TruthValue3::T,
        Formula::False => TruthValue3::F,
        Formula::Frontier { tag, negated } => {
            let v = *frontier
                .get(tag)
                .ok_or_else(|| Error::Unassigned(format!("{tag}_ξ")))?;
            if *negated {
                not3(v)
            } else {
                v
            }
        }
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Style {
    Unicode,
    Ascii,
}

pub(crate) fn write_formula(out: &mut String, f: &Formula, style: Style, nested: bool) {
    let (not, and, or, tru, fal) = match style {
        Style::Unicode => ("¬", " ∧ ", " ∨ ", "T", "F"),
        Style::Ascii => ("!", " & ", " | ", "true", "false"),
    };
    match f {
        Formula::Var(v) => out.push_str(v.as_str()),
        Formula::NegVar(v) => {
            out.push_str(not);
            out.push_str(v.as_str());
        }
        Formula::True => out.push_str(tru),
        Formula::False => out.push_str(fal),
        Formula::Frontier { tag, negated } => {
            if *negated {
                out.push_str(not);
            }
            match style {
                Style::Unicode => {
                    out.push_str(tag);
                    out.push_str("_ξ");
                }
                Style::Ascii => {
                    out.push('?');
                    out.push_str(tag);
                }
            }
        }
        Formula::And(items) | Formula::Or(items) => {
            let sep = if matches!(f, Formula::And(_)) { and } else { or };
            if nested {
                out.push('(');
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_formula(out, item, style, true);
            }
            if nested {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self, Style::Unicode, false);
        f.write_str(&s)
    }
}
