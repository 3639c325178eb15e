//! Disjunctive normal forms over node literals and frontier leaves.
//!
//! A [`Dnf`] is a set of conjuncts, each a set of literals, so duplicate
//! literals and duplicate disjuncts collapse on construction and iteration
//! order is canonical (literals by atom then sign, disjuncts
//! lexicographically). The empty `Dnf` is the contradiction; a `Dnf`
//! holding the empty conjunct is a tautology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::formula::Formula;
use crate::error::{Error, Result};
use crate::graph::{NodeId, Sign};

/// Largest product (number of candidate conjuncts) any DNF operation may
/// materialize.
pub const DEFAULT_DNF_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Node(NodeId),
    Frontier(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub sign: Sign,
}

impl Literal {
    pub fn node(id: impl Into<NodeId>, sign: Sign) -> Self {
        Literal {
            atom: Atom::Node(id.into()),
            sign,
        }
    }

    pub fn pos(id: impl Into<NodeId>) -> Self {
        Self::node(id, Sign::Positive)
    }

    pub fn neg(id: impl Into<NodeId>) -> Self {
        Self::node(id, Sign::Negative)
    }

    pub fn frontier(tag: impl Into<String>, sign: Sign) -> Self {
        Literal {
            atom: Atom::Frontier(tag.into()),
            sign,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            sign: self.sign.flip(),
        }
    }

    pub fn to_formula(&self) -> Formula {
        match (&self.atom, self.sign) {
            (Atom::Node(v), s) => Formula::literal(v.clone(), s),
            (Atom::Frontier(t), s) => Formula::Frontier {
                tag: t.clone(),
                negated: s == Sign::Negative,
            },
        }
    }

    fn ascii(&self) -> String {
        let neg = if self.sign == Sign::Negative { "!" } else { "" };
        match &self.atom {
            Atom::Node(v) => format!("{neg}{v}"),
            Atom::Frontier(t) => format!("{neg}?{t}"),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Negative {
            f.write_str("¬")?;
        }
        match &self.atom {
            Atom::Node(v) => write!(f, "{v}"),
            Atom::Frontier(t) => write!(f, "{t}_ξ"),
        }
    }
}

impl FromStr for Literal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (sign, rest) = match s.strip_prefix('!') {
            Some(r) => (Sign::Negative, r),
            None => (Sign::Positive, s),
        };
        let atom = match rest.strip_prefix('?') {
            Some(t) if !t.is_empty() => Atom::Frontier(t.to_string()),
            None if !rest.is_empty() => Atom::Node(NodeId::new(rest)?),
            _ => return Err(Error::Document(format!("bad literal `{s}`"))),
        };
        Ok(Literal { atom, sign })
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.ascii())
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type Conjunct = BTreeSet<Literal>;

fn is_contradictory(c: &Conjunct) -> bool {
    c.iter().any(|l| c.contains(&l.complement()))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dnf {
    disjuncts: BTreeSet<Conjunct>,
}

impl Dnf {
    /// The empty disjunction.
    pub fn falsum() -> Self {
        Dnf::default()
    }

    /// The disjunction holding only the empty conjunct.
    pub fn verum() -> Self {
        Dnf {
            disjuncts: [Conjunct::new()].into(),
        }
    }

    pub fn literal(lit: Literal) -> Self {
        Dnf {
            disjuncts: [[lit].into()].into(),
        }
    }

    pub fn from_conjuncts<I, C>(conjuncts: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Literal>,
    {
        Dnf {
            disjuncts: conjuncts
                .into_iter()
                .map(|c| c.into_iter().collect())
                .collect(),
        }
    }

    pub fn disjuncts(&self) -> impl Iterator<Item = &Conjunct> {
        self.disjuncts.iter()
    }

    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    /// Syntactically empty, i.e. the contradiction. After [`simplify_dnf`] this
    /// coincides with unsatisfiability.
    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Contains the empty conjunct.
    pub fn is_verum(&self) -> bool {
        self.disjuncts.iter().any(|c| c.is_empty())
    }

    pub fn is_satisfiable(&self) -> bool {
        self.disjuncts.iter().any(|c| !is_contradictory(c))
    }

    pub fn is_tautology(&self, cap: u128) -> Result<bool> {
        Ok(!negate_dnf_capped(self, cap)?.is_satisfiable())
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.disjuncts
            .iter()
            .flatten()
            .map(|l| l.atom.clone())
            .collect()
    }

    pub fn or(&self, other: &Dnf) -> Dnf {
        Dnf {
            disjuncts: self.disjuncts.union(&other.disjuncts).cloned().collect(),
        }
    }

    pub fn and(&self, other: &Dnf, cap: u128) -> Result<Dnf> {
        let size = self.disjuncts.len() as u128 * other.disjuncts.len() as u128;
        if size > cap {
            return Err(Error::DnfTooLarge { size, cap });
        }
        let mut out = BTreeSet::new();
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                out.insert(a.union(b).cloned().collect());
            }
        }
        Ok(Dnf { disjuncts: out })
    }

    /// Classical value under an assignment of the atoms.
    pub fn eval(&self, value: &impl Fn(&Atom) -> Option<bool>) -> Result<bool> {
        for c in &self.disjuncts {
            let mut all = true;
            for l in c {
                let v = value(&l.atom).ok_or_else(|| Error::Unassigned(atom_name(&l.atom)))?;
                if v != (l.sign == Sign::Positive) {
                    all = false;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn eval_nodes(&self, assignment: &BTreeMap<NodeId, bool>) -> Result<bool> {
        self.eval(&|a| match a {
            Atom::Node(v) => assignment.get(v).copied(),
            Atom::Frontier(_) => None,
        })
    }

    /// Canonical formula: `False`, `True`, a literal, a conjunction, or a
    /// disjunction of those.
    pub fn to_formula(&self) -> Formula {
        Formula::disj(
            self.disjuncts
                .iter()
                .map(|c| Formula::conj(c.iter().map(Literal::to_formula).collect()))
                .collect(),
        )
    }

    /// Prime-implicant (Blake canonical) form: equal for equivalent inputs.
    pub fn prime_implicants(&self, cap: u128) -> Result<Dnf> {
        blake_canonical(self, cap)
    }
}

fn atom_name(a: &Atom) -> String {
    match a {
        Atom::Node(v) => v.to_string(),
        Atom::Frontier(t) => format!("{t}_ξ"),
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return f.write_str("∅");
        }
        let many = self.disjuncts.len() > 1;
        for (i, c) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            if c.is_empty() {
                f.write_str("U")?;
                continue;
            }
            let paren = many && c.len() > 1;
            if paren {
                f.write_str("(")?;
            }
            for (j, l) in c.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ∧ ")?;
                }
                write!(f, "{l}")?;
            }
            if paren {
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

/// Distributes `f` into canonical DNF without dropping contradictory
/// conjuncts. Frontier leaves are treated as opaque atoms.
pub fn to_dnf(f: &Formula) -> Result<Dnf> {
    to_dnf_capped(f, DEFAULT_DNF_CAP)
}

pub fn to_dnf_capped(f: &Formula, cap: u128) -> Result<Dnf> {
    Ok(match f {
        Formula::Var(v) => Dnf::literal(Literal::pos(v.clone())),
        Formula::NegVar(v) => Dnf::literal(Literal::neg(v.clone())),
        Formula::Frontier { tag, negated } => Dnf::literal(Literal::frontier(
            tag.clone(),
            if *negated {
                Sign::Negative
            } else {
                Sign::Positive
            },
        )),
        Formula::True => Dnf::verum(),
        Formula::False => Dnf::falsum(),
        Formula::Or(items) => {
            let mut acc = Dnf::falsum();
            for item in items {
                acc = acc.or(&to_dnf_capped(item, cap)?);
            }
            acc
        }
        Formula::And(items) => {
            let mut acc = Dnf::verum();
            for item in items {
                acc = acc.and(&to_dnf_capped(item, cap)?, cap)?;
            }
            acc
        }
    })
}

/// Negation through choice functions: one conjunct of complemented
/// literals per way of picking one literal from every disjunct.
pub fn negate_dnf(d: &Dnf) -> Result<Dnf> {
    negate_dnf_capped(d, DEFAULT_DNF_CAP)
}

pub fn negate_dnf_capped(d: &Dnf, cap: u128) -> Result<Dnf> {
    let mut size: u128 = 1;
    for c in &d.disjuncts {
        size = size.saturating_mul(c.len() as u128);
        if size > cap {
            return Err(Error::DnfTooLarge { size, cap });
        }
    }
    let factors: Vec<Vec<&Literal>> = d.disjuncts.iter().map(|c| c.iter().collect()).collect();
    let mut out = BTreeSet::new();
    if factors.iter().any(|f| f.is_empty()) {
        return Ok(Dnf { disjuncts: out });
    }
    // Odometer over the choice functions.
    let mut idx = vec![0usize; factors.len()];
    loop {
        let conj: Conjunct = idx
            .iter()
            .zip(&factors)
            .map(|(&i, f)| f[i].complement())
            .collect();
        out.insert(conj);
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(Dnf { disjuncts: out });
            }
            idx[k] += 1;
            if idx[k] < factors[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Drops conjuncts holding a complementary pair and conjuncts subsumed by a
/// smaller one.
pub fn simplify_dnf(d: &Dnf) -> Dnf {
    absorb(d.disjuncts.iter().filter(|c| !is_contradictory(c)).cloned())
}

/// Like [`simplify_dnf`], but a contradictory conjunct is only dropped when a
/// consistent one remains. Under three-valued readings of frontier leaves
/// `y ∧ ¬y` is not the contradiction, so a form made solely of such
/// conjuncts is kept as written.
pub fn simplify_dnf_keep_residual(d: &Dnf) -> Dnf {
    if d.is_satisfiable() {
        simplify_dnf(d)
    } else {
        absorb(d.disjuncts.iter().cloned())
    }
}

fn absorb(conjuncts: impl Iterator<Item = Conjunct>) -> Dnf {
    let mut by_size: Vec<Conjunct> = conjuncts.collect();
    by_size.sort_by_key(|c| c.len());
    let mut kept: Vec<Conjunct> = Vec::with_capacity(by_size.len());
    for c in by_size {
        if !kept.iter().any(|k| k.is_subset(&c)) {
            kept.push(c);
        }
    }
    Dnf {
        disjuncts: kept.into_iter().collect(),
    }
}

fn blake_canonical(d: &Dnf, cap: u128) -> Result<Dnf> {
    let mut current = simplify_dnf(d);
    loop {
        let items: Vec<&Conjunct> = current.disjuncts.iter().collect();
        let mut fresh: Vec<Conjunct> = Vec::new();
        for (i, a) in items.iter().enumerate() {
            for b in &items[i + 1..] {
                if let Some(r) = consensus(a, b) {
                    if !items.iter().any(|k| k.is_subset(&r))
                        && !fresh.iter().any(|k| k.is_subset(&r))
                    {
                        fresh.push(r);
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Ok(current);
        }
        let next = absorb(current.disjuncts.iter().cloned().chain(fresh));
        if next.disjuncts.len() as u128 > cap {
            return Err(Error::DnfTooLarge {
                size: next.disjuncts.len() as u128,
                cap,
            });
        }
        current = next;
    }
}

/// Resolvent of two conjuncts clashing on exactly one atom.
fn consensus(a: &Conjunct, b: &Conjunct) -> Option<Conjunct> {
    let mut clash = None;
    for l in a {
        if b.contains(&l.complement()) {
            if clash.is_some() {
                return None;
            }
            clash = Some(l.atom.clone());
        }
    }
    let atom = clash?;
    Some(
        a.iter()
            .chain(b.iter())
            .filter(|l| l.atom != atom)
            .cloned()
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conj(lits: &[&str]) -> Vec<Literal> {
        lits.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn dnf(cs: &[&[&str]]) -> Dnf {
        Dnf::from_conjuncts(cs.iter().map(|c| conj(c)))
    }

    #[test]
    fn to_dnf_distributes_without_simplifying() {
        let f = Formula::And(vec![
            Formula::Or(vec![Formula::var("x2"), Formula::var("x3")]),
            Formula::neg("x2"),
        ]);
        let d = to_dnf(&f).unwrap();
        assert_eq!(d, dnf(&[&["x2", "!x2"], &["x3", "!x2"]]));
        assert_eq!(simplify_dnf(&d), dnf(&[&["x3", "!x2"]]));
    }

    #[test]
    fn to_dnf_single_literal() {
        assert_eq!(to_dnf(&Formula::neg("x1")).unwrap(), dnf(&[&["!x1"]]));
    }

    #[test]
    fn to_dnf_frontier_leaves_are_opaque() {
        let f = Formula::And(vec![
            Formula::Or(vec![Formula::frontier("y").negate(), Formula::var("z")]),
            Formula::Or(vec![Formula::frontier("y'").negate(), Formula::neg("z")]),
        ]);
        let d = to_dnf(&f).unwrap();
        assert_eq!(
            d,
            dnf(&[
                &["!?y", "!?y'"],
                &["!?y", "!z"],
                &["z", "!?y'"],
                &["z", "!z"]
            ])
        );
    }

    #[test]
    fn negate_examples() {
        assert_eq!(
            negate_dnf(&dnf(&[&["!x1", "!x2"]])).unwrap(),
            dnf(&[&["x1"], &["x2"]])
        );
        assert_eq!(
            negate_dnf(&dnf(&[&["!x1", "!x2"], &["!x3", "!x4"]])).unwrap(),
            dnf(&[&["x1", "x3"], &["x1", "x4"], &["x2", "x3"], &["x2", "x4"]])
        );
        assert_eq!(negate_dnf(&Dnf::verum()).unwrap(), Dnf::falsum());
        assert_eq!(negate_dnf(&Dnf::falsum()).unwrap(), Dnf::verum());
    }

    #[test]
    fn negate_respects_cap() {
        let wide: Vec<Vec<Literal>> = (0..4)
            .map(|i| (0..10).map(|j| Literal::pos(format!("v{i}_{j}"))).collect())
            .collect();
        let d = Dnf::from_conjuncts(wide);
        assert!(matches!(
            negate_dnf_capped(&d, 9_999),
            Err(Error::DnfTooLarge { size: 10_000, .. })
        ));
        assert_eq!(negate_dnf_capped(&d, 10_000).unwrap().len(), 10_000);
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(
            simplify_dnf(&dnf(&[&["z", "!z"], &["y'", "!z"]])),
            dnf(&[&["y'", "!z"]])
        );
        assert_eq!(simplify_dnf(&dnf(&[&["x2", "!x2"]])), Dnf::falsum());
        assert_eq!(
            simplify_dnf(&dnf(&[&["a", "b"], &["b", "a"]])),
            dnf(&[&["a", "b"]])
        );
        assert_eq!(
            simplify_dnf(&dnf(&[&["a"], &["a", "b"], &["c"]])),
            dnf(&[&["a"], &["c"]])
        );
    }

    #[test]
    fn keep_residual() {
        let only = dnf(&[&["?z", "!?z"]]);
        assert_eq!(simplify_dnf_keep_residual(&only), only);
        let mixed = dnf(&[&["?z", "!?z"], &["!?y", "!?z"]]);
        assert_eq!(simplify_dnf_keep_residual(&mixed), dnf(&[&["!?y", "!?z"]]));
    }

    #[test]
    fn blake_form() {
        // a·b ∨ a·¬b = a
        let d = dnf(&[&["a", "b"], &["a", "!b"]]);
        assert_eq!(d.prime_implicants(DEFAULT_DNF_CAP).unwrap(), dnf(&[&["a"]]));
        // x ∨ ¬x = U
        let d = dnf(&[&["x"], &["!x"]]);
        assert_eq!(d.prime_implicants(DEFAULT_DNF_CAP).unwrap(), Dnf::verum());
        // consensus term is added: a·b ∨ ¬a·c → + b·c
        let d = dnf(&[&["a", "b"], &["!a", "c"]]);
        assert_eq!(
            d.prime_implicants(DEFAULT_DNF_CAP).unwrap(),
            dnf(&[&["a", "b"], &["!a", "c"], &["b", "c"]])
        );
    }

    #[test]
    fn display() {
        assert_eq!(Dnf::falsum().to_string(), "∅");
        assert_eq!(Dnf::verum().to_string(), "U");
        assert_eq!(dnf(&[&["x3", "!x2"]]).to_string(), "¬x2 ∧ x3");
        assert_eq!(dnf(&[&["x1"], &["x2"]]).to_string(), "x1 ∨ x2");
        assert_eq!(dnf(&[&["!?y", "!?z"]]).to_string(), "¬y_ξ ∧ ¬z_ξ");
    }

    #[test]
    fn serde_literals() {
        let d = dnf(&[&["!x1", "?y"]]);
        let j = serde_json::to_string(&d).unwrap();
        assert_eq!(j, r#"[["!x1","?y"]]"#);
        let back: Dnf = serde_json::from_str(&j).unwrap();
        assert_eq!(back, d);
    }
}
