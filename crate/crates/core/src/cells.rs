//! Elementary contradiction cells: the eighteen variants of the triangle
//! `x = ¬y ∧ ¬z`, the diamond, sign audits and tautology insertion.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Arrow, NodeId, RefGraph, Sign};
use crate::logic::{eval2, eval3, simplify_dnf, simplify_dnf_keep_residual, to_dnf, Dnf, Formula, TruthValue3};
use crate::semantics::{escape_search, node_model_expression, Escape};

/// Variant `⟨z.y⟩`. `z_case` fixes `z` to `T`, `F` or `z_ξ`; `y_case` picks
/// one of `¬z ∧ T`, `¬z ∧ F`, `¬z ∧ y_ξ`, `¬z ∨ T`, `¬z ∨ F`, `¬z ∨ y_ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellVariant {
    z_case: u8,
    y_case: u8,
}

impl CellVariant {
    pub fn new(z_case: u8, y_case: u8) -> Result<CellVariant> {
        if (1..=3).contains(&z_case) && (1..=6).contains(&y_case) {
            Ok(CellVariant { z_case, y_case })
        } else {
            Err(Error::Document(format!("no variant ⟨{z_case}.{y_case}⟩")))
        }
    }

    pub fn all() -> impl Iterator<Item = CellVariant> {
        (1..=3).flat_map(|z| (1..=6).map(move |y| CellVariant { z_case: z, y_case: y }))
    }

    pub fn z_case(self) -> u8 {
        self.z_case
    }

    pub fn y_case(self) -> u8 {
        self.y_case
    }

    pub fn z_value(self) -> TruthValue3 {
        match self.z_case {
            1 => TruthValue3::T,
            2 => TruthValue3::F,
            _ => TruthValue3::Xi,
        }
    }

    fn z_formula(self) -> Formula {
        match self.z_case {
            1 => Formula::True,
            2 => Formula::False,
            _ => Formula::frontier("z"),
        }
    }

    /// `y` as a formula in `z` and the leaf `y_ξ`.
    pub fn y_formula(self, z: &Formula, y_leaf: Formula) -> Formula {
        let not_z = z.negate();
        match self.y_case {
            1 => Formula::And(vec![not_z, Formula::True]),
            2 => Formula::And(vec![not_z, Formula::False]),
            3 => Formula::And(vec![not_z, y_leaf]),
            4 => Formula::Or(vec![not_z, Formula::True]),
            5 => Formula::Or(vec![not_z, Formula::False]),
            _ => Formula::Or(vec![not_z, y_leaf]),
        }
    }

    /// `x = ¬y ∧ ¬z` with `z` and `y_ξ` as frontier leaves.
    pub fn x_formula(self) -> Formula {
        let z = self.z_formula();
        let y = self.y_formula(&z, Formula::frontier("y"));
        Formula::And(vec![y.negate(), z.negate()])
    }

    fn y_is_conjunction(self) -> bool {
        self.y_case <= 3
    }
}

impl fmt::Display for CellVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}.{}⟩", self.z_case, self.y_case)
    }
}

impl FromStr for CellVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['⟨', '<']).trim_end_matches(['⟩', '>']);
        let bad = || Error::Document(format!("bad variant `{s}`, expected e.g. 3.3"));
        let (z, y) = t.split_once('.').ok_or_else(bad)?;
        let z = z.parse().map_err(|_| bad())?;
        let y = y.parse().map_err(|_| bad())?;
        CellVariant::new(z, y)
    }
}

impl Serialize for CellVariant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}.{}", self.z_case, self.y_case))
    }
}

impl<'de> Deserialize<'de> for CellVariant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantReport {
    pub variant: CellVariant,
    /// `x = T` is contradictory.
    pub c221: bool,
    /// `y ∨ z` is not `T`, so `¬x` is not forced.
    pub c222: bool,
    /// `x` evaluates to `ξ`.
    pub c224: bool,
    pub all_ok: bool,
    pub x_value3: TruthValue3,
    pub resolved_x: Option<Formula>,
}

pub fn classify_variant(v: CellVariant) -> VariantReport {
    let frontier: BTreeMap<String, TruthValue3> =
        [("y".to_string(), TruthValue3::Xi), ("z".to_string(), TruthValue3::Xi)].into();
    let none = BTreeMap::new();
    let z = v.z_formula();
    let y = v.y_formula(&z, Formula::frontier("y"));
    let x = v.x_formula();
    let x_value3 = eval3(&x, &none, &frontier).expect("closed formula");
    let y_or_z = eval3(&Formula::Or(vec![y, z]), &none, &frontier).expect("closed formula");

    // Local contradiction: drop y_ξ by putting the neutral element of its
    // connective in its place and keep z free.
    let neutral = if v.y_is_conjunction() {
        Formula::True
    } else {
        Formula::False
    };
    let zv = Formula::var("z");
    let x_local = Formula::And(vec![v.y_formula(&zv, neutral).negate(), zv.negate()]);
    let c221 = [false, true].iter().all(|&b| {
        !eval2(&x_local, &[(NodeId::from("z"), b)].into()).expect("z is bound")
    });
    let c222 = y_or_z != TruthValue3::T;
    let c224 = x_value3 == TruthValue3::Xi;
    let all_ok = c221 && c222 && c224;
    VariantReport {
        variant: v,
        c221,
        c222,
        c224,
        all_ok,
        x_value3,
        resolved_x: all_ok.then(|| resolved_dnf_unchecked(v).to_formula()),
    }
}

pub fn classify_all() -> Vec<VariantReport> {
    CellVariant::all().map(classify_variant).collect()
}

fn resolved_dnf_unchecked(v: CellVariant) -> Dnf {
    simplify_dnf_keep_residual(&to_dnf(&v.x_formula()).expect("small formula"))
}

/// `x` in terms of `y_ξ`, `z_ξ` as a Dnf; only for variants meeting all
/// three conditions.
pub fn resolved_dnf(v: CellVariant) -> Result<Dnf> {
    if !classify_variant(v).all_ok {
        return Err(Error::VariantNotOk(v.to_string()));
    }
    Ok(resolved_dnf_unchecked(v))
}

pub fn resolved_form(v: CellVariant) -> Result<Formula> {
    resolved_dnf(v).map(|d| d.to_formula())
}

/// `x = ¬y ∧ ¬y′` over the diamond. The full diamond has
/// `y = y_ξ ∧ ¬z`, `y′ = y′_ξ ∧ z` and is left fully distributed; the
/// simplified one has `y′ = z ∨ F` and is reduced.
pub fn diamond_resolved_dnf(simplified: bool) -> Dnf {
    let z = Formula::frontier("z");
    let y = Formula::And(vec![Formula::frontier("y"), z.negate()]);
    let y2 = if simplified {
        Formula::Or(vec![z.clone(), Formula::False])
    } else {
        Formula::And(vec![Formula::frontier("y'"), z.clone()])
    };
    let x = Formula::And(vec![y.negate(), y2.negate()]);
    let d = to_dnf(&x).expect("small formula");
    if simplified {
        simplify_dnf(&d)
    } else {
        d
    }
}

pub fn diamond_resolved_form(simplified: bool) -> Formula {
    diamond_resolved_dnf(simplified).to_formula()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignAudit {
    NoXPlusContradiction,
    EscapeAtXMinus,
    YabloViable,
}

/// Sides are `(x−y, y−z, x−z)`; all three nodes are conjunctions.
pub fn triangle_sign_audit(sides: (Sign, Sign, Sign)) -> SignAudit {
    let negatives = [sides.0, sides.1, sides.2]
        .iter()
        .filter(|&&s| s == Sign::Negative)
        .count();
    match negatives {
        0 | 2 => SignAudit::NoXPlusContradiction,
        3 => SignAudit::YabloViable,
        _ => SignAudit::EscapeAtXMinus,
    }
}

/// `x ↛ y → z, x → z` can be turned into a Yablo cell by hanging a negative
/// arrow below `z`; the result is no longer a genuine triangle.
pub fn admits_cheating_reduction(sides: (Sign, Sign, Sign)) -> bool {
    sides == (Sign::Negative, Sign::Positive, Sign::Positive)
}

/// Replaces `a → b` by `a → ab → b`: the new node carries `b ∨ ¬b`, and the
/// literal of `b` in `a`'s formula becomes the literal of `ab` with `sign`.
pub fn insert_tautology(g: &RefGraph, arrow: &Arrow, sign: Sign) -> Result<RefGraph> {
    let (a, b) = (&arrow.from, &arrow.to);
    let actual = g.sign(a, b).ok_or_else(|| Error::NoSuchArrow(a.clone(), b.clone()))?;
    let mut name = format!("{a}{b}");
    while g.contains(&NodeId::from(name.as_str())) {
        name.push('\'');
    }
    let ab = NodeId::from(name);
    let fa = g.formula(a).expect("arrow source has a formula");
    let replaced = fa.replace_literal(b, actual, &Formula::literal(ab.clone(), sign));
    let g = g.define(ab.clone(), Formula::tautology_on(b.clone()))?;
    g.define(a.clone(), replaced)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "xy")]
    XY,
    #[serde(rename = "xz")]
    XZ,
    #[serde(rename = "yz")]
    YZ,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::XY, Side::XZ, Side::YZ];

    fn ends(self) -> (&'static str, &'static str) {
        match self {
            Side::XY => ("x", "y"),
            Side::XZ => ("x", "z"),
            Side::YZ => ("y", "z"),
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xy" => Ok(Side::XY),
            "xz" => Ok(Side::XZ),
            "yz" => Ok(Side::YZ),
            _ => Err(Error::Document(format!("unknown side `{s}`"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.ends();
        write!(f, "{a}{b}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InsertionEffect {
    NoContradiction,
    TrivialContradictionEscape,
    Tautology,
    ContradictionWithoutEscape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InsertionReport {
    pub insertions: Vec<(Side, Sign)>,
    pub effect: InsertionEffect,
    /// `x` with every formula substituted, before simplification.
    pub expanded: Dnf,
    /// Canonical `M(x)`.
    pub expression: Dnf,
    pub escape: Option<Escape>,
}

/// The triangle `x = ¬y ∧ ¬z`, `y = ¬z`.
pub fn yablo_triangle() -> RefGraph {
    RefGraph::from_signed_arrows([Arrow::neg("x", "y"), Arrow::neg("y", "z"), Arrow::neg("x", "z")])
        .expect("triangle is valid")
}

/// Inserts tautologies into the sides of the triangle and reads off `x`.
pub fn insertion_effect(insertions: &[(Side, Sign)]) -> Result<InsertionReport> {
    let mut g = yablo_triangle();
    for &(side, sign) in insertions {
        let (a, b) = side.ends();
        let s = g.sign(&a.into(), &b.into()).ok_or_else(|| Error::NoSuchArrow(a.into(), b.into()))?;
        g = insert_tautology(&g, &Arrow::new(a, b, s), sign)?;
    }
    let x = NodeId::from("x");
    let expanded = to_dnf(&expand_formula(&g, &x))?;
    let expression = node_model_expression(&g, &x)?;
    let escape = escape_search(&g, &x)?;
    let effect = if expression.is_verum() {
        InsertionEffect::Tautology
    } else if !expression.is_empty() {
        InsertionEffect::NoContradiction
    } else if escape.is_some() {
        InsertionEffect::TrivialContradictionEscape
    } else {
        InsertionEffect::ContradictionWithoutEscape
    };
    Ok(InsertionReport {
        insertions: insertions.to_vec(),
        effect,
        expanded,
        expression,
        escape,
    })
}

/// Substitutes formulas for variables until only sinks remain.
pub fn expand_formula(g: &RefGraph, n: &NodeId) -> Formula {
    match g.formula(n) {
        None => Formula::var(n.clone()),
        Some(f) => f.substitute(&|v: &NodeId| {
            Some(expand_formula(g, v))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Literal;

    fn v(s: &str) -> CellVariant {
        s.parse().unwrap()
    }

    #[test]
    fn eighteen_variants() {
        assert_eq!(CellVariant::all().count(), 18);
        assert_eq!(v("⟨3.3⟩"), CellVariant::new(3, 3).unwrap());
        assert!("4.1".parse::<CellVariant>().is_err());
        assert_eq!(v("2.6").to_string(), "⟨2.6⟩");
    }

    #[test]
    fn yablo_variant() {
        let r = classify_variant(v("3.3"));
        assert!(r.c221 && r.c222 && r.c224);
        assert_eq!(r.x_value3, TruthValue3::Xi);
    }

    #[test]
    fn classical_and_eliminated() {
        let r = classify_variant(v("1.2"));
        assert!(!r.c224);
        assert_eq!(r.x_value3, TruthValue3::F);
        let r = classify_variant(v("3.2"));
        assert!(r.c224 && !r.c221);
    }

    #[test]
    fn resolved_forms() {
        let fx = |t: &str, s| Literal::frontier(t, s);
        assert_eq!(
            resolved_dnf(v("2.3")).unwrap(),
            Dnf::from_conjuncts([[fx("y", Sign::Negative)]])
        );
        assert_eq!(
            resolved_dnf(v("3.1")).unwrap(),
            Dnf::from_conjuncts([[fx("z", Sign::Positive), fx("z", Sign::Negative)]])
        );
        assert_eq!(resolved_form(v("3.3")).unwrap().to_string(), "¬y_ξ ∧ ¬z_ξ");
        assert!(matches!(resolved_form(v("1.1")), Err(Error::VariantNotOk(_))));
    }

    #[test]
    fn diamonds() {
        assert_eq!(diamond_resolved_dnf(true), resolved_dnf(v("3.3")).unwrap());
        assert_eq!(diamond_resolved_dnf(false).len(), 4);
    }

    #[test]
    fn sign_audit() {
        use Sign::{Negative as N, Positive as P};
        assert_eq!(triangle_sign_audit((N, N, N)), SignAudit::YabloViable);
        assert_eq!(triangle_sign_audit((P, N, P)), SignAudit::EscapeAtXMinus);
        assert_eq!(triangle_sign_audit((P, P, P)), SignAudit::NoXPlusContradiction);
        assert_eq!(triangle_sign_audit((N, N, P)), SignAudit::NoXPlusContradiction);
        assert!(admits_cheating_reduction((N, P, P)));
        assert!(!admits_cheating_reduction((N, N, N)));
    }

    #[test]
    fn insertion_in_xz() {
        let g = yablo_triangle();
        let h = insert_tautology(&g, &Arrow::neg("x", "z"), Sign::Positive).unwrap();
        assert!(h.contains(&"xz".into()));
        assert_eq!(h.sign(&"x".into(), &"z".into()), None);
        assert_eq!(
            node_model_expression(&h, &"x".into()).unwrap(),
            Dnf::literal(Literal::pos("z"))
        );
        assert!(matches!(
            insert_tautology(&g, &Arrow::neg("z", "x"), Sign::Positive),
            Err(Error::NoSuchArrow(..))
        ));
    }

    #[test]
    fn insertion_name_collision() {
        let g = RefGraph::from_signed_arrows([
            Arrow::neg("x", "z"),
            Arrow::neg("x", "xz"),
        ])
        .unwrap();
        let h = insert_tautology(&g, &Arrow::neg("x", "z"), Sign::Negative).unwrap();
        assert!(h.contains(&"xz'".into()));
    }

    #[test]
    fn negative_xz_is_trivial() {
        let r = insertion_effect(&[(Side::XZ, Sign::Negative)]).unwrap();
        assert_eq!(r.effect, InsertionEffect::TrivialContradictionEscape);
        assert!(r.expanded.disjuncts().all(|c| c.contains(&Literal::pos("z")) && c.contains(&Literal::neg("z"))));
    }
}
