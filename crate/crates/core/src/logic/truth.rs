//! The three-valued domain `F < ξ < T`.
//!
//! Conjunction is the infimum and disjunction the supremum of the order;
//! negation swaps `T` and `F` and fixes `ξ`. `ξ` marks a node at which
//! neither the node nor its negation is consistent.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TruthValue3 {
    F,
    Xi,
    T,
}

impl TruthValue3 {
    pub const ALL: [TruthValue3; 3] = [TruthValue3::F, TruthValue3::Xi, TruthValue3::T];

    pub fn is_classical(self) -> bool {
        self != TruthValue3::Xi
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            TruthValue3::T => Some(true),
            TruthValue3::F => Some(false),
            TruthValue3::Xi => None,
        }
    }
}

impl From<bool> for TruthValue3 {
    fn from(b: bool) -> Self {
        if b {
            TruthValue3::T
        } else {
            TruthValue3::F
        }
    }
}

pub fn and3(a: TruthValue3, b: TruthValue3) -> TruthValue3 {
    a.min(b)
}

pub fn or3(a: TruthValue3, b: TruthValue3) -> TruthValue3 {
    a.max(b)
}

pub fn not3(a: TruthValue3) -> TruthValue3 {
    match a {
        TruthValue3::T => TruthValue3::F,
        TruthValue3::F => TruthValue3::T,
        TruthValue3::Xi => TruthValue3::Xi,
    }
}

impl std::ops::BitAnd for TruthValue3 {
    type Output = Self;

    fn bitand(self, rhs: Self) -> Self {
        and3(self, rhs)
    }
}

impl std::ops::BitOr for TruthValue3 {
    type Output = Self;

    fn bitor(self, rhs: Self) -> Self {
        or3(self, rhs)
    }
}

impl std::ops::Not for TruthValue3 {
    type Output = Self;

    fn not(self) -> Self {
        not3(self)
    }
}

impl fmt::Display for TruthValue3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue3::T => "T",
            TruthValue3::F => "F",
            TruthValue3::Xi => "ξ",
        })
    }
}

impl FromStr for TruthValue3 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T" | "t" | "true" | "1" => Ok(TruthValue3::T),
            "F" | "f" | "false" | "0" => Ok(TruthValue3::F),
            "X" | "x" | "Xi" | "xi" | "ξ" => Ok(TruthValue3::Xi),
            other => Err(format!("unknown truth value `{other}` (use T, F or Xi)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::TruthValue3::{F, T, Xi};
    use super::*;

    #[test]
    fn xi_rows() {
        assert_eq!(and3(Xi, T), Xi);
        assert_eq!(or3(Xi, T), T);
        assert_eq!(and3(Xi, F), F);
        assert_eq!(or3(Xi, F), Xi);
        assert_eq!(and3(Xi, Xi), Xi);
        assert_eq!(or3(Xi, Xi), Xi);
        assert_eq!(and3(F, Xi), F);
        assert_eq!(or3(F, Xi), Xi);
    }

    #[test]
    fn negation() {
        assert_eq!(not3(Xi), Xi);
        assert_eq!(not3(T), F);
        assert_eq!(not3(F), T);
    }

    #[test]
    fn order() {
        assert!(F < Xi && Xi < T);
    }

    #[test]
    fn laws_exhaustive() {
        for a in TruthValue3::ALL {
            assert_eq!(not3(not3(a)), a);
            assert_eq!(and3(a, a), a);
            assert_eq!(or3(a, a), a);
            for b in TruthValue3::ALL {
                assert_eq!(and3(a, b), and3(b, a));
                assert_eq!(or3(a, b), or3(b, a));
                assert_eq!(and3(a, or3(a, b)), a);
                assert_eq!(or3(a, and3(a, b)), a);
                assert_eq!(not3(and3(a, b)), or3(not3(a), not3(b)));
                assert_eq!(not3(or3(a, b)), and3(not3(a), not3(b)));
                for c in TruthValue3::ALL {
                    assert_eq!(and3(a, and3(b, c)), and3(and3(a, b), c));
                    assert_eq!(or3(a, or3(b, c)), or3(or3(a, b), c));
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("Xi".parse::<TruthValue3>().unwrap(), Xi);
        assert_eq!("T".parse::<TruthValue3>().unwrap(), T);
        assert!("maybe".parse::<TruthValue3>().is_err());
        assert_eq!(Xi.to_string(), "ξ");
    }
}
