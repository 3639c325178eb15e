//! Formulas, normal forms and the three-valued algebra.

pub mod dnf;
pub mod formula;
pub mod truth;

pub use dnf::{
    negate_dnf, negate_dnf_capped, simplify_dnf, simplify_dnf_keep_residual, to_dnf,
    to_dnf_capped, Atom, Conjunct, Dnf, Literal, DEFAULT_DNF_CAP,
};
pub use formula::{eval2, eval3, Formula};
pub use truth::{and3, not3, or3, TruthValue3};
