//! Small named graphs used by tests, benchmarks and the command line.

use crate::graph::{Arrow, NodeId, RefGraph};
use crate::logic::Formula;

fn build(defs: Vec<(&str, Formula)>) -> RefGraph {
    RefGraph::from_formulas(defs.into_iter().map(|(n, f)| (NodeId::from(n), f))).expect("fixture is valid")
}

fn nots(vars: &[&str]) -> Formula {
    Formula::conj(vars.iter().map(|v| Formula::neg(*v)).collect())
}

/// `x = ¬y ∧ ¬z`, `y = ¬z`: contradictory at `x`.
pub fn gamma() -> RefGraph {
    build(vec![("x", nots(&["y", "z"])), ("y", nots(&["z"]))])
}

/// `gamma` with an extra sink `y′` under `y`; `x` is no longer contradictory.
pub fn gamma_prime() -> RefGraph {
    build(vec![("x", nots(&["y", "z"])), ("y", nots(&["z", "y′"]))])
}

/// Four paths from `x0` to `x4` whose pairwise contradiction relation is
/// complete, so it contains an odd loop.
pub fn four_paths() -> RefGraph {
    RefGraph::from_signed_arrows([
        Arrow::neg("x0", "x1"),
        Arrow::pos("x0", "x2"),
        Arrow::pos("x1", "x2"),
        Arrow::neg("x2", "x3"),
        Arrow::pos("x2", "x4"),
        Arrow::pos("x3", "x4"),
    ])
    .expect("fixture is valid")
}

/// A composition of two cells at `x0`: the one ending at `x3.2.2` is safe,
/// the one ending at `x2''.1` is an escape hazard.
pub fn composition_diagram() -> RefGraph {
    build(vec![
        ("x0", nots(&["x1", "x3.2.2", "x2''.1"])),
        ("x1", Formula::conj(vec![Formula::neg("x2"), Formula::var("x2''")])),
        ("x2", nots(&["x2.2", "w"])),
        ("x2''", nots(&["x2''.1"])),
        ("x2.2", nots(&["x3.2.2", "a", "b"])),
        ("a", nots(&["b"])),
    ])
}

/// Every node on the spine `x0, x1, …, xm` is contradictory on its own, but
/// escape from `x0` runs through the `y` ladder and avoids all of them.
pub fn pipeline(m: usize) -> RefGraph {
    let x = |i: usize| format!("x{i}");
    let y = |i: usize| format!("y{i}");
    let mut defs: Vec<(NodeId, Formula)> = vec![(x(0).into(), Formula::neg(y(0)))];
    for i in 0..m {
        defs.push((y(i).into(), Formula::disj(vec![Formula::var(x(i + 1)), Formula::var(y(i + 1))])));
    }
    for i in 1..=m {
        let a = format!("a{i}");
        defs.push((x(i).into(), Formula::conj(vec![Formula::var(a.clone()), Formula::neg(a)])));
    }
    RefGraph::from_formulas(defs).expect("fixture is valid")
}

/// Looks a fixture up by name; `pipeline` takes its length as `pipeline:M`.
pub fn by_name(name: &str) -> Option<RefGraph> {
    match name {
        "gamma" => Some(gamma()),
        "gamma-prime" => Some(gamma_prime()),
        "four-paths" => Some(four_paths()),
        "composition" => Some(composition_diagram()),
        "triangle" => Some(crate::cells::yablo_triangle()),
        _ => {
            let m = name.strip_prefix("pipeline:")?.parse().ok()?;
            Some(pipeline(m))
        }
    }
}

pub const NAMES: &[&str] = &["gamma", "gamma-prime", "four-paths", "composition", "triangle", "pipeline:M"];
