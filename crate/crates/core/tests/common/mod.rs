//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refgraph_core::logic::Literal;
use refgraph_core::{BareDag, Dnf, Formula, NodeId, RefGraph, Sign};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// `REFGRAPH_TEST_SEED` overrides the fixed default.
pub fn seed() -> u64 {
    std::env::var("REFGRAPH_TEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed().wrapping_add(offset))
}

fn random_formula(rng: &mut ChaCha8Rng, vars: &[NodeId], depth: u32) -> Formula {
    if depth == 0 || vars.len() == 1 || rng.gen_bool(0.3) {
        let v = vars.choose(rng).unwrap().clone();
        return if rng.gen_bool(0.5) { Formula::var(v) } else { Formula::neg(v) };
    }
    let k = rng.gen_range(2..=3);
    let items = (0..k).map(|_| random_formula(rng, vars, depth - 1)).collect();
    if rng.gen_bool(0.5) {
        Formula::And(items)
    } else {
        Formula::Or(items)
    }
}

/// A random acyclic graph: `sinks` free nodes `s0..`, then `inner` nodes
/// `n0..` each defined over 1–3 earlier nodes. Every chosen successor occurs
/// in the formula.
pub fn random_graph(rng: &mut ChaCha8Rng, sinks: usize, inner: usize) -> RefGraph {
    let mut pool: Vec<NodeId> = (0..sinks).map(|i| NodeId::from(format!("s{i}"))).collect();
    let mut defs = Vec::new();
    for i in 0..inner {
        let k = rng.gen_range(1..=pool.len().min(3));
        let succ: Vec<NodeId> = pool.choose_multiple(rng, k).cloned().collect();
        let mut parts: Vec<Formula> = succ
            .iter()
            .map(|s| if rng.gen_bool(0.5) { Formula::var(s.clone()) } else { Formula::neg(s.clone()) })
            .collect();
        if succ.len() > 1 && rng.gen_bool(0.5) {
            parts.push(random_formula(rng, &succ, 2));
        }
        let f = if rng.gen_bool(0.5) { Formula::conj(parts) } else { Formula::disj(parts) };
        let id = NodeId::from(format!("n{i}"));
        defs.push((id.clone(), f));
        pool.push(id);
    }
    RefGraph::from_formulas(defs).expect("generated graph is valid")
}

/// Values of every node under a full assignment of the graph's sinks,
/// computed by plain recursion on the formulas.
pub fn evaluate(g: &RefGraph, sinks: &BTreeMap<NodeId, bool>) -> BTreeMap<NodeId, bool> {
    fn value(g: &RefGraph, n: &NodeId, sinks: &BTreeMap<NodeId, bool>, memo: &mut BTreeMap<NodeId, bool>) -> bool {
        if let Some(v) = memo.get(n) {
            return *v;
        }
        let v = match g.formula(n) {
            None => sinks[n],
            Some(f) => formula_value(g, f, sinks, memo),
        };
        memo.insert(n.clone(), v);
        v
    }
    fn formula_value(g: &RefGraph, f: &Formula, sinks: &BTreeMap<NodeId, bool>, memo: &mut BTreeMap<NodeId, bool>) -> bool {
        match f {
            Formula::Var(v) => value(g, v, sinks, memo),
            Formula::NegVar(v) => !value(g, v, sinks, memo),
            Formula::And(xs) => xs.iter().all(|x| formula_value(g, x, sinks, memo)),
            Formula::Or(xs) => xs.iter().any(|x| formula_value(g, x, sinks, memo)),
            Formula::True => true,
            Formula::False => false,
            Formula::Frontier { .. } => panic!("frontier in a classical graph"),
        }
    }
    let mut memo = BTreeMap::new();
    for n in g.nodes() {
        value(g, n, sinks, &mut memo);
    }
    memo
}

/// All assignments of the listed sinks, in mask order (bit `i` = `sinks[i]`).
pub fn assignments(sinks: &[NodeId]) -> impl Iterator<Item = BTreeMap<NodeId, bool>> + '_ {
    (0u64..1 << sinks.len()).map(move |m| {
        sinks
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), m >> i & 1 == 1))
            .collect()
    })
}

/// Assignments of the sinks below `node` (over all graph sinks, others
/// fixed false) under which `node` takes `truth`.
pub fn oracle_models(g: &RefGraph, node: &NodeId, truth: bool) -> Vec<BTreeMap<NodeId, bool>> {
    let below = g.reachable_sinks(node);
    let all = g.sinks();
    assignments(&below)
        .filter(|a| {
            let full: BTreeMap<NodeId, bool> = all
                .iter()
                .map(|s| (s.clone(), a.get(s).copied().unwrap_or(false)))
                .collect();
            evaluate(g, &full)[node] == truth
        })
        .collect()
}

pub fn random_dnf(rng: &mut ChaCha8Rng, vars: usize) -> Dnf {
    let names: Vec<String> = (1..=vars).map(|i| format!("v{i}")).collect();
    let terms = rng.gen_range(0..=5);
    let conjuncts: Vec<Vec<Literal>> = (0..terms)
        .map(|_| {
            let k = rng.gen_range(1..=vars.min(4));
            names
                .choose_multiple(rng, k)
                .map(|v| if rng.gen_bool(0.5) { Literal::pos(v.as_str()) } else { Literal::neg(v.as_str()) })
                .collect()
        })
        .collect();
    Dnf::from_conjuncts(conjuncts)
}

/// Truth table of a Dnf over the named variables.
pub fn truth_table(d: &Dnf, vars: &[NodeId]) -> Vec<bool> {
    assignments(vars).map(|a| d.eval_nodes(&a).expect("all variables assigned")).collect()
}

/// Random bare DAG on `n0..n{k-1}` with arrows only from lower to higher
/// index.
pub fn random_dag(rng: &mut ChaCha8Rng, nodes: usize, max_arrows: usize) -> BareDag {
    let ids: Vec<NodeId> = (0..nodes).map(|i| NodeId::from(format!("n{i}"))).collect();
    let mut pairs: Vec<(usize, usize)> = (0..nodes).flat_map(|i| (i + 1..nodes).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let k = rng.gen_range(0..=pairs.len().min(max_arrows));
    let arrows: Vec<(NodeId, NodeId)> = pairs[..k].iter().map(|&(i, j)| (ids[i].clone(), ids[j].clone())).collect();
    BareDag::new(ids, arrows).expect("index-ordered arrows are acyclic")
}

/// Whether some injective `μ` of `x0..xn` and some signing of the target
/// arrows give every pair `i < j` a negative path `μ(x_i) ⇝ μ(x_j)`.
/// Exhaustive over `μ` and over all signings of the arrows.
pub fn oracle_injection_exists(target: &BareDag, n: usize) -> bool {
    let nodes: Vec<NodeId> = target.nodes().cloned().collect();
    let arrows: Vec<(NodeId, NodeId)> = target.arrows().map(|(a, b)| (a.clone(), b.clone())).collect();
    let order = target.topo_order().expect("acyclic");
    let reach = target.reachability();
    let mut mu: Vec<usize> = Vec::new();
    fn place(
        mu: &mut Vec<usize>,
        n: usize,
        nodes: &[NodeId],
        reach: &BTreeMap<NodeId, BTreeSet<NodeId>>,
        test: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if mu.len() == n + 1 {
            return test(mu);
        }
        for c in 0..nodes.len() {
            if mu.contains(&c) {
                continue;
            }
            if !mu.iter().all(|&p| reach[&nodes[p]].contains(&nodes[c])) {
                continue;
            }
            mu.push(c);
            if place(mu, n, nodes, reach, test) {
                return true;
            }
            mu.pop();
        }
        false
    }
    let test = |mu: &[usize]| -> bool {
        (0u64..1 << arrows.len()).any(|signs| {
            let sign_of: BTreeMap<(&NodeId, &NodeId), bool> = arrows
                .iter()
                .enumerate()
                .map(|(i, (a, b))| ((a, b), signs >> i & 1 == 1))
                .collect();
            mu.iter().enumerate().all(|(i, &from)| {
                // parities of paths from μ(x_i): (reach with even, reach with odd)
                let mut par: BTreeMap<&NodeId, (bool, bool)> = BTreeMap::new();
                par.insert(&nodes[from], (true, false));
                for v in &order {
                    let Some(&(even, odd)) = par.get(v) else { continue };
                    for w in target.successors(v) {
                        let neg = sign_of[&(v, w)];
                        let e = par.entry(w).or_insert((false, false));
                        if neg {
                            e.0 |= odd;
                            e.1 |= even;
                        } else {
                            e.0 |= even;
                            e.1 |= odd;
                        }
                    }
                }
                mu[i + 1..].iter().all(|&to| par.get(&nodes[to]).is_some_and(|p| p.1))
            })
        })
    };
    place(&mut mu, n, &nodes, &reach, &test)
}

pub fn sign_of_bool(negative: bool) -> Sign {
    if negative {
        Sign::Negative
    } else {
        Sign::Positive
    }
}
