//! Embedding Yablo truncations into bare acyclic graphs.
//!
//! An injection `μ` sends `x0..xn` to target nodes and picks, for every pair
//! `i < j`, an image path `μ(x_i) ⇝ μ(x_j)`. It preserves the contradictions
//! when some valuation of the target arrows (one sign per arrow, shared by all
//! paths through it) makes every chosen image path negative. Path values are
//! sums over GF(2), so the valuation is found by linear algebra while the
//! search backtracks over `μ` and the path choices.

mod gf2;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{simple_paths, Arrow, BareDag, NodeId, RefGraph, Sign};
use crate::logic::{Formula, TruthValue3};
use crate::logic::formula::eval3_with;
use crate::semantics::{check_status, StatusKind};
use gf2::{Gf2System, Push};

fn x(i: usize) -> NodeId {
    NodeId::from(format!("x{i}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChosenPath {
    pub from: NodeId,
    pub to: NodeId,
    /// Target nodes from `μ(from)` to `μ(to)`.
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection {
    pub n: usize,
    pub mu: BTreeMap<NodeId, NodeId>,
    pub paths: Vec<ChosenPath>,
    /// Signs of the arrows on chosen paths.
    pub valuation: Vec<Arrow>,
}

impl Injection {
    /// `x_i ↦ x_{i+shift}` into a truncation, direct arrows, all negative.
    pub fn shifted(n: usize, shift: usize) -> Injection {
        let mu: BTreeMap<NodeId, NodeId> = (0..=n).map(|i| (x(i), x(i + shift))).collect();
        let mut paths = Vec::new();
        let mut valuation = Vec::new();
        for i in 0..=n {
            for j in i + 1..=n {
                paths.push(ChosenPath {
                    from: x(i),
                    to: x(j),
                    nodes: vec![x(i + shift), x(j + shift)],
                });
                valuation.push(Arrow::neg(x(i + shift), x(j + shift)));
            }
        }
        valuation.sort();
        Injection {
            n,
            mu,
            paths,
            valuation,
        }
    }

    pub fn sign(&self, from: &NodeId, to: &NodeId) -> Option<Sign> {
        self.valuation
            .iter()
            .find(|a| &a.from == from && &a.to == to)
            .map(|a| a.sign)
    }

    pub fn image(&self) -> BTreeSet<NodeId> {
        self.mu.values().cloned().collect()
    }

    fn path(&self, i: usize, j: usize) -> Option<&ChosenPath> {
        let (a, b) = (x(i), x(j));
        self.paths.iter().find(|p| p.from == a && p.to == b)
    }

    fn chosen_arrows(&self) -> BTreeSet<(NodeId, NodeId)> {
        self.paths
            .iter()
            .flat_map(|p| p.nodes.windows(2).map(|w| (w[0].clone(), w[1].clone())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectionCheck {
    pub ok: bool,
    pub failure: Option<String>,
}

impl InjectionCheck {
    fn fail(msg: String) -> Self {
        InjectionCheck {
            ok: false,
            failure: Some(msg),
        }
    }
}

/// Checks injectivity, that every pair has a chosen image path in the
/// target, and that each chosen path is negative under the valuation.
pub fn check_injection(target: &BareDag, n: usize, inj: &Injection) -> Result<InjectionCheck> {
    for i in 0..=n {
        if !inj.mu.contains_key(&x(i)) {
            return Err(Error::InvalidInjection(format!("x{i} is not mapped")));
        }
    }
    let mut seen = BTreeSet::new();
    for i in 0..=n {
        let m = &inj.mu[&x(i)];
        if !target.contains(m) {
            return Ok(InjectionCheck::fail(format!("μ(x{i}) = {m} is not a target node")));
        }
        if !seen.insert(m) {
            return Ok(InjectionCheck::fail(format!("{m} is the image of two nodes")));
        }
    }
    let mut signs: BTreeMap<(&NodeId, &NodeId), Sign> = BTreeMap::new();
    for a in &inj.valuation {
        if signs.insert((&a.from, &a.to), a.sign).is_some() {
            return Ok(InjectionCheck::fail(format!("arrow {}→{} valued twice", a.from, a.to)));
        }
    }
    for i in 0..=n {
        for j in i + 1..=n {
            let Some(p) = inj.path(i, j) else {
                return Ok(InjectionCheck::fail(format!("no chosen image path for (x{i}, x{j})")));
            };
            let (a, b) = (&inj.mu[&x(i)], &inj.mu[&x(j)]);
            if p.nodes.first() != Some(a) || p.nodes.last() != Some(b) || p.nodes.len() < 2 {
                return Ok(InjectionCheck::fail(format!(
                    "path for (x{i}, x{j}) does not run from {a} to {b}"
                )));
            }
            let mut negatives = 0;
            for w in p.nodes.windows(2) {
                if !target.has_arrow(&w[0], &w[1]) {
                    return Ok(InjectionCheck::fail(format!("no arrow {}→{} in the target", w[0], w[1])));
                }
                match signs.get(&(&w[0], &w[1])) {
                    Some(Sign::Negative) => negatives += 1,
                    Some(Sign::Positive) => {}
                    None => {
                        return Ok(InjectionCheck::fail(format!("arrow {}→{} has no sign", w[0], w[1])))
                    }
                }
            }
            if negatives % 2 == 0 {
                return Ok(InjectionCheck::fail(format!("image path for (x{i}, x{j}) is positive")));
            }
        }
    }
    Ok(InjectionCheck {
        ok: true,
        failure: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_nodes_explored: u64,
    pub path_length_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_nodes_explored: 2_000_000,
            path_length_cap: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { injection: Injection, explored: u64 },
    /// The whole space was searched without a solution.
    Absent { explored: u64 },
    /// The budget ran out, or the length cap hid some paths.
    Inconclusive { explored: u64, reason: String },
}

impl SearchOutcome {
    pub fn injection(&self) -> Option<&Injection> {
        match self {
            SearchOutcome::Found { injection, .. } => Some(injection),
            _ => None,
        }
    }
}

struct Target {
    ids: Vec<NodeId>,
    succ: Vec<Vec<usize>>,
    arrow_id: BTreeMap<(usize, usize), usize>,
    arrows: Vec<(usize, usize)>,
    reach: Vec<Vec<bool>>,
    /// Arrows on the longest path starting at each node.
    height: Vec<usize>,
}

impl Target {
    fn new(g: &BareDag) -> Result<Target> {
        let ids: Vec<NodeId> = g.nodes().cloned().collect();
        let index: BTreeMap<&NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let succ: Vec<Vec<usize>> = ids
            .iter()
            .map(|n| g.successors(n).map(|s| index[s]).collect())
            .collect();
        let mut arrow_id = BTreeMap::new();
        let mut arrows = Vec::new();
        for (u, out) in succ.iter().enumerate() {
            for &v in out {
                arrow_id.insert((u, v), arrows.len());
                arrows.push((u, v));
            }
        }
        let n = ids.len();
        let mut reach = vec![vec![false; n]; n];
        let mut height = vec![0; n];
        for node in g.topo_order()?.iter().rev() {
            let u = index[node];
            for &v in &succ[u] {
                reach[u][v] = true;
                for w in 0..n {
                    if reach[v][w] {
                        reach[u][w] = true;
                    }
                }
                height[u] = height[u].max(height[v] + 1);
            }
        }
        Ok(Target {
            ids,
            succ,
            arrow_id,
            arrows,
            reach,
            height,
        })
    }
}

struct Search<'a> {
    t: &'a Target,
    n: usize,
    cfg: SearchConfig,
    explored: u64,
    truncated: bool,
    out_of_budget: bool,
    mu: Vec<usize>,
    used: Vec<bool>,
    chosen: Vec<((usize, usize), Vec<usize>)>,
    system: Gf2System,
    path_cache: BTreeMap<(usize, usize), Vec<Vec<usize>>>,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.explored += 1;
        if self.explored > self.cfg.max_nodes_explored {
            self.out_of_budget = true;
        }
        !self.out_of_budget
    }

    /// Simple paths `a ⇝ b` as node-index sequences, shortest first, then
    /// in lexicographic order of node ids.
    fn paths(&mut self, a: usize, b: usize) -> Vec<Vec<usize>> {
        if let Some(p) = self.path_cache.get(&(a, b)) {
            return p.clone();
        }
        let t = self.t;
        let succ_ids = |n: &NodeId| -> std::vec::IntoIter<&NodeId> {
            let i = t.ids.binary_search(n).expect("known node");
            t.succ[i].iter().map(|&s| &t.ids[s]).collect::<Vec<_>>().into_iter()
        };
        let (seqs, truncated) = simple_paths(succ_ids, &t.ids[a], &t.ids[b], self.cfg.path_length_cap);
        self.truncated |= truncated;
        let mut seqs: Vec<Vec<usize>> = seqs
            .into_iter()
            .map(|s| s.iter().map(|n| t.ids.binary_search(n).unwrap()).collect())
            .collect();
        seqs.sort_by_key(|s| s.len());
        self.path_cache.insert((a, b), seqs.clone());
        seqs
    }

    fn place(&mut self, i: usize) -> bool {
        if i > self.n {
            return true;
        }
        for c in 0..self.t.ids.len() {
            if self.used[c] || self.t.height[c] < self.n - i {
                continue;
            }
            if i > 0 && !self.t.reach[self.mu[i - 1]][c] {
                continue;
            }
            if !self.tick() {
                return false;
            }
            self.mu.push(c);
            self.used[c] = true;
            if self.connect(i, 0) {
                return true;
            }
            self.used[c] = false;
            self.mu.pop();
            if self.out_of_budget {
                return false;
            }
        }
        false
    }

    /// Picks image paths for the pairs `(k, i)`, `k = from..i`.
    fn connect(&mut self, i: usize, from: usize) -> bool {
        if from == i {
            return self.place(i + 1);
        }
        let (a, b) = (self.mu[from], self.mu[i]);
        for p in self.paths(a, b) {
            if !self.tick() {
                return false;
            }
            let vars: Vec<usize> = p.windows(2).map(|w| self.t.arrow_id[&(w[0], w[1])]).collect();
            let pushed = self.system.push(&vars, true);
            if pushed == Push::Inconsistent {
                continue;
            }
            self.chosen.push(((from, i), p));
            if self.connect(i, from + 1) {
                return true;
            }
            self.chosen.pop();
            if pushed == Push::Added {
                self.system.pop();
            }
            if self.out_of_budget {
                return false;
            }
        }
        false
    }

    fn injection(&self) -> Injection {
        let t = self.t;
        let values = self.system.solve();
        let mut on_paths = BTreeSet::new();
        let mut chosen: Vec<&((usize, usize), Vec<usize>)> = self.chosen.iter().collect();
        chosen.sort_by_key(|(pair, _)| *pair);
        let paths = chosen
            .into_iter()
            .map(|((k, i), p)| {
                for w in p.windows(2) {
                    on_paths.insert(t.arrow_id[&(w[0], w[1])]);
                }
                ChosenPath {
                    from: x(*k),
                    to: x(*i),
                    nodes: p.iter().map(|&v| t.ids[v].clone()).collect(),
                }
            })
            .collect();
        let valuation = on_paths
            .into_iter()
            .map(|a| {
                let (u, v) = t.arrows[a];
                let sign = if values[a] { Sign::Negative } else { Sign::Positive };
                Arrow::new(t.ids[u].clone(), t.ids[v].clone(), sign)
            })
            .collect();
        Injection {
            n: self.n,
            mu: self
                .mu
                .iter()
                .enumerate()
                .map(|(i, &c)| (x(i), t.ids[c].clone()))
                .collect(),
            paths,
            valuation,
        }
    }
}

/// Backtracking search for an injection of `yablo_truncation(n)`; the first
/// solution in the deterministic order (images by node id, paths shortest
/// first) is returned.
pub fn find_injection(target: &BareDag, n: usize, cfg: SearchConfig) -> Result<SearchOutcome> {
    let t = Target::new(target)?;
    let mut s = Search {
        t: &t,
        n,
        cfg,
        explored: 0,
        truncated: false,
        out_of_budget: false,
        mu: Vec::new(),
        used: vec![false; t.ids.len()],
        chosen: Vec::new(),
        system: Gf2System::new(t.arrows.len()),
        path_cache: BTreeMap::new(),
    };
    let found = s.place(0);
    let explored = s.explored;
    Ok(if found {
        SearchOutcome::Found {
            injection: s.injection(),
            explored,
        }
    } else if s.out_of_budget {
        SearchOutcome::Inconclusive {
            explored,
            reason: format!("search budget of {} nodes exhausted", cfg.max_nodes_explored),
        }
    } else if s.truncated {
        SearchOutcome::Inconclusive {
            explored,
            reason: format!("paths longer than {} arrows were not explored", cfg.path_length_cap),
        }
    } else {
        SearchOutcome::Absent { explored }
    })
}

/// Labels the whole target: an arrow on a chosen path becomes the literal
/// its valuation asks for, every other arrow `v → s` contributes `s ∨ ¬s`.
/// Sinks stay sinks.
pub fn extend_interpretation(target: &BareDag, inj: &Injection) -> Result<RefGraph> {
    let check = check_injection(target, inj.n, inj)?;
    if !check.ok {
        return Err(Error::InvalidInjection(check.failure.unwrap_or_default()));
    }
    let chosen = inj.chosen_arrows();
    let mut arrows = Vec::new();
    let mut formulas = Vec::new();
    for v in target.nodes() {
        let mut parts = Vec::new();
        for s in target.successors(v) {
            if chosen.contains(&(v.clone(), s.clone())) {
                let sign = inj.sign(v, s).expect("checked valuation");
                parts.push(Formula::literal(s.clone(), sign));
                arrows.push(Arrow::new(v.clone(), s.clone(), sign));
            } else {
                parts.push(Formula::tautology_on(s.clone()));
                arrows.push(Arrow::pos(v.clone(), s.clone()));
            }
        }
        if !parts.is_empty() {
            formulas.push((v.clone(), Formula::conj(parts)));
        }
    }
    RefGraph::new(target.nodes().cloned(), arrows, formulas)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionReport {
    pub values: BTreeMap<NodeId, TruthValue3>,
    /// Nodes held at `ξ`: the image of `xn` and image sinks.
    pub frontier: Vec<NodeId>,
    pub image_all_xi: bool,
    pub non_image_t_or_xi: bool,
    /// Classical status of `μ(x0)`, when every chosen path is a single arrow.
    pub root_status: Option<StatusKind>,
    pub ok: bool,
}

/// Three-valued check of an extended interpretation: the frontier is held
/// at `ξ`, other sinks at `T`.
pub fn verify_extension(g: &RefGraph, inj: &Injection) -> Result<ExtensionReport> {
    let image = inj.image();
    let last = inj
        .mu
        .get(&x(inj.n))
        .ok_or_else(|| Error::InvalidInjection(format!("x{} is not mapped", inj.n)))?;
    let frontier: Vec<NodeId> = image
        .iter()
        .filter(|m| *m == last || g.is_sink(m))
        .cloned()
        .collect();
    let mut values: BTreeMap<NodeId, TruthValue3> = BTreeMap::new();
    let no_tags = BTreeMap::new();
    for n in g.topo_order()?.into_iter().rev() {
        let v = if frontier.contains(&n) {
            TruthValue3::Xi
        } else {
            match g.formula(&n) {
                None => TruthValue3::T,
                Some(f) => eval3_with(f, &|k: &NodeId| values.get(k).copied(), &no_tags)?,
            }
        };
        values.insert(n, v);
    }
    let image_all_xi = image.iter().all(|m| values.get(m) == Some(&TruthValue3::Xi));
    let non_image_t_or_xi = values
        .iter()
        .filter(|(k, _)| !image.contains(*k))
        .all(|(_, v)| *v != TruthValue3::F);
    let complete = inj.paths.iter().all(|p| p.nodes.len() == 2);
    let root_status = if complete {
        let root = &inj.mu[&x(0)];
        check_status(g, root).ok().map(|s| s.kind)
    } else {
        None
    };
    Ok(ExtensionReport {
        ok: image_all_xi && non_image_t_or_xi,
        values,
        frontier,
        image_all_xi,
        non_image_t_or_xi,
        root_status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainLink {
    /// `v ∨ ¬v`
    Taut,
    /// `v ∧ ¬v`
    Contra,
}

/// Folds `v ↦ v ∨ ¬v` / `v ↦ v ∧ ¬v` over `seed`.
pub fn tautology_chain_eval(chain: &[ChainLink], seed: TruthValue3) -> TruthValue3 {
    chain.iter().fold(seed, |v, link| match link {
        ChainLink::Taut => v | !v,
        ChainLink::Contra => v & !v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::yablo_truncation;

    #[test]
    fn identity_and_shift_pass() {
        let t = yablo_truncation(4).unwrap().to_bare();
        let id = Injection::shifted(4, 0);
        assert!(check_injection(&t, 4, &id).unwrap().ok);
        let t6 = yablo_truncation(6).unwrap().to_bare();
        assert!(check_injection(&t6, 4, &Injection::shifted(4, 2)).unwrap().ok);
    }

    #[test]
    fn incomplete_injection_is_an_error() {
        let t = yablo_truncation(3).unwrap().to_bare();
        let mut inj = Injection::shifted(3, 0);
        inj.mu.remove(&x(3));
        assert!(matches!(check_injection(&t, 3, &inj), Err(Error::InvalidInjection(_))));
    }

    #[test]
    fn finds_identity_first() {
        let t = yablo_truncation(3).unwrap().to_bare();
        let out = find_injection(&t, 3, SearchConfig::default()).unwrap();
        assert_eq!(out.injection(), Some(&Injection::shifted(3, 0)));
    }

    #[test]
    fn chain_is_absent() {
        let out = find_injection(&BareDag::chain("c", 10), 2, SearchConfig::default()).unwrap();
        assert!(matches!(out, SearchOutcome::Absent { .. }));
    }

    #[test]
    fn budget_gives_inconclusive() {
        let cfg = SearchConfig {
            max_nodes_explored: 3,
            ..SearchConfig::default()
        };
        let out = find_injection(&BareDag::chain("c", 10), 2, cfg).unwrap();
        assert!(matches!(out, SearchOutcome::Inconclusive { .. }));
    }

    #[test]
    fn extension_of_decorated_truncation() {
        let base = yablo_truncation(2).unwrap().to_bare();
        let mut nodes: Vec<NodeId> = base.nodes().cloned().collect();
        nodes.extend([NodeId::from("y"), NodeId::from("z")]);
        let mut arrows: Vec<(NodeId, NodeId)> = base.arrows().map(|(a, b)| (a.clone(), b.clone())).collect();
        arrows.push(("x0".into(), "y".into()));
        arrows.push(("y".into(), "z".into()));
        arrows.push(("y".into(), "x2".into()));
        let t = BareDag::new(nodes, arrows).unwrap();
        let inj = find_injection(&t, 2, SearchConfig::default()).unwrap().injection().cloned().unwrap();
        let g = extend_interpretation(&t, &inj).unwrap();
        assert_eq!(
            g.formula(&"y".into()).unwrap().to_string(),
            "(x2 ∨ ¬x2) ∧ (z ∨ ¬z)"
        );
        let r = verify_extension(&g, &inj).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.values[&NodeId::from("z")], TruthValue3::T);
        assert_eq!(r.root_status, Some(StatusKind::C1Holds));
    }

    #[test]
    fn chains_of_links() {
        use ChainLink::*;
        assert_eq!(tautology_chain_eval(&[Taut], TruthValue3::Xi), TruthValue3::Xi);
        assert_eq!(tautology_chain_eval(&[Taut, Contra], TruthValue3::T), TruthValue3::F);
        assert_eq!(tautology_chain_eval(&[Contra, Taut], TruthValue3::F), TruthValue3::T);
        assert_eq!(tautology_chain_eval(&[Taut], TruthValue3::T), TruthValue3::T);
    }
}
