//! Yablo truncations, the step-by-step inductive construction and
//! diagnostics over finished graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    contradictory_pairs, enumerate_paths, Arrow, NodeId, Path, RefGraph, Sign, DEFAULT_MAX_PATH_LEN,
};
use crate::logic::{negate_dnf, Atom, Dnf, Formula};
use crate::semantics::{node_model_expression, ModelEngine, Polarity};

fn x(i: usize) -> NodeId {
    NodeId::from(format!("x{i}"))
}

/// Nodes `x0..xn`, a negative arrow `x_i → x_j` for every `i < j`, sink `xn`.
pub fn yablo_truncation(n: usize) -> Result<RefGraph> {
    if n < 2 {
        return Err(Error::TruncationTooSmall(n));
    }
    let arrows = (0..n).flat_map(|i| (i + 1..=n).map(move |j| Arrow::neg(x(i), x(j))));
    RefGraph::from_signed_arrows(arrows.collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuildStep {
    /// `x0 = ¬x1 ∧ ¬x2`, `x1 = ¬x2`.
    SeedTriangle,
    /// Adds the conjunct `¬new_sink` to `at`, opening a contradiction that
    /// the next [`BuildStep::FinishC2`] closes.
    PrepareC2 { at: NodeId, new_sink: NodeId },
    /// Gives the sink `at` the formula `¬s`, `s` being the prepared sink.
    FinishC2 { at: NodeId },
    /// Adds the conjunct `¬to` to `from`.
    CloseC1 { from: NodeId, to: NodeId },
}

impl fmt::Display for BuildStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildStep::SeedTriangle => write!(f, "seed"),
            BuildStep::PrepareC2 { at, new_sink } => write!(f, "prepare {at} {new_sink}"),
            BuildStep::FinishC2 { at } => write!(f, "finish {at}"),
            BuildStep::CloseC1 { from, to } => write!(f, "close {from} {to}"),
        }
    }
}

impl FromStr for BuildStep {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let id = |w: &str| NodeId::new(w).map_err(|e| e.to_string());
        match words.as_slice() {
            ["seed"] => Ok(BuildStep::SeedTriangle),
            ["prepare", at, new_sink] => Ok(BuildStep::PrepareC2 {
                at: id(at)?,
                new_sink: id(new_sink)?,
            }),
            ["finish", at] => Ok(BuildStep::FinishC2 { at: id(at)? }),
            ["close", from, to] => Ok(BuildStep::CloseC1 {
                from: id(from)?,
                to: id(to)?,
            }),
            _ => Err(format!(
                "cannot read step `{s}`; expected `seed`, `prepare A S`, `finish A` or `close A B`"
            )),
        }
    }
}

/// Reads a script either as a JSON array of steps or as one step per line
/// (`#` starts a comment).
pub fn parse_script(text: &str) -> Result<Vec<BuildStep>> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        });
    }
    let mut steps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let step = body.parse().map_err(|message| Error::Parse {
            line: i + 1,
            column: 1,
            message,
        })?;
        steps.push(step);
    }
    Ok(steps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub step: BuildStep,
    /// Canonical `M(n)` for every node after the step.
    pub expressions: BTreeMap<NodeId, Dnf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildState {
    pub graph: Option<RefGraph>,
    pub ledger: Vec<LedgerEntry>,
    pending: Option<(NodeId, NodeId)>,
}

impl Default for BuildState {
    fn default() -> Self {
        Self::new()
    }
}

impl BuildState {
    pub fn new() -> Self {
        BuildState {
            graph: None,
            ledger: Vec::new(),
            pending: None,
        }
    }

    /// The prepared node and its fresh sink awaiting [`BuildStep::FinishC2`].
    pub fn pending(&self) -> Option<&(NodeId, NodeId)> {
        self.pending.as_ref()
    }

    pub fn apply(&mut self, step: &BuildStep) -> Result<()> {
        let index = self.ledger.len();
        let fail = |reason: String| Error::InapplicableStep {
            index,
            step: step.to_string(),
            reason,
        };
        let next = match (step, &self.graph) {
            (BuildStep::SeedTriangle, None) => {
                yablo_truncation(2)?
            }
            (BuildStep::SeedTriangle, Some(_)) => {
                return Err(fail("the seed must be the first step".into()))
            }
            (_, None) => return Err(fail("the script must start with the seed".into())),
            (BuildStep::PrepareC2 { at, new_sink }, Some(g)) => {
                if let Some((p, _)) = &self.pending {
                    return Err(fail(format!("the preparation at {p} is not finished yet")));
                }
                if !g.contains(at) || g.is_sink(at) {
                    return Err(fail(format!("{at} is not an inner node")));
                }
                if g.contains(new_sink) {
                    return Err(fail(format!("{new_sink} already exists")));
                }
                let g = g.with_sink(new_sink.clone()).map_err(|e| fail(e.to_string()))?;
                add_negative_conjunct(&g, at, new_sink).map_err(|e| fail(e.to_string()))?
            }
            (BuildStep::FinishC2 { at }, Some(g)) => {
                let Some((p, s)) = self.pending.clone() else {
                    return Err(fail("no preparation to finish".into()));
                };
                if !g.contains(at) || !g.is_sink(at) {
                    return Err(fail(format!("{at} is not a sink")));
                }
                if g.sign(&p, at).is_none() {
                    return Err(fail(format!("{at} is not a successor of {p}")));
                }
                if *at == s {
                    return Err(fail(format!("{at} is the prepared sink itself")));
                }
                g.define(at.clone(), Formula::neg(s)).map_err(|e| fail(e.to_string()))?
            }
            (BuildStep::CloseC1 { from, to }, Some(g)) => {
                if let Some((p, _)) = &self.pending {
                    return Err(fail(format!("the preparation at {p} is not finished yet")));
                }
                for n in [from, to] {
                    if !g.contains(n) {
                        return Err(fail(format!("unknown node {n}")));
                    }
                }
                if g.is_sink(from) {
                    return Err(fail(format!("{from} is a sink")));
                }
                if g.sign(from, to).is_some() {
                    return Err(fail(format!("arrow {from} -> {to} already exists")));
                }
                add_negative_conjunct(g, from, to).map_err(|e| fail(e.to_string()))?
            }
        };
        self.pending = match step {
            BuildStep::PrepareC2 { at, new_sink } => Some((at.clone(), new_sink.clone())),
            _ => None,
        };
        let expressions = next
            .nodes()
            .map(|n| Ok((n.clone(), node_model_expression(&next, n)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        self.graph = Some(next);
        self.ledger.push(LedgerEntry {
            step: step.clone(),
            expressions,
        });
        Ok(())
    }
}

/// `at`'s literal conjunction extended by `¬to`, literals kept in node order.
fn add_negative_conjunct(g: &RefGraph, at: &NodeId, to: &NodeId) -> Result<RefGraph> {
    let f = g.formula(at).ok_or_else(|| Error::NotASink(at.clone()))?;
    let mut lits = f.literal_conjunction().ok_or_else(|| {
        Error::Document(format!("formula of {at} is not a conjunction of literals"))
    })?;
    lits.push((to.clone(), Sign::Negative));
    lits.sort();
    let f = Formula::conj(lits.into_iter().map(|(v, s)| Formula::literal(v, s)).collect());
    g.define(at.clone(), f)
}

pub fn inductive_build(steps: &[BuildStep]) -> Result<BuildState> {
    let mut state = BuildState::new();
    for s in steps {
        state.apply(s)?;
    }
    Ok(state)
}

/// Seed, then per round `k`: prepare at `x_k` with sink `x_{k+2}`, finish at
/// `x_{k+1}`, close from `x_{k-1}` down to `x_0`. Replaying `depth` rounds
/// yields `yablo_truncation(depth + 2)`.
pub fn canonical_script(depth: usize) -> Vec<BuildStep> {
    let mut steps = vec![BuildStep::SeedTriangle];
    for k in 1..=depth {
        steps.push(BuildStep::PrepareC2 {
            at: x(k),
            new_sink: x(k + 2),
        });
        steps.push(BuildStep::FinishC2 { at: x(k + 1) });
        for from in (0..k).rev() {
            steps.push(BuildStep::CloseC1 {
                from: x(from),
                to: x(k + 2),
            });
        }
    }
    steps
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRichness {
    pub from: NodeId,
    pub to: NodeId,
    pub positive: u128,
    pub negative: u128,
    pub unique_path: bool,
    pub lacks_negative: bool,
}

/// Path counts by value for every ordered pair joined by a path.
pub fn richness_check(g: &RefGraph) -> Result<Vec<PairRichness>> {
    let order = g.topo_order()?;
    let mut out = Vec::new();
    for src in &order {
        let mut counts: BTreeMap<&NodeId, (u128, u128)> = BTreeMap::new();
        counts.insert(src, (1, 0));
        for n in order.iter().skip_while(|n| *n != src) {
            let Some(&(p, q)) = counts.get(n) else {
                continue;
            };
            for (s, sign) in g.successors(n) {
                let e = counts.entry(s).or_insert((0, 0));
                let (dp, dq) = match sign {
                    Sign::Positive => (p, q),
                    Sign::Negative => (q, p),
                };
                e.0 = e.0.saturating_add(dp);
                e.1 = e.1.saturating_add(dq);
            }
        }
        for (to, (p, q)) in counts {
            if to == src {
                continue;
            }
            out.push(PairRichness {
                from: src.clone(),
                to: to.clone(),
                positive: p,
                negative: q,
                unique_path: p.saturating_add(q) == 1,
                lacks_negative: q == 0,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obligation {
    pub target: NodeId,
    pub polarity: Polarity,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeadObligations {
    /// Per disjunct: the nodes that must together make it contradictory.
    pub c1_targets: Vec<BTreeSet<NodeId>>,
    /// Alternatives: making every node of one group contradictory falsifies
    /// every component of the negation.
    pub c2_targets: Vec<BTreeSet<NodeId>>,
}

impl HeadObligations {
    pub fn obligations(&self, head: &NodeId) -> Vec<Obligation> {
        let mut out = Vec::new();
        for (i, group) in self.c1_targets.iter().enumerate() {
            for t in group {
                out.push(Obligation {
                    target: t.clone(),
                    polarity: Polarity::Pos,
                    reason: format!("disjunct {} of {head}+ must be contradictory", i + 1),
                });
            }
        }
        for (i, group) in self.c2_targets.iter().enumerate() {
            for t in group {
                out.push(Obligation {
                    target: t.clone(),
                    polarity: Polarity::Neg,
                    reason: format!("alternative {} for {head}- needs a contradiction at {t}", i + 1),
                });
            }
        }
        out
    }
}

const HITTING_SET_VARS: usize = 24;

pub fn dnf_head_obligations(head: &Dnf) -> Result<HeadObligations> {
    let var_set = |c: &crate::logic::Conjunct| -> BTreeSet<NodeId> {
        c.iter()
            .filter_map(|l| match &l.atom {
                Atom::Node(v) => Some(v.clone()),
                Atom::Frontier(_) => None,
            })
            .collect()
    };
    let c1_targets: Vec<BTreeSet<NodeId>> = head.disjuncts().map(var_set).collect();
    let components: Vec<BTreeSet<NodeId>> = negate_dnf(head)?.disjuncts().map(var_set).collect();
    let vars: Vec<NodeId> = c1_targets.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if vars.len() > HITTING_SET_VARS {
        return Err(Error::DnfTooLarge {
            size: 1u128 << vars.len(),
            cap: 1u128 << HITTING_SET_VARS,
        });
    }
    let masks: Vec<u32> = components
        .iter()
        .map(|c| {
            vars.iter()
                .enumerate()
                .filter(|(_, v)| c.contains(*v))
                .fold(0u32, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let mut candidates: Vec<u32> = (0..1u32 << vars.len()).collect();
    candidates.sort_by_key(|m| (m.count_ones(), *m));
    let mut minimal: Vec<u32> = Vec::new();
    for m in candidates {
        if minimal.iter().any(|k| k & m == *k) {
            continue;
        }
        if masks.iter().all(|c| c & m != 0) {
            minimal.push(m);
        }
    }
    let mut c2_targets: Vec<BTreeSet<NodeId>> = minimal
        .into_iter()
        .map(|m| {
            vars.iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect();
    c2_targets.sort();
    Ok(HeadObligations {
        c1_targets,
        c2_targets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CellLabel {
    /// One of the two paths is blocked when the origin is false.
    Safe,
    /// Both paths stay open, so the end can be reached with either value.
    EscapeHazard,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellAudit {
    pub end: NodeId,
    pub sigma: Path,
    pub sigma_prime: Path,
    pub sigma_blocked_at: Option<NodeId>,
    pub sigma_prime_blocked_at: Option<NodeId>,
    pub label: CellLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionReport {
    pub origin: NodeId,
    pub cells: Vec<CellAudit>,
}

/// Audits every contradictory cell starting at `x0` under the hypothesis
/// `x0 = F`. Along a path the hypothesis demands a value at each node (flipped
/// by every negative arrow); the path is blocked at the first inner node that
/// cannot take its demanded value.
pub fn composition_audit(g: &RefGraph, x0: &NodeId) -> Result<CompositionReport> {
    composition_audit_capped(g, x0, DEFAULT_MAX_PATH_LEN)
}

pub fn composition_audit_capped(g: &RefGraph, x0: &NodeId, max_len: usize) -> Result<CompositionReport> {
    g.require(x0)?;
    let engine = ModelEngine::default();
    let mut feasible: BTreeMap<(NodeId, bool), bool> = BTreeMap::new();
    let mut blocked_at = |p: &Path| -> Result<Option<NodeId>> {
        let acc = p.accumulated();
        for (n, sign) in &acc[1..acc.len() - 1] {
            // x0 = F; a positive accumulated sign keeps F, a negative one asks for T
            let want = *sign == Sign::Negative;
            let key = (n.clone(), want);
            let ok = match feasible.get(&key) {
                Some(&b) => b,
                None => {
                    let pol = if want { Polarity::Pos } else { Polarity::Neg };
                    let b = !engine.models_of(g, n, pol)?.is_empty();
                    feasible.insert(key, b);
                    b
                }
            };
            if !ok {
                return Ok(Some(n.clone()));
            }
        }
        Ok(None)
    };
    let mut cells = Vec::new();
    for end in g.descendants(x0) {
        if &end == x0 {
            continue;
        }
        let paths = enumerate_paths(g, x0, &end, max_len)?;
        for (i, j) in contradictory_pairs(&paths) {
            let a = blocked_at(&paths[i])?;
            let b = blocked_at(&paths[j])?;
            let label = if a.is_some() || b.is_some() {
                CellLabel::Safe
            } else {
                CellLabel::EscapeHazard
            };
            cells.push(CellAudit {
                end: end.clone(),
                sigma: paths[i].clone(),
                sigma_prime: paths[j].clone(),
                sigma_blocked_at: a,
                sigma_prime_blocked_at: b,
                label,
            });
        }
    }
    Ok(CompositionReport {
        origin: x0.clone(),
        cells,
    })
}
