//! Models of a graph's equation system.
//!
//! A model assigns every node a value satisfying `x = φ_x`; sinks are free, so
//! on an acyclic graph models correspond one-to-one to assignments of the
//! sinks reachable from the node under analysis. That set of sink
//! assignments is the universe `U` below.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{NodeId, RefGraph};
use crate::logic::dnf::DEFAULT_DNF_CAP;
use crate::logic::formula::eval3_with;
use crate::logic::{Dnf, Formula, Literal, TruthValue3};

pub const DEFAULT_SINK_LIMIT: usize = 24;

pub type SinkAssignment = BTreeMap<NodeId, bool>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Pos,
    Neg,
}

/// A set of sink assignments stored as a bitmap indexed by the assignment
/// mask (bit `i` of the mask is the value of `sinks[i]`).
#[derive(Clone, PartialEq, Eq)]
pub struct ModelSet {
    sinks: Vec<NodeId>,
    bits: Vec<u64>,
}

impl ModelSet {
    fn empty(sinks: Vec<NodeId>) -> ModelSet {
        let words = (universe_size(sinks.len()) as usize).div_ceil(64);
        ModelSet {
            sinks,
            bits: vec![0; words],
        }
    }

    pub fn sinks(&self) -> &[NodeId] {
        &self.sinks
    }

    /// Number of assignments in the universe.
    pub fn universe_len(&self) -> u64 {
        universe_size(self.sinks.len())
    }

    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_universe(&self) -> bool {
        self.len() == self.universe_len()
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        mask < self.universe_len() && self.bits[(mask / 64) as usize] >> (mask % 64) & 1 == 1
    }

    pub fn contains(&self, a: &SinkAssignment) -> bool {
        let mut mask = 0u64;
        for (i, s) in self.sinks.iter().enumerate() {
            match a.get(s) {
                Some(true) => mask |= 1 << i,
                Some(false) => {}
                None => return false,
            }
        }
        a.len() == self.sinks.len() && self.contains_mask(mask)
    }

    fn insert_mask(&mut self, mask: u64) {
        self.bits[(mask / 64) as usize] |= 1 << (mask % 64);
    }

    /// Member masks in increasing order.
    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        let total = self.universe_len();
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            (0..64u64)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| w as u64 * 64 + b)
                .filter(move |&m| m < total)
        })
    }

    pub fn assignment(&self, mask: u64) -> SinkAssignment {
        self.sinks
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), mask >> i & 1 == 1))
            .collect()
    }

    pub fn assignments(&self) -> impl Iterator<Item = SinkAssignment> + '_ {
        self.masks().map(|m| self.assignment(m))
    }

    pub fn first(&self) -> Option<SinkAssignment> {
        self.masks().next().map(|m| self.assignment(m))
    }

    pub fn complement(&self) -> ModelSet {
        let mut out = ModelSet {
            sinks: self.sinks.clone(),
            bits: self.bits.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    pub fn is_disjoint(&self, other: &ModelSet) -> bool {
        self.sinks == other.sinks && self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &ModelSet) -> Option<ModelSet> {
        (self.sinks == other.sinks).then(|| ModelSet {
            sinks: self.sinks.clone(),
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect(),
        })
    }

    fn clear_tail(&mut self) {
        let total = self.universe_len();
        let rem = total % 64;
        if rem != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSet")
            .field("sinks", &self.sinks)
            .field("members", &self.assignments().collect::<Vec<_>>())
            .finish()
    }
}

impl Serialize for ModelSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ModelSet", 3)?;
        st.serialize_field("sinks", &self.sinks)?;
        st.serialize_field("count", &self.len())?;
        st.serialize_field("members", &self.assignments().collect::<Vec<_>>())?;
        st.end()
    }
}

fn universe_size(sinks: usize) -> u64 {
    1u64 << sinks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatusKind {
    /// `x` has no model.
    C1Holds,
    /// `¬x` has no model.
    C2Holds,
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeStatus {
    pub node: NodeId,
    pub kind: StatusKind,
    pub pos_witness: Option<SinkAssignment>,
    pub neg_witness: Option<SinkAssignment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EscapeStep {
    pub node: NodeId,
    pub value: bool,
    /// The literal that decides the value, when the node is not a sink.
    pub chosen: Option<Formula>,
}

/// A model of `¬x` with the chain of decisions that produces it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Escape {
    pub assignment: SinkAssignment,
    pub valuation: BTreeMap<NodeId, bool>,
    pub trace: Vec<EscapeStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryClass {
    Identity,
    Negation,
    /// `z ∧ ¬z`
    ConstFalse,
    /// `z ∨ ¬z`
    ConstTrue,
}

enum Op {
    Var(usize),
    NegVar(usize),
    And(Vec<Op>),
    Or(Vec<Op>),
    Const(bool),
}

impl Op {
    fn eval(&self, v: &[bool]) -> bool {
        match self {
            Op::Var(i) => v[*i],
            Op::NegVar(i) => !v[*i],
            Op::And(xs) => xs.iter().all(|x| x.eval(v)),
            Op::Or(xs) => xs.iter().any(|x| x.eval(v)),
            Op::Const(b) => *b,
        }
    }
}

/// Sub-graph below one node, compiled to index form: sinks occupy indices
/// `0..sinks.len()`, the rest follow in evaluation order.
struct Compiled {
    sinks: Vec<NodeId>,
    ids: Vec<NodeId>,
    ops: Vec<(usize, Op)>,
    target: usize,
}

impl Compiled {
    fn new(g: &RefGraph, node: &NodeId) -> Result<Compiled> {
        g.require(node)?;
        let below = g.descendants(node);
        let order: Vec<NodeId> = g
            .topo_order()?
            .into_iter()
            .filter(|n| below.contains(n))
            .collect();
        let mut sinks: Vec<NodeId> = order.iter().filter(|n| g.is_sink(n)).cloned().collect();
        sinks.sort();
        let mut ids = sinks.clone();
        ids.extend(order.iter().rev().filter(|n| !g.is_sink(n)).cloned());
        let index: BTreeMap<&NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let ops = ids[sinks.len()..]
            .iter()
            .map(|n| Ok((index[n], compile_op(g.formula(n).expect("non-sink has formula"), &index)?)))
            .collect::<Result<Vec<_>>>()?;
        let target = index[node];
        Ok(Compiled {
            sinks,
            ids,
            ops,
            target,
        })
    }

    fn run(&self, mask: u64, buf: &mut [bool]) {
        for (i, b) in buf.iter_mut().take(self.sinks.len()).enumerate() {
            *b = mask >> i & 1 == 1;
        }
        for (i, op) in &self.ops {
            buf[*i] = op.eval(buf);
        }
    }
}

fn compile_op(f: &Formula, index: &BTreeMap<&NodeId, usize>) -> Result<Op> {
    let look = |v: &NodeId| index.get(v).copied().ok_or_else(|| Error::UnknownNode(v.clone()));
    Ok(match f {
        Formula::Var(v) => Op::Var(look(v)?),
        Formula::NegVar(v) => Op::NegVar(look(v)?),
        Formula::And(xs) => Op::And(xs.iter().map(|x| compile_op(x, index)).collect::<Result<_>>()?),
        Formula::Or(xs) => Op::Or(xs.iter().map(|x| compile_op(x, index)).collect::<Result<_>>()?),
        Formula::True => Op::Const(true),
        Formula::False => Op::Const(false),
        Formula::Frontier { tag, .. } => return Err(Error::FrontierInClassical(tag.clone())),
    })
}

/// Enumeration settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelEngine {
    pub sink_limit: usize,
    pub parallel: bool,
}

impl Default for ModelEngine {
    fn default() -> Self {
        ModelEngine {
            sink_limit: DEFAULT_SINK_LIMIT,
            parallel: true,
        }
    }
}

impl ModelEngine {
    pub fn with_sink_limit(sink_limit: usize) -> Self {
        ModelEngine {
            sink_limit,
            ..Self::default()
        }
    }

    fn compile(&self, g: &RefGraph, node: &NodeId) -> Result<Compiled> {
        let c = Compiled::new(g, node)?;
        if c.sinks.len() > self.sink_limit.min(40) {
            return Err(Error::SinkLimit {
                count: c.sinks.len(),
                limit: self.sink_limit.min(40),
            });
        }
        Ok(c)
    }

    /// `M(x)`: the assignments under which `node` is true.
    fn truth_set(&self, c: &Compiled) -> ModelSet {
        let mut set = ModelSet::empty(c.sinks.clone());
        let total = set.universe_len();
        let n = c.ids.len();
        let fill = |(w, word): (usize, &mut u64)| {
            let mut buf = vec![false; n];
            for b in 0..64u64 {
                let m = w as u64 * 64 + b;
                if m >= total {
                    break;
                }
                c.run(m, &mut buf);
                if buf[c.target] {
                    *word |= 1 << b;
                }
            }
        };
        if self.parallel && set.bits.len() > 4 {
            set.bits.par_iter_mut().enumerate().for_each(fill);
        } else {
            set.bits.iter_mut().enumerate().for_each(fill);
        }
        set
    }

    pub fn models_of(&self, g: &RefGraph, node: &NodeId, polarity: Polarity) -> Result<ModelSet> {
        let c = self.compile(g, node)?;
        let pos = self.truth_set(&c);
        Ok(match polarity {
            Polarity::Pos => pos,
            Polarity::Neg => pos.complement(),
        })
    }

    pub fn check_status(&self, g: &RefGraph, node: &NodeId) -> Result<NodeStatus> {
        let c = self.compile(g, node)?;
        let pos = self.truth_set(&c);
        let neg = pos.complement();
        let kind = if pos.is_empty() {
            StatusKind::C1Holds
        } else if neg.is_empty() {
            StatusKind::C2Holds
        } else {
            StatusKind::Open
        };
        Ok(NodeStatus {
            node: node.clone(),
            kind,
            pos_witness: pos.first(),
            neg_witness: neg.first(),
        })
    }

    pub fn partition_check(&self, g: &RefGraph, node: &NodeId) -> Result<bool> {
        let pos = self.models_of(g, node, Polarity::Pos)?;
        let neg = self.models_of_direct(g, node, false)?;
        Ok(pos.is_disjoint(&neg) && pos.union(&neg).is_some_and(|u| u.is_universe()))
    }

    /// Collects the assignments under which `node` takes `value`, evaluating
    /// each one separately rather than complementing.
    fn models_of_direct(&self, g: &RefGraph, node: &NodeId, value: bool) -> Result<ModelSet> {
        let c = self.compile(g, node)?;
        let mut set = ModelSet::empty(c.sinks.clone());
        let mut buf = vec![false; c.ids.len()];
        for m in 0..set.universe_len() {
            c.run(m, &mut buf);
            if buf[c.target] == value {
                set.insert_mask(m);
            }
        }
        Ok(set)
    }

    pub fn escape_search(&self, g: &RefGraph, node: &NodeId) -> Result<Option<Escape>> {
        let c = self.compile(g, node)?;
        let neg = self.truth_set(&c).complement();
        let Some(mask) = neg.masks().next() else {
            return Ok(None);
        };
        let mut buf = vec![false; c.ids.len()];
        c.run(mask, &mut buf);
        let valuation: BTreeMap<NodeId, bool> = c.ids.iter().cloned().zip(buf.iter().copied()).collect();
        let mut trace = Vec::new();
        let mut at = node.clone();
        loop {
            let value = valuation[&at];
            let Some(f) = g.formula(&at) else {
                trace.push(EscapeStep {
                    node: at,
                    value,
                    chosen: None,
                });
                break;
            };
            let lit = deciding_literal(f, value, &valuation);
            let next = match &lit {
                Formula::Var(v) | Formula::NegVar(v) => Some(v.clone()),
                _ => None,
            };
            trace.push(EscapeStep {
                node: at,
                value,
                chosen: Some(lit),
            });
            match next {
                Some(v) => at = v,
                None => break,
            }
        }
        Ok(Some(Escape {
            assignment: neg.assignment(mask),
            valuation,
            trace,
        }))
    }
}

/// Descends to the literal that fixes `f`'s value: a false conjunction is
/// decided by its first false conjunct, a true disjunction by its first true
/// disjunct, anything else by its first operand.
fn deciding_literal(f: &Formula, value: bool, valuation: &BTreeMap<NodeId, bool>) -> Formula {
    let eval = |x: &Formula| crate::logic::formula::eval2_with(x, &|v: &NodeId| valuation.get(v).copied()).unwrap_or(false);
    match f {
        Formula::And(xs) | Formula::Or(xs) => {
            let pick = xs.iter().find(|x| eval(x) == value).unwrap_or(&xs[0]);
            deciding_literal(pick, value, valuation)
        }
        other => other.clone(),
    }
}

pub fn models_of(g: &RefGraph, node: &NodeId, polarity: Polarity) -> Result<ModelSet> {
    ModelEngine::default().models_of(g, node, polarity)
}

pub fn check_status(g: &RefGraph, node: &NodeId) -> Result<NodeStatus> {
    ModelEngine::default().check_status(g, node)
}

pub fn partition_check(g: &RefGraph, node: &NodeId) -> Result<bool> {
    ModelEngine::default().partition_check(g, node)
}

pub fn escape_search(g: &RefGraph, node: &NodeId) -> Result<Option<Escape>> {
    ModelEngine::default().escape_search(g, node)
}

/// Symbolic `M(x)`: substitutes formulas bottom-up and returns the prime
/// implicants over sink literals. `∅` is the empty Dnf, `U` the verum.
pub fn node_model_expression(g: &RefGraph, node: &NodeId) -> Result<Dnf> {
    let (pos, _) = node_model_pair(g, node)?;
    Ok(pos)
}

/// `(M(x), M(¬x))` as prime-implicant forms.
pub fn node_model_pair(g: &RefGraph, node: &NodeId) -> Result<(Dnf, Dnf)> {
    g.require(node)?;
    let below = g.descendants(node);
    let order = g.topo_order()?;
    let mut pos: BTreeMap<NodeId, Dnf> = BTreeMap::new();
    let mut neg: BTreeMap<NodeId, Dnf> = BTreeMap::new();
    for n in order.iter().rev().filter(|n| below.contains(*n)) {
        let (p, q) = match g.formula(n) {
            None => (
                Dnf::literal(Literal::pos(n.clone())),
                Dnf::literal(Literal::neg(n.clone())),
            ),
            Some(f) => (
                expand(f, true, &pos, &neg)?,
                expand(f, false, &pos, &neg)?,
            ),
        };
        pos.insert(n.clone(), p);
        neg.insert(n.clone(), q);
    }
    Ok((
        pos[node].prime_implicants(DEFAULT_DNF_CAP)?,
        neg[node].prime_implicants(DEFAULT_DNF_CAP)?,
    ))
}

/// Dnf of `f` (or of `¬f` when `truth` is false) with variables replaced by
/// their model expressions.
fn expand(f: &Formula, truth: bool, pos: &BTreeMap<NodeId, Dnf>, neg: &BTreeMap<NodeId, Dnf>) -> Result<Dnf> {
    let pick = |v: &NodeId, positive: bool| -> Result<Dnf> {
        let table = if positive { pos } else { neg };
        table.get(v).cloned().ok_or_else(|| Error::UnknownNode(v.clone()))
    };
    let d = match f {
        Formula::Var(v) => pick(v, truth)?,
        Formula::NegVar(v) => pick(v, !truth)?,
        Formula::True => if truth { Dnf::verum() } else { Dnf::falsum() },
        Formula::False => if truth { Dnf::falsum() } else { Dnf::verum() },
        Formula::Frontier { tag, .. } => return Err(Error::FrontierInClassical(tag.clone())),
        Formula::And(xs) | Formula::Or(xs) => {
            // a conjunction is a product when true, a union when false
            let product = matches!(f, Formula::And(_)) == truth;
            let mut acc = if product { Dnf::verum() } else { Dnf::falsum() };
            for x in xs {
                let d = expand(x, truth, pos, neg)?;
                acc = if product {
                    crate::logic::simplify_dnf(&acc.and(&d, DEFAULT_DNF_CAP)?)
                } else {
                    acc.or(&d)
                };
            }
            acc
        }
    };
    Ok(crate::logic::simplify_dnf(&d))
}

/// Bottom-up three-valued propagation from the given sink values.
pub fn eval3_graph(
    g: &RefGraph,
    sink_values: &BTreeMap<NodeId, TruthValue3>,
) -> Result<BTreeMap<NodeId, TruthValue3>> {
    for k in sink_values.keys() {
        g.require(k)?;
        if !g.is_sink(k) {
            return Err(Error::NotASink(k.clone()));
        }
    }
    let mut values: BTreeMap<NodeId, TruthValue3> = BTreeMap::new();
    let frontier = BTreeMap::new();
    for n in g.topo_order()?.into_iter().rev() {
        let v = match g.formula(&n) {
            None => *sink_values
                .get(&n)
                .ok_or_else(|| Error::Unassigned(n.to_string()))?,
            Some(f) => eval3_with(f, &|x: &NodeId| values.get(x).copied(), &frontier)?,
        };
        values.insert(n, v);
    }
    Ok(values)
}

/// Reads `in_node` as a unary function of the single sink below it.
pub fn two_terminal_classify(g: &RefGraph, in_node: &NodeId, out_sink: &NodeId) -> Result<UnaryClass> {
    g.require(in_node)?;
    g.require(out_sink)?;
    let sinks = g.reachable_sinks(in_node);
    if sinks.len() != 1 {
        return Err(Error::NotSingleSink(sinks.len()));
    }
    if &sinks[0] != out_sink {
        return Err(Error::NotASink(out_sink.clone()));
    }
    let c = Compiled::new(g, in_node)?;
    let mut buf = vec![false; c.ids.len()];
    c.run(0, &mut buf);
    let at_false = buf[c.target];
    c.run(1, &mut buf);
    let at_true = buf[c.target];
    Ok(match (at_false, at_true) {
        (false, true) => UnaryClass::Identity,
        (true, false) => UnaryClass::Negation,
        (false, false) => UnaryClass::ConstFalse,
        (true, true) => UnaryClass::ConstTrue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Arrow;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn triangle() -> RefGraph {
        RefGraph::from_signed_arrows([Arrow::neg("x", "y"), Arrow::neg("y", "z"), Arrow::neg("x", "z")]).unwrap()
    }

    #[test]
    fn triangle_models() {
        let g = triangle();
        assert!(models_of(&g, &id("x"), Polarity::Pos).unwrap().is_empty());
        let neg = models_of(&g, &id("x"), Polarity::Neg).unwrap();
        assert!(neg.is_universe());
        assert_eq!(neg.len(), 2);
        assert_eq!(check_status(&g, &id("x")).unwrap().kind, StatusKind::C1Holds);
        assert!(partition_check(&g, &id("x")).unwrap());
    }

    #[test]
    fn chain_is_open() {
        let g = RefGraph::from_signed_arrows([Arrow::neg("x0", "x1")]).unwrap();
        let st = check_status(&g, &id("x0")).unwrap();
        assert_eq!(st.kind, StatusKind::Open);
        assert_eq!(st.pos_witness, Some([(id("x1"), false)].into()));
    }

    #[test]
    fn sink_limit_is_enforced() {
        let arrows: Vec<Arrow> = (0..5).map(|i| Arrow::neg("r", format!("s{i}").as_str())).collect();
        let g = RefGraph::from_signed_arrows(arrows).unwrap();
        let e = ModelEngine::with_sink_limit(4);
        assert_eq!(
            e.models_of(&g, &id("r"), Polarity::Pos),
            Err(Error::SinkLimit { count: 5, limit: 4 })
        );
        assert_eq!(ModelEngine::default().models_of(&g, &id("r"), Polarity::Pos).unwrap().len(), 1);
    }

    #[test]
    fn expression_of_triangle_is_empty() {
        let g = triangle();
        assert_eq!(node_model_expression(&g, &id("x")).unwrap(), Dnf::falsum());
        assert_eq!(node_model_expression(&g, &id("y")).unwrap(), Dnf::literal(Literal::neg("z")));
        let (_, neg) = node_model_pair(&g, &id("x")).unwrap();
        assert!(neg.is_verum());
    }

    #[test]
    fn escape_in_trivial_contradiction() {
        let g = RefGraph::from_formulas([(
            id("x"),
            Formula::And(vec![Formula::var("y"), Formula::neg("y")]),
        )])
        .unwrap();
        let e = escape_search(&g, &id("x")).unwrap().unwrap();
        assert!(!e.valuation[&id("x")]);
        assert_eq!(e.trace.len(), 2);
        assert_eq!(e.trace[1].node, id("y"));
    }

    #[test]
    fn eval3_preserves_xi() {
        let g = RefGraph::from_formulas([(id("x'"), Formula::tautology_on("x"))]).unwrap();
        let v = eval3_graph(&g, &[(id("x"), TruthValue3::Xi)].into()).unwrap();
        assert_eq!(v[&id("x'")], TruthValue3::Xi);
        assert!(matches!(
            eval3_graph(&g, &BTreeMap::new()),
            Err(Error::Unassigned(_))
        ));
    }

    #[test]
    fn unary_classes() {
        let neg = RefGraph::from_signed_arrows([Arrow::neg("y", "z")]).unwrap();
        assert_eq!(two_terminal_classify(&neg, &id("y"), &id("z")).unwrap(), UnaryClass::Negation);
        let taut = RefGraph::from_formulas([(id("y"), Formula::tautology_on("z"))]).unwrap();
        assert_eq!(two_terminal_classify(&taut, &id("y"), &id("z")).unwrap(), UnaryClass::ConstTrue);
        let two = RefGraph::from_signed_arrows([Arrow::neg("y", "z"), Arrow::pos("y", "w")]).unwrap();
        assert_eq!(two_terminal_classify(&two, &id("y"), &id("z")), Err(Error::NotSingleSink(2)));
    }
}
