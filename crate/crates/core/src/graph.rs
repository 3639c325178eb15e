//! Reference graphs: acyclic digraphs with signed arrows whose non-sink
//! nodes carry a formula over their successors.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::logic::Formula;

/// Default cap on path length during enumeration.
pub const DEFAULT_MAX_PATH_LEN: usize = 32;

/// Node identifier. Ordered naturally, so `x2 < x10`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::EmptyNodeId);
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<&NodeId> for NodeId {
    fn from(s: &NodeId) -> Self {
        s.clone()
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Digit runs compare by numeric value; ties fall back to plain byte order
/// so the order stays total and consistent with `Eq`.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (x, y) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        if x[i].is_ascii_digit() && y[j].is_ascii_digit() {
            let (si, sj) = (i, j);
            while i < x.len() && x[i].is_ascii_digit() {
                i += 1;
            }
            while j < y.len() && y[j].is_ascii_digit() {
                j += 1;
            }
            let nx = trim_zeros(&x[si..i]);
            let ny = trim_zeros(&y[sj..j]);
            let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = x[i].cmp(&y[j]);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    (x.len() - i)
        .cmp(&(y.len() - j))
        .then_with(|| a.cmp(b))
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().position(|&c| c != b'0').unwrap_or(d.len());
    &d[k..]
}

/// Arrow polarity; a negative arrow `x ↛ y` means `y` occurs negated in `x`'s formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" | "pos" | "positive" => Some(Sign::Positive),
            "-" | "neg" | "negative" => Some(Sign::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Sign::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad sign `{s}`")))
    }
}

/// Value of a concatenation: positive iff both parts agree.
pub fn compose_value(s1: Sign, s2: Sign) -> Sign {
    if s1 == s2 {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub from: NodeId,
    pub to: NodeId,
    pub sign: Sign,
}

impl Arrow {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>, sign: Sign) -> Self {
        Arrow {
            from: from.into(),
            to: to.into(),
            sign,
        }
    }

    pub fn neg(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Self {
        Self::new(from, to, Sign::Negative)
    }

    pub fn pos(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Self {
        Self::new(from, to, Sign::Positive)
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = if self.sign == Sign::Negative { "↛" } else { "→" };
        write!(f, "{}{a}{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefGraph {
    nodes: BTreeSet<NodeId>,
    succ: BTreeMap<NodeId, BTreeMap<NodeId, Sign>>,
    formulas: BTreeMap<NodeId, Formula>,
}

impl RefGraph {
    /// Validates acyclicity and formula/arrow consistency.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        arrows: impl IntoIterator<Item = Arrow>,
        formulas: impl IntoIterator<Item = (NodeId, Formula)>,
    ) -> Result<Self> {
        let mut g = RefGraph {
            nodes: BTreeSet::new(),
            succ: BTreeMap::new(),
            formulas: BTreeMap::new(),
        };
        for n in nodes {
            if n.as_str().is_empty() {
                return Err(Error::EmptyNodeId);
            }
            if !g.nodes.insert(n.clone()) {
                return Err(Error::DuplicateNode(n));
            }
        }
        for a in arrows {
            for end in [&a.from, &a.to] {
                if !g.nodes.contains(end) {
                    return Err(Error::UnknownNode(end.clone()));
                }
            }
            if a.from == a.to {
                return Err(Error::SelfLoop(a.from));
            }
            let out = g.succ.entry(a.from.clone()).or_default();
            if out.insert(a.to.clone(), a.sign).is_some() {
                return Err(Error::DuplicateArrow(a.from, a.to));
            }
        }
        for (n, f) in formulas {
            if !g.nodes.contains(&n) {
                return Err(Error::UnknownNode(n));
            }
            g.formulas.insert(n, f);
        }
        g.validate()?;
        Ok(g)
    }

    /// Builds a graph from node definitions. Nodes mentioned but not
    /// defined become sinks. Arrow signs follow the literal polarity; a
    /// variable used with both polarities gets a positive arrow.
    pub fn from_formulas(defs: impl IntoIterator<Item = (NodeId, Formula)>) -> Result<Self> {
        let defs: Vec<(NodeId, Formula)> = defs.into_iter().collect();
        let mut nodes = BTreeSet::new();
        let mut arrows = Vec::new();
        for (n, f) in &defs {
            nodes.insert(n.clone());
            for (v, signs) in f.polarities() {
                nodes.insert(v.clone());
                let sign = if signs.len() == 1 {
                    *signs.iter().next().unwrap()
                } else {
                    Sign::Positive
                };
                arrows.push(Arrow::new(n.clone(), v, sign));
            }
        }
        RefGraph::new(nodes, arrows, defs)
    }

    /// Every non-sink gets the conjunction of literals its arrows describe.
    pub fn from_signed_arrows(arrows: impl IntoIterator<Item = Arrow>) -> Result<Self> {
        let arrows: Vec<Arrow> = arrows.into_iter().collect();
        let mut nodes = BTreeSet::new();
        let mut lits: BTreeMap<NodeId, Vec<(NodeId, Sign)>> = BTreeMap::new();
        for a in &arrows {
            nodes.insert(a.from.clone());
            nodes.insert(a.to.clone());
            lits.entry(a.from.clone())
                .or_default()
                .push((a.to.clone(), a.sign));
        }
        let formulas = lits.into_iter().map(|(n, mut ls)| {
            ls.sort();
            let f = Formula::conj(ls.into_iter().map(|(v, s)| Formula::literal(v, s)).collect());
            (n, f)
        });
        RefGraph::new(nodes, arrows, formulas.collect::<Vec<_>>())
    }

    fn validate(&self) -> Result<()> {
        self.topo_order()?;
        for n in &self.nodes {
            let succ = self.succ.get(n);
            let has_succ = succ.is_some_and(|s| !s.is_empty());
            match (self.formulas.get(n), has_succ) {
                (None, true) => return Err(Error::MissingFormula(n.clone())),
                (Some(_), false) => return Err(Error::SinkWithFormula(n.clone())),
                (None, false) => {}
                (Some(f), true) => {
                    f.validate()?;
                    if f.has_frontier() {
                        return Err(Error::FrontierInGraph(n.clone()));
                    }
                    let succ = succ.unwrap();
                    let pols = f.polarities();
                    for (v, signs) in &pols {
                        let Some(&arrow) = succ.get(v) else {
                            return Err(Error::NotASuccessor {
                                node: n.clone(),
                                var: v.clone(),
                            });
                        };
                        if signs.len() == 1 {
                            let literal = *signs.iter().next().unwrap();
                            if literal != arrow {
                                return Err(Error::SignMismatch {
                                    node: n.clone(),
                                    succ: v.clone(),
                                    arrow,
                                    literal,
                                });
                            }
                        }
                    }
                    if let Some(s) = succ.keys().find(|s| !pols.contains_key(*s)) {
                        return Err(Error::UnmentionedSuccessor {
                            node: n.clone(),
                            succ: s.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Returns a copy where `node` carries `formula`; arrows out of `node`
    /// are re-derived from the formula, and missing nodes are added as sinks.
    pub fn define(&self, node: impl Into<NodeId>, formula: Formula) -> Result<RefGraph> {
        let node = node.into();
        let mut nodes = self.nodes.clone();
        nodes.insert(node.clone());
        let mut arrows: Vec<Arrow> = self.arrows().filter(|a| a.from != node).collect();
        for (v, signs) in formula.polarities() {
            nodes.insert(v.clone());
            let sign = if signs.len() == 1 {
                *signs.iter().next().unwrap()
            } else {
                self.sign(&node, &v).unwrap_or(Sign::Positive)
            };
            arrows.push(Arrow::new(node.clone(), v, sign));
        }
        let mut formulas = self.formulas.clone();
        formulas.insert(node, formula);
        RefGraph::new(nodes, arrows, formulas)
    }

    /// Adds an isolated sink.
    pub fn with_sink(&self, node: impl Into<NodeId>) -> Result<RefGraph> {
        let node = node.into();
        if self.contains(&node) {
            return Err(Error::DuplicateNode(node));
        }
        let mut g = self.clone();
        g.nodes.insert(node);
        Ok(g)
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.nodes.contains(n)
    }

    pub fn require(&self, n: &NodeId) -> Result<()> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(Error::UnknownNode(n.clone()))
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        self.succ.iter().flat_map(|(from, out)| {
            out.iter()
                .map(move |(to, &sign)| Arrow::new(from.clone(), to.clone(), sign))
        })
    }

    pub fn arrow_count(&self) -> usize {
        self.succ.values().map(BTreeMap::len).sum()
    }

    pub fn formula(&self, n: &NodeId) -> Option<&Formula> {
        self.formulas.get(n)
    }

    pub fn formulas(&self) -> impl Iterator<Item = (&NodeId, &Formula)> {
        self.formulas.iter()
    }

    pub fn sign(&self, from: &NodeId, to: &NodeId) -> Option<Sign> {
        self.succ.get(from).and_then(|s| s.get(to)).copied()
    }

    /// Successors in natural order.
    pub fn successors<'a>(&'a self, n: &NodeId) -> impl Iterator<Item = (&'a NodeId, Sign)> + 'a {
        self.succ
            .get(n)
            .into_iter()
            .flat_map(|s| s.iter().map(|(k, &v)| (k, v)))
    }

    pub fn is_sink(&self, n: &NodeId) -> bool {
        self.succ.get(n).is_none_or(|s| s.is_empty())
    }

    pub fn sinks(&self) -> Vec<NodeId> {
        self.nodes.iter().filter(|n| self.is_sink(n)).cloned().collect()
    }

    /// `n` together with everything reachable from it.
    pub fn descendants(&self, n: &NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![n.clone()];
        while let Some(v) = stack.pop() {
            if seen.insert(v.clone()) {
                stack.extend(self.successors(&v).map(|(s, _)| s.clone()));
            }
        }
        seen
    }

    pub fn reachable_sinks(&self, n: &NodeId) -> Vec<NodeId> {
        self.descendants(n)
            .into_iter()
            .filter(|v| self.is_sink(v))
            .collect()
    }

    /// Sub-graph on the nodes reachable from `n`.
    pub fn restrict_to_descendants(&self, n: &NodeId) -> Result<RefGraph> {
        self.require(n)?;
        let keep = self.descendants(n);
        let arrows: Vec<Arrow> = self
            .arrows()
            .filter(|a| keep.contains(&a.from))
            .collect();
        let formulas: Vec<(NodeId, Formula)> = self
            .formulas
            .iter()
            .filter(|(k, _)| keep.contains(*k))
            .map(|(k, f)| (k.clone(), f.clone()))
            .collect();
        RefGraph::new(keep, arrows, formulas)
    }

    /// Kahn's algorithm with the ready set kept in natural order: every node
    /// precedes its successors.
    pub fn topo_order(&self) -> Result<Vec<NodeId>> {
        topo_sort(&self.nodes, |n| {
            self.successors(n).map(|(s, _)| s.clone()).collect()
        })
    }

    pub fn to_bare(&self) -> BareDag {
        BareDag {
            nodes: self.nodes.clone(),
            succ: self
                .succ
                .iter()
                .map(|(k, v)| (k.clone(), v.keys().cloned().collect()))
                .collect(),
        }
    }
}

pub(crate) fn topo_sort(
    nodes: &BTreeSet<NodeId>,
    succ: impl Fn(&NodeId) -> Vec<NodeId>,
) -> Result<Vec<NodeId>> {
    let mut indeg: BTreeMap<&NodeId, usize> = nodes.iter().map(|n| (n, 0)).collect();
    let mut out_lists: BTreeMap<&NodeId, Vec<NodeId>> = BTreeMap::new();
    for n in nodes {
        let s = succ(n);
        for t in &s {
            if let Some(d) = indeg.get_mut(t) {
                *d += 1;
            }
        }
        out_lists.insert(n, s);
    }
    let mut ready: BTreeSet<&NodeId> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(n, _)| *n)
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(n) = ready.pop_first() {
        order.push(n.clone());
        for t in &out_lists[n] {
            if let Some((key, d)) = indeg.get_key_value(t).map(|(k, d)| (*k, *d)) {
                indeg.insert(key, d - 1);
                if d == 1 {
                    ready.insert(key);
                }
            }
        }
    }
    if order.len() != nodes.len() {
        let stuck = indeg
            .iter()
            .find(|(_, &d)| d > 0)
            .map(|(n, _)| (*n).clone())
            .expect("leftover node");
        return Err(Error::Cycle(stuck));
    }
    Ok(order)
}

/// A graph with unsigned arrows, the target of an embedding search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BareDag {
    nodes: BTreeSet<NodeId>,
    succ: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl BareDag {
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        arrows: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut g = BareDag {
            nodes: BTreeSet::new(),
            succ: BTreeMap::new(),
        };
        for n in nodes {
            if n.as_str().is_empty() {
                return Err(Error::EmptyNodeId);
            }
            if !g.nodes.insert(n.clone()) {
                return Err(Error::DuplicateNode(n));
            }
        }
        for (a, b) in arrows {
            for end in [&a, &b] {
                if !g.nodes.contains(end) {
                    return Err(Error::UnknownNode(end.clone()));
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !g.succ.entry(a.clone()).or_default().insert(b.clone()) {
                return Err(Error::DuplicateArrow(a, b));
            }
        }
        g.topo_order()?;
        Ok(g)
    }

    /// Nodes `0..=len` joined by consecutive arrows, named `{prefix}{i}`.
    pub fn chain(prefix: &str, len: usize) -> BareDag {
        let nodes: Vec<NodeId> = (0..=len).map(|i| NodeId(format!("{prefix}{i}"))).collect();
        let arrows = nodes.windows(2).map(|w| (w[0].clone(), w[1].clone()));
        BareDag::new(nodes.clone(), arrows.collect::<Vec<_>>()).expect("chain is acyclic")
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.nodes.contains(n)
    }

    pub fn arrows(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> {
        self.succ
            .iter()
            .flat_map(|(a, out)| out.iter().map(move |b| (a, b)))
    }

    pub fn arrow_count(&self) -> usize {
        self.succ.values().map(BTreeSet::len).sum()
    }

    pub fn has_arrow(&self, a: &NodeId, b: &NodeId) -> bool {
        self.succ.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn successors<'a>(&'a self, n: &NodeId) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.succ.get(n).into_iter().flatten()
    }

    pub fn is_sink(&self, n: &NodeId) -> bool {
        self.succ.get(n).is_none_or(|s| s.is_empty())
    }

    pub fn topo_order(&self) -> Result<Vec<NodeId>> {
        topo_sort(&self.nodes, |n| self.successors(n).cloned().collect())
    }

    /// Copy without the given arrow.
    pub fn without_arrow(&self, a: &NodeId, b: &NodeId) -> Result<BareDag> {
        if !self.has_arrow(a, b) {
            return Err(Error::NoSuchArrow(a.clone(), b.clone()));
        }
        let mut g = self.clone();
        g.succ.get_mut(a).unwrap().remove(b);
        Ok(g)
    }

    /// Reachability matrix keyed by node pairs (irreflexive).
    pub fn reachability(&self) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let order = self.topo_order().expect("validated acyclic");
        let mut reach: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for n in order.iter().rev() {
            let mut r = BTreeSet::new();
            for s in self.successors(n) {
                r.insert(s.clone());
                r.extend(reach[s].iter().cloned());
            }
            reach.insert(n.clone(), r);
        }
        reach
    }
}

/// Simple paths (as node sequences) from `from` to `to` of at most
/// `max_len` arrows, in lexicographic order of the node sequence. The flag
/// reports whether the length cap cut off any branch.
pub(crate) fn simple_paths<'a, I>(
    succ: impl Fn(&NodeId) -> I,
    from: &NodeId,
    to: &NodeId,
    max_len: usize,
) -> (Vec<Vec<NodeId>>, bool)
where
    I: Iterator<Item = &'a NodeId>,
{
    fn go<'a, I: Iterator<Item = &'a NodeId>>(
        succ: &impl Fn(&NodeId) -> I,
        to: &NodeId,
        max_len: usize,
        stack: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
        truncated: &mut bool,
    ) {
        let last = stack.last().unwrap().clone();
        if &last == to && stack.len() > 1 {
            out.push(stack.clone());
            return;
        }
        let mut next: Vec<&NodeId> = succ(&last).collect();
        next.sort();
        for s in next {
            if stack.len() > max_len {
                *truncated = true;
                return;
            }
            if stack.contains(s) {
                continue;
            }
            stack.push(s.clone());
            go(succ, to, max_len, stack, out, truncated);
            stack.pop();
        }
    }
    let mut out = Vec::new();
    let mut truncated = false;
    if from == to {
        return (out, truncated);
    }
    let mut stack = vec![from.clone()];
    go(&succ, to, max_len, &mut stack, &mut out, &mut truncated);
    (out, truncated)
}

/// A nonempty chain of arrows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path {
    arrows: Vec<Arrow>,
}

impl Path {
    pub fn new(arrows: Vec<Arrow>) -> Result<Path> {
        if arrows.is_empty() {
            return Err(Error::Document("a path needs at least one arrow".into()));
        }
        for w in arrows.windows(2) {
            if w[0].to != w[1].from {
                return Err(Error::Document(format!(
                    "arrows {} and {} do not chain",
                    w[0], w[1]
                )));
            }
        }
        Ok(Path { arrows })
    }

    /// Reads the arrows along `nodes` off `g`.
    pub fn along(g: &RefGraph, nodes: &[NodeId]) -> Result<Path> {
        let arrows = nodes
            .windows(2)
            .map(|w| {
                g.sign(&w[0], &w[1])
                    .map(|s| Arrow::new(w[0].clone(), w[1].clone(), s))
                    .ok_or_else(|| Error::NoSuchArrow(w[0].clone(), w[1].clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Path::new(arrows)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> &NodeId {
        &self.arrows[0].from
    }

    pub fn end(&self) -> &NodeId {
        &self.arrows[self.arrows.len() - 1].to
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        std::iter::once(self.start().clone())
            .chain(self.arrows.iter().map(|a| a.to.clone()))
            .collect()
    }

    /// Accumulated sign at every node, starting positive at the origin.
    pub fn accumulated(&self) -> Vec<(NodeId, Sign)> {
        let mut acc = Sign::Positive;
        let mut out = vec![(self.start().clone(), acc)];
        for a in &self.arrows {
            acc = compose_value(acc, a.sign);
            out.push((a.to.clone(), acc));
        }
        out
    }

    pub fn value(&self) -> Sign {
        path_value(self)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start())?;
        for a in &self.arrows {
            let arrow = if a.sign == Sign::Negative { "↛" } else { "→" };
            write!(f, "{arrow}{}", a.to)?;
        }
        Ok(())
    }
}

/// Positive iff the path carries an even number of negative arrows.
pub fn path_value(p: &Path) -> Sign {
    p.arrows
        .iter()
        .fold(Sign::Positive, |acc, a| compose_value(acc, a.sign))
}

pub fn enumerate_paths(g: &RefGraph, from: &NodeId, to: &NodeId, max_len: usize) -> Result<Vec<Path>> {
    g.require(from)?;
    g.require(to)?;
    let (seqs, _) = simple_paths(|n| g.successors(n).map(|(s, _)| s), from, to, max_len);
    seqs.iter().map(|s| Path::along(g, s)).collect()
}

/// Two paths with common endpoints and different values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub sigma: Path,
    pub sigma_prime: Path,
}

pub fn find_contradictory_cells(g: &RefGraph, from: &NodeId, to: &NodeId) -> Result<Vec<Cell>> {
    find_contradictory_cells_capped(g, from, to, DEFAULT_MAX_PATH_LEN)
}

pub fn find_contradictory_cells_capped(
    g: &RefGraph,
    from: &NodeId,
    to: &NodeId,
    max_len: usize,
) -> Result<Vec<Cell>> {
    let paths = enumerate_paths(g, from, to, max_len)?;
    Ok(contradictory_pairs(&paths)
        .into_iter()
        .map(|(i, j)| Cell {
            sigma: paths[i].clone(),
            sigma_prime: paths[j].clone(),
        })
        .collect())
}

/// Index pairs `i < j` with differing path values.
pub fn contradictory_pairs(paths: &[Path]) -> Vec<(usize, usize)> {
    let values: Vec<Sign> = paths.iter().map(path_value).collect();
    let mut out = Vec::new();
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            if values[i] != values[j] {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopReport {
    /// Pairs `i < j` of paths meeting somewhere with opposite accumulated sign.
    pub contradicts: Vec<(usize, usize)>,
    pub odd_cycle_witness: Option<Vec<usize>>,
}

/// Searches the "contradicts" relation over `paths` for a cycle of odd length.
pub fn contradiction_loop_check(paths: &[Path]) -> LoopReport {
    let acc: Vec<BTreeMap<NodeId, Sign>> = paths
        .iter()
        .map(|p| p.accumulated().into_iter().collect())
        .collect();
    let mut contradicts = Vec::new();
    let mut adj = vec![Vec::new(); paths.len()];
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            let clash = acc[i]
                .iter()
                .any(|(n, s)| acc[j].get(n).is_some_and(|t| t != s));
            if clash {
                contradicts.push((i, j));
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    LoopReport {
        odd_cycle_witness: odd_cycle(&adj),
        contradicts,
    }
}

/// BFS two-colouring; a monochromatic edge closes an odd cycle through the
/// BFS tree.
fn odd_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![0usize; n];
    for root in 0..n {
        if colour[root].is_some() {
            continue;
        }
        colour[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(!colour[u].unwrap());
                        parent[v] = Some(u);
                        depth[v] = depth[u] + 1;
                        queue.push_back(v);
                    }
                    Some(c) if c == colour[u].unwrap() => {
                        let (mut a, mut b) = (u, v);
                        let mut left = vec![a];
                        let mut right = vec![b];
                        while depth[a] > depth[b] {
                            a = parent[a].unwrap();
                            left.push(a);
                        }
                        while depth[b] > depth[a] {
                            b = parent[b].unwrap();
                            right.push(b);
                        }
                        while a != b {
                            a = parent[a].unwrap();
                            b = parent[b].unwrap();
                            left.push(a);
                            right.push(b);
                        }
                        right.pop();
                        right.reverse();
                        left.extend(right);
                        return Some(left);
                    }
                    Some(_) => {}
                }
            }
        }
    }
    None
}
