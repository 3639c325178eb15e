//! Graph documents: a JSON format and a compact line-oriented DSL.
//!
//! DSL statements are separated by newlines or `;`, `#` starts a comment:
//!
//! ```text
//! x0 = !x1 & !x2      # formula over successors
//! x1 -! x2            # negative arrow; `->` positive, `--` unsigned
//! w                   # lone node
//! ```
//!
//! Formulas use `!`, `&`, `|`, parentheses, `true`, `false` and `?tag` for
//! frontier leaves (`¬`, `∧`, `∨` are accepted too). A document whose
//! statements are all unsigned arrows describes a bare graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Arrow, BareDag, NodeId, RefGraph, Sign};
use crate::logic::Formula;

pub const DOCUMENT_VERSION: &str = "refgraph/1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedGraph {
    Ref(RefGraph),
    Bare(BareDag),
}

impl ParsedGraph {
    pub fn into_ref(self) -> Result<RefGraph> {
        match self {
            ParsedGraph::Ref(g) => Ok(g),
            ParsedGraph::Bare(_) => Err(Error::Document(
                "expected formulas or signed arrows, found a bare graph".into(),
            )),
        }
    }

    /// A reference graph is read as a bare one by forgetting signs.
    pub fn into_bare(self) -> BareDag {
        match self {
            ParsedGraph::Ref(g) => g.to_bare(),
            ParsedGraph::Bare(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowEntry {
    pub from: NodeId,
    pub to: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub version: String,
    pub nodes: Vec<NodeEntry>,
    #[serde(default)]
    pub arrows: Vec<ArrowEntry>,
}

impl GraphDocument {
    pub fn from_ref(g: &RefGraph) -> GraphDocument {
        GraphDocument {
            version: DOCUMENT_VERSION.into(),
            nodes: g
                .nodes()
                .map(|n| NodeEntry {
                    id: n.clone(),
                    formula: g.formula(n).map(Formula::to_dsl),
                })
                .collect(),
            arrows: g
                .arrows()
                .map(|a| ArrowEntry {
                    from: a.from,
                    to: a.to,
                    sign: Some(a.sign),
                })
                .collect(),
        }
    }

    pub fn from_bare(g: &BareDag) -> GraphDocument {
        GraphDocument {
            version: DOCUMENT_VERSION.into(),
            nodes: g
                .nodes()
                .map(|n| NodeEntry {
                    id: n.clone(),
                    formula: None,
                })
                .collect(),
            arrows: g
                .arrows()
                .map(|(a, b)| ArrowEntry {
                    from: a.clone(),
                    to: b.clone(),
                    sign: None,
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<ParsedGraph> {
        if self.version != DOCUMENT_VERSION {
            return Err(Error::Document(format!(
                "unsupported version `{}` (expected `{DOCUMENT_VERSION}`)",
                self.version
            )));
        }
        let mut formulas = Vec::new();
        for n in &self.nodes {
            if let Some(text) = &n.formula {
                let f = parse_formula(text).map_err(|e| match e {
                    Error::Parse { column, message, .. } => Error::Document(format!(
                        "formula of `{}`, column {column}: {message}",
                        n.id
                    )),
                    other => other,
                })?;
                formulas.push((n.id.clone(), f));
            }
        }
        let nodes = self.nodes.iter().map(|n| n.id.clone());
        let unsigned = self.arrows.iter().filter(|a| a.sign.is_none()).count();
        if unsigned > 0 {
            if unsigned != self.arrows.len() || !formulas.is_empty() {
                return Err(Error::Document(
                    "unsigned arrows are only allowed in a bare graph without formulas".into(),
                ));
            }
            let arrows = self.arrows.iter().map(|a| (a.from.clone(), a.to.clone()));
            return Ok(ParsedGraph::Bare(BareDag::new(nodes, arrows.collect::<Vec<_>>())?));
        }
        let mut arrows: Vec<Arrow> = self
            .arrows
            .iter()
            .map(|a| Arrow::new(a.from.clone(), a.to.clone(), a.sign.unwrap()))
            .collect();
        add_derived_arrows(&mut arrows, &formulas);
        if formulas.is_empty() && !arrows.is_empty() {
            let lone: BTreeSet<NodeId> = nodes.collect();
            let g = RefGraph::from_signed_arrows(arrows)?;
            return with_lone_nodes(g, lone).map(ParsedGraph::Ref);
        }
        Ok(ParsedGraph::Ref(RefGraph::new(nodes, arrows, formulas)?))
    }
}

/// Nodes with a formula but no listed arrow get arrows from their literals.
fn add_derived_arrows(arrows: &mut Vec<Arrow>, formulas: &[(NodeId, Formula)]) {
    let listed: BTreeSet<NodeId> = arrows.iter().map(|a| a.from.clone()).collect();
    for (n, f) in formulas {
        if listed.contains(n) {
            continue;
        }
        for (v, signs) in f.polarities() {
            let sign = if signs.len() == 1 {
                *signs.iter().next().unwrap()
            } else {
                Sign::Positive
            };
            arrows.push(Arrow::new(n.clone(), v, sign));
        }
    }
}

fn with_lone_nodes(mut g: RefGraph, nodes: BTreeSet<NodeId>) -> Result<RefGraph> {
    for n in nodes {
        if !g.contains(&n) {
            g = g.with_sink(n)?;
        }
    }
    Ok(g)
}

/// Canonical JSON: nodes and arrows in node order, two-space indentation,
/// trailing newline.
pub fn to_json(g: &RefGraph) -> String {
    document_json(&GraphDocument::from_ref(g))
}

pub fn bare_to_json(g: &BareDag) -> String {
    document_json(&GraphDocument::from_bare(g))
}

fn document_json(d: &GraphDocument) -> String {
    let mut s = serde_json::to_string_pretty(d).expect("documents serialize");
    s.push('\n');
    s
}

/// Reads JSON (text starting with `{`) or the DSL.
pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    if text.trim_start().starts_with('{') {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.to_graph()
    } else {
        parse_dsl(text)
    }
}

/// Canonical DSL rendering of a reference graph.
pub fn to_dsl(g: &RefGraph) -> String {
    let mut out = String::new();
    let mentioned: BTreeSet<NodeId> = g.arrows().flat_map(|a| [a.from, a.to]).collect();
    for n in g.nodes() {
        match g.formula(n) {
            Some(f) => {
                out.push_str(&format!("{n} = {}\n", f.to_dsl()));
                let pols = f.polarities();
                let keeps_default = g.successors(n).all(|(s, sign)| {
                    let ps = &pols[s];
                    ps.len() == 1 || sign == Sign::Positive
                });
                if !keeps_default {
                    for (s, sign) in g.successors(n) {
                        let op = if sign == Sign::Negative { "-!" } else { "->" };
                        out.push_str(&format!("{n} {op} {s}\n"));
                    }
                }
            }
            None if !mentioned.contains(n) => out.push_str(&format!("{n}\n")),
            None => {}
        }
    }
    out
}

pub fn bare_to_dsl(g: &BareDag) -> String {
    let mut out = String::new();
    let mut mentioned = BTreeSet::new();
    for (a, b) in g.arrows() {
        out.push_str(&format!("{a} -- {b}\n"));
        mentioned.insert(a.clone());
        mentioned.insert(b.clone());
    }
    for n in g.nodes().filter(|n| !mentioned.contains(*n)) {
        out.push_str(&format!("{n}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Frontier(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
    Eq,
    ArrowPos,
    ArrowNeg,
    ArrowBare,
    Sep,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '′' | '″')
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = li + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: line_no, col });
            match c {
                '#' => break,
                c if c.is_whitespace() => {}
                ';' => push(&mut out, Tok::Sep),
                '!' | '¬' | '~' => push(&mut out, Tok::Not),
                '&' | '∧' => push(&mut out, Tok::And),
                '|' | '∨' => push(&mut out, Tok::Or),
                '(' => push(&mut out, Tok::LParen),
                ')' => push(&mut out, Tok::RParen),
                '=' => push(&mut out, Tok::Eq),
                '-' => {
                    let tok = match chars.get(i + 1) {
                        Some('>') => Tok::ArrowPos,
                        Some('!') => Tok::ArrowNeg,
                        Some('-') => Tok::ArrowBare,
                        _ => {
                            return Err(Error::Parse {
                                line: line_no,
                                column: col,
                                message: "expected `->`, `-!` or `--`".into(),
                            })
                        }
                    };
                    push(&mut out, tok);
                    i += 1;
                }
                '?' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < chars.len() && is_ident_char(chars[j]) {
                        j += 1;
                    }
                    if j == start {
                        return Err(Error::Parse {
                            line: line_no,
                            column: col,
                            message: "expected a tag after `?`".into(),
                        });
                    }
                    push(&mut out, Tok::Frontier(chars[start..j].iter().collect()));
                    i = j - 1;
                }
                c if is_ident_char(c) => {
                    let mut j = i;
                    while j < chars.len() && is_ident_char(chars[j]) {
                        j += 1;
                    }
                    push(&mut out, Tok::Ident(chars[i..j].iter().collect()));
                    i = j - 1;
                }
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        column: col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
            i += 1;
        }
        out.push(Spanned {
            tok: Tok::Sep,
            line: line_no,
            col: chars.len() + 1,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn or(&mut self) -> Result<Formula> {
        let mut items = vec![self.and()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            items.push(self.and()?);
        }
        Ok(Formula::disj(items))
    }

    fn and(&mut self) -> Result<Formula> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(Formula::conj(items))
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(self.unary()?.negate())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(match s.as_str() {
                    "true" => Formula::True,
                    "false" => Formula::False,
                    _ => Formula::var(s),
                })
            }
            Some(Tok::Frontier(t)) => {
                self.pos += 1;
                Ok(Formula::frontier(t))
            }
            _ => self.error("expected a variable, `!`, `(`, `true`, `false` or `?tag`"),
        }
    }
}

/// Parses a single formula in DSL syntax.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut toks = lex(text)?;
    toks.retain(|t| t.tok != Tok::Sep);
    let mut p = Parser { toks, pos: 0 };
    let f = p.or()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected input after the formula");
    }
    Ok(f)
}

fn parse_dsl(text: &str) -> Result<ParsedGraph> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut order: Vec<NodeId> = Vec::new();
    let mut defs: BTreeMap<NodeId, Formula> = BTreeMap::new();
    let mut signed: Vec<Arrow> = Vec::new();
    let mut bare: Vec<(NodeId, NodeId)> = Vec::new();
    while p.pos < p.toks.len() {
        let head = match p.next() {
            Some(Tok::Sep) => continue,
            Some(Tok::Ident(s)) => NodeId::from(s),
            _ => {
                p.pos -= 1;
                return p.error("expected a node name");
            }
        };
        order.push(head.clone());
        match p.peek().cloned() {
            Some(Tok::Sep) | None => {}
            Some(Tok::Eq) => {
                p.pos += 1;
                if defs.contains_key(&head) {
                    p.pos -= 1;
                    return p.error(format!("`{head}` is defined twice"));
                }
                let f = p.or()?;
                defs.insert(head, f);
            }
            Some(op @ (Tok::ArrowPos | Tok::ArrowNeg | Tok::ArrowBare)) => {
                p.pos += 1;
                let to = match p.next() {
                    Some(Tok::Ident(s)) => NodeId::from(s),
                    _ => {
                        p.pos -= 1;
                        return p.error("expected the arrow's target");
                    }
                };
                order.push(to.clone());
                match op {
                    Tok::ArrowPos => signed.push(Arrow::pos(head, to)),
                    Tok::ArrowNeg => signed.push(Arrow::neg(head, to)),
                    _ => bare.push((head, to)),
                }
            }
            _ => return p.error("expected `=`, an arrow, `;` or the end of the line"),
        }
        match p.peek() {
            Some(Tok::Sep) | None => {}
            _ => return p.error("expected `;` or the end of the line"),
        }
    }
    let mut nodes: BTreeSet<NodeId> = order.into_iter().collect();
    for f in defs.values() {
        nodes.extend(f.variables());
    }
    if !bare.is_empty() {
        if !signed.is_empty() || !defs.is_empty() {
            return Err(Error::Document(
                "unsigned arrows (`--`) cannot be mixed with formulas or signed arrows".into(),
            ));
        }
        return Ok(ParsedGraph::Bare(BareDag::new(nodes, bare)?));
    }
    let formulas: Vec<(NodeId, Formula)> = defs.into_iter().collect();
    if formulas.is_empty() && !signed.is_empty() {
        let g = RefGraph::from_signed_arrows(signed)?;
        return with_lone_nodes(g, nodes).map(ParsedGraph::Ref);
    }
    add_derived_arrows(&mut signed, &formulas);
    Ok(ParsedGraph::Ref(RefGraph::new(nodes, signed, formulas)?))
}
