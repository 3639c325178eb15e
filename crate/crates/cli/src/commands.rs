use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path as FsPath;

use serde_json::{json, Value};

use refgraph_core::cells::{classify_all, insert_tautology, insertion_effect, Side};
use refgraph_core::conjecture::{
    extend_interpretation, find_injection, verify_extension, SearchConfig, SearchOutcome,
};
use refgraph_core::construction::{
    canonical_script, composition_audit_capped, inductive_build, parse_script, richness_check,
    yablo_truncation, CompositionReport,
};
use refgraph_core::format::{self, ParsedGraph};
use refgraph_core::graph::{contradictory_pairs, find_contradictory_cells_capped};
use refgraph_core::semantics::{
    eval3_graph, node_model_pair, ModelEngine, Polarity, StatusKind, DEFAULT_SINK_LIMIT,
};
use refgraph_core::{
    contradiction_loop_check, enumerate_paths, fixtures, Arrow, BareDag, NodeId, Path, RefGraph,
    Sign, TruthValue3,
};

use crate::{Cli, Command, DocFormat, Input, PolarityArg, EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK};

pub struct Outcome {
    pub report: Value,
    pub code: u8,
}

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read_source(path: &FsPath) -> Res<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn load(input: &Input) -> Res<ParsedGraph> {
    if let Some(name) = &input.fixture {
        return fixtures::by_name(name)
            .map(ParsedGraph::Ref)
            .ok_or_else(|| format!("unknown fixture `{name}` (known: {})", fixtures::NAMES.join(", ")));
    }
    let path = input.graph.as_ref().ok_or("no graph given")?;
    let text = read_source(path)?;
    format::parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_ref(input: &Input) -> Res<RefGraph> {
    load(input)?.into_ref().map_err(err)
}

fn node(g: &RefGraph, name: &str) -> Res<NodeId> {
    let n = NodeId::new(name).map_err(err)?;
    g.require(&n).map_err(err)?;
    Ok(n)
}

fn nodes_or_all(g: &RefGraph, only: &Option<String>) -> Res<Vec<NodeId>> {
    match only {
        Some(name) => Ok(vec![node(g, name)?]),
        None => Ok(g.nodes().cloned().collect()),
    }
}

fn document(g: &RefGraph, how: DocFormat) -> Value {
    match how {
        DocFormat::Json => serde_json::to_value(format::GraphDocument::from_ref(g)).expect("documents serialize"),
        DocFormat::Dsl => Value::String(format::to_dsl(g)),
    }
}

fn path_json(p: &Path) -> Value {
    json!({ "path": p.to_string(), "value": p.value() })
}

fn kind_name(k: StatusKind) -> &'static str {
    match k {
        StatusKind::C1Holds => "C1Holds",
        StatusKind::C2Holds => "C2Holds",
        StatusKind::Open => "Open",
    }
}

fn engine(cli: &Cli) -> ModelEngine {
    ModelEngine::with_sink_limit(cli.sink_limit.unwrap_or(DEFAULT_SINK_LIMIT))
}

fn envelope(cli: &Cli, result: Value, code: u8) -> Outcome {
    let status = match code {
        EXIT_OK => "ok",
        EXIT_NEGATIVE => "negative",
        _ => "inconclusive",
    };
    let mut invocation = serde_json::to_value(&cli.command).expect("arguments serialize");
    if let Value::Object(m) = &mut invocation {
        m.insert("max_len".into(), json!(cli.max_len));
        m.insert("sink_limit".into(), json!(cli.sink_limit.unwrap_or(DEFAULT_SINK_LIMIT)));
    }
    Outcome {
        report: json!({ "invocation": invocation, "status": status, "result": result }),
        code,
    }
}

pub fn run(cli: &Cli) -> Res<Outcome> {
    let (result, code) = match &cli.command {
        Command::Validate { input, print } => validate(input, *print)?,
        Command::Check { input, node } => check(cli, input, node)?,
        Command::Models { input, node, polarity } => models(cli, input, node, *polarity)?,
        Command::Expr { input, node } => expr(input, node)?,
        Command::Eval3 { input, sinks } => eval3(input, sinks)?,
        Command::Cells { input, from, to } => cells(cli, input, from, to)?,
        Command::ClassifyVariants => classify_variants(),
        Command::BuildYablo { n, print } => {
            let g = yablo_truncation(*n).map_err(err)?;
            (json!({ "n": n, "document": document(&g, print.unwrap_or(DocFormat::Json)) }), EXIT_OK)
        }
        Command::ReplayConstruction { script, depth, nodes } => replay(script.as_deref(), *depth, nodes)?,
        Command::InsertTautology { graph, side, arrow, sign, print } => {
            insert(graph.as_deref(), side, arrow.as_deref(), sign, *print)?
        }
        Command::AuditComposition { input, origin } => audit(cli, input, origin)?,
        Command::Inject { target, n, budget } => inject(cli, target, *n, *budget)?,
        Command::Extend { target, n, budget, print } => extend(cli, target, *n, *budget, *print)?,
        Command::Report { input } => report(cli, input)?,
    };
    Ok(envelope(cli, result, code))
}

fn validate(input: &Input, print: Option<DocFormat>) -> Res<(Value, u8)> {
    let parsed = load(input)?;
    let v = match &parsed {
        ParsedGraph::Ref(g) => {
            let mut v = json!({
                "kind": "reference",
                "nodes": g.node_count(),
                "arrows": g.arrow_count(),
                "sinks": g.sinks(),
                "order": g.topo_order().map_err(err)?,
            });
            if let Some(p) = print {
                v["document"] = document(g, p);
            }
            v
        }
        ParsedGraph::Bare(b) => {
            let mut v = json!({
                "kind": "bare",
                "nodes": b.node_count(),
                "arrows": b.arrow_count(),
                "order": b.topo_order().map_err(err)?,
            });
            match print {
                Some(DocFormat::Json) => {
                    v["document"] = serde_json::to_value(format::GraphDocument::from_bare(b)).expect("serializes")
                }
                Some(DocFormat::Dsl) => v["document"] = Value::String(format::bare_to_dsl(b)),
                None => {}
            }
            v
        }
    };
    Ok((v, EXIT_OK))
}

fn check(cli: &Cli, input: &Input, only: &Option<String>) -> Res<(Value, u8)> {
    let g = load_ref(input)?;
    let eng = engine(cli);
    let mut rows = Vec::new();
    for n in nodes_or_all(&g, only)? {
        let st = eng.check_status(&g, &n).map_err(err)?;
        rows.push(json!({
            "node": n,
            "status": kind_name(st.kind),
            "pos_witness": st.pos_witness,
            "neg_witness": st.neg_witness,
        }));
    }
    Ok((json!({ "statuses": rows }), EXIT_OK))
}

fn models(cli: &Cli, input: &Input, name: &str, polarity: PolarityArg) -> Res<(Value, u8)> {
    let g = load_ref(input)?;
    let n = node(&g, name)?;
    let eng = engine(cli);
    let mut v = json!({ "node": n, "sinks": g.reachable_sinks(&n) });
    if polarity != PolarityArg::Neg {
        v["pos"] = serde_json::to_value(eng.models_of(&g, &n, Polarity::Pos).map_err(err)?).expect("serializes");
    }
    if polarity != PolarityArg::Pos {
        v["neg"] = serde_json::to_value(eng.models_of(&g, &n, Polarity::Neg).map_err(err)?).expect("serializes");
    }
    Ok((v, EXIT_OK))
}

fn expr(input: &Input, only: &Option<String>) -> Res<(Value, u8)> {
    let g = load_ref(input)?;
    let mut rows = Vec::new();
    for n in nodes_or_all(&g, only)? {
        let (pos, neg) = node_model_pair(&g, &n).map_err(err)?;
        rows.push(json!({ "node": n, "pos": pos.to_string(), "neg": neg.to_string() }));
    }
    Ok((json!({ "expressions": rows }), EXIT_OK))
}

fn eval3(input: &Input, sinks: &[String]) -> Res<(Value, u8)> {
    let g = load_ref(input)?;
    let mut values = BTreeMap::new();
    for s in sinks {
        let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NODE=VALUE, got `{s}`"))?;
        let v: TruthValue3 = v.trim().parse()?;
        values.insert(node(&g, k.trim())?, v);
    }
    let out = eval3_graph(&g, &values).map_err(err)?;
    let shown: BTreeMap<&NodeId, String> = out.iter().map(|(k, v)| (k, v.to_string())).collect();
    Ok((json!({ "values": shown }), EXIT_OK))
}

fn cells(cli: &Cli, input: &Input, from: &str, to: &str) -> Res<(Value, u8)> {
    let g = load_ref(input)?;
    let (a, b) = (node(&g, from)?, node(&g, to)?);
    let paths = enumerate_paths(&g, &a, &b, cli.max_len).map_err(err)?;
    let cells = find_contradictory_cells_capped(&g, &a, &b, cli.max_len).map_err(err)?;
    let loops = contradiction_loop_check(&paths);
    let pairs = contradictory_pairs(&paths);
    Ok((
        json!({
            "from": a,
            "to": b,
            "paths": paths.iter().map(path_json).collect::<Vec<_>>(),
            "cells": cells.iter().map(|c| json!({
                "sigma": c.sigma.to_string(),
                "sigma_prime": c.sigma_prime.to_string(),
            })).collect::<Vec<_>>(),
            "value_pairs": pairs,
            "contradicts": loops.contradicts,
            "odd_cycle": loops.odd_cycle_witness,
        }),
        EXIT_OK,
    ))
}

fn classify_variants() -> (Value, u8) {
    let reports = classify_all();
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "variant": r.variant.to_string(),
                "c221": r.c221,
                "c222": r.c222,
                "c224": r.c224,
                "all_ok": r.all_ok,
                "x": r.x_value3.to_string(),
                "resolved": r.resolved_x.as_ref().map(|f| f.to_string()),
            })
        })
        .collect();
    let all_ok = reports.iter().filter(|r| r.all_ok).count();
    (json!({ "variants": rows, "all_ok_count": all_ok }), EXIT_OK)
}

fn replay(script: Option<&FsPath>, depth: Option<usize>, only: &[String]) -> Res<(Value, u8)> {
    let steps = match (script, depth) {
        (Some(p), _) => parse_script(&read_source(p)?).map_err(err)?,
        (None, Some(d)) => canonical_script(d),
        (None, None) => return Err("give --script or --depth".into()),
    };
    let state = inductive_build(&steps).map_err(err)?;
    let entries: Vec<Value> = state
        .ledger
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let exprs: BTreeMap<&NodeId, String> = e
                .expressions
                .iter()
                .filter(|(n, _)| only.is_empty() || only.iter().any(|o| o == n.as_str()))
                .map(|(n, d)| (n, d.to_string()))
                .collect();
            json!({ "index": i + 1, "step": e.step.to_string(), "expressions": exprs })
        })
        .collect();
    let graph = state.graph.as_ref().map(format::to_dsl);
    Ok((json!({ "steps": steps.len(), "ledger": entries, "graph": graph }), EXIT_OK))
}

fn parse_sign(s: &str) -> Res<Sign> {
    Sign::parse(s).ok_or_else(|| format!("unknown sign `{s}` (use + or -)"))
}

fn insert(
    graph: Option<&FsPath>,
    sides: &[String],
    arrow: Option<&str>,
    sign: &str,
    print: Option<DocFormat>,
) -> Res<(Value, u8)> {
    if let Some(path) = graph {
        let g = format::parse_graph(&read_source(path)?).map_err(err)?.into_ref().map_err(err)?;
        let arrow = arrow.ok_or("--arrow FROM,TO is required with a graph")?;
        let (a, b) = arrow.split_once(',').ok_or_else(|| format!("expected FROM,TO, got `{arrow}`"))?;
        let (a, b) = (node(&g, a.trim())?, node(&g, b.trim())?);
        let s = g.sign(&a, &b).ok_or_else(|| format!("no arrow {a} -> {b}"))?;
        let h = insert_tautology(&g, &Arrow::new(a, b, s), parse_sign(sign)?).map_err(err)?;
        return Ok((json!({ "document": document(&h, print.unwrap_or(DocFormat::Dsl)) }), EXIT_OK));
    }
    let mut ins = Vec::new();
    for s in sides {
        let (side, sign) = s.split_once(':').ok_or_else(|| format!("expected SIDE:SIGN, got `{s}`"))?;
        ins.push((side.parse::<Side>().map_err(err)?, parse_sign(sign)?));
    }
    if ins.is_empty() {
        return Err("give a graph with --arrow, or at least one --side".into());
    }
    let r = insertion_effect(&ins).map_err(err)?;
    Ok((
        json!({
            "insertions": ins.iter().map(|(s, g)| format!("{s}:{}", g.symbol())).collect::<Vec<_>>(),
            "effect": r.effect,
            "expanded": r.expanded.to_string(),
            "expression": r.expression.to_string(),
            "escape": r.escape,
        }),
        EXIT_OK,
    ))
}

fn audit_json(r: &CompositionReport) -> Value {
    json!({
        "origin": r.origin,
        "cells": r.cells.iter().map(|c| json!({
            "end": c.end,
            "sigma": c.sigma.to_string(),
            "sigma_prime": c.sigma_prime.to_string(),
            "sigma_blocked_at": c.sigma_blocked_at,
            "sigma_prime_blocked_at": c.sigma_prime_blocked_at,
            "label": c.label,
        })).collect::<Vec<_>>(),
    })
}

fn audit(cli: &Cli, input: &Input, origin: &str) -> Res<(Value, u8)> {
    let g = load_ref(input)?;
    let o = node(&g, origin)?;
    let r = composition_audit_capped(&g, &o, cli.max_len).map_err(err)?;
    Ok((audit_json(&r), EXIT_OK))
}

fn search(cli: &Cli, target: &BareDag, n: usize, budget: u64) -> Res<SearchOutcome> {
    let cfg = SearchConfig {
        max_nodes_explored: budget,
        path_length_cap: cli.max_len,
    };
    find_injection(target, n, cfg).map_err(err)
}

fn outcome_code(o: &SearchOutcome) -> u8 {
    match o {
        SearchOutcome::Found { .. } => EXIT_OK,
        SearchOutcome::Absent { .. } => EXIT_NEGATIVE,
        SearchOutcome::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    }
}

fn inject(cli: &Cli, target: &Input, n: usize, budget: u64) -> Res<(Value, u8)> {
    let t = load(target)?.into_bare();
    let out = search(cli, &t, n, budget)?;
    let code = outcome_code(&out);
    Ok((serde_json::to_value(&out).expect("serializes"), code))
}

fn extend(cli: &Cli, target: &Input, n: usize, budget: u64, print: Option<DocFormat>) -> Res<(Value, u8)> {
    let t = load(target)?.into_bare();
    let out = search(cli, &t, n, budget)?;
    let Some(inj) = out.injection() else {
        let code = outcome_code(&out);
        return Ok((json!({ "search": out }), code));
    };
    let g = extend_interpretation(&t, inj).map_err(err)?;
    let rep = verify_extension(&g, inj).map_err(err)?;
    let values: BTreeMap<&NodeId, String> = rep.values.iter().map(|(k, v)| (k, v.to_string())).collect();
    let code = if rep.ok { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((
        json!({
            "search": out,
            "extension": {
                "values": values,
                "frontier": rep.frontier,
                "image_all_xi": rep.image_all_xi,
                "non_image_t_or_xi": rep.non_image_t_or_xi,
                "root_status": rep.root_status.map(kind_name),
                "ok": rep.ok,
            },
            "document": document(&g, print.unwrap_or(DocFormat::Dsl)),
        }),
        code,
    ))
}

fn report(cli: &Cli, input: &Input) -> Res<(Value, u8)> {
    let g = load_ref(input)?;
    let eng = engine(cli);
    let mut rows = Vec::new();
    for n in g.nodes() {
        let mut row = json!({ "node": n, "sink": g.is_sink(n) });
        match eng.check_status(&g, n) {
            Ok(st) => row["status"] = json!(kind_name(st.kind)),
            Err(e) => row["status_error"] = json!(e.to_string()),
        }
        match node_model_pair(&g, n) {
            Ok((p, q)) => {
                row["pos"] = json!(p.to_string());
                row["neg"] = json!(q.to_string());
            }
            Err(e) => row["expression_error"] = json!(e.to_string()),
        }
        rows.push(row);
    }
    let richness: Vec<Value> = richness_check(&g)
        .map_err(err)?
        .into_iter()
        .map(|p| {
            json!({
                "from": p.from,
                "to": p.to,
                "positive": u64::try_from(p.positive).unwrap_or(u64::MAX),
                "negative": u64::try_from(p.negative).unwrap_or(u64::MAX),
            })
        })
        .collect();
    Ok((
        json!({
            "nodes": g.node_count(),
            "arrows": g.arrow_count(),
            "sinks": g.sinks(),
            "graph": format::to_dsl(&g),
            "analysis": rows,
            "richness": richness,
        }),
        EXIT_OK,
    ))
}
