use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde_json::{json, Value};

use twwlab_core::builder::{algo_cor_with, approx_twinwidth_with, AlgoOutcome, BuildParams};
use twwlab_core::census::{growth_csv, growth_table, ForbiddenSet, Universe};
use twwlab_core::exact::twinwidth_exact;
use twwlab_core::logic::{Evaluator, Formula};
use twwlab_core::minors::{
    bad_columns, find_grid_minor, find_mixed_minor, minimal_bad_intervals, MtProfile, TypeMatrix,
    WitnessDoc, GRID_ENUM_BUDGET, MIXED_ENUM_BUDGET,
};
use twwlab_core::semigrid::{
    classify, decode_gs, general_scheme_at, general_scheme_count, generate_gs, GraphScheme, Scheme,
};
use twwlab_core::{verify_contraction_sequence, ContractionSequence, OrderedStructure, Signature};

use crate::report::{Session, UsageError};
use crate::{AlgoArgs, CensusArgs, Command, McArgs, MinorsCommand, SemigridCommand, Thresholds};

/// What a command produced: plain text, and the pieces of the JSON report.
pub struct Output {
    pub text: String,
    pub outcome: Value,
    pub config: Value,
}

pub fn dispatch(cmd: &Command, session: &mut Session) -> Result<Output> {
    match cmd {
        Command::TwwExact(a) => {
            let s = load_structure(session, &a.structure)?;
            let (w, seq) = twinwidth_exact(&s, a.cap)?;
            write_seq(a.seq.as_deref(), &seq, w)?;
            Ok(Output {
                text: w.to_string(),
                outcome: json!({"kind": "twinwidth", "twinWidth": w, "sequence": seq}),
                config: json!({"cap": a.cap}),
            })
        }
        Command::TwwApprox(a) => {
            let s = load_structure(session, &a.structure)?;
            let profile = parse_profile(&a.thresholds)?;
            let r = approx_twinwidth_with(&s, profile, a.thresholds.c_ceiling)?;
            write_seq(a.seq.as_deref(), &r.seq, r.red_degree)?;
            Ok(Output {
                text: format!("kUsed {}\nredDegree {}", r.k_used, r.red_degree),
                outcome: json!({"kind": "approximation", "kUsed": r.k_used, "redDegree": r.red_degree, "sequence": r.seq}),
                config: threshold_config(&a.thresholds, profile),
            })
        }
        Command::Algo(a) => algo(a, session),
        Command::Minors(m) => minors(m, session),
        Command::Semigrid(s) => semigrid(s, session),
        Command::Mc(a) => mc(a, session),
        Command::Census(a) => census(a, session),
        Command::VerifySeq(a) => {
            let s = load_structure(session, &a.structure)?;
            let seq = ContractionSequence::from_text(&session.read(&a.seq)?)
                .with_context(|| format!("in {}", a.seq.display()))?;
            let d = verify_contraction_sequence(&s, &seq)?;
            Ok(Output {
                text: d.to_string(),
                outcome: json!({"kind": "verified", "redDegree": d, "merges": seq.merges.len()}),
                config: json!({}),
            })
        }
    }
}

fn load_structure(session: &mut Session, path: &Path) -> Result<OrderedStructure> {
    let text = session.read(path)?;
    OrderedStructure::from_obs(&text).with_context(|| format!("in {}", path.display()))
}

/// A matrix file, or the atomic-type matrix of a `.obs` structure.
fn load_matrix(session: &mut Session, path: &Path) -> Result<TypeMatrix> {
    let text = session.read(path)?;
    let parsed = if text.trim_start().starts_with("obs") {
        OrderedStructure::from_obs(&text).map(|s| TypeMatrix::from_structure(&s))
    } else {
        TypeMatrix::from_text(&text)
    };
    parsed.with_context(|| format!("in {}", path.display()))
}

fn write_seq(path: Option<&Path>, seq: &ContractionSequence, red_degree: usize) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, seq.to_text(Some(red_degree)))
            .map_err(|e| anyhow!("cannot write {}: {e}", p.display()))?;
    }
    Ok(())
}

fn parse_profile(t: &Thresholds) -> Result<MtProfile> {
    t.profile.parse().map_err(|_| {
        UsageError::new(
            "--profile",
            format!("{:?} is neither linear nor exp8", t.profile),
        )
        .into()
    })
}

fn threshold_config(t: &Thresholds, profile: MtProfile) -> Value {
    json!({
        "profile": profile.to_string(),
        "cCeiling": t.c_ceiling,
        "gridEnumBudget": GRID_ENUM_BUDGET,
        "mixedEnumBudget": MIXED_ENUM_BUDGET,
    })
}

fn positive(flag: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(UsageError::new(flag, "must be at least 1").into());
    }
    Ok(())
}

fn algo(a: &AlgoArgs, session: &mut Session) -> Result<Output> {
    positive("--k", a.k)?;
    positive("--t", a.t)?;
    let s = load_structure(session, &a.structure)?;
    let profile = parse_profile(&a.thresholds)?;
    let mut params = BuildParams::with_profile(a.k, a.t, profile, a.thresholds.c_ceiling)?;
    if a.b.is_some() || a.c.is_some() {
        let b = a.b.unwrap_or(params.b);
        let c = a.c.unwrap_or(params.c);
        positive("--c", c)?;
        params = params.with_thresholds(b, c);
    }
    let mut config = threshold_config(&a.thresholds, profile);
    config["k"] = a.k.into();
    config["t"] = a.t.into();
    config["b"] = params.b.into();
    config["c"] = params.c.into();
    let out = match algo_cor_with(&s, &params)? {
        AlgoOutcome::Sequence {
            seq,
            red_degree,
            relaxations,
        } => Output {
            text: seq.to_text(Some(red_degree)),
            outcome: json!({"kind": "sequence", "redDegree": red_degree, "sequence": seq, "relaxations": relaxations}),
            config,
        },
        AlgoOutcome::Witness(w) => {
            let doc = WitnessDoc::from(&w);
            Output {
                text: doc.to_json(),
                outcome: json!({"kind": "witness", "witness": doc}),
                config,
            }
        }
    };
    Ok(out)
}

fn minors(cmd: &MinorsCommand, session: &mut Session) -> Result<Output> {
    match cmd {
        MinorsCommand::Grid { matrix, t } => {
            positive("--t", *t)?;
            let m = load_matrix(session, matrix)?;
            if !m.is_zero_one() {
                return Err(anyhow!("{} is not a 0-1 matrix", matrix.display()));
            }
            let res = find_grid_minor(&m, *t)?;
            let doc = res.witness.as_ref().map(WitnessDoc::from);
            let text = match &doc {
                Some(d) => d.to_json(),
                None if res.exhaustive => "none".into(),
                None => "none found (search not exhaustive)".into(),
            };
            Ok(Output {
                text,
                outcome: json!({"kind": "gridSearch", "witness": doc, "exhaustive": res.exhaustive}),
                config: json!({"t": t, "gridEnumBudget": GRID_ENUM_BUDGET}),
            })
        }
        MinorsCommand::Mixed { matrix, k, t } => {
            positive("--k", *k)?;
            positive("--t", *t)?;
            let m = load_matrix(session, matrix)?;
            let doc = find_mixed_minor(&m, *k, *t)?.as_ref().map(WitnessDoc::from);
            Ok(Output {
                text: doc
                    .as_ref()
                    .map_or_else(|| "none".into(), WitnessDoc::to_json),
                outcome: json!({"kind": "mixedSearch", "witness": doc, "exhaustive": true}),
                config: json!({"k": k, "t": t, "mixedEnumBudget": MIXED_ENUM_BUDGET}),
            })
        }
        MinorsCommand::Bad { matrix, rows, k } => {
            positive("--k", *k)?;
            let range = parse_range(rows)?;
            let m = load_matrix(session, matrix)?;
            let bad = minimal_bad_intervals(&m, range, *k)?;
            let text = bad
                .iter()
                .map(|b| format!("{} {} {}", b.cols.0, b.cols.1, b.distinct_rows))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                text,
                outcome: json!({
                    "kind": "badIntervals",
                    "intervals": bad.iter().map(|b| json!({"cols": [b.cols.0, b.cols.1], "distinctRows": b.distinct_rows})).collect::<Vec<_>>(),
                    "badColumns": bad_columns(&bad),
                }),
                config: json!({"k": k, "rows": [range.0, range.1]}),
            })
        }
    }
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let err = || UsageError::new("--rows", format!("{text:?} is not of the form a:b"));
    let (a, b) = text.split_once(':').ok_or_else(err)?;
    Ok((
        a.trim().parse().map_err(|_| err())?,
        b.trim().parse().map_err(|_| err())?,
    ))
}

fn parse_sig(text: &str) -> Result<Signature> {
    if text == "graph" {
        return Ok(Signature::graph());
    }
    let err = |m: String| UsageError::new("--sig", m);
    let mut syms = Vec::new();
    for w in text.split([' ', ',']).filter(|w| !w.is_empty()) {
        let (name, ar) = w
            .split_once(':')
            .ok_or_else(|| err(format!("symbol {w:?} is not NAME:ARITY")))?;
        let ar: u8 = ar.parse().map_err(|_| err(format!("bad arity in {w:?}")))?;
        syms.push((name.to_string(), ar));
    }
    Signature::new(syms).map_err(|e| err(e.to_string()).into())
}

fn graph_scheme(id: usize) -> Result<GraphScheme> {
    GraphScheme::from_index(id)
        .map_err(|_| UsageError::new("--scheme", format!("{id} is not below 256")).into())
}

fn scheme_json(sc: &Scheme) -> Value {
    match sc {
        Scheme::Graph(g) => json!({"family": "graph", "id": g.index(), "text": g.to_string()}),
        Scheme::General(g) => json!({"family": "general", "scheme": g}),
    }
}

fn semigrid(cmd: &SemigridCommand, session: &mut Session) -> Result<Output> {
    match cmd {
        SemigridCommand::Gen {
            scheme,
            m,
            n,
            cells,
            sig,
        } => {
            positive("--m", *m)?;
            positive("--n", *n)?;
            let sig = parse_sig(sig)?;
            let s = match cells {
                Some(path) => {
                    if !sig.is_graph() {
                        return Err(
                            UsageError::new("--cells", "only graph schemes take cells").into()
                        );
                    }
                    let cells = parse_cells(&session.read(path)?)
                        .with_context(|| format!("in {}", path.display()))?;
                    generate_gs(graph_scheme(*scheme)?, *m, *n, &cells)?
                }
                None => {
                    let sc = if sig.is_graph() {
                        Scheme::Graph(graph_scheme(*scheme)?)
                    } else {
                        general_scheme_at(&sig, *scheme as u64)?
                            .map(Scheme::General)
                            .ok_or_else(|| {
                                UsageError::new(
                                    "--scheme",
                                    format!("{scheme} exceeds the number of schemes"),
                                )
                            })?
                    };
                    sc.generate(&sig, *m, *n)?
                }
            };
            let obs = s.to_obs();
            Ok(Output {
                outcome: json!({"kind": "structure", "n": s.n(), "obs": obs}),
                text: obs,
                config: json!({"scheme": scheme, "m": m, "n": n, "sig": sig.to_string()}),
            })
        }
        SemigridCommand::Decode { structure, scheme } => {
            let sc = graph_scheme(*scheme)?;
            let s = load_structure(session, structure)?;
            let (m, n, cells) = decode_gs(&s, sc)?;
            let mut text = format!("{m} {n}");
            for (i, j) in &cells {
                text.push_str(&format!("\n{i} {j}"));
            }
            Ok(Output {
                text,
                outcome: json!({"kind": "decoded", "m": m, "n": n, "cells": cells}),
                config: json!({"scheme": scheme}),
            })
        }
        SemigridCommand::Classify { structure } => {
            let s = load_structure(session, structure)?;
            let c = classify(&s)?;
            let text = match &c.scheme {
                Scheme::Graph(g) => format!("scheme {} {}\nm {}\nn {}", g.index(), g, c.m, c.n),
                Scheme::General(g) => {
                    format!("scheme {}\nm {}\nn {}", serde_json::to_string(g)?, c.m, c.n)
                }
            };
            Ok(Output {
                text,
                outcome: json!({"kind": "classification", "scheme": scheme_json(&c.scheme), "m": c.m, "n": c.n}),
                config: json!({}),
            })
        }
        SemigridCommand::Schemes { sig, list } => {
            let parsed = parse_sig(sig)?;
            let (count, listing) = if parsed.is_graph() {
                let all = GraphScheme::all();
                let listing: Vec<Value> = if *list {
                    all.iter()
                        .map(|g| json!({"id": g.index(), "text": g.to_string()}))
                        .collect()
                } else {
                    vec![]
                };
                (all.len().to_string(), listing)
            } else {
                if *list {
                    return Err(UsageError::new(
                        "--list",
                        "listing is available for the graph signature only",
                    )
                    .into());
                }
                (general_scheme_count(&parsed).to_string(), vec![])
            };
            let mut text = count.clone();
            for l in &listing {
                text.push_str(&format!(
                    "\n{} {}",
                    l["id"],
                    l["text"].as_str().unwrap_or_default()
                ));
            }
            Ok(Output {
                text,
                outcome: json!({"kind": "schemeCount", "count": count, "schemes": listing}),
                config: json!({"sig": sig}),
            })
        }
    }
}

fn parse_cells(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| anyhow!("line {}: expected `i j`", ln + 1))?;
        match nums.as_slice() {
            [i, j] => out.push((*i, *j)),
            _ => return Err(anyhow!("line {}: expected `i j`", ln + 1)),
        }
    }
    Ok(out)
}

fn mc(a: &McArgs, session: &mut Session) -> Result<Output> {
    let f = Formula::parse(&session.read(&a.formula)?)
        .with_context(|| format!("in {}", a.formula.display()))?;
    let s = load_structure(session, &a.structure)?;
    let mut asg = Vec::new();
    for item in &a.assign {
        let err = || UsageError::new("--assign", format!("{item:?} is not VAR=ELEM"));
        let (v, e) = item.split_once('=').ok_or_else(err)?;
        asg.push((
            v.trim().to_string(),
            e.trim().parse::<usize>().map_err(|_| err())?,
        ));
    }
    let asg_ref: Vec<(&str, usize)> = asg.iter().map(|(v, e)| (v.as_str(), *e)).collect();
    let value = Evaluator::new(&s)
        .with_depth_budget(a.depth_budget)
        .eval(&f, &asg_ref)?;
    Ok(Output {
        text: value.to_string(),
        outcome: json!({"kind": "modelCheck", "value": value, "quantifierDepth": f.quantifier_depth()}),
        config: json!({"depthBudget": a.depth_budget, "assign": a.assign}),
    })
}

fn census(a: &CensusArgs, session: &mut Session) -> Result<Output> {
    let mut paths: Vec<_> = std::fs::read_dir(&a.forbid)
        .map_err(|e| anyhow!("cannot read {}: {e}", a.forbid.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "obs"))
        .collect();
    paths.sort();
    let patterns = paths
        .iter()
        .map(|p| load_structure(session, p))
        .collect::<Result<Vec<_>>>()?;
    let universe = match (a.universe.as_str(), &a.sig) {
        ("graphs", None) => Universe::Graphs,
        ("graphs", Some(_)) => {
            return Err(UsageError::new("--sig", "only used with --universe structures").into())
        }
        ("structures", Some(s)) => Universe::Structures(parse_sig(s)?),
        ("structures", None) => {
            return Err(UsageError::new("--sig", "required with --universe structures").into())
        }
        (u, _) => {
            return Err(UsageError::new(
                "--universe",
                format!("{u:?} is neither graphs nor structures"),
            )
            .into())
        }
    };
    let forbidden = ForbiddenSet::new(patterns)?;
    let rows = growth_table(&universe, &forbidden, a.n_max, a.budget)?;
    Ok(Output {
        text: growth_csv(&rows),
        outcome: json!({
            "kind": "counts",
            "rows": rows.iter().map(|r| json!({"n": r.n, "count": r.count.to_string(), "millis": r.elapsed.as_millis() as u64})).collect::<Vec<_>>(),
        }),
        config: json!({
            "universe": a.universe,
            "sig": a.sig,
            "nMax": a.n_max,
            "budget": a.budget,
            "patterns": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        }),
    })
}
