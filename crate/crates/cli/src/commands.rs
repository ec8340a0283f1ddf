use clap::ValueEnum;
use serde_json::{json, Value};
use thiserror::Error;

use fddi_errlab::analytics::{
    check_reference, frame_error, token_loss, triple_coefficients, AnalyticsError, RingParams, SummaryRow,
};
use fddi_errlab::frame::{receive, Failure, ParseEvent, StationPolicy, ValidityMode};
use fddi_errlab::noise::{tabulate_effects, ErrorPattern};
use fddi_errlab::phy::{format_symbols, parse_symbols, PhyError};
use fddi_errlab::search::{
    find_undetected_with, verify_table6, verify_table8, verify_threshold, SearchError, DETECTION_THRESHOLDS,
};
use fddi_errlab::sim::{
    compare_modes, merge_scenario, run, run_token, wilson_interval, Destination, Outcome, OutcomeTally, SimConfig,
    SimError,
};
use fddi_errlab::tables::{self, TableId};

use crate::report::{sci, sci_text, Report, Section};
use crate::{CheckArg, ModeArg, RingArgs, SimArgs, SimKind, VerifyTarget};

/// Anything that makes an invocation unusable; reported with exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Ring(#[from] AnalyticsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Symbols(#[from] PhyError),
    #[error("{0}")]
    Invalid(String),
}

const ABORT_NOTE: &str =
    "a station that detects a violation inside a frame forwards what it received so far followed by Idle symbols";

impl RingArgs {
    pub fn build(&self) -> Result<RingParams, CliError> {
        let bits = match (self.frame_bits, self.frame_octets) {
            (Some(b), _) => b,
            (None, Some(o)) => 10.0 * o,
            (None, None) => 45_000.0,
        };
        let mut ring = RingParams::new(self.links, self.ber, bits)?;
        if let Some(d) = self.latency {
            ring = ring.with_latency(d)?;
        }
        if let Some(b) = self.bandwidth {
            ring = ring.with_bandwidth(b)?;
        }
        Ok(ring)
    }
}

fn ring_json(r: &RingParams) -> Value {
    json!({
        "links": r.links,
        "ber": sci(r.ber),
        "frame_bits": r.frame_bits,
        "frame_octets": r.octets(),
        "bandwidth": sci(r.bandwidth),
        "latency_s": sci(r.latency),
    })
}

pub fn tables(which: &str) -> Result<Report, CliError> {
    let n: u8 = which.parse().map_err(|_| CliError::Invalid(format!("no table {which}")))?;
    let id = TableId::from_number(n).ok_or_else(|| CliError::Invalid(format!("no table {which}")))?;
    let t = tables::generate(id, &tabulate_effects());
    let mut report = Report::new("tables", json!({ "table": n }));
    report.envelope.results = json!({
        "title": id.title(),
        "header": t.header,
        "rows": t.rows,
    });
    let mut sec = Section::new(format!("Table {n}: {}", id.title()), &[]);
    sec.header = t.header.clone();
    sec.rows = t.rows.clone();
    report.sections.push(sec);
    Ok(report)
}

/// Rows that apply under one set of validity rules.
fn mode_rows(mode: ValidityMode) -> [SummaryRow; 6] {
    let (fcs3, fcs4, ed) = match mode {
        ValidityMode::Enhanced => (SummaryRow::Fcs3, SummaryRow::Fcs4, SummaryRow::FalseEd),
        ValidityMode::Baseline => (SummaryRow::BaselineFcs3, SummaryRow::BaselineFcs4, SummaryRow::BaselineFalseEd),
        ValidityMode::OptionA => (SummaryRow::Fcs3, SummaryRow::Fcs4, SummaryRow::OptionAFalseEd),
    };
    [SummaryRow::FrameError, SummaryRow::TokenLoss, fcs3, fcs4, ed, SummaryRow::FalseSd]
}

pub fn rates(args: &RingArgs, mode: Option<ModeArg>) -> Result<Report, CliError> {
    let ring = args.build()?;
    let mode: Option<ValidityMode> = mode.map(Into::into);
    let mut params = ring_json(&ring);
    params["mode"] = mode.map_or(Value::Null, |m| json!(m.label()));
    let mut report = Report::new("rates", params);
    let mut sec = Section::new("Rates", &["quantity", "probability", "exact", "mean time", "unit"]);
    let mut rows = Vec::new();
    let selected: Vec<SummaryRow> = match mode {
        Some(m) => mode_rows(m).to_vec(),
        None => SummaryRow::ALL.to_vec(),
    };
    for row in selected {
        let r = row.evaluate(&ring);
        let mean = row.unit().from_seconds(r.mean_time_s);
        let exact = r.exact_probability.map(sci);
        rows.push(json!({
            "row": row,
            "label": row.label(),
            "probability": sci(r.probability),
            "exact_probability": exact,
            "mean_time": sci(mean),
            "unit": row.unit().label(),
        }));
        sec.row(vec![
            row.label().into(),
            sci_text(r.probability),
            r.exact_probability.map(sci_text).unwrap_or_default(),
            sci_text(mean),
            row.unit().label().into(),
        ]);
    }
    let (coeff, total) = triple_coefficients();
    report.envelope.results = json!({
        "rows": rows,
        "triple_coefficient": {
            "first_row": sci(coeff[0]),
            "total": sci(total),
            "listed_first_row": sci(3.91e-3),
            "listed_total": sci(3.89e-3),
        },
    });
    report.envelope.warnings = ring.warnings();
    report.sections.push(sec);
    Ok(report)
}

fn pass_fail(ok: bool) -> String {
    if ok { "PASS" } else { "FAIL" }.into()
}

pub fn verify(target: VerifyTarget, seed: u64, all: bool) -> Result<Report, CliError> {
    let name = target.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let params = json!({ "target": name, "seed": seed, "all": all });
    let mut report = Report::new("verify", params);
    let passed = match target {
        VerifyTarget::Table6 | VerifyTarget::FcsMultiples => {
            let rows = verify_table6();
            let mut sec = Section::new("Minimum-degree multiples", &["weight", "degree", "exponents", "result"]);
            for r in &rows {
                sec.row(vec![
                    r.weight.to_string(),
                    r.exponents.iter().max().copied().unwrap_or(0).to_string(),
                    format!("{:?}", r.exponents),
                    pass_fail(r.is_codeword),
                ]);
            }
            report.sections.push(sec);
            report.envelope.results = json!({ "rows": rows });
            rows.iter().all(|r| r.is_codeword)
        }
        VerifyTarget::Table8 => {
            let rows = verify_table8(seed);
            let mut sec = Section::new(
                "Undetected triples",
                &["row", "events", "codeword", "shift", "codeword at shift", "probability", "listed", "result"],
            );
            let mut out = Vec::new();
            for r in &rows {
                let events: Vec<String> = r.events.iter().map(|(o, p)| format!("{o}:{p}")).collect();
                sec.row(vec![
                    (r.row + 1).to_string(),
                    events.join(" "),
                    r.codeword_at_zero.to_string(),
                    r.shift.to_string(),
                    r.codeword_at_shift.to_string(),
                    sci_text(r.probability),
                    sci_text(r.printed_probability),
                    pass_fail(r.ok(0.02)),
                ]);
                out.push(json!({
                    "row": r.row + 1,
                    "events": r.events.iter().map(|(o, p)| json!({"offset": o, "pattern": p})).collect::<Vec<_>>(),
                    "codeword_at_zero": r.codeword_at_zero,
                    "shift": r.shift,
                    "codeword_at_shift": r.codeword_at_shift,
                    "probability": sci(r.probability),
                    "listed_probability": sci(r.printed_probability),
                    "relative_error": sci(r.relative_error),
                    "passed": r.ok(0.02),
                }));
            }
            report.sections.push(sec);
            report.envelope.results = json!({ "rows": out });
            rows.iter().all(|r| r.ok(0.02))
        }
        VerifyTarget::Table9 => {
            let mut sec = Section::new(
                "Detection thresholds",
                &["events", "listed symbols", "hits at listed", "min span above", "result"],
            );
            let mut out = Vec::new();
            let mut ok = true;
            for (k, printed) in DETECTION_THRESHOLDS {
                if k > 3 && !all {
                    continue;
                }
                let c = verify_threshold(k, printed)?;
                ok &= c.ok();
                sec.row(vec![
                    k.to_string(),
                    printed.to_string(),
                    c.hits_at_threshold.to_string(),
                    c.min_span_above.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                    pass_fail(c.ok()),
                ]);
                if !c.ok() {
                    report.envelope.warnings.push(match c.min_span_above {
                        Some(s) if c.hits_at_threshold > 0 => format!(
                            "{k} events: undetected combinations already fit in {} symbols, \
                             below the listed limit of {printed}",
                            s + 1
                        ),
                        _ => format!(
                            "{k} events: still no undetected combination in {} symbols, \
                             so the listed limit of {printed} is not the largest safe size",
                            printed + 1
                        ),
                    });
                }
                out.push(json!({
                    "events": k,
                    "listed_data_symbols": printed,
                    "hits_at_listed": c.hits_at_threshold,
                    "min_span_above": c.min_span_above,
                    "passed": c.ok(),
                }));
            }
            report.sections.push(sec);
            report.envelope.results = json!({ "rows": out });
            ok
        }
        VerifyTarget::Tables => {
            let mut sec = Section::new("Code-effect tables", &["table", "cells", "mismatches", "result"]);
            let mut out = Vec::new();
            let mut ok = true;
            for id in TableId::ALL {
                let c = tables::verify(id);
                ok &= c.matches();
                sec.row(vec![
                    id.number().to_string(),
                    c.cells_compared.to_string(),
                    c.mismatches.len().to_string(),
                    pass_fail(c.matches()),
                ]);
                out.push(json!({
                    "table": id.number(),
                    "cells": c.cells_compared,
                    "mismatches": c.mismatches,
                    "passed": c.matches(),
                }));
            }
            report.sections.push(sec);
            report.envelope.results = json!({ "rows": out });
            ok
        }
        VerifyTarget::Rates => {
            let cells = check_reference();
            let mut sec = Section::new("Rate grid", &["row", "column", "field", "computed", "listed", "result"]);
            for c in &cells {
                sec.row(vec![
                    c.row.label().into(),
                    (c.column + 1).to_string(),
                    c.field.into(),
                    sci_text(c.computed),
                    sci_text(c.printed),
                    pass_fail(c.ok),
                ]);
            }
            let out: Vec<Value> = cells
                .iter()
                .map(|c| {
                    json!({
                        "row": c.row,
                        "column": c.column + 1,
                        "field": c.field,
                        "computed": sci(c.computed),
                        "listed": sci(c.printed),
                        "passed": c.ok,
                    })
                })
                .collect();
            report.sections.push(sec);
            report.envelope.results = json!({ "rows": out });
            cells.iter().all(|c| c.ok)
        }
    };
    report.envelope.passed = Some(passed);
    Ok(report)
}

fn load_patterns(source: &str) -> Result<Vec<ErrorPattern>, CliError> {
    if source == "default" {
        return Ok(ErrorPattern::ALPHABET.to_vec());
    }
    let text = std::fs::read_to_string(source).map_err(|e| CliError::Invalid(format!("{source}: {e}")))?;
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let p: ErrorPattern = line.parse().map_err(|e| CliError::Invalid(format!("{source}: {e}")))?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(CliError::Invalid(format!("{source}: no patterns")));
    }
    Ok(out)
}

pub fn search(events: usize, symbols: u32, check: CheckArg, patterns: &str) -> Result<Report, CliError> {
    let alphabet = load_patterns(patterns)?;
    let params = json!({
        "events": events,
        "symbols": symbols,
        "check": check.label(),
        "patterns": alphabet,
    });
    let mut report = Report::new("search", params);
    let result = find_undetected_with(&check.polynomial(), &alphabet, events, symbols)?;
    let mut sec = Section::new("Undetected combinations", &["span", "offsets", "patterns", "exponents"]);
    let mut hits = Vec::new();
    for h in &result.hits {
        let offsets: Vec<u32> = h.events.iter().map(|e| e.symbol_position).collect();
        let pats: Vec<String> = h.events.iter().map(|e| e.pattern.to_string()).collect();
        let exps = h.polynomial().exponents();
        sec.row(vec![
            h.span().to_string(),
            format!("{offsets:?}"),
            pats.join(" "),
            format!("{exps:?}"),
        ]);
        hits.push(json!({
            "span": h.span(),
            "offsets": offsets,
            "patterns": pats,
            "exponents": exps,
        }));
    }
    report.envelope.results = json!({
        "hit_count": hits.len(),
        "min_span": result.min_span(),
        "hits": hits,
    });
    report.sections.push(sec);
    Ok(report)
}

pub fn parse(stream: &str, mode: ModeArg, honor_exempt_fc: bool) -> Result<Report, CliError> {
    let symbols = parse_symbols(stream)?;
    let mode: ValidityMode = mode.into();
    let params = json!({
        "stream": format_symbols(&symbols),
        "mode": mode.label(),
        "honor_exempt_fc": honor_exempt_fc,
    });
    let mut report = Report::new("parse", params);
    let policy = StationPolicy::new(mode).honor_exempt_fc(honor_exempt_fc);
    let mut sec = Section::new("Parse events", &["kind", "start", "end", "data", "status", "valid", "failure"]);
    let mut out = Vec::new();
    for r in receive(&symbols, &policy) {
        let (kind, end, data, status, extra) = match &r.event {
            ParseEvent::Frame(c) => (
                "frame",
                c.ed_index,
                format_symbols(&c.data.iter().map(|&v| fddi_errlab::phy::Symbol::Data(v)).collect::<Vec<_>>()),
                format_symbols(&c.status),
                Value::Null,
            ),
            ParseEvent::Token { sd_index, restricted } => {
                ("token", sd_index + 5, String::new(), String::new(), json!({ "restricted": restricted }))
            }
            ParseEvent::Aborted { at, reason, .. } => ("aborted", *at, String::new(), String::new(), json!({ "reason": reason })),
        };
        let failure = if r.verdict.failure == Failure::None { "" } else { r.verdict.failure.label() };
        sec.row(vec![
            kind.into(),
            r.event.sd_index().to_string(),
            end.to_string(),
            data.clone(),
            status.clone(),
            r.verdict.valid.to_string(),
            failure.into(),
        ]);
        let mut ev = json!({
            "kind": kind,
            "start": r.event.sd_index(),
            "end": end,
            "valid": r.verdict.valid,
            "failure": r.verdict.failure,
        });
        if kind == "frame" {
            ev["data"] = json!(data);
            ev["status"] = json!(status);
        }
        if let Value::Object(m) = extra {
            for (k, v) in m {
                ev[k] = v;
            }
        }
        out.push(ev);
    }
    report.envelope.results = json!({ "events": out });
    report.sections.push(sec);
    Ok(report)
}

fn parse_destination(text: Option<&str>, links: u32) -> Result<Destination, CliError> {
    match text {
        None => Ok(Destination::Fixed(links)),
        Some("uniform") => Ok(Destination::Uniform),
        Some(t) => t
            .parse()
            .map(Destination::Fixed)
            .map_err(|_| CliError::Invalid(format!("destination must be a link count or `uniform`, got {t}"))),
    }
}

fn tally_json(t: &OutcomeTally, outcomes: &[Outcome], sec: &mut Section) -> Value {
    let mut classes = serde_json::Map::new();
    for &o in outcomes {
        let k = t.count(o);
        let (lo, hi) = wilson_interval(k, t.trials, 1.96);
        sec.row(vec![o.label().into(), k.to_string(), sci_text(t.fraction(o)), sci_text(lo), sci_text(hi)]);
        classes.insert(
            o.label().into(),
            json!({ "count": k, "fraction": sci(t.fraction(o)), "wilson_95": [sci(lo), sci(hi)] }),
        );
    }
    let (lo, hi) = wilson_interval(t.struck, t.trials, 1.96);
    sec.row(vec!["struck".into(), t.struck.to_string(), sci_text(t.struck_fraction()), sci_text(lo), sci_text(hi)]);
    json!({
        "trials": t.trials,
        "classes": classes,
        "struck": { "count": t.struck, "fraction": sci(t.struck_fraction()), "wilson_95": [sci(lo), sci(hi)] },
    })
}

/// Exact probability that a frame crossing the chosen links sees any event.
fn struck_prediction(ring: &RingParams, dest: Destination) -> f64 {
    let on = |l: u32| {
        let r = RingParams { links: l, ..*ring };
        frame_error(&r).exact_probability.unwrap_or(0.0)
    };
    match dest {
        Destination::Fixed(l) => on(l),
        Destination::Uniform if ring.links <= 1 => on(1),
        Destination::Uniform => (1..ring.links).map(on).sum::<f64>() / (ring.links - 1) as f64,
    }
}

pub fn simulate(args: &SimArgs) -> Result<Report, CliError> {
    let ring = args.ring.build()?;
    let mode: ValidityMode = args.mode.into();
    let dest = parse_destination(args.destination.as_deref(), ring.links)?;
    let config = SimConfig::new(ring, args.trials, args.seed)
        .with_mode(mode)
        .with_check(args.check.polynomial())
        .with_destination(dest);
    config.validate()?;
    let kind = args.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut params = json!({
        "kind": kind,
        "trials": args.trials,
        "seed": args.seed,
        "mode": mode.label(),
        "check": args.check.label(),
        "ring": ring_json(&ring),
        "destination": dest,
    });
    if args.kind == SimKind::Compare {
        params["seeds"] = json!(args.seeds);
    }
    let mut report = Report::new("simulate", params);
    report.envelope.warnings = ring.warnings();
    match args.kind {
        SimKind::Frames => {
            let t = run(&config)?;
            let mut sec = Section::new("Outcomes", &["class", "count", "fraction", "wilson low", "wilson high"]);
            let tally = tally_json(&t, &Outcome::ALL[..6], &mut sec);
            let predicted = struck_prediction(&ring, dest);
            let mut pred = Section::new("Prediction", &["quantity", "simulated", "predicted"]);
            pred.row(vec!["struck fraction".into(), sci_text(t.struck_fraction()), sci_text(predicted)]);
            let mut predictions = json!({ "struck_fraction": sci(predicted) });
            if args.check == CheckArg::Fddi {
                let rows = &mode_rows(mode)[2..];
                let ue: f64 = rows.iter().map(|r| r.evaluate(&ring).probability).sum();
                pred.row(vec![
                    "undetected fraction".into(),
                    sci_text(t.fraction(Outcome::UndetectedError)),
                    sci_text(ue),
                ]);
                predictions["undetected_fraction"] = sci(ue);
            } else {
                report
                    .envelope
                    .warnings
                    .push("undetected-error predictions assume the 32-bit check and are omitted".into());
            }
            let undetected: Vec<Value> =
                t.undetected.iter().map(|u| json!({ "trial": u.trial, "mechanism": u.mechanism })).collect();
            report.envelope.results = json!({
                "tally": tally,
                "predicted": predictions,
                "undetected_instances": undetected,
            });
            report.envelope.warnings.push(ABORT_NOTE.into());
            report.sections.push(sec);
            report.sections.push(pred);
        }
        SimKind::Tokens => {
            let t = run_token(&config)?;
            let mut sec = Section::new("Outcomes", &["class", "count", "fraction", "wilson low", "wilson high"]);
            let tally = tally_json(&t, &[Outcome::TokenLost], &mut sec);
            let predicted = token_loss(&ring).exact_probability.unwrap_or(0.0);
            let mut pred = Section::new("Prediction", &["quantity", "simulated", "predicted"]);
            pred.row(vec!["token loss".into(), sci_text(t.fraction(Outcome::TokenLost)), sci_text(predicted)]);
            pred.row(vec!["restricted flag changed".into(), t.token_conversions.to_string(), "0".into()]);
            report.envelope.results = json!({
                "tally": tally,
                "token_conversions": t.token_conversions,
                "predicted": { "token_loss": sci(predicted), "token_conversions": 0 },
            });
            report.sections.push(sec);
            report.sections.push(pred);
        }
        SimKind::Merge => {
            let m = merge_scenario(&config.check, args.trials, args.seed);
            let mut sec = Section::new(
                "Merged frames",
                &["trials", "intact", "accepted", "rate", "expected", "wilson low", "wilson high", "z"],
            );
            sec.row(vec![
                m.trials.to_string(),
                m.intact.to_string(),
                m.accepted.to_string(),
                sci_text(m.rate),
                sci_text(m.expected_rate),
                sci_text(m.wilson_95.0),
                sci_text(m.wilson_95.1),
                format!("{:.2}", m.z_score()),
            ]);
            report.envelope.results = json!({
                "trials": m.trials,
                "intact": m.intact,
                "accepted": m.accepted,
                "rate": sci(m.rate),
                "wilson_95": [sci(m.wilson_95.0), sci(m.wilson_95.1)],
                "predicted": { "rate": sci(m.expected_rate) },
                "z_score": sci(m.z_score()),
            });
            report.sections.push(sec);
        }
        SimKind::Compare => {
            let seeds: Vec<u64> = (args.seed..args.seed + args.seeds.max(1)).collect();
            let r = compare_modes(&config, &seeds)?;
            let mut sec = Section::new("Enhanced against baseline", &["seed", "enhanced", "baseline"]);
            for s in &r.per_seed {
                sec.row(vec![s.seed.to_string(), s.enhanced_undetected.to_string(), s.baseline_undetected.to_string()]);
            }
            let mut mech = Section::new("Mechanisms", &["mechanism", "count"]);
            for (m, n) in &r.mechanisms {
                mech.row(vec![format!("{m:?}"), n.to_string()]);
            }
            report.envelope.results = json!({
                "per_seed": r.per_seed,
                "enhanced_total": r.enhanced_total(),
                "baseline_total": r.baseline_total(),
                "implication_violations": r.implication_violations,
                "unexplained": r.unexplained,
                "mechanisms": r.mechanisms,
                "holds": r.holds(),
            });
            report.envelope.passed = Some(r.holds());
            report.sections.push(sec);
            report.sections.push(mech);
        }
    }
    Ok(report)
}
