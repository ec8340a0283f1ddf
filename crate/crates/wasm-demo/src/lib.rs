//! Browser bindings. Every export takes plain numbers or strings and returns
//! a JSON document; failures come back as `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use fddi_errlab::analytics::{frame_error, RingParams, SummaryRow};
use fddi_errlab::frame::{receive, ParseEvent, StationPolicy, ValidityMode};
use fddi_errlab::noise::{apply_noise, NoiseEvent};
use fddi_errlab::phy::{
    decode_stream, encode_symbols, format_symbols, nrzi_demodulate, nrzi_modulate, parse_symbols, Level,
};
use fddi_errlab::sim::{run, wilson_interval, Outcome, SimConfig};

/// Largest Monte Carlo run the page will start; the demo runs on one thread.
pub const MAX_TRIALS: u32 = 200_000;

fn finish(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn verdicts(symbols: &[fddi_errlab::phy::Symbol]) -> Vec<Value> {
    receive(symbols, &StationPolicy::new(ValidityMode::Enhanced))
        .into_iter()
        .map(|r| {
            let kind = match r.event {
                ParseEvent::Frame(_) => "frame",
                ParseEvent::Token { .. } => "token",
                ParseEvent::Aborted { .. } => "aborted",
            };
            json!({
                "kind": kind,
                "start": r.event.sd_index(),
                "valid": r.verdict.valid,
                "failure": r.verdict.failure.label(),
            })
        })
        .collect()
}

/// Encode a symbol string, modulate it, invert the level of each listed cell
/// (comma separated, -1 is the cell before the first symbol) and decode
/// what comes out.
#[wasm_bindgen]
pub fn nrzi_explorer(symbols: &str, cells: &str) -> String {
    finish((|| {
        let sent = parse_symbols(symbols).map_err(|e| e.to_string())?;
        let bits = encode_symbols(&sent).map_err(|e| e.to_string())?;
        let levels = nrzi_modulate(&bits, Level::Low);
        let mut struck = Vec::new();
        for c in cells.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            struck.push(c.parse::<isize>().map_err(|_| format!("bad cell index {c:?}"))?);
        }
        let mut noisy = levels.clone();
        for &c in &struck {
            noisy = apply_noise(&noisy, NoiseEvent::at(c)).map_err(|e| e.to_string())?;
        }
        let rx_bits = nrzi_demodulate(&noisy);
        let received = decode_stream(&rx_bits);
        let changed: Vec<usize> = sent
            .iter()
            .zip(&received)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect();
        Ok(json!({
            "sent": format_symbols(&sent),
            "code_bits": bits.to_string(),
            "levels": levels.to_string(),
            "struck": struck,
            "noisy_levels": noisy.to_string(),
            "received_bits": rx_bits.to_string(),
            "received": format_symbols(&received),
            "changed_symbols": changed,
            "sent_verdicts": verdicts(&sent),
            "received_verdicts": verdicts(&received),
        }))
    })())
}

fn ring(links: u32, ber: f64, frame_octets: f64) -> Result<RingParams, String> {
    RingParams::from_octets(links, ber, frame_octets).map_err(|e| e.to_string())
}

/// Every row of the rate summary for one ring.
#[wasm_bindgen]
pub fn rates(links: u32, ber: f64, frame_octets: f64) -> String {
    finish((|| {
        let r = ring(links, ber, frame_octets)?;
        let rows: Vec<Value> = SummaryRow::ALL
            .iter()
            .map(|&row| {
                let rep = row.evaluate(&r);
                json!({
                    "label": row.label(),
                    "probability": rep.probability,
                    "mean_time": row.unit().from_seconds(rep.mean_time_s),
                    "unit": row.unit().label(),
                })
            })
            .collect();
        Ok(json!({ "rows": rows, "warnings": r.warnings() }))
    })())
}

/// Frames around a ring with noise on every link; tallies with 95% Wilson
/// intervals next to the closed-form frame error probability.
#[wasm_bindgen]
pub fn simulate_frames(links: u32, ber: f64, frame_octets: f64, trials: u32, seed: u32, baseline: bool) -> String {
    finish((|| {
        if trials > MAX_TRIALS {
            return Err(format!("at most {MAX_TRIALS} trials in the browser"));
        }
        let r = ring(links, ber, frame_octets)?;
        let mode = if baseline { ValidityMode::Baseline } else { ValidityMode::Enhanced };
        let cfg = SimConfig::new(r, trials as u64, seed as u64).with_mode(mode);
        let t = run(&cfg).map_err(|e| e.to_string())?;
        let n = t.trials;
        let classes: Vec<Value> = Outcome::ALL[..6]
            .iter()
            .map(|&o| {
                let (lo, hi) = wilson_interval(t.count(o), n, 1.96);
                json!({ "class": o.label(), "count": t.count(o), "fraction": t.fraction(o), "low": lo, "high": hi })
            })
            .collect();
        let (lo, hi) = wilson_interval(t.struck, n, 1.96);
        Ok(json!({
            "trials": n,
            "classes": classes,
            "struck": { "count": t.struck, "fraction": t.struck_fraction(), "low": lo, "high": hi },
            "predicted_struck": frame_error(&r).exact_probability,
            "warnings": r.warnings(),
        }))
    })())
}
