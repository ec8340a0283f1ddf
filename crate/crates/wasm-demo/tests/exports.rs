use fddi_wasm_demo::{nrzi_explorer, rates, simulate_frames, MAX_TRIALS};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn clean_stream_round_trips() {
    let v = parse(nrzi_explorer("IIJK00T", ""));
    assert_eq!(v["sent"], "IIJK00T");
    assert_eq!(v["received"], "IIJK00T");
    assert_eq!(v["code_bits"].as_str().unwrap().len(), 35);
    assert_eq!(v["changed_symbols"].as_array().unwrap().len(), 0);
}

#[test]
fn one_event_flips_two_code_bits() {
    let v = parse(nrzi_explorer("0000", "7"));
    let sent = v["code_bits"].as_str().unwrap();
    let got = v["received_bits"].as_str().unwrap();
    let diff: Vec<usize> = sent.bytes().zip(got.bytes()).enumerate().filter(|(_, (a, b))| a != b).map(|(i, _)| i).collect();
    assert_eq!(diff, vec![7, 8]);
    assert_eq!(v["changed_symbols"], serde_json::json!([1]));
    // a second event on the same cell undoes the first
    let v = parse(nrzi_explorer("0000", "7, 7"));
    assert_eq!(v["received"], "0000");
}

#[test]
fn bad_inputs_report_errors() {
    assert!(parse(nrzi_explorer("JKZ", ""))["error"].is_string());
    assert!(parse(nrzi_explorer("0000", "x"))["error"].is_string());
    assert!(parse(nrzi_explorer("0000", "20"))["error"].is_string());
    assert!(parse(rates(0, 1e-9, 4500.0))["error"].is_string());
    assert!(parse(simulate_frames(4, 1e-4, 100.0, MAX_TRIALS + 1, 1, false))["error"].is_string());
}

#[test]
fn rates_cover_every_row() {
    let v = parse(rates(1000, 2.5e-10, 4500.0));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!((rows[0]["mean_time"].as_f64().unwrap() - 32.0).abs() < 0.05);
}

#[test]
fn simulation_tallies_every_trial() {
    let v = parse(simulate_frames(4, 1e-4, 100.0, 5000, 7, false));
    let total: u64 = v["classes"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 5000);
    let p = v["predicted_struck"].as_f64().unwrap();
    let s = &v["struck"];
    assert!(s["low"].as_f64().unwrap() < p + 0.02 && p - 0.02 < s["high"].as_f64().unwrap());
    assert_eq!(simulate_frames(4, 1e-4, 100.0, 5000, 7, false), simulate_frames(4, 1e-4, 100.0, 5000, 7, false));
}
