use clusterpic::equivalence::{balance as balance_picture, canonical_string};
use clusterpic::graph::dual_graph;
use clusterpic::input::parse_input;
use clusterpic::notation::to_bracket;
use clusterpic::report::{analyze as analyze_curve, canonical_curve};
use clusterpic::{Error, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn error_json(e: &Error) -> String {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string()
}

fn analyze_inner(text: &str, format: &str) -> Result<String> {
    let report = analyze_curve(&parse_input(text)?)?;
    Ok(if format == "text" { report.to_text() } else { report.to_json() })
}

fn dot_inner(text: &str) -> Result<String> {
    let c = parse_input(text)?;
    let (pic, g) = canonical_curve(&c.picture, &c.galois);
    Ok(dual_graph(&pic, &g)?.to_dot())
}

fn balance_inner(text: &str) -> Result<String> {
    let c = parse_input(text)?;
    let (b, moves) = balance_picture(&c.picture);
    let moves: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
    Ok(json!({ "picture": to_bracket(&b, None), "moves": moves, "canonical": canonical_string(&b) }).to_string())
}

/// Invariant report as JSON, or plain text when `format` is "text".
/// Errors come back as `{"error": {...}}`.
#[wasm_bindgen]
pub fn analyze(text: &str, format: &str) -> String {
    analyze_inner(text, format).unwrap_or_else(|e| error_json(&e))
}

/// Graphviz source for the dual graph of the special fibre.
#[wasm_bindgen]
pub fn dot(text: &str) -> String {
    dot_inner(text).unwrap_or_else(|e| error_json(&e))
}

#[wasm_bindgen]
pub fn balance(text: &str) -> String {
    balance_inner(text).unwrap_or_else(|e| error_json(&e))
}
