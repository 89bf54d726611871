//! wasm-bindgen surface for the browser demo.
//!
//! Three operations, each taking plain strings/numbers and returning JSON, so
//! the page needs no framework glue: multi-scale analysis of a pasted text,
//! the fundamental-scale search with its full move trace, and downgrading of
//! a ranked profile for log-log plotting.

use std::sync::Arc;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use scalescope::{
    downgrade_profile, minimize_entropy, tokenize_chars, tokenize_ngram, tokenize_words,
    DelimiterPolicy, Message, SearchConfig, Segmentation, SymbolProfile,
};

#[derive(Serialize)]
struct ScaleRow {
    scale: String,
    #[serde(rename = "L_units")]
    l_units: u64,
    #[serde(rename = "scope_L")]
    scope_l: u64,
    #[serde(rename = "diversity_D")]
    diversity_d: u64,
    entropy_h: f64,
    specific_d: f64,
}

fn row(profile: &SymbolProfile, scale: &str) -> Result<ScaleRow, String> {
    Ok(ScaleRow {
        scale: scale.to_string(),
        l_units: profile.l_units(),
        scope_l: profile.scope(),
        diversity_d: profile.diversity(),
        entropy_h: profile.entropy().map_err(|e| e.to_string())?,
        specific_d: profile.specific_diversity().map_err(|e| e.to_string())?,
    })
}

fn parse_message(text: &str) -> Result<Arc<Message>, String> {
    Message::from_text(text).map(Arc::new).map_err(|e| e.to_string())
}

/// Reports for the fixed observation scales of a text: chars, words and
/// n-gram blocks of 2 and 3. Returns a JSON array of rows.
#[wasm_bindgen]
pub fn analyze_scales(text: &str) -> Result<String, String> {
    let msg = parse_message(text)?;
    let policy = DelimiterPolicy::default();
    let mut rows = Vec::new();
    let segs: Vec<(String, Segmentation)> = vec![
        ("chars".into(), tokenize_chars(&msg)),
        ("words".into(), tokenize_words(&msg, &policy)),
        ("ngram:2".into(), tokenize_ngram(&msg, 2).map_err(|e| e.to_string())?),
        ("ngram:3".into(), tokenize_ngram(&msg, 3).map_err(|e| e.to_string())?),
    ];
    for (label, seg) in &segs {
        rows.push(row(&SymbolProfile::from_segmentation(seg), label)?);
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct TraceRow {
    pass: usize,
    kind: &'static str,
    h: f64,
}

#[derive(Serialize)]
struct SymbolRow {
    s: String,
    f: u64,
    size: u64,
    p: f64,
}

#[derive(Serialize)]
struct SearchView {
    report: ScaleRow,
    initial: Vec<ScaleRow>,
    trace: Vec<TraceRow>,
    segments: Vec<String>,
    symbols: Vec<SymbolRow>,
}

/// Fundamental-scale search over a pasted text. Returns the final report,
/// the per-initialization reports, the accepted-move entropy trace, the
/// winning segmentation and its ranked symbol profile.
#[wasm_bindgen]
pub fn search_fundamental(
    text: &str,
    seed: u64,
    restarts: u32,
    max_passes: u32,
) -> Result<String, String> {
    let msg = parse_message(text)?;
    let cfg = SearchConfig {
        rng_seed: seed,
        restarts: restarts.max(1) as usize,
        max_passes: max_passes.max(1) as usize,
        ..SearchConfig::default()
    };
    let out = minimize_entropy(&msg, &cfg).map_err(|e| e.to_string())?;

    let policy = DelimiterPolicy::default();
    let mut initial = Vec::new();
    for (label, seg) in [
        ("chars", tokenize_chars(&msg)),
        ("words", tokenize_words(&msg, &policy)),
    ] {
        initial.push(row(&SymbolProfile::from_segmentation(&seg), label)?);
    }

    let view = SearchView {
        report: row(&out.profile, "fundamental")?,
        initial,
        trace: out
            .trace
            .iter()
            .map(|t| TraceRow { pass: t.pass, kind: t.kind.label(), h: t.h_after })
            .collect(),
        segments: (0..out.segmentation.segment_count())
            .map(|i| out.segmentation.segment_string(i))
            .collect(),
        symbols: out
            .profile
            .entries()
            .iter()
            .map(|e| SymbolRow {
                s: e.symbol.clone(),
                f: e.frequency,
                size: e.size,
                p: e.probability,
            })
            .collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PointRow {
    rank: f64,
    mass: f64,
}

/// Downgrades the ranked profile of `search_fundamental` (its `symbols`
/// member, or any array of {f, size} rows) to `target` points.
#[wasm_bindgen]
pub fn downgrade_points(symbols_json: &str, l_units: u64, target: u32) -> Result<String, String> {
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(symbols_json).map_err(|e| e.to_string())?;
    let entries: Vec<(String, u64, u64)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let f = r.get("f").and_then(|x| x.as_u64()).ok_or("missing f")?;
            let size = r.get("size").and_then(|x| x.as_u64()).ok_or("missing size")?;
            let s = r
                .get("s")
                .and_then(|x| x.as_str())
                .map(str::to_string)
                .unwrap_or_else(|| format!("r{i:05}"));
            Ok((s, f, size))
        })
        .collect::<Result<_, String>>()?;
    let profile = SymbolProfile::from_entries(entries, l_units).map_err(|e| e.to_string())?;
    let down = downgrade_profile(&profile, target.max(1) as usize).map_err(|e| e.to_string())?;
    let points: Vec<PointRow> =
        down.points.iter().map(|p| PointRow { rank: p.rank, mass: p.mass }).collect();
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const STAIRCASE: &str = " a ab abc abcd abcde abcdef abcdefg";

    #[test]
    fn analyze_rows_cover_the_fixed_scales() {
        let json = analyze_scales(STAIRCASE).unwrap();
        let rows: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0]["scale"], "chars");
        assert!((rows[0]["entropy_h"].as_f64().unwrap() - 0.937).abs() < 1e-3);
        assert_eq!(rows[1]["diversity_D"], 7);
        assert!(analyze_scales("").is_err());
    }

    #[test]
    fn search_view_is_plottable() {
        let json = search_fundamental(STAIRCASE, 1, 4, 48).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let final_h = v["report"]["entropy_h"].as_f64().unwrap();
        assert!(final_h <= 0.70);
        let trace = v["trace"].as_array().unwrap();
        for w in trace.windows(2) {
            assert!(w[1]["h"].as_f64().unwrap() < w[0]["h"].as_f64().unwrap());
        }
        let segments: Vec<String> = v["segments"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_string())
            .collect();
        assert_eq!(segments.concat(), STAIRCASE);
    }

    #[test]
    fn downgrade_points_conserve_mass() {
        let search = search_fundamental(STAIRCASE, 1, 4, 48).unwrap();
        let v: serde_json::Value = serde_json::from_str(&search).unwrap();
        let symbols = serde_json::to_string(&v["symbols"]).unwrap();
        let l_units = v["report"]["L_units"].as_u64().unwrap();
        let down = downgrade_points(&symbols, l_units, 3).unwrap();
        let points: Vec<serde_json::Value> = serde_json::from_str(&down).unwrap();
        assert!(points.len() <= 3);
        let mass: f64 = points.iter().map(|p| p["mass"].as_f64().unwrap()).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }
}
