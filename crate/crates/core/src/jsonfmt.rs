//! Canonical JSON rendering: fixed key order (struct declaration order) and
//! floats rounded to 12 significant digits so serialized artifacts are
//! byte-reproducible across runs and platforms.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::downgrade::DowngradedProfile;
use crate::error::Result;
use crate::profile::SymbolProfile;

/// Rounds to 12 significant digits via decimal round-trip.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// `serialize_with` helper: emit a float at 12 significant digits.
pub fn f12<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig12(*x))
}

/// `serialize_with` helper for float vectors.
pub fn f12_slice<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&round_sig12(*x))?;
    }
    seq.end()
}

/// `serialize_with` helper for optional float vectors.
pub fn f12_opt_vec<S: Serializer>(
    xs: &Option<Vec<f64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match xs {
        Some(v) => f12_slice(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct SymbolJson<'a> {
    s: &'a str,
    f: u64,
    size: u64,
    #[serde(serialize_with = "f12")]
    p: f64,
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    scale: &'a str,
    #[serde(rename = "L_units")]
    l_units: u64,
    #[serde(rename = "scope_L")]
    scope_l: u64,
    #[serde(rename = "diversity_D")]
    diversity_d: u64,
    #[serde(serialize_with = "f12")]
    entropy_h: f64,
    #[serde(serialize_with = "f12")]
    specific_d: f64,
    symbols: Vec<SymbolJson<'a>>,
}

impl SymbolProfile {
    /// Canonical profile JSON: fixed key order, ranked symbol rows, floats at
    /// 12 significant digits.
    pub fn canonical_json(&self, scale: &str) -> Result<String> {
        let doc = ProfileJson {
            scale,
            l_units: self.l_units(),
            scope_l: self.scope(),
            diversity_d: self.diversity(),
            entropy_h: self.entropy()?,
            specific_d: self.specific_diversity()?,
            symbols: self
                .entries()
                .iter()
                .map(|e| SymbolJson {
                    s: &e.symbol,
                    f: e.frequency,
                    size: e.size,
                    p: e.probability,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc).expect("static schema"))
    }
}

#[derive(Serialize)]
struct PointJson {
    #[serde(serialize_with = "f12")]
    rank: f64,
    #[serde(serialize_with = "f12")]
    mass: f64,
}

#[derive(Serialize)]
struct DowngradeJson {
    #[serde(rename = "source_D")]
    source_d: u64,
    #[serde(rename = "target_S")]
    target_s: u64,
    points: Vec<PointJson>,
}

impl DowngradedProfile {
    /// Canonical downgraded-profile JSON.
    pub fn canonical_json(&self) -> String {
        let doc = DowngradeJson {
            source_d: self.source_d,
            target_s: self.target_s,
            points: self
                .points
                .iter()
                .map(|p| PointJson { rank: p.rank, mass: p.mass })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("static schema")
    }

    /// Plot-ready TSV of (rank, mass) rows for log-log rendering.
    pub fn plot_tsv(&self) -> String {
        let mut out = String::from("rank\tmass\n");
        for p in &self.points {
            out.push_str(&format!("{:.6}\t{:.6}\n", p.rank, p.mass));
        }
        out
    }
}

impl crate::search::TraceEntry {
    /// One tab-separated trace line: pass, kind, position, offset, h_before, h_after.
    pub fn tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            self.pass,
            self.kind.label(),
            self.position,
            self.offset,
            self.h_before,
            self.h_after
        )
    }
}
