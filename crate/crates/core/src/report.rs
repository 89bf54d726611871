use serde::Serialize;

use crate::error::Result;
use crate::profile::SymbolProfile;
use crate::segmentation::Segmentation;

/// Resolution R: counts of elementary information pieces per dimension.
///
/// Only regular meshes admit per-axis counts; an irregular tiling is reported
/// as such, with the densest row/column as bounding counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resolution {
    Linear { units: u64 },
    Lattice { horz: u64, vert: u64 },
    Irregular { row_bound: u64, col_bound: u64 },
}

impl Resolution {
    /// Total elementary pieces across all dimensions, when defined.
    pub fn total(&self) -> Option<u64> {
        match self {
            Resolution::Linear { units } => Some(*units),
            Resolution::Lattice { horz, vert } => Some(horz * vert),
            Resolution::Irregular { .. } => None,
        }
    }
}

/// The (R, L, D, h, d) summary of one interpretation of a description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleReport {
    pub scale: String,
    pub resolution: Resolution,
    /// Densities r = R / Dim, present when physical dimension sizes were supplied.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::jsonfmt::f12_opt_vec"
    )]
    pub densities: Option<Vec<f64>>,
    #[serde(rename = "L_units")]
    pub l_units: u64,
    #[serde(rename = "scope_L")]
    pub scope_l: u64,
    #[serde(rename = "diversity_D")]
    pub diversity_d: u64,
    #[serde(serialize_with = "crate::jsonfmt::f12")]
    pub entropy_h: f64,
    #[serde(serialize_with = "crate::jsonfmt::f12")]
    pub specific_d: f64,
}

/// Summarizes one tiling as a scale report.
///
/// For a one-dimensional message the resolution is the unit count; when
/// `dims` supplies physical dimension sizes, densities r = R/Dim are attached.
pub fn scale_report(seg: &Segmentation, scale: &str, dims: Option<&[f64]>) -> Result<ScaleReport> {
    let profile = SymbolProfile::from_segmentation(seg);
    report_from_profile(&profile, scale, Resolution::Linear { units: profile.l_units() }, dims)
}

pub(crate) fn report_from_profile(
    profile: &SymbolProfile,
    scale: &str,
    resolution: Resolution,
    dims: Option<&[f64]>,
) -> Result<ScaleReport> {
    let densities = match (dims, resolution.total()) {
        (Some(dims), Some(total)) if !dims.is_empty() => {
            Some(dims.iter().map(|d| total as f64 / d).collect())
        }
        _ => None,
    };
    Ok(ScaleReport {
        scale: scale.to_string(),
        resolution,
        densities,
        l_units: profile.l_units(),
        scope_l: profile.scope(),
        diversity_d: profile.diversity(),
        entropy_h: profile.entropy()?,
        specific_d: profile.specific_diversity()?,
    })
}
