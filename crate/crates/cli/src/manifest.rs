use serde::{Deserialize, Serialize};

/// Reproducibility header embedded verbatim in every output artifact:
/// re-running the same manifest reproduces the artifact byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub scales: Vec<String>,
    pub mode: String,
    pub seed: u64,
    pub restarts: usize,
    pub max_passes: usize,
    pub oracle_cap: usize,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target_points: Option<usize>,
    pub version: String,
}

impl RunManifest {
    /// Single-line JSON form, used as the `# manifest …` header of TSV output.
    pub fn compact(&self) -> String {
        serde_json::to_string(self).expect("static schema")
    }
}
