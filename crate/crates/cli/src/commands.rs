use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;

use scalescope::{
    downgrade_profile, exhaustive_min_entropy, minimize_entropy, scale_report, tokenize_bits,
    tokenize_chars, tokenize_ngram, tokenize_words, DowngradePoint,
    DowngradedProfile, Grid, GridOptions, GridTiling, Message, Scale, ScaleReport, SearchConfig,
    SearchOutcome, SymbolProfile,
};

use crate::manifest::RunManifest;

/// Exit-code classes: 1 usage, 2 input, 3 internal invariant violation.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

/// Library errors reachable through bad inputs map to input errors; the rest
/// indicate broken internal invariants.
fn classify(err: scalescope::Error) -> CliError {
    use scalescope::Error::*;
    match err {
        EmptyMessage | GridParse(_) | PartitionError(_) | InvalidScale(_)
        | EnumerationCap { .. } | InvalidBlockSize | NotByteMode | InvalidDowngradeTarget => {
            CliError::Input(err.to_string())
        }
        _ => CliError::Internal(err.to_string()),
    }
}

fn io_err(path: &Path, err: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {err}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Text,
    Bytes,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Text => "text",
            Mode::Bytes => "bytes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

impl Format {
    pub fn label(&self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Json => "json",
        }
    }
}

fn read_message(path: &Path, mode: Mode) -> Result<Arc<Message>, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let msg = match mode {
        Mode::Text => {
            let text = String::from_utf8(bytes).map_err(|_| {
                CliError::Input(format!(
                    "{}: not valid UTF-8; use --mode bytes",
                    path.display()
                ))
            })?;
            Message::from_text(&text)
        }
        Mode::Bytes => Message::from_bytes(&bytes),
    };
    msg.map(Arc::new).map_err(classify)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into())
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
    }
    fs::write(path, content).map_err(|e| io_err(path, e))
}

fn raw(json: &str) -> Result<Box<RawValue>, CliError> {
    RawValue::from_string(json.to_string())
        .map_err(|e| CliError::Internal(format!("canonical JSON failed to re-parse: {e}")))
}

const TSV_HEADER: &str = "path\tscale\tL_units\tscope_L\tdiversity_D\tentropy_h\tspecific_d";

fn tsv_row(path: &str, r: &ScaleReport) -> String {
    format!(
        "{path}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
        r.scale, r.l_units, r.scope_l, r.diversity_d, r.entropy_h, r.specific_d
    )
}

/// Per-(file, scale) work shared by `analyze` and `corpus`.
struct ScaleRun {
    report: ScaleReport,
    /// Canonical profile JSON of the fundamental search, when that scale ran.
    fundamental_profile: Option<String>,
}

fn run_scale(
    path: &Path,
    scale: &Scale,
    mode: Mode,
    cfg: &SearchConfig,
) -> Result<ScaleRun, CliError> {
    match scale {
        Scale::Bits => {
            // bit expansion always reads the raw bytes of the file
            let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
            let msg = Message::from_bytes(&bytes).map(Arc::new).map_err(classify)?;
            let seg = tokenize_bits(&msg).map_err(classify)?;
            let report = scale_report(&seg, "bits", None).map_err(classify)?;
            Ok(ScaleRun { report, fundamental_profile: None })
        }
        Scale::Chars | Scale::Words | Scale::Ngram(_) => {
            let msg = read_message(path, mode)?;
            let seg = match scale {
                Scale::Chars => tokenize_chars(&msg),
                Scale::Words => tokenize_words(&msg, &cfg.word_policy),
                Scale::Ngram(n) => tokenize_ngram(&msg, *n).map_err(classify)?,
                _ => unreachable!(),
            };
            let report = scale_report(&seg, &scale.label(), None).map_err(classify)?;
            Ok(ScaleRun { report, fundamental_profile: None })
        }
        Scale::Fundamental => {
            let msg = read_message(path, mode)?;
            let out = minimize_entropy(&msg, cfg).map_err(classify)?;
            let report =
                scale_report(&out.segmentation, "fundamental", None).map_err(classify)?;
            let profile = out.profile.canonical_json("fundamental").map_err(classify)?;
            Ok(ScaleRun { report, fundamental_profile: Some(profile) })
        }
    }
}

fn parse_scales(scales: &[String]) -> Result<Vec<Scale>, CliError> {
    if scales.is_empty() {
        return Err(CliError::Usage("at least one --scale is required".into()));
    }
    scales
        .iter()
        .map(|s| s.parse::<Scale>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn search_config(manifest: &RunManifest) -> SearchConfig {
    SearchConfig {
        rng_seed: manifest.seed,
        restarts: manifest.restarts,
        max_passes: manifest.max_passes,
        ..SearchConfig::default()
    }
}

#[derive(Serialize)]
struct ReportRow {
    path: String,
    report: ScaleReport,
}

#[derive(Serialize)]
struct ErrorRow {
    path: String,
    error: String,
}

#[derive(Serialize)]
struct TableJson<'a> {
    manifest: &'a RunManifest,
    reports: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<ErrorRow>,
}

/// One (path, scale) task list processed in a worker pool; rows come back
/// sorted by (path, scale position) so worker count never changes the bytes.
fn run_table(
    files: &[PathBuf],
    scales: &[Scale],
    mode: Mode,
    manifest: &RunManifest,
    out_dir: Option<&Path>,
) -> Result<(Vec<ReportRow>, Vec<ErrorRow>), CliError> {
    let cfg = search_config(manifest);
    let mut tasks: Vec<(usize, usize)> = Vec::new();
    for f in 0..files.len() {
        for s in 0..scales.len() {
            tasks.push((f, s));
        }
    }
    let results: Vec<(usize, usize, Result<ScaleRun, CliError>)> = tasks
        .par_iter()
        .map(|&(f, s)| {
            (f, s, run_scale(&files[f], &scales[s], mode, &cfg))
        })
        .collect();

    let mut indexed: Vec<(String, usize, Result<ScaleRun, CliError>)> = results
        .into_iter()
        .map(|(f, s, r)| (files[f].display().to_string(), s, r))
        .collect();
    indexed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for (path, _, result) in indexed {
        match result {
            Ok(run) => {
                if let (Some(profile), Some(dir)) = (&run.fundamental_profile, out_dir) {
                    let stem = file_stem(Path::new(&path));
                    let sidecar = dir.join(format!("{stem}.fundamental.json"));
                    let doc = ProfileEnvelope { manifest, profile: raw(profile)? };
                    write_file(&sidecar, &pretty(&doc)?)?;
                }
                reports.push(ReportRow { path, report: run.report });
            }
            Err(CliError::Internal(m)) => return Err(CliError::Internal(m)),
            Err(e) => errors.push(ErrorRow { path, error: e.message().to_string() }),
        }
    }
    Ok((reports, errors))
}

fn pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
}

fn emit_table(
    manifest: &RunManifest,
    format: Format,
    reports: Vec<ReportRow>,
    errors: Vec<ErrorRow>,
) -> Result<i32, CliError> {
    match format {
        Format::Tsv => {
            println!("# manifest {}", manifest.compact());
            println!("{TSV_HEADER}");
            for row in &reports {
                println!("{}", tsv_row(&row.path, &row.report));
            }
            for e in &errors {
                println!("# error\t{}\t{}", e.path, e.error);
            }
        }
        Format::Json => {
            let doc = TableJson { manifest, reports, errors };
            println!("{}", pretty(&doc)?);
            return Ok(if doc_has_errors(&doc) { 2 } else { 0 });
        }
    }
    Ok(if errors.is_empty() { 0 } else { 2 })
}

fn doc_has_errors(doc: &TableJson<'_>) -> bool {
    !doc.errors.is_empty()
}

/// `analyze`: one report per (file, scale).
pub fn cmd_analyze(
    files: &[PathBuf],
    scales: &[String],
    mode: Mode,
    format: Format,
    out: Option<&Path>,
    manifest: &RunManifest,
) -> Result<i32, CliError> {
    let scales = parse_scales(scales)?;
    if files.is_empty() {
        return Err(CliError::Usage("at least one input file is required".into()));
    }
    let (reports, errors) = run_table(files, &scales, mode, manifest, out)?;
    emit_table(manifest, format, reports, errors)
}

/// `corpus`: recursive batch run over a directory, parallel across files.
pub fn cmd_corpus(
    dir: &Path,
    scales: &[String],
    mode: Mode,
    format: Format,
    manifest: &RunManifest,
) -> Result<i32, CliError> {
    let scales = parse_scales(scales)?;
    if !dir.is_dir() {
        return Err(CliError::Input(format!("{}: not a directory", dir.display())));
    }
    let mut files: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .collect();
    files.sort_by_key(|p| p.display().to_string());
    let (reports, errors) = run_table(&files, &scales, mode, manifest, None)?;
    emit_table(manifest, format, reports, errors)
}

#[derive(Serialize)]
struct ProfileEnvelope<'a> {
    manifest: &'a RunManifest,
    profile: Box<RawValue>,
}

#[derive(Serialize)]
struct InitRow {
    scale: String,
    #[serde(serialize_with = "scalescope::jsonfmt::f12")]
    entropy_h: f64,
}

#[derive(Serialize)]
struct SearchJson<'a> {
    manifest: &'a RunManifest,
    #[serde(serialize_with = "scalescope::jsonfmt::f12")]
    entropy_h: f64,
    #[serde(rename = "diversity_D")]
    diversity_d: u64,
    #[serde(rename = "scope_L")]
    scope_l: u64,
    initial: Vec<InitRow>,
    moves_accepted: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(serialize_with = "f12_opt")]
    oracle_h: Option<f64>,
    outputs: Vec<String>,
}

fn f12_opt<S: serde::Serializer>(
    x: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => scalescope::jsonfmt::f12(v, s),
        None => s.serialize_none(),
    }
}

/// `search`: fundamental-scale run on one file, emitting profile,
/// segmentation and move-trace artifacts.
pub fn cmd_search(
    path: &Path,
    mode: Mode,
    oracle: bool,
    out_dir: &Path,
    manifest: &RunManifest,
) -> Result<i32, CliError> {
    let msg = read_message(path, mode)?;
    let cfg = search_config(manifest);
    let outcome = minimize_entropy(&msg, &cfg).map_err(classify)?;

    let oracle_h = if oracle {
        let (_, h) = exhaustive_min_entropy(&msg, manifest.oracle_cap).map_err(classify)?;
        if outcome.entropy < h - 1e-12 {
            return Err(CliError::Internal(format!(
                "heuristic entropy {} undercuts the exhaustive optimum {h}",
                outcome.entropy
            )));
        }
        Some(h)
    } else {
        None
    };

    let stem = file_stem(path);
    let profile_path = out_dir.join(format!("{stem}.profile.json"));
    let trace_path = out_dir.join(format!("{stem}.trace.tsv"));
    let segments_path = out_dir.join(format!("{stem}.segments.tsv"));

    let profile_json = outcome.profile.canonical_json("fundamental").map_err(classify)?;
    let envelope = ProfileEnvelope { manifest, profile: raw(&profile_json)? };
    write_file(&profile_path, &pretty(&envelope)?)?;
    write_file(&trace_path, &trace_tsv(manifest, &outcome))?;
    write_file(&segments_path, &segments_tsv(manifest, &outcome))?;

    let doc = SearchJson {
        manifest,
        entropy_h: outcome.entropy,
        diversity_d: outcome.profile.diversity(),
        scope_l: outcome.profile.scope(),
        initial: outcome
            .initial_entropies
            .iter()
            .map(|(scale, h)| InitRow { scale: scale.clone(), entropy_h: *h })
            .collect(),
        moves_accepted: outcome.trace.len(),
        oracle_h,
        outputs: vec![
            profile_path.display().to_string(),
            trace_path.display().to_string(),
            segments_path.display().to_string(),
        ],
    };
    println!("{}", pretty(&doc)?);
    Ok(0)
}

fn trace_tsv(manifest: &RunManifest, outcome: &SearchOutcome) -> String {
    let mut s = format!("# manifest {}\n", manifest.compact());
    s.push_str("pass\tkind\tposition\toffset\th_before\th_after\n");
    for e in &outcome.trace {
        s.push_str(&e.tsv_line());
        s.push('\n');
    }
    s
}

fn segments_tsv(manifest: &RunManifest, outcome: &SearchOutcome) -> String {
    let mut s = format!("# manifest {}\n", manifest.compact());
    s.push_str("index\tstart\tend\tsize\tsymbol\n");
    let seg = &outcome.segmentation;
    let bounds = seg.boundaries();
    for i in 0..seg.segment_count() {
        let symbol = serde_json::to_string(&seg.segment_string(i)).expect("string");
        s.push_str(&format!(
            "{i}\t{}\t{}\t{}\t{symbol}\n",
            bounds[i],
            bounds[i + 1],
            bounds[i + 1] - bounds[i]
        ));
    }
    s
}

#[derive(Serialize)]
struct DowngradeEnvelope<'a> {
    manifest: &'a RunManifest,
    downgraded: Box<RawValue>,
}

/// `downgrade`: collapse a ranked profile (or an already-downgraded one) to
/// a coarser point count.
pub fn cmd_downgrade(
    input: &Path,
    target: usize,
    out_dir: &Path,
    manifest: &RunManifest,
) -> Result<i32, CliError> {
    let text = fs::read_to_string(input).map_err(|e| io_err(input, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    // accept a bare payload or a manifest envelope
    let payload = value
        .get("profile")
        .or_else(|| value.get("downgraded"))
        .unwrap_or(&value);

    let down = if payload.get("symbols").is_some() {
        let profile = profile_from_json(input, payload)?;
        downgrade_profile(&profile, target).map_err(classify)?
    } else if payload.get("points").is_some() {
        let prior = downgraded_from_json(input, payload)?;
        prior.downgrade(target).map_err(classify)?
    } else {
        return Err(CliError::Input(format!(
            "{}: expected a profile (symbols) or downgraded profile (points) document",
            input.display()
        )));
    };

    let stem = file_stem(input);
    let json_path = out_dir.join(format!("{stem}.downgraded.json"));
    let plot_path = out_dir.join(format!("{stem}.plot.tsv"));
    let envelope = DowngradeEnvelope { manifest, downgraded: raw(&down.canonical_json())? };
    let doc = pretty(&envelope)?;
    write_file(&json_path, &doc)?;
    write_file(
        &plot_path,
        &format!("# manifest {}\n{}", manifest.compact(), down.plot_tsv()),
    )?;
    println!("{doc}");
    Ok(0)
}

fn json_u64(v: &serde_json::Value, key: &str, path: &Path) -> Result<u64, CliError> {
    v.get(key)
        .and_then(|x| x.as_u64())
        .ok_or_else(|| CliError::Input(format!("{}: missing integer `{key}`", path.display())))
}

fn profile_from_json(path: &Path, v: &serde_json::Value) -> Result<SymbolProfile, CliError> {
    let l_units = json_u64(v, "L_units", path)?;
    let symbols = v
        .get("symbols")
        .and_then(|s| s.as_array())
        .ok_or_else(|| CliError::Input(format!("{}: missing `symbols`", path.display())))?;
    let mut rows: Vec<(String, u64, u64)> = Vec::with_capacity(symbols.len());
    for s in symbols {
        let sym = s
            .get("s")
            .and_then(|x| x.as_str())
            .ok_or_else(|| CliError::Input(format!("{}: symbol row without `s`", path.display())))?;
        rows.push((sym.to_string(), json_u64(s, "f", path)?, json_u64(s, "size", path)?));
    }
    SymbolProfile::from_entries(rows, l_units).map_err(|e| {
        CliError::Input(format!("{}: inconsistent profile: {e}", path.display()))
    })
}

fn downgraded_from_json(
    path: &Path,
    v: &serde_json::Value,
) -> Result<DowngradedProfile, CliError> {
    let points = v
        .get("points")
        .and_then(|p| p.as_array())
        .ok_or_else(|| CliError::Input(format!("{}: missing `points`", path.display())))?;
    let mut parsed = Vec::with_capacity(points.len());
    for p in points {
        let rank = p.get("rank").and_then(|x| x.as_f64());
        let mass = p.get("mass").and_then(|x| x.as_f64());
        match (rank, mass) {
            (Some(rank), Some(mass)) => parsed.push(DowngradePoint { rank, mass }),
            _ => {
                return Err(CliError::Input(format!(
                    "{}: point rows need `rank` and `mass`",
                    path.display()
                )))
            }
        }
    }
    if parsed.is_empty() {
        return Err(CliError::Input(format!("{}: empty point list", path.display())));
    }
    Ok(DowngradedProfile {
        source_d: json_u64(v, "source_D", path).unwrap_or(parsed.len() as u64),
        target_s: json_u64(v, "target_S", path).unwrap_or(parsed.len() as u64),
        points: parsed,
    })
}

#[derive(Serialize)]
struct GridJson<'a> {
    manifest: &'a RunManifest,
    report: scalescope::GridReport,
    profile: Box<RawValue>,
}

/// `grid`: scale report of a tiled 2D grid.
pub fn cmd_grid(
    grid_path: &Path,
    tiling_path: &Path,
    rotations: bool,
    manifest: &RunManifest,
) -> Result<i32, CliError> {
    let grid_text = fs::read_to_string(grid_path).map_err(|e| io_err(grid_path, e))?;
    let tiling_text = fs::read_to_string(tiling_path).map_err(|e| io_err(tiling_path, e))?;
    let grid = Grid::parse(&grid_text).map_err(classify)?;
    let tiling = GridTiling::parse(&tiling_text).map_err(classify)?;
    let opts = GridOptions { rotation_reflection: rotations };
    let report = scalescope::grid_report(&grid, &tiling, opts).map_err(classify)?;
    let profile = scalescope::grid_profile(&grid, &tiling, opts).map_err(classify)?;
    let doc = GridJson {
        manifest,
        report,
        profile: raw(&profile.canonical_json("grid").map_err(classify)?)?,
    };
    println!("{}", pretty(&doc)?);
    Ok(0)
}
