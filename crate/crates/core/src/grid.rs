//! Scale, scope and resolution accounting for 2D cell grids under
//! user-supplied tilings.
//!
//! A grid is a rectangle of palette-valued cells; a tiling partitions the
//! cells into labeled regions. Regions sharing a class act as occurrences of
//! one symbol, with the class probability given by the cells it covers, so
//! the 1D size-weighted accounting carries over unchanged.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::profile::SymbolProfile;
use crate::report::{report_from_profile, Resolution, ScaleReport};

/// A W×H grid of palette tokens, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    width: usize,
    height: usize,
    cells: Vec<String>,
}

impl Grid {
    pub fn new(width: usize, height: usize, cells: Vec<String>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::GridParse("grid dimensions must be at least 1×1".into()));
        }
        if cells.len() != width * height {
            return Err(Error::GridParse(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(Self { width, height, cells })
    }

    /// Parses the plain-text format: first line `W H`, then H rows of W
    /// palette symbols (whitespace-separated tokens, or one character per
    /// cell when the row is written without spaces). `#` lines are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (width, height) = parse_dims(lines.next())?;
        let mut cells = Vec::with_capacity(width * height);
        for r in 0..height {
            let line = lines
                .next()
                .ok_or_else(|| Error::GridParse(format!("missing row {} of {height}", r + 1)))?;
            cells.extend(row_tokens(line, width, r)?);
        }
        Self::new(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.cells[row * self.width + col]
    }

    /// Distinct palette tokens.
    pub fn palette(&self) -> BTreeSet<&str> {
        self.cells.iter().map(|s| s.as_str()).collect()
    }
}

/// How regions map to classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassAssignment {
    /// Two regions share a class iff their cell-value patterns are identical
    /// (up to translation, and optionally rotation/reflection).
    Auto,
    /// Explicit region-id → class-label map.
    Explicit(BTreeMap<String, String>),
}

/// A partition of a grid into labeled regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridTiling {
    width: usize,
    height: usize,
    /// Region id per cell, row-major.
    region_of: Vec<String>,
    classes: ClassAssignment,
    /// Declared angular-position count, when the file supplies one.
    pub declared_angles: Option<u64>,
}

impl GridTiling {
    /// Parses the tiling format: `W H`, then either the single keyword
    /// `cells` (every cell its own region, classes derived automatically) or
    /// H rows of region ids, followed by an optional class section:
    /// `classes auto`, or `classes` with one `REGION CLASS` line per region.
    /// An `angles N` line declares the angular-position count.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text).peekable();
        let (width, height) = parse_dims(lines.next())?;

        let mut region_of: Vec<String> = Vec::with_capacity(width * height);
        if lines.peek().map(|l| l.trim()) == Some("cells") {
            lines.next();
            region_of.extend((0..width * height).map(|i| format!("c{i}")));
        } else {
            for r in 0..height {
                let line = lines.next().ok_or_else(|| {
                    Error::GridParse(format!("missing tiling row {} of {height}", r + 1))
                })?;
                region_of.extend(row_tokens(line, width, r)?);
            }
        }

        let mut classes = ClassAssignment::Auto;
        let mut declared_angles = None;
        let mut in_classes = false;
        for line in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["classes", "auto"] => {
                    classes = ClassAssignment::Auto;
                    in_classes = false;
                }
                ["classes"] => {
                    classes = ClassAssignment::Explicit(BTreeMap::new());
                    in_classes = true;
                }
                ["angles", n] => {
                    declared_angles = Some(n.parse().map_err(|_| {
                        Error::GridParse(format!("bad angle count `{n}`"))
                    })?);
                    in_classes = false;
                }
                [region, class] if in_classes => {
                    if let ClassAssignment::Explicit(map) = &mut classes {
                        if map.insert(region.to_string(), class.to_string()).is_some() {
                            return Err(Error::GridParse(format!(
                                "region `{region}` mapped to a class twice"
                            )));
                        }
                    }
                }
                _ => {
                    return Err(Error::GridParse(format!("unexpected line `{line}`")));
                }
            }
        }
        Ok(Self { width, height, region_of, classes, declared_angles })
    }

    /// Builds a tiling directly from per-cell region ids.
    pub fn from_regions(
        width: usize,
        height: usize,
        region_of: Vec<String>,
        classes: ClassAssignment,
    ) -> Result<Self> {
        if region_of.len() != width * height {
            return Err(Error::GridParse(format!(
                "expected {} region ids, got {}",
                width * height,
                region_of.len()
            )));
        }
        Ok(Self { width, height, region_of, classes, declared_angles: None })
    }

    /// Builds a tiling from explicit (cell-index set, class label) regions,
    /// rejecting any duplicated or missing cell.
    pub fn from_cell_sets(
        width: usize,
        height: usize,
        regions: &[(Vec<usize>, String)],
    ) -> Result<Self> {
        let total = width * height;
        let mut region_of: Vec<Option<String>> = vec![None; total];
        let mut classes = BTreeMap::new();
        for (i, (cells, class)) in regions.iter().enumerate() {
            if cells.is_empty() {
                return Err(Error::PartitionError(format!("region {i} is empty")));
            }
            let id = format!("r{i}");
            for &cell in cells {
                if cell >= total {
                    return Err(Error::PartitionError(format!(
                        "cell {cell} outside the {width}×{height} grid"
                    )));
                }
                if region_of[cell].is_some() {
                    return Err(Error::PartitionError(format!(
                        "cell {cell} covered by more than one region"
                    )));
                }
                region_of[cell] = Some(id.clone());
            }
            classes.insert(id, class.clone());
        }
        let region_of: Vec<String> = region_of
            .into_iter()
            .enumerate()
            .map(|(cell, id)| {
                id.ok_or_else(|| Error::PartitionError(format!("cell {cell} is uncovered")))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            width,
            height,
            region_of,
            classes: ClassAssignment::Explicit(classes),
            declared_angles: None,
        })
    }

    pub fn region_count(&self) -> usize {
        self.region_of.iter().collect::<BTreeSet<_>>().len()
    }
}

/// Options for grid accounting.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridOptions {
    /// Treat patterns as equivalent under rotation and reflection as well as
    /// translation. Off by default.
    pub rotation_reflection: bool,
}

/// A scale report for a grid interpretation, with the palette size and any
/// declared angular-position count carried as metadata.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GridReport {
    pub report: ScaleReport,
    pub palette_colors: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared_angles: Option<u64>,
}

struct Region {
    /// (row, col) cells, sorted.
    cells: Vec<(usize, usize)>,
    class: String,
}

/// Validates the partition and resolves regions and their classes.
fn resolve_regions(grid: &Grid, tiling: &GridTiling, opts: GridOptions) -> Result<Vec<Region>> {
    if tiling.width != grid.width || tiling.height != grid.height {
        return Err(Error::PartitionError(format!(
            "tiling is {}×{}, grid is {}×{}",
            tiling.width, tiling.height, grid.width, grid.height
        )));
    }
    // group cells by region id; the per-cell encoding makes gaps impossible,
    // so partition failures surface as empty or unknown regions in the map
    let mut by_region: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for r in 0..grid.height {
        for c in 0..grid.width {
            by_region
                .entry(tiling.region_of[r * grid.width + c].as_str())
                .or_default()
                .push((r, c));
        }
    }
    let mut regions = Vec::with_capacity(by_region.len());
    match &tiling.classes {
        ClassAssignment::Explicit(map) => {
            for (id, cells) in by_region {
                let class = map.get(id).ok_or_else(|| {
                    Error::PartitionError(format!("region `{id}` has no class mapping"))
                })?;
                regions.push(Region { cells, class: class.clone() });
            }
            for id in map.keys() {
                if !tiling.region_of.iter().any(|r| r == id) {
                    return Err(Error::PartitionError(format!(
                        "class map names region `{id}` which covers no cell"
                    )));
                }
            }
        }
        ClassAssignment::Auto => {
            for (_, cells) in by_region {
                let class = pattern_label(grid, &cells, opts);
                regions.push(Region { cells, class });
            }
        }
    }
    Ok(regions)
}

/// Canonical pattern string of a region: the translated bounding box rendered
/// row by row with `/` between rows and `.` for cells outside the region.
/// With rotation/reflection enabled, the smallest rendering across the eight
/// square-symmetry transforms is used.
fn pattern_label(grid: &Grid, cells: &[(usize, usize)], opts: GridOptions) -> String {
    let valued: Vec<(i64, i64, &str)> = cells
        .iter()
        .map(|&(r, c)| (r as i64, c as i64, grid.cell(r, c)))
        .collect();
    let compact = valued.iter().all(|(_, _, v)| v.chars().count() == 1);
    if !opts.rotation_reflection {
        return render_pattern(&valued, compact);
    }
    let mut best: Option<String> = None;
    for reflect in [false, true] {
        for rot in 0..4 {
            let transformed: Vec<(i64, i64, &str)> = valued
                .iter()
                .map(|&(r, c, v)| {
                    let (mut r, mut c) = (r, c);
                    if reflect {
                        c = -c;
                    }
                    for _ in 0..rot {
                        let (nr, nc) = (c, -r);
                        r = nr;
                        c = nc;
                    }
                    (r, c, v)
                })
                .collect();
            let s = render_pattern(&transformed, compact);
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.unwrap()
}

fn render_pattern(cells: &[(i64, i64, &str)], compact: bool) -> String {
    let min_r = cells.iter().map(|c| c.0).min().unwrap();
    let min_c = cells.iter().map(|c| c.1).min().unwrap();
    let max_r = cells.iter().map(|c| c.0).max().unwrap();
    let max_c = cells.iter().map(|c| c.1).max().unwrap();
    let w = (max_c - min_c + 1) as usize;
    let h = (max_r - min_r + 1) as usize;
    let mut cells_norm: Vec<(usize, usize, &str)> = cells
        .iter()
        .map(|&(r, c, v)| ((r - min_r) as usize, (c - min_c) as usize, v))
        .collect();
    cells_norm.sort_unstable();
    let mut canvas: Vec<Vec<&str>> = vec![vec!["."; w]; h];
    for (r, c, v) in cells_norm {
        canvas[r][c] = v;
    }
    let sep = if compact { "" } else { "," };
    canvas
        .iter()
        .map(|row| row.join(sep))
        .collect::<Vec<_>>()
        .join("/")
}

/// Ranked class profile of a tiled grid.
///
/// Classes whose regions all share one size become ordinary (f, S) rows;
/// a class with mixed region sizes is carried as a single aggregate row whose
/// covered units are the summed region sizes, which keeps Σ f·S equal to the
/// cell count.
pub fn grid_profile(grid: &Grid, tiling: &GridTiling, opts: GridOptions) -> Result<SymbolProfile> {
    let regions = resolve_regions(grid, tiling, opts)?;
    let scope = regions.len() as u64;
    let mut by_class: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for region in regions {
        by_class.entry(region.class).or_default().push(region.cells.len() as u64);
    }
    let rows: Vec<(String, u64, u64)> = by_class
        .into_iter()
        .map(|(label, sizes)| {
            if sizes.iter().all(|&s| s == sizes[0]) {
                (label, sizes.len() as u64, sizes[0])
            } else {
                (label, 1, sizes.iter().sum())
            }
        })
        .collect();
    SymbolProfile::from_entries_scoped(rows, grid.cell_count() as u64, scope)
}

/// Full scale report of a tiled grid, including the per-axis resolution when
/// the tiling is a regular lattice of equal rectangles.
pub fn grid_report(grid: &Grid, tiling: &GridTiling, opts: GridOptions) -> Result<GridReport> {
    let regions = resolve_regions(grid, tiling, opts)?;
    let resolution = lattice_resolution(grid, &regions);
    let profile = grid_profile(grid, tiling, opts)?;
    let report = report_from_profile(&profile, "grid", resolution, None)?;
    Ok(GridReport {
        report,
        palette_colors: grid.palette().len() as u64,
        declared_angles: tiling.declared_angles,
    })
}

/// Per-axis region counts when every region is the same k×m rectangle on an
/// aligned lattice; otherwise the densest row/column serve as bounds.
fn lattice_resolution(grid: &Grid, regions: &[Region]) -> Resolution {
    let mut shape: Option<(usize, usize)> = None;
    let mut regular = true;
    for region in regions {
        let min_r = region.cells.iter().map(|c| c.0).min().unwrap();
        let min_c = region.cells.iter().map(|c| c.1).min().unwrap();
        let max_r = region.cells.iter().map(|c| c.0).max().unwrap();
        let max_c = region.cells.iter().map(|c| c.1).max().unwrap();
        let (h, w) = (max_r - min_r + 1, max_c - min_c + 1);
        if h * w != region.cells.len() || min_r % h != 0 || min_c % w != 0 {
            regular = false;
            break;
        }
        match shape {
            None => shape = Some((h, w)),
            Some(s) if s != (h, w) => {
                regular = false;
                break;
            }
            _ => {}
        }
    }
    if regular {
        if let Some((h, w)) = shape {
            if grid.height.is_multiple_of(h) && grid.width.is_multiple_of(w) {
                return Resolution::Lattice {
                    horz: (grid.width / w) as u64,
                    vert: (grid.height / h) as u64,
                };
            }
        }
    }
    // bounding counts: the densest row and column
    let mut row_bound = 0u64;
    for r in 0..grid.height {
        let distinct: BTreeSet<usize> = regions
            .iter()
            .enumerate()
            .filter(|(_, reg)| reg.cells.iter().any(|&(cr, _)| cr == r))
            .map(|(i, _)| i)
            .collect();
        row_bound = row_bound.max(distinct.len() as u64);
    }
    let mut col_bound = 0u64;
    for c in 0..grid.width {
        let distinct: BTreeSet<usize> = regions
            .iter()
            .enumerate()
            .filter(|(_, reg)| reg.cells.iter().any(|&(_, cc)| cc == c))
            .map(|(i, _)| i)
            .collect();
        col_bound = col_bound.max(distinct.len() as u64);
    }
    Resolution::Irregular { row_bound, col_bound }
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn parse_dims(line: Option<&str>) -> Result<(usize, usize)> {
    let line = line.ok_or_else(|| Error::GridParse("empty file".into()))?;
    let mut it = line.split_whitespace();
    let parse = |tok: Option<&str>| -> Result<usize> {
        tok.and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::GridParse(format!("expected `W H`, got `{line}`")))
    };
    let w = parse(it.next())?;
    let h = parse(it.next())?;
    if it.next().is_some() {
        return Err(Error::GridParse(format!("expected `W H`, got `{line}`")));
    }
    Ok((w, h))
}

fn row_tokens(line: &str, width: usize, row: usize) -> Result<Vec<String>> {
    let spaced: Vec<String> = line.split_whitespace().map(str::to_string).collect();
    if spaced.len() == width {
        return Ok(spaced);
    }
    let chars: Vec<String> = line.trim().chars().map(String::from).collect();
    if spaced.len() == 1 && chars.len() == width {
        return Ok(chars);
    }
    Err(Error::GridParse(format!(
        "row {} has {} tokens, expected {width}",
        row + 1,
        spaced.len().max(chars.len())
    )))
}
