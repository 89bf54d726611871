//! Entropy-reduction search over tilings.
//!
//! The neighborhood consists of the three local edits that leave the
//! underlying unit sequence intact: splitting one segment, drifting the
//! boundary between two neighbors, and joining two neighbors. A greedy
//! first-improvement walk over seeded-shuffled candidates, restarted from
//! several initial tilings, approximates the minimal-entropy symbol set.
//! For short messages an exhaustive enumeration over all contiguous tilings
//! provides the exact optimum as an oracle.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::message::Message;
use crate::profile::SymbolProfile;
use crate::segmentation::Segmentation;
use crate::tokenize::{self, DelimiterPolicy, Scale};

/// Default cap on exhaustive enumeration (2^(L-1) tilings are visited).
pub const DEFAULT_ORACLE_CAP: usize = 18;

/// Strict-mode improvements must clear this margin, keeping accepted moves
/// real decreases rather than float noise.
const ACCEPT_MARGIN: f64 = 1e-9;
/// Two entropies within this distance count as a plateau step.
const PLATEAU_MARGIN: f64 = 1e-12;

/// A local tiling edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    /// Index of the segment the move acts on (for drift and join, the left one).
    pub segment: usize,
    pub kind: MoveKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Split the segment in two after `offset` units (strictly inside).
    Split { offset: usize },
    /// Shift the boundary with the right neighbor by `shift` units
    /// (positive grows this segment); both segments must keep size ≥ 1.
    Drift { shift: isize },
    /// Replace this segment and its right neighbor by their concatenation.
    Join,
}

impl MoveKind {
    pub fn class(&self) -> MoveClass {
        match self {
            MoveKind::Split { .. } => MoveClass::Split,
            MoveKind::Drift { .. } => MoveClass::Drift,
            MoveKind::Join => MoveClass::Join,
        }
    }

    /// The split offset or drift shift; 0 for join.
    pub fn offset(&self) -> isize {
        match self {
            MoveKind::Split { offset } => *offset as isize,
            MoveKind::Drift { shift } => *shift,
            MoveKind::Join => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveClass {
    Split,
    Drift,
    Join,
}

impl MoveClass {
    pub fn label(&self) -> &'static str {
        match self {
            MoveClass::Split => "split",
            MoveClass::Drift => "drift",
            MoveClass::Join => "join",
        }
    }
}

/// Reachable interval of the diversity change D′ − D for a single move.
///
/// These are the exact reachable bounds (verified by exhaustive enumeration
/// over short binary strings); they sit inside the D + 2 upper bound.
pub fn diversity_delta_bounds(class: MoveClass) -> (i64, i64) {
    match class {
        MoveClass::Split => (-1, 2),
        MoveClass::Drift => (-2, 2),
        MoveClass::Join => (-2, 1),
    }
}

/// Applies one move to a tiling, returning the edited tiling.
///
/// The unit sequence is untouched, so tiling completeness is preserved; the
/// segment count changes by +1 (split), 0 (drift) or −1 (join).
pub fn apply_move(seg: &Segmentation, mv: &Move) -> Result<Segmentation> {
    let mut bounds = seg.boundaries().to_vec();
    edit_bounds(&mut bounds, mv)?;
    Ok(Segmentation::from_raw(seg.message_arc().clone(), bounds))
}

fn edit_bounds(bounds: &mut Vec<u32>, mv: &Move) -> Result<()> {
    let segments = bounds.len() - 1;
    let i = mv.segment;
    if i >= segments {
        return Err(Error::InvalidMove(format!(
            "segment {i} out of range (count {segments})"
        )));
    }
    match mv.kind {
        MoveKind::Split { offset } => {
            let size = (bounds[i + 1] - bounds[i]) as usize;
            if offset == 0 || offset >= size {
                return Err(Error::InvalidMove(format!(
                    "split offset {offset} not inside segment of size {size}"
                )));
            }
            bounds.insert(i + 1, bounds[i] + offset as u32);
        }
        MoveKind::Drift { shift } => {
            if i + 1 >= segments {
                return Err(Error::InvalidMove("drift needs a right neighbor".into()));
            }
            if shift == 0 {
                return Err(Error::InvalidMove("drift shift must be nonzero".into()));
            }
            let moved = bounds[i + 1] as i64 + shift as i64;
            if moved <= bounds[i] as i64 || moved >= bounds[i + 2] as i64 {
                return Err(Error::InvalidMove(format!(
                    "drift shift {shift} empties a segment"
                )));
            }
            bounds[i + 1] = moved as u32;
        }
        MoveKind::Join => {
            if i + 1 >= segments {
                return Err(Error::InvalidMove("join needs a right neighbor".into()));
            }
            bounds.remove(i + 1);
        }
    }
    Ok(())
}

/// Move acceptance rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// Accept only strict entropy decreases (default).
    StrictDecrease,
    /// Also accept entropy-preserving moves, to walk plateaus; termination is
    /// then guaranteed by the pass cap alone.
    DecreaseOrEqual,
}

/// Configuration of the entropy-minimization search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Tilings to start from; the best final result across all of them wins.
    pub initializations: Vec<Scale>,
    pub max_passes: usize,
    pub restarts: usize,
    pub rng_seed: u64,
    pub acceptance: Acceptance,
    /// Candidate moves examined per pass; 0 picks a budget proportional to
    /// the message length.
    pub candidate_budget: usize,
    pub word_policy: DelimiterPolicy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            initializations: vec![Scale::Chars, Scale::Words],
            max_passes: 48,
            restarts: 6,
            rng_seed: 0,
            acceptance: Acceptance::StrictDecrease,
            candidate_budget: 0,
            word_policy: DelimiterPolicy::default(),
        }
    }
}

impl SearchConfig {
    fn budget_for(&self, len_units: usize) -> usize {
        if self.candidate_budget > 0 {
            self.candidate_budget
        } else {
            (4 * len_units).max(4096)
        }
    }
}

/// One accepted move in the audit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub pass: usize,
    pub kind: MoveClass,
    pub position: usize,
    pub offset: isize,
    pub h_before: f64,
    pub h_after: f64,
}

/// Result of an entropy-minimization run.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub segmentation: Segmentation,
    pub profile: SymbolProfile,
    pub entropy: f64,
    /// Accepted moves of the winning run.
    pub trace: Vec<TraceEntry>,
    /// Canonical entropy of each initialization, by scale label.
    pub initial_entropies: Vec<(String, f64)>,
}

/// Greedy multi-start search for a minimal-entropy tiling.
///
/// Every (initialization, restart) pair walks its own seeded candidate
/// stream, so the outcome is a pure function of the message and the config;
/// restarts may run in parallel without affecting the result. The returned
/// entropy never exceeds the entropy of any initialization.
pub fn minimize_entropy(msg: &Arc<Message>, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if msg.len_units() == 0 {
        return Err(Error::EmptyMessage);
    }
    if cfg.restarts == 0 || cfg.max_passes == 0 {
        return Err(Error::InvalidMove(
            "restarts and max_passes must be at least 1".into(),
        ));
    }
    let mut inits: Vec<(String, Segmentation)> = Vec::new();
    for scale in &cfg.initializations {
        let seg = match scale {
            Scale::Chars => tokenize::tokenize_chars(msg),
            Scale::Words => tokenize::tokenize_words(msg, &cfg.word_policy),
            Scale::Ngram(n) => tokenize::tokenize_ngram(msg, *n)?,
            Scale::Bits | Scale::Fundamental => {
                return Err(Error::InvalidScale(format!(
                    "{} cannot initialize the fundamental search",
                    scale.label()
                )))
            }
        };
        inits.push((scale.label(), seg));
    }
    if inits.is_empty() {
        return Err(Error::InvalidScale("no initializations".into()));
    }

    let initial_entropies: Vec<(String, f64)> = inits
        .iter()
        .map(|(label, seg)| {
            let h = SymbolProfile::from_segmentation(seg).entropy()?;
            Ok((label.clone(), h))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..inits.len())
        .flat_map(|i| (0..cfg.restarts).map(move |r| (i, r)))
        .collect();

    // Each job owns a stream keyed by (seed, init, restart); the best-of
    // reduction below is order-independent, so parallelism cannot leak in.
    let runs: Vec<(Vec<u32>, Vec<TraceEntry>)> = jobs
        .par_iter()
        .map(|&(init_idx, restart)| {
            let stream = derive_stream(cfg.rng_seed, init_idx as u64, restart as u64);
            run_greedy(&inits[init_idx].1, cfg, stream)
        })
        .collect();

    let units = msg.len_units();
    let mut best: Option<(f64, usize, Vec<u32>, Vec<TraceEntry>)> = None;
    for (bounds, trace) in runs {
        let seg = Segmentation::from_raw(msg.clone(), bounds.clone());
        let h = SymbolProfile::from_segmentation(&seg).entropy()?;
        let count = bounds.len() - 1;
        let better = match &best {
            None => true,
            Some((bh, bc, bb, _)) => {
                h < bh - PLATEAU_MARGIN
                    || ((h - bh).abs() <= PLATEAU_MARGIN
                        && (count < *bc || (count == *bc && bounds < *bb)))
            }
        };
        if better {
            best = Some((h, count, bounds, trace));
        }
    }
    let (entropy, _, bounds, trace) = best.expect("at least one run");
    debug_assert_eq!(*bounds.last().unwrap() as usize, units);
    let segmentation = Segmentation::from_raw(msg.clone(), bounds);
    let profile = SymbolProfile::from_segmentation(&segmentation);
    Ok(SearchOutcome { segmentation, profile, entropy, trace, initial_entropies })
}

fn derive_stream(seed: u64, init_idx: u64, restart: u64) -> ChaCha8Rng {
    // splitmix-style mixing keeps streams decorrelated across jobs
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(init_idx + 1))
        .wrapping_add(0xbf58476d1ce4e5b9u64.wrapping_mul(restart + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Incremental tiling state: symbol counts, the natural-log entropy sum and
/// the diversity, updated in O(affected symbols) per move.
struct State<'a> {
    units: &'a [char],
    la: f64,
    bounds: Vec<u32>,
    counts: HashMap<Vec<char>, u64>,
    nat: f64,
    diversity: usize,
}

/// Up to four (unit-range, count-delta) pairs affected by one move.
type Deltas = Vec<((u32, u32), i64)>;

impl<'a> State<'a> {
    fn new(seg: &Segmentation, units: &'a [char]) -> Self {
        let mut counts: HashMap<Vec<char>, u64> = HashMap::new();
        for s in seg.iter_segments() {
            *counts.entry(s.to_vec()).or_insert(0) += 1;
        }
        let la = units.len() as f64;
        // deterministic summation order via the ranked profile
        let profile = SymbolProfile::from_segmentation(seg);
        let nat = profile
            .entries()
            .iter()
            .map(|e| term(e.frequency, e.size as usize, la))
            .sum();
        Self {
            units,
            la,
            bounds: seg.boundaries().to_vec(),
            counts,
            nat,
            diversity: profile.entries().len(),
        }
    }

    fn segment_count(&self) -> usize {
        self.bounds.len() - 1
    }

    fn h(&self) -> f64 {
        if self.diversity <= 1 {
            0.0
        } else {
            (self.nat / (self.diversity as f64).ln()).clamp(0.0, 1.0)
        }
    }

    fn slice(&self, a: u32, b: u32) -> &'a [char] {
        &self.units[a as usize..b as usize]
    }

    /// Count deltas for a move, or None when the move is invalid.
    fn deltas(&self, mv: &Move) -> Option<Deltas> {
        let b = &self.bounds;
        let n = self.segment_count();
        let i = mv.segment;
        if i >= n {
            return None;
        }
        let mut raw: Deltas = Vec::with_capacity(4);
        match mv.kind {
            MoveKind::Split { offset } => {
                let (lo, hi) = (b[i], b[i + 1]);
                if offset == 0 || offset as u32 >= hi - lo {
                    return None;
                }
                let cut = lo + offset as u32;
                raw.push(((lo, hi), -1));
                raw.push(((lo, cut), 1));
                raw.push(((cut, hi), 1));
            }
            MoveKind::Drift { shift } => {
                if i + 1 >= n || shift == 0 {
                    return None;
                }
                let (lo, mid, hi) = (b[i], b[i + 1], b[i + 2]);
                let moved = mid as i64 + shift as i64;
                if moved <= lo as i64 || moved >= hi as i64 {
                    return None;
                }
                let moved = moved as u32;
                raw.push(((lo, mid), -1));
                raw.push(((mid, hi), -1));
                raw.push(((lo, moved), 1));
                raw.push(((moved, hi), 1));
            }
            MoveKind::Join => {
                if i + 1 >= n {
                    return None;
                }
                let (lo, mid, hi) = (b[i], b[i + 1], b[i + 2]);
                raw.push(((lo, mid), -1));
                raw.push(((mid, hi), -1));
                raw.push(((lo, hi), 1));
            }
        }
        // merge ranges holding identical symbol strings
        let mut merged: Deltas = Vec::with_capacity(raw.len());
        'outer: for (range, d) in raw {
            let s = self.slice(range.0, range.1);
            for m in merged.iter_mut() {
                if self.slice(m.0 .0, m.0 .1) == s {
                    m.1 += d;
                    continue 'outer;
                }
            }
            merged.push((range, d));
        }
        Some(merged)
    }

    /// Entropy after the move, without mutating the state.
    fn eval(&self, deltas: &Deltas) -> f64 {
        let mut nat = self.nat;
        let mut diversity = self.diversity as i64;
        for &((a, b), d) in deltas {
            if d == 0 {
                continue;
            }
            let s = self.slice(a, b);
            let size = s.len();
            let old = self.counts.get(s).copied().unwrap_or(0);
            let new = (old as i64 + d) as u64;
            nat += term(new, size, self.la) - term(old, size, self.la);
            diversity += (new > 0) as i64 - (old > 0) as i64;
        }
        if diversity <= 1 {
            0.0
        } else {
            (nat / (diversity as f64).ln()).clamp(0.0, 1.0)
        }
    }

    fn apply(&mut self, mv: &Move, deltas: &Deltas) {
        for &((a, b), d) in deltas {
            if d == 0 {
                continue;
            }
            let s = self.slice(a, b);
            let size = s.len();
            let old = self.counts.get(s).copied().unwrap_or(0);
            let new = (old as i64 + d) as u64;
            self.nat += term(new, size, self.la) - term(old, size, self.la);
            self.diversity += (new > 0) as usize;
            self.diversity -= (old > 0) as usize;
            if new == 0 {
                self.counts.remove(s);
            } else if old == 0 {
                self.counts.insert(s.to_vec(), new);
            } else {
                *self.counts.get_mut(s).unwrap() = new;
            }
        }
        edit_bounds(&mut self.bounds, mv).expect("validated move");
    }
}

fn term(f: u64, size: usize, la: f64) -> f64 {
    if f == 0 {
        return 0.0;
    }
    let p = (f * size as u64) as f64 / la;
    -p * p.ln()
}

fn run_greedy(
    init: &Segmentation,
    cfg: &SearchConfig,
    mut rng: ChaCha8Rng,
) -> (Vec<u32>, Vec<TraceEntry>) {
    let units = init.message().units();
    let mut state = State::new(init, units);
    let budget = cfg.budget_for(units.len());
    let mut trace = Vec::new();

    for pass in 1..=cfg.max_passes {
        let mut accepted = 0usize;
        let candidates = enumerate_or_sample(&state, budget, &mut rng);
        for mv in candidates {
            let Some(deltas) = state.deltas(&mv) else { continue };
            let before = state.h();
            let after = state.eval(&deltas);
            let accept = match cfg.acceptance {
                Acceptance::StrictDecrease => after < before - ACCEPT_MARGIN,
                Acceptance::DecreaseOrEqual => {
                    after < before - ACCEPT_MARGIN || (after - before).abs() <= PLATEAU_MARGIN
                }
            };
            if accept {
                state.apply(&mv, &deltas);
                trace.push(TraceEntry {
                    pass,
                    kind: mv.kind.class(),
                    position: mv.segment,
                    offset: mv.kind.offset(),
                    h_before: before,
                    h_after: after,
                });
                accepted += 1;
            }
        }
        if accepted == 0 {
            break;
        }
    }
    (state.bounds, trace)
}

const MAX_DRIFT: isize = 3;

/// All candidate moves when they fit the budget, otherwise a budget-sized
/// random sample. Either way the order is owned by the caller's stream.
fn enumerate_or_sample(state: &State<'_>, budget: usize, rng: &mut ChaCha8Rng) -> Vec<Move> {
    let n = state.segment_count();
    let la = state.units.len();
    let split_total = la - n;
    let drift_total = if n > 1 { (n - 1) * (2 * MAX_DRIFT as usize) } else { 0 };
    let join_total = n - 1;
    let total = split_total + drift_total + join_total;

    if total <= budget {
        let mut moves = Vec::with_capacity(total);
        for i in 0..n {
            let size = (state.bounds[i + 1] - state.bounds[i]) as usize;
            for offset in 1..size {
                moves.push(Move { segment: i, kind: MoveKind::Split { offset } });
            }
        }
        for i in 0..n.saturating_sub(1) {
            for shift in 1..=MAX_DRIFT {
                moves.push(Move { segment: i, kind: MoveKind::Drift { shift } });
                moves.push(Move { segment: i, kind: MoveKind::Drift { shift: -shift } });
            }
            moves.push(Move { segment: i, kind: MoveKind::Join });
        }
        moves.shuffle(rng);
        moves
    } else {
        let mut moves = Vec::with_capacity(budget);
        for _ in 0..budget {
            let segment = rng.random_range(0..n);
            let kind = match rng.random_range(0..3u8) {
                0 => {
                    let size = (state.bounds[segment + 1] - state.bounds[segment]) as usize;
                    if size < 2 {
                        MoveKind::Join
                    } else {
                        MoveKind::Split { offset: rng.random_range(1..size) }
                    }
                }
                1 => {
                    let mag = rng.random_range(1..=MAX_DRIFT as i64) as isize;
                    MoveKind::Drift { shift: if rng.random_bool(0.5) { mag } else { -mag } }
                }
                _ => MoveKind::Join,
            };
            moves.push(Move { segment, kind });
        }
        moves
    }
}

/// Exact minimal-entropy tiling by enumerating all 2^(L−1) contiguous
/// tilings of a short message.
///
/// Ties break toward fewer segments, then the lexicographically smallest
/// boundary vector, so the result is deterministic.
pub fn exhaustive_min_entropy(msg: &Arc<Message>, cap: usize) -> Result<(Segmentation, f64)> {
    let n = msg.len_units();
    if n == 0 {
        return Err(Error::EmptyMessage);
    }
    if n > cap {
        return Err(Error::EnumerationCap { length: n, cap });
    }
    let units = msg.units();
    let la = n as f64;

    let mut best_mask = 0u64;
    let mut best_h = f64::INFINITY;
    let mut best_count = usize::MAX;
    let mut ranges: Vec<(usize, usize)> = Vec::with_capacity(n);

    for mask in 0u64..(1u64 << (n - 1)) {
        ranges.clear();
        let mut start = 0usize;
        for pos in 1..n {
            if mask >> (pos - 1) & 1 == 1 {
                ranges.push((start, pos));
                start = pos;
            }
        }
        ranges.push((start, n));
        let h = tiling_entropy(units, &ranges, la);
        let count = ranges.len();
        let better = h < best_h - PLATEAU_MARGIN
            || ((h - best_h).abs() <= PLATEAU_MARGIN
                && (count < best_count
                    || (count == best_count && mask_boundaries(mask, n) < mask_boundaries(best_mask, n))));
        if better {
            best_mask = mask;
            best_h = h;
            best_count = count;
        }
    }

    let seg = Segmentation::from_boundaries(msg.clone(), mask_boundaries(best_mask, n))?;
    let h = SymbolProfile::from_segmentation(&seg).entropy()?;
    Ok((seg, h))
}

fn mask_boundaries(mask: u64, n: usize) -> Vec<usize> {
    (1..n).filter(|pos| mask >> (pos - 1) & 1 == 1).collect()
}

/// Entropy of an explicit tiling without building a profile: sort the segment
/// slices, run-length the duplicates, and fold. Matches the profile entropy
/// up to summation order.
fn tiling_entropy(units: &[char], ranges: &[(usize, usize)], la: f64) -> f64 {
    let mut slices: Vec<&[char]> = ranges.iter().map(|&(a, b)| &units[a..b]).collect();
    slices.sort_unstable();
    let mut nat = 0.0f64;
    let mut diversity = 0usize;
    let mut uniform = true;
    let mut first_covered: Option<u64> = None;
    let mut i = 0;
    while i < slices.len() {
        let mut j = i + 1;
        while j < slices.len() && slices[j] == slices[i] {
            j += 1;
        }
        let f = (j - i) as u64;
        let size = slices[i].len();
        let covered = f * size as u64;
        match first_covered {
            None => first_covered = Some(covered),
            Some(c) if c != covered => uniform = false,
            _ => {}
        }
        nat += term(f, size, la);
        diversity += 1;
        i = j;
    }
    if diversity <= 1 {
        0.0
    } else if uniform {
        1.0
    } else {
        (nat / (diversity as f64).ln()).clamp(0.0, 1.0)
    }
}
