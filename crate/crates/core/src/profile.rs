use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::segmentation::Segmentation;

/// Tolerance for Σ P = 1 checks on floating-point profiles.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// One ranked profile row: a distinct symbol with its frequency, size and
/// size-weighted probability f·S / L_units.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub symbol: String,
    pub frequency: u64,
    pub size: u64,
    pub probability: f64,
}

impl ProfileEntry {
    /// Units of the message covered by all occurrences of this symbol.
    pub fn covered_units(&self) -> u64 {
        self.frequency * self.size
    }
}

/// Ranked list of the distinct symbols of one interpretation.
///
/// Entries are ordered by non-increasing probability; ties break
/// lexicographically on the symbol bytes so the ranking is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolProfile {
    entries: Vec<ProfileEntry>,
    l_units: u64,
    scope: u64,
}

impl SymbolProfile {
    /// Aggregates the segments of a tiling into a ranked profile.
    ///
    /// Identical segment strings merge into a single entry; probabilities are
    /// size-weighted, so Σ P = 1 exactly up to float division.
    pub fn from_segmentation(seg: &Segmentation) -> Self {
        let mut counts: HashMap<&[char], u64> = HashMap::new();
        for s in seg.iter_segments() {
            *counts.entry(s).or_insert(0) += 1;
        }
        let l_units = seg.message().len_units() as u64;
        let mut entries: Vec<ProfileEntry> = counts
            .into_iter()
            .map(|(units, f)| {
                let size = units.len() as u64;
                ProfileEntry {
                    symbol: units.iter().collect(),
                    frequency: f,
                    size,
                    probability: (f * size) as f64 / l_units as f64,
                }
            })
            .collect();
        rank_entries(&mut entries);
        Self { entries, l_units, scope: seg.segment_count() as u64 }
    }

    /// Builds a profile from explicit (symbol, frequency, size) rows.
    ///
    /// Rows with the same symbol and size merge; the covered units must add up
    /// to `l_units` so probabilities form a distribution.
    pub fn from_entries<I, S>(rows: I, l_units: u64) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64, u64)>,
        S: Into<String>,
    {
        Self::build(rows, l_units, None)
    }

    /// As `from_entries`, but with an explicitly supplied scope (used by grid
    /// accounting, where scope counts regions rather than Σ f).
    pub(crate) fn from_entries_scoped<I, S>(rows: I, l_units: u64, scope: u64) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64, u64)>,
        S: Into<String>,
    {
        Self::build(rows, l_units, Some(scope))
    }

    fn build<I, S>(rows: I, l_units: u64, scope: Option<u64>) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64, u64)>,
        S: Into<String>,
    {
        let mut merged: HashMap<String, (u64, u64)> = HashMap::new();
        let mut total_f = 0u64;
        for (symbol, f, size) in rows {
            let symbol = symbol.into();
            if f == 0 || size == 0 {
                return Err(Error::InvalidDistribution(format!(
                    "symbol `{symbol}` needs frequency ≥ 1 and size ≥ 1"
                )));
            }
            total_f += f;
            let slot = merged.entry(symbol.clone()).or_insert((0, size));
            if slot.1 != size {
                return Err(Error::InvalidDistribution(format!(
                    "symbol `{symbol}` listed with conflicting sizes {} and {size}",
                    slot.1
                )));
            }
            slot.0 += f;
        }
        if merged.is_empty() {
            return Err(Error::InvalidDistribution("no symbols".into()));
        }
        let covered: u64 = merged.values().map(|&(f, s)| f * s).sum();
        if covered != l_units {
            return Err(Error::SymbolExceedsMessage { covered, length: l_units });
        }
        let mut entries: Vec<ProfileEntry> = merged
            .into_iter()
            .map(|(symbol, (f, size))| ProfileEntry {
                symbol,
                frequency: f,
                size,
                probability: (f * size) as f64 / l_units as f64,
            })
            .collect();
        rank_entries(&mut entries);
        Ok(Self { entries, l_units, scope: scope.unwrap_or(total_f) })
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    /// Scale D: the number of distinct symbols.
    pub fn diversity(&self) -> u64 {
        self.entries.len() as u64
    }

    /// Scope L: the total number of symbols, repeated or not.
    pub fn scope(&self) -> u64 {
        self.scope
    }

    /// Message length in alphabet units.
    pub fn l_units(&self) -> u64 {
        self.l_units
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.probability)
    }

    /// Diversity-base entropy of the profile, in [0, 1].
    pub fn entropy(&self) -> Result<f64> {
        if self.entries.is_empty() {
            return Err(Error::InvalidDistribution("empty profile".into()));
        }
        let sum: f64 = self.probabilities().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(entropy_from_probs(
            self.entries.iter().map(|e| e.probability),
            self.entries.len(),
        ))
    }

    /// Specific diversity d = D / L.
    pub fn specific_diversity(&self) -> Result<f64> {
        specific_diversity(self.diversity(), self.scope())
    }
}

/// Ranks entries by non-increasing probability, breaking ties
/// lexicographically on symbol bytes. Probability order equals the integer
/// order of f·S, so the sort is exact.
fn rank_entries(entries: &mut [ProfileEntry]) {
    entries.sort_by(|a, b| {
        b.covered_units()
            .cmp(&a.covered_units())
            .then_with(|| a.symbol.cmp(&b.symbol))
    });
}

/// Size-weighted probability f·S / L of one symbol.
pub fn symbol_probability(frequency: u64, size: u64, l_units: u64) -> Result<f64> {
    if frequency == 0 || size == 0 {
        return Err(Error::InvalidDistribution(
            "frequency and size must be at least 1".into(),
        ));
    }
    let covered = frequency * size;
    if covered > l_units {
        return Err(Error::SymbolExceedsMessage { covered, length: l_units });
    }
    Ok(covered as f64 / l_units as f64)
}

/// Entropy of a bare distribution with the base taken as its own length:
/// h = −Σ f_i log_n f_i. Frequencies must be positive and sum to 1.
pub fn entropy_flat(frequencies: &[f64]) -> Result<f64> {
    if frequencies.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if frequencies.iter().any(|&f| f <= 0.0 || !f.is_finite()) {
        return Err(Error::InvalidDistribution(
            "frequencies must be positive and finite".into(),
        ));
    }
    let sum: f64 = frequencies.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "frequencies sum to {sum}, expected 1"
        )));
    }
    Ok(entropy_from_probs(frequencies.iter().copied(), frequencies.len()))
}

/// Specific diversity d = D / L (distinct symbols per symbol).
pub fn specific_diversity(diversity: u64, scope: u64) -> Result<f64> {
    if diversity == 0 || scope == 0 || diversity > scope {
        return Err(Error::DiversityExceedsScope { diversity, scope });
    }
    Ok(diversity as f64 / scope as f64)
}

/// Shared kernel: −Σ p log_D p with D = `base_count`.
///
/// A single-symbol interpretation carries no symbolic choice, so D = 1 maps
/// to 0. Exactly uniform inputs map to exactly 1.0 rather than accumulating
/// float error through the log ratio.
pub(crate) fn entropy_from_probs<I>(probs: I, base_count: usize) -> f64
where
    I: IntoIterator<Item = f64>,
{
    if base_count <= 1 {
        return 0.0;
    }
    let probs: Vec<f64> = probs.into_iter().collect();
    if probs.iter().all(|&p| p.to_bits() == probs[0].to_bits()) {
        return 1.0;
    }
    let nat: f64 = probs.iter().map(|&p| -p * p.ln()).sum();
    nat / (base_count as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::Message;
    use std::sync::Arc;

    /// 35-unit staircase text used across the worked-example tests.
    pub(crate) const STAIRCASE: &str = " a ab abc abcd abcde abcdef abcdefg";

    fn staircase() -> Arc<Message> {
        Arc::new(Message::from_text(STAIRCASE).unwrap())
    }

    #[test]
    fn probability_is_size_weighted() {
        assert!((symbol_probability(5, 4, 35).unwrap() - 20.0 / 35.0).abs() < 1e-12);
        assert_eq!(symbol_probability(1, 35, 35).unwrap(), 1.0);
        assert!((symbol_probability(7, 1, 35).unwrap() - 0.2).abs() < 1e-12);
        assert!(matches!(
            symbol_probability(5, 8, 35),
            Err(Error::SymbolExceedsMessage { covered: 40, length: 35 })
        ));
        assert!(symbol_probability(0, 4, 35).is_err());
    }

    #[test]
    fn char_tiling_profile_matches_frequency_list() {
        let m = staircase();
        let seg = crate::tokenize::tokenize_chars(&m);
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.diversity(), 8);
        assert_eq!(p.scope(), 35);
        let freq: HashMap<&str, u64> = p
            .entries()
            .iter()
            .map(|e| (e.symbol.as_str(), e.frequency))
            .collect();
        let expect = [(" ", 7), ("a", 7), ("b", 6), ("c", 5), ("d", 4), ("e", 3), ("f", 2), ("g", 1)];
        for (s, f) in expect {
            assert_eq!(freq[s], f, "frequency of {s:?}");
        }
        assert!((p.probabilities().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn word_tiling_profile_has_one_of_each_size() {
        let m = staircase();
        let seg = crate::tokenize::tokenize_words(&m, &crate::tokenize::DelimiterPolicy::default());
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.diversity(), 7);
        let mut sizes: Vec<u64> = p.entries().iter().map(|e| e.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3, 4, 5, 6, 7, 8]);
        assert!(p.entries().iter().all(|e| e.frequency == 1));
    }

    #[test]
    fn low_entropy_tiling_profile() {
        let m = staircase();
        let seg = Segmentation::from_segments(
            m,
            &[" a a", "b", " abc", " abc", "d", " abc", "de", " abc", "de", "f", " abc", "def", "g"],
        )
        .unwrap();
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.diversity(), 8);
        let mut covered: Vec<u64> = p.entries().iter().map(|e| e.covered_units()).collect();
        covered.sort_unstable();
        assert_eq!(covered, vec![1, 1, 1, 1, 3, 4, 4, 20]);
        assert!((p.entropy().unwrap() - 0.689).abs() < 1e-3);
    }

    #[test]
    fn entropy_worked_values() {
        let m = staircase();
        let chars = SymbolProfile::from_segmentation(&crate::tokenize::tokenize_chars(&m));
        assert!((chars.entropy().unwrap() - 0.937).abs() < 1e-3);
        let words = SymbolProfile::from_segmentation(&crate::tokenize::tokenize_words(
            &m,
            &crate::tokenize::DelimiterPolicy::default(),
        ));
        assert!((words.entropy().unwrap() - 0.957).abs() < 1e-3);
    }

    #[test]
    fn entropy_conventions() {
        // uniform distributions hit 1 exactly
        let uniform = SymbolProfile::from_entries(
            [("aa", 1u64, 2u64), ("bb", 1, 2), ("cc", 1, 2), ("dd", 1, 2)],
            8,
        )
        .unwrap();
        assert_eq!(uniform.entropy().unwrap(), 1.0);
        // a single symbol carries no choice
        let single = SymbolProfile::from_entries([("aaaa", 1u64, 4u64)], 4).unwrap();
        assert_eq!(single.entropy().unwrap(), 0.0);
    }

    #[test]
    fn split_accounting_regression() {
        // raw 8-row accounting of splitting the size-4 word out of the
        // staircase word tiling, duplicates kept separate
        let raw: Vec<f64> = [2.0, 3.0, 5.0, 6.0, 7.0, 8.0, 3.0, 1.0]
            .iter()
            .map(|x| x / 35.0)
            .collect();
        assert!((entropy_flat(&raw).unwrap() - 0.926).abs() < 1e-3);
        // same distribution as an 8-entry profile of distinct symbols
        let rows: [(&str, u64, u64); 8] = [
            (" a", 1, 2),
            (" ab", 1, 3),
            (" abcd", 1, 5),
            (" abcde", 1, 6),
            (" abcdef", 1, 7),
            (" abcdefg", 1, 8),
            ("zab", 1, 3),
            ("c", 1, 1),
        ];
        let p = SymbolProfile::from_entries(rows, 35).unwrap();
        assert_eq!(p.diversity(), 8);
        assert!((p.entropy().unwrap() - 0.926).abs() < 1e-3);
    }

    #[test]
    fn drifted_tiling_entropy() {
        // staircase low-entropy tiling with one boundary drifted left by 1
        let m = staircase();
        let seg = Segmentation::from_segments(
            m,
            &[" a a", "b", " abc", " abc", "d", " ab", "cde", " abc", "de", "f", " abc", "def", "g"],
        )
        .unwrap();
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.diversity(), 10);
        assert!((p.entropy().unwrap() - 0.785).abs() < 1e-3);
    }

    #[test]
    fn flat_entropy_values() {
        let stair: Vec<f64> = [7.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]
            .iter()
            .map(|x| x / 35.0)
            .collect();
        assert!((entropy_flat(&stair).unwrap() - 0.937).abs() < 1e-3);
        assert_eq!(entropy_flat(&[0.5, 0.5]).unwrap(), 1.0);
        let tones: Vec<f64> = [11.0, 6.0, 5.0, 3.0, 5.0].iter().map(|x| x / 30.0).collect();
        assert!((entropy_flat(&tones).unwrap() - 0.943).abs() < 1e-3);
        assert!(entropy_flat(&[]).is_err());
        assert!(entropy_flat(&[0.9, 0.2]).is_err());
        assert!(entropy_flat(&[1.0, -0.0]).is_err());
    }

    #[test]
    fn specific_diversity_table_cells() {
        let d = specific_diversity(4, 3136).unwrap();
        assert!((d - 0.00128).abs() < 5e-5);
        assert!((specific_diversity(4, 36).unwrap() - 0.111).abs() < 5e-4);
        assert!((specific_diversity(2, 6).unwrap() - 0.333).abs() < 5e-4);
        assert!((specific_diversity(5, 8).unwrap() - 0.625).abs() < 1e-12);
        assert!(specific_diversity(9, 8).is_err());
        assert!(specific_diversity(0, 8).is_err());
    }

    #[test]
    fn ranking_is_deterministic() {
        let p = SymbolProfile::from_entries(
            [("b", 2u64, 1u64), ("a", 2, 1), ("cc", 1, 2), ("dd", 3, 2)],
            12,
        )
        .unwrap();
        let order: Vec<&str> = p.entries().iter().map(|e| e.symbol.as_str()).collect();
        // dd covers 6; a, b, cc cover 2 each and fall back to byte order
        assert_eq!(order, vec!["dd", "a", "b", "cc"]);
    }

    #[test]
    fn duplicate_rows_merge() {
        let p = SymbolProfile::from_entries([("ab", 1u64, 2u64), ("ab", 2, 2)], 6).unwrap();
        assert_eq!(p.diversity(), 1);
        assert_eq!(p.entries()[0].frequency, 3);
        assert!(SymbolProfile::from_entries([("ab", 1u64, 2u64), ("ab", 1, 3)], 5).is_err());
    }

    #[test]
    fn coverage_mismatch_rejected() {
        assert!(SymbolProfile::from_entries([("ab", 1u64, 2u64)], 3).is_err());
    }
}
