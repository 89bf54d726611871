use std::collections::BTreeSet;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::message::{Alphabet, Message};
use crate::segmentation::Segmentation;

/// How a delimiter unit attaches to the words around it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attachment {
    /// Delimiter starts the following word (" a", " ab", …).
    Leading,
    /// Delimiter ends the preceding word ("a ", "ab ", …).
    Trailing,
    /// Each delimiter unit is its own one-unit segment.
    Standalone,
}

/// Delimiter set and attachment mode for word tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelimiterPolicy {
    delimiters: BTreeSet<char>,
    attachment: Attachment,
}

impl Default for DelimiterPolicy {
    fn default() -> Self {
        Self { delimiters: BTreeSet::from([' ']), attachment: Attachment::Leading }
    }
}

impl DelimiterPolicy {
    pub fn new<I: IntoIterator<Item = char>>(delimiters: I, attachment: Attachment) -> Result<Self> {
        let delimiters: BTreeSet<char> = delimiters.into_iter().collect();
        if delimiters.is_empty() {
            return Err(Error::InvalidTiling("delimiter set is empty".into()));
        }
        Ok(Self { delimiters, attachment })
    }

    pub fn attachment(&self) -> Attachment {
        self.attachment
    }

    pub fn is_delimiter(&self, c: char) -> bool {
        self.delimiters.contains(&c)
    }
}

/// One segment per alphabet unit; scope equals the unit count.
pub fn tokenize_chars(msg: &Arc<Message>) -> Segmentation {
    let len = msg.len_units() as u32;
    let bounds: Vec<u32> = (0..=len).collect();
    Segmentation::from_raw(msg.clone(), bounds)
}

/// Splits at delimiter units, attaching each delimiter per the policy.
///
/// Leading mode cuts before every delimiter unit, trailing cuts after it, and
/// standalone cuts on both sides. Tiling completeness holds for messages that
/// start or end with delimiters: a delimiter run with no word to attach to
/// simply yields its own segments.
pub fn tokenize_words(msg: &Arc<Message>, policy: &DelimiterPolicy) -> Segmentation {
    let units = msg.units();
    let mut interior: Vec<u32> = Vec::new();
    for (i, &c) in units.iter().enumerate() {
        if !policy.is_delimiter(c) {
            continue;
        }
        match policy.attachment() {
            Attachment::Leading => {
                if i > 0 {
                    interior.push(i as u32);
                }
            }
            Attachment::Trailing => {
                if i + 1 < units.len() {
                    interior.push((i + 1) as u32);
                }
            }
            Attachment::Standalone => {
                if i > 0 {
                    interior.push(i as u32);
                }
                if i + 1 < units.len() {
                    interior.push((i + 1) as u32);
                }
            }
        }
    }
    interior.dedup();
    let mut bounds = Vec::with_capacity(interior.len() + 2);
    bounds.push(0);
    bounds.extend(interior);
    bounds.push(msg.len_units() as u32);
    Segmentation::from_raw(msg.clone(), bounds)
}

/// Expands a byte-mode message to single-bit segments over {0, 1}.
pub fn tokenize_bits(msg: &Arc<Message>) -> Result<Segmentation> {
    if msg.alphabet() != Alphabet::Bytes {
        return Err(Error::NotByteMode);
    }
    let bytes = msg.as_bytes()?;
    let bit_msg = Arc::new(Message::bits_from_bytes(&bytes)?);
    Ok(tokenize_chars(&bit_msg))
}

/// Consecutive blocks of `n` units; the final block keeps whatever remains so
/// no padding units are invented.
pub fn tokenize_ngram(msg: &Arc<Message>, n: usize) -> Result<Segmentation> {
    if n == 0 {
        return Err(Error::InvalidBlockSize);
    }
    let len = msg.len_units();
    let interior = (1..len.div_ceil(n)).map(|k| k * n);
    Segmentation::from_boundaries(msg.clone(), interior)
}

/// Observation-scale selector as used by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Chars,
    Words,
    Bits,
    Ngram(usize),
    Fundamental,
}

impl Scale {
    pub fn label(&self) -> String {
        match self {
            Scale::Chars => "chars".into(),
            Scale::Words => "words".into(),
            Scale::Bits => "bits".into(),
            Scale::Ngram(n) => format!("ngram:{n}"),
            Scale::Fundamental => "fundamental".into(),
        }
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chars" => Ok(Scale::Chars),
            "words" => Ok(Scale::Words),
            "bits" => Ok(Scale::Bits),
            "fundamental" => Ok(Scale::Fundamental),
            _ => {
                if let Some(n) = s.strip_prefix("ngram:") {
                    let n: usize = n.parse().map_err(|_| Error::InvalidScale(s.into()))?;
                    if n == 0 {
                        return Err(Error::InvalidBlockSize);
                    }
                    return Ok(Scale::Ngram(n));
                }
                Err(Error::InvalidScale(s.into()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::SymbolProfile;

    const STAIRCASE: &str = " a ab abc abcd abcde abcdef abcdefg";

    fn msg(s: &str) -> Arc<Message> {
        Arc::new(Message::from_text(s).unwrap())
    }

    #[test]
    fn char_scale_on_staircase() {
        let seg = tokenize_chars(&msg(STAIRCASE));
        assert_eq!(seg.segment_count(), 35);
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.diversity(), 8);
        assert!((p.entropy().unwrap() - 0.937).abs() < 1e-3);
    }

    #[test]
    fn char_scale_degenerate_and_uniform() {
        let p = SymbolProfile::from_segmentation(&tokenize_chars(&msg("aa")));
        assert_eq!(p.diversity(), 1);
        assert_eq!(p.entropy().unwrap(), 0.0);
        let p = SymbolProfile::from_segmentation(&tokenize_chars(&msg("ab")));
        assert_eq!(p.diversity(), 2);
        assert_eq!(p.entropy().unwrap(), 1.0);
    }

    #[test]
    fn word_scale_leading_attachment() {
        let seg = tokenize_words(&msg(STAIRCASE), &DelimiterPolicy::default());
        assert_eq!(seg.segment_count(), 7);
        let sizes: Vec<usize> = (0..7).map(|i| seg.segment_size(i)).collect();
        assert_eq!(sizes, vec![2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(seg.segment_string(0), " a");
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.diversity(), 7);
        assert!((p.entropy().unwrap() - 0.957).abs() < 1e-3);
    }

    #[test]
    fn word_scale_without_delimiters_is_one_segment() {
        let seg = tokenize_words(&msg("abc"), &DelimiterPolicy::default());
        assert_eq!(seg.segment_count(), 1);
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.entropy().unwrap(), 0.0);
    }

    #[test]
    fn word_scale_leading_delimiter_run() {
        let seg = tokenize_words(&msg("  a"), &DelimiterPolicy::default());
        let segs: Vec<String> = (0..seg.segment_count()).map(|i| seg.segment_string(i)).collect();
        assert_eq!(segs, vec![" ", " a"]);
        assert_eq!(SymbolProfile::from_segmentation(&seg).diversity(), 2);
    }

    #[test]
    fn word_scale_other_attachments() {
        let m = msg("ab cd ");
        let trailing = tokenize_words(&m, &DelimiterPolicy::new([' '], Attachment::Trailing).unwrap());
        let segs: Vec<String> =
            (0..trailing.segment_count()).map(|i| trailing.segment_string(i)).collect();
        assert_eq!(segs, vec!["ab ", "cd "]);
        let standalone =
            tokenize_words(&m, &DelimiterPolicy::new([' '], Attachment::Standalone).unwrap());
        let segs: Vec<String> =
            (0..standalone.segment_count()).map(|i| standalone.segment_string(i)).collect();
        assert_eq!(segs, vec!["ab", " ", "cd", " "]);
    }

    #[test]
    fn bit_scale_values() {
        let all_ones = Arc::new(Message::from_bytes(&[0xFF]).unwrap());
        let p = SymbolProfile::from_segmentation(&tokenize_bits(&all_ones).unwrap());
        assert_eq!(p.diversity(), 1);
        assert_eq!(p.entropy().unwrap(), 0.0);

        let half = Arc::new(Message::from_bytes(&[0xF0]).unwrap());
        let seg = tokenize_bits(&half).unwrap();
        assert_eq!(seg.segment_count(), 8);
        let p = SymbolProfile::from_segmentation(&seg);
        assert_eq!(p.diversity(), 2);
        assert_eq!(p.entropy().unwrap(), 1.0);

        assert!(tokenize_bits(&msg("text")).is_err());
    }

    #[test]
    fn ngram_blocks() {
        let m = msg(STAIRCASE);
        let whole = tokenize_ngram(&m, 35).unwrap();
        assert_eq!(whole.segment_count(), 1);
        assert_eq!(SymbolProfile::from_segmentation(&whole).entropy().unwrap(), 0.0);

        let unit = tokenize_ngram(&m, 1).unwrap();
        assert_eq!(unit, tokenize_chars(&m));

        let rep = tokenize_ngram(&msg("abcabc"), 3).unwrap();
        assert_eq!(rep.segment_count(), 2);
        let p = SymbolProfile::from_segmentation(&rep);
        assert_eq!(p.diversity(), 1);
        assert_eq!(p.entropy().unwrap(), 0.0);

        // ragged tail keeps the remainder
        let ragged = tokenize_ngram(&msg("abcde"), 2).unwrap();
        let sizes: Vec<usize> = (0..ragged.segment_count()).map(|i| ragged.segment_size(i)).collect();
        assert_eq!(sizes, vec![2, 2, 1]);

        assert!(tokenize_ngram(&m, 0).is_err());
    }

    #[test]
    fn scale_selector_parsing() {
        assert_eq!("chars".parse::<Scale>().unwrap(), Scale::Chars);
        assert_eq!("ngram:4".parse::<Scale>().unwrap(), Scale::Ngram(4));
        assert_eq!("fundamental".parse::<Scale>().unwrap(), Scale::Fundamental);
        assert!("ngram:0".parse::<Scale>().is_err());
        assert!("letters".parse::<Scale>().is_err());
        assert_eq!(Scale::Ngram(3).label(), "ngram:3");
    }
}
