use crate::error::{Error, Result};

/// The elementary-unit vocabulary a message is written in.
///
/// Units are meaningless by themselves; symbols are contiguous runs of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    /// Unicode code points of a text.
    Text,
    /// Raw bytes, one unit per byte (stored as U+0000..U+00FF).
    Bytes,
    /// Single bits rendered as '0'/'1'.
    Bits,
}

/// A raw description: an ordered sequence of alphabet units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    units: Vec<char>,
    alphabet: Alphabet,
}

impl Message {
    /// Builds a text-mode message, one unit per Unicode code point.
    pub fn from_text(text: &str) -> Result<Self> {
        let units: Vec<char> = text.chars().collect();
        if units.is_empty() {
            return Err(Error::EmptyMessage);
        }
        Ok(Self { units, alphabet: Alphabet::Text })
    }

    /// Builds a byte-mode message, one unit per byte.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::EmptyMessage);
        }
        let units = bytes.iter().map(|&b| char::from(b)).collect();
        Ok(Self { units, alphabet: Alphabet::Bytes })
    }

    /// Expands bytes into a bit-mode message: eight '0'/'1' units per byte,
    /// most significant bit first.
    pub fn bits_from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::EmptyMessage);
        }
        let mut units = Vec::with_capacity(bytes.len() * 8);
        for &b in bytes {
            for i in (0..8).rev() {
                units.push(if (b >> i) & 1 == 1 { '1' } else { '0' });
            }
        }
        Ok(Self { units, alphabet: Alphabet::Bits })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Message length L measured in alphabet units.
    pub fn len_units(&self) -> usize {
        self.units.len()
    }

    pub fn units(&self) -> &[char] {
        &self.units
    }

    /// The byte values of a byte-mode message.
    pub fn as_bytes(&self) -> Result<Vec<u8>> {
        if self.alphabet != Alphabet::Bytes {
            return Err(Error::NotByteMode);
        }
        Ok(self.units.iter().map(|&c| c as u8).collect())
    }

    /// Renders the unit range `[start, end)` as a string.
    pub fn slice_string(&self, start: usize, end: usize) -> String {
        self.units[start..end].iter().collect()
    }
}
