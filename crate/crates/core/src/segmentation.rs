use std::sync::Arc;

use crate::error::{Error, Result};
use crate::message::Message;

/// A gap-free, overlap-free tiling of a message into contiguous symbols.
///
/// Internally stored as the full boundary vector `0 = b_0 < b_1 < … < b_L = L_units`;
/// segment `i` is the unit range `[b_i, b_{i+1})`. Concatenating the segments in
/// order always reproduces the message, so tiling completeness holds by
/// construction once the boundary vector is validated.
#[derive(Debug, Clone)]
pub struct Segmentation {
    message: Arc<Message>,
    bounds: Vec<u32>,
}

impl PartialEq for Segmentation {
    fn eq(&self, other: &Self) -> bool {
        self.bounds == other.bounds && self.message.units() == other.message.units()
    }
}

impl Segmentation {
    /// Builds a segmentation from interior cut positions (exclusive of 0 and L).
    pub fn from_boundaries<I>(message: Arc<Message>, interior: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let len = message.len_units();
        if len == 0 {
            return Err(Error::EmptyMessage);
        }
        let mut bounds = Vec::new();
        bounds.push(0u32);
        for b in interior {
            if b == 0 || b >= len {
                return Err(Error::InvalidTiling(format!(
                    "cut position {b} outside (0, {len})"
                )));
            }
            bounds.push(b as u32);
        }
        bounds.push(len as u32);
        for w in bounds.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidTiling(format!(
                    "cut positions must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { message, bounds })
    }

    /// Builds a segmentation from consecutive segment sizes.
    pub fn from_segment_sizes(message: Arc<Message>, sizes: &[usize]) -> Result<Self> {
        let mut interior = Vec::new();
        let mut pos = 0usize;
        for (i, &s) in sizes.iter().enumerate() {
            if s == 0 {
                return Err(Error::InvalidTiling(format!("segment {i} has size 0")));
            }
            pos += s;
            if i + 1 < sizes.len() {
                interior.push(pos);
            }
        }
        if pos != message.len_units() {
            return Err(Error::InvalidTiling(format!(
                "segment sizes cover {pos} units, message has {}",
                message.len_units()
            )));
        }
        Self::from_boundaries(message, interior)
    }

    /// Builds a segmentation from explicit segment strings, verifying that their
    /// concatenation reproduces the message exactly.
    pub fn from_segments(message: Arc<Message>, segments: &[&str]) -> Result<Self> {
        let joined: String = segments.concat();
        let expect: String = message.units().iter().collect();
        if joined != expect {
            return Err(Error::InvalidTiling(
                "segments do not concatenate to the message".into(),
            ));
        }
        let sizes: Vec<usize> = segments.iter().map(|s| s.chars().count()).collect();
        Self::from_segment_sizes(message, &sizes)
    }

    pub fn message(&self) -> &Message {
        &self.message
    }

    pub fn message_arc(&self) -> &Arc<Message> {
        &self.message
    }

    /// Scope L: the number of segments.
    pub fn segment_count(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Full boundary vector, including 0 and L_units.
    pub fn boundaries(&self) -> &[u32] {
        &self.bounds
    }

    /// Interior cut positions (excluding 0 and L_units).
    pub fn interior_boundaries(&self) -> &[u32] {
        &self.bounds[1..self.bounds.len() - 1]
    }

    pub fn segment_units(&self, i: usize) -> &[char] {
        let a = self.bounds[i] as usize;
        let b = self.bounds[i + 1] as usize;
        &self.message.units()[a..b]
    }

    pub fn segment_string(&self, i: usize) -> String {
        self.segment_units(i).iter().collect()
    }

    pub fn segment_size(&self, i: usize) -> usize {
        (self.bounds[i + 1] - self.bounds[i]) as usize
    }

    pub fn iter_segments(&self) -> impl Iterator<Item = &[char]> + '_ {
        (0..self.segment_count()).map(move |i| self.segment_units(i))
    }

    pub(crate) fn from_raw(message: Arc<Message>, bounds: Vec<u32>) -> Self {
        debug_assert!(bounds.len() >= 2);
        debug_assert_eq!(bounds[0], 0);
        debug_assert_eq!(*bounds.last().unwrap() as usize, message.len_units());
        debug_assert!(bounds.windows(2).all(|w| w[0] < w[1]));
        Self { message, bounds }
    }
}
