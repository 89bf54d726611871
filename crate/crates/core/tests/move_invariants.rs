//! Exhaustive and fuzzed checks of the move set: every single move keeps the
//! diversity change inside the per-class reachable interval, and arbitrary
//! move sequences preserve tiling completeness.

use std::sync::Arc;

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scalescope::{
    apply_move, diversity_delta_bounds, Message, Move, MoveClass, MoveKind, Segmentation,
};

/// Substring key for a binary string of length ≤ 8: (len << 8) | bits.
fn key(bits: u32, start: usize, len: usize) -> usize {
    let sub = (bits >> start) & ((1u32 << len) - 1);
    (len << 8) | sub as usize
}

const KEY_SPACE: usize = 9 << 8;

struct DeltaScan {
    counts: Vec<u16>,
    touched: Vec<usize>,
}

impl DeltaScan {
    fn new() -> Self {
        Self { counts: vec![0; KEY_SPACE], touched: Vec::new() }
    }

    fn load(&mut self, bits: u32, bounds: &[usize]) -> usize {
        for &k in &self.touched {
            self.counts[k] = 0;
        }
        self.touched.clear();
        let mut diversity = 0;
        for w in bounds.windows(2) {
            let k = key(bits, w[0], w[1] - w[0]);
            if self.counts[k] == 0 {
                diversity += 1;
                self.touched.push(k);
            }
            self.counts[k] += 1;
        }
        diversity
    }

    /// Diversity change of replacing `removed` ranges with `added` ranges.
    fn delta(&self, bits: u32, removed: &[(usize, usize)], added: &[(usize, usize)]) -> i64 {
        // ≤ 4 distinct keys per move; fold deltas then count sign changes
        let mut keys: Vec<(usize, i64)> = Vec::with_capacity(4);
        let mut bump = |k: usize, d: i64| {
            for e in keys.iter_mut() {
                if e.0 == k {
                    e.1 += d;
                    return;
                }
            }
            keys.push((k, d));
        };
        for &(s, l) in removed {
            bump(key(bits, s, l), -1);
        }
        for &(s, l) in added {
            bump(key(bits, s, l), 1);
        }
        let mut delta = 0i64;
        for (k, d) in keys {
            let old = self.counts[k] as i64;
            let new = old + d;
            delta += (new > 0) as i64 - (old > 0) as i64;
        }
        delta
    }
}

/// Walks every segmentation of every binary string of length ≤ 8 and every
/// valid single move, recording the observed min/max diversity change per
/// move class.
#[test]
fn diversity_deltas_exhaustive_over_short_binary_strings() {
    let mut observed = [(i64::MAX, i64::MIN); 3];
    let mut scan = DeltaScan::new();

    for n in 1..=8usize {
        for bits in 0u32..(1 << n) {
            for mask in 0u32..(1 << (n - 1)) {
                let mut bounds = vec![0usize];
                for pos in 1..n {
                    if mask >> (pos - 1) & 1 == 1 {
                        bounds.push(pos);
                    }
                }
                bounds.push(n);
                scan.load(bits, &bounds);
                let segs = bounds.len() - 1;

                for i in 0..segs {
                    let (lo, hi) = (bounds[i], bounds[i + 1]);
                    let size = hi - lo;
                    // splits
                    for off in 1..size {
                        let d = scan.delta(
                            bits,
                            &[(lo, size)],
                            &[(lo, off), (lo + off, size - off)],
                        );
                        record(&mut observed[0], d);
                    }
                    if i + 1 >= segs {
                        continue;
                    }
                    let hi2 = bounds[i + 2];
                    // drifts: every shift keeping both segments non-empty
                    for moved in lo + 1..hi2 {
                        if moved == hi {
                            continue;
                        }
                        let d = scan.delta(
                            bits,
                            &[(lo, hi - lo), (hi, hi2 - hi)],
                            &[(lo, moved - lo), (moved, hi2 - moved)],
                        );
                        record(&mut observed[1], d);
                    }
                    // join
                    let d = scan.delta(
                        bits,
                        &[(lo, hi - lo), (hi, hi2 - hi)],
                        &[(lo, hi2 - lo)],
                    );
                    record(&mut observed[2], d);
                }
            }
        }
    }

    for (idx, class) in [MoveClass::Split, MoveClass::Drift, MoveClass::Join]
        .into_iter()
        .enumerate()
    {
        let (lo, hi) = diversity_delta_bounds(class);
        assert_eq!(
            observed[idx],
            (lo, hi),
            "observed delta range for {class:?} diverges from the declared interval"
        );
        assert!(hi <= 2, "no move may add more than two symbols");
    }
}

fn record(slot: &mut (i64, i64), d: i64) {
    slot.0 = slot.0.min(d);
    slot.1 = slot.1.max(d);
}

/// 10^4 random move sequences; after every accepted move the segment
/// concatenation must still reproduce the message.
#[test]
fn fuzzed_move_sequences_preserve_completeness() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let alphabet = ['a', 'b', 'c', ' '];

    for round in 0..10_000 {
        let len = rng.random_range(2..=40);
        let text: String = (0..len).map(|_| *alphabet.choose(&mut rng).unwrap()).collect();
        let msg = Arc::new(Message::from_text(&text).unwrap());

        // random starting tiling
        let mut interior: Vec<usize> =
            (1..len).filter(|_| rng.random_bool(0.4)).collect();
        interior.dedup();
        let mut seg = Segmentation::from_boundaries(msg.clone(), interior).unwrap();

        for _ in 0..rng.random_range(1..=24) {
            let n = seg.segment_count();
            let segment = rng.random_range(0..n);
            let kind = match rng.random_range(0..3u8) {
                0 => {
                    let size = seg.segment_size(segment);
                    if size < 2 {
                        MoveKind::Join
                    } else {
                        MoveKind::Split { offset: rng.random_range(1..size) }
                    }
                }
                1 => MoveKind::Drift { shift: rng.random_range(-3i64..=3) as isize },
                _ => MoveKind::Join,
            };
            let before = seg.segment_count();
            match apply_move(&seg, &Move { segment, kind }) {
                Ok(next) => {
                    let expected = match kind {
                        MoveKind::Split { .. } => before + 1,
                        MoveKind::Drift { .. } => before,
                        MoveKind::Join => before - 1,
                    };
                    assert_eq!(next.segment_count(), expected, "round {round}");
                    seg = next;
                }
                Err(_) => continue,
            }
            let joined: String = seg.iter_segments().flatten().collect();
            assert_eq!(joined, text, "round {round}: tiling no longer covers the message");
        }
    }
}
