//! Scale downgrading: collapse a ranked D-point probability profile onto S
//! points while conserving total mass and overall shape.
//!
//! Ranks are grouped into contiguous bins whose edges are equally spaced in
//! log-rank, which keeps a comparable level of detail across the head and the
//! tail of near power-law profiles. Each bin collapses to a single point at
//! the mass-weighted mean rank of its members.

use crate::error::{Error, Result};
use crate::profile::SymbolProfile;

/// One collapsed point of a downgraded profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DowngradePoint {
    /// Mass-weighted mean rank of the group (1-based).
    pub rank: f64,
    /// Summed probability mass of the group.
    pub mass: f64,
}

/// A ranked profile reduced to `target_s` points.
///
/// Points are sorted by non-increasing mass (ties by rank); the original rank
/// positions stay attached to each point, so the pre-sort rank order can be
/// recovered by re-sorting on `rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct DowngradedProfile {
    pub points: Vec<DowngradePoint>,
    pub source_d: u64,
    pub target_s: u64,
}

impl DowngradedProfile {
    /// Downgrades again, treating each existing point as one rank position.
    /// Representative ranks are carried through as mass-weighted means, so a
    /// chain of downgrades keeps referring to the original rank axis.
    pub fn downgrade(&self, target: usize) -> Result<DowngradedProfile> {
        let mut by_rank = self.points.clone();
        by_rank.sort_by(|a, b| a.rank.total_cmp(&b.rank));
        let masses: Vec<f64> = by_rank.iter().map(|p| p.mass).collect();
        let ranks: Vec<f64> = by_rank.iter().map(|p| p.rank).collect();
        let points = collapse(&masses, &ranks, target)?;
        Ok(DowngradedProfile {
            points,
            source_d: self.points.len() as u64,
            target_s: target as u64,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.points.iter().map(|p| p.mass).sum()
    }
}

/// Collapses a ranked profile to at most `target` points.
///
/// With `target ≥ D` the profile embeds unchanged (downgrading never
/// upsamples); otherwise ranks 1..D partition into exactly `target`
/// contiguous log-rank bins.
pub fn downgrade_profile(profile: &SymbolProfile, target: usize) -> Result<DowngradedProfile> {
    let masses: Vec<f64> = profile.probabilities().collect();
    let ranks: Vec<f64> = (1..=masses.len()).map(|r| r as f64).collect();
    let points = collapse(&masses, &ranks, target)?;
    Ok(DowngradedProfile {
        points,
        source_d: profile.diversity(),
        target_s: target as u64,
    })
}

fn collapse(masses: &[f64], ranks: &[f64], target: usize) -> Result<Vec<DowngradePoint>> {
    if target == 0 {
        return Err(Error::InvalidDowngradeTarget);
    }
    let d = masses.len();
    let edges = log_rank_edges(d, target);
    let mut points = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mass: f64 = masses[lo..hi].iter().sum();
        let rank = if mass > 0.0 {
            masses[lo..hi]
                .iter()
                .zip(&ranks[lo..hi])
                .map(|(m, r)| m * r)
                .sum::<f64>()
                / mass
        } else {
            // zero-mass group: fall back to the plain mean rank
            ranks[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        };
        points.push(DowngradePoint { rank, mass });
    }
    points.sort_by(|a, b| b.mass.total_cmp(&a.mass).then(a.rank.total_cmp(&b.rank)));
    Ok(points)
}

/// Bin edges over rank indices 0..D (half-open groups `[e_i, e_{i+1})`),
/// equally spaced in log(rank) and adjusted so every group is non-empty.
/// With `target ≥ D` this degenerates to one edge per rank, the identity.
pub fn log_rank_edges(d: usize, target: usize) -> Vec<usize> {
    let s = target.min(d);
    if s == 0 {
        return vec![0];
    }
    let mut edges = Vec::with_capacity(s + 1);
    edges.push(0usize);
    let ln_d = (d as f64).ln();
    for i in 1..=s {
        let raw = (ln_d * i as f64 / s as f64).exp();
        let e = raw.round() as usize;
        let prev = *edges.last().unwrap();
        edges.push(e.clamp(prev + 1, d));
    }
    // walk back so trailing groups stay non-empty and the last edge hits D
    edges[s] = d;
    for i in (1..s).rev() {
        let cap = d - (s - i);
        if edges[i] > cap {
            edges[i] = cap;
        }
    }
    edges
}
