//! Phase-rectified signal averaging: deceleration and acceleration capacity
//! of the NN series.

use crate::ingest::NNSeries;
use crate::{HrvError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorRule {
    /// Anchors where the interval lengthens: x_i > x_{i-1}.
    Deceleration,
    /// Anchors where the interval shortens: x_i < x_{i-1}.
    Acceleration,
}

#[derive(Debug, Clone, Copy)]
pub struct PrsaComponent {
    pub capacity_ms: f64,
    pub anchor_count: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PrsaIndexes {
    /// Absent when the series has no acceleration anchors.
    pub acceleration_capacity_ms: Option<f64>,
    /// Absent when the series has no deceleration anchors.
    pub deceleration_capacity_ms: Option<f64>,
    pub anchor_count_ac: usize,
    pub anchor_count_dc: usize,
}

/// One-sided PRSA capacity with window half-length `window_l`.
///
/// Anchors are interior indices matching the rule; the capacity is the
/// quarter-sum (X(0) + X(1) - X(-1) - X(-2)) / 4 of the anchor-aligned
/// average, evaluated by averaging the per-anchor quarter-sums directly.
pub fn prsa(nn: &NNSeries, window_l: usize, rule: AnchorRule) -> Result<PrsaComponent> {
    prsa_series(&nn.intervals_ms, window_l, rule)
}

pub fn prsa_series(x: &[f64], window_l: usize, rule: AnchorRule) -> Result<PrsaComponent> {
    assert!(window_l >= 2, "capacity formula needs window_l >= 2");
    let n = x.len();
    if n < 2 * window_l + 1 {
        return Err(HrvError::NoAnchors);
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    for i in window_l..=n - window_l {
        let is_anchor = match rule {
            AnchorRule::Deceleration => x[i] > x[i - 1],
            AnchorRule::Acceleration => x[i] < x[i - 1],
        };
        if is_anchor {
            acc += (x[i] + x[i + 1] - x[i - 1] - x[i - 2]) / 4.0;
            count += 1;
        }
    }
    if count == 0 {
        return Err(HrvError::NoAnchors);
    }
    Ok(PrsaComponent {
        capacity_ms: acc / count as f64,
        anchor_count: count,
    })
}

/// Both PRSA capacities; absent components when a rule finds no anchors.
pub fn prsa_indexes(nn: &NNSeries, window_l: usize) -> PrsaIndexes {
    let ac = prsa(nn, window_l, AnchorRule::Acceleration).ok();
    let dc = prsa(nn, window_l, AnchorRule::Deceleration).ok();
    PrsaIndexes {
        acceleration_capacity_ms: ac.map(|c| c.capacity_ms),
        deceleration_capacity_ms: dc.map(|c| c.capacity_ms),
        anchor_count_ac: ac.map_or(0, |c| c.anchor_count),
        anchor_count_dc: dc.map_or(0, |c| c.anchor_count),
    }
}
