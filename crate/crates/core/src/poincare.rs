//! Poincaré-plot indexes: SD1/SD2 ellipse axes, their ratio, and the
//! centroid-normalized SD1nu/SD2nu pair.

use crate::ingest::NNSeries;
use crate::util::{mean, population_sd};
use crate::{HrvError, Result};

#[derive(Debug, Clone, Copy)]
pub struct PoincareIndexes {
    pub centroid_ms: f64,
    pub sd1_ms: f64,
    pub sd2_ms: f64,
    /// Absent when sd2 == 0.
    pub sd1_sd2_ratio: Option<f64>,
    pub sd1_nu: f64,
    pub sd2_nu: f64,
}

/// Compute Poincaré indexes over lag-1 interval pairs.
///
/// sd1/sd2 are population standard deviations of the rotated pair coordinates
/// (x_{i+1} - x_i)/sqrt(2) and (x_{i+1} + x_i)/sqrt(2); the centroid is the
/// mean NN interval; the nu pair normalizes each axis by the centroid
/// (100 * sd / centroid).
pub fn poincare(nn: &NNSeries) -> Result<PoincareIndexes> {
    let x = &nn.intervals_ms;
    if x.len() < 3 {
        return Err(HrvError::TooFewIntervals);
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let d: Vec<f64> = x.windows(2).map(|p| (p[1] - p[0]) / sqrt2).collect();
    let s: Vec<f64> = x.windows(2).map(|p| (p[1] + p[0]) / sqrt2).collect();
    let sd1 = population_sd(&d);
    let sd2 = population_sd(&s);
    let centroid = mean(x);

    Ok(PoincareIndexes {
        centroid_ms: centroid,
        sd1_ms: sd1,
        sd2_ms: sd2,
        sd1_sd2_ratio: if sd2 > 0.0 { Some(sd1 / sd2) } else { None },
        sd1_nu: 100.0 * sd1 / centroid,
        sd2_nu: 100.0 * sd2 / centroid,
    })
}
