//! Group statistics: per-index two-way ANOVA over group × segment cells with
//! Tukey HSD pairwise comparisons and the significance-flag scheme used by the
//! reported group table.

use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF, FisherSnedecor, Normal};

use crate::features::{FeatureRow, FEATURE_COLUMNS};
use crate::ingest::Segment;
use crate::{HrvError, Result};

/// Absolute tolerance of the studentized-range quadrature.
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Pairwise significance level for the cell flags.
pub const FLAG_ALPHA: f64 = 0.05;

/// Cell order used throughout: group-major, segment-minor.
pub const CELL_NAMES: [&str; 6] = [
    "healthy_24h",
    "healthy_day",
    "healthy_night",
    "mi_24h",
    "mi_day",
    "mi_night",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectTest {
    pub ss: f64,
    pub df: usize,
    pub f: f64,
    pub p: f64,
}

/// One Tukey HSD comparison between cells `a` and `b` (indexes into
/// [`CELL_NAMES`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseTest {
    pub a: usize,
    pub b: usize,
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone)]
pub struct IndexGroupStats {
    pub index: String,
    pub cells: [Option<CellSummary>; 6],
    pub group: EffectTest,
    /// Absent for indexes defined only on the 24h segment (one-way layout).
    pub segment: Option<EffectTest>,
    pub interaction: Option<EffectTest>,
    pub error_ss: f64,
    pub error_df: usize,
    pub pairwise: Vec<PairwiseTest>,
    /// Flag string per cell: `*` differs from 24h within Healthy, `¥` day vs
    /// night within Healthy, `#` differs from 24h within MI, `§` day vs night
    /// within MI, `†` Healthy vs MI at the same segment.
    pub flags: [String; 6],
}

#[derive(Debug, Clone)]
pub struct GroupStatsReport {
    pub indexes: Vec<IndexGroupStats>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn effect_test(ss: f64, df: usize, ms_err: f64, err_df: usize) -> Result<EffectTest> {
    if ss <= 0.0 || df == 0 {
        return Ok(EffectTest {
            ss: ss.max(0.0),
            df,
            f: 0.0,
            p: 1.0,
        });
    }
    if ms_err <= 0.0 || err_df == 0 {
        return Ok(EffectTest {
            ss,
            df,
            f: f64::INFINITY,
            p: 0.0,
        });
    }
    let f = (ss / df as f64) / ms_err;
    let dist = FisherSnedecor::new(df as f64, err_df as f64)
        .map_err(|e| HrvError::Config(format!("F distribution: {e}")))?;
    let p = (1.0 - dist.cdf(f)).clamp(0.0, 1.0);
    Ok(EffectTest { ss, df, f, p })
}

/// Adaptive Simpson quadrature with Richardson correction.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 24)
}

/// CDF of the range of `k` independent standard normals.
fn normal_range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let integrand = move |z: f64| {
        let span = normal.cdf(z) - normal.cdf(z - w);
        normal.pdf(z) * span.powi(k as i32 - 1)
    };
    let value = k as f64 * adaptive_simpson(&integrand, -9.0, 9.0, QUADRATURE_TOL / 10.0);
    value.clamp(0.0, 1.0)
}

/// CDF of the studentized range statistic with `k` groups and `df` error
/// degrees of freedom (pass `f64::INFINITY` for the limiting case).
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if !df.is_finite() {
        return normal_range_cdf(q, k);
    }
    let chi2 = ChiSquared::new(df).expect("chi-squared dof");
    // s = sqrt(X/df) with X ~ chi-squared(df); truncate to negligible tails.
    let s_lo = (chi2.inverse_cdf(1e-12) / df).sqrt();
    let s_hi = (chi2.inverse_cdf(1.0 - 1e-12) / df).sqrt();
    let integrand = move |s: f64| {
        let density = 2.0 * df * s * chi2.pdf(df * s * s);
        density * normal_range_cdf(q * s, k)
    };
    adaptive_simpson(&integrand, s_lo, s_hi, QUADRATURE_TOL).clamp(0.0, 1.0)
}

/// Tukey-Kramer comparison of two cell means under a shared error variance.
fn tukey_pair(
    a: usize,
    b: usize,
    cells: &[Option<CellSummary>; 6],
    ms_err: f64,
    err_df: usize,
    k: usize,
) -> PairwiseTest {
    let ca = cells[a].expect("compared cell present");
    let cb = cells[b].expect("compared cell present");
    let diff = (ca.mean - cb.mean).abs();
    if ms_err <= 0.0 || err_df == 0 {
        let p = if diff > 0.0 { 0.0 } else { 1.0 };
        return PairwiseTest {
            a,
            b,
            q: if diff > 0.0 { f64::INFINITY } else { 0.0 },
            p,
        };
    }
    let se = (ms_err / 2.0 * (1.0 / ca.n as f64 + 1.0 / cb.n as f64)).sqrt();
    let q = diff / se;
    let p = (1.0 - studentized_range_cdf(q, k, err_df as f64)).clamp(0.0, 1.0);
    PairwiseTest { a, b, q, p }
}

/// The nine comparisons that drive the flag scheme, as (a, b) cell indexes.
const FLAG_PAIRS: [(usize, usize); 9] = [
    (0, 1),
    (0, 2),
    (1, 2),
    (3, 4),
    (3, 5),
    (4, 5),
    (0, 3),
    (1, 4),
    (2, 5),
];

fn build_flags(pairwise: &[PairwiseTest]) -> [String; 6] {
    let sig = |a: usize, b: usize| {
        pairwise
            .iter()
            .find(|t| (t.a, t.b) == (a, b))
            .map(|t| t.p < FLAG_ALPHA)
            .unwrap_or(false)
    };
    let mut flags: [String; 6] = Default::default();
    if sig(0, 1) {
        flags[1].push('*');
    }
    if sig(0, 2) {
        flags[2].push('*');
    }
    if sig(1, 2) {
        flags[2].push('¥');
    }
    if sig(0, 3) {
        flags[3].push('†');
    }
    if sig(3, 4) {
        flags[4].push('#');
    }
    if sig(1, 4) {
        flags[4].push('†');
    }
    if sig(3, 5) {
        flags[5].push('#');
    }
    if sig(4, 5) {
        flags[5].push('§');
    }
    if sig(2, 5) {
        flags[5].push('†');
    }
    flags
}

struct Layout {
    /// Cell indexes participating in the analysis.
    active: Vec<usize>,
    two_way: bool,
}

fn classify_layout(index: &str, samples: &[Vec<f64>; 6]) -> Result<Option<Layout>> {
    let counts: Vec<usize> = samples.iter().map(Vec::len).collect();
    if counts.iter().all(|&n| n == 0) {
        return Ok(None);
    }
    let day_night_empty = [1usize, 2, 4, 5].iter().all(|&i| counts[i] == 0);
    if day_night_empty {
        for &i in &[0usize, 3] {
            if counts[i] < 2 {
                return Err(HrvError::DegenerateCell(format!(
                    "index {index}: cell {} has {} values, need at least 2",
                    CELL_NAMES[i], counts[i]
                )));
            }
        }
        return Ok(Some(Layout {
            active: vec![0, 3],
            two_way: false,
        }));
    }
    for (i, &n) in counts.iter().enumerate() {
        if n < 2 {
            return Err(HrvError::DegenerateCell(format!(
                "index {index}: cell {} has {n} values, need at least 2",
                CELL_NAMES[i]
            )));
        }
    }
    Ok(Some(Layout {
        active: (0..6).collect(),
        two_way: true,
    }))
}

fn analyze_index(index: &str, samples: &[Vec<f64>; 6]) -> Result<Option<IndexGroupStats>> {
    let Some(layout) = classify_layout(index, samples)? else {
        return Ok(None);
    };

    let mut cells: [Option<CellSummary>; 6] = Default::default();
    for &i in &layout.active {
        cells[i] = Some(CellSummary {
            n: samples[i].len(),
            mean: mean(&samples[i]),
            sd: sample_sd(&samples[i]),
        });
    }

    let all: Vec<f64> = layout
        .active
        .iter()
        .flat_map(|&i| samples[i].iter().copied())
        .collect();
    let grand = mean(&all);
    let n_total = all.len();

    let margin = |cell_ids: &[usize]| -> (usize, f64) {
        let vals: Vec<f64> = cell_ids
            .iter()
            .filter(|i| layout.active.contains(i))
            .flat_map(|&i| samples[i].iter().copied())
            .collect();
        (vals.len(), if vals.is_empty() { 0.0 } else { mean(&vals) })
    };

    let error_ss: f64 = layout
        .active
        .iter()
        .map(|&i| {
            let m = cells[i].unwrap().mean;
            samples[i].iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        })
        .sum();
    let error_df = n_total - layout.active.len();
    let ms_err = if error_df > 0 {
        error_ss / error_df as f64
    } else {
        0.0
    };

    let (g_healthy, m_healthy) = margin(&[0, 1, 2]);
    let (g_mi, m_mi) = margin(&[3, 4, 5]);
    let ss_group =
        g_healthy as f64 * (m_healthy - grand).powi(2) + g_mi as f64 * (m_mi - grand).powi(2);
    let group = effect_test(ss_group, 1, ms_err, error_df)?;

    let (segment, interaction) = if layout.two_way {
        let seg_margins = [margin(&[0, 3]), margin(&[1, 4]), margin(&[2, 5])];
        let ss_segment: f64 = seg_margins
            .iter()
            .map(|&(n, m)| n as f64 * (m - grand).powi(2))
            .sum();
        let group_means = [m_healthy, m_healthy, m_healthy, m_mi, m_mi, m_mi];
        let seg_means = [
            seg_margins[0].1,
            seg_margins[1].1,
            seg_margins[2].1,
            seg_margins[0].1,
            seg_margins[1].1,
            seg_margins[2].1,
        ];
        let ss_inter: f64 = (0..6)
            .map(|i| {
                let c = cells[i].unwrap();
                c.n as f64 * (c.mean - group_means[i] - seg_means[i] + grand).powi(2)
            })
            .sum();
        (
            Some(effect_test(ss_segment, 2, ms_err, error_df)?),
            Some(effect_test(ss_inter, 2, ms_err, error_df)?),
        )
    } else {
        (None, None)
    };

    let k = layout.active.len();
    let pairwise: Vec<PairwiseTest> = FLAG_PAIRS
        .iter()
        .filter(|(a, b)| layout.active.contains(a) && layout.active.contains(b))
        .map(|&(a, b)| tukey_pair(a, b, &cells, ms_err, error_df, k))
        .collect();
    let flags = build_flags(&pairwise);

    Ok(Some(IndexGroupStats {
        index: index.to_string(),
        cells,
        group,
        segment,
        interaction,
        error_ss,
        error_df,
        pairwise,
        flags,
    }))
}

/// Run the group × segment analysis for every index column that carries data.
/// Columns with no values anywhere are skipped; columns populated only on the
/// 24h segment fall back to a one-way group comparison.
pub fn group_stats(rows: &[FeatureRow]) -> Result<GroupStatsReport> {
    for row in rows {
        if row.values.len() != FEATURE_COLUMNS.len() {
            return Err(HrvError::ArityMismatch {
                expected: FEATURE_COLUMNS.len(),
                got: row.values.len(),
            });
        }
    }
    let mut indexes = Vec::new();
    for (c, &column) in FEATURE_COLUMNS.iter().enumerate() {
        let mut samples: [Vec<f64>; 6] = Default::default();
        for row in rows {
            let g = match row.label.as_str() {
                "healthy" => 0usize,
                "mi" => 1,
                other => {
                    return Err(HrvError::Config(format!(
                        "unknown group label {other:?}; expected healthy or mi"
                    )))
                }
            };
            let s = match row.segment {
                Segment::Full24h => 0usize,
                Segment::Day => 1,
                Segment::Night => 2,
            };
            if let Some(v) = row.values[c] {
                samples[g * 3 + s].push(v);
            }
        }
        if let Some(stats) = analyze_index(column, &samples)? {
            indexes.push(stats);
        }
    }
    Ok(GroupStatsReport { indexes })
}
