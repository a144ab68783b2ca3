//! CSV emitters for the benchmark tables, ROC exports, the group-statistics
//! table, and the cohort manifest. All emitters are pure string builders; the
//! CLI decides where the files land.

use crate::eval::{BenchReport, MetricBlock, RocPoint};
use crate::features::FeatureSet;
use crate::ml::ModelFamily;
use crate::stats::{GroupStatsReport, CELL_NAMES};

/// Significant digits used for every float in the emitted CSVs.
pub const CSV_SIG_DIGITS: usize = 6;

/// Format with a fixed number of significant digits: plain decimal notation
/// for moderate magnitudes, scientific outside of it.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&mag) {
        return format!("{:.*e}", sig - 1, x);
    }
    if mag as i64 + 1 > sig as i64 {
        let scale = 10f64.powi(mag + 1 - sig as i32);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn fmt(x: f64) -> String {
    format_sig(x, CSV_SIG_DIGITS)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn metric_fields(block: &MetricBlock) -> String {
    format!(
        "{},{},{},{},{}",
        fmt(block.accuracy),
        fmt_opt(block.kappa),
        fmt_opt(block.auroc),
        fmt_opt(block.sensitivity),
        fmt_opt(block.specificity)
    )
}

const METRIC_HEADER: &str = "cv_accuracy,cv_kappa,cv_auroc,cv_sensitivity,cv_specificity,\
holdout_accuracy,holdout_kappa,holdout_auroc,holdout_sensitivity,holdout_specificity";

/// One table per feature set: a row per model family, cross-validation and
/// held-out metric blocks side by side.
pub fn model_table_csv(report: &BenchReport, set: FeatureSet) -> String {
    let mut out = format!("model,{METRIC_HEADER}\n");
    for cell in report.cells.iter().filter(|c| c.set == set) {
        out.push_str(&format!(
            "{},{},{}\n",
            cell.spec.family.as_str(),
            metric_fields(&cell.cv.pooled),
            metric_fields(&cell.holdout)
        ));
    }
    out
}

/// Summary table: one row per feature set for a single model family.
pub fn family_summary_csv(report: &BenchReport, family: ModelFamily) -> String {
    let mut out = format!("feature_set,{METRIC_HEADER}\n");
    for cell in report.cells.iter().filter(|c| c.spec.family == family) {
        out.push_str(&format!(
            "{},{},{}\n",
            cell.set.as_str(),
            metric_fields(&cell.cv.pooled),
            metric_fields(&cell.holdout)
        ));
    }
    out
}

pub fn roc_csv(points: &[RocPoint]) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt(p.threshold),
            fmt(p.fpr),
            fmt(p.tpr)
        ));
    }
    out
}

/// File stem for a ROC export: `<set>_<model>`.
pub fn roc_stem(set: FeatureSet, family: ModelFamily) -> String {
    format!("{}_{}", set.as_str(), family.slug())
}

/// Group-statistics table: per index, the six cell summaries with their
/// significance flags, then the ANOVA effects.
pub fn table7_csv(report: &GroupStatsReport) -> String {
    let mut out = String::from("index");
    for cell in CELL_NAMES {
        out.push_str(&format!(",{cell}_n,{cell}_mean,{cell}_sd,{cell}_flags"));
    }
    out.push_str(",group_f,group_p,segment_f,segment_p,interaction_f,interaction_p,error_df\n");
    for stats in &report.indexes {
        out.push_str(&stats.index);
        for (i, cell) in stats.cells.iter().enumerate() {
            match cell {
                Some(c) => out.push_str(&format!(
                    ",{},{},{},{}",
                    c.n,
                    fmt(c.mean),
                    fmt(c.sd),
                    stats.flags[i]
                )),
                None => out.push_str(",,,,"),
            }
        }
        out.push_str(&format!(",{},{}", fmt(stats.group.f), fmt(stats.group.p)));
        for effect in [&stats.segment, &stats.interaction] {
            match effect {
                Some(e) => out.push_str(&format!(",{},{}", fmt(e.f), fmt(e.p))),
                None => out.push_str(",,"),
            }
        }
        out.push_str(&format!(",{}\n", stats.error_df));
    }
    out
}

#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub recording_id: String,
    pub label: String,
    pub seed: u64,
}

pub fn manifest_csv(entries: &[ManifestEntry]) -> String {
    let mut out = String::from("recording_id,label,seed\n");
    for e in entries {
        out.push_str(&format!("{},{},{}\n", e.recording_id, e.label, e.seed));
    }
    out
}
