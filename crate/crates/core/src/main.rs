//! Batch command-line front end: synthesize labeled RR cohorts, extract the
//! index panel, benchmark classifier families, and emit group statistics.
//! Every command is driven by a `RunConfig` (TOML file + flag overrides) whose
//! effective form is echoed into the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hrvbench::eval::{benchmark_feature_sets, EvalProtocol};
use hrvbench::features::{
    extract_recording, parse_features_csv, to_feature_matrix, write_features_csv, ExtractConfig,
    FeatureSet, ALL_FEATURE_SETS, FEATURE_COLUMNS,
};
use hrvbench::ingest::{parse_rr_file, serialize_rr, FilterConfig, RrFormat, Segment, SegmentSpec};
use hrvbench::lyapunov::LyapunovConfig;
use hrvbench::ml::{ModelFamily, ModelSpec, ALL_FAMILIES};
use hrvbench::report::{
    family_summary_csv, manifest_csv, model_table_csv, roc_csv, roc_stem, table7_csv, ManifestEntry,
};
use hrvbench::spectral::SpectralConfig;
use hrvbench::stats::group_stats;
use hrvbench::synth::{generate_cohort, subject_seed, CohortParams, GeneratorParams};
use hrvbench::util::mix_seed;
use hrvbench::HrvError;

const MODEL_SEED_STREAM: u64 = 0x4d4f_4445;

#[derive(Parser, Debug)]
#[command(
    name = "hrvbench",
    version,
    about = "24h HRV index panel and classifier benchmark"
)]
struct Cli {
    /// TOML run configuration; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for synthesis, splits, and training.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic labeled cohort of RR-CSV recordings.
    Synth {
        /// Number of healthy recordings.
        #[arg(long)]
        healthy: Option<usize>,
        /// Number of MI recordings.
        #[arg(long)]
        mi: Option<usize>,
    },
    /// Compute the index panel for every RR-CSV recording in a directory.
    Extract {
        /// Directory of RR-CSV files with an optional manifest.csv.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Train and evaluate the feature-set × model grid on a features CSV.
    Bench {
        /// Features CSV produced by `extract`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated feature sets (default: all five).
        #[arg(long)]
        sets: Option<String>,
        /// Comma-separated model families (default: all eight).
        #[arg(long)]
        models: Option<String>,
        /// Held-out fraction of the cohort.
        #[arg(long)]
        holdout: Option<f64>,
        /// Cross-validation folds on the training portion.
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Emit the group × segment statistics table from a features CSV.
    Stats {
        /// Features CSV produced by `extract`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct RunConfig {
    seed: u64,
    jobs: usize,
    out: PathBuf,
    synth: SynthSection,
    extract: ExtractSection,
    bench: BenchSection,
    stats: StatsSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            jobs: 0,
            out: PathBuf::from("out"),
            synth: SynthSection::default(),
            extract: ExtractSection::default(),
            bench: BenchSection::default(),
            stats: StatsSection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct SynthSection {
    healthy: usize,
    mi: usize,
    healthy_params: GeneratorParams,
    mi_params: GeneratorParams,
}

impl Default for SynthSection {
    fn default() -> Self {
        SynthSection {
            healthy: 128,
            mi: 90,
            healthy_params: GeneratorParams::healthy_default(),
            mi_params: GeneratorParams::mi_default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct ExtractSection {
    input: PathBuf,
    prsa_window: usize,
    filter: FilterConfig,
    segments: SegmentSpec,
    spectral: SpectralConfig,
    lyapunov: LyapunovConfig,
}

impl Default for ExtractSection {
    fn default() -> Self {
        let cfg = ExtractConfig::default();
        ExtractSection {
            input: PathBuf::from("out"),
            prsa_window: cfg.prsa_window,
            filter: cfg.filter,
            segments: cfg.segments,
            spectral: cfg.spectral,
            lyapunov: cfg.lyapunov,
        }
    }
}

impl ExtractSection {
    fn to_extract_config(&self) -> ExtractConfig {
        ExtractConfig {
            filter: self.filter,
            segments: self.segments,
            spectral: self.spectral,
            lyapunov: self.lyapunov,
            prsa_window: self.prsa_window,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct BenchSection {
    input: PathBuf,
    holdout: f64,
    folds: usize,
    decision_threshold: f64,
    sets: Vec<String>,
    models: Vec<String>,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            input: PathBuf::from("out/features.csv"),
            holdout: 0.2,
            folds: 10,
            decision_threshold: 0.5,
            sets: ALL_FEATURE_SETS
                .iter()
                .map(|s| s.as_str().to_string())
                .collect(),
            models: ALL_FAMILIES.iter().map(|f| f.slug().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct StatsSection {
    input: PathBuf,
}

impl Default for StatsSection {
    fn default() -> Self {
        StatsSection {
            input: PathBuf::from("out/features.csv"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let HrvError::TooSmall(_) = e {
                eprintln!(
                    "hint: shrink --holdout or --folds so each class keeps at least \
                     `folds` training recordings and one test recording"
                );
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 = validation problem in parameters or input schema, 2 = runtime failure.
fn exit_code(e: &HrvError) -> u8 {
    match e {
        HrvError::Config(_)
        | HrvError::TooSmall(_)
        | HrvError::ArityMismatch { .. }
        | HrvError::DegenerateCell(_) => 1,
        _ => 2,
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, HrvError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| HrvError::Io {
                path: path.display().to_string(),
                source,
            })?;
            toml::from_str(&text)
                .map_err(|e| HrvError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    match &cli.command {
        Command::Synth { healthy, mi } => {
            if let Some(h) = healthy {
                cfg.synth.healthy = *h;
            }
            if let Some(m) = mi {
                cfg.synth.mi = *m;
            }
        }
        Command::Extract { input } => {
            if let Some(input) = input {
                cfg.extract.input = input.clone();
            }
        }
        Command::Bench {
            input,
            sets,
            models,
            holdout,
            folds,
        } => {
            if let Some(input) = input {
                cfg.bench.input = input.clone();
            }
            if let Some(sets) = sets {
                cfg.bench.sets = sets.split(',').map(|s| s.trim().to_string()).collect();
            }
            if let Some(models) = models {
                cfg.bench.models = models.split(',').map(|s| s.trim().to_string()).collect();
            }
            if let Some(h) = holdout {
                cfg.bench.holdout = *h;
            }
            if let Some(f) = folds {
                cfg.bench.folds = *f;
            }
        }
        Command::Stats { input } => {
            if let Some(input) = input {
                cfg.stats.input = input.clone();
            }
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), HrvError> {
    let cfg = load_config(&cli)?;
    if cfg.jobs > 0 {
        // Ignore the error when a pool already exists (only possible in-process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global();
    }
    create_dir(&cfg.out)?;
    let echo =
        toml::to_string_pretty(&cfg).map_err(|e| HrvError::Config(format!("config echo: {e}")))?;
    write_file(&cfg.out.join("run_config.toml"), &echo)?;
    match &cli.command {
        Command::Synth { .. } => cmd_synth(&cfg),
        Command::Extract { .. } => cmd_extract(&cfg),
        Command::Bench { .. } => cmd_bench(&cfg),
        Command::Stats { .. } => cmd_stats(&cfg),
    }
}

fn create_dir(path: &Path) -> Result<(), HrvError> {
    fs::create_dir_all(path).map_err(|source| HrvError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), HrvError> {
    fs::write(path, content).map_err(|source| HrvError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_file(path: &Path) -> Result<Vec<u8>, HrvError> {
    fs::read(path).map_err(|source| HrvError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_synth(cfg: &RunConfig) -> Result<(), HrvError> {
    let params = CohortParams {
        n_healthy: cfg.synth.healthy,
        n_mi: cfg.synth.mi,
        seed: cfg.seed,
        healthy: cfg.synth.healthy_params,
        mi: cfg.synth.mi_params,
    };
    if params.n_healthy == 0 && params.n_mi == 0 {
        eprintln!("warning: empty cohort requested; writing manifest only");
    }
    let cohort = generate_cohort(&params)?;
    let mut entries = Vec::with_capacity(cohort.len());
    let mut counts = [0usize; 2];
    for (series, label) in &cohort {
        let slot = &mut counts[matches!(label, hrvbench::synth::GroupLabel::Mi) as usize];
        let index = *slot;
        *slot += 1;
        write_file(
            &cfg.out.join(format!("{}.csv", series.recording_id)),
            &serialize_rr(series),
        )?;
        entries.push(ManifestEntry {
            recording_id: series.recording_id.clone(),
            label: label.as_str().to_string(),
            seed: subject_seed(cfg.seed, *label, index),
        });
    }
    write_file(&cfg.out.join("manifest.csv"), &manifest_csv(&entries))?;
    eprintln!(
        "synth: wrote {} recordings + manifest to {}",
        cohort.len(),
        cfg.out.display()
    );
    Ok(())
}

/// Labels from an optional manifest.csv; unknown recordings stay unlabeled.
fn read_manifest_labels(dir: &Path) -> Result<Vec<(String, String)>, HrvError> {
    let path = dir.join("manifest.csv");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = String::from_utf8(read_file(&path)?).map_err(|_| HrvError::InvalidUtf8)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("recording_id,label,seed") => {}
        other => {
            return Err(HrvError::Config(format!(
                "manifest.csv: expected header recording_id,label,seed, found {other:?}"
            )))
        }
    }
    let mut labels = Vec::new();
    for (number, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(HrvError::Config(format!(
                "manifest.csv line {}: expected 3 fields",
                number + 2
            )));
        }
        labels.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(labels)
}

fn cmd_extract(cfg: &RunConfig) -> Result<(), HrvError> {
    let dir = &cfg.extract.input;
    let labels = read_manifest_labels(dir)?;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|source| HrvError::Io {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "csv")
                && p.file_name()
                    .is_some_and(|n| n != "manifest.csv" && n != "features.csv")
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(HrvError::Config(format!(
            "no RR-CSV files found in {}",
            dir.display()
        )));
    }
    let extract_cfg = cfg.extract.to_extract_config();
    let results: Vec<(
        PathBuf,
        Result<Vec<hrvbench::features::FeatureRow>, HrvError>,
    )> = files
        .par_iter()
        .map(|path| {
            let outcome = (|| {
                let bytes = read_file(path)?;
                let mut series = parse_rr_file(&bytes, RrFormat::RrCsv)?;
                if series.recording_id.is_empty() {
                    series.recording_id = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                }
                if !series.is_full_24h() {
                    eprintln!(
                        "warning: {}: recording spans less than a full day; \
                         24h-window indexes may be empty",
                        path.display()
                    );
                }
                extract_recording(&series, &extract_cfg)
            })();
            (path.clone(), outcome)
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (path, outcome) in results {
        match outcome {
            Ok(mut recording_rows) => {
                for row in &mut recording_rows {
                    if let Some((_, label)) = labels.iter().find(|(id, _)| *id == row.recording_id)
                    {
                        row.label = label.clone();
                    }
                }
                rows.extend(recording_rows);
            }
            Err(e) => {
                failures += 1;
                eprintln!("extract: {}: {e} (skipped)", path.display());
            }
        }
    }
    if rows.is_empty() {
        return Err(HrvError::Config(format!(
            "all {failures} input files failed to extract"
        )));
    }
    write_file(&cfg.out.join("features.csv"), &write_features_csv(&rows))?;
    eprintln!(
        "extract: {} recordings ok, {} failed; features written to {}",
        files.len() - failures,
        failures,
        cfg.out.join("features.csv").display()
    );
    Ok(())
}

fn parse_set_filter(names: &[String]) -> Result<Vec<FeatureSet>, HrvError> {
    let mut sets = Vec::new();
    for name in names {
        let set = FeatureSet::parse(name).ok_or_else(|| {
            HrvError::Config(format!(
                "unknown feature set {name:?}; valid: {}",
                ALL_FEATURE_SETS.map(|s| s.as_str()).join(", ")
            ))
        })?;
        if !sets.contains(&set) {
            sets.push(set);
        }
    }
    if sets.is_empty() {
        return Err(HrvError::Config("no feature sets selected".into()));
    }
    Ok(sets)
}

fn parse_model_filter(names: &[String]) -> Result<Vec<ModelFamily>, HrvError> {
    let mut families = Vec::new();
    for name in names {
        let family = ModelFamily::parse(name).ok_or_else(|| {
            HrvError::Config(format!(
                "unknown model {name:?}; valid: {}",
                ALL_FAMILIES.map(|f| f.slug()).join(", ")
            ))
        })?;
        if !families.contains(&family) {
            families.push(family);
        }
    }
    if families.is_empty() {
        return Err(HrvError::Config("no models selected".into()));
    }
    Ok(families)
}

fn cmd_bench(cfg: &RunConfig) -> Result<(), HrvError> {
    let text =
        String::from_utf8(read_file(&cfg.bench.input)?).map_err(|_| HrvError::InvalidUtf8)?;
    let rows = parse_features_csv(&text)?;
    let matrix = to_feature_matrix(&rows, Segment::Full24h, &FEATURE_COLUMNS)?;
    let sets = parse_set_filter(&cfg.bench.sets)?;
    let families = parse_model_filter(&cfg.bench.models)?;
    let protocol = EvalProtocol {
        holdout_fraction: cfg.bench.holdout,
        cv_folds: cfg.bench.folds,
        stratified: true,
        split_seed: cfg.seed,
        decision_threshold: cfg.bench.decision_threshold,
    };
    let specs: Vec<ModelSpec> = families
        .iter()
        .enumerate()
        .map(|(i, &family)| {
            ModelSpec::new(family, mix_seed(cfg.seed, MODEL_SEED_STREAM + i as u64))
        })
        .collect();
    let report = benchmark_feature_sets(&matrix, &sets, &specs, &protocol)?;

    create_dir(&cfg.out.join("tables"))?;
    create_dir(&cfg.out.join("roc"))?;
    for &set in &sets {
        write_file(
            &cfg.out.join("tables").join(format!("{}.csv", set.as_str())),
            &model_table_csv(&report, set),
        )?;
    }
    if families.contains(&ModelFamily::StochasticGradientBoosting) {
        let summary = family_summary_csv(&report, ModelFamily::StochasticGradientBoosting);
        write_file(&cfg.out.join("tables").join("sgb_summary.csv"), &summary)?;
        print!("{summary}");
    }
    for cell in &report.cells {
        write_file(
            &cfg.out
                .join("roc")
                .join(format!("{}.csv", roc_stem(cell.set, cell.spec.family))),
            &roc_csv(&cell.roc),
        )?;
    }
    eprintln!(
        "bench: {} cells written to {}",
        report.cells.len(),
        cfg.out.display()
    );
    Ok(())
}

fn cmd_stats(cfg: &RunConfig) -> Result<(), HrvError> {
    let text =
        String::from_utf8(read_file(&cfg.stats.input)?).map_err(|_| HrvError::InvalidUtf8)?;
    let rows = parse_features_csv(&text)?;
    if rows.iter().any(|r| r.label.is_empty()) {
        return Err(HrvError::Config(
            "stats requires labeled rows; run extract on a cohort with manifest.csv".into(),
        ));
    }
    let report = group_stats(&rows)?;
    create_dir(&cfg.out.join("stats"))?;
    write_file(
        &cfg.out.join("stats").join("table7.csv"),
        &table7_csv(&report),
    )?;
    eprintln!(
        "stats: {} index rows written to {}",
        report.indexes.len(),
        cfg.out.join("stats").join("table7.csv").display()
    );
    Ok(())
}
