//! Per-repeat records, their aggregates, and JSON/CSV rendering.

use serde::{Deserialize, Serialize};

use super::{BenchError, Mode};
use crate::result::PhaseTimes;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}', expected json or csv")),
        }
    }
}

/// Steps whose pivot count lies in `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: usize,
    pub hi: usize,
    pub steps: usize,
}

/// Power-of-two bins `[1,1], [2,3], [4,7], ...` up to the largest size.
pub fn step_histogram(sizes: impl IntoIterator<Item = usize>) -> Vec<HistogramBin> {
    let mut bins: Vec<HistogramBin> = Vec::new();
    for s in sizes.into_iter().filter(|&s| s > 0) {
        let b = s.ilog2() as usize;
        while bins.len() <= b {
            let lo = 1usize << bins.len();
            bins.push(HistogramBin {
                lo,
                hi: 2 * lo - 1,
                steps: 0,
            });
        }
        bins[b].steps += 1;
    }
    bins
}

fn merge_histograms<'a>(hs: impl IntoIterator<Item = &'a [HistogramBin]>) -> Vec<HistogramBin> {
    let mut out: Vec<HistogramBin> = Vec::new();
    for h in hs {
        for (i, b) in h.iter().enumerate() {
            if out.len() <= i {
                out.push(HistogramBin { steps: 0, ..*b });
            }
            out[i].steps += b.steps;
        }
    }
    out
}

/// One ordering of one relabeled copy of the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub repeat: usize,
    pub seed: u64,
    /// Wall time of the ordering call.
    pub seconds: f64,
    pub phases: PhaseTimes,
    pub fill: Option<u64>,
    pub steps: usize,
    /// Steps with fewer pivots than workers.
    pub small_steps: usize,
    pub step_histogram: Vec<HistogramBin>,
    pub peak_pool_usage: usize,
    pub pool_capacity: usize,
    /// Augmentation of the attempt that succeeded.
    pub augmentation: f64,
    pub retried: bool,
    pub garbage_collections: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation, 0 for a single value.
    pub sd: f64,
}

impl MeanSd {
    pub fn of(xs: &[f64]) -> MeanSd {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MeanSd { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub seconds: MeanSd,
    pub fill: Option<MeanSd>,
    pub preprocess: MeanSd,
    pub selection: MeanSd,
    pub core: MeanSd,
    /// Sum of the three phases, preprocessing included.
    pub total: MeanSd,
    pub steps: MeanSd,
    pub step_histogram: Vec<HistogramBin>,
    /// Smallest step size that keeps every worker busy.
    pub worker_threshold: usize,
    pub small_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSet {
    pub mode: Mode,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub matrix: String,
    pub n: usize,
    /// Off-diagonal entries of the symmetric pattern.
    pub nnz: usize,
    pub workers: usize,
    pub mult: f64,
    pub lim_total: usize,
    pub augmentation: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub schema_version: u32,
    #[serde(flatten)]
    pub meta: ReportMeta,
    pub candidate: RunSet,
    pub baseline: Option<RunSet>,
    /// Candidate mean fill over baseline mean fill.
    pub fill_ratio: Option<f64>,
}

pub fn aggregate(runs: &[RunRecord], worker_threshold: usize) -> Result<Aggregate, BenchError> {
    if runs.is_empty() {
        return Err(BenchError::Usage("no runs to report".into()));
    }
    let col = |f: &dyn Fn(&RunRecord) -> f64| MeanSd::of(&runs.iter().map(f).collect::<Vec<_>>());
    let fills: Option<Vec<f64>> = runs.iter().map(|r| r.fill.map(|f| f as f64)).collect();
    Ok(Aggregate {
        seconds: col(&|r| r.seconds),
        fill: fills.map(|f| MeanSd::of(&f)),
        preprocess: col(&|r| r.phases.preprocess),
        selection: col(&|r| r.phases.selection),
        core: col(&|r| r.phases.core),
        total: col(&|r| r.phases.total()),
        steps: col(&|r| r.steps as f64),
        step_histogram: merge_histograms(runs.iter().map(|r| r.step_histogram.as_slice())),
        worker_threshold,
        small_steps: runs.iter().map(|r| r.small_steps).sum(),
    })
}

pub fn summarize(
    meta: ReportMeta,
    candidate: (Mode, &[RunRecord]),
    baseline: Option<(Mode, &[RunRecord])>,
) -> Result<StatsReport, BenchError> {
    let threshold = |m: Mode| if m == Mode::Parallel { meta.workers } else { 1 };
    let set = |(mode, runs): (Mode, &[RunRecord])| -> Result<RunSet, BenchError> {
        Ok(RunSet {
            mode,
            runs: runs.to_vec(),
            aggregate: aggregate(runs, threshold(mode))?,
        })
    };
    let candidate = set(candidate)?;
    let baseline = baseline.map(set).transpose()?;
    let fill_ratio = baseline.as_ref().and_then(|b| {
        let c = candidate.aggregate.fill?.mean;
        let b = b.aggregate.fill?.mean;
        (b > 0.0).then(|| c / b)
    });
    Ok(StatsReport {
        schema_version: SCHEMA_VERSION,
        meta,
        candidate,
        baseline,
        fill_ratio,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    set: &'a str,
    scope: String,
    field: &'a str,
    value: String,
}

/// Renders the report. CSV is in long form: one `set,scope,field,value` row
/// per number.
pub fn render(report: &StatsReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report).expect("report is plain data");
            v.push(b'\n');
            v
        }
        Format::Csv => render_csv(report),
    }
}

/// Aggregates `runs` (and `baseline`) and renders them in one go.
pub fn report_stats(
    meta: ReportMeta,
    candidate: (Mode, &[RunRecord]),
    baseline: Option<(Mode, &[RunRecord])>,
    format: Format,
) -> Result<Vec<u8>, BenchError> {
    Ok(render(&summarize(meta, candidate, baseline)?, format))
}

fn render_csv(report: &StatsReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |set: &str, scope: String, field: &str, value: String| {
        w.serialize(CsvRow {
            set,
            scope,
            field,
            value,
        })
        .expect("write to memory");
    };
    let m = &report.meta;
    row(
        "meta",
        String::new(),
        "schema_version",
        report.schema_version.to_string(),
    );
    row("meta", String::new(), "matrix", m.matrix.clone());
    row("meta", String::new(), "n", m.n.to_string());
    row("meta", String::new(), "nnz", m.nnz.to_string());
    row("meta", String::new(), "workers", m.workers.to_string());
    row("meta", String::new(), "mult", m.mult.to_string());
    row("meta", String::new(), "lim_total", m.lim_total.to_string());
    row("meta", String::new(), "augmentation", m.augmentation.to_string());
    row("meta", String::new(), "seed", m.seed.to_string());
    if let Some(r) = report.fill_ratio {
        row("meta", String::new(), "fill_ratio", r.to_string());
    }
    let sets = std::iter::once(("candidate", &report.candidate)).chain(report.baseline.iter().map(|b| ("baseline", b)));
    for (name, set) in sets {
        row(name, String::new(), "mode", set.mode.to_string());
        for r in &set.runs {
            let scope = format!("repeat:{}", r.repeat);
            row(name, scope.clone(), "seed", r.seed.to_string());
            row(name, scope.clone(), "seconds", r.seconds.to_string());
            row(name, scope.clone(), "preprocess", r.phases.preprocess.to_string());
            row(name, scope.clone(), "selection", r.phases.selection.to_string());
            row(name, scope.clone(), "core", r.phases.core.to_string());
            row(name, scope.clone(), "total", r.phases.total().to_string());
            if let Some(f) = r.fill {
                row(name, scope.clone(), "fill", f.to_string());
            }
            row(name, scope.clone(), "steps", r.steps.to_string());
            row(name, scope.clone(), "small_steps", r.small_steps.to_string());
            row(name, scope.clone(), "peak_pool_usage", r.peak_pool_usage.to_string());
            row(name, scope.clone(), "pool_capacity", r.pool_capacity.to_string());
            row(name, scope.clone(), "augmentation", r.augmentation.to_string());
            row(name, scope.clone(), "retried", r.retried.to_string());
            row(name, scope, "verified", r.verified.to_string());
        }
        let a = &set.aggregate;
        let mut stats = vec![
            ("seconds", a.seconds),
            ("preprocess", a.preprocess),
            ("selection", a.selection),
            ("core", a.core),
            ("total", a.total),
            ("steps", a.steps),
        ];
        if let Some(f) = a.fill {
            stats.push(("fill", f));
        }
        for (field, s) in stats {
            row(name, "mean".into(), field, s.mean.to_string());
            row(name, "sd".into(), field, s.sd.to_string());
        }
        row(name, String::new(), "worker_threshold", a.worker_threshold.to_string());
        row(name, String::new(), "small_steps", a.small_steps.to_string());
        for b in &a.step_histogram {
            row(name, format!("bin:{}-{}", b.lo, b.hi), "steps", b.steps.to_string());
        }
    }
    w.into_inner().expect("flush to memory")
}
