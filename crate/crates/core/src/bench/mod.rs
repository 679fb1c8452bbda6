//! Benchmark harness: load or generate a pattern, order several randomly
//! relabeled copies, check the results and summarize them.

mod report;
mod trace;

pub use report::{
    aggregate, render, report_stats, step_histogram, summarize, Aggregate, Format, HistogramBin, MeanSd, ReportMeta,
    RunRecord, RunSet, StatsReport, SCHEMA_VERSION,
};
pub use trace::{verify_trace, TraceFailure, TraceVerdict};

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amd::{sequential_amd_observed, AmdOptions, StepObserver};
use crate::fill::symbolic_fill;
use crate::generate;
use crate::matrix_io::{
    apply_permutation, pattern_from_symmetric, random_permutation, read_matrix_market, symmetrize_pattern, Permutation,
    SparsePattern,
};
use crate::oracle::{fill_in_count, minimum_degree_order};
use crate::parallel::{parallel_amd_observed, ParallelConfig, DEFAULT_AUGMENTATION, DEFAULT_LIM_TOTAL, DEFAULT_MULT};
use crate::result::{OrderingError, OrderingResult, PhaseTimes, StepStats};
use crate::verify::{MirrorChecks, OracleMirror};

/// Below this many vertices fill is counted by explicit elimination, above
/// it from the elimination tree.
pub const FILL_ORACLE_LIMIT: usize = 100_000;

/// Largest input that `verify` also mirrors step by step.
pub const MIRROR_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Sequential,
    Parallel,
    /// Exact minimum degree on the explicit elimination graph.
    OracleMd,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequential => "sequential",
            Mode::Parallel => "parallel",
            Mode::OracleMd => "oracle-md",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sequential" => Ok(Mode::Sequential),
            "parallel" => Ok(Mode::Parallel),
            "oracle-md" => Ok(Mode::OracleMd),
            other => Err(format!(
                "unknown mode '{other}', expected sequential, parallel or oracle-md"
            )),
        }
    }
}

/// Synthetic inputs: `grid2d:<k>`, `grid3d:<k>` or `er:<n>,<p>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenSpec {
    Grid2d(usize),
    Grid3d(usize),
    ErdosRenyi { n: usize, prob: f64 },
}

impl GenSpec {
    /// Random graphs draw their edges from `seed`.
    pub fn build(&self, seed: u64) -> SparsePattern {
        match *self {
            GenSpec::Grid2d(k) => generate::grid2d(k),
            GenSpec::Grid3d(k) => generate::grid3d(k),
            GenSpec::ErdosRenyi { n, prob } => generate::erdos_renyi(n, prob, seed),
        }
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Grid2d(k) => write!(f, "grid2d:{k}"),
            GenSpec::Grid3d(k) => write!(f, "grid3d:{k}"),
            GenSpec::ErdosRenyi { n, prob } => write!(f, "er:{n},{prob}"),
        }
    }
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad generator '{s}', expected grid2d:<k>, grid3d:<k> or er:<n>,<p>");
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "grid2d" => arg.parse().map(GenSpec::Grid2d).map_err(|_| bad()),
            "grid3d" => arg.parse().map(GenSpec::Grid3d).map_err(|_| bad()),
            "er" => {
                let (n, p) = arg.split_once(',').ok_or_else(bad)?;
                let n = n.parse().map_err(|_| bad())?;
                let prob: f64 = p.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&prob) {
                    return Err(bad());
                }
                Ok(GenSpec::ErdosRenyi { n, prob })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    File(PathBuf),
    Generated(GenSpec),
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::File(p) => write!(f, "{}", p.display()),
            Input::Generated(g) => g.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Input,
    pub mode: Mode,
    pub workers: usize,
    pub mult: f64,
    pub lim_total: usize,
    pub augmentation: f64,
    /// Repeat `r` relabels the input with `seed + r` and uses it for the
    /// parallel labels too.
    pub seed: u64,
    pub repeats: usize,
    pub verify: bool,
    /// Trust the input to be symmetric instead of forming `|A| + |Aᵀ|`.
    pub skip_symmetrize: bool,
    pub aggressive_absorption: bool,
    /// Also order the same relabelings with this mode and report the fill ratio.
    pub baseline: Option<Mode>,
    pub stats_out: Option<PathBuf>,
    pub format: Format,
    /// Permutation of the first repeat, one 0-based index per line.
    pub perm_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: Input, mode: Mode) -> Self {
        RunConfig {
            input,
            mode,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            mult: DEFAULT_MULT,
            lim_total: DEFAULT_LIM_TOTAL,
            augmentation: DEFAULT_AUGMENTATION,
            seed: 0,
            repeats: 1,
            verify: false,
            skip_symmetrize: false,
            aggressive_absorption: true,
            baseline: None,
            stats_out: None,
            format: Format::Json,
            perm_out: None,
        }
    }

    fn parallel(&self, seed: u64, augmentation: f64) -> ParallelConfig {
        ParallelConfig {
            workers: self.workers,
            mult: self.mult,
            lim_total: self.lim_total,
            augmentation,
            seed,
            aggressive_absorption: self.aggressive_absorption,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
    #[error("{0} (after retry)")]
    PoolExhausted(OrderingError),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("output: {0}")]
    Output(String),
}

impl BenchError {
    /// 2 usage, 3 unreadable or malformed input, 4 pool exhausted after the
    /// retry, 5 verification failure, 6 output not writable.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 2,
            BenchError::Input(_) => 3,
            BenchError::PoolExhausted(_) => 4,
            BenchError::Verification(_) => 5,
            BenchError::Output(_) => 6,
        }
    }
}

impl From<OrderingError> for BenchError {
    fn from(e: OrderingError) -> Self {
        match e {
            OrderingError::PoolExhausted { .. } => BenchError::PoolExhausted(e),
            OrderingError::InvalidConfig(m) => BenchError::Usage(m),
            OrderingError::Quotient(q) => BenchError::Input(q.to_string()),
        }
    }
}

/// Everything a run produced. Permutations are in the original numbering.
#[derive(Debug)]
pub struct RunOutcome {
    pub pattern: SparsePattern,
    pub report: StatsReport,
    pub results: Vec<OrderingResult>,
    pub baseline: Vec<OrderingResult>,
}

pub fn load_pattern(input: &Input, skip_symmetrize: bool, seed: u64) -> Result<SparsePattern, BenchError> {
    match input {
        Input::Generated(g) => Ok(g.build(seed)),
        Input::File(path) => {
            let raw = read_matrix_market(path).map_err(|e| BenchError::Input(format!("{}: {e}", path.display())))?;
            let p = if skip_symmetrize {
                pattern_from_symmetric(&raw)
            } else {
                symmetrize_pattern(&raw)
            };
            p.map_err(|e| BenchError::Input(format!("{}: {e}", path.display())))
        }
    }
}

/// Fill edges of `perm` on `p`, by elimination on small inputs and from the
/// elimination tree on large ones.
pub fn count_fill(p: &SparsePattern, perm: &Permutation) -> u64 {
    if p.n() < FILL_ORACLE_LIMIT {
        fill_in_count(p, perm).expect("permutation matches the pattern") as u64
    } else {
        symbolic_fill(p, perm)
    }
}

/// Total capacity doubles on retry: `1 + a` becomes `2 (1 + a)`.
pub fn retry_augmentation(a: f64) -> f64 {
    2.0 * (1.0 + a) - 1.0
}

/// Orders, verifies and reports as `cfg` asks, then writes the requested
/// files. Nothing is written unless every repeat succeeds.
pub fn run_order(cfg: &RunConfig) -> Result<RunOutcome, BenchError> {
    if cfg.repeats == 0 {
        return Err(BenchError::Usage("repeats must be at least 1".into()));
    }
    if cfg.mode == Mode::Parallel || cfg.baseline == Some(Mode::Parallel) {
        cfg.parallel(cfg.seed, cfg.augmentation).validate(0)?;
    } else if !(cfg.augmentation.is_finite() && cfg.augmentation >= 0.0) {
        return Err(BenchError::Usage("augmentation must be finite and nonnegative".into()));
    }
    let pattern = load_pattern(&cfg.input, cfg.skip_symmetrize, cfg.seed)?;

    let mut records = Vec::new();
    let mut results = Vec::new();
    let mut base_records = Vec::new();
    let mut baseline = Vec::new();
    for r in 0..cfg.repeats {
        let seed = cfg.seed.wrapping_add(r as u64);
        let relabel = random_permutation(pattern.n(), seed);
        let q = apply_permutation(&pattern, &relabel).expect("sizes match");
        let (rec, res) = order_repeat(cfg, cfg.mode, &pattern, &q, &relabel, r, seed)?;
        records.push(rec);
        results.push(res);
        if let Some(b) = cfg.baseline {
            let (rec, res) = order_repeat(cfg, b, &pattern, &q, &relabel, r, seed)?;
            base_records.push(rec);
            baseline.push(res);
        }
    }

    let meta = ReportMeta {
        matrix: cfg.input.to_string(),
        n: pattern.n(),
        nnz: pattern.nnz_offdiag(),
        workers: cfg.workers,
        mult: cfg.mult,
        lim_total: cfg.lim_total,
        augmentation: cfg.augmentation,
        seed: cfg.seed,
    };
    let report = summarize(
        meta,
        (cfg.mode, &records),
        cfg.baseline.map(|b| (b, base_records.as_slice())),
    )?;

    if let Some(path) = &cfg.perm_out {
        write_permutation(path, &results[0].permutation)?;
    }
    if let Some(path) = &cfg.stats_out {
        fs::write(path, render(&report, cfg.format))
            .map_err(|e| BenchError::Output(format!("{}: {e}", path.display())))?;
    }
    Ok(RunOutcome {
        pattern,
        report,
        results,
        baseline,
    })
}

/// One 0-based vertex index per line, in elimination order.
pub fn write_permutation(path: &Path, perm: &Permutation) -> Result<(), BenchError> {
    let err = |e: std::io::Error| BenchError::Output(format!("{}: {e}", path.display()));
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(err)?);
    for v in perm.order() {
        writeln!(out, "{v}").map_err(err)?;
    }
    out.flush().map_err(err)
}

/// Orders the relabeled copy `q`, maps the result back to the numbering of
/// `p` and checks it if asked.
fn order_repeat(
    cfg: &RunConfig,
    mode: Mode,
    p: &SparsePattern,
    q: &SparsePattern,
    relabel: &Permutation,
    repeat: usize,
    seed: u64,
) -> Result<(RunRecord, OrderingResult), BenchError> {
    let t = Instant::now();
    let (mut res, augmentation, retried) = order_with_retry(cfg, mode, q, seed)?;
    let seconds = t.elapsed().as_secs_f64();

    res.permutation = relabel.compose(&res.permutation);
    for step in &mut res.trace {
        for v in step.iter_mut() {
            *v = relabel.order()[*v];
        }
    }
    let fill = count_fill(p, &res.permutation);
    res.fill_edges = Some(fill);

    if cfg.verify {
        let counts: Vec<usize> = res.steps.iter().map(|s| s.eliminated).collect();
        verify_trace(p, &res.trace, &counts, &res.permutation, Some(fill))
            .map_err(|e| BenchError::Verification(format!("{mode} repeat {repeat}: {e}")))?;
    }

    let threshold = if mode == Mode::Parallel { cfg.workers } else { 1 };
    let record = RunRecord {
        repeat,
        seed,
        seconds,
        phases: res.phase_times,
        fill: Some(fill),
        steps: res.steps.len(),
        small_steps: res.steps.iter().filter(|s| s.pivots < threshold).count(),
        step_histogram: step_histogram(res.steps.iter().map(|s| s.pivots)),
        peak_pool_usage: res.peak_pool_usage,
        pool_capacity: res.pool_capacity,
        augmentation,
        retried,
        garbage_collections: res.garbage_collections,
        verified: cfg.verify,
    };
    Ok((record, res))
}

/// Runs once, and once more with doubled pool capacity if the first attempt
/// ran out of space.
fn order_with_retry(
    cfg: &RunConfig,
    mode: Mode,
    q: &SparsePattern,
    seed: u64,
) -> Result<(OrderingResult, f64, bool), BenchError> {
    match order_once(cfg, mode, q, seed, cfg.augmentation) {
        Err(BenchError::PoolExhausted(_)) => {
            let a = retry_augmentation(cfg.augmentation);
            order_once(cfg, mode, q, seed, a).map(|r| (r, a, true))
        }
        other => other.map(|r| (r, cfg.augmentation, false)),
    }
}

fn order_once(
    cfg: &RunConfig,
    mode: Mode,
    q: &SparsePattern,
    seed: u64,
    augmentation: f64,
) -> Result<OrderingResult, BenchError> {
    let mut mirror = (cfg.verify && q.n() <= MIRROR_LIMIT && mode != Mode::OracleMd)
        .then(|| OracleMirror::new(q, MirrorChecks::default()));
    let observer: &mut dyn StepObserver = match mirror.as_mut() {
        Some(m) => m,
        None => &mut (),
    };
    let res = match mode {
        Mode::Sequential => {
            let opts = AmdOptions {
                aggressive_absorption: cfg.aggressive_absorption,
                augmentation,
            };
            sequential_amd_observed(q, &opts, observer)?
        }
        Mode::Parallel => parallel_amd_observed(q, &cfg.parallel(seed, augmentation), observer)?,
        Mode::OracleMd => oracle_md(q),
    };
    if let Some(m) = mirror {
        if let Some(v) = m.violations().first() {
            return Err(BenchError::Verification(format!(
                "{mode}: {} mirror violations, first: {v}",
                m.violations().len()
            )));
        }
    }
    Ok(res)
}

fn oracle_md(q: &SparsePattern) -> OrderingResult {
    let t = Instant::now();
    let (perm, fill) = minimum_degree_order(q);
    let n = q.n();
    OrderingResult {
        steps: vec![
            StepStats {
                pivots: 1,
                eliminated: 1,
                seconds: 0.0,
            };
            n
        ],
        trace: perm.order().iter().map(|&v| vec![v]).collect(),
        permutation: perm,
        phase_times: PhaseTimes {
            core: t.elapsed().as_secs_f64(),
            ..PhaseTimes::default()
        },
        peak_pool_usage: 0,
        pool_capacity: 0,
        garbage_collections: 0,
        fill_edges: Some(fill as u64),
        intra: Default::default(),
    }
}
