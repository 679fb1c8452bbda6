//! `paramd`: fill-reducing orderings from the command line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use paramd::bench::{render, run_order, BenchError, Format, GenSpec, Input, Mode, RunConfig};
use paramd::matrix_io::write_matrix_market;
use paramd::parallel::{DEFAULT_AUGMENTATION, DEFAULT_LIM_TOTAL, DEFAULT_MULT};

#[derive(Parser)]
#[command(
    name = "paramd",
    version,
    about = "Approximate minimum degree orderings, sequential and parallel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order a Matrix Market file or a generated pattern.
    Order(OrderArgs),
    /// Write a generated pattern as a Matrix Market file.
    Gen(GenArgs),
}

#[derive(Args)]
struct OrderArgs {
    /// Matrix Market input; omit when using --gen.
    #[arg(required_unless_present = "gen", conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// grid2d:<k>, grid3d:<k> or er:<n>,<p>
    #[arg(long, env = "PARAMD_GEN")]
    gen: Option<GenSpec>,
    #[arg(long, env = "PARAMD_MODE", default_value = "parallel")]
    mode: Mode,
    /// Defaults to the number of available cores.
    #[arg(long, env = "PARAMD_WORKERS")]
    workers: Option<usize>,
    /// Pivot degree window: candidates have degree at most mult times the minimum.
    #[arg(long, env = "PARAMD_MULT", default_value_t = DEFAULT_MULT)]
    mult: f64,
    /// Candidate budget per step, split evenly over workers.
    #[arg(long, env = "PARAMD_LIM_TOTAL", default_value_t = DEFAULT_LIM_TOTAL)]
    lim_total: usize,
    /// Spare pool space as a multiple of the pattern size.
    #[arg(long, env = "PARAMD_AUGMENTATION", default_value_t = DEFAULT_AUGMENTATION)]
    augmentation: f64,
    #[arg(long, env = "PARAMD_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of random relabelings to order; repeat r uses seed + r.
    #[arg(long, env = "PARAMD_REPEATS", default_value_t = 1)]
    repeats: usize,
    /// Replay every run on the explicit elimination graph.
    #[arg(long, env = "PARAMD_VERIFY")]
    verify: bool,
    /// Input is already symmetric; do not form |A| + |A^T|.
    #[arg(long, env = "PARAMD_SKIP_SYMMETRIZE")]
    skip_symmetrize: bool,
    /// Only absorb elements adjacent to the pivot.
    #[arg(long, env = "PARAMD_NO_AGGRESSIVE")]
    no_aggressive: bool,
    /// Also order every relabeling with this mode and report the fill ratio.
    #[arg(long, env = "PARAMD_BASELINE_MODE")]
    baseline_mode: Option<Mode>,
    /// Statistics file; printed to stdout when omitted.
    #[arg(long, env = "PARAMD_STATS")]
    stats: Option<PathBuf>,
    #[arg(long, env = "PARAMD_FORMAT", default_value = "json")]
    format: Format,
    /// Permutation of the first repeat, one 0-based index per line.
    #[arg(long, env = "PARAMD_PERM_OUT")]
    perm_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// grid2d:<k>, grid3d:<k> or er:<n>,<p>
    spec: GenSpec,
    /// Seed for random graphs.
    #[arg(long, env = "PARAMD_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

impl OrderArgs {
    fn config(&self) -> RunConfig {
        let input = match (&self.input, self.gen) {
            (_, Some(g)) => Input::Generated(g),
            (Some(p), None) => Input::File(p.clone()),
            (None, None) => unreachable!("clap requires one of the two"),
        };
        let mut cfg = RunConfig::new(input, self.mode);
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.mult = self.mult;
        cfg.lim_total = self.lim_total;
        cfg.augmentation = self.augmentation;
        cfg.seed = self.seed;
        cfg.repeats = self.repeats;
        cfg.verify = self.verify;
        cfg.skip_symmetrize = self.skip_symmetrize;
        cfg.aggressive_absorption = !self.no_aggressive;
        cfg.baseline = self.baseline_mode;
        cfg.stats_out = self.stats.clone();
        cfg.format = self.format;
        cfg.perm_out = self.perm_out.clone();
        cfg
    }
}

fn order(args: &OrderArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), BenchError> {
    let cfg = args.config();
    let out = run_order(&cfg)?;
    if cfg.stats_out.is_none() {
        stdout
            .write_all(&render(&out.report, cfg.format))
            .map_err(|e| BenchError::Output(e.to_string()))?;
    }
    let a = &out.report.candidate.aggregate;
    let _ = writeln!(
        stderr,
        "{}: n={} {} x{} fill={} time={:.4}s",
        out.report.meta.matrix,
        out.report.meta.n,
        cfg.mode,
        cfg.repeats,
        a.fill.map_or("-".into(), |f| format!("{:.0}", f.mean)),
        a.seconds.mean,
    );
    Ok(())
}

fn generate(args: &GenArgs) -> anyhow::Result<()> {
    let p = args.spec.build(args.seed);
    let f = File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    write_matrix_market(&p, BufWriter::new(f)).with_context(|| format!("writing {}", args.output.display()))?;
    Ok(())
}

/// Runs the command line `args` and returns the exit code: 0 success, 2
/// usage, 3 unreadable input, 4 pool exhausted after the retry, 5
/// verification failure, 6 output not writable.
fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().ansi().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return e.exit_code() as u8;
        }
    };
    match cli.command {
        Command::Order(args) => match order(&args, stdout, stderr) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "paramd: {e}");
                e.exit_code() as u8
            }
        },
        Command::Gen(args) => match generate(&args) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "paramd: {e:#}");
                6
            }
        },
    }
}

fn main() -> ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code)
}
