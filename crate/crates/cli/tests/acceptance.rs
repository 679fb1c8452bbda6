//! Acceptance checks AC1 to AC10. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use paramd::amd::{
    compute_set_difference_sizes, sequential_amd, sequential_amd_observed, update_approximate_degrees, AmdOptions,
    DegreeWorkspace, StepObserver, StepView,
};
use paramd::bench::{retry_augmentation, verify_trace, RunConfig};
use paramd::fill::symbolic_fill;
use paramd::generate::{erdos_renyi, grid2d, grid3d, path, random_tree};
use paramd::matrix_io::{apply_permutation, random_permutation, SparsePattern};
use paramd::oracle::{fill_in_count, minimum_degree_order};
use paramd::parallel::{parallel_amd, parallel_amd_observed, ParallelConfig};
use paramd::quotient::{FreeRuns, Marker, NodeState, QuotientGraph};
use paramd::verify::{MirrorChecks, OracleMirror};
use paramd::{OrderingError, OrderingResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Every ordering run at the default pool size, and the ones that ran out.
static DEFAULT_POOL_RUNS: Mutex<(usize, Vec<String>)> = Mutex::new((0, Vec::new()));

fn note_run<T>(what: &str, r: Result<T, OrderingError>) -> T {
    let mut log = DEFAULT_POOL_RUNS.lock().unwrap();
    log.0 += 1;
    match r {
        Ok(x) => x,
        Err(e) => {
            log.1.push(format!("{what}: {e}"));
            drop(log);
            panic!("{what}: {e}");
        }
    }
}

fn par(p: &SparsePattern, cfg: &ParallelConfig, what: &str) -> OrderingResult {
    assert_eq!(cfg.augmentation, 1.5);
    note_run(what, parallel_amd(p, cfg))
}

fn seq(p: &SparsePattern, what: &str) -> OrderingResult {
    let r = note_run(what, sequential_amd(p, &AmdOptions::default()));
    if r.garbage_collections > 0 {
        DEFAULT_POOL_RUNS
            .lock()
            .unwrap()
            .1
            .push(format!("{what}: {} compactions", r.garbage_collections));
    }
    r
}

fn pcfg(workers: usize, seed: u64) -> ParallelConfig {
    ParallelConfig {
        seed,
        ..ParallelConfig::with_workers(workers)
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// The random-graph corpus shared by the first two checks.
fn small_corpus(count: usize, seed: u64) -> Vec<SparsePattern> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(5..=40);
            let prob = rng.gen_range(0.1..=0.5);
            erdos_renyi(n, prob, seed.wrapping_mul(1000) + i as u64)
        })
        .collect()
}

struct ReplayCounts {
    graphs: usize,
    eliminations: usize,
    neighborhood_checks: usize,
    neighborhood_errors: Vec<String>,
    elements_checked: usize,
    difference_errors: Vec<String>,
}

/// Eliminates in a random order with merging, absorption and mass
/// elimination, checking neighborhoods and set differences at every step.
fn replay_random_orders(corpus: &[SparsePattern]) -> ReplayCounts {
    let mut c = ReplayCounts {
        graphs: corpus.len(),
        eliminations: 0,
        neighborhood_checks: 0,
        neighborhood_errors: Vec::new(),
        elements_checked: 0,
        difference_errors: Vec::new(),
    };
    for (gi, p) in corpus.iter().enumerate() {
        let n = p.n();
        let order = random_permutation(n, 7000 + gi as u64);
        let g = QuotientGraph::from_pattern(p, n as f64).unwrap();
        let mut mirror = OracleMirror::new(
            p,
            MirrorChecks {
                distance2: false,
                degree_bounds: false,
                neighborhoods: true,
            },
        );
        let mut marker = Marker::new(n);
        let mut ws = DegreeWorkspace::new(n);
        let mut free = FreeRuns::new();
        let mut lp = Vec::new();
        let mut k = 0;
        for &x in order.order() {
            if !g.is_variable(x) {
                continue;
            }
            g.collect_element(x, &mut marker, &mut lp).unwrap();
            let freed = g.commit_element(x, &lp, &mut marker).unwrap();

            let mut got = compute_set_difference_sizes(&g, x, &lp, &mut ws);
            got.sort_unstable();
            let want = naive_differences(&g, x, &lp);
            c.elements_checked += want.len();
            if got != want {
                c.difference_errors
                    .push(format!("graph {gi} pivot {x}: got {got:?}, expected {want:?}"));
            }

            let done = update_approximate_degrees(&g, x, std::mem::take(&mut lp), &mut ws, &mut marker, k, true);
            for r in freed.into_iter().chain(done.released.iter().copied()) {
                free.release(r);
            }
            let mut res = match free.take(done.element.len()) {
                Some(r) => r,
                None => g.reserve_pool(done.element.len()).unwrap(),
            };
            g.store_element(x, &done.element, &mut res).unwrap();
            k += done.chain.len();
            c.eliminations += done.chain.len();
            c.neighborhood_checks += g.live_variables().count();
            mirror.on_step(&StepView {
                graph: &g,
                pivots: &[x],
                eliminated: &done.chain,
                k,
            });
        }
        assert_eq!(k, n);
        c.neighborhood_errors
            .extend(mirror.violations().iter().map(|v| format!("graph {gi}: {v}")));
    }
    c
}

fn naive_differences(g: &QuotientGraph, p: usize, lp: &[usize]) -> Vec<(usize, usize)> {
    let mut elems: Vec<usize> = lp
        .iter()
        .flat_map(|&v| g.e_list(v))
        .filter(|&e| e != p && g.state(e) == NodeState::Element)
        .collect();
    elems.sort_unstable();
    elems.dedup();
    elems
        .into_iter()
        .map(|e| {
            let d = g
                .l_list(e)
                .into_iter()
                .filter(|&u| g.is_variable(u) && !lp.contains(&u))
                .map(|u| g.weight(u))
                .sum();
            (e, d)
        })
        .collect()
}

fn ac1(replay: &ReplayCounts, took: Duration) -> Verdict {
    let ok = replay.neighborhood_errors.is_empty() && took < Duration::from_secs(60);
    verdict(
        ok,
        format!(
            "{} graphs, {} eliminations, {} neighborhoods compared, {} mismatches, replay {:.1}s{}",
            replay.graphs,
            replay.eliminations,
            replay.neighborhood_checks,
            replay.neighborhood_errors.len(),
            took.as_secs_f64(),
            replay
                .neighborhood_errors
                .first()
                .map_or(String::new(), |e| format!(", first: {e}")),
        ),
    )
}

/// 3x3 grid after eliminating 5, 2 and 9 (1-based), then pivot 7.
fn grid_third_term() -> usize {
    let v = |i: usize| i - 1;
    let g = QuotientGraph::from_pattern(&grid2d(3), 1.5).unwrap();
    let mut marker = Marker::new(9);
    for x in [5, 2, 9] {
        let mut res = g.reserve_pool(g.neighborhood_upper_bound(v(x))).unwrap();
        g.eliminate_pivot(v(x), &mut res, &mut marker).unwrap();
    }
    let mut lp = Vec::new();
    g.collect_element(v(7), &mut marker, &mut lp).unwrap();
    g.commit_element(v(7), &lp, &mut marker).unwrap();
    let mut ws = DegreeWorkspace::new(9);
    let done = update_approximate_degrees(&g, v(7), lp, &mut ws, &mut marker, 3, true);
    done.updates
        .iter()
        .find(|u| u.v == v(8))
        .expect("8 is in the new element")
        .terms[2]
}

fn ac2(replay: &ReplayCounts) -> Verdict {
    let third = grid_third_term();
    let ok = replay.difference_errors.is_empty() && third == 5;
    verdict(
        ok,
        format!(
            "{} element differences compared, {} mismatches; grid instance third term for 8 = {third}{}",
            replay.elements_checked,
            replay.difference_errors.len(),
            replay
                .difference_errors
                .first()
                .map_or(String::new(), |e| format!(", first: {e}")),
        ),
    )
}

fn ac3() -> Verdict {
    let checks = MirrorChecks {
        distance2: true,
        degree_bounds: true,
        neighborhoods: false,
    };
    let mut corpus = small_corpus(150, 3);
    corpus.extend([grid2d(6), grid3d(3), path(40), random_tree(40, 1)]);
    let (mut runs, mut steps, mut errors) = (0, 0, Vec::new());
    for (i, p) in corpus.iter().enumerate() {
        assert!(p.n() <= 40);
        let mut m = OracleMirror::new(p, checks);
        sequential_amd_observed(p, &AmdOptions::default(), &mut m).unwrap();
        runs += 1;
        steps += m.steps();
        errors.extend(m.violations().iter().map(|v| format!("sequential {i}: {v}")));
        for w in [1, 2, 4, 8] {
            let mut m = OracleMirror::new(p, checks);
            parallel_amd_observed(p, &pcfg(w, i as u64), &mut m).unwrap();
            runs += 1;
            steps += m.steps();
            errors.extend(m.violations().iter().map(|v| format!("parallel w{w} {i}: {v}")));
        }
    }
    verdict(
        errors.is_empty(),
        format!(
            "{runs} instrumented runs, {steps} steps, {} bound violations{}",
            errors.len(),
            errors.first().map_or(String::new(), |e| format!(", first: {e}"))
        ),
    )
}

fn ac4() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut steps, mut errors) = (0, Vec::new());
    let mut largest = 0;
    for run in 0..100u64 {
        let p = match run % 3 {
            0 => grid2d(rng.gen_range(10..=44)),
            1 => grid3d(rng.gen_range(5..=12)),
            _ => {
                let n = rng.gen_range(200..=2000);
                let deg: f64 = rng.gen_range(3.0..=10.0);
                erdos_renyi(n, deg / (n - 1) as f64, run)
            }
        };
        assert!(p.n() <= 2000);
        largest = largest.max(p.n());
        let workers = [2, 4, 8][run as usize % 3];
        let r = par(&p, &pcfg(workers, run), "distance-2 corpus");
        let counts: Vec<usize> = r.steps.iter().map(|s| s.eliminated).collect();
        steps += r.steps.len();
        if let Err(e) = verify_trace(&p, &r.trace, &counts, &r.permutation, None) {
            errors.push(format!("run {run} (n={}, workers={workers}): {e}", p.n()));
        }
    }
    let took = t.elapsed();
    verdict(
        errors.is_empty() && took < Duration::from_secs(120),
        format!(
            "100 runs up to n={largest}, {steps} steps checked, {} failures, {:.1}s{}",
            errors.len(),
            took.as_secs_f64(),
            errors.first().map_or(String::new(), |e| format!(", first: {e}"))
        ),
    )
}

fn ac5() -> Verdict {
    let configs: Vec<(&str, SparsePattern, ParallelConfig)> = vec![
        ("grid2d:30", grid2d(30), pcfg(2, 1)),
        ("grid2d:30", grid2d(30), pcfg(8, 1)),
        ("grid3d:10", grid3d(10), pcfg(4, 2)),
        (
            "grid3d:10",
            grid3d(10),
            ParallelConfig {
                mult: 1.5,
                ..pcfg(4, 2)
            },
        ),
        ("er:1500", erdos_renyi(1500, 6.0 / 1499.0, 5), pcfg(3, 3)),
        (
            "er:1500",
            erdos_renyi(1500, 6.0 / 1499.0, 5),
            ParallelConfig {
                lim_total: 64,
                ..pcfg(3, 3)
            },
        ),
        ("er:800", erdos_renyi(800, 0.02, 6), pcfg(8, 99)),
        ("tree:2000", random_tree(2000, 7), pcfg(4, 4)),
        (
            "grid2d:50",
            grid2d(50),
            ParallelConfig {
                mult: 1.0,
                ..pcfg(2, 12345)
            },
        ),
        (
            "grid3d:8",
            grid3d(8),
            ParallelConfig {
                lim_total: 16,
                mult: 2.0,
                ..pcfg(8, 8)
            },
        ),
    ];
    let mut bad = Vec::new();
    for (name, p, cfg) in &configs {
        let first = par(p, cfg, "determinism");
        for _ in 1..5 {
            let again = par(p, cfg, "determinism");
            if again.permutation != first.permutation {
                bad.push(format!("{name} workers={} seed={}", cfg.workers, cfg.seed));
                break;
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{} configurations x 5 runs, {} differ {:?}",
            configs.len(),
            bad.len(),
            bad
        ),
    )
}

fn ac6() -> Verdict {
    let t = Instant::now();
    let mut matrices = vec![
        ("grid2d:100".to_string(), grid2d(100)),
        ("grid3d:20".to_string(), grid3d(20)),
    ];
    for s in 0..5 {
        matrices.push((format!("er:5000 #{s}"), erdos_renyi(5000, 8.0 / 4999.0, 600 + s)));
    }
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, p) in &matrices {
        let mut ratios = Vec::new();
        for seed in 0..5 {
            // same relabeled copy for both methods
            let q = apply_permutation(p, &random_permutation(p.n(), seed)).unwrap();
            let s = seq(&q, "fill parity");
            let r = par(&q, &pcfg(8, seed), "fill parity");
            ratios.push(symbolic_fill(&q, &r.permutation) as f64 / symbolic_fill(&q, &s.permutation) as f64);
        }
        let m = median(ratios);
        worst = worst.max(m);
        parts.push(format!("{name} {m:.3}"));
    }
    let took = t.elapsed();
    verdict(
        worst <= 1.35 && took < Duration::from_secs(300),
        format!(
            "median parallel/sequential fill: {}; worst {worst:.3} (limit 1.35), {:.1}s",
            parts.join(", "),
            took.as_secs_f64()
        ),
    )
}

fn ac7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for i in 0..50u64 {
        let n = rng.gen_range(5..=25);
        let prob = rng.gen_range(0.1..=0.5);
        let p = erdos_renyi(n, prob, 7000 + i);
        let amd = fill_in_count(&p, &seq(&p, "md sanity").permutation).unwrap();
        let (_, md) = minimum_degree_order(&p);
        if amd as f64 > 1.5 * md as f64 {
            bad.push(format!("graph {i}: amd {amd}, md {md}"));
        }
        if md > 0 {
            worst = worst.max(amd as f64 / md as f64);
        }
    }
    let mut tree_fill = 0;
    for n in [1, 2, 5, 17, 100, 1000] {
        tree_fill += fill_in_count(&path(n), &seq(&path(n), "paths").permutation).unwrap();
    }
    for s in 0..20 {
        let t = random_tree(10 + 50 * s as usize, s);
        tree_fill += fill_in_count(&t, &seq(&t, "trees").permutation).unwrap();
    }
    verdict(
        bad.is_empty() && tree_fill == 0,
        format!(
            "50 graphs, worst amd/md fill {worst:.3} (limit 1.5), {} over; path and tree fill {tree_fill}{}",
            bad.len(),
            bad.first().map_or(String::new(), |e| format!(", first: {e}"))
        ),
    )
}

fn ac8() -> Verdict {
    let t = Instant::now();
    let p = grid3d(56);
    let entries = p.nnz_offdiag() + p.n();
    assert!(entries >= 1_000_000);
    let time = |workers: usize| {
        let runs: Vec<f64> = (0..3)
            .map(|_| {
                let s = Instant::now();
                par(&p, &pcfg(workers, 1), "scaling");
                s.elapsed().as_secs_f64()
            })
            .collect();
        median(runs)
    };
    let one = time(1);
    let eight = time(8);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let ratio = eight / one;
    verdict(
        ratio <= 0.9 && t.elapsed() < Duration::from_secs(600),
        format!(
            "grid3d:56 ({entries} entries): 1 worker {one:.3}s, 8 workers {eight:.3}s, ratio {ratio:.3} (limit 0.9) on {cores} available core(s)"
        ),
    )
}

fn ac9() -> Verdict {
    // a sweep of its own on top of every default-pool run above
    let mut corpus = vec![
        grid2d(100),
        grid3d(20),
        grid3d(30),
        erdos_renyi(5000, 8.0 / 4999.0, 900),
    ];
    corpus.extend(small_corpus(20, 9).into_iter().filter(|p| p.nnz_offdiag() > 0));
    for (i, p) in corpus.iter().enumerate() {
        let q = apply_permutation(p, &random_permutation(p.n(), i as u64)).unwrap();
        seq(&q, "pool sweep");
        for w in [1, 2, 4, 8] {
            par(&q, &pcfg(w, i as u64), "pool sweep");
        }
    }
    let (runs, exhausted) = {
        let log = DEFAULT_POOL_RUNS.lock().unwrap();
        (log.0, log.1.clone())
    };

    let tiny = ParallelConfig {
        augmentation: 0.01,
        ..pcfg(8, 0)
    };
    let tiny_result = parallel_amd(&grid2d(100), &tiny);
    let reported =
        matches!(tiny_result, Err(OrderingError::PoolExhausted { augmentation, .. }) if augmentation == 0.01);

    let out = Command::new(env!("CARGO_BIN_EXE_paramd"))
        .args([
            "order",
            "--gen",
            "grid2d:100",
            "--mode",
            "parallel",
            "--workers",
            "8",
            "--augmentation",
            "0.01",
        ])
        .output()
        .expect("binary runs");
    let stats: Option<serde_json::Value> = serde_json::from_slice(&out.stdout).ok();
    let run0 = stats.as_ref().map(|v| v["candidate"]["runs"][0].clone());
    let retried = run0
        .as_ref()
        .is_some_and(|r| r["retried"] == true && r["augmentation"] == retry_augmentation(0.01));
    let cli_ok = out.status.success() && retried;

    verdict(
        exhausted.is_empty() && reported && cli_ok,
        format!(
            "{runs} runs at augmentation 1.5, {} exhausted{}; grid2d:100 at 0.01 {}; cli exit {:?}, retried at {}",
            exhausted.len(),
            exhausted.first().map_or(String::new(), |e| format!(" ({e})")),
            if reported {
                "reports pool exhausted"
            } else {
                "did not report exhaustion"
            },
            out.status.code(),
            run0.map_or("-".into(), |r| r["augmentation"].to_string()),
        ),
    )
}

fn ac10() -> Verdict {
    let d = ParallelConfig::default();
    let mut ok = d.mult == 1.1 && d.lim_total == 8192 && d.augmentation == 1.5;
    for w in 1..=64 {
        ok &= ParallelConfig::with_workers(w).lim() == 8192 / w;
    }
    let r = RunConfig::new(
        paramd::bench::Input::Generated(paramd::bench::GenSpec::Grid2d(3)),
        paramd::bench::Mode::Parallel,
    );
    ok &= r.mult == 1.1 && r.lim_total == 8192 && r.augmentation == 1.5;
    let out = Command::new(env!("CARGO_BIN_EXE_paramd"))
        .args(["order", "--gen", "grid2d:3"])
        .output()
        .expect("binary runs");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    ok &= v["mult"] == 1.1 && v["lim_total"] == 8192;
    verdict(
        ok,
        format!(
            "mult {}, lim_total {}, lim(8) {}, cli mult {} lim_total {}",
            d.mult,
            d.lim_total,
            ParallelConfig::with_workers(8).lim(),
            v["mult"],
            v["lim_total"]
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: &str, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "{id} {} {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
    };

    let t = Instant::now();
    let replay = replay_random_orders(&small_corpus(500, 1));
    let took = t.elapsed();
    report("AC1", "reconstructed neighborhoods", &mut || ac1(&replay, took));
    report("AC2", "set difference sizes", &mut || ac2(&replay));
    report("AC3", "degree upper bounds", &mut ac3);
    report("AC4", "distance-2 safety", &mut ac4);
    report("AC5", "determinism", &mut ac5);
    report("AC6", "fill parity", &mut ac6);
    report("AC7", "minimum degree sanity", &mut ac7);
    report("AC8", "scaling", &mut ac8);
    report("AC9", "pool discipline", &mut ac9);
    report("AC10", "defaults", &mut ac10);

    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria fail");
        ExitCode::FAILURE
    }
}
