//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use lgptp::data::synthetic::avg_std_problem;
use lgptp::data::{
    augment, grouped_kfold, load_csv, save_csv, AugmentConfig, FeatureAxis, SpectralDataset,
};
use lgptp::evolution::{evolve, test_metrics, Builder, EvolutionResult, Problem, Silent};
use lgptp::numeric::{
    fit_head, function_loss, loss_gradient, terminal_loss, tune_function, tune_lrf, tune_terminal,
};
use lgptp::primitives::gamma_eval;
use lgptp::program::{execute, strip_introns, ExecutionTrace};
use lgptp::{
    EvolutionConfig, Function, FunctionKind, FunctionSite, Matrix, MvlrHead, Operand, Program,
    TerminalKind, TerminalSite,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

fn gaussian_matrix(r: &mut ChaCha8Rng, n: usize, d: usize) -> Matrix {
    Matrix::from_vec(n, d, (0..n * d).map(|_| normal(r)).collect())
}

// ---------------------------------------------------------------------------
// 1. analytic partials against central differences

fn gradient_correctness() -> Outcome {
    let start = Instant::now();
    let h = 1e-5;
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut samples = 0;
    for kind in [
        FunctionKind::SinRf,
        FunctionKind::ExpoRf,
        FunctionKind::PowRf,
    ] {
        for _ in 0..100 {
            let omega: Vec<f64> = (0..kind.coeff_len())
                .map(|_| r.random_range(-3.0..3.0))
                .collect();
            let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
            let x = sign * r.random_range(0.1..3.0);
            let y = r.random_range(-3.0..3.0);
            let site = FunctionSite::new(kind, omega.clone());
            let analytic = loss_gradient(&site, &[x], &[y]);
            for k in 0..omega.len() {
                let mut up = omega.clone();
                let mut down = omega.clone();
                up[k] += h;
                down[k] -= h;
                let lu = function_loss(&FunctionSite::new(kind, up), &[x], &[y]);
                let ld = function_loss(&FunctionSite::new(kind, down), &[x], &[y]);
                let fd = (lu - ld) / (2.0 * h);
                let err = (analytic[k] - fd).abs() / fd.abs().max(1.0);
                worst = worst.max(err);
            }
            samples += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-5 && secs < 1.0,
        format!("{samples} samples, worst relative error {worst:.2e}, {secs:.3}s"),
    )
}

// ---------------------------------------------------------------------------
// 2. least-squares tuners against an SVD pseudo-inverse

fn pinv_solve(design: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = design.len();
    let p = design[0].len();
    let a = DMatrix::from_fn(n, p, |i, j| design[i][j]);
    let pinv = a.pseudo_inverse(1e-14).expect("svd");
    (pinv * DVector::from_column_slice(y))
        .iter()
        .copied()
        .collect()
}

fn relative_gap(w: &[f64], oracle: &[f64]) -> f64 {
    let diff: f64 = w
        .iter()
        .zip(oracle)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = oracle.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(1e-300)
}

fn random_targets(r: &mut ChaCha8Rng, design: &[Vec<f64>]) -> Vec<f64> {
    let p = design[0].len();
    let w: Vec<f64> = (0..p).map(|_| normal(r)).collect();
    design
        .iter()
        .map(|row| row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.3 * normal(r))
        .collect()
}

fn oracle_design(kind: TerminalKind, slices: &Matrix, alpha: usize) -> Vec<Vec<f64>> {
    slices
        .iter_rows()
        .map(|s| {
            let mut row = vec![1.0];
            match kind {
                TerminalKind::Lr => row.extend_from_slice(s),
                TerminalKind::FirstDiffLr => {
                    for j in 1..s.len() {
                        row.push(s[j] - s[j - 1]);
                    }
                }
                _ => row.push(gamma_eval(kind, s, alpha)),
            }
            row
        })
        .collect()
}

fn least_squares_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    let mut problems = 0;
    let mut failures = Vec::new();
    let mut record = |name: &str, w: &[f64], oracle: &[f64]| {
        let g = relative_gap(w, oracle);
        worst = worst.max(g);
        if g > 1e-8 && failures.len() < 5 {
            failures.push(format!("{name}: {g:.2e}"));
        }
    };

    for kind in TerminalKind::ALL {
        for _ in 0..50 {
            let width = match kind {
                TerminalKind::Lr => r.random_range(1..=29),
                TerminalKind::FirstDiffLr => r.random_range(2..=30),
                _ => r.random_range(2..=40),
            };
            let p = kind.coeff_len(width);
            let n = r.random_range((2 * p + 5).max(10)..=200);
            let alpha = r.random_range(0..10);
            let slices = gaussian_matrix(&mut r, n, width);
            let design = oracle_design(kind, &slices, alpha);
            let y = random_targets(&mut r, &design);
            let site = TerminalSite::neutral(kind, alpha, alpha + width - 1);
            let tuned = tune_terminal(&site, &slices, &y).expect("tune");
            record(kind.name(), &tuned.coeffs, &pinv_solve(&design, &y));
            problems += 1;
        }
    }
    for _ in 0..50 {
        let n = r.random_range(10..=200);
        let x: Vec<f64> = (0..n).map(|_| 2.0 * normal(&mut r)).collect();
        let design: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
        let y = random_targets(&mut r, &design);
        let site = FunctionSite::new(FunctionKind::Lrf, vec![0.0, 1.0]);
        let tuned = tune_lrf(&site, &x, &y).expect("lrf");
        record("LRF", &tuned.omega, &pinv_solve(&design, &y));
        problems += 1;
    }
    for _ in 0..50 {
        let inputs = r.random_range(1..=29);
        let n = r.random_range(2 * inputs + 5..=200);
        let regs: Vec<Vec<f64>> = (0..inputs + 2)
            .map(|_| (0..n).map(|_| normal(&mut r)).collect())
            .collect();
        let design: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                std::iter::once(1.0)
                    .chain(regs[..inputs].iter().map(|c| c[i]))
                    .collect()
            })
            .collect();
        let y = random_targets(&mut r, &design);
        let head = fit_head(&MvlrHead::passthrough(inputs), &regs, &y).expect("head");
        record("MVLR", &head.coeffs, &pinv_solve(&design, &y));
        problems += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 5.0;
    let mut detail = format!("{problems} problems, worst relative gap {worst:.2e}, {secs:.2}s");
    if !failures.is_empty() {
        detail.push_str(&format!(" [{}]", failures.join("; ")));
    }
    outcome(pass, detail)
}

// ---------------------------------------------------------------------------
// 3. tuning never increases the loss it optimizes

fn randomize_coefficients(program: &mut Program, r: &mut ChaCha8Rng) {
    for ins in &mut program.instructions {
        for op in [&mut ins.op1, &mut ins.op2] {
            if let Operand::Terminal(t) = op {
                for c in &mut t.coeffs {
                    *c = r.random_range(-2.0..2.0);
                }
            }
        }
        if let Function::Tunable(s) = &mut ins.func {
            for w in &mut s.omega {
                *w = r.random_range(-3.0..3.0);
            }
        }
    }
    if let Some(head) = &mut program.head {
        for c in &mut head.coeffs {
            *c = r.random_range(-1.0..1.0);
        }
    }
}

fn spectra_matrix(r: &mut ChaCha8Rng, n: usize, d: usize) -> Matrix {
    lgptp::data::synthetic::smooth_spectra(n, d, r)
}

fn tuning_monotonicity() -> Outcome {
    let mut r = rng(3);
    let mut cfg = EvolutionConfig::fish();
    cfg.init_max_length = 20;
    let mut events = 0;
    let mut kinds = [0usize; 3];
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    while events < 1000 {
        let d = r.random_range(8..60);
        let n = r.random_range(5..80);
        let x = if r.random_bool(0.5) {
            spectra_matrix(&mut r, n, d)
        } else {
            gaussian_matrix(&mut r, n, d)
        };
        let y: Vec<f64> = (0..n)
            .map(|i| x.get(i, 0) * 1.5 - x.get(i, d - 1) + 0.5 * normal(&mut r))
            .collect();
        let builder = Builder::new(&cfg, d);
        let mut program = builder.program(&mut r);
        randomize_coefficients(&mut program, &mut r);
        let (_, trace) = execute(&program, &x, true).expect("valid program");
        let trace: ExecutionTrace = trace.expect("trace");

        let choice = r.random_range(0..3);
        let (before, after) = match choice {
            0 if !trace.terminals.is_empty() => {
                let t = &trace.terminals[r.random_range(0..trace.terminals.len())];
                let ins = &program.instructions[t.instruction];
                let Operand::Terminal(site) = (if t.slot == 0 { &ins.op1 } else { &ins.op2 })
                else {
                    unreachable!()
                };
                let tuned = tune_terminal(site, &t.slices, &y).expect("tune");
                (
                    terminal_loss(site, &t.slices, &y),
                    terminal_loss(&tuned, &t.slices, &y),
                )
            }
            1 if !trace.functions.is_empty() => {
                let f = &trace.functions[r.random_range(0..trace.functions.len())];
                let Function::Tunable(site) = &program.instructions[f.instruction].func else {
                    unreachable!()
                };
                let tuned = tune_function(site, &f.inputs, &y, cfg.gd_steps, cfg.gd_step_size)
                    .expect("tune");
                (
                    function_loss(site, &f.inputs, &y),
                    function_loss(&tuned, &f.inputs, &y),
                )
            }
            2 => {
                let head = program.head.as_ref().expect("fish programs have a head");
                let tuned = fit_head(head, &trace.finals, &y).expect("head");
                let loss = |h: &MvlrHead| -> f64 {
                    (0..n)
                        .map(|i| {
                            let finals: Vec<f64> =
                                trace.finals[..h.inputs].iter().map(|c| c[i]).collect();
                            let p = lgptp::primitives::eval_mvlr(&h.coeffs, &finals).unwrap();
                            (p - y[i]) * (p - y[i])
                        })
                        .sum()
                };
                (loss(head), loss(&tuned))
            }
            _ => continue,
        };
        kinds[choice] += 1;
        events += 1;
        worst = worst.max(after - before);
        if after > before + 1e-9 {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!(
            "{events} events (terminal {}, function {}, head {}), {violations} violations, largest increase {worst:.2e}",
            kinds[0], kinds[1], kinds[2]
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. stripping introns leaves predictions bit-identical

fn intron_soundness() -> Outcome {
    let mut r = rng(4);
    let mut mismatches = 0;
    let mut removed = 0usize;
    for i in 0..500 {
        let mut cfg = if i % 2 == 0 {
            EvolutionConfig::fish()
        } else {
            EvolutionConfig::srbench()
        };
        if i % 5 == 0 {
            cfg = cfg.without_tunables();
        }
        cfg.init_max_length = 50;
        let d = r.random_range(4..80);
        let x = gaussian_matrix(&mut r, 100, d);
        let builder = Builder::new(&cfg, d);
        let mut program = builder.program(&mut r);
        randomize_coefficients(&mut program, &mut r);
        let stripped = strip_introns(&program);
        removed += program.len() - stripped.len();
        let (full, _) = execute(&program, &x, false).expect("run");
        let (lean, _) = execute(&stripped, &x, false).expect("run");
        if full
            .iter()
            .zip(&lean)
            .any(|(a, b)| a.to_bits() != b.to_bits())
        {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("500 programs x 100 instances, {removed} introns removed, {mismatches} mismatches"),
    )
}

// ---------------------------------------------------------------------------
// 5, 6, 8. synthetic spectral recovery, ablation and effective size

struct SyntheticRun {
    test_r2: f64,
    result: EvolutionResult,
}

fn synthetic_split(seed: u64) -> (SpectralDataset, SpectralDataset) {
    let mut r = rng(1000 + seed);
    let data = avg_std_problem(120, 200, 0.1, &mut r);
    let train: Vec<usize> = (0..90).collect();
    let test: Vec<usize> = (90..120).collect();
    (data.subset(&train), data.subset(&test))
}

fn synthetic_run(seed: u64, basic: bool) -> SyntheticRun {
    let (train, test) = synthetic_split(seed);
    let mut cfg = EvolutionConfig::fish();
    cfg.population_size = 100;
    cfg.generations = 50;
    cfg.seed = seed;
    if basic {
        cfg = cfg.without_tunables();
    }
    let result = evolve(
        &cfg,
        &Problem::new(&train.x, &train.y),
        None,
        1,
        &mut Silent,
    )
    .expect("evolve");
    let (_, test_r2) = test_metrics(&result.best.program, &Problem::new(&test.x, &test.y));
    SyntheticRun { test_r2, result }
}

fn spectral_recovery(runs: &[SyntheticRun], secs: f64) -> Outcome {
    let hits = runs.iter().filter(|r| r.test_r2 >= 0.90).count();
    let r2: Vec<String> = runs.iter().map(|r| format!("{:.3}", r.test_r2)).collect();
    outcome(
        hits >= 8 && secs < 300.0,
        format!(
            "{hits}/10 seeds with test R2 >= 0.90 [{}], {secs:.1}s",
            r2.join(" ")
        ),
    )
}

fn ablation(tp: &[SyntheticRun], basic: &[SyntheticRun]) -> Outcome {
    let mean = |v: &[SyntheticRun]| v.iter().map(|r| r.test_r2).sum::<f64>() / v.len() as f64;
    let (m_tp, m_basic) = (mean(tp), mean(basic));
    let wins = tp
        .iter()
        .zip(basic)
        .filter(|(a, b)| a.test_r2 > b.test_r2)
        .count();
    outcome(
        m_tp >= m_basic - 0.02 && wins >= 6,
        format!("mean test R2 TP {m_tp:.3} vs basic {m_basic:.3}, TP better in {wins}/10 seeds"),
    )
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

fn effective_size(runs: &[SyntheticRun]) -> Outcome {
    let mut pass = true;
    let mut gen0 = Vec::new();
    let mut rhos = Vec::new();
    let mut largest = 0usize;
    for run in runs {
        let h = &run.result.history;
        let sizes: Vec<f64> = h.iter().map(|g| g.mean_effective_size).collect();
        let gens: Vec<f64> = (0..sizes.len()).map(|g| g as f64).collect();
        let rho = spearman(&gens, &sizes);
        let final_max = run
            .result
            .final_population
            .iter()
            .map(|i| i.effective_size())
            .max()
            .unwrap_or(0);
        let best_max = h.iter().map(|g| g.best_effective_size).max().unwrap_or(0);
        largest = largest.max(final_max).max(best_max);
        pass &= sizes[0] < 12.0 && rho > 0.5 && sizes.iter().all(|&s| s <= 50.0);
        gen0.push(sizes[0]);
        rhos.push(rho);
    }
    pass &= largest <= 50;
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.2}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    outcome(
        pass,
        format!(
            "generation-0 mean sizes [{}], Spearman rho [{}], largest effective size {largest}",
            fmt(&gen0),
            fmt(&rhos)
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. grouped folds and augmentation split

fn residual_of_affine_tilt(src: &[f64], row: &[f64]) -> f64 {
    let d = src.len();
    let a = DMatrix::from_fn(d, 3, |j, c| match c {
        0 => src[j],
        1 => 1.0,
        _ => j as f64 / (d - 1) as f64,
    });
    let b = DVector::from_column_slice(row);
    let w = a.clone().svd(true, true).solve(&b, 1e-14).expect("svd");
    (a * w - b).norm() / row.len() as f64
}

fn protocol_fidelity() -> Outcome {
    let mut r = rng(7);
    let groups: Vec<String> = (0..39)
        .flat_map(|g| (0..3).map(move |_| format!("fish{g}")))
        .collect();
    let augmented = vec![false; groups.len()];
    let folds = grouped_kfold(&groups, &augmented, 6, &mut r).expect("folds");
    let mut seen = vec![0usize; groups.len()];
    let mut sizes = Vec::new();
    let mut split_groups = 0;
    for f in &folds {
        let mut gs: Vec<&String> = f.test.iter().map(|&i| &groups[i]).collect();
        gs.sort();
        gs.dedup();
        sizes.push(gs.len());
        for g in &gs {
            if f.train.iter().any(|&i| &groups[i] == *g) {
                split_groups += 1;
            }
        }
        for &i in &f.test {
            seen[i] += 1;
        }
    }
    let mut sorted = sizes.clone();
    sorted.sort();
    let folds_ok =
        sorted == vec![6, 6, 6, 7, 7, 7] && split_groups == 0 && seen.iter().all(|&c| c == 1);

    let fold = avg_std_problem(100, 200, 0.1, &mut r);
    let fold = SpectralDataset::new(
        fold.x.clone(),
        FeatureAxis::indexed(200),
        (0..100).map(|i| i as f64).collect(),
        fold.groups.clone(),
    );
    let out = augment(&fold, &AugmentConfig::default(), &mut r);
    let new_rows = out.len() - fold.len();
    let (mut spectral, mut mixup, mut gaussian) = (0, 0, 0);
    for i in fold.len()..out.len() {
        let y = out.y[i];
        if y.fract() != 0.0 || !(0.0..100.0).contains(&y) {
            mixup += 1;
            continue;
        }
        let src = fold.x.row(y as usize);
        if residual_of_affine_tilt(src, out.x.row(i)) < 1e-10 {
            spectral += 1;
        } else {
            gaussian += 1;
        }
    }
    let flagged = out.augmented.iter().filter(|&&a| a).count();
    let aug_ok =
        new_rows == 4900 && flagged == 4900 && (spectral, mixup, gaussian) == (2450, 1225, 1225);
    outcome(
        folds_ok && aug_ok,
        format!(
            "fold group counts {sizes:?}, {split_groups} split groups; {new_rows} new rows split {spectral}/{mixup}/{gaussian}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. CLI determinism

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lgptp"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn fold_fitness(dir: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(dir.join("repeat_00/report.json")).expect("report");
    let v: serde_json::Value = serde_json::from_str(&text).expect("json");
    v["folds"]
        .as_array()
        .expect("folds")
        .iter()
        .map(|f| f["train_mse"].as_f64().expect("train_mse"))
        .collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut r = rng(9);
    let data = avg_std_problem(36, 200, 0.1, &mut r);
    let data_path = dir.path().join("spectra.csv");
    save_csv(&data, &data_path).expect("save");
    assert_eq!(load_csv(&data_path).expect("load").len(), 36);
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "schema_version = 1\nrepeats = 2\nfolds = 3\n\n[evolution]\npopulation_size = 40\ngenerations = 8\n\n[augmentation]\nfactor = 3.0\n",
    )
    .expect("config");
    let runs = [("a", "1"), ("b", "1"), ("c", "8")];
    for (name, workers) in runs {
        let out = dir.path().join(name);
        if let Err(e) = run_cli(&[
            "train",
            "--config",
            config.to_str().unwrap(),
            "--data",
            data_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "17",
            "--workers",
            workers,
            "--quiet",
        ]) {
            return outcome(false, format!("train failed: {e}"));
        }
    }
    let read = |name: &str, file: &str| {
        std::fs::read(dir.path().join(name).join(file)).unwrap_or_default()
    };
    let mut identical = true;
    for file in [
        "repeat_00/report.json",
        "repeat_01/report.json",
        "summary.tsv",
        "frequency.tsv",
        "resolved_config.toml",
    ] {
        identical &= !read("a", file).is_empty() && read("a", file) == read("b", file);
    }
    let fa = fold_fitness(&dir.path().join("a"));
    let fc = fold_fitness(&dir.path().join("c"));
    let same_fitness = !fa.is_empty() && fa == fc;
    let incomplete = dir.path().join("a/INCOMPLETE").exists();
    outcome(
        identical && same_fitness && !incomplete,
        format!(
            "workers=1 reports byte-identical: {identical}; workers=8 fold fitness equal: {same_fitness} ({} folds)",
            fa.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 10. srbench-mode smoke on public regression problems

fn srbench_smoke() -> Outcome {
    let data_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["diabetes", "friedman1", "friedman2"] {
        let data = match load_csv(data_dir.join(format!("{name}.csv"))) {
            Ok(d) => d,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        let mut r = rng(10);
        let mut order: Vec<usize> = (0..data.len()).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut r);
        let cut = data.len() * 3 / 4;
        let (train, test) = (data.subset(&order[..cut]), data.subset(&order[cut..]));
        let mut cfg = EvolutionConfig::srbench();
        cfg.seed = 10;
        let start = Instant::now();
        let result = evolve(
            &cfg,
            &Problem::new(&train.x, &train.y),
            None,
            1,
            &mut Silent,
        )
        .expect("evolve");
        let secs = start.elapsed().as_secs_f64();
        let (_, r2) = test_metrics(&result.best.program, &Problem::new(&test.x, &test.y));
        let size = 2 * result.best.effective_size();
        pass &= r2.is_finite() && size <= 100 && secs < 600.0 && data.len() < 2000;
        parts.push(format!(
            "{name} n={} test R2 {r2:.3} size {size} {secs:.1}s",
            data.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "gradient correctness", gradient_correctness()),
        (
            2,
            "least-squares oracle equivalence",
            least_squares_oracle(),
        ),
        (3, "tuning monotonicity", tuning_monotonicity()),
        (4, "intron soundness", intron_soundness()),
    ];

    let start = Instant::now();
    let tp: Vec<SyntheticRun> = (0..10).map(|s| synthetic_run(s, false)).collect();
    let tp_secs = start.elapsed().as_secs_f64();
    let basic: Vec<SyntheticRun> = (0..10).map(|s| synthetic_run(s, true)).collect();
    results.push((
        5,
        "synthetic spectral recovery",
        spectral_recovery(&tp, tp_secs),
    ));
    results.push((6, "ablation ordering", ablation(&tp, &basic)));
    results.push((7, "protocol fidelity", protocol_fidelity()));
    results.push((8, "effective-size plausibility", effective_size(&tp)));
    results.push((9, "determinism", determinism()));
    results.push((10, "srbench desk-scale smoke", srbench_smoke()));

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n:>2} {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
