//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use fuzzy_hmm::baseline::{covariance, pca_fit, pca_project};
use fuzzy_hmm::discretize::ObservedSequence;
use fuzzy_hmm::fcm::{fcm_fit, FcmConfig};
use fuzzy_hmm::fuzzy_integral::{solve_lambda, FuzzyMeasure};
use fuzzy_hmm::hmm::viterbi;
use fuzzy_hmm::metrics::{compute_metrics, improvement, ConfusionMatrix};
use fuzzy_hmm::pipeline::{run_pipeline, run_pipeline_detailed, train_len, DensitySpec, Method, PipelineConfig};
use fuzzy_hmm::synth::{generate_series, SynthConfig};
use fuzzy_hmm::MultivariateSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn ac1_table_metrics() -> Outcome {
    let cases = [
        ("pca", (459, 90, 35, 16), [0.8233, 0.9663, 0.2800, 0.8964]),
        ("fcm", (464, 94, 31, 11), [0.8250, 0.9768, 0.2480, 0.8984]),
    ];
    for (name, (tp, fp, tn, fn_), expect) in cases {
        let m = compute_metrics(&ConfusionMatrix { tp, fp, tn, fn_ }).map_err(|e| e.to_string())?;
        let got = [m.accuracy, m.sensitivity, m.specificity, m.f_measure].map(|s| s.value().unwrap_or(f64::NAN));
        for (g, e) in got.iter().zip(expect) {
            ensure!(close(*g, e, 1e-4), "{name}: got {got:?}, expected {expect:?}");
        }
    }
    Ok("two confusion matrices, 8 metrics within 1e-4".into())
}

fn ac2_improvement_table() -> Outcome {
    // (PCA training accuracy, method training accuracy, reference improvement %)
    let rows = [
        (0.7864, 0.8386, 6.6474),
        (0.7864, 0.9523, 21.0983),
        (0.7864, 0.9483, 20.5925),
        (0.8586, 0.9807, 14.2263),
        (0.8586, 0.9429, 9.8170),
        (0.8586, 0.9971, 16.1398),
        (0.8997, 0.9003, 0.0635),
        (0.8997, 0.9454, 5.0810),
        (0.8997, 0.9477, 5.3350),
    ];
    let mut worst: f64 = 0.0;
    for (base, new, expected) in rows {
        let got = improvement(base, new).map_err(|e| e.to_string())?;
        worst = worst.max((got - expected).abs());
        ensure!(close(got, expected, 0.05), "{base} -> {new}: {got:.4} vs {expected}");
    }
    Ok(format!("{} entries, max deviation {worst:.4} pp", rows.len()))
}

fn ac3_fuzzy_measure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=6);
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..0.999)).collect();
        let m = FuzzyMeasure::new(g.clone()).map_err(|e| e.to_string())?;
        worst = worst.max(m.residual());
        ensure!(m.residual() <= 1e-10, "residual {} for {g:?}", m.residual());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|_| rng.random::<u32>());
        let chain = m.measure_chain(&order).map_err(|e| e.to_string())?;
        ensure!(
            close(*chain.last().unwrap(), 1.0, 1e-9),
            "chain ends at {:?}",
            chain.last()
        );
    }
    let g = [0.21, 0.35, 0.05];
    let lambda = solve_lambda(&g).map_err(|e| e.to_string())?;
    let oracle = lambda_bisection(&g);
    ensure!(close(lambda, oracle, 1e-9), "lambda {lambda} vs oracle {oracle}");
    // n = 3: dividing out the trivial root leaves a quadratic in λ
    let a = g[0] * g[1] * g[2];
    let b = g[0] * g[1] + g[0] * g[2] + g[1] * g[2];
    let c = g.iter().sum::<f64>() - 1.0;
    let closed = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
    ensure!(close(lambda, closed, 1e-9), "lambda {lambda} vs closed form {closed}");
    Ok(format!(
        "1000 vectors, max residual {worst:.1e}; lambda(0.21,0.35,0.05) = {lambda:.6} matches both oracles \
         (quoted 3.4192 is a rounding slip, not asserted)"
    ))
}

fn ac4_integral_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let n = rng.random_range(2..=4);
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..0.99)).collect();
        let h: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let m = FuzzyMeasure::new(g.clone()).map_err(|e| e.to_string())?;
        let (s, c) = (m.sugeno(&h).unwrap(), m.choquet(&h).unwrap());
        let (so, co) = (
            sugeno_alpha_cuts(&h, &g, m.lambda()),
            choquet_ascending(&h, &g, m.lambda()),
        );
        ensure!(close(s, so, 1e-12), "sugeno {s} vs {so} for h={h:?} g={g:?}");
        ensure!(close(c, co, 1e-12), "choquet {c} vs {co} for h={h:?} g={g:?}");

        let level = rng.random_range(0.0..=1.0);
        let flat = vec![level; n];
        ensure!(close(m.sugeno(&flat).unwrap(), level, 1e-12), "sugeno not idempotent");
        ensure!(close(m.choquet(&flat).unwrap(), level, 1e-12), "choquet not idempotent");

        let higher: Vec<f64> = h.iter().map(|v| v + rng.random_range(0.0..=1.0) * (1.0 - v)).collect();
        ensure!(m.sugeno(&higher).unwrap() >= s - 1e-12, "sugeno not monotone");
        ensure!(m.choquet(&higher).unwrap() >= c - 1e-12, "choquet not monotone");

        let total: f64 = g.iter().sum();
        let additive = FuzzyMeasure::new(g.iter().map(|v| v / total).collect()).map_err(|e| e.to_string())?;
        let weighted: f64 = additive.densities().iter().zip(&h).map(|(a, b)| a * b).sum();
        ensure!(additive.lambda() == 0.0, "additive lambda {}", additive.lambda());
        ensure!(
            close(additive.choquet(&h).unwrap(), weighted, 1e-12),
            "additive choquet"
        );
    }

    let m = FuzzyMeasure::new(vec![0.21, 0.35, 0.05]).map_err(|e| e.to_string())?;
    let h = [0.7, 0.4, 0.3];
    let (s, c) = (m.sugeno(&h).unwrap(), m.choquet(&h).unwrap());
    ensure!(close(s, 0.4, 1e-12), "worked example sugeno {s}");
    ensure!(close(c, 0.4441, 5e-5), "worked example choquet {c}");
    Ok(format!(
        "1000 pairs; worked example sugeno {s:.4}, choquet {c:.4} \
         (reference values 0.4400 / 0.7889 not reproducible from the definitions, not asserted)"
    ))
}

fn ac5_viterbi() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ties = 0;
    for trial in 0..1000 {
        let m = rng.random_range(1..=4);
        let t = rng.random_range(1..=8);
        let model = random_model(&mut rng, m);
        let symbols: Vec<usize> = (0..t).map(|_| rng.random_range(1..=m)).collect();
        let obs = ObservedSequence::new(symbols.clone(), m).map_err(|e| e.to_string())?;
        let path = viterbi(&obs, &model).map_err(|e| e.to_string())?;
        let (best, best_lp, second_lp) = brute_force_viterbi(&model, &symbols);
        ensure!(
            close(path.log_prob, best_lp, 1e-9),
            "trial {trial}: {} vs {best_lp}",
            path.log_prob
        );
        let recomputed = model.path_log_prob(&obs, &path.states);
        ensure!(
            close(recomputed, path.log_prob, 1e-9),
            "trial {trial}: recomputed {recomputed}"
        );
        let decoded: Vec<usize> = path.states.iter().map(|l| l.index()).collect();
        if best_lp - second_lp > 1e-9 {
            ensure!(decoded == best, "trial {trial}: {decoded:?} vs {best:?}");
        } else {
            ties += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "1000 models in {:.2} s ({ties} exact ties, compared by score)",
        elapsed.as_secs_f64()
    ))
}

fn ac6_fcm() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..100 {
        let t = rng.random_range(8..80);
        let n = rng.random_range(1..=4);
        let data = MultivariateSeries::new(n, (0..t * n).map(|_| rng.random_range(-5.0..5.0)).collect())
            .map_err(|e| e.to_string())?;
        let cfg = FcmConfig {
            clusters: rng.random_range(2..=5),
            fuzzifier: rng.random_range(1.1..3.0),
            seed: k,
            ..Default::default()
        };
        let model = fcm_fit(&data, &cfg).map_err(|e| e.to_string())?;
        for w in model.objective_history.windows(2) {
            ensure!(
                w[1] <= w[0] * (1.0 + 1e-12) + 1e-12,
                "dataset {k}: Q rose {} -> {}",
                w[0],
                w[1]
            );
        }
        for j in 0..t {
            let s: f64 = model.partition.iter().map(|u| u[j]).sum();
            ensure!(close(s, 1.0, 1e-9), "dataset {k}: column {j} sums to {s}");
        }
    }

    let centres = [[-4.0, 1.0], [6.0, 3.0]];
    let mut rows = Vec::new();
    for c in centres {
        for _ in 0..100 {
            rows.push([c[0] + rng.random_range(-0.2..0.2), c[1] + rng.random_range(-0.2..0.2)]);
        }
    }
    let means: Vec<[f64; 2]> = rows
        .chunks(100)
        .map(|b| [0, 1].map(|d| b.iter().map(|r| r[d]).sum::<f64>() / 100.0))
        .collect();
    let data = MultivariateSeries::from_rows(&rows).map_err(|e| e.to_string())?;
    let model = fcm_fit(
        &data,
        &FcmConfig {
            tol: 1e-10,
            max_iters: 1000,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for mean in &means {
        let err = model
            .prototypes
            .iter()
            .map(|p| (p[0] - mean[0]).abs().max((p[1] - mean[1]).abs()))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(err);
    }
    ensure!(worst <= 1e-3, "blob centres missed by {worst}");
    Ok(format!(
        "100 datasets monotone and normalized; blob centres within {worst:.1e}"
    ))
}

fn ac7_pca() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_resid: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for _ in 0..20 {
        let mix: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| {
                let z: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                (0..3).map(|a| (0..3).map(|b| mix[3 * a + b] * z[b]).sum()).collect()
            })
            .collect();
        let data = MultivariateSeries::from_rows(&rows).map_err(|e| e.to_string())?;
        let model = pca_fit(&data).map_err(|e| e.to_string())?;
        let cov = covariance(&data, &model.column_means);
        let cv: Vec<f64> = cov
            .iter()
            .map(|r| r.iter().zip(&model.direction).map(|(a, b)| a * b).sum())
            .collect();
        let resid = cv
            .iter()
            .zip(&model.direction)
            .map(|(a, d)| (a - model.eigenvalue * d).powi(2))
            .sum::<f64>()
            .sqrt();
        worst_resid = worst_resid.max(resid);
        ensure!(resid <= 1e-6, "eigen residual {resid}");

        let c3 = [0, 1, 2].map(|a| [0, 1, 2].map(|b| cov[a][b]));
        let oracle = largest_eigenvalue_3x3(c3);
        worst_oracle = worst_oracle.max((model.eigenvalue - oracle).abs());
        ensure!(
            close(model.eigenvalue, oracle, 1e-6),
            "eigenvalue {} vs {oracle}",
            model.eigenvalue
        );

        let proj = pca_project(&data, &model).map_err(|e| e.to_string())?;
        let var = proj.iter().map(|p| p * p).sum::<f64>() / proj.len() as f64;
        for _ in 0..200 {
            let mut d: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter_mut().for_each(|v| *v /= norm);
            let dv: f64 = (0..3)
                .map(|a| (0..3).map(|b| d[a] * cov[a][b] * d[b]).sum::<f64>())
                .sum();
            ensure!(dv <= var + 1e-9, "direction {d:?} has variance {dv} > {var}");
        }
    }
    Ok(format!(
        "20 matrices; residual <= {worst_resid:.1e}, oracle gap <= {worst_oracle:.1e}"
    ))
}

fn ac8_end_to_end() -> Outcome {
    let (data, labels) = generate_series(&SynthConfig::default()).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for method in Method::ALL {
        let cfg = PipelineConfig {
            method,
            ..Default::default()
        };
        let start = Instant::now();
        let report = run_pipeline(&data, &labels, &cfg).map_err(|e| format!("{method}: {e}"))?;
        let elapsed = start.elapsed();
        ensure!(elapsed < Duration::from_secs(5), "{method} took {elapsed:?}");
        let m = report.test.metrics;
        let score = m.sensitivity.value().unwrap_or(f64::NAN) + m.specificity.value().unwrap_or(f64::NAN);
        if matches!(method, Method::Sugeno | Method::Choquet) {
            ensure!(score > 1.0, "{method}: sensitivity + specificity = {score}");
        }
        notes.push(format!("{method} {score:.3}/{:.2}s", elapsed.as_secs_f64()));
    }
    Ok(format!("sens+spec/time: {}", notes.join(", ")))
}

fn ac9_leakage() -> Outcome {
    let (data, labels) = generate_series(&SynthConfig::default()).map_err(|e| e.to_string())?;
    let cut = train_len(data.len(), 0.7) * data.n_vars();
    let mut values = data.values().to_vec();
    values[cut..]
        .iter_mut()
        .enumerate()
        .for_each(|(k, v)| *v = 1e3 + (k % 7) as f64);
    let poisoned = MultivariateSeries::new(data.n_vars(), values).map_err(|e| e.to_string())?;
    let mut configs: Vec<PipelineConfig> = Method::ALL
        .into_iter()
        .map(|method| PipelineConfig {
            method,
            ..Default::default()
        })
        .collect();
    for method in [Method::Sugeno, Method::Choquet] {
        configs.push(PipelineConfig {
            method,
            densities: DensitySpec::LabelCorr,
            ..Default::default()
        });
    }
    for cfg in &configs {
        let fit = |d: &MultivariateSeries| -> Result<String, String> {
            let (_, fitted) = run_pipeline_detailed(d, &labels, cfg, 0).map_err(|e| e.to_string())?;
            serde_json::to_string(&fitted).map_err(|e| e.to_string())
        };
        ensure!(
            fit(&data)? == fit(&poisoned)?,
            "{} ({:?}) fitted state changed",
            cfg.method,
            cfg.densities
        );
    }
    Ok(format!("{} configurations bit-identical", configs.len()))
}

fn ac10_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let data = dir.path().join("data.csv");
    let bin = env!("CARGO_BIN_EXE_fuzzy-hmm");
    let call = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        Ok(out.stdout)
    };
    let data_s = data.to_string_lossy().into_owned();
    call(&["gen", "-o", &data_s, "--seed", "0"])?;
    for method in ["choquet", "fcm"] {
        let a = call(&["run", "--input", &data_s, "--method", method, "--seed", "1"])?;
        let b = call(&["run", "--input", &data_s, "--method", method, "--seed", "1"])?;
        ensure!(!a.is_empty() && a == b, "{method}: reports differ");
    }
    let csv = call(&[
        "sweep",
        "--input",
        &data_s,
        "--method",
        "fcm",
        "--clusters-grid",
        "10",
        "--fuzzifier-grid",
        "1.1:2.9:0.1",
        "--format",
        "csv",
    ])?;
    let rows = String::from_utf8_lossy(&csv).lines().count() - 1;
    ensure!(rows == 19, "sweep emitted {rows} rows");
    Ok("identical JSON across runs; fuzzifier sweep emitted 19 rows".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1", "confusion matrix metrics", ac1_table_metrics),
        ("AC2", "improvement percentages", ac2_improvement_table),
        ("AC3", "lambda fuzzy measure", ac3_fuzzy_measure),
        ("AC4", "fuzzy integral oracles", ac4_integral_oracles),
        ("AC5", "viterbi exactness", ac5_viterbi),
        ("AC6", "fcm soundness", ac6_fcm),
        ("AC7", "pca soundness", ac7_pca),
        ("AC8", "end-to-end synthetic", ac8_end_to_end),
        ("AC9", "leakage guard", ac9_leakage),
        ("AC10", "determinism", ac10_determinism),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(note) => println!("[PASS] {id} {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
