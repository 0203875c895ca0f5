//! Acceptance gate: one pass/fail line per criterion, non-zero exit if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use numrad_core::bounds::{dominance_suite, evaluate_bound, solve_implicit, Evaluator};
use numrad_core::chains::*;
use numrad_core::harness::{
    default_deck, random_deck, run_suite, sample_matrix, sample_second, sample_unit_vector,
    EnsembleKind, EnsembleSpec,
};
use numrad_core::linalg::{abs_operator, ComplexMatrix, ComplexVector, PsdSpectrum};
use numrad_core::numrange::{
    numerical_radius, numerical_radius_oracle, omega, DEFAULT_GRID, DEFAULT_THETA_TOL,
};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn nilpotent() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
}

fn check(cond: bool, msg: String) -> Verdict {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within_time(elapsed: Duration, limit: Duration, detail: String) -> Verdict {
    check(
        elapsed < limit,
        format!("{detail}, {elapsed:.2?} (limit {limit:?})"),
    )
}

/// Dims 2..=8 cycling over all ensembles.
fn ensemble_specs(per_dim: usize, base_seed: u64) -> Vec<EnsembleSpec> {
    let mut specs = Vec::new();
    for (e, kind) in EnsembleKind::ALL.into_iter().enumerate() {
        for dim in 2..=8 {
            for k in 0..per_dim {
                let seed = base_seed + 1000 * e as u64 + 10 * dim as u64 + k as u64;
                specs.push(EnsembleSpec::new(kind, dim, seed));
            }
        }
    }
    specs
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let t = nilpotent();
    let w = omega(&t).map_err(|e| e.to_string())?;
    let b =
        evaluate_bound("B_1_2", &t, None, &BoundParams::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rhs = b.chain.first();
    check(
        (w - 0.5).abs() <= 1e-10 && (rhs - 0.5).abs() <= 1e-10,
        format!("omega={w:.17} half-norm={rhs:.17}"),
    )?;
    within_time(
        elapsed,
        Duration::from_millis(10),
        "nilpotent shift sharp".into(),
    )
}

fn criterion_2() -> Verdict {
    let t = nilpotent();
    let b =
        evaluate_bound("B_1_3", &t, None, &BoundParams::default()).map_err(|e| e.to_string())?;
    let lower = b.lower.unwrap_or(f64::NAN);
    check(
        (lower - 0.25).abs() <= 1e-10 && (b.omega_target - 0.25).abs() <= 1e-10,
        format!("lower={lower:.17} omega^2={:.17}", b.omega_target),
    )
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (e, kind) in EnsembleKind::ALL.into_iter().enumerate() {
        for k in 0..25u64 {
            let dim = 2 + (k as usize % 7);
            let t = sample_matrix(&EnsembleSpec::new(kind, dim, 7_000 + 100 * e as u64 + k))
                .map_err(|e| e.to_string())?;
            let w = omega(&t).map_err(|e| e.to_string())?;
            let o = numerical_radius_oracle(&t, 8192).map_err(|e| e.to_string())?;
            worst = worst.max((w - o).abs() / (1.0 + w));
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-8,
        format!("{count} matrices, worst relative gap {worst:.3e}"),
    )?;
    within_time(
        elapsed,
        Duration::from_secs(30),
        format!("{count} matrices agree"),
    )
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let specs = ensemble_specs(2, 40_000);
    let deck = default_deck();
    let report = run_suite(&specs, 1, &deck, 1e-9).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let catalogue: Vec<_> = report
        .violations
        .iter()
        .filter(|v| !v.bound_id.starts_with('D') && !v.bound_id.starts_with("implicit"))
        .collect();
    check(
        catalogue.is_empty() && report.evaluations >= 1000,
        format!(
            "{} operators, {} (matrix, params) evaluations, {} violations{}",
            report.trials,
            report.evaluations,
            catalogue.len(),
            catalogue
                .first()
                .map(|v| format!(", first {v:?}"))
                .unwrap_or_default()
        ),
    )?;
    within_time(
        elapsed,
        Duration::from_secs(60),
        format!("{} evaluations clean", report.evaluations),
    )
}

fn random_vector(n: usize, seed: u64, stream: u64, scale: f64) -> ComplexVector {
    sample_unit_vector(n, seed, stream).scale(Complex64::new(scale, 0.0))
}

fn criterion_5() -> Verdict {
    let mut failures = Vec::new();
    let params = random_deck(5_555, 1000);
    let kinds = EnsembleKind::ALL;
    let mut note = |name: &str, c: ChainResult| {
        if !c.holds {
            failures.push(format!("{name}: {:?}", c.values()));
        }
    };
    for i in 0..1000u64 {
        let p = params[i as usize];
        let n = 2 + (i as usize % 7);
        let seed = 90_000 + i;
        let x = random_vector(n, seed, 10, 0.1 + (i % 13) as f64);
        let y = random_vector(n, seed, 11, 0.2 + (i % 7) as f64);
        let e = sample_unit_vector(n, seed, 12);
        let spec = EnsembleSpec::new(kinds[i as usize % kinds.len()], n, seed);
        let t = sample_matrix(&spec).map_err(|e| e.to_string())?;
        let s = sample_second(&spec).map_err(|e| e.to_string())?;
        let ux = sample_unit_vector(n, seed, 13);
        let uy = sample_unit_vector(n, seed, 14);
        let err = |e: numrad_core::Error| e.to_string();
        note(
            "power_mean",
            power_mean_chain(x.norm(), y.norm(), p.alpha, p.p).map_err(err)?,
        );
        note("cs_refined", cs_refined_chain(&x, &y, p.beta).map_err(err)?);
        note("cs_km", cs_km_chain(&x, &y).map_err(err)?);
        note(
            "cs_binomial",
            cs_binomial_chain(&x, &y, p.beta, p.n).map_err(err)?,
        );
        note(
            "mixed_schwarz",
            mixed_schwarz_chain(&t, &ux, &uy, &p).map_err(err)?,
        );
        note(
            "mixed_schwarz_p",
            mixed_schwarz_p_chain(&t, &ux, &uy, &p).map_err(err)?,
        );
        note(
            "product_schwarz",
            product_schwarz_chain(&t, &s, &x, &y, p.beta).map_err(err)?,
        );
        note("buzano", buzano_check(&x, &y, &e).map_err(err)?);
    }
    check(
        failures.is_empty(),
        format!(
            "8 chains x 1000 inputs, {} non-monotone{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!(", first {f}"))
                .unwrap_or_default()
        ),
    )
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn criterion_6() -> Verdict {
    let canon = BoundParams {
        alpha: 0.5,
        beta: 1.0 / 3.0,
        p: 1.0,
        r: 1.0,
        n: 1,
    };
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let spec = EnsembleSpec::new(
            EnsembleKind::ALL[i as usize % 8],
            2 + (i as usize % 7),
            60_000 + i,
        );
        let t = sample_matrix(&spec).map_err(|e| e.to_string())?;
        let s = sample_second(&spec).map_err(|e| e.to_string())?;
        let ev = Evaluator::new(&t, Some(&s)).map_err(|e| e.to_string())?;
        let first = |id: &str| {
            ev.evaluate(id, &canon)
                .map(|r| r.chain.first())
                .map_err(|e| e.to_string())
        };
        worst = worst.max(rel_gap(first("B_3_1")?, first("B_1_9")?));
        worst = worst.max(rel_gap(first("B_3_7")?, first("B_1_14")?));
        worst = worst.max(rel_gap(first("B_3_3")?, first("B_1_14")?));

        let x = sample_unit_vector(t.rows(), 60_000 + i, 20);
        let chain = mixed_schwarz_chain(&t, &x, &x, &canon).map_err(|e| e.to_string())?;
        let a = abs_operator(&t)
            .and_then(|m| m.quadratic_form(&x))
            .map_err(|e| e.to_string())?
            .re;
        let b = abs_operator(&t.adjoint())
            .and_then(|m| m.quadratic_form(&x))
            .map_err(|e| e.to_string())?
            .re;
        let c = t.quadratic_form(&x).map_err(|e| e.to_string())?.norm();
        let km = a * b / 3.0 + 2.0 / 3.0 * c * (a * b).abs().sqrt();
        worst = worst.max(rel_gap(chain.values()[1], km));
    }
    check(
        worst <= 1e-12,
        format!("100 matrices, worst relative gap {worst:.3e}"),
    )
}

fn criterion_7() -> Verdict {
    let mut failed = Vec::new();
    let mut count = 0;
    for spec in ensemble_specs(2, 40_000) {
        let t = sample_matrix(&spec).map_err(|e| e.to_string())?;
        for claim in dominance_suite(&t).map_err(|e| e.to_string())? {
            count += 1;
            if !claim.holds {
                failed.push(format!(
                    "{} on {} seed {}",
                    claim.claim_id, spec.kind, spec.seed
                ));
            }
        }
    }
    let id = dominance_suite(&ComplexMatrix::identity(4)).map_err(|e| e.to_string())?;
    let d5 = id.iter().find(|c| c.claim_id == "D5").ok_or("no D5")?;
    let gap = (d5.lhs - d5.rhs).abs();
    check(
        failed.is_empty() && gap <= 1e-12,
        format!(
            "{count} claim checks, {} failed, D5 gap at identity {gap:.1e}",
            failed.len()
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut wrong = Vec::new();
    for i in 0..500u64 {
        let n = 2 + (i as usize % 7);
        let g = sample_matrix(&EnsembleSpec::new(EnsembleKind::Psd, n, 80_000 + i))
            .map_err(|e| e.to_string())?;
        let x = sample_unit_vector(n, 80_000 + i, 30);
        let spectrum = PsdSpectrum::new(&g).map_err(|e| e.to_string())?;
        let base = g.quadratic_form(&x).map_err(|e| e.to_string())?.re.max(0.0);
        for &p in &[1.0, 1.5, 2.0, 3.0, 0.3, 0.5, 0.8] {
            let powered = spectrum
                .power(p)
                .and_then(|m| m.quadratic_form(&x))
                .map_err(|e| e.to_string())?
                .re;
            let lhs = base.powf(p);
            let tol = 1e-12 * (1.0 + lhs.max(powered));
            let ok = if p >= 1.0 {
                lhs <= powered + tol
            } else {
                lhs + tol >= powered
            };
            if !ok {
                wrong.push(format!("p={p} seed={}", 80_000 + i));
            }
        }
    }
    check(
        wrong.is_empty(),
        format!("500 pairs x 7 exponents, {} wrong direction", wrong.len()),
    )
}

fn criterion_9() -> Verdict {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for spec in ensemble_specs(2, 40_000) {
        let t = sample_matrix(&spec).map_err(|e| e.to_string())?;
        let ev = Evaluator::new(&t, None).map_err(|e| e.to_string())?;
        let (c, b) = ev.km_implicit_coefficients().map_err(|e| e.to_string())?;
        let explicit = solve_implicit(c, b, 1.0).map_err(|e| e.to_string())?;
        worst = worst.min(explicit - ev.omega());
        count += 1;
    }
    check(
        worst >= -1e-9,
        format!("{count} operators, min(explicit - omega) = {worst:.3e}"),
    )
}

fn run_verify() -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_numrad"))
        .args([
            "verify",
            "--ensemble",
            "ginibre",
            "--dim",
            "4",
            "--trials",
            "20",
            "--seed",
            "42",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!("verify exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn criterion_10() -> Verdict {
    let a = run_verify()?;
    let b = run_verify()?;
    check(
        a == b && !a.is_empty(),
        format!("two runs, {} bytes each, identical={}", a.len(), a == b),
    )
}

fn criterion_11() -> Verdict {
    let text = String::from_utf8(run_verify()?).map_err(|e| e.to_string())?;
    let has = |id: &str| text.lines().any(|l| l.trim_start().starts_with(id));
    let report = run_suite(
        &[EnsembleSpec::new(EnsembleKind::NilpotentShift, 3, 1)],
        1,
        &default_deck(),
        1e-9,
    )
    .map_err(|e| e.to_string())?;
    let keys: Vec<_> = report.observe_stats.keys().cloned().collect();
    check(
        has("B_AL_2_printed")
            && has("B_AL_2_corrected")
            && keys == ["B_AL_2_corrected", "B_AL_2_printed"],
        format!("observe entries {keys:?}"),
    )
}

fn main() -> ExitCode {
    // warm the numerical path so the timed criteria measure steady state
    let _ = numerical_radius(&nilpotent(), DEFAULT_GRID, DEFAULT_THETA_TOL);

    let criteria: [Criterion; 11] = [
        (
            "sharpness of the |T|+|T*| bound at the nilpotent shift",
            criterion_1,
        ),
        (
            "sharpness of the T*T+TT* lower bound at the nilpotent shift",
            criterion_2,
        ),
        ("numerical radius vs dense-grid oracle", criterion_3),
        ("full catalogue run", criterion_4),
        ("chain monotonicity", criterion_5),
        ("specialization coherence", criterion_6),
        ("dominance claims", criterion_7),
        ("McCarthy direction", criterion_8),
        ("implicit-bound extraction", criterion_9),
        ("verify determinism", criterion_10),
        ("observe-mode report", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
