//! Random operators and whole-catalogue verification.
//!
//! Randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`), seeded with
//! `seed_from_u64(seed)`. The first operator of a trial is drawn from stream
//! 0 and the second operator from stream 1, so a trial is fully determined
//! by `(kind, dim, seed, scale)`. Complex Gaussians use Box–Muller on the
//! uniform stream and have `E|z|² = 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::bounds::{list_bounds, solve_implicit, Arity, BoundResult, Evaluator, Mode, SLACK_TOL};
use crate::chains::{
    buzano_check, cs_binomial_chain, cs_km_chain, cs_refined_chain, mixed_schwarz_chain_with,
    mixed_schwarz_p_chain_with, product_schwarz_chain, BoundParams, ChainResult,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, AbsPowers, ComplexMatrix, ComplexVector, DEFAULT_EIG_TOL};
use crate::numrange::{numerical_radius, DEFAULT_GRID, DEFAULT_THETA_TOL};

/// A bound counts as sharp on an evaluation when its slack is below this.
pub const SHARP_TOL: f64 = 1e-8;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    Ginibre,
    Hermitian,
    Psd,
    Normal,
    Unitary,
    NilpotentShift,
    RankOne,
    Diagonal,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 8] = [
        Self::Ginibre,
        Self::Hermitian,
        Self::Psd,
        Self::Normal,
        Self::Unitary,
        Self::NilpotentShift,
        Self::RankOne,
        Self::Diagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ginibre => "ginibre",
            Self::Hermitian => "hermitian",
            Self::Psd => "psd",
            Self::Normal => "normal",
            Self::Unitary => "unitary",
            Self::NilpotentShift => "nilpotent-shift",
            Self::RankOne => "rank-one",
            Self::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown ensemble `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub seed: u64,
    pub scale: f64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, seed: u64) -> Self {
        Self {
            kind,
            dim,
            seed,
            scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_DIM..=MAX_DIM).contains(&self.dim) {
            return Err(Error::InvalidSpec(format!(
                "dim must be in {MIN_DIM}..={MAX_DIM}, got {}",
                self.dim
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian by Box–Muller.
fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    // 1 - u lies in (0, 1], keeping the log finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let radius = (-u1.ln()).sqrt();
    Complex64::from_polar(radius, std::f64::consts::TAU * u2)
}

fn gaussian_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

fn ginibre(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, n, gaussian_vector(rng, n * n)).expect("finite gaussian entries")
}

fn haar_like_unitary(rng: &mut impl Rng, n: usize) -> Result<ComplexMatrix> {
    let h = ginibre(rng, n).hermitian_part();
    Ok(hermitian_eig(&h, DEFAULT_EIG_TOL)?.vectors)
}

fn sample_from_stream(spec: &EnsembleSpec, stream: u64) -> Result<ComplexMatrix> {
    spec.validate()?;
    let n = spec.dim;
    let mut rng = rng_for(spec.seed, stream);
    let m = match spec.kind {
        EnsembleKind::Ginibre => ginibre(&mut rng, n),
        EnsembleKind::Hermitian => ginibre(&mut rng, n).hermitian_part(),
        EnsembleKind::Psd => ginibre(&mut rng, n).gram(),
        EnsembleKind::Normal => {
            let u = haar_like_unitary(&mut rng, n)?;
            let d = ComplexMatrix::from_complex_diag(&gaussian_vector(&mut rng, n));
            u.multiply(&d)?.multiply(&u.adjoint())?
        }
        EnsembleKind::Unitary => haar_like_unitary(&mut rng, n)?,
        EnsembleKind::NilpotentShift => {
            let mut m = ComplexMatrix::zeros(n, n);
            for i in 0..n - 1 {
                m[(i, i + 1)] = Complex64::new(1.0, 0.0);
            }
            m
        }
        EnsembleKind::RankOne => {
            let u = gaussian_vector(&mut rng, n);
            let v = gaussian_vector(&mut rng, n);
            let data = u
                .iter()
                .flat_map(|&ui| v.iter().map(move |vj| ui * vj.conj()))
                .collect();
            ComplexMatrix::new(n, n, data)?
        }
        EnsembleKind::Diagonal => ComplexMatrix::from_complex_diag(&gaussian_vector(&mut rng, n)),
    };
    Ok(m.scale_real(spec.scale))
}

/// Draws the primary operator of a trial.
pub fn sample_matrix(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    sample_from_stream(spec, 0)
}

/// Draws the companion operator `S` of a trial, independent of
/// [`sample_matrix`] for the same spec.
pub fn sample_second(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    sample_from_stream(spec, 1)
}

/// Uniform random unit vector, for tests and chain sweeps.
pub fn sample_unit_vector(n: usize, seed: u64, stream: u64) -> ComplexVector {
    let mut rng = rng_for(seed, stream);
    loop {
        let v = ComplexVector::new(gaussian_vector(&mut rng, n)).expect("finite gaussian entries");
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

/// The endpoint-heavy grid `{0,¼,½,¾,1} × {0,⅓,½,1} × {1,2} × {1,2}`, with
/// `n` cycling through `1..=4`.
pub fn canonical_deck() -> Vec<BoundParams> {
    let mut deck = Vec::with_capacity(80);
    for &alpha in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        for &beta in &[0.0, 1.0 / 3.0, 0.5, 1.0] {
            for &p in &[1.0, 2.0] {
                for &r in &[1.0, 2.0] {
                    let n = (deck.len() % 4) as u32 + 1;
                    deck.push(BoundParams {
                        alpha,
                        beta,
                        p,
                        r,
                        n,
                    });
                }
            }
        }
    }
    deck
}

/// `count` random parameter sets: `α, β` uniform on `[0, 1]`,
/// `p, r ∈ {1, 1.5, 2, 3}`, `n ∈ 1..=4`.
pub fn random_deck(seed: u64, count: usize) -> Vec<BoundParams> {
    const EXPONENTS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
    let mut rng = rng_for(seed, 2);
    (0..count)
        .map(|_| BoundParams {
            alpha: rng.gen_range(0.0..=1.0),
            beta: rng.gen_range(0.0..=1.0),
            p: EXPONENTS[rng.gen_range(0..4)],
            r: EXPONENTS[rng.gen_range(0..4)],
            n: rng.gen_range(1..=4),
        })
        .collect()
}

pub const DEFAULT_DECK_SEED: u64 = 20_240_601;

/// Canonical deck plus 20 random draws.
pub fn default_deck() -> Vec<BoundParams> {
    let mut deck = canonical_deck();
    deck.extend(random_deck(DEFAULT_DECK_SEED, 20));
    deck
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Registry id, `chain:<name>`, a dominance claim id, or `implicit:B_1_14`.
    pub bound_id: String,
    /// Trial seed; `None` for a single-operator check.
    pub seed: Option<u64>,
    pub slack: f64,
    pub params: Option<BoundParams>,
}

/// Everything learned from one operator.
#[derive(Debug, Clone, Default)]
pub struct OperatorCheck {
    pub violations: Vec<Violation>,
    /// Bound ids (or `<id>:lower`) with a slack below [`SHARP_TOL`].
    pub sharp: BTreeSet<String>,
    /// `(matrix, params)` evaluations where some assert-mode bound was sharp.
    pub sharp_evaluations: usize,
    pub evaluations: usize,
    /// Per assert-mode bound, every tightness ratio seen.
    pub tightness: BTreeMap<String, Vec<f64>>,
    /// Per observe-mode bound: (violations, evaluations).
    pub observe: BTreeMap<String, (usize, usize)>,
}

fn chain_violation(chain: &ChainResult, params: &BoundParams, out: &mut Vec<Violation>) {
    if !chain.holds {
        out.push(Violation {
            bound_id: format!("chain:{}", chain.chain_id),
            seed: None,
            slack: -chain.max_violation,
            params: Some(*params),
        });
    }
}

fn check_chains(
    t: &ComplexMatrix,
    s: Option<&ComplexMatrix>,
    powers: &AbsPowers,
    witness: &ComplexVector,
    params: &BoundParams,
    out: &mut Vec<Violation>,
) -> Result<()> {
    let n = t.rows();
    let tw = t.apply(witness)?;
    let mut partners = vec![witness.clone(), ComplexVector::basis(n, 0)];
    if let Some(u) = tw.normalized() {
        partners.push(u);
    }
    for y in &partners {
        chain_violation(
            &mixed_schwarz_chain_with(t, powers, witness, y, params)?,
            params,
            out,
        );
        chain_violation(
            &mixed_schwarz_p_chain_with(t, powers, witness, y, params)?,
            params,
            out,
        );
    }
    chain_violation(&cs_refined_chain(&tw, witness, params.beta)?, params, out);
    chain_violation(&cs_km_chain(&tw, witness)?, params, out);
    chain_violation(
        &cs_binomial_chain(&tw, witness, params.beta, params.n)?,
        params,
        out,
    );
    chain_violation(&buzano_check(&tw, &partners[1], witness)?, params, out);
    if let Some(s) = s {
        chain_violation(
            &product_schwarz_chain(t, s, witness, witness, params.beta)?,
            params,
            out,
        );
    }
    Ok(())
}

fn record_bound(result: &BoundResult, tol: f64, check: &mut OperatorCheck, any_sharp: &mut bool) {
    let target_scale = 1.0 + result.omega_target.abs();
    if result.mode == Mode::Observe {
        let entry = check.observe.entry(result.id.clone()).or_default();
        entry.1 += 1;
        if result.slack < -tol * target_scale {
            entry.0 += 1;
        }
        return;
    }
    if !result.satisfied(tol) {
        let slack = if result.chain.holds {
            result.worst_slack()
        } else {
            result.worst_slack().min(-result.chain.max_violation)
        };
        check.violations.push(Violation {
            bound_id: result.id.clone(),
            seed: None,
            slack,
            params: Some(result.params),
        });
    }
    if result.slack < SHARP_TOL {
        check.sharp.insert(result.id.clone());
        *any_sharp = true;
    }
    if result.lower_slack.is_some_and(|l| l < SHARP_TOL) {
        check.sharp.insert(format!("{}:lower", result.id));
        *any_sharp = true;
    }
    check
        .tightness
        .entry(result.id.clone())
        .or_default()
        .push(result.tightness());
}

/// Full check of one operator: every applicable assert-mode bound and chain
/// for every deck entry, the observe-mode rows, the dominance claims and the
/// implicit-bound extraction.
pub fn check_operator(
    t: &ComplexMatrix,
    s: Option<&ComplexMatrix>,
    deck: &[BoundParams],
    tol: f64,
) -> Result<OperatorCheck> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    t.ensure_square()?;
    let evaluator = Evaluator::new(t, s)?;
    let powers = AbsPowers::new(t)?;
    let witness = numerical_radius(t, DEFAULT_GRID, DEFAULT_THETA_TOL)?.witness;
    let mut check = OperatorCheck::default();

    let rows: Vec<_> = list_bounds()
        .iter()
        .filter(|b| b.arity == Arity::OneOperator || evaluator.has_pair())
        .collect();

    for spec in rows.iter().filter(|b| b.mode == Mode::Observe) {
        let result = evaluator.evaluate(spec.id, &BoundParams::default())?;
        record_bound(&result, tol, &mut check, &mut false);
    }

    for params in deck {
        let mut any_sharp = false;
        for spec in rows.iter().filter(|b| b.mode == Mode::Assert) {
            let result = evaluator.evaluate(spec.id, params)?;
            record_bound(&result, tol, &mut check, &mut any_sharp);
        }
        check_chains(t, s, &powers, &witness, params, &mut check.violations)?;
        check.evaluations += 1;
        check.sharp_evaluations += usize::from(any_sharp);
    }

    for claim in evaluator.dominance()? {
        if !claim.holds {
            check.violations.push(Violation {
                bound_id: claim.claim_id.to_string(),
                seed: None,
                slack: claim.rhs - claim.lhs,
                params: None,
            });
        }
    }

    let (c, b) = evaluator.km_implicit_coefficients()?;
    let explicit = solve_implicit(c, b, 1.0)?;
    let w = evaluator.omega();
    if explicit < w - SLACK_TOL {
        check.violations.push(Violation {
            bound_id: "implicit:B_1_14".to_string(),
            seed: None,
            slack: explicit - w,
            params: None,
        });
    }
    Ok(check)
}

/// All slack and ordering violations beyond `tol` for one operator.
pub fn verify_operator(
    t: &ComplexMatrix,
    s: Option<&ComplexMatrix>,
    deck: &[BoundParams],
    tol: f64,
) -> Result<Vec<Violation>> {
    Ok(check_operator(t, s, deck, tol)?.violations)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TightnessStats {
    pub mean: f64,
    pub min: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObserveStats {
    pub violations: usize,
    pub evaluations: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    /// Number of operators drawn.
    pub trials: usize,
    /// Number of `(matrix, params)` evaluations.
    pub evaluations: usize,
    /// Sorted by `(bound_id, seed)`.
    pub violations: Vec<Violation>,
    pub tightness: BTreeMap<String, TightnessStats>,
    pub sharpness_hits: usize,
    pub observe_stats: BTreeMap<String, ObserveStats>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs [`check_operator`] on `trials_per` draws from every ensemble. Trial
/// `i` of an ensemble uses seed `spec.seed + i`; two-operator rows use the
/// companion draw from the same seed.
pub fn run_suite(
    ensembles: &[EnsembleSpec],
    trials_per: usize,
    deck: &[BoundParams],
    tol: f64,
) -> Result<SuiteReport> {
    if trials_per == 0 {
        return Err(Error::InvalidSpec("trials_per must be at least 1".into()));
    }
    let mut trials = 0;
    let mut evaluations = 0;
    let mut sharpness_hits = 0;
    let mut violations = Vec::new();
    let mut ratios: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut observe: BTreeMap<String, (usize, usize)> = BTreeMap::new();

    for spec in ensembles {
        spec.validate()?;
        for i in 0..trials_per as u64 {
            let trial = spec.with_seed(spec.seed.wrapping_add(i));
            let t = sample_matrix(&trial)?;
            let s = sample_second(&trial)?;
            let check = check_operator(&t, Some(&s), deck, tol)?;
            trials += 1;
            evaluations += check.evaluations;
            sharpness_hits += check.sharp_evaluations;
            violations.extend(check.violations.into_iter().map(|v| Violation {
                seed: Some(trial.seed),
                ..v
            }));
            for (id, r) in check.tightness {
                ratios.entry(id).or_default().extend(r);
            }
            for (id, (bad, total)) in check.observe {
                let e = observe.entry(id).or_default();
                e.0 += bad;
                e.1 += total;
            }
        }
    }

    violations.sort_by(|a, b| {
        (&a.bound_id, a.seed)
            .cmp(&(&b.bound_id, b.seed))
            .then(a.slack.total_cmp(&b.slack))
    });
    let tightness = ratios
        .into_iter()
        .map(|(id, r)| {
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            let min = r.iter().copied().fold(f64::INFINITY, f64::min);
            (
                id,
                TightnessStats {
                    mean,
                    min,
                    count: r.len(),
                },
            )
        })
        .collect();
    let observe_stats = observe
        .into_iter()
        .map(|(id, (bad, total))| {
            let fraction = if total == 0 {
                0.0
            } else {
                bad as f64 / total as f64
            };
            (
                id,
                ObserveStats {
                    violations: bad,
                    evaluations: total,
                    fraction,
                },
            )
        })
        .collect();

    Ok(SuiteReport {
        trials,
        evaluations,
        violations,
        tightness,
        sharpness_hits,
        observe_stats,
    })
}
