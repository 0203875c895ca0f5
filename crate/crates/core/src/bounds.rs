//! Catalogue of numerical-radius bounds.
//!
//! Each registry row bounds some power of `ω(T)` (or of `ω(S*T)` for the
//! two-operator rows) by a chain of right-hand sides. Rows whose right-hand
//! side contains `ω` itself are evaluated with the exact radius from
//! [`crate::numrange`]; [`solve_implicit`] turns such self-referential bounds
//! into explicit ones.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::chains::{BoundParams, ChainResult};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_norm, operator_norm, AbsPowers, ComplexMatrix};
use crate::numrange::{inf_squared_form, omega};

/// Assert-mode rows must satisfy `slack ≥ −SLACK_TOL · (1 + target)`.
pub const SLACK_TOL: f64 = 1e-9;

/// Dominance claims hold when `lhs ≤ rhs + DOMINANCE_TOL · (1 + rhs)`.
pub const DOMINANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arity {
    OneOperator,
    TwoOperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Proven inequality; a negative slack is a failure.
    Assert,
    /// Recorded and counted, never asserted.
    Observe,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSpec {
    pub id: &'static str,
    pub arity: Arity,
    /// The bounded quantity.
    pub target: &'static str,
    pub params_used: &'static [&'static str],
    pub mode: Mode,
    /// Where the inequality comes from, in words.
    pub anchor: &'static str,
}

const fn row(
    id: &'static str,
    arity: Arity,
    target: &'static str,
    params_used: &'static [&'static str],
    mode: Mode,
    anchor: &'static str,
) -> BoundSpec {
    BoundSpec {
        id,
        arity,
        target,
        params_used,
        mode,
        anchor,
    }
}

use Arity::{OneOperator as One, TwoOperator as Two};
use Mode::{Assert, Observe};

static REGISTRY: [BoundSpec; 22] = [
    row("B_1_1", One, "w(T)", &[], Assert, "norm equivalence: ||T||/2 <= w(T) <= ||T||"),
    row("B_1_2", One, "w(T)", &[], Assert, "Kittaneh: w(T) <= || |T|+|T*| ||/2 <= (||T|| + ||T^2||^(1/2))/2"),
    row("B_1_3", One, "w(T)^2", &[], Assert, "Kittaneh: ||T*T+TT*||/4 <= w^2(T) <= ||T*T+TT*||/2"),
    row("B_1_4", Two, "w(S*T)^r", &["r"], Assert, "Dragomir product estimate, r >= 1"),
    row("B_1_5", One, "w(T)^p", &["alpha", "p"], Assert, "El-Haddad-Kittaneh, mixed powers of |T| and |T*|"),
    row("B_1_6", One, "w(T)^(2p)", &["alpha", "p"], Assert, "El-Haddad-Kittaneh, convex combination of |T|^(2p) and |T*|^(2p)"),
    row("B_AL_1", One, "w(T)^2", &[], Assert, "refinement of Kittaneh's bound by the infimum of <(|T|-|T*|)x,x>^2"),
    row(
        "B_AL_2_printed",
        One,
        "w(T)^2",
        &[],
        Observe,
        "infimum refinement of the ||T*T+TT*||/2 bound, with the norm squared as originally printed",
    ),
    row(
        "B_AL_2_corrected",
        One,
        "w(T)^2",
        &[],
        Observe,
        "infimum refinement of the ||T*T+TT*||/2 bound, norm unsquared",
    ),
    row("B_1_9", Two, "w(S*T)^2", &[], Assert, "Kittaneh-Moradi product bound"),
    row("B_1_14", One, "w(T)^2", &[], Assert, "Kittaneh-Moradi single-operator bound"),
    row("B_3_1", Two, "w(S*T)^(2r)", &["beta", "r"], Assert, "beta-weighted generalization of the Kittaneh-Moradi product bound"),
    row(
        "B_3_2",
        Two,
        "w(S*T)^(2r)",
        &["beta", "r"],
        Assert,
        "squared-norm refinement of the product bound; the mixed term uses w(S*T)^r (printed with w(T)^r, the derivation uses w(S*T)^r)",
    ),
    row(
        "B_C_3_2",
        Two,
        "w(S*T)^2",
        &[],
        Assert,
        "B_3_2 at r = 1, beta = 1/3; mixed term uses w(S*T) as in the derivation",
    ),
    row("B_R_SQRT", Two, "w(S*T)^r", &["beta", "r"], Assert, "square-root refinement of Dragomir's product estimate"),
    row("B_3_3", One, "w(T)^(2p)", &["alpha", "beta", "p"], Assert, "mixed Schwarz refinement, single right-hand side"),
    row("B_3_4", One, "w(T)^(2p)", &["alpha", "beta", "p"], Assert, "refinement of the El-Haddad-Kittaneh convex-combination bound"),
    row("B_3_5", One, "w(T)^p", &["alpha", "beta", "p"], Assert, "refinement of the El-Haddad-Kittaneh mixed-power bound"),
    row("B_3_7", One, "w(T)^(2p)", &["alpha", "beta", "p"], Assert, "generalization of the Kittaneh-Moradi single-operator bound"),
    row("B_CONC", One, "w(T)^(2p)", &["alpha", "beta", "p"], Assert, "three-term chain refining the generalized Kittaneh-Moradi bound"),
    row("B_3_9", One, "w(T)^2", &[], Assert, "B_CONC at p = 1, alpha = 1/2, beta = 1/3"),
    row("B_3_10", One, "w(T)^2", &[], Assert, "mixed squared-norm and square-root refinement at p = 1, alpha = 1/2, beta = 1/3"),
];

/// All registry rows in a stable order.
pub fn list_bounds() -> &'static [BoundSpec] {
    &REGISTRY
}

pub fn find_bound(id: &str) -> Result<&'static BoundSpec> {
    REGISTRY
        .iter()
        .find(|b| b.id == id)
        .ok_or_else(|| Error::UnknownBound(id.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundResult {
    pub id: String,
    pub mode: Mode,
    pub omega_target: f64,
    /// Lower bound on `omega_target`, for the two-sided rows.
    pub lower: Option<f64>,
    /// Right-hand sides, tightest first.
    pub chain: ChainResult,
    /// First right-hand side minus `omega_target`.
    pub slack: f64,
    /// `omega_target − lower`, for the two-sided rows.
    pub lower_slack: Option<f64>,
    pub params: BoundParams,
}

impl BoundResult {
    /// `omega_target / first link`; 1 when both vanish.
    pub fn tightness(&self) -> f64 {
        let rhs = self.chain.first();
        if rhs == 0.0 {
            if self.omega_target == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.omega_target / rhs
        }
    }

    /// Smallest of the upper and lower slacks.
    pub fn worst_slack(&self) -> f64 {
        self.lower_slack.map_or(self.slack, |l| l.min(self.slack))
    }

    /// True when both slacks clear `−tol·(1 + target)` and the right-hand
    /// chain is non-decreasing.
    pub fn satisfied(&self, tol: f64) -> bool {
        self.worst_slack() >= -tol * (1.0 + self.omega_target.abs()) && self.chain.holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum NormKey {
    /// `‖|T|^a + |T*|^b‖`
    Mixed(u64, u64),
    /// `‖α|T|^s + (1−α)|T*|^s‖`
    Convex(u64, u64),
    /// `‖|T|^k + |S|^k‖`
    Pair(u64),
}

struct PairContext {
    omega: f64,
    powers_s: AbsPowers,
}

/// Per-operator cache of `ω`, `|T|`/`|T*|` spectra and the norms the
/// catalogue asks for. Build once per operator, evaluate for many parameter
/// sets.
pub struct Evaluator {
    omega: f64,
    norm: f64,
    norm_sq_root: f64,
    inf_term: f64,
    powers: AbsPowers,
    pair: Option<PairContext>,
    memo: RefCell<HashMap<NormKey, f64>>,
}

impl Evaluator {
    pub fn new(t: &ComplexMatrix, s: Option<&ComplexMatrix>) -> Result<Self> {
        t.ensure_square()?;
        let powers = AbsPowers::new(t)?;
        let inf_term = inf_squared_form(&(&powers.abs_pow(1.0)? - &powers.abs_adj_pow(1.0)?))?;
        let pair = match s {
            Some(s) => {
                s.ensure_square()?;
                let st = s.adjoint().multiply(t)?;
                Some(PairContext {
                    omega: omega(&st)?,
                    powers_s: AbsPowers::new(s)?,
                })
            }
            None => None,
        };
        Ok(Self {
            omega: omega(t)?,
            norm: operator_norm(t),
            norm_sq_root: operator_norm(&t.multiply(t)?).sqrt(),
            inf_term,
            powers,
            pair,
            memo: RefCell::new(HashMap::new()),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `ω(S*T)` when a second operator was supplied.
    pub fn pair_omega(&self) -> Option<f64> {
        self.pair.as_ref().map(|p| p.omega)
    }

    pub fn has_pair(&self) -> bool {
        self.pair.is_some()
    }

    fn cached(&self, key: NormKey, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if let Some(&v) = self.memo.borrow().get(&key) {
            return Ok(v);
        }
        let v = f()?;
        self.memo.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// `‖|T|^a + |T*|^b‖`.
    pub fn mixed_norm(&self, a: f64, b: f64) -> Result<f64> {
        self.cached(NormKey::Mixed(a.to_bits(), b.to_bits()), || {
            hermitian_norm(&(&self.powers.abs_pow(a)? + &self.powers.abs_adj_pow(b)?))
        })
    }

    /// `‖α|T|^s + (1−α)|T*|^s‖`.
    pub fn convex_norm(&self, alpha: f64, s: f64) -> Result<f64> {
        self.cached(NormKey::Convex(alpha.to_bits(), s.to_bits()), || {
            let a = self.powers.abs_pow(s)?.scale_real(alpha);
            let b = self.powers.abs_adj_pow(s)?.scale_real(1.0 - alpha);
            hermitian_norm(&(&a + &b))
        })
    }

    /// `‖|T|^k + |S|^k‖`.
    pub fn pair_norm(&self, k: f64) -> Result<f64> {
        let pair = self
            .pair
            .as_ref()
            .expect("pair_norm needs a second operator");
        self.cached(NormKey::Pair(k.to_bits()), || {
            hermitian_norm(&(&self.powers.abs_pow(k)? + &pair.powers_s.abs_pow(k)?))
        })
    }

    /// Evaluates one registry row.
    pub fn evaluate(&self, id: &str, params: &BoundParams) -> Result<BoundResult> {
        let spec = find_bound(id)?;
        params.validate()?;
        if spec.arity == Arity::TwoOperator && self.pair.is_none() {
            return Err(Error::MissingSecondOperand(id.to_string()));
        }
        let mut params = *params;
        let w = self.omega;
        let half = 0.5;
        let mut lower = None;

        let (target, links): (f64, Vec<(&str, f64)>) = match spec.id {
            "B_1_1" => {
                lower = Some(half * self.norm);
                (w, vec![("||T||", self.norm)])
            }
            "B_1_2" => {
                let n1 = self.mixed_norm(1.0, 1.0)?;
                (
                    w,
                    vec![
                        ("|| |T|+|T*| ||/2", half * n1),
                        (
                            "(||T|| + ||T^2||^(1/2))/2",
                            half * (self.norm + self.norm_sq_root),
                        ),
                    ],
                )
            }
            "B_1_3" => {
                let n2 = self.mixed_norm(2.0, 2.0)?;
                lower = Some(0.25 * n2);
                (w * w, vec![("||T*T+TT*||/2", half * n2)])
            }
            "B_1_4" => {
                let ws = self.pair_omega().unwrap();
                (
                    ws.powf(params.r),
                    vec![(
                        "|| |T|^(2r)+|S|^(2r) ||/2",
                        half * self.pair_norm(2.0 * params.r)?,
                    )],
                )
            }
            "B_1_5" => {
                let m = self.mixed_norm(
                    2.0 * params.p * params.alpha,
                    2.0 * params.p * (1.0 - params.alpha),
                )?;
                (
                    w.powf(params.p),
                    vec![("|| |T|^(2pa)+|T*|^(2p(1-a)) ||/2", half * m)],
                )
            }
            "B_1_6" => {
                let g = self.convex_norm(params.alpha, 2.0 * params.p)?;
                (
                    w.powf(2.0 * params.p),
                    vec![("|| a|T|^(2p)+(1-a)|T*|^(2p) ||", g)],
                )
            }
            "B_AL_1" => {
                let n1 = self.mixed_norm(1.0, 1.0)?;
                (
                    w * w,
                    vec![(
                        "|| |T|+|T*| ||^2/4 - inf/4",
                        0.25 * n1 * n1 - 0.25 * self.inf_term,
                    )],
                )
            }
            "B_AL_2_printed" => {
                let n2 = self.mixed_norm(2.0, 2.0)?;
                (
                    w * w,
                    vec![(
                        "||T*T+TT*||^2/2 - inf/2",
                        half * n2 * n2 - half * self.inf_term,
                    )],
                )
            }
            "B_AL_2_corrected" => {
                let n2 = self.mixed_norm(2.0, 2.0)?;
                (
                    w * w,
                    vec![("||T*T+TT*||/2 - inf/2", half * n2 - half * self.inf_term)],
                )
            }
            "B_1_9" => {
                let ws = self.pair_omega().unwrap();
                let (p2, p4) = (self.pair_norm(2.0)?, self.pair_norm(4.0)?);
                (
                    ws * ws,
                    vec![
                        ("P4/6 + w(S*T) P2/3", p4 / 6.0 + ws * p2 / 3.0),
                        ("P4/2", half * p4),
                    ],
                )
            }
            "B_1_14" => {
                let (n1, n2) = (self.mixed_norm(1.0, 1.0)?, self.mixed_norm(2.0, 2.0)?);
                (
                    w * w,
                    vec![
                        ("N2/6 + w N1/3", n2 / 6.0 + w * n1 / 3.0),
                        ("N2/2", half * n2),
                    ],
                )
            }
            "B_3_1" => {
                let ws = self.pair_omega().unwrap();
                let (beta, r) = (params.beta, params.r);
                let (p2r, p4r) = (self.pair_norm(2.0 * r)?, self.pair_norm(4.0 * r)?);
                let wr = ws.powf(r);
                (
                    wr * wr,
                    vec![
                        (
                            "(1-b) w^r P2r/2 + b P4r/2",
                            half * (1.0 - beta) * wr * p2r + half * beta * p4r,
                        ),
                        ("P4r/2", half * p4r),
                    ],
                )
            }
            "B_3_2" | "B_C_3_2" => {
                if spec.id == "B_C_3_2" {
                    params.r = 1.0;
                    params.beta = 1.0 / 3.0;
                }
                let ws = self.pair_omega().unwrap();
                let (beta, r) = (params.beta, params.r);
                let (p2r, p4r) = (self.pair_norm(2.0 * r)?, self.pair_norm(4.0 * r)?);
                let wr = ws.powf(r);
                let mixed = half * (1.0 - beta) * wr * p2r;
                (
                    wr * wr,
                    vec![
                        (
                            "b P2r^2/4 + (1-b) w^r P2r/2",
                            0.25 * beta * p2r * p2r + mixed,
                        ),
                        ("b P4r/2 + (1-b) w^r P2r/2", half * beta * p4r + mixed),
                        ("P4r/2", half * p4r),
                    ],
                )
            }
            "B_R_SQRT" => {
                let ws = self.pair_omega().unwrap();
                let (beta, r) = (params.beta, params.r);
                let p2r = self.pair_norm(2.0 * r)?;
                (
                    ws.powf(r),
                    vec![
                        (
                            "(1-b) w^(r/2) P2r^(1/2)/sqrt2 + b P2r/2",
                            (1.0 - beta) * ws.powf(r / 2.0) * p2r.sqrt() / SQRT_2
                                + half * beta * p2r,
                        ),
                        ("P2r/2", half * p2r),
                    ],
                )
            }
            "B_3_3" => {
                let (alpha, beta, p) = (params.alpha, params.beta, params.p);
                let g = self.convex_norm(alpha, 2.0 * p)?;
                let m = self.mixed_norm(2.0 * p * alpha, 2.0 * p * (1.0 - alpha))?;
                let wp = w.powf(p);
                (
                    wp * wp,
                    vec![(
                        "b G + (1-b) w^p M/2",
                        beta * g + half * (1.0 - beta) * wp * m,
                    )],
                )
            }
            "B_3_4" => {
                let (alpha, beta, p) = (params.alpha, params.beta, params.p);
                let g = self.convex_norm(alpha, 2.0 * p)?;
                let wp = w.powf(p);
                (
                    wp * wp,
                    vec![
                        (
                            "b G + (1-b) w^p sqrt(G)",
                            beta * g + (1.0 - beta) * wp * g.sqrt(),
                        ),
                        ("G", g),
                    ],
                )
            }
            "B_3_5" => {
                let (alpha, beta, p) = (params.alpha, params.beta, params.p);
                let m = self.mixed_norm(2.0 * p * alpha, 2.0 * p * (1.0 - alpha))?;
                (
                    w.powf(p),
                    vec![
                        (
                            "b M/2 + (1-b) w^(p/2) M^(1/2)/sqrt2",
                            half * beta * m + (1.0 - beta) * w.powf(p / 2.0) * m.sqrt() / SQRT_2,
                        ),
                        ("M/2", half * m),
                    ],
                )
            }
            "B_3_7" => {
                let (alpha, beta, p) = (params.alpha, params.beta, params.p);
                let m = self.mixed_norm(2.0 * p * alpha, 2.0 * p * (1.0 - alpha))?;
                let m4 = self.mixed_norm(4.0 * p * alpha, 4.0 * p * (1.0 - alpha))?;
                let wp = w.powf(p);
                (
                    wp * wp,
                    vec![
                        (
                            "b M4/2 + (1-b) w^p M/2",
                            half * beta * m4 + half * (1.0 - beta) * wp * m,
                        ),
                        ("M4/2", half * m4),
                    ],
                )
            }
            "B_CONC" | "B_3_9" => {
                if spec.id == "B_3_9" {
                    params.p = 1.0;
                    params.alpha = 0.5;
                    params.beta = 1.0 / 3.0;
                }
                let (alpha, beta, p) = (params.alpha, params.beta, params.p);
                let m = self.mixed_norm(2.0 * p * alpha, 2.0 * p * (1.0 - alpha))?;
                let wp = w.powf(p);
                let mixed = half * (1.0 - beta) * wp * m;
                let first = 0.25 * beta * m * m + mixed;
                if spec.id == "B_3_9" {
                    (wp * wp, vec![("N1^2/12 + w N1/3", first)])
                } else {
                    let m4 = self.mixed_norm(4.0 * p * alpha, 4.0 * p * (1.0 - alpha))?;
                    (
                        wp * wp,
                        vec![
                            ("b M^2/4 + (1-b) w^p M/2", first),
                            ("b M4/2 + (1-b) w^p M/2", half * beta * m4 + mixed),
                            ("M4/2", half * m4),
                        ],
                    )
                }
            }
            "B_3_10" => {
                params.p = 1.0;
                params.alpha = 0.5;
                params.beta = 1.0 / 3.0;
                let (n1, n2) = (self.mixed_norm(1.0, 1.0)?, self.mixed_norm(2.0, 2.0)?);
                let base = n1 * n1 / 12.0;
                (
                    w * w,
                    vec![
                        (
                            "N1^2/12 + sqrt2/3 w N2^(1/2)",
                            base + SQRT_2 / 3.0 * w * n2.sqrt(),
                        ),
                        ("N1^2/12 + N2/3", base + n2 / 3.0),
                    ],
                )
            }
            other => unreachable!("registry row {other} has no evaluator"),
        };

        let chain = ChainResult::new(spec.id, links);
        let slack = chain.first() - target;
        Ok(BoundResult {
            id: spec.id.to_string(),
            mode: spec.mode,
            omega_target: target,
            lower,
            lower_slack: lower.map(|l| target - l),
            chain,
            slack,
            params,
        })
    }

    /// The explicit-form refinement claims, each a single numeric comparison.
    pub fn dominance(&self) -> Result<Vec<DominanceClaim>> {
        let w = self.omega;
        let n1 = self.mixed_norm(1.0, 1.0)?;
        let n2 = self.mixed_norm(2.0, 2.0)?;
        let km_first = n2 / 6.0 + w * n1 / 3.0;
        let claims = vec![
            ("D1", 0.5 * n1, 0.5 * (self.norm + self.norm_sq_root)),
            ("D2", 0.25 * n1 * n1, 0.5 * n2),
            ("D3", n1 * n1 / 12.0 + w * n1 / 3.0, km_first),
            ("D4", km_first, 0.5 * n2),
            ("D5", n1, SQRT_2 * n2.sqrt()),
            ("D6", n1 * n1 / 12.0, n2 / 6.0),
        ];
        Ok(claims
            .into_iter()
            .map(|(id, lhs, rhs)| DominanceClaim {
                claim_id: id,
                lhs,
                rhs,
                holds: lhs <= rhs + DOMINANCE_TOL * (1.0 + rhs.abs()),
            })
            .collect())
    }

    /// `(C, B)` of the self-referential bound `ω² ≤ C + B·ω` from the
    /// Kittaneh–Moradi single-operator inequality.
    pub fn km_implicit_coefficients(&self) -> Result<(f64, f64)> {
        Ok((
            self.mixed_norm(2.0, 2.0)? / 6.0,
            self.mixed_norm(1.0, 1.0)? / 3.0,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceClaim {
    pub claim_id: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn evaluate_bound(
    id: &str,
    t: &ComplexMatrix,
    s: Option<&ComplexMatrix>,
    params: &BoundParams,
) -> Result<BoundResult> {
    let spec = find_bound(id)?;
    if spec.arity == Arity::TwoOperator && s.is_none() {
        return Err(Error::MissingSecondOperand(id.to_string()));
    }
    let s = if spec.arity == Arity::TwoOperator {
        s
    } else {
        None
    };
    Evaluator::new(t, s)?.evaluate(id, params)
}

pub fn dominance_suite(t: &ComplexMatrix) -> Result<Vec<DominanceClaim>> {
    Evaluator::new(t, None)?.dominance()
}

/// Largest `u ≥ 0` with `u^{2p} = C + B·u^p`, i.e. the explicit bound
/// `ω ≤ ((B + √(B² + 4C))/2)^{1/p}` implied by `ω^{2p} ≤ C + B·ω^p`.
pub fn solve_implicit(c: f64, b: f64, p: f64) -> Result<f64> {
    let in_domain = c >= 0.0 && b >= 0.0 && p >= 1.0 && p.is_finite();
    if !in_domain {
        return Err(Error::Domain(format!(
            "solve_implicit needs C, B >= 0 and p >= 1, got C={c}, B={b}, p={p}"
        )));
    }
    let root = (b + (b * b + 4.0 * c).sqrt()) / 2.0;
    Ok(root.powf(1.0 / p))
}
