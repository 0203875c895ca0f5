//! Scalar and vector-level inequality chains: Cauchy–Schwarz refinements,
//! the mixed Schwarz (Kato) refinements, the product form `|⟨Tx, Sy⟩|` and
//! Buzano's inequality.
//!
//! Every chain keeps all of its intermediate links so that "the middle term
//! is tighter" claims can be asserted directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{AbsPowers, ComplexMatrix, ComplexVector};

/// Links may decrease by at most `CHAIN_TOL · (1 + |last link|)`.
pub const CHAIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub chain_id: String,
    pub links: Vec<Link>,
    pub holds: bool,
    /// Largest amount by which a link exceeds its successor; zero when the
    /// chain holds.
    pub max_violation: f64,
}

impl ChainResult {
    pub fn new(chain_id: impl Into<String>, links: Vec<(&str, f64)>) -> Self {
        let links: Vec<Link> = links
            .into_iter()
            .map(|(label, value)| Link {
                label: label.to_string(),
                value,
            })
            .collect();
        let last = links.last().map_or(0.0, |l| l.value.abs());
        let worst = links
            .windows(2)
            .map(|w| w[0].value - w[1].value)
            .fold(0.0f64, |acc, d| {
                if d.is_nan() {
                    f64::INFINITY
                } else {
                    acc.max(d)
                }
            });
        let holds = worst <= CHAIN_TOL * (1.0 + last);
        Self {
            chain_id: chain_id.into(),
            links,
            holds,
            max_violation: if holds { 0.0 } else { worst },
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.links.iter().map(|l| l.value).collect()
    }

    pub fn first(&self) -> f64 {
        self.links[0].value
    }

    pub fn last(&self) -> f64 {
        self.links[self.links.len() - 1].value
    }
}

/// Tunable parameters shared by the chains and the bound catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub r: f64,
    pub n: u32,
}

impl Default for BoundParams {
    /// `α = 1/2, β = 1/3, p = r = n = 1`.
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 1.0 / 3.0,
            p: 1.0,
            r: 1.0,
            n: 1,
        }
    }
}

impl BoundParams {
    pub fn new(alpha: f64, beta: f64, p: f64, r: f64, n: u32) -> Result<Self> {
        let params = Self {
            alpha,
            beta,
            p,
            r,
            n,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("alpha", self.alpha)?;
        check_unit_interval("beta", self.beta)?;
        check_at_least_one("p", self.p)?;
        check_at_least_one("r", self.r)?;
        if self.n < 1 {
            return Err(Error::Domain("n must be a positive integer".into()));
        }
        Ok(())
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn check_at_least_one(name: &str, v: f64) -> Result<()> {
    if v >= 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be a finite value >= 1, got {v}"
        )))
    }
}

fn check_dims(x: &ComplexVector, y: &ComplexVector) -> Result<()> {
    if x.dim() == y.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "vector dimensions {} and {}",
            x.dim(),
            y.dim()
        )))
    }
}

/// `a^α b^{1−α} ≤ αa + (1−α)b ≤ (αa^p + (1−α)b^p)^{1/p}`.
pub fn power_mean_chain(a: f64, b: f64, alpha: f64, p: f64) -> Result<ChainResult> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!(
            "power means need a, b >= 0, got a={a}, b={b}"
        )));
    }
    check_unit_interval("alpha", alpha)?;
    check_at_least_one("p", p)?;
    let geometric = a.powf(alpha) * b.powf(1.0 - alpha);
    let arithmetic = alpha * a + (1.0 - alpha) * b;
    let power = (alpha * a.powf(p) + (1.0 - alpha) * b.powf(p)).powf(1.0 / p);
    Ok(ChainResult::new(
        "power_mean",
        vec![
            ("weighted geometric", geometric),
            ("weighted arithmetic", arithmetic),
            ("power mean", power),
        ],
    ))
}

/// `|⟨x,y⟩|² ≤ (1−β)|⟨x,y⟩|‖x‖‖y‖ + β‖x‖²‖y‖² ≤ ‖x‖²‖y‖²`.
pub fn cs_refined_chain(x: &ComplexVector, y: &ComplexVector, beta: f64) -> Result<ChainResult> {
    check_dims(x, y)?;
    check_unit_interval("beta", beta)?;
    let c = x.inner(y).norm();
    let m = x.norm() * y.norm();
    Ok(ChainResult::new(
        "cs_refined",
        vec![
            ("|<x,y>|^2", c * c),
            (
                "(1-b)|<x,y>|.|x||y| + b|x|^2|y|^2",
                (1.0 - beta) * c * m + beta * m * m,
            ),
            ("|x|^2|y|^2", m * m),
        ],
    ))
}

/// `|⟨x,y⟩|² ≤ |⟨x,y⟩|‖x‖‖y‖ + ½(‖x‖²‖y‖² − |⟨x,y⟩|²) ≤ ‖x‖²‖y‖²`.
pub fn cs_km_chain(x: &ComplexVector, y: &ComplexVector) -> Result<ChainResult> {
    check_dims(x, y)?;
    let c = x.inner(y).norm();
    let m = x.norm() * y.norm();
    Ok(ChainResult::new(
        "cs_km",
        vec![
            ("|<x,y>|^2", c * c),
            (
                "|<x,y>|.|x||y| + (|x|^2|y|^2 - |<x,y>|^2)/2",
                c * m + 0.5 * (m * m - c * c),
            ),
            ("|x|^2|y|^2", m * m),
        ],
    ))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// The n-th power refinement:
/// `|⟨x,y⟩|^{2n} ≤ Σ_k C(n,k)(1−β)^k β^{n−k}|⟨x,y⟩|^k(‖x‖‖y‖)^{2n−k}
///  ≤ (1−β)|⟨x,y⟩|^n(‖x‖‖y‖)^n + β(‖x‖‖y‖)^{2n} ≤ (‖x‖‖y‖)^{2n}`.
pub fn cs_binomial_chain(
    x: &ComplexVector,
    y: &ComplexVector,
    beta: f64,
    n: u32,
) -> Result<ChainResult> {
    check_dims(x, y)?;
    check_unit_interval("beta", beta)?;
    if n < 1 {
        return Err(Error::Domain("n must be a positive integer".into()));
    }
    let c = x.inner(y).norm();
    let m = x.norm() * y.norm();
    let ni = n as i32;
    let expanded: f64 = (0..=n)
        .map(|k| {
            let ki = k as i32;
            binomial(n, k)
                * (1.0 - beta).powi(ki)
                * beta.powi(ni - ki)
                * c.powi(ki)
                * m.powi(2 * ni - ki)
        })
        .sum();
    Ok(ChainResult::new(
        "cs_binomial",
        vec![
            ("|<x,y>|^(2n)", c.powi(2 * ni)),
            ("binomial expansion", expanded),
            (
                "(1-b)|<x,y>|^n(|x||y|)^n + b(|x||y|)^(2n)",
                (1.0 - beta) * c.powi(ni) * m.powi(ni) + beta * m.powi(2 * ni),
            ),
            ("(|x||y|)^(2n)", m.powi(2 * ni)),
        ],
    ))
}

/// `(|⟨Tx,y⟩|, ⟨|T|^{2pα}x,x⟩, ⟨|T*|^{2p(1−α)}y,y⟩)`.
fn kato_terms(
    t: &ComplexMatrix,
    powers: &AbsPowers,
    x: &ComplexVector,
    y: &ComplexVector,
    params: &BoundParams,
) -> Result<(f64, f64, f64)> {
    check_dims(x, y)?;
    params.validate()?;
    let txy = t.apply(x)?.inner(y).norm();
    let a = powers
        .abs_pow(2.0 * params.p * params.alpha)?
        .quadratic_form(x)?
        .re
        .max(0.0);
    let b = powers
        .abs_adj_pow(2.0 * params.p * (1.0 - params.alpha))?
        .quadratic_form(y)?
        .re
        .max(0.0);
    Ok((txy, a, b))
}

/// Generalized mixed Schwarz chain, with `A = ⟨|T|^{2pα}x,x⟩` and
/// `B = ⟨|T*|^{2p(1−α)}y,y⟩`:
/// `|⟨Tx,y⟩|^{2p} ≤ βAB + (1−β)|⟨Tx,y⟩|^p √(AB) ≤ AB`.
///
/// For `p > 1` the chain relies on McCarthy's inequality, which needs unit
/// `x` and `y`.
pub fn mixed_schwarz_chain(
    t: &ComplexMatrix,
    x: &ComplexVector,
    y: &ComplexVector,
    params: &BoundParams,
) -> Result<ChainResult> {
    mixed_schwarz_chain_with(t, &AbsPowers::new(t)?, x, y, params)
}

pub fn mixed_schwarz_chain_with(
    t: &ComplexMatrix,
    powers: &AbsPowers,
    x: &ComplexVector,
    y: &ComplexVector,
    params: &BoundParams,
) -> Result<ChainResult> {
    let (txy, a, b) = kato_terms(t, powers, x, y, params)?;
    let beta = params.beta;
    let ab = a * b;
    let lhs = txy.powf(params.p);
    Ok(ChainResult::new(
        "mixed_schwarz",
        vec![
            ("|<Tx,y>|^(2p)", lhs * lhs),
            (
                "b.AB + (1-b)|<Tx,y>|^p sqrt(AB)",
                beta * ab + (1.0 - beta) * lhs * ab.sqrt(),
            ),
            ("AB", ab),
        ],
    ))
}

/// Square-root form of the mixed Schwarz chain:
/// `|⟨Tx,y⟩|^p ≤ β√A√B + (1−β)|⟨Tx,y⟩|^{p/2}(√A√B)^{1/2} ≤ √A√B`.
pub fn mixed_schwarz_p_chain(
    t: &ComplexMatrix,
    x: &ComplexVector,
    y: &ComplexVector,
    params: &BoundParams,
) -> Result<ChainResult> {
    mixed_schwarz_p_chain_with(t, &AbsPowers::new(t)?, x, y, params)
}

pub fn mixed_schwarz_p_chain_with(
    t: &ComplexMatrix,
    powers: &AbsPowers,
    x: &ComplexVector,
    y: &ComplexVector,
    params: &BoundParams,
) -> Result<ChainResult> {
    let (txy, a, b) = kato_terms(t, powers, x, y, params)?;
    let beta = params.beta;
    let root = a.sqrt() * b.sqrt();
    Ok(ChainResult::new(
        "mixed_schwarz_p",
        vec![
            ("|<Tx,y>|^p", txy.powf(params.p)),
            (
                "b.sqrt(A)sqrt(B) + (1-b)|<Tx,y>|^(p/2)(sqrt(A)sqrt(B))^(1/2)",
                beta * root + (1.0 - beta) * txy.powf(params.p / 2.0) * root.sqrt(),
            ),
            ("sqrt(A)sqrt(B)", root),
        ],
    ))
}

/// `|⟨Tx,Sy⟩|² ≤ β⟨|T|²x,x⟩⟨|S|²y,y⟩ + (1−β)|⟨Tx,Sy⟩|√(⟨|T|²x,x⟩⟨|S|²y,y⟩)
///  ≤ ‖Tx‖²‖Sy‖²`.
pub fn product_schwarz_chain(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    x: &ComplexVector,
    y: &ComplexVector,
    beta: f64,
) -> Result<ChainResult> {
    check_unit_interval("beta", beta)?;
    let tx = t.apply(x)?;
    let sy = s.apply(y)?;
    check_dims(&tx, &sy)?;
    let c = tx.inner(&sy).norm();
    let a = t.gram().quadratic_form(x)?.re.max(0.0);
    let b = s.gram().quadratic_form(y)?.re.max(0.0);
    let last = tx.norm().powi(2) * sy.norm().powi(2);
    Ok(ChainResult::new(
        "product_schwarz",
        vec![
            ("|<Tx,Sy>|^2", c * c),
            (
                "b<|T|^2x,x><|S|^2y,y> + (1-b)|<Tx,Sy>|sqrt(..)",
                beta * a * b + (1.0 - beta) * c * (a * b).sqrt(),
            ),
            ("|Tx|^2|Sy|^2", last),
        ],
    ))
}

/// Buzano: `|⟨x,e⟩⟨e,y⟩| ≤ ½(|⟨x,y⟩| + ‖x‖‖y‖)` for unit `e`.
pub fn buzano_check(
    x: &ComplexVector,
    y: &ComplexVector,
    e: &ComplexVector,
) -> Result<ChainResult> {
    check_dims(x, y)?;
    check_dims(x, e)?;
    let en = e.norm();
    if (en - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(en));
    }
    let lhs = (x.inner(e) * e.inner(y)).norm();
    let rhs = 0.5 * (x.inner(y).norm() + x.norm() * y.norm());
    Ok(ChainResult::new(
        "buzano",
        vec![("|<x,e><e,y>|", lhs), ("(|<x,y>| + |x||y|)/2", rhs)],
    ))
}
