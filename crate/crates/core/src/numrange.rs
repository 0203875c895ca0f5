//! Numerical radius and numerical range.
//!
//! `ω(T) = max_θ λ_max(H(θ))` with `H(θ) = (e^{iθ}T + e^{−iθ}T*)/2`. The
//! maximum over θ is bracketed on a uniform grid and then polished by
//! golden-section search around every near-best local maximum, since the
//! objective is only Lipschitz (eigenvalue crossings) and can have several
//! global maxima.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, ComplexVector, DEFAULT_EIG_TOL};

pub const DEFAULT_GRID: usize = 1024;
pub const DEFAULT_THETA_TOL: f64 = 1e-12;
pub const MIN_GRID: usize = 64;

/// Smallest grid the brute-force oracle accepts.
pub const MIN_ORACLE_GRID: usize = 8 * DEFAULT_GRID;

/// Grid maxima within this relative distance of the best are refined.
const NEAR_BEST: f64 = 1e-6;

/// Runs of near-best grid points longer than this are treated as plateaus.
const PLATEAU_RUN: usize = 8;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Serialize)]
pub struct RadiusResult {
    pub omega: f64,
    pub theta_star: f64,
    /// Unit vector with `|⟨T w, w⟩|` within round-off of `omega`.
    pub witness: ComplexVector,
    pub grid_size: usize,
    pub refined_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub z: Complex64,
}

/// `H(θ) = (e^{iθ}T + e^{−iθ}T*)/2`, exactly Hermitian in floating point.
pub fn rotated_hermitian_part(t: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    let n = t.ensure_square()?;
    let rot = Complex64::from_polar(1.0, theta);
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = (rot * t[(i, j)] + (rot * t[(j, i)]).conj()) * 0.5;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
        h[(i, i)].im = 0.0;
    }
    Ok(h)
}

fn top_eigenpair(t: &ComplexMatrix, theta: f64) -> Result<(f64, ComplexVector)> {
    let eig = hermitian_eig(&rotated_hermitian_part(t, theta)?, DEFAULT_EIG_TOL)?;
    Ok((eig.max(), eig.top_vector()))
}

fn top_eigenvalue(t: &ComplexMatrix, theta: f64) -> Result<f64> {
    Ok(hermitian_eig(&rotated_hermitian_part(t, theta)?, DEFAULT_EIG_TOL)?.max())
}

/// Maximizes `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `tol`. Returns the best point evaluated.
fn golden_section_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let (mut best_x, mut best_f) = if f2 > f1 { (x2, f2) } else { (x1, f1) };
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
            if f1 > best_f {
                best_x = x1;
                best_f = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
            if f2 > best_f {
                best_x = x2;
                best_f = f2;
            }
        }
        if x1 >= x2 {
            break;
        }
    }
    Ok((best_x, best_f))
}

/// Numerical radius `ω(T) = sup_{‖x‖=1} |⟨Tx, x⟩|`.
pub fn numerical_radius(t: &ComplexMatrix, grid: usize, tol: f64) -> Result<RadiusResult> {
    t.ensure_square()?;
    if grid < MIN_GRID {
        return Err(Error::Domain(format!(
            "grid must be at least {MIN_GRID}, got {grid}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "refinement tolerance must be positive, got {tol}"
        )));
    }

    let step = TAU / grid as f64;
    let values = (0..grid)
        .map(|k| top_eigenvalue(t, k as f64 * step))
        .collect::<Result<Vec<_>>>()?;

    let mut best_k = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best_k] {
            best_k = k;
        }
    }
    let grid_best = values[best_k];
    let cutoff = grid_best - NEAR_BEST * (1.0 + grid_best.abs());

    // Near-best grid points form circular runs. A short run gets one search
    // per local maximum; a long run is a plateau (possibly with rounding
    // noise) and gets a single search around its best member.
    let near = |k: usize| values[k] >= cutoff;
    let mut runs: Vec<Vec<usize>> = Vec::new();
    if (0..grid).all(near) {
        runs.push((0..grid).collect());
    } else {
        let start = (0..grid).find(|&k| !near(k)).unwrap_or(0);
        let mut current = Vec::new();
        for offset in 1..=grid {
            let k = (start + offset) % grid;
            if near(k) {
                current.push(k);
            } else if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
        }
    }
    let mut seeds = Vec::new();
    for run in &runs {
        if run.len() > PLATEAU_RUN {
            seeds.push(
                *run.iter()
                    .max_by(|&&a, &&b| values[a].total_cmp(&values[b]))
                    .unwrap(),
            );
        } else {
            seeds.extend(run.iter().copied().filter(|&k| {
                values[k] >= values[(k + grid - 1) % grid] && values[k] >= values[(k + 1) % grid]
            }));
        }
    }

    let mut theta_star = best_k as f64 * step;
    let mut omega = grid_best;
    for seed in seeds {
        let centre = seed as f64 * step;
        let (x, fx) = golden_section_max(
            |th| top_eigenvalue(t, th),
            centre - step,
            centre + step,
            tol,
        )?;
        if fx > omega {
            omega = fx;
            theta_star = x;
        }
    }
    theta_star = theta_star.rem_euclid(TAU);
    if theta_star >= TAU {
        theta_star = 0.0;
    }

    let (lambda, witness) = top_eigenpair(t, theta_star)?;
    let attained = t.quadratic_form(&witness)?.norm();
    let omega = omega.max(lambda).max(attained);
    Ok(RadiusResult {
        omega,
        theta_star,
        witness,
        grid_size: grid,
        refined_tol: tol,
    })
}

/// `ω(T)` with default grid and tolerance.
pub fn omega(t: &ComplexMatrix) -> Result<f64> {
    Ok(numerical_radius(t, DEFAULT_GRID, DEFAULT_THETA_TOL)?.omega)
}

fn oracle_top(t: &ComplexMatrix, n: usize, theta: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, theta);
    let h = DMatrix::from_fn(n, n, |i, j| {
        (rot * t[(i, j)] + (rot * t[(j, i)]).conj()) * 0.5
    });
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Brute-force cross-check: maximum of `λ_max(H(θ))` over a dense uniform
/// grid. Eigenvalues come from nalgebra's Hermitian solver so this path
/// shares nothing with [`numerical_radius`] beyond `H(θ)` itself.
///
/// A raw grid of spacing `h` undershoots by about `κh²/8`, where `κ` is the
/// curvature at the peak. Each grid peak close to the best value is
/// therefore also evaluated once at the vertex of the parabola through it
/// and its two neighbours. The result is still a sampled value of
/// `λ_max(H(θ))`, so it never exceeds `ω`.
pub fn numerical_radius_oracle(t: &ComplexMatrix, dense_grid: usize) -> Result<f64> {
    let n = t.ensure_square()?;
    if dense_grid < MIN_ORACLE_GRID {
        return Err(Error::Domain(format!(
            "oracle grid must be at least {MIN_ORACLE_GRID}, got {dense_grid}"
        )));
    }
    let step = TAU / dense_grid as f64;
    let values: Vec<f64> = (0..dense_grid)
        .map(|k| oracle_top(t, n, k as f64 * step))
        .collect();
    let grid_best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best = grid_best;
    for k in 0..dense_grid {
        let (l, c, r) = (
            values[(k + dense_grid - 1) % dense_grid],
            values[k],
            values[(k + 1) % dense_grid],
        );
        if c < l || c < r || c < grid_best - NEAR_BEST * (1.0 + grid_best.abs()) {
            continue;
        }
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            let offset = 0.5 * (l - r) / denom;
            best = best.max(oracle_top(t, n, (k as f64 + offset) * step));
        }
    }
    Ok(best)
}

/// `(λ_min, λ_max)`, the extrema of `⟨Ax, x⟩` over unit vectors.
pub fn hermitian_form_extrema(a: &ComplexMatrix) -> Result<(f64, f64)> {
    let eig = hermitian_eig(a, DEFAULT_EIG_TOL)?;
    Ok((eig.min(), eig.max()))
}

/// `inf_{‖x‖=1} ⟨Ax, x⟩²`. The form fills exactly `[λ_min, λ_max]`, so this
/// is zero when the interval contains zero and the smaller squared endpoint
/// otherwise.
pub fn inf_squared_form(a: &ComplexMatrix) -> Result<f64> {
    let (lo, hi) = hermitian_form_extrema(a)?;
    Ok(if lo <= 0.0 && hi >= 0.0 {
        0.0
    } else {
        (lo * lo).min(hi * hi)
    })
}

/// Support points of `W(T)`: for each θ on a uniform grid, `⟨T x_θ, x_θ⟩`
/// where `x_θ` is a top eigenvector of `H(θ)`.
pub fn range_boundary(t: &ComplexMatrix, points: usize) -> Result<Vec<BoundaryPoint>> {
    t.ensure_square()?;
    if points < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 boundary points, got {points}"
        )));
    }
    let step = TAU / points as f64;
    (0..points)
        .map(|k| {
            let theta = k as f64 * step;
            let (_, x) = top_eigenpair(t, theta)?;
            Ok(BoundaryPoint {
                theta,
                z: t.quadratic_form(&x)?,
            })
        })
        .collect()
}
