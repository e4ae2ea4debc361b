//! Closed-form recovery of focal length, radial distortion and the homography scale.

use serde::{Deserialize, Serialize};

use super::SolverError;

/// Relative size below which a formula denominator counts as vanishing.
const SINGULAR_TOL: f64 = 1e-12;

fn frob(m: &[[f64; 3]; 3]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

fn ratio(num: f64, den: f64, scale: f64) -> Result<f64, SolverError> {
    if !(den.abs() > SINGULAR_TOL * scale) {
        return Err(SolverError::ExtractionSingular);
    }
    Ok(num / den)
}

/// `f²` for `E = F·K`, `K = diag(f, f, 1)`, with `F` acting as `xᵀ F x' = 0`.
///
/// The formula is stated for the matrix acting on the uncalibrated side from
/// the left, so it is evaluated on `Fᵀ`.
pub fn extract_focal_ef(f: &[[f64; 3]; 3]) -> Result<f64, SolverError> {
    let g = |i: usize, j: usize| f[j - 1][i - 1];
    let num = g(2, 3) * g(3, 1).powi(2) + g(2, 3) * g(3, 2).powi(2)
        - 2.0 * g(2, 1) * g(3, 1) * g(3, 3)
        - 2.0 * g(2, 2) * g(3, 2) * g(3, 3)
        - g(2, 3) * g(3, 3).powi(2);
    let den = 2.0 * g(1, 1) * g(1, 3) * g(2, 1) + 2.0 * g(1, 2) * g(1, 3) * g(2, 2)
        - g(2, 3) * (g(1, 1).powi(2) + g(1, 2).powi(2) - g(1, 3).powi(2) - g(2, 1).powi(2) - g(2, 2).powi(2) - g(2, 3).powi(2));
    ratio(num, den, frob(f).powi(3))
}

/// `f²` for `E = K·F·K`.
pub fn extract_focal_fef(f: &[[f64; 3]; 3]) -> Result<f64, SolverError> {
    let g = |i: usize, j: usize| f[i - 1][j - 1];
    let num = -g(1, 3).powi(2) * g(3, 2) * g(3, 3) - g(2, 3).powi(2) * g(3, 2) * g(3, 3)
        + g(1, 2) * g(1, 3) * g(3, 3).powi(2)
        + g(2, 2) * g(2, 3) * g(3, 3).powi(2);
    let den = g(1, 1) * g(1, 3) * g(3, 1) * g(3, 2) + g(2, 1) * g(2, 3) * g(3, 1) * g(3, 2)
        + g(1, 2) * g(1, 3) * g(3, 2).powi(2)
        + g(2, 2) * g(2, 3) * g(3, 2).powi(2)
        - g(1, 1) * g(1, 2) * g(3, 1) * g(3, 3)
        - g(2, 1) * g(2, 2) * g(3, 1) * g(3, 3)
        - g(1, 2).powi(2) * g(3, 2) * g(3, 3)
        - g(2, 2).powi(2) * g(3, 2) * g(3, 3);
    ratio(num, den, frob(f).powi(4))
}

/// Positive focal length from `f²`, or `InvalidSolution` when `f² ≤ 0`.
pub fn focal_from_squared(f2: f64) -> Result<f64, SolverError> {
    if f2 > 0.0 && f2.is_finite() {
        Ok(f2.sqrt())
    } else {
        Err(SolverError::InvalidSolution)
    }
}

/// λ as the least-squares ratio of the fourth column of `F̂` to its third.
pub fn extract_distortion(fh: &[[f64; 4]; 3]) -> Result<f64, SolverError> {
    let c3: f64 = fh.iter().map(|r| r[2] * r[2]).sum();
    let total: f64 = fh.iter().flatten().map(|x| x * x).sum();
    if !(c3 > SINGULAR_TOL * total) {
        return Err(SolverError::ExtractionSingular);
    }
    Ok(fh.iter().map(|r| r[2] * r[3]).sum::<f64>() / c3)
}

/// Scale of the first two homography columns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomographyScale {
    /// `w = 1/f`, positive; NaN when infeasible.
    pub w: f64,
    pub w2: f64,
    pub feasible: bool,
    /// Normalized residual of the second orthogonality relation at `w²`.
    pub consistency: f64,
}

/// `w²` from `w²(h1 h2 + h4 h5) + h7 h8 = 0`, falling back to
/// `w²(h1² + h4² − h2² − h5²) + h7² − h8² = 0` when the first relation
/// vanishes identically. `h1 h2 + h4 h5 = 0` with `h7 h8 ≠ 0` has no solution.
pub fn extend_homography(h: &[f64; 9]) -> Result<HomographyScale, SolverError> {
    let scale: f64 = h.iter().map(|x| x * x).sum();
    let a1 = h[0] * h[1] + h[3] * h[4];
    let b1 = h[6] * h[7];
    let a2 = h[0] * h[0] + h[3] * h[3] - h[1] * h[1] - h[4] * h[4];
    let b2 = h[6] * h[6] - h[7] * h[7];
    let tol = SINGULAR_TOL * scale;
    let infeasible = HomographyScale { w: f64::NAN, w2: f64::NAN, feasible: false, consistency: f64::NAN };
    let w2 = if a1.abs() > tol {
        -b1 / a1
    } else if b1.abs() > tol {
        return Ok(infeasible);
    } else if a2.abs() > tol {
        -b2 / a2
    } else {
        return Err(SolverError::ExtractionSingular);
    };
    let consistency = (w2 * a2 + b2).abs() / (w2.abs() * a2.abs() + b2.abs()).max(f64::MIN_POSITIVE);
    let feasible = w2 > 0.0 && w2.is_finite();
    Ok(HomographyScale { w: if feasible { w2.sqrt() } else { f64::NAN }, w2, feasible, consistency })
}
