//! Independent f+E+f path: Sylvester resultant of the cubic and quintic in `x`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::action::{polynomial_roots, polynomial_roots_complex};
use super::numeric::{normalized_residual, polish};
use super::SolverError;
use crate::polycore::Monomial;

type Terms = [(Monomial, f64)];

/// Coefficients in `x` (low to high) of a bivariate polynomial, each a
/// polynomial in `y` given by its coefficient list.
fn x_coefficients(p: &Terms) -> Vec<Vec<f64>> {
    let dx = p.iter().map(|(m, _)| m.exponent(0)).max().unwrap_or(0) as usize;
    let dy = p.iter().map(|(m, _)| m.exponent(1)).max().unwrap_or(0) as usize;
    let mut out = vec![vec![0.0; dy + 1]; dx + 1];
    for (m, c) in p {
        out[m.exponent(0) as usize][m.exponent(1) as usize] += c;
    }
    out
}

fn horner(c: &[f64], z: Complex<f64>) -> Complex<f64> {
    c.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &k| acc * z + k)
}

/// Sylvester matrix of `a(x)`, `b(x)` (coefficients low to high).
pub fn sylvester_matrix(a: &[Complex<f64>], b: &[Complex<f64>]) -> DMatrix<Complex<f64>> {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut s = DMatrix::from_element(size, size, Complex::new(0.0, 0.0));
    for r in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            s[(r, r + k)] = *c;
        }
    }
    for r in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            s[(n + r, r + k)] = *c;
        }
    }
    s
}

/// Coefficients in `y` (low to high) of `Res_x(p, q)`, by evaluating the
/// Sylvester determinant on `npts` points of the unit circle.
pub fn resultant_in_y(p: &Terms, q: &Terms, npts: usize) -> Vec<f64> {
    let pc = x_coefficients(p);
    let qc = x_coefficients(q);
    let values: Vec<Complex<f64>> = (0..npts)
        .map(|k| {
            let z = Complex::from_polar(1.0, 2.0 * PI * k as f64 / npts as f64);
            let a: Vec<Complex<f64>> = pc.iter().map(|c| horner(c, z)).collect();
            let b: Vec<Complex<f64>> = qc.iter().map(|c| horner(c, z)).collect();
            sylvester_matrix(&a, &b).determinant()
        })
        .collect();
    (0..npts)
        .map(|j| {
            let s: Complex<f64> = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex::from_polar(1.0, -2.0 * PI * (j * k) as f64 / npts as f64))
                .sum();
            s.re / npts as f64
        })
        .collect()
}

/// Apply `x = c·u − s·v`, `y = s·u + c·v`.
fn rotate(p: &Terms, c: f64, s: f64) -> Vec<(Monomial, f64)> {
    let space = super::numeric::DenseSpace::new(2, p.iter().map(|(m, _)| m.degree()).max().unwrap_or(0));
    let num = super::numeric::NumPoly {
        nvars: 2,
        terms: p
            .iter()
            .map(|(m, k)| (*k, (0..2).filter(|&v| m.exponent(v) > 0).map(|v| (v, m.exponent(v))).collect()))
            .collect(),
    };
    space.to_terms(&space.substitute(&num, &[vec![c, -s, 0.0], vec![s, c, 0.0]]))
}

fn lead_x(p: &Terms) -> (f64, f64) {
    let dx = p.iter().map(|(m, _)| m.exponent(0)).max().unwrap_or(0);
    let lead: f64 = p.iter().filter(|(m, _)| m.exponent(0) == dx && m.exponent(1) == 0).map(|(_, c)| c).sum();
    let scale = p.iter().fold(0.0f64, |a, (_, c)| a.max(c.abs()));
    (lead, scale)
}

/// Does `p` have total degree equal to its degree in `x` with a nonzero constant leading coefficient?
fn well_posed(p: &Terms) -> bool {
    let deg = p.iter().map(|(m, _)| m.degree()).max().unwrap_or(0);
    let dx = p.iter().map(|(m, _)| m.exponent(0)).max().unwrap_or(0);
    let (lead, scale) = lead_x(p);
    dx == deg && lead.abs() > 1e-8 * scale
}

/// Roots of the resultant this close to the real axis seed a Newton refinement.
const SEED_IMAG: f64 = 1e-2;

/// Real common roots `(x, y)` of the instantiated cubic and quintic.
///
/// `x` is eliminated with a Sylvester resultant, leaving a univariate of
/// degree 15 in `y`; each (near-)real root gives `x` from the cubic. The same
/// is done with the roles of `x` and `y` swapped, since clustered roots in
/// one coordinate are often well separated in the other. Every candidate is
/// refined by Newton's method on both polynomials and kept when both
/// normalized residuals are at most 1e-8; duplicates are merged.
pub fn sylvester_fef(cubic: &Terms, quintic: &Terms, imag_tol: f64) -> Result<Vec<[f64; 2]>, SolverError> {
    let sys = [cubic.to_vec(), quintic.to_vec()];
    let mut candidates: Vec<[f64; 2]> = Vec::new();
    let mut solved = 0;
    // (c, s): x = c·u − s·v, y = s·u + c·v; the swap maps (u, v) = (y, x)
    let mut transforms: Vec<(f64, f64, bool)> = vec![(1.0, 0.0, false), (1.0, 0.0, true)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut retries = 0;
    while let Some((c, s, swap)) = transforms.pop() {
        let mut p = rotate(cubic, c, s);
        let mut q = rotate(quintic, c, s);
        if swap {
            p = swap_vars(&p);
            q = swap_vars(&q);
        }
        if !well_posed(&p) || !well_posed(&q) {
            if solved == 0 && transforms.is_empty() && retries < 3 {
                retries += 1;
                let t: f64 = rng.random_range(0.0..2.0 * PI);
                transforms.push((t.cos(), t.sin(), false));
            }
            continue;
        }
        solved += 1;
        for [u, v] in solve_rotated(&p, &q, imag_tol.max(SEED_IMAG)) {
            let (u, v) = if swap { (v, u) } else { (u, v) };
            candidates.push([c * u - s * v, s * u + c * v]);
        }
    }
    if solved == 0 {
        return Err(SolverError::ResultantDegenerate);
    }
    let mut out: Vec<[f64; 2]> = Vec::new();
    for mut xy in candidates {
        polish(&sys, &mut xy, 5);
        if !xy.iter().all(|t| t.is_finite()) || !sys.iter().all(|g| normalized_residual(g, &xy) <= 1e-8) {
            continue;
        }
        let dup = out.iter().any(|o| (0..2).all(|k| (o[k] - xy[k]).abs() <= 1e-8 * (1.0 + xy[k].abs())));
        if !dup {
            out.push(xy);
        }
    }
    out.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok(out)
}

fn swap_vars(p: &Terms) -> Vec<(Monomial, f64)> {
    p.iter().map(|(m, c)| (Monomial::from_exponents(&[m.exponent(1), m.exponent(0)]), *c)).collect()
}

fn solve_rotated(p: &Terms, q: &Terms, imag_tol: f64) -> Vec<[f64; 2]> {
    let dp = p.iter().map(|(m, _)| m.degree()).max().unwrap_or(0) as usize;
    let dq = q.iter().map(|(m, _)| m.degree()).max().unwrap_or(0) as usize;
    let npts = (dp * dq + 1).next_power_of_two().max(16);
    let res = resultant_in_y(p, q, npts);
    let ys = polynomial_roots(&res, imag_tol);
    let pc = x_coefficients(p);
    let mut out = Vec::new();
    for y in ys {
        let cx: Vec<f64> = pc.iter().map(|c| horner(c, Complex::new(y, 0.0)).re).collect();
        let best = polynomial_roots_complex(&cx)
            .into_iter()
            .map(|z| {
                let (v, sc) = eval_complex(q, z, y);
                (z, if sc > 0.0 { v / sc } else { v })
            })
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((z, _)) = best else { continue };
        if z.im.abs() > imag_tol * (1.0 + z.re.abs()) {
            continue;
        }
        out.push([z.re, y]);
    }
    out
}

fn eval_complex(q: &Terms, x: Complex<f64>, y: f64) -> (f64, f64) {
    let mut v = Complex::new(0.0, 0.0);
    let mut s = 0.0;
    for (m, c) in q {
        let t = x.powi(m.exponent(0) as i32) * (c * y.powi(m.exponent(1) as i32));
        v += t;
        s += t.norm();
    }
    (v.norm(), s)
}

/// Residuals of a pair on both polynomials (for diagnostics).
pub fn pair_residuals(cubic: &Terms, quintic: &Terms, xy: [f64; 2]) -> [f64; 2] {
    [normalized_residual(cubic, &xy), normalized_residual(quintic, &xy)]
}
