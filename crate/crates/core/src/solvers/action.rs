//! Template elimination and the action-matrix eigenvalue step.

use nalgebra::DMatrix;

use super::SolverError;
use crate::templates::SolverTemplate;

/// Gauss–Jordan on a row-major `rows × cols` matrix, pivoting over the first
/// `rows` columns (largest magnitude, lowest row on ties), leaving the
/// identity in the leading block. Returns the smallest pivot relative to the
/// block's Frobenius norm, a cheap conditioning indicator.
pub fn gauss_jordan(data: &mut [f64], rows: usize, cols: usize, pivot_tol: f64) -> Result<f64, SolverError> {
    let norm = data
        .chunks(cols)
        .flat_map(|r| r[..rows].iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let mut smallest = f64::INFINITY;
    for c in 0..rows {
        let mut best = c;
        for r in c + 1..rows {
            if data[r * cols + c].abs() > data[best * cols + c].abs() {
                best = r;
            }
        }
        let p = data[best * cols + c];
        if !(p.abs() > pivot_tol * norm) {
            return Err(SolverError::Conditioning { column: c, pivot: p.abs(), norm });
        }
        smallest = smallest.min(p.abs() / norm);
        if best != c {
            for k in 0..cols {
                data.swap(best * cols + k, c * cols + k);
            }
        }
        let inv = 1.0 / p;
        for k in c..cols {
            data[c * cols + k] *= inv;
        }
        let (before, rest) = data.split_at_mut(c * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for k in c..cols {
                row[k] -= f * pivot_row[k];
            }
        }
    }
    Ok(if rows == 0 { 1.0 } else { smallest })
}

/// Action matrix `M` with `M · v = a · v` for the vector `v` of basis monomial
/// values at a solution, where `a` is the action variable.
pub fn action_matrix(filled: &[f64], template: &SolverTemplate, pivot_tol: f64) -> Result<DMatrix<f64>, SolverError> {
    if filled.len() != template.rows * template.cols {
        return Err(SolverError::Dimension { expected: template.rows * template.cols, got: filled.len() });
    }
    let mut data = filled.to_vec();
    let (rows, cols) = (template.rows, template.cols);
    gauss_jordan(&mut data, rows, cols, pivot_tol)?;
    let nb = template.basis_len();
    let ne = template.n_excess;
    let start = template.eliminated_cols();
    let mut m = DMatrix::zeros(nb, nb);
    for (j, target) in template.action_targets().iter().enumerate() {
        match *target {
            Ok(i) => m[(j, i)] = 1.0,
            Err(k) => {
                let r = ne + k;
                for i in 0..nb {
                    m[(j, i)] = -data[r * cols + start + i];
                }
            }
        }
    }
    Ok(m)
}

/// Real eigenpairs of `m`: eigenvalues with `|im| ≤ imag_tol·(1 + |re|)`, each
/// with a unit null vector of `m − λI`. Sorted by eigenvalue.
pub fn real_eigenpairs(m: &DMatrix<f64>, imag_tol: f64) -> Result<Vec<(f64, Vec<f64>)>, SolverError> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(SolverError::Eigen);
    }
    let ev = m.clone().complex_eigenvalues();
    let mut out = Vec::new();
    for z in ev.iter() {
        if z.im.abs() > imag_tol * (1.0 + z.re.abs()) {
            continue;
        }
        let lam = z.re;
        let shifted = m - DMatrix::identity(n, n) * lam;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.ok_or(SolverError::Eigen)?;
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .ok_or(SolverError::Eigen)?;
        out.push((lam, vt.row(k).iter().copied().collect()));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Real solutions (values of the template variables) from a filled template.
///
/// Each variable `x_k` is read as `v[x_k·m] / v[m]` over the basis pair with
/// the largest `|v[m]|`, which stays accurate when the solution is far from
/// the origin of the chart; the action variable is the eigenvalue itself.
pub fn action_eigensolve(filled: &[f64], template: &SolverTemplate, pivot_tol: f64, imag_tol: f64) -> Result<Vec<Vec<f64>>, SolverError> {
    let m = action_matrix(filled, template, pivot_tol)?;
    eigensolve_action_matrix(&m, template, imag_tol)
}

/// Real solutions from an action matrix built for `template`.
pub fn eigensolve_action_matrix(m: &DMatrix<f64>, template: &SolverTemplate, imag_tol: f64) -> Result<Vec<Vec<f64>>, SolverError> {
    let basis = template.basis_monomials();
    let n = template.variables.len();
    let pairs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|k| {
            basis
                .iter()
                .enumerate()
                .filter_map(|(i, b)| {
                    let up = b.mul(&crate::polycore::Monomial::var(n, k));
                    basis.iter().position(|c| *c == up).map(|j| (i, j))
                })
                .collect()
        })
        .collect();
    if pairs.iter().any(|p| p.is_empty()) {
        return Err(SolverError::Eigen);
    }
    let a = template.action_index();
    let mut sols = Vec::new();
    for (lam, v) in real_eigenpairs(m, imag_tol)? {
        let x: Vec<f64> = (0..n)
            .map(|k| {
                if k == a {
                    return lam;
                }
                let &(i, j) = pairs[k].iter().max_by(|p, q| v[p.0].abs().total_cmp(&v[q.0].abs())).unwrap();
                v[j] / v[i]
            })
            .collect();
        if x.iter().all(|t| t.is_finite()) {
            sols.push(x);
        }
    }
    Ok(sols)
}

/// Smallest pairwise distance between eigenvalues of `m`, relative to their
/// magnitude. Near-repeated eigenvalues make the eigenvectors unreliable.
pub fn eigenvalue_separation(m: &DMatrix<f64>) -> f64 {
    let ev = m.clone().complex_eigenvalues();
    let mut sep = f64::INFINITY;
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            sep = sep.min((ev[i] - ev[j]).norm() / (1.0 + ev[i].norm().max(ev[j].norm())));
        }
    }
    sep
}

/// Real roots of `Σ c_k t^k` (coefficients low to high) via the companion matrix.
pub fn polynomial_roots(coeffs: &[f64], imag_tol: f64) -> Vec<f64> {
    let complex = polynomial_roots_complex(coeffs);
    let mut out: Vec<f64> = complex
        .into_iter()
        .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// All complex roots of `Σ c_k t^k` (trailing zero leading coefficients dropped).
pub fn polynomial_roots_complex(coeffs: &[f64]) -> Vec<nalgebra::Complex<f64>> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut deg = coeffs.len().saturating_sub(1);
    while deg > 0 && coeffs[deg].abs() <= 1e-300f64.max(scale * 1e-15) {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut c = DMatrix::zeros(deg, deg);
    for i in 1..deg {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        c[(i, deg - 1)] = -coeffs[i] / lead;
    }
    c.complex_eigenvalues().iter().copied().collect()
}
