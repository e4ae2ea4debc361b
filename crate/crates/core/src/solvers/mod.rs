//! Online solvers: null-space parametrization, template elimination,
//! action-matrix eigenvalues, and extraction of focal length / distortion.
//!
//! Conventions: a correspondence `(x, x')` satisfies `xᵀ F x' = 0` with
//! `E = F·K` (E+f, E+f+k) or `E = K·F·K` (f+E+f), `K = diag(f, f, 1)`; the
//! right image carries the unknown focal length and, for E+f+k, the radial
//! distortion. For Hf the left point is a planar point `(X, Y)` on `z = 0`
//! and the right point its image.

pub mod action;
pub mod extract;
pub mod numeric;
pub mod sylvester;

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elimderive::{golden_generators, ProblemId};
use crate::polycore::Monomial;
use crate::templates::{bundled, param_vars, SolverTemplate};
pub use action::{action_eigensolve, action_matrix, gauss_jordan, polynomial_roots};
pub use extract::{extend_homography, extract_distortion, extract_focal_ef, extract_focal_fef, HomographyScale};
use numeric::{normalized_residual, DenseSpace, NumPoly};
pub use sylvester::sylvester_fef;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("expected {expected} correspondences, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("pivot {pivot:e} in column {column} below threshold (norm {norm:e})")]
    Conditioning { column: usize, pivot: f64, norm: f64 },
    #[error("eigen-decomposition failed")]
    Eigen,
    #[error("extraction formula is singular")]
    ExtractionSingular,
    #[error("solution is not geometrically valid")]
    InvalidSolution,
    #[error("resultant leading coefficient vanishes after retries")]
    ResultantDegenerate,
    #[error("template is for {found}, expected {expected}")]
    WrongTemplate { found: ProblemId, expected: ProblemId },
    #[error("non-finite coordinates")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub left: [f64; 2],
    pub right: [f64; 2],
}

impl Correspondence {
    pub fn new(left: [f64; 2], right: [f64; 2]) -> Self {
        Correspondence { left, right }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Max normalized epipolar (or transfer) residual over the input.
    pub epipolar: f64,
    /// Max normalized residual of the instantiated generators.
    pub generator: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseSolution {
    /// Row-major, unit Frobenius norm.
    pub matrix: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub focal: Option<f64>,
    pub lambda: Option<f64>,
    pub w: Option<f64>,
    pub residuals: Residuals,
}

impl PoseSolution {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cols + j]
    }

    pub fn f3(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.entry(i, j)))
    }
}

#[derive(Clone, Debug)]
pub struct NullspaceParam {
    /// Measurement matrix, one (unit-norm) row per equation.
    pub m: DMatrix<f64>,
    /// Orthonormal null-space basis; the last vector is the chart constant.
    pub basis: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub polish: bool,
    /// Reported solutions must satisfy the instantiated generators to this.
    pub residual_tol: f64,
    pub imag_tol: f64,
    pub pivot_tol: f64,
    /// Relative singular value below which the measurements are rank deficient.
    pub rank_tol: f64,
    /// A chart whose roots leave a larger generator residual triggers another chart.
    pub chart_residual: f64,
    /// So does a relative eigenvalue gap below this.
    pub chart_separation: f64,
    pub max_charts: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { polish: false, residual_tol: 1e-6, imag_tol: 1e-6, pivot_tol: 1e-12, rank_tol: 1e-10, chart_residual: 1e-9, chart_separation: 1e-5, max_charts: 4 }
    }
}

/// Number of correspondences a minimal instance takes.
pub fn required_correspondences(id: ProblemId) -> usize {
    match id {
        ProblemId::Fef | ProblemId::Ef => 6,
        ProblemId::Efk => 7,
        ProblemId::Hf => 4,
    }
}

fn measurement_rows(id: ProblemId, corr: &[Correspondence]) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for (i, c) in corr.iter().enumerate() {
        let x = [c.left[0], c.left[1], 1.0];
        match id {
            ProblemId::Fef | ProblemId::Ef | ProblemId::Efk => {
                let mut xr = vec![c.right[0], c.right[1], 1.0];
                let mut row = vec![0.0; if id == ProblemId::Efk { 12 } else { 9 }];
                for a in 0..3 {
                    for b in 0..3 {
                        row[3 * a + b] = x[a] * xr[b];
                    }
                }
                if id == ProblemId::Efk {
                    xr.push(c.right[0] * c.right[0] + c.right[1] * c.right[1]);
                    for a in 0..3 {
                        row[9 + a] = x[a] * xr[3];
                    }
                }
                rows.push(row);
            }
            ProblemId::Hf => {
                // q × (H p) = 0 with p the planar point and q its image
                let (u, v) = (c.right[0], c.right[1]);
                let mut r1 = vec![0.0; 9];
                let mut r2 = vec![0.0; 9];
                for k in 0..3 {
                    r1[6 + k] = v * x[k];
                    r1[3 + k] = -x[k];
                    r2[k] = x[k];
                    r2[6 + k] = -u * x[k];
                }
                rows.push(r1);
                // the last point contributes a single equation
                if i + 1 < corr.len() {
                    rows.push(r2);
                }
            }
        }
    }
    rows
}

/// Null space of the linear measurement equations.
pub fn nullspace_parametrize(id: ProblemId, corr: &[Correspondence]) -> Result<NullspaceParam, SolverError> {
    nullspace_with_tol(id, corr, SolveOptions::default().rank_tol)
}

fn nullspace_with_tol(id: ProblemId, corr: &[Correspondence], rank_tol: f64) -> Result<NullspaceParam, SolverError> {
    let expected = required_correspondences(id);
    if corr.len() != expected {
        return Err(SolverError::WrongCount { expected, got: corr.len() });
    }
    if corr.iter().any(|c| c.left.iter().chain(&c.right).any(|v| !v.is_finite())) {
        return Err(SolverError::NonFinite);
    }
    let rows = measurement_rows(id, corr);
    let ncols = rows[0].len();
    let nrows = rows.len();
    let m = DMatrix::from_fn(nrows, ncols, |i, j| {
        let n: f64 = rows[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        rows[i][j] / n
    });
    // pad to square so the SVD returns a full right basis
    let mut sq = DMatrix::zeros(ncols, ncols);
    sq.view_mut((0, 0), (nrows, ncols)).copy_from(&m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.ok_or(SolverError::Eigen)?;
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    if !(sv[nrows - 1] > rank_tol * sv[0]) {
        return Err(SolverError::Degenerate(format!(
            "measurement matrix has rank below {nrows} (σ_min/σ_max = {:e})",
            sv[nrows - 1] / sv[0]
        )));
    }
    let basis = order[nrows..].iter().map(|&k| vt.row(k).iter().copied().collect()).collect();
    Ok(NullspaceParam { m, basis, singular_values: sv })
}

/// Solver for one problem with a fixed template; cheap to share across threads.
#[derive(Debug)]
pub struct Solver {
    pub id: ProblemId,
    pub template: SolverTemplate,
    gens: Vec<NumPoly>,
    space: DenseSpace,
}

impl Solver {
    pub fn new(id: ProblemId, template: SolverTemplate) -> Result<Self, SolverError> {
        if template.problem != id {
            return Err(SolverError::WrongTemplate { found: template.problem, expected: id });
        }
        let golden = golden_generators(id);
        let gens: Vec<NumPoly> = golden.iter().map(NumPoly::from_poly).collect();
        let max_degree = gens.iter().map(|g| g.degree()).max().unwrap_or(0);
        let space = DenseSpace::new(param_vars(id).len(), max_degree);
        Ok(Solver { id, template, gens, space })
    }

    /// Solver with the bundled template (built once per process).
    pub fn bundled(id: ProblemId) -> &'static Solver {
        static CACHE: OnceLock<Vec<Solver>> = OnceLock::new();
        let all = CACHE.get_or_init(|| ProblemId::ALL.iter().map(|&p| Solver::new(p, bundled(p)).expect("bundled")).collect());
        &all[ProblemId::ALL.iter().position(|&p| p == id).unwrap()]
    }

    /// Generators instantiated on `X_L = Σ y_i·basis_i + basis_last`.
    pub fn instantiate(&self, basis: &[Vec<f64>]) -> Vec<Vec<(Monomial, f64)>> {
        let k = basis.len() - 1;
        let forms: Vec<Vec<f64>> = (0..basis[0].len())
            .map(|j| (0..=k).map(|i| basis[i][j]).collect())
            .collect();
        self.gens.iter().map(|g| self.space.to_terms(&self.space.substitute(g, &forms))).collect()
    }

    /// Real parameter solutions of an instantiated system.
    pub fn solve_parameters(&self, gens: &[Vec<(Monomial, f64)>], opts: &SolveOptions) -> Result<Vec<Vec<f64>>, SolverError> {
        self.solve_parameters_with_quality(gens, opts).map(|(s, _)| s)
    }

    /// Solutions plus the relative separation of the action eigenvalues
    /// (for Hf, of the quartic's roots).
    pub fn solve_parameters_with_quality(&self, gens: &[Vec<(Monomial, f64)>], opts: &SolveOptions) -> Result<(Vec<Vec<f64>>, f64), SolverError> {
        if self.id == ProblemId::Hf {
            let mut coeffs = vec![0.0; 5];
            for (m, c) in &gens[0] {
                coeffs[m.exponent(0) as usize] += c;
            }
            let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
            if !(coeffs[4].abs() > 1e-10 * scale) {
                return Err(SolverError::Degenerate("quartic leading coefficient vanishes in this chart".into()));
            }
            let roots: Vec<Vec<f64>> = polynomial_roots(&coeffs, opts.imag_tol).into_iter().map(|r| vec![r]).collect();
            return Ok((roots, f64::INFINITY));
        }
        let filled = self.template.fill(gens);
        let m = action_matrix(&filled, &self.template, opts.pivot_tol)?;
        let separation = action::eigenvalue_separation(&m);
        Ok((action::eigensolve_action_matrix(&m, &self.template, opts.imag_tol)?, separation))
    }

    /// Solve one minimal instance.
    pub fn solve(&self, corr: &[Correspondence], opts: &SolveOptions) -> Result<Vec<PoseSolution>, SolverError> {
        let mut out = Vec::new();
        for (v, generator) in self.solve_xl(corr, opts)? {
            if let Ok(mut s) = self.assemble(&v) {
                s.residuals = Residuals { epipolar: epipolar_residual(self.id, &s, corr), generator };
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Real solutions as unit `X_L` vectors with their generator residuals,
    /// before any extraction or feasibility filtering.
    ///
    /// The null-space basis fixes an affine chart. When the roots it yields
    /// leave a noticeable generator residual, when action eigenvalues nearly
    /// coincide, or when every solution sits near the chart's hyperplane at
    /// infinity, a few deterministic random charts are tried and the best one
    /// is kept.
    pub fn solve_xl(&self, corr: &[Correspondence], opts: &SolveOptions) -> Result<Vec<(Vec<f64>, f64)>, SolverError> {
        let param = nullspace_with_tol(self.id, corr, opts.rank_tol)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0xc4a7);
        let mut last_err = None;
        let mut best: Option<(f64, Vec<Vec<f64>>, Vec<Vec<(Monomial, f64)>>, Vec<Vec<f64>>)> = None;
        for attempt in 0..opts.max_charts.max(1) {
            let basis = if attempt == 0 { param.basis.clone() } else { random_chart(&param.basis, &mut rng) };
            let gens = self.instantiate(&basis);
            let (sols, separation) = match self.solve_parameters_with_quality(&gens, opts) {
                Ok(s) => s,
                Err(e @ (SolverError::Conditioning { .. } | SolverError::Eigen | SolverError::Degenerate(_))) => {
                    last_err = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let at_infinity = !sols.is_empty()
                && sols.iter().all(|y| 1.0 / (1.0 + y.iter().map(|t| t * t).sum::<f64>()).sqrt() < 1e-8);
            if at_infinity {
                last_err = Some(SolverError::Degenerate("all solutions at the chart boundary".into()));
                continue;
            }
            // worst generator residual over the real roots measures this chart's accuracy
            let score = sols
                .iter()
                .map(|y| gens.iter().map(|g| normalized_residual(g, y)).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            let badness = (score / opts.chart_residual).max(opts.chart_separation / separation);
            if best.as_ref().is_none_or(|b| badness < b.0) {
                best = Some((badness, basis, gens, sols));
            }
            if badness <= 1.0 {
                break;
            }
        }
        let Some((_, basis, gens, sols)) = best else {
            return Err(last_err.unwrap_or(SolverError::Eigen));
        };
        let k = basis.len();
        let mut out = Vec::new();
        for mut y in sols {
            if opts.polish {
                numeric::polish(&gens, &mut y, 3);
            }
            let generator = gens.iter().map(|g| normalized_residual(g, &y)).fold(0.0, f64::max);
            if !(generator <= opts.residual_tol) {
                continue;
            }
            let mut v = basis[k - 1].clone();
            for (i, yi) in y.iter().enumerate() {
                for (vj, bj) in v.iter_mut().zip(&basis[i]) {
                    *vj += yi * bj;
                }
            }
            let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            v.iter_mut().for_each(|t| *t /= n);
            out.push((v, generator));
        }
        Ok(out)
    }

    fn assemble(&self, v: &[f64]) -> Result<PoseSolution, SolverError> {
        let f3 = |v: &[f64]| -> [[f64; 3]; 3] { std::array::from_fn(|i| std::array::from_fn(|j| v[3 * i + j])) };
        match self.id {
            ProblemId::Fef | ProblemId::Ef => {
                let f = f3(v);
                let f2 = if self.id == ProblemId::Fef { extract_focal_fef(&f)? } else { extract_focal_ef(&f)? };
                let focal = extract::focal_from_squared(f2)?;
                Ok(PoseSolution { matrix: v.to_vec(), rows: 3, cols: 3, focal: Some(focal), lambda: None, w: None, residuals: Residuals::default() })
            }
            ProblemId::Efk => {
                let fh: [[f64; 4]; 3] = std::array::from_fn(|i| [v[3 * i], v[3 * i + 1], v[3 * i + 2], v[9 + i]]);
                let lambda = extract_distortion(&fh)?;
                let focal = extract::focal_from_squared(extract_focal_ef(&f3(v))?)?;
                let matrix = fh.iter().flatten().copied().collect();
                Ok(PoseSolution { matrix, rows: 3, cols: 4, focal: Some(focal), lambda: Some(lambda), w: None, residuals: Residuals::default() })
            }
            ProblemId::Hf => {
                let h: [f64; 9] = std::array::from_fn(|i| v[i]);
                let ext = extend_homography(&h)?;
                if !ext.feasible {
                    return Err(SolverError::InvalidSolution);
                }
                Ok(PoseSolution { matrix: v.to_vec(), rows: 3, cols: 3, focal: Some(1.0 / ext.w), lambda: None, w: Some(ext.w), residuals: Residuals::default() })
            }
        }
    }
}

/// Mix the null-space basis with a random rotation (a different affine chart).
fn random_chart(basis: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let k = basis.len();
    let g = DMatrix::<f64>::from_fn(k, k, |_, _| StandardNormal.sample(rng));
    let q = g.qr().q();
    (0..k)
        .map(|c| {
            let mut v = vec![0.0; basis[0].len()];
            for (r, b) in basis.iter().enumerate() {
                for (vj, bj) in v.iter_mut().zip(b) {
                    *vj += q[(r, c)] * bj;
                }
            }
            v
        })
        .collect()
}

/// Max normalized residual of the input constraints for a solution. For Hf
/// only the equations the solver imposes count: the last point's second
/// transfer equation is left free.
pub fn epipolar_residual(id: ProblemId, s: &PoseSolution, corr: &[Correspondence]) -> f64 {
    let mnorm = s.matrix.iter().map(|x| x * x).sum::<f64>().sqrt();
    corr.iter()
        .enumerate()
        .map(|(i, c)| {
            let x = DVector::from_vec(vec![c.left[0], c.left[1], 1.0]);
            match id {
                ProblemId::Hf => {
                    let h = DMatrix::from_row_slice(3, 3, &s.matrix);
                    let q = nalgebra::Vector3::new(c.right[0], c.right[1], 1.0);
                    let hp = &h * &x;
                    let hp = nalgebra::Vector3::new(hp[0], hp[1], hp[2]);
                    let cross = q.cross(&hp);
                    let r = if i + 1 == corr.len() { cross[0].abs() } else { cross.norm() };
                    r / (q.norm() * mnorm * x.norm())
                }
                _ => {
                    let mut xr = vec![c.right[0], c.right[1], 1.0];
                    if s.cols == 4 {
                        xr.push(c.right[0] * c.right[0] + c.right[1] * c.right[1]);
                    }
                    let xr = DVector::from_vec(xr);
                    let m = DMatrix::from_row_slice(3, s.cols, &s.matrix);
                    (x.transpose() * &m * &xr)[(0, 0)].abs() / (x.norm() * mnorm * xr.norm())
                }
            }
        })
        .fold(0.0, f64::max)
}

/// Solve a minimal instance with the given template.
pub fn solve_minimal(id: ProblemId, corr: &[Correspondence], template: &SolverTemplate) -> Result<Vec<PoseSolution>, SolverError> {
    if template == &Solver::bundled(id).template {
        return Solver::bundled(id).solve(corr, &SolveOptions::default());
    }
    Solver::new(id, template.clone())?.solve(corr, &SolveOptions::default())
}

/// The instantiated f+E+f cubic and quintic in `(x, y)` for a set of correspondences.
pub fn fef_instance(corr: &[Correspondence]) -> Result<(NullspaceParam, Vec<Vec<(Monomial, f64)>>), SolverError> {
    let param = nullspace_parametrize(ProblemId::Fef, corr)?;
    let gens = Solver::bundled(ProblemId::Fef).instantiate(&param.basis);
    Ok((param, gens))
}

/// Outcome of comparing the action-matrix and resultant paths on one f+E+f instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub action_count: usize,
    pub resultant_count: usize,
    /// Largest distance between matched unit `F` vectors (up to sign); infinite if counts differ.
    pub max_difference: f64,
}

impl CrossCheck {
    pub fn agrees(&self, tol: f64) -> bool {
        self.action_count == self.resultant_count && self.max_difference <= tol
    }
}

/// Solve an f+E+f instance by both paths and match the real solutions as `F` matrices.
pub fn fef_cross_check(corr: &[Correspondence], opts: &SolveOptions) -> Result<CrossCheck, SolverError> {
    let action: Vec<Vec<f64>> = Solver::bundled(ProblemId::Fef).solve_xl(corr, opts)?.into_iter().map(|(v, _)| v).collect();
    let (param, gens) = fef_instance(corr)?;
    let resultant: Vec<Vec<f64>> = sylvester_fef(&gens[0], &gens[1], opts.imag_tol)?
        .iter()
        .map(|&[x, y]| {
            let mut v: Vec<f64> = (0..9).map(|j| x * param.basis[0][j] + y * param.basis[1][j] + param.basis[2][j]).collect();
            let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            v.iter_mut().for_each(|t| *t /= n);
            v
        })
        .collect();
    let mut max_difference: f64 = 0.0;
    if action.len() != resultant.len() {
        max_difference = f64::INFINITY;
    } else {
        let mut used = vec![false; resultant.len()];
        for a in &action {
            let dist = |b: &Vec<f64>| {
                let d1: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                let d2: f64 = a.iter().zip(b).map(|(p, q)| (p + q).powi(2)).sum::<f64>().sqrt();
                d1.min(d2)
            };
            let best = (0..resultant.len()).filter(|&i| !used[i]).min_by(|&i, &j| dist(&resultant[i]).total_cmp(&dist(&resultant[j])));
            if let Some(i) = best {
                used[i] = true;
                max_difference = max_difference.max(dist(&resultant[i]));
            }
        }
    }
    Ok(CrossCheck { action_count: action.len(), resultant_count: resultant.len(), max_difference })
}
