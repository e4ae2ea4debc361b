//! Elimination templates for the action-matrix solvers, and quotient bases
//! that certify solution counts.
//!
//! A template is a list of (generator, multiplier monomial) rows over the
//! parametrization variables (`x, y` for f+E+f and E+f, `x1..x4` for E+f+k).
//! Columns are ordered excess | reducible | basis, each block grevlex
//! descending. Filling the rows from an instance and eliminating the first
//! two blocks expresses every reducible monomial — `action · basis` outside
//! the basis — in terms of the basis.

pub mod exact;
pub mod modp;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elimderive::{golden_generators, ProblemId};
use crate::groebner::{buchberger, GroebnerConfig, GroebnerError};
use crate::polycore::{Monomial, MonomialOrder, Poly, Ring};

pub use exact::{exact_nullspace, random_exact_system};

pub const TEMPLATE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("quotient basis has {got} monomials, expected {expected} (after {attempts} attempts)")]
    CountMismatch { expected: usize, got: usize, attempts: usize },
    #[error("closure not achieved up to degree {reached}")]
    ClosureFailed { reached: u32 },
    #[error("exact closure check failed on validation instance {instance}: {reason}")]
    Validation { instance: usize, reason: String },
    #[error("no action variable has distinct values on the sample instance")]
    ActionDegenerate,
    #[error("template version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("malformed template: {0}")]
    Malformed(String),
    #[error("template is for {found}, expected {expected}")]
    WrongProblem { found: ProblemId, expected: ProblemId },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// Variables of the linear parametrization for a problem.
pub fn param_vars(id: ProblemId) -> Vec<&'static str> {
    match id {
        ProblemId::Fef | ProblemId::Ef => vec!["x", "y"],
        ProblemId::Efk => vec!["x1", "x2", "x3", "x4"],
        ProblemId::Hf => vec!["y1"],
    }
}

pub fn param_ring(id: ProblemId) -> Arc<Ring> {
    Ring::new(&param_vars(id))
}

/// Default upper bound on the total degree of template rows.
pub fn default_degree_cap(id: ProblemId) -> u32 {
    match id {
        ProblemId::Fef => 7,
        ProblemId::Ef => 6,
        ProblemId::Efk => 8,
        ProblemId::Hf => 4,
    }
}

/// Standard monomials of a random exact instance under grevlex, sorted
/// descending. Retries with fresh instances when the count is off.
pub fn quotient_basis(id: ProblemId, seed: u64) -> Result<Vec<Monomial>, TemplateError> {
    quotient_basis_with_system(id, seed).map(|(b, _)| b)
}

fn quotient_basis_with_system(id: ProblemId, seed: u64) -> Result<(Vec<Monomial>, Vec<Poly>), TemplateError> {
    const ATTEMPTS: usize = 5;
    let expected = id.solution_count();
    let mut got = 0;
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64 * 7919));
        let system = random_exact_system(id, &mut rng);
        let basis = standard_monomials(&system)?;
        got = basis.len();
        if got == expected {
            return Ok((basis, system));
        }
    }
    Err(TemplateError::CountMismatch { expected, got, attempts: ATTEMPTS })
}

/// Monomials outside the grevlex leading-term ideal of `system` (must be
/// zero-dimensional), grevlex descending.
pub fn standard_monomials(system: &[Poly]) -> Result<Vec<Monomial>, TemplateError> {
    let ring = system[0].ring().clone();
    let n = ring.nvars();
    let order = MonomialOrder::grevlex(n);
    let (gb, _) = buchberger(system, &order, &GroebnerConfig::default())?;
    let lms = gb.leading_monomials();
    // a pure power of every variable bounds the search
    let bound = (0..n)
        .map(|v| {
            lms.iter()
                .filter(|m| m.degree() == m.exponent(v))
                .map(|m| m.exponent(v))
                .min()
        })
        .collect::<Option<Vec<u32>>>();
    let Some(bound) = bound else {
        return Err(TemplateError::CountMismatch { expected: 0, got: usize::MAX, attempts: 1 });
    };
    let total: u32 = bound.iter().sum();
    let mut out: Vec<Monomial> = crate::polycore::monomials_up_to_degree(n, total)
        .into_iter()
        .filter(|m| (0..n).all(|v| m.exponent(v) < bound[v]))
        .filter(|m| !lms.iter().any(|l| l.divides(m)))
        .collect();
    out.sort_by(|a, b| order.cmp(b, a));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplier {
    pub generator: usize,
    pub monomial: Vec<u32>,
}

/// Offline-built elimination template.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverTemplate {
    pub version: u32,
    pub problem: ProblemId,
    pub variables: Vec<String>,
    pub action: String,
    pub degree: u32,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub multipliers: Vec<Multiplier>,
    /// Column monomials: `n_excess` excess, then `n_reducible` reducible, then the basis.
    pub monomials: Vec<Vec<u32>>,
    pub n_excess: usize,
    pub n_reducible: usize,
    pub basis: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct TemplateOptions {
    pub seed: u64,
    pub degree_cap: u32,
    /// Validation instances checked in exact arithmetic.
    pub validations: usize,
}

impl TemplateOptions {
    pub fn for_problem(id: ProblemId) -> Self {
        TemplateOptions { seed: 1, degree_cap: default_degree_cap(id), validations: 3 }
    }
}

fn to_mono(e: &[u32]) -> Monomial {
    Monomial::from_exponents(e)
}

fn to_exps(m: &Monomial) -> Vec<u32> {
    m.exponents().iter().map(|&e| e as u32).collect()
}

impl SolverTemplate {
    pub fn basis_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().map(|e| to_mono(e)).collect()
    }

    pub fn column_monomials(&self) -> Vec<Monomial> {
        self.monomials.iter().map(|e| to_mono(e)).collect()
    }

    pub fn action_index(&self) -> usize {
        self.variables.iter().position(|v| *v == self.action).expect("action is a variable")
    }

    /// Size of the quotient basis (the action matrix dimension).
    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    /// Square block to invert: excess and reducible columns.
    pub fn eliminated_cols(&self) -> usize {
        self.n_excess + self.n_reducible
    }

    /// Filled template (row-major). Monomials of an instance that are not
    /// template columns belong to excess columns dropped offline; they do not
    /// affect the reducible rows after elimination and are ignored.
    pub fn fill<T: Clone + num_traits::Zero>(&self, gens: &[Vec<(Monomial, T)>]) -> Vec<T> {
        let index: HashMap<Monomial, usize> = self.column_monomials().into_iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut out = vec![T::zero(); self.rows * self.cols];
        for (r, mult) in self.multipliers.iter().enumerate() {
            let m = to_mono(&mult.monomial);
            for (t, c) in &gens[mult.generator] {
                if let Some(&col) = index.get(&t.mul(&m)) {
                    out[r * self.cols + col] = c.clone();
                }
            }
        }
        out
    }

    /// Number of structurally non-zero entries of the filled template.
    pub fn nonzeros(&self, gens: &[Vec<(Monomial, f64)>]) -> usize {
        self.fill(gens).iter().filter(|x| **x != 0.0).count()
    }

    /// For each basis monomial `b`, where `action·b` lives: `Ok(i)` basis index or `Err(k)` reducible index.
    pub fn action_targets(&self) -> Vec<Result<usize, usize>> {
        let a = self.action_index();
        let basis = self.basis_monomials();
        let cols = self.column_monomials();
        let reducible = &cols[self.n_excess..self.n_excess + self.n_reducible];
        basis
            .iter()
            .map(|b| {
                let ab = b.mul(&Monomial::var(b.nvars(), a));
                match basis.iter().position(|x| *x == ab) {
                    Some(i) => Ok(i),
                    None => Err(reducible.iter().position(|x| *x == ab).expect("reducible column present")),
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("template serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, TemplateError> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| TemplateError::Malformed(e.to_string()))?;
        let version = v.get("version").and_then(|x| x.as_u64()).ok_or_else(|| TemplateError::Malformed("missing version".into()))?;
        if version != TEMPLATE_VERSION as u64 {
            return Err(TemplateError::Version { found: version as u32, expected: TEMPLATE_VERSION });
        }
        let t: SolverTemplate = serde_json::from_value(v).map_err(|e| TemplateError::Malformed(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<(), TemplateError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, TemplateError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<(), TemplateError> {
        let bad = |m: &str| Err(TemplateError::Malformed(m.to_string()));
        let n = self.variables.len();
        if self.rows != self.multipliers.len() {
            return bad("rows does not match multiplier count");
        }
        if self.cols != self.monomials.len() {
            return bad("cols does not match monomial count");
        }
        if self.n_excess + self.n_reducible + self.basis.len() != self.cols && self.rows > 0 {
            return bad("column blocks do not add up");
        }
        if self.rows > 0 && self.rows != self.eliminated_cols() {
            return bad("eliminated block is not square");
        }
        if self.rows > 0 && self.monomials[self.cols - self.basis.len()..] != self.basis[..] {
            return bad("basis columns must come last");
        }
        if !self.variables.contains(&self.action) {
            return bad("action is not a variable");
        }
        let gens = self.problem.solution_count();
        if self.basis.len() != gens {
            return bad("basis size differs from the solution count");
        }
        let ng = golden_generators(self.problem).len();
        for e in self.monomials.iter().chain(self.basis.iter()) {
            if e.len() != n {
                return bad("monomial arity mismatch");
            }
        }
        for m in &self.multipliers {
            if m.generator >= ng || m.monomial.len() != n {
                return bad("multiplier out of range");
            }
        }
        Ok(())
    }
}

const BUNDLED: [(&str, &str); 4] = [
    ("fef", include_str!("../../data/templates/fef.json")),
    ("ef", include_str!("../../data/templates/ef.json")),
    ("efk", include_str!("../../data/templates/efk.json")),
    ("hf", include_str!("../../data/templates/hf.json")),
];

/// Template shipped with the crate.
pub fn bundled(id: ProblemId) -> SolverTemplate {
    let text = BUNDLED.iter().find(|(n, _)| *n == id.name()).map(|(_, t)| *t).unwrap();
    SolverTemplate::from_json(text).expect("bundled template is valid")
}

/// Reference template sizes (rows, cols) reported in the literature.
pub fn reference_size(id: ProblemId) -> Option<(usize, usize)> {
    match id {
        ProblemId::Fef => Some((21, 36)),
        ProblemId::Ef => Some((6, 15)),
        ProblemId::Efk => Some((51, 70)),
        ProblemId::Hf => None,
    }
}

/// Build and validate a template.
pub fn build_template(id: ProblemId, opts: &TemplateOptions) -> Result<SolverTemplate, TemplateError> {
    let (basis, system) = quotient_basis_with_system(id, opts.seed)?;
    let vars: Vec<String> = param_vars(id).into_iter().map(String::from).collect();
    if id == ProblemId::Hf {
        return Ok(SolverTemplate {
            version: TEMPLATE_VERSION,
            problem: id,
            variables: vars.clone(),
            action: vars[0].clone(),
            degree: 4,
            seed: opts.seed,
            rows: 0,
            cols: 0,
            multipliers: vec![],
            monomials: vec![],
            n_excess: 0,
            n_reducible: 0,
            basis: basis.iter().map(to_exps).collect(),
        });
    }
    let n = vars.len();
    let mut last_err = TemplateError::ActionDegenerate;
    for a in 0..n {
        match build_for_action(id, &vars, a, &basis, &system, opts) {
            Ok(t) => {
                if exact::action_values_distinct(&t, &system) {
                    return Ok(t);
                }
                last_err = TemplateError::ActionDegenerate;
            }
            Err(e @ TemplateError::ClosureFailed { .. }) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

struct Candidate {
    mult: Multiplier,
    product_degree: u32,
}

fn build_for_action(
    id: ProblemId,
    vars: &[String],
    action: usize,
    basis: &[Monomial],
    system: &[Poly],
    opts: &TemplateOptions,
) -> Result<SolverTemplate, TemplateError> {
    let n = vars.len();
    let order = MonomialOrder::grevlex(n);
    let basis_set: BTreeSet<Monomial> = basis.iter().copied().collect();
    let mut reducible: Vec<Monomial> = basis
        .iter()
        .map(|b| b.mul(&Monomial::var(n, action)))
        .filter(|m| !basis_set.contains(m))
        .collect();
    reducible.sort_by(|a, b| order.cmp(b, a));
    reducible.dedup();
    let reducible_set: BTreeSet<Monomial> = reducible.iter().copied().collect();
    let gens_p: Vec<Vec<(Monomial, u64)>> = system
        .iter()
        .map(|g| {
            g.terms()
                .iter()
                .map(|(m, c)| (*m, modp::from_rational(c).expect("denominator invertible mod p")))
                .collect()
        })
        .collect();
    let gdeg: Vec<u32> = system.iter().map(|g| g.degree().unwrap_or(0)).collect();
    let min_degree = reducible.iter().map(|m| m.degree()).max().unwrap_or(0).max(*gdeg.iter().max().unwrap());

    for d in min_degree..=opts.degree_cap {
        let mut cands: Vec<Candidate> = Vec::new();
        for (gi, &gd) in gdeg.iter().enumerate() {
            if gd > d {
                continue;
            }
            for m in crate::polycore::monomials_up_to_degree(n, d - gd) {
                cands.push(Candidate { mult: Multiplier { generator: gi, monomial: to_exps(&m) }, product_degree: gd + m.degree() });
            }
        }
        cands.sort_by(|a, b| {
            a.product_degree
                .cmp(&b.product_degree)
                .then(a.mult.generator.cmp(&b.mult.generator))
                .then_with(|| order.cmp(&to_mono(&a.mult.monomial), &to_mono(&b.mult.monomial)))
        });
        let layout = Layout::new(&cands.iter().map(|c| c.mult.clone()).collect::<Vec<_>>(), &gens_p, basis, &reducible_set, &order);
        if !layout.closes(&(0..cands.len()).collect::<Vec<_>>()) {
            continue;
        }
        let kept = prune(&layout, cands.len());
        return Ok(finalize(id, vars, action, d, basis, &reducible, &layout, &kept, system, opts)?);
    }
    Err(TemplateError::ClosureFailed { reached: opts.degree_cap })
}

/// Matrix of all candidate rows over Z/p with columns excess | reducible | basis.
struct Layout {
    rows: Vec<Multiplier>,
    matrix: modp::Matrix,
    columns: Vec<Monomial>,
    n_excess: usize,
    n_reducible: usize,
}

impl Layout {
    fn new(
        rows: &[Multiplier],
        gens: &[Vec<(Monomial, u64)>],
        basis: &[Monomial],
        reducible: &BTreeSet<Monomial>,
        order: &MonomialOrder,
    ) -> Layout {
        let basis_set: BTreeSet<Monomial> = basis.iter().copied().collect();
        let mut excess: BTreeSet<Monomial> = BTreeSet::new();
        for r in rows {
            let m = to_mono(&r.monomial);
            for (t, _) in &gens[r.generator] {
                let p = t.mul(&m);
                if !basis_set.contains(&p) && !reducible.contains(&p) {
                    excess.insert(p);
                }
            }
        }
        let mut excess: Vec<Monomial> = excess.into_iter().collect();
        excess.sort_by(|a, b| order.cmp(b, a));
        let mut red: Vec<Monomial> = reducible.iter().copied().collect();
        red.sort_by(|a, b| order.cmp(b, a));
        let columns: Vec<Monomial> = excess.iter().chain(red.iter()).chain(basis.iter()).copied().collect();
        let index: HashMap<Monomial, usize> = columns.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut matrix = modp::Matrix::zeros(rows.len(), columns.len());
        for (i, r) in rows.iter().enumerate() {
            let m = to_mono(&r.monomial);
            for (t, c) in &gens[r.generator] {
                matrix.set(i, index[&t.mul(&m)], *c);
            }
        }
        Layout { rows: rows.to_vec(), matrix, columns, n_excess: excess.len(), n_reducible: red.len() }
    }

    fn closes(&self, rows: &[usize]) -> bool {
        let mut m = self.matrix.select_rows(rows);
        let pivots = m.echelon(false);
        let red = self.n_excess..self.n_excess + self.n_reducible;
        red.clone().all(|c| pivots.contains(&c))
    }
}

/// Drop dependent rows, then greedily drop rows (highest degree first) while closure holds.
fn prune(layout: &Layout, total: usize) -> Vec<usize> {
    let all: Vec<usize> = (0..total).collect();
    let mut kept: Vec<usize> = modp::independent_rows(&layout.matrix.select_rows(&all));
    let mut chunk = (kept.len() / 8).max(1);
    loop {
        let mut changed = false;
        let mut pos = kept.len();
        while pos > 0 {
            let start = pos.saturating_sub(chunk);
            let trial: Vec<usize> = kept[..start].iter().chain(kept[pos..].iter()).copied().collect();
            if layout.closes(&trial) {
                kept = trial;
                changed = true;
            }
            pos = start;
        }
        if chunk == 1 && !changed {
            break;
        }
        chunk = (chunk / 2).max(1);
    }
    kept
}

#[allow(clippy::too_many_arguments)]
fn finalize(
    id: ProblemId,
    vars: &[String],
    action: usize,
    degree: u32,
    basis: &[Monomial],
    reducible: &[Monomial],
    layout: &Layout,
    kept: &[usize],
    system: &[Poly],
    opts: &TemplateOptions,
) -> Result<SolverTemplate, TemplateError> {
    // keep only excess columns that carry a pivot
    let mut m = layout.matrix.select_rows(kept);
    let pivots = m.echelon(false);
    let excess: Vec<Monomial> = pivots
        .iter()
        .filter(|&&c| c < layout.n_excess)
        .map(|&c| layout.columns[c])
        .collect();
    let mut columns: Vec<Vec<u32>> = excess.iter().map(to_exps).collect();
    columns.extend(reducible.iter().map(to_exps));
    columns.extend(basis.iter().map(to_exps));
    let t = SolverTemplate {
        version: TEMPLATE_VERSION,
        problem: id,
        variables: vars.to_vec(),
        action: vars[action].clone(),
        degree,
        seed: opts.seed,
        rows: kept.len(),
        cols: columns.len(),
        multipliers: kept.iter().map(|&i| layout.rows[i].clone()).collect(),
        monomials: columns,
        n_excess: excess.len(),
        n_reducible: reducible.len(),
        basis: basis.iter().map(to_exps).collect(),
    };
    t.validate()?;
    exact::check_closure(&t, system).map_err(|reason| TemplateError::Validation { instance: 0, reason })?;
    for k in 0..opts.validations {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(31).wrapping_add(1000 + k as u64));
        let other = random_exact_system(id, &mut rng);
        exact::check_closure(&t, &other).map_err(|reason| TemplateError::Validation { instance: k + 1, reason })?;
    }
    Ok(t)
}

/// Exact coefficient lists of a system, in the shape [`SolverTemplate::fill`] expects.
pub fn coefficient_lists(system: &[Poly]) -> Vec<Vec<(Monomial, BigRational)>> {
    system.iter().map(|g| g.terms().iter().map(|(m, c)| (*m, c.clone())).collect()).collect()
}

#[cfg(test)]
mod tests;
