//! Exact rational instances and the exact closure check.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::{coefficient_lists, param_ring, param_vars, SolverTemplate};
use crate::elimderive::{golden_generators, ProblemId};
use crate::polycore::{Monomial, Poly};

/// Basis of the right null space of `rows` (each of length `ncols`), from the
/// reduced row echelon form: one vector per free column.
pub fn exact_nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); ncols];
            v[fc] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][fc].clone();
            }
            v
        })
        .collect()
}

/// In-place reduced row echelon form over Q (columns scanned left to right); returns pivot columns.
pub fn rref(m: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(pr, r);
        let iv = BigRational::one() / &m[r][c];
        for k in c..ncols {
            if !m[r][k].is_zero() {
                m[r][k] = &m[r][k] * &iv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for k in c..ncols {
                if !pivot_row[k].is_zero() {
                    row[k] = &row[k] - &f * &pivot_row[k];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Generators instantiated on a random exact linear parametrization: a random
/// integer measurement matrix, its exact null space, and `X_L = Σ y_i·N_i + N_last`.
pub fn random_exact_system<R: Rng + ?Sized>(id: ProblemId, rng: &mut R) -> Vec<Poly> {
    let xl = id.x_l();
    let ncols = xl.len();
    let m: Vec<Vec<BigRational>> = (0..id.measurements())
        .map(|_| (0..ncols).map(|_| BigRational::from_integer(BigInt::from(rng.random_range(-9i64..=9)))).collect())
        .collect();
    let null = exact_nullspace(&m, ncols);
    let target = param_ring(id);
    let params = param_vars(id);
    assert_eq!(null.len(), params.len() + 1, "unexpected null space dimension");
    let mut assignment = BTreeMap::new();
    for (j, name) in xl.iter().enumerate() {
        let mut img = Poly::constant(&target, null[params.len()][j].clone());
        for (i, p) in params.iter().enumerate() {
            img = &img + &Poly::named(&target, p).scale(&null[i][j]);
        }
        assignment.insert(name.to_string(), img);
    }
    golden_generators(id)
        .iter()
        .map(|g| g.substitute_linear(&assignment, &target).expect("assignment covers X_L"))
        .filter(|g| !g.is_zero())
        .collect()
}

/// Exact closure check of `t` on `system`; returns the action matrix
/// (row `j` expresses `action·b_j` in the basis).
pub fn check_closure(t: &SolverTemplate, system: &[Poly]) -> Result<Vec<Vec<BigRational>>, String> {
    let gens = coefficient_lists(system);
    if gens.len() <= t.multipliers.iter().map(|m| m.generator).max().unwrap_or(0) {
        return Err("instance has fewer generators than the template uses".into());
    }
    let cols = t.column_monomials();
    let ne = t.n_excess;
    let nr = t.n_reducible;
    let basis_start = ne + nr;

    // 1. with every occurring monomial as a column, reducible columns must be pivots
    let known: BTreeSet<Monomial> = cols.iter().copied().collect();
    let mut dropped: BTreeSet<Monomial> = BTreeSet::new();
    for mult in &t.multipliers {
        let m = Monomial::from_exponents(&mult.monomial);
        for (tm, _) in &gens[mult.generator] {
            let p = tm.mul(&m);
            if !known.contains(&p) {
                dropped.insert(p);
            }
        }
    }
    let mut full_cols: Vec<Monomial> = dropped.iter().copied().collect();
    full_cols.extend(cols.iter().copied());
    let index: HashMap<Monomial, usize> = full_cols.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut full: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); full_cols.len()]; t.rows];
    for (r, mult) in t.multipliers.iter().enumerate() {
        let m = Monomial::from_exponents(&mult.monomial);
        for (tm, c) in &gens[mult.generator] {
            full[r][index[&tm.mul(&m)]] = c.clone();
        }
    }
    let off = dropped.len();
    let pivots = rref(&mut full, full_cols.len());
    for k in 0..nr {
        if !pivots.contains(&(off + ne + k)) {
            return Err(format!("reducible column {k} is not eliminated"));
        }
    }

    // 2. the template's own square block is nonsingular; read the action matrix
    let mut own: Vec<Vec<BigRational>> = t.fill(&gens).chunks(t.cols).map(|c| c.to_vec()).collect();
    let pivots = rref(&mut own, t.cols);
    if pivots.len() != t.rows || pivots.iter().any(|&c| c >= basis_start) {
        return Err("eliminated block is singular".into());
    }
    let nb = t.basis_len();
    let row_of: HashMap<usize, usize> = pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let action = t
        .action_targets()
        .iter()
        .map(|target| match *target {
            Ok(i) => (0..nb).map(|j| if j == i { BigRational::one() } else { BigRational::zero() }).collect(),
            Err(k) => {
                let r = row_of[&(ne + k)];
                (0..nb).map(|j| -own[r][basis_start + j].clone()).collect()
            }
        })
        .collect();
    Ok(action)
}

/// Are the action eigenvalues on `system` pairwise distinct?
pub fn action_values_distinct(t: &SolverTemplate, system: &[Poly]) -> bool {
    let Ok(a) = check_closure(t, system) else {
        return false;
    };
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j].to_f64().unwrap_or(f64::NAN));
    let ev = m.complex_eigenvalues();
    let scale = 1.0 + ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            if (ev[i] - ev[j]).norm() < 1e-8 * scale {
                return false;
            }
        }
    }
    true
}
