//! Dense floating-point polynomials in a few variables, used to instantiate
//! the derived generators on a null-space parametrization.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::polycore::{monomials_up_to_degree, Monomial, Poly};

/// Sparse numeric polynomial over a source ring: `(coefficient, [(var, exponent)])`.
#[derive(Clone, Debug)]
pub struct NumPoly {
    pub nvars: usize,
    pub terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl NumPoly {
    pub fn from_poly(p: &Poly) -> Self {
        let nvars = p.ring().nvars();
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let factors = (0..nvars).filter(|&v| m.exponent(v) > 0).map(|v| (v, m.exponent(v))).collect();
                (c.to_f64().unwrap_or(f64::NAN), factors)
            })
            .collect();
        NumPoly { nvars, terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, f)| f.iter().map(|(_, e)| e).sum()).max().unwrap_or(0)
    }

    /// Value and sum of absolute term values (the residual scale).
    pub fn eval_scaled(&self, x: &[f64]) -> (f64, f64) {
        let mut v = 0.0;
        let mut s = 0.0;
        for (c, f) in &self.terms {
            let t = c * f.iter().map(|&(i, e)| x[i].powi(e as i32)).product::<f64>();
            v += t;
            s += t.abs();
        }
        (v, s)
    }
}

/// Monomials in `n` variables up to a total degree, with a multiplication table.
#[derive(Debug)]
pub struct DenseSpace {
    pub n: usize,
    pub max_degree: u32,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// `up[i][v]`: index of `monomials[i] · x_v`, or `usize::MAX` past the degree bound.
    up: Vec<Vec<usize>>,
}

impl DenseSpace {
    pub fn new(n: usize, max_degree: u32) -> Self {
        let monomials = monomials_up_to_degree(n, max_degree);
        let index: HashMap<Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let up = monomials
            .iter()
            .map(|m| {
                (0..n)
                    .map(|v| index.get(&m.mul(&Monomial::var(n, v))).copied().unwrap_or(usize::MAX))
                    .collect()
            })
            .collect();
        DenseSpace { n, max_degree, monomials, index, up }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    fn one(&self) -> usize {
        self.index[&Monomial::one(self.n)]
    }

    /// `p · (Σ a_v x_v + c)` where `form = [a_0, .., a_{n-1}, c]`.
    fn mul_affine(&self, p: &[f64], form: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        let c = form[self.n];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            out[i] += pi * c;
            for v in 0..self.n {
                let a = form[v];
                if a != 0.0 {
                    let j = self.up[i][v];
                    debug_assert!(j != usize::MAX, "degree bound exceeded");
                    out[j] += pi * a;
                }
            }
        }
    }

    /// Substitute affine forms (one per source variable) into `p`.
    pub fn substitute(&self, p: &NumPoly, forms: &[Vec<f64>]) -> Vec<f64> {
        let mut total = vec![0.0; self.len()];
        let mut acc = vec![0.0; self.len()];
        let mut tmp = vec![0.0; self.len()];
        let one = self.one();
        for (c, factors) in &p.terms {
            acc.iter_mut().for_each(|x| *x = 0.0);
            acc[one] = *c;
            for &(v, e) in factors {
                for _ in 0..e {
                    self.mul_affine(&acc, &forms[v], &mut tmp);
                    std::mem::swap(&mut acc, &mut tmp);
                }
            }
            total.iter_mut().zip(&acc).for_each(|(t, a)| *t += a);
        }
        total
    }

    /// Nonzero entries as a coefficient list.
    pub fn to_terms(&self, dense: &[f64]) -> Vec<(Monomial, f64)> {
        dense
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| (self.monomials[i], *c))
            .collect()
    }
}

/// Value and residual scale of a coefficient list at a point.
pub fn eval_terms(terms: &[(Monomial, f64)], x: &[f64]) -> (f64, f64) {
    let mut v = 0.0;
    let mut s = 0.0;
    for (m, c) in terms {
        let t = c * (0..x.len()).map(|i| x[i].powi(m.exponent(i) as i32)).product::<f64>();
        v += t;
        s += t.abs();
    }
    (v, s)
}

/// Gradient of a coefficient list at a point.
pub fn gradient_terms(terms: &[(Monomial, f64)], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    for (m, c) in terms {
        for (k, gk) in g.iter_mut().enumerate() {
            let e = m.exponent(k);
            if e == 0 {
                continue;
            }
            let mut t = c * e as f64;
            for (i, xi) in x.iter().enumerate() {
                let ei = m.exponent(i) - u32::from(i == k);
                t *= xi.powi(ei as i32);
            }
            *gk += t;
        }
    }
    g
}

/// Normalized residual `|g(x)| / Σ|terms|` (0 when every term vanishes).
pub fn normalized_residual(terms: &[(Monomial, f64)], x: &[f64]) -> f64 {
    let (v, s) = eval_terms(terms, x);
    if s == 0.0 {
        0.0
    } else {
        v.abs() / s
    }
}

/// Gauss–Newton refinement of `x` on the system `gens` (a few iterations).
pub fn polish(gens: &[Vec<(Monomial, f64)>], x: &mut [f64], iterations: usize) {
    use nalgebra::{DMatrix, DVector};
    let n = x.len();
    for _ in 0..iterations {
        let r = DVector::from_iterator(gens.len(), gens.iter().map(|g| eval_terms(g, x).0));
        let j = DMatrix::from_fn(gens.len(), n, |i, k| gradient_terms(&gens[i], x)[k]);
        let Some(step) = j.svd(true, true).solve(&r, 1e-14).ok() else {
            return;
        };
        if step.iter().any(|s| !s.is_finite()) {
            return;
        }
        for k in 0..n {
            x[k] -= step[k];
        }
        if step.norm() <= 1e-15 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt()) {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_poly, Ring};

    #[test]
    fn affine_substitution() {
        let src = Ring::new(&["a", "b"]);
        let p = NumPoly::from_poly(&parse_poly("a^2*b - 3", &src).unwrap());
        let space = DenseSpace::new(2, 3);
        // a = x + 1, b = 2y
        let d = space.substitute(&p, &[vec![1.0, 0.0, 1.0], vec![0.0, 2.0, 0.0]]);
        for (x, y) in [(0.3, -1.2), (2.0, 0.5)] {
            let expect = (x + 1.0) * (x + 1.0) * 2.0 * y - 3.0;
            let (v, _) = eval_terms(&space.to_terms(&d), &[x, y]);
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_difference() {
        let space = DenseSpace::new(2, 3);
        let src = Ring::new(&["a", "b"]);
        let p = NumPoly::from_poly(&parse_poly("a^3 - 2*a*b^2 + b", &src).unwrap());
        let t = space.to_terms(&space.substitute(&p, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]));
        let x = [0.7, -0.4];
        let g = gradient_terms(&t, &x);
        let h = 1e-6;
        let fd = (eval_terms(&t, &[x[0] + h, x[1]]).0 - eval_terms(&t, &[x[0] - h, x[1]]).0) / (2.0 * h);
        assert!((g[0] - fd).abs() < 1e-6);
    }
}
