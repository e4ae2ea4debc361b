//! Small dense matrices of polynomials.

use std::sync::Arc;

use crate::polycore::{Poly, Ring};

pub type PMat3 = [[Poly; 3]; 3];

pub fn from_names(ring: &Arc<Ring>, names: [[&str; 3]; 3]) -> PMat3 {
    names.map(|row| row.map(|n| Poly::named(ring, n)))
}

/// `diag(1, 1, w)`.
pub fn q_diag(ring: &Arc<Ring>, w: &Poly) -> PMat3 {
    let z = || Poly::zero(ring);
    let o = || Poly::one(ring);
    [[o(), z(), z()], [z(), o(), z()], [z(), z(), w.clone()]]
}

pub fn mul(a: &PMat3, b: &PMat3) -> PMat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = &a[i][0] * &b[0][j];
            s = &s + &(&a[i][1] * &b[1][j]);
            &s + &(&a[i][2] * &b[2][j])
        })
    })
}

pub fn transpose(a: &PMat3) -> PMat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn trace(a: &PMat3) -> Poly {
    &(&a[0][0] + &a[1][1]) + &a[2][2]
}

pub fn det(a: &PMat3) -> Poly {
    let m = |i: usize, j: usize, k: usize, l: usize| &(&a[i][k] * &a[j][l]) - &(&a[i][l] * &a[j][k]);
    let t0 = &a[0][0] * &m(1, 2, 1, 2);
    let t1 = &a[0][1] * &m(1, 2, 0, 2);
    let t2 = &a[0][2] * &m(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}

/// `2·A·B − tr(C)·D`, flattened row-major.
pub fn trace_combination(abd: &PMat3, c: &PMat3, d: &PMat3) -> Vec<Poly> {
    let tr = trace(c);
    let two = Poly::from_int(tr.ring(), 2);
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            out.push(&(&two * &abd[i][j]) - &(&tr * &d[i][j]));
        }
    }
    out
}

/// Determinant of the 3×3 submatrix of a 3×n matrix given by `cols`.
pub fn minor(cols3: [&[Poly; 3]; 3]) -> Poly {
    let a: PMat3 = std::array::from_fn(|i| std::array::from_fn(|j| cols3[j][i].clone()));
    det(&a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::parse_poly;

    #[test]
    fn det_of_symbolic_matrix_has_six_terms() {
        let r = Ring::new(&["a", "b", "c", "d", "e", "f", "g", "h", "i"]);
        let m = from_names(&r, [["a", "b", "c"], ["d", "e", "f"], ["g", "h", "i"]]);
        let d = det(&m);
        assert_eq!(d, parse_poly("a*e*i - a*f*h - b*d*i + b*f*g + c*d*h - c*e*g", &r).unwrap());
        assert_eq!(det(&transpose(&m)), d);
        assert_eq!(trace(&m), parse_poly("a + e + i", &r).unwrap());
    }

    #[test]
    fn product_is_associative() {
        let r = Ring::new(&["a", "b", "c", "d", "e", "f", "g", "h", "i"]);
        let m = from_names(&r, [["a", "b", "c"], ["d", "e", "f"], ["g", "h", "i"]]);
        let t = transpose(&m);
        assert_eq!(mul(&mul(&m, &t), &m), mul(&m, &mul(&t, &m)));
    }
}
