//! Dense linear algebra over a prime field, used to explore template
//! structure quickly before the exact rational check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub const P: u64 = 2_147_483_647;

pub fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    a %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % P;
        }
        a = a * a % P;
        e >>= 1;
    }
    r
}

fn reduce_int(n: &BigInt) -> u64 {
    let p = BigInt::from(P);
    let r = n.mod_floor(&p);
    r.to_u64().expect("residue fits")
}

/// Image of a rational in Z/p, or `None` if the denominator vanishes.
pub fn from_rational(q: &BigRational) -> Option<u64> {
    let d = reduce_int(q.denom());
    if d == 0 {
        return None;
    }
    let n = if q.numer().is_negative() {
        (P - reduce_int(&-q.numer())) % P
    } else {
        reduce_int(q.numer())
    };
    Some(n * inv(d) % P)
}

#[derive(Clone, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            m.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        m
    }

    /// Reduce to row echelon form in place (left to right); returns pivot columns.
    /// With `full` the result is fully reduced (RREF).
    pub fn echelon(&mut self, full: bool) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..cols {
                    self.data.swap(pr * cols + k, r * cols + k);
                }
            }
            let iv = inv(self.get(r, c));
            for k in c..cols {
                let v = self.get(r, k);
                self.set(r, k, v * iv % P);
            }
            let start = if full { 0 } else { r + 1 };
            for i in start..rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                for k in c..cols {
                    let sub = f * self.get(r, k) % P;
                    let v = self.get(i, k);
                    self.set(i, k, (v + P - sub) % P);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon(false).len()
    }
}

/// Indices of a maximal linearly independent subset of rows, scanning in order.
pub fn independent_rows(m: &Matrix) -> Vec<usize> {
    let cols = m.cols;
    // echelon basis kept as (pivot column, normalized row)
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut keep = Vec::new();
    for i in 0..m.rows {
        let mut v = m.row(i).to_vec();
        for (pc, b) in &basis {
            let f = v[*pc];
            if f != 0 {
                for k in 0..cols {
                    v[k] = (v[k] + P - f * b[k] % P) % P;
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let iv = inv(v[pc]);
            for x in v.iter_mut() {
                *x = *x * iv % P;
            }
            // keep earlier basis rows reduced at the new pivot
            for (_, b) in basis.iter_mut() {
                let f = b[pc];
                if f != 0 {
                    for k in 0..cols {
                        b[k] = (b[k] + P - f * v[k] % P) % P;
                    }
                }
            }
            basis.push((pc, v));
            keep.push(i);
        }
    }
    keep
}

pub fn is_zero_mod_p(q: &BigRational) -> bool {
    q.is_zero() || from_rational(q) == Some(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_rationals() {
        assert_eq!(3 * inv(3) % P, 1);
        let h = from_rational(&BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(h * 2 % P, 1);
        let m = from_rational(&BigRational::new((-1).into(), 1.into())).unwrap();
        assert_eq!(m, P - 1);
        assert_eq!(from_rational(&BigRational::new(1.into(), BigInt::from(P))), None);
    }

    #[test]
    fn rank_and_independence() {
        let mut m = Matrix::zeros(3, 3);
        for (i, v) in [[1, 2, 3], [2, 4, 6], [0, 1, 1]].iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                m.set(i, j, *x);
            }
        }
        assert_eq!(m.rank(), 2);
        assert_eq!(independent_rows(&m), vec![0, 2]);
    }
}
