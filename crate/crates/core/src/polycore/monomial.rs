use std::fmt;

/// Maximum number of variables in any ambient ring handled by the crate.
///
/// The largest problem ring has 14 unknowns; saturation adjoins one more.
pub const MAX_VARS: usize = 16;

/// A power product `x_0^e_0 * ... * x_{n-1}^e_{n-1}` over an ambient of `n` variables.
///
/// Exponents are stored densely. The derived `Ord` is lexicographic on the
/// exponent vector (variable 0 greatest); it is only used as a canonical key,
/// algorithmic code goes through [`MonomialOrder`](super::MonomialOrder).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: [u8; MAX_VARS],
    nvars: u8,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables supported");
        Monomial { exps: [0; MAX_VARS], nvars: nvars as u8 }
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut m = Monomial::one(exps.len());
        for (slot, &e) in m.exps.iter_mut().zip(exps) {
            *slot = u8::try_from(e).expect("exponent overflow");
        }
        m
    }

    /// The monomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.exps[var] = 1;
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps[..self.nvars as usize]
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.exps[var] as u32
    }

    pub fn degree(&self) -> u32 {
        self.exponents().iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exponents().iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = *self;
        for i in 0..self.nvars as usize {
            out.exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        out
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        (0..self.nvars as usize).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut out = *other;
        for i in 0..self.nvars as usize {
            out.exps[i] -= self.exps[i];
        }
        Some(out)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for i in 0..self.nvars as usize {
            out.exps[i] = self.exps[i].max(other.exps[i]);
        }
        out
    }

    pub fn gcd_is_one(&self, other: &Monomial) -> bool {
        (0..self.nvars as usize).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }

    /// Bit `i` is set when variable `i` occurs.
    pub fn support_mask(&self) -> u32 {
        let mut mask = 0u32;
        for i in 0..self.nvars as usize {
            if self.exps[i] > 0 {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub fn involves(&self, var: usize) -> bool {
        self.exps[var] > 0
    }

    /// Re-embed into an ambient of `nvars` variables; `map[i]` is the new index of variable `i`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Monomial {
        let mut out = Monomial::one(nvars);
        for (i, &e) in self.exponents().iter().enumerate() {
            if e > 0 {
                out.exps[map[i]] += e;
            }
        }
        out
    }

    pub fn with_exponent(&self, var: usize, e: u32) -> Monomial {
        let mut out = *self;
        out.exps[var] = u8::try_from(e).expect("exponent overflow");
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents())
    }
}

/// All monomials in `nvars` variables of total degree exactly `degree`.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(var: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == cur.len() {
            cur[var] = left;
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e;
            rec(var + 1, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    let mut cur = vec![0; nvars];
    rec(0, degree, &mut cur, &mut out);
    out
}

/// All monomials in `nvars` variables of total degree at most `degree`.
pub fn monomials_up_to_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    (0..=degree)
        .flat_map(|d| monomials_of_degree(nvars, d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = Monomial::from_exponents(&[1, 2, 0]);
        let b = Monomial::from_exponents(&[0, 1, 3]);
        assert_eq!(a.mul(&b).exponents(), &[1, 3, 3]);
        assert_eq!(a.lcm(&b).exponents(), &[1, 2, 3]);
        assert_eq!(a.degree(), 3);
        assert!(Monomial::from_exponents(&[0, 1, 0]).divides(&a));
        assert!(!b.divides(&a));
        assert_eq!(
            Monomial::from_exponents(&[1, 0, 0]).quotient_of(&a).unwrap().exponents(),
            &[0, 2, 0]
        );
        assert!(!a.gcd_is_one(&b));
        assert_eq!(a.support_mask(), 0b011);
    }

    #[test]
    fn enumeration_counts() {
        // C(n+d-1, d)
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(4, 3).len(), 20);
        assert_eq!(monomials_up_to_degree(2, 3).len(), 10);
        assert_eq!(monomials_up_to_degree(4, 8).len(), 495);
    }
}
