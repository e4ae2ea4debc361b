use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Monomial, MonomialOrder, PolyError, MAX_VARS};

/// An ordered list of variable names; the ambient of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<String>,
}

impl Ring {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Arc<Ring> {
        assert!(vars.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            assert!(!vars[..i].contains(v), "duplicate variable {v}");
        }
        Arc::new(Ring { vars })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.vars[idx]
    }

    /// Same ring with one extra variable appended; the name is made unique.
    pub fn extended(&self, base_name: &str) -> (Arc<Ring>, usize) {
        let mut name = base_name.to_string();
        while self.vars.contains(&name) {
            name.push('_');
        }
        let mut vars = self.vars.clone();
        vars.push(name);
        let idx = vars.len() - 1;
        (Ring::new(&vars), idx)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Multivariate polynomial with exact rational coefficients.
///
/// Stored terms never carry a zero coefficient, so structural equality is
/// polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<Ring>, c: BigRational) -> Self {
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.nvars()), c);
        }
        p
    }

    pub fn from_int(ring: &Arc<Ring>, c: i64) -> Self {
        Poly::constant(ring, rat(c))
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Poly::from_int(ring, 1)
    }

    pub fn var(ring: &Arc<Ring>, idx: usize) -> Self {
        Poly::monomial(ring, Monomial::var(ring.nvars(), idx), BigRational::one())
    }

    /// Variable by name; panics on unknown names (use [`Poly::try_var`] for input data).
    pub fn named(ring: &Arc<Ring>, name: &str) -> Self {
        Self::try_var(ring, name).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_var(ring: &Arc<Ring>, name: &str) -> Result<Self, PolyError> {
        let idx = ring
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Poly::var(ring, idx))
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.nvars(), ring.nvars());
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I>(ring: &Arc<Ring>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Indices of variables occurring in some term.
    pub fn variables(&self) -> Vec<usize> {
        let mask = self.terms.keys().fold(0u32, |acc, m| acc | m.support_mask());
        (0..self.ring.nvars()).filter(|i| mask & (1 << i) != 0).collect()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.involves(var))
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        debug_assert_eq!(m.nvars(), self.ring.nvars());
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &Poly) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(PolyError::AmbientMismatch {
                left: self.ring.nvars(),
                right: other.ring.nvars(),
            })
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_ring(other)?;
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Poly { ring: self.ring.clone(), terms: acc })
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(&self.ring);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Terms sorted from greatest to least under `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(Monomial, BigRational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<Monomial> {
        self.terms.keys().copied().max_by(|a, b| order.cmp(a, b))
    }

    pub fn leading_coefficient(&self, order: &MonomialOrder) -> Option<BigRational> {
        self.leading_monomial(order).map(|m| self.terms[&m].clone())
    }

    /// Clear denominators, divide by the integer content, and make the leading
    /// coefficient positive under `order`. Zero maps to zero.
    pub fn normalized(&self, order: &MonomialOrder) -> Poly {
        let Some(lc) = self.leading_coefficient(order) else {
            return self.clone();
        };
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut content = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&den / c.denom());
            content = content.gcd(&n);
        }
        let mut factor = BigRational::new(den, content);
        if lc.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Is `self` a nonzero rational multiple of `other`?
    pub fn is_scalar_multiple_of(&self, other: &Poly) -> bool {
        if self.ring != other.ring || self.terms.len() != other.terms.len() {
            return false;
        }
        if self.is_zero() {
            return other.is_zero();
        }
        let (m0, c0) = self.terms.iter().next().unwrap();
        let Some(d0) = other.terms.get(m0) else { return false };
        let ratio = c0 / d0;
        self.terms
            .iter()
            .all(|(m, c)| other.terms.get(m).is_some_and(|d| &(d * &ratio) == c))
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.ring.nvars());
        let mut cache: Vec<Vec<BigRational>> = point.iter().map(|x| vec![BigRational::one(), x.clone()]).collect();
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut cache[v];
                while pw.len() <= e as usize {
                    let next = pw.last().unwrap() * &point[v];
                    pw.push(next);
                }
                t *= &pw[e as usize];
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.ring.nvars());
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (v, &e) in m.exponents().iter().enumerate() {
                    if e > 0 {
                        t *= point[v].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Sum of absolute values of the coefficients, as f64; used to normalize residuals.
    pub fn coefficient_norm1(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).sum()
    }

    /// Replace variable `i` by `images[i]` (all images over a common target ring).
    pub fn substitute(&self, images: &[Poly], target: &Arc<Ring>) -> Poly {
        assert_eq!(images.len(), self.ring.nvars());
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[v];
                while pw.len() <= e as usize {
                    let next = pw.last().unwrap() * &images[v];
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            }
            for (mm, cc) in t.terms {
                out.add_term(mm, cc);
            }
        }
        out
    }

    /// Substitute affine-linear forms for a subset of the variables.
    ///
    /// `assignment` maps variable names of `self`'s ring to polynomials over
    /// `target` of degree at most one. Variables not assigned keep their name and
    /// must exist in `target`; new variables must not collide with them.
    pub fn substitute_linear(
        &self,
        assignment: &BTreeMap<String, Poly>,
        target: &Arc<Ring>,
    ) -> Result<Poly, PolyError> {
        let used = self.variables();
        let mut images = Vec::with_capacity(self.ring.nvars());
        for v in 0..self.ring.nvars() {
            let name = self.ring.name(v);
            if let Some(img) = assignment.get(name) {
                if img.ring() != target {
                    return Err(PolyError::AmbientMismatch {
                        left: img.ring().nvars(),
                        right: target.nvars(),
                    });
                }
                if img.degree().unwrap_or(0) > 1 {
                    return Err(PolyError::NotLinear(name.to_string()));
                }
                images.push(img.clone());
            } else if used.contains(&v) {
                let idx = target
                    .index_of(name)
                    .ok_or_else(|| PolyError::Uncovered(name.to_string()))?;
                // a kept variable must not also be the target of a substitution image
                if assignment.values().any(|img| img.involves(idx)) {
                    return Err(PolyError::VariableClash(name.to_string()));
                }
                images.push(Poly::var(target, idx));
            } else {
                images.push(Poly::zero(target));
            }
        }
        Ok(self.substitute(&images, target))
    }

    /// Re-express over another ring that contains every occurring variable (matched by name).
    pub fn rename_into(&self, target: &Arc<Ring>) -> Result<Poly, PolyError> {
        let mut map = Vec::with_capacity(self.ring.nvars());
        let used = self.variables();
        for v in 0..self.ring.nvars() {
            match target.index_of(self.ring.name(v)) {
                Some(i) => map.push(i),
                None if !used.contains(&v) => map.push(usize::MAX),
                None => return Err(PolyError::UnknownVariable(self.ring.name(v).to_string())),
            }
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(target.nvars());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    nm = nm.with_exponent(map[v], nm.exponent(map[v]) + e as u32);
                }
            }
            out.add_term(nm, c.clone());
        }
        Ok(out)
    }

    /// Format in the canonical text form under `order` (see [`crate::polycore::text`]).
    pub fn to_text(&self, order: &MonomialOrder) -> String {
        super::text::format_poly(self, order)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = MonomialOrder::grevlex(self.ring.nvars());
        write!(f, "{}", self.to_text(&order))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomials over different rings")
            }
        }
        impl std::ops::$tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$checked(&rhs).expect("polynomials over different rings")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

impl std::ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

/// The arithmetic operations exposed through [`arith`].
#[derive(Clone, Debug)]
pub enum ArithOp<'a> {
    Add(&'a Poly),
    Sub(&'a Poly),
    Mul(&'a Poly),
    Scale(&'a BigRational),
}

pub fn arith(p: &Poly, op: ArithOp<'_>) -> Result<Poly, PolyError> {
    match op {
        ArithOp::Add(q) => p.checked_add(q),
        ArithOp::Sub(q) => p.checked_sub(q),
        ArithOp::Mul(q) => p.checked_mul(q),
        ArithOp::Scale(c) => Ok(p.scale(c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Arc<Ring> {
        Ring::new(&["x", "y", "z"])
    }

    #[test]
    fn identity_and_difference_of_squares() {
        let r = xyz();
        let x = Poly::named(&r, "x");
        let y = Poly::named(&r, "y");
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p, &x.pow(2) - &y.pow(2));
        assert_eq!(&p * &Poly::one(&r), p);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn ambient_mismatch() {
        let a = Poly::named(&xyz(), "x");
        let b = Poly::named(&Ring::new(&["x", "y"]), "x");
        assert!(matches!(a.checked_add(&b), Err(PolyError::AmbientMismatch { .. })));
        assert!(arith(&a, ArithOp::Mul(&b)).is_err());
    }

    #[test]
    fn normalization() {
        let r = xyz();
        let x = Poly::named(&r, "x");
        let y = Poly::named(&r, "y");
        let p = (&x.scale(&BigRational::new((-2).into(), 3.into())) + &y.scale(&rat(4))).scale(&rat(3));
        let n = p.normalized(&MonomialOrder::lex(3));
        assert_eq!(n, &x - &y.scale(&rat(6)));
        assert!(n.is_scalar_multiple_of(&p));
    }

    #[test]
    fn substitute_linear_identity_and_errors() {
        let r = xyz();
        let p = &Poly::named(&r, "x").pow(2) * &Poly::named(&r, "z") + Poly::named(&r, "y");
        let mut id = BTreeMap::new();
        for v in ["x", "y", "z"] {
            id.insert(v.to_string(), Poly::named(&r, v));
        }
        assert_eq!(p.substitute_linear(&id, &r).unwrap(), p);

        let t = Ring::new(&["a", "z"]);
        let mut partial = BTreeMap::new();
        partial.insert("x".to_string(), Poly::named(&t, "a"));
        assert!(matches!(p.substitute_linear(&partial, &t), Err(PolyError::Uncovered(v)) if v == "y"));

        let mut quad = BTreeMap::new();
        quad.insert("x".to_string(), Poly::named(&t, "a").pow(2));
        quad.insert("y".to_string(), Poly::named(&t, "a"));
        assert!(matches!(p.substitute_linear(&quad, &t), Err(PolyError::NotLinear(_))));
    }

    #[test]
    fn rename_drops_unused() {
        let r = xyz();
        let p = &Poly::named(&r, "x") * &Poly::named(&r, "z");
        let t = Ring::new(&["z", "x"]);
        let q = p.rename_into(&t).unwrap();
        assert_eq!(q, &Poly::named(&t, "x") * &Poly::named(&t, "z"));
        assert!(Poly::named(&r, "y").rename_into(&t).is_err());
    }
}
