//! Internal polynomial representation used by the Gröbner engine: terms sorted
//! in descending order under a fixed monomial order, primitive integer
//! coefficients with positive leading coefficient.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::polycore::{Monomial, MonomialOrder, Poly, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IPoly {
    pub terms: Vec<(Monomial, BigInt)>,
}

impl IPoly {
    pub fn from_poly(p: &Poly, order: &MonomialOrder) -> IPoly {
        let n = p.normalized(order);
        let terms = n
            .sorted_terms(order)
            .into_iter()
            .map(|(m, c)| {
                debug_assert!(c.is_integer());
                (m, c.to_integer())
            })
            .collect();
        IPoly { terms }
    }

    pub fn to_poly(&self, ring: &Arc<Ring>) -> Poly {
        Poly::from_terms(
            ring,
            self.terms.iter().map(|(m, c)| (*m, BigRational::from_integer(c.clone()))),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
    }

    /// Divide by the content and make the leading coefficient positive.
    /// Returns the rational factor that was applied.
    pub fn make_primitive(&mut self) -> BigRational {
        if self.terms.is_empty() {
            return BigRational::one();
        }
        let g = content(self.terms.iter().map(|(_, c)| c));
        let g = if self.terms[0].1.is_negative() { -g } else { g };
        if !g.is_one() {
            for (_, c) in self.terms.iter_mut() {
                *c = &*c / &g;
            }
        }
        BigRational::new(BigInt::one(), g)
    }

    /// S-polynomial `(l/lt f)·f - (l/lt g)·g` up to a positive integer scalar.
    pub fn spoly(f: &IPoly, g: &IPoly, order: &MonomialOrder) -> IPoly {
        let l = f.lm().lcm(g.lm());
        let mf = f.lm().quotient_of(&l).unwrap();
        let mg = g.lm().quotient_of(&l).unwrap();
        let d = f.lc().gcd(g.lc());
        let cf = g.lc() / &d;
        let cg = f.lc() / &d;
        let a = scaled_shift(&f.terms[1..], &mf, &cf);
        let b = scaled_shift(&g.terms[1..], &mg, &(-cg));
        IPoly { terms: merge_add(a, b, order) }
    }
}

pub(crate) fn content<'a>(coeffs: impl Iterator<Item = &'a BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for c in coeffs {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn scaled_shift(terms: &[(Monomial, BigInt)], m: &Monomial, c: &BigInt) -> Vec<(Monomial, BigInt)> {
    let one = c.is_one();
    terms
        .iter()
        .map(|(t, a)| (t.mul(m), if one { a.clone() } else { a * c }))
        .collect()
}

/// Merge two descending term lists, summing coefficients and dropping zeros.
pub(crate) fn merge_add(
    a: Vec<(Monomial, BigInt)>,
    b: Vec<(Monomial, BigInt)>,
    order: &MonomialOrder,
) -> Vec<(Monomial, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let ord = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (Some(x), Some(y)) => order.cmp(&x.0, &y.0),
        };
        match ord {
            Ordering::Greater => out.push(ia.next().unwrap()),
            Ordering::Less => out.push(ib.next().unwrap()),
            Ordering::Equal => {
                let (m, x) = ia.next().unwrap();
                let (_, y) = ib.next().unwrap();
                let s = x + y;
                if s.sign() != Sign::NoSign {
                    out.push((m, s));
                }
            }
        }
    }
    out
}

/// A reducer: a basis element with its leading data cached.
pub(crate) struct Reducer<'a> {
    pub poly: &'a IPoly,
    pub mask: u32,
}

impl<'a> Reducer<'a> {
    pub fn new(poly: &'a IPoly) -> Self {
        Reducer { mask: poly.lm().support_mask(), poly }
    }
}

fn find_reducer<'a, 'b>(reducers: &'b [Reducer<'a>], m: &Monomial) -> Option<&'b Reducer<'a>> {
    let mm = m.support_mask();
    reducers
        .iter()
        .find(|r| r.mask & !mm == 0 && r.poly.lm().divides(m))
}

/// Full normal form of `p` modulo `reducers`.
///
/// Returns `(r, s)` with `s·p ≡ r` modulo the ideal, `r` fully reduced and
/// primitive (or zero).
pub(crate) fn normal_form(p: &IPoly, reducers: &[Reducer<'_>], order: &MonomialOrder) -> (IPoly, BigRational) {
    let mut scale = BigRational::one();
    let mut work: Vec<(Monomial, BigInt)> = p.terms.clone();
    let mut done: Vec<(Monomial, BigInt)> = Vec::new();
    let mut head = 0usize;
    let mut growth = 0u32;
    while head < work.len() {
        let Some(r) = find_reducer(reducers, &work[head].0) else {
            done.push(work[head].clone());
            head += 1;
            continue;
        };
        let g = r.poly;
        let (m, c) = &work[head];
        let q = g.lm().quotient_of(m).unwrap();
        let d = g.lc().gcd(c);
        let ma = g.lc() / &d;
        let mb = c / &d;
        let rest: Vec<(Monomial, BigInt)> = if ma.is_one() {
            work.drain(head + 1..).collect()
        } else {
            growth += 1;
            scale *= BigRational::from_integer(ma.clone());
            for (_, x) in done.iter_mut() {
                *x *= &ma;
            }
            work[head + 1..].iter().map(|(t, x)| (*t, x * &ma)).collect()
        };
        let sub = scaled_shift(&g.terms[1..], &q, &(-mb));
        work = merge_add(rest, sub, order);
        head = 0;
        if growth >= 4 {
            growth = 0;
            let g = content(done.iter().chain(work.iter()).map(|(_, c)| c));
            if !g.is_one() {
                for (_, x) in done.iter_mut().chain(work.iter_mut()) {
                    *x = &*x / &g;
                }
                scale /= BigRational::from_integer(g);
            }
        }
    }
    let mut r = IPoly { terms: done };
    let f = r.make_primitive();
    (r, scale * f)
}
