use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Monomial, PolyError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    Lex,
    Grevlex,
    /// Block elimination order: the first `front` variables of the priority
    /// list form a block compared first (grevlex inside each block).
    Block { front: usize },
}

/// A monomial order over a fixed number of variables.
///
/// `priority[0]` is the greatest variable. All orders here are total,
/// multiplicative and well-founded.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialOrder {
    kind: OrderKind,
    priority: Vec<usize>,
}

impl MonomialOrder {
    pub fn lex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Lex, priority: (0..nvars).collect() }
    }

    pub fn grevlex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Grevlex, priority: (0..nvars).collect() }
    }

    pub fn with_priority(kind: OrderKind, priority: Vec<usize>) -> Self {
        let n = priority.len();
        let mut seen = vec![false; n];
        for &p in &priority {
            assert!(p < n && !seen[p], "priority must be a permutation");
            seen[p] = true;
        }
        if let OrderKind::Block { front } = kind {
            assert!(front <= n);
        }
        MonomialOrder { kind, priority }
    }

    /// Elimination order with the variables in `front` greater than all others.
    pub fn block(nvars: usize, front: &[usize]) -> Self {
        let mut priority: Vec<usize> = front.to_vec();
        priority.sort_unstable();
        priority.dedup();
        let k = priority.len();
        priority.extend((0..nvars).filter(|v| !front.contains(v)));
        Self::with_priority(OrderKind::Block { front: k }, priority)
    }

    pub fn kind(&self) -> &OrderKind {
        &self.kind
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    /// Checked comparison; fails when the monomials do not live over this order's ambient.
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering, PolyError> {
        if a.nvars() != self.nvars() || b.nvars() != self.nvars() {
            return Err(PolyError::AmbientMismatch {
                left: a.nvars().max(b.nvars()),
                right: self.nvars(),
            });
        }
        Ok(self.cmp(a, b))
    }

    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.nvars(), self.nvars());
        match self.kind {
            OrderKind::Lex => lex_on(&self.priority, a, b),
            OrderKind::Grevlex => grevlex_on(&self.priority, a, b),
            OrderKind::Block { front } => {
                let (hi, lo) = self.priority.split_at(front);
                grevlex_on(hi, a, b).then_with(|| grevlex_on(lo, a, b))
            }
        }
    }

    /// Is every variable of `vars` greater than every monomial free of them?
    /// True exactly for lex orders listing them first and block orders whose front block contains them.
    pub fn eliminates(&self, vars: &[usize]) -> bool {
        match self.kind {
            OrderKind::Lex => {
                let k = vars.len();
                vars.iter().all(|v| self.priority[..k].contains(v))
            }
            OrderKind::Block { front } => vars.iter().all(|v| self.priority[..front].contains(v)),
            OrderKind::Grevlex => vars.is_empty(),
        }
    }
}

#[inline]
fn lex_on(vars: &[usize], a: &Monomial, b: &Monomial) -> Ordering {
    for &v in vars {
        match a.exponent(v).cmp(&b.exponent(v)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

#[inline]
fn grevlex_on(vars: &[usize], a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = vars.iter().map(|&v| a.exponent(v)).sum();
    let db: u32 = vars.iter().map(|&v| b.exponent(v)).sum();
    if da != db {
        return da.cmp(&db);
    }
    for &v in vars.iter().rev() {
        match a.exponent(v).cmp(&b.exponent(v)) {
            Ordering::Equal => continue,
            other => return other.reverse(),
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::monomial::{monomials_of_degree, monomials_up_to_degree};

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e)
    }

    #[test]
    fn dictionary_example() {
        // x > y > z:  x*y^2*z  vs  x*y*z^2
        let lex = MonomialOrder::lex(3);
        assert_eq!(lex.compare(&m(&[1, 2, 1]), &m(&[1, 1, 2])).unwrap(), Ordering::Greater);
        // reversing the variable priority flips it
        let rev = MonomialOrder::with_priority(OrderKind::Lex, vec![2, 1, 0]);
        assert_eq!(rev.cmp(&m(&[1, 2, 1]), &m(&[1, 1, 2])), Ordering::Less);
    }

    #[test]
    fn reflexive() {
        let a = m(&[2, 0, 1]);
        for ord in [MonomialOrder::lex(3), MonomialOrder::grevlex(3), MonomialOrder::block(3, &[1])] {
            assert_eq!(ord.cmp(&a, &a), Ordering::Equal);
        }
    }

    #[test]
    fn mismatched_ambient_errors() {
        let ord = MonomialOrder::grevlex(3);
        assert!(ord.compare(&m(&[1, 0]), &m(&[1, 0, 0])).is_err());
    }

    #[test]
    fn grevlex_degree_two_chain() {
        let ord = MonomialOrder::grevlex(3);
        let mut mons = monomials_of_degree(3, 2);
        // brute force: every pair strictly comparable and antisymmetric
        for a in &mons {
            for b in &mons {
                let ab = ord.cmp(a, b);
                assert_eq!(ab, ord.cmp(b, a).reverse());
                assert_eq!(ab == Ordering::Equal, a == b);
            }
        }
        mons.sort_by(|a, b| ord.cmp(b, a));
        let exps: Vec<Vec<u8>> = mons.iter().map(|x| x.exponents().to_vec()).collect();
        assert_eq!(
            exps,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
    }

    #[test]
    fn order_axioms_brute_force() {
        let mons = monomials_up_to_degree(3, 3);
        let orders = [
            MonomialOrder::lex(3),
            MonomialOrder::grevlex(3),
            MonomialOrder::block(3, &[2]),
            MonomialOrder::with_priority(OrderKind::Grevlex, vec![1, 2, 0]),
        ];
        let one = Monomial::one(3);
        for ord in &orders {
            for a in &mons {
                assert_ne!(ord.cmp(a, &one), Ordering::Less);
                for b in &mons {
                    let ab = ord.cmp(a, b);
                    for c in &mons {
                        // multiplicative
                        assert_eq!(ord.cmp(&a.mul(c), &b.mul(c)), ab);
                        // transitive
                        if ab == Ordering::Less && ord.cmp(b, c) == Ordering::Less {
                            assert_eq!(ord.cmp(a, c), Ordering::Less);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn block_eliminates_front() {
        let ord = MonomialOrder::block(3, &[0]);
        assert!(ord.eliminates(&[0]));
        assert!(!ord.eliminates(&[1]));
        // x beats any power of y, z
        assert_eq!(ord.cmp(&m(&[1, 0, 0]), &m(&[0, 5, 5])), Ordering::Greater);
    }
}
