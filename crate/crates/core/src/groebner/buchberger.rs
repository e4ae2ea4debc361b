use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ipoly::{normal_form, IPoly, Reducer};
use super::{GroebnerError, IdealBasis};
use crate::polycore::{Monomial, MonomialOrder, Poly, Ring};

/// Resource limits for a Gröbner basis computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroebnerConfig {
    /// Maximum number of critical pairs reduced.
    pub max_pairs: usize,
    /// Maximum bit length of any coefficient in a basis element.
    pub max_coeff_bits: u64,
    /// Skip pairs whose lcm has a larger total degree. Only sound for
    /// homogeneous input, where it yields the basis truncated at that degree.
    pub degree_limit: Option<u32>,
}

impl Default for GroebnerConfig {
    fn default() -> Self {
        GroebnerConfig { max_pairs: 200_000, max_coeff_bits: 100_000, degree_limit: None }
    }
}

/// Progress counters for a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerStats {
    pub pairs_created: usize,
    pub pairs_processed: usize,
    pub zero_reductions: usize,
    pub max_degree: u32,
    pub max_coeff_bits: u64,
    pub basis_size: usize,
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    degree: u32,
}

struct Engine<'o> {
    order: &'o MonomialOrder,
    config: &'o GroebnerConfig,
    /// Every polynomial ever added; pairs refer to indices here.
    store: Vec<IPoly>,
    /// Indices of the current (non-redundant) basis.
    basis: Vec<usize>,
    pairs: Vec<Pair>,
    stats: GroebnerStats,
}

impl<'o> Engine<'o> {
    fn make_pair(&self, i: usize, j: usize) -> Pair {
        let lcm = self.store[i].lm().lcm(self.store[j].lm());
        Pair { i, j, lcm, degree: lcm.degree() }
    }

    /// Gebauer–Möller installation of a new element, applying the chain and product criteria.
    fn update(&mut self, h: usize) {
        let lm_h = *self.store[h].lm();
        let mut candidates: Vec<Pair> = self.basis.iter().map(|&g| self.make_pair(g, h)).collect();
        self.stats.pairs_created += candidates.len();

        // chain criterion among the new pairs
        let mut kept: Vec<Pair> = Vec::new();
        while let Some(p) = candidates.pop() {
            let coprime = lm_h.gcd_is_one(self.store[p.i].lm());
            let dominated = candidates.iter().chain(kept.iter()).any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                kept.push(p);
            }
        }
        // product criterion
        kept.retain(|p| !lm_h.gcd_is_one(self.store[p.i].lm()));

        // chain criterion on old pairs
        let store = &self.store;
        self.pairs.retain(|p| {
            !lm_h.divides(&p.lcm)
                || store[p.i].lm().lcm(&lm_h) == p.lcm
                || store[p.j].lm().lcm(&lm_h) == p.lcm
        });
        self.pairs.extend(kept);

        self.basis.retain(|&g| !lm_h.divides(store[g].lm()));
        self.basis.push(h);
    }

    fn add(&mut self, p: IPoly) -> Result<(), GroebnerError> {
        self.stats.max_degree = self.stats.max_degree.max(p.degree());
        self.stats.max_coeff_bits = self.stats.max_coeff_bits.max(p.max_coeff_bits());
        if self.stats.max_coeff_bits > self.config.max_coeff_bits {
            return Err(self.cap_error("coefficient bit length"));
        }
        self.store.push(p);
        let h = self.store.len() - 1;
        self.update(h);
        Ok(())
    }

    fn cap_error(&self, what: &str) -> GroebnerError {
        let mut stats = self.stats.clone();
        stats.basis_size = self.basis.len();
        GroebnerError::ResourceCap { limit: what.to_string(), stats }
    }

    fn select(&mut self) -> Option<Pair> {
        let order = self.order;
        let idx = (0..self.pairs.len()).min_by(|&a, &b| {
            let (p, q) = (&self.pairs[a], &self.pairs[b]);
            p.degree
                .cmp(&q.degree)
                .then_with(|| order.cmp(&p.lcm, &q.lcm))
                .then_with(|| (p.i, p.j).cmp(&(q.i, q.j)))
        })?;
        Some(self.pairs.swap_remove(idx))
    }

    fn run(&mut self) -> Result<(), GroebnerError> {
        while let Some(pair) = self.select() {
            if let Some(limit) = self.config.degree_limit {
                if pair.degree > limit {
                    continue;
                }
            }
            self.stats.pairs_processed += 1;
            if self.stats.pairs_processed > self.config.max_pairs {
                return Err(self.cap_error("pair count"));
            }
            let s = IPoly::spoly(&self.store[pair.i], &self.store[pair.j], self.order);
            let reducers: Vec<Reducer<'_>> = self.basis.iter().map(|&g| Reducer::new(&self.store[g])).collect();
            let (r, _) = normal_form(&s, &reducers, self.order);
            if r.is_zero() {
                self.stats.zero_reductions += 1;
                continue;
            }
            self.add(r)?;
        }
        Ok(())
    }

    /// Minimal, inter-reduced basis sorted by ascending leading monomial.
    fn reduced_basis(&self) -> Vec<IPoly> {
        let mut idx = self.basis.clone();
        // drop elements whose leading monomial is divisible by another's
        idx.sort_by(|&a, &b| self.order.cmp(self.store[a].lm(), self.store[b].lm()));
        let mut minimal: Vec<usize> = Vec::new();
        for &i in &idx {
            if !minimal.iter().any(|&j| self.store[j].lm().divides(self.store[i].lm())) {
                minimal.push(i);
            }
        }
        let polys: Vec<IPoly> = minimal.iter().map(|&i| self.store[i].clone()).collect();
        let mut out = Vec::with_capacity(polys.len());
        for (k, p) in polys.iter().enumerate() {
            let head = IPoly { terms: vec![p.terms[0].clone()] };
            let tail = IPoly { terms: p.terms[1..].to_vec() };
            let others: Vec<Reducer<'_>> = polys
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, q)| Reducer::new(q))
                .collect();
            let (r, s) = normal_form(&tail, &others, self.order);
            // p ≡ lc·lm + tail, tail ≡ r/s: rebuild with a common denominator
            let mut terms = Vec::with_capacity(r.terms.len() + 1);
            let num = s.numer().clone();
            let den = s.denom().clone();
            // s·tail ≡ r  ⇒  num·tail ≡ den·r ; scale head by num
            terms.push((head.terms[0].0, &head.terms[0].1 * &num));
            for (m, c) in r.terms {
                terms.push((m, c * &den));
            }
            let mut q = IPoly { terms };
            q.make_primitive();
            out.push(q);
        }
        out
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens` under `order`.
pub fn buchberger(
    gens: &[Poly],
    order: &MonomialOrder,
    config: &GroebnerConfig,
) -> Result<(IdealBasis, GroebnerStats), GroebnerError> {
    let ring = check_inputs(gens, order)?;
    let mut engine = Engine {
        order,
        config,
        store: Vec::new(),
        basis: Vec::new(),
        pairs: Vec::new(),
        stats: GroebnerStats::default(),
    };
    // inputs are inter-reduced on entry: each is reduced by those already added
    let mut inputs: Vec<IPoly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| IPoly::from_poly(g, order))
        .collect();
    inputs.sort_by(|a, b| order.cmp(a.lm(), b.lm()).then_with(|| a.terms.len().cmp(&b.terms.len())));
    for p in inputs {
        let reducers: Vec<Reducer<'_>> = engine.basis.iter().map(|&g| Reducer::new(&engine.store[g])).collect();
        let (r, _) = normal_form(&p, &reducers, order);
        if !r.is_zero() {
            engine.add(r)?;
        }
    }
    engine.run()?;
    let reduced = engine.reduced_basis();
    engine.stats.basis_size = reduced.len();
    let generators = reduced.iter().map(|p| p.to_poly(&ring)).collect();
    Ok((
        IdealBasis { ring, generators, order: order.clone(), reduced: true },
        engine.stats,
    ))
}

pub(crate) fn check_inputs(gens: &[Poly], order: &MonomialOrder) -> Result<Arc<Ring>, GroebnerError> {
    let first = gens.first().ok_or(GroebnerError::EmptyGenerators)?;
    let ring = first.ring().clone();
    if ring.nvars() != order.nvars() {
        return Err(GroebnerError::AmbientMismatch);
    }
    if gens.iter().any(|g| g.ring() != &ring) {
        return Err(GroebnerError::AmbientMismatch);
    }
    Ok(ring)
}
