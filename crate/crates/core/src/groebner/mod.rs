//! Gröbner bases over the rationals: multivariate division, Buchberger's
//! algorithm, elimination and saturation.

mod buchberger;
mod ipoly;

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use buchberger::{buchberger, GroebnerConfig, GroebnerStats};
use ipoly::{normal_form, IPoly, Reducer};

use crate::polycore::{Monomial, MonomialOrder, Poly, Ring};

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroebnerError {
    #[error("resource cap exceeded ({limit}): {stats:?}")]
    ResourceCap { limit: String, stats: GroebnerStats },
    #[error("no generators given")]
    EmptyGenerators,
    #[error("generators or order over different ambients")]
    AmbientMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("cannot saturate by the zero polynomial")]
    ZeroSaturator,
}

/// A generator list for an ideal together with the order it is a basis for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealBasis {
    pub ring: Arc<Ring>,
    pub generators: Vec<Poly>,
    pub order: MonomialOrder,
    /// Set when `generators` is a reduced Gröbner basis under `order`.
    pub reduced: bool,
}

impl IdealBasis {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators
            .iter()
            .filter_map(|g| g.leading_monomial(&self.order))
            .collect()
    }

    /// Canonical text listing (one generator per line).
    pub fn to_text(&self) -> String {
        self.generators
            .iter()
            .map(|g| g.to_text(&self.order))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Is the ideal the whole ring?
    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.degree() == Some(0))
    }
}

/// Normal form of `p` modulo the generators of `basis` (multivariate division
/// with full tail reduction). When `basis` is a Gröbner basis the result is
/// the unique normal form, and `p - result` lies in the ideal.
pub fn reduce(p: &Poly, basis: &IdealBasis) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    assert_eq!(p.ring(), &basis.ring, "reduce: ring mismatch");
    let order = &basis.order;
    let gens: Vec<IPoly> = basis
        .generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| IPoly::from_poly(g, order))
        .collect();
    let reducers: Vec<Reducer<'_>> = gens.iter().map(Reducer::new).collect();
    let ip = IPoly::from_poly(p, order);
    // IPoly::from_poly scaled p by a factor; undo it to return the true normal form
    let lc_p = p.leading_coefficient(order).unwrap();
    let lc_ip = BigRational::from_integer(ip.lc().clone());
    let input_scale = lc_ip / lc_p;
    let (r, s) = normal_form(&ip, &reducers, order);
    let total = s * input_scale;
    r.to_poly(&basis.ring).scale(&(BigRational::one() / total))
}

/// Does every S-polynomial of the generators reduce to zero?
pub fn is_groebner(basis: &IdealBasis) -> bool {
    let order = &basis.order;
    let gens: Vec<IPoly> = basis
        .generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| IPoly::from_poly(g, order))
        .collect();
    let reducers: Vec<Reducer<'_>> = gens.iter().map(Reducer::new).collect();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let s = IPoly::spoly(&gens[i], &gens[j], order);
            if !normal_form(&s, &reducers, order).0.is_zero() {
                return false;
            }
        }
    }
    true
}

/// Checks the reduced-basis conditions: Gröbner, no leading monomial divides
/// any term of another element, primitive with positive leading coefficient.
pub fn is_reduced(basis: &IdealBasis) -> bool {
    let order = &basis.order;
    let lms = basis.leading_monomials();
    for (k, g) in basis.generators.iter().enumerate() {
        if g.normalized(order) != *g {
            return false;
        }
        for m in g.terms().keys() {
            if lms.iter().enumerate().any(|(j, l)| j != k && l.divides(m)) {
                return false;
            }
        }
    }
    is_groebner(basis)
}

/// Ideal membership by normal form.
pub fn member(p: &Poly, gens: &[Poly], config: &GroebnerConfig) -> Result<bool, GroebnerError> {
    let ring = p.ring();
    let (gb, _) = buchberger(gens, &MonomialOrder::grevlex(ring.nvars()), config)?;
    Ok(reduce(p, &gb).is_zero())
}

fn var_indices(ring: &Ring, names: &[&str]) -> Result<Vec<usize>, GroebnerError> {
    names
        .iter()
        .map(|n| ring.index_of(n).ok_or_else(|| GroebnerError::UnknownVariable(n.to_string())))
        .collect()
}

/// Gröbner basis of the elimination ideal `<gens> ∩ Q[remaining variables]`.
///
/// Uses a block order with the dropped variables greatest (grevlex inside each
/// block); the returned generators involve none of `drop` and form a Gröbner
/// basis for the restriction of that order.
pub fn eliminate(gens: &[Poly], drop: &[&str], config: &GroebnerConfig) -> Result<(IdealBasis, GroebnerStats), GroebnerError> {
    let first = gens.first().ok_or(GroebnerError::EmptyGenerators)?;
    let ring = first.ring().clone();
    let drop_idx = var_indices(&ring, drop)?;
    let order = MonomialOrder::block(ring.nvars(), &drop_idx);
    let (gb, stats) = buchberger(gens, &order, config)?;
    let generators = gb
        .generators
        .into_iter()
        .filter(|g| drop_idx.iter().all(|&v| !g.involves(v)))
        .collect();
    Ok((IdealBasis { ring, generators, order, reduced: true }, stats))
}

/// Saturation `<gens> : f^∞`, via `<gens, t·f - 1> ∩ Q[x]` with a fresh variable `t`.
pub fn saturate(gens: &[Poly], f: &Poly, config: &GroebnerConfig) -> Result<(IdealBasis, GroebnerStats), GroebnerError> {
    eliminate_saturated(gens, f, &[], config)
}

/// `(<gens> : f^∞) ∩ Q[x \ drop]` in a single Gröbner computation: the
/// Rabinowitsch variable and the `drop` variables share the front block.
pub fn eliminate_saturated(
    gens: &[Poly],
    f: &Poly,
    drop: &[&str],
    config: &GroebnerConfig,
) -> Result<(IdealBasis, GroebnerStats), GroebnerError> {
    if f.is_zero() {
        return Err(GroebnerError::ZeroSaturator);
    }
    let first = gens.first().ok_or(GroebnerError::EmptyGenerators)?;
    let ring = first.ring().clone();
    if f.ring() != &ring || gens.iter().any(|g| g.ring() != &ring) {
        return Err(GroebnerError::AmbientMismatch);
    }
    let mut drop_idx = var_indices(&ring, drop)?;
    let (ext, t) = ring.extended("t_sat");
    let lift = |p: &Poly| p.rename_into(&ext).expect("extension contains every variable");
    let mut ext_gens: Vec<Poly> = gens.iter().map(lift).collect();
    ext_gens.push(&(&Poly::var(&ext, t) * &lift(f)) - &Poly::one(&ext));
    drop_idx.push(t);
    let order = MonomialOrder::block(ext.nvars(), &drop_idx);
    let (gb, stats) = buchberger(&ext_gens, &order, config)?;
    let generators: Vec<Poly> = gb
        .generators
        .iter()
        .filter(|g| drop_idx.iter().all(|&v| !g.involves(v)))
        .map(|g| g.rename_into(&ring).expect("eliminated variables absent"))
        .collect();
    // the restriction of the block order to the original ring
    let drop_orig: Vec<usize> = drop_idx.iter().copied().filter(|&v| v != t).collect();
    let order = if drop_orig.is_empty() {
        MonomialOrder::grevlex(ring.nvars())
    } else {
        MonomialOrder::block(ring.nvars(), &drop_orig)
    };
    Ok((IdealBasis { ring, generators, order, reduced: true }, stats))
}

/// Minimal homogeneous generators of the ideal spanned by `basis`.
///
/// Elements are visited by increasing degree; each is reduced modulo a
/// Gröbner basis of the generators kept so far and kept if a nonzero
/// remainder survives. The remainder (normalized) is what gets kept, which
/// makes the output canonical for a given order. Input must be homogeneous.
pub fn minimal_generators(basis: &IdealBasis, config: &GroebnerConfig) -> Result<Vec<Poly>, GroebnerError> {
    let order = &basis.order;
    let mut sorted: Vec<&Poly> = basis.generators.iter().filter(|g| !g.is_zero()).collect();
    sorted.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| order.cmp(&a.leading_monomial(order).unwrap(), &b.leading_monomial(order).unwrap()))
    });
    let mut kept: Vec<Poly> = Vec::new();
    // basis of the kept generators, truncated at the degree it was computed for
    let mut kept_gb: Option<(IdealBasis, Option<u32>)> = None;
    for g in sorted {
        assert!(g.is_homogeneous(), "minimal_generators expects homogeneous input");
        let r = if kept.is_empty() {
            g.clone()
        } else {
            if kept_gb.as_ref().map(|(_, d)| *d) != Some(g.degree()) {
                let truncated = GroebnerConfig { degree_limit: g.degree(), ..config.clone() };
                kept_gb = Some((buchberger(&kept, order, &truncated)?.0, g.degree()));
            }
            reduce(g, &kept_gb.as_ref().unwrap().0)
        };
        if r.is_zero() {
            continue;
        }
        kept.push(r.normalized(order));
        kept_gb = None;
    }
    Ok(kept)
}

/// Do the two generator sets span the same ideal? (All cross reductions vanish.)
pub fn ideals_equal(a: &[Poly], b: &[Poly], config: &GroebnerConfig) -> Result<bool, GroebnerError> {
    let ring = a.first().or(b.first()).ok_or(GroebnerError::EmptyGenerators)?.ring().clone();
    let order = MonomialOrder::grevlex(ring.nvars());
    let (ga, _) = buchberger(a, &order, config)?;
    let (gb, _) = buchberger(b, &order, config)?;
    Ok(b.iter().all(|p| reduce(p, &ga).is_zero()) && a.iter().all(|p| reduce(p, &gb).is_zero()))
}

#[cfg(test)]
mod tests;
