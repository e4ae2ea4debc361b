use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::polycore::{parse_poly, q};

fn ring(vars: &[&str]) -> Arc<Ring> {
    Ring::new(vars)
}

fn p(s: &str, r: &Arc<Ring>) -> Poly {
    parse_poly(s, r).unwrap()
}

fn cfg() -> GroebnerConfig {
    GroebnerConfig::default()
}

#[test]
fn single_monomial_is_its_own_basis() {
    let r = ring(&["x", "y"]);
    let (gb, _) = buchberger(&[p("x", &r)], &MonomialOrder::grevlex(2), &cfg()).unwrap();
    assert_eq!(gb.generators, vec![p("x", &r)]);
    assert!(is_reduced(&gb));
}

#[test]
fn circle_meets_diagonal() {
    let r = ring(&["x", "y"]);
    let gens = [p("x^2 + y^2 - 1", &r), p("x - y", &r)];
    let (gb, _) = buchberger(&gens, &MonomialOrder::lex(2), &cfg()).unwrap();
    assert!(gb.generators.contains(&p("2*y^2 - 1", &r)));
    assert!(gb.generators.contains(&p("x - y", &r)));
    assert!(is_reduced(&gb));
}

#[test]
fn reduce_examples() {
    let r = ring(&["x", "y"]);
    let g = p("x^2*y - 3*x + y", &r);
    let basis = buchberger(&[g.clone()], &MonomialOrder::grevlex(2), &cfg()).unwrap().0;
    assert!(reduce(&g, &basis).is_zero());

    let lin = IdealBasis {
        ring: r.clone(),
        generators: vec![p("x - y", &r)],
        order: MonomialOrder::lex(2),
        reduced: true,
    };
    assert_eq!(reduce(&p("x^2*y", &r), &lin), p("y^3", &r));
    // rational coefficients survive: the true remainder, not a scaled one
    assert_eq!(reduce(&p("1/2*x^2*y + 3", &r), &lin), p("1/2*y^3 + 3", &r));
}

fn random_poly(rng: &mut ChaCha8Rng, r: &Arc<Ring>, max_deg: u32, terms: usize) -> Poly {
    let n = r.nvars();
    let mut out = Poly::zero(r);
    for _ in 0..terms {
        let exps: Vec<u32> = {
            let mut left = rng.random_range(0..=max_deg);
            (0..n)
                .map(|_| {
                    let e = rng.random_range(0..=left);
                    left -= e;
                    e
                })
                .collect()
        };
        let c = q(rng.random_range(-9..=9), rng.random_range(1..=4));
        out.add_term(Monomial::from_exponents(&exps), c);
    }
    out
}

#[test]
fn combinations_of_generators_reduce_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let r = ring(&["x", "y", "z"]);
    let gens = [p("x^2 - y*z", &r), p("y^2 - x + z", &r), p("x*y*z - 1", &r)];
    let (gb, _) = buchberger(&gens, &MonomialOrder::grevlex(3), &cfg()).unwrap();
    for _ in 0..50 {
        let mut comb = Poly::zero(&r);
        for g in &gens {
            comb = &comb + &(&random_poly(&mut rng, &r, 2, 3) * g);
        }
        assert!(reduce(&comb, &gb).is_zero());
    }
}

#[test]
fn basis_is_idempotent_and_deterministic() {
    let r = ring(&["x", "y", "z"]);
    let gens = [p("x^2*y - z^2", &r), p("x*z^2 - y^2 + 1", &r), p("y*z - x", &r)];
    let ord = MonomialOrder::grevlex(3);
    let (a, _) = buchberger(&gens, &ord, &cfg()).unwrap();
    let (b, _) = buchberger(&gens, &ord, &cfg()).unwrap();
    let (c, _) = buchberger(&a.generators, &ord, &cfg()).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(a.generators, c.generators);
    assert!(is_reduced(&a));
}

#[test]
fn linear_elimination() {
    let r = ring(&["x", "y", "z"]);
    let (gb, _) = eliminate(&[p("x - y", &r), p("x - z", &r)], &["x"], &cfg()).unwrap();
    assert_eq!(gb.generators, vec![p("y - z", &r)]);
}

#[test]
fn saturation_examples() {
    let r = ring(&["x", "y"]);
    let (s, _) = saturate(&[p("x*y", &r)], &p("x", &r), &cfg()).unwrap();
    assert_eq!(s.generators, vec![p("y", &r)]);
    let (s, _) = saturate(&[p("x", &r)], &p("y", &r), &cfg()).unwrap();
    assert_eq!(s.generators, vec![p("x", &r)]);
    assert!(matches!(saturate(&[p("x", &r)], &Poly::zero(&r), &cfg()), Err(GroebnerError::ZeroSaturator)));
}

#[test]
fn combined_saturate_eliminate_matches_two_steps() {
    let r = ring(&["a", "x", "y"]);
    let gens = [p("a*x - y^2", &r), p("a*y - x", &r), p("a*x*y", &r)];
    let (one, _) = eliminate_saturated(&gens, &p("a", &r), &["a"], &cfg()).unwrap();
    let (sat, _) = saturate(&gens, &p("a", &r), &cfg()).unwrap();
    let (two, _) = eliminate(&sat.generators, &["a"], &cfg()).unwrap();
    assert!(ideals_equal(&one.generators, &two.generators, &cfg()).unwrap());
}

#[test]
fn membership() {
    let r = ring(&["x", "y"]);
    let gens = [p("x^2", &r), p("y^2", &r)];
    assert!(member(&p("x^2", &r), &gens, &cfg()).unwrap());
    assert!(member(&p("3*x^2*y - y^3", &r), &gens, &cfg()).unwrap());
    assert!(!member(&p("x*y", &r), &gens, &cfg()).unwrap());
}

#[test]
fn homography_quartic_by_elimination() {
    let r = ring(&["w", "h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8", "h9"]);
    let gens = [
        p("w^2*h1*h2 + w^2*h4*h5 + h7*h8", &r),
        p("w^2*h1^2 + w^2*h4^2 + h7^2 - w^2*h2^2 - w^2*h5^2 - h8^2", &r),
    ];
    let (gb, _) = eliminate(&gens, &["w"], &cfg()).unwrap();
    let expected = p(
        "h1*h2*h7^2 + h4*h5*h7^2 - h1^2*h7*h8 + h2^2*h7*h8 - h4^2*h7*h8 + h5^2*h7*h8 - h1*h2*h8^2 - h4*h5*h8^2",
        &r,
    );
    assert_eq!(gb.len(), 1);
    assert!(gb.generators[0].is_scalar_multiple_of(&expected));
}

#[test]
fn resource_cap_reports_progress() {
    let r = ring(&["x", "y", "z"]);
    let gens = [p("x^3 - y*z + 1", &r), p("y^3 - x*z", &r), p("z^3 - x*y - 2", &r)];
    let tight = GroebnerConfig { max_pairs: 2, ..cfg() };
    match buchberger(&gens, &MonomialOrder::lex(3), &tight) {
        Err(GroebnerError::ResourceCap { stats, .. }) => assert!(stats.pairs_processed > 2),
        other => panic!("expected cap error, got {other:?}"),
    }
}

#[test]
fn minimal_generators_drop_redundancy() {
    let r = ring(&["x", "y", "z"]);
    let basis = IdealBasis {
        ring: r.clone(),
        generators: vec![p("x*y", &r), p("x^2*y + x*y*z", &r), p("y*z^2 - x^3", &r), p("x^2", &r)],
        order: MonomialOrder::grevlex(3),
        reduced: false,
    };
    let mins = minimal_generators(&basis, &cfg()).unwrap();
    assert_eq!(mins.len(), 3);
    assert!(ideals_equal(&mins, &basis.generators, &cfg()).unwrap());
}

#[test]
fn lex_elimination_subsets_are_bases() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let r = ring(&["x", "y", "z"]);
    for _ in 0..5 {
        let gens: Vec<Poly> = (0..3).map(|_| random_poly(&mut rng, &r, 2, 3)).filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            continue;
        }
        let (gb, _) = buchberger(&gens, &MonomialOrder::lex(3), &cfg()).unwrap();
        assert!(is_groebner(&gb));
        for l in 1..3 {
            let subset: Vec<Poly> = gb
                .generators
                .iter()
                .filter(|g| (0..l).all(|v| !g.involves(v)))
                .cloned()
                .collect();
            if subset.is_empty() {
                continue;
            }
            let (again, _) = buchberger(&subset, &MonomialOrder::lex(3), &cfg()).unwrap();
            assert_eq!(again.generators, subset);
        }
        let _ = rng.random::<u8>();
    }
}
