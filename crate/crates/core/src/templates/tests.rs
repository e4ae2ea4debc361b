use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

#[test]
fn nullspace_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m: Vec<Vec<BigRational>> = (0..6)
        .map(|_| (0..9).map(|_| BigRational::from_integer(rand::Rng::random_range(&mut rng, -5i64..=5).into())).collect())
        .collect();
    let null = exact_nullspace(&m, 9);
    assert_eq!(null.len(), 3);
    for v in &null {
        for row in &m {
            let dot: BigRational = row.iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(num_traits::Zero::is_zero(&dot));
        }
    }
}

#[test]
fn quotient_bases_have_expected_sizes() {
    for id in [ProblemId::Fef, ProblemId::Ef, ProblemId::Hf] {
        let b = quotient_basis(id, 42).unwrap();
        assert_eq!(b.len(), id.solution_count(), "{id}");
        assert!(b.contains(&Monomial::one(param_vars(id).len())));
    }
}

#[test]
fn homography_reduces_to_a_univariate_quartic() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sys = random_exact_system(ProblemId::Hf, &mut rng);
    assert_eq!(sys.len(), 1);
    assert_eq!(sys[0].degree(), Some(4));
    assert_eq!(sys[0].ring().nvars(), 1);
}

#[test]
fn small_template_builds_and_matches_bundle() {
    let t = build_template(ProblemId::Ef, &TemplateOptions::for_problem(ProblemId::Ef)).unwrap();
    assert_eq!((t.rows, t.cols), (6, 15));
    assert_eq!(t, bundled(ProblemId::Ef));
    assert_eq!(t.action, "x");
}

#[test]
fn bundled_templates_close_on_fresh_instances() {
    for id in [ProblemId::Fef, ProblemId::Ef] {
        let t = bundled(id);
        assert_eq!(t.basis_len(), id.solution_count());
        for seed in [101, 202] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sys = random_exact_system(id, &mut rng);
            let a = exact::check_closure(&t, &sys).unwrap();
            assert_eq!(a.len(), id.solution_count());
        }
    }
}

#[test]
fn json_round_trip_and_errors() {
    let t = bundled(ProblemId::Fef);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    t.save(&path).unwrap();
    assert_eq!(SolverTemplate::load(&path).unwrap(), t);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), t.to_json());

    let wrong = t.to_json().replacen("\"version\": 1", "\"version\": 7", 1);
    assert!(matches!(SolverTemplate::from_json(&wrong), Err(TemplateError::Version { found: 7, .. })));
    let json = t.to_json();
    let truncated = &json[..json.len() / 2];
    assert!(matches!(SolverTemplate::from_json(truncated), Err(TemplateError::Malformed(_))));
    let mut bad = t.clone();
    bad.rows += 1;
    assert!(matches!(SolverTemplate::from_json(&bad.to_json()), Err(TemplateError::Malformed(_))));
}

#[test]
fn degree_cap_too_low_fails() {
    let opts = TemplateOptions { degree_cap: 6, ..TemplateOptions::for_problem(ProblemId::Fef) };
    assert!(matches!(build_template(ProblemId::Fef, &opts), Err(TemplateError::ClosureFailed { reached: 6 })));
}

#[test]
fn hf_template_is_degenerate() {
    let t = bundled(ProblemId::Hf);
    assert_eq!((t.rows, t.cols), (0, 0));
    assert_eq!(t.basis_len(), 4);
}
