use elimsolve::elimderive::{golden_generators, ProblemId};
use elimsolve::solvers::{SolveOptions, Solver};
use elimsolve::synth::{add_noise, evaluate, pixels, random_scene, read_correspondences, write_correspondences, SceneConfig};
use elimsolve::templates::{bundled, reference_size, SolverTemplate};

#[test]
fn synth_csv_solve_evaluate() {
    for id in ProblemId::ALL {
        let scene = random_scene(id, &SceneConfig::default(), 11).unwrap();
        let mut buf = Vec::new();
        write_correspondences(&mut buf, &scene.correspondences).unwrap();
        let corr = read_correspondences(buf.as_slice()).unwrap();
        assert_eq!(corr.len(), scene.correspondences.len());

        let solver = Solver::bundled(id);
        let sols = solver.solve(&corr, &SolveOptions::default()).unwrap();
        assert!(!sols.is_empty() && sols.len() <= id.solution_count(), "{id}: {} solutions", sols.len());
        let rec = evaluate(&sols, &scene, 0.0);
        assert!(!rec.failure && rec.log10_rel_f < -8.0, "{id}: {rec:?}");
    }
}

#[test]
fn small_noise_degrades_gracefully() {
    let solver = Solver::bundled(ProblemId::Fef);
    let mut errs: Vec<f64> = (0..50)
        .map(|seed| {
            let scene = random_scene(ProblemId::Fef, &SceneConfig::default(), seed).unwrap();
            let noisy = add_noise(&scene.correspondences, pixels(0.1), seed + 1);
            let sols = solver.solve(&noisy, &SolveOptions::default()).unwrap_or_default();
            evaluate(&sols, &scene, pixels(0.1)).log10_rel_f
        })
        .map(|e| if e.is_nan() { f64::INFINITY } else { e })
        .collect();
    errs.sort_by(f64::total_cmp);
    let median = errs[25];
    assert!(median < -1.5 && median > -10.0, "median {median}");
}

#[test]
fn bundled_templates_round_trip_through_json() {
    for id in ProblemId::ALL {
        let t = bundled(id);
        let back = SolverTemplate::from_json(&t.to_json()).unwrap();
        assert_eq!(back.to_json(), t.to_json());
        if let Some(size) = reference_size(id) {
            assert_eq!((t.rows, t.cols), size, "{id}");
        }
        assert_eq!(t.basis_len(), id.solution_count(), "{id}");
    }
}

#[test]
fn golden_generators_vanish_on_scenes() {
    for id in ProblemId::ALL {
        let gens = golden_generators(id);
        assert!(!gens.is_empty());
        let scene = random_scene(id, &SceneConfig::default(), 3).unwrap();
        let m = scene.ground_truth_matrix();
        // E+f+k stores [F | y] row-major; its ring lists the 3x3 block first
        let point: Vec<f64> = if id == ProblemId::Efk {
            (0..3).flat_map(|i| [m[4 * i], m[4 * i + 1], m[4 * i + 2]]).chain((0..3).map(|i| m[4 * i + 3])).collect()
        } else {
            m
        };
        let scale = point.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for g in &gens {
            let v = g.eval_f64(&point);
            assert!(v.abs() <= 1e-9 * scale.powi(g.degree().unwrap_or(0) as i32).max(1.0), "{id}: {v}");
        }
    }
}
