//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use elimsolve::elimderive::{derive_generators, verify_reference, DeriveOptions, ProblemId};
use elimsolve::groebner::{buchberger, eliminate, is_groebner, GroebnerConfig};
use elimsolve::polycore::{parse_poly, MonomialOrder, Poly, Ring};
use elimsolve::solvers::extract::focal_from_squared;
use elimsolve::solvers::{extract_focal_ef, extract_focal_fef, fef_cross_check, SolveOptions, Solver};
use elimsolve::synth::{evaluate, random_scene, SceneConfig};
use elimsolve::templates::{quotient_basis, random_exact_system};
use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elimsolve"))
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn derive_fef_cli() -> Outcome {
    let start = Instant::now();
    let o = bin().args(["derive", "fef", "--verify"]).output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let out = String::from_utf8_lossy(&o.stdout);
    check(
        o.status.success() && out.contains("2 generators: degree 3, degree 5") && out.contains("verification passed") && elapsed <= Duration::from_secs(300),
        format!("exit {:?}, cubic + quintic reproduced, {:.2}s", o.status.code(), elapsed.as_secs_f64()),
    )
}

fn ef_ideal_equality() -> Outcome {
    let opts = DeriveOptions::default();
    let d = derive_generators(ProblemId::Ef, &opts).map_err(|e| e.to_string())?;
    let r = verify_reference(ProblemId::Ef, &d.generators, &opts.groebner).map_err(|e| e.to_string())?;
    let reductions: Vec<_> = r.checks.iter().filter(|c| c.name.contains(" in ")).collect();
    let zero = reductions.iter().filter(|c| c.passed).count();
    check(reductions.len() == 8 && zero == 8, format!("{zero}/{} membership reductions to zero", reductions.len()))
}

fn efk_census() -> Outcome {
    let opts = DeriveOptions::default();
    let d = derive_generators(ProblemId::Efk, &opts).map_err(|e| e.to_string())?;
    let degs = d.degrees();
    let count = |k: u32| degs.iter().filter(|&&x| x == k).count();
    let r = verify_reference(ProblemId::Efk, &d.generators, &opts.groebner).map_err(|e| e.to_string())?;
    let quadrics_ok = r.checks.iter().filter(|c| c.name.starts_with("quadric")).all(|c| c.passed);
    check(
        d.generators.len() == 14 && (count(2), count(3), count(4)) == (3, 2, 9) && quadrics_ok,
        format!("{} generators: {} quadrics, {} cubics, {} quartics; quadric pattern {}", d.generators.len(), count(2), count(3), count(4), if quadrics_ok { "matches" } else { "differs" }),
    )
}

fn quotient_counts() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (id, want) in [(ProblemId::Fef, 15), (ProblemId::Ef, 9), (ProblemId::Efk, 19)] {
        let sizes: Vec<usize> = (0..20).map(|s| quotient_basis(id, 1000 + s).map_or(0, |b| b.len())).collect();
        let hits = sizes.iter().filter(|&&n| n == want).count();
        ok &= hits == 20;
        parts.push(format!("{id} {want} x{hits}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let hf: Vec<Option<u32>> = (0..20)
        .map(|_| {
            let sys = random_exact_system(ProblemId::Hf, &mut rng);
            (sys.len() == 1).then(|| sys[0].degree()).flatten()
        })
        .collect();
    let quartics = hf.iter().filter(|d| **d == Some(4)).count();
    ok &= quartics == 20;
    parts.push(format!("hf univariate quartic x{quartics}"));
    check(ok, format!("{} (20 instances each)", parts.join(", ")))
}

fn noise_free_stability() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for id in ProblemId::ALL {
        let solver = Solver::bundled(id);
        let mut f_err = Vec::new();
        let mut l_err = Vec::new();
        let mut failures = 0;
        for seed in 0..1000 {
            let sc = random_scene(id, &SceneConfig::default(), seed).map_err(|e| e.to_string())?;
            let sols = solver.solve(&sc.correspondences, &SolveOptions::default()).unwrap_or_default();
            let rec = evaluate(&sols, &sc, 0.0);
            failures += rec.failure as usize;
            f_err.push(if rec.log10_rel_f.is_nan() { f64::INFINITY } else { rec.log10_rel_f });
            l_err.push(if rec.log10_rel_lambda.is_nan() { f64::INFINITY } else { rec.log10_rel_lambda });
        }
        let median = |v: &mut Vec<f64>| {
            v.sort_by(f64::total_cmp);
            (v[v.len() / 2 - 1] + v[v.len() / 2]) / 2.0
        };
        let mf = median(&mut f_err);
        let rate = failures as f64 / 1000.0;
        let mut pass = mf <= -6.0 && rate <= 0.01;
        let mut part = format!("{id} median {mf:.2} fail {:.1}%", 100.0 * rate);
        if id == ProblemId::Efk {
            let ml = median(&mut l_err);
            pass &= ml <= -6.0;
            part += &format!(" (lambda median {ml:.2})");
        }
        ok &= pass;
        parts.push(part);
    }
    let secs = start.elapsed().as_secs_f64();
    check(ok && secs <= 600.0, format!("{}; {secs:.1}s", parts.join(", ")))
}

fn cross_path() -> Outcome {
    let mut agree = 0;
    let mut worst: f64 = 0.0;
    let mut disagreements = Vec::new();
    for seed in 0..100 {
        let sc = random_scene(ProblemId::Fef, &SceneConfig::default(), seed).map_err(|e| e.to_string())?;
        let cc = fef_cross_check(&sc.correspondences, &SolveOptions::default()).map_err(|e| e.to_string())?;
        if cc.agrees(1e-6) {
            agree += 1;
            worst = worst.max(cc.max_difference);
        } else {
            disagreements.push(seed);
        }
    }
    check(agree == 100, format!("{agree}/100 instances agree, worst difference {worst:.1e}, disagreeing seeds {disagreements:?}"))
}

fn arr(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn focal_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_ef: f64 = 0.0;
    let mut worst_fef: f64 = 0.0;
    let mut positive = true;
    for _ in 0..1000 {
        let axis = Vector3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let t = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let e = t.cross_matrix() * Rotation3::new(axis).matrix();
        let f: f64 = rng.random_range(0.5..5.0);
        let ki = Matrix3::from_diagonal(&Vector3::new(1.0 / f, 1.0 / f, 1.0));
        let ef = e * ki;
        let a = extract_focal_ef(&arr(&ef)).map_err(|e| e.to_string())?;
        let b = extract_focal_fef(&arr(&(ki * e * ki))).map_err(|e| e.to_string())?;
        worst_ef = worst_ef.max((a - f * f).abs() / (f * f));
        worst_fef = worst_fef.max((b - f * f).abs() / (f * f));
        // the second pair (diag(-1,-1,1)·E, -f) gives the same positive focal
        let flipped = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0)) * ef;
        for m in [ef, flipped] {
            let g = extract_focal_ef(&arr(&m)).ok().and_then(|x| focal_from_squared(x).ok());
            positive &= g.is_some_and(|g| g > 0.0 && (g - f).abs() <= 1e-8 * f);
        }
    }
    check(
        worst_ef <= 1e-10 && worst_fef <= 1e-10 && positive,
        format!("1000 instances each: worst rel f^2 error E+f {worst_ef:.1e}, f+E+f {worst_fef:.1e}; positive f {}", if positive { "always" } else { "not always" }),
    )
}

fn lambda_noise() -> Outcome {
    let dir = std::env::temp_dir().join(format!("elimsolve-acceptance-{}", std::process::id()));
    let o = bin()
        .args(["bench", "efk", "-n", "200", "--sigma", "0.1,0.5,1", "--lambda", "-0.3", "--out"])
        .arg(&dir)
        .output()
        .map_err(|e| e.to_string())?;
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let median = summary["levels"][0]["lambda"]["median"].as_f64().unwrap_or(f64::NAN);
    let table = out
        .lines()
        .skip_while(|l| !l.starts_with("lambda estimates"))
        .enumerate()
        .take_while(|(i, l)| *i == 0 || l.starts_with("  "))
        .map(|(_, l)| l)
        .collect::<Vec<_>>();
    for l in &table {
        println!("    {l}");
    }
    check(
        o.status.success() && (median + 0.3).abs() <= 0.05 && table.len() == 5,
        format!("median lambda {median:.4} at 0.1 px (200 runs per level), quantile table above"),
    )
}

fn random_small_poly(rng: &mut ChaCha8Rng, ring: &std::sync::Arc<Ring>) -> Poly {
    let vars = ring.vars().to_vec();
    let terms: Vec<String> = (0..rng.random_range(2..=3))
        .map(|_| {
            let mut left = rng.random_range(0..=3u32);
            let mono: Vec<String> = vars
                .iter()
                .filter_map(|v| {
                    let e = rng.random_range(0..=left);
                    left -= e;
                    (e > 0).then(|| format!("{v}^{e}"))
                })
                .collect();
            let c = format!("{}/{}", rng.random_range(1..=7), rng.random_range(1..=3));
            if mono.is_empty() { c } else { format!("{c}*{}", mono.join("*")) }
        })
        .collect();
    parse_poly(&terms.join(" - "), ring).expect("well-formed polynomial")
}

fn groebner_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let config = GroebnerConfig { max_pairs: 20_000, ..Default::default() };
    let names = ["x", "y", "z"];
    let (mut ideals, mut spolys_ok, mut subsets_ok, mut subsets) = (0, 0, 0, 0);
    let mut attempts = 0;
    while ideals < 20 && attempts < 200 {
        attempts += 1;
        let n = rng.random_range(2..=3);
        let ring = Ring::new(&names[..n]);
        let gens: Vec<Poly> = (0..rng.random_range(2..=3)).map(|_| random_small_poly(&mut rng, &ring)).filter(|g| !g.is_zero()).collect();
        let lex = MonomialOrder::lex(n);
        let Ok((gb, _)) = buchberger(&gens, &lex, &config) else { continue };
        if gb.is_unit() {
            continue;
        }
        ideals += 1;
        spolys_ok += is_groebner(&gb) as usize;
        let grevlex_gb = buchberger(&gens, &MonomialOrder::grevlex(n), &config).map(|(b, _)| is_groebner(&b)).unwrap_or(false);
        spolys_ok -= (!grevlex_gb) as usize;
        for l in 1..n {
            let subset: Vec<Poly> = gb.generators.iter().filter(|g| (0..l).all(|v| !g.involves(v))).cloned().collect();
            // brute force: eliminate with a block order, then recompute the reduced lex basis
            let (elim, _) = eliminate(&gens, &names[..l], &config).map_err(|e| e.to_string())?;
            let same = if elim.generators.is_empty() {
                subset.is_empty()
            } else {
                let (relex, _) = buchberger(&elim.generators, &lex, &config).map_err(|e| e.to_string())?;
                let mut a: Vec<String> = relex.generators.iter().map(|g| g.to_text(&lex)).collect();
                let mut b: Vec<String> = subset.iter().map(|g| g.to_text(&lex)).collect();
                a.sort();
                b.sort();
                a == b
            };
            subsets += 1;
            subsets_ok += same as usize;
        }
    }
    check(
        ideals == 20 && spolys_ok == 20 && subsets_ok == subsets,
        format!("{ideals} ideals: S-polynomials reduce to zero in {spolys_ok}, elimination subsets match lex recomputation {subsets_ok}/{subsets}"),
    )
}

fn template_sizes() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (p, reference) in [("fef", "21x36"), ("ef", "6x15"), ("efk", "51x70")] {
        let o = bin().args(["bench", p, "-n", "20"]).output().map_err(|e| e.to_string())?;
        let out = String::from_utf8_lossy(&o.stdout).into_owned();
        let line = out.lines().find(|l| l.starts_with("template ")).unwrap_or("").to_string();
        ok &= o.status.success() && line.contains(&format!("(reference {reference})")) && line.contains("nonzeros");
        parts.push(format!("{p}: {line}"));
    }
    check(ok, parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("derive fef --verify reproduces cubic and quintic", derive_fef_cli),
        ("E+f generators ideal-equal to the four minors", ef_ideal_equality),
        ("E+f+k census 14 = 3 + 2 + 9", efk_census),
        ("quotient basis sizes 15/9/19, Hf quartic", quotient_counts),
        ("noise-free stability, 1000 instances per problem", noise_free_stability),
        ("f+E+f action vs Sylvester on 100 instances", cross_path),
        ("focal extraction formulas", focal_formulas),
        ("lambda under noise (ground truth -0.3)", lambda_noise),
        ("Groebner property suite", groebner_properties),
        ("template size report", template_sizes),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{secs:.1}s]", k + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{secs:.1}s]", k + 1)
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
