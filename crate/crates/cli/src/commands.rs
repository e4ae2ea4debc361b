use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use elimsolve::elimderive::{
    derive_generators, golden_file_name, golden_generators, golden_listing, verify_reference, DeriveOptions, EfkStrategy, ProblemId,
};
use elimsolve::groebner::GroebnerConfig;
use elimsolve::solvers::{nullspace_parametrize, required_correspondences, PoseSolution, Solver};
use elimsolve::synth::{add_noise, evaluate, pixels, random_scene, read_correspondences, write_correspondences, write_metrics, MetricsRecord, SceneConfig};
use elimsolve::templates::{build_template, bundled, quotient_basis, reference_size, SolverTemplate, TemplateOptions};
use serde::Serialize;

use crate::error::CliError;
use crate::report::{BenchSummary, LevelSummary, RunConfig, TemplateReport};
use crate::{BenchArgs, DeriveArgs, SolveArgs, SynthArgs, TemplateArgs, VerifyArgs};

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn derive(a: DeriveArgs) -> Result<(), CliError> {
    let id = a.problem.get()?;
    let mut opts = DeriveOptions::default();
    if let Some(p) = a.max_pairs {
        opts.groebner.max_pairs = p;
    }
    if let Some(b) = a.max_coeff_bits {
        opts.groebner.max_coeff_bits = b;
    }
    if a.staged {
        opts.efk = EfkStrategy::Staged;
    }
    let d = derive_generators(id, &opts)?;
    let listing = golden_listing(&d);
    print!("{listing}");
    println!("{}", d.summary());
    let pairs: usize = d.stats.iter().map(|s| s.pairs_processed).sum();
    println!("derived in {:.2}s ({pairs} critical pairs)", d.elapsed.as_secs_f64());
    if let Some(dir) = &a.out {
        let path = dir.join(golden_file_name(id));
        write_file(&path, &listing)?;
        println!("wrote {}", path.display());
    }
    if a.verify {
        let report = verify_reference(id, &d.generators, &opts.groebner)?;
        print!("{report}");
        let golden = golden_generators(id);
        let same = golden.len() == d.generators.len() && golden.iter().zip(&d.generators).all(|(g, h)| g.is_scalar_multiple_of(h));
        println!("[{}] bundled golden file: {}", if same { "ok" } else { "MISMATCH" }, if same { "identical" } else { "differs" });
        if !report.passed() || !same {
            let failed: Vec<String> = report.failures().map(|c| c.name.clone()).chain((!same).then(|| "golden file".into())).collect();
            return Err(CliError::Mismatch(failed.join(", ")));
        }
        println!("verification passed");
    }
    Ok(())
}

pub fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let id = a.problem.get()?;
    let golden = golden_generators(id);
    let report = verify_reference(id, &golden, &GroebnerConfig::default())?;
    print!("{report}");
    let mut failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
    for k in 0..a.instances {
        let seed = a.seed + k as u64;
        match quotient_basis(id, seed) {
            Ok(b) => println!("[ok] quotient basis, instance seed {seed}: {} standard monomials", b.len()),
            Err(e) => {
                println!("[MISMATCH] quotient basis, instance seed {seed}: {e}");
                failed.push(format!("quotient basis (seed {seed})"));
            }
        }
    }
    let t = bundled(id);
    let reference = reference_size(id).map_or("none".into(), |(r, c)| format!("{r}x{c}"));
    println!("bundled template {}x{} (reference {reference}), basis {}", t.rows, t.cols, t.basis_len());
    if failed.is_empty() {
        println!("verification passed");
        Ok(())
    } else {
        Err(CliError::Mismatch(failed.join(", ")))
    }
}

pub fn template(a: TemplateArgs) -> Result<(), CliError> {
    let id = a.problem.get()?;
    let mut opts = TemplateOptions::for_problem(id);
    opts.seed = a.seed;
    opts.validations = a.validations;
    if let Some(d) = a.degree_cap {
        opts.degree_cap = d;
    }
    let start = Instant::now();
    let t = build_template(id, &opts)?;
    let reference = reference_size(id).map_or("none".into(), |(r, c)| format!("{r}x{c}"));
    println!("template {}x{} (reference {reference})", t.rows, t.cols);
    println!("basis {}  action {}  degree {}", t.basis_len(), t.action, t.degree);
    println!("same as bundled: {}", t == bundled(id));
    println!("built in {:.2}s", start.elapsed().as_secs_f64());
    if let Some(path) = &a.out {
        write_file(path, &t.to_json())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load_solver(id: ProblemId, path: Option<&Path>) -> Result<OwnedOrShared, CliError> {
    match path {
        None => Ok(OwnedOrShared::Shared(Solver::bundled(id))),
        Some(p) => {
            if !p.exists() {
                return Err(CliError::Runtime(format!("template {} not found", p.display())));
            }
            let t = SolverTemplate::load(p)?;
            Ok(OwnedOrShared::Owned(Box::new(Solver::new(id, t)?)))
        }
    }
}

enum OwnedOrShared {
    Owned(Box<Solver>),
    Shared(&'static Solver),
}

impl std::ops::Deref for OwnedOrShared {
    type Target = Solver;

    fn deref(&self) -> &Solver {
        match self {
            OwnedOrShared::Owned(s) => s,
            OwnedOrShared::Shared(s) => s,
        }
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    config: &'a RunConfig,
    count: usize,
    solutions: &'a [PoseSolution],
}

pub fn solve(a: SolveArgs) -> Result<(), CliError> {
    let id = a.problem.get()?;
    let opts = a.tol.options()?;
    let file = File::open(&a.input).map_err(|e| CliError::Runtime(format!("cannot open {}: {e}", a.input.display())))?;
    let corr = read_correspondences(file)?;
    let need = required_correspondences(id);
    if corr.len() != need {
        return Err(CliError::Usage(format!("{id} takes {need} correspondences, {} has {}", a.input.display(), corr.len())));
    }
    let solver = load_solver(id, a.template.as_deref())?;
    let mut sols = solver.solve(&corr, &opts)?;
    sols.sort_by(|p, q| p.focal.unwrap_or(0.0).total_cmp(&q.focal.unwrap_or(0.0)));
    let mut config = RunConfig::new("solve", id);
    config.solve = opts;
    config.template = a.template.clone();
    config.input = Some(a.input.clone());
    config.out = a.out.clone();
    let text = serde_json::to_string_pretty(&SolveReport { config: &config, count: sols.len(), solutions: &sols })?;
    match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            println!("{} solutions written to {}", sols.len(), p.display());
        }
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        },
    }
    Ok(())
}

fn noise_seed(seed: u64, level: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (level as u64 + 1)
}

pub fn bench(a: BenchArgs) -> Result<(), CliError> {
    let id = a.problem.get()?;
    if a.n == 0 {
        return Err(CliError::Usage("-n must be at least 1".into()));
    }
    if a.sigma.is_empty() || a.sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(CliError::Usage("--sigma values must be finite and non-negative".into()));
    }
    if a.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let opts = a.tol.options()?;
    let scene_config = SceneConfig { lambda: a.lambda, focal: a.focal, ..Default::default() };
    scene_config.validate()?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    let solver = load_solver(id, a.template.as_deref())?;
    let start = Instant::now();

    let jobs: Vec<(usize, u64)> = (0..a.sigma.len()).flat_map(|l| (0..a.n as u64).map(move |i| (l, a.seed + i))).collect();
    let results: Mutex<Vec<Option<(MetricsRecord, Option<usize>)>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let first_error: Mutex<Option<CliError>> = Mutex::new(None);
    let threads = a.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).min(jobs.len());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= jobs.len() || first_error.lock().unwrap().is_some() {
                    break;
                }
                let (level, seed) = jobs[k];
                let sigma_px = a.sigma[level];
                let scene = match random_scene(id, &scene_config, seed) {
                    Ok(sc) => sc,
                    Err(e) => {
                        first_error.lock().unwrap().get_or_insert(e.into());
                        break;
                    }
                };
                let corr = add_noise(&scene.correspondences, pixels(sigma_px), noise_seed(seed, level));
                let sols = solver.solve(&corr, &opts).unwrap_or_default();
                let nonzeros = (level == 0)
                    .then(|| nullspace_parametrize(id, &corr).ok())
                    .flatten()
                    .map(|p| solver.template.nonzeros(&solver.instantiate(&p.basis)));
                let rec = evaluate(&sols, &scene, sigma_px);
                results.lock().unwrap()[k] = Some((rec, nonzeros));
            });
        }
    });
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    let results: Vec<(MetricsRecord, Option<usize>)> = results.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect();
    let seconds = start.elapsed().as_secs_f64();

    let nz: Vec<usize> = results.iter().filter_map(|r| r.1).collect();
    let template = TemplateReport {
        rows: solver.template.rows,
        cols: solver.template.cols,
        basis: solver.template.basis_len(),
        nonzeros: nz.iter().sum::<usize>() as f64 / nz.len().max(1) as f64,
        reference: reference_size(id),
    };
    let records: Vec<MetricsRecord> = results.into_iter().map(|r| r.0).collect();
    let levels = a
        .sigma
        .iter()
        .enumerate()
        .map(|(l, &s)| {
            let recs: Vec<&MetricsRecord> = records[l * a.n..(l + 1) * a.n].iter().collect();
            LevelSummary::from_records(s, &recs, id == ProblemId::Efk)
        })
        .collect();
    let mut config = RunConfig::new("bench", id);
    config.seed = a.seed;
    config.instances = a.n;
    config.sigma_px = a.sigma.clone();
    config.lambda = a.lambda;
    config.focal = a.focal;
    config.solve = opts;
    config.template = a.template.clone();
    config.out = a.out.clone();
    let summary = BenchSummary { config, template, levels, seconds };
    print!("{}", summary.render());
    if let Some(dir) = &a.out {
        let metrics = dir.join("metrics.csv");
        let f = File::create(&metrics).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", metrics.display())))?;
        write_metrics(BufWriter::new(f), &records)?;
        write_file(&dir.join("summary.json"), &serde_json::to_string_pretty(&summary)?)?;
        println!("wrote {} and summary.json", metrics.display());
    }
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<(), CliError> {
    let id = a.problem.get()?;
    if !(a.sigma.is_finite() && a.sigma >= 0.0) {
        return Err(CliError::Usage("--sigma must be finite and non-negative".into()));
    }
    let config = SceneConfig { lambda: a.lambda, focal: a.focal, ..Default::default() };
    let scene = random_scene(id, &config, a.seed)?;
    let corr = add_noise(&scene.correspondences, pixels(a.sigma), noise_seed(a.seed, 0));
    match &a.out {
        Some(dir) => {
            let stem = format!("{}_{}", id, a.seed);
            write_file(&dir.join(format!("{stem}.json")), &scene.to_json())?;
            let mut buf = Vec::new();
            write_correspondences(&mut buf, &corr)?;
            write_file(&dir.join(format!("{stem}.csv")), &String::from_utf8_lossy(&buf))?;
            println!("wrote {stem}.json and {stem}.csv to {}", dir.display());
            println!("focal {}  lambda {}", scene.focal_gt(), scene.lambda);
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_correspondences(&mut lock, &corr)?;
            lock.flush()?;
        }
    }
    Ok(())
}
