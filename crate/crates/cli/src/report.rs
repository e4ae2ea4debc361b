//! Run configuration and bench summaries.

use std::fmt::Write as _;
use std::path::PathBuf;

use elimsolve::elimderive::ProblemId;
use elimsolve::solvers::SolveOptions;
use elimsolve::synth::MetricsRecord;
use serde::Serialize;

/// Everything needed to reproduce a run; embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub problem: ProblemId,
    pub seed: u64,
    pub instances: usize,
    /// Noise levels in pixels (1 px = 0.002 normalized units).
    pub sigma_px: Vec<f64>,
    pub lambda: Option<f64>,
    pub focal: Option<f64>,
    pub solve: SolveOptions,
    pub template: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub version: &'static str,
}

impl RunConfig {
    pub fn new(subcommand: &str, problem: ProblemId) -> Self {
        RunConfig {
            subcommand: subcommand.into(),
            problem,
            seed: 0,
            instances: 0,
            sigma_px: Vec::new(),
            lambda: None,
            focal: None,
            solve: SolveOptions::default(),
            template: None,
            input: None,
            out: None,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub const QUANTILES: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

#[derive(Clone, Debug, Serialize)]
pub struct Quantiles {
    pub q10: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q90: f64,
}

impl Quantiles {
    pub fn of(values: impl Iterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        let [q10, q25, median, q75, q90] = QUANTILES.map(|q| quantile(&v, q));
        Quantiles { q10, q25, median, q75, q90 }
    }

    fn row(&self, prec: usize) -> String {
        [self.q10, self.q25, self.median, self.q75, self.q90].iter().map(|x| format!("{x:>9.prec$}")).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TemplateReport {
    pub rows: usize,
    pub cols: usize,
    pub basis: usize,
    /// Mean non-zero count of the filled template.
    pub nonzeros: f64,
    pub reference: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub sigma_px: f64,
    pub instances: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub mean_solutions: f64,
    pub log10_rel_f: Quantiles,
    pub log10_rel_lambda: Option<Quantiles>,
    /// Quantiles of the selected λ estimates (E+f+k).
    pub lambda: Option<Quantiles>,
}

impl LevelSummary {
    pub fn from_records(sigma_px: f64, records: &[&MetricsRecord], efk: bool) -> Self {
        let failures = records.iter().filter(|r| r.failure).count();
        let n = records.len();
        LevelSummary {
            sigma_px,
            instances: n,
            failures,
            failure_rate: if n == 0 { 0.0 } else { failures as f64 / n as f64 },
            mean_solutions: records.iter().map(|r| r.n_solutions as f64).sum::<f64>() / n.max(1) as f64,
            log10_rel_f: Quantiles::of(records.iter().map(|r| r.log10_rel_f)),
            log10_rel_lambda: efk.then(|| Quantiles::of(records.iter().map(|r| r.log10_rel_lambda))),
            lambda: efk.then(|| Quantiles::of(records.iter().filter_map(|r| r.lambda))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchSummary {
    pub config: RunConfig,
    pub template: TemplateReport,
    pub levels: Vec<LevelSummary>,
    pub seconds: f64,
}

impl BenchSummary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "problem {}  instances {}  seed {}  time {:.2}s", c.problem, c.instances, c.seed, self.seconds);
        let t = &self.template;
        let reference = t.reference.map_or("none".to_string(), |(r, c)| format!("{r}x{c}"));
        let _ = writeln!(
            s,
            "template {}x{} (reference {reference})  basis {}  nonzeros {:.1} of {}",
            t.rows,
            t.cols,
            t.basis,
            t.nonzeros,
            t.rows * t.cols
        );
        let header = format!("{:>9} {:>9} {:>9} {:>9} {:>9}", "q10", "q25", "median", "q75", "q90");
        for l in &self.levels {
            let _ = writeln!(
                s,
                "sigma {} px: failure rate {:.2}% ({}/{})  mean solutions {:.2}",
                l.sigma_px,
                100.0 * l.failure_rate,
                l.failures,
                l.instances,
                l.mean_solutions
            );
            let _ = writeln!(s, "  {:<18} {header}", "");
            let _ = writeln!(s, "  {:<18} {}", "log10 rel f", l.log10_rel_f.row(2));
            if let Some(q) = &l.log10_rel_lambda {
                let _ = writeln!(s, "  {:<18} {}", "log10 rel lambda", q.row(2));
            }
        }
        if self.levels.iter().any(|l| l.lambda.is_some()) {
            let _ = writeln!(s, "lambda estimates (ground truth {})", c.lambda.map_or("random".into(), |l| l.to_string()));
            let _ = writeln!(s, "  {:<10} {header}", "sigma px");
            for l in &self.levels {
                if let Some(q) = &l.lambda {
                    let _ = writeln!(s, "  {:<10} {}", l.sigma_px, q.row(4));
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(quantile(&v, 0.1), 1.4);
        assert!(quantile(&[], 0.5).is_nan());
        let q = Quantiles::of([f64::NAN, 2.0, 1.0].into_iter());
        assert_eq!(q.median, 1.5);
    }
}
