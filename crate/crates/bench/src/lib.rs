//! Fixtures and the template-size report shared by the criterion benches.

use elimsolve::elimderive::ProblemId;
use elimsolve::solvers::{nullspace_parametrize, Correspondence, Solver};
use elimsolve::synth::{random_scene, SceneConfig};
use elimsolve::templates::reference_size;

/// Noise-free minimal instances for seeds `0..n`.
pub fn instances(id: ProblemId, n: u64) -> Vec<Vec<Correspondence>> {
    (0..n).map(|s| random_scene(id, &SceneConfig::default(), s).expect("feasible scene").correspondences).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemplateSize {
    pub problem: ProblemId,
    pub rows: usize,
    pub cols: usize,
    /// Mean non-zeros of the filled template over the sampled instances.
    pub nonzeros: f64,
    pub reference: Option<(usize, usize)>,
}

impl TemplateSize {
    pub fn line(&self) -> String {
        let reference = self.reference.map_or("-".to_string(), |(r, c)| format!("{r}x{c}"));
        format!(
            "{:<4} ours {:>2}x{:<2}  nonzeros {:>7.1} / {:<5}  reference {}",
            self.problem.name(),
            self.rows,
            self.cols,
            self.nonzeros,
            self.rows * self.cols,
            reference
        )
    }
}

pub fn template_size(id: ProblemId, samples: u64) -> TemplateSize {
    let solver = Solver::bundled(id);
    let nz: Vec<usize> = instances(id, samples)
        .iter()
        .filter_map(|c| nullspace_parametrize(id, c).ok())
        .map(|p| solver.template.nonzeros(&solver.instantiate(&p.basis)))
        .collect();
    TemplateSize {
        problem: id,
        rows: solver.template.rows,
        cols: solver.template.cols,
        nonzeros: nz.iter().sum::<usize>() as f64 / nz.len().max(1) as f64,
        reference: reference_size(id),
    }
}

/// One line per problem: our template next to the reference size.
pub fn template_report(samples: u64) -> String {
    ProblemId::ALL.iter().map(|&id| template_size(id, samples).line() + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_lists_reference_sizes() {
        let r = template_report(3);
        assert!(r.contains("fef  ours 21x36"));
        assert!(r.contains("reference 6x15"));
        assert!(r.contains("reference 51x70"));
        assert_eq!(r.lines().count(), 4);
    }

    #[test]
    fn nonzeros_within_template() {
        let t = template_size(ProblemId::Efk, 3);
        assert!(t.nonzeros > 0.0 && t.nonzeros <= (t.rows * t.cols) as f64);
    }
}
