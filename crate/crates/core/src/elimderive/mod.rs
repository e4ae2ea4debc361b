//! The four covered problems: their input constraint systems, the derivation
//! of elimination-ideal generators, and checks against reference polynomials.
//!
//! Conventions: `F` is indexed `f11..f33` row-major, `w = 1/f²`, and the
//! essential matrix is `K·F·K` (f+E+f) or `F·K` (E+f, E+f+k) with
//! `K = diag(f, f, 1)`. Both trace constraints are written with
//! `Q = diag(1, 1, w)`, which is `diag(f², f², 1)` divided by `f²`.

pub mod exact;
mod matrix;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groebner::{
    buchberger, eliminate_saturated, ideals_equal, minimal_generators, reduce, GroebnerConfig, GroebnerError,
    GroebnerStats, IdealBasis,
};
use crate::polycore::{parse_listing, MonomialOrder, Poly, PolyError, Ring};

pub use matrix::PMat3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    Fef,
    Ef,
    Efk,
    Hf,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown problem `{0}` (expected fef, ef, efk or hf)")]
pub struct UnknownProblem(pub String);

impl FromStr for ProblemId {
    type Err = UnknownProblem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fef" => Ok(ProblemId::Fef),
            "ef" => Ok(ProblemId::Ef),
            "efk" => Ok(ProblemId::Efk),
            "hf" => Ok(ProblemId::Hf),
            _ => Err(UnknownProblem(s.to_string())),
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const F_NAMES: [&str; 9] = ["f11", "f12", "f13", "f21", "f22", "f23", "f31", "f32", "f33"];
const Y_NAMES: [&str; 3] = ["y13", "y23", "y33"];
const H_NAMES: [&str; 9] = ["h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8", "h9"];

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [ProblemId::Fef, ProblemId::Ef, ProblemId::Efk, ProblemId::Hf];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Fef => "fef",
            ProblemId::Ef => "ef",
            ProblemId::Efk => "efk",
            ProblemId::Hf => "hf",
        }
    }

    /// Number of complex solutions of a generic minimal instance.
    pub fn solution_count(self) -> usize {
        match self {
            ProblemId::Fef => 15,
            ProblemId::Ef => 9,
            ProblemId::Efk => 19,
            ProblemId::Hf => 4,
        }
    }

    /// Unknowns that appear linearly in the measurement equations.
    pub fn x_l(self) -> Vec<&'static str> {
        match self {
            ProblemId::Fef | ProblemId::Ef => F_NAMES.to_vec(),
            ProblemId::Efk => F_NAMES.iter().chain(Y_NAMES.iter()).copied().collect(),
            ProblemId::Hf => H_NAMES.to_vec(),
        }
    }

    /// Unknowns to eliminate.
    pub fn x_n(self) -> Vec<&'static str> {
        match self {
            ProblemId::Efk => vec!["w", "lambda"],
            _ => vec!["w"],
        }
    }

    /// Number of linear measurement equations of a minimal instance.
    pub fn measurements(self) -> usize {
        match self {
            ProblemId::Fef | ProblemId::Ef => 6,
            ProblemId::Efk | ProblemId::Hf => 7,
        }
    }

    /// Ring over `X_N ∪ X_L`, eliminated variables first.
    pub fn ambient(self) -> Arc<Ring> {
        let vars: Vec<&str> = self.x_n().into_iter().chain(self.x_l()).collect();
        Ring::new(&vars)
    }

    /// Ring over `X_L` only; derived generators live here.
    pub fn xl_ring(self) -> Arc<Ring> {
        Ring::new(&self.x_l())
    }

    /// Number of generators of the input system.
    pub fn constraint_count(self) -> usize {
        match self {
            ProblemId::Fef | ProblemId::Ef => 10,
            ProblemId::Efk => 13,
            ProblemId::Hf => 2,
        }
    }
}

/// A problem with its unknown partition and ambient ring.
#[derive(Clone, Debug)]
pub struct ElimProblem {
    pub id: ProblemId,
    pub ring: Arc<Ring>,
    pub x_l: Vec<String>,
    pub x_n: Vec<String>,
    pub solution_count: usize,
}

impl ElimProblem {
    pub fn new(id: ProblemId) -> Self {
        ElimProblem {
            id,
            ring: id.ambient(),
            x_l: id.x_l().into_iter().map(String::from).collect(),
            x_n: id.x_n().into_iter().map(String::from).collect(),
            solution_count: id.solution_count(),
        }
    }

    pub fn constraints(&self) -> Vec<Poly> {
        build_constraints(self.id)
    }

    /// The embedded canonical generators (over [`ProblemId::xl_ring`]).
    pub fn generators(&self) -> Vec<Poly> {
        golden_generators(self.id)
    }
}

fn f_matrix(ring: &Arc<Ring>) -> PMat3 {
    matrix::from_names(ring, [["f11", "f12", "f13"], ["f21", "f22", "f23"], ["f31", "f32", "f33"]])
}

/// Input system `F_N` over [`ProblemId::ambient`].
pub fn build_constraints(id: ProblemId) -> Vec<Poly> {
    let ring = id.ambient();
    match id {
        ProblemId::Fef => {
            let f = f_matrix(&ring);
            let q = matrix::q_diag(&ring, &Poly::named(&ring, "w"));
            let ft = matrix::transpose(&f);
            // 2·F Q Fᵀ Q F − tr(F Q Fᵀ Q)·F
            let fqftq = matrix::mul(&matrix::mul(&matrix::mul(&f, &q), &ft), &q);
            let cubic = matrix::mul(&fqftq, &f);
            let mut out = vec![matrix::det(&f)];
            out.extend(matrix::trace_combination(&cubic, &fqftq, &f));
            out
        }
        ProblemId::Ef | ProblemId::Efk => {
            let f = f_matrix(&ring);
            let q = matrix::q_diag(&ring, &Poly::named(&ring, "w"));
            let ft = matrix::transpose(&f);
            // 2·F Q Fᵀ F − tr(F Q Fᵀ)·F
            let fqft = matrix::mul(&matrix::mul(&f, &q), &ft);
            let cubic = matrix::mul(&fqft, &f);
            let mut out = vec![matrix::det(&f)];
            out.extend(matrix::trace_combination(&cubic, &fqft, &f));
            if id == ProblemId::Efk {
                out.extend(lifting(&ring));
            }
            out
        }
        ProblemId::Hf => {
            let v = |n: &str| Poly::named(&ring, n);
            let w2 = v("w").pow(2);
            let a = &(&w2 * &(&(&v("h1") * &v("h2")) + &(&v("h4") * &v("h5")))) + &(&v("h7") * &v("h8"));
            let sq = |n: &str| v(n).pow(2);
            let b1 = &(&w2 * &(&(&sq("h1") + &sq("h4")) - &(&sq("h2") + &sq("h5")))) + &sq("h7");
            let b = &b1 - &sq("h8");
            vec![a, b]
        }
    }
}

/// The f+E+f or E+f system written in the focal length itself, with
/// `E = K·F·K` or `E = F·K` and `K = diag(f, f, 1)`, over `f, f11..f33`.
///
/// Here the `f = 0` component is spurious and saturation by `f` is essential;
/// in the `w` form of [`build_constraints`] it is not.
pub fn build_constraints_focal(id: ProblemId) -> Option<(Arc<Ring>, Vec<Poly>)> {
    if !matches!(id, ProblemId::Fef | ProblemId::Ef) {
        return None;
    }
    let vars: Vec<&str> = std::iter::once("f").chain(F_NAMES).collect();
    let ring = Ring::new(&vars);
    let f = f_matrix(&ring);
    let fv = Poly::named(&ring, "f");
    let z = || Poly::zero(&ring);
    let k: PMat3 = [[fv.clone(), z(), z()], [z(), fv.clone(), z()], [z(), z(), Poly::one(&ring)]];
    let e = match id {
        ProblemId::Fef => matrix::mul(&matrix::mul(&k, &f), &k),
        _ => matrix::mul(&f, &k),
    };
    let eet = matrix::mul(&e, &matrix::transpose(&e));
    let mut out = vec![matrix::det(&f)];
    out.extend(matrix::trace_combination(&matrix::mul(&eet, &e), &eet, &e));
    Some((ring, out))
}

/// `y_i3 − f_i3·λ` for i = 1, 2, 3.
fn lifting(ring: &Arc<Ring>) -> Vec<Poly> {
    let lam = Poly::named(ring, "lambda");
    ["1", "2", "3"]
        .iter()
        .map(|i| &Poly::named(ring, &format!("y{i}3")) - &(&Poly::named(ring, &format!("f{i}3")) * &lam))
        .collect()
}

/// How the E+f+k generators are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EfkStrategy {
    /// Saturate the full 13-equation system by `w·λ` and eliminate `{w, λ}` at once.
    #[default]
    Direct,
    /// Start from the E+f generators, adjoin the lifting, saturate by λ and
    /// eliminate λ. Yields the same ideal.
    Staged,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DeriveOptions {
    pub groebner: GroebnerConfig,
    pub efk: EfkStrategy,
}

/// Outcome of a derivation.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub id: ProblemId,
    /// Minimal generators over [`ProblemId::xl_ring`], ascending degree.
    pub generators: Vec<Poly>,
    /// Gröbner basis of the elimination ideal (grevlex on `X_L`).
    pub basis: IdealBasis,
    pub stats: Vec<GroebnerStats>,
    pub elapsed: Duration,
}

impl Derivation {
    pub fn degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree().unwrap_or(0)).collect()
    }

    pub fn summary(&self) -> String {
        let degs: Vec<String> = self.degrees().iter().map(|d| format!("degree {d}")).collect();
        format!("{} generators: {}", self.generators.len(), degs.join(", "))
    }
}

/// Saturate by the product of `X_N`, eliminate `X_N`, extract minimal generators.
pub fn derive_generators(id: ProblemId, opts: &DeriveOptions) -> Result<Derivation, GroebnerError> {
    let start = Instant::now();
    let xl = id.xl_ring();
    let mut stats = Vec::new();
    let elim = if id == ProblemId::Efk && opts.efk == EfkStrategy::Staged {
        let ef = derive_generators(ProblemId::Ef, opts)?;
        stats.extend(ef.stats);
        let ring = id.ambient();
        let mut gens: Vec<Poly> = ef
            .generators
            .iter()
            .map(|g| g.rename_into(&ring).expect("E+f ring embeds"))
            .collect();
        gens.extend(lifting(&ring));
        let (b, s) = eliminate_saturated(&gens, &Poly::named(&ring, "lambda"), &["lambda"], &opts.groebner)?;
        stats.push(s);
        b
    } else {
        let ring = id.ambient();
        let gens = build_constraints(id);
        let sat = id.x_n().iter().fold(Poly::one(&ring), |acc, v| &acc * &Poly::named(&ring, v));
        let (b, s) = eliminate_saturated(&gens, &sat, &id.x_n(), &opts.groebner)?;
        stats.push(s);
        b
    };
    let generators: Vec<Poly> = elim
        .generators
        .iter()
        .map(|g| g.rename_into(&xl).expect("no eliminated variable survives"))
        .collect();
    let basis = IdealBasis { ring: xl.clone(), generators, order: MonomialOrder::grevlex(xl.nvars()), reduced: true };
    let generators = minimal_generators(&basis, &opts.groebner)?;
    Ok(Derivation { id, generators, basis, stats, elapsed: start.elapsed() })
}

const FEF_PRINTED: &str = include_str!("../../data/fef_printed.txt");
const HF_PRINTED: &str = include_str!("../../data/hf_printed.txt");
const FEF_GOLDEN: &str = include_str!("../../data/fef.gens");
const EF_GOLDEN: &str = include_str!("../../data/ef.gens");
const EFK_GOLDEN: &str = include_str!("../../data/efk.gens");
const HF_GOLDEN: &str = include_str!("../../data/hf.gens");

/// Frozen derived generators shipped with the crate.
pub fn golden_generators(id: ProblemId) -> Vec<Poly> {
    let text = match id {
        ProblemId::Fef => FEF_GOLDEN,
        ProblemId::Ef => EF_GOLDEN,
        ProblemId::Efk => EFK_GOLDEN,
        ProblemId::Hf => HF_GOLDEN,
    };
    parse_listing(text, &id.xl_ring()).expect("embedded listing parses")
}

/// Golden file name under the crate's `data/` directory.
pub fn golden_file_name(id: ProblemId) -> String {
    format!("{}.gens", id.name())
}

/// Canonical listing text for derived generators (the golden-file format).
pub fn golden_listing(d: &Derivation) -> String {
    let order = MonomialOrder::grevlex(d.id.xl_ring().nvars());
    let header = vec![format!("problem: {}", d.id), d.summary()];
    crate::polycore::format_listing(&d.generators, &order, &header)
}

/// Polynomials as printed in the literature (f+E+f: cubic and quintic; Hf: the quartic).
pub fn printed_reference(id: ProblemId) -> Option<Vec<Poly>> {
    let text = match id {
        ProblemId::Fef => FEF_PRINTED,
        ProblemId::Hf => HF_PRINTED,
        _ => return None,
    };
    Some(parse_listing(text, &id.xl_ring()).expect("embedded listing parses"))
}

/// The four maximal minors of the 3×4 matrix whose first three columns are
/// the rows of `F` and whose last column holds the cross inner products of
/// those rows. (With `E = F·K` the relevant Gram data is that of the
/// columns of `Fᵀ`, so the reference matrix is built on `Fᵀ`.)
pub fn ef_reference_minors() -> Vec<Poly> {
    let r = ProblemId::Ef.xl_ring();
    let f = f_matrix(&r);
    let ft = matrix::transpose(&f);
    // columns c1..c3 of the 3×4 matrix are the columns of Fᵀ, i.e. the rows of F
    let c: Vec<[Poly; 3]> = (0..3).map(|j| [ft[0][j].clone(), ft[1][j].clone(), ft[2][j].clone()]).collect();
    let dot = |a: usize, b: usize| {
        let mut s = Poly::zero(&r);
        for k in 0..3 {
            s = &s + &(&ft[a][k] * &ft[b][k]);
        }
        s
    };
    let c4 = [dot(1, 2), -dot(0, 2), Poly::zero(&r)];
    let cols = [&c[0], &c[1], &c[2], &c4];
    vec![
        matrix::minor([cols[0], cols[1], cols[2]]),
        matrix::minor([cols[0], cols[1], cols[3]]),
        matrix::minor([cols[0], cols[2], cols[3]]),
        matrix::minor([cols[1], cols[2], cols[3]]),
    ]
}

/// `f_i3·y_j3 − f_j3·y_i3` for i < j.
pub fn efk_reference_quadrics() -> Vec<Poly> {
    let r = ProblemId::Efk.xl_ring();
    let v = |n: String| Poly::named(&r, &n);
    [(1, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(i, j)| &(&v(format!("f{i}3")) * &v(format!("y{j}3"))) - &(&v(format!("f{j}3")) * &v(format!("y{i}3"))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub problem: ProblemId,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "ok" } else { "MISMATCH" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// Compare derived generators with the problem's reference data.
///
/// f+E+f and Hf: each printed polynomial must equal a derived generator up
/// to a rational scalar. E+f: two-sided ideal equality with the four
/// maximal minors (eight reductions). E+f+k: generator census and the
/// quadric pattern.
pub fn verify_reference(id: ProblemId, derived: &[Poly], config: &GroebnerConfig) -> Result<VerificationReport, VerifyError> {
    let mut checks = Vec::new();
    let ring = id.xl_ring();
    let order = MonomialOrder::grevlex(ring.nvars());
    match id {
        ProblemId::Fef | ProblemId::Hf => {
            let printed = printed_reference(id).expect("reference exists");
            checks.push(check(
                "generator count",
                derived.len() == printed.len(),
                format!("{} derived, {} printed", derived.len(), printed.len()),
            ));
            for (k, p) in printed.iter().enumerate() {
                let hit = derived.iter().position(|d| d.is_scalar_multiple_of(p));
                checks.push(check(
                    format!("printed #{} (degree {}, {} terms)", k + 1, p.degree().unwrap_or(0), p.num_terms()),
                    hit.is_some(),
                    match hit {
                        Some(i) => format!("equals derived generator #{} up to scalar", i + 1),
                        None => format!("no derived generator is a scalar multiple of {}", p.to_text(&order)),
                    },
                ));
            }
        }
        ProblemId::Ef => {
            let minors = ef_reference_minors();
            let (gd, _) = buchberger(derived, &order, config)?;
            let (gm, _) = buchberger(&minors, &order, config)?;
            for (k, m) in minors.iter().enumerate() {
                let ok = reduce(m, &gd).is_zero();
                checks.push(check(format!("minor #{} in derived ideal", k + 1), ok, format!("degree {}", m.degree().unwrap_or(0))));
            }
            for (k, d) in derived.iter().enumerate() {
                let ok = reduce(d, &gm).is_zero();
                checks.push(check(format!("derived #{} in minors ideal", k + 1), ok, format!("degree {}", d.degree().unwrap_or(0))));
            }
            let degs: Vec<u32> = derived.iter().filter_map(|d| d.degree()).collect();
            checks.push(check("one cubic, three quartics", degs == [3, 4, 4, 4], format!("{degs:?}")));
        }
        ProblemId::Efk => {
            let degs: Vec<u32> = derived.iter().filter_map(|d| d.degree()).collect();
            let count = |d: u32| degs.iter().filter(|&&x| x == d).count();
            checks.push(check("14 generators", derived.len() == 14, format!("{}", derived.len())));
            checks.push(check(
                "3 quadrics, 2 cubics, 9 quartics",
                (count(2), count(3), count(4)) == (3, 2, 9),
                format!("{} / {} / {}", count(2), count(3), count(4)),
            ));
            let quads: Vec<&Poly> = derived.iter().filter(|d| d.degree() == Some(2)).collect();
            for q in efk_reference_quadrics() {
                let hit = quads.iter().any(|d| d.is_scalar_multiple_of(&q));
                checks.push(check(format!("quadric {}", q.to_text(&order)), hit, if hit { "present" } else { "missing" }));
            }
            // the E+f generators, read in the larger ring, lie in the ideal
            let ef: Vec<Poly> = ef_reference_minors().iter().map(|m| m.rename_into(&ring)).collect::<Result<_, _>>()?;
            let (gd, _) = buchberger(derived, &order, config)?;
            let all_in = ef.iter().all(|m| reduce(m, &gd).is_zero());
            checks.push(check("E+f minors contained", all_in, "restriction to F"));
        }
    }
    Ok(VerificationReport { problem: id, checks })
}

/// Ideal equality of two generator sets over the problem's `X_L` ring.
pub fn same_ideal(a: &[Poly], b: &[Poly], config: &GroebnerConfig) -> Result<bool, GroebnerError> {
    ideals_equal(a, b, config)
}
