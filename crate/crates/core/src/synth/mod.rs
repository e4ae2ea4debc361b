//! Synthetic scenes with known ground truth, division-model distortion,
//! image noise and error metrics.
//!
//! Image coordinates are in focal-length units of a unit camera; "pixels"
//! assume an image 1000 px wide spanning two such units.

use std::io::{Read, Write};

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elimderive::ProblemId;
use crate::solvers::{required_correspondences, Correspondence, PoseSolution};

/// Size of one pixel in normalized image units.
pub const PIXEL: f64 = 2.0 / 1000.0;

pub fn pixels(px: f64) -> f64 {
    px * PIXEL
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no feasible scene after {0} attempts")]
    Infeasible(usize),
    #[error("no real distortion branch for λ·r² = {0}")]
    NoBranch(f64),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    /// Points are drawn from `[-half, half]^3`.
    pub cube_half: f64,
    pub focal_range: (f64, f64),
    pub lambda_range: (f64, f64),
    /// Overrides the random draw when set.
    pub focal: Option<f64>,
    pub lambda: Option<f64>,
    /// Extra camera distance beyond the cube's circumscribed sphere.
    pub distance_range: (f64, f64),
    pub jitter_deg: f64,
    /// Points per scene; defaults to the minimal count.
    pub points: Option<usize>,
    pub max_attempts: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            cube_half: 10.0,
            focal_range: (0.5, 5.0),
            lambda_range: (-0.7, 0.0),
            focal: None,
            lambda: None,
            distance_range: (5.0, 15.0),
            jitter_deg: 10.0,
            points: None,
            max_attempts: 100,
        }
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Config(m.into()));
        if !(self.cube_half > 0.0) {
            return bad("cube_half must be positive");
        }
        if !(self.focal_range.0 > 0.0 && self.focal_range.0 <= self.focal_range.1) {
            return bad("focal_range must be positive and ordered");
        }
        if !(self.lambda_range.0 <= self.lambda_range.1) {
            return bad("lambda_range must be ordered");
        }
        if matches!(self.focal, Some(f) if !(f > 0.0)) {
            return bad("focal must be positive");
        }
        if !(self.distance_range.0 >= 0.0 && self.distance_range.0 <= self.distance_range.1) {
            return bad("distance_range must be non-negative and ordered");
        }
        if !(0.0..90.0).contains(&self.jitter_deg) {
            return bad("jitter_deg must lie in [0, 90)");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive");
        }
        Ok(())
    }
}

/// World-to-camera pose: `X_cam = R·X + t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl Pose {
    fn r(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rotation[i][j])
    }

    fn t(&self) -> Vector3<f64> {
        Vector3::from(self.translation)
    }

    pub fn apply(&self, x: &[f64; 3]) -> Vector3<f64> {
        self.r() * Vector3::from(*x) + self.t()
    }
}

fn pose_from(r: &Matrix3<f64>, t: &Vector3<f64>) -> Pose {
    Pose { rotation: std::array::from_fn(|i| std::array::from_fn(|j| r[(i, j)])), translation: [t[0], t[1], t[2]] }
}

/// Ground truth of one scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneInstance {
    pub problem: ProblemId,
    pub seed: u64,
    /// Relative pose, left camera frame to right camera frame (for Hf: plane to camera).
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
    /// Pose of the left camera in the world (identity for Hf).
    pub left_pose: Pose,
    pub focal_left: f64,
    pub focal_right: f64,
    pub lambda: f64,
    pub points: Vec<[f64; 3]>,
    pub correspondences: Vec<Correspondence>,
}

impl SceneInstance {
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rotation[i][j])
    }

    pub fn translation_vector(&self) -> Vector3<f64> {
        Vector3::from(self.translation)
    }

    /// The unknown focal length of the problem.
    pub fn focal_gt(&self) -> f64 {
        self.focal_right
    }

    /// Ground-truth `F` (3×3), `F̂` (3×4) or `H` (3×3), row-major.
    pub fn ground_truth_matrix(&self) -> Vec<f64> {
        let r = self.rotation_matrix();
        let t = self.translation_vector();
        match self.problem {
            ProblemId::Hf => {
                let k = Matrix3::from_diagonal(&Vector3::new(self.focal_right, self.focal_right, 1.0));
                let mut m = Matrix3::zeros();
                m.set_column(0, &r.column(0));
                m.set_column(1, &r.column(1));
                m.set_column(2, &t);
                row_major(&(k * m))
            }
            _ => {
                // x_rᵀ [t]× R x_l = 0, so with x = left: E = ([t]× R)ᵀ
                let e = (t.cross_matrix() * r).transpose();
                let kl = Matrix3::from_diagonal(&Vector3::new(1.0 / self.focal_left, 1.0 / self.focal_left, 1.0));
                let kr = Matrix3::from_diagonal(&Vector3::new(1.0 / self.focal_right, 1.0 / self.focal_right, 1.0));
                let f = kl * e * kr;
                let mut v = row_major(&f);
                if self.problem == ProblemId::Efk {
                    let fh: Vec<f64> = (0..3).flat_map(|i| [f[(i, 0)], f[(i, 1)], f[(i, 2)], self.lambda * f[(i, 2)]]).collect();
                    v = fh;
                }
                v
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SynthError> {
        Ok(serde_json::from_str(s)?)
    }
}

fn row_major(m: &Matrix3<f64>) -> Vec<f64> {
    (0..3).flat_map(|i| (0..3).map(move |j| m[(i, j)])).collect()
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| StandardNormal.sample(rng));
        let n: f64 = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// Camera at distance `d` from the origin looking at it with jitter and random roll.
fn look_at_origin(rng: &mut ChaCha8Rng, centre: Vector3<f64>, jitter_deg: f64) -> (Matrix3<f64>, Vector3<f64>) {
    let mut axis = -centre.normalize();
    if jitter_deg > 0.0 {
        let perp = random_unit(rng).cross(&axis);
        if perp.norm() > 1e-9 {
            let angle = rng.random_range(0.0..=jitter_deg.to_radians());
            axis = Rotation3::from_axis_angle(&Unit::new_normalize(perp), angle) * axis;
        }
    }
    let seed = if axis.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let r1 = seed.cross(&axis).normalize();
    let roll = rng.random_range(0.0..std::f64::consts::TAU);
    let r1 = Rotation3::from_axis_angle(&Unit::new_normalize(axis), roll) * r1;
    let r2 = axis.cross(&r1);
    let r = Matrix3::from_rows(&[r1.transpose(), r2.transpose(), axis.transpose()]);
    let t = -(r * centre);
    (r, t)
}

/// Division-model inverse: the distorted point whose undistortion is `p`.
pub fn distort(p: [f64; 2], lambda: f64) -> Result<[f64; 2], SynthError> {
    let r2 = p[0] * p[0] + p[1] * p[1];
    let disc = 1.0 - 4.0 * lambda * r2;
    if disc < 0.0 {
        return Err(SynthError::NoBranch(lambda * r2));
    }
    // r_d = s·r_u with s the root of λ r_u² s² − s + 1 = 0 continuous at λ = 0
    let s = 2.0 / (1.0 + disc.sqrt());
    Ok([p[0] * s, p[1] * s])
}

/// `[x_d, y_d, 1 + λ(x_d² + y_d²)]`.
pub fn undistort(p: [f64; 2], lambda: f64) -> [f64; 3] {
    [p[0], p[1], 1.0 + lambda * (p[0] * p[0] + p[1] * p[1])]
}

/// A random feasible scene for `id`, deterministic in `seed`.
pub fn random_scene(id: ProblemId, config: &SceneConfig, seed: u64) -> Result<SceneInstance, SynthError> {
    config.validate()?;
    let n = config.points.unwrap_or_else(|| required_correspondences(id));
    if n < required_correspondences(id) {
        return Err(SynthError::Config(format!("{id} needs at least {} points", required_correspondences(id))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let focal = config.focal.unwrap_or_else(|| uniform(&mut rng, config.focal_range));
    let lambda = match id {
        ProblemId::Efk => config.lambda.unwrap_or_else(|| uniform(&mut rng, config.lambda_range)),
        _ => 0.0,
    };
    let h = config.cube_half;
    for _ in 0..config.max_attempts {
        let points: Vec<[f64; 3]> = (0..n)
            .map(|_| {
                let z = if id == ProblemId::Hf { 0.0 } else { rng.random_range(-h..=h) };
                [rng.random_range(-h..=h), rng.random_range(-h..=h), z]
            })
            .collect();
        let radius = if id == ProblemId::Hf { h * 2f64.sqrt() } else { h * 3f64.sqrt() };
        let place = |rng: &mut ChaCha8Rng| {
            let mut dir = random_unit(rng);
            if id == ProblemId::Hf {
                // keep the plane well inside the view: elevation of at least 30°
                while dir.z.abs() < 0.5 {
                    dir = random_unit(rng);
                }
            }
            let d = radius + uniform(rng, config.distance_range);
            look_at_origin(rng, dir * d, config.jitter_deg)
        };
        let (ra, ta) = place(&mut rng);
        let (rb, tb) = if id == ProblemId::Hf { (ra, ta) } else { place(&mut rng) };
        let (ra, ta) = if id == ProblemId::Hf { (Matrix3::identity(), Vector3::zeros()) } else { (ra, ta) };

        let project = |r: &Matrix3<f64>, t: &Vector3<f64>, f: f64, x: &[f64; 3]| -> Option<[f64; 2]> {
            let c = r * Vector3::from(*x) + t;
            (c.z > 1e-3 * h).then(|| [f * c.x / c.z, f * c.y / c.z])
        };
        let (fl, fr) = match id {
            ProblemId::Fef => (focal, focal),
            _ => (1.0, focal),
        };
        let mut corr = Vec::with_capacity(n);
        for x in &points {
            let right = project(&rb, &tb, fr, x);
            let left = if id == ProblemId::Hf { Some([x[0], x[1]]) } else { project(&ra, &ta, fl, x) };
            let (Some(left), Some(right)) = (left, right) else { break };
            let right = if id == ProblemId::Efk {
                match distort(right, lambda) {
                    Ok(p) => p,
                    Err(_) => break,
                }
            } else {
                right
            };
            corr.push(Correspondence { left, right });
        }
        if corr.len() < n {
            continue;
        }
        let r = rb * ra.transpose();
        let t = tb - r * ta;
        return Ok(SceneInstance {
            problem: id,
            seed,
            rotation: pose_from(&r, &t).rotation,
            translation: [t[0], t[1], t[2]],
            left_pose: pose_from(&ra, &ta),
            focal_left: if id == ProblemId::Hf { focal } else { fl },
            focal_right: fr,
            lambda,
            points,
            correspondences: corr,
        });
    }
    Err(SynthError::Infeasible(config.max_attempts))
}

/// Gaussian perturbation (std `sigma`, normalized units) of every coordinate.
pub fn add_noise(corr: &[Correspondence], sigma: f64, seed: u64) -> Vec<Correspondence> {
    if sigma <= 0.0 {
        return corr.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    corr.iter()
        .map(|c| Correspondence {
            left: [c.left[0] + normal.sample(&mut rng), c.left[1] + normal.sample(&mut rng)],
            right: [c.right[0] + normal.sample(&mut rng), c.right[1] + normal.sample(&mut rng)],
        })
        .collect()
}

/// Per-instance error record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub problem: ProblemId,
    pub seed: u64,
    pub sigma: f64,
    pub n_solutions: usize,
    /// NaN when no solution carries a focal length.
    pub log10_rel_f: f64,
    pub log10_rel_lambda: f64,
    pub failure: bool,
    /// Selected estimates (not written to CSV).
    #[serde(skip)]
    pub focal: Option<f64>,
    #[serde(skip)]
    pub lambda: Option<f64>,
}

/// Relative errors above this count as failures.
pub const FAILURE_THRESHOLD: f64 = 1e-3;
const LOG_FLOOR: f64 = -16.0;

fn log_err(e: f64) -> f64 {
    if e > 0.0 {
        e.log10().max(LOG_FLOOR)
    } else {
        LOG_FLOOR
    }
}

fn closest(values: impl Iterator<Item = f64>, gt: f64) -> Option<f64> {
    values.filter(|v| v.is_finite()).min_by(|a, b| (a - gt).abs().total_cmp(&(b - gt).abs()))
}

/// Relative error of the solution closest to ground truth (focal and λ chosen separately).
pub fn evaluate(solutions: &[PoseSolution], scene: &SceneInstance, sigma: f64) -> MetricsRecord {
    let fgt = scene.focal_gt();
    let focal = closest(solutions.iter().filter_map(|s| s.focal), fgt);
    let rel_f = focal.map(|f| (f - fgt).abs() / fgt);
    let (lambda, rel_l) = if scene.problem == ProblemId::Efk {
        let l = closest(solutions.iter().filter_map(|s| s.lambda), scene.lambda);
        let denom = if scene.lambda.abs() > 1e-12 { scene.lambda.abs() } else { 1.0 };
        (l, l.map(|l| (l - scene.lambda).abs() / denom))
    } else {
        (None, None)
    };
    let failure = solutions.is_empty()
        || rel_f.is_none_or(|e| !(e <= FAILURE_THRESHOLD))
        || (scene.problem == ProblemId::Efk && rel_l.is_none_or(|e| !(e <= FAILURE_THRESHOLD)));
    MetricsRecord {
        problem: scene.problem,
        seed: scene.seed,
        sigma,
        n_solutions: solutions.len(),
        log10_rel_f: rel_f.map_or(f64::NAN, log_err),
        log10_rel_lambda: rel_l.map_or(f64::NAN, log_err),
        failure,
        focal,
        lambda,
    }
}

/// Correspondences as CSV with header `x1,y1,x2,y2`.
pub fn write_correspondences<W: Write>(w: W, corr: &[Correspondence]) -> Result<(), SynthError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x1", "y1", "x2", "y2"])?;
    for c in corr {
        out.write_record([c.left[0], c.left[1], c.right[0], c.right[1]].iter().map(|v| format!("{v:.17e}")))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_correspondences<R: Read>(r: R) -> Result<Vec<Correspondence>, SynthError> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != ["x1", "y1", "x2", "y2"] {
        return Err(SynthError::Malformed(format!("expected header x1,y1,x2,y2, found {}", header.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(SynthError::Malformed(format!("row {} has {} fields", i + 1, rec.len())));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| SynthError::Malformed(format!("row {} is not four finite numbers", i + 1)))?;
        out.push(Correspondence { left: [v[0], v[1]], right: [v[2], v[3]] });
    }
    Ok(out)
}

/// Metrics as CSV with columns `problem,seed,sigma,n_solutions,log10_rel_f,log10_rel_lambda,failure`.
pub fn write_metrics<W: Write>(w: W, records: &[MetricsRecord]) -> Result<(), SynthError> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
