//! Exact rational ground-truth instances, used to check that derived
//! generators vanish on genuine solutions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::ProblemId;

pub type QMat3 = [[BigRational; 3]; 3];

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A nonzero rational with small numerator and denominator.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R, max: i64) -> BigRational {
    loop {
        let n = rng.random_range(-max..=max);
        if n != 0 {
            return BigRational::new(n.into(), rng.random_range(1..=max).into());
        }
    }
}

/// Rotation from an integer quaternion: every entry is rational.
pub fn rational_rotation<R: Rng + ?Sized>(rng: &mut R) -> QMat3 {
    let (a, b, c, d) = loop {
        let q: [i64; 4] = std::array::from_fn(|_| rng.random_range(-9..=9));
        if q.iter().any(|&x| x != 0) {
            break (int(q[0]), int(q[1]), int(q[2]), int(q[3]));
        }
    };
    let n = &a * &a + &b * &b + &c * &c + &d * &d;
    let two = int(2);
    let m = [
        [&a * &a + &b * &b - &c * &c - &d * &d, &two * (&b * &c - &a * &d), &two * (&b * &d + &a * &c)],
        [&two * (&b * &c + &a * &d), &a * &a - &b * &b + &c * &c - &d * &d, &two * (&c * &d - &a * &b)],
        [&two * (&b * &d - &a * &c), &two * (&c * &d + &a * &b), &a * &a - &b * &b - &c * &c + &d * &d],
    ];
    m.map(|row| row.map(|x| x / &n))
}

pub fn mat_mul(a: &QMat3, b: &QMat3) -> QMat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(BigRational::zero(), |s, k| s + &a[i][k] * &b[k][j]))
    })
}

pub fn skew(t: &[BigRational; 3]) -> QMat3 {
    let z = BigRational::zero;
    [
        [z(), -t[2].clone(), t[1].clone()],
        [t[2].clone(), z(), -t[0].clone()],
        [-t[1].clone(), t[0].clone(), z()],
    ]
}

pub fn diag(a: BigRational, b: BigRational, c: BigRational) -> QMat3 {
    let z = BigRational::zero;
    [[a, z(), z()], [z(), b, z()], [z(), z(), c]]
}

/// A ground-truth point of the problem's `X_L` ring together with the
/// eliminated parameters (f, λ) it was built from.
#[derive(Clone, Debug)]
pub struct ExactInstance {
    pub point: Vec<BigRational>,
    pub focal: BigRational,
    pub lambda: BigRational,
}

/// Random exact instance: rational rotation, translation, focal and distortion.
pub fn ground_truth<R: Rng + ?Sized>(id: ProblemId, rng: &mut R) -> ExactInstance {
    let r = rational_rotation(rng);
    let t: [BigRational; 3] = std::array::from_fn(|_| small_rational(rng, 9));
    let focal = small_rational(rng, 9).abs_val();
    let lambda = small_rational(rng, 9);
    let kinv = diag(BigRational::one() / &focal, BigRational::one() / &focal, BigRational::one());
    let e = mat_mul(&skew(&t), &r);
    let flat = |m: &QMat3| m.iter().flatten().cloned().collect::<Vec<_>>();
    let point = match id {
        ProblemId::Fef => flat(&mat_mul(&mat_mul(&kinv, &e), &kinv)),
        ProblemId::Ef => flat(&mat_mul(&e, &kinv)),
        ProblemId::Efk => {
            let f = mat_mul(&e, &kinv);
            let mut v = flat(&f);
            v.extend((0..3).map(|i| &f[i][2] * &lambda));
            v
        }
        ProblemId::Hf => {
            let k = diag(focal.clone(), focal.clone(), BigRational::one());
            let p = [[r[0][0].clone(), r[0][1].clone(), t[0].clone()], [r[1][0].clone(), r[1][1].clone(), t[1].clone()], [
                r[2][0].clone(),
                r[2][1].clone(),
                t[2].clone(),
            ]];
            flat(&mat_mul(&k, &p))
        }
    };
    ExactInstance { point, focal, lambda }
}

trait AbsVal {
    fn abs_val(self) -> Self;
}

impl AbsVal for BigRational {
    fn abs_val(self) -> Self {
        if self < BigRational::zero() {
            -self
        } else {
            self
        }
    }
}
