//! Haar-random orthogonal and unitary matrices and a Monte-Carlo check of
//! the orthogonal first and second moment operators.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pi_operator, swap_operator, trace_product};
use crate::rng::{par_indexed, SeedPath};
use crate::scalar::{cr, CMatrix, RMatrix, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Orthogonal,
    Unitary,
}

#[derive(Clone, Debug)]
pub enum SampledMatrix<T: Real> {
    Orthogonal(RMatrix<T>),
    Unitary(CMatrix<T>),
}

impl<T: Real> SampledMatrix<T> {
    pub fn to_complex(&self) -> CMatrix<T> {
        match self {
            Self::Orthogonal(o) => o.map(cr),
            Self::Unitary(u) => u.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandomMatrixSample<T: Real> {
    pub kind: GroupKind,
    pub d: usize,
    pub matrix: SampledMatrix<T>,
    pub seed_path: SeedPath,
}

/// First `k` columns of a Haar-random real orthogonal `rows`×`rows` matrix.
pub fn orthogonal_frame<T: Real, R: Rng + ?Sized>(rows: usize, k: usize, rng: &mut R) -> RMatrix<T> {
    let g = RMatrix::<T>::from_fn(rows, k, |_, _| T::sample_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)] < T::zero() {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// First `k` columns of a Haar-random unitary `rows`×`rows` matrix.
pub fn unitary_frame<T: Real, R: Rng + ?Sized>(rows: usize, k: usize, rng: &mut R) -> CMatrix<T> {
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let g = CMatrix::<T>::from_fn(rows, k, |_, _| {
        C::new(T::sample_normal(rng) * s, T::sample_normal(rng) * s)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        let rjj = r[(j, j)];
        let norm = rjj.norm_sqr().sqrt();
        if norm > T::zero() {
            let phase = rjj / cr(norm);
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Haar-random element of O(d): Gaussian QR with sign(R_jj) correction.
pub fn orthogonal<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> RMatrix<T> {
    orthogonal_frame(d, d, rng)
}

/// Haar-random element of U(d): complex Gaussian QR with phase correction.
pub fn unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    unitary_frame(d, d, rng)
}

pub fn sample_orthogonal<T: Real>(d: usize, path: SeedPath) -> Result<RandomMatrixSample<T>> {
    check_dim(d)?;
    Ok(RandomMatrixSample {
        kind: GroupKind::Orthogonal,
        d,
        matrix: SampledMatrix::Orthogonal(orthogonal(d, &mut path.rng())),
        seed_path: path,
    })
}

pub fn sample_unitary<T: Real>(d: usize, path: SeedPath) -> Result<RandomMatrixSample<T>> {
    check_dim(d)?;
    Ok(RandomMatrixSample {
        kind: GroupKind::Unitary,
        d,
        matrix: SampledMatrix::Unitary(unitary(d, &mut path.rng())),
        seed_path: path,
    })
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Dimension(format!("group dimension {d} < 2")));
    }
    Ok(())
}

/// Coefficients of ∫ O⊗O 𝒜 (O⊗O)ᵀ dO = γ₁ I + γ₂ S + γ₃ Π.
///
/// Real for Hermitian 𝒜; kept complex for general input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondMomentCoeffs<T: Real> {
    pub gamma1: C<T>,
    pub gamma2: C<T>,
    pub gamma3: C<T>,
}

pub fn orthogonal_second_moment_coeffs<T: Real>(a2: &CMatrix<T>) -> Result<SecondMomentCoeffs<T>> {
    let n = a2.nrows();
    let d = (n as f64).sqrt().round() as usize;
    if a2.ncols() != n || d * d != n {
        return Err(Error::Shape {
            expected: d * d,
            rows: n,
            cols: a2.ncols(),
        });
    }
    check_dim(d)?;
    let ta = a2.trace();
    let ts = trace_product(&swap_operator(d), a2);
    let tp = trace_product(&pi_operator(d), a2);
    let df = T::lit(d as f64);
    let denom = cr(df * (df - T::one()) * (df + T::lit(2.0)));
    let d1 = cr(df + T::one());
    Ok(SecondMomentCoeffs {
        gamma1: (d1 * ta - ts - tp) / denom,
        gamma2: (d1 * ts - ta - tp) / denom,
        gamma3: (d1 * tp - ta - ts) / denom,
    })
}

/// tr(A)/d · I.
pub fn first_moment_prediction<T: Real>(a1: &CMatrix<T>) -> CMatrix<T> {
    let d = a1.nrows();
    CMatrix::<T>::identity(d, d) * (a1.trace() / cr(T::lit(d as f64)))
}

pub fn second_moment_prediction<T: Real>(a2: &CMatrix<T>) -> Result<CMatrix<T>> {
    let g = orthogonal_second_moment_coeffs(a2)?;
    let d = (a2.nrows() as f64).sqrt().round() as usize;
    Ok(CMatrix::<T>::identity(d * d, d * d) * g.gamma1
        + swap_operator::<T>(d) * g.gamma2
        + pi_operator::<T>(d) * g.gamma3)
}

/// One row of the sampler validation report.
#[derive(Clone, Debug, Serialize)]
pub struct HaarCheck {
    pub operator_id: String,
    pub moment: u32,
    pub max_abs_dev: f64,
    /// Standard error of the entry with the largest deviation.
    pub std_err: f64,
    /// Largest |deviation| / standard error over entries.
    pub max_z: f64,
    pub pass: bool,
}

type Battery = Vec<(String, RMatrix<f64>)>;

fn test_battery(d: usize) -> (Battery, Battery) {
    let unit = |i: usize, j: usize| {
        let mut m = RMatrix::<f64>::zeros(d, d);
        m[(i, j)] = 1.0;
        m
    };
    let h = (d as f64 / 2.0).sqrt();
    let diag_pm = (unit(0, 0) - unit(d - 1, d - 1)) * h;
    let first = vec![
        ("proj0".to_string(), unit(0, 0)),
        ("diag_pm".to_string(), diag_pm.clone()),
        ("sym01".to_string(), unit(0, 1) + unit(1, 0)),
    ];
    let second = vec![
        ("diag_pm_x_diag_pm".to_string(), diag_pm.kronecker(&diag_pm)),
        ("proj00".to_string(), unit(0, 0).kronecker(&unit(0, 0))),
        (
            "proj0_x_sym01".to_string(),
            unit(0, 0).kronecker(&(unit(0, 1) + unit(1, 0))),
        ),
    ];
    (first, second)
}

/// Monte-Carlo check of the first and second orthogonal moments over a fixed battery.
///
/// Every matrix entry must lie within three standard errors of the prediction.
pub fn verify_haar_sampler(d: usize, n_samples: usize, seed: u64) -> Result<Vec<HaarCheck>> {
    check_dim(d)?;
    if n_samples < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    let (first, second) = test_battery(d);
    let ops: Vec<&RMatrix<f64>> = first.iter().chain(&second).map(|(_, m)| m).collect();
    let sizes: Vec<usize> = ops.iter().map(|m| m.len()).collect();
    let width: usize = sizes.iter().sum();

    const CHUNK: usize = 256;
    let n_chunks = n_samples.div_ceil(CHUNK);
    let partials = par_indexed(n_chunks, |c| {
        let mut sum = vec![0.0; width];
        let mut sq = vec![0.0; width];
        for i in c * CHUNK..((c + 1) * CHUNK).min(n_samples) {
            let o: RMatrix<f64> = orthogonal(d, &mut SeedPath::new(seed, i as u64).rng());
            let oo = o.kronecker(&o);
            let mut off = 0;
            for (k, a) in ops.iter().enumerate() {
                let rot = if k < first.len() {
                    &o * *a * o.transpose()
                } else {
                    &oo * *a * oo.transpose()
                };
                for (j, &x) in rot.iter().enumerate() {
                    sum[off + j] += x;
                    sq[off + j] += x * x;
                }
                off += sizes[k];
            }
        }
        (sum, sq)
    });
    let mut sum = vec![0.0; width];
    let mut sq = vec![0.0; width];
    for (s, q) in partials {
        for j in 0..width {
            sum[j] += s[j];
            sq[j] += q[j];
        }
    }

    let nf = n_samples as f64;
    let mut report = Vec::new();
    let mut off = 0;
    for (k, (id, a)) in first.iter().chain(&second).enumerate() {
        let ac = a.map(cr);
        let pred = if k < first.len() {
            first_moment_prediction(&ac)
        } else {
            second_moment_prediction(&ac)?
        };
        let (mut max_dev, mut se_at, mut max_z, mut pass) = (0.0f64, 0.0, 0.0f64, true);
        for (j, p) in pred.iter().enumerate() {
            let mean = sum[off + j] / nf;
            let var = ((sq[off + j] / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
            let se = (var / nf).sqrt();
            let dev = (mean - p.re).abs();
            if dev > max_dev {
                max_dev = dev;
                se_at = se;
            }
            if se > 0.0 {
                max_z = max_z.max(dev / se);
            }
            if dev > 3.0 * se + 1e-12 {
                pass = false;
            }
        }
        report.push(HaarCheck {
            operator_id: id.clone(),
            moment: if k < first.len() { 1 } else { 2 },
            max_abs_dev: max_dev,
            std_err: se_at,
            max_z,
            pass,
        });
        off += sizes[k];
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_norm, unitarity_residual};

    #[test]
    fn deterministic_and_orthogonal() {
        let a = sample_orthogonal::<f64>(4, SeedPath::new(1, 2)).unwrap();
        let b = sample_orthogonal::<f64>(4, SeedPath::new(1, 2)).unwrap();
        let (SampledMatrix::Orthogonal(ma), SampledMatrix::Orthogonal(mb)) = (a.matrix, b.matrix) else {
            panic!()
        };
        assert_eq!(ma, mb);
        let res = (ma.transpose() * &ma - RMatrix::<f64>::identity(4, 4)).norm();
        assert!(res < 1e-10);
        let u = sample_unitary::<f64>(3, SeedPath::new(1, 2))
            .unwrap()
            .matrix
            .to_complex();
        assert!(unitarity_residual(&u) < 1e-10);
        assert!(sample_orthogonal::<f64>(1, SeedPath::new(0, 0)).is_err());
    }

    #[test]
    fn frames_have_orthonormal_columns() {
        let mut rng = SeedPath::new(3, 0).rng();
        let f: RMatrix<f64> = orthogonal_frame(10, 3, &mut rng);
        assert!((f.transpose() * &f - RMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
        let g: CMatrix<f64> = unitary_frame(10, 4, &mut rng);
        assert!(hs_norm(&(g.adjoint() * &g - CMatrix::<f64>::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn coefficient_examples() {
        let d = 3;
        let g = orthogonal_second_moment_coeffs(&CMatrix::<f64>::identity(9, 9)).unwrap();
        assert!((g.gamma1.re - 1.0).abs() < 1e-14 && g.gamma2.norm() < 1e-14 && g.gamma3.norm() < 1e-14);
        let g = orthogonal_second_moment_coeffs(&swap_operator::<f64>(d)).unwrap();
        assert!(g.gamma1.norm() < 1e-14 && (g.gamma2.re - 1.0).abs() < 1e-14 && g.gamma3.norm() < 1e-14);
        let h = 1.5f64.sqrt();
        let m = CMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(h), cr(0.0), cr(-h)]));
        let g = orthogonal_second_moment_coeffs(&m.kronecker(&m)).unwrap();
        assert!((g.gamma1.re + 0.2).abs() < 1e-12);
        assert!((g.gamma2.re - 0.3).abs() < 1e-12);
        assert!((g.gamma3.re - 0.3).abs() < 1e-12);
        assert!(orthogonal_second_moment_coeffs(&CMatrix::<f64>::identity(8, 8)).is_err());
    }

    #[test]
    fn coefficients_solve_linear_system() {
        let d = 3;
        let a = CMatrix::<f64>::from_fn(9, 9, |i, j| crate::scalar::c((i * 3 + j * 5 % 7) as f64, 0.0));
        let g = orthogonal_second_moment_coeffs(&a).unwrap();
        let s = swap_operator::<f64>(d);
        let p = pi_operator::<f64>(d);
        let df = d as f64;
        let lhs = [
            (g.gamma1 * df + g.gamma2 + g.gamma3) * df,
            (g.gamma1 + g.gamma2 * df + g.gamma3) * df,
            (g.gamma1 + g.gamma2 + g.gamma3 * df) * df,
        ];
        let rhs = [a.trace(), trace_product(&s, &a), trace_product(&p, &a)];
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-10);
        }
    }

    #[test]
    fn determinant_balance() {
        let neg = (0..4000)
            .filter(|&i| {
                let o: RMatrix<f64> = orthogonal(3, &mut SeedPath::new(11, i).rng());
                o.determinant() < 0.0
            })
            .count();
        let frac = neg as f64 / 4000.0;
        // 4 standard deviations of a fair coin at n = 4000.
        assert!((frac - 0.5).abs() < 0.032, "{frac}");
    }

    #[test]
    fn rejects_tiny_sample_count() {
        assert!(verify_haar_sampler(3, 0, 1).is_err());
    }
}
