//! Sector moments of correlation tensors and their Monte-Carlo estimation
//! from simulated randomized measurements.

use nalgebra::DVector;
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::ggm::{imag_count, real_count, GgmBasis, Sector};
use crate::haar::{orthogonal, unitary};
use crate::linalg::{digits, hermitian_eigen, kron_all, real_singular_values, unitarity_residual};
use crate::rng::{par_indexed, SeedPath};
use crate::scalar::{c, cr, CMatrix, Real, C};
use crate::state::DensityMatrix;
use crate::tensor::{correlation_tensor, CorrelationTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    Real,
    Imaginary,
}

/// Traceless Hermitian observable with tr(M²) = d.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable<T: Real> {
    pub d: usize,
    pub matrix: CMatrix<T>,
    pub kind: ObservableKind,
}

impl<T: Real> Observable<T> {
    pub fn new(matrix: CMatrix<T>, kind: ObservableKind) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || d < 2 {
            return Err(Error::Shape {
                expected: d,
                rows: d,
                cols: matrix.ncols(),
            });
        }
        let tol = T::TOL.recon.max(1e-10);
        let herm = crate::linalg::hermiticity_residual(&matrix).as_f64();
        if herm > tol {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = matrix.trace().norm_sqr().sqrt().as_f64();
        let tr2 = crate::linalg::trace_product(&matrix, &matrix).re.as_f64();
        if tr > tol || (tr2 - d as f64).abs() > tol * d as f64 {
            return Err(Error::Parameter(format!(
                "observable needs tr M = 0 and tr M^2 = {d}, got {tr:.3e} and {tr2}"
            )));
        }
        let sym = match kind {
            ObservableKind::Real => &matrix - matrix.transpose(),
            ObservableKind::Imaginary => &matrix + matrix.transpose(),
        };
        if crate::linalg::hs_norm(&sym).as_f64() > tol {
            return Err(Error::Parameter(format!("observable is not {kind:?}")));
        }
        Ok(Self { d, matrix, kind })
    }
}

/// Tabulated real observables for d = 4..7 (three or four decimals) before rescaling.
pub fn tabulated_real_diagonal(d: usize) -> Option<&'static [f64]> {
    match d {
        4 => Some(&[1.357, 0.400, -0.400, -1.357]),
        5 => Some(&[1.444, 0.644, 0.0, -0.644, -1.444]),
        6 => Some(&[1.4966, 0.8719, -1.4966, -0.8719, 0.0, 0.0]),
        7 => Some(&[1.5041, 1.1125, -1.5041, -1.1125, 0.0, 0.0, 0.0]),
        _ => None,
    }
}

/// Factor √(d/Σkⱼ²) applied to the tabulated diagonal (1 for d = 2, 3).
pub fn real_observable_scale(d: usize) -> f64 {
    match tabulated_real_diagonal(d) {
        Some(k) => (d as f64 / k.iter().map(|x| x * x).sum::<f64>()).sqrt(),
        None => 1.0,
    }
}

/// Real diagonal observable and √(d/2)(−i|0⟩⟨d−1| + i|d−1⟩⟨0|).
pub fn default_observables<T: Real>(d: usize) -> Result<(Observable<T>, Observable<T>)> {
    let diag: Vec<f64> = match d {
        2 => vec![1.0, -1.0],
        3 => vec![1.5f64.sqrt(), 0.0, -(1.5f64.sqrt())],
        4..=7 => {
            let s = real_observable_scale(d);
            tabulated_real_diagonal(d).unwrap().iter().map(|k| k * s).collect()
        }
        _ => return Err(Error::Dimension(format!("no default observable for d={d}"))),
    };
    let real = CMatrix::<T>::from_diagonal(&DVector::from_iterator(d, diag.iter().map(|&x| c(x, 0.0))));
    let h = (d as f64 / 2.0).sqrt();
    let mut imag = CMatrix::<T>::zeros(d, d);
    imag[(0, d - 1)] = c(0.0, -h);
    imag[(d - 1, 0)] = c(0.0, h);
    Ok((
        Observable::new(real, ObservableKind::Real)?,
        Observable::new(imag, ObservableKind::Imaginary)?,
    ))
}

/// Sphere-integral normalizations for a local dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentConstants {
    pub d: usize,
    pub l: usize,
    pub lhat: usize,
    /// 1/L².
    pub v1: Ratio<i64>,
    /// 3/(L²(L+2)²).
    pub w: Ratio<i64>,
}

impl MomentConstants {
    pub fn v1_f64(&self) -> f64 {
        *self.v1.numer() as f64 / *self.v1.denom() as f64
    }

    pub fn w_f64(&self) -> f64 {
        *self.w.numer() as f64 / *self.w.denom() as f64
    }

    /// Γ²(L/2)/(4Γ²((L+2)/2)) evaluated directly.
    pub fn v1_gamma(&self) -> f64 {
        let h = self.l as f64 / 2.0;
        (2.0 * (ln_gamma(h) - ln_gamma(h + 1.0))).exp() / 4.0
    }

    /// 3Γ²(L/2)/(16Γ²((L+4)/2)) evaluated directly.
    pub fn w_gamma(&self) -> f64 {
        let h = self.l as f64 / 2.0;
        3.0 * (2.0 * (ln_gamma(h) - ln_gamma(h + 2.0))).exp() / 16.0
    }
}

/// Constants for 2 ≤ d ≤ 7.
pub fn moment_constants(d: usize) -> Result<MomentConstants> {
    if !(2..=7).contains(&d) {
        return Err(Error::Dimension(format!("moment constants need 2 <= d <= 7, got {d}")));
    }
    Ok(constants_unchecked(d))
}

pub(crate) fn constants_unchecked(d: usize) -> MomentConstants {
    let l = real_count(d);
    let li = l as i64;
    MomentConstants {
        d,
        l,
        lhat: imag_count(d),
        v1: Ratio::new(1, li * li),
        w: Ratio::new(3, li * li * (li + 2) * (li + 2)),
    }
}

/// W = 3/(L²(L+2)²) for any d ≥ 2.
pub fn w_constant(d: usize) -> f64 {
    let l = real_count(d) as f64;
    3.0 / (l * l * (l + 2.0) * (l + 2.0))
}

/// Normalized second moments of the three measurement sectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorMoments {
    /// (d²−1)^{-n} Σ over all-nonzero indices.
    pub r2: f64,
    /// L^{-n} Σ over all-real indices.
    pub q2: f64,
    /// L̂^{-n} Σ over all-imaginary indices.
    pub qhat2: f64,
    pub n: usize,
    pub d: usize,
}

/// Unnormalized sector sums (all nonzero, all real, all imaginary).
pub fn sector_sums<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> (T, T, T) {
    let dims = t.dims();
    let n = dims.n;
    let q = vec![dims.d * dims.d; n];
    let mut idx = vec![0; n];
    let (mut all, mut re, mut im) = (T::zero(), T::zero(), T::zero());
    for (flat, &v) in t.data().iter().enumerate() {
        if v == T::zero() {
            continue;
        }
        digits(flat, &q, &mut idx);
        let mut nonzero = true;
        let mut real = true;
        let mut imag = true;
        for &j in &idx {
            match basis.sector(j) {
                Sector::Identity => {
                    nonzero = false;
                    real = false;
                    imag = false;
                }
                Sector::Real => imag = false,
                Sector::Imaginary => real = false,
            }
        }
        let v2 = v * v;
        if nonzero {
            all += v2;
        }
        if real {
            re += v2;
        }
        if imag {
            im += v2;
        }
    }
    (all, re, im)
}

pub fn exact_sector_moments<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> SectorMoments {
    let dims = t.dims();
    let (all, re, im) = sector_sums(t, basis);
    let n = dims.n as i32;
    let d = dims.d;
    SectorMoments {
        r2: all.as_f64() / ((d * d - 1) as f64).powi(n),
        q2: re.as_f64() / (real_count(d) as f64).powi(n),
        qhat2: im.as_f64() / (imag_count(d) as f64).powi(n),
        n: dims.n,
        d,
    }
}

/// Singular values τ of the real-sector block T_R.
pub fn real_block_singular_values<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> Result<Vec<T>> {
    if t.dims().n != 2 {
        return Err(Error::Dimension("fourth moment needs a bipartite tensor".into()));
    }
    Ok(real_singular_values(&t.real_block(basis)?))
}

/// Q⁽⁴⁾ = W[2Στ⁴ + L⁴(Q⁽²⁾)²] of a bipartite tensor.
pub fn exact_fourth_moment<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> Result<f64> {
    sphere_moments(t, basis, 4)
}

/// S⁽²⁾ = V₁Στ² and S⁽⁴⁾ = W[2Στ⁴ + (Στ²)²].
pub fn sphere_moments<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>, order: u32) -> Result<f64> {
    let tau = real_block_singular_values(t, basis)?;
    let k = constants_unchecked(t.dims().d);
    let s2: f64 = tau.iter().map(|x| x.as_f64().powi(2)).sum();
    match order {
        2 => Ok(k.v1_f64() * s2),
        4 => {
            let s4: f64 = tau.iter().map(|x| x.as_f64().powi(4)).sum();
            Ok(k.w_f64() * (2.0 * s4 + s2 * s2))
        }
        _ => Err(Error::Parameter(format!("sphere moment order {order} not in {{2, 4}}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MeasurementKind {
    /// Haar-unitary settings, real observable.
    Rm,
    /// Haar-orthogonal settings, real observable.
    Rrm,
    /// Haar-orthogonal settings, imaginary observable.
    Prrm,
}

impl std::str::FromStr for MeasurementKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RM" => Ok(Self::Rm),
            "RRM" => Ok(Self::Rrm),
            "PRRM" => Ok(Self::Prrm),
            _ => Err(Error::Unknown {
                kind: "measurement kind",
                name: s.into(),
            }),
        }
    }
}

/// Exact moment matching a measurement protocol (t = 4 only for bipartite RRMs).
pub fn exact_moment<T: Real>(rho: &DensityMatrix<T>, kind: MeasurementKind, t: u32) -> Result<f64> {
    let basis = GgmBasis::new(rho.dims().d)?;
    let tensor = correlation_tensor(rho, &basis)?;
    let m = exact_sector_moments(&tensor, &basis);
    match (kind, t) {
        (MeasurementKind::Rm, 2) => Ok(m.r2),
        (MeasurementKind::Rrm, 2) => Ok(m.q2),
        (MeasurementKind::Prrm, 2) => Ok(m.qhat2),
        (MeasurementKind::Rrm, 4) => exact_fourth_moment(&tensor, &basis),
        _ => Err(Error::Parameter(format!("no closed form for {kind:?} at t={t}"))),
    }
}

/// tr(ρ ⊗ⱼ Aⱼ) without forming the product operator.
pub fn product_expectation<T: Real>(rho: &CMatrix<T>, locals: &[CMatrix<T>]) -> C<T> {
    let n = locals.len();
    let dims: Vec<usize> = locals.iter().map(|a| a.nrows()).collect();
    let total = rho.nrows();
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    let mut acc = cr(T::zero());
    for row in 0..total {
        digits(row, &dims, &mut a);
        for col in 0..total {
            let r = rho[(row, col)];
            if r == cr(T::zero()) {
                continue;
            }
            digits(col, &dims, &mut b);
            let mut p = r;
            for j in 0..n {
                p *= locals[j][(b[j], a[j])];
            }
            acc += p;
        }
    }
    acc
}

/// Expectation of ⊗ⱼ OⱼMⱼOⱼ† in ρ, exact (`n_shots = 0`) or shot-averaged.
pub fn expectation_value<T: Real, R: Rng + ?Sized>(
    rho: &DensityMatrix<T>,
    settings: &[CMatrix<T>],
    observables: &[CMatrix<T>],
    n_shots: usize,
    rng: &mut R,
) -> Result<T> {
    let dims = rho.dims();
    if settings.len() != dims.n || observables.len() != dims.n {
        return Err(Error::Dimension("need one setting and one observable per party".into()));
    }
    for u in settings.iter().chain(observables) {
        if u.nrows() != dims.d || u.ncols() != dims.d {
            return Err(Error::Dimension("local matrix has the wrong size".into()));
        }
    }
    for u in settings {
        let res = unitarity_residual(u).as_f64();
        if res > 1e-8 {
            return Err(Error::NotUnitary { residual: res });
        }
    }
    let rotated: Vec<CMatrix<T>> = settings
        .iter()
        .zip(observables)
        .map(|(u, m)| u * m * u.adjoint())
        .collect();
    if n_shots == 0 {
        return Ok(product_expectation(rho.matrix(), &rotated).re);
    }
    Ok(sample_shots(rho.matrix(), &rotated, n_shots, rng))
}

fn sample_shots<T: Real, R: Rng + ?Sized>(rho: &CMatrix<T>, rotated: &[CMatrix<T>], n_shots: usize, rng: &mut R) -> T {
    let eig: Vec<(Vec<T>, CMatrix<T>)> = rotated.iter().map(hermitian_eigen).collect();
    let v = kron_all(&eig.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
    let dims: Vec<usize> = rotated.iter().map(|a| a.nrows()).collect();
    let total = rho.nrows();
    let probs: Vec<f64> = (0..total)
        .map(|k| {
            let col = v.column(k);
            (col.adjoint() * rho * col)[(0, 0)].re.as_f64().max(0.0)
        })
        .collect();
    let mut cdf = Vec::with_capacity(total);
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let mut digs = vec![0; dims.len()];
    let mut sum = 0.0;
    for _ in 0..n_shots {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&x| x < u).min(total - 1);
        digits(k, &dims, &mut digs);
        sum += digs
            .iter()
            .zip(&eig)
            .map(|(&i, (vals, _))| vals[i].as_f64())
            .product::<f64>();
    }
    T::lit(sum / n_shots as f64)
}

/// Monte-Carlo estimate of a randomized-measurement moment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_err: f64,
    pub t: u32,
    pub n_settings: usize,
    pub n_shots: usize,
    pub kind: MeasurementKind,
    pub seed: u64,
}

/// Per-setting expectation values for `n_settings` random local settings.
///
/// Setting `i` is drawn from the stream `(seed, i)`.
pub fn sample_expectations<T: Real>(
    rho: &DensityMatrix<T>,
    kind: MeasurementKind,
    n_settings: usize,
    n_shots: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let dims = rho.dims();
    let (real, imag) = default_observables::<T>(dims.d)?;
    let m = match kind {
        MeasurementKind::Prrm => imag.matrix,
        _ => real.matrix,
    };
    let observables = vec![m; dims.n];
    let out = par_indexed(n_settings, |i| {
        let mut rng = SeedPath::new(seed, i as u64).rng();
        let settings: Vec<CMatrix<T>> = (0..dims.n)
            .map(|_| match kind {
                MeasurementKind::Rm => unitary(dims.d, &mut rng),
                _ => orthogonal::<T, _>(dims.d, &mut rng).map(cr),
            })
            .collect();
        expectation_value(rho, &settings, &observables, n_shots, &mut rng).map(|x| x.as_f64())
    });
    out.into_iter().collect()
}

/// Mean and standard error of xᵗ over samples.
pub fn power_mean(samples: &[f64], t: u32) -> (f64, f64) {
    let n = samples.len() as f64;
    let mut sum = 0.0;
    let mut sq = 0.0;
    for &x in samples {
        let p = x.powi(t as i32);
        sum += p;
        sq += p * p;
    }
    let mean = sum / n;
    let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

/// Estimates for several orders from one shared set of settings.
pub fn estimate_moments_mc<T: Real>(
    rho: &DensityMatrix<T>,
    kind: MeasurementKind,
    orders: &[u32],
    n_settings: usize,
    n_shots: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if n_settings < 2 {
        return Err(Error::Parameter("need at least two settings".into()));
    }
    if orders.contains(&0) {
        return Err(Error::Parameter("moment order must be >= 1".into()));
    }
    let e = sample_expectations(rho, kind, n_settings, n_shots, seed)?;
    Ok(orders
        .iter()
        .map(|&t| {
            let (value, std_err) = power_mean(&e, t);
            MomentEstimate {
                value,
                std_err,
                t,
                n_settings,
                n_shots,
                kind,
                seed,
            }
        })
        .collect())
}

pub fn estimate_moment_mc<T: Real>(
    rho: &DensityMatrix<T>,
    kind: MeasurementKind,
    t: u32,
    n_settings: usize,
    n_shots: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    Ok(estimate_moments_mc(rho, kind, &[t], n_settings, n_shots, seed)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CVector;
    use crate::state::DimSpec;

    fn phi_plus(d: usize) -> DensityMatrix<f64> {
        let mut psi = CVector::<f64>::zeros(d * d);
        for j in 0..d {
            psi[j * d + j] = c(1.0, 0.0);
        }
        DensityMatrix::from_pure(DimSpec::new(d, 2).unwrap(), &psi).unwrap()
    }

    #[test]
    fn constants_closed_form() {
        let k3 = moment_constants(3).unwrap();
        assert_eq!(k3.w, Ratio::new(3, 1225));
        assert_eq!(k3.v1, Ratio::new(1, 25));
        assert_eq!(moment_constants(2).unwrap().w, Ratio::new(3, 64));
        for d in 2..=7 {
            let k = moment_constants(d).unwrap();
            assert!((k.v1_gamma() - k.v1_f64()).abs() < 1e-12);
            assert!((k.w_gamma() - k.w_f64()).abs() < 1e-12);
            assert!((k.w_f64() - w_constant(d)).abs() < 1e-18);
        }
        assert!(moment_constants(8).is_err());
    }

    #[test]
    fn default_observable_normalization() {
        for d in 2..=7 {
            let (m, mh) = default_observables::<f64>(d).unwrap();
            assert_eq!(m.kind, ObservableKind::Real);
            assert_eq!(mh.kind, ObservableKind::Imaginary);
        }
        let (m3, _) = default_observables::<f64>(3).unwrap();
        assert!((m3.matrix[(0, 0)].re - 1.224744871).abs() < 1e-9);
        let k4: f64 = tabulated_real_diagonal(4).unwrap().iter().map(|x| x * x).sum();
        assert!((k4 - 4.0).abs() < 1e-2);
        assert!(default_observables::<f64>(8).is_err());
    }

    #[test]
    fn phi_plus_moments() {
        let basis = GgmBasis::new(3).unwrap();
        let t = correlation_tensor(&phi_plus(3), &basis).unwrap();
        let m = exact_sector_moments(&t, &basis);
        assert!((m.q2 - 0.2).abs() < 1e-12);
        assert!((m.qhat2 - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.r2 - 0.125).abs() < 1e-12);
        let q4 = exact_fourth_moment(&t, &basis).unwrap();
        assert!((q4 - 35.0 * 3.0 / 1225.0).abs() < 1e-12);
        assert!((sphere_moments(&t, &basis, 2).unwrap() - m.q2).abs() < 1e-12);
        assert!(sphere_moments(&t, &basis, 3).is_err());
    }

    #[test]
    fn identity_setting_expectation() {
        let rho = phi_plus(3);
        let (m, _) = default_observables::<f64>(3).unwrap();
        let id = CMatrix::<f64>::identity(3, 3);
        let mut rng = SeedPath::new(0, 0).rng();
        let e = expectation_value(&rho, &[id.clone(), id], &[m.matrix.clone(), m.matrix], 0, &mut rng).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shot_average_converges() {
        let rho = phi_plus(2);
        let mut rng = SeedPath::new(5, 0).rng();
        let o1: CMatrix<f64> = unitary(2, &mut rng);
        let o2: CMatrix<f64> = unitary(2, &mut rng);
        let (m, _) = default_observables::<f64>(2).unwrap();
        let obs = [m.matrix.clone(), m.matrix];
        let set = [o1, o2];
        let exact = expectation_value(&rho, &set, &obs, 0, &mut rng).unwrap();
        let shots = 200_000;
        let est = expectation_value(&rho, &set, &obs, shots, &mut rng).unwrap();
        // eigenvalue products are ±1
        let se = ((1.0 - exact * exact) / shots as f64).sqrt();
        assert!((est - exact).abs() < 4.0 * se, "{est} vs {exact}");
    }

    #[test]
    fn rejects_non_unitary_setting() {
        let rho = phi_plus(2);
        let (m, _) = default_observables::<f64>(2).unwrap();
        let bad = CMatrix::<f64>::identity(2, 2) * c(2.0, 0.0);
        let mut rng = SeedPath::new(0, 0).rng();
        let r = expectation_value(&rho, &[bad.clone(), bad], &[m.matrix.clone(), m.matrix], 0, &mut rng);
        assert!(matches!(r, Err(Error::NotUnitary { .. })));
        assert!(estimate_moment_mc(&rho, MeasurementKind::Rrm, 2, 1, 0, 0).is_err());
    }
}
