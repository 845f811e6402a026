//! Classical shadows from orthogonal and unitary ensembles.
//!
//! Two paths are provided. [`draw_snapshot`] builds the full inverse-channel
//! snapshot matrix. [`SnapshotSampler`] returns only tr(G·snapshot) and works
//! in the span of the state and observable eigenvectors, which keeps
//! many-run experiments cheap.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{orthogonal, orthogonal_frame, unitary, unitary_frame};
use crate::linalg::{digits, hermitian_eigen, hermiticity_residual, kron_all, trace_product};
use crate::rng::{derive_path, par_indexed, SeedPath};
use crate::scalar::{c, cr, CMatrix, CVector, RMatrix, Real, C};
use crate::state::{DensityMatrix, DimSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    GlobalOrthogonal,
    LocalOrthogonal,
    GlobalUnitary,
    LocalUnitary,
}

impl Ensemble {
    pub fn is_orthogonal(self) -> bool {
        matches!(self, Self::GlobalOrthogonal | Self::LocalOrthogonal)
    }

    pub fn is_local(self) -> bool {
        matches!(self, Self::LocalOrthogonal | Self::LocalUnitary)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::GlobalOrthogonal => "global_orthogonal",
            Self::LocalOrthogonal => "local_orthogonal",
            Self::GlobalUnitary => "global_unitary",
            Self::LocalUnitary => "local_unitary",
        }
    }

    pub fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl std::str::FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global_orthogonal" => Ok(Self::GlobalOrthogonal),
            "local_orthogonal" => Ok(Self::LocalOrthogonal),
            "global_unitary" => Ok(Self::GlobalUnitary),
            "local_unitary" => Ok(Self::LocalUnitary),
            _ => Err(Error::Unknown {
                kind: "ensemble",
                name: s.into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

fn check_square<T: Real>(x: &CMatrix<T>, size: usize) -> Result<()> {
    if x.nrows() != x.ncols() || x.nrows() != size {
        return Err(Error::Shape {
            expected: size,
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    Ok(())
}

/// Global orthogonal measure-and-prepare channel on (C^d)^{⊗n} or its inverse.
pub fn global_orthogonal_channel<T: Real>(
    x: &CMatrix<T>,
    direction: Direction,
    n: usize,
    d: usize,
) -> Result<CMatrix<T>> {
    let dims = DimSpec::new(d, n)?;
    let big = dims.total();
    check_square(x, big)?;
    let id = CMatrix::<T>::identity(big, big);
    let tr = x.trace();
    let dd = T::lit(big as f64);
    Ok(match direction {
        Direction::Forward => (&id * tr + x + x.transpose()) * cr(T::one() / (dd + T::lit(2.0))),
        Direction::Inverse => (x * cr(dd + T::lit(2.0)) - id * tr) * cr(T::lit(0.5)),
    })
}

/// (tr_site X) placed back with I on `site`.
fn trace_out_and_embed<T: Real>(x: &CMatrix<T>, dims: DimSpec, site: usize) -> CMatrix<T> {
    let local = dims.local_dims();
    let stride = dims.d.pow((dims.n - 1 - site) as u32);
    let big = dims.total();
    let mut a = vec![0; dims.n];
    let mut b = vec![0; dims.n];
    CMatrix::<T>::from_fn(big, big, |r, col| {
        digits(r, &local, &mut a);
        digits(col, &local, &mut b);
        if a[site] != b[site] {
            return cr(T::zero());
        }
        let r0 = r - a[site] * stride;
        let c0 = col - b[site] * stride;
        (0..dims.d).fold(cr(T::zero()), |acc, k| acc + x[(r0 + k * stride, c0 + k * stride)])
    })
}

/// Product of single-site orthogonal channels (or their inverses).
pub fn local_orthogonal_channel<T: Real>(x: &CMatrix<T>, direction: Direction, dims: DimSpec) -> Result<CMatrix<T>> {
    check_square(x, dims.total())?;
    let d = T::lit(dims.d as f64);
    let mut y = x.clone();
    for site in 0..dims.n {
        let t = trace_out_and_embed(&y, dims, site);
        let pt = crate::linalg::partial_transpose(&y, &dims.local_dims(), &[site])?;
        y = match direction {
            Direction::Forward => (t + &y + pt) * cr(T::one() / (d + T::lit(2.0))),
            Direction::Inverse => (&y * cr(d + T::lit(2.0)) - t) * cr(T::lit(0.5)),
        };
    }
    Ok(y)
}

#[derive(Clone, Debug)]
pub struct ShadowSnapshot<T: Real> {
    pub ensemble: Ensemble,
    pub seed_path: SeedPath,
    /// Per-site outcome digits (one entry for global ensembles).
    pub outcome: Vec<usize>,
    pub snapshot: CMatrix<T>,
    /// Set when the ensemble is not unbiased for this state.
    pub bias_warning: bool,
}

/// Serializable record from which a snapshot can be rebuilt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub seed_path: SeedPath,
    pub outcome: Vec<usize>,
    pub ensemble: Ensemble,
}

impl<T: Real> ShadowSnapshot<T> {
    pub fn record(&self) -> SnapshotRecord {
        SnapshotRecord {
            seed_path: self.seed_path,
            outcome: self.outcome.clone(),
            ensemble: self.ensemble,
        }
    }
}

/// Whether the ensemble's shadows are unbiased for `rho`.
pub fn ensemble_valid_for<T: Real>(rho: &DensityMatrix<T>, ensemble: Ensemble) -> bool {
    match ensemble {
        Ensemble::GlobalOrthogonal => rho.is_real(),
        Ensemble::LocalOrthogonal => rho.is_pti(),
        Ensemble::GlobalUnitary | Ensemble::LocalUnitary => true,
    }
}

/// Rotation settings, one matrix for global ensembles or one per site.
fn draw_settings<T: Real, R: Rng + ?Sized>(ensemble: Ensemble, dims: DimSpec, rng: &mut R) -> Vec<CMatrix<T>> {
    match ensemble {
        Ensemble::GlobalOrthogonal => vec![orthogonal::<T, R>(dims.total(), rng).map(cr)],
        Ensemble::GlobalUnitary => vec![unitary::<T, R>(dims.total(), rng)],
        Ensemble::LocalOrthogonal => (0..dims.n).map(|_| orthogonal::<T, R>(dims.d, rng).map(cr)).collect(),
        Ensemble::LocalUnitary => (0..dims.n).map(|_| unitary::<T, R>(dims.d, rng)).collect(),
    }
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Inverse-channel snapshot for given settings and outcome.
fn snapshot_matrix<T: Real>(
    ensemble: Ensemble,
    dims: DimSpec,
    settings: &[CMatrix<T>],
    outcome: &[usize],
) -> CMatrix<T> {
    // v = U†|b⟩ is the conjugated row b of U
    let ket = |u: &CMatrix<T>, b: usize| -> CVector<T> { u.row(b).adjoint() };
    match ensemble {
        Ensemble::GlobalOrthogonal | Ensemble::GlobalUnitary => {
            let big = dims.total();
            let v = ket(&settings[0], outcome[0]);
            let proj = &v * v.adjoint();
            let id = CMatrix::<T>::identity(big, big);
            if ensemble == Ensemble::GlobalOrthogonal {
                (proj * cr(T::lit((big + 2) as f64)) - id) * cr(T::lit(0.5))
            } else {
                proj * cr(T::lit((big + 1) as f64)) - id
            }
        }
        Ensemble::LocalOrthogonal | Ensemble::LocalUnitary => {
            let d = dims.d as f64;
            let id = CMatrix::<T>::identity(dims.d, dims.d);
            let factors: Vec<CMatrix<T>> = settings
                .iter()
                .zip(outcome)
                .map(|(u, &b)| {
                    let v = ket(u, b);
                    let proj = &v * v.adjoint();
                    if ensemble == Ensemble::LocalOrthogonal {
                        proj * cr(T::lit((d + 2.0) / 2.0)) - &id * cr(T::lit(0.5))
                    } else {
                        proj * cr(T::lit(d + 1.0)) - &id
                    }
                })
                .collect();
            kron_all(&factors)
        }
    }
}

/// One measurement setting, Born-sampled outcome and its inverse-channel snapshot.
pub fn draw_snapshot<T: Real>(rho: &DensityMatrix<T>, ensemble: Ensemble, path: SeedPath) -> Result<ShadowSnapshot<T>> {
    let warn = !ensemble_valid_for(rho, ensemble);
    draw_snapshot_flagged(rho, ensemble, path, warn)
}

fn draw_snapshot_flagged<T: Real>(
    rho: &DensityMatrix<T>,
    ensemble: Ensemble,
    path: SeedPath,
    warn: bool,
) -> Result<ShadowSnapshot<T>> {
    let dims = rho.dims();
    let mut rng = path.rng();
    let settings = draw_settings::<T, _>(ensemble, dims, &mut rng);
    let u = if ensemble.is_local() {
        kron_all(&settings)
    } else {
        settings[0].clone()
    };
    let rotated = &u * rho.matrix() * u.adjoint();
    let probs: Vec<f64> = (0..dims.total())
        .map(|b| rotated[(b, b)].re.as_f64().max(0.0))
        .collect();
    let b = sample_index(&probs, &mut rng);
    let outcome = if ensemble.is_local() {
        let mut digs = vec![0; dims.n];
        digits(b, &dims.local_dims(), &mut digs);
        digs
    } else {
        vec![b]
    };
    Ok(ShadowSnapshot {
        ensemble,
        seed_path: path,
        snapshot: snapshot_matrix(ensemble, dims, &settings, &outcome),
        outcome,
        bias_warning: warn,
    })
}

/// Rebuilds a snapshot from its record; the setting is re-derived from the seed path.
pub fn snapshot_from_record<T: Real>(record: &SnapshotRecord, dims: DimSpec) -> Result<CMatrix<T>> {
    let expected = if record.ensemble.is_local() { dims.n } else { 1 };
    let limit = if record.ensemble.is_local() {
        dims.d
    } else {
        dims.total()
    };
    if record.outcome.len() != expected || record.outcome.iter().any(|&b| b >= limit) {
        return Err(Error::Format("snapshot outcome does not match dimensions".into()));
    }
    let settings = draw_settings::<T, _>(record.ensemble, dims, &mut record.seed_path.rng());
    Ok(snapshot_matrix(record.ensemble, dims, &settings, &record.outcome))
}

/// `count` snapshots; snapshot i uses the stream (seed, i).
pub fn draw_snapshots<T: Real>(
    rho: &DensityMatrix<T>,
    ensemble: Ensemble,
    count: usize,
    seed: u64,
) -> Result<Vec<ShadowSnapshot<T>>> {
    let warn = !ensemble_valid_for(rho, ensemble);
    par_indexed(count, |i| {
        draw_snapshot_flagged(rho, ensemble, SeedPath::new(seed, i as u64), warn)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservableEstimate {
    pub mean: f64,
    pub std_err: f64,
}

pub fn mean_and_se(xs: &[f64]) -> ObservableEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    ObservableEstimate {
        mean,
        std_err: (var / n).sqrt(),
    }
}

/// Mean and standard error of tr(G·snapshot).
pub fn estimate_observable<T: Real>(shadows: &[ShadowSnapshot<T>], g: &CMatrix<T>) -> Result<ObservableEstimate> {
    let first = shadows.first().ok_or_else(|| Error::Parameter("no snapshots".into()))?;
    check_square(g, first.snapshot.nrows())?;
    let vals: Vec<f64> = shadows
        .iter()
        .map(|s| {
            check_square(&s.snapshot, g.nrows())?;
            Ok(trace_product(g, &s.snapshot).re.as_f64())
        })
        .collect::<Result<_>>()?;
    Ok(mean_and_se(&vals))
}

/// Applies a d×d operator to one site of a state vector in place of `out`.
fn apply_site<T: Real>(v: &[C<T>], op: &CMatrix<T>, d: usize, n: usize, site: usize, out: &mut [C<T>]) {
    let stride = d.pow((n - 1 - site) as u32);
    let block = stride * d;
    for base in (0..v.len()).step_by(block) {
        for off in 0..stride {
            for i in 0..d {
                let mut acc = cr(T::zero());
                for j in 0..d {
                    acc += op[(i, j)] * v[base + off + j * stride];
                }
                out[base + off + i * stride] = acc;
            }
        }
    }
}

fn apply_product<T: Real>(v: &[C<T>], ops: &[CMatrix<T>], d: usize) -> Vec<C<T>> {
    let n = ops.len();
    let mut cur = v.to_vec();
    let mut next = vec![cr(T::zero()); v.len()];
    for (site, op) in ops.iter().enumerate() {
        apply_site(&cur, op, d, n, site, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Positive-weight eigenpairs of a Hermitian matrix.
fn spectral<T: Real>(m: &CMatrix<T>, tol: f64) -> Vec<(f64, CVector<T>)> {
    let (vals, vecs) = hermitian_eigen(m);
    vals.iter()
        .enumerate()
        .filter(|(_, v)| v.as_f64().abs() > tol)
        .map(|(k, v)| (v.as_f64(), vecs.column(k).into_owned()))
        .collect()
}

/// Real orthonormal basis of the span of the real and imaginary parts of `vs`.
fn real_span<T: Real>(vs: &[CVector<T>], tol: f64) -> RMatrix<T> {
    let rows = vs.first().map_or(0, |v| v.len());
    let mut basis: Vec<nalgebra::DVector<T>> = Vec::new();
    for v in vs {
        for part in [v.map(|z| z.re), v.map(|z| z.im)] {
            let mut w = part;
            for _ in 0..2 {
                for b in &basis {
                    let p = b.dot(&w);
                    w -= b * p;
                }
            }
            let norm = w.norm();
            if norm.as_f64() > tol {
                basis.push(w / norm);
            }
        }
    }
    RMatrix::<T>::from_fn(rows, basis.len(), |i, j| basis[j][i])
}

/// Fast sampler of tr(G·snapshot) for one state, observable and ensemble.
pub struct SnapshotSampler<T: Real> {
    ensemble: Ensemble,
    dims: DimSpec,
    weights: Vec<f64>,
    state_vecs: Vec<CVector<T>>,
    obs_weights: Vec<f64>,
    obs_vecs: Vec<CVector<T>>,
    trace_g: f64,
    /// Real orthonormal frame of the relevant subspace (global ensembles).
    span: RMatrix<T>,
    bias_warning: bool,
}

impl<T: Real> SnapshotSampler<T> {
    pub fn new(rho: &DensityMatrix<T>, g: &CMatrix<T>, ensemble: Ensemble) -> Result<Self> {
        let dims = rho.dims();
        check_square(g, dims.total())?;
        let res = hermiticity_residual(g).as_f64();
        if res > T::TOL.herm {
            return Err(Error::NotHermitian { residual: res });
        }
        let (weights, state_vecs): (Vec<f64>, Vec<CVector<T>>) = spectral(rho.matrix(), 1e-12).into_iter().unzip();
        let (obs_weights, obs_vecs): (Vec<f64>, Vec<CVector<T>>) = spectral(g, 1e-12).into_iter().unzip();
        let all: Vec<CVector<T>> = state_vecs.iter().chain(&obs_vecs).cloned().collect();
        let span = if ensemble.is_local() {
            RMatrix::<T>::zeros(0, 0)
        } else {
            real_span(&all, 1e-9)
        };
        let to_coords = |v: &CVector<T>| -> CVector<T> {
            if ensemble.is_local() {
                v.clone()
            } else {
                span.transpose().map(cr) * v
            }
        };
        Ok(Self {
            ensemble,
            dims,
            weights,
            state_vecs: state_vecs.iter().map(to_coords).collect(),
            obs_weights,
            obs_vecs: obs_vecs.iter().map(to_coords).collect(),
            trace_g: g.trace().re.as_f64(),
            span,
            bias_warning: !ensemble_valid_for(rho, ensemble),
        })
    }

    pub fn bias_warning(&self) -> bool {
        self.bias_warning
    }

    /// tr(G·snapshot) for the snapshot drawn from `path`.
    pub fn sample(&self, path: SeedPath) -> f64 {
        let mut rng = path.rng();
        if self.ensemble.is_local() {
            self.sample_local(&mut rng)
        } else {
            self.sample_global(&mut rng)
        }
    }

    fn sample_global<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let big = self.dims.total();
        let m = self.span.ncols();
        // frame = (rotation)·span, Haar-distributed as the first m columns of the rotation
        let frame: CMatrix<T> = match self.ensemble {
            Ensemble::GlobalOrthogonal => orthogonal_frame::<T, R>(big, m, rng).map(cr),
            _ => unitary_frame::<T, R>(big, m, rng),
        };
        let amps: Vec<CVector<T>> = self.state_vecs.iter().map(|a| &frame * a).collect();
        let probs: Vec<f64> = (0..big)
            .map(|b| {
                self.weights
                    .iter()
                    .zip(&amps)
                    .map(|(w, a)| w * a[b].norm_sqr().as_f64())
                    .sum()
            })
            .collect();
        let b = sample_index(&probs, rng);
        let x: f64 = self
            .obs_weights
            .iter()
            .zip(&self.obs_vecs)
            .map(|(mu, h)| {
                let amp = (0..m).fold(cr(T::zero()), |acc, i| acc + frame[(b, i)] * h[i]);
                mu * amp.norm_sqr().as_f64()
            })
            .sum();
        let dd = big as f64;
        if self.ensemble == Ensemble::GlobalOrthogonal {
            ((dd + 2.0) * x - self.trace_g) / 2.0
        } else {
            (dd + 1.0) * x - self.trace_g
        }
    }

    fn sample_local<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let DimSpec { d, n } = self.dims;
        let settings = draw_settings::<T, R>(self.ensemble, self.dims, rng);
        let big = self.dims.total();
        let amps: Vec<Vec<C<T>>> = self
            .state_vecs
            .iter()
            .map(|v| apply_product(v.as_slice(), &settings, d))
            .collect();
        let probs: Vec<f64> = (0..big)
            .map(|b| {
                self.weights
                    .iter()
                    .zip(&amps)
                    .map(|(w, a)| w * a[b].norm_sqr().as_f64())
                    .sum()
            })
            .collect();
        let b = sample_index(&probs, rng);
        let mut digs = vec![0; n];
        digits(b, &self.dims.local_dims(), &mut digs);
        let (alpha, beta) = if self.ensemble == Ensemble::LocalOrthogonal {
            ((d as f64 + 2.0) / 2.0, 0.5)
        } else {
            (d as f64 + 1.0, 1.0)
        };
        let id = CMatrix::<T>::identity(d, d);
        let factors: Vec<CMatrix<T>> = settings
            .iter()
            .zip(&digs)
            .map(|(u, &bj)| {
                let v: CVector<T> = u.row(bj).adjoint();
                &v * v.adjoint() * cr(T::lit(alpha)) - &id * cr(T::lit(beta))
            })
            .collect();
        self.obs_weights
            .iter()
            .zip(&self.obs_vecs)
            .map(|(mu, g)| {
                let xg = apply_product(g.as_slice(), &factors, d);
                let val = g.iter().zip(&xg).fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b);
                mu * val.re.as_f64()
            })
            .sum()
    }

    /// Mean of `count` samples with streams (seed, 0..count), summed in index order.
    pub fn mean(&self, count: usize, seed: u64) -> f64 {
        (0..count)
            .map(|i| self.sample(SeedPath::new(seed, i as u64)))
            .sum::<f64>()
            / count as f64
    }
}

/// Expected local-orthogonal fidelity estimate for an n-qubit GHZ mixture with exact fidelity f.
pub fn local_orthogonal_ghz_bias(f: f64, n: usize) -> f64 {
    0.5 + (f - 0.5) / 2f64.powi(n as i32 - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Grid over the noise parameter p at fixed setting count.
    Probability,
    /// Grid over setting counts at fixed p.
    Settings,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShadowExperimentConfig {
    pub n_qubits: usize,
    pub ensembles: Vec<Ensemble>,
    pub grid_kind: GridKind,
    pub grid: Vec<f64>,
    /// Setting count for probability grids.
    pub n_settings: usize,
    /// Noise parameter for settings grids.
    pub p: f64,
    pub n_runs: usize,
    pub seed: u64,
}

impl ShadowExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::Parameter("n_runs must be >= 1".into()));
        }
        if self.grid.is_empty() || self.ensembles.is_empty() {
            return Err(Error::Parameter("empty grid or ensemble list".into()));
        }
        match self.grid_kind {
            GridKind::Probability => {
                if self.n_settings == 0 || self.grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(Error::Parameter(
                        "probability grid needs p in [0,1] and n_settings >= 1".into(),
                    ));
                }
            }
            GridKind::Settings => {
                if !(0.0..=1.0).contains(&self.p) || self.grid.iter().any(|s| *s < 1.0 || s.fract() != 0.0) {
                    return Err(Error::Parameter(
                        "settings grid needs positive integers and p in [0,1]".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowErrorPoint {
    pub grid_value: f64,
    pub ensemble: Ensemble,
    pub mean_error: f64,
    /// Standard deviation of the per-run errors.
    pub std: f64,
    pub n_settings: usize,
    pub n_runs: usize,
    pub seed: u64,
    pub bias_warning: bool,
}

/// Fidelity-estimation error |f_es − f_ex| of GHZ-mixture shadows, averaged over runs.
pub fn fidelity_error_experiment(config: &ShadowExperimentConfig) -> Result<Vec<ShadowErrorPoint>> {
    config.validate()?;
    let target = crate::zoo::ghz::<f64>(config.n_qubits, 1.0)?;
    let mut out = Vec::new();
    for (gi, &gv) in config.grid.iter().enumerate() {
        let (p, n_settings) = match config.grid_kind {
            GridKind::Probability => (gv, config.n_settings),
            GridKind::Settings => (config.p, gv as usize),
        };
        let rho = crate::zoo::noisy_ghz::<f64>(config.n_qubits, p)?;
        let exact = 1.0 - p;
        for &ens in &config.ensembles {
            let sampler = SnapshotSampler::new(&rho, target.matrix(), ens)?;
            let errors = par_indexed(config.n_runs, |r| {
                let seed = derive_path(config.seed, &[gi as u64, ens.tag(), r as u64]);
                (sampler.mean(n_settings, seed) - exact).abs()
            });
            let mean = errors.iter().sum::<f64>() / errors.len() as f64;
            let std = if errors.len() > 1 {
                (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (errors.len() - 1) as f64).sqrt()
            } else {
                0.0
            };
            out.push(ShadowErrorPoint {
                grid_value: gv,
                ensemble: ens,
                mean_error: mean,
                std,
                n_settings,
                n_runs: config.n_runs,
                seed: config.seed,
                bias_warning: sampler.bias_warning(),
            });
        }
    }
    Ok(out)
}

/// Random non-symmetric complex test matrix.
pub fn random_matrix<T: Real, R: Rng + ?Sized>(size: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::<T>::from_fn(size, size, |_, _| C::new(T::sample_normal(rng), T::sample_normal(rng)))
}

/// (X + Xᵀ)/2.
pub fn symmetrization<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    (x + x.transpose()) * c::<T>(0.5, 0.0)
}
