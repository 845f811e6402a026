//! Catalog of named states and random state ensembles.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::diagnostics;
use crate::entanglement::{f_min, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::ggm::GgmBasis;
use crate::haar::{orthogonal, unitary_frame};
use crate::linalg::kron_all;
use crate::moments::{exact_fourth_moment, exact_sector_moments};
use crate::scalar::{c, cr, CMatrix, CVector, Real};
use crate::state::{DensityMatrix, DimSpec};
use crate::tensor::{correlation_tensor, operator_tensor, reconstruct_state, CorrelationTensor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl StateSpec {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    fn get(&self, key: &str, default: Option<f64>) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .or(default)
            .ok_or_else(|| Error::Parameter(format!("{}: missing parameter '{key}'", self.name)))
    }

    fn get_usize(&self, key: &str, default: Option<usize>) -> Result<usize> {
        let v = self.get(key, default.map(|x| x as f64))?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Parameter(format!(
                "{key} must be a non-negative integer, got {v}"
            )));
        }
        Ok(v as usize)
    }
}

/// Names accepted by [`named_state`].
pub const CATALOG: &[&str] = &[
    "max_entangled",
    "isotropic",
    "rho0",
    "rho_u",
    "noisy_ghz",
    "table1",
    "upb_tiles",
    "chessboard",
    "piani",
    "overlap_family",
    "maximally_mixed",
];

pub fn named_state<T: Real>(spec: &StateSpec) -> Result<DensityMatrix<T>> {
    match spec.name.as_str() {
        "max_entangled" => max_entangled(spec.get_usize("d", Some(3))?),
        "isotropic" => isotropic(spec.get_usize("d", Some(3))?, spec.get("p", None)?),
        "rho0" => rho_u(1.0),
        "rho_u" => rho_u(spec.get("u", None)?),
        "noisy_ghz" => noisy_ghz(spec.get_usize("n", Some(5))?, spec.get("p", None)?),
        "table1" => table1(spec.get_usize("k", None)?),
        "upb_tiles" => upb_tiles(),
        "chessboard" => {
            let p = ChessboardParams {
                a: spec.get("a", Some(1.0))?,
                b: spec.get("b", Some(1.0))?,
                c: spec.get("c", Some(1.0))?,
                d: spec.get("d", Some(1.0))?,
                m: spec.get("m", Some(1.0))?,
                n: spec.get("n", Some(1.0))?,
            };
            chessboard(&p)
        }
        "piani" => piani(),
        "overlap_family" => overlap_family(spec.get("p", None)?),
        "maximally_mixed" => {
            let dims = DimSpec::new(spec.get_usize("d", Some(3))?, spec.get_usize("n", Some(2))?)?;
            Ok(DensityMatrix::maximally_mixed(dims))
        }
        other => Err(Error::Unknown {
            kind: "state",
            name: other.into(),
        }),
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

fn pure<T: Real>(dims: DimSpec, amps: &[(usize, f64, f64)]) -> Result<DensityMatrix<T>> {
    let mut psi = CVector::<T>::zeros(dims.total());
    for &(i, re, im) in amps {
        psi[i] += c(re, im);
    }
    DensityMatrix::from_pure(dims, &psi)
}

fn mix<T: Real>(dims: DimSpec, terms: &[(f64, &CMatrix<T>)]) -> CMatrix<T> {
    let n = dims.total();
    terms
        .iter()
        .fold(CMatrix::<T>::zeros(n, n), |acc, (w, m)| acc + *m * cr(T::lit(*w)))
}

/// |Φ_d⁺⟩ = Σⱼ|jj⟩/√d.
pub fn max_entangled<T: Real>(d: usize) -> Result<DensityMatrix<T>> {
    let dims = DimSpec::new(d, 2)?;
    let amps: Vec<_> = (0..d).map(|j| (j * d + j, 1.0, 0.0)).collect();
    pure(dims, &amps)
}

/// p|Φ_d⁺⟩⟨Φ_d⁺| + (1−p)I/d².
pub fn isotropic<T: Real>(d: usize, p: f64) -> Result<DensityMatrix<T>> {
    check_prob("p", p)?;
    let phi = max_entangled::<T>(d)?;
    let dims = phi.dims();
    let id = CMatrix::<T>::identity(d * d, d * d);
    let m = mix(dims, &[(p, phi.matrix()), ((1.0 - p) / (d * d) as f64, &id)]);
    DensityMatrix::new(dims, m)
}

/// Two-qutrit operator (I + 2λ₁⊗λ₁ + λ₁⊗λ₃ + λ₃⊗λ₃ + λ₄⊗λ₄ + 2λ₆⊗λ₆)/9 with indices in `basis`.
pub fn rho0_operator<T: Real>(basis: &GgmBasis<T>) -> Result<CMatrix<T>> {
    if basis.d() != 3 {
        return Err(Error::Dimension("rho0 is a two-qutrit operator".into()));
    }
    let l = |j: usize| basis.matrix(j).clone();
    let terms = [
        (1.0, 0, 0),
        (2.0, 1, 1),
        (1.0, 1, 3),
        (1.0, 3, 3),
        (1.0, 4, 4),
        (2.0, 6, 6),
    ];
    let mut m = CMatrix::<T>::zeros(9, 9);
    for (w, j, k) in terms {
        m += kron_all(&[l(j), l(k)]) * cr(T::lit(w / 9.0));
    }
    Ok(m)
}

/// Reorders a historical Gell-Mann index (λ₁..λ₈) into the real-first basis order.
pub fn historical_gell_mann_index(j: usize) -> Result<usize> {
    // λ1 λ2 λ3 λ4 λ5 λ6 λ7 λ8 ↦ sym01 asym01 diag0 sym02 asym02 sym12 asym12 diag1
    const MAP: [usize; 9] = [0, 1, 6, 4, 2, 7, 3, 8, 5];
    MAP.get(j)
        .copied()
        .ok_or_else(|| Error::Parameter(format!("Gell-Mann index {j} out of range")))
}

/// ϱ₀ under the historical Gell-Mann labelling.
pub fn rho0_operator_historical<T: Real>() -> Result<CMatrix<T>> {
    let basis = GgmBasis::<T>::new(3)?;
    let h = |j: usize| historical_gell_mann_index(j).map(|k| basis.matrix(k).clone());
    let terms = [
        (1.0, 0, 0),
        (2.0, 1, 1),
        (1.0, 1, 3),
        (1.0, 3, 3),
        (1.0, 4, 4),
        (2.0, 6, 6),
    ];
    let mut m = CMatrix::<T>::zeros(9, 9);
    for (w, j, k) in terms {
        m += kron_all(&[h(j)?, h(k)?]) * cr(T::lit(w / 9.0));
    }
    Ok(m)
}

/// u·ϱ₀ + (1−u)I/9 as an operator; it is not positive for any u in [0.6, 1].
pub fn rho_u_operator<T: Real>(u: f64) -> Result<CMatrix<T>> {
    check_prob("u", u)?;
    let basis = GgmBasis::<T>::new(3)?;
    let r0 = rho0_operator(&basis)?;
    let id = CMatrix::<T>::identity(9, 9);
    Ok(mix(DimSpec::new(3, 2)?, &[(u, &r0), ((1.0 - u) / 9.0, &id)]))
}

/// Validated u·ϱ₀ + (1−u)I/9; fails with `NotPsd` where the operator is not a state.
pub fn rho_u<T: Real>(u: f64) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(DimSpec::new(3, 2)?, rho_u_operator(u)?)
}

/// (1−p)|GHZ₊⟩⟨GHZ₊| + p|GHZ₋⟩⟨GHZ₋| on n qubits.
pub fn noisy_ghz<T: Real>(n: usize, p: f64) -> Result<DensityMatrix<T>> {
    check_prob("p", p)?;
    let dims = DimSpec::new(2, n)?;
    let plus = ghz::<T>(n, 1.0)?;
    let minus = ghz::<T>(n, -1.0)?;
    DensityMatrix::new(dims, mix(dims, &[(1.0 - p, plus.matrix()), (p, minus.matrix())]))
}

/// (|0…0⟩ + s|1…1⟩)/√2.
pub fn ghz<T: Real>(n: usize, s: f64) -> Result<DensityMatrix<T>> {
    let dims = DimSpec::new(2, n)?;
    pure(dims, &[(0, 1.0, 0.0), (dims.total() - 1, s, 0.0)])
}

/// The three two-qutrit imaginarity examples (k = 1, 2, 3).
pub fn table1<T: Real>(k: usize) -> Result<DensityMatrix<T>> {
    let dims = DimSpec::new(3, 2)?;
    let ket = |a: usize, b: usize| a * 3 + b;
    match k {
        1 => pure(dims, &[(ket(0, 0), 1.0, 0.0), (ket(2, 2), 0.0, 1.0)]),
        2 => pure(
            dims,
            &[
                (ket(0, 2), 0.0, 1.0),
                (ket(1, 2), 0.0, 1.0),
                (ket(1, 0), 1.0, 0.0),
                (ket(1, 2), 1.0, 0.0),
            ],
        ),
        3 => pure(dims, &[(ket(0, 0), 1.0, 0.0), (ket(2, 2), 1.0, 0.0)]),
        _ => Err(Error::Parameter(format!("table1 index must be 1, 2 or 3, got {k}"))),
    }
}

fn product_vector<T: Real>(a: &[f64; 3], b: &[f64; 3]) -> CVector<T> {
    CVector::<T>::from_fn(9, |i, _| c(a[i / 3] * b[i % 3], 0.0))
}

/// Bound entangled state from the 3×3 tiles unextendible product basis.
pub fn upb_tiles<T: Real>() -> Result<DensityMatrix<T>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    let tiles = [
        ([1.0, 0.0, 0.0], [s, -s, 0.0]),
        ([0.0, 0.0, 1.0], [0.0, s, -s]),
        ([s, -s, 0.0], [0.0, 0.0, 1.0]),
        ([0.0, s, -s], [1.0, 0.0, 0.0]),
        ([t, t, t], [t, t, t]),
    ];
    let mut m = CMatrix::<T>::identity(9, 9);
    for (a, b) in &tiles {
        let v = product_vector::<T>(a, b);
        m -= &v * v.adjoint();
    }
    let dims = DimSpec::new(3, 2)?;
    let rho = DensityMatrix::new(dims, m * cr(T::lit(0.25)))?;
    require_ppt_pti(&rho, "upb_tiles")?;
    Ok(rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChessboardParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub m: f64,
    pub n: f64,
}

impl Default for ChessboardParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
            m: 1.0,
            n: 1.0,
        }
    }
}

/// Unnormalized chessboard mixture Σ|Vᵢ⟩⟨Vᵢ|, before validation.
pub fn chessboard_operator<T: Real>(p: &ChessboardParams) -> Result<CMatrix<T>> {
    if p.n == 0.0 || p.m == 0.0 {
        return Err(Error::Parameter("chessboard needs m, n nonzero".into()));
    }
    let s = p.a * p.c / p.n;
    let t = p.a * p.d / p.m;
    let vs: [[f64; 9]; 4] = [
        [p.m, 0.0, s, 0.0, p.n, 0.0, 0.0, 0.0, 0.0],
        [0.0, p.a, 0.0, p.b, 0.0, p.c, 0.0, 0.0, 0.0],
        [p.n, 0.0, 0.0, 0.0, -p.m, 0.0, t, 0.0, 0.0],
        [0.0, p.b, 0.0, -p.a, 0.0, 0.0, 0.0, p.d, 0.0],
    ];
    let mut m = CMatrix::<T>::zeros(9, 9);
    for v in &vs {
        let v = CVector::<T>::from_fn(9, |i, _| c(v[i], 0.0));
        m += &v * v.adjoint();
    }
    Ok(m)
}

pub fn chessboard<T: Real>(p: &ChessboardParams) -> Result<DensityMatrix<T>> {
    let rho = DensityMatrix::from_unnormalized(DimSpec::new(3, 2)?, chessboard_operator(p)?)?;
    require_ppt_pti(&rho, "chessboard")?;
    Ok(rho)
}

fn require_ppt_pti<T: Real>(rho: &DensityMatrix<T>, name: &str) -> Result<()> {
    let diag = diagnostics(rho.matrix(), rho.dims())?;
    if !diag.is_ppt() {
        return Err(Error::Parameter(format!("{name} is not PPT")));
    }
    if !diag.is_pti() {
        return Err(Error::Parameter(format!("{name} is not PTI")));
    }
    Ok(())
}

/// Exact (C2, C4) of a two-qudit state.
pub fn rrm_point<T: Real>(rho: &DensityMatrix<T>) -> Result<(f64, f64)> {
    let basis = GgmBasis::new(rho.dims().d)?;
    let t = correlation_tensor(rho, &basis)?;
    point_from_tensor(&t, &basis)
}

/// Exact (C2, C4) of any Hermitian two-qudit operator.
pub fn rrm_point_operator<T: Real>(m: &CMatrix<T>, d: usize) -> Result<(f64, f64)> {
    let basis = GgmBasis::new(d)?;
    let t = operator_tensor(m, DimSpec::new(d, 2)?, &basis)?;
    point_from_tensor(&t, &basis)
}

fn point_from_tensor<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> Result<(f64, f64)> {
    Ok((exact_sector_moments(t, basis).q2, exact_fourth_moment(t, basis)?))
}

/// C4 < F_min(1, C2) − tol.
pub fn detected_at_r1<T: Real>(rho: &DensityMatrix<T>) -> Result<bool> {
    let (c2, c4) = rrm_point(rho)?;
    let d = rho.dims().d;
    if c2 > crate::entanglement::second_moment_cap(1, d) {
        return Ok(true);
    }
    Ok(c4 < f_min(1, c2, d)? - BOUNDARY_TOL)
}

/// Grid scanned by [`chessboard_sweep`], in order.
pub const CHESSBOARD_GRID: [f64; 6] = [-1.5, -1.0, -0.5, 0.5, 1.0, 1.5];

/// First grid point (lexicographic in a, b, c, d, m, n) giving a valid, detected chessboard state.
pub fn chessboard_sweep(grid: &[f64]) -> Option<ChessboardParams> {
    let k = grid.len();
    let total = k.pow(6);
    (0..total).find_map(|mut i| {
        let mut v = [0.0; 6];
        for slot in v.iter_mut().rev() {
            *slot = grid[i % k];
            i /= k;
        }
        let p = ChessboardParams {
            a: v[0],
            b: v[1],
            c: v[2],
            d: v[3],
            m: v[4],
            n: v[5],
        };
        let rho = chessboard::<f64>(&p).ok()?;
        detected_at_r1(&rho).ok()?.then_some(p)
    })
}

/// Parameters of the validated chessboard instance.
pub fn detected_chessboard_params() -> ChessboardParams {
    let default = ChessboardParams::default();
    if let Ok(rho) = chessboard::<f64>(&default) {
        if detected_at_r1(&rho).unwrap_or(false) {
            return default;
        }
    }
    chessboard_sweep(&CHESSBOARD_GRID).expect("grid contains a detected chessboard instance")
}

fn pauli<T: Real>(j: usize) -> CMatrix<T> {
    let z = c::<T>(0.0, 0.0);
    let o = c::<T>(1.0, 0.0);
    let e = match j {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        _ => [o, z, z, c(-1.0, 0.0)],
    };
    CMatrix::<T>::from_row_slice(2, 2, &e)
}

/// 4⊗4 PPT entangled state built from six projectors P_jk.
pub fn piani<T: Real>() -> Result<DensityMatrix<T>> {
    let dims = DimSpec::new(4, 2)?;
    let mut phi = CVector::<T>::zeros(16);
    for k in 0..4 {
        phi[k * 4 + k] = c(0.5, 0.0);
    }
    let pairs = [(0, 2), (1, 1), (2, 3), (3, 1), (3, 2), (3, 3)];
    let mut m = CMatrix::<T>::zeros(16, 16);
    for (j, k) in pairs {
        let op = kron_all(&[CMatrix::<T>::identity(4, 4), pauli(j), pauli(k)]);
        let v = op * &phi;
        m += &v * v.adjoint();
    }
    let rho = DensityMatrix::new(dims, m * cr(T::lit(1.0 / 6.0)))?;
    let diag = diagnostics(rho.matrix(), dims)?;
    if !diag.is_ppt() {
        return Err(Error::Parameter("piani is not PPT".into()));
    }
    Ok(rho)
}

/// p|Ψ⟩⟨Ψ| + (1−p)I/25 with |Ψ⟩ = Σᵢ|ii⟩/√5.
pub fn overlap_family<T: Real>(p: f64) -> Result<DensityMatrix<T>> {
    isotropic(5, p)
}

/// Σ p_{αβ}|φ^{αβ}⟩⟨φ^{αβ}| with |φ^{αβ}⟩ = (Z^α ⊗ X^β)|φ⁰⁰⟩.
pub fn bell_diagonal<T: Real>(probs: &[Vec<f64>]) -> Result<DensityMatrix<T>> {
    let d = probs.len();
    if d < 2 || probs.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension("probability matrix must be d×d with d ≥ 2".into()));
    }
    if probs.iter().flatten().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::Parameter("negative probability".into()));
    }
    let total: f64 = probs.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("probabilities sum to {total}")));
    }
    let dims = DimSpec::new(d, 2)?;
    let w = 2.0 * std::f64::consts::PI / d as f64;
    let mut m = CMatrix::<T>::zeros(d * d, d * d);
    for (alpha, row) in probs.iter().enumerate() {
        for (beta, &p) in row.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut v = CVector::<T>::zeros(d * d);
            for j in 0..d {
                let phase = w * (alpha * j) as f64;
                let amp = 1.0 / (d as f64).sqrt();
                v[j * d + (j + beta) % d] = c(amp * phase.cos(), amp * phase.sin());
            }
            m += &v * v.adjoint() * cr(T::lit(p));
        }
    }
    DensityMatrix::new(dims, m)
}

/// The four detected two-qutrit Bell-diagonal distributions.
pub fn bell_examples() -> [Vec<Vec<f64>>; 4] {
    [
        vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.18, 0.82], vec![0.0, 0.0, 0.0]],
        vec![vec![0.52, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.48, 0.0]],
        vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.5]],
        vec![vec![0.045, 0.0, 0.0], vec![0.0, 0.2055, 0.0], vec![0.0, 0.0, 0.7495]],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    PureHaar,
    MixedHs,
    Product,
    RealRandom,
}

impl std::str::FromStr for RandomKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure_haar" => Ok(Self::PureHaar),
            "mixed_hs" => Ok(Self::MixedHs),
            "product" => Ok(Self::Product),
            "real_random" => Ok(Self::RealRandom),
            _ => Err(Error::Unknown {
                kind: "random state kind",
                name: s.into(),
            }),
        }
    }
}

fn ginibre<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::<T>::from_fn(n, n, |_, _| {
        crate::scalar::C::new(T::sample_normal(rng), T::sample_normal(rng))
    })
}

pub fn random_state<T: Real, R: Rng + ?Sized>(
    kind: RandomKind,
    dims: DimSpec,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    let n = dims.total();
    match kind {
        RandomKind::PureHaar => {
            let v = unitary_frame::<T, R>(n, 1, rng);
            DensityMatrix::from_pure(dims, &v.column(0).into_owned())
        }
        RandomKind::MixedHs => {
            let g = ginibre::<T, R>(n, rng);
            DensityMatrix::from_unnormalized(dims, &g * g.adjoint())
        }
        RandomKind::Product => {
            let site = DimSpec::new(dims.d, 1)?;
            let factors = (0..dims.n)
                .map(|_| random_state(RandomKind::MixedHs, site, rng))
                .collect::<Result<Vec<_>>>()?;
            DensityMatrix::product(&factors)
        }
        RandomKind::RealRandom => loop {
            let g = ginibre::<T, R>(n, rng);
            let h = &g * g.adjoint();
            let m = (&h + h.transpose()) * cr(T::lit(0.5));
            if let Ok(rho) = DensityMatrix::from_unnormalized(dims, m) {
                return Ok(rho);
            }
        },
    }
}

/// (ρ + ρᵀ)/2.
pub fn symmetrize<T: Real>(rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    let m = rho.matrix();
    DensityMatrix::new(rho.dims(), (m + m.transpose()) * cr(T::lit(0.5)))
}

/// Random local orthogonal (real) rotation of each site.
pub fn random_local_orthogonals<T: Real, R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Vec<CMatrix<T>> {
    (0..n).map(|_| orthogonal::<T, R>(d, rng).map(cr)).collect()
}

/// Round trip through the correlation tensor; used to check catalog states.
pub fn tensor_round_trip_error<T: Real>(rho: &DensityMatrix<T>) -> Result<f64> {
    let basis = GgmBasis::new(rho.dims().d)?;
    let t = correlation_tensor(rho, &basis)?;
    let r = reconstruct_state(&t, &basis)?;
    Ok(crate::linalg::hs_norm(&(r.matrix - rho.matrix())).as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_moments() {
        let rho = isotropic::<f64>(3, 0.6).unwrap();
        let (c2, c4) = rrm_point(&rho).unwrap();
        assert!((c2 - 0.072).abs() < 1e-12);
        assert!((c4 - 35.0 * 3.0 / 1225.0 * 0.6f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn upb_and_piani() {
        let upb = upb_tiles::<f64>().unwrap();
        assert!(detected_at_r1(&upb).unwrap());
        let p = piani::<f64>().unwrap();
        assert!(!detected_at_r1(&p).unwrap());
    }

    #[test]
    fn chessboard_instance_detected() {
        let p = detected_chessboard_params();
        let rho = chessboard::<f64>(&p).unwrap();
        assert!(detected_at_r1(&rho).unwrap());
        assert!(rho.is_pti());
    }

    #[test]
    fn rho0_not_a_state() {
        let basis = GgmBasis::<f64>::new(3).unwrap();
        let a = crate::linalg::min_eigenvalue(&rho0_operator(&basis).unwrap());
        let b = crate::linalg::min_eigenvalue(&rho0_operator_historical::<f64>().unwrap());
        assert!(a < -1e-3 && b < -1e-3);
        assert!(matches!(rho_u::<f64>(0.6), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn bell_diagonal_cases() {
        let mut single = vec![vec![0.0; 3]; 3];
        single[0][0] = 1.0;
        let rho = bell_diagonal::<f64>(&single).unwrap();
        let phi = max_entangled::<f64>(3).unwrap();
        assert!((rho.overlap(&phi) - 1.0).abs() < 1e-12);
        let uniform = vec![vec![1.0 / 9.0; 3]; 3];
        let mm = bell_diagonal::<f64>(&uniform).unwrap();
        assert!(crate::linalg::hs_norm(&(mm.matrix() - CMatrix::<f64>::identity(9, 9) / c(9.0, 0.0))) < 1e-12);
        assert!(!detected_at_r1(&mm).unwrap());
        for p in bell_examples() {
            assert!(detected_at_r1(&bell_diagonal::<f64>(&p).unwrap()).unwrap());
        }
    }

    #[test]
    fn noisy_ghz_fidelity() {
        let rho = noisy_ghz::<f64>(5, 0.5).unwrap();
        let g = ghz::<f64>(5, 1.0).unwrap();
        assert!((rho.overlap(&g) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn catalog_states_valid() {
        let specs = [
            StateSpec::new("max_entangled"),
            StateSpec::new("isotropic").with("p", 0.7),
            StateSpec::new("noisy_ghz").with("p", 0.3),
            StateSpec::new("table1").with("k", 2.0),
            StateSpec::new("upb_tiles"),
            StateSpec::new("piani"),
            StateSpec::new("overlap_family").with("p", 0.1),
        ];
        for s in &specs {
            let rho = named_state::<f64>(s).unwrap();
            assert!(tensor_round_trip_error(&rho).unwrap() < 1e-10, "{}", s.name);
        }
        assert!(named_state::<f64>(&StateSpec::new("nope")).is_err());
        assert!(named_state::<f64>(&StateSpec::new("isotropic").with("p", 1.5)).is_err());
    }
}
