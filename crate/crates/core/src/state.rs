//! Density matrices with dimension metadata.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cr, CMatrix, CVector, Real};

/// Largest total Hilbert-space dimension accepted.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Local dimension `d` and party count `n` of an n-qudit system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimSpec {
    pub d: usize,
    pub n: usize,
}

impl DimSpec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(format!("local dimension {d} < 2")));
        }
        if n < 1 {
            return Err(Error::Dimension("need at least one party".into()));
        }
        let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d));
        match total {
            Some(t) if t <= MAX_TOTAL_DIM => Ok(Self { d, n }),
            _ => Err(Error::Dimension(format!("{d}^{n} exceeds {MAX_TOTAL_DIM}"))),
        }
    }

    pub fn total(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn local_dims(&self) -> Vec<usize> {
        vec![self.d; self.n]
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on (C^d)^{⊗n}.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dims: DimSpec,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates and wraps `matrix`.
    pub fn new(dims: DimSpec, matrix: CMatrix<T>) -> Result<Self> {
        validate(&dims, &matrix)?;
        Ok(Self { dims, matrix })
    }

    /// Hermitizes and renormalizes the trace, then validates.
    pub fn from_unnormalized(dims: DimSpec, matrix: CMatrix<T>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= T::zero() {
            return Err(Error::TraceNotOne { trace: tr.as_f64() });
        }
        let h = (&matrix + matrix.adjoint()) * cr(T::lit(0.5) / tr);
        Self::new(dims, h)
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) vector.
    pub fn from_pure(dims: DimSpec, psi: &CVector<T>) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::Shape {
                expected: dims.total(),
                rows: psi.len(),
                cols: 1,
            });
        }
        let norm2 = psi.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if norm2 <= T::zero() {
            return Err(Error::Parameter("zero state vector".into()));
        }
        let m = psi * psi.adjoint() * cr(T::one() / norm2);
        Self::new(dims, m)
    }

    pub fn maximally_mixed(dims: DimSpec) -> Self {
        let t = dims.total();
        let m = CMatrix::<T>::identity(t, t) * cr(T::one() / T::lit(t as f64));
        Self { dims, matrix: m }
    }

    /// ρ₁ ⊗ … ⊗ ρₖ of equal local dimension.
    pub fn product(factors: &[DensityMatrix<T>]) -> Result<Self> {
        let d = factors
            .first()
            .ok_or_else(|| Error::Dimension("empty product".into()))?
            .dims
            .d;
        if factors.iter().any(|f| f.dims.d != d) {
            return Err(Error::Dimension("factors differ in local dimension".into()));
        }
        let n = factors.iter().map(|f| f.dims.n).sum();
        let mats: Vec<_> = factors.iter().map(|f| f.matrix.clone()).collect();
        Self::new(DimSpec::new(d, n)?, linalg::kron_all(&mats))
    }

    pub fn dims(&self) -> DimSpec {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn transpose(&self) -> Self {
        Self {
            dims: self.dims,
            matrix: self.matrix.transpose(),
        }
    }

    /// Partial transpose on one site; the result need not be a state.
    pub fn partial_transpose(&self, site: usize) -> Result<CMatrix<T>> {
        linalg::partial_transpose(&self.matrix, &self.dims.local_dims(), &[site])
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = linalg::partial_trace(&self.matrix, &self.dims.local_dims(), keep)?;
        Ok(Self {
            dims: DimSpec::new(self.dims.d, keep.len())?,
            matrix: m,
        })
    }

    /// (⊗ⱼ Uⱼ) ρ (⊗ⱼ Uⱼ)† for per-site unitaries.
    pub fn conjugate_local(&self, locals: &[CMatrix<T>]) -> Result<Self> {
        if locals.len() != self.dims.n
            || locals
                .iter()
                .any(|u| u.nrows() != self.dims.d || u.ncols() != self.dims.d)
        {
            return Err(Error::Dimension("local operators do not match the state".into()));
        }
        let u = linalg::kron_all(locals);
        let m = &u * &self.matrix * u.adjoint();
        Self::new(self.dims, m)
    }

    pub fn purity(&self) -> T {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }

    /// tr(ρ σ).
    pub fn overlap(&self, other: &Self) -> T {
        linalg::trace_product(&self.matrix, &other.matrix).re
    }

    pub fn min_eigenvalue(&self) -> T {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// ρ = ρᵀ within the PTI tolerance.
    pub fn is_real(&self) -> bool {
        linalg::hs_norm(&(&self.matrix - self.matrix.transpose())).as_f64() < T::TOL.pti
    }

    /// Invariant under partial transposition of every single site.
    pub fn is_pti(&self) -> bool {
        (0..self.dims.n).all(|s| {
            let pt = self.partial_transpose(s).expect("site in range");
            linalg::hs_norm(&(pt - &self.matrix)).as_f64() < T::TOL.pti
        })
    }

    /// Eigenvalues ascending with eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<T>, CMatrix<T>) {
        linalg::hermitian_eigen(&self.matrix)
    }
}

fn validate<T: Real>(dims: &DimSpec, m: &CMatrix<T>) -> Result<()> {
    let t = dims.total();
    if m.nrows() != t || m.ncols() != t {
        return Err(Error::Shape {
            expected: t,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let tol = T::TOL;
    let herm = linalg::hermiticity_residual(m).as_f64();
    if herm > tol.herm {
        return Err(Error::NotHermitian { residual: herm });
    }
    let tr = m.trace();
    if (tr.re.as_f64() - 1.0).abs() > tol.trace || tr.im.as_f64().abs() > tol.trace {
        return Err(Error::TraceNotOne { trace: tr.re.as_f64() });
    }
    let min = linalg::min_eigenvalue(m).as_f64();
    if min < -tol.psd {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

/// Hermitian unit-trace operator that may fail positivity.
#[derive(Clone, Debug)]
pub struct Reconstruction<T: Real> {
    pub dims: DimSpec,
    pub matrix: CMatrix<T>,
    pub min_eigenvalue: T,
    pub is_psd: bool,
}

impl<T: Real> Reconstruction<T> {
    pub fn new(dims: DimSpec, matrix: CMatrix<T>) -> Self {
        let min = linalg::min_eigenvalue(&matrix);
        Self {
            dims,
            is_psd: min.as_f64() >= -T::TOL.psd,
            min_eigenvalue: min,
            matrix,
        }
    }

    pub fn into_state(self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.dims, self.matrix)
    }
}
