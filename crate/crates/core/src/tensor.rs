//! Correlation tensors T(j₁…jₙ) = tr(ρ λ_{j₁}⊗…⊗λ_{jₙ}).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ggm::{GgmBasis, Sector};
use crate::linalg::{digits, hermiticity_residual};
use crate::scalar::{cr, CMatrix, Real, C};
use crate::state::{DensityMatrix, DimSpec, Reconstruction};

/// Real coefficients of an operator in the product GGM basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTensor<T: Real> {
    dims: DimSpec,
    data: Vec<T>,
}

impl<T: Real> CorrelationTensor<T> {
    /// Wraps raw coefficients stored with party 0 most significant.
    pub fn from_raw(dims: DimSpec, data: Vec<T>) -> Result<Self> {
        let want = (dims.d * dims.d).pow(dims.n as u32);
        if data.len() != want {
            return Err(Error::Dimension(format!(
                "tensor needs {want} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> DimSpec {
        self.dims
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Flat position of a multi-index.
    pub fn index(&self, idx: &[usize]) -> usize {
        let q = self.dims.d * self.dims.d;
        idx.iter().fold(0, |acc, &j| acc * q + j)
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.index(idx)]
    }

    /// Sum of T² over multi-indices whose per-party sectors satisfy `keep`.
    pub fn sum_squares_where(&self, basis: &GgmBasis<T>, keep: impl Fn(&[Sector]) -> bool) -> T {
        let n = self.dims.n;
        let q = vec![self.dims.d * self.dims.d; n];
        let mut idx = vec![0; n];
        let mut sec = vec![Sector::Identity; n];
        let mut acc = T::zero();
        for (flat, &v) in self.data.iter().enumerate() {
            if v == T::zero() {
                continue;
            }
            digits(flat, &q, &mut idx);
            for (s, &j) in sec.iter_mut().zip(&idx) {
                *s = basis.sector(j);
            }
            if keep(&sec) {
                acc += v * v;
            }
        }
        acc
    }

    /// Tensor of the reduced state on `keep` (sorted party list).
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        let n = self.dims.n;
        if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) || keep[keep.len() - 1] >= n {
            return Err(Error::Partition(format!("invalid keep set {keep:?}")));
        }
        let dims = DimSpec::new(self.dims.d, keep.len())?;
        let q = self.dims.d * self.dims.d;
        let qs = vec![q; keep.len()];
        let total = q.pow(keep.len() as u32);
        let mut sub = vec![0; keep.len()];
        let mut full = vec![0; n];
        let data = (0..total)
            .map(|flat| {
                digits(flat, &qs, &mut sub);
                full.iter_mut().for_each(|x| *x = 0);
                for (&k, &j) in keep.iter().zip(&sub) {
                    full[k] = j;
                }
                self.get(&full)
            })
            .collect();
        Ok(Self { dims, data })
    }

    /// Bipartite block T_{jk} for j, k in the given index lists.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Result<DMatrix<T>> {
        if self.dims.n != 2 {
            return Err(Error::Dimension("block view needs a bipartite tensor".into()));
        }
        Ok(DMatrix::from_fn(rows.len(), cols.len(), |a, b| {
            self.get(&[rows[a], cols[b]])
        }))
    }

    /// L×L real-sector correlation block T_R.
    pub fn real_block(&self, basis: &GgmBasis<T>) -> Result<DMatrix<T>> {
        let r: Vec<usize> = basis.real_range().collect();
        self.block(&r, &r)
    }

    /// Full (d²−1)×(d²−1) correlation block.
    pub fn full_block(&self) -> Result<DMatrix<T>> {
        let r: Vec<usize> = (1..self.dims.d * self.dims.d).collect();
        self.block(&r, &r)
    }
}

/// Applies a per-site linear map to a tensor stored as d²-ary digits.
fn transform_sites<T: Real>(data: Vec<C<T>>, n: usize, q: usize, site_map: impl Fn(&[C<T>], &mut [C<T>])) -> Vec<C<T>> {
    let mut cur = data;
    let mut inp = vec![cr(T::zero()); q];
    let mut out = vec![cr(T::zero()); q];
    for site in 0..n {
        let stride = q.pow((n - 1 - site) as u32);
        let outer = cur.len() / (stride * q);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * stride * q + s;
                for (a, x) in inp.iter_mut().enumerate() {
                    *x = cur[base + a * stride];
                }
                site_map(&inp, &mut out);
                for (a, &x) in out.iter().enumerate() {
                    cur[base + a * stride] = x;
                }
            }
        }
    }
    cur
}

/// Coefficients of an arbitrary square operator on (C^d)^{⊗n}, kept complex.
pub fn operator_coefficients<T: Real>(m: &CMatrix<T>, dims: DimSpec, basis: &GgmBasis<T>) -> Result<Vec<C<T>>> {
    let (d, n) = (dims.d, dims.n);
    if basis.d() != d {
        return Err(Error::Dimension(format!("basis d={} but state d={d}", basis.d())));
    }
    let total = dims.total();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::Shape {
            expected: total,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let q = d * d;
    let ds = vec![d; n];
    let qs = vec![q; n];
    let len = q.pow(n as u32);
    let mut p = vec![0; n];
    let mut r = vec![0; n];
    let mut c = vec![0; n];
    // A[p] = m[C, R] with pᵢ = rᵢ d + cᵢ, so that contracting λ[r, c] gives tr(m Λ).
    let data: Vec<C<T>> = (0..len)
        .map(|flat| {
            digits(flat, &qs, &mut p);
            for i in 0..n {
                r[i] = p[i] / d;
                c[i] = p[i] % d;
            }
            let row = crate::linalg::undigits(&c, &ds);
            let col = crate::linalg::undigits(&r, &ds);
            m[(row, col)]
        })
        .collect();
    Ok(transform_sites(data, n, q, |inp, out| {
        for (j, o) in out.iter_mut().enumerate() {
            *o = basis
                .sparse(j)
                .iter()
                .fold(cr(T::zero()), |acc, &(rr, cc, v)| acc + inp[rr * d + cc] * v);
        }
    }))
}

/// Correlation tensor of an operator that should be Hermitian.
pub fn operator_tensor<T: Real>(m: &CMatrix<T>, dims: DimSpec, basis: &GgmBasis<T>) -> Result<CorrelationTensor<T>> {
    let herm = hermiticity_residual(m).as_f64();
    if herm > T::TOL.herm {
        return Err(Error::NotHermitian { residual: herm });
    }
    let coefs = operator_coefficients(m, dims, basis)?;
    let worst = coefs.iter().fold(0.0f64, |a, z| a.max(z.im.as_f64().abs()));
    if worst > T::TOL.herm * (dims.total() as f64).max(1.0) {
        return Err(Error::NotHermitian { residual: worst });
    }
    Ok(CorrelationTensor {
        dims,
        data: coefs.into_iter().map(|z| z.re).collect(),
    })
}

/// T(j₁…jₙ) = tr(ρ λ_{j₁}⊗…⊗λ_{jₙ}).
pub fn correlation_tensor<T: Real>(rho: &DensityMatrix<T>, basis: &GgmBasis<T>) -> Result<CorrelationTensor<T>> {
    operator_tensor(rho.matrix(), rho.dims(), basis)
}

/// d^{-n} Σ T(j) λ_{j₁}⊗…⊗λ_{jₙ}; positivity is reported, not enforced.
pub fn reconstruct_state<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> Result<Reconstruction<T>> {
    let dims = t.dims;
    let (d, n) = (dims.d, dims.n);
    if basis.d() != d {
        return Err(Error::Dimension(format!("basis d={} but tensor d={d}", basis.d())));
    }
    let lead = t.data[0].as_f64();
    if (lead - 1.0).abs() > T::TOL.trace {
        return Err(Error::TraceNotOne { trace: lead });
    }
    let q = d * d;
    let data: Vec<C<T>> = t.data.iter().map(|&x| cr(x)).collect();
    let out = transform_sites(data, n, q, |inp, out| {
        out.iter_mut().for_each(|o| *o = cr(T::zero()));
        for (j, &x) in inp.iter().enumerate() {
            if x == cr(T::zero()) {
                continue;
            }
            for &(rr, cc, v) in basis.sparse(j) {
                out[rr * d + cc] += x * v;
            }
        }
    });
    let total = dims.total();
    let ds = vec![d; n];
    let qs = vec![q; n];
    let scale = cr(T::one() / T::lit(total as f64));
    let mut m = CMatrix::<T>::zeros(total, total);
    let mut p = vec![0; n];
    let mut r = vec![0; n];
    let mut c = vec![0; n];
    for (flat, &v) in out.iter().enumerate() {
        digits(flat, &qs, &mut p);
        for i in 0..n {
            r[i] = p[i] / d;
            c[i] = p[i] % d;
        }
        let row = crate::linalg::undigits(&r, &ds);
        let col = crate::linalg::undigits(&c, &ds);
        m[(row, col)] = v * scale;
    }
    Ok(Reconstruction::new(dims, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_norm, kron_all, trace_product};
    use crate::scalar::{c, CVector};

    fn phi_plus(d: usize) -> DensityMatrix<f64> {
        let mut psi = CVector::<f64>::zeros(d * d);
        for j in 0..d {
            psi[j * d + j] = c(1.0, 0.0);
        }
        DensityMatrix::from_pure(DimSpec::new(d, 2).unwrap(), &psi).unwrap()
    }

    #[test]
    fn matches_dense_traces() {
        let basis = GgmBasis::<f64>::new(2).unwrap();
        let dims = DimSpec::new(2, 3).unwrap();
        let mut psi = CVector::<f64>::zeros(8);
        psi[0] = c(0.3, 0.1);
        psi[3] = c(-0.2, 0.5);
        psi[5] = c(0.4, 0.0);
        psi[7] = c(0.1, -0.6);
        let rho = DensityMatrix::from_pure(dims, &psi).unwrap();
        let t = correlation_tensor(&rho, &basis).unwrap();
        for idx in [[0, 0, 0], [1, 2, 3], [3, 3, 1], [2, 0, 1]] {
            let lam: Vec<_> = idx.iter().map(|&j| basis.matrix(j).clone()).collect();
            let dense = trace_product(rho.matrix(), &kron_all(&lam));
            assert!((dense.re - t.get(&idx)).abs() < 1e-13);
        }
        assert!((t.get(&[0, 0, 0]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phi_plus_tensor_is_signed_identity() {
        let basis = GgmBasis::<f64>::new(3).unwrap();
        let t = correlation_tensor(&phi_plus(3), &basis).unwrap();
        for j in 1..9 {
            for k in 1..9 {
                let want = match (j == k, basis.sector(j)) {
                    (false, _) => 0.0,
                    (true, Sector::Real) => 1.0,
                    _ => -1.0,
                };
                assert!((t.get(&[j, k]) - want).abs() < 1e-13);
            }
            assert!(t.get(&[j, 0]).abs() < 1e-13);
            assert!(t.get(&[0, j]).abs() < 1e-13);
        }
    }

    #[test]
    fn round_trip_and_marginal() {
        let basis = GgmBasis::<f64>::new(3).unwrap();
        let rho = phi_plus(3);
        let t = correlation_tensor(&rho, &basis).unwrap();
        let back = reconstruct_state(&t, &basis).unwrap();
        assert!(back.is_psd);
        assert!(hs_norm(&(back.matrix - rho.matrix())) < 1e-12);
        let ma = t.marginal(&[0]).unwrap();
        assert_eq!(ma.data().len(), 9);
        assert!(ma.data()[1..].iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn rejects_non_hermitian() {
        let basis = GgmBasis::<f64>::new(2).unwrap();
        let mut m = CMatrix::<f64>::identity(2, 2) * c(0.5, 0.0);
        m[(0, 1)] = c(0.0, 0.3);
        let dims = DimSpec::new(2, 1).unwrap();
        assert!(operator_tensor(&m, dims, &basis).is_err());
    }
}
