//! Dense complex-matrix helpers over multipartite index spaces.
//!
//! Subsystem indices are big-endian: party 0 is the most significant digit.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{cr, CMatrix, Real, C};

/// Kronecker product of a list of matrices.
pub fn kron_all<T: Real>(factors: &[CMatrix<T>]) -> CMatrix<T> {
    let mut it = factors.iter();
    let first = it.next().expect("kron_all needs at least one factor").clone();
    it.fold(first, |acc, f| acc.kronecker(f))
}

pub fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::<T>::identity(dim, dim)
}

/// Splits a flat index into per-party digits.
#[inline]
pub fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

#[inline]
pub fn undigits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

fn check_square<T: Real>(m: &CMatrix<T>, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::Shape {
            expected: total,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(total)
}

/// Partial transpose on the parties flagged in `sites`.
pub fn partial_transpose<T: Real>(m: &CMatrix<T>, dims: &[usize], sites: &[usize]) -> Result<CMatrix<T>> {
    let total = check_square(m, dims)?;
    if let Some(&s) = sites.iter().find(|&&s| s >= dims.len()) {
        return Err(Error::Partition(format!("site {s} out of range")));
    }
    let n = dims.len();
    let mut out = CMatrix::<T>::zeros(total, total);
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    for i in 0..total {
        for j in 0..total {
            digits(i, dims, &mut a);
            digits(j, dims, &mut b);
            for &s in sites {
                std::mem::swap(&mut a[s], &mut b[s]);
            }
            out[(undigits(&a, dims), undigits(&b, dims))] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reduced operator on the parties in `keep` (sorted, distinct).
pub fn partial_trace<T: Real>(m: &CMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<CMatrix<T>> {
    let total = check_square(m, dims)?;
    if keep.is_empty() {
        return Err(Error::Partition("empty keep set".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep[keep.len() - 1] >= dims.len() {
        return Err(Error::Partition(format!(
            "keep set {keep:?} must be sorted, distinct and in range"
        )));
    }
    let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kt: usize = kdims.iter().product();
    let n = dims.len();
    let mut out = CMatrix::<T>::zeros(kt, kt);
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    let mut ka = vec![0; keep.len()];
    let mut kb = vec![0; keep.len()];
    for i in 0..total {
        digits(i, dims, &mut a);
        for j in 0..total {
            digits(j, dims, &mut b);
            let traced_equal = (0..n).all(|p| keep.contains(&p) || a[p] == b[p]);
            if !traced_equal {
                continue;
            }
            for (q, &k) in keep.iter().enumerate() {
                ka[q] = a[k];
                kb[q] = b[k];
            }
            out[(undigits(&ka, &kdims), undigits(&kb, &kdims))] += m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorders parties so that new party `k` is old party `perm[k]`.
pub fn permute_parties<T: Real>(m: &CMatrix<T>, dims: &[usize], perm: &[usize]) -> Result<CMatrix<T>> {
    let total = check_square(m, dims)?;
    let n = dims.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Partition(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    if perm.len() != n {
        return Err(Error::Partition(format!("{perm:?} is not a permutation")));
    }
    let ndims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    let mut na = vec![0; n];
    let mut nb = vec![0; n];
    let mut out = CMatrix::<T>::zeros(total, total);
    for i in 0..total {
        digits(i, dims, &mut a);
        for (k, &p) in perm.iter().enumerate() {
            na[k] = a[p];
        }
        let ni = undigits(&na, &ndims);
        for j in 0..total {
            digits(j, dims, &mut b);
            for (k, &p) in perm.iter().enumerate() {
                nb[k] = b[p];
            }
            out[(ni, undigits(&nb, &ndims))] = m[(i, j)];
        }
    }
    Ok(out)
}

/// tr(A B) without forming the product.
pub fn trace_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> C<T> {
    let n = a.nrows();
    let mut acc = C::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// ∥A − A†∥_HS.
pub fn hermiticity_residual<T: Real>(m: &CMatrix<T>) -> T {
    hs_norm(&(m - m.adjoint()))
}

/// ∥U†U − I∥_HS.
pub fn unitarity_residual<T: Real>(u: &CMatrix<T>) -> T {
    hs_norm(&(u.adjoint() * u - identity::<T>(u.nrows())))
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let mut s: Vec<T> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn real_singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    let mut s: Vec<T> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    singular_values(m).into_iter().fold(T::zero(), |a, b| a + b)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let h = (m + m.adjoint()) * cr(T::lit(0.5));
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::<T>::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    let h = (m + m.adjoint()) * cr(T::lit(0.5));
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(T::lit(f64::INFINITY), |a, b| a.min(b))
}

/// Swap operator on C^d ⊗ C^d.
pub fn swap_operator<T: Real>(d: usize) -> CMatrix<T> {
    let mut s = CMatrix::<T>::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            s[(j * d + k, k * d + j)] = cr(T::one());
        }
    }
    s
}

/// Partial transpose of the swap: Σ |jj⟩⟨kk|.
pub fn pi_operator<T: Real>(d: usize) -> CMatrix<T> {
    let mut p = CMatrix::<T>::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            p[(j * d + j, k * d + k)] = cr(T::one());
        }
    }
    p
}

pub fn to_complex<T: Real>(m: &DMatrix<T>) -> CMatrix<T> {
    m.map(cr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn sample(n: usize) -> CMatrix<f64> {
        CMatrix::from_fn(n, n, |i, j| c((i * 7 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.3))
    }

    #[test]
    fn partial_transpose_is_involution() {
        let m = sample(12);
        let dims = [3, 2, 2];
        let pt = partial_transpose(&m, &dims, &[1]).unwrap();
        assert!(hs_norm(&(partial_transpose(&pt, &dims, &[1]).unwrap() - &m)) < 1e-14);
        let full = partial_transpose(&m, &dims, &[0, 1, 2]).unwrap();
        assert!(hs_norm(&(full - m.transpose())) < 1e-14);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = sample(2);
        let b = sample(3);
        let ab = a.kronecker(&b);
        let tb = b.trace();
        let ra = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(hs_norm(&(ra - &a * tb)) < 1e-12);
        let rb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(hs_norm(&(rb - &b * a.trace())) < 1e-12);
        assert!(partial_trace(&ab, &[2, 3], &[]).is_err());
    }

    #[test]
    fn permutation_swaps_factors() {
        let a = sample(2);
        let b = sample(3);
        let p = permute_parties(&a.kronecker(&b), &[2, 3], &[1, 0]).unwrap();
        assert!(hs_norm(&(p - b.kronecker(&a))) < 1e-14);
    }

    #[test]
    fn swap_and_pi_traces() {
        let d = 3;
        let s = swap_operator::<f64>(d);
        let p = pi_operator::<f64>(d);
        assert_eq!(s.trace().re, d as f64);
        assert_eq!(trace_product(&s, &s).re, (d * d) as f64);
        assert_eq!(trace_product(&s, &p).re, d as f64);
        assert_eq!(trace_product(&p, &p).re, (d * d) as f64);
        let pt = partial_transpose(&s, &[d, d], &[1]).unwrap();
        assert!(hs_norm(&(pt - p)) < 1e-15);
    }

    #[test]
    fn singular_values_descend() {
        let s = singular_values(&sample(5));
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let hs2: f64 = s.iter().map(|x| x * x).sum();
        assert!((hs2 - hs_norm(&sample(5)).powi(2)).abs() < 1e-9);
    }
}
