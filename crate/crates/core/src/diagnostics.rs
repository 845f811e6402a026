use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hs_norm, min_eigenvalue, partial_transpose, singular_values};
use crate::scalar::{CMatrix, Real};
use crate::state::DimSpec;

/// Norms and symmetry flags of a multipartite operator.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixDiagnostics {
    pub trace_norm: f64,
    pub hs_norm: f64,
    pub singular_values: Vec<f64>,
    pub is_real: bool,
    pub is_pti_per_site: Vec<bool>,
    pub is_ppt_per_site: Vec<bool>,
    /// Smallest eigenvalue of each single-site partial transpose.
    pub min_pt_eigenvalues: Vec<f64>,
}

impl MatrixDiagnostics {
    pub fn is_pti(&self) -> bool {
        self.is_pti_per_site.iter().all(|&b| b)
    }

    pub fn is_ppt(&self) -> bool {
        self.is_ppt_per_site.iter().all(|&b| b)
    }
}

pub fn diagnostics<T: Real>(a: &CMatrix<T>, dims: DimSpec) -> Result<MatrixDiagnostics> {
    if a.nrows() != a.ncols() {
        return Err(Error::Shape {
            expected: a.nrows(),
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let local = dims.local_dims();
    let tol = T::TOL;
    let sv: Vec<f64> = singular_values(a).into_iter().map(|x| x.as_f64()).collect();
    let mut pti = Vec::with_capacity(dims.n);
    let mut ppt = Vec::with_capacity(dims.n);
    let mut mins = Vec::with_capacity(dims.n);
    for site in 0..dims.n {
        let pt = partial_transpose(a, &local, &[site])?;
        pti.push(hs_norm(&(&pt - a)).as_f64() < tol.pti);
        let m = min_eigenvalue(&pt).as_f64();
        mins.push(m);
        ppt.push(m >= -tol.psd);
    }
    Ok(MatrixDiagnostics {
        trace_norm: sv.iter().sum(),
        hs_norm: hs_norm(a).as_f64(),
        singular_values: sv,
        is_real: hs_norm(&(a - a.transpose())).as_f64() < tol.pti,
        is_pti_per_site: pti,
        is_ppt_per_site: ppt,
        min_pt_eigenvalues: mins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn identity_flags() {
        let dims = DimSpec::new(3, 2).unwrap();
        let a = CMatrix::<f64>::identity(9, 9) * c(1.0 / 9.0, 0.0);
        let diag = diagnostics(&a, dims).unwrap();
        assert!((diag.trace_norm - 1.0).abs() < 1e-12);
        assert!(diag.is_real && diag.is_pti() && diag.is_ppt());
        assert!(diag.hs_norm <= diag.trace_norm);
        let s2: f64 = diag.singular_values.iter().map(|x| x * x).sum();
        assert!((s2 - diag.hs_norm.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn non_square_rejected() {
        let a = CMatrix::<f64>::zeros(2, 3);
        assert!(diagnostics(&a, DimSpec::new(2, 1).unwrap()).is_err());
    }
}
