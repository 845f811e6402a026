//! Imaginarity detection and robustness bounds from sector moments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ggm::{imag_count, real_count, GgmBasis, Sector};
use crate::linalg::trace_norm;
use crate::moments::{estimate_moment_mc, exact_sector_moments, MeasurementKind, SectorMoments};
use crate::rng::derive_seed;
use crate::scalar::Real;
use crate::state::{DensityMatrix, DimSpec};
use crate::tensor::{correlation_tensor, CorrelationTensor};

/// Gap positivity threshold on exact tensors.
pub const GAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImaginarityGaps {
    #[serde(rename = "QhatA")]
    pub qhat_a: f64,
    #[serde(rename = "QhatB")]
    pub qhat_b: f64,
    #[serde(rename = "G_A")]
    pub g_a: f64,
    #[serde(rename = "G_B")]
    pub g_b: f64,
    #[serde(rename = "G_AB")]
    pub g_ab: f64,
    pub d: usize,
}

/// (d²−1)²R⁽²⁾ − L²Q⁽²⁾ − L̂²Q̂⁽²⁾ for a bipartite system.
pub fn correlation_gap(m: &SectorMoments) -> f64 {
    let d = m.d;
    let dd = (d * d - 1) as f64;
    let l = real_count(d) as f64;
    let lh = imag_count(d) as f64;
    dd * dd * m.r2 - l * l * m.q2 - lh * lh * m.qhat2
}

fn cross_sector_sum<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> f64 {
    t.sum_squares_where(basis, |s| {
        matches!(
            (s[0], s[1]),
            (Sector::Real, Sector::Imaginary) | (Sector::Imaginary, Sector::Real)
        )
    })
    .as_f64()
}

fn marginal_imag_sum<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>, site: usize) -> f64 {
    t.sum_squares_where(basis, |s| {
        s[site] == Sector::Imaginary && s[1 - site] == Sector::Identity
    })
    .as_f64()
}

/// Exact gaps of a two-qudit state from its correlation tensor.
pub fn imaginarity_gaps<T: Real>(rho: &DensityMatrix<T>) -> Result<ImaginarityGaps> {
    let dims = rho.dims();
    if dims.n != 2 {
        return Err(Error::Dimension(format!(
            "gaps need a bipartite state, got n={}",
            dims.n
        )));
    }
    let basis = GgmBasis::new(dims.d)?;
    let t = correlation_tensor(rho, &basis)?;
    let lh = imag_count(dims.d) as f64;
    let g_a = marginal_imag_sum(&t, &basis, 0);
    let g_b = marginal_imag_sum(&t, &basis, 1);
    Ok(ImaginarityGaps {
        qhat_a: g_a / lh,
        qhat_b: g_b / lh,
        g_a,
        g_b,
        g_ab: cross_sector_sum(&t, &basis),
        d: dims.d,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImagCondition {
    MarginalA,
    MarginalB,
    Correlation,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImaginarityVerdict {
    pub is_imaginary: bool,
    pub fired_conditions: Vec<ImagCondition>,
    pub f_lb: f64,
    pub f_r_exact: Option<f64>,
    /// Agreement with the direct ρ = ρᵀ test when a state was supplied.
    pub matches_direct_check: Option<bool>,
}

pub fn imaginarity_verdict<T: Real>(
    gaps: &ImaginarityGaps,
    rho: Option<&DensityMatrix<T>>,
) -> Result<ImaginarityVerdict> {
    let mut fired = Vec::new();
    if gaps.g_a > GAP_TOL {
        fired.push(ImagCondition::MarginalA);
    }
    if gaps.g_b > GAP_TOL {
        fired.push(ImagCondition::MarginalB);
    }
    if gaps.g_ab > GAP_TOL {
        fired.push(ImagCondition::Correlation);
    }
    let is_imaginary = !fired.is_empty();
    let f_lb = robustness_lower_bound(gaps)?;
    let (f_r_exact, matches) = match rho {
        Some(r) => (Some(robustness_exact(r)), Some(r.is_real() != is_imaginary)),
        None => (None, None),
    };
    Ok(ImaginarityVerdict {
        is_imaginary,
        fired_conditions: fired,
        f_lb,
        f_r_exact,
        matches_direct_check: matches,
    })
}

/// (1/d)√(L̂(Q̂_A + Q̂_B) + G_AB).
pub fn robustness_lower_bound(gaps: &ImaginarityGaps) -> Result<f64> {
    let lh = imag_count(gaps.d) as f64;
    let rad = lh * (gaps.qhat_a + gaps.qhat_b) + gaps.g_ab;
    if rad < -GAP_TOL {
        return Err(Error::Parameter(format!("negative radicand {rad}")));
    }
    Ok(rad.max(0.0).sqrt() / gaps.d as f64)
}

/// ½∥ρ − ρᵀ∥_tr.
pub fn robustness_exact<T: Real>(rho: &DensityMatrix<T>) -> f64 {
    let m = rho.matrix();
    0.5 * trace_norm(&(m - m.transpose())).as_f64()
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockVerdict {
    /// Parties in the block (0-based).
    pub parties: Vec<usize>,
    pub block_dim: usize,
    pub gap: f64,
    pub fires: bool,
}

/// Single-system gap of each block's reduced state, viewed as one qudit of dimension d^|s|.
pub fn multipartite_imaginarity_scan<T: Real>(
    rho: &DensityMatrix<T>,
    partition: &[Vec<usize>],
) -> Result<Vec<BlockVerdict>> {
    let dims = rho.dims();
    let mut used = vec![false; dims.n];
    for block in partition {
        if block.is_empty() {
            return Err(Error::Partition("empty block".into()));
        }
        for &p in block {
            if p >= dims.n {
                return Err(Error::Partition(format!("party {p} out of range")));
            }
            if used[p] {
                return Err(Error::Partition(format!("party {p} appears in two blocks")));
            }
            used[p] = true;
        }
    }
    partition
        .iter()
        .map(|block| {
            let mut keep = block.clone();
            keep.sort_unstable();
            let reduced = rho.partial_trace(&keep)?;
            let ds = dims.d.pow(keep.len() as u32);
            let composite = DensityMatrix::new(DimSpec::new(ds, 1)?, reduced.into_matrix())?;
            let basis = GgmBasis::new(ds)?;
            let m = exact_sector_moments(&correlation_tensor(&composite, &basis)?, &basis);
            let gap = ((ds * ds - 1) as f64) * m.r2 - real_count(ds) as f64 * m.q2;
            Ok(BlockVerdict {
                parties: keep,
                block_dim: ds,
                gap,
                fires: gap > GAP_TOL,
            })
        })
        .collect()
}

/// Value with standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Monte-Carlo gaps from simulated RM, RRM and PRRM data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimatedGaps {
    #[serde(rename = "QhatA")]
    pub qhat_a: Estimate,
    #[serde(rename = "QhatB")]
    pub qhat_b: Estimate,
    #[serde(rename = "G_AB")]
    pub g_ab: Estimate,
    pub d: usize,
}

impl EstimatedGaps {
    /// Conditions whose estimate exceeds three propagated standard errors.
    pub fn significant_conditions(&self) -> Vec<ImagCondition> {
        let mut out = Vec::new();
        if self.qhat_a.value > 3.0 * self.qhat_a.std_err + GAP_TOL {
            out.push(ImagCondition::MarginalA);
        }
        if self.qhat_b.value > 3.0 * self.qhat_b.std_err + GAP_TOL {
            out.push(ImagCondition::MarginalB);
        }
        if self.g_ab.value > 3.0 * self.g_ab.std_err + GAP_TOL {
            out.push(ImagCondition::Correlation);
        }
        out
    }
}

pub fn estimate_imaginarity_gaps<T: Real>(
    rho: &DensityMatrix<T>,
    n_settings: usize,
    seed: u64,
) -> Result<EstimatedGaps> {
    let dims = rho.dims();
    if dims.n != 2 {
        return Err(Error::Dimension("gaps need a bipartite state".into()));
    }
    let d = dims.d;
    let marg = |site: usize, tag: u64| -> Result<Estimate> {
        let r = rho.partial_trace(&[site])?;
        let e = estimate_moment_mc(&r, MeasurementKind::Prrm, 2, n_settings, 0, derive_seed(seed, tag))?;
        Ok(Estimate {
            value: e.value,
            std_err: e.std_err,
        })
    };
    let r2 = estimate_moment_mc(rho, MeasurementKind::Rm, 2, n_settings, 0, derive_seed(seed, 3))?;
    let q2 = estimate_moment_mc(rho, MeasurementKind::Rrm, 2, n_settings, 0, derive_seed(seed, 4))?;
    let qh = estimate_moment_mc(rho, MeasurementKind::Prrm, 2, n_settings, 0, derive_seed(seed, 5))?;
    let dd = ((d * d - 1) as f64).powi(2);
    let l2 = (real_count(d) as f64).powi(2);
    let lh2 = (imag_count(d) as f64).powi(2);
    let g = dd * r2.value - l2 * q2.value - lh2 * qh.value;
    let se = ((dd * r2.std_err).powi(2) + (l2 * q2.std_err).powi(2) + (lh2 * qh.std_err).powi(2)).sqrt();
    Ok(EstimatedGaps {
        qhat_a: marg(0, 1)?,
        qhat_b: marg(1, 2)?,
        g_ab: Estimate { value: g, std_err: se },
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hs_norm;
    use crate::scalar::{c, CVector};

    fn state(terms: &[(usize, f64, f64)], d: usize, n: usize) -> DensityMatrix<f64> {
        let dims = DimSpec::new(d, n).unwrap();
        let mut psi = CVector::<f64>::zeros(dims.total());
        for &(i, re, im) in terms {
            psi[i] = c(re, im);
        }
        DensityMatrix::from_pure(dims, &psi).unwrap()
    }

    #[test]
    fn table_one_first_row() {
        let rho = state(&[(0, 1.0, 0.0), (8, 0.0, 1.0)], 3, 2);
        let g = imaginarity_gaps(&rho).unwrap();
        assert!(g.qhat_a.abs() < 1e-12 && g.qhat_b.abs() < 1e-12);
        assert!((g.g_ab - 4.5).abs() < 1e-12);
        let v = imaginarity_verdict(&g, Some(&rho)).unwrap();
        assert_eq!(v.fired_conditions, vec![ImagCondition::Correlation]);
        assert!((v.f_lb - 4.5f64.sqrt() / 3.0).abs() < 1e-12);
        assert!((v.f_r_exact.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(v.matches_direct_check, Some(true));
    }

    #[test]
    fn gap_formula_agrees_with_cross_sum() {
        let rho = state(&[(0, 0.3, 0.2), (2, 0.0, 0.5), (4, -0.4, 0.1), (7, 0.2, -0.6)], 3, 2);
        let basis = GgmBasis::new(3).unwrap();
        let t = correlation_tensor(&rho, &basis).unwrap();
        let g = imaginarity_gaps(&rho).unwrap();
        assert!((correlation_gap(&exact_sector_moments(&t, &basis)) - g.g_ab).abs() < 1e-10);
        let hs = 0.5 * hs_norm(&(rho.matrix() - rho.matrix().transpose()));
        assert!((robustness_lower_bound(&g).unwrap() - hs).abs() < 1e-10);
    }

    #[test]
    fn scan_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ghz_i = state(&[(0, s, 0.0), (7, 0.0, s)], 2, 3);
        let v = multipartite_imaginarity_scan(&ghz_i, &[vec![0], vec![1], vec![2]]).unwrap();
        assert!(v.iter().all(|b| !b.fires));
        let v = multipartite_imaginarity_scan(&ghz_i, &[vec![0, 1]]).unwrap();
        assert!(!v[0].fires);
        let plus_i = state(&[(0, s, 0.0), (4, 0.0, s)], 2, 3);
        let v = multipartite_imaginarity_scan(&plus_i, &[vec![0], vec![1, 2]]).unwrap();
        assert!(v[0].fires && !v[1].fires);
        let mm = DensityMatrix::<f64>::maximally_mixed(DimSpec::new(2, 3).unwrap());
        let v = multipartite_imaginarity_scan(&mm, &[vec![0], vec![1], vec![2]]).unwrap();
        assert!(v.iter().all(|b| !b.fires));
        assert!(multipartite_imaginarity_scan(&mm, &[vec![0, 1], vec![1]]).is_err());
        assert!(multipartite_imaginarity_scan(&mm, &[vec![]]).is_err());
    }

    #[test]
    fn negative_radicand_rejected() {
        let g = ImaginarityGaps {
            qhat_a: 0.0,
            qhat_b: 0.0,
            g_a: 0.0,
            g_b: 0.0,
            g_ab: -1.0,
            d: 3,
        };
        assert!(robustness_lower_bound(&g).is_err());
    }
}
