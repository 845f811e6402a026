//! Overlap tr(ρ₁ρ₂) and cross-platform fidelity from shared random orthogonal settings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{orthogonal, orthogonal_frame};
use crate::moments::product_expectation;
use crate::rng::{derive_seed, par_indexed, SeedPath};
use crate::scalar::{c, cr, CMatrix, Real};
use crate::shadows::mean_and_se;
use crate::state::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapVariant {
    /// Bipartite local RRMs combined with PRRMs.
    LocalCombo,
    /// One global orthogonal matrix.
    Global,
    /// Local RRMs only; needs a PTI second state.
    LocalRrmPti,
}

impl std::str::FromStr for OverlapVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local_combo" => Ok(Self::LocalCombo),
            "global" => Ok(Self::Global),
            "local_rrm_pti" => Ok(Self::LocalRrmPti),
            _ => Err(Error::Unknown {
                kind: "overlap variant",
                name: s.into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Site dimension for local variants, total dimension for the global one.
    pub d: usize,
    pub gamma: f64,
    pub eta: f64,
    pub variant: OverlapVariant,
}

const CONSTRAINT_TOL: f64 = 1e-10;

pub fn gamma_for(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64, d: usize) -> f64 {
    let d = d as f64;
    let sa = alpha1 + alpha2;
    let sb = beta1 + beta2;
    let dot = alpha1 * beta1 + alpha2 * beta2;
    (-sa * sb + d * dot) / (d * (d - 1.0) * (d + 2.0))
}

pub fn validate_overlap_params(
    alpha1: f64,
    alpha2: f64,
    beta1: f64,
    beta2: f64,
    d: usize,
    variant: OverlapVariant,
) -> Result<OverlapParams> {
    if d < 2 {
        return Err(Error::Dimension(format!("dimension {d} < 2")));
    }
    let df = d as f64;
    let sa = alpha1 + alpha2;
    let sb = beta1 + beta2;
    let dot = alpha1 * beta1 + alpha2 * beta2;
    let lhs = (df + 1.0) * sa * sb;
    if (lhs - 2.0 * dot).abs() > CONSTRAINT_TOL {
        return Err(Error::Parameter(format!(
            "(d+1)(α₁+α₂)(β₁+β₂) = {lhs} differs from 2(α₁β₁+α₂β₂) = {}",
            2.0 * dot
        )));
    }
    let gamma = gamma_for(alpha1, alpha2, beta1, beta2, d);
    if gamma.abs() < 1e-14 {
        return Err(Error::Degenerate("γ = 0 for these observables".into()));
    }
    Ok(OverlapParams {
        alpha1,
        alpha2,
        beta1,
        beta2,
        d,
        gamma,
        eta: 2.0 / (df * (df - 1.0)),
        variant,
    })
}

/// (0, 1, 1, β₂) with β₂ = −(d+1)/(d−1) solving the constraint.
pub fn default_params(d: usize, variant: OverlapVariant) -> Result<OverlapParams> {
    if d < 2 {
        return Err(Error::Dimension(format!("dimension {d} < 2")));
    }
    let df = d as f64;
    validate_overlap_params(0.0, 1.0, 1.0, -(df + 1.0) / (df - 1.0), d, variant)
}

/// Builds params without the constraint checks; for negative controls.
pub fn unchecked_params(
    alpha1: f64,
    alpha2: f64,
    beta1: f64,
    beta2: f64,
    d: usize,
    variant: OverlapVariant,
) -> OverlapParams {
    let df = d as f64;
    OverlapParams {
        alpha1,
        alpha2,
        beta1,
        beta2,
        d,
        gamma: gamma_for(alpha1, alpha2, beta1, beta2, d),
        eta: 2.0 / (df * (df - 1.0)),
        variant,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n_settings: usize,
    /// Set when the second state lacks the symmetry the variant assumes.
    pub precondition_warning: bool,
}

fn diag_observable<T: Real>(d: usize, first: f64, last: f64) -> CMatrix<T> {
    let mut m = CMatrix::<T>::zeros(d, d);
    m[(0, 0)] += c(first, 0.0);
    m[(d - 1, d - 1)] += c(last, 0.0);
    m
}

fn imag_observable<T: Real>(d: usize) -> CMatrix<T> {
    let mut m = CMatrix::<T>::zeros(d, d);
    m[(0, d - 1)] = c(0.0, -1.0);
    m[(d - 1, 0)] = c(0.0, 1.0);
    m
}

/// Per-setting estimator samples; their mean is the overlap estimate.
pub fn overlap_samples<T: Real>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    params: &OverlapParams,
    n_settings: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let dims = rho1.dims();
    if rho2.dims() != dims {
        return Err(Error::Dimension("states differ in dimensions".into()));
    }
    let (d, n) = (dims.d, dims.n);
    let expected_d = match params.variant {
        OverlapVariant::Global => dims.total(),
        _ => d,
    };
    if params.d != expected_d {
        return Err(Error::Parameter(format!(
            "parameters built for d={} but the variant needs d={expected_d}",
            params.d
        )));
    }
    if params.variant == OverlapVariant::LocalCombo && n != 2 {
        return Err(Error::Dimension("local_combo is bipartite".into()));
    }
    let m1 = diag_observable::<T>(d, params.alpha1, params.alpha2);
    let m2 = diag_observable::<T>(d, params.beta1, params.beta2);
    let mh = imag_observable::<T>(d);
    let (g, e) = (params.gamma, params.eta);
    let big = dims.total();
    let samples = par_indexed(n_settings, |i| {
        let mut rng = SeedPath::new(seed, i as u64).rng();
        match params.variant {
            OverlapVariant::Global => {
                // only rows 0 and D−1 of the rotation enter ⟨b|OρOᵀ|b⟩
                let f = orthogonal_frame::<T, _>(big, 2, &mut rng).map(cr);
                let quad = |rho: &DensityMatrix<T>, k: usize| -> f64 {
                    let v = f.column(k);
                    (v.transpose() * rho.matrix() * v)[(0, 0)].re.as_f64()
                };
                let e1 = params.alpha1 * quad(rho1, 0) + params.alpha2 * quad(rho1, 1);
                let e2 = params.beta1 * quad(rho2, 0) + params.beta2 * quad(rho2, 1);
                let bf = big as f64;
                let sa = params.alpha1 + params.alpha2;
                let sb = params.beta1 + params.beta2;
                let dot = params.alpha1 * params.beta1 + params.alpha2 * params.beta2;
                bf * (bf - 1.0) * (bf + 2.0) / (-2.0 * sa * sb + 2.0 * bf * dot) * e1 * e2
            }
            _ => {
                let os: Vec<CMatrix<T>> = (0..n).map(|_| orthogonal::<T, _>(d, &mut rng).map(cr)).collect();
                // tr(OρOᵀM) = tr(ρ ⊗ⱼ OⱼᵀMOⱼ)
                let rot = |m: &CMatrix<T>| -> Vec<CMatrix<T>> { os.iter().map(|o| o.transpose() * m * o).collect() };
                let e1 = product_expectation(rho1.matrix(), &rot(&m1)).re.as_f64();
                let e2 = product_expectation(rho2.matrix(), &rot(&m2)).re.as_f64();
                if params.variant == OverlapVariant::LocalRrmPti {
                    e1 * e2 / (2.0 * g).powi(n as i32)
                } else {
                    let rh = rot(&mh);
                    let h1 = product_expectation(rho1.matrix(), &rh).re.as_f64();
                    let h2 = product_expectation(rho2.matrix(), &rh).re.as_f64();
                    e1 * e2 / (4.0 * g * g) + h1 * h2 / (4.0 * e * e)
                }
            }
        }
    });
    Ok(samples)
}

pub fn estimate_overlap<T: Real>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    params: &OverlapParams,
    n_settings: usize,
    seed: u64,
) -> Result<OverlapEstimate> {
    if n_settings < 2 {
        return Err(Error::Parameter("need at least two settings".into()));
    }
    let xs = overlap_samples(rho1, rho2, params, n_settings, seed)?;
    let est = mean_and_se(&xs);
    let warning = match params.variant {
        OverlapVariant::LocalRrmPti => !rho2.is_pti(),
        _ => !rho2.is_real(),
    };
    Ok(OverlapEstimate {
        value: est.mean,
        std_err: est.std_err,
        n_settings,
        precondition_warning: warning,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub std_err: f64,
    pub overlap: f64,
    pub purity1: f64,
    pub purity2: f64,
}

/// tr(ρ₁ρ₂)/max{tr ρ₁², tr ρ₂²} from three independent overlap estimates.
pub fn cross_platform_fidelity<T: Real>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    params: &OverlapParams,
    n_settings: usize,
    seed: u64,
) -> Result<FidelityEstimate> {
    let o = estimate_overlap(rho1, rho2, params, n_settings, derive_seed(seed, 1))?;
    let p1 = estimate_overlap(rho1, rho1, params, n_settings, derive_seed(seed, 2))?;
    let p2 = estimate_overlap(rho2, rho2, params, n_settings, derive_seed(seed, 3))?;
    let den = if p1.value >= p2.value { p1 } else { p2 };
    if den.value <= 0.0 {
        return Err(Error::Parameter(format!(
            "nonpositive purity estimate {}; increase the setting count",
            den.value
        )));
    }
    let value = o.value / den.value;
    let rel = (o.std_err / o.value).powi(2) + (den.std_err / den.value).powi(2);
    Ok(FidelityEstimate {
        value,
        std_err: value.abs() * rel.sqrt(),
        overlap: o.value,
        purity1: p1.value,
        purity2: p2.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DimSpec;

    #[test]
    fn parameter_examples() {
        let p = validate_overlap_params(0.0, 1.0, 1.0, -1.5, 5, OverlapVariant::LocalCombo).unwrap();
        assert!((p.gamma + 0.05).abs() < 1e-15);
        assert!((p.eta - 0.1).abs() < 1e-15);
        assert!(validate_overlap_params(1.0, 1.0, 1.0, 1.0, 3, OverlapVariant::LocalCombo).is_err());
        let p = default_params(3, OverlapVariant::LocalCombo).unwrap();
        assert_eq!(p.beta2, -2.0);
        assert!((p.gamma - (1.0 - 6.0) / 30.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_overlap() {
        let mm = DensityMatrix::<f64>::maximally_mixed(DimSpec::new(3, 2).unwrap());
        for v in [OverlapVariant::LocalCombo, OverlapVariant::LocalRrmPti] {
            let p = default_params(3, v).unwrap();
            let e = estimate_overlap(&mm, &mm, &p, 2000, 1).unwrap();
            assert!((e.value - 1.0 / 9.0).abs() < 3.0 * e.std_err + 1e-12, "{v:?} {e:?}");
        }
        let p = default_params(9, OverlapVariant::Global).unwrap();
        let e = estimate_overlap(&mm, &mm, &p, 4000, 1).unwrap();
        assert!((e.value - 1.0 / 9.0).abs() < 3.0 * e.std_err + 1e-12, "{e:?}");
    }

    #[test]
    fn dimension_checks() {
        let a = DensityMatrix::<f64>::maximally_mixed(DimSpec::new(3, 2).unwrap());
        let b = DensityMatrix::<f64>::maximally_mixed(DimSpec::new(2, 2).unwrap());
        let p = default_params(3, OverlapVariant::LocalCombo).unwrap();
        assert!(estimate_overlap(&a, &b, &p, 10, 0).is_err());
        let g = default_params(3, OverlapVariant::Global).unwrap();
        assert!(estimate_overlap(&a, &a, &g, 10, 0).is_err());
    }
}
