//! Generalized Gell-Mann basis, normalized to tr(λⱼλₖ) = d δⱼₖ.
//!
//! Index 0 is the identity. Indices `1..=L` form the real (symmetric) sector:
//! off-diagonal symmetric pairs in lexicographic order followed by the `d-1`
//! diagonal matrices. Indices `L+1..d²` are the antisymmetric pairs.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::scalar::{c, cr, CMatrix, Real, C};

/// Which family an element of the basis belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GgmKind {
    Identity,
    Symmetric { j: usize, k: usize },
    Diagonal { l: usize },
    Antisymmetric { j: usize, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    Identity,
    Real,
    Imaginary,
}

/// Nonzero entry `(row, col, value)` of a basis matrix.
pub type SparseEntry<T> = (usize, usize, C<T>);

#[derive(Clone, Debug)]
pub struct GgmBasis<T: Real> {
    d: usize,
    kinds: Vec<GgmKind>,
    matrices: Vec<CMatrix<T>>,
    sparse: Vec<Vec<SparseEntry<T>>>,
}

/// Number of real-sector elements, (d−1)(d+2)/2.
pub const fn real_count(d: usize) -> usize {
    (d - 1) * (d + 2) / 2
}

/// Number of imaginary-sector elements, d(d−1)/2.
pub const fn imag_count(d: usize) -> usize {
    d * (d - 1) / 2
}

impl<T: Real> GgmBasis<T> {
    pub fn new(d: usize) -> Result<Self> {
        if !(2..=64).contains(&d) {
            return Err(Error::Dimension(format!("GGM basis needs 2 <= d <= 64, got {d}")));
        }
        let mut kinds = vec![GgmKind::Identity];
        for j in 0..d {
            for k in j + 1..d {
                kinds.push(GgmKind::Symmetric { j, k });
            }
        }
        kinds.extend((0..d - 1).map(|l| GgmKind::Diagonal { l }));
        for j in 0..d {
            for k in j + 1..d {
                kinds.push(GgmKind::Antisymmetric { j, k });
            }
        }
        let half = (d as f64 / 2.0).sqrt();
        let sparse: Vec<Vec<SparseEntry<T>>> = kinds
            .iter()
            .map(|kind| match *kind {
                GgmKind::Identity => (0..d).map(|i| (i, i, c(1.0, 0.0))).collect(),
                GgmKind::Symmetric { j, k } => vec![(j, k, c(half, 0.0)), (k, j, c(half, 0.0))],
                GgmKind::Antisymmetric { j, k } => vec![(j, k, c(0.0, -half)), (k, j, c(0.0, half))],
                GgmKind::Diagonal { l } => {
                    let kk = (d as f64 / ((l + 1) * (l + 2)) as f64).sqrt();
                    let mut e: Vec<_> = (0..=l).map(|i| (i, i, c(kk, 0.0))).collect();
                    e.push((l + 1, l + 1, c(-kk * (l + 1) as f64, 0.0)));
                    e
                }
            })
            .collect();
        let matrices = sparse
            .iter()
            .map(|entries| {
                let mut m = CMatrix::<T>::zeros(d, d);
                for &(r, col, v) in entries {
                    m[(r, col)] = v;
                }
                m
            })
            .collect();
        Ok(Self {
            d,
            kinds,
            matrices,
            sparse,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// L, the size of the real sector.
    pub fn l(&self) -> usize {
        real_count(self.d)
    }

    /// L̂, the size of the imaginary sector.
    pub fn lhat(&self) -> usize {
        imag_count(self.d)
    }

    pub fn len(&self) -> usize {
        self.d * self.d
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrix(&self, j: usize) -> &CMatrix<T> {
        &self.matrices[j]
    }

    pub fn matrices(&self) -> &[CMatrix<T>] {
        &self.matrices
    }

    pub fn sparse(&self, j: usize) -> &[SparseEntry<T>] {
        &self.sparse[j]
    }

    pub fn kind(&self, j: usize) -> GgmKind {
        self.kinds[j]
    }

    pub fn sector(&self, j: usize) -> Sector {
        match j {
            0 => Sector::Identity,
            j if j <= self.l() => Sector::Real,
            _ => Sector::Imaginary,
        }
    }

    pub fn real_range(&self) -> RangeInclusive<usize> {
        1..=self.l()
    }

    pub fn imag_range(&self) -> RangeInclusive<usize> {
        self.l() + 1..=self.d * self.d - 1
    }

    /// Coefficient vector tr(A λⱼ) of a d×d matrix.
    pub fn coefficients(&self, a: &CMatrix<T>) -> Vec<C<T>> {
        self.sparse
            .iter()
            .map(|entries| {
                entries
                    .iter()
                    .fold(cr(T::zero()), |acc, &(r, col, v)| acc + a[(col, r)] * v)
            })
            .collect()
    }
}
