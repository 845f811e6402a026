//! Randomized orthogonal and unitary measurement toolbox: moments, entanglement
//! and imaginarity criteria, classical shadows and overlap estimation.
//!
//! Numerical types are generic over [`scalar::Real`] (`f64` or `f32`); the
//! aliases below fix them to `f64`.

pub mod diagnostics;
pub mod entanglement;
pub mod error;
pub mod ggm;
pub mod haar;
pub mod imaginarity;
pub mod io;
pub mod linalg;
pub mod moments;
pub mod overlap;
pub mod rng;
pub mod scalar;
pub mod shadows;
pub mod state;
pub mod tensor;
pub mod zoo;

pub use error::{Error, Result};
pub use rng::SeedPath;
pub use scalar::Real;
pub use state::DimSpec;

pub type DensityMatrix = state::DensityMatrix<f64>;
pub type DensityMatrixF32 = state::DensityMatrix<f32>;
pub type GgmBasis = ggm::GgmBasis<f64>;
pub type CorrelationTensor = tensor::CorrelationTensor<f64>;
pub type Reconstruction = state::Reconstruction<f64>;
pub type CMatrix = scalar::CMatrix<f64>;
pub type CVector = scalar::CVector<f64>;
pub type Complex = scalar::C<f64>;
