//! JSON state files: {"d": int, "n": int, "matrix": [[[re, im], …], …]}.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, CMatrix, Real};
use crate::state::{DensityMatrix, DimSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state<T: Real>(rho: &DensityMatrix<T>) -> Self {
        let m = rho.matrix();
        let dims = rho.dims();
        Self {
            d: dims.d,
            n: dims.n,
            matrix: (0..m.nrows())
                .map(|r| {
                    (0..m.ncols())
                        .map(|k| [m[(r, k)].re.as_f64(), m[(r, k)].im.as_f64()])
                        .collect()
                })
                .collect(),
        }
    }

    /// Validated density matrix.
    pub fn to_state<T: Real>(&self) -> Result<DensityMatrix<T>> {
        let dims = DimSpec::new(self.d, self.n)?;
        let t = dims.total();
        if self.matrix.len() != t || self.matrix.iter().any(|r| r.len() != t) {
            return Err(Error::Shape {
                expected: t,
                rows: self.matrix.len(),
                cols: self.matrix.first().map_or(0, |r| r.len()),
            });
        }
        let m = CMatrix::<T>::from_fn(t, t, |r, k| {
            let [re, im] = self.matrix[r][k];
            c(re, im)
        });
        DensityMatrix::new(dims, m)
    }
}

pub fn state_to_json<T: Real>(rho: &DensityMatrix<T>) -> String {
    serde_json::to_string(&StateFile::from_state(rho)).expect("state serializes")
}

pub fn state_from_json<T: Real>(s: &str) -> Result<DensityMatrix<T>> {
    let f: StateFile = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
    f.to_state()
}

pub fn write_state<T: Real>(path: &Path, rho: &DensityMatrix<T>) -> Result<()> {
    std::fs::write(path, state_to_json(rho)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_state<T: Real>(path: &Path) -> Result<DensityMatrix<T>> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    state_from_json(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rho = crate::zoo::table1::<f64>(2).unwrap();
        let back: DensityMatrix<f64> = state_from_json(&state_to_json(&rho)).unwrap();
        assert_eq!(back, rho);
        assert!(state_from_json::<f64>(r#"{"d":2,"n":1,"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#).is_err());
        assert!(matches!(state_from_json::<f64>("{"), Err(Error::Format(_))));
    }
}
