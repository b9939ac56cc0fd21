//! JSON instance files.
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "rho": [[[0.7, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.3, 0.0]]],
//!   "observables": { "X": [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]] },
//!   "s_values": [0.5, 1.0]
//! }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use single_ur_core::linalg::ComplexMatrix;
use single_ur_core::states::{make_density, DensityMatrix, Observable};
use single_ur_core::Complex64;

use crate::CliError;

pub type EncodedMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dim: usize,
    pub rho: EncodedMatrix,
    #[serde(default)]
    pub observables: BTreeMap<String, EncodedMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_values: Option<Vec<f64>>,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub rho: DensityMatrix,
    pub observables: Vec<(String, Observable)>,
    pub s_values: Option<Vec<f64>>,
}

pub fn encode(m: &ComplexMatrix) -> EncodedMatrix {
    m.rows()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn decode(name: &str, dim: usize, m: &EncodedMatrix) -> Result<ComplexMatrix, CliError> {
    if m.len() != dim {
        return Err(CliError::Validation(format!(
            "{name}: DimensionMismatch: {} rows, dim is {dim}",
            m.len()
        )));
    }
    let rows = m
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(rows).map_err(|e| CliError::Validation(format!("{name}: {e}")))
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json() + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn from_operators(
        rho: &DensityMatrix,
        observables: &[(String, Observable)],
        s_values: Option<Vec<f64>>,
    ) -> Self {
        Self {
            dim: rho.dim(),
            rho: encode(rho.matrix()),
            observables: observables
                .iter()
                .map(|(n, o)| (n.clone(), encode(o.matrix())))
                .collect(),
            s_values,
        }
    }

    /// Checks every invariant, naming the first one violated.
    pub fn validate(&self) -> Result<Instance, CliError> {
        if self.dim == 0 {
            return Err(CliError::Validation("dim: must be at least 1".into()));
        }
        let rho = make_density(decode("rho", self.dim, &self.rho)?)
            .map_err(|e| CliError::Validation(format!("rho: {e}")))?;
        let mut observables = Vec::with_capacity(self.observables.len());
        for (name, m) in &self.observables {
            let obs = Observable::new(decode(name, self.dim, m)?)
                .map_err(|e| CliError::Validation(format!("observable {name}: {e}")))?;
            observables.push((name.clone(), obs));
        }
        if let Some(s_values) = &self.s_values {
            if let Some(s) = s_values.iter().find(|s| !(s.is_finite() && **s >= 0.5)) {
                return Err(CliError::Validation(format!(
                    "s_values: {s} is not a finite value ≥ 1/2"
                )));
            }
        }
        Ok(Instance {
            rho,
            observables,
            s_values: self.s_values.clone(),
        })
    }
}

pub fn load(path: &Path) -> Result<Instance, CliError> {
    InstanceFile::read(path)?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAG: &str = r#"{"dim": 2, "rho": [[[0.7, 0], [0, 0]], [[0, 0], [0.3, 0]]],
        "observables": {"X": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}}"#;

    #[test]
    fn parses_and_validates() {
        let inst = InstanceFile::from_json(DIAG).unwrap().validate().unwrap();
        assert_eq!(inst.observables.len(), 1);
        assert!((inst.rho.lambda_max() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = InstanceFile::from_json("{\"dim\": 2, \"rho\": [").unwrap_err();
        assert_eq!(err.exit_code(), crate::EXIT_USAGE);
        let err = InstanceFile::from_json(r#"{"dim": 2, "rho": [[[1, 0, 3]]]}"#).unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
    }

    #[test]
    fn invariant_violations_are_named() {
        let cases = [
            (
                r#"{"dim": 2, "rho": [[[0.7, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#,
                "TraceNotOne",
            ),
            (
                r#"{"dim": 2, "rho": [[[1.2, 0], [0, 0]], [[0, 0], [-0.2, 0]]]}"#,
                "NotPSD",
            ),
            (
                r#"{"dim": 2, "rho": [[[0.5, 0], [0.3, 0]], [[0, 0], [0.5, 0]]]}"#,
                "NotHermitian",
            ),
            (
                r#"{"dim": 3, "rho": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#,
                "DimensionMismatch",
            ),
        ];
        for (json, name) in cases {
            let err = InstanceFile::from_json(json)
                .unwrap()
                .validate()
                .unwrap_err();
            assert_eq!(err.exit_code(), crate::EXIT_VALIDATION);
            assert!(err.to_string().contains(name), "{err} should name {name}");
        }
    }
}
