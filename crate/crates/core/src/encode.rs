//! Classical-to-quantum encodings.

use serde::{Deserialize, Serialize};

use crate::circuit::{rx, ry};
use crate::qcore::ops::apply_1q;
use crate::qcore::{StateVector, C64};
use crate::{tol, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleGate {
    #[default]
    Ry,
    Rx,
}

/// Gate choice for angle encoding. Feature `i` always goes to qubit `i mod n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleLayout {
    /// Ry on the first pass over the qubits, Rx on the second, Ry on the third, ...
    #[default]
    Alternating,
    Fixed(AngleGate),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EncodingSpec {
    Amplitude,
    Angle {
        #[serde(default)]
        layout: AngleLayout,
    },
    /// Features are the real amplitudes of a state.
    RawState,
}

impl EncodingSpec {
    /// Gate used for feature `index` under angle encoding on `n` qubits.
    pub fn angle_gate(layout: AngleLayout, index: usize, n_qubits: usize) -> AngleGate {
        match layout {
            AngleLayout::Fixed(g) => g,
            AngleLayout::Alternating if (index / n_qubits).is_multiple_of(2) => AngleGate::Ry,
            AngleLayout::Alternating => AngleGate::Rx,
        }
    }
}

pub fn encode(x: &[f64], spec: &EncodingSpec, n_qubits: usize) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits > tol::MAX_QUBITS {
        return Err(Error::InvalidParameter(format!("{n_qubits} qubits")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite feature".into()));
    }
    let dim = 1usize << n_qubits;
    match *spec {
        EncodingSpec::Amplitude => {
            if x.len() > dim {
                return Err(Error::InvalidParameter(format!("{} features exceed amplitude capacity {dim}", x.len())));
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::InvalidParameter("cannot amplitude-encode the zero vector".into()));
            }
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            for (a, v) in amps.iter_mut().zip(x) {
                *a = C64::new(v / norm, 0.0);
            }
            StateVector::new(amps)
        }
        EncodingSpec::Angle { layout } => {
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            amps[0] = C64::new(1.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                let u = match EncodingSpec::angle_gate(layout, i, n_qubits) {
                    AngleGate::Ry => ry(v),
                    AngleGate::Rx => rx(v),
                };
                apply_1q(&mut amps, n_qubits, i % n_qubits, &u);
            }
            StateVector::new(amps)
        }
        EncodingSpec::RawState => {
            if x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
            }
            StateVector::new(x.iter().map(|&v| C64::new(v, 0.0)).collect())
        }
    }
}

pub fn encode_all(xs: &[Vec<f64>], spec: &EncodingSpec, n_qubits: usize) -> Result<Vec<StateVector>> {
    xs.iter().map(|x| encode(x, spec, n_qubits)).collect()
}
