//! Single-qubit Kraus noise channels: generalized amplitude damping, depolarizing, reset.

use serde::{Deserialize, Serialize};

use crate::qcore::ops::{apply_superop, mat2_adjoint, mat2_to_cmatrix, superop_from_kraus, Mat2, Super2};
use crate::qcore::{CMatrix, DensityMatrix, C64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    #[default]
    None,
    /// Generalized amplitude damping with damping `gamma` and excitation probability `p`.
    Gad { gamma: f64, p: f64 },
    Depolarizing { p: f64 },
    Reset { p: f64 },
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("noise parameter {name}={x} outside [0, 1]")))
    }
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Gad { gamma, p } => check_unit("gamma", gamma).and(check_unit("p", p)),
            NoiseSpec::Depolarizing { p } | NoiseSpec::Reset { p } => check_unit("p", p),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, NoiseSpec::None)
    }

    /// Kraus operators as 2x2 arrays. GAD keeps the labelling `E0 = √p [[0, √γ], [0, 0]]`,
    /// `E1 = √p diag(1, √(1−γ))`, `E2 = √(1−p) diag(√(1−γ), 1)`, `E3 = √(1−p) [[0, 0], [√γ, 0]]`.
    pub fn kraus(&self) -> Result<Vec<Mat2>> {
        self.validate()?;
        let z = r(0.0);
        Ok(match *self {
            NoiseSpec::None => vec![[[r(1.0), z], [z, r(1.0)]]],
            NoiseSpec::Gad { gamma, p } => {
                let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
                let (sg, sd) = (gamma.sqrt(), (1.0 - gamma).sqrt());
                vec![
                    [[z, r(sp * sg)], [z, z]],
                    [[r(sp), z], [z, r(sp * sd)]],
                    [[r(sq * sd), z], [z, r(sq)]],
                    [[z, z], [r(sq * sg), z]],
                ]
            }
            NoiseSpec::Depolarizing { p } => {
                let a = (1.0 - 0.75 * p).sqrt();
                let b = (0.25 * p).sqrt();
                let i = C64::new(0.0, b);
                vec![
                    [[r(a), z], [z, r(a)]],
                    [[z, r(b)], [r(b), z]],
                    [[z, -i], [i, z]],
                    [[r(b), z], [z, r(-b)]],
                ]
            }
            NoiseSpec::Reset { p } => {
                let a = (1.0 - p).sqrt();
                let b = p.sqrt();
                vec![[[r(a), z], [z, r(a)]], [[r(b), z], [z, z]], [[z, r(b)], [z, z]]]
            }
        })
    }

    /// Block superoperator of `ρ -> Σ E ρ E†`.
    pub fn superop(&self) -> Result<Super2> {
        Ok(superop_from_kraus(&self.kraus()?))
    }

    /// Block superoperator of the Heisenberg-picture dual `O -> Σ E† O E`.
    pub fn dual_superop(&self) -> Result<Super2> {
        let daggered: Vec<Mat2> = self.kraus()?.iter().map(mat2_adjoint).collect();
        Ok(superop_from_kraus(&daggered))
    }
}

pub fn kraus_ops(spec: &NoiseSpec) -> Result<Vec<CMatrix>> {
    Ok(spec.kraus()?.iter().map(mat2_to_cmatrix).collect())
}

/// `Σ_i E_i†E_i`; equals the identity for a valid channel.
pub fn completeness(kraus: &[CMatrix]) -> Result<CMatrix> {
    let mut acc = CMatrix::zeros(2, 2);
    for e in kraus {
        acc.axpy(r(1.0), &e.adjoint().matmul(e)?)?;
    }
    Ok(acc)
}

/// Applies the channel to one qubit of `rho`.
pub fn apply_channel(rho: &DensityMatrix, spec: &NoiseSpec, qubit: usize) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if qubit >= n {
        return Err(Error::InvalidParameter(format!("qubit {qubit} out of range for {n} qubits")));
    }
    let s = spec.superop()?;
    let mut m = rho.matrix().clone();
    if !spec.is_none() {
        apply_superop(&mut m, n, qubit, &s);
    }
    Ok(DensityMatrix::from_raw(n, m))
}
