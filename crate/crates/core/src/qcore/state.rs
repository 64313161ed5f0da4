use serde::{Deserialize, Serialize};

use super::eigen::{eigvalsh, trace_norm};
use super::matrix::{CMatrix, C64};
use super::qubits_for_dim;
use crate::{tol, Error, Result};

/// Pure state of `n` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amps.len()).ok_or_else(|| {
            Error::Invariant(format!("state length {} is not a power of two", amps.len()))
        })?;
        if n_qubits > tol::MAX_QUBITS {
            return Err(Error::Capacity(format!("{n_qubits} qubits")));
        }
        let s = Self { n_qubits, amps };
        let norm = s.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::STATE {
            return Err(Error::Invariant(format!("state norm {norm} is not 1")));
        }
        Ok(s)
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: CMatrix::outer(&self.amps),
        }
    }
}

/// Mixed state of `n` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Invariant("density matrix must be square".into()));
        }
        let n_qubits = qubits_for_dim(matrix.rows())
            .ok_or_else(|| Error::Invariant("density matrix dimension is not a power of two".into()))?;
        let rho = Self { n_qubits, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(n_qubits: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_error();
        if herm > tol::STATE {
            return Err(Error::Invariant(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tol::STATE || tr.im.abs() > tol::STATE {
            return Err(Error::Invariant(format!("density matrix trace {tr}")));
        }
        let min = eigvalsh(&self.matrix)?[0];
        if min < -tol::PSD {
            return Err(Error::Invariant(format!("density matrix eigenvalue {min:e} < 0")));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Total order on matrix entries, so `trace_distance` subtracts in a fixed direction.
fn entries_precede(a: &CMatrix, b: &CMatrix) -> bool {
    for (x, y) in a.data().iter().zip(b.data()) {
        match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
            std::cmp::Ordering::Equal => continue,
            o => return o == std::cmp::Ordering::Less,
        }
    }
    true
}

/// `½‖a − b‖₁`, clamped to `[0, 1]`; bitwise symmetric in its arguments.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let (a, b) = if entries_precede(&a.matrix, &b.matrix) { (a, b) } else { (b, a) };
    let diff = a.matrix.sub(&b.matrix)?;
    Ok((0.5 * trace_norm(&diff)?).clamp(0.0, 1.0))
}

/// Arithmetic mean of density matrices.
pub fn mean_state(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    let first = states.first().ok_or(Error::Empty("mean_state needs at least one state"))?;
    let mut acc = CMatrix::zeros(first.dim(), first.dim());
    for s in states {
        if s.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: s.dim(),
            });
        }
        acc.axpy(C64::new(1.0, 0.0), &s.matrix)?;
    }
    let inv = 1.0 / states.len() as f64;
    Ok(DensityMatrix::from_raw(first.n_qubits, acc.scale(C64::new(inv, 0.0))))
}

/// Mean of `|ψ><ψ|` over pure states, without materialising each projector.
pub fn mean_pure<'a>(states: impl IntoIterator<Item = &'a StateVector>) -> Result<DensityMatrix> {
    let mut iter = states.into_iter().peekable();
    let first = iter.peek().ok_or(Error::Empty("mean_pure needs at least one state"))?;
    let (n_qubits, dim) = (first.n_qubits(), first.dim());
    let mut acc = CMatrix::zeros(dim, dim);
    let mut count = 0usize;
    for s in iter {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: s.dim() });
        }
        let a = s.amplitudes();
        let data = acc.data_mut();
        for i in 0..dim {
            let ai = a[i];
            for j in 0..dim {
                data[i * dim + j] += ai * a[j].conj();
            }
        }
        count += 1;
    }
    Ok(DensityMatrix::from_raw(n_qubits, acc.scale(C64::new(1.0 / count as f64, 0.0))))
}
