//! Dense complex linear algebra and quantum-state primitives.

mod eigen;
mod matrix;
pub mod ops;
mod state;

pub use eigen::{eigh, eigsh_ground, eigvalsh, trace_norm};
pub use matrix::{kron, pauli_x, pauli_y, pauli_z, CMatrix, C64};
pub use state::{mean_pure, mean_state, trace_distance, DensityMatrix, StateVector};

/// Bit mask of `qubit` in an `n`-qubit basis index. Qubit 0 is the most significant bit.
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// `log2(dim)` when `dim` is a power of two.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}
