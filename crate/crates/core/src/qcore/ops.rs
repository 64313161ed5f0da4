//! In-place kernels for single-qubit and CNOT actions on state vectors and on
//! `2^n x 2^n` operators. Qubit 0 is the most significant bit of the basis index.

use super::matrix::{CMatrix, C64};
use super::qubit_mask;

/// 2x2 complex matrix `[[m00, m01], [m10, m11]]`.
pub type Mat2 = [[C64; 2]; 2];

/// Superoperator acting on the 2x2 block of one qubit: `vec(B) -> S vec(B)`,
/// with `vec` ordering `(00, 01, 10, 11)`.
pub type Super2 = [[C64; 4]; 4];

pub fn mat2_adjoint(u: &Mat2) -> Mat2 {
    [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_from(m: &CMatrix) -> Mat2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn mat2_to_cmatrix(u: &Mat2) -> CMatrix {
    CMatrix::from_vec(2, 2, vec![u[0][0], u[0][1], u[1][0], u[1][1]]).unwrap()
}

/// Superoperator of `B -> Σ_k E_k B E_k†`.
pub fn superop_from_kraus(kraus: &[Mat2]) -> Super2 {
    let mut s = [[C64::new(0.0, 0.0); 4]; 4];
    for e in kraus {
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        s[2 * a + b][2 * c + d] += e[a][c] * e[b][d].conj();
                    }
                }
            }
        }
    }
    s
}

/// Applies `u` to `qubit` of a state vector.
pub fn apply_1q(amps: &mut [C64], n_qubits: usize, qubit: usize, u: &Mat2) {
    let mask = qubit_mask(n_qubits, qubit);
    for i in 0..amps.len() {
        if i & mask == 0 {
            let a = amps[i];
            let b = amps[i | mask];
            amps[i] = u[0][0] * a + u[0][1] * b;
            amps[i | mask] = u[1][0] * a + u[1][1] * b;
        }
    }
}

pub fn apply_cnot(amps: &mut [C64], n_qubits: usize, control: usize, target: usize) {
    let cm = qubit_mask(n_qubits, control);
    let tm = qubit_mask(n_qubits, target);
    for i in 0..amps.len() {
        if i & cm != 0 && i & tm == 0 {
            amps.swap(i, i | tm);
        }
    }
}

/// `M <- (I ⊗ u ⊗ I) M`.
pub fn apply_left(m: &mut CMatrix, n_qubits: usize, qubit: usize, u: &Mat2) {
    let dim = m.rows();
    let cols = m.cols();
    let mask = qubit_mask(n_qubits, qubit);
    let data = m.data_mut();
    for r0 in 0..dim {
        if r0 & mask != 0 {
            continue;
        }
        let r1 = r0 | mask;
        for c in 0..cols {
            let a = data[r0 * cols + c];
            let b = data[r1 * cols + c];
            data[r0 * cols + c] = u[0][0] * a + u[0][1] * b;
            data[r1 * cols + c] = u[1][0] * a + u[1][1] * b;
        }
    }
}

/// `M <- M (I ⊗ v ⊗ I)`.
pub fn apply_right(m: &mut CMatrix, n_qubits: usize, qubit: usize, v: &Mat2) {
    let cols = m.cols();
    let mask = qubit_mask(n_qubits, qubit);
    for row in m.data_mut().chunks_mut(cols) {
        for c0 in 0..cols {
            if c0 & mask != 0 {
                continue;
            }
            let c1 = c0 | mask;
            let a = row[c0];
            let b = row[c1];
            row[c0] = a * v[0][0] + b * v[1][0];
            row[c1] = a * v[0][1] + b * v[1][1];
        }
    }
}

/// `M <- U M U†` with `U = I ⊗ u ⊗ I`.
pub fn conjugate(m: &mut CMatrix, n_qubits: usize, qubit: usize, u: &Mat2) {
    apply_left(m, n_qubits, qubit, u);
    apply_right(m, n_qubits, qubit, &mat2_adjoint(u));
}

/// `M <- P M P` for the CNOT permutation `P`.
pub fn conjugate_cnot(m: &mut CMatrix, n_qubits: usize, control: usize, target: usize) {
    let dim = m.rows();
    let cm = qubit_mask(n_qubits, control);
    let tm = qubit_mask(n_qubits, target);
    let data = m.data_mut();
    for i in 0..dim {
        if i & cm != 0 && i & tm == 0 {
            let j = i | tm;
            for c in 0..dim {
                data.swap(i * dim + c, j * dim + c);
            }
        }
    }
    for row in data.chunks_mut(dim) {
        for i in 0..dim {
            if i & cm != 0 && i & tm == 0 {
                row.swap(i, i | tm);
            }
        }
    }
}

/// Applies a single-qubit superoperator to every 2x2 block of `qubit`.
pub fn apply_superop(m: &mut CMatrix, n_qubits: usize, qubit: usize, s: &Super2) {
    let dim = m.rows();
    let mask = qubit_mask(n_qubits, qubit);
    let data = m.data_mut();
    for r0 in 0..dim {
        if r0 & mask != 0 {
            continue;
        }
        let r1 = r0 | mask;
        for c0 in 0..dim {
            if c0 & mask != 0 {
                continue;
            }
            let c1 = c0 | mask;
            let b = [
                data[r0 * dim + c0],
                data[r0 * dim + c1],
                data[r1 * dim + c0],
                data[r1 * dim + c1],
            ];
            let mut out = [C64::new(0.0, 0.0); 4];
            for (o, row) in out.iter_mut().zip(s) {
                *o = row[0] * b[0] + row[1] * b[1] + row[2] * b[2] + row[3] * b[3];
            }
            data[r0 * dim + c0] = out[0];
            data[r0 * dim + c1] = out[1];
            data[r1 * dim + c0] = out[2];
            data[r1 * dim + c1] = out[3];
        }
    }
}

/// Embeds a single-qubit operator as a dense `2^n` operator.
pub fn embed_1q(u: &Mat2, n_qubits: usize, qubit: usize) -> CMatrix {
    let mut m = CMatrix::identity(1 << n_qubits);
    apply_left(&mut m, n_qubits, qubit, u);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{kron, pauli_x, pauli_y, pauli_z};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_matrix(dim: usize) -> CMatrix {
        CMatrix::from_fn(dim, dim, |i, j| c((i * 7 + j * 3) as f64 * 0.1 - 0.4, (i as f64 - 2.0 * j as f64) * 0.05))
    }

    #[test]
    fn left_and_right_match_dense_kron() {
        let u = [[c(0.3, 0.1), c(-0.2, 0.7)], [c(0.5, -0.5), c(0.9, 0.0)]];
        let full = kron(&kron(&CMatrix::identity(2), &mat2_to_cmatrix(&u)).unwrap(), &CMatrix::identity(2)).unwrap();
        let m = sample_matrix(8);
        let mut left = m.clone();
        apply_left(&mut left, 3, 1, &u);
        assert!(left.max_abs_diff(&full.matmul(&m).unwrap()) < 1e-13);
        let mut right = m.clone();
        apply_right(&mut right, 3, 1, &u);
        assert!(right.max_abs_diff(&m.matmul(&full).unwrap()) < 1e-13);
    }

    #[test]
    fn cnot_conjugation_matches_permutation() {
        let n = 3;
        let mut p = CMatrix::zeros(8, 8);
        for i in 0..8usize {
            let j = if i & 4 != 0 { i ^ 1 } else { i };
            p[(j, i)] = c(1.0, 0.0);
        }
        let m = sample_matrix(8);
        let mut got = m.clone();
        conjugate_cnot(&mut got, n, 0, 2);
        let expect = p.matmul(&m).unwrap().matmul(&p).unwrap();
        assert!(got.max_abs_diff(&expect) < 1e-15);

        let mut amps: Vec<C64> = (0..8).map(|i| c(i as f64, 0.0)).collect();
        apply_cnot(&mut amps, n, 0, 2);
        assert_eq!(amps[4], c(5.0, 0.0));
        assert_eq!(amps[5], c(4.0, 0.0));
        assert_eq!(amps[1], c(1.0, 0.0));
    }

    #[test]
    fn superop_of_unitary_equals_conjugation() {
        let y = mat2_from(&pauli_y());
        let x = mat2_from(&pauli_x());
        let u = mat2_mul(&y, &x);
        let s = superop_from_kraus(&[u]);
        let m = sample_matrix(4);
        let mut a = m.clone();
        apply_superop(&mut a, 2, 0, &s);
        let mut b = m.clone();
        conjugate(&mut b, 2, 0, &u);
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn embed_matches_kron() {
        let z = mat2_from(&pauli_z());
        let full = kron(&CMatrix::identity(2), &pauli_z()).unwrap();
        assert_eq!(embed_1q(&z, 2, 1), full);
    }
}
