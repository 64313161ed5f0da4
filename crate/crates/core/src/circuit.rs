//! Layered `Rz Ry Rz` + ring-CNOT ansatz, its simulation on pure and mixed states,
//! observables, and gradients (parameter shift and adjoint).

use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channels::NoiseSpec;
use crate::qcore::ops::{apply_1q, apply_cnot, apply_left, apply_superop, conjugate, conjugate_cnot, Mat2, Super2};
use crate::qcore::{qubit_mask, CMatrix, DensityMatrix, StateVector, C64};
use crate::{tol, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ansatz {
    n_qubits: usize,
    layers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Y,
    Z,
}

/// One gate of the plan; rotations carry their parameter index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Rot { axis: Axis, qubit: usize, param: usize },
    Cnot { control: usize, target: usize },
}

const ROT_AXES: [Axis; 3] = [Axis::Z, Axis::Y, Axis::Z];

impl Ansatz {
    pub fn new(n_qubits: usize, layers: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > tol::MAX_QUBITS {
            return Err(Error::InvalidParameter(format!("ansatz qubit count {n_qubits} outside 1..={}", tol::MAX_QUBITS)));
        }
        Ok(Self { n_qubits, layers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        3 * self.n_qubits * self.layers
    }

    /// Index of rotation `k` (0: Rz, 1: Ry, 2: Rz) on `qubit` in `layer`.
    pub fn param_index(&self, layer: usize, qubit: usize, k: usize) -> usize {
        layer * 3 * self.n_qubits + 3 * qubit + k
    }

    /// Ring CNOT pairs `q -> (q + 1) mod n`; none for one qubit.
    pub fn cnot_pairs(&self) -> Vec<(usize, usize)> {
        if self.n_qubits == 1 {
            return Vec::new();
        }
        (0..self.n_qubits).map(|q| (q, (q + 1) % self.n_qubits)).collect()
    }

    pub fn rotations(&self, layer: usize) -> impl Iterator<Item = Gate> + '_ {
        (0..self.n_qubits).flat_map(move |qubit| {
            ROT_AXES.iter().enumerate().map(move |(k, &axis)| Gate::Rot {
                axis,
                qubit,
                param: self.param_index(layer, qubit, k),
            })
        })
    }

    /// Full gate sequence of one layer (noise excluded).
    pub fn layer_gates(&self, layer: usize) -> Vec<Gate> {
        let mut gates: Vec<Gate> = self.rotations(layer).collect();
        gates.extend(self.cnot_pairs().into_iter().map(|(control, target)| Gate::Cnot { control, target }));
        gates
    }

    /// Parameters drawn i.i.d. from the standard normal distribution.
    pub fn random_params(&self, rng: &mut impl rand::Rng) -> ParamVector {
        ParamVector((0..self.n_params()).map(|_| rng.sample(StandardNormal)).collect())
    }

    pub fn check_params(&self, theta: &ParamVector) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::DimensionMismatch { expected: self.n_params(), got: theta.len() });
        }
        Ok(())
    }

    fn check_dim(&self, n_qubits: usize) -> Result<()> {
        if n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, got: n_qubits });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite circuit parameter".into()));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Measured operator. All supported observables are diagonal in the computational basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    /// Pauli Z on one qubit (qubit 0 is the first qubit).
    Z { qubit: usize },
    /// `|k><k|` on the computational basis state `k`.
    Projector { index: usize },
    Identity,
}

impl Observable {
    pub fn diagonal(&self, n_qubits: usize) -> Result<Vec<f64>> {
        let dim = 1usize << n_qubits;
        match *self {
            Observable::Z { qubit } => {
                if qubit >= n_qubits {
                    return Err(Error::InvalidParameter(format!("Z on qubit {qubit} of {n_qubits}")));
                }
                let mask = qubit_mask(n_qubits, qubit);
                Ok((0..dim).map(|i| if i & mask == 0 { 1.0 } else { -1.0 }).collect())
            }
            Observable::Projector { index } => {
                if index >= dim {
                    return Err(Error::InvalidParameter(format!("projector index {index} beyond dimension {dim}")));
                }
                let mut d = vec![0.0; dim];
                d[index] = 1.0;
                Ok(d)
            }
            Observable::Identity => Ok(vec![1.0; dim]),
        }
    }

    pub fn matrix(&self, n_qubits: usize) -> Result<CMatrix> {
        Ok(CMatrix::diag(&self.diagonal(n_qubits)?))
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `exp(-iθY/2)`.
pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

/// `exp(-iθZ/2)`.
pub fn rz(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]
}

/// `exp(-iθX/2)`.
pub fn rx(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

fn rotation(axis: Axis, theta: f64) -> Mat2 {
    match axis {
        Axis::Y => ry(theta),
        Axis::Z => rz(theta),
    }
}

pub fn apply_circuit(state: &StateVector, ansatz: &Ansatz, theta: &ParamVector) -> Result<StateVector> {
    ansatz.check_dim(state.n_qubits())?;
    ansatz.check_params(theta)?;
    let n = ansatz.n_qubits;
    let mut amps = state.amplitudes().to_vec();
    for layer in 0..ansatz.layers {
        for gate in ansatz.layer_gates(layer) {
            match gate {
                Gate::Rot { axis, qubit, param } => apply_1q(&mut amps, n, qubit, &rotation(axis, theta.0[param])),
                Gate::Cnot { control, target } => apply_cnot(&mut amps, n, control, target),
            }
        }
    }
    Ok(StateVector::from_raw(n, amps))
}

fn noise_superop(noise: &NoiseSpec, dual: bool) -> Result<Option<Super2>> {
    if noise.is_none() {
        return Ok(None);
    }
    Ok(Some(if dual { noise.dual_superop()? } else { noise.superop()? }))
}

/// Runs the circuit on a density matrix, applying `noise` to every qubit after each layer's CNOTs.
pub fn apply_circuit_dm(rho: &DensityMatrix, ansatz: &Ansatz, theta: &ParamVector, noise: &NoiseSpec) -> Result<DensityMatrix> {
    ansatz.check_dim(rho.n_qubits())?;
    ansatz.check_params(theta)?;
    let channel = noise_superop(noise, false)?;
    let mut m = rho.matrix().clone();
    evolve_operator(&mut m, ansatz, theta, channel.as_ref(), 0..ansatz.layers);
    Ok(DensityMatrix::from_raw(ansatz.n_qubits, m))
}

fn evolve_operator(m: &mut CMatrix, ansatz: &Ansatz, theta: &ParamVector, channel: Option<&Super2>, layers: std::ops::Range<usize>) {
    let n = ansatz.n_qubits;
    for layer in layers {
        for gate in ansatz.layer_gates(layer) {
            match gate {
                Gate::Rot { axis, qubit, param } => conjugate(m, n, qubit, &rotation(axis, theta.0[param])),
                Gate::Cnot { control, target } => conjugate_cnot(m, n, control, target),
            }
        }
        if let Some(s) = channel {
            for q in 0..n {
                apply_superop(m, n, q, s);
            }
        }
    }
}

/// Dense `U(θ)` of the noiseless circuit.
pub fn dense_unitary(ansatz: &Ansatz, theta: &ParamVector) -> Result<CMatrix> {
    ansatz.check_params(theta)?;
    let n = ansatz.n_qubits;
    let mut u = CMatrix::identity(ansatz.dim());
    for layer in 0..ansatz.layers {
        for gate in ansatz.layer_gates(layer) {
            match gate {
                Gate::Rot { axis, qubit, param } => apply_left(&mut u, n, qubit, &rotation(axis, theta.0[param])),
                Gate::Cnot { control, target } => {
                    let (cm, tm) = (qubit_mask(n, control), qubit_mask(n, target));
                    let cols = u.cols();
                    let data = u.data_mut();
                    for i in 0..cols {
                        if i & cm != 0 && i & tm == 0 {
                            for k in 0..cols {
                                data.swap(i * cols + k, (i | tm) * cols + k);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(u)
}

pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64> {
    let d = obs.diagonal(state.n_qubits())?;
    Ok(state.amplitudes().iter().zip(&d).map(|(a, o)| a.norm_sqr() * o).sum())
}

pub fn expectation_dm(rho: &DensityMatrix, obs: &Observable) -> Result<f64> {
    let d = obs.diagonal(rho.n_qubits())?;
    let m = rho.matrix();
    Ok(d.iter().enumerate().map(|(i, o)| m[(i, i)].re * o).sum())
}

/// `⟨ψ|A|ψ⟩` for Hermitian `A`, real part.
pub fn expectation_operator(state: &StateVector, op: &CMatrix) -> Result<f64> {
    if op.rows() != state.dim() || op.cols() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), got: op.rows() });
    }
    Ok(op.quadratic_form(state.amplitudes()).re)
}

/// Model output `Tr[O Φ_θ(|ψ><ψ|)]`, through the density-matrix path when noise is present.
pub fn model_output(state: &StateVector, ansatz: &Ansatz, theta: &ParamVector, obs: &Observable, noise: &NoiseSpec) -> Result<f64> {
    if noise.is_none() {
        expectation(&apply_circuit(state, ansatz, theta)?, obs)
    } else {
        expectation_dm(&apply_circuit_dm(&state.density(), ansatz, theta, noise)?, obs)
    }
}

fn shift_rule(theta: &ParamVector, mut eval: impl FnMut(&ParamVector) -> Result<f64>) -> Result<Vec<f64>> {
    let mut shifted = theta.clone();
    let mut grad = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        let base = theta.0[j];
        shifted.0[j] = base + std::f64::consts::FRAC_PI_2;
        let plus = eval(&shifted)?;
        shifted.0[j] = base - std::f64::consts::FRAC_PI_2;
        let minus = eval(&shifted)?;
        shifted.0[j] = base;
        grad.push(0.5 * (plus - minus));
    }
    Ok(grad)
}

/// Parameter-shift gradient of `⟨O⟩` on the noiseless circuit.
pub fn param_shift_grad(state: &StateVector, ansatz: &Ansatz, theta: &ParamVector, obs: &Observable) -> Result<Vec<f64>> {
    ansatz.check_params(theta)?;
    shift_rule(theta, |t| expectation(&apply_circuit(state, ansatz, t)?, obs))
}

/// Parameter-shift gradient through the noisy density-matrix evaluation.
pub fn param_shift_grad_dm(rho: &DensityMatrix, ansatz: &Ansatz, theta: &ParamVector, obs: &Observable, noise: &NoiseSpec) -> Result<Vec<f64>> {
    ansatz.check_params(theta)?;
    shift_rule(theta, |t| expectation_dm(&apply_circuit_dm(rho, ansatz, t, noise)?, obs))
}

/// Heisenberg-picture observable `Φ_θ†(O)`, so that `Tr[O Φ_θ(ρ)] = Tr[Φ_θ†(O) ρ]` for every input.
pub fn heisenberg_observable(ansatz: &Ansatz, theta: &ParamVector, obs: &CMatrix, noise: &NoiseSpec) -> Result<CMatrix> {
    ansatz.check_params(theta)?;
    if obs.rows() != ansatz.dim() || obs.cols() != ansatz.dim() {
        return Err(Error::DimensionMismatch { expected: ansatz.dim(), got: obs.rows() });
    }
    let dual = noise_superop(noise, true)?;
    let mut o = obs.clone();
    for layer in (0..ansatz.layers).rev() {
        pull_back_layer(&mut o, ansatz, theta, dual.as_ref(), layer, None);
    }
    Ok(o)
}

/// Pulls `o` back through one layer. When `rho` is the state right after the layer's rotation
/// block, it is uncomputed alongside and the gradient entries of the layer are written to `grad`.
fn pull_back_layer(
    o: &mut CMatrix,
    ansatz: &Ansatz,
    theta: &ParamVector,
    dual: Option<&Super2>,
    layer: usize,
    mut track: Option<(&mut CMatrix, &mut [f64])>,
) {
    let n = ansatz.n_qubits;
    if let Some(s) = dual {
        for q in 0..n {
            apply_superop(o, n, q, s);
        }
    }
    for (control, target) in ansatz.cnot_pairs().into_iter().rev() {
        conjugate_cnot(o, n, control, target);
    }
    let rotations: Vec<Gate> = ansatz.rotations(layer).collect();
    for gate in rotations.into_iter().rev() {
        let Gate::Rot { axis, qubit, param } = gate else { unreachable!() };
        let g_dag = crate::qcore::ops::mat2_adjoint(&rotation(axis, theta.0[param]));
        if let Some((rho, grad)) = track.as_mut() {
            grad[param] += generator_trace_im(o, rho, n, qubit, axis);
            conjugate(rho, n, qubit, &g_dag);
        }
        conjugate(o, n, qubit, &g_dag);
    }
}

/// `Im Tr[O P_q ρ]` for `P ∈ {Y, Z}` acting on `qubit`.
fn generator_trace_im(o: &CMatrix, rho: &CMatrix, n_qubits: usize, qubit: usize, axis: Axis) -> f64 {
    let dim = o.rows();
    let mask = qubit_mask(n_qubits, qubit);
    let (od, rd) = (o.data(), rho.data());
    let mut acc = 0.0;
    for j in 0..dim {
        // (P ρ)[j, i] = factor_j · ρ[src_j, i]
        let (factor, src) = match axis {
            Axis::Z => (c(if j & mask == 0 { 1.0 } else { -1.0 }, 0.0), j),
            Axis::Y => (c(0.0, if j & mask == 0 { -1.0 } else { 1.0 }), j ^ mask),
        };
        let mut s = c(0.0, 0.0);
        for i in 0..dim {
            s += od[i * dim + j] * rd[src * dim + i];
        }
        acc += (factor * s).im;
    }
    acc
}

/// Gradient of `Σ_terms Tr[O_term Φ_θ(R_term)]` with respect to `θ` by adjoint differentiation.
/// Each `R` must be Hermitian but need not be a state, so per-sample loss weights can be
/// folded into one aggregated operator.
pub fn adjoint_gradient(ansatz: &Ansatz, theta: &ParamVector, noise: &NoiseSpec, terms: &[(CMatrix, CMatrix)]) -> Result<Vec<f64>> {
    ansatz.check_params(theta)?;
    let channel = noise_superop(noise, false)?;
    let dual = noise_superop(noise, true)?;
    let n = ansatz.n_qubits;
    let mut grad = vec![0.0; ansatz.n_params()];
    for (obs, r) in terms {
        for m in [obs, r] {
            if m.rows() != ansatz.dim() || m.cols() != ansatz.dim() {
                return Err(Error::DimensionMismatch { expected: ansatz.dim(), got: m.rows() });
            }
        }
        let mut checkpoints = Vec::with_capacity(ansatz.layers);
        let mut rho = r.clone();
        for layer in 0..ansatz.layers {
            for gate in ansatz.rotations(layer) {
                let Gate::Rot { axis, qubit, param } = gate else { unreachable!() };
                conjugate(&mut rho, n, qubit, &rotation(axis, theta.0[param]));
            }
            checkpoints.push(rho.clone());
            for (control, target) in ansatz.cnot_pairs() {
                conjugate_cnot(&mut rho, n, control, target);
            }
            if let Some(s) = channel.as_ref() {
                for q in 0..n {
                    apply_superop(&mut rho, n, q, s);
                }
            }
        }
        let mut o = obs.clone();
        for layer in (0..ansatz.layers).rev() {
            let mut rho = checkpoints.pop().expect("one checkpoint per layer");
            pull_back_layer(&mut o, ansatz, theta, dual.as_ref(), layer, Some((&mut rho, &mut grad)));
        }
    }
    Ok(grad)
}

/// `Σ_m c_m |ψ_m><ψ_m|`.
pub fn weighted_projector_sum<'a>(dim: usize, items: impl IntoIterator<Item = (f64, &'a StateVector)>) -> Result<CMatrix> {
    let mut r = CMatrix::zeros(dim, dim);
    let data = r.data_mut();
    for (coef, psi) in items {
        if psi.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: psi.dim() });
        }
        if coef == 0.0 {
            continue;
        }
        let a = psi.amplitudes();
        for i in 0..dim {
            let ai = a[i] * coef;
            if ai == c(0.0, 0.0) {
                continue;
            }
            let row = &mut data[i * dim..(i + 1) * dim];
            for (x, aj) in row.iter_mut().zip(a) {
                *x += ai * aj.conj();
            }
        }
    }
    Ok(r)
}
