//! Weighted losses, Adam, and the mini-batch loop that trains one base classifier.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channels::NoiseSpec;
use crate::circuit::{adjoint_gradient, expectation_operator, heisenberg_observable, weighted_projector_sum, Ansatz, Observable, ParamVector};
use crate::qcore::{CMatrix, StateVector};
use crate::{seed, tol, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EarlyStopConfig {
    pub enabled: bool,
    /// Train-error threshold; `None` means `(K−1)/K` for `K` output classes.
    pub threshold: Option<f64>,
    pub patience: usize,
}

impl Default for EarlyStopConfig {
    fn default() -> Self {
        Self { enabled: true, threshold: None, patience: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub adam: AdamConfig,
    pub early_stop: EarlyStopConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 200,
            learning_rate: 0.005,
            max_epochs: 100,
            adam: AdamConfig::default(),
            early_stop: EarlyStopConfig::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::InvalidParameter("batch_size and max_epochs must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("learning rate {} must be positive", self.learning_rate)));
        }
        let a = &self.adam;
        if !((0.0..1.0).contains(&a.beta1) && (0.0..1.0).contains(&a.beta2) && a.eps > 0.0) {
            return Err(Error::InvalidParameter("Adam needs β in [0,1) and ε > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Adam {
    cfg: AdamConfig,
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n_params: usize, lr: f64, cfg: AdamConfig) -> Self {
        Self { cfg, lr, m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let AdamConfig { beta1, beta2, eps } = self.cfg;
        let (c1, c2) = (1.0 - beta1.powi(self.t), 1.0 - beta2.powi(self.t));
        for i in 0..params.len() {
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * grad[i];
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * grad[i] * grad[i];
            params[i] -= self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + eps);
        }
    }
}

/// Stops once the best error is below `threshold` and has not strictly improved for `patience` epochs.
#[derive(Clone, Debug)]
pub struct EarlyStopper {
    threshold: f64,
    patience: usize,
    best: f64,
    best_epoch: usize,
    stale: usize,
}

impl EarlyStopper {
    pub fn new(threshold: f64, patience: usize) -> Self {
        Self { threshold, patience, best: f64::INFINITY, best_epoch: 0, stale: 0 }
    }

    /// Records the error of `epoch`; returns true when training should stop.
    pub fn observe(&mut self, epoch: usize, error: f64) -> bool {
        if error < self.best {
            self.best = error;
            self.best_epoch = epoch;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        self.best < self.threshold && self.stale >= self.patience
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Head {
    /// `h = ⟨Z⟩` on the first qubit, label `sign(h)`.
    Binary,
    /// `h_k = ⟨Π_k⟩` for `k < K`, label `argmax_k h_k`.
    MultiClass { n_classes: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub ansatz: Ansatz,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub head: Head,
}

impl Model {
    pub fn new(ansatz: Ansatz, noise: NoiseSpec, head: Head) -> Result<Self> {
        let m = Self { ansatz, noise, head };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if let Head::MultiClass { n_classes } = self.head {
            if n_classes < 2 || n_classes > self.ansatz.dim() {
                return Err(Error::InvalidParameter(format!(
                    "{n_classes} classes cannot be read from {} basis states",
                    self.ansatz.dim()
                )));
            }
        }
        Ok(())
    }

    pub fn observables(&self) -> Vec<Observable> {
        match self.head {
            Head::Binary => vec![Observable::Z { qubit: 0 }],
            Head::MultiClass { n_classes } => (0..n_classes).map(|index| Observable::Projector { index }).collect(),
        }
    }

    /// Classes distinguished by the head (2 for binary).
    pub fn n_classes(&self) -> usize {
        match self.head {
            Head::Binary => 2,
            Head::MultiClass { n_classes } => n_classes,
        }
    }

    /// One Heisenberg-picture observable per output.
    pub fn heisenberg(&self, theta: &ParamVector) -> Result<Vec<CMatrix>> {
        let n = self.ansatz.n_qubits();
        self.observables().iter().map(|o| heisenberg_observable(&self.ansatz, theta, &o.matrix(n)?, &self.noise)).collect()
    }
}

fn outputs_with(ops: &[CMatrix], state: &StateVector) -> Result<Vec<f64>> {
    ops.iter().map(|o| expectation_operator(state, o)).collect()
}

/// `sign(h)` with `sign(0) = +1`.
pub fn sign(h: f64) -> i8 {
    if h >= 0.0 {
        1
    } else {
        -1
    }
}

/// Index of the largest value; ties go to the smallest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Per-sample supervision matching the model head.
#[derive(Clone, Copy, Debug)]
pub enum Targets<'a> {
    Signs(&'a [i8]),
    Classes(&'a [usize]),
}

impl Targets<'_> {
    fn len(&self) -> usize {
        match self {
            Targets::Signs(s) => s.len(),
            Targets::Classes(c) => c.len(),
        }
    }
}

fn check_batch(model: &Model, states: &[&StateVector], n_targets: usize, weights: &[f64]) -> Result<()> {
    if states.len() != n_targets || states.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: states.len(), got: n_targets.min(weights.len()) });
    }
    if let Some(s) = states.iter().find(|s| s.n_qubits() != model.ansatz.n_qubits()) {
        return Err(Error::DimensionMismatch { expected: model.ansatz.n_qubits(), got: s.n_qubits() });
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter("sample weights must be finite and non-negative".into()));
    }
    Ok(())
}

/// `Σ w·max(0, 1 − y·h)` and its gradient.
pub fn hinge_loss(model: &Model, theta: &ParamVector, states: &[&StateVector], y: &[i8], weights: &[f64]) -> Result<(f64, Vec<f64>)> {
    if model.head != Head::Binary {
        return Err(Error::InvalidParameter("hinge loss needs a binary head".into()));
    }
    check_batch(model, states, y.len(), weights)?;
    if let Some(bad) = y.iter().find(|&&v| v != 1 && v != -1) {
        return Err(Error::InvalidParameter(format!("hinge label {bad} is not ±1")));
    }
    let ops = model.heisenberg(theta)?;
    let mut loss = 0.0;
    let mut active = Vec::new();
    for ((s, &yi), &w) in states.iter().zip(y).zip(weights) {
        let h = expectation_operator(s, &ops[0])?;
        let slack = 1.0 - yi as f64 * h;
        if slack > tol::HINGE_MARGIN {
            loss += w * slack;
            active.push((-w * yi as f64, *s));
        }
    }
    if active.is_empty() {
        return Ok((loss, vec![0.0; theta.len()]));
    }
    let n = model.ansatz.n_qubits();
    let r = weighted_projector_sum(model.ansatz.dim(), active)?;
    let grad = adjoint_gradient(&model.ansatz, theta, &model.noise, &[(Observable::Z { qubit: 0 }.matrix(n)?, r)])?;
    Ok((loss, grad))
}

fn softmax(h: &[f64]) -> Vec<f64> {
    let max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = h.iter().map(|v| (v - max).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Weighted softmax cross-entropy over the projector outputs, and its gradient.
pub fn cross_entropy_loss(model: &Model, theta: &ParamVector, states: &[&StateVector], labels: &[usize], weights: &[f64]) -> Result<(f64, Vec<f64>)> {
    let Head::MultiClass { n_classes } = model.head else {
        return Err(Error::InvalidParameter("cross-entropy needs a multi-class head".into()));
    };
    model.validate()?;
    check_batch(model, states, labels.len(), weights)?;
    if let Some(bad) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(Error::InvalidParameter(format!("label {bad} outside [0, {n_classes})")));
    }
    let ops = model.heisenberg(theta)?;
    let mut loss = 0.0;
    let mut coefs = vec![Vec::with_capacity(states.len()); n_classes];
    for ((s, &label), &w) in states.iter().zip(labels).zip(weights) {
        let h = outputs_with(&ops, s)?;
        let max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + h.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += w * (log_z - h[label]);
        for (k, p) in softmax(&h).into_iter().enumerate() {
            coefs[k].push(w * (p - if k == label { 1.0 } else { 0.0 }));
        }
    }
    let n = model.ansatz.n_qubits();
    let terms = coefs
        .into_iter()
        .enumerate()
        .map(|(k, c)| Ok((Observable::Projector { index: k }.matrix(n)?, weighted_projector_sum(model.ansatz.dim(), c.into_iter().zip(states.iter().copied()))?)))
        .collect::<Result<Vec<_>>>()?;
    let grad = adjoint_gradient(&model.ansatz, theta, &model.noise, &terms)?;
    Ok((loss, grad))
}

/// A trained circuit together with its per-epoch training log.
#[derive(Debug, Serialize, Deserialize)]
pub struct BaseClassifier {
    model: Model,
    theta: ParamVector,
    /// Weighted 0-1 train error after each epoch.
    log: Vec<f64>,
    best_epoch: usize,
    #[serde(skip)]
    cache: OnceLock<Vec<CMatrix>>,
}

impl Clone for BaseClassifier {
    fn clone(&self) -> Self {
        Self {
            model: self.model,
            theta: self.theta.clone(),
            log: self.log.clone(),
            best_epoch: self.best_epoch,
            cache: self.cache.clone(),
        }
    }
}

impl PartialEq for BaseClassifier {
    fn eq(&self, other: &Self) -> bool {
        self.model == other.model && self.theta == other.theta && self.log == other.log && self.best_epoch == other.best_epoch
    }
}

impl BaseClassifier {
    pub fn from_parts(model: Model, theta: ParamVector) -> Result<Self> {
        model.validate()?;
        model.ansatz.check_params(&theta)?;
        Ok(Self { model, theta, log: Vec::new(), best_epoch: 0, cache: OnceLock::new() })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn theta(&self) -> &ParamVector {
        &self.theta
    }

    pub fn log(&self) -> &[f64] {
        &self.log
    }

    pub fn epochs_used(&self) -> usize {
        self.log.len()
    }

    /// Zero-based epoch whose parameters were kept.
    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    fn ops(&self) -> Result<&[CMatrix]> {
        if let Some(ops) = self.cache.get() {
            return Ok(ops);
        }
        let ops = self.model.heisenberg(&self.theta)?;
        Ok(self.cache.get_or_init(|| ops))
    }

    pub fn outputs(&self, state: &StateVector) -> Result<Vec<f64>> {
        outputs_with(self.ops()?, state)
    }

    /// Predicted class: for a binary head, 1 for `sign(h) = +1` and 0 otherwise.
    pub fn predict(&self, state: &StateVector) -> Result<usize> {
        let h = self.outputs(state)?;
        Ok(match self.model.head {
            Head::Binary => usize::from(sign(h[0]) == 1),
            Head::MultiClass { .. } => argmax(&h),
        })
    }

    /// `±1` prediction of a binary head.
    pub fn predict_sign(&self, state: &StateVector) -> Result<i8> {
        if self.model.head != Head::Binary {
            return Err(Error::InvalidParameter("sign prediction needs a binary head".into()));
        }
        Ok(sign(self.outputs(state)?[0]))
    }
}

fn predict_all(model: &Model, ops: &[CMatrix], states: &[StateVector]) -> Result<Vec<usize>> {
    states
        .iter()
        .map(|s| {
            let h = outputs_with(ops, s)?;
            Ok(match model.head {
                Head::Binary => usize::from(sign(h[0]) == 1),
                Head::MultiClass { .. } => argmax(&h),
            })
        })
        .collect()
}

fn target_classes(targets: &Targets) -> Vec<usize> {
    match targets {
        Targets::Signs(s) => s.iter().map(|&v| usize::from(v == 1)).collect(),
        Targets::Classes(c) => c.to_vec(),
    }
}

/// `Σ w·1[prediction ≠ target]`.
pub fn weighted_error(predictions: &[usize], targets: &[usize], weights: &[f64]) -> f64 {
    predictions.iter().zip(targets).zip(weights).filter(|((p, t), _)| p != t).map(|(_, w)| w).sum()
}

/// Trains one base classifier with the head's loss (hinge for binary, cross-entropy otherwise) and
/// returns the parameters of the epoch with the lowest weighted train error.
pub fn train_base(model: &Model, states: &[StateVector], targets: Targets, weights: &[f64], cfg: &TrainConfig) -> Result<BaseClassifier> {
    cfg.validate()?;
    model.validate()?;
    if states.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let refs: Vec<&StateVector> = states.iter().collect();
    check_batch(model, &refs, targets.len(), weights)?;
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tol::WEIGHTS {
        return Err(Error::InvalidParameter(format!("sample weights sum to {total}, not 1")));
    }
    match (model.head, &targets) {
        (Head::Binary, Targets::Signs(_)) | (Head::MultiClass { .. }, Targets::Classes(_)) => {}
        _ => return Err(Error::InvalidParameter("targets do not match the model head".into())),
    }
    let truth = target_classes(&targets);

    let mut rng = seed::rng(cfg.seed);
    let mut theta = model.ansatz.random_params(&mut rng);
    let mut adam = Adam::new(theta.len(), cfg.learning_rate, cfg.adam);
    let k = model.n_classes() as f64;
    let threshold = cfg.early_stop.threshold.unwrap_or((k - 1.0) / k);
    let mut stopper = EarlyStopper::new(threshold, cfg.early_stop.patience);
    let mut order: Vec<usize> = (0..states.len()).collect();
    let mut log = Vec::new();
    let mut best = theta.clone();

    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&StateVector> = chunk.iter().map(|&i| &states[i]).collect();
            let w: Vec<f64> = chunk.iter().map(|&i| weights[i]).collect();
            let (_, grad) = match targets {
                Targets::Signs(y) => hinge_loss(model, &theta, &batch, &chunk.iter().map(|&i| y[i]).collect::<Vec<_>>(), &w)?,
                Targets::Classes(c) => cross_entropy_loss(model, &theta, &batch, &chunk.iter().map(|&i| c[i]).collect::<Vec<_>>(), &w)?,
            };
            adam.step(theta.values_mut(), &grad);
        }
        let ops = model.heisenberg(&theta)?;
        let error = weighted_error(&predict_all(model, &ops, states)?, &truth, weights);
        log.push(error);
        let prev_best = stopper.best();
        let stop = stopper.observe(epoch, error);
        if error < prev_best {
            best = theta.clone();
        }
        if stop && cfg.early_stop.enabled {
            break;
        }
    }
    Ok(BaseClassifier { model: *model, theta: best, log, best_epoch: stopper.best_epoch(), cache: OnceLock::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{apply_circuit, expectation};
    use rand::Rng as _;
    use rand_distr::StandardNormal;

    fn random_state(n: usize, rng: &mut seed::Rng) -> StateVector {
        let amps: Vec<crate::qcore::C64> =
            (0..1 << n).map(|_| crate::qcore::C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::new(amps.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    #[test]
    fn adam_first_three_iterates() {
        let mut p = [1.0, -1.0];
        let mut adam = Adam::new(2, 0.1, AdamConfig::default());
        let expected = [
            [0.9000000005, -0.90000000025],
            [0.8004122286917928, -0.8004122281815201],
            [0.7015862729460303, -0.7015862721668379],
        ];
        for e in expected {
            let g = [2.0 * p[0], 4.0 * p[1]];
            adam.step(&mut p, &g);
            assert!((p[0] - e[0]).abs() < 1e-14 && (p[1] - e[1]).abs() < 1e-14, "{p:?} vs {e:?}");
        }
    }

    #[test]
    fn early_stopper_fires_after_patience() {
        let mut s = EarlyStopper::new(0.5, 10);
        assert!(!s.observe(0, 0.6));
        assert!(!s.observe(1, 0.3));
        for e in 2..11 {
            assert!(!s.observe(e, 0.3), "epoch {e}");
        }
        assert!(s.observe(11, 0.35));
        assert_eq!(s.best_epoch(), 1);
    }

    #[test]
    fn early_stopper_waits_for_threshold() {
        let mut s = EarlyStopper::new(5.0 / 6.0, 10);
        for e in 0..30 {
            assert!(!s.observe(e, 0.9));
        }
        for e in 30..40 {
            assert!(!s.observe(e, if e == 30 { 0.8 } else { 0.81 }));
        }
        assert!(s.observe(40, 0.8));
    }

    fn binary_model(n: usize, layers: usize) -> Model {
        Model::new(Ansatz::new(n, layers).unwrap(), NoiseSpec::None, Head::Binary).unwrap()
    }

    #[test]
    fn hinge_inactive_and_active_examples() {
        // One qubit, L=1, θ = (0, θ_y, 0): h = cos θ_y on |0>.
        let model = binary_model(1, 1);
        let zero = StateVector::zero(1);
        let theta = ParamVector::new(vec![0.0, 0.0, 0.0]).unwrap();
        let (loss, grad) = hinge_loss(&model, &theta, &[&zero], &[1], &[1.0]).unwrap();
        assert!(loss.abs() < 1e-15 && grad.iter().all(|g| *g == 0.0));
        let theta = ParamVector::new(vec![0.0, std::f64::consts::FRAC_PI_3, 0.0]).unwrap();
        let (loss, grad) = hinge_loss(&model, &theta, &[&zero], &[1], &[1.0]).unwrap();
        assert!((loss - 0.5).abs() < 1e-12);
        assert!((grad[1] - f64::sin(std::f64::consts::FRAC_PI_3)).abs() < 1e-12);
        assert!(hinge_loss(&model, &theta, &[&zero], &[0], &[1.0]).is_err());
    }

    #[test]
    fn cross_entropy_examples() {
        // Two-class head on one qubit: h = (|a0|², |a1|²).
        let model = Model::new(Ansatz::new(1, 0).unwrap(), NoiseSpec::None, Head::MultiClass { n_classes: 2 }).unwrap();
        let theta = ParamVector::zeros(0);
        let (loss, _) = cross_entropy_loss(&model, &theta, &[&StateVector::zero(1)], &[0], &[1.0]).unwrap();
        assert!((loss - 0.31326168751822286).abs() < 1e-14);
        let plus = crate::encode::encode(&[1.0, 1.0], &crate::encode::EncodingSpec::Amplitude, 1).unwrap();
        let (loss, _) = cross_entropy_loss(&model, &theta, &[&plus], &[1], &[1.0]).unwrap();
        assert!((loss - 2f64.ln()).abs() < 1e-14);
        let big = Model { head: Head::MultiClass { n_classes: 3 }, ..model };
        assert!(cross_entropy_loss(&big, &theta, &[&plus], &[1], &[1.0]).is_err());
    }

    fn fd_check(model: &Model, f: impl Fn(&ParamVector) -> (f64, Vec<f64>), rng: &mut seed::Rng) {
        let theta = model.ansatz.random_params(rng);
        let (_, grad) = f(&theta);
        for j in 0..theta.len() {
            let mut p = theta.clone();
            p.values_mut()[j] += 1e-5;
            let up = f(&p).0;
            p.values_mut()[j] -= 2e-5;
            let down = f(&p).0;
            assert!((grad[j] - (up - down) / 2e-5).abs() < 1e-6, "param {j}");
        }
    }

    #[test]
    fn loss_gradients_match_finite_differences() {
        let mut rng = seed::rng(17);
        let states: Vec<StateVector> = (0..5).map(|_| random_state(3, &mut rng)).collect();
        let refs: Vec<&StateVector> = states.iter().collect();
        let w = [0.1, 0.3, 0.2, 0.15, 0.25];
        let y = [1, -1, -1, 1, 1];
        let labels = [0, 2, 1, 2, 0];
        for noise in [NoiseSpec::None, NoiseSpec::Depolarizing { p: 0.1 }] {
            let model = Model::new(Ansatz::new(3, 2).unwrap(), noise, Head::Binary).unwrap();
            for _ in 0..3 {
                fd_check(&model, |t| hinge_loss(&model, t, &refs, &y, &w).unwrap(), &mut rng);
            }
            let ce = Model { head: Head::MultiClass { n_classes: 3 }, ..model };
            for _ in 0..3 {
                fd_check(&ce, |t| cross_entropy_loss(&ce, t, &refs, &labels, &w).unwrap(), &mut rng);
            }
        }
    }

    #[test]
    fn classifier_outputs_match_direct_simulation() {
        let mut rng = seed::rng(3);
        let model = binary_model(3, 2);
        let theta = model.ansatz.random_params(&mut rng);
        let clf = BaseClassifier::from_parts(model, theta.clone()).unwrap();
        let psi = random_state(3, &mut rng);
        let direct = expectation(&apply_circuit(&psi, &model.ansatz, &theta).unwrap(), &Observable::Z { qubit: 0 }).unwrap();
        assert!((clf.outputs(&psi).unwrap()[0] - direct).abs() < 1e-12);
        assert_eq!(clf.predict_sign(&psi).unwrap(), sign(direct));
        let json = serde_json::to_string(&clf).unwrap();
        let back: BaseClassifier = serde_json::from_str(&json).unwrap();
        assert_eq!(back, clf);
    }

    #[test]
    fn sign_and_argmax_conventions() {
        assert_eq!(sign(0.0), 1);
        assert_eq!(sign(-1e-300), -1);
        assert_eq!(argmax(&[0.2, 0.5, 0.5]), 1);
    }

    fn separable_task(rng: &mut seed::Rng) -> (Vec<StateVector>, Vec<i8>) {
        let spec = crate::encode::EncodingSpec::Angle { layout: crate::encode::AngleLayout::Alternating };
        let mut states = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let label: i8 = if i % 2 == 0 { 1 } else { -1 };
            let base = if label == 1 { 0.4 } else { 2.6 };
            let x = [base + rng.gen_range(-0.3..0.3), base + rng.gen_range(-0.3..0.3)];
            states.push(crate::encode::encode(&x, &spec, 2).unwrap());
            y.push(label);
        }
        (states, y)
    }

    #[test]
    fn training_is_deterministic_and_returns_best_epoch() {
        let mut rng = seed::rng(21);
        let (states, y) = separable_task(&mut rng);
        let w = vec![1.0 / 40.0; 40];
        let model = binary_model(2, 2);
        let cfg = TrainConfig { batch_size: 16, learning_rate: 0.05, max_epochs: 40, seed: 4, ..TrainConfig::default() };
        let a = train_base(&model, &states, Targets::Signs(&y), &w, &cfg).unwrap();
        let b = train_base(&model, &states, Targets::Signs(&y), &w, &cfg).unwrap();
        assert_eq!(a, b);
        let best = a.log()[a.best_epoch()];
        assert!(a.log().iter().all(|&e| best <= e));
        let preds: Vec<usize> = states.iter().map(|s| a.predict(s).unwrap()).collect();
        let truth: Vec<usize> = y.iter().map(|&v| usize::from(v == 1)).collect();
        assert!((weighted_error(&preds, &truth, &w) - best).abs() < 1e-12);
        assert!(best < 0.1, "best error {best}");
        assert!(a.epochs_used() < 40);
    }

    #[test]
    fn training_input_validation() {
        let model = binary_model(1, 1);
        let states = vec![StateVector::zero(1)];
        let cfg = TrainConfig::default();
        assert!(train_base(&model, &states, Targets::Signs(&[1]), &[0.5], &cfg).is_err());
        assert!(train_base(&model, &states, Targets::Classes(&[1]), &[1.0], &cfg).is_err());
        assert!(train_base(&model, &[], Targets::Signs(&[]), &[], &cfg).is_err());
        let bad = TrainConfig { learning_rate: 0.0, ..cfg };
        assert!(train_base(&model, &states, Targets::Signs(&[1]), &[1.0], &bad).is_err());
    }

    #[test]
    fn config_defaults_and_unknown_fields() {
        let cfg: TrainConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, TrainConfig::default());
        assert_eq!((cfg.batch_size, cfg.learning_rate, cfg.max_epochs), (200, 0.005, 100));
        assert!(serde_json::from_str::<TrainConfig>(r#"{"batchsize":3}"#).is_err());
    }
}
