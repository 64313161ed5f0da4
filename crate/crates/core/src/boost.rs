//! Binary and multi-class AdaBoost over quantum base classifiers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::learn::{train_base, weighted_error, BaseClassifier, Head, Model, Targets, TrainConfig};
use crate::qcore::StateVector;
use crate::{seed, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostConfig {
    pub max_rounds: usize,
    /// Stop once the error bound `γ_t` drops below this value (binary only).
    pub tolerance: f64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self { max_rounds: 100, tolerance: 0.005 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxRounds,
    WeakFail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    Binary,
    MultiClass { n_classes: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub classifier: BaseClassifier,
    pub alpha: f64,
    /// Weighted error as measured, before any clamping.
    pub epsilon: f64,
}

/// One boosting round, including a final rejected round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: usize,
    pub epsilon: f64,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub epochs_used: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostEnsemble {
    pub kind: EnsembleKind,
    pub members: Vec<Member>,
    /// `γ_t` after each stored member (binary only).
    pub gammas: Vec<f64>,
    pub termination: Termination,
    pub rounds: Vec<RoundRecord>,
    /// Sample weights after the last stored round.
    pub final_weights: Vec<f64>,
}

/// `½ ln((1−ε)/ε)`.
pub fn binary_alpha(epsilon: f64) -> f64 {
    0.5 * ((1.0 - epsilon) / epsilon).ln()
}

/// `ln((1−ε)/ε) + ln(K−1)`.
pub fn multiclass_alpha(epsilon: f64, n_classes: usize) -> f64 {
    ((1.0 - epsilon) / epsilon).ln() + ((n_classes - 1) as f64).ln()
}

/// `2√(ε(1−ε))`.
pub fn normalizer(epsilon: f64) -> f64 {
    2.0 * (epsilon * (1.0 - epsilon)).sqrt()
}

/// `exp(−2 Σ (½ − ε_i)²)`.
pub fn gamma_bound(epsilons: &[f64]) -> f64 {
    (-2.0 * epsilons.iter().map(|e| (0.5 - e).powi(2)).sum::<f64>()).exp()
}

/// Lower clamp applied to `ε` before computing `α`, so perfect members keep finite weight.
pub fn epsilon_floor(n_samples: usize) -> f64 {
    0.5 / n_samples as f64
}

fn member_seed(base: u64, node: u64, t: usize) -> u64 {
    seed::derive(base, &[node, t as u64])
}

/// Binary AdaBoost with hinge-trained base classifiers. Member `t` trains with seed
/// `derive(base_seed, [node_id, t])`.
pub fn boost_binary(
    model: &Model,
    states: &[StateVector],
    y: &[i8],
    cfg: &BoostConfig,
    train: &TrainConfig,
    base_seed: u64,
    node_id: u64,
) -> Result<BoostEnsemble> {
    if model.head != Head::Binary {
        return Err(Error::InvalidParameter("binary boosting needs a binary head".into()));
    }
    if cfg.max_rounds == 0 {
        return Err(Error::InvalidParameter("max_rounds must be at least 1".into()));
    }
    if states.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: states.len(), got: y.len() });
    }
    if !(y.contains(&1) && y.contains(&-1)) {
        return Err(Error::InvalidParameter("binary boosting needs both labels present".into()));
    }
    let m = states.len();
    let truth: Vec<usize> = y.iter().map(|&v| usize::from(v == 1)).collect();
    let mut w = vec![1.0 / m as f64; m];
    let mut ens = BoostEnsemble {
        kind: EnsembleKind::Binary,
        members: Vec::new(),
        gammas: Vec::new(),
        termination: Termination::MaxRounds,
        rounds: Vec::new(),
        final_weights: Vec::new(),
    };
    let mut epsilons = Vec::new();
    for t in 1..=cfg.max_rounds {
        let tc = TrainConfig { seed: member_seed(base_seed, node_id, t), ..*train };
        let clf = train_base(model, states, Targets::Signs(y), &w, &tc)?;
        let preds: Vec<usize> = states.iter().map(|s| clf.predict(s)).collect::<Result<_>>()?;
        let eps_raw = weighted_error(&preds, &truth, &w);
        if eps_raw >= 0.5 {
            ens.rounds.push(RoundRecord { t, epsilon: eps_raw, alpha: None, gamma: None, epochs_used: clf.epochs_used(), accepted: false });
            ens.termination = Termination::WeakFail;
            break;
        }
        epsilons.push(eps_raw);
        let gamma = gamma_bound(&epsilons);
        let eps = eps_raw.max(epsilon_floor(m));
        let alpha = binary_alpha(eps);
        let z = normalizer(eps);
        for ((wi, &p), &yi) in w.iter_mut().zip(&preds).zip(y) {
            let h = if p == 1 { 1.0 } else { -1.0 };
            *wi *= (-alpha * yi as f64 * h).exp() / z;
        }
        if eps != eps_raw {
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|wi| *wi /= total);
        }
        ens.rounds.push(RoundRecord { t, epsilon: eps_raw, alpha: Some(alpha), gamma: Some(gamma), epochs_used: clf.epochs_used(), accepted: true });
        ens.members.push(Member { classifier: clf, alpha, epsilon: eps_raw });
        ens.gammas.push(gamma);
        if gamma < cfg.tolerance {
            ens.termination = Termination::Converged;
            break;
        }
    }
    ens.final_weights = w;
    Ok(ens)
}

/// Multi-class AdaBoost with cross-entropy-trained base classifiers.
pub fn boost_multiclass(
    model: &Model,
    states: &[StateVector],
    labels: &[usize],
    cfg: &BoostConfig,
    train: &TrainConfig,
    base_seed: u64,
    node_id: u64,
) -> Result<BoostEnsemble> {
    let Head::MultiClass { n_classes } = model.head else {
        return Err(Error::InvalidParameter("multi-class boosting needs a multi-class head".into()));
    };
    if cfg.max_rounds == 0 {
        return Err(Error::InvalidParameter("max_rounds must be at least 1".into()));
    }
    if states.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: states.len(), got: labels.len() });
    }
    let m = states.len();
    let limit = (n_classes - 1) as f64 / n_classes as f64;
    let mut w = vec![1.0 / m as f64; m];
    let mut ens = BoostEnsemble {
        kind: EnsembleKind::MultiClass { n_classes },
        members: Vec::new(),
        gammas: Vec::new(),
        termination: Termination::MaxRounds,
        rounds: Vec::new(),
        final_weights: Vec::new(),
    };
    for t in 1..=cfg.max_rounds {
        let tc = TrainConfig { seed: member_seed(base_seed, node_id, t), ..*train };
        let clf = train_base(model, states, Targets::Classes(labels), &w, &tc)?;
        let preds: Vec<usize> = states.iter().map(|s| clf.predict(s)).collect::<Result<_>>()?;
        let eps_raw = weighted_error(&preds, labels, &w);
        if eps_raw >= limit {
            ens.rounds.push(RoundRecord { t, epsilon: eps_raw, alpha: None, gamma: None, epochs_used: clf.epochs_used(), accepted: false });
            ens.termination = Termination::WeakFail;
            break;
        }
        let alpha = multiclass_alpha(eps_raw.max(epsilon_floor(m)), n_classes);
        for ((wi, p), l) in w.iter_mut().zip(&preds).zip(labels) {
            if p != l {
                *wi *= alpha.exp();
            }
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= total);
        ens.rounds.push(RoundRecord { t, epsilon: eps_raw, alpha: Some(alpha), gamma: None, epochs_used: clf.epochs_used(), accepted: true });
        ens.members.push(Member { classifier: clf, alpha, epsilon: eps_raw });
    }
    ens.final_weights = w;
    Ok(ens)
}

impl BoostEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        match self.kind {
            EnsembleKind::Binary => 2,
            EnsembleKind::MultiClass { n_classes } => n_classes,
        }
    }

    pub fn total_epochs(&self) -> usize {
        self.rounds.iter().map(|r| r.epochs_used).sum()
    }

    /// Class votes of every member on one state (binary: 1 for `+1`, 0 for `−1`).
    pub fn votes(&self, state: &StateVector) -> Result<Vec<usize>> {
        self.members.iter().map(|m| m.classifier.predict(state)).collect()
    }

    fn check_prefix(&self, prefix: usize) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::Empty("ensemble"));
        }
        if prefix == 0 || prefix > self.members.len() {
            return Err(Error::InvalidParameter(format!("prefix {prefix} outside 1..={}", self.members.len())));
        }
        Ok(())
    }

    /// Combines the first `prefix` member votes. Binary: `(class, margin)` with margin
    /// `Σ α_t h_t / Σ α_t`; multi-class: `(argmax_k Σ α_t 1[h_t = k], winning share)`.
    pub fn combine(&self, votes: &[usize], prefix: usize) -> Result<(usize, f64)> {
        self.check_prefix(prefix)?;
        let members = &self.members[..prefix];
        let norm: f64 = members.iter().map(|m| m.alpha).sum();
        match self.kind {
            EnsembleKind::Binary => {
                let s: f64 = members.iter().zip(votes).map(|(m, &v)| if v == 1 { m.alpha } else { -m.alpha }).sum();
                let margin = (s / norm).clamp(-1.0, 1.0);
                Ok((usize::from(margin >= 0.0), margin))
            }
            EnsembleKind::MultiClass { n_classes } => {
                let mut score = vec![0.0; n_classes];
                for (m, &v) in members.iter().zip(votes) {
                    score[v] += m.alpha;
                }
                let k = crate::learn::argmax(&score);
                Ok((k, score[k] / norm))
            }
        }
    }

    /// Prediction of the first `prefix` members.
    pub fn predict_prefix(&self, state: &StateVector, prefix: usize) -> Result<(usize, f64)> {
        self.check_prefix(prefix)?;
        let votes: Vec<usize> = self.members[..prefix].iter().map(|m| m.classifier.predict(state)).collect::<Result<_>>()?;
        self.combine(&votes, prefix)
    }

    pub fn predict(&self, state: &StateVector) -> Result<(usize, f64)> {
        self.predict_prefix(state, self.members.len())
    }
}

/// `sgn(Σ α_t h_t / ‖α‖₁)` with `sign(0) = +1`, and the margin.
pub fn predict_binary(ens: &BoostEnsemble, state: &StateVector) -> Result<(i8, f64)> {
    if ens.kind != EnsembleKind::Binary {
        return Err(Error::InvalidParameter("not a binary ensemble".into()));
    }
    let (class, margin) = ens.predict(state)?;
    Ok((if class == 1 { 1 } else { -1 }, margin))
}

/// `1, 1 + step, 1 + 2·step, ...` up to `size`, always ending at `size`.
pub fn checkpoints(size: usize, step: usize) -> Vec<usize> {
    let mut c: Vec<usize> = (1..=size).step_by(step.max(1)).collect();
    if size > 0 && c.last() != Some(&size) {
        c.push(size);
    }
    c
}

/// Accuracy of each truncated ensemble on `(states, classes)`; the full size is always included.
pub fn accuracy_curve(ens: &BoostEnsemble, states: &[StateVector], classes: &[usize], points: &[usize]) -> Result<Vec<(usize, f64)>> {
    if states.len() != classes.len() {
        return Err(Error::DimensionMismatch { expected: states.len(), got: classes.len() });
    }
    if states.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    let mut pts: Vec<usize> = points.iter().copied().filter(|&p| p >= 1 && p <= ens.len()).collect();
    if pts.last() != Some(&ens.len()) {
        pts.push(ens.len());
    }
    let votes: Vec<Vec<usize>> = states.iter().map(|s| ens.votes(s)).collect::<Result<_>>()?;
    pts.iter()
        .map(|&p| {
            let mut correct = 0;
            for (v, &c) in votes.iter().zip(classes) {
                if ens.combine(v, p)?.0 == c {
                    correct += 1;
                }
            }
            Ok((p, correct as f64 / states.len() as f64))
        })
        .collect()
}

pub const ROUNDS_HEADER: &str = "node,t,epsilon_t,alpha_t,gamma_t,epochs_used";

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.17e}"))
}

/// Appends one CSV row per round to `out`.
pub fn write_rounds(out: &mut String, node_id: usize, ens: &BoostEnsemble) {
    for r in &ens.rounds {
        let _ = writeln!(out, "{node_id},{},{:.17e},{},{},{}", r.t, r.epsilon, opt(r.alpha), opt(r.gamma), r.epochs_used);
    }
}
