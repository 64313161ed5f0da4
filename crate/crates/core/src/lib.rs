//! Trace-distance binary tree AdaBoost (TTA) multi-class quantum classifier.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense complex matrices, Hermitian eigensolver, quantum states, trace distance.
//! - [`circuit`]: the layered Rz-Ry-Rz + ring-CNOT ansatz, expectation values and gradients.
//! - [`channels`]: single-qubit Kraus noise channels.
//! - [`encode`]: amplitude, angle and raw-state encodings.
//! - [`datasets`]: synthetic interval data, ANNNI ground states, IDX images, dataset files.
//! - [`learn`]: hinge and cross-entropy losses, Adam, the early-stopping training loop.
//! - [`boost`]: binary and multi-class AdaBoost over quantum base classifiers.
//! - [`tree`]: trace-distance tree construction, TTA training and inference, OVR/OVO/bitwise reductions.
//! - [`experiment`]: config-driven pipelines, metrics and curve emission.

pub mod boost;
pub mod channels;
pub mod circuit;
pub mod datasets;
pub mod encode;
mod error;
pub mod experiment;
pub mod learn;
pub mod qcore;
pub mod seed;
pub mod tol;
pub mod tree;

pub use error::{Error, Result};
