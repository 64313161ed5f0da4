//! Config-driven experiment pipeline: data, training of every method, metrics and CSV outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boost::{boost_binary, boost_multiclass, checkpoints, write_rounds, BoostConfig, BoostEnsemble, Termination, ROUNDS_HEADER};
use crate::channels::NoiseSpec;
use crate::circuit::Ansatz;
use crate::datasets::{gen_annni, gen_synthetic, load_idx, read_dataset, AnnniSpec, LabeledSet, SyntheticSpec};
use crate::encode::{encode_all, EncodingSpec};
use crate::learn::{train_base, BaseClassifier, Head, Model, Targets, TrainConfig};
use crate::qcore::StateVector;
use crate::tree::{build_tree, classifier_counts, decode_bitwise, decode_ovo, decode_ovr, train_reduction, train_tta, BinaryTrainer, Child, Reduction, ReductionModel, Splitter, TraceTree};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Synthetic {
        dim: usize,
        #[serde(default = "three")]
        n_classes: usize,
        per_class_train: usize,
        per_class_test: usize,
    },
    Annni {
        n_qubits: usize,
        per_class_train: usize,
        per_class_test: usize,
        #[serde(default)]
        kappa_range: Option<(f64, f64)>,
        #[serde(default)]
        h_range: Option<(f64, f64)>,
    },
    /// Dataset text files as written by `gen-data`.
    Files { train: PathBuf, test: PathBuf },
    Idx {
        train_images: PathBuf,
        train_labels: PathBuf,
        test_images: PathBuf,
        test_labels: PathBuf,
        #[serde(default)]
        resize: Option<usize>,
        #[serde(default)]
        classes: Option<Vec<usize>>,
    },
}

fn three() -> usize {
    3
}

fn one() -> usize {
    1
}

fn five() -> usize {
    5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub source: DatasetSource,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tta,
    Single,
    MultiBoost,
    Bitwise,
    Ovo,
    Ovr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub encoding: EncodingSpec,
    pub ansatz: Ansatz,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub boost: BoostConfig,
    pub method: Method,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub splitter: Splitter,
    /// Base training seed; repeat `r` uses `seed + r`.
    #[serde(default)]
    pub seed: u64,
    /// Member-count spacing of the accuracy curves.
    #[serde(default = "five")]
    pub curve_step: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// Parses a JSON config, reporting the failing field path and position.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Config(format!("at `{path}` (line {}, column {}): {inner}", inner.line(), inner.column()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        Ansatz::new(self.ansatz.n_qubits(), self.ansatz.layers()).map_err(|e| Error::Config(e.to_string()))?;
        self.train.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.noise.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.boost.max_rounds == 0 {
            return bad("boost.max_rounds must be at least 1".into());
        }
        if self.curve_step == 0 {
            return bad("curve_step must be at least 1".into());
        }
        let dim = self.ansatz.dim();
        match (&self.dataset.source, self.encoding) {
            (DatasetSource::Synthetic { dim: d, .. }, EncodingSpec::Amplitude) if *d > dim => {
                return bad(format!("{d} features exceed {dim} amplitudes"));
            }
            (DatasetSource::Annni { n_qubits, .. }, EncodingSpec::RawState) if *n_qubits != self.ansatz.n_qubits() => {
                return bad(format!("ANNNI chain of {n_qubits} qubits needs a {n_qubits}-qubit ansatz"));
            }
            _ => {}
        }
        Ok(())
    }

    fn model(&self, head: Head) -> Result<Model> {
        Model::new(self.ansatz, self.noise, head)
    }
}

/// Train and test sets described by the config.
pub fn load_datasets(cfg: &DatasetConfig) -> Result<(LabeledSet, LabeledSet)> {
    match &cfg.source {
        DatasetSource::Synthetic { dim, n_classes, per_class_train, per_class_test } => gen_synthetic(
            &SyntheticSpec { dim: *dim, n_classes: *n_classes, per_class_train: *per_class_train, per_class_test: *per_class_test },
            cfg.seed,
        ),
        DatasetSource::Annni { n_qubits, per_class_train, per_class_test, kappa_range, h_range } => gen_annni(
            &AnnniSpec {
                n_qubits: *n_qubits,
                per_class_train: *per_class_train,
                per_class_test: *per_class_test,
                kappa_range: kappa_range.unwrap_or((0.0, 0.99)),
                h_range: h_range.unwrap_or((0.0, 2.0)),
            },
            cfg.seed,
        ),
        DatasetSource::Files { train, test } => Ok((read_dataset(train)?, read_dataset(test)?)),
        DatasetSource::Idx { train_images, train_labels, test_images, test_labels, resize, classes } => Ok((
            load_idx(train_images, train_labels, *resize, classes.as_deref())?,
            load_idx(test_images, test_labels, *resize, classes.as_deref())?,
        )),
    }
}

/// Encoded states and labels of one split.
#[derive(Clone, Debug)]
pub struct Encoded {
    pub states: Vec<StateVector>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    /// ANNNI `(κ, h)` per sample, when the source provides them.
    pub coords: Option<Vec<(f64, f64)>>,
}

pub fn encode_set(set: &LabeledSet, encoding: &EncodingSpec, n_qubits: usize) -> Result<Encoded> {
    Ok(Encoded { states: encode_all(set.features(), encoding, n_qubits)?, labels: set.labels().to_vec(), n_classes: set.n_classes(), coords: set.coords().map(<[_]>::to_vec) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum TrainedModel {
    Tta { tree: TraceTree },
    Single { classifier: BaseClassifier },
    MultiBoost { ensemble: BoostEnsemble },
    Reduction { model: ReductionModel },
}

/// Binary ensembles of a trained model with their node or task ids.
pub fn binary_units(model: &TrainedModel) -> Vec<(usize, Option<&BoostEnsemble>)> {
    match model {
        TrainedModel::Tta { tree } => tree.nodes.iter().zip(&tree.ensembles).map(|(n, e)| (n.id, e.as_ref())).collect(),
        TrainedModel::Reduction { model } => model.ensembles.iter().enumerate().filter(|(i, _)| model.tasks[*i].constant.is_none()).map(|(i, e)| (i + 1, e.as_ref())).collect(),
        TrainedModel::MultiBoost { ensemble } => vec![(1, Some(ensemble))],
        TrainedModel::Single { .. } => Vec::new(),
    }
}

impl TrainedModel {
    pub fn member_count(&self) -> usize {
        match self {
            TrainedModel::Tta { tree } => tree.member_count(),
            TrainedModel::Single { .. } => 1,
            TrainedModel::MultiBoost { ensemble } => ensemble.len(),
            TrainedModel::Reduction { model } => model.member_count(),
        }
    }

    pub fn predict(&self, state: &StateVector) -> Result<usize> {
        match self {
            TrainedModel::Tta { tree } => crate::tree::predict_tta(tree, state),
            TrainedModel::Single { classifier } => classifier.predict(state),
            TrainedModel::MultiBoost { ensemble } => Ok(ensemble.predict(state)?.0),
            TrainedModel::Reduction { model } => model.predict(state),
        }
    }

    /// Predictions where a sample routed to an untrained node yields `None`.
    pub fn predict_lenient(&self, states: &[StateVector]) -> Result<Vec<Option<usize>>> {
        states
            .iter()
            .map(|s| match self.predict(s) {
                Ok(c) => Ok(Some(c)),
                Err(Error::Untrained(_)) | Err(Error::Empty(_)) => Ok(None),
                Err(e) => Err(e),
            })
            .collect()
    }

    pub fn total_epochs(&self) -> usize {
        match self {
            TrainedModel::Single { classifier } => classifier.epochs_used(),
            _ => binary_units(self).iter().filter_map(|(_, e)| *e).map(|e| e.total_epochs()).sum(),
        }
    }
}

pub fn accuracy(predictions: &[Option<usize>], labels: &[usize]) -> f64 {
    let correct = predictions.iter().zip(labels).filter(|(p, l)| **p == Some(**l)).count();
    correct as f64 / labels.len() as f64
}

/// Trains the configured method on `train` with training seed `seed`.
pub fn train_method(cfg: &ExperimentConfig, train: &Encoded, seed: u64) -> Result<TrainedModel> {
    let k = train.n_classes;
    let binary = cfg.model(Head::Binary)?;
    let trainer = BinaryTrainer { model: &binary, boost: &cfg.boost, train: &cfg.train, seed };
    Ok(match cfg.method {
        Method::Tta => {
            let mut tree = build_tree(&train.states, &train.labels, k, cfg.splitter)?;
            train_tta(&mut tree, &train.states, &train.labels, &trainer)?;
            TrainedModel::Tta { tree }
        }
        Method::Single => {
            let model = cfg.model(Head::MultiClass { n_classes: k })?;
            let w = vec![1.0 / train.states.len() as f64; train.states.len()];
            let tc = TrainConfig { seed: crate::seed::derive(seed, &[0, 1]), ..cfg.train };
            TrainedModel::Single { classifier: train_base(&model, &train.states, Targets::Classes(&train.labels), &w, &tc)? }
        }
        Method::MultiBoost => {
            let model = cfg.model(Head::MultiClass { n_classes: k })?;
            TrainedModel::MultiBoost { ensemble: boost_multiclass(&model, &train.states, &train.labels, &cfg.boost, &cfg.train, seed, 0)? }
        }
        Method::Bitwise | Method::Ovo | Method::Ovr => {
            let r = match cfg.method {
                Method::Bitwise => Reduction::Bitwise,
                Method::Ovo => Reduction::Ovo,
                _ => Reduction::Ovr,
            };
            TrainedModel::Reduction { model: train_reduction(r, k, &train.states, &train.labels, &trainer)? }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub id: usize,
    pub termination: Option<Termination>,
    pub members: usize,
    pub epochs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub repeat: usize,
    pub seed: u64,
    pub method: Method,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub base_classifiers: usize,
    pub parameters: usize,
    pub total_epochs: usize,
    pub units: Vec<UnitSummary>,
    /// Train/test samples that reached a node without trained members.
    pub unresolved_train: usize,
    pub unresolved_test: usize,
}

pub fn run_metrics(cfg: &ExperimentConfig, model: &TrainedModel, train: &Encoded, test: &Encoded, repeat: usize, seed: u64) -> Result<RunMetrics> {
    let ptr = model.predict_lenient(&train.states)?;
    let pte = model.predict_lenient(&test.states)?;
    let units = binary_units(model)
        .into_iter()
        .map(|(id, e)| UnitSummary {
            id,
            termination: e.map(|e| e.termination),
            members: e.map_or(0, |e| e.len()),
            epochs: e.map_or(0, |e| e.total_epochs()),
        })
        .collect();
    Ok(RunMetrics {
        repeat,
        seed,
        method: cfg.method,
        train_accuracy: accuracy(&ptr, &train.labels),
        test_accuracy: accuracy(&pte, &test.labels),
        base_classifiers: model.member_count(),
        parameters: model.member_count() * cfg.ansatz.n_params(),
        total_epochs: model.total_epochs(),
        units,
        unresolved_train: ptr.iter().filter(|p| p.is_none()).count(),
        unresolved_test: pte.iter().filter(|p| p.is_none()).count(),
    })
}

/// One curve point: `scope` is `member` (a node or task ensemble on its own data) or `aggregate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub scope: String,
    pub unit: usize,
    pub members: usize,
    pub split: String,
    pub accuracy: f64,
}

fn member_votes(e: &BoostEnsemble, states: &[StateVector]) -> Result<Vec<Vec<usize>>> {
    states.iter().map(|s| e.votes(s)).collect()
}

/// Aggregate prediction when every ensemble is cut to its first `min(c, size)` members.
fn truncated_predict(model: &TrainedModel, votes: &[Option<Vec<Vec<usize>>>], sample: usize, c: usize) -> Result<Option<usize>> {
    let unit = |i: usize| -> Result<Option<(usize, f64)>> {
        match (&votes[i], binary_units(model)[i].1) {
            (Some(v), Some(e)) if !e.is_empty() => Ok(Some(e.combine(&v[sample], c.min(e.len()))?)),
            _ => Ok(None),
        }
    };
    match model {
        TrainedModel::Tta { tree } => {
            let mut id = 1;
            loop {
                let Some((class, _)) = unit(id - 1)? else { return Ok(None) };
                let node = tree.node(id)?;
                match if class == 1 { node.right } else { node.left } {
                    Child::Leaf(l) => return Ok(Some(l)),
                    Child::Node(next) => id = next,
                }
            }
        }
        TrainedModel::Reduction { model: r } => {
            let mut margins = Vec::with_capacity(r.tasks.len());
            let mut trained = 0;
            for t in &r.tasks {
                match t.constant {
                    Some(v) => margins.push(v as f64),
                    None => {
                        let Some((_, m)) = unit(trained)? else { return Ok(None) };
                        margins.push(m);
                        trained += 1;
                    }
                }
            }
            Ok(Some(match r.reduction {
                Reduction::Ovr => decode_ovr(&margins),
                Reduction::Ovo => decode_ovo(r.n_classes, &r.tasks, &margins),
                Reduction::Bitwise => decode_bitwise(&(0..r.n_classes).collect::<Vec<_>>(), &margins),
            }))
        }
        TrainedModel::MultiBoost { .. } => Ok(unit(0)?.map(|(k, _)| k)),
        TrainedModel::Single { .. } => Ok(None),
    }
}

/// Member-level and aggregate accuracy-versus-member-count curves on both splits.
pub fn emit_curves(model: &TrainedModel, train: &Encoded, test: &Encoded, step: usize) -> Result<Vec<CurvePoint>> {
    let mut points = Vec::new();
    if let TrainedModel::Single { classifier } = model {
        for (split, data) in [("train", train), ("test", test)] {
            let p: Vec<Option<usize>> = data.states.iter().map(|s| classifier.predict(s).map(Some)).collect::<Result<_>>()?;
            points.push(CurvePoint { scope: "aggregate".into(), unit: 0, members: 1, split: split.into(), accuracy: accuracy(&p, &data.labels) });
        }
        return Ok(points);
    }
    let units = binary_units(model);
    let partitions: Vec<Option<crate::tree::Partition>> = match model {
        TrainedModel::Tta { tree } => tree.nodes.iter().map(|n| Some(n.partition.clone())).collect(),
        TrainedModel::Reduction { model: r } => r.tasks.iter().filter(|t| t.constant.is_none()).map(|t| Some(t.partition.clone())).collect(),
        _ => vec![None],
    };
    let max_size = units.iter().filter_map(|(_, e)| e.map(|e| e.len())).max().unwrap_or(0);
    for (split, data) in [("train", train), ("test", test)] {
        let votes: Vec<Option<Vec<Vec<usize>>>> =
            units.iter().map(|(_, e)| e.filter(|e| !e.is_empty()).map(|e| member_votes(e, &data.states)).transpose()).collect::<Result<_>>()?;
        for (i, (id, e)) in units.iter().enumerate() {
            let (Some(e), Some(v)) = (e, &votes[i]) else { continue };
            let (idx, target): (Vec<usize>, Vec<usize>) = match &partitions[i] {
                Some(p) => data
                    .labels
                    .iter()
                    .enumerate()
                    .filter_map(|(j, l)| if p.plus.contains(l) { Some((j, 1)) } else if p.minus.contains(l) { Some((j, 0)) } else { None })
                    .unzip(),
                None => ((0..data.labels.len()).collect(), data.labels.clone()),
            };
            if idx.is_empty() {
                continue;
            }
            for c in checkpoints(e.len(), step) {
                let correct = idx.iter().zip(&target).filter(|(&j, &t)| e.combine(&v[j], c).map(|r| r.0 == t).unwrap_or(false)).count();
                points.push(CurvePoint { scope: "member".into(), unit: *id, members: c, split: split.into(), accuracy: correct as f64 / idx.len() as f64 });
            }
        }
        if max_size == 0 {
            continue;
        }
        for c in checkpoints(max_size, step) {
            let preds: Vec<Option<usize>> = (0..data.states.len()).map(|j| truncated_predict(model, &votes, j, c)).collect::<Result<_>>()?;
            points.push(CurvePoint { scope: "aggregate".into(), unit: 0, members: c, split: split.into(), accuracy: accuracy(&preds, &data.labels) });
        }
    }
    Ok(points)
}

pub const CURVES_HEADER: &str = "scope,unit,members,split,accuracy";

pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = format!("{CURVES_HEADER}\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{:.4}", p.scope, p.unit, p.members, p.split, p.accuracy);
    }
    out
}

pub fn rounds_csv(model: &TrainedModel) -> String {
    let mut out = format!("{ROUNDS_HEADER}\n");
    for (id, e) in binary_units(model) {
        if let Some(e) = e {
            write_rounds(&mut out, id, e);
        }
    }
    out
}

pub const WEIGHTS_HEADER: &str = "unit,sample,label,weight";

/// Final boosting weights of every unit; `sample` indexes the full training set.
pub fn weights_csv(model: &TrainedModel, train_labels: &[usize]) -> String {
    let mut out = format!("{WEIGHTS_HEADER}\n");
    let partitions: Vec<Option<crate::tree::Partition>> = match model {
        TrainedModel::Tta { tree } => tree.nodes.iter().map(|n| Some(n.partition.clone())).collect(),
        TrainedModel::Reduction { model: r } => r.tasks.iter().filter(|t| t.constant.is_none()).map(|t| Some(t.partition.clone())).collect(),
        _ => vec![None],
    };
    for ((id, e), p) in binary_units(model).into_iter().zip(partitions) {
        let Some(e) = e else { continue };
        let idx: Vec<usize> = match p {
            Some(p) => (0..train_labels.len()).filter(|&j| p.minus.contains(&train_labels[j]) || p.plus.contains(&train_labels[j])).collect(),
            None => (0..train_labels.len()).collect(),
        };
        for (j, w) in idx.iter().zip(&e.final_weights) {
            let _ = writeln!(out, "{id},{j},{},{w:.17e}", train_labels[*j]);
        }
    }
    out
}

pub const COUNTS_HEADER: &str = "k,tta,ovr,ovo,bitwise";

/// Member-classifier counts per method for `K = 2..=16`.
pub fn classifier_counts_csv() -> String {
    let mut out = format!("{COUNTS_HEADER}\n");
    for k in 2..=16 {
        let (a, b, c, d) = classifier_counts(k);
        let _ = writeln!(out, "{k},{a},{b},{c},{d}");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

fn aggregate_row(metric: &str, values: &[f64]) -> AggregateRow {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    AggregateRow {
        metric: metric.into(),
        mean,
        std: var.sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn aggregate(runs: &[RunMetrics]) -> Vec<AggregateRow> {
    let col = |f: fn(&RunMetrics) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    vec![
        aggregate_row("train_accuracy", &col(|r| r.train_accuracy)),
        aggregate_row("test_accuracy", &col(|r| r.test_accuracy)),
        aggregate_row("base_classifiers", &col(|r| r.base_classifiers as f64)),
        aggregate_row("parameters", &col(|r| r.parameters as f64)),
        aggregate_row("total_epochs", &col(|r| r.total_epochs as f64)),
    ]
}

pub const AGGREGATE_HEADER: &str = "metric,mean,std,min,max";

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = format!("{AGGREGATE_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.4},{:.4},{:.4},{:.4}", r.metric, r.mean, r.std, r.min, r.max);
    }
    out
}

/// Everything produced by one repeat.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub metrics: RunMetrics,
    pub model: TrainedModel,
    pub curves: Vec<CurvePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub runs: Vec<RunMetrics>,
    pub aggregate: Vec<AggregateRow>,
}

/// Runs every repeat in memory. The dataset is generated once; repeat `r` trains with seed `seed + r`.
pub fn run_repeats(cfg: &ExperimentConfig) -> Result<(Encoded, Encoded, Vec<RunArtifacts>)> {
    cfg.validate()?;
    let (train_set, test_set) = load_datasets(&cfg.dataset)?;
    let n = cfg.ansatz.n_qubits();
    let train = encode_set(&train_set, &cfg.encoding, n)?;
    let test = encode_set(&test_set, &cfg.encoding, n)?;
    let mut runs = Vec::with_capacity(cfg.repeats);
    for r in 0..cfg.repeats {
        let seed = cfg.seed.wrapping_add(r as u64);
        let model = train_method(cfg, &train, seed)?;
        let metrics = run_metrics(cfg, &model, &train, &test, r, seed)?;
        let curves = emit_curves(&model, &train, &test, cfg.curve_step)?;
        runs.push(RunArtifacts { metrics, model, curves });
    }
    Ok((train, test, runs))
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(&path, contents).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))
}

/// Writes the per-run directories `run_<r>/` and the aggregate files under `out`.
pub fn write_outputs(out: &Path, cfg: &ExperimentConfig, train: &Encoded, runs: &[RunArtifacts]) -> Result<ExperimentReport> {
    std::fs::create_dir_all(out)?;
    write(out.join("config.json"), to_json(cfg)?)?;
    for run in runs {
        let dir = out.join(format!("run_{}", run.metrics.repeat));
        std::fs::create_dir_all(&dir)?;
        write(dir.join("metrics.json"), to_json(&run.metrics)?)?;
        write(dir.join("model.json"), to_json(&run.model)?)?;
        write(dir.join("rounds.csv"), rounds_csv(&run.model))?;
        write(dir.join("curves.csv"), curves_csv(&run.curves))?;
        write(dir.join("weights.csv"), weights_csv(&run.model, &train.labels))?;
        if let TrainedModel::Tta { tree } = &run.model {
            write(dir.join("tree.txt"), tree.to_text())?;
        }
    }
    let metrics: Vec<RunMetrics> = runs.iter().map(|r| r.metrics.clone()).collect();
    let report = ExperimentReport { aggregate: aggregate(&metrics), runs: metrics };
    write(out.join("metrics.json"), to_json(&report)?)?;
    write(out.join("aggregate.csv"), aggregate_csv(&report.aggregate))?;
    write(out.join("classifier_counts.csv"), classifier_counts_csv())?;
    if let Some(coords) = &train.coords {
        let mut csv = String::from("sample,kappa,h\n");
        for (i, (k, h)) in coords.iter().enumerate() {
            let _ = writeln!(csv, "{i},{k:.17e},{h:.17e}");
        }
        write(out.join("train_coords.csv"), csv)?;
    }
    Ok(report)
}

/// Full pipeline: every repeat, then all files under `out` (or the config's output directory).
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentReport> {
    let out = out.map(Path::to_path_buf).or_else(|| cfg.output_dir.clone()).ok_or_else(|| Error::Config("no output directory given".into()))?;
    let (train, _, runs) = run_repeats(cfg)?;
    write_outputs(&out, cfg, &train, &runs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopVariant {
    pub early_stopping: bool,
    pub total_epochs: usize,
    pub members: usize,
    pub termination: Termination,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub epsilons: Vec<f64>,
    pub epochs_per_round: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopReport {
    pub with: EarlyStopVariant,
    pub without: EarlyStopVariant,
}

/// Boosts the same seeded binary task with and without early stopping.
pub fn compare_early_stopping(cfg: &ExperimentConfig) -> Result<EarlyStopReport> {
    cfg.validate()?;
    let (train_set, test_set) = load_datasets(&cfg.dataset)?;
    if train_set.n_classes() != 2 {
        return Err(Error::Config(format!("early-stopping study needs a binary dataset, got {} classes", train_set.n_classes())));
    }
    let n = cfg.ansatz.n_qubits();
    let train = encode_set(&train_set, &cfg.encoding, n)?;
    let test = encode_set(&test_set, &cfg.encoding, n)?;
    let y: Vec<i8> = train.labels.iter().map(|&l| if l == 1 { 1 } else { -1 }).collect();
    let model = cfg.model(Head::Binary)?;
    let run = |enabled: bool| -> Result<EarlyStopVariant> {
        let mut tc = cfg.train;
        tc.early_stop.enabled = enabled;
        let ens = boost_binary(&model, &train.states, &y, &cfg.boost, &tc, cfg.seed, 0)?;
        let acc = |d: &Encoded| -> Result<f64> {
            let p: Vec<Option<usize>> = d.states.iter().map(|s| ens.predict(s).map(|r| Some(r.0))).collect::<Result<_>>()?;
            Ok(accuracy(&p, &d.labels))
        };
        Ok(EarlyStopVariant {
            early_stopping: enabled,
            total_epochs: ens.total_epochs(),
            members: ens.len(),
            termination: ens.termination,
            train_accuracy: if ens.is_empty() { 0.0 } else { acc(&train)? },
            test_accuracy: if ens.is_empty() { 0.0 } else { acc(&test)? },
            epsilons: ens.rounds.iter().map(|r| r.epsilon).collect(),
            epochs_per_round: ens.rounds.iter().map(|r| r.epochs_used).collect(),
        })
    };
    Ok(EarlyStopReport { with: run(true)?, without: run(false)? })
}
