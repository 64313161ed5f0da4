//! Trace-distance class trees, TTA training and inference, and the one-vs-rest,
//! one-vs-one and bitwise reductions.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boost::{boost_binary, BoostConfig, BoostEnsemble, Termination};
use crate::learn::{Head, Model, TrainConfig};
use crate::qcore::{mean_pure, trace_distance, CMatrix, DensityMatrix, StateVector, C64};
use crate::{tol, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitter {
    Brute,
    Greedy,
    /// Brute force up to this many classes, greedy beyond.
    BruteUpTo(usize),
}

impl Default for Splitter {
    fn default() -> Self {
        Splitter::BruteUpTo(12)
    }
}

/// Mean state and sample count of one class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMean {
    pub class: usize,
    pub mean: DensityMatrix,
    pub count: usize,
}

/// Per-class mean states; every class in `0..n_classes` must have samples.
pub fn class_means(states: &[StateVector], labels: &[usize], n_classes: usize) -> Result<Vec<ClassMean>> {
    if states.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: states.len(), got: labels.len() });
    }
    (0..n_classes)
        .map(|class| {
            let members: Vec<&StateVector> = states.iter().zip(labels).filter(|(_, &l)| l == class).map(|(s, _)| s).collect();
            if members.is_empty() {
                return Err(Error::InvalidParameter(format!("class {class} has no samples")));
            }
            Ok(ClassMean { class, count: members.len(), mean: mean_pure(members)? })
        })
        .collect()
}

/// Sample-count-weighted mean of the selected class means.
pub fn group_mean(means: &[&ClassMean]) -> Result<DensityMatrix> {
    let first = means.first().ok_or(Error::Empty("class group"))?;
    let dim = first.mean.dim();
    let total: usize = means.iter().map(|m| m.count).sum();
    let mut acc = CMatrix::zeros(dim, dim);
    for m in means {
        acc.axpy(C64::new(m.count as f64 / total as f64, 0.0), m.mean.matrix())?;
    }
    DensityMatrix::new(acc)
}

/// Left (`−1`) and right (`+1`) class sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
}

fn split_distance(means: &[ClassMean], minus: &[usize], plus: &[usize]) -> Result<f64> {
    let pick = |set: &[usize]| -> Vec<&ClassMean> { means.iter().filter(|m| set.contains(&m.class)).collect() };
    trace_distance(&group_mean(&pick(minus))?, &group_mean(&pick(plus))?)
}

/// Lexicographic `r`-subsets of `0..n`.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else { break };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

fn sorted_classes(means: &[ClassMean]) -> Vec<usize> {
    let mut c: Vec<usize> = means.iter().map(|m| m.class).collect();
    c.sort_unstable();
    c
}

/// Best `(⌊K/2⌋, ⌈K/2⌉)` split by exhaustive search, left side the smaller one. A later
/// candidate replaces the incumbent only when it is better by more than the tie tolerance.
pub fn max_binary_split_brute(means: &[ClassMean]) -> Result<(Partition, f64)> {
    let classes = sorted_classes(means);
    let k = classes.len();
    if k < 3 {
        return Err(Error::InvalidParameter(format!("brute split needs at least 3 classes, got {k}")));
    }
    let mut best: Option<(Partition, f64)> = None;
    for combo in combinations(k, k / 2) {
        let minus: Vec<usize> = combo.iter().map(|&i| classes[i]).collect();
        let plus: Vec<usize> = classes.iter().copied().filter(|c| !minus.contains(c)).collect();
        let d = split_distance(means, &minus, &plus)?;
        if best.as_ref().is_none_or(|(_, b)| d > b + tol::SPLIT_TIE) {
            best = Some((Partition { minus, plus }, d));
        }
    }
    Ok(best.expect("at least one split"))
}

/// Pairwise trace distances between class means, indexed like `means`.
pub fn pairwise_distances(means: &[ClassMean]) -> Result<Vec<Vec<f64>>> {
    let k = means.len();
    let mut d = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            d[i][j] = trace_distance(&means[i].mean, &means[j].mean)?;
            d[j][i] = d[i][j];
        }
    }
    Ok(d)
}

/// Greedy split: seed with the farthest pair, then each remaining class (ascending) joins the
/// seed it is strictly closer to, ties going to the second seed.
pub fn max_binary_split_greedy(means: &[ClassMean]) -> Result<(Partition, f64)> {
    let mut sorted: Vec<&ClassMean> = means.iter().collect();
    sorted.sort_by_key(|m| m.class);
    let k = sorted.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("split needs at least 2 classes, got {k}")));
    }
    let owned: Vec<ClassMean> = sorted.iter().map(|m| (*m).clone()).collect();
    let d = pairwise_distances(&owned)?;
    let (mut si, mut sj) = (0, 1);
    for i in 0..k {
        for j in i + 1..k {
            if d[i][j] > d[si][sj] {
                (si, sj) = (i, j);
            }
        }
    }
    let (mut k1, mut k2) = (vec![owned[si].class], vec![owned[sj].class]);
    for idx in 0..k {
        if idx == si || idx == sj {
            continue;
        }
        if d[idx][si] < d[idx][sj] {
            k1.push(owned[idx].class);
        } else {
            k2.push(owned[idx].class);
        }
    }
    k1.sort_unstable();
    k2.sort_unstable();
    let dist = split_distance(means, &k1, &k2)?;
    Ok((Partition { minus: k1, plus: k2 }, dist))
}

fn split(means: &[ClassMean], splitter: Splitter) -> Result<(Partition, f64)> {
    let classes = sorted_classes(means);
    if classes.len() == 2 {
        let p = Partition { minus: vec![classes[0]], plus: vec![classes[1]] };
        let d = split_distance(means, &p.minus, &p.plus)?;
        return Ok((p, d));
    }
    match splitter {
        Splitter::Brute => max_binary_split_brute(means),
        Splitter::Greedy => max_binary_split_greedy(means),
        Splitter::BruteUpTo(limit) if classes.len() <= limit => max_binary_split_brute(means),
        Splitter::BruteUpTo(_) => max_binary_split_greedy(means),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Child {
    Node(usize),
    Leaf(usize),
}

/// Internal node; ids are breadth-first from 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub partition: Partition,
    pub trace_distance: f64,
    pub n_samples: usize,
    pub parent: Option<usize>,
    /// `−1` when this node is the left child of its parent, `+1` for the right child.
    pub branch: Option<i8>,
    pub left: Child,
    pub right: Child,
}

impl TreeNode {
    pub fn classes(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.partition.minus.iter().chain(&self.partition.plus).copied().collect();
        c.sort_unstable();
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTree {
    pub n_classes: usize,
    pub nodes: Vec<TreeNode>,
    /// Trained ensemble per node (same order as `nodes`).
    #[serde(default)]
    pub ensembles: Vec<Option<BoostEnsemble>>,
}

/// Recursive bipartitioning of the classes by mean-state trace distance.
pub fn build_tree(states: &[StateVector], labels: &[usize], n_classes: usize, splitter: Splitter) -> Result<TraceTree> {
    if n_classes < 2 {
        return Err(Error::InvalidParameter("a tree needs at least two classes".into()));
    }
    let means = class_means(states, labels, n_classes)?;
    build_tree_from_means(&means, splitter)
}

pub fn build_tree_from_means(means: &[ClassMean], splitter: Splitter) -> Result<TraceTree> {
    let n_classes = means.len();
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut queue: VecDeque<(Vec<usize>, Option<usize>, Option<i8>)> = VecDeque::new();
    queue.push_back(((0..n_classes).collect(), None, None));
    while let Some((classes, parent, branch)) = queue.pop_front() {
        let subset: Vec<ClassMean> = means.iter().filter(|m| classes.contains(&m.class)).cloned().collect();
        let (partition, td) = split(&subset, splitter)?;
        let id = nodes.len() + 1;
        let n_samples = subset.iter().map(|m| m.count).sum();
        let mut side = |set: &Vec<usize>, b: i8| {
            if set.len() == 1 {
                Child::Leaf(set[0])
            } else {
                queue.push_back((set.clone(), Some(id), Some(b)));
                Child::Node(0)
            }
        };
        let left = side(&partition.minus, -1);
        let right = side(&partition.plus, 1);
        nodes.push(TreeNode { id, partition, trace_distance: td, n_samples, parent, branch, left, right });
    }
    for i in 0..nodes.len() {
        let (id, parent, branch) = (nodes[i].id, nodes[i].parent, nodes[i].branch);
        if let (Some(p), Some(b)) = (parent, branch) {
            let node = &mut nodes[p - 1];
            if b < 0 { node.left = Child::Node(id) } else { node.right = Child::Node(id) }
        }
    }
    let n = nodes.len();
    Ok(TraceTree { n_classes, nodes, ensembles: vec![None; n] })
}

pub const TREE_HEADER: &str = "node_id,k_minus,k_plus,trace_distance,n_samples,parent,branch";

fn join(set: &[usize]) -> String {
    set.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_set(s: &str) -> Result<Vec<usize>> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| Error::Format(format!("bad class `{t}`")))).collect()
}

impl TraceTree {
    pub fn node(&self, id: usize) -> Result<&TreeNode> {
        self.nodes.get(id.wrapping_sub(1)).ok_or_else(|| Error::InvalidParameter(format!("no node {id}")))
    }

    /// Samples of the node's classes, relabelled `−1` (left set) / `+1` (right set).
    pub fn node_task(&self, id: usize, labels: &[usize]) -> Result<(Vec<usize>, Vec<i8>)> {
        let node = self.node(id)?;
        Ok(task_samples(&node.partition, labels))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{TREE_HEADER}\n");
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "{},{},{},{:.17e},{},{},{}",
                n.id,
                join(&n.partition.minus),
                join(&n.partition.plus),
                n.trace_distance,
                n.n_samples,
                n.parent.map_or(String::new(), |p| p.to_string()),
                n.branch.map_or(String::new(), |b| b.to_string())
            );
        }
        out
    }

    /// Parses the structure written by [`TraceTree::to_text`]; ensembles are left empty.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(TREE_HEADER) {
            return Err(Error::Format("missing tree header".into()));
        }
        let mut nodes = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            let bad = |what: &str| Error::Format(format!("tree line {}: {what}", i + 2));
            if f.len() != 7 {
                return Err(bad("expected 7 fields"));
            }
            let opt = |s: &str| -> Result<Option<i64>> { if s.is_empty() { Ok(None) } else { s.parse().map(Some).map_err(|_| bad("bad integer")) } };
            nodes.push(TreeNode {
                id: f[0].parse().map_err(|_| bad("bad id"))?,
                partition: Partition { minus: parse_set(f[1])?, plus: parse_set(f[2])? },
                trace_distance: f[3].parse().map_err(|_| bad("bad distance"))?,
                n_samples: f[4].parse().map_err(|_| bad("bad count"))?,
                parent: opt(f[5])?.map(|p| p as usize),
                branch: opt(f[6])?.map(|b| b as i8),
                left: Child::Leaf(0),
                right: Child::Leaf(0),
            });
        }
        let n_classes = nodes.first().map_or(0, |n| n.partition.minus.len() + n.partition.plus.len());
        for i in 0..nodes.len() {
            let p = nodes[i].partition.clone();
            let child = |set: &[usize], b: i8| {
                if set.len() == 1 {
                    Child::Leaf(set[0])
                } else {
                    nodes.iter().find(|n| n.parent == Some(i + 1) && n.branch == Some(b)).map_or(Child::Leaf(usize::MAX), |n| Child::Node(n.id))
                }
            };
            let (l, r) = (child(&p.minus, -1), child(&p.plus, 1));
            nodes[i].left = l;
            nodes[i].right = r;
        }
        let tree = TraceTree { n_classes, ensembles: vec![None; nodes.len()], nodes };
        tree.validate()?;
        Ok(tree)
    }

    /// Checks the structural invariants: `K−1` nodes, children partition parents, every class in one leaf.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() + 1 != self.n_classes {
            return Err(Error::Invariant(format!("{} nodes for {} classes", self.nodes.len(), self.n_classes)));
        }
        let mut leaves = Vec::new();
        for n in &self.nodes {
            for (child, set) in [(n.left, &n.partition.minus), (n.right, &n.partition.plus)] {
                match child {
                    Child::Leaf(c) if set == &vec![c] => leaves.push(c),
                    Child::Node(id) if self.node(id)?.classes() == *set => {}
                    _ => return Err(Error::Invariant(format!("node {} has an inconsistent child", n.id))),
                }
            }
        }
        leaves.sort_unstable();
        if leaves != (0..self.n_classes).collect::<Vec<_>>() {
            return Err(Error::Invariant("leaves do not cover every class exactly once".into()));
        }
        Ok(())
    }

    /// Termination of each node's boosting (None when untrained).
    pub fn terminations(&self) -> Vec<Option<Termination>> {
        self.ensembles.iter().map(|e| e.as_ref().map(|e| e.termination)).collect()
    }

    pub fn member_count(&self) -> usize {
        self.ensembles.iter().flatten().map(|e| e.len()).sum()
    }
}

fn task_samples(p: &Partition, labels: &[usize]) -> (Vec<usize>, Vec<i8>) {
    labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| {
            if p.minus.contains(l) {
                Some((i, -1))
            } else if p.plus.contains(l) {
                Some((i, 1))
            } else {
                None
            }
        })
        .unzip()
}

/// Shared settings for training binary ensembles on derived tasks.
#[derive(Clone, Copy, Debug)]
pub struct BinaryTrainer<'a> {
    pub model: &'a Model,
    pub boost: &'a BoostConfig,
    pub train: &'a TrainConfig,
    pub seed: u64,
}

impl BinaryTrainer<'_> {
    fn run(&self, states: &[StateVector], labels: &[usize], p: &Partition, task_id: u64) -> Result<BoostEnsemble> {
        if self.model.head != Head::Binary {
            return Err(Error::InvalidParameter("node classifiers need a binary head".into()));
        }
        let (idx, y) = task_samples(p, labels);
        let local: Vec<StateVector> = idx.iter().map(|&i| states[i].clone()).collect();
        boost_binary(self.model, &local, &y, self.boost, self.train, self.seed, task_id)
    }
}

/// Trains every node's ensemble on its relabelled subset, nodes in parallel. Member seeds are
/// derived from `(seed, node_id, round)`, so the result does not depend on scheduling.
pub fn train_tta(tree: &mut TraceTree, states: &[StateVector], labels: &[usize], trainer: &BinaryTrainer) -> Result<()> {
    let trained: Vec<BoostEnsemble> =
        tree.nodes.par_iter().map(|n| trainer.run(states, labels, &n.partition, n.id as u64)).collect::<Result<_>>()?;
    tree.ensembles = trained.into_iter().map(Some).collect();
    Ok(())
}

/// Root-to-leaf traversal; returns the class and the visited node ids.
pub fn predict_tta_path(tree: &TraceTree, state: &StateVector) -> Result<(usize, Vec<usize>)> {
    let mut id = 1;
    let mut path = Vec::new();
    loop {
        path.push(id);
        let node = tree.node(id)?;
        let ens = tree.ensembles.get(id - 1).and_then(Option::as_ref).filter(|e| !e.is_empty());
        let ens = ens.ok_or_else(|| Error::Untrained(format!("node {id} has no trained members")))?;
        let (class, _) = ens.predict(state)?;
        match if class == 1 { node.right } else { node.left } {
            Child::Leaf(c) => return Ok((c, path)),
            Child::Node(next) => id = next,
        }
    }
}

pub fn predict_tta(tree: &TraceTree, state: &StateVector) -> Result<usize> {
    Ok(predict_tta_path(tree, state)?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Ovr,
    Ovo,
    Bitwise,
}

/// A derived binary problem. `constant` marks a bitwise position on which every class agrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryTask {
    pub partition: Partition,
    pub constant: Option<i8>,
}

pub fn reduce_ovr(n_classes: usize) -> Vec<BinaryTask> {
    (0..n_classes)
        .map(|k| BinaryTask { partition: Partition { minus: (0..n_classes).filter(|&c| c != k).collect(), plus: vec![k] }, constant: None })
        .collect()
}

pub fn reduce_ovo(n_classes: usize) -> Vec<BinaryTask> {
    let mut tasks = Vec::new();
    for i in 0..n_classes {
        for j in i + 1..n_classes {
            tasks.push(BinaryTask { partition: Partition { minus: vec![i], plus: vec![j] }, constant: None });
        }
    }
    tasks
}

/// Bit count `⌈log₂(max code + 1)⌉`.
pub fn code_length(codes: &[usize]) -> usize {
    let max = codes.iter().copied().max().unwrap_or(0);
    (usize::BITS - max.leading_zeros()) as usize
}

/// One task per bit of the class codes, most significant bit first; class `k` has code `codes[k]`.
pub fn reduce_bitwise(codes: &[usize]) -> Vec<BinaryTask> {
    let bits = code_length(codes);
    (0..bits)
        .map(|b| {
            let shift = bits - 1 - b;
            let (plus, minus): (Vec<usize>, Vec<usize>) = (0..codes.len()).partition(|&k| (codes[k] >> shift) & 1 == 1);
            let constant = if minus.is_empty() {
                Some(1)
            } else if plus.is_empty() {
                Some(-1)
            } else {
                None
            };
            BinaryTask { partition: Partition { minus, plus }, constant }
        })
        .collect()
}

pub fn reduce(reduction: Reduction, n_classes: usize) -> Vec<BinaryTask> {
    match reduction {
        Reduction::Ovr => reduce_ovr(n_classes),
        Reduction::Ovo => reduce_ovo(n_classes),
        Reduction::Bitwise => reduce_bitwise(&(0..n_classes).collect::<Vec<_>>()),
    }
}

/// OVR: the class whose task has the largest margin; ties to the smaller class.
pub fn decode_ovr(margins: &[f64]) -> usize {
    crate::learn::argmax(margins)
}

/// OVO: each pair task adds its margin toward the class it favours and subtracts it from the
/// other; the class with the largest total wins, ties to the smaller class.
pub fn decode_ovo(n_classes: usize, tasks: &[BinaryTask], margins: &[f64]) -> usize {
    let mut score = vec![0.0; n_classes];
    for (t, &m) in tasks.iter().zip(margins) {
        let (i, j) = (t.partition.minus[0], t.partition.plus[0]);
        score[j] += m;
        score[i] -= m;
    }
    crate::learn::argmax(&score)
}

/// Bitwise: read bits from the margin signs and map the code to its class; codes matching no
/// class go to the nearest code in Hamming distance, ties to the smaller class.
pub fn decode_bitwise(codes: &[usize], margins: &[f64]) -> usize {
    let code = margins.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(m >= 0.0));
    let mut best = 0;
    for k in 0..codes.len() {
        if (codes[k] ^ code).count_ones() < (codes[best] ^ code).count_ones() {
            best = k;
        }
    }
    best
}

/// Ensembles for each task of a reduction (`None` for constant bitwise tasks).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionModel {
    pub reduction: Reduction,
    pub n_classes: usize,
    pub tasks: Vec<BinaryTask>,
    pub ensembles: Vec<Option<BoostEnsemble>>,
}

pub fn train_reduction(
    reduction: Reduction,
    n_classes: usize,
    states: &[StateVector],
    labels: &[usize],
    trainer: &BinaryTrainer,
) -> Result<ReductionModel> {
    let tasks = reduce(reduction, n_classes);
    let ensembles = tasks
        .par_iter()
        .enumerate()
        .map(|(i, t)| if t.constant.is_some() { Ok(None) } else { trainer.run(states, labels, &t.partition, i as u64 + 1).map(Some) })
        .collect::<Result<_>>()?;
    Ok(ReductionModel { reduction, n_classes, tasks, ensembles })
}

impl ReductionModel {
    pub fn member_count(&self) -> usize {
        self.ensembles.iter().flatten().map(|e| e.len()).sum()
    }

    /// Margin of every task on one state.
    pub fn margins(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.tasks
            .iter()
            .zip(&self.ensembles)
            .enumerate()
            .map(|(i, (t, e))| match (t.constant, e) {
                (Some(c), _) => Ok(c as f64),
                (None, Some(e)) if !e.is_empty() => Ok(e.predict(state)?.1),
                _ => Err(Error::Untrained(format!("task {} has no trained members", i + 1))),
            })
            .collect()
    }

    pub fn predict(&self, state: &StateVector) -> Result<usize> {
        let m = self.margins(state)?;
        Ok(match self.reduction {
            Reduction::Ovr => decode_ovr(&m),
            Reduction::Ovo => decode_ovo(self.n_classes, &self.tasks, &m),
            Reduction::Bitwise => decode_bitwise(&(0..self.n_classes).collect::<Vec<_>>(), &m),
        })
    }
}

/// Member classifiers needed by TTA, OVR, OVO and bitwise for `K` classes.
pub fn classifier_counts(n_classes: usize) -> (usize, usize, usize, usize) {
    let k = n_classes;
    (k - 1, k, k * (k - 1) / 2, code_length(&[k - 1]))
}
