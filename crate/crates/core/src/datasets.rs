//! Dataset generation and ingestion: synthetic interval data, ANNNI ground states,
//! IDX image files, and a plain-text dataset format.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qcore::{eigsh_ground, qubit_mask, CMatrix, C64};
use crate::{seed, tol, Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    /// Free-form generator details such as the interval-to-class assignment.
    #[serde(default)]
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSet {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
    provenance: Provenance,
    /// Phase-diagram coordinates `(κ, h)` for ANNNI samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<(f64, f64)>>,
}

impl LabeledSet {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize, provenance: Provenance) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Empty("labeled set"));
        }
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: features.len(), got: labels.len() });
        }
        let d = features[0].len();
        if let Some(f) = features.iter().find(|f| f.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: f.len() });
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::Invariant(format!("label {l} outside [0, {n_classes})")));
        }
        Ok(Self { features, labels, n_classes, provenance, coords: None })
    }

    pub fn with_coords(mut self, coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: coords.len() });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// Settings of the interval-block synthetic generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub dim: usize,
    #[serde(default = "default_synthetic_classes")]
    pub n_classes: usize,
    pub per_class_train: usize,
    pub per_class_test: usize,
}

fn default_synthetic_classes() -> usize {
    3
}

/// Number of equal subintervals of `[0, 2π)`: eight, or one per class when there are more classes.
pub fn synthetic_interval_count(n_classes: usize) -> usize {
    n_classes.max(8)
}

/// Draws the interval-to-class map: intervals are shuffled, the first `K` go one to each class,
/// the rest to uniformly random classes.
pub fn synthetic_assignment(n_classes: usize, seed: u64) -> Vec<usize> {
    let intervals = synthetic_interval_count(n_classes);
    let mut rng = seed::stream_rng(seed, u64::MAX);
    let mut order: Vec<usize> = (0..intervals).collect();
    order.shuffle(&mut rng);
    let mut assignment = vec![0; intervals];
    for (rank, &interval) in order.iter().enumerate() {
        assignment[interval] = if rank < n_classes { rank } else { rng.gen_range(0..n_classes) };
    }
    assignment
}

/// Generates train and test sets. Each sample picks one of its class's intervals uniformly and
/// draws every coordinate i.i.d. uniform inside that interval.
pub fn gen_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<(LabeledSet, LabeledSet)> {
    if spec.dim == 0 || spec.per_class_train == 0 || spec.per_class_test == 0 {
        return Err(Error::InvalidParameter("synthetic dimension and counts must be positive".into()));
    }
    if spec.n_classes < 2 {
        return Err(Error::InvalidParameter("synthetic data needs at least two classes".into()));
    }
    let k = spec.n_classes;
    let assignment = synthetic_assignment(k, seed);
    let width = 2.0 * PI / assignment.len() as f64;
    let owned: Vec<Vec<usize>> = (0..k).map(|c| (0..assignment.len()).filter(|&i| assignment[i] == c).collect()).collect();
    let details = format!(
        "intervals={} assignment={}",
        assignment.len(),
        assignment.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    );
    let build = |per_class: usize, offset: u64| -> Result<LabeledSet> {
        let mut features = Vec::with_capacity(per_class * k);
        let mut labels = Vec::with_capacity(per_class * k);
        for (class, intervals) in owned.iter().enumerate() {
            for j in 0..per_class {
                let mut rng = seed::stream_rng(seed, offset + (class * per_class + j) as u64);
                let interval = intervals[rng.gen_range(0..intervals.len())];
                let lo = interval as f64 * width;
                let x = (0..spec.dim).map(|_| (lo + rng.gen::<f64>() * width).min(lo + width * (1.0 - f64::EPSILON))).collect();
                features.push(x);
                labels.push(class);
            }
        }
        LabeledSet::new(features, labels, k, Provenance { generator: "synthetic".into(), seed, details: details.clone() })
    };
    Ok((build(spec.per_class_train, 0)?, build(spec.per_class_test, 1 << 40)?))
}

/// `H = −(Σ X_i X_{i+1} − κ Σ X_i X_{i+2} + h Σ Z_i)` with open boundaries.
pub fn annni_hamiltonian(n_qubits: usize, kappa: f64, h: f64) -> Result<CMatrix> {
    if !(3..=tol::MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::InvalidParameter(format!("ANNNI chain needs 3..={} qubits, got {n_qubits}", tol::MAX_QUBITS)));
    }
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    let mask = |q| qubit_mask(n_qubits, q);
    let mut flips: Vec<(usize, f64)> = (0..n_qubits - 1).map(|i| (mask(i) | mask(i + 1), -1.0)).collect();
    flips.extend((0..n_qubits - 2).map(|i| (mask(i) | mask(i + 2), kappa)));
    let data = m.data_mut();
    for s in 0..dim {
        let z: f64 = (0..n_qubits).map(|q| if s & mask(q) == 0 { 1.0 } else { -1.0 }).sum();
        data[s * dim + s] = C64::new(-h * z, 0.0);
        for &(f, coef) in &flips {
            data[(s ^ f) * dim + s] += C64::new(coef, 0.0);
        }
    }
    Ok(m)
}

/// Ising critical line `h_I(κ) = ((1−κ)/κ)(1 − √((1−3κ+4κ²)/(1−κ)))`, evaluated in the
/// algebraically equivalent form `2(1−2κ)/(1+√(...))` so that `κ = 0` gives the limit 1.
pub fn h_ising(kappa: f64) -> f64 {
    let a = (1.0 - 3.0 * kappa + 4.0 * kappa * kappa) / (1.0 - kappa);
    2.0 * (1.0 - 2.0 * kappa) / (1.0 + a.sqrt())
}

/// Commensurate–incommensurate line `h_C(κ) = 1.05 √((κ−0.5)(κ−0.1))`.
pub fn h_commensurate(kappa: f64) -> f64 {
    1.05 * ((kappa - 0.5) * (kappa - 0.1)).max(0.0).sqrt()
}

fn check_phase_domain(kappa: f64, h: f64) -> Result<()> {
    if !(0.0..1.0).contains(&kappa) || !(h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("(κ={kappa}, h={h}) outside κ ∈ [0,1), h ≥ 0")));
    }
    Ok(())
}

/// 0 antiphase, 1 ferromagnetic, 2 paramagnetic.
pub fn annni_phase_label(kappa: f64, h: f64) -> Result<usize> {
    check_phase_domain(kappa, h)?;
    Ok(if kappa < 0.5 {
        if h < h_ising(kappa) { 1 } else { 2 }
    } else if h < h_commensurate(kappa) {
        0
    } else {
        2
    })
}

/// Distance from `h` to the critical line governing `κ`.
pub fn annni_boundary_distance(kappa: f64, h: f64) -> Result<f64> {
    check_phase_domain(kappa, h)?;
    Ok(if kappa < 0.5 { (h - h_ising(kappa)).abs() } else { (h - h_commensurate(kappa)).abs() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnniSpec {
    pub n_qubits: usize,
    pub per_class_train: usize,
    pub per_class_test: usize,
    #[serde(default = "default_kappa_range")]
    pub kappa_range: (f64, f64),
    #[serde(default = "default_h_range")]
    pub h_range: (f64, f64),
}

fn default_kappa_range() -> (f64, f64) {
    (0.0, 0.99)
}

fn default_h_range() -> (f64, f64) {
    (0.0, 2.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnniPoint {
    pub kappa: f64,
    pub h: f64,
    pub label: usize,
    pub ground: Vec<f64>,
}

/// Ground state of the ANNNI chain as a real unit vector.
pub fn annni_ground_state(n_qubits: usize, kappa: f64, h: f64) -> Result<(f64, Vec<f64>)> {
    let (energy, v) = eigsh_ground(&annni_hamiltonian(n_qubits, kappa, h)?)?;
    if v.iter().any(|z| z.im.abs() > tol::STATE) {
        return Err(Error::Invariant("ANNNI ground state is not real".into()));
    }
    Ok((energy, v.iter().map(|z| z.re).collect()))
}

const ANNNI_BOUNDARY_MARGIN: f64 = 1e-6;
const ANNNI_BUDGET_FACTOR: usize = 1000;

/// Rejection-samples `(κ, h)` uniformly in the region until every phase has its train and test
/// quota, then diagonalizes the accepted points.
pub fn gen_annni_points(spec: &AnnniSpec, seed: u64) -> Result<(Vec<AnnniPoint>, Vec<AnnniPoint>)> {
    let (k0, k1) = spec.kappa_range;
    let (h0, h1) = spec.h_range;
    if !(0.0 <= k0 && k0 < k1 && k1 < 1.0 && 0.0 <= h0 && h0 < h1 && h1.is_finite()) {
        return Err(Error::InvalidParameter(format!("ANNNI region κ∈[{k0},{k1}], h∈[{h0},{h1}] is invalid")));
    }
    if spec.per_class_train == 0 || spec.per_class_test == 0 {
        return Err(Error::InvalidParameter("ANNNI quotas must be positive".into()));
    }
    annni_hamiltonian(spec.n_qubits, 0.0, 0.0)?;
    let quota = 3 * (spec.per_class_train + spec.per_class_test);
    let budget = ANNNI_BUDGET_FACTOR * quota;
    let mut rng = seed::rng(seed);
    let mut train = [Vec::new(), Vec::new(), Vec::new()];
    let mut test = [Vec::new(), Vec::new(), Vec::new()];
    let mut accepted = 0;
    let mut draws = 0;
    while accepted < quota {
        if draws == budget {
            let have: Vec<usize> = (0..3).map(|c| train[c].len() + test[c].len()).collect();
            return Err(Error::Budget(format!("ANNNI sampling exhausted {budget} draws; per-phase counts {have:?}")));
        }
        draws += 1;
        let kappa = rng.gen_range(k0..=k1);
        let h = rng.gen_range(h0..=h1);
        if annni_boundary_distance(kappa, h)? <= ANNNI_BOUNDARY_MARGIN {
            continue;
        }
        let label = annni_phase_label(kappa, h)?;
        if train[label].len() < spec.per_class_train {
            train[label].push((kappa, h));
        } else if test[label].len() < spec.per_class_test {
            test[label].push((kappa, h));
        } else {
            continue;
        }
        accepted += 1;
    }
    let solve = |groups: [Vec<(f64, f64)>; 3]| -> Result<Vec<AnnniPoint>> {
        let flat: Vec<(usize, f64, f64)> =
            groups.iter().enumerate().flat_map(|(label, g)| g.iter().map(move |&(k, h)| (label, k, h))).collect();
        flat.par_iter()
            .map(|&(label, kappa, h)| {
                let (_, ground) = annni_ground_state(spec.n_qubits, kappa, h)?;
                Ok(AnnniPoint { kappa, h, label, ground })
            })
            .collect()
    };
    Ok((solve(train)?, solve(test)?))
}

fn annni_set(points: Vec<AnnniPoint>, spec: &AnnniSpec, seed: u64) -> Result<LabeledSet> {
    let coords = points.iter().map(|p| (p.kappa, p.h)).collect();
    let labels = points.iter().map(|p| p.label).collect();
    let features = points.into_iter().map(|p| p.ground).collect();
    let details = format!(
        "n={} kappa=[{},{}] h=[{},{}]",
        spec.n_qubits, spec.kappa_range.0, spec.kappa_range.1, spec.h_range.0, spec.h_range.1
    );
    LabeledSet::new(features, labels, 3, Provenance { generator: "annni".into(), seed, details })?.with_coords(coords)
}

/// ANNNI phase-classification data; features are ground-state amplitudes.
pub fn gen_annni(spec: &AnnniSpec, seed: u64) -> Result<(LabeledSet, LabeledSet)> {
    let (train, test) = gen_annni_points(spec, seed)?;
    Ok((annni_set(train, spec, seed)?, annni_set(test, spec, seed)?))
}

fn read_be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Format("truncated IDX header".into()))
}

/// Parses an IDX image file into `(rows, cols, images)` with pixels scaled to `[0, 1]`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, Vec<Vec<f64>>)> {
    let magic = read_be_u32(bytes, 0)?;
    if magic != 0x0000_0803 {
        return Err(Error::Format(format!("bad IDX image magic {magic:#010x}")));
    }
    let count = read_be_u32(bytes, 4)? as usize;
    let rows = read_be_u32(bytes, 8)? as usize;
    let cols = read_be_u32(bytes, 12)? as usize;
    let size = rows * cols;
    let body = &bytes[16..];
    if body.len() != count * size {
        return Err(Error::Format(format!("IDX image payload has {} bytes, expected {}", body.len(), count * size)));
    }
    let images = body.chunks(size.max(1)).take(count).map(|img| img.iter().map(|&p| p as f64 / 255.0).collect()).collect();
    Ok((rows, cols, images))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    let magic = read_be_u32(bytes, 0)?;
    if magic != 0x0000_0801 {
        return Err(Error::Format(format!("bad IDX label magic {magic:#010x}")));
    }
    let count = read_be_u32(bytes, 4)? as usize;
    let body = &bytes[8..];
    if body.len() != count {
        return Err(Error::Format(format!("IDX label payload has {} bytes, expected {count}", body.len())));
    }
    Ok(body.iter().map(|&b| b as usize).collect())
}

/// Overlap weights of `src` unit cells with each of `dst` equal output cells.
fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let (lo, hi) = (o as f64 * scale, (o + 1) as f64 * scale);
            let mut w = Vec::new();
            let mut i = lo.floor() as usize;
            while i < src && (i as f64) < hi {
                let overlap = (hi.min(i as f64 + 1.0) - lo.max(i as f64)).max(0.0);
                if overlap > 0.0 {
                    w.push((i, overlap / scale));
                }
                i += 1;
            }
            w
        })
        .collect()
}

/// Area-averaging resize of a row-major `rows x cols` image to `side x side`.
pub fn resize_area(img: &[f64], rows: usize, cols: usize, side: usize) -> Result<Vec<f64>> {
    if img.len() != rows * cols {
        return Err(Error::DimensionMismatch { expected: rows * cols, got: img.len() });
    }
    if side == 0 {
        return Err(Error::InvalidParameter("resize side must be positive".into()));
    }
    if rows == side && cols == side {
        return Ok(img.to_vec());
    }
    let (wr, wc) = (area_weights(rows, side), area_weights(cols, side));
    let mut out = vec![0.0; side * side];
    for (r, row_w) in wr.iter().enumerate() {
        for (c, col_w) in wc.iter().enumerate() {
            let mut acc = 0.0;
            for &(i, a) in row_w {
                for &(j, b) in col_w {
                    acc += a * b * img[i * cols + j];
                }
            }
            out[r * side + c] = acc;
        }
    }
    Ok(out)
}

/// Loads an IDX image/label pair, optionally resizing and keeping only `classes`
/// (labels re-indexed densely in ascending original order).
pub fn load_idx(images: &Path, labels: &Path, resize: Option<usize>, classes: Option<&[usize]>) -> Result<LabeledSet> {
    let (rows, cols, imgs) = parse_idx_images(&std::fs::read(images)?)?;
    let raw_labels = parse_idx_labels(&std::fs::read(labels)?)?;
    if imgs.len() != raw_labels.len() {
        return Err(Error::Format(format!("{} images but {} labels", imgs.len(), raw_labels.len())));
    }
    let keep: BTreeSet<usize> = match classes {
        Some(c) => c.iter().copied().collect(),
        None => raw_labels.iter().copied().collect(),
    };
    let index: Vec<usize> = keep.iter().copied().collect();
    let mut features = Vec::new();
    let mut out_labels = Vec::new();
    for (img, &l) in imgs.iter().zip(&raw_labels) {
        if let Ok(dense) = index.binary_search(&l) {
            features.push(match resize {
                Some(side) => resize_area(img, rows, cols, side)?,
                None => img.clone(),
            });
            out_labels.push(dense);
        }
    }
    let details = format!(
        "resize={} classes={}",
        resize.map_or("none".to_string(), |s| format!("area:{s}x{s}")),
        index.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    );
    LabeledSet::new(features, out_labels, index.len(), Provenance { generator: "idx".into(), seed: 0, details })
}

/// Writes `# d=.. K=.. generator=.. seed=..` followed by one `features...,label` line per sample.
pub fn write_dataset(path: &Path, set: &LabeledSet) -> Result<()> {
    std::fs::write(path, format_dataset(set))?;
    Ok(())
}

pub fn format_dataset(set: &LabeledSet) -> String {
    let p = set.provenance();
    let mut out = format!("# d={} K={} generator={} seed={}\n", set.dim(), set.n_classes(), p.generator, p.seed);
    for (x, l) in set.features().iter().zip(set.labels()) {
        for v in x {
            let _ = write!(out, "{v:.16e},");
        }
        let _ = writeln!(out, "{l}");
    }
    out
}

pub fn read_dataset(path: &Path) -> Result<LabeledSet> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

pub fn parse_dataset(text: &str) -> Result<LabeledSet> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Format("empty dataset file".into()))?;
    let header = header.strip_prefix('#').ok_or_else(|| Error::Format("missing dataset header".into()))?;
    let (mut d, mut k, mut generator, mut seed) = (None, None, None, None);
    for field in header.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| Error::Format(format!("bad header field `{field}`")))?;
        let bad = || Error::Format(format!("bad header value `{field}`"));
        match key {
            "d" => d = Some(value.parse::<usize>().map_err(|_| bad())?),
            "K" => k = Some(value.parse::<usize>().map_err(|_| bad())?),
            "generator" => generator = Some(value.to_string()),
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad())?),
            _ => return Err(Error::Format(format!("unknown header key `{key}`"))),
        }
    }
    let missing = |name| Error::Format(format!("dataset header lacks `{name}`"));
    let (d, k) = (d.ok_or_else(|| missing("d"))?, k.ok_or_else(|| missing("K"))?);
    let provenance = Provenance {
        generator: generator.ok_or_else(|| missing("generator"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
        details: String::new(),
    };
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Format(format!("line {}: {what}", i + 1));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(bad(&format!("expected {} fields, found {}", d + 1, fields.len())));
        }
        let x = fields[..d].iter().map(|f| f.trim().parse::<f64>().map_err(|_| bad(&format!("bad number `{f}`")))).collect::<Result<Vec<_>>>()?;
        features.push(x);
        labels.push(fields[d].trim().parse::<usize>().map_err(|_| bad("bad label"))?);
    }
    LabeledSet::new(features, labels, k, provenance)
}
