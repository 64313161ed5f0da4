//! Acceptance suite: one PASS/FAIL line per criterion, exit status nonzero on any failure.

use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use tta_core::boost::{binary_alpha, epsilon_floor, gamma_bound, normalizer, BoostEnsemble, EnsembleKind, Termination};
use tta_core::channels::{apply_channel, completeness, kraus_ops, NoiseSpec};
use tta_core::circuit::{apply_circuit, dense_unitary, param_shift_grad, Ansatz, Observable, ParamVector};
use tta_core::experiment::{compare_early_stopping, parse_config, run_repeats, Encoded, ExperimentConfig, RunArtifacts, TrainedModel};
use tta_core::learn::{cross_entropy_loss, hinge_loss, Head, Model};
use tta_core::qcore::{trace_distance, CMatrix, DensityMatrix, StateVector};
use tta_core::seed::{rng, Rng as SeedRng};
use tta_core::tree::{
    build_tree, classifier_counts, group_mean, max_binary_split_brute, max_binary_split_greedy, pairwise_distances, reduce, ClassMean,
    Reduction, TraceTree,
};
use tta_core::datasets::{gen_synthetic, SyntheticSpec};
use tta_core::encode::{encode_all, AngleGate, AngleLayout, EncodingSpec};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_pure(n: usize, r: &mut SeedRng) -> StateVector {
    let v: Vec<C64> = (0..1 << n).map(|_| C64::new(r.sample(StandardNormal), r.sample(StandardNormal))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::new(v.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn random_density(n: usize, r: &mut SeedRng) -> DensityMatrix {
    let d = 1 << n;
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(r.sample(StandardNormal), r.sample(StandardNormal)));
    let m = a.matmul(&a.adjoint()).unwrap();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(C64::new(1.0 / tr, 0.0))).unwrap()
}

fn criterion_1() -> Outcome {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let specs = [
            NoiseSpec::Gad { gamma: r.gen(), p: r.gen() },
            NoiseSpec::Depolarizing { p: r.gen() },
            NoiseSpec::Reset { p: r.gen() },
        ];
        for s in specs {
            let c = completeness(&kraus_ops(&s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            worst = worst.max(c.max_abs_diff(&CMatrix::identity(2)));
        }
    }
    ensure(worst <= 1e-12, || format!("completeness deviation {worst:e}"))?;
    let half = CMatrix::identity(2).scale(C64::new(0.5, 0.0));
    let mut dep: f64 = 0.0;
    for _ in 0..10 {
        let rho = random_pure(1, &mut r).density();
        let out = apply_channel(&rho, &NoiseSpec::Depolarizing { p: 1.0 }, 0).map_err(|e| e.to_string())?;
        dep = dep.max(out.matrix().max_abs_diff(&half));
    }
    ensure(dep <= 1e-12, || format!("depolarizing p=1 deviation {dep:e}"))?;
    Ok(format!("max |ΣE†E−I| {worst:.1e}, max |ε(ρ)−I/2| {dep:.1e}"))
}

fn conj(u: &CMatrix, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new(u.matmul(rho.matrix()).unwrap().matmul(&u.adjoint()).unwrap()).unwrap()
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let td = |a: &DensityMatrix, b: &DensityMatrix| trace_distance(a, b).unwrap();
    let (mut self_d, mut orth, mut tri, mut unit): (f64, f64, f64, f64) = (0.0, 0.0, f64::INFINITY, 0.0);
    for i in 0..200 {
        let n = 1 + i % 3;
        let (a, b, c) = (random_density(n, &mut r), random_density(n, &mut r), random_density(n, &mut r));
        ensure(td(&a, &b) == td(&b, &a), || format!("asymmetric on triple {i}"))?;
        self_d = self_d.max(td(&a, &a));
        tri = tri.min(td(&a, &b) + td(&b, &c) - td(&a, &c));
        let ansatz = Ansatz::new(n, 2).unwrap();
        let theta = ansatz.random_params(&mut r);
        let u = dense_unitary(&ansatz, &theta).unwrap();
        unit = unit.max((td(&conj(&u, &a), &conj(&u, &b)) - td(&a, &b)).abs());
        let p0 = apply_circuit(&StateVector::basis(n, 0), &ansatz, &theta).unwrap();
        let p1 = apply_circuit(&StateVector::basis(n, (1 << n) - 1), &ansatz, &theta).unwrap();
        orth = orth.max((td(&p0.density(), &p1.density()) - 1.0).abs());
    }
    ensure(self_d <= 1e-12, || format!("td(ρ,ρ) = {self_d:e}"))?;
    ensure(orth <= 1e-10, || format!("orthogonal pure states deviate by {orth:e}"))?;
    ensure(tri >= -1e-9, || format!("triangle inequality violated by {tri:e}"))?;
    ensure(unit <= 1e-9, || format!("unitary invariance deviation {unit:e}"))?;
    Ok(format!("td(ρ,ρ)≤{self_d:.1e}, orth dev {orth:.1e}, triangle slack ≥{tri:.1e}, unitary dev {unit:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let ansatz = Ansatz::new(3, 3).unwrap();
    let delta = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let theta = ansatz.random_params(&mut r);
        let states: Vec<StateVector> = (0..6).map(|_| random_pure(3, &mut r)).collect();
        let refs: Vec<&StateVector> = states.iter().collect();
        let weights: Vec<f64> = (0..6).map(|_| r.gen_range(0.05..1.0)).collect();
        let y: Vec<i8> = (0..6).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let labels: Vec<usize> = (0..6).map(|i| i % 4).collect();
        let binary = Model::new(ansatz, NoiseSpec::None, Head::Binary).unwrap();
        let multi = Model::new(ansatz, NoiseSpec::None, Head::MultiClass { n_classes: 4 }).unwrap();

        let mut shift_hinge = vec![0.0; theta.len()];
        let ops = binary.heisenberg(&theta).unwrap();
        for ((s, &yi), &w) in states.iter().zip(&y).zip(&weights) {
            let h = tta_core::circuit::expectation_operator(s, &ops[0]).unwrap();
            if 1.0 - yi as f64 * h > 0.0 {
                let g = param_shift_grad(s, &ansatz, &theta, &Observable::Z { qubit: 0 }).unwrap();
                shift_hinge.iter_mut().zip(g).for_each(|(a, gi)| *a -= w * yi as f64 * gi);
            }
        }
        let mut shift_ce = vec![0.0; theta.len()];
        for ((s, &l), &w) in states.iter().zip(&labels).zip(&weights) {
            let h: Vec<f64> = (0..4).map(|k| tta_core::circuit::expectation(&apply_circuit(s, &ansatz, &theta).unwrap(), &Observable::Projector { index: k }).unwrap()).collect();
            let z: f64 = h.iter().map(|v| v.exp()).sum();
            for k in 0..4 {
                let coef = w * (h[k].exp() / z - if k == l { 1.0 } else { 0.0 });
                let g = param_shift_grad(s, &ansatz, &theta, &Observable::Projector { index: k }).unwrap();
                shift_ce.iter_mut().zip(g).for_each(|(a, gi)| *a += coef * gi);
            }
        }
        for j in 0..theta.len() {
            let at = |d: f64| {
                let mut v = theta.values().to_vec();
                v[j] += d;
                ParamVector::new(v).unwrap()
            };
            let fd_h = (hinge_loss(&binary, &at(delta), &refs, &y, &weights).unwrap().0 - hinge_loss(&binary, &at(-delta), &refs, &y, &weights).unwrap().0) / (2.0 * delta);
            let fd_c = (cross_entropy_loss(&multi, &at(delta), &refs, &labels, &weights).unwrap().0
                - cross_entropy_loss(&multi, &at(-delta), &refs, &labels, &weights).unwrap().0)
                / (2.0 * delta);
            worst = worst.max((fd_h - shift_hinge[j]).abs()).max((fd_c - shift_ce[j]).abs());
        }
        let lib_h = hinge_loss(&binary, &theta, &refs, &y, &weights).unwrap().1;
        let lib_c = cross_entropy_loss(&multi, &theta, &refs, &labels, &weights).unwrap().1;
        for j in 0..theta.len() {
            ensure((lib_h[j] - shift_hinge[j]).abs() <= 1e-9 && (lib_c[j] - shift_ce[j]).abs() <= 1e-9, || {
                format!("library gradient disagrees with parameter shift at {j}")
            })?;
        }
    }
    ensure(worst <= 1e-6, || format!("max |shift − FD| {worst:e}"))?;
    Ok(format!("max |shift − FD| {worst:.1e} over 20 circuits, hinge and cross-entropy"))
}

/// Replays the boosting weights of one binary ensemble and checks the AdaBoost guarantees.
fn check_ensemble(ens: &BoostEnsemble, states: &[&StateVector], y: &[i8]) -> Result<usize, String> {
    ensure(ens.kind == EnsembleKind::Binary, || "not a binary ensemble".into())?;
    let m = states.len();
    let mut w = vec![1.0 / m as f64; m];
    let mut eps_hist = Vec::new();
    let mut score = vec![0.0; m];
    let mut checked = 0;
    for (t, member) in ens.members.iter().enumerate() {
        let h: Vec<f64> = states.iter().map(|s| member.classifier.predict_sign(s).unwrap() as f64).collect();
        let wrong: Vec<bool> = h.iter().zip(y).map(|(hi, &yi)| *hi != yi as f64).collect();
        let eps_raw: f64 = w.iter().zip(&wrong).filter(|(_, &x)| x).map(|(wi, _)| wi).sum();
        ensure((eps_raw - member.epsilon).abs() <= 1e-12, || format!("round {}: replayed ε {eps_raw} vs logged {}", t + 1, member.epsilon))?;
        eps_hist.push(eps_raw);
        let gamma = gamma_bound(&eps_hist);
        let direct = (-2.0 * eps_hist.iter().map(|e| (0.5 - e) * (0.5 - e)).sum::<f64>()).exp();
        ensure((ens.gammas[t] - direct).abs() <= 1e-12 && (gamma - direct).abs() <= 1e-12, || format!("round {}: γ mismatch", t + 1))?;
        let eps = eps_raw.max(epsilon_floor(m));
        let alpha = binary_alpha(eps);
        let z = normalizer(eps);
        for i in 0..m {
            w[i] *= (-alpha * y[i] as f64 * h[i]).exp() / z;
            score[i] += member.alpha * h[i];
        }
        if eps == eps_raw {
            let s: f64 = w.iter().zip(&wrong).filter(|(_, &x)| x).map(|(wi, _)| wi).sum();
            ensure((s - 0.5).abs() <= 1e-10, || format!("round {}: Σ w_(t+1)·1[wrong] = {s}", t + 1))?;
            checked += 1;
        } else {
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
        }
        let err = score.iter().zip(y).filter(|(s, &yi)| (if **s >= 0.0 { 1 } else { -1 }) != yi).count() as f64 / m as f64;
        ensure(err <= gamma, || format!("round {}: prefix train error {err} > γ {gamma}", t + 1))?;
    }
    ensure(ens.gammas.windows(2).all(|g| g[1] <= g[0]), || "γ not non-increasing".into())?;
    Ok(checked)
}

fn check_run(model: &TrainedModel, train: &Encoded) -> Result<(usize, usize), String> {
    let TrainedModel::Tta { tree } = model else { return Err("expected a TTA model".into()) };
    let (mut ensembles, mut rounds) = (0, 0);
    for (node, ens) in tree.nodes.iter().zip(&tree.ensembles) {
        let Some(ens) = ens else { return Err(format!("node {} untrained", node.id)) };
        let (idx, y) = tree.node_task(node.id, &train.labels).map_err(|e| e.to_string())?;
        let states: Vec<&StateVector> = idx.iter().map(|&i| &train.states[i]).collect();
        rounds += check_ensemble(ens, &states, &y).map_err(|e| format!("node {}: {e}", node.id))?;
        ensembles += 1;
    }
    Ok((ensembles, rounds))
}

fn synthetic_config(noise: &str, layers: usize, repeats: usize) -> ExperimentConfig {
    parse_config(&format!(
        r#"{{
            "dataset": {{"source": {{"kind": "synthetic", "dim": 4, "n_classes": 3, "per_class_train": 200, "per_class_test": 100}}, "seed": 0}},
            "encoding": {{"kind": "angle", "layout": {{"fixed": "ry"}}}},
            "ansatz": {{"n_qubits": 4, "layers": {layers}}},
            "boost": {{"max_rounds": 100, "tolerance": 0.005}},
            "method": "tta",
            "noise": {noise},
            "repeats": {repeats},
            "seed": 0
        }}"#
    ))
    .unwrap()
}

struct Study {
    name: &'static str,
    train: Encoded,
    runs: Vec<RunArtifacts>,
}

fn study(name: &'static str, cfg: &ExperimentConfig) -> Result<Study, String> {
    let (train, _, runs) = run_repeats(cfg).map_err(|e| format!("{name}: {e}"))?;
    Ok(Study { name, train, runs })
}

fn accuracies(s: &Study) -> String {
    s.runs.iter().map(|r| format!("{:.4}/{:.4}", r.metrics.train_accuracy, r.metrics.test_accuracy)).collect::<Vec<_>>().join(" ")
}

fn criterion_5(s: &Result<Study, String>) -> Outcome {
    let s = s.as_ref()?;
    for r in &s.runs {
        ensure(r.metrics.train_accuracy == 1.0, || format!("repeat {} train {:.4}", r.metrics.repeat, r.metrics.train_accuracy))?;
        ensure(r.metrics.test_accuracy >= 0.99, || format!("repeat {} test {:.4}", r.metrics.repeat, r.metrics.test_accuracy))?;
    }
    Ok(format!("train/test per repeat {}", accuracies(s)))
}

fn criterion_6(s: &Result<Study, String>) -> Outcome {
    let s = s.as_ref()?;
    for r in &s.runs {
        let TrainedModel::Tta { tree } = &r.model else { return Err("expected a TTA model".into()) };
        ensure(tree.nodes.len() == 2, || format!("tree has {} internal nodes", tree.nodes.len()))?;
        ensure(r.metrics.train_accuracy == 1.0, || format!("train {:.4}", r.metrics.train_accuracy))?;
        ensure(r.metrics.test_accuracy >= 0.97, || format!("test {:.4}", r.metrics.test_accuracy))?;
    }
    Ok(format!("train/test {}, 2 internal nodes", accuracies(s)))
}

fn criterion_7(dep: &Result<Study, String>, reset: &Result<Study, String>, gad: &Result<Study, String>, gad10: &Result<Study, String>) -> Outcome {
    let mut notes = Vec::new();
    for s in [dep, reset] {
        let s = s.as_ref()?;
        for r in &s.runs {
            ensure(r.metrics.test_accuracy >= 0.95, || format!("{} repeat {} test {:.4}", s.name, r.metrics.repeat, r.metrics.test_accuracy))?;
        }
        notes.push(format!("{} {}", s.name, accuracies(s)));
    }
    let gad = gad.as_ref()?;
    let mut weak = 0;
    for r in &gad.runs {
        let TrainedModel::Tta { tree } = &r.model else { return Err("expected a TTA model".into()) };
        for (unit, ens) in r.metrics.units.iter().zip(&tree.ensembles) {
            let ens = ens.as_ref().ok_or("untrained node")?;
            if ens.termination == Termination::WeakFail {
                weak += 1;
                let last = ens.rounds.last().ok_or("WeakFail without a round log")?;
                ensure(!last.accepted && last.epsilon >= 0.5, || format!("node {} WeakFail round not logged", unit.id))?;
                ensure(unit.termination == Some(Termination::WeakFail), || "WeakFail missing from metrics".into())?;
            }
        }
    }
    notes.push(format!("{} {} ({weak} WeakFail nodes logged)", gad.name, accuracies(gad)));
    let gad10 = gad10.as_ref()?;
    for r in &gad10.runs {
        ensure(r.metrics.train_accuracy == 1.0, || format!("GAD L=10 repeat {} train {:.4}", r.metrics.repeat, r.metrics.train_accuracy))?;
    }
    notes.push(format!("{} {}", gad10.name, accuracies(gad10)));
    Ok(notes.join("; "))
}

fn criterion_4(studies: &[&Result<Study, String>]) -> Outcome {
    let (mut ensembles, mut rounds) = (0, 0);
    for s in studies {
        let s = s.as_ref()?;
        for r in &s.runs {
            let (e, k) = check_run(&r.model, &s.train).map_err(|e| format!("{} repeat {}: {e}", s.name, r.metrics.repeat))?;
            ensembles += e;
            rounds += k;
        }
    }
    Ok(format!("{ensembles} ensembles replayed, reweighting identity checked on {rounds} unclamped rounds"))
}

fn criterion_8() -> Outcome {
    for k in 3..=10 {
        let (train, _) = gen_synthetic(&SyntheticSpec { dim: 4, n_classes: k, per_class_train: 4, per_class_test: 1 }, k as u64).map_err(|e| e.to_string())?;
        let enc = EncodingSpec::Angle { layout: AngleLayout::Fixed(AngleGate::Ry) };
        let states = encode_all(train.features(), &enc, 4).map_err(|e| e.to_string())?;
        let tree: TraceTree = build_tree(&states, train.labels(), k, Default::default()).map_err(|e| e.to_string())?;
        let counts = (tree.nodes.len(), reduce(Reduction::Ovr, k).len(), reduce(Reduction::Ovo, k).len());
        ensure(counts == (k - 1, k, k * (k - 1) / 2), || format!("K={k}: counts {counts:?}"))?;
        let (a, b, c, _) = classifier_counts(k);
        ensure((a, b, c) == counts, || format!("K={k}: table {:?} vs built {counts:?}", (a, b, c)))?;
    }
    Ok("K=3..10 give K−1 / K / K(K−1)/2 members".into())
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut cases = 0;
    for trial in 0..60 {
        let k = 3 + trial % 4;
        let n = 1 + trial % 2;
        let means: Vec<ClassMean> = (0..k).map(|c| ClassMean { class: c, mean: random_density(n, &mut r), count: r.gen_range(1..20) }).collect();
        let (_, best) = max_binary_split_brute(&means).map_err(|e| e.to_string())?;
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != k / 2 {
                continue;
            }
            let minus: Vec<&ClassMean> = means.iter().filter(|m| mask >> m.class & 1 == 1).collect();
            let plus: Vec<&ClassMean> = means.iter().filter(|m| mask >> m.class & 1 == 0).collect();
            let d = trace_distance(&group_mean(&minus).unwrap(), &group_mean(&plus).unwrap()).unwrap();
            ensure(best >= d - 1e-12, || format!("K={k}: brute {best} < enumerated {d}"))?;
        }
        let dist = pairwise_distances(&means).map_err(|e| e.to_string())?;
        let (mut pi, mut pj, mut pd) = (0, 1, f64::NEG_INFINITY);
        for i in 0..k {
            for j in i + 1..k {
                if dist[i][j] > pd {
                    (pi, pj, pd) = (i, j, dist[i][j]);
                }
            }
        }
        let (g, _) = max_binary_split_greedy(&means).map_err(|e| e.to_string())?;
        ensure(g.minus.contains(&pi) && g.plus.contains(&pj), || format!("K={k}: greedy seeds not the farthest pair ({pi},{pj})"))?;
        cases += 1;
    }
    Ok(format!("{cases} collections with K=3..6"))
}

fn criterion_10() -> Outcome {
    let cfg = parse_config(
        r#"{
            "dataset": {"source": {"kind": "synthetic", "dim": 4, "n_classes": 2, "per_class_train": 200, "per_class_test": 100}, "seed": 0},
            "encoding": {"kind": "angle", "layout": {"fixed": "ry"}},
            "ansatz": {"n_qubits": 4, "layers": 20},
            "method": "tta",
            "seed": 0
        }"#,
    )
    .unwrap();
    let rep = compare_early_stopping(&cfg).map_err(|e| e.to_string())?;
    let (a, b) = (&rep.with, &rep.without);
    ensure(a.total_epochs < b.total_epochs, || format!("epochs with {} ≥ without {}", a.total_epochs, b.total_epochs))?;
    ensure((a.train_accuracy - b.train_accuracy).abs() <= 0.01, || format!("train {:.4} vs {:.4}", a.train_accuracy, b.train_accuracy))?;
    ensure((a.test_accuracy - b.test_accuracy).abs() <= 0.01, || format!("test {:.4} vs {:.4}", a.test_accuracy, b.test_accuracy))?;
    Ok(format!(
        "epochs {} vs {} ({} vs {} members), train {:.4}/{:.4}, test {:.4}/{:.4}",
        a.total_epochs, b.total_epochs, a.members, b.members, a.train_accuracy, b.train_accuracy, a.test_accuracy, b.test_accuracy
    ))
}

fn report(id: usize, title: &str, start: Instant, outcome: Outcome) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("PASS criterion {id:>2} {title} [{secs:.1}s]: {detail}");
            true
        }
        Err(why) => {
            println!("FAIL criterion {id:>2} {title} [{secs:.1}s]: {why}");
            false
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Instant) {
    let start = Instant::now();
    (f(), start)
}

fn main() {
    let mut ok = true;
    let (o, t) = timed(criterion_1);
    ok &= report(1, "CPTP channels", t, o);
    let (o, t) = timed(criterion_2);
    ok &= report(2, "trace-distance metric", t, o);
    let (o, t) = timed(criterion_3);
    ok &= report(3, "gradients vs finite differences", t, o);

    let (c5, t5) = timed(|| study("synthetic", &synthetic_config(r#"{"kind": "none"}"#, 20, 3)));
    ok &= report(5, "synthetic TTA", t5, criterion_5(&c5));

    let annni = parse_config(
        r#"{
            "dataset": {"source": {"kind": "annni", "n_qubits": 6, "per_class_train": 200, "per_class_test": 100}, "seed": 0},
            "encoding": {"kind": "raw_state"},
            "ansatz": {"n_qubits": 6, "layers": 20},
            "boost": {"max_rounds": 100, "tolerance": 0.005},
            "method": "tta",
            "seed": 0
        }"#,
    )
    .unwrap();
    let (c6, t6) = timed(|| study("annni", &annni));
    ok &= report(6, "ANNNI TTA", t6, criterion_6(&c6));

    let t7 = Instant::now();
    let dep = study("depolarizing(0.1)", &synthetic_config(r#"{"kind": "depolarizing", "p": 0.1}"#, 20, 3));
    let reset = study("reset(0.05)", &synthetic_config(r#"{"kind": "reset", "p": 0.05}"#, 20, 3));
    let gad = study("gad(0.05,0.05) L=20", &synthetic_config(r#"{"kind": "gad", "gamma": 0.05, "p": 0.05}"#, 20, 3));
    let gad10 = study("gad(0.05,0.05) L=10", &synthetic_config(r#"{"kind": "gad", "gamma": 0.05, "p": 0.05}"#, 10, 3));
    ok &= report(7, "noise robustness", t7, criterion_7(&dep, &reset, &gad, &gad10));

    let t4 = Instant::now();
    ok &= report(4, "AdaBoost guarantees on criteria 5-7", t4, criterion_4(&[&c5, &c6, &dep, &reset, &gad, &gad10]));

    let (o, t) = timed(criterion_8);
    ok &= report(8, "classifier-count scaling", t, o);
    let (o, t) = timed(criterion_9);
    ok &= report(9, "brute-split optimality", t, o);
    let (o, t) = timed(criterion_10);
    ok &= report(10, "early-stopping study", t, o);

    if !ok {
        std::process::exit(1);
    }
}
