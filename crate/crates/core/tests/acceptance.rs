//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.
//!
//! Built with `harness = false` so the report is always shown.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;

use feww::deg_res::ReservoirState;
use feww::harness::{run_trial, AlgorithmKind, ExperimentConfig, GeneratorKind};
use feww::insertion_deletion::{validate_sampling_lemma, InsDelConfig};
use feww::insertion_only::InsertionOnlyConfig;
use feww::instances::{
    assemble_z, bits_to_string, decode_bvl_witnesses, gen_amri_stream, gen_bvl_graph, gen_set_disjointness,
    gen_star_graph, AmriInstance, BvlInstance,
};
use feww::l0::{L0Sample, L0Sketch};
use feww::model::{Edge, Neighbourhood};
use feww::seed;
use feww::star::{run_star_detection, semi_streaming_preset, StarConfig};
use feww::stream::{Stream, StreamMode};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

/// Reservoir success on 100 vertices reaching d1, 10 of which reach
/// d1 + d2 - 1, with s = 30.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (d1, d2, s) = (3u32, 4u32, 30usize);
    let trials = 10_000u64;
    let mut order: Vec<Edge> = Vec::new();
    for a in 1..=100u32 {
        let degree = if a <= 10 { d1 + d2 - 1 } else { d1 };
        order.extend((1..=degree).map(|b| Edge::new(a, b)));
    }
    let mut shuffle_rng = seed::rng(0xA11CE);
    order.shuffle(&mut shuffle_rng);
    let mut successes = 0u64;
    for t in 0..trials {
        let mut state = ReservoirState::new(d1, d2, s, seed::derive(1, t)).expect("valid parameters");
        let mut degree = vec![0u32; 101];
        for &e in &order {
            degree[e.a as usize] += 1;
            state.observe(e, degree[e.a as usize]);
        }
        if state.finalize().is_some() {
            successes += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    let bound = 1.0 - (1.0 - 30.0f64 / 100.0).powi(10);
    let elapsed = start.elapsed();
    outcome(
        rate >= bound - 0.01 && within(elapsed, 30),
        format!(
            "success {rate:.4} >= {:.4} over {trials} trials in {:.1}s",
            bound - 0.01,
            elapsed.as_secs_f64()
        ),
    )
}

/// Planted star, n=256, m=1024, d=64, alpha in {2, 4}, 300 trials each.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [2u32, 4] {
        let mut cfg = ExperimentConfig::new(GeneratorKind::Planted, AlgorithmKind::InsertionOnly, 256, 1024, 64, alpha);
        cfg.background = 8;
        cfg.trials = 300;
        cfg.seed = 0x5EED + u64::from(alpha);
        let bound = InsertionOnlyConfig::new(256, 64, alpha, 0).expect("valid").edge_bound();
        let threshold = 64usize.div_ceil(alpha as usize);
        let mut successes = 0;
        for t in 0..cfg.trials {
            let r = match run_trial(&cfg, t) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("alpha={alpha} trial {t}: {e}")),
            };
            if r.succeeded {
                successes += 1;
                pass &= r.sound && r.witness_count >= threshold;
            }
            pass &= r.stored_edges <= bound;
        }
        let rate = successes as f64 / cfg.trials as f64;
        pass &= rate >= 1.0 - 1.0 / 256.0 - 0.03;
        parts.push(format!("alpha={alpha} success {rate:.4} edge bound {bound}"));
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, 60);
    outcome(pass, format!("{} in {:.1}s", parts.join(", "), elapsed.as_secs_f64()))
}

/// 40 candidates, s = 10, 10^5 seeds: inclusion frequencies within 3 sigma
/// of 1/4.
fn criterion_3() -> Outcome {
    let seeds = 100_000u64;
    let mut hits = [0u64; 41];
    for t in 0..seeds {
        let mut state = ReservoirState::new(1, 1, 10, seed::derive(3, t)).expect("valid parameters");
        for a in 1..=40 {
            state.observe(Edge::new(a, 1), 1);
        }
        for a in state.reservoir() {
            hits[a as usize] += 1;
        }
    }
    let p = 0.25;
    let sigma = (p * (1.0 - p) / seeds as f64).sqrt();
    let worst = hits[1..]
        .iter()
        .map(|&h| (h as f64 / seeds as f64 - p).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 3.0 * sigma,
        format!("max |freq - 0.25| = {worst:.5} <= {:.5}", 3.0 * sigma),
    )
}

/// l0: support-16 uniformity, no hallucinations, exact cancellation.
fn criterion_4() -> Outcome {
    let dim = 1000;
    let support: Vec<u64> = (0..16).map(|i| 7 + 61 * i).collect();
    let draws = 10_000u64;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut hallucinated = 0;
    let mut failures = 0;
    for t in 0..draws {
        let mut sk = L0Sketch::new(dim, 1e-6, seed::derive(4, t)).expect("valid sketch");
        for &c in &support {
            sk.update(c, 1).expect("in range");
        }
        match sk.sample() {
            L0Sample::Coordinate(c) if support.contains(&c) => *counts.entry(c).or_default() += 1,
            L0Sample::Coordinate(_) | L0Sample::Empty => hallucinated += 1,
            L0Sample::Fail => failures += 1,
        }
    }
    let returned: u64 = counts.values().sum();
    let tv = 0.5
        * support
            .iter()
            .map(|c| (*counts.get(c).unwrap_or(&0) as f64 / returned as f64 - 1.0 / 16.0).abs())
            .sum::<f64>();

    let mut cancelled = true;
    for t in 0..100u64 {
        let mut sk = L0Sketch::new(dim, 1e-6, seed::derive(44, t)).expect("valid sketch");
        let empty = sk.clone();
        let coords: Vec<u64> = (0..20).map(|i| (t * 13 + i * 47) % dim).collect();
        for &c in &coords {
            sk.update(c, 1).expect("in range");
        }
        for &c in coords.iter().rev() {
            sk.update(c, -1).expect("in range");
        }
        cancelled &= sk == empty && sk.is_zero();
    }
    outcome(
        tv <= 0.05 && hallucinated == 0 && cancelled,
        format!("TV {tv:.4} <= 0.05, hallucinated {hallucinated}, sketch failures {failures}, cancellation exact: {cancelled}"),
    )
}

/// Insertion-deletion algorithm in the dense and sparse regimes.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (n, m, d, alpha) = (100u32, 64u32, 32u32, 4u32);
    let expected = InsDelConfig::with_delta(n, m, d, alpha, 0, 1e-6)
        .and_then(|c| c.expected_cells())
        .expect("valid config");
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, generator) in [("dense", GeneratorKind::Layered), ("sparse", GeneratorKind::Sparse)] {
        let mut cfg = ExperimentConfig::new(generator, AlgorithmKind::InsertionDeletion, n, m, d, alpha);
        cfg.delta = Some(1e-6);
        cfg.trials = 200;
        cfg.seed = 0xD5 + generator as u64;
        cfg.churn = 8;
        if generator == GeneratorKind::Layered {
            // n/x = 4 vertices at degree d/alpha are needed; plant 6.
            cfg.heavy = 6;
            cfg.heavy_degree = d / alpha;
        }
        let mut failures = 0;
        for t in 0..cfg.trials {
            let r = match run_trial(&cfg, t) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("{name} trial {t}: {e}")),
            };
            if !r.succeeded {
                failures += 1;
            }
            pass &= r.sound && r.sketch_cells == expected;
        }
        let rate = failures as f64 / cfg.trials as f64;
        pass &= rate <= 0.05;
        parts.push(format!("{name} failure {rate:.3}"));
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, 300);
    outcome(
        pass,
        format!("{}, cells {expected} per trial, {:.1}s", parts.join(", "), elapsed.as_secs_f64()),
    )
}

fn criterion_6() -> Outcome {
    match validate_sampling_lemma(1000, 100, 50, 4, 10_000, 6) {
        Ok(rate) => outcome(rate >= 0.989, format!("success {rate:.4} >= 0.989")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn example_bvl() -> BvlInstance {
    let bits = |s: &str| s.chars().map(|c| c == '1').collect::<Vec<bool>>();
    let y1 = [(1, "10010"), (2, "01000"), (3, "01011"), (4, "01111")];
    let y2 = [(1, "11011"), (4, "01010")];
    let y3 = [(4, "00011")];
    let table = |rows: &[(u32, &str)]| rows.iter().map(|&(j, s)| (j, bits(s))).collect();
    BvlInstance::from_parts(
        3,
        4,
        5,
        vec![vec![1, 2, 3, 4], vec![1, 4], vec![4]],
        vec![table(&y1), table(&y2), table(&y3)],
    )
    .expect("example instance is valid")
}

/// Structural checks on the three reductions.
fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    for seed in 0..50u64 {
        for intersecting in [false, true] {
            let (p, k) = (3, 4);
            let inst = gen_set_disjointness(p, k, 61, intersecting, seed).expect("valid");
            let g = inst.concatenated().and_then(|s| s.replay()).expect("legal stream");
            let want = if intersecting { k * p } else { k };
            pass &= g.max_degree() == want as usize;
        }
    }
    notes.push(format!("setdisj ok: {pass}"));

    let inst = example_bvl();
    let mut stream = Stream::new(inst.dims().expect("dims"), StreamMode::InsertionOnly);
    for party in gen_bvl_graph(&inst).expect("graph") {
        stream.extend_from(&party).expect("same dims");
    }
    let g = stream.replay().expect("legal stream");
    let mut bvl_ok = true;
    for (j, want) in [(2u32, "01000"), (4, "011110101000011")] {
        let nb = Neighbourhood::new(j, g.neighbours(j).expect("vertex").iter().copied());
        let (center, bits) = decode_bvl_witnesses(&nb, 5, 3).expect("columns in range");
        let z: Option<Vec<bool>> = assemble_z(&bits, 5).into_iter().collect();
        let got = z.map(|z| bits_to_string(&z)).unwrap_or_default();
        bvl_ok &= center == j && got == want && bits_to_string(&inst.z(j)) == want;
    }
    pass &= bvl_ok;
    notes.push(format!("bvl example ok: {bvl_ok}"));

    let mut amri_ok = true;
    for seed in 0..50u64 {
        let (n, d, alpha) = (20u32, 12u32, 3u32);
        let inst = AmriInstance::random(n, 2 * d, d / alpha - 1, seed)
            .expect("valid")
            .with_random_permutations(seed + 1000);
        let g = gen_amri_stream(&inst, alpha)
            .and_then(|s| s.stream.replay())
            .expect("legal stream");
        for row in 1..=n {
            let deg = g.degree(row);
            amri_ok &= if row == inst.target() {
                deg >= d as usize
            } else {
                deg < (d / alpha) as usize
            };
        }
    }
    pass &= amri_ok;
    notes.push(format!("amri ok: {amri_ok}"));
    outcome(pass, notes.join(", "))
}

/// K_{1,8} in 16 vertices, eps = 1, alpha = 2; presets.
fn criterion_8() -> Outcome {
    let trials = 200u64;
    let mut good = 0;
    let mut sound = true;
    for t in 0..trials {
        let (graph, hub) = gen_star_graph(16, 8, seed::derive(8, t)).expect("valid");
        let cfg = StarConfig {
            n: 16,
            epsilon: 1.0,
            alpha: 2,
            mode: StreamMode::InsertionOnly,
            seed: seed::derive(88, t),
            delta: None,
        };
        let out = run_star_detection(&cfg, &graph).expect("legal stream");
        if let Some(nb) = out.result {
            let g = graph.replay().expect("legal stream");
            sound &= nb.witnesses().iter().all(|&w| g.contains(nb.center(), w));
            if nb.center() == hub && nb.size() >= 2 {
                good += 1;
            }
        }
    }
    let rate = good as f64 / trials as f64;
    let mut presets = true;
    for n in [2u32, 3, 16, 17, 256, 1000, 1024, 65_536] {
        let ins = semi_streaming_preset(n, StreamMode::InsertionOnly).expect("n >= 2");
        let del = semi_streaming_preset(n, StreamMode::InsertionDeletion).expect("n >= 2");
        let log2 = (f64::from(n)).log2().ceil() as u32;
        let sqrt = (f64::from(n)).sqrt().ceil() as u32;
        presets &= ins.alpha == log2 && del.alpha == sqrt && ins.epsilon == 1.0;
    }
    presets &= semi_streaming_preset(256, StreamMode::InsertionOnly).map(|c| c.alpha).ok() == Some(8);
    presets &= semi_streaming_preset(256, StreamMode::InsertionDeletion).map(|c| c.alpha).ok() == Some(16);
    outcome(
        rate >= 0.95 && sound && presets,
        format!("hub with >= 2 witnesses {rate:.3}, sound {sound}, presets {presets}"),
    )
}

fn run_cli(bin: &str, args: &[&str], dir: &Path) -> Vec<u8> {
    let out = Command::new(bin)
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let mut bytes = out.stdout;
    bytes.extend(out.stderr);
    bytes.extend(format!("exit={:?}", out.status.code()).into_bytes());
    bytes
}

/// Every CLI command twice with the same arguments, outputs and written
/// files compared byte for byte.
fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_feww");
    let runs: Vec<Vec<String>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().expect("temp dir");
            let p = dir.path();
            std::fs::write(
                p.join("exp.cfg"),
                "generator=planted\nalgorithm=ins\nn=64\nm=64\nd=16\nalpha=2\nbackground=3\ntrials=4\nseed=11\n",
            )
            .expect("write config");
            let commands: Vec<Vec<&str>> = vec![
                vec!["gen", "planted", "--n", "40", "--m", "40", "--d", "12", "--background", "2", "--churn", "10", "--seed", "3", "-o", "p.txt"],
                vec!["gen", "planted", "--n", "40", "--m", "40", "--d", "12", "--background", "2", "--seed", "3", "-o", "pi.txt"],
                vec!["gen", "setdisj", "--p", "3", "--k", "2", "--n", "31", "--intersecting", "--seed", "3", "-o", "sd.txt"],
                vec!["gen", "bvl", "--p", "3", "--n", "9", "--k", "4", "--seed", "3", "-o", "b.txt"],
                vec!["gen", "amri", "--n", "10", "--d", "6", "--alpha", "2", "--seed", "3", "-o", "a.txt"],
                vec!["gen", "star", "--n", "16", "--degree", "8", "--seed", "3", "-o", "s.txt"],
                vec!["feww-ins", "--n", "40", "--m", "40", "--d", "12", "--alpha", "2", "--seed", "5", "--stream", "pi.txt"],
                vec!["feww-del", "--n", "40", "--m", "40", "--d", "12", "--alpha", "2", "--seed", "5", "--delta", "1e-3", "--stream", "p.txt"],
                vec!["feww-del", "--n", "10", "--m", "12", "--d", "6", "--alpha", "2", "--seed", "5", "--delta", "1e-3", "--stream", "a.txt"],
                vec!["star", "--n", "16", "--alpha", "2", "--epsilon", "1", "--mode", "ins", "--seed", "5", "--stream", "s.txt"],
                vec!["star", "--n", "16", "--alpha", "4", "--epsilon", "1", "--mode", "insdel", "--seed", "5", "--delta", "1e-2", "--stream", "s.txt"],
                vec!["experiment", "--config", "exp.cfg"],
            ];
            let mut outputs = Vec::new();
            for args in &commands {
                outputs.push(String::from_utf8_lossy(&run_cli(bin, args, p)).into_owned());
            }
            std::fs::write(p.join("r.txt"), &outputs[6]).expect("write result");
            outputs.push(String::from_utf8_lossy(&run_cli(bin, &["verify", "--stream", "pi.txt", "--result", "r.txt"], p)).into_owned());
            for file in ["p.txt", "pi.txt", "sd.txt", "b.txt", "b.txt.truth", "a.txt", "s.txt"] {
                outputs.push(std::fs::read_to_string(p.join(file)).unwrap_or_default());
            }
            outputs
        })
        .collect();
    let failed_commands = runs[0].iter().filter(|o| o.contains("exit=Some(2)")).count();
    let identical = runs[0] == runs[1];
    outcome(
        identical && failed_commands == 0,
        format!("{} outputs identical across runs: {identical}, commands erroring: {failed_commands}", runs[0].len()),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("reservoir success bound", criterion_1),
        ("insertion-only end to end", criterion_2),
        ("reservoir uniformity", criterion_3),
        ("l0 sampler", criterion_4),
        ("insertion-deletion regimes", criterion_5),
        ("sampling lemma", criterion_6),
        ("reduction structure", criterion_7),
        ("star detection", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
