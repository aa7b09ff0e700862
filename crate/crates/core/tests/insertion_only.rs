use feww::error::Error;
use feww::insertion_only::{reservoir_size, run_insertion_only, InsertionOnly, InsertionOnlyConfig};
use feww::instances::gen_planted_star;
use feww::model::{verify_witness, Dims, StreamUpdate};
use feww::seed;
use feww::stream::{Stream, StreamMode};

#[test]
fn reservoir_sizes() {
    assert_eq!(reservoir_size(256, 2), 89);
    assert_eq!(reservoir_size(256, 4), 23);
    assert_eq!(InsertionOnlyConfig::new(256, 64, 4, 0).unwrap().reservoir_size(), 23);
}

#[test]
fn thresholds_per_run() {
    let cfg = InsertionOnlyConfig::new(256, 64, 4, 0).unwrap();
    assert_eq!(cfg.d2(), 16);
    let d1: Vec<u32> = (0..4).map(|i| cfg.d1(i)).collect();
    assert_eq!(d1, vec![1, 16, 32, 48]);
    assert_eq!(cfg.edge_bound(), 4 * 23 * 16);
}

#[test]
fn alpha_range() {
    // n = 256: alpha may go up to log2(256) + 1 = 9.
    assert!(InsertionOnlyConfig::new(256, 64, 9, 0).is_ok());
    assert!(matches!(InsertionOnlyConfig::new(256, 64, 10, 0), Err(Error::InvalidParameter(_))));
    assert!(InsertionOnlyConfig::new(256, 64, 0, 0).is_err());
    assert!(InsertionOnlyConfig::new(0, 64, 1, 0).is_err());
    assert!(InsertionOnlyConfig::new(256, 0, 1, 0).is_err());
}

#[test]
fn planted_star_is_found() {
    let inst = gen_planted_star(256, 64, 64, 3, 17).unwrap();
    let cfg = InsertionOnlyConfig::new(256, 64, 4, 99).unwrap();
    let out = run_insertion_only(cfg, &inst.stream).unwrap();
    let nb = out.result.expect("planted star not found");
    assert_eq!(nb.center(), inst.center);
    assert!(nb.size() >= 16);
    let g = inst.stream.replay().unwrap();
    assert!(verify_witness(&g, &nb, 16));
    assert!(out.space.stored_edges <= cfg.edge_bound());
    assert_eq!(out.space.degree_entries, 256);
    assert_eq!(out.space.counters, 4);
}

#[test]
fn empty_stream_fails() {
    let stream = Stream::new(Dims::new(8, 8).unwrap(), StreamMode::InsertionOnly);
    let cfg = InsertionOnlyConfig::new(8, 4, 2, 0).unwrap();
    assert_eq!(run_insertion_only(cfg, &stream).unwrap().result, None);
}

#[test]
fn deletions_are_rejected() {
    let mut alg = InsertionOnly::new(InsertionOnlyConfig::new(8, 4, 2, 0).unwrap()).unwrap();
    assert_eq!(alg.process_update(&StreamUpdate::delete(1, 1)), Err(Error::DeletionUnsupported));
}

#[test]
fn mismatched_stream_is_rejected() {
    let stream = Stream::new(Dims::new(9, 8).unwrap(), StreamMode::InsertionOnly);
    let cfg = InsertionOnlyConfig::new(8, 4, 2, 0).unwrap();
    assert!(run_insertion_only(cfg, &stream).is_err());
}

#[test]
fn same_seed_same_output() {
    let inst = gen_planted_star(100, 40, 20, 5, 3).unwrap();
    let cfg = InsertionOnlyConfig::new(100, 20, 3, 8).unwrap();
    let a = run_insertion_only(cfg, &inst.stream).unwrap();
    let b = run_insertion_only(cfg, &inst.stream).unwrap();
    assert_eq!(a, b);
}

#[test]
fn alpha_one_keeps_every_vertex() {
    // One run with d1 = 1 and s = ceil(n ln n) >= n never evicts.
    let inst = gen_planted_star(30, 30, 10, 4, 1).unwrap();
    let cfg = InsertionOnlyConfig::new(30, 10, 1, 2).unwrap();
    let out = run_insertion_only(cfg, &inst.stream).unwrap();
    let nb = out.result.unwrap();
    assert_eq!(nb.center(), inst.center);
    assert_eq!(nb.size(), 10);
}

#[test]
fn failure_rate_on_small_instances() {
    let n = 64u32;
    let trials = 300usize.max(10 * n as usize);
    let mut failures = 0;
    for t in 0..trials as u64 {
        let inst = gen_planted_star(n, 32, 32, 7, seed::derive(1, t)).unwrap();
        let cfg = InsertionOnlyConfig::new(n, 32, 4, seed::derive(2, t)).unwrap();
        let g = inst.stream.replay().unwrap();
        match run_insertion_only(cfg, &inst.stream).unwrap().result {
            Some(nb) => assert!(verify_witness(&g, &nb, 8)),
            None => failures += 1,
        }
    }
    let rate = failures as f64 / trials as f64;
    assert!(rate <= 1.0 / f64::from(n) + 0.03, "failure rate {rate}");
}
