use proptest::prelude::*;

use feww::error::Error;
use feww::l0::{levels_for, repetitions_for, L0Bank, L0Params, L0Sample, L0Sketch};
use feww::seed;

#[test]
fn two_element_support_is_uniform() {
    let trials = 20_000u64;
    let mut three = 0;
    for t in 0..trials {
        let mut sk = L0Sketch::new(1000, 1e-6, seed::derive(3, t)).unwrap();
        sk.update(3, 1).unwrap();
        sk.update(9, 1).unwrap();
        match sk.sample() {
            L0Sample::Coordinate(3) => three += 1,
            L0Sample::Coordinate(9) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
    let rate = three as f64 / trials as f64;
    assert!((rate - 0.5).abs() <= 0.02, "{rate}");
}

#[test]
fn singleton() {
    let mut sk = L0Sketch::new(1000, 1e-3, 4).unwrap();
    sk.update(777, 1).unwrap();
    assert_eq!(sk.sample(), L0Sample::Coordinate(777));
}

#[test]
fn zero_vector_is_empty() {
    let mut sk = L0Sketch::new(100, 1e-3, 4).unwrap();
    assert_eq!(sk.sample(), L0Sample::Empty);
    sk.update(5, 1).unwrap();
    sk.update(5, -1).unwrap();
    assert_eq!(sk.sample(), L0Sample::Empty);
    assert!(sk.is_zero());
}

#[test]
fn merge_of_disjoint_streams() {
    for s in 0..50 {
        let mut a = L0Sketch::new(64, 1e-4, s).unwrap();
        let mut b = L0Sketch::new(64, 1e-4, s).unwrap();
        a.update(1, 1).unwrap();
        a.update(2, 1).unwrap();
        b.update(40, 1).unwrap();
        a.merge(&b).unwrap();
        match a.sample() {
            L0Sample::Coordinate(c) => assert!([1, 2, 40].contains(&c)),
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn merge_needs_matching_sketches() {
    let mut a = L0Sketch::new(64, 1e-4, 1).unwrap();
    let b = L0Sketch::new(64, 1e-4, 2).unwrap();
    assert_eq!(a.merge(&b), Err(Error::IncompatibleSketch));
    let c = L0Sketch::new(65, 1e-4, 1).unwrap();
    assert_eq!(a.merge(&c), Err(Error::IncompatibleSketch));
}

#[test]
fn out_of_range_coordinates() {
    let mut sk = L0Sketch::new(10, 0.1, 0).unwrap();
    assert_eq!(sk.update(10, 1), Err(Error::CoordinateOutOfRange { coordinate: 10, dim: 10 }));
    assert!(sk.update(0, 2).is_err());
    assert!(sk.is_zero());
}

#[test]
fn parameter_checks() {
    assert_eq!(L0Params::new(1 << 21, 0.1), Err(Error::DimensionTooLarge(1 << 21)));
    assert!(L0Params::new(1 << 20, 0.1).is_ok());
    assert!(L0Params::new(0, 0.1).is_err());
    assert!(L0Params::new(10, 0.0).is_err());
    assert!(L0Params::new(10, 1.0).is_err());
}

#[test]
fn cell_counts() {
    assert_eq!(levels_for(1000), 11);
    assert_eq!(levels_for(1), 1);
    assert_eq!(repetitions_for(1e-6), 14);
    let p = L0Params::new(1000, 1e-6).unwrap();
    assert_eq!(p.cells(), 14 * 11);
    assert_eq!(p.words(), 3 * 14 * 11);
    assert!(p.field > 1_000_000_000);
    let bank = L0Bank::new(1000, 1e-6, 5, 0).unwrap();
    assert_eq!(bank.cell_count(), 5 * p.cells());
    assert_eq!(bank.len(), 5);
}

#[test]
fn dump_lists_nonzero_cells() {
    let mut bank = L0Bank::new(8, 0.3, 2, 0).unwrap();
    let p = *bank.params();
    let header = format!(
        "# l0 dim=8 levels={} reps={} field={} samplers=2\n",
        p.levels, p.reps, p.field
    );
    assert_eq!(bank.dump(), header);
    bank.update(3, 1).unwrap();
    let dump = bank.dump();
    let rows: Vec<&str> = dump.lines().skip(1).collect();
    // Level 0 always holds the coordinate, in every sampler and repetition.
    assert!(rows.len() >= 2 * p.reps);
    for row in rows {
        let f: Vec<i64> = row.split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f.len(), 6);
        assert_eq!((f[3], f[4]), (1, 3));
    }
}

#[test]
fn bank_samplers_are_independent() {
    let mut bank = L0Bank::new(32, 1e-4, 200, 11).unwrap();
    for c in 0..32 {
        bank.update(c, 1).unwrap();
    }
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..bank.len() {
        if let L0Sample::Coordinate(c) = bank.sample(i) {
            seen.insert(c);
        }
    }
    assert!(seen.len() > 20, "only {} distinct samples", seen.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sketch_is_linear(
        seed in any::<u64>(),
        ups in proptest::collection::vec((0u64..50, any::<bool>()), 0..80),
        split in 0usize..80,
    ) {
        let ups: Vec<(u64, i64)> = ups.into_iter().map(|(c, s)| (c, if s { 1 } else { -1 })).collect();
        let split = split.min(ups.len());
        let mut whole = L0Bank::new(1000, 1e-3, 3, seed).unwrap();
        whole.update_batch(&ups).unwrap();
        let mut left = L0Bank::new(1000, 1e-3, 3, seed).unwrap();
        let mut right = L0Bank::new(1000, 1e-3, 3, seed).unwrap();
        for &(c, d) in &ups[..split] {
            left.update(c, d).unwrap();
        }
        right.update_batch(&ups[split..]).unwrap();
        left.merge(&right).unwrap();
        prop_assert_eq!(&left, &whole);

        // Samples only ever return coordinates of nonzero net weight.
        let mut net = [0i64; 50];
        for &(c, d) in &ups {
            net[c as usize] += d;
        }
        for i in 0..3 {
            match whole.sample(i) {
                L0Sample::Coordinate(c) => prop_assert!(net[c as usize] != 0),
                L0Sample::Empty => prop_assert!(net.iter().all(|&x| x == 0)),
                L0Sample::Fail => {}
            }
        }
    }
}
