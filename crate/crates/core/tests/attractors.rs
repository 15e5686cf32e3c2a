mod common;

use common::*;
use ifsmetric::attractor::{
    attractor_convergence_report, attractor_error_bound, attractor_points, chaos_game, code_point, default_seed, hutchinson,
    piece_gap, Address,
};
use ifsmetric::pointset::{directed_hausdorff, hausdorff_brute};
use ifsmetric::sequence::IfsSequence;
use ifsmetric::{hausdorff, AffineMap, BoxDomain, Error, Ifs, PointSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DELTA: f64 = 1e-4;

fn line(points: &[f64], delta: f64) -> PointSet {
    PointSet::from_flat(1, delta, points).unwrap()
}

#[test]
fn hutchinson_on_endpoints() {
    let w = hutchinson(&cantor(), &line(&[0.0, 1.0], DELTA)).unwrap();
    assert_eq!(w, line(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], DELTA));

    let constants = Ifs::new(BoxDomain::unit(1), vec![AffineMap::constant(vec![0.25]), AffineMap::constant(vec![0.75])]).unwrap();
    let w = hutchinson(&constants, &line(&[0.0, 0.3, 0.9], DELTA)).unwrap();
    assert_eq!(w, line(&[0.25, 0.75], DELTA));
}

#[test]
fn just_touching_pair_fixes_the_interval() {
    let halves = Ifs::unit_interval(&[(0.5, 0.0), (0.5, 0.5)]).unwrap();
    let grid = PointSet::lattice(&BoxDomain::unit(1), 1.0 / 1024.0).unwrap();
    let w = hutchinson(&halves, &grid).unwrap();
    // images of the grid land on the half-pitch grid, which snaps back to the grid
    assert_eq!(hausdorff(&w, &grid).unwrap(), 0.0);
}

#[test]
fn depth_eight_render_is_the_ternary_endpoint_set() {
    let delta = 3f64.powi(-8) / 4.0;
    let seed = line(&[0.0, 1.0], delta);
    let render = attractor_points(&cantor(), 8, &seed).unwrap();
    let oracle = cantor_oracle(8, delta);
    assert_eq!(render.len(), 512);
    assert_eq!(render, oracle);
    assert_eq!(attractor_points(&cantor(), 0, &seed).unwrap(), seed);
}

#[test]
fn one_sided_distances_differ() {
    let (a, b) = (line(&[0.0], DELTA), line(&[0.0, 1.0], DELTA));
    assert_eq!(directed_hausdorff(&a, &b).unwrap(), 0.0);
    assert_eq!(directed_hausdorff(&b, &a).unwrap(), 1.0);
    assert_eq!(hausdorff(&a, &b).unwrap(), 1.0);
    assert_eq!(hausdorff(&b, &b).unwrap(), 0.0);
}

#[test]
fn cantor_render_against_the_interval() {
    let delta = 3f64.powi(-8);
    let render = attractor_points(&cantor(), 8, &line(&[0.0, 1.0], delta)).unwrap();
    let grid = PointSet::lattice(&BoxDomain::unit(1), delta).unwrap();
    // the widest removed gap is (1/3, 2/3); its midpoint is 1/6 from the set
    let h = hausdorff(&render, &grid).unwrap();
    assert!((h - 1.0 / 6.0).abs() <= 2.0 * delta, "h = {h}");
}

#[test]
fn code_points_follow_the_address() {
    let s = cantor();
    for k in 0..12 {
        let addr = Address::new(vec![0; k], 2).unwrap();
        let p = code_point(&s, &addr, &[1.0]).unwrap();
        assert!((p[0] - 3f64.powi(-(k as i32))).abs() < 1e-15);
    }
    // first symbol innermost: f_0(f_1(1)) = 1/3, f_1(f_0(1)) = 7/9
    let p = code_point(&s, &Address::new(vec![1, 0], 2).unwrap(), &[1.0]).unwrap();
    assert!((p[0] - 1.0 / 3.0).abs() < 1e-15);
    let p = code_point(&s, &Address::new(vec![0, 1], 2).unwrap(), &[1.0]).unwrap();
    assert!((p[0] - 7.0 / 9.0).abs() < 1e-15);
    assert!(Address::new(vec![2], 2).is_err());
}

#[test]
fn chaos_game_matches_deterministic_render() {
    let s = cantor();
    let a = chaos_game(&s, 100_000, 20, 7, DELTA).unwrap();
    assert_eq!(a, chaos_game(&s, 100_000, 20, 7, DELTA).unwrap());
    let render = attractor_points(&s, 12, &default_seed(&s, DELTA).unwrap()).unwrap();
    assert!(hausdorff(&a, &render).unwrap() <= 2.0 * DELTA);

    let point = Ifs::new(BoxDomain::unit(1), vec![AffineMap::constant(vec![0.4])]).unwrap();
    assert_eq!(chaos_game(&point, 1, 0, 0, DELTA).unwrap(), line(&[0.4], DELTA));
}

#[test]
fn only_the_first_cantor_term_touches() {
    let grid = PointSet::lattice(&BoxDomain::unit(1), 1e-3).unwrap();
    assert_eq!(piece_gap(&cantor_term(1), &grid).unwrap(), 0.0);
    for j in 2..6 {
        let want = 1.0 / 3.0 - 1.0 / (3.0 * j as f64);
        let gap = piece_gap(&cantor_term(j), &grid).unwrap();
        assert!(gap > 0.0 && (gap - want).abs() <= 2e-3, "j = {j}: {gap} vs {want}");
    }
}

#[test]
fn cantor_terms_approach_the_cantor_set() {
    let seq = IfsSequence::new((1..=6).map(cantor_term).collect()).unwrap();
    let report = attractor_convergence_report(&seq, &cantor(), 10, DELTA).unwrap();
    for (j, (h, slack)) in report.distances.iter().zip(&report.error_bounds).enumerate() {
        assert!(*h <= 1.0 / (2.0 * (j + 1) as f64) + slack, "j = {}: {h}", j + 1);
    }
    let constant = IfsSequence::new(vec![cantor(); 2]).unwrap();
    let report = attractor_convergence_report(&constant, &cantor(), 10, DELTA).unwrap();
    assert!(report.distances.iter().zip(&report.error_bounds).all(|(h, b)| h <= b));
}

#[test]
fn point_cap_is_a_resource_error() {
    let s = Ifs::unit_interval(&[(0.1, 0.0), (0.1, 0.3), (0.1, 0.6), (0.1, 0.9)]).unwrap();
    let seed = line(&[0.0, 1.0], 1e-12);
    let err = attractor_points(&s, 40, &seed).unwrap_err();
    assert!(matches!(err, Error::ResourceCap { .. }), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hausdorff_is_a_metric_and_matches_brute_force(seed in any::<u64>(), d in 1usize..=2, sizes in (1usize..60, 1usize..60, 1usize..60)) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = random_points(&mut r, d, sizes.0, 1e-3);
        let b = random_points(&mut r, d, sizes.1, 1e-3);
        let c = random_points(&mut r, d, sizes.2, 1e-3);
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff(&b, &a).unwrap());
        prop_assert_eq!(ab, hausdorff_brute(&a, &b).unwrap());
        prop_assert!((ab - brute_hausdorff(&a, &b)).abs() <= 1e-15);
        prop_assert!(hausdorff(&a, &c).unwrap() <= ab + hausdorff(&b, &c).unwrap() + 1e-12);
    }

    #[test]
    fn hutchinson_contracts(seed in any::<u64>(), d in 1usize..=2, n in 1usize..4) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let s = unit_box_ifs(&mut r, d, n, 0.8);
        let delta = 1e-3;
        let a = random_points(&mut r, d, 40, delta);
        let b = random_points(&mut r, d, 40, delta);
        let lhs = hausdorff(&hutchinson(&s, &a).unwrap(), &hutchinson(&s, &b).unwrap()).unwrap();
        let slack = 2.0 * delta * (d as f64).sqrt();
        prop_assert!(lhs <= s.contractivity() * hausdorff(&a, &b).unwrap() + slack);
    }

    #[test]
    fn deep_render_is_a_fixed_point(seed in any::<u64>(), n in 2usize..4) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let s = unit_box_ifs(&mut r, 1, n, 0.4);
        let delta = 1e-3;
        let start = default_seed(&s, delta).unwrap();
        let depth = (1..40).find(|&k| attractor_error_bound(&s, k, &start).unwrap() < delta).unwrap();
        let a = attractor_points(&s, depth, &start).unwrap();
        prop_assert!(hausdorff(&hutchinson(&s, &a).unwrap(), &a).unwrap() <= 2.0 * delta);
    }

    #[test]
    fn shared_address_contracts_distances(seed in any::<u64>(), k in 0usize..8, x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let s = unit_box_ifs(&mut r, 1, 3, 0.9);
        let symbols: Vec<usize> = (0..k).map(|i| (seed as usize >> (2 * i)) % 3).collect();
        let addr = Address::new(symbols, 3).unwrap();
        let px = code_point(&s, &addr, &[x]).unwrap()[0];
        let py = code_point(&s, &addr, &[y]).unwrap()[0];
        prop_assert!((px - py).abs() <= s.contractivity().powi(k as i32) * (x - y).abs() + 1e-12);
    }

    #[test]
    fn innermost_symbol_moves_the_point_by_at_most_t_to_the_k(seed in any::<u64>(), k in 0usize..10, g in 0usize..3, x in 0.0f64..=1.0) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let s = unit_box_ifs(&mut r, 1, 3, 0.9);
        let symbols: Vec<usize> = (0..k).map(|i| (seed as usize >> (2 * i)) % 3).collect();
        let mut extended = vec![g];
        extended.extend(&symbols);
        let p = code_point(&s, &Address::new(symbols, 3).unwrap(), &[x]).unwrap()[0];
        let q = code_point(&s, &Address::new(extended, 3).unwrap(), &[x]).unwrap()[0];
        prop_assert!((p - q).abs() <= s.contractivity().powi(k as i32) * s.domain().diameter() + 1e-12);
    }
}
