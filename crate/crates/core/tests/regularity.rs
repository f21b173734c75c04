mod common;

use common::random_space;
use fracmax::gallery::{buckley_space, euclidean_grid};
use fracmax::regularity::{
    annular_decay_fit, doubling_constant, lower_bound_fit, relative_annular_decay_fit, reverify, FitOptions,
};

#[test]
fn line_grid_is_one_dimensional() {
    let space = euclidean_grid(1, 0.01, -1.0, 1.0, 2.0).unwrap();
    let opts = FitOptions::default();
    let q = lower_bound_fit(&space, &opts).unwrap();
    assert!((q.exponent - 1.0).abs() < 0.05, "Q = {}", q.exponent);
    let d = annular_decay_fit(&space, &opts).unwrap();
    assert!(d.exponent >= 0.9, "delta = {}", d.exponent);
    assert_eq!(reverify(&space, &d, &opts).unwrap(), 0);
}

#[test]
fn doubling_constant_of_line_near_two() {
    let space = euclidean_grid(1, 0.01, -1.0, 1.0, 2.0).unwrap();
    let fit = doubling_constant(&space, &FitOptions::default()).unwrap();
    assert!(fit.constant >= 1.5 && fit.constant <= 3.0, "C_d = {}", fit.constant);
}

#[test]
fn buckley_annular_decay_is_small() {
    let space = buckley_space(3.0, 0.01, false).unwrap();
    let opts = FitOptions::default();
    let fit = annular_decay_fit(&space, &opts).unwrap();
    assert!(fit.exponent <= 0.2, "delta = {}", fit.exponent);
    let w = fit.limiting_witness.expect("limiting witness");
    assert!((w.radius - 1.0).abs() < 0.05, "limiting radius {}", w.radius);
    let rel = relative_annular_decay_fit(&space, &opts).unwrap();
    assert!(rel.exponent < 0.8, "relative delta = {}", rel.exponent);
}

#[test]
fn fits_verify_on_random_spaces() {
    let opts = FitOptions { min_ball_points: 2, min_radius_steps: 1.0, ..FitOptions::default() };
    for seed in 0..8 {
        let space = random_space(seed, 80);
        for fit in [doubling_constant(&space, &opts), lower_bound_fit(&space, &opts)] {
            let fit = fit.unwrap();
            assert_eq!(reverify(&space, &fit, &opts).unwrap(), 0, "seed {seed} {:?}", fit.variant);
        }
    }
}

#[test]
fn rejects_bad_options() {
    let space = euclidean_grid(1, 0.1, -1.0, 1.0, 2.0).unwrap();
    let opts = FitOptions { ladder_depth: 0, ..FitOptions::default() };
    assert!(lower_bound_fit(&space, &opts).is_err());
}
