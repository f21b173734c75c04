mod common;

use common::{close, random_field, random_space};
use fracmax::maxop::{
    frac_maximal, frac_maximal_bruteforce, frac_maximal_noncentered, frac_maximal_probe, scaled_average,
};
use fracmax::ScalarField;
use proptest::prelude::*;

const REL: f64 = 1e-12;

#[test]
fn oracle_agrees_exactly_on_random_spaces() {
    for seed in 0..50u64 {
        let n = 2 + (seed as usize * 37) % 199;
        let space = random_space(seed, n);
        let u = random_field(seed, n);
        for alpha in [0.0, 0.5, 1.0] {
            assert_eq!(
                frac_maximal(&space, &u, alpha).unwrap(),
                frac_maximal_bruteforce(&space, &u, alpha, false).unwrap()
            );
            assert_eq!(
                frac_maximal_noncentered(&space, &u, alpha).unwrap(),
                frac_maximal_bruteforce(&space, &u, alpha, true).unwrap()
            );
        }
    }
}

#[test]
fn probe_at_sample_points_matches_field() {
    let space = random_space(7, 60);
    let u = random_field(7, 60);
    let m = frac_maximal(&space, &u, 0.5).unwrap();
    for i in 0..space.len() {
        let p = frac_maximal_probe(&space, &u, 0.5, space.coords(i).unwrap()).unwrap();
        assert_eq!(p.value, m.values[i]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sublinear(seed in any::<u64>(), n in 2usize..40, alpha in 0.0f64..1.5) {
        let space = random_space(seed, n);
        let u = random_field(seed, n);
        let v = random_field(seed.wrapping_add(1), n);
        let sum = u.zip_with(&v, |a, b| a + b).unwrap();
        let (mu, mv, ms) = (
            frac_maximal(&space, &u, alpha).unwrap(),
            frac_maximal(&space, &v, alpha).unwrap(),
            frac_maximal(&space, &sum, alpha).unwrap(),
        );
        for i in 0..n {
            let bound = mu.values[i] + mv.values[i];
            prop_assert!(ms.values[i] <= bound * (1.0 + REL));
        }
    }

    #[test]
    fn homogeneous(seed in any::<u64>(), n in 2usize..40, alpha in 0.0f64..1.5, c in -5.0f64..5.0) {
        let space = random_space(seed, n);
        let u = random_field(seed, n);
        let m = frac_maximal(&space, &u, alpha).unwrap();
        let mc = frac_maximal(&space, &u.scaled(c), alpha).unwrap();
        for i in 0..n {
            prop_assert!(close(mc.values[i], c.abs() * m.values[i], 1e-12));
        }
    }

    #[test]
    fn monotone(seed in any::<u64>(), n in 2usize..40, alpha in 0.0f64..1.5) {
        let space = random_space(seed, n);
        let u = random_field(seed, n);
        let bigger = u.zip_with(&random_field(seed.wrapping_add(3), n), |a, b| a.abs() + b.abs()).unwrap();
        let (m, mb) = (frac_maximal(&space, &u, alpha).unwrap(), frac_maximal(&space, &bigger, alpha).unwrap());
        for i in 0..n {
            prop_assert!(m.values[i] <= mb.values[i] * (1.0 + REL));
        }
    }

    #[test]
    fn noncentered_dominates(seed in any::<u64>(), n in 2usize..40, alpha in 0.0f64..1.5) {
        let space = random_space(seed, n);
        let u = random_field(seed, n);
        let (c, nc) = (frac_maximal(&space, &u, alpha).unwrap(), frac_maximal_noncentered(&space, &u, alpha).unwrap());
        for i in 0..n {
            prop_assert!(nc.values[i] >= c.values[i]);
        }
    }

    #[test]
    fn supremum_property(seed in any::<u64>(), n in 2usize..40, alpha in 0.0f64..1.5, t in 0.001f64..1.0) {
        let space = random_space(seed, n);
        let u = random_field(seed, n);
        let m = frac_maximal(&space, &u, alpha).unwrap();
        let r = t * space.cap();
        for i in 0..n {
            let v = scaled_average(&space, &u, i, r, alpha).unwrap();
            prop_assert!(v <= m.values[i] * (1.0 + REL));
        }
    }

    #[test]
    fn constants_map_to_capped_powers(n in 2usize..30, seed in any::<u64>(), c in 0.1f64..3.0, alpha in 0.0f64..1.0) {
        let space = random_space(seed, n);
        let m = frac_maximal(&space, &ScalarField::constant(n, c), alpha).unwrap();
        for i in 0..n {
            prop_assert!(close(m.values[i], c * space.cap().powf(alpha), 1e-12));
        }
    }
}
