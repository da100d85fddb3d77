mod common;

use benchdyn::ecosystem::{welch_t_test, Alternative};
use common::{t_upper_tail_oracle, welch_reference};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[test]
fn oracle_reproduces_closed_forms() {
    // df = 1 is Cauchy; df = 2 has a closed-form tail.
    for t in [-3.0, -0.5, 0.0, 0.7, 2.0, 10.0] {
        let cauchy = 0.5 - f64::atan(t) / std::f64::consts::PI;
        assert!((t_upper_tail_oracle(t, 1.0) - cauchy).abs() < 1e-10, "df=1 t={t}");
        let two = 0.5 * (1.0 - t / (2.0 + t * t).sqrt());
        assert!((t_upper_tail_oracle(t, 2.0) - two).abs() < 1e-10, "df=2 t={t}");
    }
}

#[test]
fn welch_matches_quadrature_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_220_730);
    for case in 0..20 {
        let na = rng.random_range(3..=40);
        let nb = rng.random_range(3..=40);
        let da = Normal::new(rng.random_range(-2.0..2.0), rng.random_range(0.2..3.0)).unwrap();
        let db = Normal::new(rng.random_range(-2.0..2.0), rng.random_range(0.2..3.0)).unwrap();
        let a: Vec<f64> = (0..na).map(|_| da.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..nb).map(|_| db.sample(&mut rng)).collect();
        let (t, df) = welch_reference(&a, &b);
        let got = welch_t_test(&a, &b, Alternative::Greater).unwrap();
        assert!((got.t - t).abs() < 1e-9 * t.abs().max(1.0), "case {case}: t");
        assert!((got.df - df).abs() < 1e-9 * df, "case {case}: df");
        let oracle = t_upper_tail_oracle(t, df);
        assert!((got.p - oracle).abs() <= 1e-6, "case {case}: p {} vs oracle {oracle}", got.p);
        let less = welch_t_test(&a, &b, Alternative::Less).unwrap();
        assert!((less.p - (1.0 - oracle)).abs() <= 1e-6, "case {case}: lower tail");
    }
}

#[test]
fn identical_samples_give_one_half() {
    let a = [1.5, 2.25, 9.0, -4.0];
    assert_eq!(welch_t_test(&a, &a, Alternative::Greater).unwrap().p, 0.5);
}
