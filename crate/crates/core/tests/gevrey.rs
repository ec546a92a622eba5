use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

use nilgevrey::gevrey::{
    derivative_check, derivative_sequence, fit_gevrey_order, gevrey_report, ln_moment,
    ln_moment_quadrature, moment_integral, GevreyOrder, GevreyParams, LogMagnitude,
};
use nilgevrey::scalar::rat;

fn params(m: u32, s: u32) -> GevreyParams {
    GevreyParams {
        m,
        s,
        damping: 1.0,
        f0: 1.0,
        lambda: 1.0,
        sigma_max: 40,
    }
}

#[test]
fn moment_closed_values() {
    let gaussian = moment_integral(2.0, 1.0, 1).unwrap();
    assert!((gaussian - std::f64::consts::PI.sqrt() / 4.0).abs() < 1e-14);
    let cubic = moment_integral(0.0, 1.0, 2).unwrap();
    assert!((cubic - 2.678_938_534_707_747_6 / 3.0).abs() < 1e-14);
    assert!((moment_integral(3.0, 2.0, 0).unwrap() - 6.0 / 16.0).abs() < 1e-14);
    assert!(ln_moment(1.0, 0.0, 1).is_err());
}

#[test]
fn quadrature_agrees_with_log_gamma() {
    for (k, m, s) in [
        (0.0, 1.0, 0),
        (10.0, 1.0, 2),
        (400.0, 1.0, 2),
        (30.0, 3.5, 1),
        (200.0, 1.0, 0),
    ] {
        let exact = ln_moment(k, m, s).unwrap();
        let quad = ln_moment_quadrature(k, m, s).unwrap();
        assert!(
            (exact - quad).abs() < 1e-9 * exact.abs().max(1.0),
            "K = {k}: {exact} vs {quad}"
        );
    }
}

#[test]
fn reference_orders() {
    for (m, s, g) in [(9, 2, 10.0 / 3.0), (1, 0, 2.0), (2, 0, 3.0), (9, 0, 10.0)] {
        let rep = gevrey_report(&params(m, s)).unwrap();
        let order = rep.fitted_order().unwrap();
        assert!((order - g).abs() < 1e-3, "m = {m}, s = {s}: {order}");
    }
    assert_eq!(params(9, 2).target(), rat(10, 3));
}

#[test]
fn zero_initial_value_vanishes_to_infinite_order() {
    let p = GevreyParams {
        f0: 0.0,
        ..params(9, 2)
    };
    let seq = derivative_sequence(&p).unwrap();
    assert!(seq.iter().all(LogMagnitude::is_zero));
    assert!(matches!(
        fit_gevrey_order(&seq).unwrap(),
        GevreyOrder::VanishesToInfiniteOrder
    ));
    assert!(gevrey_report(&p).unwrap().is_infinite_order());
}

#[test]
fn finite_differences_match_moments() {
    let p = GevreyParams {
        damping: 1.0,
        ..params(1, 0)
    };
    for c in derivative_check(&p, 4, 1e-3).unwrap() {
        assert!(c.rel_error < 1e-6, "sigma = {}: {}", c.sigma, c.rel_error);
    }
    for c in derivative_check(&params(2, 2), 4, 1e-2).unwrap() {
        assert!(c.rel_error < 1e-6, "sigma = {}: {}", c.sigma, c.rel_error);
    }
}

fn synthetic(g: f64, a: f64, b: f64) -> Vec<LogMagnitude> {
    (0..=40u32)
        .map(|k| {
            let sigma = f64::from(k);
            LogMagnitude::positive(g * ln_gamma(sigma + 1.0) + a * sigma + b)
        })
        .collect()
}

proptest! {
    #[test]
    fn fit_recovers_synthetic_orders(
        g in prop::sample::select(vec![1.0, 2.0, 10.0 / 3.0, 10.0]),
        a in -3.0f64..3.0,
        b in -5.0f64..5.0,
    ) {
        match fit_gevrey_order(&synthetic(g, a, b)).unwrap() {
            GevreyOrder::Fitted(fit) => prop_assert!((fit.order - g).abs() < 0.02, "{} vs {g}", fit.order),
            GevreyOrder::VanishesToInfiniteOrder => prop_assert!(false),
        }
    }
}
