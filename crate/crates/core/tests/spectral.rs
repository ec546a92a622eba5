use proptest::prelude::*;

use nilgevrey::pipeline::resolve_potentials;
use nilgevrey::poly::parse_poly_auto;
use nilgevrey::presets::preset;
use nilgevrey::scalar::rat;
use nilgevrey::spectral::{
    analyze_potentials, cutoff, dense_smallest, dvr_ground_state, growth_check, harnack_ratio,
    ode_ground_state, oracle_potentials, oracle_residual, separated_solution, solve_lambda, Grid2D,
    PotentialCase, PotentialPair, SeparatedKind, SolveRoute, SolverConfig,
};

fn pair(q: &str, p: &str) -> PotentialPair {
    let text = format!("{q} + 0*t1 + 0*t2");
    let (q, reg) = parse_poly_auto(&text).unwrap();
    let p = nilgevrey::poly::parse_poly(p, &reg).unwrap();
    analyze_potentials(&q, &p).unwrap()
}

#[test]
fn oscillator_matches_dense_oracle() {
    let pair = pair("t1^2 + t2^2", "1");
    let cfg = SolverConfig {
        l: 5.0,
        hg: 0.2,
        n: 5.0,
        ..SolverConfig::default()
    };
    let sol = solve_lambda(&pair, &cfg).unwrap();
    let grid = Grid2D::new(cfg.l, cfg.hg).unwrap();
    let q = grid.sample(|x, y| pair.q_cell(x, y, cfg.hg));
    let w = grid.sample(|x, y| pair.p_at(x, y) * cutoff(cfg.n).unwrap().at(x, y));
    let dense = dense_smallest(&grid, &q, &w).unwrap();
    assert!(
        (sol.lambda - dense).abs() < 1e-8 * dense,
        "{} vs {dense}",
        sol.lambda
    );
    assert!((sol.lambda - 2.0).abs() < 0.02, "{}", sol.lambda);
    assert!(sol.positive);
    assert!((sol.value(0.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
    let gap = sol.route_gap.unwrap();
    assert!(gap < 1e-6, "{gap}");

    let near = harnack_ratio(&sol, (0.0, 0.0), 0.2, 1.0).unwrap();
    assert!(near.ratio >= 1.0 && near.ratio < 1.1, "{}", near.ratio);
    assert!(near.scale_condition_met);
}

#[test]
fn example41_coarse_solve() {
    let res = resolve_potentials(&preset("example41").unwrap()).unwrap();
    let pair = analyze_potentials(&res.q, &res.p).unwrap();
    assert_eq!((pair.m, pair.s, pair.j), (9, 2, 4));
    assert_eq!(pair.condition, Some(rat(-1, 2)));
    assert_eq!(pair.case, PotentialCase::Strict);
    let cfg = SolverConfig {
        hg: 0.125,
        route: SolveRoute::Direct,
        ..SolverConfig::default()
    };
    let sol = solve_lambda(&pair, &cfg).unwrap();
    assert!((sol.lambda - 1.6864).abs() < 1e-3, "{}", sol.lambda);
    assert!(sol.positive && sol.rayleigh_rel_error < 1e-6);
    assert!(growth_check(&sol, 10.0).sup <= 1.0 + 1e-9);
}

#[test]
fn ground_state_values() {
    let one = ode_ground_state(1).unwrap();
    assert!((one.lambda0 - 1.0).abs() < 1e-10);
    assert!(one.decay.monotone_tail);
    for (m, expected) in [(2, 1.060362090484), (9, 1.518970543437)] {
        let ode = ode_ground_state(m).unwrap();
        assert!(
            (ode.lambda0 - expected).abs() < 1e-9,
            "m = {m}: {}",
            ode.lambda0
        );
        let dvr = dvr_ground_state(m, 601).unwrap();
        assert!(
            (ode.lambda0 - dvr).abs() < 1e-6,
            "m = {m}: {} vs {dvr}",
            ode.lambda0
        );
    }
    let psi = ode_ground_state(1).unwrap();
    let gauss = (-0.5f64).exp();
    assert!((psi.eval(1.0) / psi.eval(0.0) - gauss).abs() < 1e-6);
}

#[test]
fn separated_solutions() {
    let pair = pair("t1^2", "1");
    let ground = separated_solution(&pair, None, 4.0, 1.0 / 16.0).unwrap();
    assert_eq!(ground.kind, SeparatedKind::Exponential);
    assert!(ground.mu.abs() < 1e-9);
    let above = separated_solution(&pair, Some(3.0), 4.0, 1.0 / 16.0).unwrap();
    assert_eq!(above.kind, SeparatedKind::Oscillatory);
    assert!((above.mu - 2f64.sqrt()).abs() < 1e-9);
    assert!((above.order - 2.0).abs() < 0.2, "{}", above.order);
    let below = separated_solution(&pair, Some(0.5), 4.0, 1.0 / 16.0).unwrap();
    assert_eq!(below.kind, SeparatedKind::Exponential);
    assert!(below.measured_growth <= below.growth_constant + 1e-9);

    let free = pair_free();
    assert!(separated_solution(&free, None, 4.0, 0.125).is_err());
    let f = separated_solution(&free, Some(4.0), 4.0, 0.125).unwrap();
    assert_eq!(f.kind, SeparatedKind::Free);
    assert!((f.eval(std::f64::consts::FRAC_PI_4, 0.0)).abs() < 1e-12);
}

fn pair_free() -> PotentialPair {
    pair("0", "1")
}

#[test]
fn harmonic_oracle_converges() {
    let (h, _) = parse_poly_auto("t1^2 - t2^2").unwrap();
    let (q, p) = oracle_potentials(&h).unwrap();
    assert_eq!(
        p,
        nilgevrey::poly::parse_poly("4*t1^2 + 4*t2^2", p.registry()).unwrap()
    );
    assert!(!q.is_zero());
    let report = oracle_residual(&h, 3.0, 1.0 / 32.0).unwrap();
    assert!((report.order - 2.0).abs() < 0.2, "{}", report.order);
    let (not_harmonic, _) = parse_poly_auto("t1^2 + t2^2").unwrap();
    assert!(oracle_potentials(&not_harmonic).is_err());
}

proptest! {
    #[test]
    fn cutoff_is_a_monotone_bump(n in 0.5f64..10.0, r1 in 0.0f64..30.0, r2 in 0.0f64..30.0) {
        let c = cutoff(n).unwrap();
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!((0.0..=1.0).contains(&c.eval(lo)));
        prop_assert!(c.eval(lo) >= c.eval(hi));
        if lo <= n {
            prop_assert_eq!(c.eval(lo), 1.0);
        }
        if hi >= 2.0 * n {
            prop_assert_eq!(c.eval(hi), 0.0);
        }
    }
}

#[test]
fn cutoff_rejects_nonpositive_radius() {
    assert!(cutoff(0.0).is_err());
}
