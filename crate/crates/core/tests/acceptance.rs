//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line with
//! its runtime and the measured quantities, then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilgevrey::gevrey::{gevrey_report, GevreyParams};
use nilgevrey::induction::{
    central_reduction, check_assumptions, compute_s, derive_operator, derived_representation,
    has_central_v1_element, poisson_rank_probe, reduce_ansatz, representation_oracle, ProbeOptions,
    Route,
};
use nilgevrey::lie::{bch_product, AlgebraElement, StratifiedAlgebra};
use nilgevrey::pipeline::{operator_potentials, resolve_potentials};
use nilgevrey::poly::{parse_poly, parse_poly_auto, Registry};
use nilgevrey::presets::{fields_of, preset};
use nilgevrey::scalar::rat;
use nilgevrey::spectral::{
    analyze_potentials, dvr_ground_state, growth_check, ode_ground_state, oracle_residual,
    solve_lambda, SolverConfig,
};
use nilgevrey::Rational;

fn report(
    criterion: u32,
    title: &str,
    ok: bool,
    elapsed: Duration,
    limit: Duration,
    detail: String,
) {
    let ok = ok && elapsed <= limit;
    let line = format!(
        "criterion {criterion} [{}] {title}: {detail} ({:.2} s, limit {} s)\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    // Written to the raw handle so the line survives output capture.
    let _ = std::io::stdout().write_all(line.as_bytes());
    assert!(ok, "{line}");
}

fn algebra(name: &str) -> StratifiedAlgebra {
    preset(name)
        .unwrap()
        .algebra
        .unwrap()
        .parse()
        .unwrap()
        .algebra
}

fn product(alg: &StratifiedAlgebra, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let reg = Registry::constants();
    let (x, y) = (
        AlgebraElement::from_rationals(&reg, x),
        AlgebraElement::from_rationals(&reg, y),
    );
    bch_product(alg, &x, &y).unwrap().to_rationals().unwrap()
}

#[test]
fn criterion_1_bch() {
    let start = Instant::now();
    let mut ok = true;

    let h = algebra("heisenberg");
    let (x, y) = (
        [rat(1, 2), rat(-3, 1), rat(5, 7)],
        [rat(2, 3), rat(4, 5), rat(-1, 1)],
    );
    let z = product(&h, &x, &y);
    let c = &x[0] * &y[1] - &x[1] * &y[0];
    ok &= z[2] == &x[2] + &y[2] + rat(1, 2) * &c;

    let e = algebra("engel");
    let (x, y) = (
        [rat(3, 2), rat(-1, 3), rat(2, 1), rat(1, 5)],
        [rat(-5, 4), rat(7, 3), rat(1, 9), rat(-2, 1)],
    );
    let z = product(&e, &x, &y);
    let c = &x[0] * &y[1] - &x[1] * &y[0];
    let d = &x[0] * &y[2] - &x[2] * &y[0];
    ok &= z[2] == &x[2] + &y[2] + rat(1, 2) * &c;
    ok &= z[3] == &x[3] + &y[3] + rat(1, 2) * &d + rat(1, 12) * (&x[0] - &y[0]) * &c;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for name in ["heisenberg", "engel", "filiform6"] {
        let alg = algebra(name);
        let mut draw = || -> Vec<Rational> {
            (0..alg.dim())
                .map(|_| rat(rng.gen_range(-20..=20), rng.gen_range(1..=6)))
                .collect()
        };
        for _ in 0..100 {
            let (a, b, c) = (draw(), draw(), draw());
            ok &= product(&alg, &product(&alg, &a, &b), &c)
                == product(&alg, &a, &product(&alg, &b, &c));
            checked += 1;
        }
    }
    report(
        1,
        "symbolic BCH",
        ok,
        start.elapsed(),
        Duration::from_secs(10),
        format!("closed forms and {checked} associativity triples up to step 6"),
    );
}

#[test]
fn criterion_2_derived_operators() {
    let start = Instant::now();
    let p = preset("engel").unwrap();
    let alg = p.algebra.as_ref().unwrap().parse().unwrap().algebra;
    let pair = p.covectors.as_ref().unwrap().build(&alg).unwrap();
    let sset = compute_s(&alg, &pair).unwrap();
    let op = derive_operator(&alg, &pair, &sset).unwrap();
    let live: Vec<_> = op
        .electric
        .iter()
        .filter(|c| !c.potential().is_zero())
        .collect();
    let expected = parse_poly("lam_e3*t1 + 1/2*lam_e4*t1^2", &op.reg).unwrap();
    let engel_ok = !op.has_magnetic_terms() && live.len() == 1 && live[0].potential() == expected;
    let rep = derived_representation(&alg, &pair, &sset.s, Route::Bch).unwrap();
    let engel_oracle = representation_oracle(&alg, &rep);

    let c = preset("central-ext").unwrap();
    let calg = c.algebra.as_ref().unwrap().parse().unwrap().algebra;
    let cpair = c.covectors.as_ref().unwrap().build(&calg).unwrap();
    let csset = compute_s(&calg, &cpair).unwrap();
    let red = central_reduction(&calg, "mu", None, None).unwrap();
    let central_ok = red.matches_derive
        && red.magnetic.iter().all(|m| m.is_zero())
        && red.electric.len() == csset.r - 1
        && red.constant == parse_poly("-mu^2", &red.derived.reg).unwrap();
    let crep = derived_representation(&calg, &cpair, &csset.s, Route::Bch).unwrap();
    let central_oracle = representation_oracle(&calg, &crep);

    report(
        2,
        "derived operators",
        engel_ok && central_ok && engel_oracle.passed && central_oracle.passed,
        start.elapsed(),
        Duration::from_secs(5),
        format!(
            "Engel {}, central extension {} (r = {}), commutation oracle {} + {} pairs",
            op.describe(),
            if central_ok {
                "reduces to -mu^2 form"
            } else {
                "mismatch"
            },
            csset.r,
            engel_oracle.pairs_checked,
            central_oracle.pairs_checked
        ),
    );
}

#[test]
fn criterion_3_sset_on_54_dimensional_algebra() {
    let start = Instant::now();
    let p = preset("example41").unwrap();
    let alg = p.algebra.as_ref().unwrap().parse().unwrap().algebra;
    let pair = p.covectors.as_ref().unwrap().build(&alg).unwrap();
    let sset = compute_s(&alg, &pair).unwrap();
    let op = derive_operator(&alg, &pair, &sset).unwrap();
    let (q, pp) = operator_potentials(&op).unwrap();
    let pot = analyze_potentials(&q, &pp).unwrap();
    let ok = sset.s.len() == 2
        && (sset.n, sset.r) == (2, 3)
        && !op.has_magnetic_terms()
        && pot.condition == Some(rat(-1, 2));
    report(
        3,
        "S-set on the 54-dimensional algebra",
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        format!(
            "|S| = {}, n = {}, r = {}, magnetic terms {}, condition value {}",
            sset.s.len(),
            sset.n,
            sset.r,
            if op.has_magnetic_terms() {
                "present"
            } else {
                "zero"
            },
            pot.condition.map_or("none".into(), |c| c.to_string())
        ),
    );
}

#[test]
fn criterion_4_ansatz() {
    let start = Instant::now();
    let p = preset("example41").unwrap();
    let red = reduce_ansatz(
        &p.ansatz_fields().unwrap().unwrap(),
        &p.ansatz_spec().unwrap(),
    )
    .unwrap();
    let q = parse_poly("t1^14*t2^4 + t1^4*t2^14", red.q.registry()).unwrap();
    let pp = parse_poly("(t1^2 + t2^2)^2", red.p.registry()).unwrap();
    report(
        4,
        "ansatz reduction",
        red.certified && red.q == q && red.p == pp,
        start.elapsed(),
        Duration::from_secs(5),
        format!("q = {}, p = {}", red.q, red.p),
    );
}

#[test]
fn criterion_5_oracle_convergence() {
    let start = Instant::now();
    let mut ok = true;
    let mut orders = Vec::new();
    for h in ["t1^2 - t2^2", "t1^3 - 3*t1*t2^2"] {
        let (poly, _) = parse_poly_auto(h).unwrap();
        let r = oracle_residual(&poly, 3.0, 1.0 / 64.0).unwrap();
        ok &= (r.order - 2.0).abs() <= 0.2;
        orders.push(format!("{h}: {:.3}", r.order));
    }
    report(
        5,
        "harmonic oracle residual order",
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        orders.join(", "),
    );
}

#[test]
fn criterion_6_ground_states() {
    let start = Instant::now();
    let one = ode_ground_state(1).unwrap().lambda0;
    let mut ok = (one - 1.0).abs() < 1e-6;
    let mut detail = vec![format!("m=1: {one:.10}")];
    for m in [2, 9] {
        let ode = ode_ground_state(m).unwrap().lambda0;
        let dense = dvr_ground_state(m, 601).unwrap();
        ok &= (ode - dense).abs() < 1e-6;
        detail.push(format!("m={m}: {ode:.10} vs dense {dense:.10}"));
    }
    report(
        6,
        "one-dimensional ground states",
        ok,
        start.elapsed(),
        Duration::from_secs(30),
        detail.join(", "),
    );
}

#[test]
fn criterion_7_spectral_solve() {
    let start = Instant::now();
    let res = resolve_potentials(&preset("example41").unwrap()).unwrap();
    let pair = analyze_potentials(&res.q, &res.p).unwrap();
    let mut ok = true;
    let mut lambdas = Vec::new();
    let mut growth = Vec::new();
    for n in [4.0, 6.0, 8.0] {
        let cfg = SolverConfig {
            l: 8.0,
            hg: 1.0 / 16.0,
            n,
            ..SolverConfig::default()
        };
        let sol = solve_lambda(&pair, &cfg).unwrap();
        ok &= sol.lambda > 0.0
            && sol.positive
            && (sol.value(0.0, 0.0).unwrap() - 1.0).abs() < 1e-12
            && sol.rayleigh_rel_error < 1e-6
            && sol.route_gap.is_some_and(|g| g < 1e-4);
        lambdas.push(sol.lambda);
        growth.push(growth_check(&sol, 10.0).sup);
    }
    let (lo, hi) = lambdas
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    ok &= (hi - lo) / lo <= 0.1;

    let coarse = solve_lambda(
        &pair,
        &SolverConfig {
            hg: 1.0 / 8.0,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    let coarse_growth = growth_check(&coarse, 10.0).sup;
    let stable = growth.iter().all(|g| g.is_finite())
        && (coarse_growth - growth[0]).abs() <= 0.1 * growth[0];
    ok &= stable;
    report(
        7,
        "spectral solve on the degenerate potentials",
        ok,
        start.elapsed(),
        Duration::from_secs(600),
        format!(
            "lambda_N = {:?}, spread {:.2e}, growth sup {:?} (hg = 1/8: {coarse_growth:.4})",
            lambdas,
            (hi - lo) / lo,
            growth
        ),
    );
}

#[test]
fn criterion_8_gevrey_orders() {
    let start = Instant::now();
    let fit = |m: u32, s: u32| {
        gevrey_report(&GevreyParams {
            m,
            s,
            damping: 1.0,
            f0: 1.0,
            lambda: 1.0,
            sigma_max: 40,
        })
        .unwrap()
        .fitted_order()
        .unwrap()
    };
    let main = fit(9, 2);
    let bg = fit(1, 0);
    let mut ok = (main - 10.0 / 3.0).abs() < 0.05 && (bg - 2.0).abs() < 0.05;
    let mut s_zero = Vec::new();
    for m in [2, 3, 5, 9] {
        let g = fit(m, 0);
        ok &= (g - f64::from(m + 1)).abs() < 0.05;
        s_zero.push(format!("m={m}: {g:.4}"));
    }
    report(
        8,
        "Gevrey order fits",
        ok,
        start.elapsed(),
        Duration::from_secs(10),
        format!(
            "m=9 s=2: {main:.4}, m=1 s=0: {bg:.4}, s=0 route {}",
            s_zero.join(", ")
        ),
    );
}

#[test]
fn criterion_9_gates() {
    let start = Instant::now();
    let h = preset("heisenberg").unwrap();
    let alg = h.algebra.as_ref().unwrap().parse().unwrap().algebra;
    let pair = h.covectors.as_ref().unwrap().build(&alg).unwrap();
    let rep = check_assumptions(&alg, &pair);
    let message = rep.failure_message().unwrap_or_default();
    let heis_ok = !rep.passed() && (rep.s, rep.m) == (1, 1) && message.contains("s = m = 1");

    let p = preset("prop24").unwrap();
    let palg = p.algebra.as_ref().unwrap().parse().unwrap().algebra;
    let probe = poisson_rank_probe(
        &fields_of(&p.probes[0].fields).unwrap(),
        &ProbeOptions::default(),
    )
    .unwrap();
    let central = has_central_v1_element(&palg).found;
    report(
        9,
        "assumption gates",
        heis_ok && !probe.symplectic && !central,
        start.elapsed(),
        Duration::from_secs(5),
        format!(
            "Heisenberg rejected: \"{message}\"; second example {} with central stratum-one element {}",
            if probe.symplectic { "symplectic" } else { "non-symplectic" },
            if central { "present" } else { "absent" }
        ),
    );
}
