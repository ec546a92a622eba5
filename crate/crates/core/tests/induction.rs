use nilgevrey::induction::CovectorPair;
use nilgevrey::induction::{
    central_reduction, check_assumptions, compute_s, derive_operator, derived_representation,
    has_central_v1_element, poisson_rank_probe, reduce_ansatz, representation_oracle, Phase,
    ProbeOptions, Route,
};
use nilgevrey::lie::StratifiedAlgebra;
use nilgevrey::poly::parse_poly;
use nilgevrey::presets::{fields_of, preset, Problem};

fn load(name: &str) -> (Problem, StratifiedAlgebra, CovectorPair) {
    let p = preset(name).unwrap();
    let alg = p.algebra.as_ref().unwrap().parse().unwrap().algebra;
    let pair = p.covectors.as_ref().unwrap().build(&alg).unwrap();
    (p, alg, pair)
}

#[test]
fn engel_operator_matches_hand_bch() {
    let (_, alg, pair) = load("engel");
    let report = check_assumptions(&alg, &pair);
    assert!(report.passed());
    let sset = compute_s(&alg, &pair).unwrap();
    assert_eq!(sset.s, vec![0]);
    assert_eq!((sset.n, sset.r), (1, 1));
    let op = derive_operator(&alg, &pair, &sset).unwrap();
    assert!(!op.has_magnetic_terms());
    let live: Vec<_> = op
        .electric
        .iter()
        .filter(|c| !c.potential().is_zero())
        .collect();
    assert_eq!(live.len(), 1);
    let expected = parse_poly("lam_e3*t1 + 1/2*lam_e4*t1^2", &op.reg).unwrap();
    assert_eq!(live[0].potential(), expected);

    let rep = derived_representation(&alg, &pair, &sset.s, Route::Bch).unwrap();
    let oracle = representation_oracle(&alg, &rep);
    assert!(oracle.passed, "{:?}", oracle.failure);
    let closed = derived_representation(&alg, &pair, &sset.s, Route::ClosedForm).unwrap();
    assert_eq!(rep.phi, closed.phi);
}

#[test]
fn central_extension_reduces_to_mu_form() {
    let (_, alg, pair) = load("central-ext");
    let sset = compute_s(&alg, &pair).unwrap();
    assert_eq!(sset.case, 3);
    assert_eq!((sset.n, sset.r), (1, 2));
    let red = central_reduction(&alg, "mu", None, None).unwrap();
    assert!(red.matches_derive);
    assert_eq!(red.electric.len(), 1);
    let t = parse_poly("t1", &red.derived.reg).unwrap();
    assert!(red.electric[0] == t || red.electric[0] == -&t);
    assert_eq!(red.constant, parse_poly("-mu^2", &red.derived.reg).unwrap());
}

#[test]
fn heisenberg_fails_strict_inequality() {
    let (_, alg, pair) = load("heisenberg");
    let report = check_assumptions(&alg, &pair);
    assert!(!report.s_less_than_m);
    assert_eq!((report.s, report.m), (1, 1));
    assert!(!has_central_v1_element(&alg).found);
}

#[test]
fn example41_sset_has_two_elements() {
    let (_, alg, pair) = load("example41");
    assert_eq!(alg.dim(), 54);
    assert_eq!((pair.s, pair.m), (2, 9));
    let report = check_assumptions(&alg, &pair);
    assert!(report.passed() && report.strong_form.passed);
    let sset = compute_s(&alg, &pair).unwrap();
    assert_eq!((sset.n, sset.r), (2, 3));
    let op = derive_operator(&alg, &pair, &sset).unwrap();
    assert!(!op.has_magnetic_terms());
}

#[test]
fn constructed_algebras_accept_a_branch() {
    for name in ["hanges-35", "filiform6", "central-2"] {
        let (_, alg, pair) = load(name);
        let sset = compute_s(&alg, &pair).unwrap();
        assert!(sset.subalgebra().all_flags(), "{name}");
        derive_operator(&alg, &pair, &sset).unwrap();
    }
    let (_, alg, pair) = load("hanges-35");
    let report = check_assumptions(&alg, &pair);
    assert!(report.pairing_vanishes.passed);
    assert!(!report.strong_form.passed);
}

#[test]
fn ansatz_reductions() {
    let p = preset("example41").unwrap();
    let fields = p.ansatz_fields().unwrap().unwrap();
    let red = reduce_ansatz(&fields, &p.ansatz_spec().unwrap()).unwrap();
    assert!(red.certified);
    assert_eq!(
        red.q,
        parse_poly("t1^14*t2^4 + t1^4*t2^14", red.q.registry()).unwrap()
    );
    assert_eq!(
        red.p,
        parse_poly("(t1^2 + t2^2)^2", red.p.registry()).unwrap()
    );

    let mut spec = p.ansatz_spec().unwrap();
    spec.coordinates[4] = Phase::Absent;
    let red = reduce_ansatz(&fields, &spec).unwrap();
    assert!(red.certified);
    assert_eq!(red.q, parse_poly("t1^14*t2^4", red.q.registry()).unwrap());

    let bg = preset("bg").unwrap();
    let red = reduce_ansatz(
        &bg.ansatz_fields().unwrap().unwrap(),
        &bg.ansatz_spec().unwrap(),
    )
    .unwrap();
    assert!(red.certified);
    assert_eq!(red.q, parse_poly("t1^2", red.q.registry()).unwrap());
    assert_eq!(red.p, parse_poly("1", red.p.registry()).unwrap());

    spec.coordinates[2] = Phase::RealExp { power: 2 };
    assert!(reduce_ansatz(&fields, &spec).is_err());
}

#[test]
fn poisson_probes() {
    let opts = ProbeOptions {
        samples: 16,
        ..Default::default()
    };
    let bg = preset("bg").unwrap();
    for probe in &bg.probes[..2] {
        let r = poisson_rank_probe(&fields_of(&probe.fields).unwrap(), &opts).unwrap();
        assert!(r.symplectic, "{}: {:?}", probe.name, r.form_rank);
    }
    let p = preset("prop24").unwrap();
    let r = poisson_rank_probe(&fields_of(&p.probes[0].fields).unwrap(), &opts).unwrap();
    assert!(r.degenerate_everywhere && !r.symplectic);
    assert_eq!(r.tangent_dim, (7, 7));
    let e = preset("example41").unwrap();
    let f = fields_of(&e.probes[0].fields).unwrap();
    let r = poisson_rank_probe(&f, &opts).unwrap();
    assert!(r.symplectic, "{:?} {:?}", r.tangent_dim, r.form_rank);
}
