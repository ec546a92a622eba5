use std::sync::Arc;

use proptest::prelude::*;

use nilgevrey::lie::{bch_product, bracket, dilate, AlgebraElement, StratifiedAlgebra};
use nilgevrey::poly::Registry;
use nilgevrey::presets::preset;
use nilgevrey::scalar::rat;
use nilgevrey::{RatPoly, Rational};

fn algebra(name: &str) -> StratifiedAlgebra {
    preset(name)
        .unwrap()
        .algebra
        .unwrap()
        .parse()
        .unwrap()
        .algebra
}

fn elem(reg: &Arc<Registry>, v: &[Rational]) -> AlgebraElement {
    AlgebraElement::from_rationals(reg, v)
}

fn rats(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(n, d)| rat(n, d)).collect()
}

fn product(alg: &StratifiedAlgebra, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let reg = Registry::constants();
    bch_product(alg, &elem(&reg, x), &elem(&reg, y))
        .unwrap()
        .to_rationals()
        .unwrap()
}

#[test]
fn heisenberg_closed_form() {
    let alg = algebra("heisenberg");
    let x = rats(&[(1, 2), (-3, 1), (5, 7)]);
    let y = rats(&[(2, 3), (4, 5), (-1, 1)]);
    let z = product(&alg, &x, &y);
    let half = rat(1, 2);
    let c = &x[0] * &y[1] - &x[1] * &y[0];
    assert_eq!(z[0], &x[0] + &y[0]);
    assert_eq!(z[1], &x[1] + &y[1]);
    assert_eq!(z[2], &x[2] + &y[2] + &half * &c);
}

#[test]
fn engel_closed_form() {
    let alg = algebra("engel");
    let x = rats(&[(3, 2), (-1, 3), (2, 1), (1, 5)]);
    let y = rats(&[(-5, 4), (7, 3), (1, 9), (-2, 1)]);
    let z = product(&alg, &x, &y);
    let c = &x[0] * &y[1] - &x[1] * &y[0];
    let d = &x[0] * &y[2] - &x[2] * &y[0];
    assert_eq!(z[2], &x[2] + &y[2] + rat(1, 2) * &c);
    assert_eq!(
        z[3],
        &x[3] + &y[3] + rat(1, 2) * &d + rat(1, 12) * (&x[0] - &y[0]) * &c
    );
}

#[test]
fn symbolic_product_has_polynomial_coefficients() {
    let alg = algebra("heisenberg");
    let reg = Registry::new(
        &["x1", "x2", "x3", "y1", "y2", "y3"],
        &[] as &[&str],
        &[],
        false,
    );
    let var = |i: usize| RatPoly::var(&reg, i);
    let x = AlgebraElement::from_coeffs(&reg, (0..3).map(var).collect()).unwrap();
    let y = AlgebraElement::from_coeffs(&reg, (3..6).map(var).collect()).unwrap();
    let z = bch_product(&alg, &x, &y).unwrap();
    let expected = nilgevrey::poly::parse_poly("x3 + y3 + 1/2*x1*y2 - 1/2*x2*y1", &reg).unwrap();
    assert_eq!(z.coeff(2), &expected);
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), dim)
}

fn triple(dim: usize) -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>, Vec<Rational>)> {
    (vector(dim), vector(dim), vector(dim))
}

fn associative(name: &str, x: &[Rational], y: &[Rational], z: &[Rational]) -> bool {
    let alg = algebra(name);
    let left = product(&alg, &product(&alg, x, y), z);
    let right = product(&alg, x, &product(&alg, y, z));
    left == right
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn heisenberg_associative((x, y, z) in triple(3)) {
        prop_assert!(associative("heisenberg", &x, &y, &z));
    }

    #[test]
    fn engel_associative((x, y, z) in triple(4)) {
        prop_assert!(associative("engel", &x, &y, &z));
    }

    #[test]
    fn filiform_associative((x, y, z) in triple(7)) {
        prop_assert!(associative("filiform6", &x, &y, &z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn inverse_is_negation(x in vector(7)) {
        let alg = algebra("filiform6");
        let minus: Vec<Rational> = x.iter().map(|c| -c).collect();
        prop_assert!(product(&alg, &x, &minus).iter().all(|c| c == &rat(0, 1)));
    }

    #[test]
    fn dilation_is_an_automorphism(x in vector(7), y in vector(7), r in rational()) {
        let alg = algebra("filiform6");
        let reg = Registry::constants();
        let rho = RatPoly::constant(&reg, r);
        let (ex, ey) = (elem(&reg, &x), elem(&reg, &y));
        let lhs = dilate(&alg, &bch_product(&alg, &ex, &ey).unwrap(), &rho);
        let rhs = bch_product(&alg, &dilate(&alg, &ex, &rho), &dilate(&alg, &ey, &rho)).unwrap();
        prop_assert_eq!(lhs.to_rationals(), rhs.to_rationals());
    }

    #[test]
    fn jacobi_identity(x in vector(7), y in vector(7), z in vector(7)) {
        let alg = algebra("filiform6");
        let b = |u: &[Rational], v: &[Rational]| alg.bracket_vec(u, v);
        let sum: Vec<Rational> = (0..7)
            .map(|i| b(&x, &b(&y, &z))[i].clone() + &b(&y, &b(&z, &x))[i] + &b(&z, &b(&x, &y))[i])
            .collect();
        prop_assert!(sum.iter().all(|c| c == &rat(0, 1)));
    }

    #[test]
    fn brackets_beyond_the_step_vanish(x in vector(7), y in vector(7)) {
        let alg = algebra("filiform6");
        let reg = Registry::constants();
        let top = |v: &[Rational]| {
            let mut w = vec![rat(0, 1); 7];
            for i in alg.stratum(alg.step()) {
                w[i] = v[i].clone();
            }
            elem(&reg, &w)
        };
        prop_assert!(bracket(&alg, &elem(&reg, &x), &top(&y)).unwrap().is_zero());
        let low = bracket(&alg, &elem(&reg, &x), &elem(&reg, &y)).unwrap().to_rationals().unwrap();
        for i in alg.stratum(1) {
            prop_assert_eq!(&low[i], &rat(0, 1));
        }
    }
}
