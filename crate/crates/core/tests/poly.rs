use nilgevrey::poly::parse_poly_auto;
use nilgevrey::{F32Poly, F64Poly};

#[test]
fn evaluation_is_generic_over_float_width() {
    let (p, _) = parse_poly_auto("1/3*t1^2*t2 - t2^3 + 7/2").unwrap();
    let wide: F64Poly = p.to_float();
    let narrow: F32Poly = p.to_float();
    let exact = 1.0 / 3.0 * 4.0 * 0.5 - 0.125 + 3.5;
    assert!((wide.eval(&[2.0f64, 0.5]) - exact).abs() < 1e-14);
    assert!((narrow.eval(&[2.0f32, 0.5]) - exact as f32).abs() < 1e-6);
    assert!((p.eval(&[2.0f32, 0.5]) - exact as f32).abs() < 1e-6);
}
