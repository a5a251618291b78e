//! Frozen values at one exterior point, computed independently at 30 digits
//! from the closed forms of ω, ϖ and the brackets.

use sws_core::chart::{ChartPoint, Coord};
use sws_core::expr::scaled_residual;
use sws_core::symplectic::{hamiltonian_field, surface_integral, PoissonBracket, QuadratureSpec};
use sws_core::{Blade, Expr, SpacetimeModel};

use Coord::*;

const M: f64 = 1.7;

fn point() -> ChartPoint {
    ChartPoint::new(0.7, 2.9, 5.3, -1.1, M).unwrap()
}

fn coeff(form: &sws_core::KForm, coords: &[Coord]) -> f64 {
    form.coeff(Blade::from_coords(coords).unwrap().0).eval(&point()).unwrap()
}

#[test]
fn forms_at_a_point() {
    let model = SpacetimeModel::schwarzschild(M).unwrap();
    let cases = [
        (coeff(model.omega(), &[U, V]), 0.145_556_912_878_353_46),
        (coeff(model.varpi(), &[U, V]), 0.087_150_864_948_441_07),
        (coeff(model.varpi(), &[R, T]), 0.008_043_562_717_855_052),
    ];
    for (got, want) in cases {
        assert!(scaled_residual(got, want) < 1e-15, "{got} vs {want}");
    }
    let top = model.varpi().wedge(model.varpi()).unwrap().coeff(Blade::VOLUME).eval(&point()).unwrap();
    assert!((top - 0.001_402_006_896_256_202_6).abs() < 1e-17);
    let grr = model.metric().inner(model.gravity(), model.gravity()).eval(&point()).unwrap();
    assert!((grr - 0.010_216_840_959_845_694).abs() < 1e-17);
}

#[test]
fn brackets_at_a_point() {
    let model = SpacetimeModel::schwarzschild(M).unwrap();
    let uv = PoissonBracket::new(&model, Expr::u(), Expr::v()).at(&point()).unwrap();
    let rt = PoissonBracket::new(&model, Expr::r(), Expr::t()).at(&point()).unwrap();
    assert!((uv - 11.474_355_424_832_622).abs() < 1e-12 * uv);
    assert!((rt - 124.323_018_925_457_75).abs() < 1e-12 * rt);
    let h_r = hamiltonian_field(&Expr::r(), &model).unwrap().field.eval(&point()).unwrap();
    assert_eq!([h_r[0], h_r[1], h_r[2]], [0.0, 0.0, 0.0]);
    assert!((h_r[3] - 124.323_018_925_457_75).abs() < 1e-12 * h_r[3]);
}

#[test]
fn sphere_integral_is_the_mass() {
    let model = SpacetimeModel::schwarzschild(M).unwrap();
    let res = surface_integral(model.varpi(), &QuadratureSpec::new(32, 64, 5.3, -1.1), &model).unwrap();
    assert!((res.value - M).abs() < 1e-13);
}
