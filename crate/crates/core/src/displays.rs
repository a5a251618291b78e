//! Closed forms of the Schwarzschild objects, entered by hand.
//!
//! Nothing here is derived through the exterior-calculus pipeline; these
//! are the reference values the pipeline is checked against.

use core::f64::consts::PI;

use crate::chart::Coord;
use crate::expr::Expr;
use crate::field::VectorField;
use crate::form::KForm;
use crate::metric::MetricTensor;

use Coord::*;

/// `1 - 2m/r`.
pub fn lapse_squared() -> Expr {
    1.0 - 2.0 * Expr::mass() / Expr::r()
}

fn lapse_pow(num: i32, den: i32) -> Expr {
    Expr::pow(&lapse_squared(), crate::expr::Rational::new(num, den))
}

pub fn metric() -> MetricTensor {
    let r2 = Expr::r().powi(2);
    MetricTensor::diagonal([
        r2.clone(),
        r2 * Expr::u().sin().powi(2),
        lapse_pow(-1, 1),
        -lapse_squared(),
    ])
    .expect("Schwarzschild metric is nondegenerate")
}

/// `φ = ln (1 - 2m/r)^{1/2}`.
pub fn warp() -> Expr {
    lapse_pow(1, 2).ln()
}

/// `R = -(m/r²) ∂/∂r`.
pub fn gravity_field() -> VectorField {
    VectorField::along(R, -(Expr::mass() / Expr::r().powi(2)))
}

/// `X = -(1 - 2m/r)^{-1/2} ∂/∂t`.
pub fn observer_field() -> VectorField {
    VectorField::along(T, -lapse_pow(-1, 2))
}

/// `-dφ = -(m/r²)(1 - 2m/r)^{-1} dr`.
pub fn minus_dphi() -> KForm {
    KForm::monomial(-(Expr::mass() / Expr::r().powi(2)) * lapse_pow(-1, 1), &[R]).unwrap()
}

/// `⋆1 = r² sin(u) du ∧ dv ∧ dr ∧ dt`.
pub fn volume() -> KForm {
    KForm::monomial(Expr::r().powi(2) * Expr::u().sin(), &[U, V, R, T]).unwrap()
}

/// `ω = (m/4π)(1 - 2m/r)^{-1/2} sin(u) du ∧ dv`.
pub fn omega() -> KForm {
    let c = Expr::mass() / (4.0 * PI) * lapse_pow(-1, 2) * Expr::u().sin();
    KForm::monomial(c, &[U, V]).unwrap()
}

/// `⋆ω = (m/4πr²)(1 - 2m/r)^{-1/2} dr ∧ dt`.
pub fn star_omega() -> KForm {
    let c = Expr::mass() / (4.0 * PI * Expr::r().powi(2)) * lapse_pow(-1, 2);
    KForm::monomial(c, &[R, T]).unwrap()
}

/// Potential `e^φ dt / 4π` of `⋆ω`, with `e^φ = (1 - 2m/r)^{1/2}`.
pub fn star_omega_potential() -> KForm {
    KForm::monomial(lapse_pow(1, 2) / (4.0 * PI), &[T]).unwrap()
}

/// Printed Hamiltonian field of a coordinate function.
pub fn hamiltonian(c: Coord) -> VectorField {
    let m = Expr::mass();
    let angular = 4.0 * PI / (&m * Expr::u().sin());
    let radial = 4.0 * PI * Expr::r().powi(2) / &m * lapse_pow(1, 2);
    match c {
        U => VectorField::along(V, angular),
        V => VectorField::along(U, -angular),
        R => VectorField::along(T, radial),
        T => VectorField::along(R, -radial),
    }
}

/// Printed Poisson bracket of two coordinate functions.
pub fn bracket(a: Coord, b: Coord) -> Expr {
    let m = Expr::mass();
    let uv = 4.0 * PI / (&m * Expr::u().sin());
    let rt = 4.0 * PI * Expr::r().powi(2) / &m * lapse_pow(1, 2);
    match (a, b) {
        (U, V) => uv,
        (V, U) => -uv,
        (R, T) => rt,
        (T, R) => -rt,
        _ => Expr::zero(),
    }
}

/// The function whose operator appears on the right of a printed
/// coordinate commutator, with the `4πi` prefactor removed:
/// `[û, v̂] = 4πi (sin u)^{-1}-hat` and `[r̂, t̂] = 4πi (r²(1-2m/r)^{1/2})-hat`.
pub fn commutator_symbol(a: Coord, b: Coord) -> Expr {
    let uv = Expr::one() / Expr::u().sin();
    let rt = Expr::r().powi(2) * lapse_pow(1, 2);
    match (a, b) {
        (U, V) => uv,
        (V, U) => -uv,
        (R, T) => rt,
        (T, R) => -rt,
        _ => Expr::zero(),
    }
}

/// Default potential `θ = (1/m)[(m/4π)(1 - cos u) dv + (e^φ/4π) dt]` with `dθ = ϖ/m`.
pub fn connection_potential() -> KForm {
    let m = Expr::mass();
    let dv = KForm::monomial(&m / (4.0 * PI) * (1.0 - Expr::u().cos()) / &m, &[V]).unwrap();
    let dt = KForm::monomial(lapse_pow(1, 2) / (4.0 * PI) / &m, &[T]).unwrap();
    dv.add(&dt).unwrap()
}

/// Identifiers of every displayed identity the verification suite covers.
pub const CATALOGUE: &[&str] = &[
    "metric",
    "warp_decomposition",
    "gradient_of_minus_phi",
    "observer_unit_orthogonal",
    "volume_form",
    "omega_contraction",
    "omega_degenerate",
    "omega_not_closed",
    "omega_volume_on_q",
    "foliation_leaves_symplectic",
    "foliation_volume",
    "star_omega_exact",
    "star_omega_degenerate",
    "theorem_closed",
    "theorem_top_power",
    "hamiltonian_fields",
    "poisson_brackets",
    "sphere_integral",
    "curvature",
    "commutator_relation",
    "coordinate_commutators",
    "area_volume_operators",
    "radial_eigen_equation",
    "integrality_conundrum",
];
