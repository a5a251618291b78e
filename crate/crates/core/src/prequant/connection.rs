use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chart::{ChartPoint, Coord};
use crate::displays;
use crate::error::Result;
use crate::expr::Expr;
use crate::field::VectorField;
use crate::form::KForm;
use crate::report::{form_check, CheckReport};
use crate::spacetime::SpacetimeModel;

use super::section::{complex_scaled_residual, Section};

/// Normalization of the curvature.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    /// `dθ = ϖ/m`, curvature `-(i/m)ϖ`.
    #[default]
    Paper,
    /// `dθ = ϖ/(2πm)`, curvature `-(i/(2πm))ϖ`.
    Weil,
}

impl ScaleMode {
    /// Factor `s` with `dθ = s·ϖ/m`.
    pub fn factor(self) -> f64 {
        match self {
            ScaleMode::Paper => 1.0,
            ScaleMode::Weil => 1.0 / (2.0 * PI),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScaleMode::Paper => "paper",
            ScaleMode::Weil => "weil",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(ScaleMode::Paper),
            "weil" => Some(ScaleMode::Weil),
            _ => None,
        }
    }
}

/// 1-form `θ` of the connection `∇ = d - iθ` on the cut chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionPotential {
    pub theta: KForm,
    pub mode: ScaleMode,
}

impl ConnectionPotential {
    /// Monopole-type potential regular at the north pole,
    /// `(s/m)[(m/4π)(1 - cos u) dv + (e^φ/4π) dt]`.
    pub fn standard(mode: ScaleMode) -> Self {
        let theta = displays::connection_potential().scale(&Expr::constant(mode.factor()));
        ConnectionPotential { theta, mode }
    }

    /// `θ = 0`, the flat connection.
    pub fn flat() -> Self {
        ConnectionPotential { theta: KForm::zero(1).expect("degree 1"), mode: ScaleMode::Paper }
    }

    /// `θ + dχ`; sections transform as `ψ ↦ e^{iχ}ψ`.
    pub fn gauge_shift(&self, chi: &Expr) -> Self {
        let d_chi = KForm::scalar(chi.clone()).d().expect("degree 0");
        ConnectionPotential { theta: self.theta.add(&d_chi).expect("degree 1"), mode: self.mode }
    }

    /// `θ(X)`.
    pub fn pair(&self, x: &VectorField) -> Expr {
        self.theta.interior(x).expect("degree 1").coeff(crate::form::Blade::EMPTY)
    }

    /// `∇_X ψ = X(ψ) - i θ(X) ψ`.
    pub fn covariant_derivative(&self, x: &VectorField, psi: &Section) -> Section {
        let th = self.pair(x);
        psi.derive(x).sub(&psi.scale(&th).times_i())
    }

    /// `dθ` against `s·ϖ/m`.
    pub fn curvature_form_check(&self, model: &SpacetimeModel, threshold: f64, pts: &[ChartPoint]) -> CheckReport {
        let name = "connection.d_theta";
        let lhs = match self.theta.d() {
            Ok(l) => l,
            Err(e) => return CheckReport::failed(name, threshold, &e),
        };
        let rhs = model.varpi().scale(&(self.mode.factor() / Expr::mass()));
        form_check(name, threshold, &lhs, &rhs, pts).with_note(self.mode.name())
    }
}

/// `([∇_a, ∇_b] - ∇_{[a,b]})ψ + i(s/m)ϖ(a, b)ψ` as a section.
pub fn curvature_defect(
    model: &SpacetimeModel,
    conn: &ConnectionPotential,
    a: &VectorField,
    b: &VectorField,
    psi: &Section,
) -> Result<Section> {
    let ab = conn.covariant_derivative(a, &conn.covariant_derivative(b, psi));
    let ba = conn.covariant_derivative(b, &conn.covariant_derivative(a, psi));
    let bracket = conn.covariant_derivative(&a.lie_bracket(b), psi);
    let w = model.varpi().apply(&[a, b])? * (conn.mode.factor() / Expr::mass());
    Ok(ab.sub(&ba).sub(&bracket).add(&psi.scale(&w).times_i()))
}

/// Worst scaled curvature defect over field pairs, sections and points,
/// measured against the size of `[∇_a, ∇_b]ψ`.
pub fn curvature_check(
    model: &SpacetimeModel,
    conn: &ConnectionPotential,
    fields: &[VectorField],
    sections: &[Section],
    pts: &[ChartPoint],
    threshold: f64,
) -> CheckReport {
    let name = "connection.curvature";
    let mut worst = (0.0f64, None);
    let mut mag = 0.0f64;
    for (i, a) in fields.iter().enumerate() {
        for b in &fields[i + 1..] {
            for psi in sections {
                let step = curvature_defect(model, conn, a, b, psi).and_then(|defect| {
                    let comm = conn
                        .covariant_derivative(a, &conn.covariant_derivative(b, psi))
                        .sub(&conn.covariant_derivative(b, &conn.covariant_derivative(a, psi)));
                    let mut out = Vec::with_capacity(pts.len());
                    for p in pts {
                        out.push((defect.eval(p)?, comm.eval(p)?, *p));
                    }
                    Ok(out)
                });
                match step {
                    Ok(vals) => {
                        for (d, c, p) in vals {
                            let res = complex_scaled_residual(d + c, c);
                            mag = mag.max(c.norm());
                            if res > worst.0 || worst.1.is_none() {
                                worst = (res, Some(p));
                            }
                        }
                    }
                    Err(e) => return CheckReport::failed(name, threshold, &e),
                }
            }
        }
    }
    CheckReport::below(name, threshold, worst.0, worst.1).with_magnitude(mag).with_note(conn.mode.name())
}

/// Coordinate fields followed by a few non-commuting combinations.
pub fn curvature_test_fields() -> Vec<VectorField> {
    let mut out: Vec<VectorField> = Coord::ALL.iter().map(|&c| VectorField::basis(c)).collect();
    out.push(VectorField::new([Expr::r().sin(), Expr::t(), Expr::u().cos(), Expr::one()]));
    out.push(VectorField::new([Expr::zero(), Expr::u() * Expr::r(), Expr::t().cos(), Expr::v()]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::SampleSet;
    use crate::prequant::section::test_sections;
    use num_complex::Complex64;

    #[test]
    fn d_theta_matches_varpi_in_both_modes() {
        let model = SpacetimeModel::schwarzschild(1.0).unwrap();
        let s = SampleSet::seeded(1.0, 4, 100).unwrap();
        for mode in [ScaleMode::Paper, ScaleMode::Weil] {
            let r = ConnectionPotential::standard(mode).curvature_form_check(&model, 1e-11, &s.points);
            assert!(r.pass, "{r:?}");
        }
        let bad = ConnectionPotential { mode: ScaleMode::Weil, ..ConnectionPotential::standard(ScaleMode::Paper) };
        assert!(!bad.curvature_form_check(&model, 1e-11, &s.points).pass);
    }

    #[test]
    fn derivative_of_unit_section_along_t() {
        let conn = ConnectionPotential::standard(ScaleMode::Paper);
        let p = ChartPoint::new(1.0, 1.0, 4.0, 0.0, 1.0).unwrap();
        let got = conn
            .covariant_derivative(&VectorField::basis(Coord::T), &Section::real(Expr::one()))
            .eval(&p)
            .unwrap();
        let want = -Complex64::i() * (0.5f64.sqrt() / (4.0 * PI));
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn flat_connection_is_directional_derivative() {
        let psi = Section::polar(&Expr::r(), &Expr::t());
        let x = VectorField::basis(Coord::R);
        let p = ChartPoint::new(1.0, 1.0, 4.0, 0.3, 1.0).unwrap();
        let got = ConnectionPotential::flat().covariant_derivative(&x, &psi).eval(&p).unwrap();
        assert_eq!(got, psi.derive(&x).eval(&p).unwrap());
    }

    #[test]
    fn curvature_identity_on_sections() {
        let model = SpacetimeModel::schwarzschild(1.0).unwrap();
        let s = SampleSet::seeded(1.0, 9, 25).unwrap();
        let sections = test_sections(2, 3);
        for mode in [ScaleMode::Paper, ScaleMode::Weil] {
            let conn = ConnectionPotential::standard(mode);
            let r = curvature_check(&model, &conn, &curvature_test_fields(), &sections, &s.points, 1e-9);
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn gauge_shift_is_covariant() {
        let conn = ConnectionPotential::standard(ScaleMode::Paper);
        let chi = Expr::r() * Expr::u().sin() + Expr::t() * Expr::v();
        let shifted = conn.gauge_shift(&chi);
        let psi = Section::polar(&(Expr::r() + Expr::u()), &(2.0 * Expr::v()));
        let moved = psi.scale_complex(&chi.cos(), &chi.sin());
        let s = SampleSet::seeded(1.0, 1, 20).unwrap();
        for c in Coord::ALL {
            let x = VectorField::basis(c);
            let a = conn.covariant_derivative(&x, &psi);
            let b = shifted.covariant_derivative(&x, &moved);
            for p in &s.points {
                let phase = Complex64::from_polar(1.0, chi.eval(p).unwrap());
                let lhs = b.eval(p).unwrap();
                let rhs = phase * a.eval(p).unwrap();
                assert!(complex_scaled_residual(lhs, rhs) < 1e-10);
            }
        }
    }
}
