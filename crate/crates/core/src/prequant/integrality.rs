use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::report::CheckReport;
use crate::spacetime::SpacetimeModel;
use crate::symplectic::{surface_integral, QuadratureSpec};

/// Distance to the nearest integer below which a class number counts as
/// integral.
pub const INTEGER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassNumber {
    pub value: f64,
    pub integer: bool,
}

impl ClassNumber {
    fn of(value: f64) -> Self {
        ClassNumber { value, integer: (value - libm::round(value)).abs() < INTEGER_TOLERANCE }
    }
}

/// One of the two normalizations left open for the curvature, with its
/// class number under both pairing conventions `∫curv/i` and `∫curv/(2πi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureOption {
    pub description: String,
    pub pairing_over_i: ClassNumber,
    pub pairing_over_two_pi_i: ClassNumber,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralityReport {
    pub mass: f64,
    pub quadrature: QuadratureSpec,
    /// `∫_Σ ϖ`.
    pub integral: f64,
    pub error_estimate: f64,
    /// `∫_Σ ϖ/m`.
    pub over_m: ClassNumber,
    /// `∫_Σ ϖ/(2πm)`.
    pub over_two_pi_m: ClassNumber,
    /// Curvature `ϖ/m`: a fundamental value independent of the mass.
    pub option_varpi_over_m: CurvatureOption,
    /// Curvature `ϖ`: the class is proportional to the mass.
    pub option_varpi: CurvatureOption,
}

pub fn integrality_report(model: &SpacetimeModel, spec: &QuadratureSpec) -> Result<IntegralityReport> {
    let m = model.mass();
    let res = surface_integral(model.varpi(), spec, model)?;
    let over_m = res.value / m;
    Ok(IntegralityReport {
        mass: m,
        quadrature: *spec,
        integral: res.value,
        error_estimate: res.error_estimate,
        over_m: ClassNumber::of(over_m),
        over_two_pi_m: ClassNumber::of(over_m / (2.0 * PI)),
        option_varpi_over_m: CurvatureOption {
            description: String::from("ϖ/m is the curvature; the class is the fundamental value and m is unconstrained"),
            pairing_over_i: ClassNumber::of(over_m),
            pairing_over_two_pi_i: ClassNumber::of(over_m / (2.0 * PI)),
        },
        option_varpi: CurvatureOption {
            description: String::from("ϖ is the curvature; the class is m, so integrality quantizes the mass"),
            pairing_over_i: ClassNumber::of(res.value),
            pairing_over_two_pi_i: ClassNumber::of(res.value / (2.0 * PI)),
        },
    })
}

impl IntegralityReport {
    /// `∫ϖ = m` and `∫ϖ/m = 1` are asserted; the Weil normalization is
    /// reported only.
    pub fn checks(&self, threshold: f64) -> Vec<CheckReport> {
        let m = self.mass;
        alloc::vec![
            CheckReport::below("integrality.integral", threshold, (self.integral - m).abs(), None)
                .with_value("integral", self.integral)
                .with_magnitude(m),
            CheckReport::below("integrality.over_m", threshold, (self.over_m.value - 1.0).abs(), None)
                .with_value("over_m", self.over_m.value)
                .with_value("integer", self.over_m.integer as u8 as f64),
            CheckReport::below(
                "integrality.over_two_pi_m",
                INTEGER_TOLERANCE,
                (self.over_two_pi_m.value - libm::round(self.over_two_pi_m.value)).abs(),
                None,
            )
            .with_value("over_two_pi_m", self.over_two_pi_m.value)
            .with_value("integer", self.over_two_pi_m.integer as u8 as f64)
            .with_note("distance of ∫ϖ/(2πm) from the nearest integer")
            .report_only(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_numbers() {
        for m in [1.0, 3.0, 2.5] {
            let model = SpacetimeModel::schwarzschild(m).unwrap();
            let spec = QuadratureSpec::new(32, 64, 4.0 * m, 0.0);
            let rep = integrality_report(&model, &spec).unwrap();
            assert!((rep.integral - m).abs() < 1e-10);
            assert!(rep.over_m.integer);
            assert!((rep.over_two_pi_m.value - 0.1591549431).abs() < 1e-10);
            assert!(!rep.over_two_pi_m.integer);
            assert_eq!(rep.option_varpi.pairing_over_i.integer, m.fract() == 0.0);
            let checks = rep.checks(1e-10);
            assert!(checks.iter().all(CheckReport::satisfied));
            assert!(!checks[2].pass);
        }
    }
}
