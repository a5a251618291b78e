//! Prequantum connection with curvature `-(i/m)ϖ` on the cut chart, the
//! operator assignment `f̂ = m∇_{H_f} - f`, and the integrality of `ϖ`.

mod connection;
mod integrality;
mod operator;
mod radial;
mod section;

pub use connection::{curvature_check, curvature_defect, curvature_test_fields, ConnectionPotential, ScaleMode};
pub use integrality::{integrality_report, ClassNumber, CurvatureOption, IntegralityReport, INTEGER_TOLERANCE};
pub use operator::{
    apply_operator, commutator_checks, commutator_sides, geometric_operator_report, linearity_check,
    PrequantumOperator, Quantization,
};
pub use radial::{
    radial_eigen_residual, radial_residual, separable_ansatz, separable_check, separable_multiplier,
    shift_check, BoxQuadrature, RadialReport, RadialSamples,
};
pub use section::{complex_relative_residual, complex_scaled_residual, test_sections, Section};
