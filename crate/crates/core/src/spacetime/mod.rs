//! Static spherically symmetric models and the forms derived from them.
//!
//! Every derived object is computed from the metric through the calculus
//! toolkit: `⋆1` by the Hodge star, `ω = -(1/4π) ι_R ι_X ⋆1`, `⋆ω` by the
//! Hodge star again and `ϖ = e^φ ω + ⋆ω`.

mod verify;

pub use verify::{
    foliation_report, foliation_report_at, verify_gradient_relation, verify_observer,
    verify_omega_identities, verify_structure, verify_symplectic, FoliationReport, FoliationSample,
};

use core::f64::consts::PI;

use crate::chart::{Coord, SampleSet};
use crate::displays;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::VectorField;
use crate::form::{Blade, KForm};
use crate::metric::MetricTensor;
use crate::report::{form_check, CheckReport};

use Coord::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Schwarzschild,
    GeneralizedStatic,
}

#[derive(Debug, Clone)]
pub struct SpacetimeModel {
    kind: ModelKind,
    mass: f64,
    warp: Expr,
    metric: MetricTensor,
    gravity: VectorField,
    observer: VectorField,
    volume: KForm,
    omega: KForm,
    star_omega: KForm,
    varpi: KForm,
    hypothesis: Option<CheckReport>,
}

/// Threshold for the `dω = -dφ ∧ ω` hypothesis in generalized models.
pub const HYPOTHESIS_THRESHOLD: f64 = 1e-11;

impl SpacetimeModel {
    /// The exterior Schwarzschild solution of mass `m`.
    pub fn schwarzschild(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter("mass must be positive and finite"));
        }
        Self::derive(
            ModelKind::Schwarzschild,
            m,
            displays::warp(),
            displays::metric(),
            displays::gravity_field(),
            displays::observer_field(),
        )
    }

    /// Static model `g = e^{-2φ} dr² + r² du² + (L/r)² dv² - e^{2φ} dt²` for
    /// a warp `φ(r)` and a leaf area form `L du ∧ dv`. The gravitational
    /// field is `grad(-φ)` and the observer is `-e^{-φ} ∂/∂t`.
    ///
    /// The hypothesis `dω = -dφ ∧ ω` is evaluated on `samples` and attached
    /// to the model rather than assumed.
    pub fn generalized_static(m: f64, warp: Expr, leaf_area: &KForm, samples: &SampleSet) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter("mass must be positive and finite"));
        }
        if [U, V, T].iter().any(|&c| warp.depends_on(c)) {
            return Err(Error::InvalidParameter("warp must depend on r only"));
        }
        let uv = Blade::from_coords(&[U, V]).unwrap().0;
        if leaf_area.degree() != 2 || leaf_area.terms().any(|(b, _)| b != uv) {
            return Err(Error::InvalidParameter("leaf area form must be a multiple of du^dv"));
        }
        let area = leaf_area.coeff(uv);
        let metric = MetricTensor::diagonal([
            Expr::r().powi(2),
            (&area / Expr::r()).powi(2),
            (-2.0 * &warp).exp(),
            -(2.0 * &warp).exp(),
        ])?;
        let minus_dphi = KForm::scalar(-&warp).d()?;
        let gravity = metric.sharp(&minus_dphi)?;
        let observer = VectorField::along(T, -(-&warp).exp());
        let mut model = Self::derive(ModelKind::GeneralizedStatic, m, warp, metric, gravity, observer)?;
        let d_omega = model.omega.d()?;
        let rhs = KForm::scalar(model.warp.clone()).d()?.wedge(&model.omega)?.scale(&Expr::constant(-1.0));
        model.hypothesis = Some(
            form_check("generalized.hypothesis", HYPOTHESIS_THRESHOLD, &d_omega, &rhs, &samples.points)
                .with_seed(samples.seed),
        );
        Ok(model)
    }

    fn derive(
        kind: ModelKind,
        mass: f64,
        warp: Expr,
        metric: MetricTensor,
        gravity: VectorField,
        observer: VectorField,
    ) -> Result<Self> {
        let volume = metric.hodge_star(&KForm::scalar(Expr::one()))?;
        let omega = volume
            .interior(&observer)?
            .interior(&gravity)?
            .scale(&Expr::constant(-1.0 / (4.0 * PI)));
        let star_omega = metric.hodge_star(&omega)?;
        let varpi = omega.scale(&warp.exp()).add(&star_omega)?;
        Ok(SpacetimeModel {
            kind,
            mass,
            warp,
            metric,
            gravity,
            observer,
            volume,
            omega,
            star_omega,
            varpi,
            hypothesis: None,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `φ`.
    pub fn warp(&self) -> &Expr {
        &self.warp
    }

    pub fn metric(&self) -> &MetricTensor {
        &self.metric
    }

    /// `R`.
    pub fn gravity(&self) -> &VectorField {
        &self.gravity
    }

    /// `X`.
    pub fn observer(&self) -> &VectorField {
        &self.observer
    }

    /// `⋆1`.
    pub fn volume(&self) -> &KForm {
        &self.volume
    }

    pub fn omega(&self) -> &KForm {
        &self.omega
    }

    pub fn star_omega(&self) -> &KForm {
        &self.star_omega
    }

    /// `ϖ`.
    pub fn varpi(&self) -> &KForm {
        &self.varpi
    }

    /// Outcome of the `dω = -dφ ∧ ω` check for generalized models.
    pub fn hypothesis(&self) -> Option<&CheckReport> {
        self.hypothesis.as_ref()
    }

    /// `e^φ`.
    pub fn lapse(&self) -> Expr {
        self.warp.exp()
    }

    /// `dφ`.
    pub fn dphi(&self) -> KForm {
        KForm::scalar(self.warp.clone()).d().expect("degree 0")
    }

    /// Copy with `R` replaced and nothing rederived.
    pub fn with_gravity(&self, gravity: VectorField) -> Self {
        SpacetimeModel { gravity, ..self.clone() }
    }

    /// Copy with `ω` replaced and nothing rederived.
    pub fn with_omega(&self, omega: KForm) -> Self {
        SpacetimeModel { omega, ..self.clone() }
    }

    /// Copy with `ϖ` replaced and nothing rederived.
    pub fn with_varpi(&self, varpi: KForm) -> Self {
        SpacetimeModel { varpi, ..self.clone() }
    }

    /// The static slice metric `g₀ = g + e^{2φ} dt ⊗ dt`.
    pub fn spatial_metric_entry(&self, a: Coord, b: Coord) -> Expr {
        let g = self.metric.entry(a, b).clone();
        if a == T && b == T {
            g + (2.0 * &self.warp).exp()
        } else {
            g
        }
    }
}
