//! CSV tables with a one-line header.

use std::f64::consts::PI;

use sws_core::chart::{ChartPoint, Coord, CoordBox};
use sws_core::displays;
use sws_core::form::Blade;
use sws_core::prequant::{BoxQuadrature, ConnectionPotential, RadialSamples, Section};
use sws_core::suite::SuiteConfig;
use sws_core::symplectic::{convergence_table, PoissonBracket};
use sws_core::{Expr, SpacetimeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum CsvKind {
    /// `{u,v}` and `{r,t}` over a `(u, r)` grid, numeric and closed form.
    BracketGrid,
    /// `du∧dv` coefficient of `ω` over a `(u, r)` grid against `(m/4π)e^{-φ} sin u`.
    OmegaCoefficient,
    /// Radial residual of `e^{iκt}` on thin shells in `r ∈ (2.2m, 20m)`.
    EigenResidual,
    /// `|∫_Σ ϖ - m|` as `n_u` grows, with `n_v = 2 n_u`.
    IntegralConvergence,
}

impl CsvKind {
    pub const ALL: [CsvKind; 4] =
        [CsvKind::BracketGrid, CsvKind::OmegaCoefficient, CsvKind::EigenResidual, CsvKind::IntegralConvergence];

    pub fn name(self) -> &'static str {
        match self {
            CsvKind::BracketGrid => "bracket_grid",
            CsvKind::OmegaCoefficient => "omega_coefficient",
            CsvKind::EigenResidual => "eigen_residual",
            CsvKind::IntegralConvergence => "integral_convergence",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error(transparent)]
    Core(#[from] sws_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Node counts of the convergence table. Beyond `n_u = 8` the error sits at
/// the rounding level; the last rows show that it stays there.
pub const CONVERGENCE_NODES: [usize; 9] = [2, 3, 4, 5, 6, 7, 8, 16, 32];

/// Grid sizes of the `(u, r)` tables.
const GRID_U: usize = 12;
const GRID_R: usize = 12;
/// Shells of the radial residual sweep.
const SHELLS: usize = 24;

fn grid(m: f64) -> impl Iterator<Item = (f64, f64)> {
    (0..GRID_U).flat_map(move |i| {
        let u = PI * (i as f64 + 0.5) / GRID_U as f64;
        (0..GRID_R).map(move |j| (u, m * (2.2 + (20.0 - 2.2) * j as f64 / (GRID_R - 1) as f64)))
    })
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, EmitError> {
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn row(w: &mut csv::Writer<Vec<u8>>, values: &[f64]) -> Result<(), EmitError> {
    w.write_record(values.iter().map(|x| format!("{x:e}")))?;
    Ok(())
}

pub fn emit(kind: CsvKind, cfg: &SuiteConfig) -> Result<String, EmitError> {
    let model = SpacetimeModel::schwarzschild(cfg.mass)?;
    match kind {
        CsvKind::BracketGrid => bracket_grid(&model),
        CsvKind::OmegaCoefficient => omega_coefficient(&model),
        CsvKind::EigenResidual => eigen_residual(&model, cfg),
        CsvKind::IntegralConvergence => integral_convergence(&model, cfg),
    }
}

fn bracket_grid(model: &SpacetimeModel) -> Result<String, EmitError> {
    let m = model.mass();
    let mut w = writer();
    w.write_record(["u", "r", "bracket_u_v", "closed_form_u_v", "bracket_r_t", "closed_form_r_t"])?;
    let uv = PoissonBracket::new(model, Expr::u(), Expr::v());
    let rt = PoissonBracket::new(model, Expr::r(), Expr::t());
    let (uv_cf, rt_cf) = (displays::bracket(Coord::U, Coord::V), displays::bracket(Coord::R, Coord::T));
    for (u, r) in grid(m) {
        let p = ChartPoint::new(u, PI, r, 0.0, m)?;
        row(&mut w, &[u, r, uv.at(&p)?, uv_cf.eval(&p)?, rt.at(&p)?, rt_cf.eval(&p)?])?;
    }
    finish(w)
}

fn omega_coefficient(model: &SpacetimeModel) -> Result<String, EmitError> {
    let m = model.mass();
    let uv = Blade::from_coords(&[Coord::U, Coord::V]).unwrap().0;
    let coeff = model.omega().coeff(uv);
    let closed = Expr::mass() / (4.0 * PI) * (-displays::warp()).exp() * Expr::u().sin();
    let mut w = writer();
    w.write_record(["u", "r", "omega_uv", "closed_form"])?;
    for (u, r) in grid(m) {
        let p = ChartPoint::new(u, PI, r, 0.0, m)?;
        row(&mut w, &[u, r, coeff.eval(&p)?, closed.eval(&p)?])?;
    }
    finish(w)
}

fn eigen_residual(model: &SpacetimeModel, cfg: &SuiteConfig) -> Result<String, EmitError> {
    let m = model.mass();
    let conn = ConnectionPotential::standard(cfg.scale_mode);
    let psi = Section::polar(&Expr::one(), &(cfg.kappa * Expr::t()));
    let base = CoordBox::default_for(m);
    let mut w = writer();
    w.write_record(["r_lo", "r_hi", "ell_star", "residual_norm", "psi_norm"])?;
    let (lo, hi) = (2.2 * m, 20.0 * m);
    for k in 0..SHELLS {
        let r = (lo + (hi - lo) * k as f64 / SHELLS as f64, lo + (hi - lo) * (k + 1) as f64 / SHELLS as f64);
        let quad = BoxQuadrature::new(CoordBox { r, ..base }, 4);
        let s = RadialSamples::collect(&psi, model, &conn, &quad)?;
        let ell = s.optimal_shift().unwrap_or(0.0);
        row(&mut w, &[r.0, r.1, ell, s.residual_norm_sq(ell).max(0.0).sqrt(), s.psi_norm_sq().sqrt()])?;
    }
    finish(w)
}

fn integral_convergence(model: &SpacetimeModel, cfg: &SuiteConfig) -> Result<String, EmitError> {
    let mut w = writer();
    w.write_record(["n_u", "n_v", "abs_error"])?;
    for (n, err) in convergence_table(model, cfg.quadrature.r0, &CONVERGENCE_NODES)? {
        w.write_record([n.to_string(), (2 * n).to_string(), format!("{err:e}")])?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(text: &str) -> Vec<Vec<f64>> {
        text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
    }

    #[test]
    fn names_round_trip() {
        for k in CsvKind::ALL {
            assert_eq!(CsvKind::from_name(k.name()), Some(k));
        }
        assert_eq!(CsvKind::from_name("nothing"), None);
    }

    #[test]
    fn omega_matches_closed_form() {
        let text = emit(CsvKind::OmegaCoefficient, &SuiteConfig::new(1.5)).unwrap();
        assert!(text.starts_with("u,r,omega_uv,closed_form\n"));
        let rows = rows(&text);
        assert_eq!(rows.len(), GRID_U * GRID_R);
        for r in rows {
            assert!((r[2] - r[3]).abs() <= 1e-14 * r[3].abs().max(1.0));
        }
    }

    #[test]
    fn brackets_match_closed_forms() {
        let text = emit(CsvKind::BracketGrid, &SuiteConfig::default()).unwrap();
        for r in rows(&text) {
            assert!((r[2] - r[3]).abs() <= 1e-10 * r[3].abs());
            assert!((r[4] - r[5]).abs() <= 1e-10 * r[5].abs());
        }
    }

    #[test]
    fn convergence_is_monotone_to_rounding() {
        for m in [1.0, 2.5, 10.0] {
            let text = emit(CsvKind::IntegralConvergence, &SuiteConfig::new(m)).unwrap();
            let errs: Vec<f64> = rows(&text).iter().map(|r| r[2]).collect();
            assert_eq!(errs.len(), CONVERGENCE_NODES.len());
            assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
            assert!(*errs.last().unwrap() < 1e-12);
        }
    }

    #[test]
    fn eigen_residual_is_finite_and_positive() {
        let text = emit(CsvKind::EigenResidual, &SuiteConfig::default()).unwrap();
        let rows = rows(&text);
        assert_eq!(rows.len(), SHELLS);
        for r in rows {
            assert!(r[3].is_finite() && r[3] > 0.0, "{r:?}");
        }
    }
}
