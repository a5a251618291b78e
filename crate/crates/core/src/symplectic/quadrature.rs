use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::Serialize;

use crate::chart::{ChartPoint, Coord};
use crate::error::{Error, Result};
use crate::form::{Blade, KForm};
use crate::report::CheckReport;
use crate::spacetime::SpacetimeModel;

/// Tensor-product rule on the sphere `{r = r0, t = t0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub n_u: usize,
    pub n_v: usize,
    pub r0: f64,
    pub t0: f64,
}

impl QuadratureSpec {
    pub fn new(n_u: usize, n_v: usize, r0: f64, t0: f64) -> Self {
        QuadratureSpec { n_u, n_v, r0, t0 }
    }

    pub fn validate(&self, m: f64) -> Result<()> {
        if self.n_u < 2 {
            return Err(Error::InvalidParameter("n_u must be at least 2"));
        }
        if self.n_v < 4 {
            return Err(Error::InvalidParameter("n_v must be at least 4"));
        }
        if !(self.r0 > 2.0 * m && self.r0.is_finite()) {
            return Err(Error::InvalidParameter("r0 must lie outside the horizon"));
        }
        if !self.t0.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite"));
        }
        Ok(())
    }

    /// Same sphere with both node counts doubled.
    pub fn doubled(&self) -> Self {
        QuadratureSpec { n_u: 2 * self.n_u, n_v: 2 * self.n_v, ..*self }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { n_u: 32, n_v: 64, r0: 3.0, t0: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    /// `|I(2n_u, 2n_v) - I(n_u, n_v)|`.
    pub error_estimate: f64,
    pub spec: QuadratureSpec,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if n == 0 { (1.0, 0.0) } else if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.reverse();
    out
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn integrate_once(a: &KForm, spec: &QuadratureSpec, m: f64) -> Result<f64> {
    let uv = Blade::from_coords(&[Coord::U, Coord::V]).unwrap().0;
    let coeff = a.coeff(uv);
    if coeff.is_zero() {
        return Ok(0.0);
    }
    let gl = gauss_legendre(spec.n_u);
    let hv = 2.0 * PI / spec.n_v as f64;
    let mut acc = Neumaier::default();
    for &(x, w) in &gl {
        let u = PI / 2.0 * (x + 1.0);
        let mut row = Neumaier::default();
        for j in 0..spec.n_v {
            // Shifted nodes keep v off the cut at v = 0.
            let v = hv * (j as f64 + 0.5);
            let p = ChartPoint::with_margin(u, v, spec.r0, spec.t0, m, 0.0)?;
            row.add(coeff.eval(&p)?);
        }
        acc.add(w * row.total());
    }
    Ok(acc.total() * PI / 2.0 * hv)
}

/// `∫_Σ a` over the sphere `{r = r0, t = t0}` with orientation `du ∧ dv`.
pub fn surface_integral(a: &KForm, spec: &QuadratureSpec, model: &SpacetimeModel) -> Result<IntegralResult> {
    if a.degree() != 2 {
        return Err(Error::BadDegree(a.degree()));
    }
    spec.validate(model.mass())?;
    let value = integrate_once(a, spec, model.mass())?;
    let fine = integrate_once(a, &spec.doubled(), model.mass())?;
    Ok(IntegralResult { value, error_estimate: (fine - value).abs(), spec: *spec })
}

/// `(n_u, |∫_Σ ϖ - m|)` for each `n_u`, with `n_v = 2 n_u`.
pub fn convergence_table(model: &SpacetimeModel, r0: f64, n_us: &[usize]) -> Result<Vec<(usize, f64)>> {
    let m = model.mass();
    n_us.iter()
        .map(|&n| {
            let spec = QuadratureSpec::new(n, (2 * n).max(4), r0, 0.0);
            spec.validate(m)?;
            Ok((n, (integrate_once(model.varpi(), &spec, m)? - m).abs()))
        })
        .collect()
}

/// Errors below this multiple of `max(1, m)` are at the rounding floor.
pub const ROUNDING_FLOOR: f64 = 1e-14;

/// Whether each error is at most `ratio` times the previous one, or
/// already at the rounding floor.
pub fn decays_geometrically(errors: &[f64], ratio: f64, floor: f64) -> bool {
    errors.windows(2).all(|w| w[1] <= floor || w[1] <= ratio * w[0])
}

/// `∫_Σ ϖ = m` on each sphere, `r0`-independence across them and the
/// convergence of the error under doubling `n_u`.
pub fn integral_checks(model: &SpacetimeModel, n_u: usize, n_v: usize, radii: &[f64], threshold: f64) -> Vec<CheckReport> {
    let m = model.mass();
    let mut out = Vec::new();
    let mut values = Vec::new();
    for &r0 in radii {
        let spec = QuadratureSpec::new(n_u, n_v, r0, 0.0);
        let name = alloc::format!("integral.varpi_equals_m[r0={}m]", r0 / m);
        let name = name.as_str();
        match surface_integral(model.varpi(), &spec, model) {
            Ok(res) => {
                values.push(res.value);
                out.push(
                    CheckReport::below(name, threshold, (res.value - m).abs(), None)
                        .with_magnitude(m)
                        .with_value("r0", r0)
                        .with_value("value", res.value)
                        .with_value("error_estimate", res.error_estimate),
                );
            }
            Err(e) => out.push(CheckReport::failed(name, threshold, &e)),
        }
    }
    let spread = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if values.len() == radii.len() && !values.is_empty() {
        out.push(CheckReport::below("integral.r0_independence", threshold, spread.1 - spread.0, None));
    }

    let name = "integral.convergence";
    let n_us = [8, 16, 32, 64];
    let r0 = radii.first().copied().unwrap_or(3.0 * m);
    out.push(match convergence_table(model, r0, &n_us) {
        Ok(table) => {
            let errs: Vec<f64> = table.iter().map(|&(_, e)| e).collect();
            let floor = ROUNDING_FLOOR * m.max(1.0);
            let ok = decays_geometrically(&errs, 0.5, floor);
            let mut rep = CheckReport::below(name, 1.0, if ok { 0.0 } else { 1.0 }, None).with_note(
                "error at least halves under each doubling of n_u, or sits at the rounding floor",
            );
            for (n, e) in table {
                rep = rep.with_value(&alloc::format!("n_u={n:02}"), e);
            }
            rep
        }
        Err(e) => CheckReport::failed(name, 1.0, &e),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [2usize, 3, 5, 8, 16, 32, 64] {
            let gl = gauss_legendre(n);
            assert_eq!(gl.len(), n);
            let total: f64 = gl.iter().map(|&(_, w)| w).sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            // exact for degree 2n-1
            let deg = 2 * n - 2;
            let got: f64 = gl.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
            assert!((got - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
            assert!(gl.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn varpi_integrates_to_mass() {
        for (m, r0) in [(1.0, 3.0), (2.5, 25.0), (1.0, 2.5), (1.0, 50.0)] {
            let model = SpacetimeModel::schwarzschild(m).unwrap();
            let res = surface_integral(model.varpi(), &QuadratureSpec::new(32, 64, r0, 0.0), &model).unwrap();
            assert!((res.value - m).abs() < 1e-10, "m={m} r0={r0}: {}", res.value);
            assert!(res.error_estimate < 1e-12);
        }
    }

    #[test]
    fn star_omega_integrates_to_zero() {
        let model = SpacetimeModel::schwarzschild(1.0).unwrap();
        let res = surface_integral(model.star_omega(), &QuadratureSpec::default(), &model).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn warped_omega_at_larger_mass() {
        let model = SpacetimeModel::schwarzschild(2.5).unwrap();
        let a = model.omega().scale(&model.lapse());
        let res = surface_integral(&a, &QuadratureSpec::new(32, 64, 10.0, 0.0), &model).unwrap();
        assert!((res.value - 2.5).abs() < 1e-10);
    }

    #[test]
    fn invalid_specs() {
        let model = SpacetimeModel::schwarzschild(1.0).unwrap();
        for spec in [
            QuadratureSpec::new(1, 64, 3.0, 0.0),
            QuadratureSpec::new(8, 3, 3.0, 0.0),
            QuadratureSpec::new(8, 8, 2.0, 0.0),
        ] {
            assert!(surface_integral(model.varpi(), &spec, &model).is_err());
        }
        assert!(surface_integral(model.volume(), &QuadratureSpec::default(), &model).is_err());
    }

    #[test]
    fn convergence_is_geometric_to_the_floor() {
        let model = SpacetimeModel::schwarzschild(1.0).unwrap();
        let table = convergence_table(&model, 3.0, &[2, 4, 8, 16, 32, 64]).unwrap();
        let errs: Vec<f64> = table.iter().map(|&(_, e)| e).collect();
        assert!(errs[0] > 1e-3);
        assert!(decays_geometrically(&errs, 0.5, ROUNDING_FLOOR));
        assert!(errs[4] < 1e-12);
    }

    #[test]
    fn integral_checks_pass() {
        for m in [1.0, 2.5] {
            let model = SpacetimeModel::schwarzschild(m).unwrap();
            for r in integral_checks(&model, 32, 64, &[2.5 * m, 5.0 * m, 50.0 * m], 1e-10) {
                assert!(r.pass, "{:?}", r);
            }
        }
    }
}
