use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::Serialize;

use super::SpacetimeModel;
use crate::chart::{ChartPoint, Coord, SampleSet};
use crate::displays;
use crate::error::Result;
use crate::expr::{scaled_residual, Expr};
use crate::form::{Blade, KForm};
use crate::report::{form_check, scalar_check, CheckReport, Tolerances};

use Coord::*;

fn minus(form: &KForm) -> KForm {
    form.scale(&Expr::constant(-1.0))
}

fn zero(k: usize) -> KForm {
    KForm::zero(k).expect("degree within range")
}

/// Structural checks of the metric, the warp and `⋆1` against the
/// printed closed forms.
pub fn verify_structure(model: &SpacetimeModel, samples: &SampleSet, tol: &Tolerances) -> Vec<CheckReport> {
    let pts = &samples.points;
    let mut out = Vec::new();

    let name = "metric.display";
    let reference = displays::metric();
    let worst = pts.iter().try_fold((0.0f64, 0usize, 0usize), |(w, wi, i), p| {
        let a = model.metric().eval(p)?;
        let b = reference.eval(p)?;
        let res = a
            .iter()
            .zip(b.iter())
            .fold(0.0f64, |m, (x, y)| m.max(scaled_residual(*x, *y)));
        Ok::<_, crate::Error>(if res > w { (res, i, i + 1) } else { (w, wi, i + 1) })
    });
    out.push(match worst {
        Ok((w, wi, _)) => CheckReport::below(name, tol.get(name, 1e-12), w, pts.get(wi).copied()),
        Err(e) => CheckReport::failed(name, tol.get(name, 1e-12), &e),
    });

    // g = g0 - e^{2φ} dt⊗dt with g0 free of dt, and e^{2φ} = 1 - 2m/r
    let name = "metric.warp_decomposition";
    let e2phi = (2.0 * model.warp()).exp();
    let mut parts: Vec<(Expr, Expr)> = [U, V, R, T]
        .iter()
        .map(|&c| (model.spatial_metric_entry(c, T), Expr::zero()))
        .collect();
    parts.push((model.metric().entry(T, T).clone(), -&e2phi));
    parts.push((e2phi, displays::lapse_squared()));
    let lhs = KForm::from_terms(1, parts.iter().take(4).enumerate().map(|(i, (e, _))| {
        (Blade::single(Coord::from_index(i).unwrap()), e.clone())
    }))
    .unwrap();
    let mut report = form_check(name, tol.get(name, 1e-12), &lhs, &zero(1), pts);
    for (a, b) in parts.iter().skip(4) {
        let extra = scalar_check(name, report.threshold, a, b, pts);
        if extra.error.is_some() || extra.worst_error > report.worst_error {
            report = extra;
        }
    }
    out.push(report.with_seed(samples.seed));

    let name = "metric.signature";
    let bad = pts
        .iter()
        .map(|p| model.metric().is_lorentzian_at(p))
        .collect::<Result<Vec<bool>>>();
    out.push(match bad {
        Ok(flags) => {
            let first_bad = flags.iter().position(|ok| !ok);
            let count = flags.iter().filter(|ok| !**ok).count() as f64;
            CheckReport::below(name, tol.get(name, 0.5), count, first_bad.map(|i| pts[i]))
                .with_note("worst_error counts samples whose signature is not (+,+,+,-)")
        }
        Err(e) => CheckReport::failed(name, tol.get(name, 0.5), &e),
    });

    let name = "volume.display";
    out.push(form_check(name, tol.get(name, 1e-12), model.volume(), &displays::volume(), pts));

    let name = "omega.display";
    out.push(form_check(name, tol.get(name, 1e-12), model.omega(), &displays::omega(), pts));

    out.into_iter().map(|r| r.with_seed(samples.seed)).collect()
}

/// `ι_R g = -dφ`, checked against the derivative of the warp and against
/// the printed coefficient.
pub fn verify_gradient_relation(model: &SpacetimeModel, samples: &SampleSet, tol: &Tolerances) -> Vec<CheckReport> {
    let flat_r = model.metric().flat(model.gravity());
    let minus_dphi = minus(&model.dphi());
    let name = "gradient.relation";
    let relation = form_check(name, tol.get(name, 1e-11), &flat_r, &minus_dphi, &samples.points);
    let name = "gradient.display";
    let display = form_check(name, tol.get(name, 1e-12), &minus_dphi, &displays::minus_dphi(), &samples.points);
    vec![relation.with_seed(samples.seed), display.with_seed(samples.seed)]
}

/// `g(X, X) = -1` and `g(R, X) = 0`.
pub fn verify_observer(model: &SpacetimeModel, samples: &SampleSet, tol: &Tolerances) -> Vec<CheckReport> {
    let g = model.metric();
    let xx = g.inner(model.observer(), model.observer());
    let rx = g.inner(model.gravity(), model.observer());
    let name = "observer.unit";
    let unit = scalar_check(name, tol.get(name, 1e-12), &xx, &Expr::constant(-1.0), &samples.points);
    let name = "observer.orthogonal";
    let orth = scalar_check(name, tol.get(name, 1e-12), &rx, &Expr::zero(), &samples.points);
    vec![unit.with_seed(samples.seed), orth.with_seed(samples.seed)]
}

/// `ω ∧ ω = 0`, `dω = -dφ ∧ ω` and the printed volume-form expression of `dω`.
pub fn verify_omega_identities(model: &SpacetimeModel, samples: &SampleSet, tol: &Tolerances) -> Vec<CheckReport> {
    let pts = &samples.points;
    let omega = model.omega();
    let build = || -> Result<(KForm, KForm, KForm, KForm)> {
        let ww = omega.wedge(omega)?;
        let d_omega = omega.d()?;
        let rhs = minus(&model.dphi().wedge(omega)?);
        let grr = model.metric().inner(model.gravity(), model.gravity());
        let coeff = -(grr / (4.0 * PI * model.lapse())) * Expr::r().powi(2) * Expr::u().sin();
        let display = KForm::monomial(coeff, &[U, V, R])?;
        Ok((ww, d_omega, rhs, display))
    };
    let names = ["omega.wedge_self", "omega.closure_defect", "omega.volume_display"];
    let defaults = [1e-12, 1e-11, 1e-11];
    let out = match build() {
        Ok((ww, d_omega, rhs, display)) => vec![
            form_check(names[0], tol.get(names[0], defaults[0]), &ww, &zero(4), pts),
            form_check(names[1], tol.get(names[1], defaults[1]), &d_omega, &rhs, pts),
            form_check(names[2], tol.get(names[2], defaults[2]), &d_omega, &display, pts),
        ],
        Err(e) => names
            .iter()
            .zip(defaults)
            .map(|(n, d)| CheckReport::failed(n, tol.get(n, d), &e))
            .collect(),
    };
    out.into_iter().map(|r| r.with_seed(samples.seed)).collect()
}

/// Closedness and nondegeneracy of `ϖ = e^φ ω + ⋆ω`, together with the
/// properties of `⋆ω` used along the way.
pub fn verify_symplectic(model: &SpacetimeModel, samples: &SampleSet, tol: &Tolerances) -> Vec<CheckReport> {
    let pts = &samples.points;
    let mut out = Vec::new();
    let mut push = |r: CheckReport| out.push(r.with_seed(samples.seed));
    let star = model.star_omega();
    let varpi = model.varpi();

    let e_omega = model.omega().scale(&model.lapse());
    let name = "theorem.closed_e_phi_omega";
    push(match e_omega.d() {
        Ok(d) => form_check(name, tol.get(name, 1e-11), &d, &zero(3), pts),
        Err(e) => CheckReport::failed(name, tol.get(name, 1e-11), &e),
    });

    let name = "theorem.star_omega_display";
    push(form_check(name, tol.get(name, 1e-12), star, &displays::star_omega(), pts));

    let name = "theorem.star_omega_potential";
    let potential = KForm::monomial(model.lapse() / (4.0 * PI), &[T]).and_then(|p| p.d());
    push(match potential {
        Ok(dp) => form_check(name, tol.get(name, 1e-12), star, &dp, pts),
        Err(e) => CheckReport::failed(name, tol.get(name, 1e-12), &e),
    });

    let name = "theorem.star_omega_degenerate";
    push(match star.wedge(star) {
        Ok(ss) => form_check(name, tol.get(name, 1e-12), &ss, &zero(4), pts),
        Err(e) => CheckReport::failed(name, tol.get(name, 1e-12), &e),
    });

    let name = "theorem.varpi_closed";
    push(match varpi.d() {
        Ok(d) => form_check(name, tol.get(name, 1e-11), &d, &zero(3), pts),
        Err(e) => CheckReport::failed(name, tol.get(name, 1e-11), &e),
    });

    let name = "theorem.top_power";
    let grr = model.metric().inner(model.gravity(), model.gravity());
    let factor = 2.0 * model.lapse() * grr / ((4.0 * PI) * (4.0 * PI));
    let rhs = model.volume().scale(&factor);
    push(match varpi.wedge(varpi) {
        Ok(ww) => form_check(name, tol.get(name, 1e-11), &ww, &rhs, pts),
        Err(e) => CheckReport::failed(name, tol.get(name, 1e-11), &e),
    });

    push(nondegeneracy(model, pts, tol));
    out
}

fn nondegeneracy(model: &SpacetimeModel, pts: &[ChartPoint], tol: &Tolerances) -> CheckReport {
    let name = "theorem.nondegenerate";
    let threshold = tol.get(name, 0.0);
    let top = match model.varpi().wedge(model.varpi()) {
        Ok(t) => t.coeff(Blade::VOLUME),
        Err(e) => return CheckReport::failed(name, threshold, &e),
    };
    let values = match pts.iter().map(|p| top.eval(p)).collect::<Result<Vec<f64>>>() {
        Ok(v) => v,
        Err(e) => return CheckReport::failed(name, threshold, &e),
    };
    let (min_idx, min_abs) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, b), (i, v)| if v.abs() < b { (i, v.abs()) } else { (bi, b) });
    let positive = values.iter().filter(|v| **v > 0.0).count();
    let flips = positive.min(values.len() - positive);
    let mut report = CheckReport::above(name, threshold, min_abs, pts.get(min_idx).copied())
        .with_value("sign_flips", flips as f64)
        .with_note("worst_error is the smallest |ϖ∧ϖ| coefficient; must exceed threshold with one sign");
    if flips > 0 {
        report.pass = false;
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoliationSample {
    pub point: ChartPoint,
    /// `ω_{uv}`: Pfaffian of `ω` restricted to the sphere through the point.
    pub pfaffian: f64,
    /// `ω_{uv} / (r² sin u)`: Pfaffian against the induced leaf area.
    pub leaf_density: f64,
    /// Coefficient of `-dφ ∧ ω` on `du ∧ dv ∧ dr`.
    pub volume3: f64,
    /// `sin u` below [`POLE_SIN_THRESHOLD`]: the small Pfaffian there is a
    /// coordinate effect, not a geometric one.
    pub near_pole: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoliationReport {
    pub leaf_nondegenerate: bool,
    pub min_leaf_density: f64,
    pub min_pfaffian: f64,
    pub volume3_nonvanishing: bool,
    pub min_volume3: f64,
    /// Always true: a 2-form restricted to a 2-dimensional leaf is closed.
    pub closed_on_leaves: bool,
    pub pole_degeneracy: bool,
    pub threshold: f64,
    pub seed: Option<u64>,
    pub sampled_points: Vec<FoliationSample>,
}

pub const POLE_SIN_THRESHOLD: f64 = 1e-3;

impl FoliationReport {
    pub fn checks(&self) -> Vec<CheckReport> {
        let worst = |key: fn(&FoliationSample) -> f64| {
            self.sampled_points
                .iter()
                .min_by(|a, b| key(a).abs().total_cmp(&key(b).abs()))
                .map(|s| s.point)
        };
        let mut leaf = CheckReport::above(
            "foliation.leaf_nondegenerate",
            self.threshold,
            self.min_leaf_density,
            worst(|s| s.leaf_density),
        )
        .with_value("min_pfaffian", self.min_pfaffian)
        .with_note("worst_error is min |ω_uv| / (r² sin u) over samples");
        if self.pole_degeneracy {
            leaf = leaf.with_value("pole_samples", 1.0);
        }
        let vol = CheckReport::above(
            "foliation.volume3",
            self.threshold,
            self.min_volume3,
            worst(|s| s.volume3),
        )
        .with_note("worst_error is min |(-dφ∧ω)_{uvr}| over samples");
        [leaf, vol]
            .into_iter()
            .map(|r| match self.seed {
                Some(s) => r.with_seed(s),
                None => r,
            })
            .collect()
    }
}

pub fn foliation_report(model: &SpacetimeModel, samples: &SampleSet, threshold: f64) -> Result<FoliationReport> {
    let mut rep = foliation_report_at(model, &samples.points, threshold)?;
    rep.seed = Some(samples.seed);
    Ok(rep)
}

/// Leafwise symplectic data at explicit points.
pub fn foliation_report_at(model: &SpacetimeModel, points: &[ChartPoint], threshold: f64) -> Result<FoliationReport> {
    let uv = Blade::from_coords(&[U, V]).unwrap().0;
    let uvr = Blade::from_coords(&[U, V, R]).unwrap().0;
    let pf = model.omega().coeff(uv);
    let vol3 = minus(&model.dphi().wedge(model.omega())?).coeff(uvr);
    let mut sampled = Vec::with_capacity(points.len());
    for p in points {
        let pfaffian = pf.eval(p)?;
        let s = libm::sin(p.u);
        sampled.push(FoliationSample {
            point: *p,
            pfaffian,
            leaf_density: pfaffian / (p.r * p.r * s),
            volume3: vol3.eval(p)?,
            near_pole: s < POLE_SIN_THRESHOLD,
        });
    }
    let min_abs = |key: fn(&FoliationSample) -> f64| {
        sampled.iter().map(|s| key(s).abs()).fold(f64::INFINITY, f64::min)
    };
    let min_leaf_density = min_abs(|s| s.leaf_density);
    let min_volume3 = min_abs(|s| s.volume3);
    Ok(FoliationReport {
        leaf_nondegenerate: min_leaf_density > threshold,
        min_leaf_density,
        min_pfaffian: min_abs(|s| s.pfaffian),
        volume3_nonvanishing: min_volume3 > threshold,
        min_volume3,
        closed_on_leaves: true,
        pole_degeneracy: sampled.iter().any(|s| s.near_pole),
        threshold,
        seed: None,
        sampled_points: sampled,
    })
}
