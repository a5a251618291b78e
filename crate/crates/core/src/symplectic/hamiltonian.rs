use alloc::vec::Vec;

use nalgebra::{Matrix4, Vector4};

use crate::chart::{ChartPoint, Coord};
use crate::displays;
use crate::error::{Error, Result};
use crate::expr::{Expr, Node};
use crate::field::VectorField;
use crate::form::{Blade, KForm};
use crate::report::{CheckReport, Tolerances};
use crate::spacetime::{ModelKind, SpacetimeModel};

/// Solution of `ι_H ϖ = -df`.
#[derive(Debug, Clone)]
pub struct HamiltonianField {
    pub source: Expr,
    /// Symbolic solution through the closed-form inverse of `ϖ`.
    pub field: VectorField,
    /// Printed field, present when `source` is a bare coordinate of the
    /// Schwarzschild model.
    pub closed_form: Option<VectorField>,
}

/// Matrix `W_ij = ϖ(∂_i, ∂_j)` at a point.
pub fn form_matrix(form: &KForm, p: &ChartPoint) -> Result<Matrix4<f64>> {
    if form.degree() != 2 {
        return Err(Error::BadDegree(form.degree()));
    }
    let mut w = Matrix4::zeros();
    for (b, e) in form.terms() {
        let mut cs = b.coords();
        let (i, j) = (cs.next().unwrap().index(), cs.next().unwrap().index());
        let x = e.eval(p)?;
        w[(i, j)] = x;
        w[(j, i)] = -x;
    }
    Ok(w)
}

/// Differential `df` at a point as a column vector.
fn gradient_at(f: &Expr, p: &ChartPoint) -> Result<Vector4<f64>> {
    let df = KForm::scalar(f.clone()).d()?;
    let mut g = Vector4::zeros();
    for c in Coord::ALL {
        g[c.index()] = df.coeff(Blade::single(c)).eval(p)?;
    }
    Ok(g)
}

/// Pointwise LU solve of `W H = df`, equivalent to `ι_H ϖ = -df`.
pub fn solve_hamiltonian_at(f: &Expr, model: &SpacetimeModel, p: &ChartPoint) -> Result<[f64; 4]> {
    let w = form_matrix(model.varpi(), p)?;
    let rhs = gradient_at(f, p)?;
    let lu = w.lu();
    if !lu.is_invertible() {
        return Err(Error::Singular { point: *p });
    }
    let h = lu.solve(&rhs).ok_or(Error::Singular { point: *p })?;
    Ok([h[0], h[1], h[2], h[3]])
}

/// Closed-form inverse of a 2-form's matrix, `W^{-1} = -(⋆W)/Pf(W)` with
/// `(⋆W)_{ij} = ε_{ijkl} W_{kl}` for `k < l`.
fn symbolic_inverse(form: &KForm) -> [[Expr; 4]; 4] {
    use Coord::*;
    let w = |a: Coord, b: Coord| form.component(&[a, b]);
    let pf = w(U, V) * w(R, T) - w(U, R) * w(V, T) + w(U, T) * w(V, R);
    let mut inv: [[Expr; 4]; 4] = core::array::from_fn(|_| core::array::from_fn(|_| Expr::zero()));
    for i in Coord::ALL {
        for j in Coord::ALL {
            if i == j {
                continue;
            }
            let (ij, sign_ij) = Blade::from_coords(&[i, j]).unwrap();
            let kl = ij.complement();
            let (_, eps) = ij.wedge(kl).unwrap();
            let wkl = form.coeff(kl);
            if wkl.is_zero() {
                continue;
            }
            inv[i.index()][j.index()] = -(wkl * (eps * sign_ij)) / &pf;
        }
    }
    inv
}

pub fn hamiltonian_field(f: &Expr, model: &SpacetimeModel) -> Result<HamiltonianField> {
    let inv = symbolic_inverse(model.varpi());
    let grad: Vec<Expr> = Coord::ALL.iter().map(|&c| f.diff(c)).collect();
    let field = VectorField::new(core::array::from_fn(|i| {
        (0..4).fold(Expr::zero(), |acc, j| {
            if inv[i][j].is_zero() || grad[j].is_zero() {
                acc
            } else {
                acc + &inv[i][j] * &grad[j]
            }
        })
    }));
    let closed_form = match (model.kind(), f.node()) {
        (ModelKind::Schwarzschild, Node::Coord(c)) => Some(displays::hamiltonian(*c)),
        _ => None,
    };
    Ok(HamiltonianField { source: f.clone(), field, closed_form })
}

impl HamiltonianField {
    /// Numeric field at a point, from the LU solve.
    pub fn at(&self, model: &SpacetimeModel, p: &ChartPoint) -> Result<[f64; 4]> {
        solve_hamiltonian_at(&self.source, model, p)
    }

    /// Worst `|ι_H ϖ + df|` over the points, using the symbolic field.
    pub fn defining_residual(&self, model: &SpacetimeModel, name: &str, threshold: f64, pts: &[ChartPoint]) -> CheckReport {
        let lhs = match model.varpi().interior(&self.field) {
            Ok(l) => l,
            Err(e) => return CheckReport::failed(name, threshold, &e),
        };
        let rhs = KForm::scalar(-&self.source).d().expect("degree 0");
        crate::report::form_check(name, threshold, &lhs, &rhs, pts)
    }
}

fn vec_relative(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Fixed family of test functions for the defining relation.
pub fn test_functions() -> Vec<Expr> {
    let (u, v, r, t) = (Expr::u(), Expr::v(), Expr::r(), Expr::t());
    alloc::vec![
        u.clone(),
        v.clone(),
        r.clone(),
        t.clone(),
        &u * &r,
        &v * &t,
        r.powi(2) + &t,
        u.sin() * v.cos(),
        &r * u.cos() + &t * v.sin(),
        (&t / &r).exp(),
        r.ln() * &u,
        u.sin().powi(2) * r.powi(3),
        &v * &v - &u * &t,
        (&r * &t).sin(),
        (u.cos() + 2.0).ln() * &t,
        r.sqrt() * v.sin(),
        &t.powi(2) / (&r + 1.0),
        (&u + &v + &r + &t).cos(),
        Expr::mass() * &r * u.sin(),
        (u.sin() * &r).powi(2) - t.powi(2),
    ]
}

/// Numeric LU solve against the printed fields, symbolic versus numeric
/// agreement, and the defining relation for a family of test functions.
pub fn verify_hamiltonians(model: &SpacetimeModel, pts: &[ChartPoint], tol: &Tolerances) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for c in Coord::ALL {
        let name = match c {
            Coord::U => "hamiltonian.u",
            Coord::V => "hamiltonian.v",
            Coord::R => "hamiltonian.r",
            Coord::T => "hamiltonian.t",
        };
        let threshold = tol.get(name, 1e-10);
        let printed = displays::hamiltonian(c);
        let f = Expr::coord(c);
        let mut worst = (0.0f64, None);
        let mut mag = 0.0f64;
        let mut failure = None;
        for p in pts {
            let step = solve_hamiltonian_at(&f, model, p).and_then(|h| Ok((h, printed.eval(p)?)));
            match step {
                Ok((h, want)) => {
                    let res = vec_relative(&h, &want);
                    mag = want.iter().fold(mag, |m, x| m.max(x.abs()));
                    if res > worst.0 || worst.1.is_none() {
                        worst = (res, Some(*p));
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        out.push(match failure {
            Some(e) => CheckReport::failed(name, threshold, &e),
            None => CheckReport::below(name, threshold, worst.0, worst.1)
                .with_magnitude(mag)
                .with_note("relative error of the LU solve against the printed field"),
        });
    }

    let name = "hamiltonian.symbolic_vs_numeric";
    let threshold = tol.get(name, 1e-10);
    let mut worst = (0.0f64, None);
    let mut failure = None;
    'outer: for f in test_functions() {
        let h = match hamiltonian_field(&f, model) {
            Ok(h) => h,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        for p in pts {
            match h.at(model, p).and_then(|n| Ok((n, h.field.eval(p)?))) {
                Ok((n, s)) => {
                    let res = vec_relative(&n, &s);
                    if res > worst.0 || worst.1.is_none() {
                        worst = (res, Some(*p));
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    break 'outer;
                }
            }
        }
    }
    out.push(match failure {
        Some(e) => CheckReport::failed(name, threshold, &e),
        None => CheckReport::below(name, threshold, worst.0, worst.1),
    });

    let name = "hamiltonian.defining";
    let threshold = tol.get(name, 1e-10);
    let mut acc: Option<CheckReport> = None;
    for f in test_functions() {
        let rep = match hamiltonian_field(&f, model) {
            Ok(h) => h.defining_residual(model, name, threshold, pts),
            Err(e) => CheckReport::failed(name, threshold, &e),
        };
        acc = Some(match acc {
            Some(a) if a.error.is_some() || a.worst_error >= rep.worst_error => a,
            _ => rep,
        });
    }
    out.extend(acc);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::SampleSet;
    use core::f64::consts::PI;

    #[test]
    fn coordinate_fields_at_reference_points() {
        let m = SpacetimeModel::schwarzschild(1.0).unwrap();
        let p = ChartPoint::new(PI / 2.0, 1.0, 4.0, 0.0, 1.0).unwrap();
        let hu = solve_hamiltonian_at(&Expr::u(), &m, &p).unwrap();
        assert!((hu[1] - 4.0 * PI).abs() < 1e-12);
        assert_eq!([hu[0], hu[2], hu[3]], [0.0, 0.0, 0.0]);
        let ht = solve_hamiltonian_at(&Expr::t(), &m, &p).unwrap();
        // -4π·16·(1/2)^{1/2}
        assert!((ht[2] - (-142.172254021)).abs() < 1e-8);
    }

    #[test]
    fn constant_has_zero_field() {
        let m = SpacetimeModel::schwarzschild(1.0).unwrap();
        let p = ChartPoint::new(1.0, 1.0, 4.0, 0.0, 1.0).unwrap();
        assert_eq!(solve_hamiltonian_at(&Expr::constant(3.0), &m, &p).unwrap(), [0.0; 4]);
        let h = hamiltonian_field(&Expr::constant(3.0), &m).unwrap();
        assert!(h.field.components().iter().all(Expr::is_zero));
    }

    #[test]
    fn degenerate_form_is_singular() {
        let m = SpacetimeModel::schwarzschild(1.0).unwrap();
        let degenerate = m.with_varpi(m.omega().clone());
        let p = ChartPoint::new(1.0, 1.0, 4.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            solve_hamiltonian_at(&Expr::r(), &degenerate, &p),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn all_hamiltonian_checks_pass() {
        let m = SpacetimeModel::schwarzschild(1.0).unwrap();
        let s = SampleSet::seeded(1.0, 8, 100).unwrap();
        for r in verify_hamiltonians(&m, &s.points, &Tolerances::new()) {
            assert!(r.pass, "{:?}", r);
        }
    }
}
