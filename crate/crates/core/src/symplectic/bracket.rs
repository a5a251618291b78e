use alloc::format;
use alloc::vec::Vec;

use crate::chart::{ChartPoint, Coord};
use crate::displays;
use crate::error::Result;
use crate::expr::{relative_residual, Expr};
use crate::report::{CheckReport, Tolerances};
use crate::spacetime::SpacetimeModel;

use super::hamiltonian::{hamiltonian_field, solve_hamiltonian_at};
use super::quadrature::Neumaier;

/// `{f, h} = ϖ(H_f, H_h) = H_f(h)`.
#[derive(Debug, Clone)]
pub struct PoissonBracket<'a> {
    model: &'a SpacetimeModel,
    f: Expr,
    h: Expr,
}

impl<'a> PoissonBracket<'a> {
    pub fn new(model: &'a SpacetimeModel, f: Expr, h: Expr) -> Self {
        PoissonBracket { model, f, h }
    }

    /// Symbolic bracket, `H_f` applied to `h`.
    pub fn symbolic(&self) -> Result<Expr> {
        Ok(hamiltonian_field(&self.f, self.model)?.field.derive(&self.h))
    }

    /// Numeric bracket from the pointwise LU solve.
    pub fn at(&self, p: &ChartPoint) -> Result<f64> {
        let hf = solve_hamiltonian_at(&self.f, self.model, p)?;
        let mut s = 0.0;
        for c in Coord::ALL {
            s += hf[c.index()] * self.h.diff(c).eval(p)?;
        }
        Ok(s)
    }
}

/// Symbolic bracket of two functions.
pub fn bracket(model: &SpacetimeModel, f: &Expr, h: &Expr) -> Result<Expr> {
    PoissonBracket::new(model, f.clone(), h.clone()).symbolic()
}

/// Worst Jacobi defect `|{f,{g,h}} + {g,{h,f}} + {h,{f,g}}|`, each term
/// measured against its natural size `max|H_f| · |{g,h}|` (floored at 1).
///
/// The nested bracket differentiates `{g,h}` along `H_f`; rounding in
/// `{g,h}` is therefore amplified by `|H_f|` and that product is the scale
/// at which a vanishing sum can be resolved.
pub fn jacobi_defect(model: &SpacetimeModel, f: &Expr, g: &Expr, h: &Expr, pts: &[ChartPoint]) -> Result<(f64, Option<ChartPoint>)> {
    let cyclic = [(f, g, h), (g, h, f), (h, f, g)];
    let mut terms = Vec::with_capacity(3);
    for (a, b, c) in cyclic {
        let inner = bracket(model, b, c)?;
        terms.push((a, bracket(model, a, &inner)?, inner));
    }
    let mut worst = (0.0f64, None);
    for p in pts {
        let mut sum = Neumaier::default();
        let mut scale = 1.0f64;
        for (a, outer, inner) in &terms {
            let x = outer.eval(p)?;
            let field = solve_hamiltonian_at(a, model, p)?;
            let h_norm = field.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            sum.add(x);
            scale = scale.max(x.abs()).max(h_norm * inner.eval(p)?.abs());
        }
        let res = sum.total().abs() / scale;
        if res > worst.0 || worst.1.is_none() {
            worst = (res, Some(*p));
        }
    }
    Ok(worst)
}

fn coord_pair_name(a: Coord, b: Coord) -> &'static str {
    use Coord::*;
    match (a, b) {
        (U, V) => "bracket.u_v",
        (R, T) => "bracket.r_t",
        (U, R) => "bracket.u_r",
        (U, T) => "bracket.u_t",
        (V, R) => "bracket.v_r",
        (V, T) => "bracket.v_t",
        _ => "bracket.other",
    }
}

/// Coordinate brackets against the printed values, antisymmetry of the
/// whole table and the Jacobi identity on every coordinate triple.
pub fn bracket_table(model: &SpacetimeModel, pts: &[ChartPoint], tol: &Tolerances) -> Vec<CheckReport> {
    use Coord::*;
    let mut out = Vec::new();

    for (a, b) in [(U, V), (R, T), (U, R), (U, T), (V, R), (V, T)] {
        let name = coord_pair_name(a, b);
        let nonzero = matches!((a, b), (U, V) | (R, T));
        let threshold = tol.get(name, 1e-10);
        let br = PoissonBracket::new(model, Expr::coord(a), Expr::coord(b));
        let printed = displays::bracket(a, b);
        let mut worst = (0.0f64, None);
        let mut mag = 0.0f64;
        let mut failure = None;
        for p in pts {
            match br.at(p).and_then(|x| Ok((x, printed.eval(p)?))) {
                Ok((got, want)) => {
                    let res = if nonzero { relative_residual(got, want) } else { (got - want).abs() };
                    mag = mag.max(want.abs());
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
                .with_note(if nonzero { "relative error" } else { "absolute error" }),
        });
    }

    let name = "bracket.antisymmetry";
    let threshold = tol.get(name, 1e-10);
    let mut worst = (0.0f64, None);
    let mut failure = None;
    'pairs: for a in Coord::ALL {
        for b in Coord::ALL {
            let fwd = PoissonBracket::new(model, Expr::coord(a), Expr::coord(b));
            let rev = PoissonBracket::new(model, Expr::coord(b), Expr::coord(a));
            for p in pts {
                match fwd.at(p).and_then(|x| Ok((x, rev.at(p)?))) {
                    Ok((x, y)) => {
                        let res = (x + y).abs() / 1f64.max(x.abs()).max(y.abs());
                        if res > worst.0 || worst.1.is_none() {
                            worst = (res, Some(*p));
                        }
                    }
                    Err(e) => {
                        failure = Some(e);
                        break 'pairs;
                    }
                }
            }
        }
    }
    out.push(match failure {
        Some(e) => CheckReport::failed(name, threshold, &e),
        None => CheckReport::below(name, threshold, worst.0, worst.1),
    });

    let name = "bracket.jacobi";
    let threshold = tol.get(name, 1e-9);
    let triples = [(U, V, R), (U, V, T), (U, R, T), (V, R, T)];
    let mut worst = (0.0f64, None);
    let mut failure = None;
    for (a, b, c) in triples {
        match jacobi_defect(model, &Expr::coord(a), &Expr::coord(b), &Expr::coord(c), pts) {
            Ok((res, p)) => {
                if res > worst.0 || worst.1.is_none() {
                    worst = (res, p);
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
            .with_note(&format!("{} coordinate triples", triples.len())),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::SampleSet;
    use core::f64::consts::PI;

    #[test]
    fn reference_brackets() {
        let m = SpacetimeModel::schwarzschild(1.0).unwrap();
        let p = ChartPoint::new(PI / 2.0, 1.0, 3.0, 0.0, 1.0).unwrap();
        let uv = PoissonBracket::new(&m, Expr::u(), Expr::v()).at(&p).unwrap();
        assert!((uv - 4.0 * PI).abs() < 1e-12);
        let rt = PoissonBracket::new(&m, Expr::r(), Expr::t()).at(&p).unwrap();
        assert!((rt - 65.2967771124).abs() < 1e-8);
        let sym = bracket(&m, &Expr::r(), &Expr::t()).unwrap().eval(&p).unwrap();
        assert!((sym - rt).abs() < 1e-11);
    }

    #[test]
    fn table_passes() {
        let m = SpacetimeModel::schwarzschild(1.0).unwrap();
        let s = SampleSet::seeded(1.0, 3, 100).unwrap();
        for r in bracket_table(&m, &s.points, &Tolerances::new()) {
            assert!(r.pass, "{:?}", r);
        }
    }

    #[test]
    fn jacobi_on_composite_functions() {
        let m = SpacetimeModel::schwarzschild(2.0).unwrap();
        let s = SampleSet::seeded(2.0, 11, 20).unwrap();
        let f = Expr::u().sin() * Expr::r();
        let g = Expr::v() * Expr::t() + Expr::r().powi(2);
        let h = (Expr::t() / Expr::r()).cos() + Expr::u() * Expr::v();
        let (res, _) = jacobi_defect(&m, &f, &g, &h, &s.points).unwrap();
        assert!(res < 1e-9, "{res}");
    }
}
