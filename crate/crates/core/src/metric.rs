//! Symmetric rank-2 tensors, musical isomorphisms and the Lorentzian Hodge star.
//!
//! Orientation is fixed by `du ∧ dv ∧ dr ∧ dt`; the star is defined by
//! `a ∧ ⋆b = <a, b> ⋆1` with `⋆1 = sqrt|det g| du ∧ dv ∧ dr ∧ dt`.

use alloc::vec::Vec;

use nalgebra::{Matrix4, SymmetricEigen};

use crate::chart::{ChartPoint, Coord};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::VectorField;
use crate::form::{Blade, KForm};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    /// Upper triangle, row-major: (0,0) (0,1) (0,2) (0,3) (1,1) ... (3,3).
    upper: [Expr; 10],
    det: Expr,
    inverse: [Expr; 10],
}

fn tri(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // offsets of row starts in the packed upper triangle
    [0, 4, 7, 9][i] + (j - i)
}

/// Laplace expansion along the first row, skipping zero entries.
fn det_expr(rows: &[Vec<Expr>]) -> Expr {
    let n = rows.len();
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc = Expr::zero();
    for j in 0..n {
        let a = &rows[0][j];
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Expr>> = rows[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, e)| e.clone()).collect())
            .collect();
        let term = a * det_expr(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

impl MetricTensor {
    /// Builds from the upper triangle. Rejects tensors whose determinant
    /// folds to zero.
    pub fn from_upper(upper: [Expr; 10]) -> Result<Self> {
        let full: Vec<Vec<Expr>> = (0..4)
            .map(|i| (0..4).map(|j| upper[tri(i, j)].clone()).collect())
            .collect();
        let det = det_expr(&full);
        if det.is_zero() {
            return Err(Error::InvalidParameter("metric determinant vanishes identically"));
        }
        let mut inverse: [Expr; 10] = core::array::from_fn(|_| Expr::zero());
        for i in 0..4 {
            for j in i..4 {
                // inv_ij = cofactor_ji / det; symmetric so cofactor_ij works too
                let minor: Vec<Vec<Expr>> = (0..4)
                    .filter(|&a| a != j)
                    .map(|a| (0..4).filter(|&b| b != i).map(|b| full[a][b].clone()).collect())
                    .collect();
                let c = det_expr(&minor);
                let c = if (i + j) % 2 == 0 { c } else { -c };
                inverse[tri(i, j)] = Expr::div(&c, &det);
            }
        }
        Ok(MetricTensor { upper, det, inverse })
    }

    pub fn diagonal(d: [Expr; 4]) -> Result<Self> {
        let z = Expr::zero;
        let [a, b, c, e] = d;
        MetricTensor::from_upper([a, z(), z(), z(), b, z(), z(), c, z(), e])
    }

    pub fn entry(&self, a: Coord, b: Coord) -> &Expr {
        &self.upper[tri(a.index(), b.index())]
    }

    pub fn inverse_entry(&self, a: Coord, b: Coord) -> &Expr {
        &self.inverse[tri(a.index(), b.index())]
    }

    pub fn determinant(&self) -> &Expr {
        &self.det
    }

    /// `sqrt|det g|`, taking the determinant to be negative (Lorentzian).
    pub fn volume_density(&self) -> Expr {
        (-&self.det).sqrt()
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<Matrix4<f64>> {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = self.upper[tri(i, j)].eval(p)?;
            }
        }
        Ok(m)
    }

    /// Counts of positive and negative eigenvalues at a point.
    pub fn signature_at(&self, p: &ChartPoint) -> Result<(usize, usize)> {
        let m = self.eval(p)?;
        let eig = SymmetricEigen::new(m).eigenvalues;
        let pos = eig.iter().filter(|&&x| x > 0.0).count();
        let neg = eig.iter().filter(|&&x| x < 0.0).count();
        Ok((pos, neg))
    }

    /// True if the signature at `p` is `(+, +, +, -)`.
    pub fn is_lorentzian_at(&self, p: &ChartPoint) -> Result<bool> {
        Ok(self.signature_at(p)? == (3, 1))
    }

    /// `g(X, Y)`.
    pub fn inner(&self, x: &VectorField, y: &VectorField) -> Expr {
        let mut acc = Expr::zero();
        for a in Coord::ALL {
            for b in Coord::ALL {
                let g = self.entry(a, b);
                if g.is_zero() || x.component(a).is_zero() || y.component(b).is_zero() {
                    continue;
                }
                acc = acc + g * x.component(a) * y.component(b);
            }
        }
        acc
    }

    /// Index lowering `X ↦ ι_X g`.
    pub fn flat(&self, x: &VectorField) -> KForm {
        let terms = Coord::ALL.map(|b| {
            let c = Coord::ALL.iter().fold(Expr::zero(), |acc, &a| {
                let g = self.entry(a, b);
                if g.is_zero() {
                    acc
                } else {
                    acc + x.component(a) * g
                }
            });
            (Blade::single(b), c)
        });
        KForm::from_terms(1, terms).unwrap()
    }

    /// Index raising of a 1-form.
    pub fn sharp(&self, a: &KForm) -> Result<VectorField> {
        if a.degree() != 1 {
            return Err(Error::BadDegree(a.degree()));
        }
        Ok(VectorField::new(Coord::ALL.map(|i| {
            Coord::ALL.iter().fold(Expr::zero(), |acc, &j| {
                let gi = self.inverse_entry(i, j);
                let aj = a.coeff(Blade::single(j));
                if gi.is_zero() || aj.is_zero() {
                    acc
                } else {
                    acc + gi * aj
                }
            })
        })))
    }

    /// Minor `det(g^{-1}[I, J])` used to raise all indices of a form.
    fn inverse_minor(&self, rows: Blade, cols: Blade) -> Expr {
        let m: Vec<Vec<Expr>> = rows
            .coords()
            .map(|i| cols.coords().map(|j| self.inverse_entry(i, j).clone()).collect())
            .collect();
        det_expr(&m)
    }

    /// Fully contravariant components `a^I` for increasing multi-indices.
    pub fn raise_form(&self, a: &KForm) -> Vec<(Blade, Expr)> {
        Blade::of_degree(a.degree())
            .map(|i| {
                let up = a.terms().fold(Expr::zero(), |acc, (j, aj)| {
                    let minor = self.inverse_minor(i, j);
                    if minor.is_zero() {
                        acc
                    } else {
                        acc + minor * aj
                    }
                });
                (i, up)
            })
            .filter(|(_, e)| !e.is_zero())
            .collect()
    }

    /// Pointwise inner product `<a, b>` of two forms of equal degree.
    pub fn form_inner(&self, a: &KForm, b: &KForm) -> Result<Expr> {
        if a.degree() != b.degree() {
            return Err(Error::BadDegree(b.degree()));
        }
        Ok(self
            .raise_form(a)
            .into_iter()
            .fold(Expr::zero(), |acc, (i, up)| acc + up * b.coeff(i)))
    }

    pub fn hodge_star(&self, a: &KForm) -> Result<KForm> {
        let density = self.volume_density();
        let terms = self.raise_form(a).into_iter().map(|(i, up)| {
            let k = i.complement();
            let (_, sign) = i.wedge(k).expect("complementary blades are disjoint");
            (k, &density * up * sign)
        });
        KForm::from_terms(4 - a.degree(), terms)
    }
}
