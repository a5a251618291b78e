//! Differential forms on the four-dimensional chart.
//!
//! A form of degree `k` stores one coefficient per strictly increasing
//! multi-index, encoded as a bit mask over `(u, v, r, t)`. Zero
//! coefficients are dropped on construction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::chart::{ChartPoint, Coord};
use crate::error::{Error, Result};
use crate::expr::{scaled_residual, Expr};
use crate::field::VectorField;

/// Strictly increasing multi-index over the chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Blade(u8);

impl Blade {
    pub const EMPTY: Blade = Blade(0);
    pub const VOLUME: Blade = Blade(0b1111);

    pub fn single(c: Coord) -> Blade {
        Blade(1 << c.index())
    }

    /// Canonicalizes an ordered list of coordinates. Returns the sign of the
    /// sorting permutation, or `None` if a coordinate repeats.
    pub fn from_coords(coords: &[Coord]) -> Option<(Blade, f64)> {
        let mut mask = 0u8;
        let mut sign = 1.0;
        for &c in coords {
            let bit = 1u8 << c.index();
            if mask & bit != 0 {
                return None;
            }
            // every already-present higher coordinate must be passed over
            if (mask & !((bit << 1) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= bit;
        }
        Some((Blade(mask), sign))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, c: Coord) -> bool {
        self.0 & (1 << c.index()) != 0
    }

    pub fn coords(self) -> impl Iterator<Item = Coord> {
        Coord::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    pub fn complement(self) -> Blade {
        Blade(!self.0 & 0b1111)
    }

    /// All blades of the given degree, in increasing mask order.
    pub fn of_degree(k: usize) -> impl Iterator<Item = Blade> {
        (0u8..16).map(Blade).filter(move |b| b.degree() == k)
    }

    /// `dx^self ∧ dx^other = sign * dx^(self ∪ other)`; `None` if they overlap.
    pub fn wedge(self, other: Blade) -> Option<(Blade, f64)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0;
        for a in self.coords() {
            for b in other.coords() {
                if a.index() > b.index() {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((Blade(self.0 | other.0), sign))
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for c in self.coords() {
            if !first {
                f.write_str("^")?;
            }
            write!(f, "d{}", c)?;
            first = false;
        }
        Ok(())
    }
}

/// Antisymmetric form of degree `0..=4` with expression coefficients.
#[derive(Clone, PartialEq)]
pub struct KForm {
    degree: usize,
    coeffs: BTreeMap<Blade, Expr>,
}

impl fmt::Debug for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm<{}>{{", self.degree)?;
        for (i, (b, e)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", b, e)?;
        }
        f.write_str("}")
    }
}

impl KForm {
    pub fn zero(degree: usize) -> Result<KForm> {
        if degree > 4 {
            return Err(Error::BadDegree(degree));
        }
        Ok(KForm { degree, coeffs: BTreeMap::new() })
    }

    pub fn scalar(e: Expr) -> KForm {
        KForm::zero(0).unwrap().with(Blade::EMPTY, e)
    }

    /// `dx^c`.
    pub fn basis(c: Coord) -> KForm {
        KForm::zero(1).unwrap().with(Blade::single(c), Expr::one())
    }

    /// `coeff * dx^{c1} ∧ ... ∧ dx^{ck}` for coordinates in any order.
    pub fn monomial(coeff: Expr, coords: &[Coord]) -> Result<KForm> {
        let mut out = KForm::zero(coords.len())?;
        if let Some((blade, sign)) = Blade::from_coords(coords) {
            out = out.with(blade, coeff * sign);
        }
        Ok(out)
    }

    /// Builds a form from canonical (blade, coefficient) pairs of one degree;
    /// repeated blades are summed.
    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (Blade, Expr)>) -> Result<KForm> {
        let mut out = KForm::zero(degree)?;
        for (b, e) in terms {
            if b.degree() != degree {
                return Err(Error::BadDegree(b.degree()));
            }
            out.accumulate(b, &e);
        }
        Ok(out)
    }

    fn with(mut self, blade: Blade, e: Expr) -> KForm {
        self.accumulate(blade, &e);
        self
    }

    fn accumulate(&mut self, blade: Blade, e: &Expr) {
        debug_assert_eq!(blade.degree(), self.degree);
        let sum = match self.coeffs.get(&blade) {
            Some(old) => old + e,
            None => e.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&blade);
        } else {
            self.coeffs.insert(blade, sum);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of a canonical blade (zero if absent).
    pub fn coeff(&self, blade: Blade) -> Expr {
        self.coeffs.get(&blade).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient of `dx^{c1} ∧ ... ∧ dx^{ck}` with coordinates in any order.
    pub fn component(&self, coords: &[Coord]) -> Expr {
        match Blade::from_coords(coords) {
            Some((b, s)) if b.degree() == self.degree => self.coeff(b) * s,
            _ => Expr::zero(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &Expr)> {
        self.coeffs.iter().map(|(b, e)| (*b, e))
    }

    /// True if no coefficient survives constant folding.
    pub fn is_structurally_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &KForm) -> Result<KForm> {
        if self.degree != other.degree {
            return Err(Error::BadDegree(other.degree));
        }
        let mut out = self.clone();
        for (b, e) in other.terms() {
            out.accumulate(b, e);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm> {
        self.add(&other.scale(&Expr::constant(-1.0)))
    }

    /// Multiplication by a scalar function.
    pub fn scale(&self, f: &Expr) -> KForm {
        let mut out = KForm { degree: self.degree, coeffs: BTreeMap::new() };
        for (b, e) in self.terms() {
            out.accumulate(b, &(f * e));
        }
        out
    }

    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        let degree = self.degree + other.degree;
        if degree > 4 {
            return Err(Error::DegreeOverflow(self.degree, other.degree));
        }
        let mut out = KForm::zero(degree)?;
        for (a, ea) in self.terms() {
            for (b, eb) in other.terms() {
                if let Some((blade, sign)) = a.wedge(b) {
                    out.accumulate(blade, &((ea * eb) * sign));
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Result<KForm> {
        if self.degree >= 4 {
            return Err(Error::BadDegree(self.degree));
        }
        let mut out = KForm::zero(self.degree + 1)?;
        for (blade, e) in self.terms() {
            for c in Coord::ALL {
                if let Some((b, sign)) = Blade::single(c).wedge(blade) {
                    out.accumulate(b, &(e.diff(c) * sign));
                }
            }
        }
        Ok(out)
    }

    /// Contraction of `x` into the first slot.
    pub fn interior(&self, x: &VectorField) -> Result<KForm> {
        if self.degree == 0 {
            return Err(Error::BadDegree(0));
        }
        let mut out = KForm::zero(self.degree - 1)?;
        for (blade, e) in self.terms() {
            for (pos, c) in blade.coords().enumerate() {
                let xc = x.component(c);
                if xc.is_zero() {
                    continue;
                }
                let rest = Blade(blade.0 & !(1 << c.index()));
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.accumulate(rest, &((xc * e) * sign));
            }
        }
        Ok(out)
    }

    /// Value on an ordered list of vector fields (`k` fields for a `k`-form).
    pub fn apply(&self, fields: &[&VectorField]) -> Result<Expr> {
        if fields.len() != self.degree {
            return Err(Error::BadDegree(self.degree));
        }
        let mut current = self.clone();
        for x in fields {
            current = current.interior(x)?;
        }
        Ok(current.coeff(Blade::EMPTY))
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<NumericForm> {
        let mut values = [0.0; 16];
        for (b, e) in self.terms() {
            values[b.0 as usize] = e.eval(p)?;
        }
        Ok(NumericForm { degree: self.degree, values })
    }
}

/// Coefficients of a form at one point, indexed by blade mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericForm {
    pub degree: usize,
    pub values: [f64; 16],
}

impl NumericForm {
    pub fn get(&self, b: Blade) -> f64 {
        self.values[b.0 as usize]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| libm::fmax(m, libm::fabs(*v)))
    }

    /// Largest [`scaled_residual`] over all blades.
    pub fn max_scaled_residual(&self, other: &NumericForm) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .fold(0.0, |m, (a, b)| libm::fmax(m, scaled_residual(*a, *b)))
    }
}

/// Worst pointwise discrepancy between two forms over a set of points,
/// as `(worst scaled residual, index of worst point, largest coefficient seen)`.
pub fn compare_forms(a: &KForm, b: &KForm, points: &[ChartPoint]) -> Result<(f64, usize, f64)> {
    let mut worst = 0.0;
    let mut worst_idx = 0;
    let mut magnitude: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        let na = a.eval(p)?;
        let nb = b.eval(p)?;
        let res = na.max_scaled_residual(&nb);
        magnitude = magnitude.max(na.max_abs()).max(nb.max_abs());
        if res > worst {
            worst = res;
            worst_idx = i;
        }
    }
    Ok((worst, worst_idx, magnitude))
}

/// List of blades present in either form.
pub fn union_blades(a: &KForm, b: &KForm) -> Vec<Blade> {
    let mut v: Vec<Blade> = a.terms().map(|(b, _)| b).chain(b.terms().map(|(b, _)| b)).collect();
    v.sort();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use Coord::*;

    fn p() -> ChartPoint {
        ChartPoint::new(0.7, 1.3, 3.5, 0.4, 1.0).unwrap()
    }

    #[test]
    fn blade_sorting_sign() {
        assert_eq!(Blade::from_coords(&[U, V]).unwrap().1, 1.0);
        assert_eq!(Blade::from_coords(&[V, U]).unwrap().1, -1.0);
        assert_eq!(Blade::from_coords(&[T, R, V, U]).unwrap(), (Blade::VOLUME, 1.0));
        assert_eq!(Blade::from_coords(&[R, U, V]).unwrap().1, 1.0);
        assert!(Blade::from_coords(&[U, R, U]).is_none());
    }

    #[test]
    fn du_wedge_du_vanishes() {
        let du = KForm::basis(U);
        let w = du.wedge(&du).unwrap();
        assert!(w.is_structurally_zero());
        assert_eq!(w.degree(), 2);
    }

    #[test]
    fn degree_overflow() {
        let vol = KForm::monomial(Expr::one(), &[U, V, R, T]).unwrap();
        assert!(matches!(vol.wedge(&KForm::basis(U)), Err(Error::DegreeOverflow(4, 1))));
        assert!(vol.d().is_err());
        assert!(KForm::zero(5).is_err());
        assert!(KForm::scalar(Expr::r()).interior(&VectorField::basis(R)).is_err());
    }

    #[test]
    fn interior_pairing() {
        let c = KForm::basis(U).interior(&VectorField::basis(U)).unwrap();
        assert!(c.coeff(Blade::EMPTY).is_one());
        let dudv = KForm::monomial(Expr::one(), &[U, V]).unwrap();
        assert!(dudv.interior(&VectorField::basis(T)).unwrap().is_structurally_zero());
        // i_v (du ^ dv) = -du
        let got = dudv.interior(&VectorField::basis(V)).unwrap();
        assert_eq!(got.coeff(Blade::single(U)).eval(&p()).unwrap(), -1.0);
    }

    #[test]
    fn d_of_function() {
        let f = Expr::r().powi(2) * Expr::u().sin();
        let df = KForm::scalar(f).d().unwrap();
        let n = df.eval(&p()).unwrap();
        assert!((n.get(Blade::single(R)) - 2.0 * 3.5 * 0.7f64.sin()).abs() < 1e-14);
        assert!((n.get(Blade::single(U)) - 3.5f64.powi(2) * 0.7f64.cos()).abs() < 1e-14);
        assert!(df.d().unwrap().eval(&p()).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn component_reorders() {
        let w = KForm::monomial(Expr::r(), &[R, U]).unwrap();
        assert_eq!(w.component(&[U, R]).eval(&p()).unwrap(), -3.5);
        assert_eq!(w.component(&[R, U]).eval(&p()).unwrap(), 3.5);
    }

    #[test]
    fn apply_matches_determinant() {
        let w = KForm::monomial(Expr::one(), &[U, V]).unwrap();
        let x = VectorField::new([Expr::constant(2.0), Expr::constant(3.0), Expr::zero(), Expr::zero()]);
        let y = VectorField::new([Expr::constant(5.0), Expr::constant(7.0), Expr::zero(), Expr::zero()]);
        let val = w.apply(&[&x, &y]).unwrap().eval(&p()).unwrap();
        assert_eq!(val, 2.0 * 7.0 - 3.0 * 5.0);
    }
}
