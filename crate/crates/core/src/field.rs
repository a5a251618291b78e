use core::fmt;

use crate::chart::{ChartPoint, Coord};
use crate::error::Result;
use crate::expr::Expr;

/// Contravariant field `Σ X^i ∂/∂x^i`, components ordered `(u, v, r, t)`.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    components: [Expr; 4],
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.components;
        write!(f, "VectorField[u: {}, v: {}, r: {}, t: {}]", a, b, c, d)
    }
}

impl VectorField {
    pub fn new(components: [Expr; 4]) -> Self {
        VectorField { components }
    }

    pub fn zero() -> Self {
        VectorField::new([Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()])
    }

    /// Coordinate field `∂/∂c`.
    pub fn basis(c: Coord) -> Self {
        Self::along(c, Expr::one())
    }

    /// `coeff * ∂/∂c`.
    pub fn along(c: Coord, coeff: Expr) -> Self {
        let mut v = VectorField::zero();
        v.components[c.index()] = coeff;
        v
    }

    pub fn component(&self, c: Coord) -> &Expr {
        &self.components[c.index()]
    }

    pub fn components(&self) -> &[Expr; 4] {
        &self.components
    }

    /// Directional derivative `X(f)`.
    pub fn derive(&self, f: &Expr) -> Expr {
        Coord::ALL.iter().fold(Expr::zero(), |acc, &c| {
            let xc = self.component(c);
            if xc.is_zero() {
                acc
            } else {
                acc + xc * f.diff(c)
            }
        })
    }

    /// Lie bracket `[X, Y]^j = X(Y^j) - Y(X^j)`.
    pub fn lie_bracket(&self, other: &VectorField) -> VectorField {
        VectorField::new(
            Coord::ALL.map(|c| self.derive(other.component(c)) - other.derive(self.component(c))),
        )
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        VectorField::new(self.components.clone().map(|e| f * e))
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(Coord::ALL.map(|c| self.component(c) + other.component(c)))
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<[f64; 4]> {
        Ok([
            self.components[0].eval(p)?,
            self.components[1].eval(p)?,
            self.components[2].eval(p)?,
            self.components[3].eval(p)?,
        ])
    }
}
