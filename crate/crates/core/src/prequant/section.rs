use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{ChartPoint, Coord};
use crate::error::Result;
use crate::expr::Expr;
use crate::field::VectorField;

/// Complex-valued function `re + i·im` on the cut chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub re: Expr,
    pub im: Expr,
}

impl Section {
    pub fn new(re: Expr, im: Expr) -> Self {
        Section { re, im }
    }

    pub fn zero() -> Self {
        Section::new(Expr::zero(), Expr::zero())
    }

    pub fn real(re: Expr) -> Self {
        Section::new(re, Expr::zero())
    }

    /// `amplitude · e^{i·phase}`.
    pub fn polar(amplitude: &Expr, phase: &Expr) -> Self {
        Section::new(amplitude * phase.cos(), amplitude * phase.sin())
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &Section) -> Section {
        Section::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Section) -> Section {
        Section::new(&self.re - &other.re, &self.im - &other.im)
    }

    /// Multiplication by a real function.
    pub fn scale(&self, f: &Expr) -> Section {
        Section::new(f * &self.re, f * &self.im)
    }

    /// Multiplication by `a + i·b` for real functions `a`, `b`.
    pub fn scale_complex(&self, a: &Expr, b: &Expr) -> Section {
        Section::new(
            a * &self.re - b * &self.im,
            a * &self.im + b * &self.re,
        )
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> Section {
        Section::new(-&self.im, self.re.clone())
    }

    /// `X(ψ)`, componentwise.
    pub fn derive(&self, x: &VectorField) -> Section {
        Section::new(x.derive(&self.re), x.derive(&self.im))
    }

    pub fn diff(&self, c: Coord) -> Section {
        Section::new(self.re.diff(c), self.im.diff(c))
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<Complex64> {
        Ok(Complex64::new(self.re.eval(p)?, self.im.eval(p)?))
    }
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn complex_scaled_residual(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn complex_relative_residual(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Seeded polynomial-times-phase sections
/// `P(u, v, r/m, t/m) · e^{i(n v + κ t/m + λ r/m)}` with small integer `n`.
pub fn test_sections(seed: u64, count: usize) -> Vec<Section> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u, v) = (Expr::u(), Expr::v());
    let r = Expr::r() / Expr::mass();
    let t = Expr::t() / Expr::mass();
    let monomials = [
        Expr::one(),
        u.clone(),
        v.clone(),
        r.clone(),
        t.clone(),
        &u * &r,
        &t * &t,
        &v * &r,
    ];
    (0..count)
        .map(|_| {
            let amplitude = monomials.iter().fold(Expr::zero(), |acc, mono| {
                let c: f64 = rng.random_range(-1.0..1.0);
                acc + c * mono
            });
            let n = rng.random_range(-2i32..=2) as f64;
            let kappa: f64 = rng.random_range(-0.5..0.5);
            let lambda: f64 = rng.random_range(-0.2..0.2);
            let phase = n * &v + kappa * &t + lambda * &r;
            Section::polar(&amplitude, &phase)
        })
        .collect()
}
