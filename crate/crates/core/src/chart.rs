//! Coordinates of the exterior cut chart and seeded sampling of it.

use core::f64::consts::PI;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default horizon safety margin: points must satisfy `r >= 2m(1 + eps)`.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// One of the four chart coordinates, in the fixed order `(u, v, r, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Coord {
    U,
    V,
    R,
    T,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::U, Coord::V, Coord::R, Coord::T];

    pub const fn index(self) -> usize {
        match self {
            Coord::U => 0,
            Coord::V => 1,
            Coord::R => 2,
            Coord::T => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Coord> {
        Coord::ALL.get(i).copied()
    }

    pub const fn name(self) -> &'static str {
        match self {
            Coord::U => "u",
            Coord::V => "v",
            Coord::R => "r",
            Coord::T => "t",
        }
    }

    pub fn from_name(s: &str) -> Option<Coord> {
        match s {
            "u" => Some(Coord::U),
            "v" => Some(Coord::V),
            "r" => Some(Coord::R),
            "t" => Some(Coord::T),
            _ => None,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated point of the exterior chart together with the mass parameter
/// of the model it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub t: f64,
    pub m: f64,
}

impl ChartPoint {
    /// Validates with the default horizon margin.
    pub fn new(u: f64, v: f64, r: f64, t: f64, m: f64) -> Result<Self> {
        Self::with_margin(u, v, r, t, m, DEFAULT_MARGIN)
    }

    /// Validates `0 < u < π`, `0 < v < 2π`, `m > 0` and `r >= 2m(1 + margin)`.
    pub fn with_margin(u: f64, v: f64, r: f64, t: f64, m: f64, margin: f64) -> Result<Self> {
        let p = ChartPoint { u, v, r, t, m };
        if ![u, v, r, t, m].iter().all(|x| x.is_finite()) {
            return Err(Error::Domain { point: p, reason: "non-finite coordinate" });
        }
        if m <= 0.0 {
            return Err(Error::Domain { point: p, reason: "mass must be positive" });
        }
        if !(u > 0.0 && u < PI) {
            return Err(Error::Domain { point: p, reason: "u outside (0, pi)" });
        }
        if !(v > 0.0 && v < 2.0 * PI) {
            return Err(Error::Domain { point: p, reason: "v outside (0, 2 pi)" });
        }
        if r < 2.0 * m * (1.0 + margin) {
            return Err(Error::Domain { point: p, reason: "r not in exterior region" });
        }
        Ok(p)
    }

    pub fn coord(&self, c: Coord) -> f64 {
        match c {
            Coord::U => self.u,
            Coord::V => self.v,
            Coord::R => self.r,
            Coord::T => self.t,
        }
    }

    /// Copy with one coordinate replaced; not revalidated.
    pub fn shifted(&self, c: Coord, value: f64) -> ChartPoint {
        let mut p = *self;
        match c {
            Coord::U => p.u = value,
            Coord::V => p.v = value,
            Coord::R => p.r = value,
            Coord::T => p.t = value,
        }
        p
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(u={}, v={}, r={}, t={}; m={})",
            self.u, self.v, self.r, self.t, self.m
        )
    }
}

/// Seeded sample of chart points.
///
/// `r` is log-uniform on `(2m(1+eps), 100m)`, `u` uniform on `(eps, π-eps)`,
/// `v` uniform on `(eps, 2π-eps)` and `t` uniform on `(-10m, 10m)`. Every
/// length is drawn as a multiple of `m`, so the same seed at a rescaled mass
/// yields exactly the rescaled points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub seed: u64,
    pub points: alloc::vec::Vec<ChartPoint>,
}

impl SampleSet {
    pub fn seeded(m: f64, seed: u64, n: usize) -> Result<Self> {
        Self::seeded_with_margin(m, seed, n, DEFAULT_MARGIN)
    }

    pub fn seeded_with_margin(m: f64, seed: u64, n: usize, eps: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter("mass must be positive and finite"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = libm::log(2.0 * (1.0 + eps));
        let hi = libm::log(100.0);
        let mut points = alloc::vec::Vec::with_capacity(n);
        while points.len() < n {
            let u = rng.random_range(eps..PI - eps);
            let v = rng.random_range(eps..2.0 * PI - eps);
            let s = libm::exp(rng.random_range(lo..hi));
            let t = rng.random_range(-10.0..10.0);
            // rejection only triggers on rounding at the lower edge
            if let Ok(p) = ChartPoint::with_margin(u, v, s * m, t * m, m, eps) {
                points.push(p);
            }
        }
        Ok(SampleSet { seed, points })
    }

    /// Uniform draws inside a coordinate box.
    pub fn in_box(m: f64, seed: u64, n: usize, bx: &CoordBox) -> Result<Self> {
        bx.validate(m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = alloc::vec::Vec::with_capacity(n);
        let draw = |rng: &mut ChaCha8Rng, (a, b): (f64, f64)| a + (b - a) * rng.random::<f64>();
        while points.len() < n {
            let u = draw(&mut rng, bx.u);
            let v = draw(&mut rng, bx.v);
            let r = draw(&mut rng, bx.r);
            let t = draw(&mut rng, bx.t);
            if let Ok(p) = ChartPoint::new(u, v, r, t, m) {
                points.push(p);
            }
        }
        Ok(SampleSet { seed, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Closed coordinate box `[u] x [v] x [r] x [t]` inside the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordBox {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub r: (f64, f64),
    pub t: (f64, f64),
}

impl CoordBox {
    /// Moderate box away from poles, cut and horizon, scaled with `m`.
    pub fn default_for(m: f64) -> Self {
        CoordBox {
            u: (0.5, PI - 0.5),
            v: (0.5, 2.0 * PI - 0.5),
            r: (2.5 * m, 10.0 * m),
            t: (-5.0 * m, 5.0 * m),
        }
    }

    pub fn validate(&self, m: f64) -> Result<()> {
        let ordered = [self.u, self.v, self.r, self.t].iter().all(|(a, b)| a < b);
        if !ordered {
            return Err(Error::InvalidParameter("box bounds must satisfy lo < hi"));
        }
        ChartPoint::new(self.u.0, self.v.0, self.r.0, self.t.0, m)?;
        ChartPoint::new(self.u.1, self.v.1, self.r.1, self.t.1, m)?;
        Ok(())
    }

    pub fn range(&self, c: Coord) -> (f64, f64) {
        match c {
            Coord::U => self.u,
            Coord::V => self.v,
            Coord::R => self.r,
            Coord::T => self.t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_horizon_and_poles() {
        assert!(ChartPoint::new(1.0, 1.0, 2.0, 0.0, 1.0).is_err());
        assert!(ChartPoint::new(0.0, 1.0, 3.0, 0.0, 1.0).is_err());
        assert!(ChartPoint::new(PI, 1.0, 3.0, 0.0, 1.0).is_err());
        assert!(ChartPoint::new(1.0, 0.0, 3.0, 0.0, 1.0).is_err());
        assert!(ChartPoint::new(1.0, 1.0, 3.0, f64::NAN, 1.0).is_err());
        assert!(ChartPoint::new(1.0, 1.0, 3.0, 0.0, -1.0).is_err());
        assert!(ChartPoint::new(1.0, 1.0, 3.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn margin_is_configurable() {
        let r = 2.0 * (1.0 + 1e-8);
        assert!(ChartPoint::new(1.0, 1.0, r, 0.0, 1.0).is_err());
        assert!(ChartPoint::with_margin(1.0, 1.0, r, 0.0, 1.0, 1e-9).is_ok());
    }

    #[test]
    fn samples_are_deterministic_and_scale_with_mass() {
        let a = SampleSet::seeded(1.0, 42, 50).unwrap();
        let b = SampleSet::seeded(1.0, 42, 50).unwrap();
        assert_eq!(a, b);
        let c = SampleSet::seeded(2.0, 42, 50).unwrap();
        for (p, q) in a.points.iter().zip(&c.points) {
            assert_eq!(p.u, q.u);
            assert_eq!(2.0 * p.r, q.r);
            assert_eq!(2.0 * p.t, q.t);
        }
        assert!(a.points.iter().all(|p| p.r > 2.0 && p.r < 100.0));
    }
}
