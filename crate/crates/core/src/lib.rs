//! Exterior calculus on the exterior Schwarzschild chart, the symplectic
//! form built from its Lorentzian structure, and the associated prequantum
//! operator algebra.
//!
//! The crate is `no_std` and needs only `alloc`. Reports are plain
//! `serde`-serializable structs; file formats and the CLI live in the `sws`
//! crate.

#![no_std]

extern crate alloc;

pub mod chart;
pub mod error;
pub mod expr;
pub mod field;
pub mod form;
pub mod metric;

pub use chart::{ChartPoint, Coord, CoordBox, SampleSet};
pub use error::{Error, Result};
pub use expr::{Expr, Rational};
pub use field::VectorField;
pub use form::{Blade, KForm};
pub use metric::MetricTensor;
pub mod displays;
pub mod report;
pub mod spacetime;
pub mod symplectic;
pub mod prequant;
pub mod suite;

pub use report::{CheckReport, Tolerances};
pub use spacetime::SpacetimeModel;
