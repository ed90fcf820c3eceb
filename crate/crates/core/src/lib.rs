//! Lensed-image multiplets for the catastrophe normal forms of gravitational
//! lensing, and numerical certification of the signed magnification
//! invariant `Σ μ_i = 0` through its holomorphic Lefschetz decomposition.
//!
//! * [`poly`]: complex polynomial arithmetic and root finding
//! * [`catalog`]: the seven polynomial lensing maps and their potentials
//! * [`imaging`]: image multiplets, magnifications, invariant reports
//! * [`lefschetz`]: fixed-point map, projective extension, indices at infinity
//! * [`caustics`]: critical curves, caustics, cusp detection, image-count grids

pub mod catalog;
pub mod caustics;
pub mod imaging;
pub mod lefschetz;
pub mod poly;

pub use num_complex::Complex64;

pub use catalog::{CatastropheModel, ControlParams, ModelId};
pub use imaging::{InvariantReport, SamplingBox, Solution, SolutionSet, SolveOptions};
pub use lefschetz::{FixedPointMap, InfinityFixedPoint, LefschetzReport, ProjectiveMap};
