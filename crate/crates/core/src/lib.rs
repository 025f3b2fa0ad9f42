//! Monte Carlo and exact tools for comparing random polytopes with the
//! Euclidean unit ball: spherical cap geometry, convex hulls, symmetric
//! difference estimators and the pointwise/aggregate lower-bound checks.

pub mod deviation;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod hull;
pub mod linalg;
pub mod lowerbound;
pub mod quadrature;
pub mod sampling;

pub use deviation::{Budgets, DeviationEstimate, Measured, SphereMethod};
pub use error::{Error, Result};
pub use hull::{convex_hull, Facet, Locator, Polytope};
pub use sampling::SeededStream;
