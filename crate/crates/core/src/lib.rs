//! Maximal degree of planar Poisson–Delaunay graphs: exact triangulation,
//! Voronoi flowers, the typical-degree tail model and a reproducible
//! Monte-Carlo harness.
//!
//! Geometry and the analytic model are generic over [`scalar::Real`]; the
//! aliases below fix the scalar to `f64`, which the sampling and experiment
//! layers use throughout.

pub mod analytic;
pub mod delaunay;
pub mod error;
pub mod experiments;
pub mod flowers;
pub mod geom;
pub mod graph;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod stats;
pub mod suites;

pub use error::{Error, Result};

pub type Point = geom::Point2<f64>;
pub type Disk = geom::Disk<f64>;
pub type Triangulation = delaunay::Triangulation<f64>;
pub type Flower = flowers::Flower<f64>;
pub type TypicalDegreeModel = analytic::TypicalDegreeModel<f64>;
pub type InterpolatedTail = analytic::InterpolatedTail<f64>;
