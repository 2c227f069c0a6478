//! Single-source shortest paths in weighted unit-disk graphs: an exact
//! `O(n log^2 n)` solver, a `(1 + eps)`-approximate solver, and the
//! Dijkstra baseline they are checked against.
//!
//! Everything geometric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common choices.

pub mod bench;
pub mod envelope;
pub mod format;
pub mod geom;
pub mod instance;
pub mod oracle;
pub mod scalar;
pub mod sssp;
pub mod wnn;

pub use geom::{FloorMode, GeomError, Point, PointSet};
pub use oracle::{build_explicit_graph, dijkstra_baseline, oracle_solve, validate, EdgeEnumeration};
pub use scalar::Scalar;
pub use sssp::{sssp_approx, sssp_exact, CheckReport, Epsilon, SolveError, SolveOptions, SsspResult};

pub type Point64 = Point<f64>;
pub type PointSet64 = PointSet<f64>;
pub type SsspResult64 = SsspResult<f64>;
pub type Epsilon64 = Epsilon<f64>;

pub type Point32 = Point<f32>;
pub type PointSet32 = PointSet<f32>;
pub type SsspResult32 = SsspResult<f32>;
pub type Epsilon32 = Epsilon<f32>;
