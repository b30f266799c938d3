//! Exact convex-geometry toolkit for stability invariants of toric Fano polytopes.
//!
//! Everything is computed over arbitrary-precision rationals: polytope volumes,
//! barycenters, lattice-point enumeration, piecewise-linear convex functions,
//! linear programs, and the energy-type invariants built on top of them. There
//! is no floating point anywhere; verdicts reduce to exact sign tests.

pub mod analyzer;
pub mod error;
pub mod filtration;
pub mod jnorm;
mod linalg;
pub mod lp;
pub mod model;
pub mod nafunc;
pub mod pl;
pub mod polytope;
pub mod rational;
pub mod sampling;
pub mod vector;

pub use analyzer::{analyze, AnalyzerConfig, InvariantReport, VerdictState};
pub use error::KstabError;
pub use filtration::{DhMeasure, LimitConfig, LimitValue, RescaledMetric, ToricFiltration};
pub use jnorm::{jnat, properness_certificate, JnormSolution, PropernessCertificate};
pub use model::{ToricFanoModel, TwistVector};
pub use nafunc::CmWeight;
pub use pl::{minimize_pl_convex, AffinePiece, PlConvexFunction};
pub use polytope::{Facet, RationalPolytope};
pub use rational::{rat, rat_int, Int, Ratio};
pub use vector::QVec;
