//! Exact combinatorics of finite metric spaces.
//!
//! Everything here works over exact rationals: amalgamation and metric
//! completion, the 4-values condition on distance sets, Katetov extensions
//! and finite Urysohn approximations, ultrametric trees and Ramsey degrees,
//! and finite experiments around indivisibility.

pub mod error;
pub mod four_values;
pub mod katetov;
pub mod partitions;
pub mod ramsey;
pub mod rational;
pub mod spaces;
pub mod ultrametric;

pub use error::{Error, Result};
pub use rational::{q, Rational};
pub use spaces::{DistanceSet, EdgeLabelledGraph, FiniteMetricSpace, LinearOrdering, PointMap};
