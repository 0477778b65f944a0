//! Multi-color discrepancy and group fair division: randomized hard instances,
//! exact and heuristic solvers, and numerical checks of the probability
//! inequalities behind the lower bounds.

pub mod discrepancy;
pub mod error;
pub mod fairness;
pub mod generators;
pub mod hp;
pub mod model;
pub mod probability;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub use model::{Allocation, BoundReport, Coloring, GroupedInstance, LinkKind, SetSystem};
pub use rational::{Rational, Threshold};
