//! Directed random-graph laboratory.
//!
//! The crate generates directed configuration models from bi-degree
//! sequences (plus the d-out and binomial digraphs), computes exact
//! diameters and distances, simulates Galton-Watson branching processes,
//! and evaluates the limiting diameter constants of the model so that
//! asymptotic predictions can be checked at desk scale.
//!
//! Module map:
//!
//! - [`degmodel`]: bi-degree sequences, joint degree distributions, sampling
//!   and exact sequence statistics.
//! - [`theory`]: generating functions, size-biased and conjugate laws,
//!   survival probabilities and the limiting constants.
//! - [`gwsim`]: Monte Carlo for branching processes (survival, thin events,
//!   duality, subcritical decay).
//! - [`graphgen`]: uniform pairing, simple-graph rejection, lazy half-edge
//!   exploration and derived random digraph models.
//! - [`graphalg`]: BFS distances, exact diameter, neighbourhood profiles,
//!   thin-depth scans and path counting.
//! - [`harness`]: seeded experiment runner with CSV/JSON reports.

pub mod degmodel;
pub mod graphalg;
pub mod graphgen;
pub mod gwsim;
pub mod harness;
pub mod rng;
pub mod stats;
pub mod theory;

use serde::{Deserialize, Serialize};

/// Orientation of an exploration or a distance computation.
///
/// `Out` follows edges from tail to head (out-neighbourhoods of tails);
/// `In` follows them backwards (in-neighbourhoods of heads).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::Out => Direction::In,
            Direction::In => Direction::Out,
        }
    }
}

pub use degmodel::{BiDegreeSequence, JointDegreeDistribution, SequenceStats};
pub use graphgen::Digraph;
pub use theory::{OffspringDistribution, TheoryConstants};
