// SPDX-License-Identifier: Apache-2.0

//! Detecting and recovering small structures planted in sparse
//! Erdős–Rényi graphs `G(n, lambda/n)`.
//!
//! The crate covers sampling and planting ([`graph`], [`plant`], [`io`]),
//! brute-force reference computations ([`oracle`]), threshold formulas
//! ([`theory`]), the detection tests ([`detect`]), reconstruction
//! ([`reconstruct`]) and the Monte Carlo harness ([`experiments`]).
//!
//! With the default `parallel` feature, trials run on the rayon pool;
//! without it everything is sequential. Results do not depend on either.

pub mod detect;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod par;
pub mod plant;
pub mod reconstruct;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{sample_er, Graph};
pub use plant::{plant, GroundTruth, Instance, PlantSpec};
