// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Envy-free orientations of multigraphs with bounded or minimum subsidy.
//!
//! Agents are vertices and every edge is an item valued only by its two
//! endpoints. An [`Orientation`] hands each edge to one endpoint; a
//! [`PaymentVector`] then removes envy. The solvers in this crate produce
//! orientations together with minimal payments, and [`oracle`] computes
//! exact optima on small instances for comparison.
//!
//! All arithmetic is exact over [`Rational`].

pub mod additive;
pub mod binary;
pub mod cli;
pub mod envy;
pub mod error;
pub mod format;
pub mod instances;
pub mod model;
pub mod monotone;
pub mod oracle;
pub mod rational;
pub mod simple;
pub mod solve;
pub mod subroutines;

pub use additive::solve_additive_multigraph;
pub use binary::solve_binary;
pub use envy::{build_envy_graph, is_ef_with_payments, is_envy_freeable, min_payments, EnvyGraph};
pub use error::{Error, Result};
pub use model::{
    AgentId, Diagnostics, Edge, EdgeId, Instance, MonotoneFamily, MultiGraph, Orientation,
    PaymentVector, Solution, ValuationProfile,
};
pub use monotone::solve_monotone_multigraph;
pub use oracle::{brute_force_min_subsidy, verify_solution, OracleResult, VerifyReport};
pub use rational::Rational;
pub use simple::solve_simple_monotone;
pub use solve::{solve, Algorithm};
