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

use thiserror::Error;

/// Errors produced by the solvers, generators and serialization layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed instance, unknown ids, bad parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A valuation is not scaled the way a solver requires.
    #[error("normalization: {0}")]
    Normalization(String),
    /// Any other solver precondition (graph shape, valuation class).
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("orientation is not envy-freeable")]
    NotEnvyFreeable,
    #[error("refusing to enumerate 2^{edges} orientations (limit is {limit} edges)")]
    TooManyEdges { edges: usize, limit: usize },
    /// A guarantee the algorithm relies on did not hold.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Machine-readable reason tag used by the CLI and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Normalization(_) => "normalization",
            Error::Precondition(_) => "precondition",
            Error::NotEnvyFreeable => "not_envy_freeable",
            Error::TooManyEdges { .. } => "too_many_edges",
            Error::Invariant(_) => "invariant",
        }
    }

    /// Process exit code: 2 for input errors, 3 for precondition errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 2,
            Error::Normalization(_)
            | Error::Precondition(_)
            | Error::NotEnvyFreeable
            | Error::TooManyEdges { .. } => 3,
            Error::Invariant(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
