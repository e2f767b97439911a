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

//! Solver selection.

use crate::additive::solve_additive_multigraph;
use crate::binary::solve_binary;
use crate::error::{invalid, Result};
use crate::model::{Instance, Solution};
use crate::monotone::solve_monotone_multigraph;
use crate::simple::solve_simple_monotone;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Binary,
    MonotoneMulti,
    AdditiveMulti,
    SimpleMonotone,
    Auto,
}

impl Algorithm {
    pub const NAMES: [&'static str; 5] =
        ["binary", "monotone-multi", "additive-multi", "simple-monotone", "auto"];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "binary" => Algorithm::Binary,
            "monotone-multi" => Algorithm::MonotoneMulti,
            "additive-multi" => Algorithm::AdditiveMulti,
            "simple-monotone" => Algorithm::SimpleMonotone,
            "auto" => Algorithm::Auto,
            _ => return invalid(format!("unknown algorithm {s:?}")),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Binary => "binary",
            Algorithm::MonotoneMulti => "monotone-multi",
            Algorithm::AdditiveMulti => "additive-multi",
            Algorithm::SimpleMonotone => "simple-monotone",
            Algorithm::Auto => "auto",
        }
    }
}

/// The strongest solver whose preconditions the instance meets.
pub fn auto_choice(inst: &Instance) -> Algorithm {
    if inst.is_binary() && inst.is_unit_normalized() {
        Algorithm::Binary
    } else if inst.is_additive() && inst.is_unit_normalized() {
        Algorithm::AdditiveMulti
    } else if inst.graph().is_simple() && inst.n_agents() >= 3 && inst.max_marginal_at_most_one() {
        Algorithm::SimpleMonotone
    } else {
        Algorithm::MonotoneMulti
    }
}

pub fn solve(inst: &Instance, algo: Algorithm) -> Result<Solution> {
    match algo {
        Algorithm::Binary => solve_binary(inst),
        Algorithm::MonotoneMulti => solve_monotone_multigraph(inst),
        Algorithm::AdditiveMulti => solve_additive_multigraph(inst),
        Algorithm::SimpleMonotone => solve_simple_monotone(inst),
        Algorithm::Auto => solve(inst, auto_choice(inst)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_appendix_path, gen_parallel_pairs, gen_threshold_clique};
    use crate::rational::frac;

    #[test]
    fn auto_dispatch() {
        assert_eq!(auto_choice(&gen_parallel_pairs(2).unwrap()), Algorithm::Binary);
        assert_eq!(
            auto_choice(&gen_appendix_path(&frac(1, 100)).unwrap()),
            Algorithm::AdditiveMulti
        );
        assert_eq!(auto_choice(&gen_threshold_clique(5).unwrap()), Algorithm::SimpleMonotone);
    }

    #[test]
    fn names_round_trip() {
        for n in Algorithm::NAMES {
            assert_eq!(Algorithm::parse(n).unwrap().name(), n);
        }
        assert!(Algorithm::parse("greedy").is_err());
    }
}
