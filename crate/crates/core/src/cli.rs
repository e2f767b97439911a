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

//! Command-line front end.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::format;
use crate::instances::{self, Formula, RandomKind};
use crate::oracle::{self, OracleOptions, DEFAULT_MAX_EDGES};
use crate::rational;
use crate::solve::{solve, Algorithm};

#[derive(Debug, Parser)]
#[command(name = "subsidy-orient", version, about = "Envy-free graph orientations with subsidies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orient an instance and compute payments.
    Solve {
        /// Instance JSON; stdin when omitted.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value = "auto", value_parser = Algorithm::NAMES)]
        algo: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a solution against an instance.
    Verify {
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact minimum subsidy by exhaustive search.
    Oracle {
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
        max_edges: usize,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a generated instance.
    Gen {
        #[arg(long, value_enum)]
        family: GenFamily,
        /// DIMACS CNF for `sat`.
        #[arg(long)]
        formula: Option<PathBuf>,
        /// Variables of a random formula for `sat` when no file is given.
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge pairs for `pairs`.
        #[arg(long, default_value_t = 2)]
        pairs: usize,
        /// Agents for `clique` and `random`.
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Edges for `random`.
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value = "1/100")]
        epsilon: String,
        /// Valuation class for `random`.
        #[arg(long, default_value = "additive-unit")]
        kind: String,
        /// Forbid parallel edges in `random`.
        #[arg(long)]
        simple: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    Sat,
    Pairs,
    Clique,
    Path,
    Random,
}

fn read_input(path: Option<&Path>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = fs::read_to_string(p)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?
        }
        None => {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    let res = match path {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => writeln!(io::stdout().lock(), "{text}"),
    };
    res.map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { instance, algo, output } => {
            let inst = format::instance_from_json(&read_input(instance.as_deref())?)?;
            let sol = solve(&inst, Algorithm::parse(&algo)?)?;
            write_output(output.as_deref(), &format::solution_to_json(&sol))
        }
        Command::Verify { instance, solution, output } => {
            let inst = format::instance_from_json(&read_input(instance.as_deref())?)?;
            let (owner, payments) =
                format::solution_parts_from_json(&read_input(Some(&solution))?)?;
            let report = oracle::verify_raw(&inst, &owner, &payments);
            write_output(output.as_deref(), &format::verify_report_to_json(&report))?;
            if report.all_pass {
                Ok(())
            } else {
                Err(Error::Invariant("solution failed verification".into()))
            }
        }
        Command::Oracle { instance, max_edges, jobs, output } => {
            let inst = format::instance_from_json(&read_input(instance.as_deref())?)?;
            let opts = OracleOptions { max_edges, jobs, stop_at_zero: false };
            let res = oracle::brute_force_with(&inst, &opts)?;
            write_output(output.as_deref(), &format::oracle_result_to_json(&res))
        }
        Command::Gen {
            family,
            formula,
            vars,
            seed,
            pairs,
            n,
            m,
            epsilon,
            kind,
            simple,
            output,
        } => {
            let (inst, label) = match family {
                GenFamily::Sat => {
                    let f = match formula {
                        Some(p) => Formula::parse_dimacs(&read_input(Some(&p))?)?,
                        None => instances::random_2p2n_formula(vars, seed)?,
                    };
                    (
                        instances::gen_from_2p2n3sat(&f)?,
                        Some("sat-reduction: values not unit-normalized; route to oracle or monotone-multi"),
                    )
                }
                GenFamily::Pairs => (instances::gen_parallel_pairs(pairs)?, None),
                GenFamily::Clique => (instances::gen_threshold_clique(n)?, None),
                GenFamily::Path => {
                    (instances::gen_appendix_path(&rational::parse(&epsilon)?)?, None)
                }
                GenFamily::Random => {
                    let kind = RandomKind::parse(&kind)?;
                    let inst = if simple {
                        instances::gen_random_simple(seed, n, m, kind)?
                    } else {
                        instances::gen_random(seed, n, m, kind)?
                    };
                    (inst, None)
                }
            };
            write_output(output.as_deref(), &format::instance_to_json(&inst, label))
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", format::error_to_json(&e));
            e.exit_code()
        }
    }
}
