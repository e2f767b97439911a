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

//! JSON forms of instances, solutions and reports. Every rational is a
//! string such as `"3/4"` or `"2"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AgentId, Check, ComponentRecord, Diagnostics, Instance, MonotoneFamily, MultiGraph, Solution,
    Sub2Record, ValuationProfile,
};
use crate::oracle::{OracleResult, VerifyReport};
use crate::rational::{self, Rational};

#[derive(Debug, Serialize, Deserialize)]
struct EdgeJson {
    id: usize,
    u: AgentId,
    v: AgentId,
    vu: String,
    vv: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
enum FamilyJson {
    #[serde(rename = "additive")]
    Additive,
    #[serde(rename = "capped")]
    Capped { cap: String },
    #[serde(rename = "all_or_nothing")]
    AllOrNothing { threshold: usize },
    #[serde(rename = "unit_demand")]
    UnitDemand,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ValuationJson {
    Additive,
    Monotone { agents: Vec<FamilyJson> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    agents: usize,
    edges: Vec<EdgeJson>,
    valuation: ValuationJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidInput(format!("malformed JSON: {e}"))
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let raw: InstanceJson = serde_json::from_str(text).map_err(json_err)?;
    let mut edges = raw.edges;
    edges.sort_by_key(|e| e.id);
    if edges.iter().enumerate().any(|(k, e)| e.id != k) {
        return Err(Error::InvalidInput("edge ids must be exactly 0..m-1".into()));
    }
    let endpoints: Vec<_> = edges.iter().map(|e| (e.u, e.v)).collect();
    let values = edges
        .iter()
        .map(|e| Ok([rational::parse(&e.vu)?, rational::parse(&e.vv)?]))
        .collect::<Result<Vec<_>>>()?;
    let profile = match raw.valuation {
        ValuationJson::Additive => ValuationProfile::Additive,
        ValuationJson::Monotone { agents } => ValuationProfile::Monotone(
            agents
                .into_iter()
                .map(|f| {
                    Ok(match f {
                        FamilyJson::Additive => MonotoneFamily::PlainAdditive,
                        FamilyJson::Capped { cap } => MonotoneFamily::AdditiveCapped {
                            cap: rational::parse(&cap)?,
                        },
                        FamilyJson::AllOrNothing { threshold } => {
                            MonotoneFamily::AllOrNothingDegree { threshold }
                        }
                        FamilyJson::UnitDemand => MonotoneFamily::UnitDemand,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let graph = MultiGraph::new(raw.agents, &endpoints)?;
    Instance::new(graph, values, profile)
}

pub fn instance_to_json(inst: &Instance, label: Option<&str>) -> String {
    let edges = inst
        .graph()
        .edges()
        .iter()
        .map(|e| EdgeJson {
            id: e.id,
            u: e.u,
            v: e.v,
            vu: rational::format(&inst.edge_values()[e.id][0]),
            vv: rational::format(&inst.edge_values()[e.id][1]),
        })
        .collect();
    let valuation = match inst.profile() {
        ValuationProfile::Additive => ValuationJson::Additive,
        ValuationProfile::Monotone(fams) => ValuationJson::Monotone {
            agents: fams
                .iter()
                .map(|f| match f {
                    MonotoneFamily::PlainAdditive => FamilyJson::Additive,
                    MonotoneFamily::AdditiveCapped { cap } => FamilyJson::Capped {
                        cap: rational::format(cap),
                    },
                    MonotoneFamily::AllOrNothingDegree { threshold } => {
                        FamilyJson::AllOrNothing { threshold: *threshold }
                    }
                    MonotoneFamily::UnitDemand => FamilyJson::UnitDemand,
                })
                .collect(),
        },
    };
    let raw = InstanceJson {
        agents: inst.n_agents(),
        edges,
        valuation,
        label: label.map(str::to_string),
    };
    serde_json::to_string_pretty(&raw).expect("instance serializes")
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::format).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct BoundJson {
    name: String,
    value: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckJson {
    name: String,
    passed: bool,
    detail: String,
}

impl From<&Check> for CheckJson {
    fn from(c: &Check) -> Self {
        CheckJson {
            name: c.name.clone(),
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ComponentJson<'a> {
    agents: &'a [AgentId],
    properties: &'a [String],
    witness: &'a str,
    subsidized: Option<AgentId>,
}

impl<'a> From<&'a ComponentRecord> for ComponentJson<'a> {
    fn from(c: &'a ComponentRecord) -> Self {
        ComponentJson {
            agents: &c.agents,
            properties: &c.properties,
            witness: &c.witness,
            subsidized: c.subsidized,
        }
    }
}

#[derive(Debug, Serialize)]
struct Sub2Json<'a> {
    agent: AgentId,
    parent: AgentId,
    k: AgentId,
    w: String,
    t: String,
    children_w: String,
    r: &'a [AgentId],
    q1: &'a [AgentId],
    q1_prime: &'a [AgentId],
    q2: &'a [AgentId],
    q3: &'a [AgentId],
    q4: &'a [AgentId],
    q5: &'a [AgentId],
}

impl<'a> From<&'a Sub2Record> for Sub2Json<'a> {
    fn from(r: &'a Sub2Record) -> Self {
        Sub2Json {
            agent: r.agent,
            parent: r.parent,
            k: r.k,
            w: rational::format(&r.w),
            t: rational::format(&r.t),
            children_w: rational::format(&r.children_w),
            r: &r.r,
            q1: &r.q1,
            q1_prime: &r.q1_prime,
            q2: &r.q2,
            q3: &r.q3,
            q4: &r.q4,
            q5: &r.q5,
        }
    }
}

#[derive(Debug, Serialize)]
struct DiagnosticsJson<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    thresholds: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentJson<'a>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sub2: Vec<Sub2Json<'a>>,
    checks: Vec<CheckJson>,
}

impl<'a> From<&'a Diagnostics> for DiagnosticsJson<'a> {
    fn from(d: &'a Diagnostics) -> Self {
        DiagnosticsJson {
            thresholds: d.thresholds.as_deref().map(strings),
            w: d.w.as_deref().map(strings),
            t: d.t.as_deref().map(strings),
            components: d.components.iter().map(Into::into).collect(),
            sub2: d.sub2.iter().map(Into::into).collect(),
            checks: d.checks.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct SolutionJson<'a> {
    algorithm: &'a str,
    orientation: &'a [AgentId],
    payments: Vec<String>,
    total_subsidy: String,
    /// Decimal approximation for humans; not authoritative.
    total_subsidy_approx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_used: Option<BoundJson>,
    diagnostics: DiagnosticsJson<'a>,
}

fn solution_json(sol: &Solution) -> SolutionJson<'_> {
    let total = sol.total_subsidy();
    SolutionJson {
        algorithm: &sol.algorithm,
        orientation: sol.orientation.owners(),
        payments: strings(sol.payments.as_slice()),
        total_subsidy: rational::format(&total),
        total_subsidy_approx: rational::approx(&total),
        bound_used: sol.bound.as_ref().map(|(name, value)| BoundJson {
            name: name.clone(),
            value: rational::format(value),
        }),
        diagnostics: (&sol.diagnostics).into(),
    }
}

pub fn solution_to_json(sol: &Solution) -> String {
    serde_json::to_string_pretty(&solution_json(sol)).expect("solution serializes")
}

#[derive(Debug, Deserialize)]
struct SolutionIn {
    orientation: Vec<AgentId>,
    payments: Vec<String>,
}

/// Owner list and payments read from a solution document.
pub fn solution_parts_from_json(text: &str) -> Result<(Vec<AgentId>, Vec<Rational>)> {
    let raw: SolutionIn = serde_json::from_str(text).map_err(json_err)?;
    let payments = raw
        .payments
        .iter()
        .map(|s| rational::parse(s))
        .collect::<Result<Vec<_>>>()?;
    Ok((raw.orientation, payments))
}

#[derive(Debug, Serialize)]
struct VerifyJson {
    all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_subsidy: Option<String>,
    checks: Vec<CheckJson>,
}

pub fn verify_report_to_json(r: &VerifyReport) -> String {
    let raw = VerifyJson {
        all_pass: r.all_pass,
        total_subsidy: r.total_subsidy.as_ref().map(rational::format),
        checks: r.checks.iter().map(Into::into).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("report serializes")
}

#[derive(Debug, Serialize)]
struct OracleJson<'a> {
    min_total: String,
    min_total_approx: f64,
    ef_zero_exists: bool,
    visited: u64,
    argmin: SolutionJson<'a>,
}

pub fn oracle_result_to_json(r: &OracleResult) -> String {
    let raw = OracleJson {
        min_total: rational::format(&r.min_total),
        min_total_approx: rational::approx(&r.min_total),
        ef_zero_exists: r.ef_zero_exists,
        visited: r.visited,
        argmin: solution_json(&r.argmin),
    };
    serde_json::to_string_pretty(&raw).expect("oracle result serializes")
}

pub fn error_to_json(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}
