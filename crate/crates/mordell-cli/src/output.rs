//! Machine-readable output records.
//!
//! Every command can emit one JSON record with a fixed top-level shape;
//! `schema/output.schema.json` in the repository root describes it. Two runs
//! of the same invocation produce byte-identical records except for the
//! `timings` block. Rationals are serialized as exact `num/den` strings
//! (bare integers when the denominator is 1); arbitrary-precision reals as
//! decimal strings carrying the full working precision.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Serialize)]
pub struct OutputRecord<I: Serialize, R: Serialize> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: I,
    pub results: R,
    /// Per-phase wall-clock milliseconds.
    pub timings: BTreeMap<&'static str, u128>,
}

pub const SCHEMA_VERSION: &str = "1";

pub fn render<I: Serialize, R: Serialize>(rec: &OutputRecord<I, R>) -> String {
    let mut s = serde_json::to_string_pretty(rec).expect("record serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
pub struct VerifyInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutate: Option<String>,
}

#[derive(Serialize)]
pub struct IdentityOut {
    pub name: &'static str,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct VerifyResults {
    pub identities: Vec<IdentityOut>,
    pub all_pass: bool,
}

#[derive(Serialize)]
pub struct ShowInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

#[derive(Serialize)]
pub struct PointOut {
    pub label: String,
    pub x: String,
    pub y: String,
}

#[derive(Serialize)]
#[serde(tag = "kind")]
pub enum ShowResults {
    #[serde(rename = "specialization")]
    Specialization {
        n: String,
        degenerate: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        d: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        points: Option<Vec<PointOut>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        coincident_points: Option<bool>,
        #[serde(skip_serializing_if = "Option::is_none")]
        torsion_hits: Option<bool>,
    },
    #[serde(rename = "symbolic")]
    Symbolic {
        stage: String,
        d: String,
        points: Vec<PointOut>,
    },
}

#[derive(Serialize)]
pub struct RegulatorInputs {
    pub n: String,
    pub precision: u32,
}

#[derive(Serialize)]
pub struct RegulatorResults {
    pub n: String,
    pub d: String,
    pub precision: u32,
    pub normalization: &'static str,
    pub gram_matrix: Vec<Vec<String>>,
    pub regulator: String,
    pub eigenvalues: Vec<String>,
    pub min_eigenvalue: String,
    pub rank_lower_bound: usize,
}

#[derive(Serialize)]
pub struct ScanInputs {
    pub input: String,
    pub precision: u32,
    pub denom_bound: u32,
    pub numer_bound: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

#[derive(Clone, Serialize)]
pub struct ScanRowOut {
    pub n: String,
    pub d: Option<String>,
    pub rank_lower_bound: Option<usize>,
    pub regulator: Option<String>,
    pub num_points: Option<usize>,
    pub truncated: bool,
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct ScanResults {
    pub rows: Vec<ScanRowOut>,
}
