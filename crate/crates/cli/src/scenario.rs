//! Scenario and report schemas. Scenarios are JSON records with an explicit
//! schema version; unknown fields are rejected. Reports serialize with
//! sorted object keys, so identical inputs produce identical bytes.

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use kisin_core::ext::ShapeTag;
use kisin_core::model::{CharClass, WeightTemplate};
use kisin_core::rank1::{Rank1Kisin, Rank1Record};
use kisin_core::series::TruncSeries;
use kisin_core::shape::TriangularKisin;
use kisin_core::{FqElem, GlobalParams, ParamsConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub params: ParamsConfig,
    pub task: String,
    pub payload: serde_json::Value,
}

impl Scenario {
    pub fn from_str(text: &str) -> anyhow::Result<Scenario> {
        let scenario: Scenario =
            serde_json::from_str(text).context("scenario does not match the schema")?;
        if scenario.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema version {} (expected {})",
                scenario.schema_version,
                SCHEMA_VERSION
            );
        }
        Ok(scenario)
    }
}

/// A character as (exponent, unit coordinates).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharRecord {
    pub e: i64,
    pub a: Vec<i64>,
}

impl CharRecord {
    pub fn decode(&self, params: &GlobalParams) -> anyhow::Result<CharClass> {
        let a = params.field().from_coeffs(&self.a)?;
        Ok(CharClass::new(params, self.e, a)?)
    }
}

/// One strictly-upper series entry; coeffs[k] holds the coordinates of the
/// u^k coefficient.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub s: usize,
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<Vec<i64>>,
}

/// An upper-triangular module: weight rows, unit coordinates per row, and
/// optional off-diagonal entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleRecord {
    pub t: Vec<Vec<i64>>,
    pub units: Vec<Vec<i64>>,
    #[serde(default)]
    pub entries: Vec<EntryRecord>,
}

impl ModuleRecord {
    pub fn decode(&self, params: &GlobalParams) -> anyhow::Result<TriangularKisin> {
        let ctx = params.field();
        let units = self
            .units
            .iter()
            .map(|c| ctx.from_coeffs(c))
            .collect::<Result<Vec<FqElem>, _>>()?;
        let mut m = TriangularKisin::diagonal(params, self.t.clone(), units)?;
        for e in &self.entries {
            let coeffs = e
                .coeffs
                .iter()
                .map(|c| ctx.from_coeffs(c))
                .collect::<Result<Vec<FqElem>, _>>()?;
            m.set_entry(e.s, e.i, e.j, TruncSeries::from_coeffs(&coeffs, params.n()))?;
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelsPayload {
    pub chars: Vec<CharRecord>,
    pub template: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsPayload {
    pub chars: Vec<CharRecord>,
    pub template: Vec<Vec<i64>>,
    /// Ordered rank-1 row sequence for the extreme-pair check; when absent
    /// and the model is unique, the model's rows are used with unit 1.
    #[serde(default)]
    pub rank1_seq: Option<Vec<Rank1Record>>,
    /// Weakly decreasing weight tuple per embedding, for the shifted gates.
    #[serde(default)]
    pub serre_weight: Option<Vec<Vec<i64>>>,
    /// Unramified part of the cyclotomic class (coordinates); defaults to 1.
    #[serde(default)]
    pub a_cyc: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtPayload {
    pub sub: ModuleRecord,
    pub quot: ModuleRecord,
    #[serde(default)]
    pub height: Option<i64>,
    /// "ext-shape" or "phi-shape".
    pub shape_tag: String,
    /// Also run the rank-1-sub dimension bound check.
    #[serde(default)]
    pub check_bound: bool,
    /// Optional extension block; when given, the report states whether it is
    /// equivalent to zero (a base-change witness exists).
    #[serde(default)]
    pub c_target: Option<Vec<EntryRecord>>,
}

impl ExtPayload {
    pub fn tag(&self) -> anyhow::Result<ShapeTag> {
        match self.shape_tag.as_str() {
            "ext-shape" => Ok(ShapeTag::ExtShape),
            "phi-shape" => Ok(ShapeTag::PhiShape),
            other => Err(anyhow!("unknown shape tag {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeVerifyPayload {
    pub t: Vec<i64>,
    /// "exhaustive" or "random".
    pub mode: String,
    #[serde(default)]
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlsPayload {
    pub chars: Vec<CharRecord>,
    pub template: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPayload {
    #[serde(default)]
    pub profile: Option<String>,
}

pub fn decode_chars(
    params: &GlobalParams,
    records: &[CharRecord],
) -> anyhow::Result<Vec<CharClass>> {
    records.iter().map(|r| r.decode(params)).collect()
}

pub fn decode_template(
    params: &GlobalParams,
    cols: &[Vec<i64>],
) -> anyhow::Result<WeightTemplate> {
    Ok(WeightTemplate::new(params, cols.to_vec())?)
}

pub fn decode_rank1_rows(
    params: &GlobalParams,
    rows: &[Vec<i64>],
    units: Option<&[Vec<i64>]>,
) -> anyhow::Result<Vec<Rank1Kisin>> {
    let ctx = params.field();
    rows.iter()
        .enumerate()
        .map(|(i, t)| {
            let a = match units {
                Some(us) => ctx.from_coeffs(
                    us.get(i)
                        .ok_or_else(|| anyhow!("missing unit for row {i}"))?,
                )?,
                None => FqElem::ONE,
            };
            Ok(Rank1Kisin::new(params, t.clone(), a)?)
        })
        .collect()
}

/// Report envelope. Everything below `results` is task-specific but built
/// from deterministic, sorted structures.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub task: String,
    pub seed: u64,
    /// Echo of the scenario parameters; absent for parameterless sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    pub results: serde_json::Value,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports serialize");
        out.push('\n');
        out
    }
}
