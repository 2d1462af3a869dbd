//! JSON file formats.
//!
//! * instance: `{"m":3,"n":3,"rankings":[[0,1,2],...]}`, or with `"t"` and
//!   `"prefixes"` for top-t ballots;
//! * metric: `{"points":n+m,"dist":[[...]]}`, agents first;
//! * utility: `{"util":[[...]]}`;
//! * lottery: `{"prob":[...]}`;
//! * report: `{"value":x|"unbounded","arg_optimum":k,"witness":{...}}`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cardinal::{MetricSpace, UtilityProfile};
use crate::lottery::Lottery;
use crate::oracles::{DistortionReport, Witness};
use crate::profile::{Ballots, Profile, TopTProfile, Violation};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    m: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rankings: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefixes: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricFile {
    points: usize,
    dist: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilityFile {
    util: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LotteryFile {
    prob: Vec<f64>,
}

fn parse<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn write(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string(value).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}

fn malformed(origin: &str, message: &str) -> Error {
    Error::Parse { path: origin.to_string(), message: message.to_string() }
}

pub fn parse_instance(text: &str, origin: &str) -> Result<Ballots> {
    let raw: InstanceFile = parse(text, origin)?;
    let (rows, t) = match (raw.rankings, raw.prefixes, raw.t) {
        (Some(r), None, None) => (r, None),
        (None, Some(p), Some(t)) => (p, Some(t)),
        (Some(_), Some(_), _) => return Err(malformed(origin, "both `rankings` and `prefixes` given")),
        (None, Some(_), None) => return Err(malformed(origin, "`prefixes` requires `t`")),
        (Some(_), None, Some(_)) => return Err(malformed(origin, "`t` requires `prefixes`, not `rankings`")),
        (None, None, _) => return Err(malformed(origin, "missing field `rankings` or `prefixes`")),
    };
    if rows.len() != raw.n {
        return Err(Error::InvalidProfile(vec![Violation::AgentCount { declared: raw.n, found: rows.len() }]));
    }
    Ok(match t {
        None => Profile::from_rankings(raw.m, rows)?.into(),
        Some(t) => TopTProfile::from_prefixes(raw.m, t, rows)?.into(),
    })
}

pub fn instance_json(ballots: &Ballots) -> String {
    let raw = match ballots {
        Ballots::Full(p) => InstanceFile { m: p.m(), n: p.n(), t: None, rankings: Some(p.orders()), prefixes: None },
        Ballots::TopT(p) => {
            InstanceFile { m: p.m(), n: p.n(), t: Some(p.t()), rankings: None, prefixes: Some(p.prefixes().to_vec()) }
        }
    };
    serde_json::to_string(&raw).expect("plain data serializes")
}

pub fn load_instance(path: &Path) -> Result<Ballots> {
    parse_instance(&read(path)?, &path.display().to_string())
}

pub fn save_instance(ballots: &Ballots, path: &Path) -> Result<()> {
    Ok(fs::write(path, instance_json(ballots) + "\n")?)
}

/// Parses a metric file for an instance with `n` agents and `m` alternatives.
pub fn parse_metric(text: &str, origin: &str, n: usize, m: usize) -> Result<MetricSpace> {
    let raw: MetricFile = parse(text, origin)?;
    if raw.points != n + m {
        return Err(Error::DimensionMismatch(format!(
            "metric has {} points but the instance needs n + m = {}",
            raw.points,
            n + m
        )));
    }
    MetricSpace::new(n, m, raw.dist)
}

pub fn metric_json(d: &MetricSpace) -> Value {
    json!({ "points": d.n() + d.m(), "dist": d.rows() })
}

pub fn load_metric(path: &Path, n: usize, m: usize) -> Result<MetricSpace> {
    parse_metric(&read(path)?, &path.display().to_string(), n, m)
}

pub fn save_metric(d: &MetricSpace, path: &Path) -> Result<()> {
    write(path, &metric_json(d))
}

pub fn parse_utility(text: &str, origin: &str) -> Result<UtilityProfile> {
    let raw: UtilityFile = parse(text, origin)?;
    UtilityProfile::new(raw.util)
}

pub fn utility_json(u: &UtilityProfile) -> Value {
    json!({ "util": u.rows() })
}

pub fn load_utility(path: &Path) -> Result<UtilityProfile> {
    parse_utility(&read(path)?, &path.display().to_string())
}

pub fn save_utility(u: &UtilityProfile, path: &Path) -> Result<()> {
    write(path, &utility_json(u))
}

pub fn parse_lottery(text: &str, origin: &str) -> Result<Lottery> {
    let raw: LotteryFile = parse(text, origin)?;
    Lottery::new(raw.prob)
}

pub fn load_lottery(path: &Path) -> Result<Lottery> {
    parse_lottery(&read(path)?, &path.display().to_string())
}

pub fn save_lottery(lot: &Lottery, path: &Path) -> Result<()> {
    write(path, lot)
}

pub fn report_json(report: &DistortionReport) -> Value {
    let witness = match &report.witness {
        Some(Witness::Metric(d)) => metric_json(d),
        Some(Witness::Utility(u)) => utility_json(u),
        None => Value::Null,
    };
    json!({
        "value": report.value,
        "arg_optimum": report.arg_optimum,
        "witness": witness,
    })
}
