//! Serialized records: a JSON envelope for every command and the sweep CSV.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use stigma_olg::simulator::{SimStats, VerificationReport};
use stigma_olg::{FigureData, Regime, SweepRow};

use crate::acceptance::CriterionOutcome;

pub const SCHEMA_VERSION: &str = "stigma-olg/1";

pub const CSV_HEADER: [&str; 10] = [
    "pi",
    "b",
    "alpha",
    "eq_low",
    "eq_interior",
    "eq_high",
    "continuum",
    "regime",
    "coop_min",
    "coop_max",
];

pub fn build_id() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub pi_min: f64,
    pub pi_max: f64,
    pub pi_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub grid: Option<GridSpec>,
    pub build: String,
    /// Seconds since the Unix epoch; absent under `--no-timestamp`.
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(seed: Option<u64>, grid: Option<GridSpec>, with_timestamp: bool) -> Self {
        let timestamp = with_timestamp.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        Self {
            seed,
            grid,
            build: build_id(),
            timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPayload {
    pub cutoff: f64,
    pub replications: usize,
    pub stats: SimStats,
    pub report: Option<VerificationReport>,
    /// Why no report could be produced.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Solve(SweepRow),
    Sweep(Vec<SweepRow>),
    Figure(FigureData),
    Simulate(Box<SimulationPayload>),
    Verify(Vec<CriterionOutcome>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    /// Effective configuration after merging the config file and flags.
    pub params: serde_json::Value,
    pub payload: Payload,
    pub provenance: Provenance,
}

impl OutputRecord {
    pub fn new(command: &str, params: &impl Serialize, payload: Payload, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            command: command.to_owned(),
            params: serde_json::to_value(params).expect("config serializes"),
            payload,
            provenance,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("record serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// One line of the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub pi: f64,
    pub b: f64,
    pub alpha: f64,
    pub eq_low: Option<f64>,
    pub eq_interior: Option<f64>,
    pub eq_high: Option<f64>,
    pub continuum: bool,
    pub regime: String,
    pub coop_min: Option<f64>,
    pub coop_max: Option<f64>,
}

impl From<&SweepRow> for CsvRow {
    fn from(row: &SweepRow) -> Self {
        Self {
            pi: row.pi,
            b: row.b,
            alpha: row.alpha,
            eq_low: row.eq_low(),
            eq_interior: row.eq_interior(),
            eq_high: row.eq_high(),
            continuum: row.equilibria.continuum,
            regime: row.regime.name().to_owned(),
            coop_min: row.coop_prob_min,
            coop_max: row.coop_prob_max,
        }
    }
}

impl CsvRow {
    pub fn regime(&self) -> Option<Regime> {
        Regime::from_name(&self.regime)
    }
}

fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

/// Header plus one line per row, `\n`-terminated.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(CSV_HEADER).expect("in-memory write");
        for row in rows {
            w.serialize(CsvRow::from(row)).expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<CsvRow>, csv::Error> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected header {header:?}"),
        )));
    }
    r.deserialize().collect()
}
