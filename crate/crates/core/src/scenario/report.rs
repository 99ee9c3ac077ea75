//! Report records and their CSV / JSON encodings.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// Fixed CSV column order.
pub const CSV_COLUMNS: [&str; 10] = [
    "parameter",
    "k_factor",
    "fractional_shift",
    "phase_coefficient",
    "doppler_shift_rad_s",
    "p_d1",
    "p_d2",
    "counts_d1",
    "counts_d2",
    "required_quanta",
];

/// Results for one scenario evaluation. Absent quantities were not requested
/// by the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Swept parameter value, if part of a sweep.
    pub parameter: Option<f64>,
    /// `2ΩR/c`
    pub k_factor: f64,
    /// `Δω/ω = 4K` for the axis-parallel flyby.
    pub fractional_shift: f64,
    /// `2K`, the coefficient of ω inside cos²/sin² of the detector probabilities.
    pub phase_coefficient: f64,
    pub doppler_shift_rad_s: Option<f64>,
    /// Phase applied in the interferometer arm, reduced to [0, 2π).
    pub delta_phase_rad: Option<f64>,
    /// Probability at the first declared detector.
    pub p_d1: Option<f64>,
    /// Probability at the second declared detector.
    pub p_d2: Option<f64>,
    pub counts_d1: Option<u64>,
    pub counts_d2: Option<u64>,
    /// `None` also when the phase carries no signal.
    pub required_quanta: Option<u64>,
    /// Seed used for this row's count sample.
    pub seed: Option<u64>,
}

/// Units for every field that carries one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub parameter: Option<String>,
    pub k_factor: String,
    pub fractional_shift: String,
    pub phase_coefficient: String,
    pub doppler_shift_rad_s: String,
    pub delta_phase_rad: String,
    pub p_d1: String,
    pub p_d2: String,
    pub counts_d1: String,
    pub counts_d2: String,
    pub required_quanta: String,
}

impl Units {
    pub fn new(parameter_unit: Option<&str>) -> Self {
        let s = |x: &str| x.to_string();
        Self {
            parameter: parameter_unit.map(s),
            k_factor: s("1"),
            fractional_shift: s("1"),
            phase_coefficient: s("1"),
            doppler_shift_rad_s: s("rad/s"),
            delta_phase_rad: s("rad"),
            p_d1: s("1"),
            p_d2: s("1"),
            counts_d1: s("quanta"),
            counts_d2: s("quanta"),
            required_quanta: s("quanta"),
        }
    }
}

/// The structured output document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    /// Name of the swept parameter, if any.
    pub parameter_name: Option<String>,
    /// Detector names behind `p_d1`/`p_d2` and the count columns.
    pub detectors: Vec<String>,
    /// Random generator used for count samples.
    pub rng: String,
    pub units: Units,
    pub rows: Vec<Report>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (csv, json)")),
        }
    }
}

// Debug formatting of f64 is the shortest representation that round-trips.
fn float(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn int(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(rows: &[Report], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for r in rows {
        let fields = [
            float(r.parameter),
            float(Some(r.k_factor)),
            float(Some(r.fractional_shift)),
            float(Some(r.phase_coefficient)),
            float(r.doppler_shift_rad_s),
            float(r.p_d1),
            float(r.p_d2),
            int(r.counts_d1),
            int(r.counts_d2),
            int(r.required_quanta),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_json(doc: &ReportDocument, out: &mut impl Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, doc)?;
    writeln!(out)
}

/// Writes `doc` in the requested format.
pub fn emit(doc: &ReportDocument, format: OutputFormat, out: &mut impl Write) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(&doc.rows, out),
        OutputFormat::Json => write_json(doc, out),
    }
}
