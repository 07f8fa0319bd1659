//! Vehicle trace CSV: `t_s,vehicle_id,x_m,y_m,speed_mps`, one row per
//! sample, sorted by time.

use std::io::{Read, Write};

use thiserror::Error;
use v2n_core::error::TraceError;
use v2n_core::{MobilityTrace, Position, TraceSample};

pub const HEADER: [&str; 5] = ["t_s", "vehicle_id", "x_m", "y_m", "speed_mps"];

#[derive(Debug, Error)]
pub enum TraceCsvError {
    #[error("empty trace")]
    Empty,
    #[error("missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("invalid `{column}` value `{value}` at line {line}")]
    BadValue {
        column: &'static str,
        value: String,
        line: u64,
    },
    #[error("vehicle `{found}` at line {line} differs from `{first}`; one vehicle per trace")]
    MixedVehicles {
        first: String,
        found: String,
        line: u64,
    },
    #[error("{kind} at line {line}")]
    Invalid { kind: &'static str, line: u64 },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Summary printed by `validate-trace`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub samples: usize,
    /// Time covered, counting one sample period for the last sample.
    pub duration_s: f64,
    pub max_speed_mps: f64,
    pub uniform_dt_s: Option<f64>,
}

impl TraceReport {
    pub fn of(trace: &MobilityTrace) -> Self {
        let n = trace.len();
        let duration_s = if n > 1 {
            trace.span() * n as f64 / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            samples: n,
            duration_s,
            max_speed_mps: trace.max_speed(),
            uniform_dt_s: trace.dt(),
        }
    }
}

impl std::fmt::Display for TraceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "samples {}", self.samples)?;
        writeln!(f, "duration {:.1} s", self.duration_s)?;
        writeln!(f, "max speed {:.2} m/s", self.max_speed_mps)?;
        match self.uniform_dt_s {
            Some(dt) => writeln!(f, "timestamps strictly increasing, uniform step {dt} s"),
            None => writeln!(f, "timestamps strictly increasing, non-uniform step"),
        }
    }
}

fn column(headers: &csv::StringRecord, name: &'static str) -> Result<usize, TraceCsvError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or(TraceCsvError::MissingColumn(name))
}

/// Parses and validates a trace. Errors carry the 1-based file line.
pub fn parse_trace<R: Read>(input: R) -> Result<MobilityTrace, TraceCsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().all(str::is_empty) {
        return Err(TraceCsvError::Empty);
    }
    let [t_col, id_col, x_col, y_col, v_col] = [
        column(&headers, HEADER[0])?,
        column(&headers, HEADER[1])?,
        column(&headers, HEADER[2])?,
        column(&headers, HEADER[3])?,
        column(&headers, HEADER[4])?,
    ];

    let mut samples = Vec::new();
    let mut lines = Vec::new();
    let mut vehicle: Option<String> = None;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize, name: &'static str| -> Result<f64, TraceCsvError> {
            let raw = record.get(col).unwrap_or("");
            raw.parse::<f64>().map_err(|_| TraceCsvError::BadValue {
                column: name,
                value: raw.to_string(),
                line,
            })
        };
        let t = field(t_col, "t_s")?;
        let x = field(x_col, "x_m")?;
        let y = field(y_col, "y_m")?;
        let speed = field(v_col, "speed_mps")?;
        let id = record.get(id_col).unwrap_or("").to_string();
        match &vehicle {
            None => vehicle = Some(id),
            Some(first) if *first != id => {
                return Err(TraceCsvError::MixedVehicles {
                    first: first.clone(),
                    found: id,
                    line,
                })
            }
            Some(_) => {}
        }
        samples.push(TraceSample {
            t,
            position: Position::new(x, y),
            speed,
        });
        lines.push(line);
    }

    MobilityTrace::new(samples).map_err(|e| {
        let at = |index: usize| lines.get(index).copied().unwrap_or(0);
        match e {
            TraceError::Empty => TraceCsvError::Empty,
            TraceError::NonFinite { index } => TraceCsvError::Invalid {
                kind: "non-finite value",
                line: at(index),
            },
            TraceError::NegativeTime { index } => TraceCsvError::Invalid {
                kind: "negative timestamp",
                line: at(index),
            },
            TraceError::NonMonotone { index } => TraceCsvError::Invalid {
                kind: "non-monotone timestamp",
                line: at(index),
            },
            TraceError::NegativeSpeed { index } => TraceCsvError::Invalid {
                kind: "negative speed",
                line: at(index),
            },
            TraceError::InvalidStep { .. } | TraceError::StepExceedsSpan { .. } => {
                unreachable!("construction does not resample")
            }
        }
    })
}

/// Writes `trace` for vehicle `vehicle_id` with LF line endings.
pub fn write_trace<W: Write>(
    out: W,
    trace: &MobilityTrace,
    vehicle_id: &str,
) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for s in trace.samples() {
        w.write_record([
            s.t.to_string(),
            vehicle_id.to_string(),
            s.position.x.to_string(),
            s.position.y.to_string(),
            s.speed.to_string(),
        ])?;
    }
    w.flush()
}
