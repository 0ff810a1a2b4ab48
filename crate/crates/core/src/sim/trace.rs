//! Per-step telemetry and its CSV form.
//!
//! The file starts with one metadata line
//! `# schema=<n> mode=<pd|pd-t2fnn> ts=<s> period=<s> laps=<n> seed_gps=<n> seed_steering=<n>`
//! followed by a header row with the [`TraceRow`] field names.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::ControllerMode;
use crate::{Error, Result};

use super::scenario::Seeds;

pub const SCHEMA_VERSION: u32 = 1;

/// One control period of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    // reference
    pub x_ref: f64,
    pub y_ref: f64,
    pub x_dot_ref: f64,
    pub y_dot_ref: f64,
    // true state (CG)
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub gamma: f64,
    pub delta: f64,
    // estimates (CG position from the rear-axle EKF)
    pub x_est: f64,
    pub y_est: f64,
    pub psi_est: f64,
    pub u_est: f64,
    pub gamma_meas: f64,
    pub delta_meas: f64,
    // controls
    pub u_ref: f64,
    pub gamma_ref: f64,
    pub accel: f64,
    pub steer_cmd: f64,
    /// PD output.
    pub tau: f64,
    pub tau_n: f64,
    pub tau_c: f64,
    pub v_c: f64,
    pub s_p: f64,
    pub v_p: f64,
    pub q: f64,
    pub drift_lower: f64,
    pub drift_upper: f64,
    // path-frame tracking errors of the true CG
    pub e_lon: f64,
    pub e_lat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceMeta {
    pub schema: u32,
    pub mode: ControllerMode,
    pub ts: f64,
    pub period: f64,
    pub laps: usize,
    pub seeds: Seeds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub meta: TraceMeta,
    pub rows: Vec<TraceRow>,
}

impl TraceMeta {
    fn line(&self) -> String {
        format!(
            "# schema={} mode={} ts={} period={} laps={} seed_gps={} seed_steering={}",
            self.schema, self.mode, self.ts, self.period, self.laps, self.seeds.gps, self.seeds.steering
        )
    }

    fn parse(line: &str) -> Result<Self> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| Error::BadTrace("missing `#` metadata line".into()))?;
        let get = |key: &str| -> Result<String> {
            body.split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .map(str::to_owned)
                .ok_or_else(|| Error::BadTrace(format!("metadata has no `{key}`")))
        };
        let num = |key: &str, v: String| -> Result<f64> {
            v.parse().map_err(|_| Error::BadTrace(format!("bad `{key}` value `{v}`")))
        };
        let int = |key: &str, v: String| -> Result<u64> {
            v.parse().map_err(|_| Error::BadTrace(format!("bad `{key}` value `{v}`")))
        };
        let schema = int("schema", get("schema")?)? as u32;
        if schema != SCHEMA_VERSION {
            return Err(Error::BadTrace(format!("unsupported schema {schema}")));
        }
        Ok(Self {
            schema,
            mode: get("mode")?.parse().map_err(Error::BadTrace)?,
            ts: num("ts", get("ts")?)?,
            period: num("period", get("period")?)?,
            laps: int("laps", get("laps")?)? as usize,
            seeds: Seeds {
                gps: int("seed_gps", get("seed_gps")?)?,
                steering: int("seed_steering", get("seed_steering")?)?,
            },
        })
    }
}

impl SimTrace {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.meta.line())?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::BadTrace(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let meta = TraceMeta::parse(first.trim_end())?;
        let mut rdr = csv::Reader::from_reader(reader);
        let rows = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<TraceRow>, _>>()?;
        if rows.is_empty() {
            return Err(Error::BadTrace("no rows".into()));
        }
        if rows.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::BadTrace("time column is not strictly increasing".into()));
        }
        Ok(Self { meta, rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}
