//! Force-plate series (CSV) and jig marker observations (JSON).

use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use jigplan_core::eval::{ForceSample, JigFrameObservation};
use serde::{Deserialize, Serialize};

#[derive(Debug, Deserialize)]
struct ForceRow {
    fx: f64,
    fy: f64,
    fz: f64,
    #[serde(default)]
    t: Option<f64>,
}

/// Reads a `fx,fy,fz[,t]` CSV with a header row.
pub fn read_force_csv(path: &Path) -> Result<Vec<ForceSample>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_force_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_force_csv(text: &str) -> Result<Vec<ForceSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    for col in ["fx", "fy", "fz"] {
        ensure!(headers.iter().any(|h| h == col), "missing column '{col}'");
    }
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<ForceRow>().enumerate() {
        let row = row.with_context(|| format!("record {}", i + 1))?;
        out.push(ForceSample {
            fx: row.fx,
            fy: row.fy,
            fz: row.fz,
            t: row.t,
        });
    }
    ensure!(!out.is_empty(), "no samples");
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationFile {
    pub image_tag: String,
    pub points: [[f64; 2]; 4],
}

pub fn read_observation(path: &Path) -> Result<JigFrameObservation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ObservationFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    JigFrameObservation::new(file.image_tag, file.points)
        .with_context(|| format!("{}", path.display()))
}
