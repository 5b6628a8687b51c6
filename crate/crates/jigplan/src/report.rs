//! JSON reports and atomic output files.
//!
//! Every float goes through [`sig9`] before serialisation so that reports
//! are byte-stable across platforms and runs.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use jigplan_core::eval::DisplacementResult;
use jigplan_core::{BoolMatrix, Direction, FixingPlan, RelationMatrices};
use serde::Serialize;

/// Rounds to 9 significant digits; `-0.0` becomes `0.0`.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

fn bits(m: &BoolMatrix) -> Vec<Vec<u8>> {
    m.rows()
        .map(|r| r.iter().map(|&b| u8::from(b)).collect())
        .collect()
}

fn per_direction(f: impl Fn(Direction) -> Vec<Vec<u8>>) -> DirectionMap {
    DirectionMap(Direction::ALL.iter().map(|&d| (d.label(), f(d))).collect())
}

/// Map keyed by direction label, kept in +x, -x, +y, -y, +z, -z order.
#[derive(Debug)]
pub struct DirectionMap(Vec<(&'static str, Vec<Vec<u8>>)>);

impl Serialize for DirectionMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (label, rows) in &self.0 {
            map.serialize_entry(label, rows)?;
        }
        map.end()
    }
}

#[derive(Debug, Serialize)]
pub struct MatricesReport {
    pub entity_ids: Vec<String>,
    #[serde(rename = "C")]
    pub contact: Vec<Vec<u8>>,
    #[serde(rename = "M")]
    pub free: DirectionMap,
    #[serde(rename = "W")]
    pub reachable: DirectionMap,
}

impl MatricesReport {
    pub fn new(rel: &RelationMatrices) -> Self {
        Self {
            entity_ids: rel.entity_ids().to_vec(),
            contact: bits(rel.contact()),
            free: per_direction(|d| bits(rel.free(d))),
            reachable: per_direction(|d| bits(rel.reachable(d))),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub fixed_part: String,
    pub posture_label: &'static str,
    pub rotation: [[f64; 3]; 3],
    pub cog_height_mm: f64,
    pub reachable_flags: [u8; 6],
}

#[derive(Debug, Serialize)]
pub struct PlanReport {
    pub sequence: Vec<String>,
    pub steps: Vec<StepReport>,
    pub complete: bool,
    pub halt_reason: Option<String>,
}

impl PlanReport {
    pub fn new(sequence: &[String], plan: &FixingPlan) -> Self {
        Self {
            sequence: sequence.to_vec(),
            steps: plan
                .steps
                .iter()
                .map(|s| StepReport {
                    index: s.step_index,
                    fixed_part: s.fixed_part.clone(),
                    posture_label: s.posture_label.label(),
                    rotation: s.orientation.rows().map(|r| r.map(sig9)),
                    cog_height_mm: sig9(s.cog_height),
                    reachable_flags: s.reachable_list.as_bits(),
                })
                .collect(),
            complete: plan.complete,
            halt_reason: plan.halt_reason.clone(),
        }
    }

    /// Plain-text table with the reachable list, posture and fixed part per step.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<5} {:<20} {:<8} {:<16} {:>12}\n",
            "step", "A: +x -x +y -y +z -z", "posture", "fixed part", "CoG h (mm)"
        );
        for s in &self.steps {
            let flags: Vec<String> = s
                .reachable_flags
                .iter()
                .map(|f| format!("{f:>2}"))
                .collect();
            out += &format!(
                "{:<5} {:<20} {:<8} {:<16} {:>12.3}\n",
                s.index,
                format!("   {}", flags.join(" ")),
                s.posture_label,
                s.fixed_part,
                s.cog_height_mm
            );
        }
        match &self.halt_reason {
            Some(r) => out += &format!("halted: {r}\n"),
            None => out += "complete\n",
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct PeakForces {
    pub max_normal_n: f64,
    pub max_shear_n: f64,
    pub samples: usize,
}

#[derive(Debug, Serialize)]
pub struct DisplacementReport {
    pub before: String,
    pub after: String,
    pub frame_distance_px: f64,
    pub centroid_translation_px: f64,
    pub mm_per_px: f64,
    pub centroid_translation_mm: f64,
    pub threshold_mm: f64,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_forces: Option<PeakForces>,
}

impl DisplacementReport {
    pub fn new(
        before: &str,
        after: &str,
        r: &DisplacementResult,
        threshold_mm: f64,
        peaks: Option<(f64, f64, usize)>,
    ) -> Self {
        Self {
            before: before.to_owned(),
            after: after.to_owned(),
            frame_distance_px: sig9(r.frame_distance_px),
            centroid_translation_px: sig9(r.centroid_translation_px),
            mm_per_px: sig9(r.mm_per_px),
            centroid_translation_mm: sig9(r.centroid_translation_mm),
            threshold_mm: sig9(threshold_mm),
            success: r.success,
            peak_forces: peaks.map(|(n, s, count)| PeakForces {
                max_normal_n: sig9(n),
                max_shear_n: sig9(s),
                samples: count,
            }),
        }
    }
}

/// Pretty JSON with arrays of plain numbers kept on one line, so matrices
/// read row by row.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let pretty = serde_json::to_string_pretty(value)?;
    let mut out = String::with_capacity(pretty.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut rest = pretty.as_str();
    while let Some(c) = rest.chars().next() {
        if in_string {
            match (escaped, c) {
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => escaped = false,
            }
        } else if c == '"' {
            in_string = true;
        } else if c == '[' {
            if let Some(end) = rest.find(']') {
                let body = &rest[1..end];
                let numeric = body
                    .chars()
                    .all(|ch| ch.is_ascii_digit() || ch.is_whitespace() || ",.-+eE".contains(ch));
                if numeric && !body.trim().is_empty() {
                    let items: Vec<&str> = body.split(',').map(str::trim).collect();
                    out += &format!("[{}]", items.join(", "));
                    rest = &rest[end + 1..];
                    continue;
                }
            }
        }
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    out.push('\n');
    Ok(out)
}

/// Writes through a temporary file in the same directory, then renames,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder
        .tempfile_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
