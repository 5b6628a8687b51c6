//! Assembly descriptor: a JSON list of parts, each pointing at a mesh file
//! with a mass and a rigid pose into the assembled frame.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use jigplan_core::fixtures;
use jigplan_core::relations::SweepParams;
use jigplan_core::{AssemblyModel, PartModel, RigidOrientation, Vec3};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::mesh_io::{self, MeshFormat};
use crate::report::{to_json, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblyDescriptor {
    pub parts: Vec<PartEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_epsilon_mm: Option<f64>,
    #[serde(default)]
    pub sweep: SweepEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartEntry {
    pub id: String,
    /// Relative paths are taken from the descriptor's directory.
    pub mesh_path: String,
    pub mass_g: f64,
    #[serde(default)]
    pub pose: Pose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose {
    pub rotation: [[f64; 3]; 3],
    pub translation_mm: [f64; 3],
}

impl Default for Pose {
    fn default() -> Self {
        Self {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation_mm: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_count: Option<usize>,
}

impl AssemblyDescriptor {
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let desc: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing descriptor {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((desc, base))
    }

    /// Loads every mesh, applies the poses and validates the assembly.
    /// `epsilon_override` replaces the descriptor's contact tolerance.
    pub fn build(&self, base_dir: &Path, epsilon_override: Option<f64>) -> Result<AssemblyModel> {
        ensure!(!self.parts.is_empty(), "descriptor lists no parts");
        let mut parts = Vec::with_capacity(self.parts.len());
        for entry in &self.parts {
            parts.push(
                entry
                    .build(base_dir)
                    .with_context(|| format!("part '{}'", entry.id))?,
            );
        }
        Ok(AssemblyModel::new(
            parts,
            epsilon_override.or(self.contact_epsilon_mm),
        )?)
    }

    pub fn sweep_params(
        &self,
        assembly: &AssemblyModel,
        steps_override: Option<usize>,
        oracle: bool,
    ) -> Result<SweepParams> {
        Ok(SweepParams::new(
            assembly,
            self.sweep.max_distance_mm,
            steps_override.or(self.sweep.step_count),
            oracle,
        )?)
    }
}

impl PartEntry {
    fn build(&self, base_dir: &Path) -> Result<PartModel> {
        let path = base_dir.join(&self.mesh_path);
        let mesh = mesh_io::load_mesh(&path)?;
        let r = Matrix3::from_fn(|i, j| self.pose.rotation[i][j]);
        let rotation = RigidOrientation::new(r).context("pose rotation")?;
        let t = Vec3::from(self.pose.translation_mm);
        if !t.iter().all(|c| c.is_finite()) {
            bail!("pose translation is not finite");
        }
        let part = PartModel::new(self.id.clone(), mesh, self.mass_g, self.group.clone())?;
        if *rotation.matrix() == Matrix3::identity() && t == Vec3::zeros() {
            Ok(part)
        } else {
            Ok(part.transformed(rotation.matrix(), &t)?)
        }
    }
}

pub const FIXTURE_DESCRIPTOR: &str = "assembly.json";

/// Writes the proxy motor, plate and bolt meshes (binary STL, assembled
/// pose) and a descriptor referencing them. Returns the written paths.
pub fn write_proxy_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let assembly = fixtures::proxy_assembly();
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for part in assembly.parts() {
        let name = format!("{}.stl", part.id());
        let path = dir.join(&name);
        write_atomic(&path, &mesh_io::encode_mesh(part.mesh(), MeshFormat::Stl))?;
        written.push(path);
        entries.push(PartEntry {
            id: part.id().to_owned(),
            mesh_path: name,
            mass_g: part.mass(),
            pose: Pose::default(),
            group: part.group().map(str::to_owned),
        });
    }
    let desc = AssemblyDescriptor {
        parts: entries,
        contact_epsilon_mm: None,
        sweep: SweepEntry::default(),
    };
    let path = dir.join(FIXTURE_DESCRIPTOR);
    write_atomic(&path, to_json(&desc)?.as_bytes())?;
    written.push(path);
    Ok(written)
}
