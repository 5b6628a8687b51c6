//! Parts, assemblies and rigid orientations.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::mass;
use crate::mesh::{Aabb, TriMesh, Vec3};

/// One rigid part in its assembled pose.
#[derive(Debug, Clone)]
pub struct PartModel {
    id: String,
    mesh: TriMesh,
    mass: f64,
    group: Option<String>,
    volume: f64,
    cog: Vec3,
}

impl PartModel {
    /// `mass` in grams; `group` names a set of parts handled as one unit.
    pub fn new(
        id: impl Into<String>,
        mesh: TriMesh,
        mass: f64,
        group: Option<String>,
    ) -> Result<Self> {
        let id = id.into();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidPart {
                id,
                reason: alloc::format!("mass must be positive, got {mass}"),
            });
        }
        let (volume, cog) = mass::volume_and_centroid(&mesh).map_err(|e| Error::InvalidPart {
            id: id.clone(),
            reason: e.to_string(),
        })?;
        Ok(Self {
            id,
            mesh,
            mass,
            group,
            volume,
            cog,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn group(&self) -> Option<&str> {
        self.group.as_deref()
    }

    /// The name this part is referred to by in an assembly sequence.
    pub fn entity(&self) -> &str {
        self.group.as_deref().unwrap_or(&self.id)
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Centre of gravity for uniform density, assembled frame.
    pub fn cog(&self) -> Vec3 {
        self.cog
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        Self::new(self.id.clone(), self.mesh.clone(), mass, self.group.clone())
    }

    /// Applies `x -> rotation * x + translation` to the mesh.
    pub fn transformed(&self, rotation: &Matrix3<f64>, translation: &Vec3) -> Result<Self> {
        let mesh = self.mesh.map_vertices(|v| rotation * v + translation)?;
        Self::new(self.id.clone(), mesh, self.mass, self.group.clone())
    }
}

/// Default contact tolerance relative to the assembly diagonal.
pub const DEFAULT_CONTACT_RATIO: f64 = 1e-3;
/// Upper bound on the contact tolerance relative to the assembly diagonal.
pub const MAX_CONTACT_RATIO: f64 = 0.01;

/// The assembled product.
#[derive(Debug, Clone)]
pub struct AssemblyModel {
    parts: Vec<PartModel>,
    contact_epsilon: f64,
    aabb: Aabb,
}

impl AssemblyModel {
    /// `contact_epsilon` defaults to 1e-3 of the assembly bounding-box diagonal.
    pub fn new(parts: Vec<PartModel>, contact_epsilon: Option<f64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidAssembly("assembly has no parts".into()));
        }
        let mut ids = BTreeSet::new();
        for p in &parts {
            if !ids.insert(p.id()) {
                return Err(Error::InvalidAssembly(alloc::format!(
                    "duplicate part id '{}'",
                    p.id()
                )));
            }
        }
        for p in &parts {
            if let Some(g) = p.group() {
                if ids.contains(g) {
                    return Err(Error::InvalidAssembly(alloc::format!(
                        "group name '{g}' collides with a part id"
                    )));
                }
            }
        }
        let aabb = parts
            .iter()
            .fold(Aabb::empty(), |acc, p| acc.union(p.mesh().aabb()));
        let diagonal = aabb.diagonal();
        let eps = contact_epsilon.unwrap_or(DEFAULT_CONTACT_RATIO * diagonal);
        if !(eps > 0.0) || !(eps < MAX_CONTACT_RATIO * diagonal) {
            return Err(Error::InvalidAssembly(alloc::format!(
                "contact epsilon {eps} mm must be positive and below {} mm",
                MAX_CONTACT_RATIO * diagonal
            )));
        }
        Ok(Self {
            parts,
            contact_epsilon: eps,
            aabb,
        })
    }

    pub fn parts(&self) -> &[PartModel] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, id: &str) -> Option<&PartModel> {
        self.parts.iter().find(|p| p.id() == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.parts.iter().position(|p| p.id() == id)
    }

    pub fn contact_epsilon(&self) -> f64 {
        self.contact_epsilon
    }

    pub fn aabb(&self) -> &Aabb {
        &self.aabb
    }

    pub fn aabb_diagonal(&self) -> f64 {
        self.aabb.diagonal()
    }

    /// Indices of the parts a sequence entity (part id or group name) refers to.
    pub fn resolve_entity(&self, name: &str) -> Option<Vec<usize>> {
        if let Some(i) = self.index_of(name) {
            return Some(alloc::vec![i]);
        }
        let members: Vec<usize> = self
            .parts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.group() == Some(name))
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            None
        } else {
            Some(members)
        }
    }

    /// Rotates every part about the origin; the contact tolerance is kept.
    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Result<Self> {
        let parts = self
            .parts
            .iter()
            .map(|p| p.transformed(rotation, &Vec3::zeros()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts, Some(self.contact_epsilon))
    }
}

/// A proper rotation taking assembled-frame directions to world directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidOrientation {
    rotation: Matrix3<f64>,
}

const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

impl RigidOrientation {
    pub fn new(rotation: Matrix3<f64>) -> Result<Self> {
        if !rotation.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidOrientation("non-finite entry".into()));
        }
        let err = (rotation * rotation.transpose() - Matrix3::identity()).amax();
        if err > ORTHONORMAL_TOLERANCE {
            return Err(Error::InvalidOrientation(alloc::format!(
                "R R^T deviates from identity by {err:e}"
            )));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > ORTHONORMAL_TOLERANCE {
            return Err(Error::InvalidOrientation(alloc::format!(
                "determinant {det}"
            )));
        }
        Ok(Self { rotation })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    /// Row-major entries.
    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.rotation;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rejects_bad_mass_and_inverted_volume() {
        let cube = fixtures::unit_cube();
        assert!(PartModel::new("c", cube.clone(), 0.0, None).is_err());
        assert!(PartModel::new("c", cube.clone(), -1.0, None).is_err());
        assert!(PartModel::new("c", cube, 1.0, None).is_ok());
    }

    #[test]
    fn assembly_validation() {
        let a = PartModel::new("a", fixtures::unit_cube(), 1.0, None).unwrap();
        let dup = a.clone();
        assert!(AssemblyModel::new(alloc::vec![a.clone(), dup], None).is_err());
        assert!(AssemblyModel::new(Vec::new(), None).is_err());
        let asm = AssemblyModel::new(alloc::vec![a.clone()], None).unwrap();
        assert!((asm.contact_epsilon() - 1e-3 * 3f64.sqrt()).abs() < 1e-15);
        assert!(AssemblyModel::new(alloc::vec![a.clone()], Some(0.5)).is_err());
        assert!(AssemblyModel::new(alloc::vec![a], Some(0.0)).is_err());
    }

    #[test]
    fn group_resolution() {
        let mk = |id: &str, x: f64, g: Option<&str>| {
            PartModel::new(
                id,
                fixtures::unit_cube()
                    .translated(&Vec3::new(x, 0.0, 0.0))
                    .unwrap(),
                1.0,
                g.map(String::from),
            )
            .unwrap()
        };
        let asm = AssemblyModel::new(
            alloc::vec![
                mk("a", 0.0, None),
                mk("b1", 2.0, Some("b")),
                mk("b2", 4.0, Some("b"))
            ],
            None,
        )
        .unwrap();
        assert_eq!(asm.resolve_entity("a"), Some(alloc::vec![0]));
        assert_eq!(asm.resolve_entity("b"), Some(alloc::vec![1, 2]));
        assert_eq!(asm.resolve_entity("zz"), None);
        let clash = AssemblyModel::new(
            alloc::vec![mk("a", 0.0, None), mk("b1", 2.0, Some("a"))],
            None,
        );
        assert!(clash.is_err());
    }

    #[test]
    fn orientation_validation() {
        assert!(RigidOrientation::new(Matrix3::identity()).is_ok());
        assert!(RigidOrientation::new(Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))).is_err());
        assert!(RigidOrientation::new(Matrix3::identity() * 2.0).is_err());
    }
}
