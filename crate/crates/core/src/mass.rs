//! Uniform-density mass properties.
//!
//! Per-mesh volume and centroid come from the divergence theorem (signed
//! tetrahedra fanned from a reference point); parts are combined by the
//! mass-weighted mean of their centres of gravity.

use crate::error::{Error, Result};
use crate::mesh::{TriMesh, Vec3};
use crate::part::PartModel;

/// Enclosed volume (mm³) and its centroid (mm).
pub fn volume_and_centroid(mesh: &TriMesh) -> Result<(f64, Vec3)> {
    let origin = mesh.aabb().center();
    let mut volume = 0.0;
    let mut moment = Vec3::zeros();
    for t in mesh.triangle_iter() {
        let a = t[0] - origin;
        let b = t[1] - origin;
        let c = t[2] - origin;
        let v = a.dot(&b.cross(&c)) / 6.0;
        volume += v;
        moment += (a + b + c) * (v / 4.0);
    }
    if !(volume > 0.0) {
        return Err(Error::NonPositiveVolume(volume));
    }
    Ok((volume, origin + moment / volume))
}

/// Total mass (g) and combined centre of gravity (mm) of a set of parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    pub total_mass: f64,
    pub cog: Vec3,
}

/// Mass-weighted mean of the parts' centres of gravity.
pub fn mass_properties<'a>(
    parts: impl IntoIterator<Item = &'a PartModel>,
) -> Result<MassProperties> {
    combine(parts.into_iter().map(|p| MassProperties {
        total_mass: p.mass(),
        cog: p.cog(),
    }))
}

/// Combines already-reduced mass properties; `combine` of partial results
/// equals the one-shot combination.
pub fn combine(items: impl IntoIterator<Item = MassProperties>) -> Result<MassProperties> {
    let mut total = 0.0;
    let mut moment = Vec3::zeros();
    let mut any = false;
    for item in items {
        any = true;
        total += item.total_mass;
        moment += item.cog * item.total_mass;
    }
    if !any {
        return Err(Error::InvalidAssembly(
            "mass properties of an empty part list".into(),
        ));
    }
    if !(total > 0.0) {
        return Err(Error::InvalidAssembly(alloc::format!(
            "total mass {total} is not positive"
        )));
    }
    Ok(MassProperties {
        total_mass: total,
        cog: moment / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    #[test]
    fn unit_cube_centered() {
        let mesh = fixtures::unit_cube()
            .translated(&Vec3::repeat(-0.5))
            .unwrap();
        let part = PartModel::new("cube", mesh, 1.0, None).unwrap();
        let mp = mass_properties([&part]).unwrap();
        assert_eq!(mp.total_mass, 1.0);
        assert!(mp.cog.norm() < 1e-15);
    }

    #[test]
    fn equal_masses_give_midpoint() {
        let a = MassProperties {
            total_mass: 2.5,
            cog: Vec3::new(0.0, 0.0, 0.0),
        };
        let b = MassProperties {
            total_mass: 2.5,
            cog: Vec3::new(0.0, 0.0, 2.0),
        };
        let c = combine([a, b]).unwrap();
        assert_eq!(c.cog, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(c.total_mass, 5.0);
    }

    #[test]
    fn empty_list_is_an_error() {
        assert!(mass_properties(core::iter::empty()).is_err());
    }

    #[test]
    fn box_volume_and_centroid() {
        let mesh = fixtures::box_mesh(Vec3::new(1.0, 2.0, 3.0), Vec3::new(11.0, 4.0, 103.0));
        let (v, c) = volume_and_centroid(&mesh).unwrap();
        assert_relative_eq!(v, 10.0 * 2.0 * 100.0, max_relative = 1e-12);
        assert_relative_eq!(c, Vec3::new(6.0, 3.0, 53.0), epsilon = 1e-10);
    }
}
