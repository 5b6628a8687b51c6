//! Distance and penetration queries between meshes.
//!
//! Every query takes an optional translation of the second mesh so that a
//! part can be swept without rebuilding it. Touching surfaces never count as
//! intersecting: [`intersects`] reports true only when the enclosed volumes
//! share interior points.

use core::ops::ControlFlow;

use crate::mesh::{TriMesh, Vec3};
use crate::triangle::{self, TriTri};

/// Distances at or below this (mm) are reported as exact contact.
pub const TOUCH_TOLERANCE: f64 = 1e-9;

/// Relative probe offset, scaled by the larger mesh diagonal. Overlaps
/// thinner than this count as touching.
const PROBE_SCALE: f64 = 1e-6;

/// Interior margin (relative to the triangle size) for the no-probe shortcut.
const INTERIOR_MARGIN: f64 = 1e-7;

fn finish_distance(best_sq: f64) -> f64 {
    let d = libm::sqrt(best_sq);
    if d <= TOUCH_TOLERANCE {
        0.0
    } else {
        d
    }
}

/// Exact minimum distance between the closed surfaces of `a` and `b`.
pub fn min_distance(a: &TriMesh, b: &TriMesh) -> f64 {
    min_distance_offset(a, b, &Vec3::zeros())
}

/// [`min_distance`] with `b` translated by `offset`.
pub fn min_distance_offset(a: &TriMesh, b: &TriMesh, offset: &Vec3) -> f64 {
    let best = a.bvh().min_pair_distance_sq(b.bvh(), offset, |i, j| {
        let tb = translate(&b.triangle(j), offset);
        triangle::triangle_distance_sq(&a.triangle(i), &tb)
    });
    finish_distance(best)
}

/// All-pairs reference for [`min_distance_offset`].
pub fn min_distance_exhaustive(a: &TriMesh, b: &TriMesh, offset: &Vec3) -> f64 {
    let mut best = f64::INFINITY;
    for ta in a.triangle_iter() {
        for tb in b.triangle_iter() {
            let d = triangle::triangle_distance_sq(&ta, &translate(&tb, offset));
            if d < best {
                best = d;
            }
        }
    }
    finish_distance(best)
}

/// True when the volumes of `a` and `b` overlap: some pair of faces crosses
/// into both interiors, or one mesh lies inside the other.
pub fn intersects(a: &TriMesh, b: &TriMesh) -> bool {
    intersects_offset(a, b, &Vec3::zeros())
}

/// [`intersects`] with `b` translated by `offset`.
pub fn intersects_offset(a: &TriMesh, b: &TriMesh, offset: &Vec3) -> bool {
    if !a.aabb().overlaps_strictly(&b.aabb().translated(offset)) {
        return false;
    }
    let probe = Prober::new(a, b, offset);
    let crossed = a
        .bvh()
        .for_each_overlapping_pair(b.bvh(), offset, |i, j| {
            if probe.pair_penetrates(i, j) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .is_some();
    crossed || probe.contained()
}

/// All-pairs reference for [`intersects_offset`].
pub fn intersects_exhaustive(a: &TriMesh, b: &TriMesh, offset: &Vec3) -> bool {
    if !a.aabb().overlaps_strictly(&b.aabb().translated(offset)) {
        return false;
    }
    let probe = Prober::new(a, b, offset);
    for i in 0..a.triangles().len() {
        for j in 0..b.triangles().len() {
            if probe.pair_penetrates(i, j) {
                return true;
            }
        }
    }
    probe.contained()
}

fn translate(t: &[Vec3; 3], offset: &Vec3) -> [Vec3; 3] {
    [t[0] + offset, t[1] + offset, t[2] + offset]
}

struct Prober<'a> {
    a: &'a TriMesh,
    b: &'a TriMesh,
    offset: &'a Vec3,
    scale: f64,
    delta: f64,
}

impl<'a> Prober<'a> {
    fn new(a: &'a TriMesh, b: &'a TriMesh, offset: &'a Vec3) -> Self {
        let scale = a.aabb().diagonal().max(b.aabb().diagonal());
        Self {
            a,
            b,
            offset,
            scale,
            delta: PROBE_SCALE * scale,
        }
    }

    fn inside_both(&self, p: &Vec3) -> bool {
        self.a.contains(p, &Vec3::zeros()) && self.b.contains(p, self.offset)
    }

    /// Decides whether the surfaces cross into each other at triangles `i` of
    /// `a` and `j` of `b`.
    ///
    /// A crossing through the relative interior of both faces is a
    /// penetration outright. A crossing on a face boundary is resolved by
    /// probing the four quadrants around the intersection segment.
    fn pair_penetrates(&self, i: usize, j: usize) -> bool {
        let ta = self.a.triangle(i);
        let tb = translate(&self.b.triangle(j), self.offset);
        let (p, q) = match triangle::intersect(&ta, &tb) {
            TriTri::Segment(p, q) => (p, q),
            TriTri::Disjoint | TriTri::Coplanar => return false,
        };
        if (q - p).norm() <= 1e-12 * self.scale {
            return false;
        }
        let m = (p + q) * 0.5;
        if strictly_interior(&m, &ta) && strictly_interior(&m, &tb) {
            return true;
        }
        let na = triangle::normal(&ta) * self.delta;
        let nb = triangle::normal(&tb) * self.delta;
        [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
            .iter()
            .any(|&(sa, sb)| self.inside_both(&(m + na * sa + nb * sb)))
    }

    fn contained(&self) -> bool {
        let pa = self.a.interior_point();
        let pb = self.b.interior_point() + self.offset;
        self.b.contains(&pa, self.offset) || self.a.contains(&pb, &Vec3::zeros())
    }
}

/// `p` lies in the triangle's plane region away from all three edges.
fn strictly_interior(p: &Vec3, t: &[Vec3; 3]) -> bool {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
    let area2 = n.norm();
    if area2 == 0.0 {
        return false;
    }
    let scale = (t[1] - t[0])
        .norm()
        .max((t[2] - t[1]).norm())
        .max((t[0] - t[2]).norm());
    let margin = INTERIOR_MARGIN * scale;
    (0..3).all(|k| {
        let e = t[(k + 1) % 3] - t[k];
        let inward = n.cross(&e) / (area2 * e.norm());
        inward.dot(&(p - t[k])) > margin
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cube_at(x: f64, y: f64, z: f64) -> TriMesh {
        fixtures::unit_cube()
            .translated(&Vec3::new(x, y, z))
            .unwrap()
    }

    #[test]
    fn touching_faces_distance_zero() {
        let a = cube_at(0.0, 0.0, 0.0);
        let b = cube_at(1.0, 0.0, 0.0);
        assert_eq!(min_distance(&a, &b), 0.0);
        assert!(!intersects(&a, &b));
    }

    #[test]
    fn axis_gap_distance() {
        let a = cube_at(-0.5, -0.5, -0.5);
        let b = cube_at(2.5, -0.5, -0.5);
        assert_eq!(min_distance(&a, &b), 2.0);
        assert_eq!(min_distance(&b, &a), 2.0);
        assert!(!intersects(&a, &b));
    }

    #[test]
    fn overlap_by_half() {
        let a = cube_at(0.0, 0.0, 0.0);
        let b = cube_at(0.5, 0.0, 0.0);
        assert!(intersects(&a, &b));
        assert!(intersects(&b, &a));
        assert_eq!(min_distance(&a, &b), 0.0);
    }

    #[test]
    fn containment_without_crossing() {
        let big = fixtures::unit_cube().map_vertices(|v| v * 10.0).unwrap();
        let small = cube_at(4.0, 4.0, 4.0);
        assert!(intersects(&big, &small));
        assert!(intersects(&small, &big));
        let d = min_distance(&big, &small);
        assert!((d - 4.0).abs() < 1e-12, "{d}");
    }

    #[test]
    fn stacked_cube_pushed_down_penetrates() {
        let base = cube_at(0.0, 0.0, 0.0);
        let top = cube_at(0.0, 0.0, 1.0);
        assert!(!intersects(&base, &top));
        assert!(intersects_offset(&base, &top, &Vec3::new(0.0, 0.0, -0.25)));
        assert!(!intersects_offset(&base, &top, &Vec3::new(0.25, 0.0, 0.0)));
        assert!(!intersects_offset(&base, &top, &Vec3::new(0.0, 0.0, 0.25)));
    }

    #[test]
    fn identical_copies_overlap() {
        let a = cube_at(0.0, 0.0, 0.0);
        assert!(intersects(&a, &a.clone()));
    }

    #[test]
    fn bvh_matches_exhaustive_on_offsets() {
        let motor = fixtures::proxy_motor();
        let plate = fixtures::proxy_plate();
        for dz in [-3.0, -0.5, 0.0, 0.5, 7.0, 30.0] {
            for dx in [-1.0, 0.0, 2.5] {
                let off = Vec3::new(dx, 0.0, dz);
                assert_eq!(
                    min_distance_offset(motor.mesh(), plate.mesh(), &off).to_bits(),
                    min_distance_exhaustive(motor.mesh(), plate.mesh(), &off).to_bits()
                );
                assert_eq!(
                    intersects_offset(motor.mesh(), plate.mesh(), &off),
                    intersects_exhaustive(motor.mesh(), plate.mesh(), &off)
                );
            }
        }
    }
}
