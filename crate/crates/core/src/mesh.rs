//! Indexed triangle meshes.
//!
//! A [`TriMesh`] is immutable once built. Construction welds coincident
//! vertices, drops triangles that collapse under welding, orients the
//! winding outward by the sign of the enclosed volume and builds the
//! triangle BVH used by every query.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bvh::Bvh;
use crate::error::{Error, Result};
use crate::triangle;

pub type Vec3 = nalgebra::Vector3<f64>;

/// Vertices closer than this (mm) are merged on construction.
pub const WELD_TOLERANCE: f64 = 1e-6;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn translated(&self, offset: &Vec3) -> Aabb {
        Aabb {
            min: self.min + offset,
            max: self.max + offset,
        }
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    /// Closed overlap test: boxes that only touch count as overlapping.
    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    /// Open overlap test: the interiors share a point.
    pub fn overlaps_strictly(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] < other.max[i] && other.min[i] < self.max[i])
    }

    /// Squared Euclidean distance between the two boxes (0 when they overlap).
    pub fn distance_sq(&self, other: &Aabb) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let gap = (other.min[i] - self.max[i]).max(self.min[i] - other.max[i]);
            if gap > 0.0 {
                d += gap * gap;
            }
        }
        d
    }

    pub fn contains_point(&self, p: &Vec3) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }
}

/// Watertight indexed triangle mesh, coordinates in millimetres.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    aabb: Aabb,
    bvh: Bvh,
    interior_point: Vec3,
}

impl TriMesh {
    /// Builds a mesh from indexed data.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite);
        }
        for t in &triangles {
            for &i in t {
                if i as usize >= vertices.len() {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        vertex_count: vertices.len(),
                    });
                }
            }
        }

        let (vertices, remap) = weld(&vertices);
        let mut triangles: Vec<[u32; 3]> = triangles
            .iter()
            .map(|t| {
                [
                    remap[t[0] as usize],
                    remap[t[1] as usize],
                    remap[t[2] as usize],
                ]
            })
            .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
            .collect();

        // Welding can orphan vertices; compact so every vertex is referenced,
        // keeping the original order so that rebuilding a mesh is a no-op.
        let mut used = alloc::vec![false; vertices.len()];
        for t in &triangles {
            for &i in t {
                used[i as usize] = true;
            }
        }
        let mut slot = alloc::vec![u32::MAX; vertices.len()];
        let mut compact = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if used[i] {
                slot[i] = compact.len() as u32;
                compact.push(*v);
            }
        }
        for t in triangles.iter_mut() {
            for i in t.iter_mut() {
                *i = slot[*i as usize];
            }
        }
        let vertices = compact;

        if triangles.len() < 4 {
            return Err(Error::DegenerateMesh(alloc::format!(
                "{} triangles (at least 4 required)",
                triangles.len()
            )));
        }
        if vertices.len() < 4 {
            return Err(Error::DegenerateMesh(alloc::format!(
                "{} vertices (at least 4 required)",
                vertices.len()
            )));
        }

        if signed_volume(&vertices, &triangles) < 0.0 {
            for t in triangles.iter_mut() {
                t.swap(1, 2);
            }
        }

        let aabb = Aabb::from_points(vertices.iter());
        let tris: Vec<[Vec3; 3]> = triangles
            .iter()
            .map(|t| {
                [
                    vertices[t[0] as usize],
                    vertices[t[1] as usize],
                    vertices[t[2] as usize],
                ]
            })
            .collect();
        let bvh = Bvh::build(&tris);
        let interior_point = find_interior_point(&tris, &aabb);

        Ok(Self {
            vertices,
            triangles,
            aabb,
            bvh,
            interior_point,
        })
    }

    /// Builds a mesh from an unindexed triangle soup (as read from STL).
    pub fn from_soup(soup: &[[Vec3; 3]]) -> Result<Self> {
        let vertices: Vec<Vec3> = soup.iter().flat_map(|t| t.iter().copied()).collect();
        let triangles = (0..soup.len() as u32)
            .map(|i| [3 * i, 3 * i + 1, 3 * i + 2])
            .collect();
        Self::new(vertices, triangles)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        let t = self.triangles[i];
        [
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        ]
    }

    pub fn triangle_iter(&self) -> impl Iterator<Item = [Vec3; 3]> + '_ {
        (0..self.triangles.len()).map(move |i| self.triangle(i))
    }

    pub fn aabb(&self) -> &Aabb {
        &self.aabb
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    /// A point strictly inside the enclosed volume.
    pub fn interior_point(&self) -> Vec3 {
        self.interior_point
    }

    /// Signed enclosed volume (mm³); positive after construction.
    pub fn volume(&self) -> f64 {
        signed_volume(&self.vertices, &self.triangles)
    }

    /// Returns a new mesh with every vertex mapped by `f`.
    ///
    /// Reflections are corrected by the outward re-orientation step.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        Self::new(
            self.vertices.iter().map(f).collect(),
            self.triangles.clone(),
        )
    }

    pub fn translated(&self, offset: &Vec3) -> Result<Self> {
        self.map_vertices(|v| v + offset)
    }

    /// Every edge is shared by exactly two triangles traversing it in opposite directions.
    pub fn is_closed_manifold(&self) -> bool {
        let mut edges: BTreeMap<(u32, u32), i32> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a, b)).or_insert(0) += 1;
            }
        }
        edges
            .iter()
            .all(|(&(a, b), &n)| n == 1 && edges.get(&(b, a)) == Some(&1))
    }

    /// Generalized winding number of `p` with respect to the mesh translated by `offset`.
    ///
    /// Close to 1 inside, 0 outside.
    pub fn winding_number(&self, p: &Vec3, offset: &Vec3) -> f64 {
        let q = p - offset;
        let total: f64 = self
            .triangle_iter()
            .map(|t| triangle::solid_angle(&t, &q))
            .sum();
        total / (4.0 * core::f64::consts::PI)
    }

    /// Strict containment of `p` in the mesh translated by `offset`.
    pub fn contains(&self, p: &Vec3, offset: &Vec3) -> bool {
        if !self.aabb.translated(offset).contains_point(p) {
            return false;
        }
        self.winding_number(p, offset) > 0.5
    }
}

fn signed_volume(vertices: &[Vec3], triangles: &[[u32; 3]]) -> f64 {
    let origin = vertices.first().copied().unwrap_or_else(Vec3::zeros);
    triangles
        .iter()
        .map(|t| {
            let a = vertices[t[0] as usize] - origin;
            let b = vertices[t[1] as usize] - origin;
            let c = vertices[t[2] as usize] - origin;
            a.dot(&b.cross(&c))
        })
        .sum::<f64>()
        / 6.0
}

type CellKey = (i64, i64, i64);

fn cell_of(v: &Vec3) -> CellKey {
    let q = |c: f64| libm::floor(c / WELD_TOLERANCE) as i64;
    (q(v.x), q(v.y), q(v.z))
}

/// Merges vertices closer than [`WELD_TOLERANCE`]; first occurrence wins.
fn weld(vertices: &[Vec3]) -> (Vec<Vec3>, Vec<u32>) {
    let mut grid: BTreeMap<CellKey, Vec<u32>> = BTreeMap::new();
    let mut out: Vec<Vec3> = Vec::new();
    let mut remap = Vec::with_capacity(vertices.len());
    for v in vertices {
        let (cx, cy, cz) = cell_of(v);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &id in ids {
                            if (out[id as usize] - v).norm() <= WELD_TOLERANCE {
                                found = Some(id);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        let id = match found {
            Some(id) => id,
            None => {
                let id = out.len() as u32;
                out.push(*v);
                grid.entry((cx, cy, cz)).or_default().push(id);
                id
            }
        };
        remap.push(id);
    }
    (out, remap)
}

/// Steps inward from the centroid of the largest triangle to halfway to the
/// next surface crossing along the inward normal.
fn find_interior_point(tris: &[[Vec3; 3]], aabb: &Aabb) -> Vec3 {
    let (best, _) = tris
        .iter()
        .enumerate()
        .map(|(i, t)| (i, (t[1] - t[0]).cross(&(t[2] - t[0])).norm()))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
    let t = &tris[best];
    let centroid = (t[0] + t[1] + t[2]) / 3.0;
    let normal = (t[1] - t[0]).cross(&(t[2] - t[0])).normalize();
    let dir = -normal;
    let min_hit = 1e-9 * aabb.diagonal().max(1.0);
    let hit = tris
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .filter_map(|(_, other)| triangle::ray_hit(&centroid, &dir, other))
        .filter(|&h| h > min_hit)
        .fold(f64::INFINITY, f64::min);
    let depth = if hit.is_finite() {
        hit
    } else {
        aabb.diagonal()
    };
    centroid + dir * (0.5 * depth)
}
