//! STL and OBJ reading and writing.
//!
//! Binary STL stores single-precision coordinates, so a round trip through
//! it rounds every vertex to the nearest `f32`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use jigplan_core::{TriMesh, Vec3};

const STL_HEADER_LEN: usize = 80;
const STL_RECORD_LEN: usize = 50;
const STL_HEADER: &[u8] = b"jigplan binary STL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Stl,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("stl") => Ok(Self::Stl),
            Some("obj") => Ok(Self::Obj),
            _ => bail!(
                "{}: unknown mesh format (expected .stl or .obj)",
                path.display()
            ),
        }
    }
}

pub fn load_mesh(path: &Path) -> Result<TriMesh> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mesh = match MeshFormat::from_path(path)? {
        MeshFormat::Stl => parse_stl(&bytes),
        MeshFormat::Obj => parse_obj(std::str::from_utf8(&bytes).context("OBJ file is not UTF-8")?),
    };
    mesh.with_context(|| format!("parsing {}", path.display()))
}

pub fn encode_mesh(mesh: &TriMesh, format: MeshFormat) -> Vec<u8> {
    match format {
        MeshFormat::Stl => encode_stl(mesh),
        MeshFormat::Obj => encode_obj(mesh).into_bytes(),
    }
}

/// Binary or ASCII STL; binary is recognised by its exact size.
pub fn parse_stl(bytes: &[u8]) -> Result<TriMesh> {
    if bytes.len() >= STL_HEADER_LEN + 4 {
        let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
        if bytes.len() == STL_HEADER_LEN + 4 + n * STL_RECORD_LEN {
            return parse_binary_stl(&bytes[84..], n);
        }
    }
    if bytes.trim_ascii_start().starts_with(b"solid") {
        return parse_ascii_stl(std::str::from_utf8(bytes).context("ASCII STL is not UTF-8")?);
    }
    bail!("neither a binary STL of consistent size nor an ASCII STL")
}

fn parse_binary_stl(records: &[u8], n: usize) -> Result<TriMesh> {
    let f = |b: &[u8], i: usize| f32::from_le_bytes(b[4 * i..4 * i + 4].try_into().unwrap()) as f64;
    let soup: Vec<[Vec3; 3]> = records
        .chunks_exact(STL_RECORD_LEN)
        .take(n)
        .map(|r| {
            // Skip the stored normal: orientation is recomputed from the geometry.
            let v = |k: usize| Vec3::new(f(r, 3 + 3 * k), f(r, 4 + 3 * k), f(r, 5 + 3 * k));
            [v(0), v(1), v(2)]
        })
        .collect();
    Ok(TriMesh::from_soup(&soup)?)
}

fn parse_ascii_stl(text: &str) -> Result<TriMesh> {
    let mut soup = Vec::new();
    let mut corners = Vec::with_capacity(3);
    for (lineno, line) in text.lines().enumerate() {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("vertex") => {
                let xyz: Vec<f64> = tok
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("line {}: bad vertex", lineno + 1))?;
                ensure!(
                    xyz.len() == 3,
                    "line {}: vertex needs 3 coordinates",
                    lineno + 1
                );
                corners.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("endloop") => {
                ensure!(
                    corners.len() == 3,
                    "line {}: facet with {} vertices",
                    lineno + 1,
                    corners.len()
                );
                soup.push([corners[0], corners[1], corners[2]]);
                corners.clear();
            }
            _ => {}
        }
    }
    ensure!(!soup.is_empty(), "no facets");
    Ok(TriMesh::from_soup(&soup)?)
}

pub fn encode_stl(mesh: &TriMesh) -> Vec<u8> {
    let tris = mesh.triangles();
    let mut out = Vec::with_capacity(STL_HEADER_LEN + 4 + tris.len() * STL_RECORD_LEN);
    let mut header = [b' '; STL_HEADER_LEN];
    header[..STL_HEADER.len()].copy_from_slice(STL_HEADER);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(tris.len() as u32).to_le_bytes());
    for t in mesh.triangle_iter() {
        let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
        let n = if n.norm() > 0.0 { n.normalize() } else { n };
        for v in std::iter::once(n).chain(t) {
            for c in v.iter() {
                out.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

/// `v` and `f` records; polygons are fan-triangulated, other records ignored.
pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let xyz: Vec<f64> = tok
                    .take(3)
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("line {}: bad vertex", lineno + 1))?;
                ensure!(
                    xyz.len() == 3,
                    "line {}: vertex needs 3 coordinates",
                    lineno + 1
                );
                verts.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let idx = tok
                    .map(|t| obj_index(t, verts.len()))
                    .collect::<Result<Vec<u32>>>()
                    .with_context(|| format!("line {}", lineno + 1))?;
                ensure!(
                    idx.len() >= 3,
                    "line {}: face with {} corners",
                    lineno + 1,
                    idx.len()
                );
                for k in 1..idx.len() - 1 {
                    tris.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(TriMesh::new(verts, tris)?)
}

fn obj_index(token: &str, count: usize) -> Result<u32> {
    let raw: i64 = token
        .split('/')
        .next()
        .unwrap_or("")
        .parse()
        .with_context(|| format!("bad face index '{token}'"))?;
    let i = if raw < 0 { count as i64 + raw } else { raw - 1 };
    ensure!(
        i >= 0 && (i as usize) < count,
        "face index {raw} out of range"
    );
    Ok(i as u32)
}

pub fn encode_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use jigplan_core::fixtures;

    #[test]
    fn binary_stl_round_trip() {
        let mesh = fixtures::proxy_plate().mesh().clone();
        let bytes = encode_stl(&mesh);
        assert_eq!(bytes.len(), 84 + 50 * mesh.triangles().len());
        let back = parse_stl(&bytes).unwrap();
        assert_eq!(back.triangles().len(), mesh.triangles().len());
        assert!((back.volume() - mesh.volume()).abs() < 1e-6 * mesh.volume());
        assert_eq!(encode_stl(&back), bytes);
    }

    #[test]
    fn ascii_stl() {
        let text = "solid t\n\
            facet normal 0 0 -1\n outer loop\n  vertex 0 0 0\n  vertex 0 1 0\n  vertex 1 0 0\n endloop\nendfacet\n\
            facet normal 0 0 0\n outer loop\n  vertex 0 0 0\n  vertex 1 0 0\n  vertex 0 0 1\n endloop\nendfacet\n\
            facet normal 0 0 0\n outer loop\n  vertex 0 0 0\n  vertex 0 0 1\n  vertex 0 1 0\n endloop\nendfacet\n\
            facet normal 0 0 0\n outer loop\n  vertex 1 0 0\n  vertex 0 1 0\n  vertex 0 0 1\n endloop\nendfacet\n\
            endsolid t\n";
        let mesh = parse_stl(text.as_bytes()).unwrap();
        assert_eq!(mesh.vertices().len(), 4);
        assert!((mesh.volume() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let mesh = fixtures::proxy_motor().mesh().clone();
        let back = parse_obj(&encode_obj(&mesh)).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.triangles(), mesh.triangles());
    }

    #[test]
    fn obj_quads_and_negative_indices() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
            f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2/1 3/1 7/1 6/1\nf -5 -1 -2 -6\nf 4 1 5 8\n";
        let mesh = parse_obj(text).unwrap();
        assert_eq!(mesh.triangles().len(), 12);
        assert!((mesh.volume() - 1.0).abs() < 1e-12);
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(parse_stl(b"not a mesh").is_err());
        assert!(MeshFormat::from_path(Path::new("a.ply")).is_err());
    }
}
