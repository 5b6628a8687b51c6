//! Deterministic analytic test parts.
//!
//! The proxy product is a motor (heavy cylinder, four pins under its base,
//! shaft pointing up), a plate with a through-hole for the shaft and two bolt
//! holes, and two bolts seated through the plate onto the motor's top face.
//! Everything mates along the z axis in the assembled pose.
//!
//! Meshes are assembled from quads and welded, so every solid is a single
//! closed manifold shell.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::mesh::{TriMesh, Vec3};
use crate::part::{AssemblyModel, PartModel};

/// Motor body radius and height; the base plane sits at z = 0.
pub const MOTOR_RADIUS: f64 = 20.0;
pub const MOTOR_HEIGHT: f64 = 40.0;
pub const SHAFT_RADIUS: f64 = 3.0;
pub const SHAFT_LENGTH: f64 = 22.0;
pub const PIN_INNER_RADIUS: f64 = 8.0;
pub const PIN_OUTER_RADIUS: f64 = 12.0;
pub const PIN_DEPTH: f64 = 3.0;
pub const MOTOR_MASS: f64 = 300.0;

pub const PLATE_MIN: [f64; 3] = [-30.0, -12.0, MOTOR_HEIGHT];
pub const PLATE_MAX: [f64; 3] = [30.0, 12.0, MOTOR_HEIGHT + 5.0];
pub const PLATE_MASS: f64 = 60.0;

/// Bolt axes sit at x = ±BOLT_OFFSET on the y = 0 line.
pub const BOLT_OFFSET: f64 = 15.0;
pub const BOLT_SHANK_RADIUS: f64 = 2.0;
pub const BOLT_HEAD_RADIUS: f64 = 3.5;
pub const BOLT_HEAD_HEIGHT: f64 = 2.5;
pub const BOLT_MASS: f64 = 3.0;

pub const BASE_SIZE: [f64; 3] = [40.0, 40.0, 20.0];
/// Blind hole of the peg base: x/y range and floor height; open at the top face.
pub const BASE_HOLE_MIN: [f64; 3] = [15.0, 15.0, 8.0];
pub const BASE_HOLE_MAX: [f64; 3] = [25.0, 25.0, 20.0];
pub const BASE_MASS: f64 = 100.0;
pub const PEG_TOP: f64 = 30.0;
pub const PEG_MASS: f64 = 20.0;

const MOTOR_SEGMENTS: usize = 32;
const BOLT_SEGMENTS: usize = 16;

/// Fixture kinds available from [`generate_proxy_fixture`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxyKind {
    Motor,
    Plate,
    BoltPair,
    Peg,
    BlindHoleBase,
    Cube,
}

impl ProxyKind {
    pub const ALL: [ProxyKind; 6] = [
        ProxyKind::Motor,
        ProxyKind::Plate,
        ProxyKind::BoltPair,
        ProxyKind::Peg,
        ProxyKind::BlindHoleBase,
        ProxyKind::Cube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProxyKind::Motor => "motor",
            ProxyKind::Plate => "plate",
            ProxyKind::BoltPair => "bolt-pair",
            ProxyKind::Peg => "peg",
            ProxyKind::BlindHoleBase => "blind-hole-base",
            ProxyKind::Cube => "cube",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }
}

pub fn generate_proxy_fixture(kind: ProxyKind) -> PartModel {
    match kind {
        ProxyKind::Motor => proxy_motor(),
        ProxyKind::Plate => proxy_plate(),
        ProxyKind::BoltPair => {
            let mut quads = bolt_quads(BOLT_OFFSET);
            quads.extend(bolt_quads(-BOLT_OFFSET));
            part("bolts", quads_to_mesh(&quads), 2.0 * BOLT_MASS, None)
        }
        ProxyKind::Peg => proxy_peg(),
        ProxyKind::BlindHoleBase => proxy_base(),
        ProxyKind::Cube => part(
            "cube",
            box_mesh(Vec3::repeat(-0.5), Vec3::repeat(0.5)),
            1.0,
            None,
        ),
    }
}

fn part(id: &str, mesh: TriMesh, mass: f64, group: Option<&str>) -> PartModel {
    PartModel::new(id, mesh, mass, group.map(String::from)).expect("fixture part is valid")
}

pub fn proxy_motor() -> PartModel {
    part("motor", motor_mesh(), MOTOR_MASS, None)
}

pub fn proxy_plate() -> PartModel {
    part("plate", plate_mesh(), PLATE_MASS, None)
}

/// One bolt of the pair; `side` is +1 or -1 along x.
pub fn proxy_bolt(id: &str, side: f64) -> PartModel {
    part(
        id,
        quads_to_mesh(&bolt_quads(side.signum() * BOLT_OFFSET)),
        BOLT_MASS,
        Some("bolts"),
    )
}

pub fn proxy_peg() -> PartModel {
    part(
        "peg",
        box_mesh(
            Vec3::from(BASE_HOLE_MIN),
            Vec3::new(BASE_HOLE_MAX[0], BASE_HOLE_MAX[1], PEG_TOP),
        ),
        PEG_MASS,
        None,
    )
}

pub fn proxy_base() -> PartModel {
    part("base", blind_hole_base_mesh(), BASE_MASS, None)
}

/// Motor, plate and the two grouped bolts in the assembled pose.
pub fn proxy_assembly() -> AssemblyModel {
    AssemblyModel::new(
        alloc::vec![
            proxy_motor(),
            proxy_plate(),
            proxy_bolt("bolt_1", 1.0),
            proxy_bolt("bolt_2", -1.0),
        ],
        None,
    )
    .expect("proxy assembly is valid")
}

/// Peg seated in the upward-opening blind hole of the base.
pub fn peg_assembly() -> AssemblyModel {
    AssemblyModel::new(alloc::vec![proxy_base(), proxy_peg()], None).expect("peg assembly is valid")
}

/// Unit cube spanning [0, 1]³.
pub fn unit_cube() -> TriMesh {
    box_mesh(Vec3::zeros(), Vec3::repeat(1.0))
}

/// Axis-aligned box: 8 vertices, 12 triangles.
pub fn box_mesh(min: Vec3, max: Vec3) -> TriMesh {
    grid_solid(
        [min.x, max.x].as_slice(),
        &[min.y, max.y],
        &[min.z, max.z],
        |_, _, _| true,
    )
}

/// Closed surface of a union of grid cells.
///
/// Cell `(i, j, k)` spans `xs[i]..xs[i+1]` and so on; faces between an
/// occupied cell and an empty one (or the outside) are emitted.
pub fn grid_solid(
    xs: &[f64],
    ys: &[f64],
    zs: &[f64],
    occupied: impl Fn(usize, usize, usize) -> bool,
) -> TriMesh {
    let lines = [xs, ys, zs];
    let dims = [xs.len() - 1, ys.len() - 1, zs.len() - 1];
    let filled = |c: [isize; 3]| -> bool {
        (0..3).all(|a| c[a] >= 0 && (c[a] as usize) < dims[a])
            && occupied(c[0] as usize, c[1] as usize, c[2] as usize)
    };
    let mut quads = Vec::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let cell = [i as isize, j as isize, k as isize];
                if !filled(cell) {
                    continue;
                }
                for axis in 0..3 {
                    for side in [0usize, 1] {
                        let mut nb = cell;
                        nb[axis] += if side == 1 { 1 } else { -1 };
                        if filled(nb) {
                            continue;
                        }
                        let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
                        let idx = [i, j, k];
                        let at = |db: usize, dc: usize| {
                            let mut p = Vec3::zeros();
                            p[axis] = lines[axis][idx[axis] + side];
                            p[b] = lines[b][idx[b] + db];
                            p[c] = lines[c][idx[c] + dc];
                            p
                        };
                        let mut q = [at(0, 0), at(1, 0), at(1, 1), at(0, 1)];
                        if side == 0 {
                            q.reverse();
                        }
                        quads.push(q);
                    }
                }
            }
        }
    }
    quads_to_mesh(&quads)
}

fn quads_to_mesh(quads: &[[Vec3; 4]]) -> TriMesh {
    let soup: Vec<[Vec3; 3]> = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    TriMesh::from_soup(&soup).expect("fixture mesh is valid")
}

/// Point on the unit circle at `k / n` of a turn; quarter turns are exact.
fn circle(k: usize, n: usize) -> (f64, f64) {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
    }
    let a = 2.0 * PI * k as f64 / n as f64;
    (libm::cos(a), libm::sin(a))
}

/// Quads of a solid of revolution about the z axis through `(cx, cy)`.
///
/// `profile` runs from a point on the axis, around the outside, back to the
/// axis. Returns quads indexed `[band][segment]`.
fn lathe_quads(profile: &[(f64, f64)], segments: usize, cx: f64, cy: f64) -> Vec<Vec<[Vec3; 4]>> {
    let at = |r: f64, z: f64, k: usize| {
        let (c, s) = circle(k, segments);
        Vec3::new(cx + r * c, cy + r * s, z)
    };
    profile
        .windows(2)
        .map(|w| {
            let ((r0, z0), (r1, z1)) = (w[0], w[1]);
            (0..segments)
                .map(|k| {
                    [
                        at(r0, z0, k),
                        at(r1, z1, k),
                        at(r1, z1, k + 1),
                        at(r0, z0, k + 1),
                    ]
                })
                .collect()
        })
        .collect()
}

/// Replaces `quad` by a block protruding along `dir`; sides keep the quad's winding.
fn extrude_quad(quad: &[Vec3; 4], dir: Vec3) -> [[Vec3; 4]; 5] {
    let cap = [quad[0] + dir, quad[1] + dir, quad[2] + dir, quad[3] + dir];
    let wall = |i: usize| {
        let j = (i + 1) % 4;
        [quad[i], quad[j], cap[j], cap[i]]
    };
    [cap, wall(0), wall(1), wall(2), wall(3)]
}

fn motor_mesh() -> TriMesh {
    let h = MOTOR_HEIGHT;
    let profile = [
        (0.0, 0.0),
        (PIN_INNER_RADIUS, 0.0),
        (PIN_OUTER_RADIUS, 0.0),
        (MOTOR_RADIUS, 0.0),
        (MOTOR_RADIUS, h),
        (SHAFT_RADIUS, h),
        (SHAFT_RADIUS, h + SHAFT_LENGTH),
        (0.0, h + SHAFT_LENGTH),
    ];
    let bands = lathe_quads(&profile, MOTOR_SEGMENTS, 0.0, 0.0);
    let pin_band = 1;
    let pins: [usize; 4] = [
        0,
        MOTOR_SEGMENTS / 4,
        MOTOR_SEGMENTS / 2,
        3 * MOTOR_SEGMENTS / 4,
    ];
    let mut quads = Vec::new();
    for (b, band) in bands.iter().enumerate() {
        for (k, q) in band.iter().enumerate() {
            if b == pin_band && pins.contains(&k) {
                quads.extend(extrude_quad(q, Vec3::new(0.0, 0.0, -PIN_DEPTH)));
            } else {
                quads.push(*q);
            }
        }
    }
    quads_to_mesh(&quads)
}

fn bolt_quads(x: f64) -> Vec<[Vec3; 4]> {
    let z0 = PLATE_MIN[2];
    let z1 = PLATE_MAX[2];
    let profile = [
        (0.0, z0),
        (BOLT_SHANK_RADIUS, z0),
        (BOLT_SHANK_RADIUS, z1),
        (BOLT_HEAD_RADIUS, z1),
        (BOLT_HEAD_RADIUS, z1 + BOLT_HEAD_HEIGHT),
        (0.0, z1 + BOLT_HEAD_HEIGHT),
    ];
    lathe_quads(&profile, BOLT_SEGMENTS, x, 0.0)
        .into_iter()
        .flatten()
        .collect()
}

/// Square holes of the plate: (x range, y range).
pub const PLATE_HOLES: [([f64; 2], [f64; 2]); 3] = [
    ([-SHAFT_RADIUS, SHAFT_RADIUS], [-SHAFT_RADIUS, SHAFT_RADIUS]),
    (
        [
            BOLT_OFFSET - BOLT_SHANK_RADIUS,
            BOLT_OFFSET + BOLT_SHANK_RADIUS,
        ],
        [-BOLT_SHANK_RADIUS, BOLT_SHANK_RADIUS],
    ),
    (
        [
            -BOLT_OFFSET - BOLT_SHANK_RADIUS,
            -BOLT_OFFSET + BOLT_SHANK_RADIUS,
        ],
        [-BOLT_SHANK_RADIUS, BOLT_SHANK_RADIUS],
    ),
];

fn sorted_lines(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn plate_mesh() -> TriMesh {
    let mut xs = alloc::vec![PLATE_MIN[0], PLATE_MAX[0]];
    let mut ys = alloc::vec![PLATE_MIN[1], PLATE_MAX[1]];
    for (hx, hy) in PLATE_HOLES {
        xs.extend(hx);
        ys.extend(hy);
    }
    let xs = sorted_lines(xs);
    let ys = sorted_lines(ys);
    let zs = [PLATE_MIN[2], PLATE_MAX[2]];
    grid_solid(&xs, &ys, &zs, |i, j, _| {
        let cx = 0.5 * (xs[i] + xs[i + 1]);
        let cy = 0.5 * (ys[j] + ys[j + 1]);
        !PLATE_HOLES
            .iter()
            .any(|(hx, hy)| hx[0] < cx && cx < hx[1] && hy[0] < cy && cy < hy[1])
    })
}

fn blind_hole_base_mesh() -> TriMesh {
    let xs = [0.0, BASE_HOLE_MIN[0], BASE_HOLE_MAX[0], BASE_SIZE[0]];
    let ys = [0.0, BASE_HOLE_MIN[1], BASE_HOLE_MAX[1], BASE_SIZE[1]];
    let zs = [0.0, BASE_HOLE_MIN[2], BASE_SIZE[2]];
    grid_solid(&xs, &ys, &zs, |i, j, k| !(i == 1 && j == 1 && k == 1))
}
