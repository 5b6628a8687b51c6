use jigplan_core::fixtures::{
    self, BASE_HOLE_MAX, BASE_HOLE_MIN, BASE_MASS, BASE_SIZE, PEG_MASS, PEG_TOP,
};
use jigplan_core::mass::{self, MassProperties};
use jigplan_core::query;
use jigplan_core::{PartModel, TriMesh, Vec3};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn boxed(min: [f64; 3], size: [f64; 3]) -> TriMesh {
    let min = Vec3::from(min);
    fixtures::box_mesh(min, min + Vec3::from(size))
}

fn coord() -> impl Strategy<Value = f64> {
    (-40i32..40).prop_map(|v| v as f64 * 0.5)
}

fn size() -> impl Strategy<Value = f64> {
    (1i32..20).prop_map(|v| v as f64 * 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_symmetric_and_matches_brute_force(
        a in (coord(), coord(), coord(), size(), size(), size()),
        b in (coord(), coord(), coord(), size(), size(), size()),
    ) {
        let ma = boxed([a.0, a.1, a.2], [a.3, a.4, a.5]);
        let mb = boxed([b.0, b.1, b.2], [b.3, b.4, b.5]);
        let d_ab = query::min_distance(&ma, &mb);
        let d_ba = query::min_distance(&mb, &ma);
        prop_assert_eq!(d_ab, d_ba);
        prop_assert_eq!(d_ab, query::min_distance_exhaustive(&ma, &mb, &Vec3::zeros()));
        prop_assert_eq!(
            query::intersects(&ma, &mb),
            query::intersects_exhaustive(&ma, &mb, &Vec3::zeros())
        );

        // Axis-aligned boxes: the true distance is the box-to-box gap.
        let gap: f64 = (0..3)
            .map(|i| {
                let (lo_a, hi_a) = (ma.aabb().min[i], ma.aabb().max[i]);
                let (lo_b, hi_b) = (mb.aabb().min[i], mb.aabb().max[i]);
                (lo_b - hi_a).max(lo_a - hi_b).max(0.0).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        prop_assert!((d_ab - gap).abs() < 1e-9, "{} vs {}", d_ab, gap);

        // Zero distance iff penetrating or touching.
        let overlap = (0..3).all(|i| {
            ma.aabb().min[i] < mb.aabb().max[i] && mb.aabb().min[i] < ma.aabb().max[i]
        });
        prop_assert_eq!(query::intersects(&ma, &mb), overlap);
        prop_assert_eq!(d_ab == 0.0, overlap || gap == 0.0);
    }
}

#[test]
fn bvh_queries_match_brute_force_on_fixture_pairs() {
    let parts: Vec<PartModel> = fixtures::proxy_assembly()
        .parts()
        .iter()
        .chain(fixtures::peg_assembly().parts())
        .cloned()
        .collect();
    let offsets = [
        Vec3::zeros(),
        Vec3::new(0.0, 0.0, 1.5),
        Vec3::new(0.0, 0.0, -1.5),
        Vec3::new(4.0, -2.5, 0.5),
        Vec3::new(-17.0, 3.0, 9.0),
    ];
    for a in &parts {
        for b in &parts {
            for off in &offsets {
                let fast = query::min_distance_offset(a.mesh(), b.mesh(), off);
                let slow = query::min_distance_exhaustive(a.mesh(), b.mesh(), off);
                assert_eq!(fast, slow, "{} / {} at {off:?}", a.id(), b.id());
                assert_eq!(
                    query::intersects_offset(a.mesh(), b.mesh(), off),
                    query::intersects_exhaustive(a.mesh(), b.mesh(), off),
                    "{} / {} at {off:?}",
                    a.id(),
                    b.id()
                );
            }
        }
    }
}

#[test]
fn mass_properties_ignore_vertex_and_triangle_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for part in fixtures::proxy_assembly().parts() {
        let mesh = part.mesh();
        let n = mesh.vertices().len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut inverse = vec![0u32; n];
        let mut verts = vec![Vec3::zeros(); n];
        for (new, &old) in perm.iter().enumerate() {
            verts[new] = mesh.vertices()[old];
            inverse[old] = new as u32;
        }
        let mut tris: Vec<[u32; 3]> = mesh
            .triangles()
            .iter()
            .map(|t| t.map(|i| inverse[i as usize]))
            .collect();
        tris.shuffle(&mut rng);
        // Rotate each triangle's corner order too; orientation is preserved.
        for (k, t) in tris.iter_mut().enumerate() {
            t.rotate_left(k % 3);
        }
        let shuffled = PartModel::new(
            part.id(),
            TriMesh::new(verts, tris).unwrap(),
            part.mass(),
            None,
        )
        .unwrap();
        let scale = part.mesh().aabb().diagonal();
        assert!((shuffled.volume() - part.volume()).abs() <= 1e-9 * part.volume());
        assert!(
            (shuffled.cog() - part.cog()).norm() <= 1e-9 * scale,
            "{}",
            part.id()
        );
    }
}

#[test]
fn combination_is_associative() {
    let asm = fixtures::proxy_assembly();
    let parts = asm.parts();
    let all = mass::mass_properties(parts).unwrap();
    let ab = mass::mass_properties(&parts[..2]).unwrap();
    let cd = mass::mass_properties(&parts[2..]).unwrap();
    let folded = mass::combine([ab, cd]).unwrap();
    assert!((all.total_mass - folded.total_mass).abs() < 1e-12);
    assert!((all.cog - folded.cog).norm() < 1e-9);

    let three = mass::mass_properties(&parts[..3]).unwrap();
    let step = mass::combine([ab, mass::mass_properties(&parts[2..3]).unwrap()]).unwrap();
    assert!((three.cog - step.cog).norm() < 1e-9);
}

#[test]
fn equal_masses_meet_at_the_midpoint() {
    let a = MassProperties {
        total_mass: 1.0,
        cog: Vec3::new(-3.0, 2.0, 8.0),
    };
    let b = MassProperties {
        total_mass: 1.0,
        cog: Vec3::new(5.0, 2.0, -4.0),
    };
    assert_eq!(mass::combine([a, b]).unwrap().cog, Vec3::new(1.0, 2.0, 2.0));
}

/// Voxel-centre centroid of a solid given by an exact point-membership test.
fn voxel_centroid(lo: Vec3, hi: Vec3, n: usize, inside: impl Fn(f64, f64, f64) -> bool) -> Vec3 {
    let h = (hi - lo) / n as f64;
    let mut sum = Vec3::zeros();
    let mut count = 0u64;
    for i in 0..n {
        let x = lo.x + (i as f64 + 0.5) * h.x;
        for j in 0..n {
            let y = lo.y + (j as f64 + 0.5) * h.y;
            for k in 0..n {
                let z = lo.z + (k as f64 + 0.5) * h.z;
                if inside(x, y, z) {
                    sum += Vec3::new(x, y, z);
                    count += 1;
                }
            }
        }
    }
    sum / count as f64
}

#[test]
fn blind_hole_cog_matches_voxel_oracle() {
    let base = fixtures::proxy_base();
    let peg = fixtures::proxy_peg();
    let in_hole = |x: f64, y: f64, z: f64, top: f64| {
        (BASE_HOLE_MIN[0]..BASE_HOLE_MAX[0]).contains(&x)
            && (BASE_HOLE_MIN[1]..BASE_HOLE_MAX[1]).contains(&y)
            && (BASE_HOLE_MIN[2]..top).contains(&z)
    };
    let base_oracle = voxel_centroid(Vec3::zeros(), Vec3::from(BASE_SIZE), 256, |x, y, z| {
        !in_hole(x, y, z, BASE_HOLE_MAX[2])
    });
    let peg_lo = Vec3::from(BASE_HOLE_MIN);
    let peg_hi = Vec3::new(BASE_HOLE_MAX[0], BASE_HOLE_MAX[1], PEG_TOP);
    let peg_oracle = voxel_centroid(peg_lo, peg_hi, 64, |x, y, z| in_hole(x, y, z, PEG_TOP));

    let diag = Vec3::from(BASE_SIZE).norm();
    assert!((base.cog() - base_oracle).norm() <= 1e-3 * diag);

    let combined = mass::mass_properties([&base, &peg]).unwrap();
    let oracle = (base_oracle * BASE_MASS + peg_oracle * PEG_MASS) / (BASE_MASS + PEG_MASS);
    let asm_diag = fixtures::peg_assembly().aabb_diagonal();
    assert!((combined.cog - oracle).norm() <= 1e-3 * asm_diag);
}
