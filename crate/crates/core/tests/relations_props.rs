use jigplan_core::fixtures;
use jigplan_core::relations::{self, BoolMatrix, Direction, RelationMatrices, SweepParams};
use jigplan_core::{AssemblyModel, PartModel, Vec3};
use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CELL: f64 = 10.0;

/// Cubes on a coarse lattice, each face-adjacent to an earlier one, with
/// random edge lengths so that some neighbours only partly overlap.
fn random_cube_stack(seed: u64) -> AssemblyModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(4..=7);
    let mut cells: Vec<[i32; 3]> = vec![[0, 0, 0]];
    while cells.len() < count {
        let base = cells[rng.random_range(0..cells.len())];
        let axis = rng.random_range(0..3);
        let mut c = base;
        c[axis] += if rng.random_bool(0.5) { 1 } else { -1 };
        if !cells.contains(&c) {
            cells.push(c);
        }
    }
    let parts = cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let min = Vec3::new(c[0] as f64, c[1] as f64, c[2] as f64) * CELL;
            let edge = Vec3::new(
                [6.0, 8.0, 10.0][rng.random_range(0..3)],
                [6.0, 8.0, 10.0][rng.random_range(0..3)],
                CELL,
            );
            let mesh = fixtures::box_mesh(min, min + edge);
            PartModel::new(format!("c{i}"), mesh, rng.random_range(1.0..50.0), None).unwrap()
        })
        .collect();
    AssemblyModel::new(parts, None).unwrap()
}

fn fixture_assemblies() -> Vec<(&'static str, AssemblyModel)> {
    vec![
        ("proxy", fixtures::proxy_assembly()),
        ("peg", fixtures::peg_assembly()),
    ]
}

#[test]
fn duality_on_random_cube_stacks() {
    for seed in 0..6 {
        let asm = random_cube_stack(seed);
        let params = SweepParams::for_assembly(&asm);
        let m =
            Direction::ALL.map(|d| relations::compute_interference_free_matrix(&asm, d, &params));
        let n = asm.len();
        let mut blocked = 0;
        for d in Direction::ALL {
            for i in 0..n {
                for k in 0..n {
                    if i == k {
                        continue;
                    }
                    assert_eq!(
                        m[d.index()].get(i, k),
                        m[d.opposite().index()].get(k, i),
                        "seed {seed}: M{}({i},{k})",
                        d.label()
                    );
                    blocked += usize::from(!m[d.index()].get(i, k));
                }
            }
        }
        assert!(blocked > 0, "seed {seed} has no blocking at all");
    }
}

#[test]
fn duality_on_fixtures() {
    for (name, asm) in fixture_assemblies() {
        let rel = RelationMatrices::compute(&asm, &SweepParams::for_assembly(&asm)).unwrap();
        for d in Direction::ALL {
            assert_eq!(
                *rel.free(d),
                rel.free(d.opposite()).transpose(),
                "{name} {d}"
            );
        }
    }
}

#[test]
fn reachable_is_bounded_by_contact_and_freedom() {
    let mut cases = fixture_assemblies();
    cases.extend((10..13).map(|s| ("stack", random_cube_stack(s))));
    for (name, asm) in cases {
        let rel = RelationMatrices::compute(&asm, &SweepParams::for_assembly(&asm)).unwrap();
        let c = rel.contact();
        assert!(c.is_symmetric() && c.zero_diagonal(), "{name}");
        let n = c.dim();
        let sym = BoolMatrix::from_fn(n, |i, k| c.get(i, k) || c.get(k, i));
        for d in Direction::ALL {
            assert!(rel.reachable(d).le(&sym), "{name} {d}");
            assert!(rel.reachable(d).le(rel.free(d)), "{name} {d}");
        }
    }
}

#[test]
fn no_contact_means_nothing_reachable() {
    let far = |id: &str, x: f64| {
        PartModel::new(
            id,
            fixtures::box_mesh(Vec3::new(x, 0.0, 0.0), Vec3::new(x + 1.0, 1.0, 1.0)),
            1.0,
            None,
        )
        .unwrap()
    };
    let asm = AssemblyModel::new(vec![far("a", 0.0), far("b", 3.0), far("c", 6.0)], None).unwrap();
    let rel = RelationMatrices::compute(&asm, &SweepParams::for_assembly(&asm)).unwrap();
    assert!(rel.contact().is_zero());
    for d in Direction::ALL {
        assert!(rel.reachable(d).is_zero());
    }
}

#[test]
fn oracle_agrees_with_default_sampling() {
    for (name, asm) in fixture_assemblies() {
        let params = SweepParams::for_assembly(&asm);
        for d in Direction::ALL {
            let standard = relations::compute_interference_free_matrix(&asm, d, &params);
            let oracle =
                relations::compute_interference_free_matrix(&asm, d, &params.with_oracle(true));
            assert_eq!(standard, oracle, "{name} {d}");
        }
    }
}

#[test]
fn refining_never_frees_a_blocked_pair() {
    for (name, asm) in fixture_assemblies() {
        let coarse = SweepParams::new(&asm, None, Some(16), false).unwrap();
        let fine = SweepParams::new(&asm, None, Some(64), false).unwrap();
        for d in Direction::ALL {
            let mc = relations::compute_interference_free_matrix(&asm, d, &coarse);
            let mf = relations::compute_interference_free_matrix(&asm, d, &fine);
            let mo =
                relations::compute_interference_free_matrix(&asm, d, &coarse.with_oracle(true));
            assert!(mf.le(&mc), "{name} {d}");
            assert!(mo.le(&mc), "{name} {d}");
        }
    }
}

fn quarter_turn_z() -> Matrix3<f64> {
    Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0)
}

#[test]
fn quarter_turn_about_z_permutes_directions() {
    // Rz(90): +x -> +y, +y -> -x, -x -> -y, -y -> +x.
    let image = |d: Direction| match d {
        Direction::PosX => Direction::PosY,
        Direction::PosY => Direction::NegX,
        Direction::NegX => Direction::NegY,
        Direction::NegY => Direction::PosX,
        z => z,
    };
    let lateral_peg = fixtures::peg_assembly()
        .rotated(&Matrix3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0))
        .unwrap();
    let mut cases = fixture_assemblies();
    cases.push(("lateral peg", lateral_peg));
    cases.push(("stack", random_cube_stack(3)));
    for (name, asm) in cases {
        let turned = asm.rotated(&quarter_turn_z()).unwrap();
        let a = RelationMatrices::compute(&asm, &SweepParams::for_assembly(&asm)).unwrap();
        let b = RelationMatrices::compute(&turned, &SweepParams::for_assembly(&turned)).unwrap();
        assert_eq!(a.contact(), b.contact(), "{name}");
        for d in Direction::ALL {
            assert_eq!(a.free(d), b.free(image(d)), "{name} {d}");
        }
    }
}

#[test]
fn peg_leaves_its_hole_upward_only() {
    let asm = fixtures::peg_assembly();
    let rel = RelationMatrices::compute(&asm, &SweepParams::for_assembly(&asm)).unwrap();
    let list = rel.reachable_direction_list("base", "peg").unwrap();
    assert_eq!(list.as_bits(), [0, 0, 0, 0, 1, 0]);
    let back = rel.reachable_direction_list("peg", "base").unwrap();
    assert_eq!(back.as_bits(), [0, 0, 0, 0, 0, 1]);
}
