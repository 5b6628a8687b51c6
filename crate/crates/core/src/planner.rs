//! Fixing-part and posture planning along a given assembly order.
//!
//! The planner keeps a growing target model. At every step it reads the
//! reachable-direction list between the target and the next entity, merges
//! the two, picks the posture (an axis direction placed vertically) whose
//! resting orientation has the lowest centre of gravity, and records the
//! bottom-most part as the one held by the jig.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::mass;
use crate::part::{AssemblyModel, PartModel, RigidOrientation};
use crate::relations::{Direction, ReachableDirectionList, RelationMatrices, SweepParams};

/// Parts whose lowest points differ by less than this (mm) tie for the bottom.
pub const BOTTOM_TIE_TOLERANCE: f64 = 1e-6;

/// Relative tolerance under which two CoG heights count as equal.
const COG_TIE_TOLERANCE: f64 = 1e-9;

/// Ordered assembly steps; each entry is a part id or a group name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblySequence {
    steps: Vec<String>,
}

impl AssemblySequence {
    pub fn new<S: Into<String>>(steps: impl IntoIterator<Item = S>) -> Result<Self> {
        let steps: Vec<String> = steps.into_iter().map(Into::into).collect();
        if steps.len() < 2 {
            return Err(Error::InvalidSequence(alloc::format!(
                "{} entities given, at least 2 required",
                steps.len()
            )));
        }
        for (i, s) in steps.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidSequence("empty entity name".into()));
            }
            if steps[..i].contains(s) {
                return Err(Error::InvalidSequence(alloc::format!(
                    "'{s}' appears twice"
                )));
            }
        }
        Ok(Self { steps })
    }

    /// Parses `a,b,c`.
    pub fn parse(list: &str) -> Result<Self> {
        Self::new(list.split(',').map(str::trim))
    }

    pub fn steps(&self) -> &[String] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixingStep {
    /// 1-based.
    pub step_index: usize,
    pub fixed_part: String,
    pub posture_label: Direction,
    pub orientation: RigidOrientation,
    /// Height (mm) of the combined CoG above the model's lowest point.
    pub cog_height: f64,
    pub reachable_list: ReachableDirectionList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixingPlan {
    pub steps: Vec<FixingStep>,
    pub complete: bool,
    pub halt_reason: Option<String>,
}

fn rot(rows: [[f64; 3]; 3]) -> RigidOrientation {
    RigidOrientation::new(Matrix3::from_fn(|r, c| rows[r][c])).expect("axis rotation is proper")
}

/// The two rotations placing the axis of `dir` vertically: first the one
/// sending `dir` to world +z, then the one sending it to world -z.
pub fn candidate_orientations(dir: Direction) -> [RigidOrientation; 2] {
    let identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let flip_x = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    // Quarter turns about y: x -> +z and x -> -z.
    let x_up = [[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
    let x_down = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]];
    // Quarter turns about x: y -> +z and y -> -z.
    let y_up = [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]];
    let y_down = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]];
    let [a, b] = match dir {
        Direction::PosZ => [identity, flip_x],
        Direction::NegZ => [flip_x, identity],
        Direction::PosX => [x_up, x_down],
        Direction::NegX => [x_down, x_up],
        Direction::PosY => [y_up, y_down],
        Direction::NegY => [y_down, y_up],
    };
    [rot(a), rot(b)]
}

/// Height of the combined CoG above the lowest vertex, after rotating the model.
pub fn cog_height(parts: &[&PartModel], orientation: &RigidOrientation) -> Result<f64> {
    let mp = mass::mass_properties(parts.iter().copied())?;
    let cog_z = orientation.apply(&mp.cog).z;
    let lowest = lowest_z(parts, orientation);
    Ok((cog_z - lowest).max(0.0))
}

fn part_lowest_z(part: &PartModel, orientation: &RigidOrientation) -> f64 {
    let row = orientation.matrix().row(2);
    part.mesh()
        .vertices()
        .iter()
        .map(|v| row[0] * v.x + row[1] * v.y + row[2] * v.z)
        .fold(f64::INFINITY, f64::min)
}

fn lowest_z(parts: &[&PartModel], orientation: &RigidOrientation) -> f64 {
    parts
        .iter()
        .map(|p| part_lowest_z(p, orientation))
        .fold(f64::INFINITY, f64::min)
}

fn improves(candidate: f64, best: f64) -> bool {
    candidate < best - COG_TIE_TOLERANCE * (1.0 + best.abs())
}

/// Lowest-CoG orientation of a single direction; ties keep `dir -> +z`.
fn best_orientation(dir: Direction, model: &[&PartModel]) -> Result<(RigidOrientation, f64)> {
    let [up, down] = candidate_orientations(dir);
    let h_up = cog_height(model, &up)?;
    let h_down = cog_height(model, &down)?;
    Ok(if improves(h_down, h_up) {
        (down, h_down)
    } else {
        (up, h_up)
    })
}

/// Posture with the lowest CoG height among all set directions and both
/// verticalisations of each. Ties go to the earlier direction in list
/// order, then to the orientation sending the direction to world +z.
pub fn select_posture(
    reachable: &ReachableDirectionList,
    model: &[&PartModel],
) -> Result<(Direction, RigidOrientation)> {
    let mut best: Option<(Direction, RigidOrientation, f64)> = None;
    for dir in reachable.directions() {
        for orientation in candidate_orientations(dir) {
            let h = cog_height(model, &orientation)?;
            match &best {
                Some((_, _, bh)) if !improves(h, *bh) => {}
                _ => best = Some((dir, orientation, h)),
            }
        }
    }
    best.map(|(d, o, _)| (d, o))
        .ok_or(Error::NoReachableDirection)
}

/// Entity of the part reaching lowest in `orientation`. Ties within
/// [`BOTTOM_TIE_TOLERANCE`] go to the heavier part, then the smaller id.
pub fn bottom_part(model: &[&PartModel], orientation: &RigidOrientation) -> Result<String> {
    let lowest = lowest_z(model, orientation);
    model
        .iter()
        .filter(|p| part_lowest_z(p, orientation) - lowest <= BOTTOM_TIE_TOLERANCE)
        .min_by(|a, b| {
            b.mass()
                .total_cmp(&a.mass())
                .then_with(|| a.id().cmp(b.id()))
        })
        .map(|p| p.entity().to_string())
        .ok_or_else(|| Error::InvalidAssembly("bottom part of an empty model".into()))
}

/// Walks the assembly order and decides, for every step, which part the jig
/// holds and in which posture.
///
/// Stops with a partial plan when the next entity has no reachable
/// direction relative to the model assembled so far.
pub fn configure_fixing_parts(
    assembly: &AssemblyModel,
    sequence: &AssemblySequence,
    params: &SweepParams,
) -> Result<FixingPlan> {
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut all_parts: Vec<usize> = Vec::new();
    for name in sequence.steps() {
        let idx = assembly
            .resolve_entity(name)
            .ok_or_else(|| Error::UnknownEntity(name.clone()))?;
        if let Some(dup) = idx.iter().find(|i| all_parts.contains(i)) {
            return Err(Error::InvalidSequence(alloc::format!(
                "part '{}' is referenced twice",
                assembly.parts()[*dup].id()
            )));
        }
        all_parts.extend(&idx);
        members.push(idx);
    }

    let mut rel = RelationMatrices::compute_for(assembly, &all_parts, params)?;
    for (name, idx) in sequence.steps().iter().zip(&members) {
        let ids: Vec<&str> = idx.iter().map(|&i| assembly.parts()[i].id()).collect();
        if ids.len() != 1 || ids[0] != name {
            rel = rel.merge_entity(&ids, name)?;
        }
    }

    let parts = assembly.parts();
    let mut target = sequence.steps()[0].clone();
    let mut model: Vec<&PartModel> = members[0].iter().map(|&i| &parts[i]).collect();
    let mut steps = Vec::new();
    let mut halt_reason = None;

    for (i, next) in sequence.steps().iter().enumerate().skip(1) {
        let reachable = rel.reachable_direction_list(&target, next)?;
        if reachable.is_empty() {
            halt_reason = Some(alloc::format!(
                "no reachable direction between '{target}' and '{next}' at step {}",
                i + 1
            ));
            break;
        }
        let combined = alloc::format!("{target}+{next}");
        rel = rel.merge_entity(&[target.as_str(), next.as_str()], &combined)?;
        target = combined;
        model.extend(members[i].iter().map(|&p| &parts[p]));

        let (label, orientation) = if reachable.count() >= 2 {
            select_posture(&reachable, &model)?
        } else {
            let dir = reachable.first().expect("non-empty list");
            (dir, best_orientation(dir, &model)?.0)
        };
        steps.push(FixingStep {
            step_index: i,
            fixed_part: bottom_part(&model, &orientation)?,
            posture_label: label,
            orientation,
            cog_height: cog_height(&model, &orientation)?,
            reachable_list: reachable,
        });
    }

    let complete = steps.len() == sequence.len() - 1;
    Ok(FixingPlan {
        steps,
        complete,
        halt_reason: if complete { None } else { halt_reason },
    })
}
