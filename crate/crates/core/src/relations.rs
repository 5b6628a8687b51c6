//! Pairwise part relations.
//!
//! * contact matrix `C`: parts whose surfaces are within the contact tolerance;
//! * interference-free matrices `M_j`: `M_j(i, k) = 1` when part `k` can be
//!   translated from its assembled pose along axis direction `j` to infinity
//!   without penetrating part `i`;
//! * reachable-direction matrices `W_j = (C OR Cᵀ) AND M_j`.
//!
//! Interference is decided by sampling the translation. The sample spacing
//! never exceeds half of the thinnest bounding-box extent of the two parts,
//! and oracle mode subdivides every step ten times.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::mesh::{TriMesh, Vec3};
use crate::part::AssemblyModel;
use crate::query;

/// One of the six axis-aligned translation directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

impl Direction {
    /// Reachable-direction list order.
    pub const ALL: [Direction; 6] = [
        Direction::PosX,
        Direction::NegX,
        Direction::PosY,
        Direction::NegY,
        Direction::PosZ,
        Direction::NegZ,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn axis(self) -> usize {
        self.index() / 2
    }

    pub fn sign(self) -> f64 {
        if self.index().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn unit_vector(self) -> Vec3 {
        let mut v = Vec3::zeros();
        v[self.axis()] = self.sign();
        v
    }

    pub fn opposite(self) -> Direction {
        Direction::ALL[self.index() ^ 1]
    }

    pub fn label(self) -> &'static str {
        ["+x", "-x", "+y", "-y", "+z", "-z"][self.index()]
    }

    /// Parses `+x`..`-z`; the Unicode minus sign is accepted.
    pub fn parse(s: &str) -> Result<Direction> {
        let norm = s.trim().replace('\u{2212}', "-");
        Direction::ALL
            .iter()
            .copied()
            .find(|d| d.label() == norm)
            .ok_or_else(|| Error::UnsupportedDirection(s.to_string()))
    }

    /// The axis direction equal to `v`; arbitrary vectors are rejected.
    pub fn from_vector(v: &Vec3) -> Result<Direction> {
        Direction::ALL
            .iter()
            .copied()
            .find(|d| (d.unit_vector() - v).norm() < 1e-9)
            .ok_or_else(|| {
                Error::UnsupportedDirection(alloc::format!("({}, {}, {})", v.x, v.y, v.z))
            })
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Square boolean matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BoolMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            bits: alloc::vec![false; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                m.bits[i * n + k] = f(i, k);
            }
        }
        m
    }

    /// Builds from rows of 0/1 values.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, k| rows[i][k] != 0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> bool {
        self.bits[i * self.n + k]
    }

    pub fn set(&mut self, i: usize, k: usize, v: bool) {
        self.bits[i * self.n + k] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, k| self.get(k, i))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| !self.get(i, i))
    }

    /// Elementwise `self <= other`.
    pub fn le(&self, other: &BoolMatrix) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.bits.chunks(self.n.max(1)).take(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }
}

/// `W = (C OR Cᵀ) AND M`, elementwise.
pub fn compute_reachable_matrix(contact: &BoolMatrix, free: &BoolMatrix) -> Result<BoolMatrix> {
    if contact.dim() != free.dim() {
        return Err(Error::DimensionMismatch(contact.dim(), free.dim()));
    }
    Ok(BoolMatrix::from_fn(contact.dim(), |i, k| {
        (contact.get(i, k) || contact.get(k, i)) && free.get(i, k)
    }))
}

/// Flags of `W_j(i, k)` in the order `+x, -x, +y, -y, +z, -z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReachableDirectionList {
    pub flags: [bool; 6],
}

impl ReachableDirectionList {
    pub fn new(flags: [bool; 6]) -> Self {
        Self { flags }
    }

    pub fn from_directions(dirs: &[Direction]) -> Self {
        let mut flags = [false; 6];
        for d in dirs {
            flags[d.index()] = true;
        }
        Self { flags }
    }

    pub fn is_set(&self, d: Direction) -> bool {
        self.flags[d.index()]
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Set directions in list order.
    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        Direction::ALL.iter().copied().filter(|d| self.is_set(*d))
    }

    pub fn first(&self) -> Option<Direction> {
        self.directions().next()
    }

    pub fn as_bits(&self) -> [u8; 6] {
        self.flags.map(u8::from)
    }
}

impl fmt::Display for ReachableDirectionList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.as_bits();
        write!(
            f,
            "({}, {}, {}, {}, {}, {})",
            b[0], b[1], b[2], b[3], b[4], b[5]
        )
    }
}

/// Minimum number of sweep samples.
pub const MIN_STEP_COUNT: usize = 16;
pub const DEFAULT_STEP_COUNT: usize = 64;
/// Sweep travel relative to the assembly bounding-box diagonal.
pub const DEFAULT_TRAVEL_RATIO: f64 = 2.0;
/// Subdivision of every step in oracle mode.
pub const ORACLE_REFINEMENT: usize = 10;

/// Discretisation of the translational sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub max_distance: f64,
    pub step_count: usize,
    pub oracle_mode: bool,
}

impl SweepParams {
    /// Defaults: travel of twice the assembly diagonal, 64 steps.
    pub fn for_assembly(assembly: &AssemblyModel) -> Self {
        Self {
            max_distance: DEFAULT_TRAVEL_RATIO * assembly.aabb_diagonal(),
            step_count: DEFAULT_STEP_COUNT,
            oracle_mode: false,
        }
    }

    /// Validated parameters; `None` fields take the defaults.
    pub fn new(
        assembly: &AssemblyModel,
        max_distance: Option<f64>,
        step_count: Option<usize>,
        oracle_mode: bool,
    ) -> Result<Self> {
        let defaults = Self::for_assembly(assembly);
        let p = Self {
            max_distance: max_distance.unwrap_or(defaults.max_distance),
            step_count: step_count.unwrap_or(defaults.step_count),
            oracle_mode,
        };
        p.validate(assembly)?;
        Ok(p)
    }

    pub fn validate(&self, assembly: &AssemblyModel) -> Result<()> {
        let min_travel = DEFAULT_TRAVEL_RATIO * assembly.aabb_diagonal();
        if !(self.max_distance >= min_travel) || !self.max_distance.is_finite() {
            return Err(Error::InvalidSweep(alloc::format!(
                "max distance {} mm is below twice the assembly diagonal ({min_travel} mm)",
                self.max_distance
            )));
        }
        if self.step_count < MIN_STEP_COUNT {
            return Err(Error::InvalidSweep(alloc::format!(
                "step count {} is below {MIN_STEP_COUNT}",
                self.step_count
            )));
        }
        Ok(())
    }

    pub fn with_oracle(self, oracle_mode: bool) -> Self {
        Self {
            oracle_mode,
            ..self
        }
    }

    /// Step count after raising it so that one step is at most half of `thinnest`.
    pub fn effective_step_count(&self, thinnest: f64) -> usize {
        let mut n = self.step_count;
        if thinnest > 0.0 {
            let needed = libm::ceil(2.0 * self.max_distance / thinnest) as usize;
            n = n.max(needed);
        }
        n
    }

    /// Sample offsets `t` in increasing order, last one equal to `max_distance`.
    ///
    /// Oracle samples include every standard sample bit for bit.
    pub fn samples(&self, thinnest: f64) -> impl Iterator<Item = f64> + '_ {
        let n = self.effective_step_count(thinnest);
        let sub = if self.oracle_mode {
            ORACLE_REFINEMENT
        } else {
            1
        };
        let max = self.max_distance;
        (1..=n).flat_map(move |s| {
            (1..=sub).map(move |u| {
                if u == sub {
                    max * s as f64 / n as f64
                } else {
                    max * ((s - 1) as f64 + u as f64 / sub as f64) / n as f64
                }
            })
        })
    }
}

/// `C(i, k) = 1` iff `i != k` and the surfaces are within the contact tolerance.
pub fn compute_contact_matrix(assembly: &AssemblyModel) -> BoolMatrix {
    let idx: Vec<usize> = (0..assembly.len()).collect();
    contact_matrix_for(assembly, &idx)
}

fn contact_matrix_for(assembly: &AssemblyModel, idx: &[usize]) -> BoolMatrix {
    let parts = assembly.parts();
    let eps = assembly.contact_epsilon();
    let mut c = BoolMatrix::zeros(idx.len());
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            let d = query::min_distance(parts[idx[a]].mesh(), parts[idx[b]].mesh());
            if d <= eps {
                c.set(a, b, true);
                c.set(b, a, true);
            }
        }
    }
    c
}

fn thinnest_extent(a: &TriMesh, b: &TriMesh) -> f64 {
    let ea = a.aabb().extent();
    let eb = b.aabb().extent();
    ea.min().min(eb.min())
}

/// `true` when `moving`, translated from its pose along `dir` by every
/// sampled distance, never penetrates `fixed`.
///
/// The pair is evaluated in a canonical order (lower index fixed), so
/// `sweep_is_free(i, k, j) == sweep_is_free(k, i, -j)` holds exactly.
pub fn sweep_is_free(
    assembly: &AssemblyModel,
    fixed: usize,
    moving: usize,
    dir: Direction,
    params: &SweepParams,
) -> bool {
    let parts = assembly.parts();
    if fixed < moving {
        sweep_core(parts[fixed].mesh(), parts[moving].mesh(), dir, params)
    } else {
        sweep_core(
            parts[moving].mesh(),
            parts[fixed].mesh(),
            dir.opposite(),
            params,
        )
    }
}

fn sweep_core(fixed: &TriMesh, moving: &TriMesh, dir: Direction, params: &SweepParams) -> bool {
    let axis = dir.axis();
    let sign = dir.sign();
    let u = dir.unit_vector();
    let fb = fixed.aabb();
    let mb = moving.aabb();
    for t in params.samples(thinnest_extent(fixed, moving)) {
        // Once the moving box has passed the fixed one along the sweep, it stays clear.
        let passed = if sign > 0.0 {
            mb.min[axis] + t >= fb.max[axis]
        } else {
            mb.max[axis] - t <= fb.min[axis]
        };
        if passed {
            return true;
        }
        if query::intersects_offset(fixed, moving, &(u * t)) {
            return false;
        }
    }
    true
}

/// `M_j` over all parts of the assembly.
pub fn compute_interference_free_matrix(
    assembly: &AssemblyModel,
    dir: Direction,
    params: &SweepParams,
) -> BoolMatrix {
    let idx: Vec<usize> = (0..assembly.len()).collect();
    free_matrix_for(assembly, &idx, dir, params)
}

fn free_matrix_for(
    assembly: &AssemblyModel,
    idx: &[usize],
    dir: Direction,
    params: &SweepParams,
) -> BoolMatrix {
    BoolMatrix::from_fn(idx.len(), |a, b| {
        a != b && sweep_is_free(assembly, idx[a], idx[b], dir, params)
    })
}

/// Contact, interference-free and reachable matrices over named entities.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationMatrices {
    entity_ids: Vec<String>,
    contact: BoolMatrix,
    free: [BoolMatrix; 6],
    reachable: [BoolMatrix; 6],
}

impl RelationMatrices {
    /// Assembles the matrices and derives `W_j`.
    pub fn new(
        entity_ids: Vec<String>,
        contact: BoolMatrix,
        free: [BoolMatrix; 6],
    ) -> Result<Self> {
        let n = entity_ids.len();
        if contact.dim() != n {
            return Err(Error::DimensionMismatch(contact.dim(), n));
        }
        let mut reachable: [BoolMatrix; 6] = core::array::from_fn(|_| BoolMatrix::zeros(n));
        for d in Direction::ALL {
            reachable[d.index()] = compute_reachable_matrix(&contact, &free[d.index()])?;
        }
        Ok(Self {
            entity_ids,
            contact,
            free,
            reachable,
        })
    }

    /// All matrices over every part of the assembly, keyed by part id.
    pub fn compute(assembly: &AssemblyModel, params: &SweepParams) -> Result<Self> {
        let idx: Vec<usize> = (0..assembly.len()).collect();
        Self::compute_for(assembly, &idx, params)
    }

    /// Matrices restricted to the parts at `indices`, in that order.
    pub fn compute_for(
        assembly: &AssemblyModel,
        indices: &[usize],
        params: &SweepParams,
    ) -> Result<Self> {
        params.validate(assembly)?;
        let ids = indices
            .iter()
            .map(|&i| assembly.parts()[i].id().to_string())
            .collect();
        let contact = contact_matrix_for(assembly, indices);
        let free = Direction::ALL.map(|d| free_matrix_for(assembly, indices, d, params));
        Self::new(ids, contact, free)
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.entity_ids.iter().position(|e| e == id)
    }

    pub fn contact(&self) -> &BoolMatrix {
        &self.contact
    }

    pub fn free(&self, d: Direction) -> &BoolMatrix {
        &self.free[d.index()]
    }

    pub fn reachable(&self, d: Direction) -> &BoolMatrix {
        &self.reachable[d.index()]
    }

    /// `A(i, k)`: the six `W_j(i, k)` flags.
    pub fn reachable_direction_list(&self, i: &str, k: &str) -> Result<ReachableDirectionList> {
        let a = self
            .index_of(i)
            .ok_or_else(|| Error::UnknownEntity(i.to_string()))?;
        let b = self
            .index_of(k)
            .ok_or_else(|| Error::UnknownEntity(k.to_string()))?;
        if a == b {
            return Err(Error::InvalidSequence(alloc::format!(
                "reachable directions of '{i}' relative to itself"
            )));
        }
        Ok(ReachableDirectionList::new(
            Direction::ALL.map(|d| self.reachable[d.index()].get(a, b)),
        ))
    }

    /// Replaces `members` by a single entity `new_id`, placed where the first
    /// member (in entity order) was.
    ///
    /// Contact aggregates by OR; interference freedom by AND, since a part
    /// moving relative to the merged entity has to clear every member.
    pub fn merge_entity(&self, members: &[&str], new_id: &str) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidSequence(
                "merge of an empty member set".into(),
            ));
        }
        let mut member_idx = Vec::new();
        for m in members {
            let i = self
                .index_of(m)
                .ok_or_else(|| Error::UnknownEntity((*m).to_string()))?;
            if !member_idx.contains(&i) {
                member_idx.push(i);
            }
        }
        let first = *member_idx.iter().min().expect("non-empty");
        if self
            .entity_ids
            .iter()
            .enumerate()
            .any(|(i, e)| e == new_id && !member_idx.contains(&i))
        {
            return Err(Error::InvalidSequence(alloc::format!(
                "entity '{new_id}' already exists"
            )));
        }

        // Each new entity maps to a list of old indices.
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut ids = Vec::new();
        for i in 0..self.entity_ids.len() {
            if i == first {
                groups.push(member_idx.clone());
                ids.push(new_id.to_string());
            } else if !member_idx.contains(&i) {
                groups.push(alloc::vec![i]);
                ids.push(self.entity_ids[i].clone());
            }
        }
        let n = groups.len();
        let contact = BoolMatrix::from_fn(n, |a, b| {
            a != b
                && groups[a]
                    .iter()
                    .any(|&x| groups[b].iter().any(|&y| self.contact.get(x, y)))
        });
        let free = Direction::ALL.map(|d| {
            let m = &self.free[d.index()];
            BoolMatrix::from_fn(n, |a, b| {
                a != b
                    && groups[a]
                        .iter()
                        .all(|&x| groups[b].iter().all(|&y| m.get(x, y)))
            })
        });
        Self::new(ids, contact, free)
    }
}
