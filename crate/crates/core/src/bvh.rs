//! Binary bounding-volume hierarchy over mesh triangles.
//!
//! Built once per mesh by median splits on the longest centroid axis.
//! Queries pair two hierarchies, the second one optionally translated, so a
//! swept part never needs its tree rebuilt.

use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::mesh::{Aabb, Vec3};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    kind: NodeKind,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    /// Triangle indices in leaf order.
    order: Vec<u32>,
    tri_aabbs: Vec<Aabb>,
}

impl Bvh {
    pub fn build(tris: &[[Vec3; 3]]) -> Self {
        let tri_aabbs: Vec<Aabb> = tris.iter().map(|t| Aabb::from_points(t.iter())).collect();
        let centroids: Vec<Vec3> = tri_aabbs.iter().map(Aabb::center).collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::new();
        if !tris.is_empty() {
            build_node(
                &mut nodes,
                &mut order,
                0,
                tris.len(),
                &tri_aabbs,
                &centroids,
            );
        }
        Self {
            nodes,
            order,
            tri_aabbs,
        }
    }

    pub fn root_aabb(&self) -> Option<&Aabb> {
        self.nodes.first().map(|n| &n.aabb)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Visits every triangle pair `(i, j)` whose boxes overlap (closed test),
    /// with `other` translated by `offset`. Stops early on `Break`.
    pub fn for_each_overlapping_pair<B>(
        &self,
        other: &Bvh,
        offset: &Vec3,
        mut visit: impl FnMut(usize, usize) -> ControlFlow<B>,
    ) -> Option<B> {
        if self.nodes.is_empty() || other.nodes.is_empty() {
            return None;
        }
        let mut stack: Vec<(u32, u32)> = alloc::vec![(0, 0)];
        while let Some((a, b)) = stack.pop() {
            let na = &self.nodes[a as usize];
            let nb = &other.nodes[b as usize];
            if !na.aabb.overlaps(&nb.aabb.translated(offset)) {
                continue;
            }
            match (&na.kind, &nb.kind) {
                (
                    NodeKind::Leaf {
                        start: sa,
                        count: ca,
                    },
                    NodeKind::Leaf {
                        start: sb,
                        count: cb,
                    },
                ) => {
                    for &i in &self.order[*sa as usize..(*sa + *ca) as usize] {
                        let ba = &self.tri_aabbs[i as usize];
                        for &j in &other.order[*sb as usize..(*sb + *cb) as usize] {
                            if ba.overlaps(&other.tri_aabbs[j as usize].translated(offset)) {
                                if let ControlFlow::Break(r) = visit(i as usize, j as usize) {
                                    return Some(r);
                                }
                            }
                        }
                    }
                }
                (NodeKind::Inner { left, right }, NodeKind::Leaf { .. }) => {
                    stack.push((*right, b));
                    stack.push((*left, b));
                }
                (NodeKind::Leaf { .. }, NodeKind::Inner { left, right }) => {
                    stack.push((a, *right));
                    stack.push((a, *left));
                }
                (
                    NodeKind::Inner {
                        left: la,
                        right: ra,
                    },
                    NodeKind::Inner {
                        left: lb,
                        right: rb,
                    },
                ) => {
                    // Descend the larger box first.
                    if na.aabb.diagonal() >= nb.aabb.diagonal() {
                        stack.push((*ra, b));
                        stack.push((*la, b));
                    } else {
                        stack.push((a, *rb));
                        stack.push((a, *lb));
                    }
                }
            }
        }
        None
    }

    /// Branch-and-bound minimum of `pair_dist_sq(i, j)` over all triangle pairs,
    /// with `other` translated by `offset`.
    ///
    /// A pair is pruned only when its box distance exceeds the running best,
    /// so the minimum equals the exhaustive one.
    pub fn min_pair_distance_sq(
        &self,
        other: &Bvh,
        offset: &Vec3,
        mut pair_dist_sq: impl FnMut(usize, usize) -> f64,
    ) -> f64 {
        let mut best = f64::INFINITY;
        if self.nodes.is_empty() || other.nodes.is_empty() {
            return best;
        }
        let prune = |box_d: f64, best: f64| box_d > best * (1.0 + 1e-9);
        let mut stack: Vec<(u32, u32)> = alloc::vec![(0, 0)];
        while let Some((a, b)) = stack.pop() {
            let na = &self.nodes[a as usize];
            let nb = &other.nodes[b as usize];
            if prune(na.aabb.distance_sq(&nb.aabb.translated(offset)), best) {
                continue;
            }
            match (&na.kind, &nb.kind) {
                (
                    NodeKind::Leaf {
                        start: sa,
                        count: ca,
                    },
                    NodeKind::Leaf {
                        start: sb,
                        count: cb,
                    },
                ) => {
                    for &i in &self.order[*sa as usize..(*sa + *ca) as usize] {
                        let ba = &self.tri_aabbs[i as usize];
                        for &j in &other.order[*sb as usize..(*sb + *cb) as usize] {
                            let bb = other.tri_aabbs[j as usize].translated(offset);
                            if prune(ba.distance_sq(&bb), best) {
                                continue;
                            }
                            let d = pair_dist_sq(i as usize, j as usize);
                            if d < best {
                                best = d;
                            }
                        }
                    }
                }
                _ => {
                    let children: [(u32, u32); 2] = match (&na.kind, &nb.kind) {
                        (NodeKind::Inner { left, right }, NodeKind::Leaf { .. }) => {
                            [(*left, b), (*right, b)]
                        }
                        (NodeKind::Leaf { .. }, NodeKind::Inner { left, right }) => {
                            [(a, *left), (a, *right)]
                        }
                        (
                            NodeKind::Inner {
                                left: la,
                                right: ra,
                            },
                            NodeKind::Inner {
                                left: lb,
                                right: rb,
                            },
                        ) => {
                            if na.aabb.diagonal() >= nb.aabb.diagonal() {
                                [(*la, b), (*ra, b)]
                            } else {
                                [(a, *lb), (a, *rb)]
                            }
                        }
                        _ => unreachable!(),
                    };
                    let dist = |&(x, y): &(u32, u32)| {
                        self.nodes[x as usize]
                            .aabb
                            .distance_sq(&other.nodes[y as usize].aabb.translated(offset))
                    };
                    let (d0, d1) = (dist(&children[0]), dist(&children[1]));
                    // Push the farther pair first so the nearer one is explored first.
                    if d0 <= d1 {
                        stack.push(children[1]);
                        stack.push(children[0]);
                    } else {
                        stack.push(children[0]);
                        stack.push(children[1]);
                    }
                }
            }
        }
        best
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    order: &mut [u32],
    start: usize,
    end: usize,
    tri_aabbs: &[Aabb],
    centroids: &[Vec3],
) -> u32 {
    let slice = &mut order[start..end];
    let aabb = slice
        .iter()
        .fold(Aabb::empty(), |acc, &i| acc.union(&tri_aabbs[i as usize]));
    let index = nodes.len() as u32;
    nodes.push(Node {
        aabb,
        kind: NodeKind::Leaf {
            start: start as u32,
            count: (end - start) as u32,
        },
    });
    if end - start <= LEAF_SIZE {
        return index;
    }

    let cbox = Aabb::from_points(slice.iter().map(|&i| &centroids[i as usize]));
    let ext = cbox.extent();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    if ext[axis] <= 0.0 {
        return index;
    }
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });

    let left = build_node(nodes, order, start, start + mid, tri_aabbs, centroids);
    let right = build_node(nodes, order, start + mid, end, tri_aabbs, centroids);
    nodes[index as usize].kind = NodeKind::Inner { left, right };
    index
}
