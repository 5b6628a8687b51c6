//! Single-triangle geometry: closest points, intersection segments, solid angles.

use core::cmp::Ordering;

use crate::mesh::Vec3;

/// Plane-side classification snaps distances below this (mm) to zero.
pub(crate) const PLANE_TOLERANCE: f64 = 1e-10;

/// Signed solid angle subtended by `t` at `q` (Van Oosterom and Strackee).
/// Positive when `q` lies behind the triangle's front face.
pub(crate) fn solid_angle(t: &[Vec3; 3], q: &Vec3) -> f64 {
    let a = t[0] - q;
    let b = t[1] - q;
    let c = t[2] - q;
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(&b.cross(&c));
    let den = la * lb * lc + a.dot(&b) * lc + a.dot(&c) * lb + b.dot(&c) * la;
    2.0 * libm::atan2(num, den)
}

/// Möller-Trumbore ray/triangle hit distance along a unit direction.
pub(crate) fn ray_hit(origin: &Vec3, dir: &Vec3, t: &[Vec3; 3]) -> Option<f64> {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - t[0];
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    Some(e2.dot(&q) * inv)
}

/// Closest point on a closed triangle to `p`.
pub(crate) fn closest_point_on_triangle(p: &Vec3, t: &[Vec3; 3]) -> Vec3 {
    let (a, b, c) = (t[0], t[1], t[2]);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Squared distance between segments `p1q1` and `p2q2`.
pub(crate) fn segment_segment_dist_sq(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let eps = 1e-300;
    let (s, t);
    if a <= eps && e <= eps {
        return r.dot(&r);
    }
    if a <= eps {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= eps {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1 - c2).norm_squared()
}

/// Outcome of intersecting two closed triangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TriTri {
    Disjoint,
    /// Both triangles lie in one plane; overlap is not resolved.
    Coplanar,
    /// The closed triangles meet along this (possibly zero-length) segment.
    Segment(Vec3, Vec3),
}

fn unit_normal(t: &[Vec3; 3]) -> Option<Vec3> {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
    let len = n.norm();
    if len > 0.0 {
        Some(n / len)
    } else {
        None
    }
}

pub(crate) fn normal(t: &[Vec3; 3]) -> Vec3 {
    unit_normal(t).unwrap_or_else(Vec3::zeros)
}

fn plane_distances(t: &[Vec3; 3], n: &Vec3, origin: &Vec3) -> [f64; 3] {
    let mut d = [0.0; 3];
    for i in 0..3 {
        let v = n.dot(&(t[i] - origin));
        d[i] = if v.abs() <= PLANE_TOLERANCE { 0.0 } else { v };
    }
    d
}

fn same_strict_side(d: &[f64; 3]) -> bool {
    (d[0] > 0.0 && d[1] > 0.0 && d[2] > 0.0) || (d[0] < 0.0 && d[1] < 0.0 && d[2] < 0.0)
}

/// Intersection of two closed triangles.
pub(crate) fn intersect(t1: &[Vec3; 3], t2: &[Vec3; 3]) -> TriTri {
    let (n1, n2) = match (unit_normal(t1), unit_normal(t2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return TriTri::Disjoint,
    };
    let d1 = plane_distances(t1, &n2, &t2[0]);
    if same_strict_side(&d1) {
        return TriTri::Disjoint;
    }
    if d1 == [0.0; 3] {
        return TriTri::Coplanar;
    }
    let d2 = plane_distances(t2, &n1, &t1[0]);
    if same_strict_side(&d2) {
        return TriTri::Disjoint;
    }
    if d2 == [0.0; 3] {
        return TriTri::Coplanar;
    }

    // Cut t1 by the plane of t2.
    let mut pts: [Vec3; 4] = [Vec3::zeros(); 4];
    let mut count = 0;
    for i in 0..3 {
        let j = (i + 1) % 3;
        if d1[i] == 0.0 {
            pts[count] = t1[i];
            count += 1;
        }
        if (d1[i] > 0.0 && d1[j] < 0.0) || (d1[i] < 0.0 && d1[j] > 0.0) {
            let s = d1[i] / (d1[i] - d1[j]);
            pts[count] = t1[i] + (t1[j] - t1[i]) * s;
            count += 1;
        }
    }
    if count == 0 {
        return TriTri::Disjoint;
    }
    let (mut p, mut q) = (pts[0], pts[0]);
    let mut best = -1.0;
    for a in 0..count {
        for b in a..count {
            let d = (pts[a] - pts[b]).norm_squared();
            if d > best {
                best = d;
                p = pts[a];
                q = pts[b];
            }
        }
    }

    // Clip p..q against the edge half-planes of t2.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for k in 0..3 {
        let v = t2[k];
        let edge = t2[(k + 1) % 3] - v;
        let m = n2.cross(&edge);
        let len = m.norm();
        if len == 0.0 {
            return TriTri::Disjoint;
        }
        let m = m / len;
        let f0 = m.dot(&(p - v)) + PLANE_TOLERANCE;
        let df = m.dot(&(q - p));
        if df == 0.0 {
            if f0 < 0.0 {
                return TriTri::Disjoint;
            }
        } else {
            let t = -f0 / df;
            if df > 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
        if lo > hi {
            return TriTri::Disjoint;
        }
    }
    TriTri::Segment(p + (q - p) * lo, p + (q - p) * hi)
}

fn lex_cmp(a: &[Vec3; 3], b: &[Vec3; 3]) -> Ordering {
    for i in 0..3 {
        for k in 0..3 {
            match a[i][k].total_cmp(&b[i][k]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
    }
    Ordering::Equal
}

/// Squared distance between two closed triangles; 0 when they meet.
///
/// Arguments are put in a canonical order first, so the result does not
/// depend on which triangle is passed first.
pub(crate) fn triangle_distance_sq(t1: &[Vec3; 3], t2: &[Vec3; 3]) -> f64 {
    if lex_cmp(t1, t2) == Ordering::Greater {
        return distance_sq_ordered(t2, t1);
    }
    distance_sq_ordered(t1, t2)
}

fn distance_sq_ordered(t1: &[Vec3; 3], t2: &[Vec3; 3]) -> f64 {
    if let TriTri::Segment(..) = intersect(t1, t2) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for v in t1 {
        best = best.min((closest_point_on_triangle(v, t2) - v).norm_squared());
    }
    for v in t2 {
        best = best.min((closest_point_on_triangle(v, t1) - v).norm_squared());
    }
    for i in 0..3 {
        for j in 0..3 {
            let d = segment_segment_dist_sq(&t1[i], &t1[(i + 1) % 3], &t2[j], &t2[(j + 1) % 3]);
            best = best.min(d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn crossing_triangles_meet_in_segment() {
        let a = [v(0.0, 0.0, 0.0), v(2.0, 0.0, 0.0), v(0.0, 2.0, 0.0)];
        let b = [v(0.5, 0.5, -1.0), v(0.5, 0.5, 1.0), v(1.5, -1.0, 0.0)];
        match intersect(&a, &b) {
            TriTri::Segment(p, q) => {
                assert!(p.z.abs() < 1e-12 && q.z.abs() < 1e-12);
                assert!((p - q).norm() > 0.1);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(triangle_distance_sq(&a, &b), 0.0);
    }

    #[test]
    fn parallel_gap_distance() {
        let a = [v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)];
        let b = [v(0.0, 0.0, 2.0), v(1.0, 0.0, 2.0), v(0.0, 1.0, 2.0)];
        assert_eq!(intersect(&a, &b), TriTri::Disjoint);
        assert_eq!(triangle_distance_sq(&a, &b), 4.0);
        assert_eq!(triangle_distance_sq(&b, &a), 4.0);
    }

    #[test]
    fn coplanar_is_reported() {
        let a = [v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)];
        let b = [v(0.2, 0.2, 0.0), v(1.0, 0.2, 0.0), v(0.2, 1.0, 0.0)];
        assert_eq!(intersect(&a, &b), TriTri::Coplanar);
        assert!(triangle_distance_sq(&a, &b) < 1e-24);
    }

    #[test]
    fn edge_to_edge_skew_distance() {
        let a = [v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.5, -1.0, 0.0)];
        let b = [v(0.5, 0.5, 1.0), v(0.5, -0.5, 1.0), v(0.5, 0.0, 2.0)];
        let d = triangle_distance_sq(&a, &b);
        assert!((d - 1.0).abs() < 1e-12, "{d}");
    }

    #[test]
    fn solid_angles_of_closed_box_sum_to_full_sphere() {
        let cube = crate::fixtures::unit_cube();
        let inside: f64 = cube
            .triangle_iter()
            .map(|t| solid_angle(&t, &v(0.3, 0.6, 0.2)))
            .sum();
        let outside: f64 = cube
            .triangle_iter()
            .map(|t| solid_angle(&t, &v(1.3, 0.6, 0.2)))
            .sum();
        assert!((inside - 4.0 * core::f64::consts::PI).abs() < 1e-12);
        assert!(outside.abs() < 1e-12);
    }

    #[test]
    fn closest_point_regions() {
        let t = [v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)];
        assert_eq!(
            closest_point_on_triangle(&v(-1.0, -1.0, 0.0), &t),
            v(0.0, 0.0, 0.0)
        );
        assert_eq!(
            closest_point_on_triangle(&v(0.25, 0.25, 3.0), &t),
            v(0.25, 0.25, 0.0)
        );
        let e = closest_point_on_triangle(&v(0.5, -2.0, 0.0), &t);
        assert!((e - v(0.5, 0.0, 0.0)).norm() < 1e-15);
    }
}
