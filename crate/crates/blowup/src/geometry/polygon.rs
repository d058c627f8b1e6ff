//! Simple polygons in the plane: validation, area, point and disk
//! queries, and pairwise intersection area via triangulation plus
//! Sutherland-Hodgman clipping. Orientation is normalized to
//! counterclockwise on construction; affine images renormalize, so a
//! reflection does not silently flip the sign of the area.

use crate::error::{Error, Result};

pub type Pt = [f64; 2];

fn sub(a: Pt, b: Pt) -> Pt {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

pub fn dist(a: Pt, b: Pt) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

fn shoelace(verts: &[Pt]) -> f64 {
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    acc / 2.0
}

fn dist_point_segment(p: Pt, a: Pt, b: Pt) -> f64 {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2;
    let t = t.clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Proper or improper intersection of two closed segments, excluding
/// contact at shared endpoints (callers skip adjacent edges).
fn segments_intersect(p1: Pt, p2: Pt, q1: Pt, q2: Pt) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |d: f64, a: Pt, b: Pt, p: Pt| {
        d == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
    };
    on(d1, q1, q2, p1) || on(d2, q1, q2, p2) || on(d3, p1, p2, q1) || on(d4, p1, p2, q2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    verts: Vec<Pt>,
}

impl Polygon {
    /// Validates: at least three finite vertices, nonzero area, simple
    /// boundary. Stores counterclockwise.
    pub fn new(verts: Vec<Pt>) -> Result<Self> {
        if verts.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs >= 3 vertices, got {}",
                verts.len()
            )));
        }
        if verts.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Geometry("non-finite vertex".into()));
        }
        let area = shoelace(&verts);
        let scale: f64 = verts
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(1.0, f64::max);
        if area.abs() <= 1e-12 * scale * scale {
            return Err(Error::Geometry("degenerate polygon: zero area".into()));
        }
        let mut verts = verts;
        if area < 0.0 {
            verts.reverse();
        }
        let n = verts.len();
        for i in 0..n {
            for j in (i + 1)..n {
                // Edges sharing a vertex may touch there and nowhere else;
                // the strict test below would flag the shared endpoint, so
                // skip adjacent pairs.
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(verts[i], verts[(i + 1) % n], verts[j], verts[(j + 1) % n]) {
                    return Err(Error::Geometry(format!(
                        "polygon is not simple: edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(Polygon { verts })
    }

    /// For images of an already validated polygon under an affine
    /// bijection, which preserve simplicity.
    pub(crate) fn from_simple_verts(mut verts: Vec<Pt>) -> Self {
        if shoelace(&verts) < 0.0 {
            verts.reverse();
        }
        Polygon { verts }
    }

    pub fn verts(&self) -> &[Pt] {
        &self.verts
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.verts)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.verts.len();
        (0..n)
            .map(|i| dist(self.verts[i], self.verts[(i + 1) % n]))
            .sum()
    }

    pub fn bbox(&self) -> (Pt, Pt) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.verts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    /// Largest vertex-to-vertex distance; for a polygon this is the
    /// diameter of the region.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.verts.len() {
            for j in (i + 1)..self.verts.len() {
                best = best.max(dist(self.verts[i], self.verts[j]));
            }
        }
        best
    }

    /// Area centroid.
    pub fn centroid(&self) -> Pt {
        let n = self.verts.len();
        let a = self.area();
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let p = self.verts[i];
            let q = self.verts[(i + 1) % n];
            let w = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (6.0 * a), cy / (6.0 * a)]
    }

    /// Ray-cast containment; points within `tol` of the boundary count
    /// as inside.
    pub fn contains(&self, p: Pt, tol: f64) -> bool {
        let n = self.verts.len();
        for i in 0..n {
            if dist_point_segment(p, self.verts[i], self.verts[(i + 1) % n]) <= tol {
                return true;
            }
        }
        let mut inside = false;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if x > p[0] {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Whether the region meets the closed disk of radius `r` at `c`.
    pub fn intersects_disk(&self, c: Pt, r: f64) -> bool {
        if self.contains(c, 0.0) {
            return true;
        }
        let n = self.verts.len();
        (0..n).any(|i| dist_point_segment(c, self.verts[i], self.verts[(i + 1) % n]) <= r)
    }

    pub fn map(&self, f: impl Fn(Pt) -> Pt) -> Polygon {
        Polygon::from_simple_verts(self.verts.iter().map(|&p| f(p)).collect())
    }

    /// Ear-clipping triangulation. The polygons in this crate have no
    /// collinear triples, but zero-area ears would only contribute zero
    /// to downstream area sums anyway.
    pub fn triangulate(&self) -> Vec<[Pt; 3]> {
        let mut idx: Vec<usize> = (0..self.verts.len()).collect();
        let mut tris = Vec::with_capacity(self.verts.len() - 2);
        let v = &self.verts;
        let eps = 1e-12 * self.diameter() * self.diameter();
        let mut stuck = 0usize;
        while idx.len() > 3 {
            let m = idx.len();
            let mut clipped = false;
            for cur in 0..m {
                let (ip, ic, inx) = (idx[(cur + m - 1) % m], idx[cur], idx[(cur + 1) % m]);
                if cross(v[ip], v[ic], v[inx]) <= eps {
                    continue;
                }
                // A vertex on the ear boundary blocks it too: clipping
                // such an ear leaves a pinched remainder that a later
                // ear can straddle. Some other ear is always clean.
                let ear_ok = idx.iter().all(|&other| {
                    if other == ip || other == ic || other == inx {
                        return true;
                    }
                    !point_touches_triangle(v[other], v[ip], v[ic], v[inx], eps)
                });
                if ear_ok {
                    tris.push([v[ip], v[ic], v[inx]]);
                    idx.remove(cur);
                    clipped = true;
                    break;
                }
            }
            if !clipped {
                // Numerically jammed; fall back to a fan, which is exact
                // for the convex remainder this can leave behind.
                stuck += 1;
                if stuck > 1 {
                    break;
                }
            }
        }
        if idx.len() >= 3 {
            for i in 1..idx.len() - 1 {
                tris.push([v[idx[0]], v[idx[i]], v[idx[i + 1]]]);
            }
        }
        tris
    }
}

fn point_touches_triangle(p: Pt, a: Pt, b: Pt, c: Pt, tol: f64) -> bool {
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    d1 >= -tol && d2 >= -tol && d3 >= -tol
}

/// Clips an arbitrary subject polygon against a convex clip polygon
/// (counterclockwise). Returns the clipped vertex chain, possibly empty.
pub fn convex_clip(subject: &[Pt], clip: &[Pt]) -> Vec<Pt> {
    let mut output: Vec<Pt> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if output.is_empty() {
            return output;
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        let input = std::mem::take(&mut output);
        let inside = |p: Pt| cross(a, b, p) >= 0.0;
        let n = input.len();
        for j in 0..n {
            let cur = input[j];
            let prev = input[(j + n - 1) % n];
            let cur_in = inside(cur);
            let prev_in = inside(prev);
            if cur_in {
                if !prev_in {
                    output.push(line_intersection(prev, cur, a, b));
                }
                output.push(cur);
            } else if prev_in {
                output.push(line_intersection(prev, cur, a, b));
            }
        }
    }
    output
}

fn line_intersection(p: Pt, q: Pt, a: Pt, b: Pt) -> Pt {
    let r = sub(q, p);
    let s = sub(b, a);
    let denom = r[0] * s[1] - r[1] * s[0];
    let t = ((a[0] - p[0]) * s[1] - (a[1] - p[1]) * s[0]) / denom;
    [p[0] + t * r[0], p[1] + t * r[1]]
}

/// Area of the intersection of two simple polygons, as the sum of
/// pairwise triangle-triangle clip areas over their triangulations.
pub fn intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    if alo[0] > bhi[0] || blo[0] > ahi[0] || alo[1] > bhi[1] || blo[1] > ahi[1] {
        return 0.0;
    }
    let ta = a.triangulate();
    let tb = b.triangulate();
    let mut acc = 0.0;
    for x in &ta {
        for y in &tb {
            let clipped = convex_clip(x, y);
            if clipped.len() >= 3 {
                acc += shoelace(&clipped).abs();
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn construction_normalizes_orientation() {
        let cw = Polygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(cw.area() > 0.0);
        assert_eq!(cw.area(), 1.0);
    }

    #[test]
    fn construction_rejects_degenerate_input() {
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        // Bowtie.
        assert!(
            Polygon::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err()
        );
    }

    #[test]
    fn area_perimeter_centroid() {
        let sq = unit_square();
        assert!((sq.area() - 1.0).abs() < 1e-15);
        assert!((sq.perimeter() - 4.0).abs() < 1e-15);
        let c = sq.centroid();
        assert!((c[0] - 0.5).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15);
        assert!((sq.diameter() - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn containment_and_disk_queries() {
        let sq = unit_square();
        assert!(sq.contains([0.5, 0.5], 0.0));
        assert!(!sq.contains([1.5, 0.5], 0.0));
        assert!(sq.contains([1.0 + 1e-9, 0.5], 1e-6));
        assert!(sq.intersects_disk([1.5, 0.5], 0.6));
        assert!(!sq.intersects_disk([1.5, 0.5], 0.4));
        assert!(sq.intersects_disk([0.5, 0.5], 0.01));
    }

    #[test]
    fn triangulation_covers_the_area() {
        // Non-convex L shape.
        let l = Polygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        let tris = l.triangulate();
        assert_eq!(tris.len(), 4);
        let total: f64 = tris.iter().map(|t| shoelace(t).abs()).sum();
        assert!((total - l.area()).abs() < 1e-12);
    }

    #[test]
    fn intersection_area_of_overlapping_squares() {
        let a = unit_square();
        let b = a.map(|p| [p[0] + 0.5, p[1] + 0.25]);
        assert!((intersection_area(&a, &b) - 0.375).abs() < 1e-12);
        assert!((intersection_area(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_area_of_edge_adjacent_squares_is_zero() {
        let a = unit_square();
        let b = a.map(|p| [p[0] + 1.0, p[1]]);
        assert!(intersection_area(&a, &b).abs() < 1e-12);
        let c = a.map(|p| [p[0] + 2.0, p[1]]);
        assert_eq!(intersection_area(&a, &c), 0.0);
    }

    #[test]
    fn intersection_area_agrees_with_monte_carlo() {
        // Deterministic low-discrepancy sampling as an independent check
        // on the clipping route.
        let a = Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]])
            .unwrap();
        let b = Polygon::new(vec![[0.5, 0.5], [2.5, 0.7], [1.5, 2.2]]).unwrap();
        let clipped = intersection_area(&a, &b);
        let n = 200_000;
        let mut hits = 0u32;
        // R2 sequence over the bbox of a.
        let (g1, g2) = (0.7548776662466927_f64, 0.5698402909980532_f64);
        for i in 0..n {
            let x = (g1 * i as f64).fract() * 2.0;
            let y = (g2 * i as f64).fract() * 2.0;
            if a.contains([x, y], 0.0) && b.contains([x, y], 0.0) {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64 * 4.0;
        assert!(
            (mc - clipped).abs() < 0.01,
            "clip {clipped} vs monte carlo {mc}"
        );
    }

    #[test]
    fn reflection_keeps_area_positive() {
        let sq = unit_square();
        let r = sq.map(|p| [-p[0], p[1]]);
        assert!((r.area() - 1.0).abs() < 1e-15);
    }
}
