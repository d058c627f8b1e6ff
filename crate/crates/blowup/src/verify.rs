//! Quantitative audits on tilings: pairwise overlap measurement, the
//! self-similarity decomposition check, quasiperiodicity probes,
//! the injectivity precondition on single-letter blow-ups, and a
//! compact pseudometric comparing two tilings near the origin.
//!
//! Every verdict here is numeric and bounded: overlap areas against an
//! explicit threshold, transform matches against `MATCH_TOL`, searches
//! within the candidate sets actually enumerated. None of it is a
//! proof and the reports say so where it matters.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::algebra::{common_tiles, sym_sort_key, SearchBounds};
use crate::error::{Error, Result};
use crate::geometry::{
    attractor, dist, intersection_area, neg_word_map, polygon_symmetries, word_map, AttractorGeom,
    IfsSpec, Polygon, Pt, Similitude, MATCH_TOL,
};
use crate::par;
use crate::symbolic::{e_weight, omega_level_capped, AbsoluteAddress, Letter, Word};
use crate::tiling::{pi_prefix, Tile, Tiling, TransformIndex};

/// Relative slack allowed when comparing a covered area against the
/// area of a support intersection.
const COVER_REL_TOL: f64 = 1e-6;

/// Outcome of measuring every pairwise tile overlap in a tiling.
#[derive(Clone, Debug)]
pub struct OverlapReport {
    pub pass: bool,
    /// Largest pairwise intersection area found (polygon mode).
    pub max_overlap: f64,
    /// Absolute threshold the overlaps were compared against:
    /// `1e-9 * area(A) * s^{2 a_max}`, a fixed fraction of the smallest
    /// prototile area.
    pub threshold: f64,
    pub worst_pair: Option<(AbsoluteAddress, AbsoluteAddress)>,
    pub pairs_examined: usize,
    /// Point-cloud attractors only admit a separation estimate, never
    /// an area measurement; `false` marks the verdict as an estimate.
    pub authoritative: bool,
    /// Smallest distance between distinct tile clouds (point-cloud mode).
    pub min_separation: Option<f64>,
}

/// Measures every pairwise overlap of tile interiors. With the polygon
/// model this clips tile against tile and compares the worst area to a
/// threshold well below the smallest prototile; with a point cloud it
/// falls back to a nearest-point separation estimate between clouds and
/// reports itself non-authoritative.
pub fn nonoverlap_check(t: &Tiling) -> Result<OverlapReport> {
    let spec = t.spec();
    let s = spec.s();
    if t.is_empty() {
        return Err(Error::Precondition("empty tiling has nothing to check".into()));
    }
    if spec.is_polygon_model() {
        let a = spec.attractor_polygon()?;
        let threshold = 1e-9 * a.area() * s.powi(2 * spec.a_max() as i32);
        let polys: Vec<Polygon> = t
            .tiles()
            .iter()
            .map(|tile| tile.polygon(spec))
            .collect::<Result<_>>()?;
        let boxes: Vec<(Pt, Pt)> = polys.iter().map(|p| p.bbox()).collect();
        let n = polys.len();
        // Row i scans j > i; each row reports its own worst pair so the
        // reduction order is fixed regardless of thread count.
        let rows = par::map_range(n, |i| {
            let mut worst = (0.0f64, usize::MAX);
            let (lo_i, hi_i) = boxes[i];
            for j in (i + 1)..n {
                let (lo_j, hi_j) = boxes[j];
                if lo_i[0] > hi_j[0] || lo_j[0] > hi_i[0] || lo_i[1] > hi_j[1] || lo_j[1] > hi_i[1]
                {
                    continue;
                }
                let area = intersection_area(&polys[i], &polys[j]);
                if area > worst.0 {
                    worst = (area, j);
                }
            }
            worst
        });
        let mut max_overlap = 0.0f64;
        let mut worst_pair = None;
        for (i, (area, j)) in rows.into_iter().enumerate() {
            if j != usize::MAX && area > max_overlap {
                max_overlap = area;
                worst_pair = Some((
                    t.tiles()[i].address().clone(),
                    t.tiles()[j].address().clone(),
                ));
            }
        }
        Ok(OverlapReport {
            pass: max_overlap <= threshold,
            max_overlap,
            threshold,
            worst_pair,
            pairs_examined: n * (n - 1) / 2,
            authoritative: true,
            min_separation: None,
        })
    } else {
        let cloud = match attractor(spec, None)? {
            AttractorGeom::Points(pts) => pts,
            AttractorGeom::Polygon(_) => unreachable!("non-polygon model"),
        };
        // Subsample the cloud with a fixed stride so the pairwise scan
        // stays quadratic in a small constant.
        let stride = cloud.len().div_ceil(128).max(1);
        let base: Vec<Pt> = cloud
            .iter()
            .step_by(stride)
            .map(|v| [v[0], v[1]])
            .collect();
        let tiles: Vec<Vec<Pt>> = par::map_collect(t.tiles(), |tile| {
            base.iter()
                .map(|&p| tile.transform().apply_pt(s, p))
                .collect()
        });
        let n = tiles.len();
        let rows = par::map_range(n, |i| {
            let mut best = (f64::INFINITY, usize::MAX);
            for j in (i + 1)..n {
                let mut sep = f64::INFINITY;
                for &p in &tiles[i] {
                    for &q in &tiles[j] {
                        let d = dist(p, q);
                        if d < sep {
                            sep = d;
                        }
                    }
                }
                if sep < best.0 {
                    best = (sep, j);
                }
            }
            best
        });
        let mut min_sep = f64::INFINITY;
        let mut worst_pair = None;
        for (i, (sep, j)) in rows.into_iter().enumerate() {
            if j != usize::MAX && sep < min_sep {
                min_sep = sep;
                worst_pair = Some((
                    t.tiles()[i].address().clone(),
                    t.tiles()[j].address().clone(),
                ));
            }
        }
        Ok(OverlapReport {
            pass: n < 2 || min_sep > 0.0,
            max_overlap: 0.0,
            threshold: 0.0,
            worst_pair,
            pairs_examined: n * (n - 1) / 2,
            authoritative: false,
            min_separation: (n >= 2).then_some(min_sep),
        })
    }
}

/// Outcome of checking that `psi = f_{-alpha} f_{-beta} (f_{-alpha})^{-1}`
/// maps tiles onto unions of tiles between two aligned truncations of
/// `pi(alpha beta beta ...)`.
#[derive(Clone, Debug)]
pub struct SelfSimilarityReport {
    pub ok: bool,
    pub psi: Similitude,
    /// Prefix length actually audited (aligned to `|alpha| + j |beta|`).
    pub prefix_len: usize,
    /// The larger prefix length the images were resolved in.
    pub target_prefix_len: usize,
    pub core_tiles: usize,
    /// Per-tile decomposition: source address and the addresses its
    /// image splits into within the larger truncation.
    pub mapping: Vec<(AbsoluteAddress, Vec<AbsoluteAddress>)>,
    /// Sources whose image failed to resolve into tiles.
    pub failures: Vec<AbsoluteAddress>,
}

/// Audits the self-similarity of `pi(theta)` for the eventually periodic
/// `theta = alpha beta beta ...`. The candidate similitude is
/// `psi = f_{-alpha} f_{-beta} (f_{-alpha})^{-1}`; for every tile in a
/// core sub-window of `pi(theta|K)` (with `K` the largest aligned prefix
/// length at most `k`) the image `psi(tile)` must equal a union of tiles
/// of `pi(theta|K + |beta|)`, verified transform by transform.
///
/// The split of a tile with relative word `sigma` is `sigma Omega_m`
/// with `m = e(theta|K') - e(sigma)` when `m >= 0`; when `e(sigma)`
/// already exceeds `e(theta|K')` the image is the single tile `sigma`
/// again. Both cases reduce to exact word arithmetic, so the numeric
/// check is purely a transform comparison.
pub fn self_similarity_check(
    alpha: &Word,
    beta: &Word,
    k: usize,
    spec: &Arc<IfsSpec>,
) -> Result<SelfSimilarityReport> {
    if beta.is_empty() {
        return Err(Error::Precondition("period beta must be nonempty".into()));
    }
    alpha.validate_for(spec.pv())?;
    beta.validate_for(spec.pv())?;
    if !spec.is_polygon_model() {
        return Err(Error::Inconclusive(
            "self-similarity audit bounds its core window with the polygon model".into(),
        ));
    }
    let s = spec.s();
    if k < alpha.len() + beta.len() {
        return Err(Error::Precondition(format!(
            "window too small: prefix length {k} cannot fit alpha plus one period"
        )));
    }
    let j = (k - alpha.len()) / beta.len();
    let mut theta = alpha.clone();
    for _ in 0..j {
        theta = theta.concat(beta);
    }
    let e0 = e_weight(&theta, spec.pv())?;
    let e_ab = e_weight(alpha, spec.pv())? + e_weight(beta, spec.pv())?;
    if e0 < e_ab + spec.a_max() {
        return Err(Error::Precondition(format!(
            "window too small: e(theta|{}) = {e0} is below e(alpha beta) + a_max = {}",
            theta.len(),
            e_ab + spec.a_max()
        )));
    }
    let theta_big = theta.concat(beta);
    let e1 = e_weight(&theta_big, spec.pv())?;

    let f_na = neg_word_map(alpha, spec)?;
    let f_nb = neg_word_map(beta, spec)?;
    let psi = f_na.compose(&f_nb, s)?.compose(&f_na.inverse(s), s)?;

    let t_small = pi_prefix(&theta, spec)?;
    let t_big = pi_prefix(&theta_big, spec)?;
    let (center, radius) = t_small.core_window()?;
    let core = t_small.patch(center, radius)?;
    if core.is_empty() {
        return Err(Error::Precondition("core window contains no tiles".into()));
    }

    let mut rel_index: HashMap<Word, usize> = HashMap::with_capacity(t_big.len());
    for (i, tile) in t_big.tiles().iter().enumerate() {
        rel_index.insert(tile.rel_word().clone(), i);
    }
    // The split levels m occurring among core tiles; realize each
    // Omega_m with its maps once, before the parallel pass.
    let mut splits: BTreeMap<u32, Vec<(Word, Similitude)>> = BTreeMap::new();
    for &c in &core {
        let e_sig = e_weight(t_small.tiles()[c].rel_word(), spec.pv())?;
        if e_sig <= e1 {
            splits.entry(e1 - e_sig).or_default();
        }
    }
    for (&m, entry) in splits.iter_mut() {
        let words = omega_level_capped(m, spec.pv(), spec.max_level())?;
        for w in words {
            let g = word_map(&w, spec)?;
            entry.push((w, g));
        }
    }

    type Row = (AbsoluteAddress, Vec<AbsoluteAddress>);
    let outcomes = par::map_collect(&core, |&c| -> Result<(Option<Row>, Option<AbsoluteAddress>)> {
        let tile = &t_small.tiles()[c];
        let sigma = tile.rel_word();
        let e_sig = e_weight(sigma, spec.pv())?;
        let base = psi.compose(tile.transform(), s)?;
        let mut children: Vec<AbsoluteAddress> = Vec::new();
        let mut check = |rel: Word, expected: &Similitude| -> bool {
            match rel_index.get(&rel) {
                Some(&i) => {
                    let found = &t_big.tiles()[i];
                    if found.transform().approx_eq(expected, MATCH_TOL) {
                        children.push(found.address().clone());
                        true
                    } else {
                        false
                    }
                }
                None => false,
            }
        };
        let ok = if e_sig > e1 {
            check(sigma.clone(), &base)
        } else {
            let mut all = true;
            for (w, g) in &splits[&(e1 - e_sig)] {
                let expected = base.compose(g, s)?;
                if !check(sigma.concat(w), &expected) {
                    all = false;
                    break;
                }
            }
            all
        };
        if ok {
            Ok((Some((tile.address().clone(), children)), None))
        } else {
            Ok((None, Some(tile.address().clone())))
        }
    });
    let mut mapping = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        let (row, fail) = outcome?;
        if let Some(r) = row {
            mapping.push(r);
        }
        if let Some(f) = fail {
            failures.push(f);
        }
    }
    Ok(SelfSimilarityReport {
        ok: failures.is_empty(),
        psi,
        prefix_len: theta.len(),
        target_prefix_len: theta_big.len(),
        core_tiles: core.len(),
        mapping,
        failures,
    })
}

/// Outcome of searching a tiling for isometric copies of a patch.
#[derive(Clone, Debug)]
pub struct QuasiperiodicityReport {
    /// Isometries mapping the patch onto tiles of the searched tiling,
    /// sorted parameter-wise.
    pub copies: Vec<Similitude>,
    /// Smallest radius, over sampled centers in the core window, such
    /// that the ball around every center contains a full copy. `None`
    /// when no copy exists at all.
    pub covering_radius: Option<f64>,
    pub window_center: Pt,
    pub window_radius: f64,
    pub centers_sampled: usize,
}

/// Finds all isometric copies of the patch inside `t` by transform
/// matching (anchor tile against every tile of the same prototile,
/// composed with each attractor self-map) and estimates the covering
/// radius: the max over sampled core-window centers of the distance
/// needed to reach the nearest complete copy. Centers are sampled on a
/// fixed grid, so the radius is a deterministic upper-bound estimate,
/// not an exact infimum.
pub fn quasiperiodicity_probe(patch: &[Tile], t: &Tiling) -> Result<QuasiperiodicityReport> {
    let spec = t.spec();
    let s = spec.s();
    if patch.is_empty() {
        return Err(Error::Precondition("patch must contain at least one tile".into()));
    }
    if !spec.is_polygon_model() {
        return Err(Error::Inconclusive(
            "copy search enumerates candidates through the polygon model".into(),
        ));
    }
    let bounds = SearchBounds::default();
    let syms = polygon_symmetries(spec.attractor_polygon()?);
    let anchor = &patch[0];
    let anchor_inv = anchor.transform().inverse(s);
    let mut candidates: Vec<Similitude> = Vec::new();
    for v in t.tiles() {
        if v.proto_index() != anchor.proto_index() {
            continue;
        }
        for sym in &syms {
            if candidates.len() >= bounds.max_candidates {
                return Err(Error::Precondition(format!(
                    "candidate budget {} exceeded",
                    bounds.max_candidates
                )));
            }
            candidates.push(v.transform().compose(sym, s)?.compose(&anchor_inv, s)?);
        }
    }
    let index = TransformIndex::build(t, bounds.tol);
    let verdicts = par::map_collect(&candidates, |e| -> Result<bool> {
        for p in patch {
            if index.lookup(&e.compose(p.transform(), s)?).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    let mut copies: Vec<Similitude> = Vec::new();
    for (e, ok) in candidates.into_iter().zip(verdicts) {
        if ok? && !copies.iter().any(|x| x.approx_eq(&e, bounds.tol)) {
            copies.push(e);
        }
    }
    copies.sort_by(|a, b| {
        sym_sort_key(a)
            .partial_cmp(&sym_sort_key(b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let (center, radius) = t.core_window()?;
    let patch_verts: Vec<Pt> = {
        let mut verts = Vec::new();
        for p in patch {
            verts.extend_from_slice(p.polygon(spec)?.verts());
        }
        verts
    };
    let corner_sets: Vec<Vec<Pt>> = copies
        .iter()
        .map(|e| patch_verts.iter().map(|&v| e.apply_pt(s, v)).collect())
        .collect();
    const GRID: usize = 12;
    let mut centers: Vec<Pt> = Vec::new();
    for gx in 0..=GRID {
        for gy in 0..=GRID {
            let x = center[0] - radius + 2.0 * radius * gx as f64 / GRID as f64;
            let y = center[1] - radius + 2.0 * radius * gy as f64 / GRID as f64;
            if dist([x, y], center) <= radius {
                centers.push([x, y]);
            }
        }
    }
    let covering_radius = if corner_sets.is_empty() {
        None
    } else {
        let reaches = par::map_collect(&centers, |&x| {
            corner_sets
                .iter()
                .map(|corners| {
                    corners
                        .iter()
                        .map(|&c| dist(c, x))
                        .fold(0.0f64, f64::max)
                })
                .fold(f64::INFINITY, f64::min)
        });
        Some(reaches.into_iter().fold(0.0f64, f64::max))
    };
    Ok(QuasiperiodicityReport {
        copies,
        covering_radius,
        window_center: center,
        window_radius: radius,
        centers_sampled: centers.len(),
    })
}

/// Overlap bookkeeping for one pair of single-letter blow-ups.
#[derive(Clone, Debug)]
pub struct PairOverlap {
    pub i: Letter,
    pub j: Letter,
    pub common_count: usize,
    pub covered_area: f64,
    pub intersection_area: f64,
    /// Fraction of the support intersection not covered by common
    /// tiles; positive means the pair does not tile its overlap.
    pub uncovered_fraction: f64,
    pub tiles_intersection: bool,
}

/// Outcome of the injectivity precondition over all letter pairs.
#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub holds: bool,
    pub pairs: Vec<PairOverlap>,
}

/// Order-insensitive tile multiset equality by sorted transform
/// parameters. Unlike an index-based bijection this tolerates exactly
/// coincident tiles, which degenerate systems produce.
type TileKey = (i32, (f64, f64, f64, f64, f64, f64));

fn same_tile_multiset(a: &Tiling, b: &Tiling, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let keys = |t: &Tiling| -> Vec<TileKey> {
        let mut v: Vec<_> = t
            .tiles()
            .iter()
            .map(|tile| (tile.transform().power(), sym_sort_key(tile.transform())))
            .collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        v
    };
    let (ka, kb) = (keys(a), keys(b));
    ka.iter().zip(&kb).all(|(x, y)| {
        let (xa, xb) = (x.1, y.1);
        x.0 == y.0
            && (xa.0 - xb.0).abs() <= tol
            && (xa.1 - xb.1).abs() <= tol
            && (xa.2 - xb.2).abs() <= tol
            && (xa.3 - xb.3).abs() <= tol
            && (xa.4 - xb.4).abs() <= tol
            && (xa.5 - xb.5).abs() <= tol
    })
}

/// For every pair of distinct letters, checks whether the common tiles
/// of `pi(i)` and `pi(j)` tile the intersection of their supports. The
/// precondition for injectivity of the blow-up construction holds when
/// they never do: each pair must leave a positive uncovered fraction.
/// Identical tilings tile their intersection trivially and are detected
/// as multisets before any area arithmetic.
pub fn injectivity_precondition(spec: &Arc<IfsSpec>) -> Result<InjectivityReport> {
    if !spec.is_polygon_model() {
        return Err(Error::Inconclusive(
            "support intersections need the polygon model".into(),
        ));
    }
    let s = spec.s();
    let id = Similitude::identity(spec.dim());
    let mut pairs = Vec::new();
    for i in 1..=spec.n() as Letter {
        for j in (i + 1)..=spec.n() as Letter {
            let a = pi_prefix(&Word::single(i), spec)?;
            let b = pi_prefix(&Word::single(j), spec)?;
            let common = common_tiles(&a, &b, &id, MATCH_TOL)?;
            let mut seen: Vec<usize> = common.iter().map(|&(v, _)| v).collect();
            seen.sort_unstable();
            seen.dedup();
            let covered: f64 = seen
                .iter()
                .map(|&v| a.tiles()[v].polygon(spec).map(|p| p.area()))
                .sum::<Result<f64>>()?;
            let sup_a = a.support_polygon()?;
            let sup_b = b.support_polygon()?.map(|p| id.apply_pt(s, p));
            let inter = intersection_area(&sup_a, &sup_b);
            let identical = same_tile_multiset(&a, &b, MATCH_TOL);
            let (uncovered_fraction, tiles_intersection) = if identical {
                (0.0, true)
            } else if inter > 0.0 {
                let frac = ((inter - covered) / inter).max(0.0);
                (frac, (covered - inter).abs() <= COVER_REL_TOL * inter)
            } else {
                (1.0, false)
            };
            pairs.push(PairOverlap {
                i,
                j,
                common_count: common.len(),
                covered_area: covered,
                intersection_area: inter,
                uncovered_fraction,
                tiles_intersection,
            });
        }
    }
    Ok(InjectivityReport {
        holds: pairs.iter().all(|p| !p.tiles_intersection),
        pairs,
    })
}

/// Inverse stereographic projection onto the unit sphere tangent to the
/// plane at the origin. Bounded sets far from the origin project near
/// the top of the sphere, which is what makes the comparison of
/// unbounded tilings meaningful near the origin.
fn project_to_sphere(p: Pt) -> [f64; 3] {
    let d = p[0] * p[0] + p[1] * p[1];
    [4.0 * p[0] / (d + 4.0), 4.0 * p[1] / (d + 4.0), 2.0 - 8.0 / (d + 4.0)]
}

fn geodesic(u: [f64; 3], v: [f64; 3]) -> f64 {
    // Vectors from the sphere center (0, 0, 1) are unit by construction.
    // The chord form of the angle is exact at zero, where the direct
    // arccos of a dot product loses half the mantissa.
    let dx = u[0] - v[0];
    let dy = u[1] - v[1];
    let dz = u[2] - v[2];
    let half_chord = 0.5 * (dx * dx + dy * dy + dz * dz).sqrt();
    2.0 * half_chord.clamp(-1.0, 1.0).asin()
}

/// Deterministic boundary sample of every tile, proportional to
/// perimeter: tile boundaries carry the identity of a tiling, interiors
/// do not distinguish refinements.
fn boundary_points(t: &Tiling, samples: usize) -> Result<Vec<Pt>> {
    let spec = t.spec();
    let polys: Vec<Polygon> = t
        .tiles()
        .iter()
        .map(|tile| tile.polygon(spec))
        .collect::<Result<_>>()?;
    let total: f64 = polys.iter().map(|p| p.perimeter()).sum();
    if total <= 0.0 {
        return Err(Error::Precondition("degenerate tiling boundary".into()));
    }
    let mut out = Vec::with_capacity(samples + polys.len() * 2);
    for poly in &polys {
        let perim = poly.perimeter();
        let n = ((samples as f64 * perim / total).round() as usize).max(2);
        let step = perim / n as f64;
        let verts = poly.verts();
        let m = verts.len();
        let mut edge = 0usize;
        let mut edge_start = 0.0f64;
        let mut edge_len = dist(verts[0], verts[1 % m]);
        for i in 0..n {
            let target = i as f64 * step;
            while target > edge_start + edge_len && edge + 1 < m {
                edge_start += edge_len;
                edge += 1;
                edge_len = dist(verts[edge], verts[(edge + 1) % m]);
            }
            let frac = if edge_len > 0.0 {
                ((target - edge_start) / edge_len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let a = verts[edge];
            let b = verts[(edge + 1) % m];
            out.push([a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1])]);
        }
    }
    Ok(out)
}

/// Symmetric Hausdorff distance between the projected boundary samples
/// of two planar tilings, measured along geodesics of the tangent
/// sphere. Identical tilings give exactly zero; refining the sample
/// count changes the value by at most the sample spacing, since the
/// projection contracts planar distances.
pub fn tiling_distance(t1: &Tiling, t2: &Tiling, samples: usize) -> Result<f64> {
    if t1.spec().dim() != 2 || t2.spec().dim() != 2 {
        return Err(Error::Precondition("the tiling metric is planar only".into()));
    }
    if samples < 100 {
        return Err(Error::Precondition(format!(
            "sample budget {samples} is below the floor of 100"
        )));
    }
    if t1.is_empty() || t2.is_empty() {
        return Err(Error::Precondition("cannot measure an empty tiling".into()));
    }
    let a: Vec<[f64; 3]> = boundary_points(t1, samples)?
        .into_iter()
        .map(project_to_sphere)
        .collect();
    let b: Vec<[f64; 3]> = boundary_points(t2, samples)?
        .into_iter()
        .map(project_to_sphere)
        .collect();
    let one_sided = |from: &[[f64; 3]], to: &[[f64; 3]]| -> f64 {
        let mins = par::map_collect(from, |&u| {
            to.iter().map(|&v| geodesic(u, v)).fold(f64::INFINITY, f64::min)
        });
        mins.into_iter().fold(0.0f64, f64::max)
    };
    Ok(one_sided(&a, &b).max(one_sided(&b, &a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::presets;
    use crate::symbolic::Letter;
    use crate::tiling::{canonical_tiling, Provenance};

    fn golden() -> Arc<IfsSpec> {
        presets::goldenb()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_golden_tilings_have_no_overlap() {
        let spec = golden();
        for k in [0u32, 3, 5] {
            let t = canonical_tiling(k, &spec).unwrap();
            let report = nonoverlap_check(&t).unwrap();
            assert!(report.pass, "T_{k} overlaps: {:?}", report.worst_pair);
            assert!(report.authoritative);
            assert!(report.max_overlap <= report.threshold);
        }
    }

    #[test]
    fn nonoverlap_flags_a_shifted_duplicate() {
        let spec = golden();
        let t = canonical_tiling(2, &spec).unwrap();
        let mut tiles: Vec<Tile> = t.tiles().to_vec();
        // A near-duplicate of tile 0, nudged by far less than its size,
        // overlaps it almost fully.
        let orig = &t.tiles()[0];
        let mut tr = orig.transform().trans().clone();
        tr[0] += 1e-4;
        tiles.push(Tile::new(
            orig.rel_word().clone(),
            orig.address().clone(),
            Similitude::new(orig.transform().power(), orig.transform().ortho().clone(), tr)
                .unwrap(),
            orig.proto_index(),
        ));
        let bad = Tiling::from_tiles(
            Arc::clone(&spec),
            tiles,
            Provenance::Derived { label: "T_2 plus a duplicate".into() },
        );
        let report = nonoverlap_check(&bad).unwrap();
        assert!(!report.pass);
        assert!(report.max_overlap > report.threshold * 1e3);
        assert!(report.worst_pair.is_some());
    }

    #[test]
    fn point_cloud_overlap_check_is_an_estimate() {
        let spec = presets::cantor();
        let t = canonical_tiling(2, &spec).unwrap();
        let report = nonoverlap_check(&t).unwrap();
        assert!(!report.authoritative);
        assert!(report.min_separation.is_some());
    }

    #[test]
    fn self_similarity_holds_for_the_pure_period_12() {
        let spec = golden();
        let report = self_similarity_check(&Word::empty(), &w("12"), 6, &spec).unwrap();
        assert!(report.ok, "failures: {:?}", report.failures);
        // psi = f_{-12}: an expansion by s^{-3}.
        assert_eq!(report.psi.power(), -3);
        assert_eq!(report.prefix_len, 6);
        assert_eq!(report.target_prefix_len, 8);
        assert!(!report.mapping.is_empty());
        // Expansion by s^{-3} splits every tile into several.
        assert!(report.mapping.iter().all(|(_, kids)| !kids.is_empty()));
    }

    #[test]
    fn self_similarity_holds_with_a_nontrivial_head() {
        let spec = golden();
        let report = self_similarity_check(&w("1"), &w("2"), 5, &spec).unwrap();
        assert!(report.ok, "failures: {:?}", report.failures);
        // psi = f_{-1} f_{-2} f_1 has the scale of f_{-2}.
        assert_eq!(report.psi.power(), -2);
    }

    #[test]
    fn self_similarity_exercises_the_singleton_split() {
        let spec = golden();
        // alpha = 2, beta = 1: consecutive windows differ by e = 1, so
        // core tiles with e(sigma) = e1 + 1 map to themselves as single
        // tiles rather than splitting.
        let report = self_similarity_check(&w("2"), &w("1"), 7, &spec).unwrap();
        assert!(report.ok, "failures: {:?}", report.failures);
        assert_eq!(report.psi.power(), -1);
        assert!(
            report.mapping.iter().any(|(_, kids)| kids.len() == 1),
            "expected at least one unsplit tile"
        );
    }

    #[test]
    fn self_similarity_rejects_bad_windows() {
        let spec = golden();
        assert!(matches!(
            self_similarity_check(&w("1"), &Word::empty(), 6, &spec),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            self_similarity_check(&Word::empty(), &w("12"), 1, &spec),
            Err(Error::Precondition(_))
        ));
        // One period of beta = 12 gives e = 3 < e(alpha beta) + a_max.
        assert!(matches!(
            self_similarity_check(&Word::empty(), &w("12"), 3, &spec),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_tile_patch_is_found_at_every_matching_prototile() {
        let spec = golden();
        let t2 = canonical_tiling(2, &spec).unwrap();
        let t5 = canonical_tiling(5, &spec).unwrap();
        let patch = vec![t2.tiles()[0].clone()];
        let proto = patch[0].proto_index();
        let report = quasiperiodicity_probe(&patch, &t5).unwrap();
        let expected = t5.prototile_census()[&proto];
        assert_eq!(report.copies.len(), expected);
        let r = report.covering_radius.expect("copies exist");
        assert!(r > 0.0 && r.is_finite());
    }

    #[test]
    fn whole_tiling_patch_matches_only_itself() {
        let spec = golden();
        let t3 = canonical_tiling(3, &spec).unwrap();
        let report = quasiperiodicity_probe(t3.tiles(), &t3).unwrap();
        assert_eq!(report.copies.len(), 1);
        assert!(report.copies[0].is_identity(1e-9));
        let r = report.covering_radius.unwrap();
        let diam = t3.support_diameter().unwrap();
        assert!(r <= diam * 1.5 && r > 0.0);
    }

    #[test]
    fn empty_patch_is_rejected() {
        let spec = golden();
        let t2 = canonical_tiling(2, &spec).unwrap();
        assert!(matches!(
            quasiperiodicity_probe(&[], &t2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn golden_blowups_overlap_without_tiling_the_overlap() {
        let spec = golden();
        let report = injectivity_precondition(&spec).unwrap();
        assert!(report.holds);
        assert_eq!(report.pairs.len(), 1);
        let pair = &report.pairs[0];
        assert!(pair.intersection_area > 0.0);
        assert!(pair.common_count > 0);
        assert!(pair.uncovered_fraction > 0.0);
        assert!(!pair.tiles_intersection);
    }

    #[test]
    fn square_grid_blowups_tile_their_overlaps() {
        let spec = presets::squaregrid();
        let report = injectivity_precondition(&spec).unwrap();
        assert!(!report.holds);
        // Adjacent quadrant maps share a tiled half-window overlap.
        assert!(report
            .pairs
            .iter()
            .any(|p| p.tiles_intersection && p.common_count > 0));
    }

    #[test]
    fn degenerate_duplicated_map_fails_injectivity() {
        // Two identical maps give pi(1) = pi(2) exactly: every tile is
        // common and the overlap is fully tiled.
        let spec = presets::squaregrid();
        let f = spec.map(1 as Letter).clone();
        let dup = IfsSpec::new(
            "dup",
            2,
            0.5,
            None,
            vec![f.clone(), f],
            crate::geometry::AttractorModel::ExactPolygon(
                spec.attractor_polygon().unwrap().clone(),
            ),
            None,
        )
        .unwrap();
        let report = injectivity_precondition(&dup).unwrap();
        assert!(!report.holds);
        assert!(report.pairs[0].tiles_intersection);
        assert!(report.pairs[0].uncovered_fraction < 1e-9);
    }

    #[test]
    fn tiling_distance_is_zero_on_identical_tilings() {
        let spec = golden();
        let t = canonical_tiling(3, &spec).unwrap();
        assert_eq!(tiling_distance(&t, &t, 200).unwrap(), 0.0);
    }

    #[test]
    fn tiling_distance_separates_different_levels() {
        let spec = golden();
        let t2 = canonical_tiling(2, &spec).unwrap();
        let t3 = canonical_tiling(3, &spec).unwrap();
        let d = tiling_distance(&t2, &t3, 300).unwrap();
        assert!(d > 1e-3, "distance {d} too small");
        let d_sym = tiling_distance(&t3, &t2, 300).unwrap();
        assert!((d - d_sym).abs() < 1e-12);
    }

    #[test]
    fn tiling_distance_refinement_is_stable() {
        let spec = golden();
        let t2 = canonical_tiling(2, &spec).unwrap();
        let t4 = canonical_tiling(4, &spec).unwrap();
        let d1 = tiling_distance(&t2, &t4, 200).unwrap();
        let d2 = tiling_distance(&t2, &t4, 400).unwrap();
        // The projection contracts the plane, so the Hausdorff value
        // moves by at most one planar sample spacing per tiling.
        let spacing = |t: &Tiling, n: f64| -> f64 {
            let total: f64 = t
                .tiles()
                .iter()
                .map(|tile| tile.polygon(t.spec()).unwrap().perimeter())
                .sum();
            total / n
        };
        let bound = spacing(&t2, 200.0) + spacing(&t4, 200.0);
        assert!((d1 - d2).abs() <= bound, "jump {} > bound {bound}", (d1 - d2).abs());
    }

    #[test]
    fn tiling_distance_enforces_the_sample_floor() {
        let spec = golden();
        let t = canonical_tiling(1, &spec).unwrap();
        assert!(matches!(
            tiling_distance(&t, &t, 50),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn blowup_prefixes_converge_in_the_tiling_metric() {
        let spec = golden();
        // pi(theta|j) is nested along j, so distances to the longest
        // prefix shrink.
        let theta = w("12121");
        let t5 = pi_prefix(&theta, &spec).unwrap();
        let d1 = tiling_distance(&pi_prefix(&theta.prefix(1), &spec).unwrap(), &t5, 200).unwrap();
        let d3 = tiling_distance(&pi_prefix(&theta.prefix(3), &spec).unwrap(), &t5, 200).unwrap();
        assert!(d3 < d1, "d3 = {d3} not below d1 = {d1}");
    }
}
