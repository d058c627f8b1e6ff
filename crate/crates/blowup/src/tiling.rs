//! Tilings built from an IFS. The level-`k` canonical tiling has one
//! tile `s^{-k} f_sigma(A)` per word `sigma in Omega_k`; the blow-up
//! tiling along a word `theta` has tiles `f_{-theta} f_sigma(A)` for
//! `sigma in Omega_{e(theta)}`. Tiles carry three coupled identities:
//! the relative word within their own tiling, a reduced absolute
//! address, and the explicit similitude realizing them; operators update
//! all three and cross-checks compare them independently.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    attractor, blowup_isometry, neg_word_map, word_map, AttractorGeom, IfsSpec, Polygon, Pt,
    Similitude, MATCH_TOL,
};
use crate::par;
use crate::symbolic::{e_weight, omega_level_capped, AbsoluteAddress, Word};

/// Where a tiling came from. Operators that only make sense on
/// canonical or blow-up tilings key off this; anything produced by a
/// partial pipeline is `Derived` and keeps a human-readable label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Canonical { k: u32 },
    Prefix { theta: Word },
    Derived { label: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Canonical { k } => write!(f, "T_{k}"),
            Provenance::Prefix { theta } => write!(f, "pi({theta})"),
            Provenance::Derived { label } => write!(f, "{label}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tile {
    rel_word: Word,
    address: AbsoluteAddress,
    transform: Similitude,
    proto_index: u32,
}

impl Tile {
    pub fn new(rel_word: Word, address: AbsoluteAddress, transform: Similitude, proto_index: u32) -> Self {
        Tile {
            rel_word,
            address,
            transform,
            proto_index,
        }
    }

    /// The word indexing this tile within its own tiling.
    pub fn rel_word(&self) -> &Word {
        &self.rel_word
    }

    pub fn address(&self) -> &AbsoluteAddress {
        &self.address
    }

    pub fn transform(&self) -> &Similitude {
        &self.transform
    }

    /// Which prototile `s^p A` this tile is a copy of, `p in 1..=a_max`.
    pub fn proto_index(&self) -> u32 {
        self.proto_index
    }

    /// The tile region in polygon mode.
    pub fn polygon(&self, spec: &IfsSpec) -> Result<Polygon> {
        let a = spec.attractor_polygon()?;
        Ok(a.map(|p| self.transform.apply_pt(spec.s(), p)))
    }
}

#[derive(Clone, Debug)]
pub struct Tiling {
    spec: Arc<IfsSpec>,
    tiles: Vec<Tile>,
    provenance: Provenance,
}

impl Tiling {
    /// Assembles a tiling from explicit tiles; used by the operator
    /// pipeline and by tests that build control tilings.
    pub fn from_tiles(spec: Arc<IfsSpec>, mut tiles: Vec<Tile>, provenance: Provenance) -> Self {
        tiles.sort_by(|a, b| a.rel_word.cmp(&b.rel_word));
        Tiling {
            spec,
            tiles,
            provenance,
        }
    }

    pub fn spec(&self) -> &Arc<IfsSpec> {
        &self.spec
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The region the tiling covers, exact in polygon mode for canonical
    /// and blow-up tilings. Derived tilings have no closed form.
    pub fn support_polygon(&self) -> Result<Polygon> {
        let a = self.spec.attractor_polygon()?;
        let s = self.spec.s();
        match &self.provenance {
            Provenance::Canonical { k } => {
                let g = Similitude::pure_scale(2, -(*k as i32));
                Ok(a.map(|p| g.apply_pt(s, p)))
            }
            Provenance::Prefix { theta } => {
                let g = neg_word_map(theta, &self.spec)?;
                Ok(a.map(|p| g.apply_pt(s, p)))
            }
            Provenance::Derived { label } => Err(Error::Precondition(format!(
                "derived tiling {label:?} has no closed-form support"
            ))),
        }
    }

    /// Bounding box over all tile polygon vertices, or over a sampled
    /// attractor cloud per tile in point-cloud mode (an estimate there,
    /// since a finite cloud understates the hull).
    pub fn support_bbox(&self) -> Result<(Pt, Pt)> {
        if self.tiles.is_empty() {
            return Err(Error::Precondition("empty tiling has no support".into()));
        }
        let s = self.spec.s();
        let pts: Vec<Pt> = match attractor(&self.spec, None)? {
            AttractorGeom::Polygon(p) => p.verts().to_vec(),
            AttractorGeom::Points(cloud) => {
                let stride = cloud.len().div_ceil(256).max(1);
                cloud.iter().step_by(stride).map(|v| [v[0], v[1]]).collect()
            }
        };
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for t in &self.tiles {
            for &v in &pts {
                let p = t.transform.apply_pt(s, v);
                for d in 0..2 {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
        }
        Ok((lo, hi))
    }

    /// Largest distance between tile polygon vertices. For canonical and
    /// blow-up tilings this is the diameter of the support.
    pub fn support_diameter(&self) -> Result<f64> {
        let a = self.spec.attractor_polygon()?;
        let s = self.spec.s();
        let mut pts: Vec<Pt> = Vec::with_capacity(self.tiles.len() * a.verts().len());
        for t in &self.tiles {
            for &v in a.verts() {
                pts.push(t.transform.apply_pt(s, v));
            }
        }
        // Diameter is attained on the convex hull; the brute force pair
        // scan is fine at the sizes the level cap allows, but prune by
        // bbox corners first.
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let dx = pts[i][0] - pts[j][0];
                let dy = pts[i][1] - pts[j][1];
                best = best.max(dx.hypot(dy));
            }
        }
        Ok(best)
    }

    /// A ball certain to contain the stable core of the tiling: the
    /// support of the blow-up shortened by `a_max` letters. Symmetries
    /// verified on tiles in this ball extend to the whole tiling.
    pub fn core_window(&self) -> Result<(Pt, f64)> {
        let a = self.spec.attractor_polygon()?;
        let s = self.spec.s();
        let a_max = self.spec.a_max();
        let window_of = |g: &Similitude| -> (Pt, f64) {
            let poly = a.map(|p| g.apply_pt(s, p));
            let (lo, hi) = poly.bbox();
            let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
            let r = (hi[0] - lo[0]).hypot(hi[1] - lo[1]) / 2.0;
            (c, r)
        };
        match &self.provenance {
            Provenance::Canonical { k } => {
                let j = k.saturating_sub(a_max);
                Ok(window_of(&Similitude::pure_scale(2, -(j as i32))))
            }
            Provenance::Prefix { theta } => {
                let j = theta.len().saturating_sub(a_max as usize);
                Ok(window_of(&neg_word_map(&theta.prefix(j), &self.spec)?))
            }
            Provenance::Derived { .. } => {
                let (lo, hi) = self.support_bbox()?;
                let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
                let r = (hi[0] - lo[0]).hypot(hi[1] - lo[1]) / 2.0 * s.powi(a_max as i32);
                Ok((c, r))
            }
        }
    }

    /// Indices of tiles whose region meets the closed ball.
    pub fn patch(&self, center: Pt, radius: f64) -> Result<Vec<usize>> {
        if radius < 0.0 {
            return Err(Error::Precondition("patch radius must be >= 0".into()));
        }
        let a = self.spec.attractor_polygon()?;
        let s = self.spec.s();
        let flags = par::map_collect(&self.tiles, |t| {
            a.map(|p| t.transform.apply_pt(s, p))
                .intersects_disk(center, radius)
        });
        Ok(flags
            .iter()
            .enumerate()
            .filter_map(|(i, &hit)| hit.then_some(i))
            .collect())
    }

    /// Tile counts per prototile index, ascending.
    pub fn prototile_census(&self) -> std::collections::BTreeMap<u32, usize> {
        let mut census = std::collections::BTreeMap::new();
        for t in &self.tiles {
            *census.entry(t.proto_index).or_insert(0) += 1;
        }
        census
    }

    /// Recovers the level of a canonical-shaped tiling from its support
    /// diameter: `diam(T_k) = s^{-k} diam(A)`, so the level is the log
    /// ratio. Errors when the ratio is not close to an integer.
    pub fn diameter_to_level(&self) -> Result<i32> {
        let geom = attractor(&self.spec, None)?;
        let diam_a = match geom {
            AttractorGeom::Polygon(ref p) => p.diameter(),
            AttractorGeom::Points(_) => {
                return Err(Error::Precondition(
                    "level recovery requires the polygon model".into(),
                ))
            }
        };
        let diam_t = self.support_diameter()?;
        let e = (diam_a.ln() - diam_t.ln()) / self.spec.s().ln();
        let rounded = e.round();
        if (e - rounded).abs() > 0.4 {
            return Err(Error::Inconsistency(format!(
                "support diameter ratio gives level {e:.4}, not close to an integer"
            )));
        }
        Ok(rounded as i32)
    }

    /// Every tile of `self` must appear in `other` with the same reduced
    /// address and a matching transform. Returns the first offender.
    pub fn included_in(&self, other: &Tiling) -> std::result::Result<(), Box<Tile>> {
        let index = TransformIndex::build(other, MATCH_TOL);
        for t in &self.tiles {
            match index.lookup(&t.transform) {
                Some(j) => {
                    if other.tiles[j].address != t.address {
                        return Err(Box::new(t.clone()));
                    }
                }
                None => return Err(Box::new(t.clone())),
            }
        }
        Ok(())
    }

    /// Set equality of tiles under transform matching, with a bijection
    /// check so multiplicity differences are caught.
    pub fn matches_set(&self, other: &Tiling, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let index = TransformIndex::build(other, tol);
        let mut used = vec![false; other.len()];
        for t in &self.tiles {
            match index.lookup(&t.transform) {
                Some(j) if !used[j] => used[j] = true,
                _ => return false,
            }
        }
        true
    }
}

/// The level-`k` canonical tiling `T_k = { s^{-k} f_sigma(A) }`.
pub fn canonical_tiling(k: u32, spec: &Arc<IfsSpec>) -> Result<Tiling> {
    let words = omega_level_capped(k, spec.pv(), spec.max_level())?;
    let scale = Similitude::pure_scale(spec.dim(), -(k as i32));
    let tiles = par::map_collect(&words, |sigma| -> Result<Tile> {
        let g = scale.compose(&word_map(sigma, spec)?, spec.s())?;
        let proto = proto_of(&g, spec)?;
        Ok(Tile {
            rel_word: sigma.clone(),
            address: AbsoluteAddress::normalized(&Word::empty(), sigma),
            transform: g,
            proto_index: proto,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Tiling {
        spec: Arc::clone(spec),
        tiles,
        provenance: Provenance::Canonical { k },
    })
}

/// The blow-up tiling `pi(theta) = { f_{-theta} f_sigma(A) : sigma in
/// Omega_{e(theta)} }` for a finite word `theta`.
pub fn pi_prefix(theta: &Word, spec: &Arc<IfsSpec>) -> Result<Tiling> {
    let k = e_weight(theta, spec.pv())?;
    let words = omega_level_capped(k, spec.pv(), spec.max_level())?;
    let neg = neg_word_map(theta, spec)?;
    let tiles = par::map_collect(&words, |sigma| -> Result<Tile> {
        let g = neg.compose(&word_map(sigma, spec)?, spec.s())?;
        let proto = proto_of(&g, spec)?;
        Ok(Tile {
            rel_word: sigma.clone(),
            address: AbsoluteAddress::normalized(theta, sigma),
            transform: g,
            proto_index: proto,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Tiling {
        spec: Arc::clone(spec),
        tiles,
        provenance: Provenance::Prefix { theta: theta.clone() },
    })
}

/// The prototile index of a tile transform is its scale exponent, which
/// must land in `1..=a_max` for any member of a blow-up tiling.
pub(crate) fn proto_of(g: &Similitude, spec: &IfsSpec) -> Result<u32> {
    let p = g.power();
    if p < 1 || p as u32 > spec.a_max() {
        return Err(Error::Inconsistency(format!(
            "tile scale exponent {p} outside 1..={}",
            spec.a_max()
        )));
    }
    Ok(p as u32)
}

/// The isometry `E_theta` with `pi(theta) = E_theta T_{e(theta)}`,
/// re-exported here next to the tilings it relates.
pub fn pi_isometry(theta: &Word, spec: &IfsSpec) -> Result<Similitude> {
    blowup_isometry(theta, spec)
}

/// Outcome of auditing the tower `pi(theta|0) subset pi(theta|1) subset ...`.
#[derive(Clone, Debug)]
pub struct NestingReport {
    pub ok: bool,
    /// `(prefix_len, tile)`: a tile of `pi(theta|prefix_len - 1)` missing
    /// from `pi(theta|prefix_len)`.
    pub witness: Option<(usize, Tile)>,
}

/// Checks that each blow-up along a prefix of `theta` is contained in
/// the next one, both addresswise and transformwise.
pub fn nesting_check(theta: &Word, spec: &Arc<IfsSpec>) -> Result<NestingReport> {
    let mut prev = pi_prefix(&theta.prefix(0), spec)?;
    for j in 1..=theta.len() {
        let cur = pi_prefix(&theta.prefix(j), spec)?;
        if let Err(tile) = prev.included_in(&cur) {
            return Ok(NestingReport {
                ok: false,
                witness: Some((j, *tile)),
            });
        }
        prev = cur;
    }
    Ok(NestingReport { ok: true, witness: None })
}

/// Lazily enumerates `pi(theta|k)` for growing `k` along an eventually
/// periodic word, stopping before the level cap.
pub fn pi_family<'a>(
    theta: &'a crate::symbolic::EventuallyPeriodic,
    spec: &'a Arc<IfsSpec>,
) -> impl Iterator<Item = Result<Tiling>> + 'a {
    (0usize..)
        .map(move |k| (k, theta.prefix(k)))
        .take_while(move |(_, prefix)| {
            e_weight(prefix, spec.pv()).map(|e| e <= spec.max_level()).unwrap_or(false)
        })
        .map(move |(_, prefix)| pi_prefix(&prefix, spec))
}

/// Fuzzy lookup from a similitude to the tile realizing it. Orthogonal
/// parts concentrate on a small finite set, so they go through a scanned
/// registry; translations hash into a grid whose cells are far coarser
/// than the tolerance, with the 3x3 neighborhood probed to cover
/// straddling.
pub struct TransformIndex {
    tol: f64,
    cell: f64,
    orthos: Vec<nalgebra::DMatrix<f64>>,
    buckets: HashMap<(i32, usize, i64, i64), Vec<usize>>,
    transforms: Vec<Similitude>,
}

impl TransformIndex {
    pub fn build(tiling: &Tiling, tol: f64) -> Self {
        Self::build_from_transforms(
            tiling.tiles.iter().map(|t| t.transform.clone()).collect(),
            tol,
        )
    }

    pub fn build_from_transforms(transforms: Vec<Similitude>, tol: f64) -> Self {
        let cell = (tol * 1000.0).max(1e-3);
        let mut index = TransformIndex {
            tol,
            cell,
            orthos: Vec::new(),
            buckets: HashMap::new(),
            transforms,
        };
        for i in 0..index.transforms.len() {
            let g = index.transforms[i].clone();
            let oid = index.intern_ortho(g.ortho());
            let key = index.key(g.power(), oid, g.trans());
            index.buckets.entry(key).or_default().push(i);
        }
        index
    }

    fn intern_ortho(&mut self, m: &nalgebra::DMatrix<f64>) -> usize {
        match self.find_ortho(m) {
            Some(i) => i,
            None => {
                self.orthos.push(m.clone());
                self.orthos.len() - 1
            }
        }
    }

    fn find_ortho(&self, m: &nalgebra::DMatrix<f64>) -> Option<usize> {
        // Distinct orthogonal parts of a similitude group sit at least
        // a fixed distance apart, far above any matching tolerance.
        self.orthos
            .iter()
            .position(|o| (o - m).abs().max() <= self.tol * 10.0)
    }

    fn key(&self, power: i32, oid: usize, t: &nalgebra::DVector<f64>) -> (i32, usize, i64, i64) {
        let tx = (t[0] / self.cell).floor() as i64;
        let ty = if t.len() > 1 {
            (t[1] / self.cell).floor() as i64
        } else {
            0
        };
        (power, oid, tx, ty)
    }

    /// Index of a stored transform within `tol` of `g`, smallest first.
    pub fn lookup(&self, g: &Similitude) -> Option<usize> {
        let oid = self.find_ortho(g.ortho())?;
        let (p, _, tx, ty) = self.key(g.power(), oid, g.trans());
        let mut best: Option<usize> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.buckets.get(&(p, oid, tx + dx, ty + dy)) {
                    for &i in bucket {
                        if self.transforms[i].approx_eq(g, self.tol)
                            && best.is_none_or(|b| i < b)
                        {
                            best = Some(i);
                        }
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::presets;
    use crate::symbolic::omega_level;

    fn golden() -> Arc<IfsSpec> {
        presets::goldenb()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn level_zero_tiles_are_the_ifs_pieces() {
        let spec = golden();
        let t0 = canonical_tiling(0, &spec).unwrap();
        assert_eq!(t0.len(), 2);
        assert_eq!(t0.tiles()[0].rel_word(), &w("1"));
        assert_eq!(t0.tiles()[0].proto_index(), 1);
        assert_eq!(t0.tiles()[1].proto_index(), 2);
        assert!(t0.tiles()[0]
            .transform()
            .approx_eq(spec.map(1), 1e-12));
    }

    #[test]
    fn level_two_addresses_and_census() {
        let spec = golden();
        let t2 = canonical_tiling(2, &spec).unwrap();
        let addrs: Vec<String> = t2.tiles().iter().map(|t| t.address().to_string()).collect();
        assert_eq!(addrs, vec![".12", ".21", ".22", ".111", ".112"]);
        let census = t2.prototile_census();
        assert_eq!(census.get(&1), Some(&3));
        assert_eq!(census.get(&2), Some(&2));
    }

    #[test]
    fn tile_areas_sum_to_the_scaled_attractor_area() {
        let spec = golden();
        let a = spec.attractor_polygon().unwrap().area();
        for k in 0..=6u32 {
            let tk = canonical_tiling(k, &spec).unwrap();
            let total: f64 = tk
                .tiles()
                .iter()
                .map(|t| t.polygon(&spec).unwrap().area())
                .sum();
            let expected = spec.s().powi(-2 * k as i32) * a;
            assert!(
                (total - expected).abs() < 1e-9 * expected,
                "k = {k}: {total} vs {expected}"
            );
        }
    }

    #[test]
    fn tiling_sizes_match_omega() {
        let spec = golden();
        for k in 0..=8u32 {
            let tk = canonical_tiling(k, &spec).unwrap();
            assert_eq!(tk.len(), omega_level(k, spec.pv()).unwrap().len());
        }
    }

    #[test]
    fn pi_of_the_empty_word_is_level_zero() {
        let spec = golden();
        let pi = pi_prefix(&Word::empty(), &spec).unwrap();
        let t0 = canonical_tiling(0, &spec).unwrap();
        assert!(pi.matches_set(&t0, 1e-12));
    }

    #[test]
    fn pi_prefix_addresses_reduce() {
        let spec = golden();
        let pi = pi_prefix(&w("1"), &spec).unwrap();
        // Omega_1 = {2, 11, 12}; the member starting with 1 cancels into
        // a shorter address.
        let addrs: Vec<String> = pi.tiles().iter().map(|t| t.address().to_string()).collect();
        assert_eq!(addrs, vec!["1.2", ".1", ".2"]);
    }

    #[test]
    fn pi_equals_isometry_image_of_canonical() {
        let spec = golden();
        for word in ["1", "12", "212", "2121"] {
            let theta = w(word);
            let e = e_weight(&theta, spec.pv()).unwrap();
            let pi = pi_prefix(&theta, &spec).unwrap();
            let tk = canonical_tiling(e, &spec).unwrap();
            let iso = pi_isometry(&theta, &spec).unwrap();
            assert_eq!(pi.len(), tk.len());
            let index = TransformIndex::build(&pi, 1e-9);
            for t in tk.tiles() {
                let mapped = iso.compose(t.transform(), spec.s()).unwrap();
                assert!(
                    index.lookup(&mapped).is_some(),
                    "word {word}: image of {} missing",
                    t.rel_word()
                );
            }
        }
    }

    #[test]
    fn nesting_holds_along_a_word() {
        let spec = golden();
        let report = nesting_check(&w("12121"), &spec).unwrap();
        assert!(report.ok);
        let single = nesting_check(&w("2"), &spec).unwrap();
        assert!(single.ok);
    }

    #[test]
    fn nesting_check_catches_a_perturbed_tile() {
        let spec = golden();
        let good = pi_prefix(&w("1"), &spec).unwrap();
        let bad_tiles: Vec<Tile> = good
            .tiles()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut g = t.transform().clone();
                // Index 1 is rel word "11", reduced address ".1": one of
                // the two tiles pi(empty) must find again inside pi(1).
                if i == 1 {
                    let mut tr = g.trans().clone();
                    tr[0] += 0.01;
                    g = Similitude::new(g.power(), g.ortho().clone(), tr).unwrap();
                }
                Tile::new(t.rel_word().clone(), t.address().clone(), g, t.proto_index())
            })
            .collect();
        let bad = Tiling::from_tiles(
            Arc::clone(&spec),
            bad_tiles,
            Provenance::Prefix { theta: w("1") },
        );
        let t0 = pi_prefix(&Word::empty(), &spec).unwrap();
        assert!(t0.included_in(&good).is_ok());
        let verdict = t0.included_in(&bad);
        assert!(verdict.is_err());
    }

    #[test]
    fn support_diameter_scales_with_the_level() {
        let spec = golden();
        let d0 = canonical_tiling(0, &spec).unwrap().support_diameter().unwrap();
        let d3 = canonical_tiling(3, &spec).unwrap().support_diameter().unwrap();
        assert!((d3 / d0 - spec.s().powi(-3)).abs() < 1e-9 * d3);
    }

    #[test]
    fn diameter_recovers_the_level() {
        let spec = golden();
        for word in ["", "12", "2", "2211"] {
            let theta = w(word);
            let pi = pi_prefix(&theta, &spec).unwrap();
            let e = e_weight(&theta, spec.pv()).unwrap() as i32;
            assert_eq!(pi.diameter_to_level().unwrap(), e, "word {word:?}");
        }
    }

    #[test]
    fn patch_selects_tiles_meeting_a_ball() {
        let spec = golden();
        let t3 = canonical_tiling(3, &spec).unwrap();
        let support = t3.support_polygon().unwrap();
        let (lo, hi) = support.bbox();
        let all = t3
            .patch(
                [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0],
                (hi[0] - lo[0]) + (hi[1] - lo[1]),
            )
            .unwrap();
        assert_eq!(all.len(), t3.len());
        // A tiny ball at a tile centroid selects few tiles, and always
        // includes that tile.
        let c = t3.tiles()[0].polygon(&spec).unwrap().centroid();
        let small = t3.patch(c, 1e-6).unwrap();
        assert!(small.contains(&0));
        assert!(small.len() <= 3);
        assert!(t3.patch(c, -1.0).is_err());
    }

    #[test]
    fn transform_index_finds_exact_and_fuzzy_matches() {
        let spec = golden();
        let t4 = canonical_tiling(4, &spec).unwrap();
        let index = TransformIndex::build(&t4, MATCH_TOL);
        for (i, t) in t4.tiles().iter().enumerate() {
            assert_eq!(index.lookup(t.transform()), Some(i));
        }
        // A nudge within tolerance still matches; one outside does not.
        let g = t4.tiles()[3].transform().clone();
        let mut tr = g.trans().clone();
        tr[0] += MATCH_TOL * 0.5;
        let nudged = Similitude::new(g.power(), g.ortho().clone(), tr.clone()).unwrap();
        assert_eq!(index.lookup(&nudged), Some(3));
        tr[0] += 1e-3;
        let far = Similitude::new(g.power(), g.ortho().clone(), tr).unwrap();
        assert_eq!(index.lookup(&far), None);
    }

    #[test]
    fn matches_set_detects_multiplicity_changes() {
        let spec = golden();
        let t2 = canonical_tiling(2, &spec).unwrap();
        assert!(t2.matches_set(&canonical_tiling(2, &spec).unwrap(), 1e-9));
        let mut tiles = t2.tiles().to_vec();
        let dup = tiles[0].clone();
        tiles[1] = dup;
        let doubled = Tiling::from_tiles(
            Arc::clone(&spec),
            tiles,
            Provenance::Derived { label: "doubled".into() },
        );
        assert!(!t2.matches_set(&doubled, 1e-9));
    }

    #[test]
    fn pi_family_respects_the_level_cap() {
        let spec = golden().with_max_level(6);
        let theta = crate::symbolic::EventuallyPeriodic::new(Word::empty(), w("2")).unwrap();
        let family: Vec<_> = pi_family(&theta, &spec).collect();
        // Prefixes 2^k have e = 2k <= 6, so k = 0..=3.
        assert_eq!(family.len(), 4);
        for t in family {
            assert!(t.is_ok());
        }
    }

    #[test]
    fn census_splits_by_weight_gap() {
        // In T_k the tiles of prototile p are the words with e = k + p;
        // for the golden pair the two counts are consecutive sizes of
        // smaller levels.
        let spec = golden();
        let t5 = canonical_tiling(5, &spec).unwrap();
        let census = t5.prototile_census();
        let om4 = omega_level(4, spec.pv()).unwrap().len();
        let om3 = omega_level(3, spec.pv()).unwrap().len();
        assert_eq!(census.get(&1), Some(&om4));
        assert_eq!(census.get(&2), Some(&om3));
    }
}
