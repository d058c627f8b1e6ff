//! Similitudes `x -> s^a O x + q` with orthogonal part `O` and integer
//! scale exponent `a`, the IFS description built from them, and the two
//! attractor models (exact polygon, point cloud). Keeping the scale as
//! an integer power of the base ratio `s` makes composition exact in the
//! exponent: tiles of a blow-up have scale `s^p` with `p` in `1..=a_max`
//! and the exponent arithmetic never drifts.

pub mod polygon;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::par;
use crate::symbolic::{e_weight, Letter, PowerVector, Word, DEFAULT_MAX_LEVEL};

pub use polygon::{convex_clip, dist, intersection_area, Polygon, Pt};

/// Tolerance for accepting a matrix as orthogonal.
pub const ORTHO_TOL: f64 = 1e-9;
/// Tolerance for matching two transforms parameter-wise.
pub const MATCH_TOL: f64 = 1e-6;
/// Tolerance for the residual of the polynomial defining `s`.
pub const S_POLY_TOL: f64 = 1e-12;

/// A similarity `x -> s^power * O x + t`. The ratio `s` itself lives in
/// the spec, so similitudes from different specs never mix silently:
/// every operation that needs the scale takes `s` explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct Similitude {
    power: i32,
    ortho: DMatrix<f64>,
    trans: DVector<f64>,
}

impl Similitude {
    pub fn new(power: i32, ortho: DMatrix<f64>, trans: DVector<f64>) -> Result<Self> {
        let dim = trans.len();
        if ortho.nrows() != dim || ortho.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "orthogonal part is {}x{}, translation has length {dim}",
                ortho.nrows(),
                ortho.ncols()
            )));
        }
        let residual = (&ortho * ortho.transpose() - DMatrix::identity(dim, dim)).abs().max();
        if residual > ORTHO_TOL {
            return Err(Error::Geometry(format!(
                "matrix is not orthogonal: |O O^T - I| = {residual:.3e} > {ORTHO_TOL:.0e}"
            )));
        }
        Ok(Similitude { power, ortho, trans })
    }

    pub fn identity(dim: usize) -> Self {
        Similitude {
            power: 0,
            ortho: DMatrix::identity(dim, dim),
            trans: DVector::zeros(dim),
        }
    }

    /// The pure scaling `x -> s^m x`.
    pub fn pure_scale(dim: usize, m: i32) -> Self {
        Similitude {
            power: m,
            ortho: DMatrix::identity(dim, dim),
            trans: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.trans.len()
    }

    pub fn power(&self) -> i32 {
        self.power
    }

    pub fn ortho(&self) -> &DMatrix<f64> {
        &self.ortho
    }

    pub fn trans(&self) -> &DVector<f64> {
        &self.trans
    }

    pub fn scale(&self, s: f64) -> f64 {
        s.powi(self.power)
    }

    pub fn apply(&self, s: f64, x: &DVector<f64>) -> DVector<f64> {
        self.scale(s) * (&self.ortho * x) + &self.trans
    }

    /// Planar shortcut used by all the polygon plumbing.
    pub fn apply_pt(&self, s: f64, p: Pt) -> Pt {
        debug_assert_eq!(self.dim(), 2);
        let r = self.scale(s);
        [
            r * (self.ortho[(0, 0)] * p[0] + self.ortho[(0, 1)] * p[1]) + self.trans[0],
            r * (self.ortho[(1, 0)] * p[0] + self.ortho[(1, 1)] * p[1]) + self.trans[1],
        ]
    }

    /// `self` after `g`: `(self . g)(x) = self(g(x))`. Powers add.
    pub fn compose(&self, g: &Similitude, s: f64) -> Result<Similitude> {
        if self.dim() != g.dim() {
            return Err(Error::DimensionMismatch(format!(
                "composing dim {} with dim {}",
                self.dim(),
                g.dim()
            )));
        }
        Ok(Similitude {
            power: self.power + g.power,
            ortho: &self.ortho * &g.ortho,
            trans: self.scale(s) * (&self.ortho * &g.trans) + &self.trans,
        })
    }

    pub fn inverse(&self, s: f64) -> Similitude {
        let ot = self.ortho.transpose();
        let trans = -s.powi(-self.power) * (&ot * &self.trans);
        Similitude {
            power: -self.power,
            ortho: ot,
            trans,
        }
    }

    /// Largest parameter-wise deviation; infinite when the exponents or
    /// dimensions differ, so mismatched transforms never fuzzily match.
    pub fn param_dist(&self, other: &Similitude) -> f64 {
        if self.power != other.power || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let mo = (&self.ortho - &other.ortho).abs().max();
        let mt = (&self.trans - &other.trans).abs().max();
        mo.max(mt)
    }

    pub fn approx_eq(&self, other: &Similitude, tol: f64) -> bool {
        self.param_dist(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Similitude::identity(self.dim()), tol)
    }
}

/// 2x2 rotation by degrees; quarter turns get exact entries.
pub fn rotation2(degrees: f64) -> DMatrix<f64> {
    let quarter = degrees.rem_euclid(360.0) / 90.0;
    let (sin, cos) = if (quarter - quarter.round()).abs() < 1e-14 {
        match quarter.round() as i64 % 4 {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        degrees.to_radians().sin_cos()
    };
    DMatrix::from_row_slice(2, 2, &[cos, -sin, sin, cos])
}

/// 2x2 reflection across the x axis.
pub fn reflection2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// A real polynomial with ascending coefficients, used to pin the scale
/// ratio `s` exactly when it is algebraic.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_deriv(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, &c)| acc * x + i as f64 * c)
    }

    /// Newton iteration guarded by bisection on a sign-changing bracket;
    /// converges to full precision for the simple roots used here.
    pub fn refine_root(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let (flo, fhi) = (self.eval(lo), self.eval(hi));
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if flo.signum() == fhi.signum() {
            return Err(Error::InvalidSpec(format!(
                "bracket [{lo}, {hi}] does not straddle a root"
            )));
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.eval(x);
            if f == 0.0 {
                break;
            }
            if f.signum() == flo.signum() {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.eval_deriv(x);
            let newton = if d != 0.0 { x - f / d } else { x };
            x = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * x.abs() {
                break;
            }
        }
        Ok(x)
    }
}

/// How the attractor is realized. The polygon model is exact: the union
/// of the mapped polygons must reproduce the polygon. The point cloud
/// model supports totally disconnected attractors; geometric checks on
/// it are estimates only.
#[derive(Clone, Debug, PartialEq)]
pub enum AttractorModel {
    ExactPolygon(Polygon),
    PointCloud { depth: u32 },
}

/// A validated IFS of similitudes with a common ratio `s in (0, 1)`,
/// maps `f_i = s^{a_i} O_i x + q_i`, and `gcd(a_i) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSpec {
    name: String,
    dim: usize,
    s: f64,
    s_poly: Option<Polynomial>,
    maps: Vec<Similitude>,
    pv: PowerVector,
    attractor_model: AttractorModel,
    max_level: u32,
}

impl IfsSpec {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        s: f64,
        s_poly: Option<Polynomial>,
        maps: Vec<Similitude>,
        attractor_model: AttractorModel,
        max_level: Option<u32>,
    ) -> Result<Arc<Self>> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidSpec(format!("s = {s} is not in (0, 1)")));
        }
        if let Some(poly) = &s_poly {
            let residual = poly.eval(s).abs();
            if residual > S_POLY_TOL {
                return Err(Error::InvalidSpec(format!(
                    "s = {s} does not satisfy its defining polynomial: residual {residual:.3e}"
                )));
            }
        }
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidSpec("map dimension differs from spec dimension".into()));
        }
        let powers: Vec<u32> = maps
            .iter()
            .map(|m| {
                u32::try_from(m.power())
                    .map_err(|_| Error::InvalidSpec("map exponents must be >= 1".into()))
                    .and_then(|p| {
                        if p == 0 {
                            Err(Error::InvalidSpec("map exponents must be >= 1".into()))
                        } else {
                            Ok(p)
                        }
                    })
            })
            .collect::<Result<_>>()?;
        let pv = PowerVector::new(powers)?;
        if let AttractorModel::ExactPolygon(_) = &attractor_model {
            if dim != 2 {
                return Err(Error::InvalidSpec(
                    "polygon attractor model requires dimension 2".into(),
                ));
            }
        }
        Ok(Arc::new(IfsSpec {
            name,
            dim,
            s,
            s_poly,
            maps,
            pv,
            attractor_model,
            max_level: max_level.unwrap_or(DEFAULT_MAX_LEVEL),
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn s_poly(&self) -> Option<&Polynomial> {
        self.s_poly.as_ref()
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }

    /// The map of a 1-based letter.
    pub fn map(&self, letter: Letter) -> &Similitude {
        &self.maps[(letter - 1) as usize]
    }

    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    pub fn pv(&self) -> &PowerVector {
        &self.pv
    }

    pub fn a_max(&self) -> u32 {
        self.pv.a_max()
    }

    pub fn attractor_model(&self) -> &AttractorModel {
        &self.attractor_model
    }

    pub fn is_polygon_model(&self) -> bool {
        matches!(self.attractor_model, AttractorModel::ExactPolygon(_))
    }

    pub fn attractor_polygon(&self) -> Result<&Polygon> {
        match &self.attractor_model {
            AttractorModel::ExactPolygon(p) => Ok(p),
            AttractorModel::PointCloud { .. } => Err(Error::Precondition(
                "operation requires the exact polygon attractor model".into(),
            )),
        }
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// The same spec with a different level cap.
    pub fn with_max_level(self: &Arc<Self>, cap: u32) -> Arc<Self> {
        let mut spec = (**self).clone();
        spec.max_level = cap;
        Arc::new(spec)
    }

    /// The unique fixed point of `f_letter`; the matrix `I - s^a O` is
    /// invertible because `s^a < 1`.
    pub fn fixed_point(&self, letter: Letter) -> DVector<f64> {
        let f = self.map(letter);
        let m = DMatrix::identity(self.dim, self.dim) - f.scale(self.s) * f.ortho();
        m.lu().solve(f.trans()).expect("I - s^a O is invertible")
    }
}

/// `f_theta = f_{theta_1} . f_{theta_2} . ... . f_{theta_m}`; the
/// identity for the empty word.
pub fn word_map(theta: &Word, spec: &IfsSpec) -> Result<Similitude> {
    theta.validate_for(spec.pv())?;
    let mut acc = Similitude::identity(spec.dim());
    for &l in theta.letters() {
        acc = acc.compose(spec.map(l), spec.s())?;
    }
    Ok(acc)
}

/// `f_{-theta} = f_{theta_1}^{-1} . ... . f_{theta_m}^{-1}`, the
/// expansion that blows the attractor up along `theta`.
pub fn neg_word_map(theta: &Word, spec: &IfsSpec) -> Result<Similitude> {
    theta.validate_for(spec.pv())?;
    let mut acc = Similitude::identity(spec.dim());
    for &l in theta.letters() {
        acc = acc.compose(&spec.map(l).inverse(spec.s()), spec.s())?;
    }
    Ok(acc)
}

/// The isometry `E_theta = f_{-theta} . s^{e(theta)}` carrying the
/// level-`e(theta)` canonical tiling onto the blow-up along `theta`.
pub fn blowup_isometry(theta: &Word, spec: &IfsSpec) -> Result<Similitude> {
    let e = e_weight(theta, spec.pv())? as i32;
    let iso = neg_word_map(theta, spec)?.compose(&Similitude::pure_scale(spec.dim(), e), spec.s())?;
    debug_assert_eq!(iso.power(), 0);
    Ok(iso)
}

/// A concrete realization of the attractor.
#[derive(Clone, Debug)]
pub enum AttractorGeom {
    Polygon(Polygon),
    Points(Vec<DVector<f64>>),
}

impl AttractorGeom {
    pub fn diameter(&self) -> f64 {
        match self {
            AttractorGeom::Polygon(p) => p.diameter(),
            AttractorGeom::Points(pts) => {
                let mut best: f64 = 0.0;
                for i in 0..pts.len() {
                    for j in (i + 1)..pts.len() {
                        best = best.max((&pts[i] - &pts[j]).norm());
                    }
                }
                best
            }
        }
    }
}

/// Realizes the attractor: the stored polygon in polygon mode, or the
/// depth-`d` refinement `{f_w(x_1) : |w| = d}` of the fixed point of
/// `f_1` in point-cloud mode. Points are generated letter-major, so the
/// output order is deterministic.
pub fn attractor(spec: &IfsSpec, depth_override: Option<u32>) -> Result<AttractorGeom> {
    match spec.attractor_model() {
        AttractorModel::ExactPolygon(p) => Ok(AttractorGeom::Polygon(p.clone())),
        AttractorModel::PointCloud { depth } => {
            let depth = depth_override.unwrap_or(*depth);
            let mut level = vec![spec.fixed_point(1)];
            for _ in 0..depth {
                let letters: Vec<Letter> = spec.pv().letters().collect();
                let branches = par::map_collect(&letters, |&i| {
                    level
                        .iter()
                        .map(|x| spec.map(i).apply(spec.s(), x))
                        .collect::<Vec<_>>()
                });
                level = branches.into_iter().flatten().collect();
            }
            Ok(AttractorGeom::Points(level))
        }
    }
}

/// All isometries of the plane mapping a polygon onto itself, found by
/// matching vertex cycles in both orientations. The identity is always
/// present. A polygon with all edge lengths distinct admits only the
/// identity.
pub fn polygon_symmetries(p: &Polygon) -> Vec<Similitude> {
    let v = p.verts();
    let n = v.len();
    let scale = p.diameter();
    let tol = 1e-6 * scale.max(1.0);
    let mut out: Vec<Similitude> = Vec::new();
    for r in 0..n {
        for flip in [false, true] {
            let target = |j: usize| -> usize {
                if flip {
                    (r + n - j % n) % n
                } else {
                    (r + j) % n
                }
            };
            let u = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
            let q0 = v[target(0)];
            let q1 = v[target(1)];
            let w = [q1[0] - q0[0], q1[1] - q0[1]];
            let lu = u[0].hypot(u[1]);
            let lw = w[0].hypot(w[1]);
            if (lu - lw).abs() > tol {
                continue;
            }
            // An orientation-preserving candidate rotates u onto w; the
            // reversed vertex cycle needs the reflection doing the same.
            let (un, wn) = ([u[0] / lu, u[1] / lu], [w[0] / lw, w[1] / lw]);
            let ortho = if !flip {
                let c = un[0] * wn[0] + un[1] * wn[1];
                let s = un[0] * wn[1] - un[1] * wn[0];
                DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
            } else {
                let sum = [un[0] + wn[0], un[1] + wn[1]];
                let len = sum[0].hypot(sum[1]);
                let d = if len > 1e-9 {
                    [sum[0] / len, sum[1] / len]
                } else {
                    [-un[1], un[0]]
                };
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        2.0 * d[0] * d[0] - 1.0,
                        2.0 * d[0] * d[1],
                        2.0 * d[0] * d[1],
                        2.0 * d[1] * d[1] - 1.0,
                    ],
                )
            };
            let tx = [
                q0[0] - (ortho[(0, 0)] * v[0][0] + ortho[(0, 1)] * v[0][1]),
                q0[1] - (ortho[(1, 0)] * v[0][0] + ortho[(1, 1)] * v[0][1]),
            ];
            let cand = Similitude {
                power: 0,
                ortho,
                trans: DVector::from_row_slice(&tx),
            };
            let all_match = (0..n).all(|j| {
                let img = cand.apply_pt(1.0, v[j]);
                polygon::dist(img, v[target(j)]) <= tol
            });
            if all_match && !out.iter().any(|e| e.approx_eq(&cand, tol)) {
                out.push(cand);
            }
        }
    }
    out
}
