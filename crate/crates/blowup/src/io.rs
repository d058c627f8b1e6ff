//! Spec files, built-in presets, tiling data export, and verification
//! reports. The interchange format is JSON throughout: a spec file
//! describes the IFS with every geometric invariant re-checked on load,
//! and tiling data is newline-delimited records, one tile per line, so
//! large tilings stream.

use std::fs;
use std::io::{BufRead, Write as IoWrite};
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    rotation2, AttractorModel, IfsSpec, Polygon, Polynomial, Similitude, S_POLY_TOL,
};
use crate::symbolic::{AbsoluteAddress, Word};
use crate::tiling::{Provenance, Tile, Tiling};

/// A number that may be written as a decimal string. When a polynomial
/// pins the value exactly, the string form keeps the file stable under
/// round-trips regardless of JSON number formatting.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberOrText {
    Number(f64),
    Text(String),
}

impl NumberOrText {
    fn value(&self) -> Result<f64> {
        match self {
            NumberOrText::Number(x) => Ok(*x),
            NumberOrText::Text(t) => t
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("unreadable numeric value {t:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialField {
    /// Coefficients in ascending degree order.
    pub coeffs: Vec<f64>,
    /// Interval bracketing the intended root.
    pub bracket: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleField {
    pub value: NumberOrText,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolynomialField>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapField {
    /// Scale exponent: the map contracts by `s^a`.
    pub a: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_degrees: Option<f64>,
    /// Orthogonal part as row-major rows; exactly one of this and
    /// `rotation_degrees` must be present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub reflect: bool,
    pub translate: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttractorMode {
    Polygon,
    Pointcloud,
}

/// The on-disk description of an IFS. Loading re-checks everything the
/// in-memory constructor enforces, so a hand-edited file cannot smuggle
/// in an invalid system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecFile {
    pub name: String,
    pub dim: usize,
    pub s: ScaleField,
    pub maps: Vec<MapField>,
    pub mode: AttractorMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attractor: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud_depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_level: Option<u32>,
}

/// Default refinement depth for point-cloud attractors loaded without
/// an explicit `cloud_depth`.
const DEFAULT_CLOUD_DEPTH: u32 = 10;

pub fn load_spec(path: impl AsRef<Path>) -> Result<Arc<IfsSpec>> {
    let text = fs::read_to_string(path)?;
    load_spec_from_str(&text)
}

pub fn load_spec_from_str(text: &str) -> Result<Arc<IfsSpec>> {
    let file: SpecFile = serde_json::from_str(text)?;
    spec_from_file(&file)
}

/// Builds and validates the IFS described by a spec file. When a
/// polynomial is given and the written value does not already satisfy
/// it to `S_POLY_TOL`, the value is re-refined by Newton iteration from
/// the bracket; exactly written values are kept bit for bit so saved
/// files reload to equal specs.
pub fn spec_from_file(file: &SpecFile) -> Result<Arc<IfsSpec>> {
    let written = file.s.value.value()?;
    let (s, poly) = match &file.s.polynomial {
        None => (written, None),
        Some(pf) => {
            let p = Polynomial::new(pf.coeffs.clone());
            let s = if p.eval(written).abs() <= S_POLY_TOL {
                written
            } else {
                let refined = p.refine_root(pf.bracket[0], pf.bracket[1])?;
                if (refined - written).abs() > 0.05 {
                    return Err(Error::InvalidSpec(format!(
                        "written scale {written} is far from the bracketed root {refined}"
                    )));
                }
                refined
            };
            (s, Some(p))
        }
    };
    let mut maps = Vec::with_capacity(file.maps.len());
    for (i, m) in file.maps.iter().enumerate() {
        let ortho = match (&m.rotation_degrees, &m.matrix) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::InvalidSpec(format!(
                    "map {}: exactly one of rotation_degrees and matrix is required",
                    i + 1
                )))
            }
            (Some(deg), None) => {
                if file.dim != 2 {
                    return Err(Error::InvalidSpec(
                        "rotation_degrees is only meaningful in dimension 2".into(),
                    ));
                }
                rotation2(*deg)
            }
            (None, Some(rows)) => {
                if rows.len() != file.dim || rows.iter().any(|r| r.len() != file.dim) {
                    return Err(Error::InvalidSpec(format!(
                        "map {}: matrix must be {} rows of {}",
                        i + 1,
                        file.dim,
                        file.dim
                    )));
                }
                DMatrix::from_row_slice(
                    file.dim,
                    file.dim,
                    &rows.iter().flatten().copied().collect::<Vec<f64>>(),
                )
            }
        };
        let ortho = if m.reflect {
            if file.dim != 2 {
                return Err(Error::InvalidSpec(
                    "reflect is only meaningful in dimension 2".into(),
                ));
            }
            ortho * DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
        } else {
            ortho
        };
        if m.translate.len() != file.dim {
            return Err(Error::InvalidSpec(format!(
                "map {}: translation has {} entries, expected {}",
                i + 1,
                m.translate.len(),
                file.dim
            )));
        }
        let a = i32::try_from(m.a)
            .map_err(|_| Error::InvalidSpec(format!("map {}: exponent too large", i + 1)))?;
        maps.push(Similitude::new(
            a,
            ortho,
            DVector::from_column_slice(&m.translate),
        )?);
    }
    let model = match file.mode {
        AttractorMode::Polygon => {
            let verts = file.attractor.as_ref().ok_or_else(|| {
                Error::InvalidSpec("polygon mode requires an attractor vertex list".into())
            })?;
            AttractorModel::ExactPolygon(Polygon::new(verts.clone())?)
        }
        AttractorMode::Pointcloud => AttractorModel::PointCloud {
            depth: file.cloud_depth.unwrap_or(DEFAULT_CLOUD_DEPTH),
        },
    };
    IfsSpec::new(file.name.clone(), file.dim, s, poly, maps, model, file.max_level)
}

/// Serializes a spec back to file form. The orthogonal parts are always
/// written as explicit matrices, and the scale becomes a decimal string
/// exactly when a polynomial pins it.
pub fn spec_to_file(spec: &IfsSpec) -> SpecFile {
    let s = spec.s();
    let value = match spec.s_poly() {
        Some(_) => NumberOrText::Text(format!("{s}")),
        None => NumberOrText::Number(s),
    };
    let polynomial = spec.s_poly().map(|p| {
        // Synthesize a bracket around the known root; loading skips the
        // refinement when the written value already satisfies the
        // polynomial, so a sign change is not strictly required.
        let mut bracket = [s - 1e-6, s + 1e-6];
        for eps in [1e-6, 1e-4, 1e-2, 0.1] {
            if p.eval(s - eps).signum() != p.eval(s + eps).signum() {
                bracket = [s - eps, s + eps];
                break;
            }
        }
        PolynomialField { coeffs: p.coeffs().to_vec(), bracket }
    });
    let maps = spec
        .maps()
        .iter()
        .map(|f| MapField {
            a: f.power() as u32,
            rotation_degrees: None,
            matrix: Some(
                (0..f.dim())
                    .map(|r| (0..f.dim()).map(|c| f.ortho()[(r, c)]).collect())
                    .collect(),
            ),
            reflect: false,
            translate: f.trans().iter().copied().collect(),
        })
        .collect();
    let (mode, attractor, cloud_depth) = match spec.attractor_model() {
        AttractorModel::ExactPolygon(p) => (
            AttractorMode::Polygon,
            Some(p.verts().to_vec()),
            None,
        ),
        AttractorModel::PointCloud { depth } => (AttractorMode::Pointcloud, None, Some(*depth)),
    };
    SpecFile {
        name: spec.name().to_string(),
        dim: spec.dim(),
        s: ScaleField { value, polynomial },
        maps,
        mode,
        attractor,
        cloud_depth,
        max_level: Some(spec.max_level()),
    }
}

pub fn save_spec(spec: &IfsSpec, path: impl AsRef<Path>) -> Result<()> {
    let file = spec_to_file(spec);
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Built-in example systems. `goldenb` is the two-map golden-b hexagon
/// system; `cantor` is a totally disconnected two-map system kept as a
/// point cloud; `squaregrid` is the four-quadrant control system whose
/// tilings are periodic.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 3] = ["goldenb", "cantor", "squaregrid"];

    pub fn by_name(name: &str) -> Option<Arc<IfsSpec>> {
        match name {
            "goldenb" => Some(goldenb()),
            "cantor" => Some(cantor()),
            "squaregrid" => Some(squaregrid()),
            _ => None,
        }
    }

    /// The golden-b hexagon: two maps with exponents (1, 2), scale from
    /// `s^4 + s^2 = 1`. The attractor polygon is tiled by the rotated
    /// `s`-copy and the rotated-and-reflected `s^2`-copy exactly.
    pub fn goldenb() -> Arc<IfsSpec> {
        let poly = Polynomial::new(vec![-1.0, 0.0, 1.0, 0.0, 1.0]);
        let s = poly.refine_root(0.0, 1.0).expect("root of s^4 + s^2 - 1 in (0, 1)");
        let f1 = Similitude::new(
            1,
            rotation2(-90.0),
            DVector::from_column_slice(&[0.0, s]),
        )
        .expect("orthogonal");
        let f2 = Similitude::new(
            2,
            DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]),
            DVector::from_column_slice(&[1.0, 0.0]),
        )
        .expect("orthogonal");
        let (s2, s3) = (s * s, s * s * s);
        let hexagon = Polygon::new(vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, s3],
            [s2, s3],
            [s2, s],
            [0.0, s],
        ])
        .expect("simple hexagon");
        IfsSpec::new(
            "goldenb",
            2,
            s,
            Some(poly),
            vec![f1, f2],
            AttractorModel::ExactPolygon(hexagon),
            None,
        )
        .expect("valid preset")
    }

    /// Two maps in general position with a scale small enough that the
    /// attractor is totally disconnected; kept as a point cloud.
    pub fn cantor() -> Arc<IfsSpec> {
        let f1 = Similitude::new(
            1,
            rotation2(30.0),
            DVector::from_column_slice(&[0.0, 0.0]),
        )
        .expect("orthogonal");
        let f2 = Similitude::new(
            2,
            DMatrix::identity(2, 2),
            DVector::from_column_slice(&[0.8, 0.3]),
        )
        .expect("orthogonal");
        IfsSpec::new(
            "cantor",
            2,
            0.35,
            None,
            vec![f1, f2],
            AttractorModel::PointCloud { depth: DEFAULT_CLOUD_DEPTH },
            None,
        )
        .expect("valid preset")
    }

    /// Four quadrant maps of the unit square, all with exponent 1. Its
    /// canonical tilings are square grids: the periodic control case.
    pub fn squaregrid() -> Arc<IfsSpec> {
        let maps = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]]
            .iter()
            .map(|&q| {
                Similitude::new(1, DMatrix::identity(2, 2), DVector::from_column_slice(&q))
                    .expect("orthogonal")
            })
            .collect();
        let square = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .expect("simple square");
        IfsSpec::new(
            "squaregrid",
            2,
            0.5,
            None,
            maps,
            AttractorModel::ExactPolygon(square),
            None,
        )
        .expect("valid preset")
    }
}

/// Provenance in a form that survives serialization.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ProvenanceRecord {
    Canonical { k: u32 },
    Prefix { theta: String },
    Derived { label: String },
}

#[derive(Serialize, Deserialize)]
struct TilesHeader {
    spec: String,
    provenance: ProvenanceRecord,
    tile_count: usize,
}

#[derive(Serialize, Deserialize)]
struct TileRecord {
    address: String,
    proto: u32,
    /// Orthogonal part, row-major.
    matrix: Vec<f64>,
    translation: Vec<f64>,
    power: i32,
}

/// Writes a tiling as newline-delimited JSON: a header line naming the
/// spec, the provenance, and the count, then one record per tile with
/// its reduced absolute address, prototile index, orthogonal matrix in
/// row-major order, translation, and scale exponent.
pub fn export_tiles(t: &Tiling, out: &mut impl IoWrite) -> Result<()> {
    let header = TilesHeader {
        spec: t.spec().name().to_string(),
        provenance: match t.provenance() {
            Provenance::Canonical { k } => ProvenanceRecord::Canonical { k: *k },
            Provenance::Prefix { theta } => {
                ProvenanceRecord::Prefix { theta: theta.to_string() }
            }
            Provenance::Derived { label } => {
                ProvenanceRecord::Derived { label: label.clone() }
            }
        },
        tile_count: t.len(),
    };
    let mut line = serde_json::to_string(&header)?;
    line.push('\n');
    out.write_all(line.as_bytes())?;
    for tile in t.tiles() {
        let g = tile.transform();
        let record = TileRecord {
            address: tile.address().to_string(),
            proto: tile.proto_index(),
            matrix: {
                let d = g.dim();
                (0..d).flat_map(|r| (0..d).map(move |c| (r, c)))
                    .map(|(r, c)| g.ortho()[(r, c)])
                    .collect()
            },
            translation: g.trans().iter().copied().collect(),
            power: g.power(),
        };
        let mut line = serde_json::to_string(&record)?;
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn export_tiles_to_file(t: &Tiling, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    export_tiles(t, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Reads tiling data written by `export_tiles` back into a tiling over
/// the given spec. Relative words are recovered from the provenance:
/// canonical tiles use the address word directly, and blow-up tiles
/// undo the address reduction by re-prepending the cancelled head of
/// `theta`, reversed. Derived tilings do not carry enough information
/// to recover relative words and are rejected.
pub fn parse_tiles(reader: impl BufRead, spec: &Arc<IfsSpec>) -> Result<Tiling> {
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::InvalidSpec("tiles data is empty".into()))??;
    let header: TilesHeader = serde_json::from_str(&header_line)?;
    if header.spec != spec.name() {
        return Err(Error::InvalidSpec(format!(
            "tiles data was written for spec {:?}, not {:?}",
            header.spec,
            spec.name()
        )));
    }
    let provenance = match &header.provenance {
        ProvenanceRecord::Canonical { k } => Provenance::Canonical { k: *k },
        ProvenanceRecord::Prefix { theta } => {
            Provenance::Prefix { theta: theta.parse::<Word>()? }
        }
        ProvenanceRecord::Derived { .. } => {
            return Err(Error::InvalidSpec(
                "tiles data with derived provenance cannot recover relative words".into(),
            ))
        }
    };
    let mut tiles = Vec::with_capacity(header.tile_count);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TileRecord = serde_json::from_str(&line)?;
        let address: AbsoluteAddress = record.address.parse()?;
        let d = spec.dim();
        if record.matrix.len() != d * d || record.translation.len() != d {
            return Err(Error::InvalidSpec("tile record dimensions are wrong".into()));
        }
        let g = Similitude::new(
            record.power,
            DMatrix::from_row_slice(d, d, &record.matrix),
            DVector::from_column_slice(&record.translation),
        )?;
        let rel_word = match &provenance {
            Provenance::Canonical { .. } => address.omega().clone(),
            Provenance::Prefix { theta } => {
                // The reduction dropped `gamma`, the tail of theta after
                // the reduced head; the relative word starts with it
                // reversed.
                if !theta.starts_with(address.theta()) {
                    return Err(Error::InvalidSpec(format!(
                        "address {address} does not reduce from theta {theta}"
                    )));
                }
                let gamma = theta.suffix_from(address.theta().len());
                gamma.reversed().concat(address.omega())
            }
            Provenance::Derived { .. } => unreachable!("rejected above"),
        };
        tiles.push(Tile::new(rel_word, address, g, record.proto));
    }
    if tiles.len() != header.tile_count {
        return Err(Error::InvalidSpec(format!(
            "tiles data announced {} tiles but carried {}",
            header.tile_count,
            tiles.len()
        )));
    }
    Ok(Tiling::from_tiles(Arc::clone(spec), tiles, provenance))
}

pub fn parse_tiles_from_file(path: impl AsRef<Path>, spec: &Arc<IfsSpec>) -> Result<Tiling> {
    let file = fs::File::open(path)?;
    parse_tiles(std::io::BufReader::new(file), spec)
}

/// One verification outcome: a stable name, the verdict, and whatever
/// numbers the check produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub metrics: serde_json::Map<String, serde_json::Value>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        CheckReport { name: name.into(), pass, metrics: serde_json::Map::new() }
    }

    pub fn metric(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metrics.insert(key.to_string(), value.into());
        self
    }
}

pub fn report_json(reports: &[CheckReport]) -> serde_json::Value {
    serde_json::json!({
        "pass": reports.iter().all(|r| r.pass),
        "checks": reports,
    })
}

pub fn write_report(reports: &[CheckReport], path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&report_json(reports))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
