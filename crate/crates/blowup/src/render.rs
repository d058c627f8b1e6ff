//! Deterministic SVG output. Numbers are written with a fixed six
//! decimal format (negative zero normalized away), colors come from a
//! fixed palette indexed by prototile, and tiles are emitted in tiling
//! order, so identical inputs produce byte-identical files.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{attractor, AttractorGeom, Pt};
use crate::tiling::Tiling;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorBy {
    ProtoIndex,
    AddressDepth,
}

#[derive(Clone, Debug)]
pub struct RenderStyle {
    pub color_by: ColorBy,
    pub stroke_width: f64,
    pub label_addresses: bool,
    /// World-coordinate window `(lo, hi)`; `None` fits the support with
    /// a small margin.
    pub viewport: Option<(Pt, Pt)>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            color_by: ColorBy::ProtoIndex,
            stroke_width: 0.002,
            label_addresses: false,
            viewport: None,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
];

const WIDTH_PX: f64 = 800.0;

/// Fixed-point decimal with negative zero folded to zero, the one float
/// format used in SVG output.
fn fixed(x: f64) -> String {
    let s = format!("{:.6}", x);
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

struct Frame {
    lo: Pt,
    hi: Pt,
    scale: f64,
    height: f64,
}

impl Frame {
    fn to_px(&self, p: Pt) -> Pt {
        [
            (p[0] - self.lo[0]) * self.scale,
            (self.hi[1] - p[1]) * self.scale,
        ]
    }
}

fn frame_for(t: &Tiling, style: &RenderStyle) -> Result<Frame> {
    let (lo, hi) = match style.viewport {
        Some((lo, hi)) => {
            if !(hi[0] > lo[0] && hi[1] > lo[1]) {
                return Err(Error::Precondition("viewport must have positive extent".into()));
            }
            (lo, hi)
        }
        None => {
            if t.is_empty() {
                ([0.0, 0.0], [1.0, 1.0])
            } else {
                let (lo, hi) = t.support_bbox()?;
                let margin = 0.04 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
                (
                    [lo[0] - margin, lo[1] - margin],
                    [hi[0] + margin, hi[1] + margin],
                )
            }
        }
    };
    let scale = WIDTH_PX / (hi[0] - lo[0]);
    let height = (hi[1] - lo[1]) * scale;
    Ok(Frame { lo, hi, scale, height })
}

fn color_for(t: &Tiling, index: usize, style: &RenderStyle) -> &'static str {
    let tile = &t.tiles()[index];
    let key = match style.color_by {
        ColorBy::ProtoIndex => tile.proto_index() as usize,
        ColorBy::AddressDepth => tile.rel_word().len(),
    };
    PALETTE[key % PALETTE.len()]
}

/// Renders a tiling to SVG text. Polygon specs emit one closed path per
/// tile; point-cloud specs emit one circle per sampled attractor point
/// per tile. Labels, when requested, carry the reduced absolute address
/// at the tile centroid.
pub fn render_svg(t: &Tiling, style: &RenderStyle) -> Result<String> {
    let frame = frame_for(t, style)?;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        fixed(WIDTH_PX),
        fixed(frame.height),
        fixed(WIDTH_PX),
        fixed(frame.height)
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if t.is_empty() {
        svg.push_str("</svg>\n");
        return Ok(svg);
    }
    let spec = t.spec();
    let s = spec.s();
    let stroke_px = (style.stroke_width * frame.scale).max(0.1);
    let mut labels = String::new();
    if spec.is_polygon_model() {
        for (i, tile) in t.tiles().iter().enumerate() {
            let poly = tile.polygon(spec)?;
            let mut d = String::new();
            for (j, &v) in poly.verts().iter().enumerate() {
                let p = frame.to_px(v);
                d.push_str(if j == 0 { "M " } else { "L " });
                d.push_str(&format!("{} {} ", fixed(p[0]), fixed(p[1])));
            }
            d.push('Z');
            svg.push_str(&format!(
                "<path d=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"{}\"/>\n",
                d,
                color_for(t, i, style),
                fixed(stroke_px)
            ));
            if style.label_addresses {
                let c = frame.to_px(poly.centroid());
                let size = (poly.diameter() * frame.scale * 0.16).max(4.0);
                labels.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"monospace\" \
                     text-anchor=\"middle\">{}</text>\n",
                    fixed(c[0]),
                    fixed(c[1]),
                    fixed(size),
                    tile.address()
                ));
            }
        }
    } else {
        let cloud = match attractor(spec, None)? {
            AttractorGeom::Points(pts) => pts,
            AttractorGeom::Polygon(_) => unreachable!("non-polygon model"),
        };
        let stride = cloud.len().div_ceil(256).max(1);
        let base: Vec<Pt> = cloud.iter().step_by(stride).map(|v| [v[0], v[1]]).collect();
        let radius = (1.5f64).max(stroke_px);
        for (i, tile) in t.tiles().iter().enumerate() {
            let color = color_for(t, i, style);
            let mut cx = 0.0;
            let mut cy = 0.0;
            for &p in &base {
                let q = frame.to_px(tile.transform().apply_pt(s, p));
                cx += q[0];
                cy += q[1];
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
                    fixed(q[0]),
                    fixed(q[1]),
                    fixed(radius),
                    color
                ));
            }
            if style.label_addresses && !base.is_empty() {
                let n = base.len() as f64;
                labels.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" font-size=\"10\" font-family=\"monospace\" \
                     text-anchor=\"middle\">{}</text>\n",
                    fixed(cx / n),
                    fixed(cy / n),
                    tile.address()
                ));
            }
        }
    }
    svg.push_str(&labels);
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_to_file(t: &Tiling, style: &RenderStyle, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(t, style)?;
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::presets;
    use crate::tiling::{canonical_tiling, Provenance};
    use std::sync::Arc;

    #[test]
    fn labelled_level_three_has_eight_paths_and_labels() {
        let spec = presets::goldenb();
        let t = canonical_tiling(3, &spec).unwrap();
        let style = RenderStyle { label_addresses: true, ..RenderStyle::default() };
        let svg = render_svg(&t, &style).unwrap();
        assert_eq!(svg.matches("<path").count(), 8);
        assert_eq!(svg.matches("<text").count(), 8);
        assert!(svg.contains(".111"));
    }

    #[test]
    fn output_is_reproducible() {
        let spec = presets::goldenb();
        let t = canonical_tiling(4, &spec).unwrap();
        let style = RenderStyle::default();
        assert_eq!(render_svg(&t, &style).unwrap(), render_svg(&t, &style).unwrap());
    }

    #[test]
    fn empty_tiling_renders_an_empty_canvas() {
        let spec = presets::goldenb();
        let t = Tiling::from_tiles(
            Arc::clone(&spec),
            Vec::new(),
            Provenance::Derived { label: "empty".into() },
        );
        let svg = render_svg(&t, &RenderStyle::default()).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<path").count(), 0);
    }

    #[test]
    fn point_clouds_render_as_circles() {
        let spec = presets::cantor();
        let t = canonical_tiling(1, &spec).unwrap();
        let svg = render_svg(&t, &RenderStyle::default()).unwrap();
        assert!(svg.matches("<circle").count() > 0);
    }

    #[test]
    fn degenerate_viewport_is_rejected() {
        let spec = presets::goldenb();
        let t = canonical_tiling(1, &spec).unwrap();
        let style = RenderStyle {
            viewport: Some(([0.0, 0.0], [0.0, 1.0])),
            ..RenderStyle::default()
        };
        assert!(render_svg(&t, &style).is_err());
    }

    #[test]
    fn negative_zero_never_appears() {
        assert_eq!(fixed(-0.0000001), "0.000000");
        assert_eq!(fixed(-1.25), "-1.250000");
    }
}
