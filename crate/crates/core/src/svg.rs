//! SVG figures of the upper landscape of a grown continent, drawn in a strip:
//! coastal cusps sit on a horizontal line in coastal order and every edge is
//! a half-ellipse above it.

use crate::continent::{rotate_to_min, Continent, LFace, Landscape, Which};
use crate::cover::{CuspId, EdgeKey};
use crate::error::{Error, Result};
use crate::linkspace::{grow_ball, LinkSpace};
use crate::structure::{Colour, Veering};
use crate::tracks::{crown_from_faces, face_edge_colour};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum What {
    Layer,
    Tracks,
    Crowns,
    Rectangles,
}

impl FromStr for What {
    type Err = Error;

    fn from_str(s: &str) -> Result<What> {
        match s {
            "layer" => Ok(What::Layer),
            "tracks" => Ok(What::Tracks),
            "crowns" => Ok(What::Crowns),
            "rectangles" => Ok(What::Rectangles),
            _ => Err(Error::MalformedSignature(format!("unknown render selector {s:?}"))),
        }
    }
}

const STEP: f64 = 40.0;
const MARGIN: f64 = 30.0;
const FLAT: f64 = 0.7;

struct Strip {
    x: HashMap<CuspId, f64>,
    base: f64,
    width: f64,
    height: f64,
}

impl Strip {
    fn new(coast: &[CuspId]) -> Strip {
        let x: HashMap<CuspId, f64> = coast.iter().enumerate().map(|(i, &c)| (c, MARGIN + STEP * i as f64)).collect();
        let span = STEP * coast.len().saturating_sub(1) as f64;
        let height = span / 2.0 * FLAT + 2.0 * MARGIN;
        Strip { x, base: height - MARGIN, width: span + 2.0 * MARGIN, height }
    }

    fn ends(&self, e: EdgeKey) -> (f64, f64) {
        let (a, b) = (self.x[&e.0], self.x[&e.1]);
        (a.min(b), a.max(b))
    }

    fn apex(&self, e: EdgeKey) -> (f64, f64) {
        let (a, b) = self.ends(e);
        ((a + b) / 2.0, self.base - (b - a) / 2.0 * FLAT)
    }

    fn arc(&self, e: EdgeKey) -> String {
        let (a, b) = self.ends(e);
        let r = (b - a) / 2.0;
        format!("M {a:.2} {:.2} A {r:.2} {:.2} 0 0 1 {b:.2} {:.2}", self.base, r * FLAT, self.base)
    }

    fn face(&self, lf: &LFace) -> String {
        let mut xs: Vec<f64> = lf.cusps.iter().map(|c| self.x[c]).collect();
        xs.sort_by(f64::total_cmp);
        let (a, m, b) = (xs[0], xs[1], xs[2]);
        let (r1, r2, r3) = ((b - a) / 2.0, (b - m) / 2.0, (m - a) / 2.0);
        let y = self.base;
        format!(
            "M {a:.2} {y:.2} A {r1:.2} {:.2} 0 0 1 {b:.2} {y:.2} A {r2:.2} {:.2} 0 0 0 {m:.2} {y:.2} A {r3:.2} {:.2} 0 0 0 {a:.2} {y:.2} Z",
            r1 * FLAT,
            r2 * FLAT,
            r3 * FLAT
        )
    }

    fn centroid(&self, lf: &LFace) -> (f64, f64) {
        let pts: Vec<(f64, f64)> = lf.edges().iter().map(|&e| self.apex(e)).collect();
        (pts.iter().map(|p| p.0).sum::<f64>() / 3.0, pts.iter().map(|p| p.1).sum::<f64>() / 3.0)
    }
}

fn colour_name(c: Colour) -> &'static str {
    match c {
        Colour::Red => "#c0392b",
        Colour::Blue => "#2c5aa0",
    }
}

/// A rendered figure and a summary of what it shows.
#[derive(Clone, Debug)]
pub struct Rendered {
    pub svg: String,
    pub summary: Value,
}

/// Grows a ball of the given radius around the root and draws its upper
/// landscape.
pub fn render(v: Arc<Veering>, what: What, radius: usize, cap: usize) -> Result<Rendered> {
    let mut c = Continent::initial(v, 0)?;
    grow_ball(&mut c, radius, cap)?;
    render_continent(c, what, cap)
}

pub fn render_continent(c: Continent, what: What, cap: usize) -> Result<Rendered> {
    let coast = rotate_to_min(&c.coast());
    let strip = Strip::new(&coast);
    let land: Landscape = c.landscape(Which::Upper);
    let mut faces: Vec<LFace> = land.faces.clone();
    faces.sort_by_key(|f| f.slot);
    let mut edge_colour: BTreeMap<EdgeKey, Colour> = BTreeMap::new();
    for lf in &faces {
        for i in 0..3 {
            edge_colour.entry(lf.edge(i)).or_insert_with(|| face_edge_colour(&c, lf, i));
        }
    }
    let mut body = String::new();
    let mut summary = json!({
        "what": what,
        "faces": faces.len(),
        "edges": edge_colour.len(),
        "cusps": coast.len(),
        "continent_tets": c.tet_count(),
    });

    body.push_str("<g class=\"faces\">\n");
    for lf in &faces {
        writeln!(
            body,
            "<path class=\"face\" data-slot=\"{}.{}\" d=\"{}\" fill=\"#f3efe6\" stroke=\"none\"/>",
            lf.slot.0,
            lf.slot.1,
            strip.face(lf)
        )
        .expect("write");
    }
    body.push_str("</g>\n<g class=\"edges\">\n");
    for (e, col) in &edge_colour {
        writeln!(
            body,
            "<path class=\"edge\" data-edge=\"{}-{}\" d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            e.0,
            e.1,
            strip.arc(*e),
            colour_name(*col)
        )
        .expect("write");
    }
    body.push_str("</g>\n<g class=\"cusps\">\n");
    for &x in &coast {
        writeln!(body, "<circle class=\"cusp\" data-cusp=\"{x}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"black\"/>", strip.x[&x], strip.base)
            .expect("write");
    }
    body.push_str("</g>\n");

    match what {
        What::Layer => {}
        What::Tracks => {
            body.push_str("<g class=\"tracks\">\n");
            for lf in &faces {
                let mid = strip.centroid(lf);
                for (w, dash) in [(Which::Upper, ""), (Which::Lower, " stroke-dasharray=\"3 2\"")] {
                    let k = lf.pointed_corner(w);
                    let from = strip.apex(lf.edge(k));
                    for j in [(k + 1) % 3, (k + 2) % 3] {
                        let to = strip.apex(lf.edge(j));
                        writeln!(
                            body,
                            "<path class=\"track {}\" d=\"M {:.2} {:.2} Q {:.2} {:.2} {:.2} {:.2}\" fill=\"none\" stroke=\"#333\"{dash}/>",
                            if w == Which::Upper { "upper" } else { "lower" },
                            from.0,
                            from.1,
                            mid.0,
                            mid.1,
                            to.0,
                            to.1
                        )
                        .expect("write");
                    }
                }
            }
            body.push_str("</g>\n");
        }
        What::Crowns => {
            body.push_str("<g class=\"crowns\">\n");
            let mut tips = 0;
            let mut interleaved = 0;
            for &x in &coast {
                let at: Vec<LFace> = faces.iter().filter(|f| f.corner_of(x).is_some()).cloned().collect();
                let snap = crown_from_faces(&c, x, 0, &at)?;
                if snap.mismatches == 0 {
                    interleaved += 1;
                }
                for (w, slot) in &snap.tips {
                    let lf = LFace::new(&c.s, *slot);
                    let cen = strip.centroid(&lf);
                    let (px, py) = (strip.x[&x], strip.base);
                    let (tx, ty) = (px + (cen.0 - px) * 0.3, py + (cen.1 - py) * 0.3);
                    writeln!(
                        body,
                        "<text class=\"tip\" data-cusp=\"{x}\" x=\"{tx:.2}\" y=\"{ty:.2}\" font-size=\"8\" text-anchor=\"middle\">{}</text>",
                        if *w == Which::Upper { "U" } else { "L" }
                    )
                    .expect("write");
                    tips += 1;
                }
            }
            summary["tips"] = json!(tips);
            summary["interleaved_cusps"] = json!(interleaved);
            body.push_str("</g>\n");
        }
        What::Rectangles => {
            let mut ls = LinkSpace::new(c, cap);
            let mut rects = Vec::new();
            body.push_str("<g class=\"rectangles\">\n");
            for (&e, &col) in &edge_colour {
                let r = ls.edge_rectangle(e, cap)?;
                let (ax, ay) = strip.apex(e);
                write!(
                    body,
                    "<g class=\"rect\" data-edge=\"{}-{}\" data-colour=\"{col:?}\" data-slope=\"{}\">",
                    e.0,
                    e.1,
                    r.slope.map(|s| format!("{s:?}")).unwrap_or_else(|| "none".into())
                )
                .expect("write");
                for &(cusp, corner) in &r.ideal_corners {
                    let px = strip.x[&cusp];
                    let tx = ax + (px - ax) * 0.6;
                    let ty = ay + (strip.base - ay) * 0.6;
                    write!(body, "<text class=\"corner\" data-cusp=\"{cusp}\" x=\"{tx:.2}\" y=\"{ty:.2}\" font-size=\"7\" text-anchor=\"middle\">{corner:?}</text>")
                        .expect("write");
                }
                body.push_str("</g>\n");
                rects.push(json!({
                    "edge": [e.0, e.1],
                    "colour": col,
                    "slope": r.slope,
                    "ideal_corners": r.ideal_corners,
                }));
            }
            body.push_str("</g>\n");
            summary["rectangles"] = Value::Array(rects);
        }
    }

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.2} {:.2}\">",
        strip.width, strip.height, strip.width, strip.height
    )
    .expect("write");
    svg.push_str(&body);
    svg.push_str("</svg>\n");
    Ok(Rendered { svg, summary })
}
