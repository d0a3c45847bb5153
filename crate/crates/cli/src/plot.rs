//! Standalone SVG 1.1 rendering of a planar domain and JSON artifacts.
//!
//! The domain outline is a single closed `<path>`. Circles are reserved for
//! balls of a chain; points are drawn as small squares and polylines as
//! `<polyline>`, so element counts in the output can be read back directly.

use std::fmt::Write as _;

use harnack_core::{Domain, Shape};
use serde_json::Value;

use crate::CliError;

const WIDTH: f64 = 640.0;
const PAD: f64 = 16.0;
const MARKER: f64 = 3.0;

/// Drawable items gathered from one artifact file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifact {
    pub points: Vec<[f64; 2]>,
    pub polylines: Vec<Vec<[f64; 2]>>,
    pub balls: Vec<([f64; 2], f64)>,
}

impl Artifact {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.polylines.is_empty() && self.balls.is_empty()
    }

    /// Collects point sets (`[[x, y], ...]` or `{"points": ...}`), every
    /// `polyline` field and every ball chain (`centers` with `radii`) found
    /// anywhere in the tree.
    pub fn from_json(value: &Value) -> Result<Self, String> {
        let mut a = Artifact::default();
        if let Some(points) = as_points(value)? {
            a.points = points;
        } else {
            a.walk(value)?;
        }
        Ok(a)
    }

    fn walk(&mut self, value: &Value) -> Result<(), String> {
        match value {
            Value::Object(map) => {
                let chain = match (map.get("centers"), map.get("radii")) {
                    (Some(c), Some(r)) => Some((c, r)),
                    _ => None,
                };
                if let Some((c, r)) = chain {
                    let centers = as_points(c)?.ok_or("ball chain centers are not a list of points")?;
                    let radii: Vec<f64> = r
                        .as_array()
                        .and_then(|r| r.iter().map(Value::as_f64).collect())
                        .ok_or("ball chain radii are not a list of numbers")?;
                    if radii.len() != centers.len() {
                        return Err("ball chain has mismatched centers and radii".into());
                    }
                    if centers.len() >= 2 {
                        self.polylines.push(centers.clone());
                    }
                    self.balls.extend(centers.into_iter().zip(radii));
                }
                for (key, v) in map {
                    match key.as_str() {
                        "centers" | "radii" if chain.is_some() => {}
                        "polyline" => {
                            let line = as_points(v)?.ok_or("polyline is not a list of points")?;
                            if line.len() >= 2 {
                                self.polylines.push(line);
                            }
                        }
                        "points" => match as_points(v)? {
                            Some(p) => self.points.extend(p),
                            None => self.walk(v)?,
                        },
                        _ => self.walk(v)?,
                    }
                }
            }
            Value::Array(items) => {
                for v in items {
                    self.walk(v)?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// `Some` when `value` is an array of numeric pairs; errors on points of
/// another dimension.
fn as_points(value: &Value) -> Result<Option<Vec<[f64; 2]>>, String> {
    let Some(items) = value.as_array() else { return Ok(None) };
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let Some(coords) = item.as_array() else { return Ok(None) };
        let nums: Option<Vec<f64>> = coords.iter().map(Value::as_f64).collect();
        let Some(nums) = nums else { return Ok(None) };
        if nums.len() != 2 {
            return Err(format!("point with {} coordinates; plotting is 2-D only", nums.len()));
        }
        out.push([nums[0], nums[1]]);
    }
    Ok(Some(out))
}

struct Frame {
    min: [f64; 2],
    max_y: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(domain: &Domain) -> Self {
        let (lo, hi) = domain.bounding_box();
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let scale = (WIDTH - 2.0 * PAD) / span;
        let width = (hi[0] - lo[0]) * scale + 2.0 * PAD;
        let height = (hi[1] - lo[1]) * scale + 2.0 * PAD;
        Self { min: [lo[0], lo[1]], max_y: hi[1], scale, width, height }
    }

    fn x(&self, x: f64) -> f64 {
        PAD + (x - self.min[0]) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        PAD + (self.max_y - y) * self.scale
    }

    fn len(&self, r: f64) -> f64 {
        r * self.scale
    }
}

fn f(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" { "0.000".into() } else { s }
}

fn circle_subpath(frame: &Frame, c: &[f64], r: f64) -> String {
    let (cx, cy, rr) = (frame.x(c[0]), frame.y(c[1]), frame.len(r));
    format!(
        "M {} {} A {r} {r} 0 1 0 {} {} A {r} {r} 0 1 0 {} {} Z",
        f(cx - rr),
        f(cy),
        f(cx + rr),
        f(cy),
        f(cx - rr),
        f(cy),
        r = f(rr)
    )
}

fn outline(frame: &Frame, domain: &Domain) -> String {
    match domain.shape() {
        Shape::Ball { center, radius } => circle_subpath(frame, center.coords(), *radius),
        Shape::Box { min, max } => {
            let (a, b) = (min.coords(), max.coords());
            format!(
                "M {} {} L {} {} L {} {} L {} {} Z",
                f(frame.x(a[0])),
                f(frame.y(a[1])),
                f(frame.x(b[0])),
                f(frame.y(a[1])),
                f(frame.x(b[0])),
                f(frame.y(b[1])),
                f(frame.x(a[0])),
                f(frame.y(b[1]))
            )
        }
        Shape::Polygon { vertices } => {
            let mut d = String::new();
            for (i, v) in vertices.iter().enumerate() {
                let _ = write!(d, "{} {} {} ", if i == 0 { "M" } else { "L" }, f(frame.x(v[0])), f(frame.y(v[1])));
            }
            d.push('Z');
            d
        }
        Shape::UnionOfBalls { balls } => {
            balls.iter().map(|b| circle_subpath(frame, b.center.coords(), b.radius)).collect::<Vec<_>>().join(" ")
        }
    }
}

/// Renders the domain and artifacts; errors unless `d = 2`.
pub fn render_svg(domain: &Domain, artifacts: &[Artifact]) -> Result<String, CliError> {
    if domain.dim() != 2 {
        return Err(CliError::Input("plotting is 2-D only".into()));
    }
    let frame = Frame::new(domain);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = f(frame.width),
        h = f(frame.height)
    );
    let _ = writeln!(
        s,
        r##"  <path d="{}" fill="#eef2f7" fill-rule="nonzero" stroke="#1f2d3d" stroke-width="1.5"/>"##,
        outline(&frame, domain)
    );
    for a in artifacts {
        for (c, r) in &a.balls {
            let _ = writeln!(
                s,
                r##"  <circle cx="{}" cy="{}" r="{}" fill="none" stroke="#2a7ab0" stroke-width="1"/>"##,
                f(frame.x(c[0])),
                f(frame.y(c[1])),
                f(frame.len(*r))
            );
        }
        for line in &a.polylines {
            let pts: Vec<String> = line.iter().map(|p| format!("{},{}", f(frame.x(p[0])), f(frame.y(p[1])))).collect();
            let _ = writeln!(
                s,
                r##"  <polyline points="{}" fill="none" stroke="#c0392b" stroke-width="1.2"/>"##,
                pts.join(" ")
            );
        }
        for p in &a.points {
            let _ = writeln!(
                s,
                r##"  <rect x="{}" y="{}" width="{m}" height="{m}" fill="#111111"/>"##,
                f(frame.x(p[0]) - MARKER),
                f(frame.y(p[1]) - MARKER),
                m = f(2.0 * MARKER)
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
