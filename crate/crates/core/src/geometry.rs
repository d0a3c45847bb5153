//! Domains in `R^d`, their distance-to-complement, and the conservative
//! sampling primitives every bound is built on.
//!
//! Clearance means `dist(x, ∁D)`. It is 1-Lipschitz, and that is the only
//! property the certificates here rely on: along a segment `[a, b]` of
//! length `ℓ`, clearance never drops below `(f(a) + f(b) - ℓ) / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{HarnackError, Result};

/// A point of `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(HarnackError::InvalidArgument("point has no coordinates".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(HarnackError::InvalidArgument(format!(
                "point {coords:?} has non-finite coordinates"
            )));
        }
        Ok(Self(coords))
    }

    /// Planar point; panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        Self::new(vec![x, y]).expect("finite coordinates")
    }

    /// Spatial point; panics on non-finite input.
    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self::new(vec![x, y, z]).expect("finite coordinates")
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        distance(&self.0, &other.0)
    }

    /// `self + t (other - self)`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(lerp(&self.0, &other.0, t))
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = HarnackError;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

pub(crate) fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: Point,
    pub radius: f64,
}

/// Shape catalogue. All shapes are bounded open sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Ball { center: Point, radius: f64 },
    Box { min: Point, max: Point },
    /// Simple polygon, counterclockwise, `d = 2` only.
    Polygon { vertices: Vec<[f64; 2]> },
    /// Union of open balls whose overlap graph is connected.
    UnionOfBalls { balls: Vec<BallSpec> },
}

#[derive(Serialize, Deserialize)]
struct DomainFile {
    dim: usize,
    shape: Shape,
}

/// A bounded domain with exact (or, for ball unions, lower-bound)
/// distance-to-complement queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainFile", into = "DomainFile")]
pub struct Domain {
    dim: usize,
    shape: Shape,
}

impl TryFrom<DomainFile> for Domain {
    type Error = HarnackError;

    fn try_from(file: DomainFile) -> Result<Self> {
        Domain::new(file.dim, file.shape)
    }
}

impl From<Domain> for DomainFile {
    fn from(d: Domain) -> Self {
        DomainFile { dim: d.dim, shape: d.shape }
    }
}

impl Domain {
    pub fn new(dim: usize, shape: Shape) -> Result<Self> {
        if dim < 2 {
            return Err(HarnackError::InvalidDomain(format!("dimension {dim} < 2")));
        }
        let check_point = |p: &Point, what: &str| -> Result<()> {
            if p.dim() != dim {
                return Err(HarnackError::InvalidDomain(format!(
                    "{what} has dimension {}, domain has {dim}",
                    p.dim()
                )));
            }
            Ok(())
        };
        let check_radius = |r: f64| -> Result<()> {
            if !(r.is_finite() && r > 0.0) {
                return Err(HarnackError::InvalidDomain(format!("radius {r} must be positive")));
            }
            Ok(())
        };
        match &shape {
            Shape::Ball { center, radius } => {
                check_point(center, "ball center")?;
                check_radius(*radius)?;
            }
            Shape::Box { min, max } => {
                check_point(min, "box min corner")?;
                check_point(max, "box max corner")?;
                if min.coords().iter().zip(max.coords()).any(|(a, b)| a >= b) {
                    return Err(HarnackError::InvalidDomain(
                        "box min corner must be below max corner in every coordinate".into(),
                    ));
                }
            }
            Shape::Polygon { vertices } => {
                if dim != 2 {
                    return Err(HarnackError::InvalidDomain("polygons require dim = 2".into()));
                }
                validate_polygon(vertices)?;
            }
            Shape::UnionOfBalls { balls } => {
                if balls.is_empty() {
                    return Err(HarnackError::InvalidDomain("union of zero balls".into()));
                }
                for b in balls {
                    check_point(&b.center, "ball center")?;
                    check_radius(b.radius)?;
                }
                if !overlap_graph_connected(balls) {
                    return Err(HarnackError::InvalidDomain(
                        "union of balls is not connected".into(),
                    ));
                }
            }
        }
        Ok(Self { dim, shape })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::new(center.dim(), Shape::Ball { center, radius })
    }

    pub fn cuboid(min: Point, max: Point) -> Result<Self> {
        Self::new(min.dim(), Shape::Box { min, max })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(2, Shape::Polygon { vertices })
    }

    pub fn union_of_balls(balls: Vec<BallSpec>) -> Result<Self> {
        let dim = balls.first().map(|b| b.center.dim()).unwrap_or(0);
        Self::new(dim, Shape::UnionOfBalls { balls })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// `Some((center, radius))` when the domain is a single ball.
    pub fn as_ball(&self) -> Option<(&Point, f64)> {
        match &self.shape {
            Shape::Ball { center, radius } => Some((center, *radius)),
            _ => None,
        }
    }

    pub(crate) fn check_dim(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim {
            return Err(HarnackError::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        Ok(())
    }

    /// Distance from `x` to the complement; 0 outside or on the boundary.
    pub fn dist_to_complement(&self, x: &Point) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.clearance(x.coords()))
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        Ok(self.dist_to_complement(x)? > 0.0)
    }

    pub fn sample(&self, x: &Point) -> Result<ClearanceSample> {
        let clearance = self.dist_to_complement(x)?;
        Ok(ClearanceSample { point: x.clone(), clearance })
    }

    /// Errors unless `x` has the right dimension and is interior.
    pub fn require_interior(&self, x: &Point) -> Result<f64> {
        let c = self.dist_to_complement(x)?;
        if c > 0.0 {
            Ok(c)
        } else {
            Err(HarnackError::NotInterior { point: x.coords().to_vec() })
        }
    }

    /// Unchecked clearance on raw coordinates; callers guarantee dimension.
    pub(crate) fn clearance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => (radius - distance(x, center.coords())).max(0.0),
            Shape::Box { min, max } => {
                let mut depth = f64::INFINITY;
                for ((&xi, &lo), &hi) in x.iter().zip(min.coords()).zip(max.coords()) {
                    depth = depth.min(xi - lo).min(hi - xi);
                }
                depth.max(0.0)
            }
            Shape::Polygon { vertices } => {
                let p = [x[0], x[1]];
                if !point_in_polygon(&p, vertices) {
                    return 0.0;
                }
                polygon_edges(vertices)
                    .map(|(a, b)| point_segment_distance(&p, a, b))
                    .fold(f64::INFINITY, f64::min)
            }
            Shape::UnionOfBalls { balls } => balls
                .iter()
                .map(|b| b.radius - distance(x, b.center.coords()))
                .fold(0.0, f64::max),
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Ball { center, radius } => (
                center.coords().iter().map(|c| c - radius).collect(),
                center.coords().iter().map(|c| c + radius).collect(),
            ),
            Shape::Box { min, max } => (min.coords().to_vec(), max.coords().to_vec()),
            Shape::Polygon { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
            Shape::UnionOfBalls { balls } => {
                let mut lo = vec![f64::INFINITY; self.dim];
                let mut hi = vec![f64::NEG_INFINITY; self.dim];
                for b in balls {
                    for (k, c) in b.center.coords().iter().enumerate() {
                        lo[k] = lo[k].min(c - b.radius);
                        hi[k] = hi[k].max(c + b.radius);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Euclidean diameter of the domain.
    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Box { min, max } => distance(min.coords(), max.coords()),
            Shape::Polygon { vertices } => {
                let mut best = 0.0f64;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        best = best.max(distance(a, b));
                    }
                }
                best
            }
            Shape::UnionOfBalls { balls } => {
                let mut best = 0.0f64;
                for a in balls {
                    for b in balls {
                        best = best.max(distance(a.center.coords(), b.center.coords()) + a.radius + b.radius);
                    }
                }
                best
            }
        }
    }

    /// Smallest `R` with `D ⊂ B̄(center, R)`, for any center.
    pub(crate) fn enclosing_radius(&self, center: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center: c, radius } => distance(center, c.coords()) + radius,
            Shape::Box { min, max } => center
                .iter()
                .zip(min.coords().iter().zip(max.coords()))
                .map(|(x, (lo, hi))| {
                    let far = (x - lo).abs().max((hi - x).abs());
                    far * far
                })
                .sum::<f64>()
                .sqrt(),
            Shape::Polygon { vertices } => vertices
                .iter()
                .map(|v| distance(center, v))
                .fold(0.0, f64::max),
            Shape::UnionOfBalls { balls } => balls
                .iter()
                .map(|b| distance(center, b.center.coords()) + b.radius)
                .fold(0.0, f64::max),
        }
    }

    /// Radius of the smallest ball about an interior `center` containing the domain.
    pub fn enclosing_ball(&self, center: &Point) -> Result<f64> {
        self.require_interior(center)?;
        Ok(self.enclosing_radius(center.coords()))
    }
}

/// A point together with its clearance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClearanceSample {
    pub point: Point,
    pub clearance: f64,
}

/// A finite set of points. Interior-ness is checked against a domain with
/// [`PointSet::within`] or [`PointSet::check_interior`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    /// Builds a set and checks every point lies strictly inside `domain`.
    pub fn within(domain: &Domain, points: Vec<Point>) -> Result<Self> {
        let set = Self { points };
        set.check_interior(domain)?;
        Ok(set)
    }

    pub fn check_interior(&self, domain: &Domain) -> Result<()> {
        for p in &self.points {
            domain.require_interior(p)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }
}

/// Largest pairwise distance; 0 for a singleton.
pub fn diameter(set: &PointSet) -> Result<f64> {
    if set.is_empty() {
        return Err(HarnackError::EmptySet);
    }
    let mut best = 0.0f64;
    for (i, a) in set.points.iter().enumerate() {
        for b in &set.points[i + 1..] {
            best = best.max(a.distance(b));
        }
    }
    Ok(best)
}

/// Which hull of a point set to certify.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullKind {
    Convex,
    Segmental,
    Star(Point),
}

/// Certified clearance of a hull.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullClearance {
    /// Lower bound on `dist(H, ∁D)`; 0 when the hull is not certified inside.
    pub clearance: f64,
    /// False when a convex hull was requested in `d >= 3` and the segmental
    /// hull was certified instead.
    pub convex_certified: bool,
}

/// Lower bound on the minimum clearance along `[a, b]`. The value may be
/// non-positive, meaning the segment was not certified inside the domain.
///
/// The segment is bisected dyadically until pieces are no longer than
/// `resolution`; each piece combines its endpoint bound with its children,
/// so a finer resolution never lowers the result.
pub fn certified_segment_clearance(domain: &Domain, a: &Point, b: &Point, resolution: f64) -> Result<f64> {
    domain.check_dim(a)?;
    domain.check_dim(b)?;
    if !(resolution > 0.0) {
        return Err(HarnackError::InvalidArgument("resolution must be positive".into()));
    }
    Ok(segment_certificate(domain, a.coords(), b.coords(), resolution))
}

const MAX_BISECTION_DEPTH: u32 = 24;

pub(crate) fn segment_certificate(domain: &Domain, a: &[f64], b: &[f64], resolution: f64) -> f64 {
    let fa = domain.clearance(a);
    let fb = domain.clearance(b);
    let len = distance(a, b);
    let mut depth = 0u32;
    while depth < MAX_BISECTION_DEPTH && len / 2f64.powi(depth as i32) > resolution {
        depth += 1;
    }
    bisect(domain, a, b, fa, fb, depth)
}

fn bisect(domain: &Domain, a: &[f64], b: &[f64], fa: f64, fb: f64, depth: u32) -> f64 {
    let local = 0.5 * (fa + fb - distance(a, b));
    if depth == 0 {
        return local;
    }
    let m = midpoint(a, b);
    let fm = domain.clearance(&m);
    let left = bisect(domain, a, &m, fa, fm, depth - 1);
    let right = bisect(domain, &m, b, fm, fb, depth - 1);
    local.max(left.min(right))
}

/// Certified lower bound on `dist(H, ∁D)` for the requested hull of `set`.
pub fn hull_clearance(domain: &Domain, set: &PointSet, kind: &HullKind, resolution: f64) -> Result<HullClearance> {
    if set.is_empty() {
        return Err(HarnackError::EmptySet);
    }
    if !(resolution > 0.0) {
        return Err(HarnackError::InvalidArgument("resolution must be positive".into()));
    }
    for p in set.iter() {
        domain.check_dim(p)?;
    }
    let mut convex_certified = true;
    let raw = match kind {
        HullKind::Segmental => segmental(domain, set, resolution),
        HullKind::Star(z) => {
            domain.require_interior(z)?;
            set.iter()
                .map(|x| segment_certificate(domain, z.coords(), x.coords(), resolution))
                .fold(f64::INFINITY, f64::min)
        }
        HullKind::Convex if domain.dim() == 2 => convex_2d(domain, set, resolution),
        HullKind::Convex => {
            convex_certified = false;
            segmental(domain, set, resolution)
        }
    };
    Ok(HullClearance { clearance: if raw > 0.0 { raw } else { 0.0 }, convex_certified })
}

fn segmental(domain: &Domain, set: &PointSet, resolution: f64) -> f64 {
    let pts = &set.points;
    let mut best = pts
        .iter()
        .map(|p| domain.clearance(p.coords()))
        .fold(f64::INFINITY, f64::min);
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.min(segment_certificate(domain, a.coords(), b.coords(), resolution));
        }
    }
    best
}

fn convex_2d(domain: &Domain, set: &PointSet, resolution: f64) -> f64 {
    let planar: Vec<[f64; 2]> = set.iter().map(|p| [p.coords()[0], p.coords()[1]]).collect();
    let hull = convex_hull_2d(&planar);
    if hull.len() == 1 {
        return domain.clearance(&hull[0]);
    }
    // The minimum over a hull lying inside D is attained on its boundary.
    let mut best = f64::INFINITY;
    for i in 0..hull.len() {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        best = best.min(segment_certificate(domain, a, b, resolution));
        if hull.len() == 2 {
            break;
        }
    }
    // Ball unions may have holes, so the interior needs its own certificate.
    if best > 0.0 && hull.len() >= 3 && matches!(domain.shape(), Shape::UnionOfBalls { .. }) {
        let inside = (1..hull.len() - 1)
            .all(|i| triangle_inside(domain, &hull[0], &hull[i], &hull[i + 1], 12));
        if !inside {
            return 0.0;
        }
    }
    best
}

/// Certifies a closed triangle lies in the domain by covering it with balls
/// about centroids of recursively subdivided triangles.
fn triangle_inside(domain: &Domain, a: &[f64; 2], b: &[f64; 2], c: &[f64; 2], depth: u32) -> bool {
    let g = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
    let reach = distance(&g, a).max(distance(&g, b)).max(distance(&g, c));
    if domain.clearance(&g) > reach {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let mid = |p: &[f64; 2], q: &[f64; 2]| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
    triangle_inside(domain, a, &ab, &ca, depth - 1)
        && triangle_inside(domain, &ab, b, &bc, depth - 1)
        && triangle_inside(domain, &ca, &bc, c, depth - 1)
        && triangle_inside(domain, &ab, &bc, &ca, depth - 1)
}

fn cross(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Returns the hull counterclockwise without
/// collinear points; one or two points for degenerate input.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_edges(vertices: &[[f64; 2]]) -> impl Iterator<Item = (&[f64; 2], &[f64; 2])> {
    let n = vertices.len();
    (0..n).map(move |i| (&vertices[i], &vertices[(i + 1) % n]))
}

fn point_segment_distance(p: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * dx, a[1] + t * dy];
    distance(p, &q)
}

/// Even-odd crossing test. Points on the boundary may go either way; callers
/// combine it with the edge distance, which is 0 there.
fn point_in_polygon(p: &[f64; 2], vertices: &[[f64; 2]]) -> bool {
    let mut inside = false;
    for (a, b) in polygon_edges(vertices) {
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn signed_area(vertices: &[[f64; 2]]) -> f64 {
    0.5 * polygon_edges(vertices)
        .map(|(a, b)| a[0] * b[1] - b[0] * a[1])
        .sum::<f64>()
}

fn segments_intersect(p1: &[f64; 2], p2: &[f64; 2], q1: &[f64; 2], q2: &[f64; 2]) -> bool {
    let on_segment = |a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]| {
        c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
    };
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn validate_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    let n = vertices.len();
    if n < 3 {
        return Err(HarnackError::InvalidDomain("polygon needs at least 3 vertices".into()));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(HarnackError::InvalidDomain("polygon has non-finite vertices".into()));
    }
    for i in 0..n {
        if vertices[i] == vertices[(i + 1) % n] {
            return Err(HarnackError::InvalidDomain(format!("polygon has a repeated vertex at {i}")));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(&vertices[i], &vertices[(i + 1) % n], &vertices[j], &vertices[(j + 1) % n]) {
                return Err(HarnackError::InvalidDomain(format!(
                    "polygon is not simple: edges {i} and {j} intersect"
                )));
            }
        }
    }
    if signed_area(vertices) <= 0.0 {
        return Err(HarnackError::InvalidDomain("polygon vertices must be counterclockwise".into()));
    }
    Ok(())
}

fn overlap_graph_connected(balls: &[BallSpec]) -> bool {
    let n = balls.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j]
                && balls[i].center.distance(&balls[j].center) < balls[i].radius + balls[j].radius
            {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_disk() -> Domain {
        Domain::ball(Point::origin(2), 1.0).unwrap()
    }

    fn square() -> Domain {
        Domain::cuboid(Point::xy(-1.0, -1.0), Point::xy(1.0, 1.0)).unwrap()
    }

    fn l_shape() -> Domain {
        Domain::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap()
    }

    #[test]
    fn clearance_examples() {
        assert_relative_eq!(unit_disk().dist_to_complement(&Point::xy(0.4, 0.0)).unwrap(), 0.6, epsilon = 1e-15);
        assert_eq!(square().dist_to_complement(&Point::xy(0.5, 0.0)).unwrap(), 0.5);
        assert_eq!(unit_disk().dist_to_complement(&Point::xy(2.0, 0.0)).unwrap(), 0.0);
        assert_eq!(unit_disk().dist_to_complement(&Point::origin(2)).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = unit_disk().dist_to_complement(&Point::xyz(0.0, 0.0, 0.0)).unwrap_err();
        assert_eq!(err, HarnackError::DimensionMismatch { expected: 2, found: 3 });
        assert!(unit_disk().contains(&Point::xyz(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn contains_excludes_boundary() {
        assert!(unit_disk().contains(&Point::xy(0.0, 0.0)).unwrap());
        assert!(!unit_disk().contains(&Point::xy(1.0, 0.0)).unwrap());
        assert!(square().contains(&Point::xy(0.99, -0.99)).unwrap());
        assert!(!square().contains(&Point::xy(1.0, 0.0)).unwrap());
    }

    #[test]
    fn polygon_clearance() {
        let d = l_shape();
        assert_relative_eq!(d.dist_to_complement(&Point::xy(0.5, 0.5)).unwrap(), 0.5);
        assert_relative_eq!(d.dist_to_complement(&Point::xy(1.5, 0.5)).unwrap(), 0.5);
        // reflex corner at (1, 1)
        assert_relative_eq!(d.dist_to_complement(&Point::xy(0.9, 0.9)).unwrap(), 0.02f64.sqrt(), epsilon = 1e-12);
        assert_eq!(d.dist_to_complement(&Point::xy(1.5, 1.5)).unwrap(), 0.0);
        assert_eq!(d.dist_to_complement(&Point::xy(1.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn union_clearance_is_max_depth() {
        let d = Domain::union_of_balls(vec![
            BallSpec { center: Point::xy(0.0, 0.0), radius: 1.0 },
            BallSpec { center: Point::xy(1.5, 0.0), radius: 1.0 },
        ])
        .unwrap();
        assert_relative_eq!(d.dist_to_complement(&Point::xy(0.2, 0.0)).unwrap(), 0.8);
        assert_relative_eq!(d.dist_to_complement(&Point::xy(1.6, 0.0)).unwrap(), 0.9);
        assert_eq!(d.dist_to_complement(&Point::xy(3.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_invalid_domains() {
        assert!(Domain::ball(Point::xy(0.0, 0.0), 0.0).is_err());
        assert!(Domain::ball(Point::new(vec![0.0]).unwrap(), 1.0).is_err());
        assert!(Domain::cuboid(Point::xy(1.0, 0.0), Point::xy(0.0, 1.0)).is_err());
        // clockwise
        assert!(Domain::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
        // bow tie
        assert!(Domain::polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Domain::new(3, Shape::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] }).is_err());
        let far_apart = Domain::union_of_balls(vec![
            BallSpec { center: Point::xy(0.0, 0.0), radius: 1.0 },
            BallSpec { center: Point::xy(2.0, 0.0), radius: 1.0 },
        ]);
        assert!(far_apart.is_err());
    }

    #[test]
    fn domain_json_schema() {
        let json = r#"{"dim":2,"shape":{"type":"polygon","vertices":[[0,0],[1,0],[0,1]]}}"#;
        let d: Domain = serde_json::from_str(json).unwrap();
        assert_eq!(d.dim(), 2);
        let bad = r#"{"dim":2,"shape":{"type":"ball","center":[0,0],"radius":-1}}"#;
        assert!(serde_json::from_str::<Domain>(bad).is_err());
        let back: Domain = serde_json::from_str(&serde_json::to_string(&square()).unwrap()).unwrap();
        assert_eq!(back, square());
    }

    #[test]
    fn diameter_examples() {
        let s = |pts: Vec<Point>| PointSet::new(pts);
        assert_eq!(diameter(&s(vec![Point::xy(0.0, 0.0)])).unwrap(), 0.0);
        assert_eq!(diameter(&s(vec![Point::xy(-0.5, 0.0), Point::xy(0.5, 0.0)])).unwrap(), 1.0);
        assert_eq!(
            diameter(&s(vec![Point::xy(0.0, 0.0), Point::xy(3.0, 0.0), Point::xy(0.0, 4.0)])).unwrap(),
            5.0
        );
        assert_eq!(diameter(&s(vec![])).unwrap_err(), HarnackError::EmptySet);
    }

    #[test]
    fn hull_clearance_examples() {
        let pair = PointSet::new(vec![Point::xy(-0.5, 0.0), Point::xy(0.5, 0.0)]);
        let res = 1e-3;
        let seg = hull_clearance(&square(), &pair, &HullKind::Segmental, res).unwrap();
        assert!(seg.clearance <= 0.5 && seg.clearance >= 0.5 - res / 2.0, "{seg:?}");

        let centre = PointSet::new(vec![Point::origin(2)]);
        let c = hull_clearance(&unit_disk(), &centre, &HullKind::Convex, res).unwrap();
        assert_eq!(c.clearance, 1.0);
        assert!(c.convex_certified);

        let star = hull_clearance(&unit_disk(), &pair, &HullKind::Star(Point::origin(2)), res).unwrap();
        assert!(star.clearance <= 0.5 && star.clearance >= 0.5 - res / 2.0, "{star:?}");

        let outside = HullKind::Star(Point::xy(3.0, 0.0));
        assert!(hull_clearance(&unit_disk(), &pair, &outside, res).is_err());
        assert_eq!(
            hull_clearance(&unit_disk(), &PointSet::new(vec![]), &HullKind::Segmental, res).unwrap_err(),
            HarnackError::EmptySet
        );
    }

    #[test]
    fn hull_leaving_domain_is_rejected() {
        // segment crosses the missing quadrant of the L
        let pts = PointSet::new(vec![Point::xy(1.5, 0.5), Point::xy(0.5, 1.5)]);
        let h = hull_clearance(&l_shape(), &pts, &HullKind::Segmental, 1e-3).unwrap();
        assert_eq!(h.clearance, 0.0);
        let z = Point::xy(0.5, 0.5);
        let h = hull_clearance(&l_shape(), &pts, &HullKind::Star(z), 1e-3).unwrap();
        assert!(h.clearance > 0.4);
    }

    #[test]
    fn convex_hull_over_ring_of_balls_is_rejected() {
        // eight balls around a hole at the origin
        let balls = (0..8)
            .map(|k| {
                let t = k as f64 * std::f64::consts::FRAC_PI_4;
                BallSpec { center: Point::xy(2.0 * t.cos(), 2.0 * t.sin()), radius: 1.0 }
            })
            .collect();
        let ring = Domain::union_of_balls(balls).unwrap();
        let pts = PointSet::new(
            [0.0, 2.0, 4.0, 6.0]
                .iter()
                .map(|k: &f64| {
                    let t = k * std::f64::consts::FRAC_PI_4;
                    Point::xy(2.0 * t.cos(), 2.0 * t.sin())
                })
                .collect(),
        );
        let h = hull_clearance(&ring, &pts, &HullKind::Convex, 1e-2).unwrap();
        assert_eq!(h.clearance, 0.0);
        let filled = Domain::union_of_balls(vec![
            BallSpec { center: Point::xy(0.0, 0.0), radius: 2.0 },
            BallSpec { center: Point::xy(1.0, 0.0), radius: 2.0 },
        ])
        .unwrap();
        let tri = PointSet::new(vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.5, 0.5)]);
        assert!(hull_clearance(&filled, &tri, &HullKind::Convex, 1e-2).unwrap().clearance > 1.0);
    }

    #[test]
    fn convex_falls_back_in_three_dimensions() {
        let cube = Domain::cuboid(Point::xyz(-1.0, -1.0, -1.0), Point::xyz(1.0, 1.0, 1.0)).unwrap();
        let pts = PointSet::new(vec![Point::xyz(0.0, 0.0, 0.0), Point::xyz(0.5, 0.0, 0.0)]);
        let h = hull_clearance(&cube, &pts, &HullKind::Convex, 1e-3).unwrap();
        assert!(!h.convex_certified);
        assert!(h.clearance > 0.49);
    }

    #[test]
    fn monotone_chain_hull() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]];
        let hull = convex_hull_2d(&pts);
        assert_eq!(hull, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(convex_hull_2d(&[[1.0, 1.0], [1.0, 1.0]]), vec![[1.0, 1.0]]);
    }

    #[test]
    fn enclosing_ball_examples() {
        assert_eq!(unit_disk().enclosing_ball(&Point::origin(2)).unwrap(), 1.0);
        assert_relative_eq!(square().enclosing_ball(&Point::origin(2)).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(square().enclosing_ball(&Point::xy(0.5, 0.0)).unwrap(), 3.25f64.sqrt(), epsilon = 1e-15);
        assert!(square().enclosing_ball(&Point::xy(2.0, 0.0)).is_err());
    }

    #[test]
    fn enclosing_ball_covers_sampled_boundary() {
        let domains = [unit_disk(), square(), l_shape()];
        for d in &domains {
            let center = match d.shape() {
                Shape::Polygon { .. } => Point::xy(0.5, 0.5),
                _ => Point::xy(0.3, -0.2),
            };
            let r = d.enclosing_ball(&center).unwrap();
            let (lo, hi) = d.bounding_box();
            // every point with zero clearance but a neighbour inside is a boundary sample
            let n = 200;
            for i in 0..=n {
                for j in 0..=n {
                    let p = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64,
                    ];
                    if d.clearance(&p) > 0.0 {
                        assert!(distance(&p, center.coords()) <= r + 1e-12);
                    }
                }
            }
            if let Shape::Polygon { vertices } = d.shape() {
                for v in vertices {
                    assert!(distance(v, center.coords()) <= r);
                }
            }
        }
    }

    fn any_domain() -> impl Strategy<Value = Domain> {
        prop_oneof![
            Just(unit_disk()),
            Just(square()),
            Just(l_shape()),
            Just(
                Domain::union_of_balls(vec![
                    BallSpec { center: Point::xy(0.0, 0.0), radius: 1.0 },
                    BallSpec { center: Point::xy(1.2, 0.3), radius: 0.7 },
                ])
                .unwrap()
            ),
        ]
    }

    proptest! {
        #[test]
        fn clearance_is_one_lipschitz(
            d in any_domain(),
            a in prop::array::uniform2(-2.5f64..2.5),
            b in prop::array::uniform2(-2.5f64..2.5),
        ) {
            let fa = d.clearance(&a);
            let fb = d.clearance(&b);
            prop_assert!((fa - fb).abs() <= distance(&a, &b) + 1e-12);
        }

        #[test]
        fn finer_resolution_never_loosens(
            d in any_domain(),
            a in prop::array::uniform2(-0.9f64..0.9),
            b in prop::array::uniform2(-0.9f64..0.9),
            coarse in 0.01f64..0.5,
            shrink in 0.05f64..1.0,
        ) {
            let coarse_c = segment_certificate(&d, &a, &b, coarse);
            let fine_c = segment_certificate(&d, &a, &b, coarse * shrink);
            prop_assert!(fine_c >= coarse_c);
        }

        #[test]
        fn segment_certificate_is_a_lower_bound(
            d in any_domain(),
            a in prop::array::uniform2(-1.5f64..1.5),
            b in prop::array::uniform2(-1.5f64..1.5),
        ) {
            let cert = segment_certificate(&d, &a, &b, 0.05);
            for k in 0..=500 {
                let p = lerp(&a, &b, k as f64 / 500.0);
                prop_assert!(d.clearance(&p) >= cert - 1e-12);
            }
        }

        #[test]
        fn convex_hull_clearance_at_most_segmental(
            pts in prop::collection::vec(prop::array::uniform2(-0.6f64..0.6), 1..6),
        ) {
            let d = square();
            let set = PointSet::new(pts.iter().map(|p| Point::xy(p[0], p[1])).collect());
            let res = 1e-2;
            let convex = hull_clearance(&d, &set, &HullKind::Convex, res).unwrap().clearance;
            let seg = hull_clearance(&d, &set, &HullKind::Segmental, res).unwrap().clearance;
            prop_assert!(convex <= seg + res);
        }
    }
}
