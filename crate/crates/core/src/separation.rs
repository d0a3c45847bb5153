//! Separation exponents and the Harnack bounds they certify.
//!
//! `sep(x, y) = |x − y| / (dist(x, ∁D) + dist(y, ∁D))`. A pair with
//! `sep < 1` is linked by two overlapping inscribed balls, which bounds its
//! Harnack distance; chains of such links multiply.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnackError, Result};
use crate::geometry::{distance, segment_certificate, Domain, Point, PointSet};
use crate::grid::{ball_offsets, PathGraph};

/// Neighbour radius of the minimax graph, in grid steps.
pub const DEFAULT_NEIGHBOR_STEPS: f64 = 4.0;

pub(crate) fn sep_value(x: &[f64], y: &[f64], cx: f64, cy: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    distance(x, y) / (cx + cy)
}

/// Separation of two interior points.
pub fn pair_separation(domain: &Domain, x: &Point, y: &Point) -> Result<f64> {
    let cx = domain.require_interior(x)?;
    let cy = domain.require_interior(y)?;
    Ok(sep_value(x.coords(), y.coords(), cx, cy))
}

/// Largest separation over consecutive points.
pub fn sequence_separation(domain: &Domain, points: &[Point]) -> Result<f64> {
    if points.len() < 2 {
        return Err(HarnackError::InvalidArgument("a sequence needs at least two points".into()));
    }
    let clearances: Vec<f64> = points.iter().map(|p| domain.require_interior(p)).collect::<Result<_>>()?;
    Ok(points
        .windows(2)
        .zip(clearances.windows(2))
        .map(|(p, c)| sep_value(p[0].coords(), p[1].coords(), c[0], c[1]))
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairBoundVariant {
    /// `2^{2d} / (1 − q)^{2(d−1)}`
    Stated,
    /// `(2^{d−2} (3 + q) / (1 − q)^{d−1})²`, never larger than `Stated`.
    ProofSharp,
}

/// Single-link bound as a function of the separation `q < 1`.
pub fn pair_bound_from_q(q: f64, dim: usize, variant: PairBoundVariant) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(HarnackError::InvalidArgument(format!("separation {q} must be >= 0")));
    }
    if !(q < 1.0) {
        return Err(HarnackError::SeparationTooLarge { q });
    }
    let d = dim as i32;
    Ok(match variant {
        PairBoundVariant::Stated => 2f64.powi(2 * d) / (1.0 - q).powi(2 * (d - 1)),
        PairBoundVariant::ProofSharp => {
            let half = 2f64.powi(d - 2) * (3.0 + q) / (1.0 - q).powi(d - 1);
            half * half
        }
    })
}

/// Upper bound on `dist_har(x, y)` from a single link.
pub fn pair_bound(domain: &Domain, x: &Point, y: &Point, variant: PairBoundVariant) -> Result<f64> {
    let q = pair_separation(domain, x, y)?;
    pair_bound_from_q(q, domain.dim(), variant)
}

/// Product of single-link bounds along a polyline; bounds `dist_har(first, last)`.
pub fn chain_bound(domain: &Domain, points: &[Point], variant: PairBoundVariant) -> Result<f64> {
    if points.len() < 2 {
        return Err(HarnackError::InvalidArgument("a chain needs at least two points".into()));
    }
    let mut product = 1.0;
    for (index, w) in points.windows(2).enumerate() {
        let q = pair_separation(domain, &w[0], &w[1])?;
        if !(q < 1.0) {
            return Err(HarnackError::BadLink { index, q });
        }
        product *= pair_bound_from_q(q, domain.dim(), variant)?;
    }
    Ok(product)
}

/// `2^{2dl} / (1 − q)^{(d−1)l}` for a set with separation `q` at hop length `l`.
pub fn set_bound_from_q(q: f64, hops: usize, dim: usize) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(HarnackError::InvalidArgument(format!("separation {q} must be >= 0")));
    }
    if !(q < 1.0) {
        return Err(HarnackError::SetSeparationTooLarge { q });
    }
    if hops == 0 {
        return Err(HarnackError::InvalidArgument("hops must be at least 1".into()));
    }
    let (d, l) = (dim as f64, hops as f64);
    Ok(2f64.powf(2.0 * d * l) / (1.0 - q).powf((d - 1.0) * l))
}

/// Upper bound on `sup_{x ∈ S} dist_har(x0, x)` from a solver result.
pub fn set_harnack_bound(result: &SeparationResult, hops: usize, dim: usize) -> Result<f64> {
    set_bound_from_q(result.value, hops, dim)
}

/// Checks `|x_k − x_{k+1}| <= q (r_k + r_{k+1})` on every link and that the
/// balls `B_{x_k}(r_k)` and the segments lie in the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetweenReport {
    pub passed: bool,
    pub first_violation: Option<usize>,
    pub link_separations: Vec<f64>,
    pub radii: Vec<f64>,
    pub balls_inside: bool,
    pub segments_inside: bool,
}

pub fn verify_between_conditions(domain: &Domain, polyline: &[Point], q: f64) -> Result<BetweenReport> {
    if polyline.is_empty() {
        return Err(HarnackError::InvalidArgument("empty polyline".into()));
    }
    let radii: Vec<f64> = polyline.iter().map(|p| domain.require_interior(p)).collect::<Result<_>>()?;
    let mut first_violation = None;
    let mut link_separations = Vec::with_capacity(polyline.len().saturating_sub(1));
    let mut segments_inside = true;
    for (k, w) in polyline.windows(2).enumerate() {
        let (a, b) = (w[0].coords(), w[1].coords());
        let len = distance(a, b);
        link_separations.push(sep_value(a, b, radii[k], radii[k + 1]));
        if len > q * (radii[k] + radii[k + 1]) && first_violation.is_none() {
            first_violation = Some(k);
        }
        // covered by the two inscribed balls, else fall back to sampling
        let covered = len < radii[k] + radii[k + 1]
            || segment_certificate(domain, a, b, 1e-3 * len.max(f64::MIN_POSITIVE)) > 0.0;
        segments_inside &= covered;
    }
    // B_{x_k}(r_k) with r_k the clearance is inside by construction; r_k > 0 was checked
    let balls_inside = radii.iter().all(|&r| r > 0.0);
    Ok(BetweenReport {
        passed: first_violation.is_none() && balls_inside && segments_inside,
        first_violation,
        link_separations,
        radii,
        balls_inside,
        segments_inside,
    })
}

/// Input of the set-separation solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationQuery {
    pub start: Point,
    pub targets: PointSet,
    pub hops: usize,
    pub grid_step: f64,
    /// Lattice nodes closer than this are linked; defaults to
    /// `4 × grid_step`. `inf` links every pair of nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbor_radius: Option<f64>,
}

impl SeparationQuery {
    pub fn new(start: Point, targets: PointSet, hops: usize, grid_step: f64) -> Self {
        Self { start, targets, hops, grid_step, neighbor_radius: None }
    }

    pub fn with_neighbor_radius(mut self, radius: f64) -> Self {
        self.neighbor_radius = Some(radius);
        self
    }

    pub fn neighbor_radius(&self) -> f64 {
        self.neighbor_radius.unwrap_or(DEFAULT_NEIGHBOR_STEPS * self.grid_step)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSeparation {
    pub target: Point,
    #[serde(with = "crate::serde_num")]
    pub value: f64,
    /// From the start to the target, at most `hops` segments; empty when unreachable.
    pub polyline: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationParameters {
    pub hops: usize,
    pub grid_step: f64,
    #[serde(with = "crate::serde_num")]
    pub neighbor_radius: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub start: Point,
    #[serde(with = "crate::serde_num")]
    pub value: f64,
    pub per_target: Vec<TargetSeparation>,
    pub parameters: SeparationParameters,
    pub diagnostics: Vec<String>,
}

/// Node set of the minimax solver: interior lattice nodes, then the start,
/// then the targets in order.
pub fn separation_nodes(domain: &Domain, query: &SeparationQuery) -> Result<Vec<Point>> {
    let (graph, _, _) = separation_graph(domain, query)?;
    graph.points().iter().map(|p| Point::new(p.clone())).collect()
}

fn separation_graph(domain: &Domain, query: &SeparationQuery) -> Result<(PathGraph, usize, Vec<usize>)> {
    if query.hops < 1 {
        return Err(HarnackError::InvalidArgument("hops must be at least 1".into()));
    }
    let radius = query.neighbor_radius();
    if !(radius > 0.0) {
        return Err(HarnackError::InvalidArgument("neighbour radius must be positive".into()));
    }
    let c0 = domain.require_interior(&query.start)?;
    let target_clearance: Vec<f64> =
        query.targets.iter().map(|p| domain.require_interior(p)).collect::<Result<_>>()?;
    let mut graph = PathGraph::build(domain, query.grid_step)?;
    let start = graph.push_extra(query.start.coords().to_vec(), c0);
    let targets = query
        .targets
        .iter()
        .zip(target_clearance)
        .map(|(p, c)| graph.push_extra(p.coords().to_vec(), c))
        .collect();
    Ok((graph, start, targets))
}

/// Adjacency in compressed rows, each row sorted by neighbour id and
/// including the zero-cost self edge.
struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    costs: Vec<f64>,
}

fn build_adjacency(graph: &PathGraph, radius: f64) -> Adjacency {
    let n = graph.len();
    let lattice = graph.lattice_len();
    let complete = radius.is_infinite() || radius / graph.step() > 64.0;
    let lattice_offsets = if complete { Vec::new() } else { ball_offsets(graph.dim(), radius / graph.step()) };
    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut ids: Vec<usize> = if complete || v >= lattice {
                (0..n).collect()
            } else {
                let mut ids: Vec<usize> = graph.lattice_neighbors(v, &lattice_offsets).collect();
                ids.push(v);
                ids.extend(lattice..n);
                ids
            };
            ids.sort_unstable();
            ids.dedup();
            let mut keep = Vec::with_capacity(ids.len());
            let mut costs = Vec::with_capacity(ids.len());
            for u in ids {
                let cost = sep_value(graph.point(u), graph.point(v), graph.clearance(u), graph.clearance(v));
                if u == v || cost < 1.0 {
                    keep.push(u);
                    costs.push(if u == v { 0.0 } else { cost });
                }
            }
            (keep, costs)
        })
        .collect();
    let mut adj = Adjacency { offsets: Vec::with_capacity(n + 1), neighbors: Vec::new(), costs: Vec::new() };
    adj.offsets.push(0);
    for (ids, costs) in rows {
        adj.neighbors.extend(ids);
        adj.costs.extend(costs);
        adj.offsets.push(adj.neighbors.len());
    }
    adj
}

/// Hop-limited minimax dynamic program:
/// `f_0 = 0` at the start and `inf` elsewhere,
/// `f_k(v) = min_u max(f_{k−1}(u), sep(u, v))` over edges with `sep < 1`,
/// including the zero-cost self edge. Ties keep the smallest `u`.
pub fn set_separation(domain: &Domain, query: &SeparationQuery) -> Result<SeparationResult> {
    let (graph, start, targets) = separation_graph(domain, query)?;
    let adj = build_adjacency(&graph, query.neighbor_radius());
    let n = graph.len();

    let mut f = vec![f64::INFINITY; n];
    f[start] = 0.0;
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(query.hops);
    for _ in 0..query.hops {
        let layer: Vec<(f64, usize)> = (0..n)
            .into_par_iter()
            .map(|v| {
                let row = adj.offsets[v]..adj.offsets[v + 1];
                let mut best = (f64::INFINITY, usize::MAX);
                for (&u, &cost) in adj.neighbors[row.clone()].iter().zip(&adj.costs[row]) {
                    let candidate = f[u].max(cost);
                    if candidate < best.0 {
                        best = (candidate, u);
                    }
                }
                best
            })
            .collect();
        f = layer.iter().map(|&(value, _)| value).collect();
        parents.push(layer.into_iter().map(|(_, u)| u).collect());
    }

    let mut diagnostics = Vec::new();
    let per_target: Vec<TargetSeparation> = targets
        .iter()
        .zip(query.targets.iter())
        .map(|(&t, target)| {
            let value = f[t];
            if value.is_infinite() {
                diagnostics.push(format!(
                    "target {:?} unreachable within {} hops under sep < 1",
                    target.coords(),
                    query.hops
                ));
                return TargetSeparation { target: target.clone(), value, polyline: Vec::new() };
            }
            let mut ids = vec![t];
            for layer in parents.iter().rev() {
                ids.push(layer[*ids.last().unwrap()]);
            }
            ids.reverse();
            debug_assert_eq!(ids[0], start);
            ids.dedup_by(|a, b| graph.point(*a) == graph.point(*b));
            let mut polyline: Vec<Point> =
                ids.iter().map(|&id| Point::new(graph.point(id).to_vec()).expect("finite node")).collect();
            if polyline.len() == 1 {
                polyline.push(target.clone());
            }
            TargetSeparation { target: target.clone(), value, polyline }
        })
        .collect();

    let value = per_target.iter().map(|t| t.value).fold(0.0, f64::max);
    Ok(SeparationResult {
        start: query.start.clone(),
        value,
        per_target,
        parameters: SeparationParameters {
            hops: query.hops,
            grid_step: query.grid_step,
            neighbor_radius: query.neighbor_radius(),
            nodes: n,
        },
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_disk() -> Domain {
        Domain::ball(Point::origin(2), 1.0).unwrap()
    }

    fn pt(x: f64, y: f64) -> Point {
        Point::xy(x, y)
    }

    #[test]
    fn pair_separation_examples() {
        let d = unit_disk();
        assert_eq!(pair_separation(&d, &pt(0.3, 0.1), &pt(0.3, 0.1)).unwrap(), 0.0);
        assert_relative_eq!(pair_separation(&d, &pt(-0.4, 0.0), &pt(0.4, 0.0)).unwrap(), 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(pair_separation(&d, &pt(-0.5, 0.0), &pt(0.5, 0.0)).unwrap(), 1.0, max_relative = 1e-15);
        assert!(pair_separation(&d, &pt(1.0, 0.0), &pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn pair_bound_examples() {
        let d = unit_disk();
        let x = pt(0.2, 0.2);
        assert_eq!(pair_bound(&d, &x, &x, PairBoundVariant::Stated).unwrap(), 16.0);
        assert_eq!(pair_bound(&d, &x, &x, PairBoundVariant::ProofSharp).unwrap(), 9.0);
        let (a, b) = (pt(-0.4, 0.0), pt(0.4, 0.0));
        assert_relative_eq!(pair_bound(&d, &a, &b, PairBoundVariant::Stated).unwrap(), 144.0, max_relative = 1e-12);
        assert_relative_eq!(pair_bound(&d, &a, &b, PairBoundVariant::ProofSharp).unwrap(), 121.0, max_relative = 1e-12);
        let err = pair_bound(&d, &pt(-0.5, 0.0), &pt(0.5, 0.0), PairBoundVariant::Stated).unwrap_err();
        assert!(matches!(err, HarnackError::SeparationTooLarge { .. }));
    }

    #[test]
    fn sequence_examples() {
        let d = unit_disk();
        let x = pt(0.1, 0.0);
        assert_eq!(sequence_separation(&d, &[x.clone(), x.clone(), x.clone()]).unwrap(), 0.0);
        let three = [pt(-0.4, 0.0), pt(0.0, 0.0), pt(0.4, 0.0)];
        assert_relative_eq!(sequence_separation(&d, &three).unwrap(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(sequence_separation(&d, &[pt(-0.4, 0.0), pt(0.4, 0.0)]).unwrap(), 2.0 / 3.0, max_relative = 1e-15);
        assert!(sequence_separation(&d, &[pt(-0.4, 0.0), pt(2.0, 0.0)]).is_err());
        assert!(sequence_separation(&d, &[pt(-0.4, 0.0)]).is_err());
    }

    #[test]
    fn set_bound_examples() {
        assert_eq!(set_bound_from_q(0.0, 1, 2).unwrap(), 16.0);
        assert_relative_eq!(set_bound_from_q(0.5, 2, 2).unwrap(), 1024.0, max_relative = 1e-12);
        assert_relative_eq!(set_bound_from_q(0.25, 2, 3).unwrap(), 4096.0 / 0.75f64.powi(4), max_relative = 1e-12);
        assert!(matches!(set_bound_from_q(1.0, 2, 2).unwrap_err(), HarnackError::SetSeparationTooLarge { .. }));
        // close to 1: huge but finite
        assert!(set_bound_from_q(1.0 - 1e-12, 1, 2).unwrap().is_finite());
    }

    #[test]
    fn chain_bound_examples() {
        let d = unit_disk();
        let x = pt(0.3, 0.0);
        assert_eq!(chain_bound(&d, &[x.clone(), x.clone()], PairBoundVariant::Stated).unwrap(), 16.0);
        let three = [pt(-0.4, 0.0), pt(0.0, 0.0), pt(0.4, 0.0)];
        let v = chain_bound(&d, &three, PairBoundVariant::ProofSharp).unwrap();
        assert_relative_eq!(v, (13.0f64 / 3.0).powi(4), max_relative = 1e-12);
        assert!(v >= 49.0 / 9.0);
        let err = chain_bound(&d, &[pt(-0.2, 0.0), pt(-0.5, 0.0), pt(0.5, 0.0)], PairBoundVariant::Stated).unwrap_err();
        assert!(matches!(err, HarnackError::BadLink { index: 1, .. }));
    }

    #[test]
    fn between_conditions_examples() {
        let d = unit_disk();
        let one = verify_between_conditions(&d, &[pt(0.1, 0.1)], 0.0).unwrap();
        assert!(one.passed);
        let link = [pt(-0.4, 0.0), pt(0.4, 0.0)];
        // the link's separation is 2/3 up to rounding
        assert!(verify_between_conditions(&d, &link, 2.0 / 3.0 + 1e-15).unwrap().passed);
        let fail = verify_between_conditions(&d, &link, 0.6).unwrap();
        assert!(!fail.passed);
        assert_eq!(fail.first_violation, Some(0));
        let three = [pt(-0.4, 0.0), pt(0.0, 0.0), pt(0.4, 0.0)];
        let r = verify_between_conditions(&d, &three, 0.25).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.radii.len(), 3);
        assert_relative_eq!(r.radii[1], 1.0);
    }

    #[test]
    fn between_conditions_detect_segment_leaving_domain() {
        let l = Domain::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let r = verify_between_conditions(&l, &[pt(1.9, 0.9), pt(0.9, 1.9)], 100.0).unwrap();
        assert!(!r.segments_inside);
        assert!(!r.passed);
    }

    #[test]
    fn set_separation_examples() {
        let d = unit_disk();
        let start = pt(-0.4, 0.0);
        let own = SeparationQuery::new(start.clone(), PointSet::new(vec![start.clone()]), 3, 0.1);
        assert_eq!(set_separation(&d, &own).unwrap().value, 0.0);

        let target = PointSet::new(vec![pt(0.4, 0.0)]);
        let one = set_separation(&d, &SeparationQuery::new(start.clone(), target.clone(), 1, 0.1)).unwrap();
        assert_eq!(one.value, pair_separation(&d, &start, &pt(0.4, 0.0)).unwrap());
        assert_eq!(one.per_target[0].polyline.len(), 2);

        let two = set_separation(&d, &SeparationQuery::new(start.clone(), target, 2, 0.02)).unwrap();
        assert!(two.value <= 0.25 + 1e-9, "{}", two.value);
        let poly = &two.per_target[0].polyline;
        assert!(poly.len() <= 3);
        assert_eq!(sequence_separation(&d, poly).unwrap(), two.value);
    }

    #[test]
    fn set_separation_errors_and_unreachable() {
        let d = unit_disk();
        let q = SeparationQuery::new(pt(0.0, 0.0), PointSet::new(vec![pt(0.1, 0.0)]), 0, 0.1);
        assert!(set_separation(&d, &q).is_err());
        // a target hugging the boundary cannot be reached in one hop with sep < 1
        let far = SeparationQuery::new(pt(-0.9, 0.0), PointSet::new(vec![pt(0.95, 0.0)]), 1, 0.1);
        let r = set_separation(&d, &far).unwrap();
        assert!(r.value.is_infinite());
        assert_eq!(r.diagnostics.len(), 1);
        assert!(r.per_target[0].polyline.is_empty());
    }

    #[test]
    fn separation_nonincreasing_in_hops() {
        let d = Domain::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let targets = PointSet::new(vec![pt(1.8, 0.5), pt(0.5, 1.8), pt(1.5, 0.2)]);
        let mut last = f64::INFINITY;
        for hops in 1..=6 {
            let r = set_separation(&d, &SeparationQuery::new(pt(0.3, 0.3), targets.clone(), hops, 0.1)).unwrap();
            assert!(r.value <= last, "hops {hops}: {} > {last}", r.value);
            last = r.value;
        }
        assert!(last < 1.0);
    }

    #[test]
    fn proof_sharp_never_exceeds_stated() {
        for d in 2..=6 {
            for k in 0..100 {
                let q = k as f64 / 100.0;
                let s = pair_bound_from_q(q, d, PairBoundVariant::Stated).unwrap();
                let p = pair_bound_from_q(q, d, PairBoundVariant::ProofSharp).unwrap();
                assert!(p <= s, "q {q}, d {d}");
            }
        }
    }
}
