//! Entropy of linear connectivity of a finite point set and the Harnack
//! bounds derived from it.
//!
//! For a pair `x, y` the entropy is the infimum, over curves `l` from `x` to
//! `y` inside the domain, of `|l| / dist(l, ∁D)`; for a set it is the
//! supremum over pairs. Every polyline found here is a feasible curve with
//! a certified clearance, so the estimate is always an upper bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnackError, Result};
use crate::geometry::{self, distance, segment_certificate, Domain, HullKind, Point, PointSet};
use crate::grid::{king_offsets, PathGraph};

/// Number of clearance levels swept by default.
pub const DEFAULT_LEVEL_COUNT: usize = 24;

/// Clearance levels `r` at which the grid is searched.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClearanceLevels {
    /// Geometric sweep of `count` levels per pair, from `min(grid_step, top/2)`
    /// up to `top = min(clearance(x), clearance(y))`.
    Auto { count: usize },
    /// The same explicit ascending levels for every pair.
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EacConfig {
    pub grid_step: f64,
    pub levels: ClearanceLevels,
    /// Resolution of the straight-segment certificate; defaults to
    /// `1e-3 × diam D`.
    pub segment_resolution: Option<f64>,
}

impl EacConfig {
    pub fn new(grid_step: f64) -> Self {
        Self { grid_step, levels: ClearanceLevels::Auto { count: DEFAULT_LEVEL_COUNT }, segment_resolution: None }
    }

    pub fn with_levels(mut self, levels: Vec<f64>) -> Self {
        self.levels = ClearanceLevels::Explicit(levels);
        self
    }

    pub fn with_segment_resolution(mut self, resolution: f64) -> Self {
        self.segment_resolution = Some(resolution);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathSource {
    Coincident,
    Segment,
    Grid { level: f64 },
    Unreachable,
}

/// Best competitor found for one pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub first: usize,
    pub second: usize,
    pub x: Point,
    pub y: Point,
    /// `length / clearance`; `inf` when no path was found.
    #[serde(with = "crate::serde_num")]
    pub ratio: f64,
    /// Certified clearance `r` of the polyline.
    pub clearance: f64,
    pub length: f64,
    pub polyline: Vec<Point>,
    pub source: PathSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EacParameters {
    pub grid_step: f64,
    pub segment_resolution: f64,
    pub levels: ClearanceLevels,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EacEstimate {
    #[serde(with = "crate::serde_num")]
    pub value: f64,
    pub per_pair: Vec<PairEstimate>,
    pub certified_upper: bool,
    pub parameters: EacParameters,
    pub diagnostics: Vec<String>,
}

impl EacEstimate {
    /// Pair record for `(x, y)` in either orientation; the returned polyline
    /// always runs from `x` to `y`.
    pub fn find_pair(&self, x: &Point, y: &Point) -> Option<(f64, f64, Vec<Point>)> {
        self.per_pair.iter().find_map(|p| {
            if &p.x == x && &p.y == y {
                Some((p.ratio, p.clearance, p.polyline.clone()))
            } else if &p.x == y && &p.y == x {
                Some((p.ratio, p.clearance, p.polyline.iter().rev().cloned().collect()))
            } else {
                None
            }
        })
    }
}

/// `diam S / dist(H, ∁D)` for the chosen hull; `inf` when the hull is not
/// certified inside the domain, 0 for a singleton.
pub fn eac_hull_bound(domain: &Domain, set: &PointSet, kind: &HullKind, resolution: f64) -> Result<f64> {
    let diam = geometry::diameter(set)?;
    let hull = geometry::hull_clearance(domain, set, kind, resolution)?;
    if diam == 0.0 {
        return Ok(0.0);
    }
    if hull.clearance > 0.0 {
        Ok(diam / hull.clearance)
    } else {
        Ok(f64::INFINITY)
    }
}

/// `((3·2^{d-2})^{2·eac+1}, 2^{2d(eac+1)})`, the sharp and the rounded bound
/// on `sup dist_har(x, y)` over the set.
pub fn eac_harnack_bound(eac_value: f64, dim: usize) -> Result<(f64, f64)> {
    if eac_value == f64::INFINITY {
        return Err(HarnackError::InfiniteEntropy);
    }
    if !(eac_value >= 0.0) || !eac_value.is_finite() {
        return Err(HarnackError::InvalidArgument(format!("entropy {eac_value} must be finite and >= 0")));
    }
    if dim < 2 {
        return Err(HarnackError::InvalidArgument(format!("dimension {dim} < 2")));
    }
    let d = dim as f64;
    let sharp = (3.0 * 2f64.powf(d - 2.0)).powf(2.0 * eac_value + 1.0);
    let rounded = 2f64.powf(2.0 * d * (eac_value + 1.0));
    Ok((sharp, rounded))
}

/// Upper estimate of the entropy of linear connectivity of a finite set.
pub fn eac_estimate(domain: &Domain, set: &PointSet, config: &EacConfig) -> Result<EacEstimate> {
    if set.is_empty() {
        return Err(HarnackError::EmptySet);
    }
    if !(config.grid_step.is_finite() && config.grid_step > 0.0) {
        return Err(HarnackError::InvalidArgument("grid_step must be positive".into()));
    }
    match &config.levels {
        ClearanceLevels::Auto { count } if *count == 0 => {
            return Err(HarnackError::InvalidArgument("level count must be positive".into()))
        }
        ClearanceLevels::Explicit(levels) => {
            if levels.is_empty() || levels.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(HarnackError::InvalidArgument("clearance levels must be positive".into()));
            }
            if levels.windows(2).any(|w| w[0] > w[1]) {
                return Err(HarnackError::InvalidArgument("clearance levels must be sorted".into()));
            }
        }
        _ => {}
    }
    let clearances: Vec<f64> = set.iter().map(|p| domain.require_interior(p)).collect::<Result<_>>()?;
    let resolution = config.segment_resolution.unwrap_or(1e-3 * domain.diameter());
    if !(resolution > 0.0) {
        return Err(HarnackError::InvalidArgument("segment resolution must be positive".into()));
    }

    let pts = &set.points;
    let pairs: Vec<(usize, usize)> =
        (0..pts.len()).flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j))).collect();
    let needs_grid = pairs.iter().any(|&(i, j)| pts[i] != pts[j]);
    let graph = if needs_grid { Some(PathGraph::build(domain, config.grid_step)?) } else { None };
    let offsets = king_offsets(domain.dim());

    let per_pair: Vec<PairEstimate> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let ctx = PairContext {
                domain,
                graph: graph.as_ref(),
                offsets: &offsets,
                levels: &config.levels,
                grid_step: config.grid_step,
                resolution,
            };
            ctx.estimate(i, j, &pts[i], &pts[j], clearances[i], clearances[j])
        })
        .collect();

    let diagnostics = per_pair
        .iter()
        .filter(|p| p.ratio.is_infinite())
        .map(|p| {
            format!(
                "pair ({}, {}) not connected at any clearance level; try a smaller grid_step than {}",
                p.first, p.second, config.grid_step
            )
        })
        .collect();
    let value = per_pair.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(EacEstimate {
        value,
        per_pair,
        certified_upper: true,
        parameters: EacParameters {
            grid_step: config.grid_step,
            segment_resolution: resolution,
            levels: config.levels.clone(),
        },
        diagnostics,
    })
}

struct PairContext<'a> {
    domain: &'a Domain,
    graph: Option<&'a PathGraph>,
    offsets: &'a [Vec<isize>],
    levels: &'a ClearanceLevels,
    grid_step: f64,
    resolution: f64,
}

/// Lipschitz lower bound on clearance along an edge.
fn edge_clearance(cu: f64, cv: f64, len: f64) -> f64 {
    0.5 * (cu + cv - len)
}

impl PairContext<'_> {
    fn estimate(&self, i: usize, j: usize, x: &Point, y: &Point, cx: f64, cy: f64) -> PairEstimate {
        let mut best = PairEstimate {
            first: i,
            second: j,
            x: x.clone(),
            y: y.clone(),
            ratio: f64::INFINITY,
            clearance: 0.0,
            length: 0.0,
            polyline: Vec::new(),
            source: PathSource::Unreachable,
        };
        if x == y {
            best.ratio = 0.0;
            best.clearance = cx;
            best.polyline = vec![x.clone(), y.clone()];
            best.source = PathSource::Coincident;
            return best;
        }
        let len = x.distance(y);
        let seg = segment_certificate(self.domain, x.coords(), y.coords(), self.resolution);
        if seg > 0.0 {
            best.ratio = len / seg;
            best.clearance = seg;
            best.length = len;
            best.polyline = vec![x.clone(), y.clone()];
            best.source = PathSource::Segment;
        }
        let Some(graph) = self.graph else { return best };
        let search = GridSearch::new(graph, self.offsets, x.coords(), y.coords(), cx, cy, self.grid_step);
        for level in self.levels_for(cx.min(cy)) {
            let Some(path) = search.shortest(level) else { continue };
            let ratio = path.length / path.clearance;
            if ratio < best.ratio {
                best.ratio = ratio;
                best.clearance = path.clearance;
                best.length = path.length;
                best.polyline = path.points.into_iter().map(|p| Point::new(p).expect("finite lattice point")).collect();
                best.source = PathSource::Grid { level };
            }
        }
        best
    }

    fn levels_for(&self, top: f64) -> Vec<f64> {
        match self.levels {
            ClearanceLevels::Explicit(levels) => levels.clone(),
            ClearanceLevels::Auto { count } => {
                let lo = if top > self.grid_step { self.grid_step.min(0.5 * top) } else { top / 8.0 };
                if *count == 1 {
                    return vec![top];
                }
                (0..*count)
                    .map(|k| lo * (top / lo).powf(k as f64 / (*count - 1) as f64))
                    .collect()
            }
        }
    }
}

struct FoundPath {
    length: f64,
    clearance: f64,
    points: Vec<Vec<f64>>,
}

/// Dijkstra over the lattice plus the two endpoints, which get ids
/// `n` (source) and `n + 1` (target) after the `n` lattice nodes.
struct GridSearch<'a> {
    graph: &'a PathGraph,
    offsets: &'a [Vec<isize>],
    source: &'a [f64],
    target: &'a [f64],
    source_clearance: f64,
    target_clearance: f64,
    /// bit 0: adjacent to source, bit 1: adjacent to target
    attach: Vec<u8>,
    near_source: Vec<usize>,
    near_target: Vec<usize>,
    direct: bool,
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on node id
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> GridSearch<'a> {
    fn new(
        graph: &'a PathGraph,
        offsets: &'a [Vec<isize>],
        source: &'a [f64],
        target: &'a [f64],
        source_clearance: f64,
        target_clearance: f64,
        step: f64,
    ) -> Self {
        let reach = step * (graph.dim() as f64).sqrt();
        let near_source = graph.lattice_nodes_near(source, reach);
        let near_target = graph.lattice_nodes_near(target, reach);
        let mut attach = vec![0u8; graph.lattice_len()];
        for &u in &near_source {
            attach[u] |= 1;
        }
        for &u in &near_target {
            attach[u] |= 2;
        }
        Self {
            graph,
            offsets,
            source,
            target,
            source_clearance,
            target_clearance,
            attach,
            near_source,
            near_target,
            direct: distance(source, target) <= reach,
        }
    }

    fn point(&self, id: usize) -> &[f64] {
        let n = self.graph.lattice_len();
        match id {
            _ if id < n => self.graph.point(id),
            _ if id == n => self.source,
            _ => self.target,
        }
    }

    fn clearance(&self, id: usize) -> f64 {
        let n = self.graph.lattice_len();
        match id {
            _ if id < n => self.graph.clearance(id),
            _ if id == n => self.source_clearance,
            _ => self.target_clearance,
        }
    }

    fn neighbors(&self, u: usize, out: &mut Vec<usize>) {
        out.clear();
        let n = self.graph.lattice_len();
        if u < n {
            out.extend(self.graph.lattice_neighbors(u, self.offsets));
            if self.attach[u] & 1 != 0 {
                out.push(n);
            }
            if self.attach[u] & 2 != 0 {
                out.push(n + 1);
            }
        } else if u == n {
            out.extend_from_slice(&self.near_source);
            if self.direct {
                out.push(n + 1);
            }
        } else {
            out.extend_from_slice(&self.near_target);
            if self.direct {
                out.push(n);
            }
        }
    }

    fn shortest(&self, level: f64) -> Option<FoundPath> {
        if self.source_clearance < level || self.target_clearance < level {
            return None;
        }
        let n = self.graph.lattice_len();
        let (src, dst) = (n, n + 1);
        let mut dist = vec![f64::INFINITY; n + 2];
        let mut prev = vec![usize::MAX; n + 2];
        let mut heap = BinaryHeap::new();
        let mut nbrs = Vec::new();
        dist[src] = 0.0;
        heap.push(HeapEntry { dist: 0.0, node: src });
        while let Some(HeapEntry { dist: du, node: u }) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            if u == dst {
                break;
            }
            let cu = self.clearance(u);
            self.neighbors(u, &mut nbrs);
            for &v in &nbrs {
                let cv = self.clearance(v);
                if cv < level {
                    continue;
                }
                let len = distance(self.point(u), self.point(v));
                if edge_clearance(cu, cv, len) < level {
                    continue;
                }
                let alt = du + len;
                if alt < dist[v] || (alt == dist[v] && u < prev[v]) {
                    dist[v] = alt;
                    prev[v] = u;
                    heap.push(HeapEntry { dist: alt, node: v });
                }
            }
        }
        if dist[dst].is_infinite() {
            return None;
        }
        let mut ids = vec![dst];
        while *ids.last().unwrap() != src {
            ids.push(prev[*ids.last().unwrap()]);
        }
        ids.reverse();
        let mut length = 0.0;
        let mut clearance = f64::INFINITY;
        for w in ids.windows(2) {
            let len = distance(self.point(w[0]), self.point(w[1]));
            length += len;
            clearance = clearance.min(edge_clearance(self.clearance(w[0]), self.clearance(w[1]), len));
        }
        Some(FoundPath { length, clearance, points: ids.iter().map(|&id| self.point(id).to_vec()).collect() })
    }
}

/// A chain of balls `B_{x_k}(r_k)` inside the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallChain {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
    /// Set when all balls share one radius.
    pub common_radius: Option<f64>,
    /// Number of intermediate centres `l`; there are `l + 2` centres.
    pub hops: usize,
}

/// Outcome of checking a common-radius chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCheck {
    /// `|x_{k-1} - x_k| <= r/2` for every link.
    pub spacing: bool,
    /// `l <= 2C`.
    pub hop_budget: bool,
    /// every ball lies inside the domain
    pub balls_inside: bool,
}

impl ChainCheck {
    pub fn passed(&self) -> bool {
        self.spacing && self.hop_budget && self.balls_inside
    }
}

impl BallChain {
    pub fn check(&self, domain: &Domain, budget: f64) -> ChainCheck {
        let r = self.common_radius.unwrap_or_else(|| self.radii.iter().cloned().fold(f64::INFINITY, f64::min));
        let spacing = self.centers.windows(2).all(|w| w[0].distance(&w[1]) <= r / 2.0);
        let hop_budget = self.centers.len() == self.hops + 2 && (self.hops as f64) <= 2.0 * budget;
        let balls_inside = self
            .centers
            .iter()
            .zip(&self.radii)
            .all(|(c, &rk)| domain.dist_to_complement(c).map_or(false, |cl| cl >= rk));
        ChainCheck { spacing, hop_budget, balls_inside }
    }
}

fn polyline_length(polyline: &[Point]) -> f64 {
    polyline.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Point at arc length `s` along the polyline.
fn point_at(polyline: &[Point], cumulative: &[f64], s: f64) -> Point {
    let k = cumulative.partition_point(|&c| c <= s).clamp(1, polyline.len() - 1);
    let seg = cumulative[k] - cumulative[k - 1];
    let t = if seg > 0.0 { ((s - cumulative[k - 1]) / seg).clamp(0.0, 1.0) } else { 0.0 };
    polyline[k - 1].lerp(&polyline[k], t)
}

/// Places balls of the recorded clearance along the pair's polyline, with
/// spacing at most `r/2` and at most `2C` intermediate centres.
pub fn build_ball_chain(domain: &Domain, x: &Point, y: &Point, budget: f64, estimate: &EacEstimate) -> Result<BallChain> {
    if x == y {
        let r = domain.require_interior(x)?;
        return Ok(BallChain { centers: vec![x.clone(), y.clone()], radii: vec![r, r], common_radius: Some(r), hops: 0 });
    }
    let (ratio, r, polyline) = estimate.find_pair(x, y).ok_or(HarnackError::PairMissing)?;
    if !(budget > ratio) {
        return Err(HarnackError::ChainConstantTooSmall { estimate: ratio });
    }
    let length = polyline_length(&polyline);
    let mut cumulative = Vec::with_capacity(polyline.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in polyline.windows(2) {
        acc += w[0].distance(&w[1]);
        cumulative.push(acc);
    }

    let mut links = ((2.0 * length / r).ceil() as usize).max(1);
    for _ in 0..4 {
        let mut centers = Vec::with_capacity(links + 1);
        centers.push(x.clone());
        for k in 1..links {
            centers.push(point_at(&polyline, &cumulative, length * k as f64 / links as f64));
        }
        centers.push(y.clone());
        let chain = BallChain { radii: vec![r; centers.len()], common_radius: Some(r), hops: links - 1, centers };
        let check = chain.check(domain, budget);
        if check.passed() {
            return Ok(chain);
        }
        if !check.spacing {
            // rounding pushed a link just past r/2
            links += 1;
            continue;
        }
        return Err(HarnackError::InvalidArgument(format!("ball chain failed verification: {check:?}")));
    }
    Err(HarnackError::InvalidArgument("ball chain spacing could not be certified".into()))
}
