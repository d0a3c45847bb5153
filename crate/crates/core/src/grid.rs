//! Cell-centred lattice discretisations of a domain.

use crate::error::{HarnackError, Result};
use crate::geometry::Domain;

/// Upper limit on lattice sites visited while building a graph.
pub const MAX_LATTICE_SITES: usize = 4_000_000;

/// Lattice nodes of a domain with positive clearance, in lexicographic
/// lattice order, plus optional extra nodes appended after them.
#[derive(Clone, Debug)]
pub struct PathGraph {
    dim: usize,
    step: f64,
    origin: Vec<f64>,
    counts: Vec<usize>,
    /// lattice site (row-major, first axis slowest) -> node id
    site_to_node: Vec<Option<usize>>,
    node_site: Vec<Vec<usize>>,
    lattice_nodes: usize,
    points: Vec<Vec<f64>>,
    clearance: Vec<f64>,
}

impl PathGraph {
    /// Builds the lattice of spacing `step` centred on the domain's bounding
    /// box and keeps the sites with positive clearance.
    pub fn build(domain: &Domain, step: f64) -> Result<Self> {
        let dim = domain.dim();
        if dim > 3 {
            return Err(HarnackError::GridDimensionUnsupported { dim });
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(HarnackError::InvalidArgument(format!("grid step {step} must be positive")));
        }
        let (lo, hi) = domain.bounding_box();
        let mut counts = Vec::with_capacity(dim);
        let mut origin = Vec::with_capacity(dim);
        let mut sites = 1usize;
        for k in 0..dim {
            let extent = hi[k] - lo[k];
            // odd counts put a node on the box centre
            let mut n = ((extent / step - 1e-9).ceil().max(1.0)) as usize;
            if n % 2 == 0 {
                n += 1;
            }
            sites = sites.saturating_mul(n);
            counts.push(n);
            origin.push(0.5 * (lo[k] + hi[k]) - 0.5 * (n as f64 - 1.0) * step);
        }
        if sites > MAX_LATTICE_SITES {
            return Err(HarnackError::GridTooLarge { nodes: sites, limit: MAX_LATTICE_SITES });
        }
        let mut graph = Self {
            dim,
            step,
            origin,
            counts,
            site_to_node: vec![None; sites],
            node_site: Vec::new(),
            lattice_nodes: 0,
            points: Vec::new(),
            clearance: Vec::new(),
        };
        let mut idx = vec![0usize; dim];
        for site in 0..sites {
            let p: Vec<f64> = (0..dim).map(|k| graph.origin[k] + idx[k] as f64 * step).collect();
            let c = domain.clearance(&p);
            if c > 0.0 {
                graph.site_to_node[site] = Some(graph.points.len());
                graph.node_site.push(idx.clone());
                graph.points.push(p);
                graph.clearance.push(c);
            }
            // advance the multi-index, last axis fastest
            for k in (0..dim).rev() {
                idx[k] += 1;
                if idx[k] < graph.counts[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        graph.lattice_nodes = graph.points.len();
        Ok(graph)
    }

    /// Appends a node that is not a lattice site; returns its id.
    pub fn push_extra(&mut self, point: Vec<f64>, clearance: f64) -> usize {
        self.points.push(point);
        self.clearance.push(clearance);
        self.points.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lattice_len(&self) -> usize {
        self.lattice_nodes
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, id: usize) -> &[f64] {
        &self.points[id]
    }

    pub fn clearance(&self, id: usize) -> f64 {
        self.clearance[id]
    }

    /// Lattice node ids at the given integer offsets from lattice node `id`,
    /// in the order of `offsets`, skipping sites outside the lattice or the domain.
    pub fn lattice_neighbors<'a>(&'a self, id: usize, offsets: &'a [Vec<isize>]) -> impl Iterator<Item = usize> + 'a {
        let base = &self.node_site[id];
        offsets.iter().filter_map(move |off| {
            let mut site = 0usize;
            for k in 0..self.dim {
                let c = base[k] as isize + off[k];
                if c < 0 || c as usize >= self.counts[k] {
                    return None;
                }
                site = site * self.counts[k] + c as usize;
            }
            self.site_to_node[site]
        })
    }

    /// Lattice nodes within Euclidean distance `radius` of an arbitrary point,
    /// in increasing node order.
    pub fn lattice_nodes_near(&self, p: &[f64], radius: f64) -> Vec<usize> {
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let a = ((p[k] - radius - self.origin[k]) / self.step).floor().max(0.0) as usize;
            let b = ((p[k] + radius - self.origin[k]) / self.step).ceil();
            let b = if b < 0.0 { 0 } else { (b as usize).min(self.counts[k] - 1) };
            lo.push(a);
            hi.push(b);
        }
        let mut out = Vec::new();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return out;
        }
        let mut idx = lo.clone();
        loop {
            let mut site = 0usize;
            for k in 0..self.dim {
                site = site * self.counts[k] + idx[k];
            }
            if let Some(node) = self.site_to_node[site] {
                if crate::geometry::distance(&self.points[node], p) <= radius {
                    out.push(node);
                }
            }
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] <= hi[k] {
                    break;
                }
                idx[k] = lo[k];
            }
        }
    }
}

/// Nonzero integer offsets with every coordinate in `{-1, 0, 1}`:
/// 8 neighbours in 2-D, 26 in 3-D. Lexicographic order.
pub fn king_offsets(dim: usize) -> Vec<Vec<isize>> {
    offsets_in_cube(dim, 1).into_iter().filter(|o| o.iter().any(|&c| c != 0)).collect()
}

/// Nonzero integer offsets of Euclidean length at most `radius_steps`.
pub fn ball_offsets(dim: usize, radius_steps: f64) -> Vec<Vec<isize>> {
    let reach = radius_steps.floor().max(0.0) as isize;
    offsets_in_cube(dim, reach)
        .into_iter()
        .filter(|o| {
            let n2: isize = o.iter().map(|c| c * c).sum();
            n2 > 0 && (n2 as f64).sqrt() <= radius_steps
        })
        .collect()
}

fn offsets_in_cube(dim: usize, reach: isize) -> Vec<Vec<isize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-reach..=reach).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}
