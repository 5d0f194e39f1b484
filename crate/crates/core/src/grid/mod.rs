//! Uniform Cartesian lattices in one to three dimensions, the scalar fields
//! living on them, and the finite-difference operators used by the solvers.
//!
//! Nodes sit at `origin + i * h` with `h = extent / count` on every axis, so a
//! periodic axis never duplicates its seam node. Every node carries a role:
//!
//! * `Active` nodes are evolved and carry the diagnostics.
//! * `Graph` nodes are the snapped Dirichlet boundary of an epigraph
//!   (pinned to `u = 0`).
//! * `Frozen` nodes are box faces of a bounded domain; they keep whatever
//!   value the field holds, so callers may prescribe (time-dependent) data.
//! * `Exterior` nodes lie below an epigraph boundary and are never read
//!   except as zero Dirichlet data by the mixed-derivative stencil.

mod epigraph;
mod field;
mod io;
mod ops;

pub use epigraph::{epigraph_mean_curvature, EpigraphSpec, CURVATURE_SLACK};
pub use field::Field;
pub use io::{read_binary, read_binary_header, write_binary, write_csv, BinaryHeader, HEADER_LEN};
pub use ops::{
    forward_gradient, grad_sq_at, gradient, gradient_at, laplacian, laplacian_at,
    quasilinear_apply, quasilinear_at, Vector,
};

use crate::error::{Error, Result};
use std::sync::Arc;

pub const MIN_NODES_PER_AXIS: usize = 8;
pub(crate) const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub enum BoundaryPolicy {
    /// Flat torus.
    Periodic,
    /// Bounded box whose faces are frozen nodes.
    Dirichlet,
    /// `{x_n > h(x')}` inside the box; graph nodes pinned to zero, remaining
    /// box faces frozen.
    Epigraph(EpigraphSpec),
}

impl BoundaryPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryPolicy::Periodic => "periodic",
            BoundaryPolicy::Dirichlet => "dirichlet",
            BoundaryPolicy::Epigraph(_) => "epigraph_dirichlet",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRole {
    Active,
    Graph,
    Frozen,
    Exterior,
}

/// Box `origin + [0, extent)` per axis with a boundary policy.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub origin: Vec<f64>,
    pub extents: Vec<f64>,
    pub policy: BoundaryPolicy,
}

impl DomainSpec {
    pub fn periodic(origin: &[f64], extents: &[f64]) -> Self {
        Self {
            origin: origin.to_vec(),
            extents: extents.to_vec(),
            policy: BoundaryPolicy::Periodic,
        }
    }

    pub fn dirichlet(origin: &[f64], extents: &[f64]) -> Self {
        Self {
            origin: origin.to_vec(),
            extents: extents.to_vec(),
            policy: BoundaryPolicy::Dirichlet,
        }
    }

    pub fn epigraph(origin: &[f64], extents: &[f64], graph: EpigraphSpec) -> Self {
        Self {
            origin: origin.to_vec(),
            extents: extents.to_vec(),
            policy: BoundaryPolicy::Epigraph(graph),
        }
    }
}

#[derive(Debug)]
pub struct Grid {
    dim: usize,
    origin: [f64; 3],
    extents: [f64; 3],
    counts: [usize; 3],
    spacing: [f64; 3],
    policy: BoundaryPolicy,
    roles: Vec<NodeRole>,
    /// `[axis0-, axis0+, axis1-, axis1+, axis2-, axis2+]`, `NONE` when absent.
    neighbors: Vec<[usize; 6]>,
    active: Vec<usize>,
    graph_nodes: Vec<usize>,
    eps_geom: f64,
}

impl Grid {
    pub fn build(spec: &DomainSpec, resolution: &[usize]) -> Result<Arc<Grid>> {
        let dim = spec.origin.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if spec.extents.len() != dim || resolution.len() != dim {
            return Err(Error::InvalidGrid(
                "origin, extents and resolution must have one entry per axis".into(),
            ));
        }
        let mut origin = [0.0; 3];
        let mut extents = [0.0; 3];
        let mut counts = [1usize; 3];
        let mut spacing = [1.0; 3];
        for a in 0..dim {
            if !(spec.extents[a] > 0.0) || !spec.extents[a].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "extent on axis {a} must be positive, got {}",
                    spec.extents[a]
                )));
            }
            if resolution[a] < MIN_NODES_PER_AXIS {
                return Err(Error::InvalidGrid(format!(
                    "resolution {} on axis {a} is below {MIN_NODES_PER_AXIS} nodes",
                    resolution[a]
                )));
            }
            origin[a] = spec.origin[a];
            extents[a] = spec.extents[a];
            counts[a] = resolution[a];
            spacing[a] = extents[a] / counts[a] as f64;
        }
        let n: usize = counts.iter().product();
        let periodic = matches!(spec.policy, BoundaryPolicy::Periodic);

        let mut neighbors = vec![[NONE; 6]; n];
        for (idx, nb) in neighbors.iter_mut().enumerate() {
            let ijk = unravel(idx, &counts);
            for a in 0..dim {
                for (k, step) in [-1isize, 1].into_iter().enumerate() {
                    let i = ijk[a] as isize + step;
                    let c = counts[a] as isize;
                    let j = if periodic {
                        Some(i.rem_euclid(c) as usize)
                    } else if i < 0 || i >= c {
                        None
                    } else {
                        Some(i as usize)
                    };
                    if let Some(j) = j {
                        let mut other = ijk;
                        other[a] = j;
                        nb[2 * a + k] = ravel(&other, &counts);
                    }
                }
            }
        }

        let mut roles = vec![NodeRole::Active; n];
        let mut eps_geom = 0.0;
        match &spec.policy {
            BoundaryPolicy::Periodic => {}
            BoundaryPolicy::Dirichlet => {
                for (idx, role) in roles.iter_mut().enumerate() {
                    let ijk = unravel(idx, &counts);
                    if (0..dim).any(|a| ijk[a] == 0 || ijk[a] == counts[a] - 1) {
                        *role = NodeRole::Frozen;
                    }
                }
            }
            BoundaryPolicy::Epigraph(graph) => {
                if dim < 2 {
                    return Err(Error::InvalidGrid(
                        "epigraph domains need at least two dimensions".into(),
                    ));
                }
                let last = dim - 1;
                let hn = spacing[last];
                for (idx, role) in roles.iter_mut().enumerate() {
                    let ijk = unravel(idx, &counts);
                    let x: Vec<f64> = (0..dim)
                        .map(|a| origin[a] + ijk[a] as f64 * spacing[a])
                        .collect();
                    let height = graph.height(&x[..last]);
                    if x[last] <= height {
                        *role = NodeRole::Exterior;
                    } else if (0..last).any(|a| ijk[a] == 0 || ijk[a] == counts[a] - 1)
                        || ijk[last] == counts[last] - 1
                    {
                        *role = NodeRole::Frozen;
                    }
                }
                // The graph must cross every column strictly inside the box.
                let columns: usize = counts[..last].iter().product();
                for col in 0..columns {
                    let bottom = col;
                    if roles[bottom] != NodeRole::Exterior {
                        return Err(Error::InvalidGrid(format!(
                            "graph passes below the box bottom in column {col}"
                        )));
                    }
                }
                // Snap: the highest node on or below the graph in each column.
                // Other exterior nodes hold zero, so stencils reaching them
                // still see the Dirichlet value.
                let stride: usize = counts[..last].iter().product();
                for col in 0..columns {
                    let mut snapped = None;
                    for k in 0..counts[last] {
                        let idx = col + k * stride;
                        if roles[idx] == NodeRole::Exterior {
                            snapped = Some(idx);
                        } else {
                            break;
                        }
                    }
                    if let Some(idx) = snapped {
                        if idx + stride < n && roles[idx + stride] != NodeRole::Exterior {
                            roles[idx] = NodeRole::Graph;
                        }
                    }
                }
                let mut max_slope: f64 = 0.0;
                for col in 0..columns {
                    let ijk = unravel(col, &counts);
                    let xp: Vec<f64> = (0..last)
                        .map(|a| origin[a] + ijk[a] as f64 * spacing[a])
                        .collect();
                    max_slope = max_slope.max(graph.slope(&xp));
                }
                if max_slope > graph.slope_bound() * (1.0 + 1e-6) + 1e-9 {
                    return Err(Error::InvalidGrid(format!(
                        "sampled graph slope {max_slope} exceeds the declared bound {}",
                        graph.slope_bound()
                    )));
                }
                eps_geom = (hn * graph.slope_bound()).max(1e-12);
            }
        }

        let active: Vec<usize> = (0..n).filter(|&i| roles[i] == NodeRole::Active).collect();
        if active.is_empty() {
            return Err(Error::InvalidGrid("no active nodes".into()));
        }
        let graph_nodes = (0..n).filter(|&i| roles[i] == NodeRole::Graph).collect();
        Ok(Arc::new(Grid {
            dim,
            origin,
            extents,
            counts,
            spacing,
            policy: spec.policy.clone(),
            roles,
            neighbors,
            active,
            graph_nodes,
            eps_geom,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents[..self.dim]
    }

    /// Smallest spacing over the axes.
    pub fn h_min(&self) -> f64 {
        self.spacing().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Π h_a`, the cell volume.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn policy(&self) -> &BoundaryPolicy {
        &self.policy
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.policy, BoundaryPolicy::Periodic)
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn role(&self, idx: usize) -> NodeRole {
        self.roles[idx]
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn active_nodes(&self) -> &[usize] {
        &self.active
    }

    pub fn graph_nodes(&self) -> &[usize] {
        &self.graph_nodes
    }

    /// Geometric slack from snapping the graph onto the lattice.
    pub fn eps_geom(&self) -> f64 {
        self.eps_geom
    }

    pub fn index(&self, ijk: &[usize]) -> usize {
        let mut full = [0usize; 3];
        full[..self.dim].copy_from_slice(ijk);
        ravel(&full, &self.counts)
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        unravel(idx, &self.counts)
    }

    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let ijk = unravel(idx, &self.counts);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.origin[a] + ijk[a] as f64 * self.spacing[a];
        }
        x
    }

    /// Neighbor along `axis` in direction `step` (`-1` or `+1`).
    pub fn neighbor(&self, idx: usize, axis: usize, step: isize) -> Option<usize> {
        let k = if step < 0 { 0 } else { 1 };
        let j = self.neighbors[idx][2 * axis + k];
        (j != NONE).then_some(j)
    }

    pub(crate) fn neighbor_table(&self) -> &[[usize; 6]] {
        &self.neighbors
    }

    /// Active nodes whose axis neighbors are all active too.
    pub fn deep_interior(&self, idx: usize) -> bool {
        self.roles[idx] == NodeRole::Active
            && self.neighbors[idx][..2 * self.dim]
                .iter()
                .all(|&j| j != NONE && self.roles[j] == NodeRole::Active)
    }

    /// Minimum sampled mean curvature of the epigraph boundary over the grid
    /// columns, or `None` for non-epigraph grids.
    pub fn min_boundary_curvature(&self) -> Option<f64> {
        let BoundaryPolicy::Epigraph(graph) = &self.policy else {
            return None;
        };
        let last = self.dim - 1;
        let columns: usize = self.counts[..last].iter().product();
        let points: Vec<Vec<f64>> = (0..columns)
            .map(|col| {
                let ijk = unravel(col, &self.counts);
                (0..last)
                    .map(|a| self.origin[a] + ijk[a] as f64 * self.spacing[a])
                    .collect()
            })
            .collect();
        epigraph_mean_curvature(graph, &points)
            .into_iter()
            .reduce(f64::min)
    }
}

fn unravel(mut idx: usize, counts: &[usize; 3]) -> [usize; 3] {
    let mut ijk = [0; 3];
    for a in 0..3 {
        ijk[a] = idx % counts[a];
        idx /= counts[a];
    }
    ijk
}

fn ravel(ijk: &[usize; 3], counts: &[usize; 3]) -> usize {
    ijk[0] + counts[0] * (ijk[1] + counts[1] * ijk[2])
}

/// Convenience wrapper for [`Grid::build`].
pub fn build_grid(spec: &DomainSpec, resolution: &[usize]) -> Result<Arc<Grid>> {
    Grid::build(spec, resolution)
}
