use super::{Grid, NodeRole};
use crate::error::{Error, Result};
use std::sync::Arc;

/// Scalar samples on every lattice node of a grid, stamped with a time.
///
/// Graph and exterior nodes always hold zero (the epigraph Dirichlet value).
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
    time: f64,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>, time: f64) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
            time,
        }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64, time: f64) -> Self {
        Self::from_fn(grid, time, |_| value)
    }

    /// Samples `f` at every node's coordinates.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: &Arc<Grid>, time: f64, f: F) -> Self {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|i| match grid.role(i) {
                NodeRole::Graph | NodeRole::Exterior => 0.0,
                _ => f(&grid.coords(i)[..dim]),
            })
            .collect();
        Self {
            grid: Arc::clone(grid),
            values,
            time,
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node, time });
        }
        let mut field = Self {
            grid: Arc::clone(grid),
            values,
            time,
        };
        field.enforce_dirichlet();
        Ok(field)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    pub(crate) fn enforce_dirichlet(&mut self) {
        for (v, role) in self.values.iter_mut().zip(self.grid.roles()) {
            if matches!(role, NodeRole::Graph | NodeRole::Exterior) {
                *v = 0.0;
            }
        }
    }

    /// Values at active nodes only.
    pub fn active_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid.active_nodes().iter().map(|&i| self.values[i])
    }

    /// `max - min` over active nodes.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self
            .active_values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    pub fn max_abs(&self) -> f64 {
        self.active_values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First non-finite node, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    /// Max norm of the difference over active nodes.
    pub fn max_diff(&self, other: &Field) -> f64 {
        self.grid
            .active_nodes()
            .iter()
            .map(|&i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max)
    }
}
