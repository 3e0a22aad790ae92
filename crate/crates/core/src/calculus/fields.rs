use std::sync::Arc;

use serde::Serialize;

use crate::grid::Grid;

/// Real values on a grid: one per interior node, then one per boundary hit.
#[derive(Debug, Clone)]
pub struct GridField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.value_count(), "field length must match grid");
        GridField { grid, values }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        GridField {
            values: vec![0.0; grid.value_count()],
            grid: grid.clone(),
        }
    }

    /// Samples `f(x, y)` at every node and boundary hit.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.value_count())
            .map(|s| {
                let (x, y) = grid.slot_position(s);
                f(x, y)
            })
            .collect();
        GridField {
            grid: grid.clone(),
            values,
        }
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

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values[..self.grid.node_count()]
    }

    pub fn boundary_values(&self) -> &[f64] {
        &self.values[self.grid.node_count()..]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Sup-norm over interior nodes.
    pub fn sup_norm(&self) -> f64 {
        self.node_values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm over interior nodes passing `keep`.
    pub fn sup_norm_where(&self, keep: impl Fn(usize) -> bool) -> f64 {
        self.node_values()
            .iter()
            .enumerate()
            .filter(|(k, _)| keep(*k))
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        assert!(self.same_grid(other), "fields live on different grids");
        GridField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        self.zip_map(other, |a, b| a - b)
    }

    /// `(x, y) ↦ sign·g(x, -y)` via the grid's mirror permutation.
    pub fn reflected(&self, sign: f64) -> GridField {
        let values = (0..self.values.len())
            .map(|s| sign * self.values[self.grid.reflect_slot(s)])
            .collect();
        GridField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Bilinear interpolation inside grid cells whose four corners are
    /// interior nodes. `None` outside that region.
    pub fn interpolate(&self, x: f64, y: f64) -> Option<f64> {
        let h = self.grid.h();
        let fi = (x / h).floor();
        let fj = (y / h).floor();
        let (i, j) = (fi as i32, fj as i32);
        let tx = x / h - fi;
        let ty = y / h - fj;
        let g = &self.grid;
        let c00 = g.node_at(i, j)?;
        let c10 = g.node_at(i + 1, j)?;
        let c01 = g.node_at(i, j + 1)?;
        let c11 = g.node_at(i + 1, j + 1)?;
        let v = &self.values;
        Some(
            (1.0 - tx) * (1.0 - ty) * v[c00]
                + tx * (1.0 - ty) * v[c10]
                + (1.0 - tx) * ty * v[c01]
                + tx * ty * v[c11],
        )
    }
}

/// A pair `(u, v)` on one grid at moment-map level `a`.
#[derive(Debug, Clone)]
pub struct PairField {
    pub u: GridField,
    pub v: GridField,
    pub a: f64,
}

impl PairField {
    pub fn new(u: GridField, v: GridField, a: f64) -> Self {
        assert!(u.same_grid(&v), "u and v must share a grid");
        assert!(a.is_finite(), "a must be finite");
        PairField { u, v, a }
    }

    pub fn from_fn(grid: &Arc<Grid>, a: f64, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let u = GridField::from_fn(grid, |x, y| f(x, y).0);
        let v = GridField::from_fn(grid, |x, y| f(x, y).1);
        PairField::new(u, v, a)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    /// Node-wise `(u₁ - u₂, v₁ - v₂)`.
    pub fn difference(&self, other: &PairField) -> PairField {
        PairField {
            u: self.u.sub(&other.u),
            v: self.v.sub(&other.v),
            a: self.a,
        }
    }
}

/// Node-wise sup-norm summary used in reports.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct NormSummary {
    pub sup: f64,
    pub mean_abs: f64,
}

impl NormSummary {
    pub fn of(field: &GridField) -> Self {
        let vals = field.node_values();
        let sup = vals.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let mean_abs = vals.iter().map(|v| v.abs()).sum::<f64>() / vals.len().max(1) as f64;
        NormSummary { sup, mean_abs }
    }
}
