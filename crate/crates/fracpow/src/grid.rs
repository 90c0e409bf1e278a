//! Uniform rectangular grids, grid functions, and the discrete L2 inner
//! product.
//!
//! The domain is the rectangle (0, l1) x (0, l2) covered by an (N1+1) x (N2+1)
//! uniform grid with spacings h_n = l_n / N_n. Grid functions satisfy a
//! homogeneous Dirichlet condition, so only the K = (N1-1)(N2-1) interior
//! values are stored; boundary values are implicitly zero and never
//! materialized.
//!
//! The scalar product is the discrete L2(omega) one,
//!
//! ```text
//! (u, w) = sum_{x in omega} u(x) w(x) h1 h2,    ||u|| = (u, u)^(1/2).
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Geometry of a uniform rectangular grid.
///
/// Spacings are always derived from the side lengths and node counts; they
/// are never stored independently, so `h_n * N_n == l_n` holds as computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n1: usize,
    n2: usize,
    l1: f64,
    l2: f64,
}

impl Grid2D {
    /// Creates a grid with `n1` x `n2` cells on the rectangle `(0,l1) x (0,l2)`.
    pub fn new(n1: usize, n2: usize, l1: f64, l2: f64) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::Domain(format!(
                "node counts must be >= 2, got N1={n1}, N2={n2}"
            )));
        }
        if !(l1.is_finite() && l1 > 0.0 && l2.is_finite() && l2 > 0.0) {
            return Err(Error::Domain(format!(
                "side lengths must be positive, got l1={l1}, l2={l2}"
            )));
        }
        Ok(Self { n1, n2, l1, l2 })
    }

    /// Grid with `n` x `n` cells on the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn h1(&self) -> f64 {
        self.l1 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        self.l2 / self.n2 as f64
    }

    /// Area weight h1*h2 of the discrete inner product.
    pub fn cell_area(&self) -> f64 {
        self.h1() * self.h2()
    }

    /// Number of interior nodes K = (N1-1)(N2-1).
    pub fn interior_len(&self) -> usize {
        (self.n1 - 1) * (self.n2 - 1)
    }

    /// Flat index of the interior node (i1, i2), 1 <= i_n <= N_n - 1.
    ///
    /// Interior nodes are enumerated row-major over (i1, i2) with i2 fastest;
    /// this order is part of the field dump format.
    pub fn index_of(&self, i1: usize, i2: usize) -> usize {
        debug_assert!(1 <= i1 && i1 < self.n1 && 1 <= i2 && i2 < self.n2);
        (i1 - 1) * (self.n2 - 1) + (i2 - 1)
    }

    /// Inverse of [`Grid2D::index_of`].
    pub fn node_of(&self, idx: usize) -> (usize, usize) {
        let w = self.n2 - 1;
        (idx / w + 1, idx % w + 1)
    }

    /// Coordinates (x1, x2) of the node (i1, i2).
    pub fn coords(&self, i1: usize, i2: usize) -> (f64, f64) {
        (i1 as f64 * self.h1(), i2 as f64 * self.h2())
    }
}

/// A real-valued field on the interior nodes of a [`Grid2D`].
///
/// Immutable by convention: all operations return new values, so fields can
/// be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid2D,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            values: vec![0.0; grid.interior_len()],
            grid,
        }
    }

    /// Wraps a value vector in declared node order.
    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.interior_len() {
            return Err(Error::GridMismatch(format!(
                "expected {} interior values, got {}",
                grid.interior_len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x1, x2)` at every interior node.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.interior_len());
        for i1 in 1..grid.n1 {
            for i2 in 1..grid.n2 {
                let (x1, x2) = grid.coords(i1, i2);
                values.push(f(x1, x2));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.grid.index_of(i1, i2)]
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "fields live on different grids: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Discrete inner product (u, w) = sum u(x) w(x) h1 h2 over interior nodes.
    pub fn inner_product(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        let dot: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(dot * self.grid.cell_area())
    }

    /// Discrete L2 norm, `sqrt((u, u))`.
    pub fn norm_l2(&self) -> f64 {
        let dot: f64 = self.values.iter().map(|v| v * v).sum();
        (dot * self.grid.cell_area()).sqrt()
    }

    /// Maximum norm over interior nodes.
    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Maximum value (not absolute value) over interior nodes.
    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v))
    }

    pub fn scale(&self, s: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// In-place `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &GridFunction) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Field dump format: `i1,i2,x1,x2,value`, one row per interior node in
    /// declared order, values with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i1,i2,x1,x2,value\n");
        for (idx, v) in self.values.iter().enumerate() {
            let (i1, i2) = self.grid.node_of(idx);
            let (x1, x2) = self.grid.coords(i1, i2);
            writeln!(out, "{i1},{i2},{x1:.16e},{x2:.16e},{v:.16e}").unwrap();
        }
        out
    }
}

/// Sign function with the sgn(0) = 0 convention.
fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Smooth right-hand side f1(x) = x1^2 (1 - x1) x2^2 (1 - x2).
pub fn rhs_f1(grid: Grid2D) -> GridFunction {
    GridFunction::from_fn(grid, |x1, x2| x1 * x1 * (1.0 - x1) * x2 * x2 * (1.0 - x2))
}

/// Discontinuous right-hand side f2(x) = 1 + sgn(x1 x2 - 0.25).
///
/// On the level set x1 x2 = 0.25 (hit by the center node when N is even)
/// sgn(0) = 0 gives f2 = 1.
pub fn rhs_f2(grid: Grid2D) -> GridFunction {
    GridFunction::from_fn(grid, |x1, x2| 1.0 + sgn(x1 * x2 - 0.25))
}
