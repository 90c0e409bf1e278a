//! The 5-point finite-difference elliptic operator
//!
//! ```text
//! A u = -div(a(x) grad u) + c(x) u
//! ```
//!
//! on a [`Grid2D`] with homogeneous Dirichlet conditions. The diffusion
//! coefficient is sampled at the half-offset midpoints the stencil
//! prescribes (no averaging), the reaction coefficient at the nodes:
//!
//! ```text
//! A u =   (1/h1^2) [ a(x1+h1/2, x2) (u - u_E) + a(x1-h1/2, x2) (u - u_W) ]
//!       + (1/h2^2) [ a(x1, x2+h2/2) (u - u_N) + a(x1, x2-h2/2) (u - u_S) ]
//!       + c(x) u,
//! ```
//!
//! with off-grid neighbors treated as zero. The resulting grid operator is
//! self-adjoint and positive definite in the discrete inner product.
//!
//! Application is matrix-free; [`EllipticOperator::assemble_dense`] exists for
//! the small-K dense eigensolver path and for cross-checks.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, GridFunction};

/// Default cap on K for dense assembly; O(K^3) eigensolves stay at desk scale.
pub const DENSE_CAP: usize = 4096;

type CoeffFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The coefficient pair (a, c) of the operator.
///
/// `a` must be positive on the stencil midpoints and `c` nonnegative on the
/// nodes; both are checked at every evaluation point when the operator is
/// constructed.
#[derive(Clone)]
pub struct CoefficientField {
    a: CoeffFn,
    c: CoeffFn,
}

impl CoefficientField {
    pub fn new(
        a: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        c: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            a: Arc::new(a),
            c: Arc::new(c),
        }
    }

    /// Constant coefficients a(x) = a0, c(x) = c0.
    pub fn constant(a0: f64, c0: f64) -> Self {
        Self::new(move |_, _| a0, move |_, _| c0)
    }

    pub fn a(&self, x1: f64, x2: f64) -> f64 {
        (self.a)(x1, x2)
    }

    pub fn c(&self, x1: f64, x2: f64) -> f64 {
        (self.c)(x1, x2)
    }
}

/// The grid operator A with its 5-point stencil sampled and cached.
pub struct EllipticOperator {
    grid: Grid2D,
    // per interior node, in declared node order
    a_east: Vec<f64>,
    a_west: Vec<f64>,
    a_north: Vec<f64>,
    a_south: Vec<f64>,
    c_center: Vec<f64>,
}

impl EllipticOperator {
    /// Samples the coefficients on the stencil points and validates them.
    pub fn new(grid: Grid2D, coeffs: &CoefficientField) -> Result<Self> {
        let k = grid.interior_len();
        let (h1, h2) = (grid.h1(), grid.h2());
        let mut a_east = Vec::with_capacity(k);
        let mut a_west = Vec::with_capacity(k);
        let mut a_north = Vec::with_capacity(k);
        let mut a_south = Vec::with_capacity(k);
        let mut c_center = Vec::with_capacity(k);

        let check_a = |v: f64, x1: f64, x2: f64| -> Result<f64> {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::Domain(format!(
                    "diffusion coefficient must be positive, a({x1}, {x2}) = {v}"
                )))
            }
        };

        for i1 in 1..grid.n1() {
            for i2 in 1..grid.n2() {
                // midpoints computed as (i +- 0.5) h so that the east sample
                // of a node and the west sample of its neighbor are
                // bit-identical, keeping the stencil exactly symmetric
                let x1 = i1 as f64 * h1;
                let x2 = i2 as f64 * h2;
                let x1e = (i1 as f64 + 0.5) * h1;
                let x1w = (i1 as f64 - 0.5) * h1;
                let x2n = (i2 as f64 + 0.5) * h2;
                let x2s = (i2 as f64 - 0.5) * h2;
                a_east.push(check_a(coeffs.a(x1e, x2), x1e, x2)?);
                a_west.push(check_a(coeffs.a(x1w, x2), x1w, x2)?);
                a_north.push(check_a(coeffs.a(x1, x2n), x1, x2n)?);
                a_south.push(check_a(coeffs.a(x1, x2s), x1, x2s)?);
                let c = coeffs.c(x1, x2);
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::Domain(format!(
                        "reaction coefficient must be nonnegative, c({x1}, {x2}) = {c}"
                    )));
                }
                c_center.push(c);
            }
        }
        Ok(Self {
            grid,
            a_east,
            a_west,
            a_north,
            a_south,
            c_center,
        })
    }

    /// The Laplace operator: a = 1, c = 0.
    pub fn laplacian(grid: Grid2D) -> Result<Self> {
        Self::new(grid, &CoefficientField::constant(1.0, 0.0))
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// Applies the stencil to `u`.
    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch(
                "field is not on the operator's grid".into(),
            ));
        }
        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        let inv_h1sq = 1.0 / (self.grid.h1() * self.grid.h1());
        let inv_h2sq = 1.0 / (self.grid.h2() * self.grid.h2());
        let stride = n2 - 1;
        let v = u.values();
        let mut out = vec![0.0; v.len()];
        for i1 in 1..n1 {
            for i2 in 1..n2 {
                let idx = (i1 - 1) * stride + (i2 - 1);
                let center = v[idx];
                let east = if i1 + 1 < n1 { v[idx + stride] } else { 0.0 };
                let west = if i1 > 1 { v[idx - stride] } else { 0.0 };
                let north = if i2 + 1 < n2 { v[idx + 1] } else { 0.0 };
                let south = if i2 > 1 { v[idx - 1] } else { 0.0 };
                out[idx] = inv_h1sq
                    * (self.a_east[idx] * (center - east) + self.a_west[idx] * (center - west))
                    + inv_h2sq
                        * (self.a_north[idx] * (center - north)
                            + self.a_south[idx] * (center - south))
                    + self.c_center[idx] * center;
            }
        }
        GridFunction::from_values(self.grid, out)
    }

    /// `A^p u` by repeated application; p = 0 returns `u` unchanged.
    pub fn apply_power(&self, u: &GridFunction, p: usize) -> Result<GridFunction> {
        let mut out = u.clone();
        for _ in 0..p {
            out = self.apply(&out)?;
        }
        Ok(out)
    }

    /// Dense K x K matrix of the operator, symmetric by construction.
    pub fn assemble_dense(&self) -> Result<DMatrix<f64>> {
        self.assemble_dense_capped(DENSE_CAP)
    }

    pub fn assemble_dense_capped(&self, cap: usize) -> Result<DMatrix<f64>> {
        let k = self.grid.interior_len();
        if k > cap {
            return Err(Error::Capacity(format!(
                "dense assembly needs K = {k} <= {cap}"
            )));
        }
        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        let inv_h1sq = 1.0 / (self.grid.h1() * self.grid.h1());
        let inv_h2sq = 1.0 / (self.grid.h2() * self.grid.h2());
        let stride = n2 - 1;
        let mut mat = DMatrix::<f64>::zeros(k, k);
        for i1 in 1..n1 {
            for i2 in 1..n2 {
                let idx = (i1 - 1) * stride + (i2 - 1);
                mat[(idx, idx)] = inv_h1sq * (self.a_east[idx] + self.a_west[idx])
                    + inv_h2sq * (self.a_north[idx] + self.a_south[idx])
                    + self.c_center[idx];
                if i1 + 1 < n1 {
                    let j = idx + stride;
                    let v = -inv_h1sq * self.a_east[idx];
                    mat[(idx, j)] = v;
                    mat[(j, idx)] = v;
                }
                if i2 + 1 < n2 {
                    let j = idx + 1;
                    let v = -inv_h2sq * self.a_north[idx];
                    mat[(idx, j)] = v;
                    mat[(j, idx)] = v;
                }
            }
        }
        Ok(mat)
    }
}
