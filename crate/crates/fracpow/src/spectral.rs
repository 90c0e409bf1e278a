//! Eigenpairs of the grid operator and the spectral calculus built on them:
//! forward/inverse transforms, exact semigroup application, and the exact
//! fractional inverse used as the error reference.
//!
//! Two basis modes exist:
//!
//! - analytic-sine: for constant coefficients a(x) = a0, c(x) = c0 the
//!   eigenpairs are known in closed form,
//!
//!   ```text
//!   psi_k(x)  = prod_b sqrt(2 / l_b) sin(k_b pi x_b / l_b),
//!   mu_k      = a0 * sum_b (4 / h_b^2) sin^2(k_b pi / (2 N_b)) + c0,
//!   ```
//!
//!   and the transforms are evaluated with dense per-axis sine matrices
//!   (O(N^3) total, no FFT needed at desk scale);
//!
//! - dense-eigen: a full symmetric eigendecomposition of the assembled
//!   operator, the fallback for variable coefficients at small K.
//!
//! Eigenvalues are sorted ascending, ties in (k1, k2) lexicographic order,
//! and eigenvectors are orthonormal in the discrete inner product.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, GridFunction};
use crate::operator::{EllipticOperator, DENSE_CAP};

/// How the eigenpairs were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    AnalyticSine,
    DenseEigen,
}

enum BasisKind {
    AnalyticSine {
        /// sorted index -> (k1, k2), 1-based mode numbers
        modes: Vec<(usize, usize)>,
        /// flat (k1-1)*(N2-1) + (k2-1) -> sorted index
        inv: Vec<usize>,
        /// sin1[(k-1, i-1)] = sin(k pi i / N1); symmetric in (k, i)
        sin1: DMatrix<f64>,
        sin2: DMatrix<f64>,
    },
    DenseEigen {
        /// columns orthonormal in the discrete inner product, ascending
        vectors: DMatrix<f64>,
    },
}

/// Eigenpairs (mu_k, psi_k) of the grid operator, plus transforms.
pub struct SpectralBasis {
    grid: Grid2D,
    eigenvalues: Vec<f64>,
    kind: BasisKind,
}

/// Coefficients (u, psi_k) of a grid function in a [`SpectralBasis`],
/// indexed like the basis eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralCoefficients {
    grid: Grid2D,
    values: Vec<f64>,
}

impl SpectralCoefficients {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Euclidean norm of the coefficient vector; equals the field L2 norm by
    /// the Parseval identity.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// sin(k pi i / n) with the argument reduced through the exact integer
/// period 2n, so large k*i lose no precision.
fn sine_entry(k: usize, i: usize, n: usize) -> f64 {
    let r = (k * i) % (2 * n);
    (std::f64::consts::PI * r as f64 / n as f64).sin()
}

fn sine_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n - 1, n - 1, |k, i| sine_entry(k + 1, i + 1, n))
}

impl SpectralBasis {
    /// Closed-form eigenpairs for constant coefficients a0 > 0, c0 >= 0.
    pub fn analytic(grid: Grid2D, a0: f64, c0: f64) -> Result<Self> {
        if !(a0.is_finite() && a0 > 0.0) {
            return Err(Error::Domain(format!(
                "analytic basis needs constant a0 > 0, got {a0}"
            )));
        }
        if !(c0.is_finite() && c0 >= 0.0) {
            return Err(Error::Domain(format!(
                "analytic basis needs constant c0 >= 0, got {c0}"
            )));
        }
        let (n1, n2) = (grid.n1(), grid.n2());
        let axis_term = |k: usize, n: usize, h: f64| {
            let s = (k as f64 * std::f64::consts::PI / (2.0 * n as f64)).sin();
            4.0 / (h * h) * s * s
        };
        let mut order: Vec<(f64, usize, usize)> = Vec::with_capacity(grid.interior_len());
        for k1 in 1..n1 {
            let t1 = axis_term(k1, n1, grid.h1());
            for k2 in 1..n2 {
                let mu = a0 * (t1 + axis_term(k2, n2, grid.h2())) + c0;
                order.push((mu, k1, k2));
            }
        }
        order.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        let eigenvalues: Vec<f64> = order.iter().map(|t| t.0).collect();
        let modes: Vec<(usize, usize)> = order.iter().map(|t| (t.1, t.2)).collect();
        let mut inv = vec![0usize; modes.len()];
        for (s, &(k1, k2)) in modes.iter().enumerate() {
            inv[(k1 - 1) * (n2 - 1) + (k2 - 1)] = s;
        }
        Ok(Self {
            grid,
            eigenvalues,
            kind: BasisKind::AnalyticSine {
                modes,
                inv,
                sin1: sine_matrix(n1),
                sin2: sine_matrix(n2),
            },
        })
    }

    /// Full symmetric eigendecomposition of the assembled operator.
    pub fn dense(op: &EllipticOperator) -> Result<Self> {
        Self::dense_capped(op, DENSE_CAP)
    }

    pub fn dense_capped(op: &EllipticOperator, cap: usize) -> Result<Self> {
        let grid = op.grid();
        let mat = op.assemble_dense_capped(cap)?;
        let k = mat.nrows();
        let eigen = nalgebra::SymmetricEigen::try_new(mat, f64::EPSILON, 100 * k.max(10))
            .ok_or_else(|| Error::Numeric("operator eigensolve did not converge".into()))?;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            eigen.eigenvalues[a]
                .partial_cmp(&eigen.eigenvalues[b])
                .unwrap()
                .then(a.cmp(&b))
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
        if eigenvalues[0] <= 0.0 {
            return Err(Error::Numeric(format!(
                "operator is not positive definite: mu_1 = {}",
                eigenvalues[0]
            )));
        }
        // Euclidean-orthonormal eigenvectors rescaled to unit discrete norm
        let scale = 1.0 / grid.cell_area().sqrt();
        let mut vectors = DMatrix::<f64>::zeros(k, k);
        for (col, &i) in order.iter().enumerate() {
            vectors
                .column_mut(col)
                .copy_from(&(eigen.eigenvectors.column(i) * scale));
        }
        Ok(Self {
            grid,
            eigenvalues,
            kind: BasisKind::DenseEigen { vectors },
        })
    }

    pub fn mode(&self) -> BasisMode {
        match self.kind {
            BasisKind::AnalyticSine { .. } => BasisMode::AnalyticSine,
            BasisKind::DenseEigen { .. } => BasisMode::DenseEigen,
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of modes K.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Smallest eigenvalue mu_1.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// The k-th (0-based, ascending-eigenvalue order) basis function.
    pub fn basis_function(&self, k: usize) -> GridFunction {
        match &self.kind {
            BasisKind::AnalyticSine { modes, .. } => {
                let (k1, k2) = modes[k];
                let grid = self.grid;
                let norm = 2.0 / (grid.l1() * grid.l2()).sqrt();
                let (n1, n2) = (grid.n1(), grid.n2());
                let mut values = Vec::with_capacity(grid.interior_len());
                for i1 in 1..n1 {
                    for i2 in 1..n2 {
                        values.push(norm * sine_entry(k1, i1, n1) * sine_entry(k2, i2, n2));
                    }
                }
                GridFunction::from_values(grid, values).unwrap()
            }
            BasisKind::DenseEigen { vectors } => {
                GridFunction::from_values(self.grid, vectors.column(k).iter().cloned().collect())
                    .unwrap()
            }
        }
    }

    fn check_field(&self, u: &GridFunction) -> Result<()> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch(
                "field is not on the basis grid".into(),
            ));
        }
        Ok(())
    }

    fn check_coeffs(&self, c: &SpectralCoefficients) -> Result<()> {
        if c.grid != self.grid || c.values.len() != self.len() {
            return Err(Error::GridMismatch(
                "coefficients do not belong to this basis".into(),
            ));
        }
        Ok(())
    }

    /// Coefficients (u, psi_k) for all k.
    pub fn forward(&self, u: &GridFunction) -> Result<SpectralCoefficients> {
        self.check_field(u)?;
        let grid = self.grid;
        let values = match &self.kind {
            BasisKind::AnalyticSine {
                inv, sin1, sin2, ..
            } => {
                let u_mat =
                    DMatrix::from_row_slice(grid.n1() - 1, grid.n2() - 1, u.values());
                // sine matrices are symmetric, so no transposes are needed
                let g = sin1 * u_mat * sin2;
                let scale = grid.cell_area() * 2.0 / (grid.l1() * grid.l2()).sqrt();
                let mut values = vec![0.0; self.len()];
                for (flat, &s) in inv.iter().enumerate() {
                    values[s] = scale * g[(flat / (grid.n2() - 1), flat % (grid.n2() - 1))];
                }
                values
            }
            BasisKind::DenseEigen { vectors } => {
                let u_vec = DVector::from_column_slice(u.values());
                let c = vectors.transpose() * u_vec * grid.cell_area();
                c.iter().cloned().collect()
            }
        };
        Ok(SpectralCoefficients { grid, values })
    }

    /// Reassembles the field sum_k c_k psi_k.
    pub fn inverse(&self, coeffs: &SpectralCoefficients) -> Result<GridFunction> {
        self.check_coeffs(coeffs)?;
        let grid = self.grid;
        match &self.kind {
            BasisKind::AnalyticSine {
                inv, sin1, sin2, ..
            } => {
                let (r, c) = (grid.n1() - 1, grid.n2() - 1);
                let mut g = DMatrix::<f64>::zeros(r, c);
                for (flat, &s) in inv.iter().enumerate() {
                    g[(flat / c, flat % c)] = coeffs.values[s];
                }
                let u_mat = sin1 * g * sin2;
                let scale = 2.0 / (grid.l1() * grid.l2()).sqrt();
                let mut values = Vec::with_capacity(r * c);
                for i in 0..r {
                    for j in 0..c {
                        values.push(scale * u_mat[(i, j)]);
                    }
                }
                GridFunction::from_values(grid, values)
            }
            BasisKind::DenseEigen { vectors } => {
                let c_vec = DVector::from_column_slice(&coeffs.values);
                let u = vectors * c_vec;
                GridFunction::from_values(grid, u.iter().cloned().collect())
            }
        }
    }

    /// Applies a per-mode multiplier `f(mu_k)` in coefficient space.
    pub fn scale_modes(
        &self,
        coeffs: &SpectralCoefficients,
        f: impl Fn(f64) -> f64,
    ) -> Result<SpectralCoefficients> {
        self.check_coeffs(coeffs)?;
        Ok(SpectralCoefficients {
            grid: coeffs.grid,
            values: coeffs
                .values
                .iter()
                .zip(&self.eigenvalues)
                .map(|(c, mu)| c * f(*mu))
                .collect(),
        })
    }

    /// e^(-t A) u through per-mode damping, the exact solution of the
    /// parabolic Cauchy problem at time t.
    pub fn apply_semigroup(&self, u: &GridFunction, t: f64) -> Result<GridFunction> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        let c = self.forward(u)?;
        let damped = self.scale_modes(&c, |mu| (-mu * t).exp())?;
        self.inverse(&damped)
    }

    /// The exact solution A^(-alpha) b via per-mode multipliers mu_k^(-alpha);
    /// this is the reference the solution errors are measured against.
    pub fn fractional_inverse(&self, b: &GridFunction, alpha: f64) -> Result<GridFunction> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let c = self.forward(b)?;
        let scaled = self.scale_modes(&c, |mu| mu.powf(-alpha))?;
        self.inverse(&scaled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::CoefficientField;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid2D, rng: &mut impl Rng) -> GridFunction {
        let values = (0..grid.interior_len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        GridFunction::from_values(grid, values).unwrap()
    }

    #[test]
    fn single_mode_grid() {
        let g = Grid2D::unit_square(2).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        assert_eq!(basis.len(), 1);
        assert_relative_eq!(basis.min_eigenvalue(), 16.0, max_relative = 1e-14);

        let u = GridFunction::from_values(g, vec![1.0]).unwrap();
        let w = basis.apply_semigroup(&u, 0.1).unwrap();
        assert_relative_eq!(w.values()[0], (-1.6f64).exp(), max_relative = 1e-14);
        let v = basis.fractional_inverse(&u, 0.5).unwrap();
        assert_relative_eq!(v.values()[0], 0.25, max_relative = 1e-14);
    }

    #[test]
    fn eigenvalue_bounds() {
        // mu_1 >= 8 (1/l1^2 + 1/l2^2), with equality at N = 2, and
        // mu_K < 4 (1/h1^2 + 1/h2^2); both follow from sin^2 estimates
        for (n1, n2, l1, l2) in [
            (2, 2, 1.0, 1.0),
            (4, 4, 1.0, 1.0),
            (16, 8, 1.0, 2.0),
            (64, 64, 1.0, 1.0),
        ] {
            let g = Grid2D::new(n1, n2, l1, l2).unwrap();
            let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
            let lower = 8.0 * (1.0 / (l1 * l1) + 1.0 / (l2 * l2));
            assert!(
                basis.min_eigenvalue() >= lower * (1.0 - 1e-14),
                "mu_1 = {} vs lower bound {lower}",
                basis.min_eigenvalue()
            );
            assert!(
                basis.max_eigenvalue()
                    < 4.0 * (1.0 / (g.h1() * g.h1()) + 1.0 / (g.h2() * g.h2()))
            );
            assert!(basis.min_eigenvalue() > 0.0);
            assert!(basis
                .eigenvalues()
                .windows(2)
                .all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn basis_functions_orthonormal() {
        let g = Grid2D::new(6, 5, 1.0, 1.5).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        for k in 0..basis.len() {
            let pk = basis.basis_function(k);
            for j in k..basis.len() {
                let pj = basis.basis_function(j);
                let dot = pk.inner_product(&pj).unwrap();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() <= 1e-10, "({k},{j}): {dot}");
            }
        }
    }

    #[test]
    fn forward_of_basis_function_is_unit_vector() {
        let g = Grid2D::unit_square(8).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        for k in [0usize, 3, 17, 48] {
            let c = basis.forward(&basis.basis_function(k)).unwrap();
            for (j, v) in c.values().iter().enumerate() {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((v - expect).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn forward_of_zero_is_zero() {
        let g = Grid2D::unit_square(8).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let c = basis.forward(&GridFunction::zeros(g)).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn transform_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Grid2D::unit_square(32).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        for _ in 0..3 {
            let u = random_field(g, &mut rng);
            let back = basis.inverse(&basis.forward(&u).unwrap()).unwrap();
            assert!(back.sub(&u).unwrap().norm_l2() <= 1e-11 * u.norm_l2());
        }
    }

    #[test]
    fn parseval_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in [8usize, 32] {
            let g = Grid2D::unit_square(n).unwrap();
            let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
            let u = random_field(g, &mut rng);
            let c = basis.forward(&u).unwrap();
            assert_relative_eq!(c.norm(), u.norm_l2(), max_relative = 1e-10);
        }
    }

    #[test]
    fn analytic_scaling_with_constant_coefficients() {
        let g = Grid2D::unit_square(6).unwrap();
        let plain = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let scaled = SpectralBasis::analytic(g, 2.5, 0.7).unwrap();
        for (m0, m1) in plain.eigenvalues().iter().zip(scaled.eigenvalues()) {
            assert_relative_eq!(2.5 * m0 + 0.7, *m1, max_relative = 1e-13);
        }
    }

    #[test]
    fn dense_matches_analytic_at_n8() {
        let g = Grid2D::unit_square(8).unwrap();
        let op = EllipticOperator::laplacian(g).unwrap();
        let dense = SpectralBasis::dense(&op).unwrap();
        let analytic = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        for (d, a) in dense.eigenvalues().iter().zip(analytic.eigenvalues()) {
            assert_relative_eq!(d, a, max_relative = 1e-9);
        }
    }

    #[test]
    fn dense_eigenvalues_shift_with_reaction_term() {
        let g = Grid2D::unit_square(8).unwrap();
        let base = SpectralBasis::dense(&EllipticOperator::laplacian(g).unwrap()).unwrap();
        let shifted = SpectralBasis::dense(
            &EllipticOperator::new(g, &CoefficientField::constant(1.0, 1.0)).unwrap(),
        )
        .unwrap();
        for (a, b) in base.eigenvalues().iter().zip(shifted.eigenvalues()) {
            assert_relative_eq!(a + 1.0, *b, max_relative = 1e-9);
        }
    }

    #[test]
    fn dense_basis_reconstructs_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = Grid2D::new(7, 6, 1.0, 0.8).unwrap();
        let coeffs = CoefficientField::new(|x1, x2| 1.0 + x1 * x2, |x1, _| 0.3 * x1);
        let op = EllipticOperator::new(g, &coeffs).unwrap();
        let basis = SpectralBasis::dense(&op).unwrap();
        let u = random_field(g, &mut rng);
        let c = basis.forward(&u).unwrap();
        let via_basis = basis
            .inverse(&basis.scale_modes(&c, |mu| mu).unwrap())
            .unwrap();
        let via_apply = op.apply(&u).unwrap();
        assert!(via_basis.sub(&via_apply).unwrap().norm_l2() <= 1e-9 * via_apply.norm_l2());
    }

    #[test]
    fn dense_transform_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let g = Grid2D::unit_square(8).unwrap();
        let basis = SpectralBasis::dense(&EllipticOperator::laplacian(g).unwrap()).unwrap();
        let u = random_field(g, &mut rng);
        let back = basis.inverse(&basis.forward(&u).unwrap()).unwrap();
        assert!(back.sub(&u).unwrap().norm_l2() <= 1e-11 * u.norm_l2());
    }

    #[test]
    fn semigroup_identity_and_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = Grid2D::unit_square(16).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let u = random_field(g, &mut rng);

        let id = basis.apply_semigroup(&u, 0.0).unwrap();
        assert!(id.sub(&u).unwrap().norm_l2() <= 1e-12 * u.norm_l2());

        let (t, s) = (0.01, 0.01);
        let once = basis.apply_semigroup(&u, t + s).unwrap();
        let twice = basis
            .apply_semigroup(&basis.apply_semigroup(&u, t).unwrap(), s)
            .unwrap();
        assert!(once.sub(&twice).unwrap().norm_l2() <= 1e-11 * once.norm_l2());
    }

    #[test]
    fn semigroup_decay_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let g = Grid2D::unit_square(16).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let u = random_field(g, &mut rng);
        let mu1 = basis.min_eigenvalue();
        let mut prev = u.norm_l2();
        for t in [1e-4, 1e-3, 1e-2, 0.1] {
            let w = basis.apply_semigroup(&u, t).unwrap();
            let bound = (-mu1 * t).exp() * u.norm_l2();
            assert!(w.norm_l2() <= bound * (1.0 + 1e-10));
            assert!(w.norm_l2() <= prev * (1.0 + 1e-12));
            prev = w.norm_l2();
        }
    }

    #[test]
    fn semigroup_rejects_negative_time() {
        let g = Grid2D::unit_square(4).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let u = GridFunction::zeros(g);
        assert!(matches!(
            basis.apply_semigroup(&u, -1e-9),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fractional_inverse_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let g = Grid2D::unit_square(12).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let b = random_field(g, &mut rng);
        let alpha = 0.7;
        let once = basis.fractional_inverse(&b, alpha).unwrap();
        let twice = basis
            .fractional_inverse(&basis.fractional_inverse(&b, alpha / 2.0).unwrap(), alpha / 2.0)
            .unwrap();
        assert!(once.sub(&twice).unwrap().norm_l2() <= 1e-10 * once.norm_l2());
    }

    #[test]
    fn fractional_inverse_on_eigenvector() {
        let g = Grid2D::unit_square(8).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let psi1 = basis.basis_function(0);
        let alpha = 0.3;
        let v = basis.fractional_inverse(&psi1, alpha).unwrap();
        let expect = psi1.scale(basis.min_eigenvalue().powf(-alpha));
        assert!(v.sub(&expect).unwrap().norm_l2() <= 1e-12 * expect.norm_l2());
    }

    #[test]
    fn fractional_inverse_commutes_with_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let g = Grid2D::unit_square(12).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let b = random_field(g, &mut rng);
        let (alpha, t) = (0.4, 0.02);
        let a = basis
            .apply_semigroup(&basis.fractional_inverse(&b, alpha).unwrap(), t)
            .unwrap();
        let bb = basis
            .fractional_inverse(&basis.apply_semigroup(&b, t).unwrap(), alpha)
            .unwrap();
        assert!(a.sub(&bb).unwrap().norm_l2() <= 1e-11 * a.norm_l2());
    }

    #[test]
    fn fractional_inverse_agrees_across_modes() {
        let g = Grid2D::unit_square(8).unwrap();
        let op = EllipticOperator::laplacian(g).unwrap();
        let analytic = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let dense = SpectralBasis::dense(&op).unwrap();
        let b = crate::grid::rhs_f1(g);
        for alpha in [0.1, 0.5, 0.9] {
            let ua = analytic.fractional_inverse(&b, alpha).unwrap();
            let ud = dense.fractional_inverse(&b, alpha).unwrap();
            assert!(ua.sub(&ud).unwrap().norm_l2() <= 1e-8 * ua.norm_l2());
        }
    }

    #[test]
    fn fractional_inverse_rejects_bad_alpha() {
        let g = Grid2D::unit_square(4).unwrap();
        let basis = SpectralBasis::analytic(g, 1.0, 0.0).unwrap();
        let b = GridFunction::zeros(g);
        for alpha in [0.0, 1.0, 1.5, -0.2] {
            assert!(matches!(
                basis.fractional_inverse(&b, alpha),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let basis = SpectralBasis::analytic(Grid2D::unit_square(4).unwrap(), 1.0, 0.0).unwrap();
        let other = GridFunction::zeros(Grid2D::unit_square(8).unwrap());
        assert!(matches!(basis.forward(&other), Err(Error::GridMismatch(_))));
        let other_basis =
            SpectralBasis::analytic(Grid2D::unit_square(8).unwrap(), 1.0, 0.0).unwrap();
        let c = other_basis.forward(&other).unwrap();
        assert!(matches!(basis.inverse(&c), Err(Error::GridMismatch(_))));
    }
}
