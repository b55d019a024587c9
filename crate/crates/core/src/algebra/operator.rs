use std::sync::Arc;

use nalgebra::DMatrix;

use super::banded::{BandCholesky, SymBanded};
use super::space::{weighted_dot, DiscreteSpace, EndpointHandling, SpaceKind};
use crate::error::{Error, Result};

/// Symmetric positive-definite operator on a [`DiscreteSpace`].
///
/// Operators are stored through their Gram matrix `K` with respect to the
/// weighted inner product, `(M x, y) = x^T K y`, so that `M = W^{-1} K` is
/// self-adjoint for any set of quadrature weights `W`. On uniform grids `M`
/// itself is a symmetric matrix. All factorizations are computed at
/// construction; apply and solve never mutate.
#[derive(Debug, Clone)]
pub struct SpdOperator {
    space: Arc<DiscreteSpace>,
    label: String,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Identity,
    Form {
        gram: SymBanded,
        factor: BandCholesky,
    },
    /// `L^{-1} + shift * I` for an SPD form operator `L`.
    InverseShift {
        base: Box<SpdOperator>,
        shift: f64,
        // factor of W + shift * K_L
        pencil: BandCholesky,
    },
}

impl SpdOperator {
    pub fn identity(space: Arc<DiscreteSpace>) -> Self {
        Self {
            space,
            label: "I".into(),
            repr: Repr::Identity,
        }
    }

    /// Operator given by its Gram matrix; positive definiteness is certified by
    /// the Cholesky factorization.
    pub fn from_gram(space: Arc<DiscreteSpace>, label: impl Into<String>, gram: SymBanded) -> Result<Self> {
        let label = label.into();
        if gram.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: gram.dim(),
            });
        }
        let factor = BandCholesky::factor(&gram, &label)?;
        Ok(Self {
            space,
            label,
            repr: Repr::Form { gram, factor },
        })
    }

    /// Operator given by its symmetric matrix on a uniform-weight grid.
    pub fn from_matrix(space: Arc<DiscreteSpace>, label: impl Into<String>, matrix: &SymBanded) -> Result<Self> {
        if !space.has_uniform_weights() {
            return Err(Error::InvalidParameter(
                "a symmetric matrix is self-adjoint only for uniform quadrature weights; use from_gram".into(),
            ));
        }
        let w = space.weights()[0];
        Self::from_gram(space, label, matrix.scaled(w))
    }

    /// `base^{-1} + shift * I`, never formed densely.
    pub fn inverse_plus_shift(base: &SpdOperator, shift: f64, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if !(shift >= 0.0) {
            return Err(Error::InvalidParameter(format!("shift must be >= 0, got {shift}")));
        }
        let gram = match &base.repr {
            Repr::Form { gram, .. } => gram,
            _ => {
                return Err(Error::InvalidParameter(
                    "inverse_plus_shift needs a form-type base operator".into(),
                ))
            }
        };
        let pencil_matrix = SymBanded::diagonal(base.space.weights()).combine(1.0, gram, shift);
        let pencil = BandCholesky::factor(&pencil_matrix, &label)?;
        Ok(Self {
            space: base.space.clone(),
            label,
            repr: Repr::InverseShift {
                base: Box::new(base.clone()),
                shift,
                pencil,
            },
        })
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.repr, Repr::Identity)
    }

    /// `(L, a)` for an operator of the form `L^{-1} + a I`.
    pub fn inverse_shift_parts(&self) -> Option<(&SpdOperator, f64)> {
        match &self.repr {
            Repr::InverseShift { base, shift, .. } => Some((base, *shift)),
            _ => None,
        }
    }

    /// Gram matrix when the operator is stored as a band form.
    pub fn gram(&self) -> Option<&SymBanded> {
        match &self.repr {
            Repr::Form { gram, .. } => Some(gram),
            _ => None,
        }
    }

    /// `M v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.space.check_vector(v)?;
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &[f64]) -> Vec<f64> {
        let w = self.space.weights();
        match &self.repr {
            Repr::Identity => v.to_vec(),
            Repr::Form { gram, .. } => {
                let mut y = gram.matvec(v);
                y.iter_mut().zip(w).for_each(|(y, w)| *y /= w);
                y
            }
            Repr::InverseShift { base, shift, .. } => {
                let mut y = base.solve_unchecked(v);
                y.iter_mut().zip(v).for_each(|(y, v)| *y += shift * v);
                y
            }
        }
    }

    /// Solves `M x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.space.check_vector(rhs)?;
        Ok(self.solve_unchecked(rhs))
    }

    pub(crate) fn solve_unchecked(&self, rhs: &[f64]) -> Vec<f64> {
        let w = self.space.weights();
        match &self.repr {
            Repr::Identity => rhs.to_vec(),
            Repr::Form { factor, .. } => {
                let b: Vec<f64> = rhs.iter().zip(w).map(|(r, w)| r * w).collect();
                factor.solve(&b)
            }
            // (L^{-1} + aI) x = r  <=>  (W + a K_L) x = K_L r
            Repr::InverseShift { base, pencil, .. } => {
                let gram = base.gram().expect("form base");
                pencil.solve(&gram.matvec(rhs))
            }
        }
    }

    /// `(M v, v)` in the weighted inner product.
    pub fn quad_form(&self, v: &[f64]) -> Result<f64> {
        self.space.check_vector(v)?;
        Ok(self.quad_form_unchecked(v))
    }

    pub(crate) fn quad_form_unchecked(&self, v: &[f64]) -> f64 {
        let w = self.space.weights();
        match &self.repr {
            Repr::Identity => weighted_dot(w, v, v),
            Repr::Form { gram, .. } => gram.bilinear(v, v),
            Repr::InverseShift { base, shift, .. } => {
                let y = base.solve_unchecked(v);
                weighted_dot(w, &y, v) + shift * weighted_dot(w, v, v)
            }
        }
    }

    /// Dense Gram matrix; the inverse-shift form is assembled column by column
    /// from band solves.
    pub fn gram_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let w = self.space.weights();
        match &self.repr {
            Repr::Identity => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(w)),
            Repr::Form { gram, .. } => gram.to_dense(),
            Repr::InverseShift { .. } => {
                let mut g = DMatrix::zeros(n, n);
                let mut e = vec![0.0; n];
                for j in 0..n {
                    e[j] = 1.0;
                    let col = self.apply_unchecked(&e);
                    for i in 0..n {
                        g[(i, j)] = w[i] * col[i];
                    }
                    e[j] = 0.0;
                }
                // exact symmetry of the export
                let gt = g.transpose();
                (g + gt) * 0.5
            }
        }
    }

    /// Dense operator matrix `W^{-1} K`.
    pub fn matrix_dense(&self) -> DMatrix<f64> {
        let w = self.space.weights();
        let mut m = self.gram_dense();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] /= w[i];
            }
        }
        m
    }

    /// Upper bound on the spectrum of `M` (Gershgorin on the band form).
    pub fn spectral_upper_bound(&self) -> Option<f64> {
        match &self.repr {
            Repr::Identity => Some(1.0),
            Repr::Form { gram, .. } => {
                let wmin = self.space.weights().iter().cloned().fold(f64::INFINITY, f64::min);
                Some(gram.gershgorin_max() / wmin)
            }
            Repr::InverseShift { .. } => None,
        }
    }
}

/// Second-order central-difference `-Δ_h` with homogeneous Dirichlet data on
/// eliminated boundary nodes.
pub fn build_laplacian(space: &Arc<DiscreteSpace>) -> Result<SpdOperator> {
    let m = laplacian_matrix(space)?;
    SpdOperator::from_matrix(space.clone(), "-Lap", &m)
}

/// `Δ_h^2` under `u = Δu = 0`, the exact square of the Dirichlet Laplacian.
pub fn build_bilaplacian(space: &Arc<DiscreteSpace>) -> Result<SpdOperator> {
    let m = laplacian_matrix(space)?;
    SpdOperator::from_matrix(space.clone(), "Lap^2", &m.product_symmetric(&m))
}

/// One-directional second differences `-∂²_x` (axis 0) or `-∂²_y` (axis 1).
pub fn build_directional_laplacian(space: &Arc<DiscreteSpace>, axis: usize) -> Result<SpdOperator> {
    let m = directional_matrix(space, axis)?;
    SpdOperator::from_matrix(space.clone(), if axis == 0 { "-Dxx" } else { "-Dyy" }, &m)
}

/// Stiffness form `Σ_cells (u_{i+1} - u_i)^2 / h` of a 1D grid, so that
/// `x^T K x = ||∇_h x||²`. Eliminated Dirichlet ends contribute their half of
/// the adjacent cell; with both ends free the form is only semidefinite.
pub fn stiffness_form(space: &DiscreteSpace) -> Result<SymBanded> {
    if space.kind() != SpaceKind::Interval1d {
        return Err(Error::KindMismatch("stiffness_form is defined on 1D grids".into()));
    }
    let n = space.dim();
    let c = 1.0 / space.h();
    let mut k = SymBanded::zeros(n, 1);
    for i in 0..n.saturating_sub(1) {
        k.add_at(i, i, c);
        k.add_at(i + 1, i + 1, c);
        k.add_at(i + 1, i, -c);
    }
    match space.endpoints() {
        EndpointHandling::Dirichlet => {
            k.add_at(0, 0, c);
            k.add_at(n - 1, n - 1, c);
        }
        EndpointHandling::RightFree => k.add_at(0, 0, c),
        EndpointHandling::BothFree => {}
    }
    Ok(k)
}

pub(crate) fn laplacian_matrix(space: &DiscreteSpace) -> Result<SymBanded> {
    let mx = directional_matrix(space, 0)?;
    match space.kind() {
        SpaceKind::Interval1d => Ok(mx),
        SpaceKind::Rectangle2d => Ok(mx.combine(1.0, &directional_matrix(space, 1)?, 1.0)),
    }
}

fn directional_matrix(space: &DiscreteSpace, axis: usize) -> Result<SymBanded> {
    if space.endpoints() != EndpointHandling::Dirichlet {
        return Err(Error::KindMismatch(
            "Dirichlet Laplacian requested on a space with free endpoints".into(),
        ));
    }
    let [nx, ny] = space.counts();
    let [hx, hy] = space.spacing();
    let n = space.dim();
    match (space.kind(), axis) {
        (_, 0) => {
            let c = 1.0 / (hx * hx);
            let mut m = SymBanded::zeros(n, 1);
            for k in 0..n {
                m.set(k, k, 2.0 * c);
                if (k + 1) % nx != 0 && k + 1 < n {
                    m.set(k + 1, k, -c);
                }
            }
            Ok(m)
        }
        (SpaceKind::Rectangle2d, 1) => {
            let c = 1.0 / (hy * hy);
            let mut m = SymBanded::zeros(n, nx);
            for k in 0..n {
                m.set(k, k, 2.0 * c);
                if k / nx + 1 < ny {
                    m.set(k + nx, k, -c);
                }
            }
            Ok(m)
        }
        _ => Err(Error::KindMismatch(format!("no axis {axis} on a 1D space"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn interval(l: f64, n: usize) -> Arc<DiscreteSpace> {
        Arc::new(DiscreteSpace::interval_dirichlet(l, n).unwrap())
    }

    #[test]
    fn stiffness_form_measures_gradients() {
        let both = DiscreteSpace::interval_with_free_ends(3.0, 30, EndpointHandling::BothFree).unwrap();
        let k = stiffness_form(&both).unwrap();
        let u = both.sample(|x, _| 2.0 * x + 1.0);
        assert!((k.bilinear(&u, &u) - 12.0).abs() < 1e-12);
        assert!(k.bilinear(&vec![1.0; both.dim()], &vec![1.0; both.dim()]).abs() < 1e-14);
        let right = DiscreteSpace::interval_with_free_ends(3.0, 30, EndpointHandling::RightFree).unwrap();
        let u = right.sample(|x, _| 2.0 * x);
        assert!((stiffness_form(&right).unwrap().bilinear(&u, &u) - 12.0).abs() < 1e-12);
        let dir = interval(2.0, 9);
        let lap = build_laplacian(&dir).unwrap();
        assert_eq!(stiffness_form(&dir).unwrap().to_dense(), lap.gram_dense());
    }

    #[test]
    fn textbook_stencil() {
        let s = interval(4.0, 3);
        let lap = build_laplacian(&s).unwrap();
        let m = lap.matrix_dense();
        let expected = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert_eq!(m, expected);
        assert_eq!(SymBanded::max_asymmetry(&m), 0.0);
    }

    #[test]
    fn identity_is_exact() {
        let s = interval(1.0, 5);
        let id = SpdOperator::identity(s.clone());
        let v = vec![0.1, -3.0, 7.25, 1e-9, 2.0];
        assert_eq!(id.apply(&v).unwrap(), v);
        assert_eq!(id.solve(&v).unwrap(), v);
        assert_eq!(id.quad_form(&v).unwrap(), super::super::inner(&s, &v, &v).unwrap());
    }

    #[test]
    fn discrete_sine_is_eigenvector() {
        let l = 2.0;
        let s = interval(l, 63);
        let h = s.h();
        let lap = build_laplacian(&s).unwrap();
        for k in [1usize, 3, 10] {
            let kk = k as f64;
            let v = s.sample(|x, _| (kk * PI * x / l).sin());
            let lam = 4.0 / (h * h) * (kk * PI * h / (2.0 * l)).sin().powi(2);
            let mv = lap.apply(&v).unwrap();
            for (a, b) in mv.iter().zip(&v) {
                assert!((a - lam * b).abs() < 1e-9 * lam, "{k}");
            }
        }
    }

    #[test]
    fn manufactured_poisson_solution() {
        let s = interval(1.0, 99);
        let lap = build_laplacian(&s).unwrap();
        let rhs = s.sample(|x, _| PI * PI * (PI * x).sin());
        let u = lap.solve(&rhs).unwrap();
        let exact = s.sample(|x, _| (PI * x).sin());
        let err = u.iter().zip(&exact).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let h = s.h();
        assert!(err < PI * PI / 12.0 * h * h * 1.1, "err = {err}");
        assert!(err > 0.0);
    }

    #[test]
    fn solve_round_trip_and_residual() {
        let s = interval(1.0, 199);
        let lap = build_laplacian(&s).unwrap();
        let v = s.sample(|x, _| (3.0 * x).cos() + x * x);
        let back = lap.solve(&lap.apply(&v).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-9);
        }
        let rhs = s.sample(|x, _| 1.0 + x);
        let x = lap.solve(&rhs).unwrap();
        let r = lap.apply(&x).unwrap();
        let res: f64 = r.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = rhs.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(res <= 1e-10 * nb, "{res}");
    }

    #[test]
    fn bilaplacian_is_square() {
        let s = interval(1.0, 12);
        let lap = build_laplacian(&s).unwrap().matrix_dense();
        let bi = build_bilaplacian(&s).unwrap().matrix_dense();
        let sq = &lap * &lap;
        assert!((bi - &sq).abs().max() <= 1e-14 * sq.abs().max());
        let e1 = lap.symmetric_eigenvalues();
        let e2 = build_bilaplacian(&s).unwrap().matrix_dense().symmetric_eigenvalues();
        let mut a: Vec<f64> = e1.iter().map(|x| x * x).collect();
        let mut b: Vec<f64> = e2.iter().cloned().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9 * y.abs().max(1.0));
        }
    }

    #[test]
    fn rectangle_matches_kronecker_sum() {
        let (nx, ny) = (8, 8);
        let s = Arc::new(DiscreteSpace::rectangle_dirichlet(1.0, 1.5, nx, ny).unwrap());
        let m = build_laplacian(&s).unwrap().matrix_dense();
        let [hx, hy] = s.spacing();
        let t = |n: usize, h: f64| {
            DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
                0 => 2.0 / (h * h),
                1 => -1.0 / (h * h),
                _ => 0.0,
            })
        };
        // x-fastest ordering: I_y (x) T_x + T_y (x) I_x
        let dense = DMatrix::<f64>::identity(ny, ny).kronecker(&t(nx, hx))
            + t(ny, hy).kronecker(&DMatrix::<f64>::identity(nx, nx));
        assert!((m - dense).abs().max() < 1e-9);
    }

    #[test]
    fn inverse_shift_matches_dense_inverse() {
        let s = interval(1.0, 32);
        let lap = build_laplacian(&s).unwrap();
        for a in [0.0, 1.0] {
            let p = SpdOperator::inverse_plus_shift(&lap, a, "P").unwrap();
            let dense = lap.matrix_dense().try_inverse().unwrap() + DMatrix::identity(32, 32) * a;
            let v = s.sample(|x, _| (7.0 * x).sin() + x);
            let dv = &dense * nalgebra::DVector::from_column_slice(&v);
            let via_dense: f64 = (0..32).map(|i| s.weights()[i] * dv[i] * v[i]).sum();
            let q = p.quad_form(&v).unwrap();
            assert!((q - via_dense).abs() <= 1e-10 * q.abs(), "a = {a}");
            let back = p.solve(&p.apply(&v).unwrap()).unwrap();
            for (x, y) in back.iter().zip(&v) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let s = interval(1.0, 4);
        let lap = build_laplacian(&s).unwrap();
        assert!(lap.apply(&[1.0; 3]).is_err());
        assert!(lap.solve(&[1.0; 5]).is_err());
        assert!(lap.quad_form(&[1.0; 2]).is_err());
    }
}
