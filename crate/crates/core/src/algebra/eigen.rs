use nalgebra::{DMatrix, SymmetricEigen};

use super::operator::SpdOperator;
use super::space::weighted_dot;
use crate::error::{Error, Result};

/// Largest dimension handled by the dense generalized eigensolver.
pub const DENSE_EIG_LIMIT: usize = 512;
pub const EIG_RESIDUAL_TOL: f64 = 1e-8;
const MAX_INVERSE_ITERATIONS: usize = 20_000;

/// Smallest generalized eigenpair of `A v = a0 P v`, i.e. the best constant
/// in `(Av, v) >= a0 (Pv, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigResult {
    pub a0: f64,
    /// Normalized to `(P v, v) = 1`.
    pub eigvec: Vec<f64>,
    /// `||A v - a0 P v|| / ||v||` in the weighted norm.
    pub residual: f64,
}

pub fn min_generalized_eig(a: &SpdOperator, p: &SpdOperator) -> Result<GeneralizedEigResult> {
    if a.dim() != p.dim() || a.space().weights() != p.space().weights() {
        return Err(Error::KindMismatch("operators live on different spaces".into()));
    }
    let n = a.dim();
    let start = if n <= DENSE_EIG_LIMIT {
        let (values, vectors) = dense_generalized(a, p)?;
        let (imin, _) = values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty spectrum");
        vectors.column(imin).iter().cloned().collect()
    } else {
        let space = a.space();
        space.sample(|x, y| 1.0 + 0.01 * (x + 0.5 * y).sin())
    };
    inverse_iteration(a, p, start, if n <= DENSE_EIG_LIMIT { 3 } else { MAX_INVERSE_ITERATIONS })
}

/// All generalized eigenvalues in ascending order (dense; oracle and small-n path).
pub fn generalized_eigenvalues(a: &SpdOperator, p: &SpdOperator) -> Result<Vec<f64>> {
    let (mut values, _) = dense_generalized(a, p)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Upper bound (dense value for small n) on the largest generalized eigenvalue
/// of `A v = λ P v`.
pub fn max_generalized_eig_bound(a: &SpdOperator, p: &SpdOperator) -> Result<f64> {
    if a.dim() <= DENSE_EIG_LIMIT {
        let values = generalized_eigenvalues(a, p)?;
        return Ok(*values.last().expect("non-empty spectrum"));
    }
    let upper = a
        .spectral_upper_bound()
        .ok_or_else(|| Error::InvalidParameter(format!("no spectral bound for `{}`", a.label())))?;
    Ok(upper / lower_spectral_bound(p)?)
}

/// Lower bound (dense value for small n) on the spectrum of `P`.
pub fn lower_spectral_bound(p: &SpdOperator) -> Result<f64> {
    if p.is_identity() {
        return Ok(1.0);
    }
    if let Some((base, shift)) = p.inverse_shift_parts() {
        if p.dim() > DENSE_EIG_LIMIT {
            let top = base.spectral_upper_bound().expect("form base");
            return Ok(1.0 / top + shift);
        }
    }
    let id = SpdOperator::identity(p.space().clone());
    Ok(min_generalized_eig(p, &id)?.a0)
}

fn dense_generalized(a: &SpdOperator, p: &SpdOperator) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let ka = a.gram_dense();
    let kp = p.gram_dense();
    let chol = kp.cholesky().ok_or_else(|| Error::NotPositiveDefinite {
        label: p.label().to_string(),
        row: 0,
        pivot: f64::NAN,
    })?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&ka)
        .expect("Cholesky factor is nonsingular");
    let c = l
        .solve_lower_triangular(&x.transpose())
        .expect("Cholesky factor is nonsingular");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let vectors = l
        .tr_solve_lower_triangular(&eig.eigenvectors)
        .expect("Cholesky factor is nonsingular");
    Ok((eig.eigenvalues.iter().cloned().collect(), vectors))
}

fn inverse_iteration(
    a: &SpdOperator,
    p: &SpdOperator,
    mut x: Vec<f64>,
    max_iter: usize,
) -> Result<GeneralizedEigResult> {
    let w = a.space().weights().to_vec();
    normalize_p(p, &mut x);
    let mut last = (f64::NAN, f64::INFINITY);
    for _ in 0..max_iter {
        let px = p.apply_unchecked(&x);
        let mut y = a.solve_unchecked(&px);
        normalize_p(p, &mut y);
        x = y;
        let (lambda, residual, scale) = rayleigh_residual(a, p, &x, &w);
        last = (lambda, residual);
        if residual <= EIG_RESIDUAL_TOL * scale.max(1.0) {
            break;
        }
    }
    let (lambda, residual, scale) = rayleigh_residual(a, p, &x, &w);
    if !(residual <= EIG_RESIDUAL_TOL * scale.max(1.0)) {
        return Err(Error::EigenNonConvergence {
            iterations: max_iter,
            residual: last.1,
        });
    }
    // fix sign for determinism: positive weighted mean
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(GeneralizedEigResult {
        a0: lambda,
        eigvec: x,
        residual,
    })
}

fn normalize_p(p: &SpdOperator, x: &mut [f64]) {
    let nrm = p.quad_form_unchecked(x).sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
}

fn rayleigh_residual(a: &SpdOperator, p: &SpdOperator, x: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let ax = a.apply_unchecked(x);
    let px = p.apply_unchecked(x);
    let lambda = weighted_dot(w, &ax, x) / weighted_dot(w, &px, x);
    let r: Vec<f64> = ax.iter().zip(&px).map(|(u, v)| u - lambda * v).collect();
    let xn = weighted_dot(w, x, x).sqrt();
    let residual = weighted_dot(w, &r, &r).sqrt() / xn;
    let scale = weighted_dot(w, &ax, &ax).sqrt() / xn;
    (lambda, residual, scale)
}

/// Dense oracle for the smallest eigenvalue of `K_P^{-1} K_A`, independent of
/// the factorized path (used by tests).
pub fn dense_min_eig_oracle(ka: &DMatrix<f64>, kp: &DMatrix<f64>) -> f64 {
    let m = kp.clone().try_inverse().expect("invertible") * ka;
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_bilaplacian, build_laplacian, DiscreteSpace};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn interval(l: f64, n: usize) -> Arc<DiscreteSpace> {
        Arc::new(DiscreteSpace::interval_dirichlet(l, n).unwrap())
    }

    #[test]
    fn equal_operators_give_one() {
        let s = interval(1.0, 20);
        let lap = build_laplacian(&s).unwrap();
        let r = min_generalized_eig(&lap, &lap).unwrap();
        assert!((r.a0 - 1.0).abs() < 1e-10);
        assert!(r.residual <= 1e-8 * 1e3);
    }

    #[test]
    fn dirichlet_ground_state_on_pi() {
        let s = interval(PI, 199);
        let h = s.h();
        let lap = build_laplacian(&s).unwrap();
        let id = SpdOperator::identity(s.clone());
        let r = min_generalized_eig(&lap, &id).unwrap();
        let expected = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        assert!((r.a0 - expected).abs() < 1e-10);
        assert!((r.a0 - 1.0).abs() < 1e-3);
        assert!(r.residual <= 1e-8);
    }

    #[test]
    fn boussinesq_pencil_matches_dense_oracle() {
        let s = interval(1.0, 64);
        let lap = build_laplacian(&s).unwrap();
        let nu = 0.7;
        let a = SpdOperator::from_gram(
            s.clone(),
            "I-nuLap",
            lap.gram().unwrap().combine(nu, &crate::algebra::SymBanded::diagonal(s.weights()), 1.0),
        )
        .unwrap();
        for shift in [0.0, 1.0] {
            let p = SpdOperator::inverse_plus_shift(&lap, shift, "P").unwrap();
            let r = min_generalized_eig(&a, &p).unwrap();
            let oracle = dense_min_eig_oracle(&a.gram_dense(), &p.gram_dense());
            assert!((r.a0 - oracle).abs() <= 1e-8 * oracle.max(1.0), "{} vs {}", r.a0, oracle);
            assert!(r.residual <= 1e-8);
        }
    }

    #[test]
    fn inverse_iteration_path_for_large_grids() {
        let s = interval(PI, 700);
        let lap = build_laplacian(&s).unwrap();
        let id = SpdOperator::identity(s.clone());
        let r = min_generalized_eig(&lap, &id).unwrap();
        let h = s.h();
        let expected = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        assert!((r.a0 - expected).abs() < 1e-9, "{}", r.a0);
        assert!(r.residual <= 1e-8);
    }

    #[test]
    fn spectrum_bounds() {
        let s = interval(PI, 40);
        let bi = build_bilaplacian(&s).unwrap();
        let id = SpdOperator::identity(s.clone());
        let top = max_generalized_eig_bound(&bi, &id).unwrap();
        let h = s.h();
        let lam_max = 4.0 / (h * h) * (40.0 * h / 2.0).sin().powi(2);
        assert!((top - lam_max * lam_max).abs() < 1e-6 * top);
        assert_eq!(lower_spectral_bound(&id).unwrap(), 1.0);
    }
}
