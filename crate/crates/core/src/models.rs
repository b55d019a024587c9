//! Grid realizations of the example problems in the abstract form
//! `P u_tt + A u = F(u)`.

use std::sync::Arc;

use crate::algebra::{
    build_bilaplacian, build_laplacian, lower_spectral_bound, max_generalized_eig_bound, min_generalized_eig,
    stiffness_form, DiscreteSpace, EndpointHandling, SpdOperator, SymBanded,
};
use crate::error::{Error, Result};
use crate::nonlinearity::{KirchhoffCoefficients, Nonlinearity, ScalarLaw, DEFAULT_R0_RANGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    KleinGordon,
    Boussinesq,
    Plate,
    NonlinearBoundary,
    ScalarOde,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::KleinGordon => "klein_gordon",
            ModelKind::Boussinesq => "boussinesq",
            ModelKind::Plate => "plate",
            ModelKind::NonlinearBoundary => "nonlinear_boundary",
            ModelKind::ScalarOde => "scalar_ode",
        }
    }
}

/// Which part of the boundary carries the nonlinear flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaSplit {
    BothEnds,
    /// Flux at x = L, homogeneous Dirichlet at x = 0.
    RightEndOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlateGeometry {
    Interval { length: f64, n: usize },
    Rectangle { lx: f64, ly: f64, nx: usize, ny: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    KleinGordon { mass: f64, p: f64 },
    Boussinesq { a: f64, nu: f64, m: u32, poly: Vec<f64> },
    Plate { kirchhoff: Option<KirchhoffCoefficients>, law: Option<ScalarLaw> },
    NonlinearBoundary { b: f64, law: Option<ScalarLaw>, split: GammaSplit },
    ScalarOde { a0: f64, p: f64 },
}

/// A fully assembled model. Spectral constants are computed once at
/// construction: `a0` (best constant in `(Av,v) >= a0 (Pv,v)`), the top of
/// the generalized spectrum of `(A, P)` and the bottom of the spectrum of `P`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    kind: ModelKind,
    space: Arc<DiscreteSpace>,
    p: SpdOperator,
    a: SpdOperator,
    nl: Nonlinearity,
    params: ModelParams,
    a0: f64,
    omega_max_sq: f64,
    p_min_eig: f64,
    grad_gram: Option<SymBanded>,
    support_monitor: bool,
}

impl ModelSpec {
    fn assemble(
        kind: ModelKind,
        p: SpdOperator,
        a: SpdOperator,
        nl: Nonlinearity,
        params: ModelParams,
        grad_gram: Option<SymBanded>,
    ) -> Result<Self> {
        let space = p.space().clone();
        let a0 = min_generalized_eig(&a, &p)?.a0;
        if !(a0 > 0.0) {
            return Err(Error::InvalidParameter(format!("coercivity constant a0 = {a0} is not positive")));
        }
        Ok(Self {
            kind,
            omega_max_sq: max_generalized_eig_bound(&a, &p)?,
            p_min_eig: lower_spectral_bound(&p)?,
            support_monitor: kind == ModelKind::KleinGordon,
            space,
            p,
            a,
            nl,
            params,
            a0,
            grad_gram,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        &self.space
    }

    pub fn p_op(&self) -> &SpdOperator {
        &self.p
    }

    pub fn a_op(&self) -> &SpdOperator {
        &self.a
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.nl.alpha()
    }

    pub fn r0(&self) -> f64 {
        self.nl.r0()
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Upper bound on the largest squared linear frequency.
    pub fn omega_max_sq(&self) -> f64 {
        self.omega_max_sq
    }

    pub fn p_min_eig(&self) -> f64 {
        self.p_min_eig
    }

    /// Gram matrix of `||∇_h u||²` where the model has one.
    pub fn grad_gram(&self) -> Option<&SymBanded> {
        self.grad_gram.as_ref()
    }

    /// Whether runs watch the box wall (truncated Cauchy problems).
    pub fn support_monitor(&self) -> bool {
        self.support_monitor
    }

    pub fn with_support_monitor(mut self, on: bool) -> Self {
        self.support_monitor = on;
        self
    }

    pub fn is_linear(&self) -> bool {
        self.nl.is_zero()
    }

    /// Same operators with `F = 0` (linear control).
    pub fn linearized(&self) -> Self {
        Self {
            nl: Nonlinearity::zero(&self.space),
            ..self.clone()
        }
    }

    pub fn with_nonlinearity(&self, nl: Nonlinearity) -> Result<Self> {
        if nl.eval_f(&self.space, &vec![0.0; self.space.dim()]).is_err() {
            return Err(Error::KindMismatch("nonlinearity does not match the model space".into()));
        }
        Ok(Self { nl, ..self.clone() })
    }

    /// Mass of the Klein-Gordon model.
    pub fn kg_mass(&self) -> Result<f64> {
        match self.params {
            ModelParams::KleinGordon { mass, .. } => Ok(mass),
            _ => Err(Error::KindMismatch(format!("{} model is not Klein-Gordon", self.kind.name()))),
        }
    }

    /// Linear damping coefficient `b` of the boundary-flux model.
    pub fn nb_coefficient(&self) -> Result<f64> {
        match self.params {
            ModelParams::NonlinearBoundary { b, .. } => Ok(b),
            _ => Err(Error::KindMismatch(format!(
                "{} model has no nonlinear boundary",
                self.kind.name()
            ))),
        }
    }
}

/// `u_tt - Δu + m²u = |u|^p u` on a Dirichlet interval (0, L).
pub fn make_klein_gordon(length: f64, n: usize, mass: f64, p: f64) -> Result<ModelSpec> {
    let space = Arc::new(DiscreteSpace::interval_dirichlet(length, n)?);
    klein_gordon_on(space, mass, p)
}

/// Two-dimensional Klein-Gordon model on a Dirichlet rectangle.
pub fn make_klein_gordon_2d(lx: f64, ly: f64, nx: usize, ny: usize, mass: f64, p: f64) -> Result<ModelSpec> {
    let space = Arc::new(DiscreteSpace::rectangle_dirichlet(lx, ly, nx, ny)?);
    klein_gordon_on(space, mass, p)
}

fn klein_gordon_on(space: Arc<DiscreteSpace>, mass: f64, p: f64) -> Result<ModelSpec> {
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!("Klein-Gordon mass must be > 0, got {mass}")));
    }
    let lap = build_laplacian(&space)?;
    let grad = lap.gram().expect("form operator").clone();
    let gram = grad.combine(1.0, &SymBanded::diagonal(space.weights()), mass * mass);
    let a = SpdOperator::from_gram(space.clone(), "-Lap+m^2", gram)?;
    let nl = Nonlinearity::power(&space, p)?;
    ModelSpec::assemble(
        ModelKind::KleinGordon,
        SpdOperator::identity(space),
        a,
        nl,
        ModelParams::KleinGordon { mass, p },
        Some(grad),
    )
}

/// Generalized Boussinesq model with `P = (-Δ)^{-1} + aI`, `A = I - νΔ` and
/// `f(u) = |u|^m u + P_{m-1}(u)` on a Dirichlet interval (`u = Δu = 0`).
pub fn make_boussinesq(length: f64, n: usize, a: f64, nu: f64, m: u32, poly: Vec<f64>) -> Result<ModelSpec> {
    if !(a >= 0.0) || !(nu > 0.0) || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "Boussinesq needs a >= 0, nu > 0, m >= 1 (got a = {a}, nu = {nu}, m = {m})"
        )));
    }
    let space = Arc::new(DiscreteSpace::interval_dirichlet(length, n)?);
    let lap = build_laplacian(&space)?;
    let grad = lap.gram().expect("form operator").clone();
    let p = SpdOperator::inverse_plus_shift(&lap, a, "(-Lap)^-1+aI")?;
    let a_op = SpdOperator::from_gram(
        space.clone(),
        "I-nu*Lap",
        grad.combine(nu, &SymBanded::diagonal(space.weights()), 1.0),
    )?;
    let nl = Nonlinearity::pointwise(&space, ScalarLaw::polynomial(m as f64, poly.clone()), DEFAULT_R0_RANGE)?;
    ModelSpec::assemble(
        ModelKind::Boussinesq,
        p,
        a_op,
        nl,
        ModelParams::Boussinesq { a, nu, m, poly },
        Some(grad),
    )
}

/// Plate `u_tt + Δ²u = F(u)` under `u = Δu = 0`, with Kirchhoff terms and/or
/// a nodewise law on the right-hand side. Neither gives the linear plate.
pub fn make_plate(
    geometry: PlateGeometry,
    kirchhoff: Option<KirchhoffCoefficients>,
    law: Option<ScalarLaw>,
) -> Result<ModelSpec> {
    let space = Arc::new(match geometry {
        PlateGeometry::Interval { length, n } => DiscreteSpace::interval_dirichlet(length, n)?,
        PlateGeometry::Rectangle { lx, ly, nx, ny } => DiscreteSpace::rectangle_dirichlet(lx, ly, nx, ny)?,
    });
    let a = build_bilaplacian(&space)?;
    let nl = match (kirchhoff, &law) {
        (Some(coeffs), _) => Nonlinearity::kirchhoff(&space, coeffs, law.clone(), DEFAULT_R0_RANGE)?,
        (None, Some(law)) => Nonlinearity::pointwise(&space, law.clone(), DEFAULT_R0_RANGE)?,
        (None, None) => Nonlinearity::zero(&space),
    };
    let grad = build_laplacian(&space)?.gram().expect("form operator").clone();
    ModelSpec::assemble(
        ModelKind::Plate,
        SpdOperator::identity(space),
        a,
        nl,
        ModelParams::Plate { kirchhoff, law },
        Some(grad),
    )
}

/// `u_tt - u_xx + b u = 0` in (0, L) with the flux `∂u/∂n = f(u)` on the
/// selected endpoints. The grid keeps the flux endpoints as unknowns with
/// trapezoid weights; the resulting scheme is the second-order ghost-point
/// discretization and conserves
/// `½||u_t||² + ½||∇_h u||² + (b/2)||u||² - Σ_Γ F(u)`.
pub fn make_nonlinear_boundary(
    length: f64,
    cells: usize,
    b: f64,
    law: Option<ScalarLaw>,
    split: GammaSplit,
) -> Result<ModelSpec> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("boundary model needs b > 0, got {b}")));
    }
    let ends = match split {
        GammaSplit::BothEnds => EndpointHandling::BothFree,
        GammaSplit::RightEndOnly => EndpointHandling::RightFree,
    };
    let space = Arc::new(DiscreteSpace::interval_with_free_ends(length, cells, ends)?);
    let stiff = stiffness_form(&space)?;
    let a = SpdOperator::from_gram(
        space.clone(),
        "-Lap_N+b",
        stiff.combine(1.0, &SymBanded::diagonal(space.weights()), b),
    )?;
    let nl = match &law {
        Some(law) => Nonlinearity::boundary(&space, law.clone(), DEFAULT_R0_RANGE)?,
        None => Nonlinearity::zero(&space),
    };
    ModelSpec::assemble(
        ModelKind::NonlinearBoundary,
        SpdOperator::identity(space),
        a,
        nl,
        ModelParams::NonlinearBoundary { b, law, split },
        Some(stiff),
    )
}

/// One-dimensional instance `u'' + a0 u = |u|^p u`.
pub fn make_scalar_ode(a0: f64, p: f64) -> Result<ModelSpec> {
    if !(a0 > 0.0) {
        return Err(Error::InvalidParameter(format!("scalar ODE needs a0 > 0, got {a0}")));
    }
    // a single node with unit weight
    let space = Arc::new(DiscreteSpace::interval_dirichlet(2.0, 1)?);
    let a = SpdOperator::from_gram(space.clone(), "a0", SymBanded::diagonal(&[a0]))?;
    let nl = Nonlinearity::power(&space, p)?;
    ModelSpec::assemble(
        ModelKind::ScalarOde,
        SpdOperator::identity(space),
        a,
        nl,
        ModelParams::ScalarOde { a0, p },
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{generalized_eigenvalues, weighted_dot};
    use std::f64::consts::PI;

    #[test]
    fn klein_gordon_coercivity() {
        let m = make_klein_gordon(PI, 99, 1.5, 2.0).unwrap();
        let h = m.space().h();
        let lam1 = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        assert!((m.a0() - (lam1 + 2.25)).abs() < 1e-10);
        assert!(m.a0() >= 2.25);
        assert_eq!(m.alpha(), 0.5);
        assert_eq!(m.r0(), 0.0);
        let u = [1.0, -2.0].repeat(50)[..99].to_vec();
        let f = m.nonlinearity().eval_f(m.space(), &u).unwrap();
        assert_eq!(&f[..2], &[1.0, -8.0]);
        assert!(m.support_monitor());
    }

    #[test]
    fn klein_gordon_2d_builds() {
        let m = make_klein_gordon_2d(PI, PI, 15, 15, 1.0, 2.0).unwrap();
        let [hx, hy] = m.space().spacing();
        let lam1 = 4.0 / (hx * hx) * (hx / 2.0).sin().powi(2) + 4.0 / (hy * hy) * (hy / 2.0).sin().powi(2);
        assert!((m.a0() - (lam1 + 1.0)).abs() < 1e-9);
        assert!(make_klein_gordon(1.0, 10, 0.0, 2.0).is_err());
    }

    #[test]
    fn boussinesq_p_two_ways() {
        for a in [0.0, 1.0] {
            let m = make_boussinesq(1.0, 32, a, 1.0, 2, vec![]).unwrap();
            let pd = m.p_op().matrix_dense();
            let lap_inv = build_laplacian(m.space()).unwrap().matrix_dense().try_inverse().unwrap();
            let oracle = lap_inv + nalgebra::DMatrix::identity(32, 32) * a;
            let v = m.space().sample(|x, _| x * (1.0 - x) * (1.0 + 3.0 * x));
            let vv = nalgebra::DVector::from_vec(v.clone());
            let q_oracle = m.space().h() * vv.dot(&(&oracle * &vv));
            let q = m.p_op().quad_form(&v).unwrap();
            assert!((q - q_oracle).abs() <= 1e-10 * q_oracle, "{q} vs {q_oracle}");
            assert!((pd - oracle).abs().max() < 1e-10);
            assert!(q > 0.0);
            assert_eq!((m.alpha(), m.r0()), (0.5, 0.0));
        }
        assert!(make_boussinesq(1.0, 10, 0.0, 1.0, 0, vec![]).is_err());
    }

    #[test]
    fn plate_spectrum_is_squared() {
        let m = make_plate(PlateGeometry::Interval { length: PI, n: 30 }, None, Some(ScalarLaw::power(2.0))).unwrap();
        let id = SpdOperator::identity(m.space().clone());
        let lap = build_laplacian(m.space()).unwrap();
        let bi = generalized_eigenvalues(m.a_op(), &id).unwrap();
        let single = generalized_eigenvalues(&lap, &id).unwrap();
        for (b, l) in bi.iter().zip(&single) {
            assert!((b - l * l).abs() <= 1e-9 * b);
        }
        assert_eq!((m.alpha(), m.nonlinearity().pointwise_r0()), (0.5, 0.0));
        let linear = make_plate(PlateGeometry::Interval { length: PI, n: 30 }, None, None).unwrap();
        assert!(linear.is_linear());
    }

    #[test]
    fn boundary_model_energy_form() {
        let m = make_nonlinear_boundary(1.0, 40, 1.0, Some(ScalarLaw::power(2.0)), GammaSplit::BothEnds).unwrap();
        let s = m.space();
        let u = s.sample(|x, _| 1.0 + x * x);
        let grad = m.grad_gram().unwrap().bilinear(&u, &u);
        let expected = grad + weighted_dot(s.weights(), &u, &u);
        assert!((m.a_op().quad_form(&u).unwrap() - expected).abs() < 1e-12);
        // ∫ (2x)^2 = 4/3 up to the O(h²) midpoint error
        assert!((grad - 4.0 / 3.0).abs() < 1e-3);
        assert!(m.a0() > 0.0);
        assert_eq!(m.r0(), 0.0);
        let right = make_nonlinear_boundary(1.0, 40, 1.0, None, GammaSplit::RightEndOnly).unwrap();
        assert!(right.is_linear());
        assert_eq!(right.space().boundary_nodes(), &[39]);
    }

    #[test]
    fn scalar_ode_is_one_dimensional() {
        let m = make_scalar_ode(1.0, 2.0).unwrap();
        assert_eq!(m.space().dim(), 1);
        assert!((m.a0() - 1.0).abs() < 1e-14);
        assert_eq!(m.a_op().apply(&[3.0]).unwrap(), vec![3.0]);
        assert!(make_scalar_ode(0.0, 2.0).is_err());
    }
}
