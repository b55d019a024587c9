//! Energy, initial-data conditions for blow-up and the concavity-method
//! bounds derived from them.

use crate::algebra::weighted_dot;
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};

/// `E = ½(Pv, v) + ½(Au, u) - G(u)`.
pub fn energy(model: &ModelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    let space = model.space();
    space.check_vector(u)?;
    space.check_vector(v)?;
    Ok(energy_unchecked(model, u, v))
}

pub(crate) fn energy_unchecked(model: &ModelSpec, u: &[f64], v: &[f64]) -> f64 {
    0.5 * model.p_op().quad_form_unchecked(v) + 0.5 * model.a_op().quad_form_unchecked(u)
        - model.nonlinearity().eval_g_unchecked(model.space(), u)
}

/// Evaluation of the two initial-data conditions
/// `(u0, Pu1)/(u0, Pu0) > 0` and `E(0) + R0/(1+2α) < ½(u0, Pu1)²/(u0, Pu0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaReport {
    pub l1_value: f64,
    pub l2_lhs: f64,
    pub l2_rhs: f64,
    pub satisfied: bool,
    pub a0: f64,
    pub energy0: f64,
    pub psi0: f64,
    pub dpsi0: f64,
    /// `Ψ(0)/(αΨ'(0))` when `Ψ'(0) > 0`.
    pub levine_time_bound: Option<f64>,
}

pub fn check_levine_conditions(model: &ModelSpec, u0: &[f64], u1: &[f64]) -> Result<CriteriaReport> {
    let space = model.space();
    space.check_vector(u0)?;
    space.check_vector(u1)?;
    if u0.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroDisplacement);
    }
    let w = space.weights();
    let p = model.p_op();
    let pu0 = p.apply_unchecked(u0);
    let psi0 = weighted_dot(w, &pu0, u0);
    let cross = weighted_dot(w, &pu0, u1);
    let alpha = model.alpha();
    let energy0 = energy_unchecked(model, u0, u1);
    let l1_value = cross / psi0;
    let l2_lhs = energy0 + model.r0() / (1.0 + 2.0 * alpha);
    let l2_rhs = 0.5 * cross * cross / psi0;
    let dpsi0 = 2.0 * cross;
    Ok(CriteriaReport {
        l1_value,
        l2_lhs,
        l2_rhs,
        satisfied: l1_value > 0.0 && l2_lhs < l2_rhs,
        a0: model.a0(),
        energy0,
        psi0,
        dpsi0,
        levine_time_bound: (dpsi0 > 0.0).then(|| psi0 / (alpha * dpsi0)),
    })
}

/// Klein-Gordon form of the conditions:
/// `(u0,u1) > [||u1||² + ||∇u0||² + m²||u0||² - (2/(p+2))∫|u0|^{p+2}]^{1/2} ||u0||`.
/// A negative bracket with `(u0,u1) > 0` counts as satisfied.
pub fn check_kg_condition(model: &ModelSpec, u0: &[f64], u1: &[f64]) -> Result<bool> {
    let (mass, p) = match *model.params() {
        crate::models::ModelParams::KleinGordon { mass, p } => (mass, p),
        _ => {
            return Err(Error::KindMismatch(format!(
                "{} model is not Klein-Gordon",
                model.kind().name()
            )))
        }
    };
    let space = model.space();
    space.check_vector(u0)?;
    space.check_vector(u1)?;
    let w = space.weights();
    let grad = model.grad_gram().expect("Klein-Gordon keeps its gradient form").bilinear(u0, u0);
    let u0_sq = weighted_dot(w, u0, u0);
    let high: f64 = w.iter().zip(u0).map(|(w, s)| w * s.abs().powf(p + 2.0)).sum();
    let bracket = weighted_dot(w, u1, u1) + grad + mass * mass * u0_sq - 2.0 / (p + 2.0) * high;
    let cross = weighted_dot(w, u0, u1);
    if cross <= 0.0 {
        return Ok(false);
    }
    Ok(bracket < 0.0 || cross > bracket.sqrt() * u0_sq.sqrt())
}

/// The chain `(u0,u1)/||u0||² > 2E0 + R0/(1+2α) > 0` of the boundary-flux
/// model, with `R0 = |Γ| r0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NbConditionReport {
    pub ratio: f64,
    pub energy0: f64,
    pub middle: f64,
    pub r0_boundary: f64,
    pub satisfied: bool,
}

pub fn check_nb_condition(model: &ModelSpec, u0: &[f64], u1: &[f64]) -> Result<NbConditionReport> {
    if model.kind() != ModelKind::NonlinearBoundary {
        return Err(Error::KindMismatch(format!(
            "{} model has no nonlinear boundary",
            model.kind().name()
        )));
    }
    let space = model.space();
    space.check_vector(u0)?;
    space.check_vector(u1)?;
    let w = space.weights();
    let u0_sq = weighted_dot(w, u0, u0);
    if u0_sq == 0.0 {
        return Err(Error::ZeroDisplacement);
    }
    let nl = model.nonlinearity();
    let energy0 = energy_unchecked(model, u0, u1);
    let r0_boundary = space.boundary_measure() * nl.pointwise_r0();
    let middle = 2.0 * energy0 + r0_boundary / (1.0 + 2.0 * nl.alpha());
    let ratio = weighted_dot(w, u0, u1) / u0_sq;
    Ok(NbConditionReport {
        ratio,
        energy0,
        middle,
        r0_boundary,
        satisfied: ratio > middle && middle > 0.0,
    })
}

/// `t0 + Ψ(t0)/(αΨ'(t0))`.
pub fn levine_time_bound(psi_t0: f64, dpsi_t0: f64, alpha: f64, t0: f64) -> Result<f64> {
    if !(dpsi_t0 > 0.0) {
        return Err(Error::LemmaHypothesis(format!("Ψ'(t0) = {dpsi_t0} is not positive")));
    }
    if !(psi_t0 > 0.0) || !(alpha > 0.0) {
        return Err(Error::LemmaHypothesis(format!(
            "need Ψ(t0) > 0 and α > 0 (got {psi_t0}, {alpha})"
        )));
    }
    Ok(t0 + psi_t0 / (alpha * dpsi_t0))
}

/// Lower envelope of `Ψ` implied by concavity of `Ψ^{-α}` from `t0` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCurve {
    pub t0: f64,
    pub psi_t0: f64,
    pub dpsi_t0: f64,
    pub alpha: f64,
    pub blowup_time_upper: f64,
}

impl GrowthCurve {
    pub fn new(t0: f64, psi_t0: f64, dpsi_t0: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            t0,
            psi_t0,
            dpsi_t0,
            alpha,
            blowup_time_upper: levine_time_bound(psi_t0, dpsi_t0, alpha, t0)?,
        })
    }
}

/// `[Ψ(t0)^{-α} - αΨ'(t0)Ψ(t0)^{-α-1}(t - t0)]^{-1/α}`.
pub fn psi_lower_bound(curve: &GrowthCurve, t: f64) -> Result<f64> {
    if t < curve.t0 || t >= curve.blowup_time_upper {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside [{}, {})",
            curve.t0, curve.blowup_time_upper
        )));
    }
    let a = curve.alpha;
    let base = curve.psi_t0.powf(-a) * (1.0 - a * curve.dpsi_t0 / curve.psi_t0 * (t - curve.t0));
    Ok(base.powf(-1.0 / a))
}

/// `Ψ* = (4(1+2α)E0 + 4R0 + δ)/(α a0)`; past it the concavity inequality
/// holds. The raw value is returned, so it may be negative.
pub fn t_star_threshold(model: &ModelSpec, energy0: f64, delta: f64) -> f64 {
    let alpha = model.alpha();
    (4.0 * (1.0 + 2.0 * alpha) * energy0 + 4.0 * model.r0() + delta) / (alpha * model.a0())
}
