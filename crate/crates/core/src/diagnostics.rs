//! `Ψ = (Pu, u)` and its derivatives along trajectories, with per-sample
//! monitors for the concavity inequalities.
//!
//! `Ψ''` is always taken from the equation,
//! `Ψ'' = 2(Pv, v) + 2(F(u) - Au, u)`, never by differencing.

use crate::algebra::weighted_dot;
use crate::criteria::{t_star_threshold, GrowthCurve, psi_lower_bound};
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};

/// Relative tolerance of the inequality monitors: `1e-8 (1 + scale)`.
pub const MONITOR_RTOL: f64 = 1e-8;

pub fn psi(model: &ModelSpec, u: &[f64]) -> Result<f64> {
    model.p_op().quad_form(u)
}

pub fn dpsi(model: &ModelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    model.space().check_vector(v)?;
    Ok(2.0 * weighted_dot(model.space().weights(), &model.p_op().apply(v)?, u))
}

pub fn ddpsi_eq(model: &ModelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    model.space().check_vector(u)?;
    model.space().check_vector(v)?;
    Ok(Sample::measure(model, 0.0, u, v, 0.0).ddpsi_eq)
}

/// Everything the monitors need about one recorded state.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub psi: f64,
    pub dpsi: f64,
    pub ddpsi_eq: f64,
    /// Energy of this state.
    pub energy: f64,
    /// `Ψ''Ψ - (1+α)Ψ'²`.
    pub defect: f64,
    /// `[α a0 Ψ - 4(1+2α)E(0) - 4R0] Ψ`.
    pub inf2_rhs: f64,
    /// `(Pv, v)`.
    pub kinetic: f64,
    /// `(Au, u)`.
    pub elastic: f64,
    /// `(F(u), u)`.
    pub pairing: f64,
    /// `G(u)`.
    pub potential: f64,
    pub u_max: f64,
}

impl Sample {
    fn measure(model: &ModelSpec, t: f64, u: &[f64], v: &[f64], energy0: f64) -> Self {
        let space = model.space();
        let w = space.weights();
        let nl = model.nonlinearity();
        let pu = model.p_op().apply_unchecked(u);
        let psi = weighted_dot(w, &pu, u);
        let dpsi = 2.0 * weighted_dot(w, &pu, v);
        let kinetic = model.p_op().quad_form_unchecked(v);
        let elastic = model.a_op().quad_form_unchecked(u);
        let pairing = weighted_dot(w, &nl.eval_f_unchecked(space, u), u);
        let potential = nl.eval_g_unchecked(space, u);
        let ddpsi_eq = 2.0 * kinetic + 2.0 * (pairing - elastic);
        let alpha = model.alpha();
        Self {
            t,
            psi,
            dpsi,
            ddpsi_eq,
            energy: 0.5 * kinetic + 0.5 * elastic - potential,
            defect: ddpsi_eq * psi - (1.0 + alpha) * dpsi * dpsi,
            inf2_rhs: (alpha * model.a0() * psi - 4.0 * (1.0 + 2.0 * alpha) * energy0 - 4.0 * model.r0()) * psi,
            kinetic,
            elastic,
            pairing,
            potential,
            u_max: u.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
        }
    }
}

/// Displacement and velocity at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Recorded samples of one run together with the constants they refer to.
#[derive(Debug, Clone)]
pub struct Trajectory {
    kind: ModelKind,
    alpha: f64,
    a0: f64,
    r0: f64,
    r0_boundary: f64,
    energy0: f64,
    psi_star: f64,
    samples: Vec<Sample>,
    states: Option<Vec<State>>,
}

impl Trajectory {
    /// Empty trajectory; `energy0` is the initial energy the run refers to.
    pub fn new(model: &ModelSpec, energy0: f64, keep_states: bool) -> Self {
        let nl = model.nonlinearity();
        Self {
            kind: model.kind(),
            alpha: nl.alpha(),
            a0: model.a0(),
            r0: nl.r0(),
            r0_boundary: model.space().boundary_measure() * nl.pointwise_r0(),
            energy0,
            psi_star: t_star_threshold(model, energy0, 0.0),
            samples: Vec::new(),
            states: keep_states.then(Vec::new),
        }
    }

    /// Appends a state; times must increase strictly.
    pub fn push(&mut self, model: &ModelSpec, t: f64, u: &[f64], v: &[f64]) -> Result<()> {
        model.space().check_vector(u)?;
        model.space().check_vector(v)?;
        if let Some(last) = self.samples.last() {
            if !(t > last.t) {
                return Err(Error::InvalidParameter(format!(
                    "sample times must increase (t = {t} after {})",
                    last.t
                )));
            }
        }
        self.samples.push(Sample::measure(model, t, u, v, self.energy0));
        if let Some(states) = &mut self.states {
            states.push(State {
                t,
                u: u.to_vec(),
                v: v.to_vec(),
            });
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn states(&self) -> Option<&[State]> {
        self.states.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn energy0(&self) -> f64 {
        self.energy0
    }

    /// `Ψ*` of the initial energy with `δ = 0`.
    pub fn psi_star(&self) -> f64 {
        self.psi_star
    }
}

/// Per-sample margins of an inequality `lhs >= rhs`, each compared against
/// `-MONITOR_RTOL (1 + scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorSeries {
    pub margins: Vec<f64>,
    pub scales: Vec<f64>,
    /// Samples the inequality was applied to (`margins` has one entry per
    /// sample; unchecked samples carry NaN).
    pub checked: usize,
    pub first_violation: Option<usize>,
    /// Smallest `margin / (1 + scale)` over checked samples.
    pub worst_relative: f64,
}

impl MonitorSeries {
    fn collect<I: Iterator<Item = Option<(f64, f64)>>>(items: I) -> Self {
        let mut out = Self {
            margins: Vec::new(),
            scales: Vec::new(),
            checked: 0,
            first_violation: None,
            worst_relative: f64::INFINITY,
        };
        for (i, item) in items.enumerate() {
            match item {
                Some((margin, scale)) => {
                    out.checked += 1;
                    let rel = margin / (1.0 + scale);
                    out.worst_relative = out.worst_relative.min(rel);
                    if out.first_violation.is_none() && !(rel >= -MONITOR_RTOL) {
                        out.first_violation = Some(i);
                    }
                    out.margins.push(margin);
                    out.scales.push(scale);
                }
                None => {
                    out.margins.push(f64::NAN);
                    out.scales.push(f64::NAN);
                }
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn max_abs(terms: &[f64]) -> f64 {
    terms.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Defect and the lower bound `[α a0 Ψ - 4(1+2α)E(0) - 4R0]Ψ` per sample,
/// for the given `α`.
pub fn concavity_defect(traj: &Trajectory, alpha: f64) -> Vec<(f64, f64)> {
    traj.samples
        .iter()
        .map(|s| {
            let defect = s.ddpsi_eq * s.psi - (1.0 + alpha) * s.dpsi * s.dpsi;
            let rhs = (alpha * traj.a0 * s.psi - 4.0 * (1.0 + 2.0 * alpha) * traj.energy0 - 4.0 * traj.r0) * s.psi;
            (defect, rhs)
        })
        .collect()
}

/// `Ψ'' >= -4(1+2α)E - 4R0 + 4(α+1)(Pv,v) + 4α(Au,u)` per sample, with the
/// energy of the sample itself, so the margin is exactly
/// `2(F(u),u) - 4(1+2α)G(u) + 4R0`.
pub fn check_inf1(traj: &Trajectory) -> MonitorSeries {
    let a = traj.alpha;
    MonitorSeries::collect(traj.samples.iter().map(|s| {
        let terms = [
            -4.0 * (1.0 + 2.0 * a) * s.energy,
            -4.0 * traj.r0,
            4.0 * (a + 1.0) * s.kinetic,
            4.0 * a * s.elastic,
        ];
        Some((s.ddpsi_eq - terms.iter().sum::<f64>(), max_abs(&terms).max(s.ddpsi_eq.abs())))
    }))
}

/// `defect >= inf2_rhs` per sample.
pub fn check_inf2(traj: &Trajectory) -> MonitorSeries {
    MonitorSeries::collect(traj.samples.iter().map(|s| {
        let scale = max_abs(&[s.ddpsi_eq * s.psi, (1.0 + traj.alpha) * s.dpsi * s.dpsi, s.inf2_rhs]);
        Some((s.defect - s.inf2_rhs, scale))
    }))
}

/// `defect >= 0` on samples with `Ψ >= Ψ*`.
pub fn check_concavity_past_threshold(traj: &Trajectory) -> MonitorSeries {
    MonitorSeries::collect(traj.samples.iter().map(|s| {
        (s.psi >= traj.psi_star).then(|| {
            let scale = max_abs(&[s.ddpsi_eq * s.psi, (1.0 + traj.alpha) * s.dpsi * s.dpsi]);
            (s.defect, scale)
        })
    }))
}

/// Boundary-flux analogue:
/// `Ψ'' >= -4(1+2α)E - 2R0 + 4(1+α)||v||² + 4α(||∇u||² + b||u||²)` with
/// `R0 = |Γ| r0` and the energy of each sample.
pub fn check_nb5(traj: &Trajectory) -> Result<MonitorSeries> {
    if traj.kind != ModelKind::NonlinearBoundary {
        return Err(Error::KindMismatch("nb5 applies to the boundary-flux model only".into()));
    }
    let a = traj.alpha;
    Ok(MonitorSeries::collect(traj.samples.iter().map(|s| {
        let terms = [
            -4.0 * (1.0 + 2.0 * a) * s.energy,
            -2.0 * traj.r0_boundary,
            4.0 * (1.0 + a) * s.kinetic,
            4.0 * a * s.elastic,
        ];
        Some((s.ddpsi_eq - terms.iter().sum::<f64>(), max_abs(&terms).max(s.ddpsi_eq.abs())))
    })))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCheck {
    pub checked: usize,
    /// `(t, Ψ, bound)` of the first sample below `bound (1 - tol)`.
    pub first_violation: Option<(f64, f64, f64)>,
    /// Smallest `Ψ / bound` seen.
    pub worst_ratio: f64,
}

impl GrowthCheck {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// `Ψ(t) >= psi_lower_bound(curve, t)(1 - tol)` on samples in
/// `[t0, min(t_end, blowup_time_upper))`.
pub fn check_growth_vs_bound(traj: &Trajectory, curve: &GrowthCurve, t_end: Option<f64>, tol: f64) -> GrowthCheck {
    let end = t_end.map_or(curve.blowup_time_upper, |t| t.min(curve.blowup_time_upper));
    let mut out = GrowthCheck {
        checked: 0,
        first_violation: None,
        worst_ratio: f64::INFINITY,
    };
    for s in traj.samples.iter().filter(|s| s.t >= curve.t0 && s.t < end) {
        let Ok(bound) = psi_lower_bound(curve, s.t) else { continue };
        out.checked += 1;
        out.worst_ratio = out.worst_ratio.min(s.psi / bound);
        if out.first_violation.is_none() && s.psi < bound * (1.0 - tol) {
            out.first_violation = Some((s.t, s.psi, bound));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDrift {
    pub absolute: f64,
    /// `absolute / |E(0)|` when `E(0) != 0`.
    pub relative: Option<f64>,
}

/// `max_t |E(t) - E(0)|` over the recorded samples.
pub fn energy_drift(traj: &Trajectory) -> Result<EnergyDrift> {
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::InvalidParameter("energy drift needs at least one sample".into()))?;
    let absolute = traj
        .samples
        .iter()
        .fold(0.0_f64, |m, s| m.max((s.energy - first.energy).abs()));
    Ok(EnergyDrift {
        absolute,
        relative: (first.energy != 0.0).then(|| absolute / first.energy.abs()),
    })
}
