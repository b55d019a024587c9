//! Kick-drift-kick leapfrog for `P u_tt = F(u) - Au` with adaptive steps and
//! an operational blow-up verdict.

use crate::criteria::{energy_unchecked, t_star_threshold};
use crate::diagnostics::{State, Trajectory};
use crate::error::{Error, Result};
use crate::models::ModelSpec;

/// Recorded samples inspected by the monotone-tail rule.
pub const MONOTONE_TAIL: usize = 10;
/// Rim amplitude above which a truncated Cauchy problem is considered to
/// have reached the box wall.
pub const SUPPORT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dt0: f64,
    pub t_max: f64,
    pub psi_cap: f64,
    pub dt_floor: f64,
    /// Record every this many steps (the final state is always recorded).
    pub record_every: usize,
    pub adapt: bool,
    pub c_cfl: f64,
    /// Accuracy cap factor, see [`adapt_dt`].
    pub c_nl: f64,
    pub max_steps: usize,
    /// Keep full states in the trajectory, not only the derived series.
    pub keep_states: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dt0: 1e-3,
            t_max: 10.0,
            psi_cap: 1e12,
            dt_floor: 1e-12,
            record_every: 10,
            adapt: true,
            c_cfl: 0.5,
            c_nl: 2.0,
            max_steps: 50_000_000,
            keep_states: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt0 > 0.0
            && self.t_max > 0.0
            && self.dt_floor > 0.0
            && self.dt_floor < self.dt0
            && self.psi_cap > 0.0
            && self.record_every >= 1
            && self.c_cfl > 0.0
            && self.c_nl > 0.0
            && self.max_steps >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid run configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    BlewUp,
    SurvivedHorizon,
    Aborted,
}

impl VerdictStatus {
    pub fn name(self) -> &'static str {
        match self {
            VerdictStatus::BlewUp => "blew_up",
            VerdictStatus::SurvivedHorizon => "survived_horizon",
            VerdictStatus::Aborted => "aborted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupVerdict {
    pub status: VerdictStatus,
    pub t_detect: Option<f64>,
    pub psi_final: f64,
    pub steps: usize,
    pub reason: String,
}

fn acceleration(model: &ModelSpec, u: &[f64]) -> Vec<f64> {
    let f = model.nonlinearity().eval_f_unchecked(model.space(), u);
    let au = model.a_op().apply_unchecked(u);
    let rhs: Vec<f64> = f.iter().zip(&au).map(|(f, a)| f - a).collect();
    model.p_op().solve_unchecked(&rhs)
}

fn kdk(model: &ModelSpec, s: &State, acc: &[f64], dt: f64) -> (State, Vec<f64>) {
    let half = 0.5 * dt;
    let vh: Vec<f64> = s.v.iter().zip(acc).map(|(v, a)| v + half * a).collect();
    let u: Vec<f64> = s.u.iter().zip(&vh).map(|(u, v)| u + dt * v).collect();
    let acc_new = acceleration(model, &u);
    let v = vh.iter().zip(&acc_new).map(|(v, a)| v + half * a).collect();
    (State { t: s.t + dt, u, v }, acc_new)
}

fn all_finite(s: &State) -> bool {
    s.u.iter().chain(&s.v).all(|x| x.is_finite())
}

/// One leapfrog step.
pub fn step(model: &ModelSpec, s: &State, dt: f64) -> Result<State> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    model.space().check_vector(&s.u)?;
    model.space().check_vector(&s.v)?;
    let (next, _) = kdk(model, s, &acceleration(model, &s.u), dt);
    if !all_finite(&next) {
        return Err(Error::NonFinite { t: next.t });
    }
    Ok(next)
}

/// Step size for the next step: `dt0` capped by the stability limit
/// `c_cfl 2 / (ω_lin² + ω_nl²)^{1/2}` and the accuracy limit
/// `c_nl dt0 / (1 + ω_nl/(p+1)^{1/2})`, never increasing once
/// `past_threshold`, never below `dt_floor`.
///
/// `ω_nl² = ||DF(u)|| / λ_min(P)` is the local nonlinear frequency; for
/// `F = |u|^p u` with `P = I` the accuracy limit is `c_nl dt0 / (1 + ||u||∞^{p/2})`.
pub fn adapt_dt(s: &State, model: &ModelSpec, dt_prev: f64, cfg: &RunConfig, past_threshold: bool) -> f64 {
    if !cfg.adapt {
        return cfg.dt0;
    }
    let nl = model.nonlinearity();
    let omega_nl_sq = nl.stiffness(model.space(), &s.u) / model.p_min_eig();
    let mut dt = cfg.dt0.min(cfg.c_cfl * 2.0 / (model.omega_max_sq() + omega_nl_sq).sqrt());
    if let Some(p) = nl.growth_exponent() {
        dt = dt.min(cfg.c_nl * cfg.dt0 / (1.0 + (omega_nl_sq / (p + 1.0)).sqrt()));
    }
    if past_threshold {
        dt = dt.min(dt_prev);
    }
    dt.max(cfg.dt_floor)
}

fn rim_max(rim: &[usize], x: &[f64]) -> f64 {
    rim.iter().fold(0.0_f64, |m, &i| m.max(x[i].abs()))
}

/// Integrates from `(u0, u1)` until `t_max`, `Ψ >= psi_cap`, the step floor,
/// or a failure.
///
/// `blew_up` needs `Ψ >= psi_cap` with `Ψ` nondecreasing over the last
/// [`MONOTONE_TAIL`] recorded samples, or the step floor reached with
/// `Ψ' > 0`.
pub fn run(model: &ModelSpec, u0: &[f64], u1: &[f64], cfg: &RunConfig) -> Result<(Trajectory, BlowupVerdict)> {
    cfg.validate()?;
    let space = model.space();
    space.check_vector(u0)?;
    space.check_vector(u1)?;
    let energy0 = energy_unchecked(model, u0, u1);
    let psi_star = t_star_threshold(model, energy0, 0.0);
    let mut traj = Trajectory::new(model, energy0, cfg.keep_states);
    traj.push(model, 0.0, u0, u1)?;
    let psi0 = traj.samples()[0].psi;
    if !(cfg.psi_cap > psi0) {
        return Err(Error::InvalidParameter(format!(
            "psi_cap = {} must exceed the initial Ψ = {psi0}",
            cfg.psi_cap
        )));
    }
    let rim = if model.support_monitor() { space.rim_nodes() } else { Vec::new() };
    let watch_rim =
        !rim.is_empty() && rim_max(&rim, u0) <= SUPPORT_TOL && rim_max(&rim, u1) <= SUPPORT_TOL;

    let mut s = State {
        t: 0.0,
        u: u0.to_vec(),
        v: u1.to_vec(),
    };
    let mut acc = acceleration(model, &s.u);
    let mut dt_prev = cfg.dt0;
    let mut past = psi0 >= psi_star;
    let mut steps = 0;
    let mut last_recorded = 0;
    let verdict = |status, t_detect, psi_final, steps, reason: String| BlowupVerdict {
        status,
        t_detect,
        psi_final,
        steps,
        reason,
    };
    loop {
        let psi_now = model.p_op().quad_form_unchecked(&s.u);
        let remaining = cfg.t_max - s.t;
        if remaining <= 1e-12 * cfg.t_max {
            if last_recorded != steps {
                traj.push(model, s.t, &s.u, &s.v)?;
            }
            let psi_final = traj.samples().last().map_or(psi_now, |x| x.psi);
            return Ok((
                traj,
                verdict(
                    VerdictStatus::SurvivedHorizon,
                    None,
                    psi_final,
                    steps,
                    format!("reached t_max = {}", cfg.t_max),
                ),
            ));
        }
        if steps >= cfg.max_steps {
            return Ok((
                traj,
                verdict(
                    VerdictStatus::Aborted,
                    None,
                    psi_now,
                    steps,
                    format!("step budget of {} exhausted at t = {}", cfg.max_steps, s.t),
                ),
            ));
        }
        let dt_raw = adapt_dt(&s, model, dt_prev, cfg, past);
        if cfg.adapt && dt_raw <= cfg.dt_floor {
            let dpsi = 2.0 * crate::algebra::weighted_dot(space.weights(), &model.p_op().apply_unchecked(&s.v), &s.u);
            if last_recorded != steps {
                traj.push(model, s.t, &s.u, &s.v)?;
            }
            let psi_final = traj.samples().last().map_or(psi_now, |x| x.psi);
            let (status, reason) = if dpsi > 0.0 {
                (VerdictStatus::BlewUp, format!("step floor {} reached with Ψ' > 0", cfg.dt_floor))
            } else {
                (VerdictStatus::Aborted, format!("step floor {} reached with Ψ' <= 0", cfg.dt_floor))
            };
            let t_detect = (status == VerdictStatus::BlewUp).then_some(s.t);
            return Ok((traj, verdict(status, t_detect, psi_final, steps, reason)));
        }
        let dt = dt_raw.min(remaining);
        let (next, acc_next) = kdk(model, &s, &acc, dt);
        steps += 1;
        if !all_finite(&next) {
            return Ok((
                traj,
                verdict(
                    VerdictStatus::Aborted,
                    None,
                    psi_now,
                    steps,
                    format!("non-finite state at t = {} before the blow-up threshold", next.t),
                ),
            ));
        }
        s = next;
        acc = acc_next;
        dt_prev = dt_raw;
        let psi = model.p_op().quad_form_unchecked(&s.u);
        past = past || psi >= psi_star;
        let capped = psi >= cfg.psi_cap;
        let wall = watch_rim && rim_max(&rim, &s.u) > SUPPORT_TOL;
        if capped || wall || steps % cfg.record_every == 0 {
            traj.push(model, s.t, &s.u, &s.v)?;
            last_recorded = steps;
        }
        if wall {
            return Ok((
                traj,
                verdict(
                    VerdictStatus::Aborted,
                    None,
                    psi,
                    steps,
                    format!("solution reached the box wall at t = {} (support monitor)", s.t),
                ),
            ));
        }
        if capped {
            let samples = traj.samples();
            let tail = &samples[samples.len().saturating_sub(MONOTONE_TAIL)..];
            let monotone = tail.windows(2).all(|w| w[1].psi >= w[0].psi);
            let (status, t_detect, reason) = if monotone {
                (
                    VerdictStatus::BlewUp,
                    Some(s.t),
                    format!("Ψ reached psi_cap = {:e} with a monotone tail", cfg.psi_cap),
                )
            } else {
                (
                    VerdictStatus::Aborted,
                    None,
                    "Ψ reached psi_cap without monotone growth (instability suspected)".to_string(),
                )
            };
            return Ok((traj, verdict(status, t_detect, psi, steps, reason)));
        }
    }
}
