//! Scenario execution: model, data, criteria, simulation, monitors.

use blowup_core::algebra::SpaceKind;
use blowup_core::criteria::{
    check_kg_condition, check_levine_conditions, check_nb_condition, CriteriaReport, GrowthCurve, NbConditionReport,
};
use blowup_core::data_builder::{build_positive_energy_data, normalize_pair, BuiltData};
use blowup_core::diagnostics::{
    check_concavity_past_threshold, check_growth_vs_bound, check_inf1, check_inf2, check_nb5, energy_drift, MonitorSeries,
    Trajectory,
};
use blowup_core::integrator::{run, BlowupVerdict, VerdictStatus};
use blowup_core::models::{self, ModelKind, ModelSpec, PlateGeometry};
use blowup_core::nonlinearity::{certify_fg, FgCertificate, ScalarLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::{Check, DataDesc, Law, ModelDesc, PlateGrid, Scenario, Shape};

/// Tolerance on `Ψ ≥ (1 - tol) ψ_lower(t)` for the growth-curve check.
pub const GROWTH_TOL: f64 = 1e-3;
/// Relative tolerance on the energy reached by the data builder.
pub const ENERGY_TARGET_RTOL: f64 = 1e-8;
const FG_AMPLITUDES: (f64, f64) = (0.0, 10.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    /// Worst relative margin or ratio behind the decision, when there is one.
    pub worst: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    /// Criteria and data only, no time stepping.
    Static,
}

#[derive(Debug)]
pub struct RunReport {
    pub name: String,
    pub model_kind: Option<ModelKind>,
    pub alpha: Option<f64>,
    pub r0: Option<f64>,
    pub criteria: Option<CriteriaReport>,
    pub kg_condition: Option<bool>,
    pub nb_condition: Option<NbConditionReport>,
    pub built: Option<BuiltData>,
    pub fg: Option<FgCertificate>,
    pub verdict: Option<BlowupVerdict>,
    pub drift: Option<(f64, Option<f64>)>,
    pub checks: Vec<CheckOutcome>,
    pub errors: Vec<StageError>,
    pub trajectory: Option<Trajectory>,
}

impl RunReport {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn law_of(law: &Law) -> ScalarLaw {
    match law.p {
        Some(p) if law.lower.is_empty() => ScalarLaw::power(p),
        Some(p) => ScalarLaw::polynomial(p, law.lower.clone()),
        None => ScalarLaw::lower_only(law.lower.clone()),
    }
}

pub fn build_model(desc: &ModelDesc) -> blowup_core::Result<ModelSpec> {
    Ok(match desc {
        ModelDesc::KleinGordon { length, n, mass, p, linear } => {
            let m = models::make_klein_gordon(*length, *n, *mass, *p)?;
            if *linear { m.linearized() } else { m }
        }
        ModelDesc::KleinGordon2d { lx, ly, nx, ny, mass, p, linear } => {
            let m = models::make_klein_gordon_2d(*lx, *ly, *nx, *ny, *mass, *p)?;
            if *linear { m.linearized() } else { m }
        }
        ModelDesc::Boussinesq { length, n, a, nu, m, poly, linear } => {
            let model = models::make_boussinesq(*length, *n, *a, *nu, *m, poly.clone())?;
            if *linear { model.linearized() } else { model }
        }
        ModelDesc::Plate { geometry, kirchhoff, law } => {
            let geometry = match *geometry {
                PlateGrid::Interval { length, n } => PlateGeometry::Interval { length, n },
                PlateGrid::Rectangle { lx, ly, nx, ny } => PlateGeometry::Rectangle { lx, ly, nx, ny },
            };
            models::make_plate(geometry, *kirchhoff, law.as_ref().map(law_of))?
        }
        ModelDesc::NonlinearBoundary { length, cells, b, law, split } => {
            models::make_nonlinear_boundary(*length, *cells, *b, law.as_ref().map(law_of), *split)?
        }
        ModelDesc::ScalarOde { a0, p } => models::make_scalar_ode(*a0, *p)?,
    })
}

/// Samples a shape on the grid; `u0` is the displacement for the velocity
/// shapes that refer to it, `stream` separates the random draws.
pub fn sample_shape(model: &ModelSpec, shape: &Shape, u0: Option<&[f64]>, seed: u64, stream: u64) -> Result<Vec<f64>, String> {
    let space = model.space();
    let [lx, ly] = space.lengths();
    let two_d = space.kind() == SpaceKind::Rectangle2d;
    let dist = |x: f64, y: f64, cx: f64, cy: &Option<f64>| {
        if two_d {
            let cy = cy.unwrap_or(0.5 * ly);
            ((x - cx).powi(2) + (y - cy).powi(2)).sqrt()
        } else {
            (x - cx).abs()
        }
    };
    let pi = std::f64::consts::PI;
    let vals = match shape {
        Shape::Zero => vec![0.0; space.dim()],
        Shape::Const { value } => vec![*value; space.dim()],
        Shape::Sine { mode, amp } => space.sample(|x, y| {
            let s = amp * (mode * pi * x / lx).sin();
            if two_d { s * (pi * y / ly).sin() } else { s }
        }),
        Shape::Bump { center, center_y, width, amp } => space.sample(|x, y| {
            let r = dist(x, y, *center, center_y) / width;
            if r < 1.0 { amp * (1.0 - r * r).powi(3) } else { 0.0 }
        }),
        Shape::Gauss { center, center_y, width, amp } => {
            space.sample(|x, y| amp * (-(dist(x, y, *center, center_y) / width).powi(2)).exp())
        }
        Shape::Linear { slope, offset } => space.sample(|x, _| slope * x + offset),
        Shape::Parabola { amp } => space.sample(|x, y| {
            let s = amp * x * (lx - x);
            if two_d { s * y * (ly - y) } else { s }
        }),
        Shape::Random { amp } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            (0..space.dim()).map(|_| amp * rng.gen_range(-1.0..=1.0)).collect()
        }
        Shape::ScaledU0 { scale } => {
            let u0 = u0.ok_or("velocity shape `u0` needs a displacement")?;
            u0.iter().map(|x| scale * x).collect()
        }
        Shape::PowerU0 { power, scale } => {
            let u0 = u0.ok_or("velocity shape `u0_power` needs a displacement")?;
            u0.iter().map(|x| scale * x.abs().powf(*power)).collect()
        }
    };
    Ok(vals)
}

fn monitor_outcome(check: Check, m: &MonitorSeries) -> CheckOutcome {
    CheckOutcome {
        check,
        passed: m.passed(),
        worst: Some(m.worst_relative),
        note: match m.first_violation {
            Some(i) => format!("{} samples checked, first violation at sample {i}", m.checked),
            None => format!("{} samples checked", m.checked),
        },
    }
}

fn missing(check: Check, why: &str) -> CheckOutcome {
    CheckOutcome { check, passed: false, worst: None, note: why.into() }
}

fn flag(check: Check, passed: bool, note: String) -> CheckOutcome {
    CheckOutcome { check, passed, worst: None, note }
}

fn evaluate(check: Check, s: &Scenario, r: &RunReport) -> CheckOutcome {
    let traj = r.trajectory.as_ref();
    let verdict = r.verdict.as_ref();
    match check {
        Check::Criteria | Check::NotCriteria => match &r.criteria {
            None => missing(check, "criteria not evaluated"),
            Some(c) => {
                let want = check == Check::Criteria;
                flag(check, c.satisfied == want, format!("satisfied = {}", c.satisfied))
            }
        },
        Check::KgCondition => match r.kg_condition {
            None => missing(check, "not a Klein-Gordon model"),
            Some(ok) => flag(check, ok, format!("satisfied = {ok}")),
        },
        Check::NbCondition | Check::NotNbCondition => match &r.nb_condition {
            None => missing(check, "not a boundary-flux model"),
            Some(nb) => {
                let want = check == Check::NbCondition;
                flag(check, nb.satisfied == want, format!("satisfied = {}", nb.satisfied))
            }
        },
        Check::FgCertificate => match &r.fg {
            None => missing(check, "no certificate for this model"),
            Some(fg) => CheckOutcome {
                check,
                passed: fg.verified,
                worst: Some(fg.worst_margin),
                note: format!("{} samples", fg.samples),
            },
        },
        Check::EnergyTarget => match &r.built {
            None => missing(check, "data not produced by the builder"),
            Some(b) => {
                let rel = (b.achieved_energy - b.k2).abs() / b.k2;
                CheckOutcome {
                    check,
                    passed: rel <= ENERGY_TARGET_RTOL && b.report.satisfied,
                    worst: Some(rel),
                    note: format!("E(0) = {:e}, K2 = {:e}", b.achieved_energy, b.k2),
                }
            }
        },
        Check::BlewUp | Check::Survived => match verdict {
            None => missing(check, "no simulation"),
            Some(v) => {
                let want = if check == Check::BlewUp { VerdictStatus::BlewUp } else { VerdictStatus::SurvivedHorizon };
                flag(check, v.status == want, format!("status = {}", v.status.name()))
            }
        },
        Check::Inf1 | Check::Inf2 | Check::Concavity | Check::Nb5 => match traj {
            None => missing(check, "no simulation"),
            Some(t) => match check {
                Check::Inf1 => monitor_outcome(check, &check_inf1(t)),
                Check::Inf2 => monitor_outcome(check, &check_inf2(t)),
                Check::Concavity => monitor_outcome(check, &check_concavity_past_threshold(t)),
                _ => match check_nb5(t) {
                    Ok(m) => monitor_outcome(check, &m),
                    Err(e) => missing(check, &e.to_string()),
                },
            },
        },
        Check::EnergyDrift => match r.drift {
            None => missing(check, "no simulation"),
            Some((abs, rel)) => {
                let value = rel.unwrap_or(abs);
                CheckOutcome {
                    check,
                    passed: value <= s.drift_tol,
                    worst: Some(value),
                    note: format!("tolerance {:e}", s.drift_tol),
                }
            }
        },
        Check::LevineBound => {
            let (Some(c), Some(t), Some(v)) = (&r.criteria, traj, verdict) else {
                return missing(check, "needs criteria and a simulation");
            };
            if !c.satisfied || v.status != VerdictStatus::BlewUp {
                return missing(check, "needs satisfied criteria and a detected blow-up");
            }
            // the concavity lemma applies from the first recorded state past the threshold
            let Some(start) = t.samples().iter().find(|x| x.psi >= t.psi_star() && x.dpsi > 0.0) else {
                return missing(check, "threshold never reached");
            };
            let Ok(curve) = GrowthCurve::new(start.t, start.psi, start.dpsi, t.alpha()) else {
                return missing(check, "growth curve undefined");
            };
            let t_detect = v.t_detect.unwrap_or(f64::INFINITY);
            let in_time = t_detect <= curve.blowup_time_upper + s.run.dt0;
            let growth = check_growth_vs_bound(t, &curve, Some(t_detect), GROWTH_TOL);
            CheckOutcome {
                check,
                passed: in_time && growth.passed(),
                worst: Some(growth.worst_ratio),
                note: format!("t_detect = {t_detect:e}, bound = {:e}", curve.blowup_time_upper),
            }
        }
    }
}

pub fn run_scenario(s: &Scenario, mode: Mode) -> RunReport {
    let mut report = RunReport {
        name: s.name.clone(),
        model_kind: None,
        alpha: None,
        r0: None,
        criteria: None,
        kg_condition: None,
        nb_condition: None,
        built: None,
        fg: None,
        verdict: None,
        drift: None,
        checks: Vec::new(),
        errors: Vec::new(),
        trajectory: None,
    };
    execute(s, mode, &mut report);
    report.checks = s
        .checks
        .iter()
        .map(|&c| {
            if mode == Mode::Static && !c.is_static() {
                missing(c, "skipped: no simulation in this mode")
            } else {
                evaluate(c, s, &report)
            }
        })
        .collect();
    report
}

fn execute(s: &Scenario, mode: Mode, report: &mut RunReport) {
    let fail = |report: &mut RunReport, stage: &'static str, message: String| {
        report.errors.push(StageError { stage, message });
    };
    let model = match build_model(&s.model) {
        Ok(m) => m,
        Err(e) => return fail(report, "model", e.to_string()),
    };
    report.model_kind = Some(model.kind());
    report.alpha = Some(model.alpha());
    report.r0 = Some(model.r0());

    let data = match &s.data {
        DataDesc::Explicit { u0, u1 } => Ok((u0.clone(), u1.clone())),
        DataDesc::Shapes { u0, u1 } => sample_shape(&model, u0, None, s.seed, 1)
            .and_then(|u0| Ok((u0.clone(), sample_shape(&model, u1, Some(&u0), s.seed, 2)?))),
        DataDesc::Builder { seed0, seed1, k2 } => sample_shape(&model, seed0, None, s.seed, 1)
            .and_then(|v0| Ok((v0, sample_shape(&model, seed1, None, s.seed, 2)?)))
            .and_then(|(v0, v1)| {
                let pair = normalize_pair(&model, &v0, &v1).map_err(|e| e.to_string())?;
                let built = build_positive_energy_data(&model, &pair, *k2).map_err(|e| e.to_string())?;
                let out = (built.u0.clone(), built.u1.clone());
                report.built = Some(built);
                Ok(out)
            }),
    };
    let (u0, u1) = match data {
        Ok(d) => d,
        Err(e) => return fail(report, "data", e),
    };
    if let Err(e) = model.space().check_vector(&u0).and(model.space().check_vector(&u1)) {
        return fail(report, "data", e.to_string());
    }

    match check_levine_conditions(&model, &u0, &u1) {
        Ok(c) => report.criteria = Some(c),
        Err(e) => fail(report, "criteria", e.to_string()),
    }
    match model.kind() {
        ModelKind::KleinGordon => match check_kg_condition(&model, &u0, &u1) {
            Ok(ok) => report.kg_condition = Some(ok),
            Err(e) => fail(report, "criteria", e.to_string()),
        },
        ModelKind::NonlinearBoundary if !model.is_linear() => match check_nb_condition(&model, &u0, &u1) {
            Ok(nb) => report.nb_condition = Some(nb),
            Err(e) => fail(report, "criteria", e.to_string()),
        },
        _ => {}
    }
    if !model.is_linear() && s.fg_samples > 0 {
        match certify_fg(model.nonlinearity(), model.space(), s.fg_samples, FG_AMPLITUDES, s.seed) {
            Ok(fg) => report.fg = Some(fg),
            Err(e) => fail(report, "certify", e.to_string()),
        }
    }
    if mode == Mode::Static {
        return;
    }

    match run(&model, &u0, &u1, &s.run) {
        Ok((traj, verdict)) => {
            report.drift = energy_drift(&traj).ok().map(|d| (d.absolute, d.relative));
            report.verdict = Some(verdict);
            report.trajectory = Some(traj);
        }
        Err(e) => fail(report, "simulate", e.to_string()),
    }
}
