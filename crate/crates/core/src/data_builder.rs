//! Initial data with a prescribed positive energy `K²` that still satisfy the
//! blow-up conditions.
//!
//! Seeds `û0, û1` are normalized in the `P` norm with `θ = (Pû0, û1) > 0`.
//! With `c1` above `θ⁻¹[2K² + 4R0/(m+2)]^{1/2}` the velocity alone makes the
//! cross term large enough, and `c0` is then the root of
//! `H(c0) = ½c1² - K² + ½c0²(Aû0, û0) - G(c0 û0)`, which is exactly
//! `E(c0 û0, c1 û1) - K²`.

use crate::algebra::weighted_dot;
use crate::criteria::{check_levine_conditions, energy_unchecked, CriteriaReport};
use crate::error::{Error, Result};
use crate::models::ModelSpec;

const MAX_DOUBLINGS: usize = 60;
const SCAN_POINTS: usize = 4000;
pub const C1_MARGIN: f64 = 1.01;
const THETA_MIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SeedPair {
    pub u_hat0: Vec<f64>,
    pub u_hat1: Vec<f64>,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltData {
    pub c0: f64,
    pub c1: f64,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub k2: f64,
    pub achieved_energy: f64,
    /// Sign changes of `H` seen on the bracketing scan (1 for a simple root).
    pub root_count: usize,
    pub report: CriteriaReport,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HRoot {
    pub c0: f64,
    pub residual: f64,
    pub root_count: usize,
}

pub fn normalize_pair(model: &ModelSpec, v0: &[f64], v1: &[f64]) -> Result<SeedPair> {
    let space = model.space();
    space.check_vector(v0)?;
    space.check_vector(v1)?;
    let p = model.p_op();
    let n0 = p.quad_form_unchecked(v0).sqrt();
    let n1 = p.quad_form_unchecked(v1).sqrt();
    if !(n0 > 0.0 && n1 > 0.0) {
        return Err(Error::InvalidParameter("seed vectors must be nonzero".into()));
    }
    let u_hat0: Vec<f64> = v0.iter().map(|x| x / n0).collect();
    let u_hat1: Vec<f64> = v1.iter().map(|x| x / n1).collect();
    let theta = weighted_dot(space.weights(), &p.apply_unchecked(&u_hat0), &u_hat1);
    // θ of unit vectors; rounding-level values mean orthogonal seeds
    if !(theta > THETA_MIN) {
        return Err(Error::InvalidParameter(format!(
            "seed pair has (P v0, v1) = {theta:e}, need a positive P-inner product"
        )));
    }
    Ok(SeedPair {
        u_hat0,
        u_hat1,
        theta: theta.min(1.0),
    })
}

/// `θ⁻¹ [2K² + 4R0/(m+2)]^{1/2}`; `m = 4α` for the power-type laws.
pub fn c1_threshold(theta: f64, k2: f64, r0: f64, m: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("theta must be > 0, got {theta}")));
    }
    Ok((2.0 * k2 + 4.0 * r0 / (m + 2.0)).sqrt() / theta)
}

fn h_value(model: &ModelSpec, pair: &SeedPair, c1: f64, k2: f64, c0: f64) -> f64 {
    let u0: Vec<f64> = pair.u_hat0.iter().map(|x| c0 * x).collect();
    0.5 * c1 * c1 - k2 + 0.5 * model.a_op().quad_form_unchecked(&u0)
        - model.nonlinearity().eval_g_unchecked(model.space(), &u0)
}

/// Smallest positive root of `H`, bracketed by doubling and refined by
/// bisection to `|H| <= 1e-10 max(1, K²)`.
pub fn solve_h_root(model: &ModelSpec, pair: &SeedPair, c1: f64, k2: f64) -> Result<HRoot> {
    let h = |c0: f64| h_value(model, pair, c1, k2, c0);
    let h0 = 0.5 * c1 * c1 - k2;
    if !(h0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "H(0+) = {h0:e} is not positive; c1 = {c1} is too small for K² = {k2}"
        )));
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while h(hi) >= 0.0 {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::NoSignChange {
                doublings,
                c0: hi,
                value: h(hi),
            });
        }
        hi *= 2.0;
        doublings += 1;
    }
    // scan for the first sign change and count all of them
    let step = hi / SCAN_POINTS as f64;
    let mut first = None;
    let mut count = 0;
    let mut prev = h0;
    for i in 1..=SCAN_POINTS {
        let c = step * i as f64;
        let cur = h(c);
        if (prev >= 0.0) != (cur >= 0.0) {
            count += 1;
            if first.is_none() {
                first = Some(c - step);
            }
        }
        prev = cur;
    }
    let mut lo = first.expect("H changes sign on [0, hi]");
    let mut up = lo + step;
    let tol = 1e-10 * k2.max(1.0);
    let mut best = (up, h(up));
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        let hm = h(mid);
        if hm.abs() < best.1.abs() {
            best = (mid, hm);
        }
        if hm.abs() <= tol || up - lo <= f64::EPSILON * up {
            break;
        }
        if hm > 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
    }
    Ok(HRoot {
        c0: best.0,
        residual: best.1,
        root_count: count,
    })
}

pub fn build_positive_energy_data(model: &ModelSpec, pair: &SeedPair, k2: f64) -> Result<BuiltData> {
    if !(k2 > 0.0) {
        return Err(Error::InvalidParameter(format!("target energy K² must be > 0, got {k2}")));
    }
    let m = 4.0 * model.alpha();
    let c1 = C1_MARGIN * c1_threshold(pair.theta, k2, model.r0(), m)?;
    let root = solve_h_root(model, pair, c1, k2)?;
    let u0: Vec<f64> = pair.u_hat0.iter().map(|x| root.c0 * x).collect();
    let u1: Vec<f64> = pair.u_hat1.iter().map(|x| c1 * x).collect();
    let achieved_energy = energy_unchecked(model, &u0, &u1);
    let report = check_levine_conditions(model, &u0, &u1)?;
    Ok(BuiltData {
        c0: root.c0,
        c1,
        u0,
        u1,
        k2,
        achieved_energy,
        root_count: root.root_count,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::make_boussinesq;

    fn bsq(a: f64) -> ModelSpec {
        make_boussinesq(1.0, 63, a, 1.0, 2, vec![]).unwrap()
    }

    #[test]
    fn equal_seeds_give_unit_theta() {
        let m = bsq(1.0);
        let v = m.space().sample(|x, _| (std::f64::consts::PI * x).sin());
        let pair = normalize_pair(&m, &v, &v).unwrap();
        assert!((pair.theta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_seeds_are_rejected() {
        let m = bsq(0.0);
        let pi = std::f64::consts::PI;
        let v0 = m.space().sample(|x, _| (pi * x).sin());
        let v1 = m.space().sample(|x, _| (2.0 * pi * x).sin());
        assert!(normalize_pair(&m, &v0, &v1).is_err());
    }

    #[test]
    fn bump_seeds_normalize_exactly() {
        let m = bsq(0.0);
        let v0 = m.space().sample(|x, _| (-40.0 * (x - 0.4).powi(2)).exp());
        let v1 = m.space().sample(|x, _| (-30.0 * (x - 0.55).powi(2)).exp());
        let pair = normalize_pair(&m, &v0, &v1).unwrap();
        assert!(pair.theta > 0.0 && pair.theta < 1.0);
        for u in [&pair.u_hat0, &pair.u_hat1] {
            assert!((m.p_op().quad_form(u).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_formula() {
        assert!((c1_threshold(1.0, 1.0, 0.0, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c1_threshold(0.5, 2.0, 0.0, 2.0).unwrap(), 4.0);
        assert!(c1_threshold(0.0, 1.0, 0.0, 2.0).is_err());
        let (theta, k2, r0, m) = (0.3, 7.0, 0.4, 2.0);
        let c1 = 1.0001 * c1_threshold(theta, k2, r0, m).unwrap();
        assert!(0.5 * c1 * c1 * theta * theta > k2 + 2.0 * r0 / (m + 2.0));
        assert!(c1_threshold(theta, 8.0, r0, m).unwrap() > c1_threshold(theta, k2, r0, m).unwrap());
    }

    #[test]
    fn root_agrees_with_grid_scan() {
        let m = bsq(1.0);
        let v = m.space().sample(|x, _| (std::f64::consts::PI * x).sin());
        let pair = normalize_pair(&m, &v, &v).unwrap();
        let k2 = 10.0;
        let c1 = 1.01 * c1_threshold(pair.theta, k2, 0.0, 2.0).unwrap();
        let root = solve_h_root(&m, &pair, c1, k2).unwrap();
        assert_eq!(root.root_count, 1);
        // independent fine scan followed by linear interpolation
        let h = |c: f64| h_value(&m, &pair, c1, k2, c);
        let n = 200_000;
        let top = 2.0 * root.c0;
        let mut prev = (0.0, h(0.0));
        let mut scan = f64::NAN;
        for i in 1..=n {
            let c = top * i as f64 / n as f64;
            let hc = h(c);
            if prev.1 > 0.0 && hc <= 0.0 {
                scan = prev.0 + (c - prev.0) * prev.1 / (prev.1 - hc);
                break;
            }
            prev = (c, hc);
        }
        assert!((root.c0 - scan).abs() <= 1e-9 * root.c0.max(1.0), "{} vs {scan}", root.c0);
    }

    #[test]
    fn builds_prescribed_energies() {
        for a in [0.0, 1.0] {
            let m = bsq(a);
            let v0 = m.space().sample(|x, _| (std::f64::consts::PI * x).sin());
            let v1 = m.space().sample(|x, _| x * (1.0 - x));
            let pair = normalize_pair(&m, &v0, &v1).unwrap();
            for k2 in [1.0, 10.0, 100.0] {
                let d = build_positive_energy_data(&m, &pair, k2).unwrap();
                assert!((d.achieved_energy - k2).abs() <= 1e-8 * k2, "{} vs {k2}", d.achieved_energy);
                assert!(d.report.satisfied);
                let cross = 0.5 * d.report.l1_value * d.report.l1_value * d.report.psi0;
                assert!(cross > k2);
                for (u, h) in d.u0.iter().zip(&pair.u_hat0) {
                    assert_eq!(*u, d.c0 * h);
                }
            }
        }
        let m = bsq(0.0);
        let v = m.space().sample(|x, _| x * (1.0 - x));
        let pair = normalize_pair(&m, &v, &v).unwrap();
        assert!(build_positive_energy_data(&m, &pair, 0.0).is_err());
    }

    #[test]
    fn linear_model_has_no_root() {
        let m = bsq(1.0).linearized();
        let v = m.space().sample(|x, _| x * (1.0 - x));
        let pair = normalize_pair(&m, &v, &v).unwrap();
        assert!(matches!(
            build_positive_energy_data(&m, &pair, 1.0),
            Err(Error::NoSignChange { .. })
        ));
    }
}
