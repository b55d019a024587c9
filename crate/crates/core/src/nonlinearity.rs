//! Gradient nonlinearities `F = G'` and the structural constants `(α, R0)`
//! of the superlinearity condition `(F(v), v) >= 2(1+2α) G(v) - 2 R0`.
//!
//! Every built-in kind ships analytic constants; [`certify_fg`] is a sampling
//! falsifier for them and [`pointwise_r0`] computes the scalar constant
//! `r0 = max(0, -min_s [f(s)s - 2(1+2α)F(s)])` on a working range.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{build_directional_laplacian, weighted_dot, DiscreteSpace, SpaceKind, SpdOperator};
use crate::error::{Error, Result};

/// Default amplitude range on which polynomial constants are computed.
pub const DEFAULT_R0_RANGE: (f64, f64) = (-100.0, 100.0);
const R0_SAMPLES: usize = 20_001;

/// Scalar law `f(s) = |s|^p s + sum_k c_k s^k` with primitive `F(s) = ∫_0^s f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarLaw {
    exponent: Option<f64>,
    lower: Vec<f64>,
}

impl ScalarLaw {
    /// `f(s) = |s|^p s`.
    pub fn power(p: f64) -> Self {
        Self {
            exponent: Some(p),
            lower: Vec::new(),
        }
    }

    /// `f(s) = |s|^m s + P_{m-1}(s)`, `lower[k]` the coefficient of `s^k`.
    pub fn polynomial(m: f64, lower: Vec<f64>) -> Self {
        Self {
            exponent: Some(m),
            lower,
        }
    }

    /// A law without a leading power term, e.g. a plain polynomial.
    pub fn lower_only(lower: Vec<f64>) -> Self {
        Self { exponent: None, lower }
    }

    pub fn exponent(&self) -> Option<f64> {
        self.exponent
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn value(&self, s: f64) -> f64 {
        let lead = self.exponent.map_or(0.0, |p| abs_pow(s, p) * s);
        lead + horner(&self.lower, s)
    }

    pub fn potential(&self, s: f64) -> f64 {
        let lead = self.exponent.map_or(0.0, |p| abs_pow(s, p) * s * s / (p + 2.0));
        let mut acc = 0.0;
        for (k, c) in self.lower.iter().enumerate().rev() {
            acc = acc * s + c / (k + 1) as f64;
        }
        lead + acc * s
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let lead = self.exponent.map_or(0.0, |p| (p + 1.0) * abs_pow(s, p));
        let mut acc = 0.0;
        for (k, c) in self.lower.iter().enumerate().skip(1).rev() {
            acc = acc * s + c * k as f64;
        }
        lead + acc
    }

    /// `f(s)s - 2(1+2α)F(s)`.
    pub fn fc_margin(&self, alpha: f64, s: f64) -> f64 {
        self.value(s) * s - 2.0 * (1.0 + 2.0 * alpha) * self.potential(s)
    }
}

fn abs_pow(s: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= 32.0 {
        s.abs().powi(p as i32)
    } else {
        s.abs().powf(p)
    }
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirchhoffCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

#[derive(Debug, Clone)]
pub enum NonlinearityKind {
    Zero,
    /// `F(u) = |u|^p u` nodewise.
    Power { p: f64 },
    /// `f(u) = |u|^m u + P_{m-1}(u)` nodewise.
    Polynomial { law: ScalarLaw },
    /// `F(u) = (a1 + b1 S1) L1 u + (a2 + b2 S2) L2 u (+ f(u))` with
    /// `L_i = -∂²_{x_i}` and `S_i = (L_i u, u)`, the Kirchhoff terms moved to
    /// the right-hand side. Only the x1 term is active in 1D.
    KirchhoffPlate {
        coeffs: KirchhoffCoefficients,
        law: Option<ScalarLaw>,
        dxx: SpdOperator,
        dyy: Option<SpdOperator>,
    },
    /// Boundary flux `∂u/∂n = f(u)` on the listed nodes; `(F(u), v) = Σ_b f(u_b) v_b`.
    BoundaryScalar { law: ScalarLaw, nodes: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    alpha: f64,
    r0: f64,
    pointwise_r0: f64,
    r0_range: (f64, f64),
    dim: usize,
}

impl Nonlinearity {
    pub fn zero(space: &DiscreteSpace) -> Self {
        Self {
            kind: NonlinearityKind::Zero,
            alpha: 0.5,
            r0: 0.0,
            pointwise_r0: 0.0,
            r0_range: DEFAULT_R0_RANGE,
            dim: space.dim(),
        }
    }

    /// `|u|^p u` with `α = p/4`, `R0 = 0`.
    pub fn power(space: &DiscreteSpace, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("power exponent must be > 0, got {p}")));
        }
        Ok(Self {
            kind: NonlinearityKind::Power { p },
            alpha: p / 4.0,
            r0: 0.0,
            pointwise_r0: 0.0,
            r0_range: DEFAULT_R0_RANGE,
            dim: space.dim(),
        })
    }

    /// `|u|^m u + P_{m-1}(u)` with `α = m/4` and `R0 = r0 |Ω| / 2`, `r0`
    /// computed on `range`.
    pub fn polynomial(space: &DiscreteSpace, law: ScalarLaw, range: (f64, f64)) -> Result<Self> {
        let m = law
            .exponent()
            .ok_or_else(|| Error::InvalidParameter("polynomial law needs a leading |s|^m s term".into()))?;
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(format!("leading exponent must be > 0, got {m}")));
        }
        let alpha = m / 4.0;
        let r0 = pointwise_r0(&law, alpha, range)?;
        Ok(Self {
            kind: NonlinearityKind::Polynomial { law },
            alpha,
            r0: 0.5 * r0 * space.measure(),
            pointwise_r0: r0,
            r0_range: range,
            dim: space.dim(),
        })
    }

    /// Kirchhoff plate terms, optionally plus a nodewise law.
    pub fn kirchhoff(
        space: &Arc<DiscreteSpace>,
        coeffs: KirchhoffCoefficients,
        law: Option<ScalarLaw>,
        range: (f64, f64),
    ) -> Result<Self> {
        let two_d = space.kind() == SpaceKind::Rectangle2d;
        if !(coeffs.b1 > 0.0) || (two_d && !(coeffs.b2 > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "Kirchhoff coefficients need b1 > 0{} (got b1 = {}, b2 = {})",
                if two_d { " and b2 > 0" } else { "" },
                coeffs.b1,
                coeffs.b2
            )));
        }
        let active: Vec<(f64, f64)> = if two_d {
            vec![(coeffs.a1, coeffs.b1), (coeffs.a2, coeffs.b2)]
        } else {
            vec![(coeffs.a1, coeffs.b1)]
        };
        let mut alpha: f64 = if active.iter().all(|&(a, _)| a <= 0.0) { 0.5 } else { 0.25 };
        if let Some(p) = law.as_ref().and_then(ScalarLaw::exponent) {
            alpha = alpha.min(p / 4.0);
        }
        let mut r0 = kirchhoff_r0(&active, alpha);
        let mut pw = 0.0;
        if let Some(law) = &law {
            pw = pointwise_r0(law, alpha, range)?;
            r0 += 0.5 * pw * space.measure();
        }
        let dxx = build_directional_laplacian(space, 0)?;
        let dyy = if two_d { Some(build_directional_laplacian(space, 1)?) } else { None };
        Ok(Self {
            kind: NonlinearityKind::KirchhoffPlate { coeffs, law, dxx, dyy },
            alpha,
            r0,
            pointwise_r0: pw,
            r0_range: range,
            dim: space.dim(),
        })
    }

    /// Nodewise law on a plate without Kirchhoff terms.
    pub fn pointwise(space: &DiscreteSpace, law: ScalarLaw, range: (f64, f64)) -> Result<Self> {
        match (law.exponent(), law.lower().is_empty()) {
            (Some(p), true) => Self::power(space, p),
            _ => Self::polynomial(space, law, range),
        }
    }

    /// Boundary flux law on the boundary nodes of `space`.
    pub fn boundary(space: &DiscreteSpace, law: ScalarLaw, range: (f64, f64)) -> Result<Self> {
        let p = law
            .exponent()
            .ok_or_else(|| Error::InvalidParameter("boundary law needs a leading |s|^p s term".into()))?;
        let nodes = space.boundary_nodes().to_vec();
        if nodes.is_empty() {
            return Err(Error::KindMismatch("space has no flux boundary nodes".into()));
        }
        let alpha = p / 4.0;
        let r0 = pointwise_r0(&law, alpha, range)?;
        Ok(Self {
            alpha,
            r0: 0.5 * r0 * nodes.len() as f64,
            pointwise_r0: r0,
            r0_range: range,
            dim: space.dim(),
            kind: NonlinearityKind::BoundaryScalar { law, nodes },
        })
    }

    /// Same nonlinearity with overridden structural constants.
    pub fn with_constants(&self, alpha: f64, r0: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(r0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need alpha > 0 and R0 >= 0 (got {alpha}, {r0})"
            )));
        }
        Ok(Self {
            alpha,
            r0,
            ..self.clone()
        })
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NonlinearityKind::Zero => "zero",
            NonlinearityKind::Power { .. } => "power",
            NonlinearityKind::Polynomial { .. } => "polynomial",
            NonlinearityKind::KirchhoffPlate { .. } => "kirchhoff_plate",
            NonlinearityKind::BoundaryScalar { .. } => "boundary_scalar",
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, NonlinearityKind::Zero)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `R0` in the (FG) sense.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Scalar constant `r0` of the pointwise condition (zero when not applicable).
    pub fn pointwise_r0(&self) -> f64 {
        self.pointwise_r0
    }

    pub fn r0_range(&self) -> (f64, f64) {
        self.r0_range
    }

    pub fn scalar_law(&self) -> Option<ScalarLaw> {
        match &self.kind {
            NonlinearityKind::Zero => None,
            NonlinearityKind::Power { p } => Some(ScalarLaw::power(*p)),
            NonlinearityKind::Polynomial { law } | NonlinearityKind::BoundaryScalar { law, .. } => Some(law.clone()),
            NonlinearityKind::KirchhoffPlate { law, .. } => law.clone(),
        }
    }

    /// Exponent governing the amplitude growth of the local time scale.
    pub fn growth_exponent(&self) -> Option<f64> {
        match &self.kind {
            NonlinearityKind::Zero => None,
            NonlinearityKind::Power { p } => Some(*p),
            NonlinearityKind::Polynomial { law } | NonlinearityKind::BoundaryScalar { law, .. } => law.exponent(),
            NonlinearityKind::KirchhoffPlate { law, .. } => {
                Some(law.as_ref().and_then(ScalarLaw::exponent).map_or(2.0, |p| p.max(2.0)))
            }
        }
    }

    fn check(&self, space: &DiscreteSpace, u: &[f64]) -> Result<()> {
        if space.dim() != self.dim {
            return Err(Error::KindMismatch(format!(
                "{} nonlinearity built for dimension {} used on a space of dimension {}",
                self.kind_name(),
                self.dim,
                space.dim()
            )));
        }
        space.check_vector(u)
    }

    /// `F(u)`.
    pub fn eval_f(&self, space: &DiscreteSpace, u: &[f64]) -> Result<Vec<f64>> {
        self.check(space, u)?;
        Ok(self.eval_f_unchecked(space, u))
    }

    pub(crate) fn eval_f_unchecked(&self, space: &DiscreteSpace, u: &[f64]) -> Vec<f64> {
        match &self.kind {
            NonlinearityKind::Zero => vec![0.0; u.len()],
            NonlinearityKind::Power { p } => u.iter().map(|&s| abs_pow(s, *p) * s).collect(),
            NonlinearityKind::Polynomial { law } => u.iter().map(|&s| law.value(s)).collect(),
            NonlinearityKind::KirchhoffPlate { coeffs, law, dxx, dyy } => {
                let mut out = match law {
                    Some(law) => u.iter().map(|&s| law.value(s)).collect(),
                    None => vec![0.0; u.len()],
                };
                let mut add_term = |op: &SpdOperator, a: f64, b: f64| {
                    let lu = op.apply_unchecked(u);
                    let s = weighted_dot(space.weights(), &lu, u);
                    let c = a + b * s;
                    out.iter_mut().zip(&lu).for_each(|(o, l)| *o += c * l);
                };
                add_term(dxx, coeffs.a1, coeffs.b1);
                if let Some(dyy) = dyy {
                    add_term(dyy, coeffs.a2, coeffs.b2);
                }
                out
            }
            NonlinearityKind::BoundaryScalar { law, nodes } => {
                let w = space.weights();
                let mut out = vec![0.0; u.len()];
                for &b in nodes {
                    out[b] = law.value(u[b]) / w[b];
                }
                out
            }
        }
    }

    /// Potential `G(u)` with `DG(u)[v] = (F(u), v)`.
    pub fn eval_g(&self, space: &DiscreteSpace, u: &[f64]) -> Result<f64> {
        self.check(space, u)?;
        Ok(self.eval_g_unchecked(space, u))
    }

    pub(crate) fn eval_g_unchecked(&self, space: &DiscreteSpace, u: &[f64]) -> f64 {
        let w = space.weights();
        match &self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::Power { p } => {
                w.iter().zip(u).map(|(w, &s)| w * abs_pow(s, *p) * s * s).sum::<f64>() / (p + 2.0)
            }
            NonlinearityKind::Polynomial { law } => w.iter().zip(u).map(|(w, &s)| w * law.potential(s)).sum(),
            NonlinearityKind::KirchhoffPlate { coeffs, law, dxx, dyy } => {
                let quartic = |op: &SpdOperator, a: f64, b: f64| {
                    let s = op.quad_form_unchecked(u);
                    0.5 * a * s + 0.25 * b * s * s
                };
                let mut g = quartic(dxx, coeffs.a1, coeffs.b1);
                if let Some(dyy) = dyy {
                    g += quartic(dyy, coeffs.a2, coeffs.b2);
                }
                if let Some(law) = law {
                    g += w.iter().zip(u).map(|(w, &s)| w * law.potential(s)).sum::<f64>();
                }
                g
            }
            NonlinearityKind::BoundaryScalar { law, nodes } => nodes.iter().map(|&b| law.potential(u[b])).sum(),
        }
    }

    /// Bound on the operator norm of `DF(u)` (weighted norm); drives the
    /// explicit stability cap of the integrator.
    pub fn stiffness(&self, space: &DiscreteSpace, u: &[f64]) -> f64 {
        let nodewise = |law: &ScalarLaw| u.iter().fold(0.0_f64, |m, &s| m.max(law.derivative(s).abs()));
        match &self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::Power { p } => u.iter().fold(0.0_f64, |m, &s| m.max((p + 1.0) * abs_pow(s, *p))),
            NonlinearityKind::Polynomial { law } => nodewise(law),
            NonlinearityKind::KirchhoffPlate { coeffs, law, dxx, dyy } => {
                let term = |op: &SpdOperator, a: f64, b: f64| {
                    let lu = op.apply_unchecked(u);
                    let s = weighted_dot(space.weights(), &lu, u);
                    let lam = op.spectral_upper_bound().unwrap_or(0.0);
                    (a.abs() + b * s) * lam + 2.0 * b * weighted_dot(space.weights(), &lu, &lu)
                };
                let mut k = term(dxx, coeffs.a1, coeffs.b1);
                if let Some(dyy) = dyy {
                    k += term(dyy, coeffs.a2, coeffs.b2);
                }
                k + law.as_ref().map_or(0.0, nodewise)
            }
            NonlinearityKind::BoundaryScalar { law, nodes } => {
                let w = space.weights();
                nodes.iter().fold(0.0_f64, |m, &b| m.max(law.derivative(u[b]).abs() / w[b]))
            }
        }
    }

    /// `(F(v), v) - 2(1+2α) G(v) + 2 R0` for this nonlinearity's constants.
    pub fn fg_margin(&self, space: &DiscreteSpace, v: &[f64]) -> Result<f64> {
        let (m, _) = self.fg_margin_scaled(space, v)?;
        Ok(m)
    }

    fn fg_margin_scaled(&self, space: &DiscreteSpace, v: &[f64]) -> Result<(f64, f64)> {
        let fv = weighted_dot(space.weights(), &self.eval_f(space, v)?, v);
        let g = 2.0 * (1.0 + 2.0 * self.alpha) * self.eval_g(space, v)?;
        Ok((fv - g + 2.0 * self.r0, fv.abs() + g.abs()))
    }
}

/// `R0` for Kirchhoff terms: per term the margin is
/// `-2α a S + b(1/2 - α) S²`, bounded below by `-α² a⁺² / (b (1/2 - α))`.
fn kirchhoff_r0(terms: &[(f64, f64)], alpha: f64) -> f64 {
    terms
        .iter()
        .map(|&(a, b)| {
            if a <= 0.0 {
                0.0
            } else {
                alpha * alpha * a * a / (2.0 * b * (0.5 - alpha))
            }
        })
        .sum()
}

/// `r0 = max(0, -min_{s in range} [f(s)s - 2(1+2α)F(s)])` by dense sampling
/// and golden-section refinement. Fails when the minimum sits at a range end
/// with the margin still decreasing there.
pub fn pointwise_r0(law: &ScalarLaw, alpha: f64, range: (f64, f64)) -> Result<f64> {
    let (lo, hi) = range;
    if !(hi > lo) {
        return Err(Error::InvalidParameter(format!("empty range [{lo}, {hi}]")));
    }
    let h = |s: f64| law.fc_margin(alpha, s);
    let step = (hi - lo) / (R0_SAMPLES - 1) as f64;
    let grid = |i: usize| if i + 1 == R0_SAMPLES { hi } else { lo + step * i as f64 };
    let values: Vec<f64> = (0..R0_SAMPLES).map(|i| h(grid(i))).collect();
    let (imin, &vmin) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    if vmin >= -tol {
        return Ok(0.0);
    }
    let last = R0_SAMPLES - 1;
    if imin == 0 && values[0] < values[1] - tol {
        return Err(Error::UnboundedBelow { lo, hi, edge: lo });
    }
    if imin == last && values[last] < values[last - 1] - tol {
        return Err(Error::UnboundedBelow { lo, hi, edge: hi });
    }
    let a = grid(imin.saturating_sub(1));
    let b = grid((imin + 1).min(last));
    let refined = golden_min(&h, a, b).min(vmin);
    Ok((-refined).max(0.0))
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

/// Outcome of sampling the (FG) margin.
#[derive(Debug, Clone, PartialEq)]
pub struct FgCertificate {
    pub verified: bool,
    /// Minimum over samples of `(F(v), v) - 2(1+2α)G(v) + 2R0`.
    pub worst_margin: f64,
    pub witness: Vec<f64>,
    pub samples: usize,
    pub amplitude_range: (f64, f64),
}

/// Relative tolerance below which a negative margin still counts as rounding.
pub const FG_TOL: f64 = 1e-9;

/// Sampling falsifier for (FG): random smooth and rough fields with max-norm
/// amplitudes across `amplitude_range`, plus constants and single modes.
/// It can refute the constants, never prove them.
pub fn certify_fg(
    nl: &Nonlinearity,
    space: &DiscreteSpace,
    n_samples: usize,
    amplitude_range: (f64, f64),
    seed: u64,
) -> Result<FgCertificate> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("certify_fg needs at least one sample".into()));
    }
    let (lo, hi) = amplitude_range;
    if !(lo >= 0.0 && hi >= lo) {
        return Err(Error::InvalidParameter(format!("bad amplitude range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes: Vec<Vec<f64>> = Vec::new();
    let [lx, ly] = space.lengths();
    let amps = [lo, (lo * hi).sqrt(), 0.5 * (lo + hi), hi];
    for &a in &amps {
        for sign in [1.0, -1.0] {
            probes.push(vec![sign * a; space.dim()]);
            for k in 1..=4 {
                let kk = k as f64;
                probes.push(space.sample(|x, y| {
                    let sy = if ly > 0.0 { (std::f64::consts::PI * y / ly).sin() } else { 1.0 };
                    sign * a * (kk * std::f64::consts::PI * x / lx).sin() * sy
                }));
            }
        }
    }
    for _ in 0..n_samples {
        let amp = if lo > 0.0 {
            (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
        } else {
            lo + rng.gen::<f64>() * (hi - lo)
        };
        let coeffs: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rough = rng.gen_bool(0.5);
        let mut v = space.sample(|x, y| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * (x / lx + 0.37 * y)).sin())
                .sum()
        });
        if rough {
            v.iter_mut().for_each(|x| *x += rng.gen_range(-1.0..1.0));
        }
        let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if m > 0.0 {
            v.iter_mut().for_each(|x| *x *= amp / m);
        }
        probes.push(v);
    }
    let mut verified = true;
    let mut worst = f64::INFINITY;
    let mut witness = Vec::new();
    for v in &probes {
        let (margin, scale) = nl.fg_margin_scaled(space, v)?;
        if margin < -FG_TOL * scale.max(1.0) {
            verified = false;
        }
        if margin < worst {
            worst = margin;
            witness = v.clone();
        }
    }
    Ok(FgCertificate {
        verified,
        worst_margin: worst,
        witness,
        samples: probes.len(),
        amplitude_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn space(n: usize) -> Arc<DiscreteSpace> {
        Arc::new(DiscreteSpace::interval_dirichlet(PI, n).unwrap())
    }

    #[test]
    fn zero_kind() {
        let s = space(5);
        let nl = Nonlinearity::zero(&s);
        assert_eq!(nl.eval_f(&s, &[1.0; 5]).unwrap(), vec![0.0; 5]);
        assert_eq!(nl.eval_g(&s, &[1.0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn cubic_nodewise() {
        let s = DiscreteSpace::interval_dirichlet(3.0, 2).unwrap();
        let nl = Nonlinearity::power(&s, 2.0).unwrap();
        assert_eq!(nl.eval_f(&s, &[1.0, -2.0]).unwrap(), vec![1.0, -8.0]);
        assert_eq!(nl.alpha(), 0.5);
        assert_eq!(nl.r0(), 0.0);
    }

    #[test]
    fn quartic_potential_single_node() {
        let s = DiscreteSpace::interval_dirichlet(2.0, 1).unwrap();
        assert_eq!(s.weights(), &[1.0]);
        let nl = Nonlinearity::power(&s, 2.0).unwrap();
        assert_eq!(nl.eval_g(&s, &[2.0]).unwrap(), 4.0);
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let s = space(5);
        let other = space(6);
        let nl = Nonlinearity::power(&s, 2.0).unwrap();
        assert!(matches!(nl.eval_f(&other, &[0.0; 6]), Err(Error::KindMismatch(_))));
        assert!(matches!(nl.eval_f(&s, &[0.0; 4]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn kirchhoff_beam_matches_direct_assembly() {
        let n = 40;
        let s = space(n);
        let coeffs = KirchhoffCoefficients { a1: -0.7, a2: 0.0, b1: 1.3, b2: 0.0 };
        let nl = Nonlinearity::kirchhoff(&s, coeffs, None, DEFAULT_R0_RANGE).unwrap();
        let u = s.sample(|x, _| 0.8 * (2.0 * x).sin());
        let h = s.h();
        // padded with the Dirichlet zeros
        let mut full = vec![0.0];
        full.extend(&u);
        full.push(0.0);
        let grad_sq: f64 = full.windows(2).map(|w| h * ((w[1] - w[0]) / h).powi(2)).sum();
        let c = coeffs.a1 + coeffs.b1 * grad_sq;
        let oracle: Vec<f64> = full
            .windows(3)
            .map(|w| -c * (w[0] - 2.0 * w[1] + w[2]) / (h * h))
            .collect();
        let got = nl.eval_f(&s, &u).unwrap();
        for (a, b) in got.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
        }
        let g_oracle = 0.5 * coeffs.a1 * grad_sq + 0.25 * coeffs.b1 * grad_sq * grad_sq;
        assert!((nl.eval_g(&s, &u).unwrap() - g_oracle).abs() < 1e-10);
    }

    #[test]
    fn kirchhoff_constants() {
        let s = space(10);
        let neg = KirchhoffCoefficients { a1: -1.0, a2: 0.0, b1: 2.0, b2: 0.0 };
        let nl = Nonlinearity::kirchhoff(&s, neg, None, DEFAULT_R0_RANGE).unwrap();
        assert_eq!((nl.alpha(), nl.r0()), (0.5, 0.0));
        let pos = KirchhoffCoefficients { a1: 3.0, a2: 0.0, b1: 2.0, b2: 0.0 };
        let nl = Nonlinearity::kirchhoff(&s, pos, None, DEFAULT_R0_RANGE).unwrap();
        assert_eq!(nl.alpha(), 0.25);
        assert!((nl.r0() - 9.0 / 16.0).abs() < 1e-15);
        assert!(Nonlinearity::kirchhoff(&s, KirchhoffCoefficients { b1: 0.0, ..pos }, None, DEFAULT_R0_RANGE).is_err());
    }

    #[test]
    fn pointwise_r0_cases() {
        let cubic = ScalarLaw::power(2.0);
        assert_eq!(pointwise_r0(&cubic, 0.5, (-10.0, 10.0)).unwrap(), 0.0);
        // s^3 - s: margin simplifies to s^2 >= 0
        let damped = ScalarLaw::polynomial(2.0, vec![0.0, -1.0]);
        for s in [-3.0, -0.5, 0.0, 0.25, 7.0] {
            assert!((damped.fc_margin(0.5, s) - s * s).abs() < 1e-12 * (1.0 + s.powi(4)));
        }
        assert_eq!(pointwise_r0(&damped, 0.5, (-10.0, 10.0)).unwrap(), 0.0);
        // s^3 + 1: margin is -3s, unbounded below
        let shifted = ScalarLaw::polynomial(2.0, vec![1.0]);
        assert!(matches!(
            pointwise_r0(&shifted, 0.5, (-10.0, 10.0)),
            Err(Error::UnboundedBelow { edge, .. }) if edge == 10.0
        ));
        // s^3 + s at α = 1/4: margin s^4/4 - s^2/2, minimum -1/4 at s = ±1
        let lopsided = ScalarLaw::polynomial(2.0, vec![0.0, 1.0]);
        let r0 = pointwise_r0(&lopsided, 0.25, (-10.0, 10.0)).unwrap();
        assert!((r0 - 0.25).abs() < 1e-12, "{r0}");
        let oracle = (0..=200_000)
            .map(|i| -10.0 + 20.0 * i as f64 / 200_000.0)
            .map(|s| lopsided.fc_margin(0.25, s))
            .fold(f64::INFINITY, f64::min);
        assert!((r0 + oracle).abs() < 1e-6, "{r0} vs {oracle}");
    }

    #[test]
    fn certificate_equality_case() {
        let s = space(30);
        let nl = Nonlinearity::power(&s, 2.0).unwrap();
        let cert = certify_fg(&nl, &s, 200, (1e-3, 1e3), 7).unwrap();
        assert!(cert.verified);
        for v in [s.sample(|x, _| 5.0 * x.sin()), vec![0.3; 30]] {
            let m = nl.fg_margin(&s, &v).unwrap();
            let scale = weighted_dot(s.weights(), &v, &v).powi(2);
            assert!(m.abs() <= 1e-13 * scale.max(1.0), "{m}");
        }
    }

    #[test]
    fn certificate_for_damped_cubic() {
        let s = space(30);
        let nl = Nonlinearity::polynomial(&s, ScalarLaw::polynomial(2.0, vec![0.0, -1.0]), (-100.0, 100.0)).unwrap();
        assert_eq!(nl.r0(), 0.0);
        assert!(certify_fg(&nl, &s, 200, (1e-2, 1e2), 3).unwrap().verified);
    }

    #[test]
    fn too_large_alpha_is_falsified() {
        let s = space(30);
        let nl = Nonlinearity::power(&s, 2.0).unwrap().with_constants(2.0, 0.0).unwrap();
        let small = certify_fg(&nl, &s, 50, (0.1, 1.0), 1).unwrap();
        let large = certify_fg(&nl, &s, 50, (0.1, 100.0), 1).unwrap();
        assert!(!small.verified && !large.verified);
        // margin = (4 - 2(1+2α)) ∫|v|^4 / 4 * ... < 0, growing like amplitude^4
        assert!(large.worst_margin < small.worst_margin * 1e4);
    }

    #[test]
    fn boundary_law_pairs_with_flux_nodes() {
        let s = DiscreteSpace::interval_with_free_ends(1.0, 10, crate::algebra::EndpointHandling::BothFree).unwrap();
        let nl = Nonlinearity::boundary(&s, ScalarLaw::power(2.0), DEFAULT_R0_RANGE).unwrap();
        let u = s.sample(|x, _| 1.0 + x);
        let v = s.sample(|x, _| (3.0 * x).cos());
        let pairing = weighted_dot(s.weights(), &nl.eval_f(&s, &u).unwrap(), &v);
        let direct = u[0].powi(3) * v[0] + u[10].powi(3) * v[10];
        assert!((pairing - direct).abs() < 1e-12);
        assert_eq!(nl.eval_g(&s, &u).unwrap(), (u[0].powi(4) + u[10].powi(4)) / 4.0);
    }
}
