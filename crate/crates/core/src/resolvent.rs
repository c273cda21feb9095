//! Resolvent kernels of the scaled operators `H = -d^2/dx^2 + lambda V(x/eps)` on the
//! half-line with a Dirichlet condition at the origin, and of the two possible
//! limits: the Robin Laplacian `alpha f(0) = f'(0)` and the Dirichlet Laplacian.
//!
//! Every kernel has the form `G(x, y) = phi1(x<) phi2(x>) / W(phi2, phi1)` with
//! `kappa = sqrt(-z)`, `Re kappa > 0`, and `phi2 = exp(-kappa x)` beyond the support.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Trajectory};
use crate::potential::Potential;
use crate::quadrature::Adaptive;
use crate::resonance::{self, LimitKind, ScalingLaw};

type C = Complex64;

/// Largest `eps` accepted by [`kernel_scaled`].
pub const DEFAULT_EPS_MAX: f64 = 1.0;
/// Smallest `|W(phi2, phi1)|` accepted.
pub const MIN_WRONSKIAN: f64 = 1e-14;
/// Window (relative to `1 + |theta|`) inside which a coupling is snapped to
/// the nearby resonance.
pub const SNAP_TOL: f64 = 1e-8;

/// `sqrt(-z)` with positive real part.
pub fn kappa(z: C) -> C {
    let k = (-z).sqrt();
    if k.re < 0.0 {
        -k
    } else {
        k
    }
}

fn check_z(z: C) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im == 0.0 {
        return Err(Error::InvalidInput(format!("z must have nonzero imaginary part, got {z}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    Scaled {
        potential: Potential,
        lambda: f64,
        eps: f64,
    },
    Robin {
        alpha: f64,
    },
    Dirichlet,
}

impl KernelKind {
    pub fn label(&self) -> String {
        match self {
            KernelKind::Scaled { lambda, eps, .. } => format!("scaled(lambda={lambda},eps={eps})"),
            KernelKind::Robin { alpha } => format!("robin({alpha})"),
            KernelKind::Dirichlet => "dirichlet".to_string(),
        }
    }
}

/// Which one-sided derivative to take on the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone)]
struct Interior {
    u: Trajectory,
    v: Trajectory,
}

/// A resolvent kernel `G_z(x, y)` ready for pointwise evaluation.
#[derive(Debug, Clone)]
pub struct KernelEval {
    kind: KernelKind,
    z: C,
    kappa: C,
    edge: f64,
    a: C,
    b: C,
    c: C,
    d: C,
    wronskian: C,
    interior: Option<Interior>,
}

/// `(mantissa, mantissa', exponent)` with the true values `mantissa * exp(exponent)`.
type Scaled = (C, C, C);

impl KernelEval {
    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn z(&self) -> C {
        self.z
    }

    pub fn kappa(&self) -> C {
        self.kappa
    }

    /// Right end of the support of the scaled potential (`0` for references).
    pub fn edge(&self) -> f64 {
        self.edge
    }

    /// Exterior coefficients of `phi1 = a exp(kappa x) + b exp(-kappa x)`.
    pub fn ab(&self) -> (C, C) {
        (self.a, self.b)
    }

    /// Interior coefficients of `phi2 = c u + d v~`.
    pub fn cd(&self) -> (C, C) {
        (self.c, self.d)
    }

    /// `W(phi2, phi1) = 2 a kappa`.
    pub fn wronskian(&self) -> C {
        self.wronskian
    }

    /// `lambda V(x / eps)`, zero for the reference kernels.
    pub fn potential_term(&self, x: f64) -> f64 {
        match &self.kind {
            KernelKind::Scaled {
                potential,
                lambda,
                eps,
            } => {
                let s = x / eps;
                if s < 0.0 || s > potential.support_end() {
                    0.0
                } else {
                    lambda * potential.eval(s)
                }
            }
            _ => 0.0,
        }
    }

    /// Points where the kernel is less smooth in either variable.
    pub fn singular_points(&self) -> Vec<f64> {
        match &self.kind {
            KernelKind::Scaled { potential, eps, .. } => {
                potential.breakpoints().iter().map(|b| b * eps).collect()
            }
            _ => Vec::new(),
        }
    }

    fn phi1(&self, x: f64) -> Scaled {
        match &self.interior {
            Some(i) if x < self.edge => {
                let s = i.u.eval(x);
                (s.value, s.deriv, C::new(0.0, 0.0))
            }
            _ => {
                let e = (-2.0 * self.kappa * x).exp();
                (
                    self.a + self.b * e,
                    self.kappa * (self.a - self.b * e),
                    self.kappa * x,
                )
            }
        }
    }

    fn phi2(&self, x: f64) -> Scaled {
        match &self.interior {
            Some(i) if x < self.edge => {
                let su = i.u.eval(x);
                let sv = i.v.eval(x);
                (
                    self.c * su.value + self.d * sv.value,
                    self.c * su.deriv + self.d * sv.deriv,
                    C::new(0.0, 0.0),
                )
            }
            _ => (C::new(1.0, 0.0), -self.kappa, -self.kappa * x),
        }
    }

    /// `G_z(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> C {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let p = self.phi1(lo);
        let q = self.phi2(hi);
        p.0 * q.0 * (p.2 + q.2).exp() / self.wronskian
    }

    /// `d/dx G_z(x, y)`; `side` selects the one-sided limit at `x = y`.
    pub fn eval_dx(&self, x: f64, y: f64, side: Side) -> C {
        let left = x < y || (x == y && side == Side::Left);
        if left {
            let p = self.phi1(x);
            let q = self.phi2(y);
            p.1 * q.0 * (p.2 + q.2).exp() / self.wronskian
        } else {
            let p = self.phi1(y);
            let q = self.phi2(x);
            p.0 * q.1 * (p.2 + q.2).exp() / self.wronskian
        }
    }

    fn exterior(kind: KernelKind, z: C, a: C, b: C) -> Result<Self> {
        let k = kappa(z);
        let w = 2.0 * a * k;
        if w.norm() < MIN_WRONSKIAN {
            return Err(Error::SingularWronskian { modulus: w.norm() });
        }
        Ok(KernelEval {
            kind,
            z,
            kappa: k,
            edge: 0.0,
            a,
            b,
            c: C::new(0.0, 0.0),
            d: C::new(0.0, 0.0),
            wronskian: w,
            interior: None,
        })
    }
}

/// Exterior coefficients `a = exp(-kappa e) (u(e) + u'(e) / kappa) / 2` and
/// `b = exp(kappa e) (u(e) - u'(e) / kappa) / 2` at the edge `e = eps M`.
pub fn coefficients_ab(v: &Potential, lambda: f64, eps: f64, z: C, tol: f64) -> Result<(C, C)> {
    check_z(z)?;
    let u = ode::solve_u(v, lambda, eps, z, tol)?;
    Ok(ab_from_end(&u, kappa(z)))
}

fn ab_from_end(u: &Trajectory, k: C) -> (C, C) {
    let end = u.end_state();
    let e = end.x;
    let a = 0.5 * (-k * e).exp() * (end.value + end.deriv / k);
    let b = 0.5 * (k * e).exp() * (end.value - end.deriv / k);
    (a, b)
}

/// Kernel of `H_{lambda,eps} - z`.
pub fn kernel_scaled(v: &Potential, lambda: f64, eps: f64, z: C, tol: f64) -> Result<KernelEval> {
    kernel_scaled_with(v, lambda, eps, z, tol, DEFAULT_EPS_MAX)
}

pub fn kernel_scaled_with(
    v: &Potential,
    lambda: f64,
    eps: f64,
    z: C,
    tol: f64,
    eps_max: f64,
) -> Result<KernelEval> {
    check_z(z)?;
    if !(eps > 0.0 && eps <= eps_max) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, {eps_max}], got {eps}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidInput("lambda must be finite".into()));
    }
    let k = kappa(z);
    let u = ode::solve_u(v, lambda, eps, z, tol)?;
    let vt = ode::solve_v_tilde(v, lambda, eps, z, tol)?;
    let (a, b) = ab_from_end(&u, k);
    let w = 2.0 * a * k;
    if w.norm() < MIN_WRONSKIAN {
        return Err(Error::SingularWronskian { modulus: w.norm() });
    }
    let edge = u.x_end();
    let su = u.end_state();
    let sv = vt.end_state();
    // c u + d v~ = exp(-kappa x) to first order at the edge
    let target = (-k * edge).exp();
    let det = su.value * sv.deriv - su.deriv * sv.value;
    let c = (target * sv.deriv + k * target * sv.value) / det;
    let d = (-k * target * su.value - target * su.deriv) / det;
    Ok(KernelEval {
        kind: KernelKind::Scaled {
            potential: v.clone(),
            lambda,
            eps,
        },
        z,
        kappa: k,
        edge,
        a,
        b,
        c,
        d,
        wronskian: w,
        interior: Some(Interior { u, v: vt }),
    })
}

/// Kernel of `-Delta_alpha - z` or `-Delta_D - z`.
pub fn kernel_reference(kind: LimitKind, z: C) -> Result<KernelEval> {
    check_z(z)?;
    let k = kappa(z);
    match kind {
        LimitKind::Dirichlet => {
            let h = 0.5 / k;
            KernelEval::exterior(KernelKind::Dirichlet, z, h, -h)
        }
        LimitKind::Robin { alpha } => {
            if !alpha.is_finite() {
                return Err(Error::InvalidInput("alpha must be finite".into()));
            }
            let r = alpha / k;
            KernelEval::exterior(KernelKind::Robin { alpha }, z, 0.5 * (1.0 + r), 0.5 * (1.0 - r))
        }
    }
}

/// Right-hand side for [`apply_resolvent`]: a function on the half-line with
/// known support and points of reduced smoothness.
#[derive(Clone)]
pub struct Source {
    func: Arc<dyn Fn(f64) -> C + Send + Sync>,
    support: (f64, f64),
    breakpoints: Vec<f64>,
    label: String,
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Source")
            .field("label", &self.label)
            .field("support", &self.support)
            .finish()
    }
}

impl Source {
    pub fn zero() -> Self {
        Source {
            func: Arc::new(|_| C::new(0.0, 0.0)),
            support: (0.0, 0.0),
            breakpoints: Vec::new(),
            label: "zero".into(),
        }
    }

    /// Indicator of `[a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b.is_finite()) {
            return Err(Error::InvalidInput(format!("bad indicator interval [{a}, {b}]")));
        }
        Ok(Source {
            func: Arc::new(move |y| {
                if (a..=b).contains(&y) {
                    C::new(1.0, 0.0)
                } else {
                    C::new(0.0, 0.0)
                }
            }),
            support: (a, b),
            breakpoints: Vec::new(),
            label: format!("indicator[{a},{b}]"),
        })
    }

    /// `exp(-rate y)`.
    pub fn exp_decay(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidInput(format!("decay rate must be positive, got {rate}")));
        }
        Ok(Source {
            func: Arc::new(move |y| C::new((-rate * y).exp(), 0.0)),
            support: (0.0, f64::INFINITY),
            breakpoints: Vec::new(),
            label: format!("exp(-{rate}y)"),
        })
    }

    /// Arbitrary function vanishing outside `support`; the upper end may be infinite
    /// provided the function decays.
    pub fn from_fn<F>(f: F, support: (f64, f64), breakpoints: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> C + Send + Sync + 'static,
    {
        if !(support.0 >= 0.0 && support.1 >= support.0) {
            return Err(Error::InvalidInput(format!("bad support {support:?}")));
        }
        Ok(Source {
            func: Arc::new(f),
            support,
            breakpoints,
            label: "function".into(),
        })
    }

    /// Piecewise-linear interpolant of samples, zero outside the sampled range.
    pub fn samples(xs: Vec<f64>, ys: Vec<C>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::InvalidInput("need at least two samples of equal length".into()));
        }
        if xs[0] < 0.0 || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sample abscissae must increase from x >= 0".into()));
        }
        let support = (xs[0], xs[xs.len() - 1]);
        let nodes = xs.clone();
        let f = move |y: f64| {
            if y < xs[0] || y > xs[xs.len() - 1] {
                return C::new(0.0, 0.0);
            }
            let i = xs.partition_point(|&t| t <= y).clamp(1, xs.len() - 1);
            let t = (y - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ys[i - 1] * (1.0 - t) + ys[i] * t
        };
        Ok(Source {
            func: Arc::new(f),
            support,
            breakpoints: nodes,
            label: "samples".into(),
        })
    }

    pub fn eval(&self, y: f64) -> C {
        if y < self.support.0 || y > self.support.1 {
            C::new(0.0, 0.0)
        } else {
            (self.func)(y)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `int_0^inf G_z(x, y) f(y) dy` at each `x`.
pub fn apply_resolvent(k: &KernelEval, f: &Source, x_points: &[f64]) -> Result<Vec<C>> {
    apply_resolvent_with(k, f, x_points, &Adaptive::default())
}

pub fn apply_resolvent_with(
    k: &KernelEval,
    f: &Source,
    x_points: &[f64],
    quad: &Adaptive,
) -> Result<Vec<C>> {
    let (s0, s1) = f.support;
    x_points
        .iter()
        .map(|&x| {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::InvalidInput(format!("evaluation point must be >= 0, got {x}")));
            }
            if s1 <= s0 {
                return Ok(C::new(0.0, 0.0));
            }
            let mut cuts = vec![x, k.edge()];
            cuts.extend(k.singular_points());
            cuts.extend(f.breakpoints.iter().copied());
            let g = |y: f64| k.eval(x, y) * f.eval(y);
            if s1.is_finite() {
                return quad.integrate(g, s0, s1, &cuts);
            }
            let far = cuts.iter().copied().fold(s0, f64::max) + 1.0;
            let near = quad.integrate(g, s0, far, &cuts)?;
            let tail = quad.integrate(
                |s: f64| {
                    let w = 1.0 - s;
                    g(far + s / w) / (w * w)
                },
                0.0,
                1.0,
                &[],
            )?;
            Ok(near + tail)
        })
        .collect()
}

/// Probe point used by [`estimate_alpha`].
pub const ALPHA_PROBE_Z: C = C::new(0.0, 1.0);

/// Sequence `u'(eM) / u(eM)` along the critical scaling and its extrapolation to
/// `eps = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaEstimate {
    /// Coupling actually used (the nearby resonance when one was found).
    pub theta: f64,
    pub omega: f64,
    pub z: C,
    pub sequence: Vec<(f64, C)>,
    pub extrapolated: C,
    /// Convergence order estimated from the last three entries.
    pub observed_order: Option<f64>,
}

impl AlphaEstimate {
    pub fn alpha(&self) -> f64 {
        self.extrapolated.re
    }
}

/// Neville extrapolation of `(h_i, s_i)` to `h = 0`.
pub fn extrapolate_to_zero(data: &[(f64, C)]) -> C {
    let n = data.len();
    let mut p: Vec<C> = data.iter().map(|d| d.1).collect();
    for m in 1..n {
        for i in 0..n - m {
            let (hi, hj) = (data[i].0, data[i + m].0);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p[0]
}

fn observed_order(data: &[(f64, C)]) -> Option<f64> {
    if data.len() < 3 {
        return None;
    }
    let t = &data[data.len() - 3..];
    let d1 = (t[0].1 - t[1].1).norm();
    let d2 = (t[1].1 - t[2].1).norm();
    if d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let r = ((t[0].0 - t[1].0) / (t[1].0 - t[2].0)).abs();
    let p = (d1 / d2).ln() / r.ln();
    p.is_finite().then_some(p)
}

fn check_eps_list(eps_list: &[f64], min_len: usize) -> Result<()> {
    if eps_list.len() < min_len {
        return Err(Error::InvalidInput(format!("need at least {min_len} epsilon values")));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("epsilon values must be positive and decreasing".into()));
    }
    Ok(())
}

fn snapped_theta(v: &Potential, theta: f64, tol: f64) -> Result<Option<f64>> {
    Ok(resonance::resonance_near(v, theta, SNAP_TOL, tol)?.map(|h| h.theta))
}

/// Robin parameter from the edge data of `u` along `lambda = theta / eps^2 + omega / eps`.
pub fn estimate_alpha(v: &Potential, theta: f64, omega: f64, eps_list: &[f64], tol: f64) -> Result<AlphaEstimate> {
    estimate_alpha_at(v, theta, omega, eps_list, tol, ALPHA_PROBE_Z)
}

pub fn estimate_alpha_at(
    v: &Potential,
    theta: f64,
    omega: f64,
    eps_list: &[f64],
    tol: f64,
    z: C,
) -> Result<AlphaEstimate> {
    check_eps_list(eps_list, 3)?;
    let theta = snapped_theta(v, theta, tol)?.unwrap_or(theta);
    let law = ScalingLaw::critical(theta, omega);
    let sequence = par_map(eps_list, |eps| {
        let u = ode::solve_u(v, law.lambda(eps), eps, z, tol)?;
        let end = u.end_state();
        Ok((eps, end.deriv / end.value))
    })?;
    Ok(AlphaEstimate {
        theta,
        omega,
        z,
        extrapolated: extrapolate_to_zero(&sequence),
        observed_order: observed_order(&sequence),
        sequence,
    })
}

#[cfg(target_arch = "wasm32")]
fn par_map<T, F>(eps_list: &[f64], f: F) -> Result<Vec<T>>
where
    F: Fn(f64) -> Result<T>,
{
    eps_list.iter().map(|&e| f(e)).collect()
}

#[cfg(not(target_arch = "wasm32"))]
fn par_map<T, F>(eps_list: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    std::thread::scope(|s| {
        let handles: Vec<_> = eps_list.iter().map(|&e| {
            let f = &f;
            s.spawn(move || f(e))
        }).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub lambda: f64,
    pub error_l2: f64,
    /// `Re u'(eM) / u(eM)` at the study's `z`.
    pub alpha_estimate: f64,
    pub reference_kind: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub reference: LimitKind,
    pub theta: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Errors strictly decrease along the (decreasing) epsilon list.
    pub monotone: bool,
    /// Least-squares slope of `log error` against `log eps`.
    pub observed_order: Option<f64>,
}

/// Trapezoid-weighted discrete L2 norm of `values` on `grid`.
pub fn discrete_l2(grid: &[f64], values: &[C]) -> f64 {
    if grid.len() < 2 {
        return values.first().map_or(0.0, |v| v.norm());
    }
    let mut s = 0.0;
    for i in 0..grid.len() - 1 {
        let h = grid[i + 1] - grid[i];
        s += 0.5 * h * (values[i].norm_sqr() + values[i + 1].norm_sqr());
    }
    s.sqrt()
}

/// Distance on `x_grid` between the scaled resolvent applied to `f` and the
/// resolvent of the limit operator selected by `law`, for each `eps`.
pub fn convergence_study(
    v: &Potential,
    law: &ScalingLaw,
    z: C,
    f: &Source,
    eps_list: &[f64],
    x_grid: &[f64],
    tol: f64,
) -> Result<ConvergenceStudy> {
    check_eps_list(eps_list, 1)?;
    check_z(z)?;
    let mut law = *law;
    if let Some(t) = snapped_theta(v, law.theta, tol)? {
        law.theta = t;
    }
    let reference = resonance::classify_scaling(v, &law, SNAP_TOL)?;
    let reference_kernel = kernel_reference(reference, z)?;
    let target = apply_resolvent(&reference_kernel, f, x_grid)?;
    let label = reference.to_string();
    let rows = par_map(eps_list, |eps| {
        let lambda = law.lambda(eps);
        let k = kernel_scaled(v, lambda, eps, z, tol)?;
        let got = apply_resolvent(&k, f, x_grid)?;
        let diff: Vec<C> = got.iter().zip(&target).map(|(a, b)| a - b).collect();
        let end = k.interior.as_ref().expect("scaled kernel").u.end_state();
        Ok(ConvergenceRow {
            epsilon: eps,
            lambda,
            error_l2: discrete_l2(x_grid, &diff),
            alpha_estimate: (end.deriv / end.value).re,
            reference_kind: label.clone(),
        })
    })?;
    let monotone = rows.windows(2).all(|w| w[1].error_l2 < w[0].error_l2);
    Ok(ConvergenceStudy {
        reference,
        theta: law.theta,
        observed_order: loglog_slope(&rows),
        monotone,
        rows,
    })
}

fn loglog_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error_l2 > 0.0)
        .map(|r| (r.epsilon.ln(), r.error_l2.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
