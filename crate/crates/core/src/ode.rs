//! Cauchy problems for `-psi'' + (theta V - gamma z) psi = 0` on the support of `V`.
//!
//! Integration uses the Dormand-Prince 5(4) pair with its native continuous
//! extension, restarted at every breakpoint of the potential so that no step
//! sees a coefficient discontinuity. Small-scale problems on `[0, eps M]` are
//! never integrated directly: they are mapped onto `[0, M]` by rescaling.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::Potential;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const STEP_BUDGET: usize = 1_000_000;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Value and derivative of a solution at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyState {
    pub x: f64,
    pub value: Complex64,
    pub deriv: Complex64,
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone)]
pub(crate) struct DenseStep<const N: usize> {
    x0: f64,
    h: f64,
    r: [[C; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, x: f64) -> [C; N] {
        let s = ((x - self.x0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.r;
            *o = r[0][i] + (r[1][i] + (r[2][i] + (r[3][i] + r[4][i] * s1) * s) * s1) * s;
        }
        out
    }
}

/// Piecewise-polynomial dense solution on `[x_start, x_end]`.
#[derive(Debug, Clone)]
pub(crate) struct DenseSolution<const N: usize> {
    steps: Vec<DenseStep<N>>,
    start: (f64, [C; N]),
    end: (f64, [C; N]),
    /// Step index at which each segment starts.
    seg_starts: Vec<usize>,
}

impl<const N: usize> DenseSolution<N> {
    pub(crate) fn end_state(&self) -> [C; N] {
        self.end.1
    }

    pub(crate) fn eval(&self, x: f64) -> [C; N] {
        if x <= self.start.0 {
            return self.start.1;
        }
        if x >= self.end.0 {
            return self.end.1;
        }
        let k = self.steps.partition_point(|s| s.x0 <= x).saturating_sub(1);
        self.steps[k].eval(x)
    }

    /// Step intervals `(x0, x1, segment)`; each lies inside one segment.
    pub(crate) fn step_intervals(&self) -> Vec<(f64, f64, usize)> {
        let mut seg = 0;
        self.steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                while seg + 1 < self.seg_starts.len() && self.seg_starts[seg + 1] <= k {
                    seg += 1;
                }
                (s.x0, s.x0 + s.h, seg)
            })
            .collect()
    }
}

fn axpy<const N: usize>(y: &[C; N], h: f64, terms: &[(f64, &[C; N])]) -> [C; N] {
    let mut out = *y;
    for (coef, k) in terms {
        if *coef == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += k[i] * (h * coef);
        }
    }
    out
}

/// Integrates `y' = f(segment, x, y)` across consecutive segments `[b_j, b_{j+1}]`,
/// restarting the step sequence at every segment boundary.
pub(crate) fn integrate<const N: usize, F>(
    segments: &[(f64, f64)],
    y0: [C; N],
    tol: f64,
    mut rhs: F,
) -> Result<DenseSolution<N>>
where
    F: FnMut(usize, f64, &[C; N]) -> [C; N],
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let mut steps = Vec::new();
    let mut seg_starts = Vec::with_capacity(segments.len());
    let mut y = y0;
    let mut h_prev: Option<f64> = None;
    let mut budget = STEP_BUDGET;
    for (si, &(a, b)) in segments.iter().enumerate() {
        seg_starts.push(steps.len());
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let mut x = a;
        let mut h = h_prev.unwrap_or(0.05).min(len).max(len * 1e-6);
        let mut k1 = rhs(si, x, &y);
        loop {
            if budget == 0 {
                return Err(Error::NonConvergence(format!(
                    "step budget of {STEP_BUDGET} exhausted at x = {x}"
                )));
            }
            budget -= 1;
            let last = x + h >= b - 1e-13 * b.abs().max(1.0);
            if last {
                h = b - x;
            }
            let k2 = rhs(si, x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = rhs(si, x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(
                si,
                x + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = rhs(
                si,
                x + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                si,
                x + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y1 = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let x1 = if last { b } else { x + h };
            let k7 = rhs(si, x1, &y1);

            let mut acc = 0.0;
            for i in 0..N {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                    * h;
                let sc = tol * (1.0 + y[i].norm().max(y1[i].norm()));
                acc += (e.norm() / sc).powi(2);
            }
            let err = (acc / N as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::NonConvergence(format!("non-finite state near x = {x}")));
            }
            if err <= 1.0 {
                let mut r = [[ZERO; N]; 5];
                for i in 0..N {
                    let dy = y1[i] - y[i];
                    let bspl = k1[i] * h - dy;
                    r[0][i] = y[i];
                    r[1][i] = dy;
                    r[2][i] = bspl;
                    r[3][i] = dy - k7[i] * h - bspl;
                    r[4][i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6
                        + k7[i] * D7)
                        * h;
                }
                steps.push(DenseStep { x0: x, h, r });
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h_prev = Some(h * fac);
                x = x1;
                y = y1;
                k1 = k7;
                if last {
                    break;
                }
                h *= fac;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
            if h < 1e-15 * x.abs().max(1.0) {
                return Err(Error::NonConvergence(format!(
                    "step size underflow at x = {x}"
                )));
            }
        }
    }
    let x_start = segments.first().map(|s| s.0).unwrap_or(0.0);
    let x_end = segments.last().map(|s| s.1).unwrap_or(x_start);
    Ok(DenseSolution {
        steps,
        start: (x_start, y0),
        end: (x_end, y),
        seg_starts,
    })
}

/// Segments of `[0, M]` between consecutive breakpoints of `v`.
pub(crate) fn piece_segments(v: &Potential) -> Vec<(f64, f64)> {
    v.breakpoints().windows(2).map(|w| (w[0], w[1])).collect()
}

/// A solution on the support of the potential, possibly viewed through the
/// rescaling `x -> x / scale` used for the small-scale problems.
#[derive(Debug, Clone)]
pub struct Trajectory {
    sol: DenseSolution<2>,
    tol: f64,
    // physical state = (value_scale * psi(x / x_scale), deriv_scale * psi'(x / x_scale))
    x_scale: f64,
    value_scale: f64,
    deriv_scale: f64,
}

impl Trajectory {
    fn plain(sol: DenseSolution<2>, tol: f64) -> Self {
        Trajectory {
            sol,
            tol,
            x_scale: 1.0,
            value_scale: 1.0,
            deriv_scale: 1.0,
        }
    }

    fn map(&self, xs: f64, y: [C; 2]) -> CauchyState {
        CauchyState {
            x: xs * self.x_scale,
            value: y[0] * self.value_scale,
            deriv: y[1] * self.deriv_scale,
        }
    }

    /// Local error tolerance the integrator met on every step.
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn x_end(&self) -> f64 {
        self.sol.end.0 * self.x_scale
    }

    /// Accepted step endpoints, starting at `x = 0`. Every potential
    /// breakpoint appears among them.
    pub fn nodes(&self) -> Vec<CauchyState> {
        let mut out = Vec::with_capacity(self.sol.steps.len() + 1);
        out.push(self.map(self.sol.start.0, self.sol.start.1));
        for (k, s) in self.sol.steps.iter().enumerate() {
            let x1 = s.x0 + s.h;
            let y = match self.sol.steps.get(k + 1) {
                Some(next) => next.r[0],
                None => self.sol.end.1,
            };
            out.push(self.map(x1, y));
        }
        out
    }

    /// Dense evaluation; clamps to the end state outside the covered range.
    pub fn eval(&self, x: f64) -> CauchyState {
        let xs = x / self.x_scale;
        let mut st = self.map(xs, self.sol.eval(xs));
        st.x = x;
        st
    }

    pub fn end_state(&self) -> CauchyState {
        self.map(self.sol.end.0, self.sol.end.1)
    }

    /// Physical step intervals with the index of the potential piece they lie in.
    pub fn step_intervals(&self) -> Vec<(f64, f64, usize)> {
        self.sol
            .step_intervals()
            .into_iter()
            .map(|(a, b, p)| (a * self.x_scale, b * self.x_scale, p))
            .collect()
    }
}

/// `f g' - f' g` at `x`.
pub fn wronskian(f: &Trajectory, g: &Trajectory, x: f64) -> Complex64 {
    let a = f.eval(x);
    let b = g.eval(x);
    a.value * b.deriv - a.deriv * b.value
}

fn solve_cauchy(
    v: &Potential,
    theta: f64,
    gamma: f64,
    z: Complex64,
    init: [C; 2],
    tol: f64,
) -> Result<Trajectory> {
    if !theta.is_finite() || !gamma.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidInput("non-finite ODE parameter".into()));
    }
    let shift = z * gamma;
    let sol = integrate(&piece_segments(v), init, tol, |seg, x, y| {
        [y[1], (theta * v.eval_piece(seg, x) - shift) * y[0]]
    })?;
    Ok(Trajectory::plain(sol, tol))
}

/// `psi_{theta,gamma}` on `[0, M]`: `-psi'' + (theta V - gamma z) psi = 0`, `psi(0) = 0`, `psi'(0) = 1`.
///
/// Real `z` is accepted (validation against closed forms); kernel assembly
/// requires `Im z != 0` and checks it itself.
pub fn solve_psi(v: &Potential, theta: f64, gamma: f64, z: Complex64, tol: f64) -> Result<Trajectory> {
    solve_cauchy(v, theta, gamma, z, [ZERO, C::new(1.0, 0.0)], tol)
}

/// `psi~_theta` on `[0, M]`: `-psi~'' + theta V psi~ = 0`, `psi~(0) = 1`, `psi~'(0) = 0`.
pub fn solve_psi_tilde(v: &Potential, theta: f64, tol: f64) -> Result<Trajectory> {
    solve_psi_tilde_gamma(v, theta, 0.0, C::new(0.0, 0.0), tol)
}

/// Second solution with the spectral shift included; the rescaled form of the
/// interior solution with unit value and zero slope at the origin.
pub fn solve_psi_tilde_gamma(
    v: &Potential,
    theta: f64,
    gamma: f64,
    z: Complex64,
    tol: f64,
) -> Result<Trajectory> {
    solve_cauchy(v, theta, gamma, z, [C::new(1.0, 0.0), ZERO], tol)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// `u_{lambda,eps}` on `[0, eps M]` for `-u'' + (lambda V(x/eps) - z) u = 0`, `u(0) = 0`, `u'(0) = 1`,
/// via `u(x) = eps psi_{eps^2 lambda, eps^2}(x / eps)`.
pub fn solve_u(
    v: &Potential,
    lambda: f64,
    eps: f64,
    z: Complex64,
    tol: f64,
) -> Result<Trajectory> {
    check_eps(eps)?;
    let e2 = eps * eps;
    let mut t = solve_psi(v, e2 * lambda, e2, z, tol)?;
    t.x_scale = eps;
    t.value_scale = eps;
    t.deriv_scale = 1.0;
    Ok(t)
}

/// Interior second solution `v~` on `[0, eps M]` with `v~(0) = 1`, `v~'(0) = 0`.
pub fn solve_v_tilde(
    v: &Potential,
    lambda: f64,
    eps: f64,
    z: Complex64,
    tol: f64,
) -> Result<Trajectory> {
    check_eps(eps)?;
    let e2 = eps * eps;
    let mut t = solve_psi_tilde_gamma(v, e2 * lambda, e2, z, tol)?;
    t.x_scale = eps;
    t.value_scale = 1.0;
    t.deriv_scale = 1.0 / eps;
    Ok(t)
}
