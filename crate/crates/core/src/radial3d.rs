//! Zero-energy resonances of radial three-dimensional operators `-Delta + theta W(|x|)`.
//!
//! In the `l = 0` sector the substitution `Psi(r) = psi(r) / r` turns the problem into
//! the half-line problem for `V = W` on `[0, M]`, so the resonant couplings are the
//! same set and the scaled family converges to the point interaction with the
//! same Robin parameter.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, Trajectory, DEFAULT_TOL};
use crate::potential::Potential;
use crate::quadrature::gl_real;
use crate::resonance::{self, ResonanceHit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Resonant,
    NonResonant,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Resonant => write!(f, "resonant"),
            Verdict::NonResonant => write!(f, "non-resonant"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialCase {
    pub potential: Potential,
    pub theta: f64,
    pub omega: f64,
    pub verdict: Verdict,
    /// `None` stands for `alpha = infinity`, the free Laplacian.
    pub alpha_per_omega: Option<f64>,
    pub alpha: Option<f64>,
    pub hit: Option<ResonanceHit>,
    trajectory: Option<Trajectory>,
}

impl RadialCase {
    /// `psi_theta(M)`, the coefficient of the `1/r` tail.
    pub fn tail_coefficient(&self) -> Option<f64> {
        self.hit.as_ref().map(|h| h.psi_at_m)
    }
}

/// Resonant iff `theta` lies within `tol * (1 + |theta|)` of the resonant set of `v`.
pub fn classify_3d(v: &Potential, theta: f64, omega: f64, tol: f64) -> Result<RadialCase> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let hit = if v.is_zero() {
        None
    } else {
        resonance::resonance_near(v, theta, tol, DEFAULT_TOL)?
    };
    match hit {
        None => Ok(RadialCase {
            potential: v.clone(),
            theta,
            omega,
            verdict: Verdict::NonResonant,
            alpha_per_omega: None,
            alpha: None,
            hit: None,
            trajectory: None,
        }),
        Some(h) => {
            let alpha = resonance::robin_alpha(&h, omega)?;
            let traj = ode::solve_psi(v, h.theta, 0.0, Complex64::new(0.0, 0.0), DEFAULT_TOL)?;
            Ok(RadialCase {
                potential: v.clone(),
                theta,
                omega,
                verdict: Verdict::Resonant,
                alpha_per_omega: Some(h.alpha_per_omega()),
                alpha: Some(alpha),
                hit: Some(h),
                trajectory: Some(traj),
            })
        }
    }
}

/// `Psi_theta(r) = psi_theta(r) / r`, with `psi_theta` constant beyond the support.
pub fn resonance_profile(case: &RadialCase, r_points: &[f64]) -> Result<Vec<(f64, f64)>> {
    let traj = match (&case.verdict, &case.trajectory) {
        (Verdict::Resonant, Some(t)) => t,
        _ => return Err(Error::NotResonant { theta: case.theta }),
    };
    let m = case.potential.support_end();
    let psi_m = traj.end_state().value.re;
    r_points
        .iter()
        .map(|&r| {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
            }
            let psi = if r >= m { psi_m } else { traj.eval(r).value.re };
            Ok((r, psi / r))
        })
        .collect()
}

/// `n` logarithmically spaced radii in `[r_min, r_max]`.
pub fn log_grid(r_min: f64, r_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min) || n < 2 {
        return Err(Error::InvalidInput("need 0 < r_min < r_max and n >= 2".into()));
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// Partial integrals `int_M^R Psi^2 r^2 dr` for each `R`. Growth without bound
/// signals a profile outside `L^2`.
pub fn tail_partial_integrals(case: &RadialCase, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let m = case.potential.support_end();
    let psi_m = case
        .tail_coefficient()
        .ok_or(Error::NotResonant { theta: case.theta })?;
    radii
        .iter()
        .map(|&r| {
            if r < m {
                return Err(Error::InvalidInput(format!("radius {r} lies inside the support")));
            }
            // the integrand is (r Psi)^2 = psi(M)^2 on [M, R]
            Ok((r, gl_real(|_| psi_m * psi_m, m, r)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_well_verdicts() {
        let v = Potential::square();
        let c = classify_3d(&v, -1.0, 3.0, 1e-8).unwrap();
        assert_eq!(c.verdict, Verdict::NonResonant);
        assert!(c.alpha.is_none());
        assert_eq!(resonance_profile(&c, &[1.0]).unwrap_err().name(), "NotResonant");
        let c = classify_3d(&v, -PI * PI / 4.0, 1.0, 1e-8).unwrap();
        assert_eq!(c.verdict, Verdict::Resonant);
        assert!((c.alpha.unwrap() - 0.5).abs() < 1e-9);
        let zero = Potential::zero(1.0).unwrap();
        assert_eq!(classify_3d(&zero, -2.0, 1.0, 1e-8).unwrap().verdict, Verdict::NonResonant);
    }

    #[test]
    fn square_well_profile() {
        let c = classify_3d(&Potential::square(), -PI * PI / 4.0, 1.0, 1e-8).unwrap();
        let grid = log_grid(1e-3, 50.0, 60).unwrap();
        for (r, p) in resonance_profile(&c, &grid).unwrap() {
            let want = if r <= 1.0 {
                (PI * r / 2.0).sin() / (PI / 2.0 * r)
            } else {
                2.0 / PI / r
            };
            assert!((p - want).abs() < 1e-8, "r = {r}: {p} vs {want}");
        }
        let tail = tail_partial_integrals(&c, &[2.0, 20.0, 200.0]).unwrap();
        let c2 = (2.0 / PI).powi(2);
        for (r, s) in tail {
            assert!((s - c2 * (r - 1.0)).abs() < 1e-9 * r);
        }
    }
}
