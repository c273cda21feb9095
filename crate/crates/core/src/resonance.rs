//! The resonant coupling set `{theta : psi_theta'(M) = 0}`, the theta-derivative of
//! the endpoint map at a resonance, and the Robin parameter selected by the
//! critical scaling `lambda = theta / eps^2 + omega / eps`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, Trajectory, DEFAULT_TOL};
use crate::potential::Potential;
use crate::quadrature::gl_real;
use crate::roots;

/// Below this `|psi_theta(M)|` a profile cannot belong to a resonance.
pub const DEGENERATE_PSI: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub cells: usize,
    pub ode_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            cells: roots::DEFAULT_CELLS,
            ode_tol: DEFAULT_TOL,
        }
    }
}

/// A certified element of the resonant set together with the quantities the
/// Robin parameter is built from.
#[derive(Debug, Clone)]
pub struct ResonanceHit {
    pub theta: f64,
    /// `|psi_theta'(M)|`
    pub residual: f64,
    pub bracket: (f64, f64),
    /// `psi_theta(M)`
    pub psi_at_m: f64,
    /// `int_0^M V psi_theta^2`
    pub integral: f64,
    /// `int_0^M (psi_theta')^2`
    pub deriv_sq_integral: f64,
    /// `d/dtheta psi_theta'(M)`, from `integral / psi_at_m`
    pub dg_dtheta: f64,
    /// `(x, psi_theta(x))` at the integrator nodes
    pub profile: Vec<(f64, f64)>,
}

impl ResonanceHit {
    /// `alpha / omega = int V psi^2 / psi(M)^2`.
    pub fn alpha_per_omega(&self) -> f64 {
        self.integral / (self.psi_at_m * self.psi_at_m)
    }
}

/// Integrals of `V psi^2` and `(psi')^2` over `[0, M]`, by 16-point Gauss-Legendre
/// on every integrator step (each step lies inside one potential piece).
pub fn profile_integrals(v: &Potential, traj: &Trajectory) -> (f64, f64) {
    let mut vpsi2 = 0.0;
    let mut dpsi2 = 0.0;
    for (a, b, piece) in traj.step_intervals() {
        vpsi2 += gl_real(
            |x| {
                let p = traj.eval(x).value.re;
                v.eval_piece(piece, x) * p * p
            },
            a,
            b,
        );
        dpsi2 += gl_real(
            |x| {
                let d = traj.eval(x).deriv.re;
                d * d
            },
            a,
            b,
        );
    }
    (vpsi2, dpsi2)
}

fn real_z() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `(psi_theta(M), psi_theta'(M))` at zero energy.
pub fn shoot_residual(v: &Potential, theta: f64, tol: f64) -> Result<(f64, f64)> {
    let e = ode::solve_psi(v, theta, 0.0, real_z(), tol)?.end_state();
    Ok((e.value.re, e.deriv.re))
}

/// Builds a hit at `theta` after checking `|psi'(M)| <= root_tol`.
pub fn certify(
    v: &Potential,
    theta: f64,
    bracket: (f64, f64),
    root_tol: f64,
    ode_tol: f64,
) -> Result<ResonanceHit> {
    let traj = ode::solve_psi(v, theta, 0.0, real_z(), ode_tol)?;
    let end = traj.end_state();
    let residual = end.deriv.re.abs();
    if residual > root_tol {
        return Err(Error::BracketScanTooCoarse {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    let psi_at_m = end.value.re;
    if psi_at_m.abs() < DEGENERATE_PSI {
        return Err(Error::DegenerateProfile { theta, psi_at_m });
    }
    let (integral, deriv_sq_integral) = profile_integrals(v, &traj);
    let profile = traj.nodes().iter().map(|n| (n.x, n.value.re)).collect();
    Ok(ResonanceHit {
        theta,
        residual,
        bracket,
        psi_at_m,
        integral,
        deriv_sq_integral,
        dg_dtheta: integral / psi_at_m,
        profile,
    })
}

fn refine(
    v: &Potential,
    (lo, hi, flo, fhi): (f64, f64, f64, f64),
    root_tol: f64,
    ode_tol: f64,
) -> Result<ResonanceHit> {
    let root = if lo == hi {
        roots::Root { x: lo, lo, hi, residual: 0.0 }
    } else {
        roots::bisect(
            |t| shoot_residual(v, t, ode_tol).map(|r| r.1),
            lo,
            hi,
            flo,
            fhi,
            root_tol,
        )?
    };
    certify(v, root.x, (root.lo, root.hi), root_tol, ode_tol)
}

/// Every sign-change root of `theta -> psi_theta'(M)` in `range`, nearest to zero
/// first, at most `max_hits` of them.
pub fn find_resonances(
    v: &Potential,
    range: (f64, f64),
    max_hits: usize,
    root_tol: f64,
) -> Result<Vec<ResonanceHit>> {
    find_resonances_with(v, range, max_hits, root_tol, &ScanOptions::default())
}

pub fn find_resonances_with(
    v: &Potential,
    range: (f64, f64),
    max_hits: usize,
    root_tol: f64,
    opts: &ScanOptions,
) -> Result<Vec<ResonanceHit>> {
    if !(root_tol > 0.0) {
        return Err(Error::InvalidInput(format!("root tolerance must be positive, got {root_tol}")));
    }
    let mut brackets = roots::scan(
        |t| shoot_residual(v, t, opts.ode_tol).map(|r| r.1),
        range.0,
        range.1,
        opts.cells,
    )?;
    brackets.sort_by(|a, b| {
        let ka = a.0.abs().min(a.1.abs());
        let kb = b.0.abs().min(b.1.abs());
        ka.partial_cmp(&kb).unwrap()
    });
    brackets
        .into_iter()
        .take(max_hits)
        .map(|br| refine(v, br, root_tol, opts.ode_tol))
        .collect()
}

/// The resonance within `root_tol * (1 + |theta|)` of `theta`, if any, refined to
/// full working precision.
pub fn resonance_near(
    v: &Potential,
    theta: f64,
    root_tol: f64,
    ode_tol: f64,
) -> Result<Option<ResonanceHit>> {
    let delta = root_tol * (1.0 + theta.abs());
    let (lo, hi) = (theta - delta, theta + delta);
    let flo = shoot_residual(v, lo, ode_tol)?.1;
    let fhi = shoot_residual(v, hi, ode_tol)?.1;
    let bracket = if flo == 0.0 {
        (lo, lo, 0.0, 0.0)
    } else if fhi == 0.0 {
        (hi, hi, 0.0, 0.0)
    } else if (flo < 0.0) != (fhi < 0.0) {
        (lo, hi, flo, fhi)
    } else {
        return Ok(None);
    };
    // bisect to float adjacency, then certify at the requested tolerance
    let root = if bracket.0 == bracket.1 {
        roots::Root { x: bracket.0, lo: bracket.0, hi: bracket.1, residual: 0.0 }
    } else {
        roots::bisect(
            |t| shoot_residual(v, t, ode_tol).map(|r| r.1),
            bracket.0,
            bracket.1,
            bracket.2,
            bracket.3,
            0.0,
        )?
    };
    certify(v, root.x, (lo, hi), root_tol.max(root.residual), ode_tol).map(Some)
}

/// `(1 / psi_theta(M)) int_0^M V psi_theta^2` recomputed at `hit.theta` with `tol`.
pub fn dg_dtheta(v: &Potential, hit: &ResonanceHit, tol: f64) -> Result<f64> {
    let traj = ode::solve_psi(v, hit.theta, 0.0, real_z(), tol)?;
    let psi_m = traj.end_state().value.re;
    if psi_m.abs() < DEGENERATE_PSI {
        return Err(Error::DegenerateProfile {
            theta: hit.theta,
            psi_at_m: psi_m,
        });
    }
    Ok(profile_integrals(v, &traj).0 / psi_m)
}

/// `g'(M)` where `-g'' + theta V g + V psi_theta = 0`, `g(0) = g'(0) = 0`: the
/// theta-derivative of `psi_theta'(M)` obtained by integrating the variational
/// equation alongside `psi_theta`.
pub fn dg_dtheta_variational(v: &Potential, theta: f64, tol: f64) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let segs: Vec<(f64, f64)> = v.breakpoints().windows(2).map(|w| (w[0], w[1])).collect();
    let sol = ode::integrate(
        &segs,
        [zero, Complex64::new(1.0, 0.0), zero, zero],
        tol,
        |seg, x, y| {
            let vx = v.eval_piece(seg, x);
            [y[1], y[0] * (theta * vx), y[3], y[2] * (theta * vx) + y[0] * vx]
        },
    )?;
    Ok(sol.end_state()[3].re)
}

/// `-(1 / (theta psi(M))) int (psi')^2`, the integrated-by-parts form of `dg_dtheta`.
pub fn dg_dtheta_energy(hit: &ResonanceHit) -> f64 {
    -hit.deriv_sq_integral / (hit.theta * hit.psi_at_m)
}

/// `alpha = (omega / psi(M)^2) int_0^M V psi^2`.
pub fn robin_alpha(hit: &ResonanceHit, omega: f64) -> Result<f64> {
    if hit.psi_at_m.abs() < DEGENERATE_PSI {
        return Err(Error::DegenerateProfile {
            theta: hit.theta,
            psi_at_m: hit.psi_at_m,
        });
    }
    Ok(omega * hit.alpha_per_omega())
}

/// Coupling schedule `lambda(eps) = theta / eps^2 + omega / eps`, or
/// `theta / eps^2 + omega * eps^(-gamma_r)` with a sub-critical remainder
/// exponent `gamma_r` in `(1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLaw {
    pub theta: f64,
    pub omega: f64,
    pub remainder_exponent: Option<f64>,
}

impl ScalingLaw {
    pub fn critical(theta: f64, omega: f64) -> Self {
        ScalingLaw {
            theta,
            omega,
            remainder_exponent: None,
        }
    }

    pub fn with_remainder(theta: f64, omega: f64, exponent: f64) -> Result<Self> {
        if !(exponent > 1.0 && exponent < 2.0) {
            return Err(Error::InvalidInput(format!(
                "remainder exponent must lie in (1, 2), got {exponent}"
            )));
        }
        Ok(ScalingLaw {
            theta,
            omega,
            remainder_exponent: Some(exponent),
        })
    }

    pub fn lambda(&self, eps: f64) -> f64 {
        match self.remainder_exponent {
            None => self.theta / (eps * eps) + self.omega / eps,
            Some(g) => self.theta / (eps * eps) + self.omega * eps.powf(-g),
        }
    }
}

/// Limit operator of the scaled family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKind {
    Dirichlet,
    Robin { alpha: f64 },
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::Dirichlet => write!(f, "dirichlet"),
            LimitKind::Robin { alpha } => write!(f, "robin({alpha})"),
        }
    }
}

/// Robin iff `law.theta` is resonant (within `root_tol`) and the law is critical;
/// Dirichlet otherwise.
pub fn classify_scaling(v: &Potential, law: &ScalingLaw, root_tol: f64) -> Result<LimitKind> {
    match resonance_near(v, law.theta, root_tol, DEFAULT_TOL)? {
        Some(hit) if law.remainder_exponent.is_none() => Ok(LimitKind::Robin {
            alpha: robin_alpha(&hit, law.omega)?,
        }),
        _ => Ok(LimitKind::Dirichlet),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square_hits(n: usize) -> Vec<ResonanceHit> {
        find_resonances(&Potential::square(), (-120.0, -0.1), n, 1e-12).unwrap()
    }

    #[test]
    fn square_well_endpoint_data() {
        let (p, d) = shoot_residual(&Potential::square(), -PI * PI / 4.0, 1e-10).unwrap();
        assert!((p - 2.0 / PI).abs() < 1e-9 && d.abs() < 1e-9);
        let (p, d) = shoot_residual(&Potential::square(), -PI * PI, 1e-10).unwrap();
        assert!(p.abs() < 1e-9 && (d + 1.0).abs() < 1e-9);
        let (p, d) = shoot_residual(&Potential::zero(2.5).unwrap(), -17.0, 1e-10).unwrap();
        assert!((p - 2.5).abs() < 1e-13 && (d - 1.0).abs() < 1e-13);
    }

    #[test]
    fn square_well_resonances() {
        let hits = square_hits(3);
        assert_eq!(hits.len(), 3);
        for (k, h) in hits.iter().enumerate() {
            let want = -PI * PI * (k as f64 + 0.5).powi(2);
            assert!(((h.theta - want) / want).abs() < 1e-8, "{} vs {want}", h.theta);
            assert!(h.residual <= 1e-12);
            assert!(h.bracket.0 <= h.theta && h.theta <= h.bracket.1);
        }
        let pos = find_resonances(&Potential::square(), (0.1, 100.0), 5, 1e-10).unwrap();
        assert!(pos.is_empty());
        let none = find_resonances(&Potential::zero(1.0).unwrap(), (-50.0, 50.0), 5, 1e-10).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn derivative_three_ways() {
        let v = Potential::square();
        let h = &square_hits(1)[0];
        assert!((h.dg_dtheta - 1.0 / PI).abs() < 1e-9);
        assert!((dg_dtheta(&v, h, 1e-11).unwrap() - 1.0 / PI).abs() < 1e-9);
        assert!((dg_dtheta_energy(h) - 1.0 / PI).abs() < 1e-9);
        assert!((dg_dtheta_variational(&v, h.theta, 1e-11).unwrap() - 1.0 / PI).abs() < 1e-9);
        let step = 1e-5;
        let fd = (shoot_residual(&v, h.theta + step, 1e-12).unwrap().1
            - shoot_residual(&v, h.theta - step, 1e-12).unwrap().1)
            / (2.0 * step);
        assert!((fd - h.dg_dtheta).abs() < 1e-6);
    }

    #[test]
    fn square_well_alpha_is_half_omega() {
        for h in square_hits(2) {
            for omega in [1.0, 3.0, -2.0, 0.0] {
                let a = robin_alpha(&h, omega).unwrap();
                assert!((a - omega / 2.0).abs() <= 1e-8 * (1.0 + omega.abs()));
                let via_dg = omega * h.dg_dtheta / h.psi_at_m;
                assert!((a - via_dg).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn energy_identity_on_hits() {
        let v = Potential::piecewise(vec![0.0, 0.5, 1.2], vec![vec![2.0, -1.0], vec![0.3, 0.0, 1.0]])
            .unwrap();
        let hits = find_resonances(&v, (-200.0, -0.1), 4, 1e-11).unwrap();
        assert!(!hits.is_empty());
        for h in hits {
            let lhs = h.theta * h.integral + h.deriv_sq_integral;
            assert!(lhs.abs() <= 1e-8 * h.deriv_sq_integral, "{lhs}");
            assert!(h.dg_dtheta.abs() > 1e-8 * (1.0 + h.theta.abs()));
        }
    }

    #[test]
    fn classification() {
        let v = Potential::square();
        let th = -PI * PI / 4.0;
        assert_eq!(
            classify_scaling(&v, &ScalingLaw::critical(-1.0, 5.0), 1e-9).unwrap(),
            LimitKind::Dirichlet
        );
        match classify_scaling(&v, &ScalingLaw::critical(th, 3.0), 1e-9).unwrap() {
            LimitKind::Robin { alpha } => assert!((alpha - 1.5).abs() < 1e-8),
            other => panic!("{other:?}"),
        }
        let sub = ScalingLaw::with_remainder(th, 1.0, 1.5).unwrap();
        assert_eq!(classify_scaling(&v, &sub, 1e-9).unwrap(), LimitKind::Dirichlet);
        assert!(ScalingLaw::with_remainder(th, 1.0, 2.0).is_err());
        // eight significant digits still land on the resonance
        assert!(matches!(
            classify_scaling(&v, &ScalingLaw::critical(-2.4674011, 1.0), 1e-9).unwrap(),
            LimitKind::Robin { .. }
        ));
    }

    #[test]
    fn scan_grid_refinement_is_stable() {
        let v = Potential::linear(0.7);
        let coarse = find_resonances_with(&v, (-150.0, -0.1), 4, 1e-11, &ScanOptions { cells: 200, ..Default::default() })
            .unwrap();
        let fine = find_resonances_with(&v, (-150.0, -0.1), 4, 1e-11, &ScanOptions { cells: 400, ..Default::default() })
            .unwrap();
        assert_eq!(coarse.len(), fine.len());
        for (a, b) in coarse.iter().zip(&fine) {
            assert!((a.theta - b.theta).abs() <= 1e-11 * (1.0 + a.theta.abs()));
        }
    }

    #[test]
    fn alpha_linear_in_omega() {
        let h = &square_hits(1)[0];
        for c in [0.5, 2.0, -4.0, 1024.0] {
            let a1 = robin_alpha(h, 0.37).unwrap();
            let a2 = robin_alpha(h, c * 0.37).unwrap();
            assert_eq!(a2, c * a1);
        }
    }
}
