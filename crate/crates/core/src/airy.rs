//! Real-argument Airy functions and the closed forms for the linear family
//! `V_xi(x) = (1 - xi x) 1_[0,1]`.
//!
//! Evaluation regions for `airy_quad`:
//!
//! | range            | Ai, Ai'                          | Bi, Bi'                 |
//! |------------------|----------------------------------|-------------------------|
//! | `|x| <= 1`       | Maclaurin                        | Maclaurin               |
//! | `1 < x <= 12`    | Macdonald-function integrals     | Maclaurin (positive)    |
//! | `12 < x <= 104`  | Macdonald-function integrals     | asymptotic series       |
//! | `-12 <= x < -1`  | Taylor steps from a node table   | same                    |
//! | `x < -12`        | modulus-phase asymptotics        | same                    |
//!
//! The Maclaurin expansion of `Ai` cancels catastrophically for large positive
//! `x`, and the asymptotic series cannot reach 1e-15 before `zeta ~ 18`, hence
//! the middle rows.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const AI0: f64 = 0.355_028_053_887_817_24;
const DAI0: f64 = -0.258_819_403_792_806_8;
const BI0: f64 = 0.614_926_627_446_000_7;
const DBI0: f64 = 0.448_288_357_353_826_36;

const SERIES_LIMIT: f64 = 1.0;
const TABLE_LIMIT: f64 = 12.0;
const NODE_SPACING: f64 = 0.5;
/// Largest x with finite Bi.
pub const BI_OVERFLOW: f64 = 104.0;

/// Width of the band around `xi = 0` routed to the square-well formulas.
pub const XI_GUARD: f64 = 1e-6;
/// Largest `|psi'(1)|` accepted as a resonance by [`alpha_linear`].
pub const RESONANCE_RESIDUAL_TOL: f64 = 1e-7;

/// `Ai`, `Ai'`, `Bi`, `Bi'` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryQuad {
    pub x: f64,
    pub ai: f64,
    pub dai: f64,
    pub bi: f64,
    pub dbi: f64,
}

impl AiryQuad {
    /// `Ai Bi' - Ai' Bi`, equal to `1/pi`.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.dbi - self.dai * self.bi
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.c
    }
}

/// Value and slope at `x0 + t` of the solution of `y'' = x y` with data `(y0, dy0)`
/// at `x0`, from its Taylor series about `x0`.
fn taylor(x0: f64, y0: f64, dy0: f64, t: f64) -> (f64, f64) {
    // a_{n+2} (n+2)(n+1) = x0 a_n + a_{n-1}
    let mut a_prev = 0.0; // a_{n-1}
    let mut a = [y0, dy0]; // a_n, a_{n+1}
    let mut y = Neumaier::default();
    let mut dy = Neumaier::default();
    y.add(y0);
    y.add(dy0 * t);
    dy.add(dy0);
    let mut tp = t; // t^(n+1)
    let mut quiet = 0;
    for n in 0..600usize {
        let next = (x0 * a[0] + a_prev) / (((n + 2) * (n + 1)) as f64);
        a_prev = a[0];
        a = [a[1], next];
        let m = n + 2;
        let dterm = next * m as f64 * tp;
        tp *= t;
        let term = next * tp;
        y.add(term);
        dy.add(dterm);
        let small = term.abs() <= 1e-17 * y.total().abs() && dterm.abs() <= 1e-17 * dy.total().abs();
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 3 {
            break;
        }
    }
    (y.total(), dy.total())
}

/// `e^z K_nu(z)` by the trapezoidal rule on `int_0^inf exp(-z (cosh t - 1)) cosh(nu t) dt`.
fn bessel_k_scaled(nu: f64, z: f64) -> f64 {
    let h = 0.2f64.min(0.5 / z.sqrt());
    let mut sum = Neumaier::default();
    sum.add(0.5);
    for j in 1..20000 {
        let t = j as f64 * h;
        let term = (-z * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum.add(term);
        if term < 1e-18 * sum.total() {
            break;
        }
    }
    h * sum.total()
}

fn ai_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let damp = (-zeta).exp();
    let ai = (x / 3.0).sqrt() / PI * bessel_k_scaled(1.0 / 3.0, zeta) * damp;
    let dai = -x / (PI * 3f64.sqrt()) * bessel_k_scaled(2.0 / 3.0, zeta) * damp;
    (ai, dai)
}

/// `u_k` coefficients of the Airy asymptotic expansions, until they stop
/// being useful for `zeta`.
fn asymptotic_terms(zeta: f64) -> Vec<(f64, f64)> {
    // (u_k / zeta^k, v_k / zeta^k)
    let mut out: Vec<(f64, f64)> = vec![(1.0, 1.0)];
    let mut u = 1.0;
    let mut p = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        p /= zeta;
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let tu = u * p;
        let tv = v * p;
        if tu.abs() > out[k - 1].0.abs() && k > 2 {
            break;
        }
        out.push((tu, tv));
        if tu.abs() < 1e-18 && tv.abs() < 1e-18 {
            break;
        }
    }
    out
}

fn bi_asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let terms = asymptotic_terms(zeta);
    let su: f64 = terms.iter().rev().map(|t| t.0).sum();
    let sv: f64 = terms.iter().rev().map(|t| t.1).sum();
    let q = x.powf(0.25);
    let g = zeta.exp() / PI.sqrt();
    (g / q * su, g * q * sv)
}

fn negative_asymptotic(x: f64) -> AiryQuad {
    let a = -x;
    let zeta = 2.0 / 3.0 * a * a.sqrt();
    let terms = asymptotic_terms(zeta);
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    for (k, (tu, tv)) in terms.iter().enumerate().rev() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            ue += sign * tu;
            ve += sign * tv;
        } else {
            uo += sign * tu;
            vo += sign * tv;
        }
    }
    let chi = zeta - PI / 4.0;
    let (s, c) = chi.sin_cos();
    let q = a.powf(0.25);
    let sp = PI.sqrt();
    AiryQuad {
        x,
        ai: (c * ue + s * uo) / (sp * q),
        bi: (-s * ue + c * uo) / (sp * q),
        dai: q * (s * ve - c * vo) / sp,
        dbi: q * (c * ve + s * vo) / sp,
    }
}

/// `(Ai, Ai', Bi, Bi')` at `x = -k * NODE_SPACING`, `k = 0..=24`.
fn node_table() -> &'static Vec<[f64; 4]> {
    static TABLE: OnceLock<Vec<[f64; 4]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = (TABLE_LIMIT / NODE_SPACING).round() as usize;
        let mut out = Vec::with_capacity(n + 1);
        let mut cur = [AI0, DAI0, BI0, DBI0];
        out.push(cur);
        for k in 0..n {
            let x0 = -(k as f64) * NODE_SPACING;
            let (a, da) = taylor(x0, cur[0], cur[1], -NODE_SPACING);
            let (b, db) = taylor(x0, cur[2], cur[3], -NODE_SPACING);
            cur = [a, da, b, db];
            out.push(cur);
        }
        out
    })
}

/// `Ai`, `Ai'`, `Bi`, `Bi'` at real `x`.
pub fn airy_quad(x: f64) -> Result<AiryQuad> {
    if !x.is_finite() || x > BI_OVERFLOW {
        return Err(Error::OverflowGuard { x });
    }
    if x.abs() <= SERIES_LIMIT {
        let (ai, dai) = taylor(0.0, AI0, DAI0, x);
        let (bi, dbi) = taylor(0.0, BI0, DBI0, x);
        return Ok(AiryQuad { x, ai, dai, bi, dbi });
    }
    if x > 0.0 {
        let (ai, dai) = ai_positive(x);
        let (bi, dbi) = if x <= TABLE_LIMIT {
            taylor(0.0, BI0, DBI0, x)
        } else {
            bi_asymptotic(x)
        };
        return Ok(AiryQuad { x, ai, dai, bi, dbi });
    }
    if x >= -TABLE_LIMIT {
        let table = node_table();
        let k = ((-x / NODE_SPACING).round() as usize).min(table.len() - 1);
        let x0 = -(k as f64) * NODE_SPACING;
        let n = table[k];
        let (ai, dai) = taylor(x0, n[0], n[1], x - x0);
        let (bi, dbi) = taylor(x0, n[2], n[3], x - x0);
        return Ok(AiryQuad { x, ai, dai, bi, dbi });
    }
    Ok(negative_asymptotic(x))
}

/// Leading-order negative-axis asymptotics `(Ai(-a), Bi(-a))` for `a > 0`.
pub fn leading_asymptotic_negative(a: f64) -> (f64, f64) {
    let chi = 2.0 / 3.0 * a * a.sqrt() - PI / 4.0;
    let amp = a.powf(-0.25) / PI.sqrt();
    (amp * chi.cos(), -amp * chi.sin())
}

/// Real cube root of `theta / xi^2`.
pub fn sigma(xi: f64, theta: f64) -> f64 {
    (theta / (xi * xi)).cbrt()
}

fn check_params(xi: f64, theta: f64) -> Result<()> {
    if !xi.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidInput("xi and theta must be finite".into()));
    }
    if theta == 0.0 {
        return Err(Error::InvalidInput("theta must be nonzero".into()));
    }
    Ok(())
}

/// Zero-energy solution for the square well (`xi = 0`).
pub fn psi_square_closed(theta: f64, x: f64) -> (f64, f64) {
    if theta < 0.0 {
        let k = (-theta).sqrt();
        ((k * x).sin() / k, (k * x).cos())
    } else if theta > 0.0 {
        let k = theta.sqrt();
        ((k * x).sinh() / k, (k * x).cosh())
    } else {
        (x, 1.0)
    }
}

/// `(psi, psi')` of `-psi'' + theta V_xi psi = 0`, `psi(0) = 0`, `psi'(0) = 1`, at `x`, in
/// closed form through Airy functions of `sigma (1 - xi x)`.
pub fn psi_linear_closed(xi: f64, theta: f64, x: f64) -> Result<(f64, f64)> {
    check_params(xi, theta)?;
    if xi.abs() < XI_GUARD {
        return Ok(psi_square_closed(theta, x));
    }
    let s = sigma(xi, theta);
    let a = airy_quad(s)?;
    let b = airy_quad(s * (1.0 - xi * x))?;
    let psi = -PI / (xi * s) * (a.ai * b.bi - a.bi * b.ai);
    let dpsi = PI * (a.ai * b.dbi - a.bi * b.dai);
    Ok((psi, dpsi))
}

/// `Ai(sigma) Bi'(sigma (1 - xi)) - Bi(sigma) Ai'(sigma (1 - xi))`, which equals
/// `psi'(1) / pi`; its zeros in `theta` form the resonant set of `V_xi`.
pub fn upsilon_linear_residual(xi: f64, theta: f64) -> Result<f64> {
    check_params(xi, theta)?;
    if xi.abs() < XI_GUARD {
        return Ok(psi_square_closed(theta, 1.0).1 / PI);
    }
    let s = sigma(xi, theta);
    let a = airy_quad(s)?;
    let b = airy_quad(s * (1.0 - xi))?;
    Ok(a.ai * b.dbi - a.bi * b.dai)
}

/// `int_0^1 V_xi psi^2` at a resonance:
/// `-(1 / (3 xi^3 sigma^3)) [1 + sigma (1 - xi)^2 (Ai(sigma) / Ai'(sigma (1 - xi)))^2]`.
pub fn integral_linear_closed(xi: f64, theta: f64) -> Result<f64> {
    check_params(xi, theta)?;
    if xi.abs() < XI_GUARD {
        // int_0^1 sin^2(kx)/k^2 with cos k = 0
        return Ok(-0.5 / theta);
    }
    let s = sigma(xi, theta);
    let a = airy_quad(s)?;
    let b = airy_quad(s * (1.0 - xi))?;
    let r = a.ai / b.dai;
    Ok(-(1.0 + s * (1.0 - xi).powi(2) * r * r) / (3.0 * xi.powi(3) * s.powi(3)))
}

/// Robin parameter of `V_xi` at a resonance:
/// `alpha = -(omega / (3 xi sigma)) [(Ai'(sigma (1 - xi)) / Ai(sigma))^2 + sigma (1 - xi)^2]`.
pub fn alpha_linear(xi: f64, theta: f64, omega: f64) -> Result<f64> {
    let residual = upsilon_linear_residual(xi, theta)?;
    if (PI * residual).abs() > RESONANCE_RESIDUAL_TOL {
        return Err(Error::NotAResonance { theta, residual });
    }
    if xi.abs() < XI_GUARD {
        return Ok(omega / 2.0);
    }
    let s = sigma(xi, theta);
    let a = airy_quad(s)?;
    let b = airy_quad(s * (1.0 - xi))?;
    let r = b.dai / a.ai;
    Ok(-omega / (3.0 * xi * s) * (r * r + s * (1.0 - xi).powi(2)))
}

/// Resonances of `V_xi` from the Airy residual, nearest to zero first.
pub fn linear_resonances(xi: f64, range: (f64, f64), max_hits: usize, root_tol: f64) -> Result<Vec<f64>> {
    let f = |t: f64| {
        if t == 0.0 {
            Ok(1.0 / PI)
        } else {
            upsilon_linear_residual(xi, t)
        }
    };
    let mut br = crate::roots::scan(f, range.0, range.1, crate::roots::DEFAULT_CELLS)?;
    br.sort_by(|a, b| a.0.abs().min(a.1.abs()).partial_cmp(&b.0.abs().min(b.1.abs())).unwrap());
    br.into_iter()
        .take(max_hits)
        .map(|(lo, hi, flo, fhi)| {
            if lo == hi {
                Ok(lo)
            } else {
                crate::roots::bisect(f, lo, hi, flo, fhi, root_tol).map(|r| r.x)
            }
        })
        .collect()
}

/// Closed-form data of the linear family at one `(xi, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCaseResult {
    pub xi: f64,
    pub theta: f64,
    pub sigma: f64,
    pub upsilon_residual: f64,
    /// Only meaningful when `upsilon_residual` vanishes.
    pub alpha_per_omega: f64,
}

impl LinearCaseResult {
    pub fn new(xi: f64, theta: f64) -> Result<Self> {
        let upsilon_residual = upsilon_linear_residual(xi, theta)?;
        let alpha_per_omega = if xi.abs() < XI_GUARD {
            0.5
        } else {
            let s = sigma(xi, theta);
            let a = airy_quad(s)?;
            let b = airy_quad(s * (1.0 - xi))?;
            let r = b.dai / a.ai;
            -(r * r + s * (1.0 - xi).powi(2)) / (3.0 * xi * s)
        };
        Ok(LinearCaseResult {
            xi,
            theta,
            sigma: sigma(xi, theta),
            upsilon_residual,
            alpha_per_omega,
        })
    }

    pub fn psi(&self, x: f64) -> Result<(f64, f64)> {
        psi_linear_closed(self.xi, self.theta, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath (30 digits) reference values
    const REF: &[(f64, f64, f64, f64, f64)] = &[
        (0.0, 0.355028053887817239, -0.258819403792806798, 0.614926627446000735, 0.448288357353826358),
        (2.0, 0.0349241304232743791, -0.0530903844336536317, 3.29809499997821471, 4.10068204993288989),
        (-2.0, 0.227407428201685576, 0.618259020741691041, -0.412302587956398488, 0.278795166921169523),
        (7.5, 1.91725606751343075e-7, -5.31271395972054468e-7, 303229.615112533402, 819987.835358799621),
        (-7.5, 0.321775716380647875, 0.318809506698554596, -0.112463485076490806, 0.877802281545760922),
        (-30.0, -0.0879681884568421628, 1.22862060263748513, -0.22444694220056632, -0.483694725827681493),
        (20.0, 1.69167286867054031e-27, -7.58639162574835496e-27, 2.10376504965110381e25, 9.38183933613396435e25),
        (1.0, 0.135292416312881416, -0.159147441296793213, 1.20742359495287126, 0.932435933392775633),
        (1.01, 0.133707702468958567, -0.157795740226381469, 1.21680868339474247, 0.944617676778575423),
        (-1.01, 0.535635620182258091, -0.00477775898271089856, 0.0980685152964417591, 0.59339096669067989),
        (11.99, 1.44257752258938862e-13, -5.02479398368521192e-13, 318647729743.400846, 1096620210516.4781),
        (12.01, 1.34546383588465049e-13, -4.69036601854192133e-13, 341362532056.935884, 1175790533555.63712),
        (-11.99, -0.0562861977443263133, 1.03047868680573998, -0.297909395887712632, -0.201125739097741219),
        (-12.01, -0.0767442924356775102, 1.01450795729899388, -0.293175600253419422, -0.272084166497317966),
        (-25.0, 0.163526578830429469, 0.96237885138769741, -0.192146815690378024, 0.815719715754605858),
        (50.0, 4.58494172407482848e-104, -3.2443318198287993e-103, 4.90909969944421933e101, 3.46879877954597672e102),
        (-3.3, -0.417180937374550129, -0.0709636171778361287, 0.0219679999897774544, -0.75926517504794455),
        (0.7, 0.189162400398150073, -0.199851191582280475, 0.973328655878165937, 0.65440591917214003),
        (-0.9, 0.531959945610973914, -0.0609109980021988362, 0.162638948925966249, 0.579749261265281445),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, ai, dai, bi, dbi) in REF {
            let q = airy_quad(x).unwrap();
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            assert!(rel(q.ai, ai) < 1e-12, "Ai({x}) = {} vs {ai}", q.ai);
            assert!(rel(q.dai, dai) < 1e-12, "Ai'({x}) = {} vs {dai}", q.dai);
            assert!(rel(q.bi, bi) < 1e-12, "Bi({x}) = {} vs {bi}", q.bi);
            assert!(rel(q.dbi, dbi) < 1e-12, "Bi'({x}) = {} vs {dbi}", q.dbi);
        }
    }

    #[test]
    fn wronskian_and_sign_facts() {
        for i in 0..=400 {
            let x = -40.0 + 0.2 * i as f64;
            if x > 10.0 {
                break;
            }
            let q = airy_quad(x).unwrap();
            assert!((q.wronskian() - 1.0 / PI).abs() < 1e-12, "x = {x}: {}", q.wronskian());
            if x > 0.0 {
                assert!(q.ai / q.bi > 0.0 && q.dai / q.dbi < 0.0);
            }
        }
        assert!(matches!(airy_quad(150.0), Err(Error::OverflowGuard { .. })));
        assert!(airy_quad(-500.0).is_ok());
    }

    #[test]
    fn closed_form_cauchy_data() {
        for (xi, theta) in [(0.5, -10.0), (1.0, -7.8), (1.7, 4.0), (-0.4, -3.0)] {
            let (p, d) = psi_linear_closed(xi, theta, 0.0).unwrap();
            assert!(p.abs() < 1e-13 && (d - 1.0).abs() < 1e-12, "{xi} {theta}: {p} {d}");
        }
    }

    #[test]
    fn guard_band_uses_square_well() {
        let (p, d) = psi_linear_closed(1e-8, -5.0, 0.5).unwrap();
        let k = 5f64.sqrt();
        assert_eq!((p, d), ((k * 0.5).sin() / k, (k * 0.5).cos()));
        assert_eq!(alpha_linear(0.0, -PI * PI / 4.0, 3.0).unwrap(), 1.5);
    }

    #[test]
    fn not_a_resonance_is_rejected() {
        assert!(matches!(alpha_linear(0.5, -1.0, 1.0), Err(Error::NotAResonance { .. })));
        assert_eq!(upsilon_linear_residual(1.0, 0.0).unwrap_err().name(), "InvalidInput");
    }
}
