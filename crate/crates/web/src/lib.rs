//! Browser bindings for the demo page in `www/`. Every function returns a flat
//! `Float64Array` of interleaved columns so the page can plot without parsing.

use deltalimit::airy;
use deltalimit::resolvent;
use deltalimit::resonance::{self, ScalingLaw};
use deltalimit::Potential;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

fn js_err(e: deltalimit::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn check_n(n: usize) -> Result<(), JsValue> {
    if (2..=5000).contains(&n) {
        Ok(())
    } else {
        Err(JsValue::from_str("point count must lie in [2, 5000]"))
    }
}

/// `[x, psi_xi(x), psi_0(x)]` rows on `[0, 1]` for the linear family.
#[wasm_bindgen]
pub fn psi_profiles(xi: f64, theta: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    check_n(n)?;
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        let (p, _) = airy::psi_linear_closed(xi, theta, x).map_err(js_err)?;
        out.extend([x, p, airy::psi_square_closed(theta, x).0]);
    }
    Ok(out)
}

/// `[theta, psi'_theta(1)]` rows on `[lo, hi]`; the zeros are the resonant couplings.
#[wasm_bindgen]
pub fn resonance_curve(xi: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    check_n(n)?;
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let r = if t == 0.0 {
            1.0
        } else {
            std::f64::consts::PI * airy::upsilon_linear_residual(xi, t).map_err(js_err)?
        };
        out.extend([t, r]);
    }
    Ok(out)
}

/// `[theta, alpha / omega]` for each resonance of the linear family in `[lo, hi]`.
#[wasm_bindgen]
pub fn resonances(xi: f64, lo: f64, hi: f64, max: usize) -> Result<Vec<f64>, JsValue> {
    let v = Potential::linear(xi);
    let hits = resonance::find_resonances(&v, (lo, hi), max, 1e-12).map_err(js_err)?;
    Ok(hits.iter().flat_map(|h| [h.theta, h.alpha_per_omega()]).collect())
}

/// `[x, Re G_scaled, Im G_scaled, Re G_limit, Im G_limit]` rows at fixed `y` for
/// the square well along `lambda = theta / eps^2 + omega / eps`. The limit
/// kernel is Robin when `theta` is resonant and Dirichlet otherwise.
#[wasm_bindgen]
pub fn kernel_slice(
    theta: f64,
    omega: f64,
    eps: f64,
    y: f64,
    z_re: f64,
    z_im: f64,
    x_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsValue> {
    check_n(n)?;
    let v = Potential::square();
    let z = Complex64::new(z_re, z_im);
    let law = ScalingLaw::critical(theta, omega);
    let limit = resonance::classify_scaling(&v, &law, 1e-6).map_err(js_err)?;
    let scaled = resolvent::kernel_scaled(&v, law.lambda(eps), eps, z, 1e-10).map_err(js_err)?;
    let reference = resolvent::kernel_reference(limit, z).map_err(js_err)?;
    let mut out = Vec::with_capacity(5 * n);
    for i in 0..n {
        let x = x_max * i as f64 / (n - 1) as f64;
        let g = scaled.eval(x, y);
        let r = reference.eval(x, y);
        out.extend([x, g.re, g.im, r.re, r.im]);
    }
    Ok(out)
}

/// Name of the limit operator for the square well at `(theta, omega)`.
#[wasm_bindgen]
pub fn limit_label(theta: f64, omega: f64) -> Result<String, JsValue> {
    let law = ScalingLaw::critical(theta, omega);
    resonance::classify_scaling(&Potential::square(), &law, 1e-6)
        .map(|k| k.to_string())
        .map_err(js_err)
}
