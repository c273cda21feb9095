//! Gauss-Legendre rules, fixed and adaptive.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points per panel for every composite rule in the crate.
pub const GL_POINTS: usize = 16;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_n` from Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(x) and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// 16-point Gauss-Legendre on `[a, b]` for a real integrand.
pub fn gl_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let (x, w) = gl16();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(mid + half * xi);
    }
    s * half
}

/// 16-point Gauss-Legendre on `[a, b]` for a complex integrand.
pub fn gl_complex<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64) -> Complex64 {
    let (x, w) = gl16();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        s += f(mid + half * xi) * *wi;
    }
    s * half
}

/// Adaptive bisection driven by the 16-point rule: a panel is accepted when the
/// rule on the whole panel agrees with the sum over its halves.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Total panel evaluations allowed for one call.
    pub budget: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 40,
            budget: 20_000,
        }
    }
}

impl Adaptive {
    /// Integrates `f` over `[a, b]`, splitting first at every point of `cuts`
    /// that lies strictly inside.
    pub fn integrate<F: FnMut(f64) -> Complex64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        cuts: &[f64],
    ) -> Result<Complex64> {
        if b <= a {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut pts: Vec<f64> = std::iter::once(a)
            .chain(cuts.iter().copied().filter(|&c| c > a && c < b))
            .chain(std::iter::once(b))
            .collect();
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        let mut used = 0usize;
        let mut total = Complex64::new(0.0, 0.0);
        for w in pts.windows(2) {
            let whole = gl_complex(&mut f, w[0], w[1]);
            used += 1;
            total += self.refine(&mut f, w[0], w[1], whole, 0, &mut used)?;
        }
        Ok(total)
    }

    fn refine<F: FnMut(f64) -> Complex64>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
        whole: Complex64,
        depth: u32,
        used: &mut usize,
    ) -> Result<Complex64> {
        let m = 0.5 * (a + b);
        let left = gl_complex(&mut *f, a, m);
        let right = gl_complex(&mut *f, m, b);
        *used += 2;
        let halves = left + right;
        let err = (halves - whole).norm();
        if err <= self.abs_tol.max(self.rel_tol * halves.norm()) {
            return Ok(halves);
        }
        if depth >= self.max_depth || *used >= self.budget || m <= a || m >= b {
            return Err(Error::QuadratureFailure { a, b });
        }
        let l = self.refine(f, a, m, left, depth + 1, used)?;
        let r = self.refine(f, m, b, right, depth + 1, used)?;
        Ok(l + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // degree 31 is the exactness limit of 16 points
        for deg in [0, 1, 5, 17, 31] {
            let got = gl_real(|x| x.powi(deg), 0.0, 1.0);
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {deg}: {got} vs {want}");
        }
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn adaptive_handles_kinks_at_cuts() {
        let q = Adaptive::default();
        let got = q
            .integrate(|x| Complex64::new((x - 0.3).abs(), 0.0), 0.0, 1.0, &[0.3])
            .unwrap();
        assert!((got.re - (0.045 + 0.245)).abs() < 1e-13);
        let osc = q
            .integrate(|x| Complex64::new(0.0, (20.0 * x).sin()), 0.0, 3.0, &[])
            .unwrap();
        assert!((osc.im - (1.0 - (60.0f64).cos()) / 20.0).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let q = Adaptive {
            budget: 10,
            ..Adaptive::default()
        };
        let r = q.integrate(|x| Complex64::new((1.0 / (x + 1e-9)).sin(), 0.0), 0.0, 1.0, &[]);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
