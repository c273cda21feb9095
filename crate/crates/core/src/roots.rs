//! Grid scan plus bisection for sign-change roots of a scalar residual.

use crate::error::{Error, Result};

pub const DEFAULT_CELLS: usize = 400;
pub const MAX_BISECTIONS: u32 = 60;

/// A refined root with the final bracket and the residual at the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
    pub residual: f64,
}

/// Bisects `[lo, hi]` (with `f(lo)`, `f(hi)` of opposite sign) until the bracket is
/// below `tol * (1 + |x|)` and `|f| <= tol`, the floats are adjacent, or the
/// iteration cap is hit. Returns the best endpoint seen.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64, tol: f64) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let best = |lo: f64, hi: f64, flo: f64, fhi: f64| {
        if flo.abs() <= fhi.abs() {
            (lo, flo)
        } else {
            (hi, fhi)
        }
    };
    for _ in 0..MAX_BISECTIONS {
        let (bx, bf) = best(lo, hi, flo, fhi);
        if bf == 0.0 || ((hi - lo) <= tol * (1.0 + bx.abs()) && bf.abs() <= tol) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Root { x: mid, lo, hi, residual: 0.0 });
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let (x, fx) = best(lo, hi, flo, fhi);
    Ok(Root { x, lo, hi, residual: fx.abs() })
}

/// Scans `[lo, hi]` on `cells` equal cells and returns every sign-change bracket
/// `(a, b, f(a), f(b))`, ordered by position.
///
/// Where the samples dip towards zero without changing sign, a few extra probes
/// are taken; a sign flip there means two roots share one cell, which is
/// reported as [`Error::BracketScanTooCoarse`].
pub fn scan<F>(mut f: F, lo: f64, hi: f64, cells: usize) -> Result<Vec<(f64, f64, f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("bad scan range [{lo}, {hi}]")));
    }
    if cells == 0 {
        return Err(Error::InvalidInput("scan needs at least one cell".into()));
    }
    let xs: Vec<f64> = (0..=cells)
        .map(|j| lo + (hi - lo) * j as f64 / cells as f64)
        .collect();
    let fs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut out = Vec::new();
    for j in 0..cells {
        let (a, b) = (fs[j], fs[j + 1]);
        if a == 0.0 {
            out.push((xs[j], xs[j], 0.0, 0.0));
        } else if b != 0.0 && (a < 0.0) != (b < 0.0) {
            out.push((xs[j], xs[j + 1], a, b));
        } else if j == cells - 1 && b == 0.0 {
            out.push((xs[j + 1], xs[j + 1], 0.0, 0.0));
        }
    }
    // A sampled dip towards zero without a sign change may hide a root pair:
    // probe the vertex of the parabola through the three samples.
    for j in 1..cells {
        let (fl, fc, fr) = (fs[j - 1], fs[j], fs[j + 1]);
        let same_sign = (fl < 0.0) == (fc < 0.0) && (fc < 0.0) == (fr < 0.0);
        if !same_sign || fc == 0.0 || fc.abs() >= fl.abs() || fc.abs() >= fr.abs() {
            continue;
        }
        let h = xs[j] - xs[j - 1];
        let curv = fl - 2.0 * fc + fr;
        let vertex = xs[j] + 0.5 * h * (fl - fr) / curv;
        let lo_probe = xs[j - 1];
        let hi_probe = xs[j + 1];
        for p in [vertex, 0.5 * (xs[j - 1] + xs[j]), 0.5 * (xs[j] + xs[j + 1])] {
            if !(p > lo_probe && p < hi_probe) {
                continue;
            }
            let fp = f(p)?;
            if fp == 0.0 || (fp < 0.0) != (fc < 0.0) {
                return Err(Error::BracketScanTooCoarse { lo: lo_probe, hi: hi_probe });
            }
        }
    }
    Ok(out)
}
