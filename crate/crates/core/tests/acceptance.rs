use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use deltalimit::airy::{self, airy_quad, alpha_linear, leading_asymptotic_negative, psi_linear_closed, psi_square_closed};
use deltalimit::radial3d::{classify_3d, Verdict};
use deltalimit::resolvent::{
    convergence_study, estimate_alpha, kernel_reference, kernel_scaled, KernelEval, Side, Source,
};
use deltalimit::resonance::{self, find_resonances, robin_alpha, shoot_residual, LimitKind, ScalingLaw};
use deltalimit::Potential;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// The harness captures print!; criterion lines go straight to stdout so they
// always show up in the log.
fn report(id: &str, pass: bool, detail: String) -> bool {
    let line = format!("{} [{id}] {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    pass
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const I: Complex64 = Complex64::new(0.0, 1.0);

#[test]
fn criterion_01_square_well_resonances() {
    let start = Instant::now();
    let hits = find_resonances(&Potential::square(), (-120.0, -0.1), 3, 1e-12).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let want: Vec<f64> = (0..3).map(|k| -PI * PI * (k as f64 + 0.5).powi(2)).collect();
    let worst = hits
        .iter()
        .zip(&want)
        .map(|(h, w)| rel(h.theta, *w))
        .fold(0.0, f64::max);
    let ok = hits.len() == 3 && worst <= 1e-8 && secs <= 5.0;
    let thetas: Vec<f64> = hits.iter().map(|h| h.theta).collect();
    assert!(report(
        "1",
        ok,
        format!("square-well resonances {thetas:?}: max rel err {worst:.3e} (tol 1e-8), {secs:.2}s (limit 5s)")
    ));
}

#[test]
fn criterion_02_square_well_robin_parameter() {
    let hits = find_resonances(&Potential::square(), (-30.0, -0.1), 2, 1e-12).unwrap();
    let mut worst: f64 = 0.0;
    for h in &hits {
        for omega in [1.0, 3.0, -2.0] {
            worst = worst.max(rel(robin_alpha(h, omega).unwrap(), omega / 2.0));
        }
    }
    let ok = hits.len() == 2 && worst <= 1e-8;
    assert!(report(
        "2",
        ok,
        format!("robin_alpha = omega/2 at two resonances, omega in {{1,3,-2}}: max rel err {worst:.3e} (tol 1e-8)")
    ));
}

fn random_potential(rng: &mut ChaCha8Rng) -> Potential {
    let m = rng.gen_range(0.6..1.6);
    let pieces = rng.gen_range(1..=3);
    let mut bps = vec![0.0];
    let mut inner: Vec<f64> = (1..pieces).map(|_| rng.gen_range(0.1..0.9) * m).collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.extend(inner);
    bps.push(m);
    let coeffs = (0..pieces)
        .map(|_| {
            vec![
                rng.gen_range(0.5..2.0),
                rng.gen_range(-0.4..0.4),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.2..0.2),
            ]
        })
        .collect();
    Potential::piecewise(bps, coeffs).unwrap()
}

#[test]
fn criterion_03_identity_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let ode_tol = 1e-12;
    let mut worst_energy: f64 = 0.0;
    let mut worst_deriv: f64 = 0.0;
    let mut count = 0;
    for _ in 0..10 {
        let v = random_potential(&mut rng);
        let opts = resonance::ScanOptions { cells: 400, ode_tol };
        let hits = resonance::find_resonances_with(&v, (-80.0, -0.05), 3, 1e-11, &opts).unwrap();
        assert!(!hits.is_empty());
        for h in &hits {
            count += 1;
            let energy = (h.theta * h.integral + h.deriv_sq_integral).abs() / h.deriv_sq_integral;
            worst_energy = worst_energy.max(energy);
            let step = 1e-4 * (1.0 + h.theta.abs());
            let up = shoot_residual(&v, h.theta + step, ode_tol).unwrap().1;
            let dn = shoot_residual(&v, h.theta - step, ode_tol).unwrap().1;
            let fd = (up - dn) / (2.0 * step);
            worst_deriv = worst_deriv.max((h.dg_dtheta - fd).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst_energy <= 1e-8 && worst_deriv <= 1e-6 && secs <= 60.0;
    assert!(report(
        "3",
        ok,
        format!(
            "{count} resonances of 10 random potentials: max |theta I + J|/J {worst_energy:.3e} (tol 1e-8), \
             max |dG/dtheta - FD| {worst_deriv:.3e} (tol 1e-6), {secs:.2}s (limit 60s)"
        )
    ));
}

#[test]
fn criterion_04ab_airy_wronskian_and_ode() {
    let mut worst_w: f64 = 0.0;
    for i in 0..1000 {
        let x = -10.0 + 20.0 * i as f64 / 999.0;
        let q = airy_quad(x).unwrap();
        worst_w = worst_w.max((q.wronskian() - 1.0 / PI).abs());
    }
    let h = 2e-4;
    let mut worst_ode: f64 = 0.0;
    let mut worst_bi: f64 = 0.0;
    for i in 0..=200 {
        let x = -5.0 + 10.0 * i as f64 / 200.0;
        let (m, c, p) = (airy_quad(x - h).unwrap(), airy_quad(x).unwrap(), airy_quad(x + h).unwrap());
        let d2a = (p.ai - 2.0 * c.ai + m.ai) / (h * h);
        let d2b = (p.bi - 2.0 * c.bi + m.bi) / (h * h);
        worst_ode = worst_ode.max((d2a - x * c.ai).abs());
        worst_bi = worst_bi.max((d2b - x * c.bi).abs() / c.bi.abs().max(1.0));
    }
    let ok = worst_w <= 1e-12 && worst_ode <= 1e-6 && worst_bi <= 1e-6;
    assert!(report(
        "4a/4b",
        ok,
        format!("Airy Wronskian max err {worst_w:.3e} (tol 1e-12); Ai''=xAi FD residual {worst_ode:.3e}, Bi''=xBi scaled residual {worst_bi:.3e} (tol 1e-6)")
    ));
}

#[test]
fn criterion_04c_airy_leading_asymptotic() {
    let q = airy_quad(-25.0).unwrap();
    let (ai0, bi0) = leading_asymptotic_negative(25.0);
    let gap = (q.ai - ai0).abs().max((q.bi - bi0).abs());
    assert!(report(
        "4c",
        gap <= 1e-6,
        format!("Ai/Bi(-25) vs leading asymptotic: gap {gap:.3e} (tol 1e-6); Ai(-25) = {:.15e}", q.ai)
    ));
}

#[test]
fn criterion_05_dual_path() {
    let mut worst_root: f64 = 0.0;
    let mut worst_alpha: f64 = 0.0;
    let mut n = 0;
    for xi in [0.3, 0.7, 1.0] {
        let v = Potential::linear(xi);
        let ode_hits = find_resonances(&v, (-120.0, -0.1), 2, 1e-12).unwrap();
        let airy_roots = airy::linear_resonances(xi, (-120.0, -0.1), 2, 1e-14).unwrap();
        assert_eq!(ode_hits.len(), 2);
        assert_eq!(airy_roots.len(), 2);
        for (h, &t) in ode_hits.iter().zip(&airy_roots) {
            n += 1;
            worst_root = worst_root.max((h.theta - t).abs());
            let a_closed = alpha_linear(xi, t, 1.0).unwrap();
            let a_ode = robin_alpha(h, 1.0).unwrap();
            worst_alpha = worst_alpha.max(rel(a_closed, a_ode));
        }
    }
    let ok = worst_root <= 1e-7 && worst_alpha <= 1e-6;
    assert!(report(
        "5",
        ok,
        format!("{n} roots, xi in {{0.3,0.7,1}}: max root gap {worst_root:.3e} (tol 1e-7), max alpha rel gap {worst_alpha:.3e} (tol 1e-6)")
    ));
}

fn triangular_root() -> f64 {
    airy::linear_resonances(1.0, (-30.0, -0.1), 1, 1e-15).unwrap()[0]
}

#[test]
fn criterion_06a_triangular_closed_form() {
    let theta = triangular_root();
    let omega = 1.0;
    let s = theta.cbrt();
    let q0 = airy_quad(0.0).unwrap();
    let qs = airy_quad(s).unwrap();
    let literal = omega / (3.0 * s) * (q0.dai / qs.ai).powi(2);
    let got = alpha_linear(1.0, theta, omega).unwrap();
    let gap = (got - literal).abs();
    let flipped = (got + literal).abs();
    assert!(report(
        "6a",
        gap <= 1e-10,
        format!(
            "alpha_linear(1) = {got:.15e} vs (omega/(3 cbrt theta))(Ai'(0)/Ai(cbrt theta))^2 = {literal:.15e}: \
             gap {gap:.3e} (tol 1e-10); with opposite overall sign the gap is {flipped:.3e}"
        )
    ));
}

#[test]
fn criterion_06b_triangular_vs_extrapolation() {
    let theta = triangular_root();
    let v = Potential::linear(1.0);
    let est = estimate_alpha(&v, theta, 1.0, &[1e-2, 1e-3, 1e-4], 1e-12).unwrap();
    let closed = alpha_linear(1.0, theta, 1.0).unwrap();
    let gap = (est.alpha() - closed).abs();
    assert!(report(
        "6b",
        gap <= 1e-6,
        format!(
            "Richardson alpha {:.12e} (order {:.3?}) vs closed form {closed:.12e}: gap {gap:.3e} (tol 1e-6)",
            est.alpha(),
            est.observed_order
        )
    ));
}

#[test]
fn criterion_07_convergence_dichotomy() {
    let start = Instant::now();
    let v = Potential::square();
    let f = Source::indicator(1.0, 2.0).unwrap();
    let grid: Vec<f64> = (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect();
    let eps = [1e-1, 1e-2, 1e-3];
    let tol = 1e-10;
    let res = -PI * PI / 4.0;

    let a = convergence_study(&v, &ScalingLaw::critical(res, 2.0), I, &f, &eps, &grid, tol).unwrap();
    let order = a.observed_order.unwrap_or(f64::NAN);
    let robin_one = matches!(a.reference, LimitKind::Robin { alpha } if (alpha - 1.0).abs() < 1e-8);
    let ok_a = robin_one && a.monotone && order >= 0.8;

    let b = convergence_study(&v, &ScalingLaw::critical(-1.0, 2.0), I, &f, &eps, &grid, tol).unwrap();
    let ok_b = b.reference == LimitKind::Dirichlet && b.monotone;

    let law_c = ScalingLaw::with_remainder(res, 2.0, 1.5).unwrap();
    let c = convergence_study(&v, &law_c, I, &f, &eps, &grid, tol).unwrap();
    let ok_c = c.reference == LimitKind::Dirichlet && c.monotone;

    let secs = start.elapsed().as_secs_f64();
    let errs = |s: &deltalimit::resolvent::ConvergenceStudy| sci(&s.rows.iter().map(|r| r.error_l2).collect::<Vec<_>>());
    let ok = ok_a && ok_b && ok_c && secs <= 120.0;
    assert!(report(
        "7",
        ok,
        format!(
            "(a) {} errors {} order {order:.3} (min 0.8); (b) {} errors {}; (c) {} errors {}; {secs:.1}s (limit 120s)",
            a.reference,
            errs(&a),
            b.reference,
            errs(&b),
            c.reference,
            errs(&c)
        )
    ));
}

struct DefectReport {
    ode: f64,
    jump: f64,
    boundary: f64,
}

fn defect_checks(k: &KernelEval, rng: &mut ChaCha8Rng, robin: Option<f64>) -> DefectReport {
    let h = 1e-4;
    let mut singular = k.singular_points();
    singular.push(k.edge());
    let z = k.z();
    let mut rep = DefectReport { ode: 0.0, jump: 0.0, boundary: 0.0 };
    let mut done = 0;
    while done < 20 {
        let x: f64 = rng.gen_range(0.01..3.0);
        let y: f64 = rng.gen_range(0.01..3.0);
        let near = |p: f64| singular.iter().any(|&s| (p - s).abs() < 5.0 * h);
        if (x - y).abs() < 5.0 * h || near(x) || near(y) {
            continue;
        }
        done += 1;
        // (-d^2/dx^2 + q - z) G = 0 with the second derivative as a difference of first derivatives
        let side = Side::Left;
        let d2 = (k.eval_dx(x + h, y, side) - k.eval_dx(x - h, y, side)) / (2.0 * h);
        let g = k.eval(x, y);
        let residual = (-d2 + (k.potential_term(x) - z) * g).norm();
        rep.ode = rep.ode.max(residual);
        let jump = k.eval_dx(y, y, Side::Right) - k.eval_dx(y, y, Side::Left);
        rep.jump = rep.jump.max((jump + 1.0).norm());
        let b = match robin {
            None => k.eval(0.0, y).norm(),
            Some(alpha) => (alpha * k.eval(0.0, y) - k.eval_dx(0.0, y, Side::Left)).norm(),
        };
        rep.boundary = rep.boundary.max(b);
    }
    rep
}

#[test]
fn criterion_08_kernel_defects() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let law = ScalingLaw::critical(-PI * PI / 4.0, 2.0);
    let eps = 0.5;
    let scaled = kernel_scaled(&Potential::square(), law.lambda(eps), eps, I, 1e-12).unwrap();
    let robin = kernel_reference(LimitKind::Robin { alpha: 1.0 }, I).unwrap();
    let dirichlet = kernel_reference(LimitKind::Dirichlet, Complex64::new(1.0, 2.0)).unwrap();
    let reps = [
        ("scaled", defect_checks(&scaled, &mut rng, None)),
        ("robin", defect_checks(&robin, &mut rng, Some(1.0))),
        ("dirichlet", defect_checks(&dirichlet, &mut rng, None)),
    ];
    let ok = reps.iter().all(|(_, r)| r.ode <= 1e-6 && r.jump <= 1e-6 && r.boundary <= 1e-8);
    let detail = reps
        .iter()
        .map(|(n, r)| format!("{n}: ode {:.2e} jump {:.2e} bc {:.2e}", r.ode, r.jump, r.boundary))
        .collect::<Vec<_>>()
        .join("; ");
    assert!(report("8", ok, format!("{detail} (tols 1e-6, 1e-6, 1e-8)")));
}

#[test]
fn criterion_09_radial_corollary() {
    let tol = 1e-8;
    let potentials = [
        Potential::square(),
        Potential::linear(0.5),
        Potential::linear(1.0),
        Potential::piecewise(vec![0.0, 0.4, 1.2], vec![vec![2.0, -1.0], vec![0.5, 0.0, 0.3]]).unwrap(),
    ];
    let mut agree = 0;
    let mut exact = true;
    let mut total = 0;
    for v in &potentials {
        let hits = find_resonances(v, (-200.0, -0.1), 3, 1e-12).unwrap();
        let roots: Vec<f64> = hits.iter().map(|h| h.theta).collect();
        let mut cases: Vec<f64> = roots.clone();
        cases.push(0.5 * (roots[0] + roots[1]));
        cases.push(0.5 * (roots[1] + roots[2]));
        for theta in cases {
            total += 1;
            let in_set = roots.iter().any(|r| (r - theta).abs() <= tol * (1.0 + theta.abs()));
            let case = classify_3d(v, theta, 1.3, tol).unwrap();
            if (case.verdict == Verdict::Resonant) == in_set {
                agree += 1;
            }
            if case.verdict == Verdict::Resonant {
                let one_d = resonance::resonance_near(v, theta, tol, deltalimit::ode::DEFAULT_TOL)
                    .unwrap()
                    .unwrap();
                exact &= case.alpha == Some(robin_alpha(&one_d, 1.3).unwrap());
            }
        }
    }
    let ok = agree == total && total == 20 && exact;
    assert!(report(
        "9",
        ok,
        format!("classify_3d agrees with resonant-set membership on {agree}/{total} pairs; alpha identical to 1D path: {exact}")
    ));
}

#[test]
fn criterion_10_xi_to_zero() {
    let theta = -5.0;
    let mut gaps = Vec::new();
    let mut dgaps = Vec::new();
    for xi in [1e-1, 1e-2, 1e-3] {
        let mut g: f64 = 0.0;
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let (p, _) = psi_linear_closed(xi, theta, x).unwrap();
            g = g.max((p - psi_square_closed(theta, x).0).abs());
        }
        gaps.push(g);
        let d = psi_linear_closed(xi, theta, 1.0).unwrap().1;
        dgaps.push((d - psi_square_closed(theta, 1.0).1).abs());
    }
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let ok = dec(&gaps) && dec(&dgaps);
    assert!(report(
        "10",
        ok,
        format!("theta = -5, xi = 1e-1,1e-2,1e-3: max-norm gaps {}, psi'(1) gaps {}", sci(&gaps), sci(&dgaps))
    ));
}
