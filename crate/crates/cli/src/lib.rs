pub mod records;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deltalimit::airy::{self, airy_quad};
use deltalimit::radial3d::{self, Verdict};
use deltalimit::resolvent::{self, Source};
use deltalimit::resonance::{self, LimitKind, ScalingLaw, ScanOptions};
use deltalimit::Potential;
use num_complex::Complex64;

use records::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(#[from] deltalimit::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "deltalimit", version, about = "Delta-like limits of half-line Schroedinger operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct PotentialArgs {
    /// `square`, `linear` (with --xi), a JSON file path, or inline JSON.
    #[arg(long, default_value = "square")]
    pub potential: String,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonant couplings in a range, nearest to zero first.
    Resonances {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long, default_value = "-120:-0.1", allow_hyphen_values = true)]
        theta_range: String,
        #[arg(long, default_value_t = 5)]
        max: usize,
        #[arg(long, default_value_t = 1e-10)]
        root_tol: f64,
        #[arg(long, default_value_t = deltalimit::ode::DEFAULT_TOL)]
        ode_tol: f64,
        #[arg(long, default_value_t = 400)]
        cells: usize,
    },
    /// Robin parameter at a resonance.
    Alpha {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, default_value_t = 1e-8)]
        root_tol: f64,
    },
    /// Resolvent kernel on a grid of (x, y) points.
    Kernel {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long, value_enum, default_value_t = KernelChoice::Scaled)]
        kind: KernelChoice,
        /// Coupling for the scaled kernel; defaults to theta/eps^2 + omega/eps.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        omega: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Spectral parameter as `re,im`.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        z: String,
        /// `lo:hi:n`
        #[arg(long, default_value = "0:3:7")]
        x: String,
        #[arg(long, default_value = "0:3:7")]
        y: String,
        #[arg(long, default_value_t = deltalimit::ode::DEFAULT_TOL)]
        ode_tol: f64,
    },
    /// Distance between scaled and limit resolvents for a list of eps.
    Converge {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        /// Sub-critical remainder exponent in (1, 2).
        #[arg(long)]
        remainder: Option<f64>,
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        z: String,
        /// Comma-separated, strictly decreasing.
        #[arg(long, default_value = "1e-1,1e-2,1e-3")]
        eps: String,
        /// `indicator:a:b` or `exp:rate`.
        #[arg(long, default_value = "indicator:1:2")]
        source: String,
        #[arg(long, default_value = "0.1:5:50")]
        x_grid: String,
        #[arg(long, default_value_t = deltalimit::ode::DEFAULT_TOL)]
        ode_tol: f64,
    },
    /// Ai, Ai', Bi, Bi' on a uniform grid.
    AiryTable {
        #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 21)]
        n: usize,
    },
    /// Zero-energy resonance verdict for a radial 3D potential.
    Classify3d {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Also write the profile `Psi(r)` (CSV r,Psi) here when resonant.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value = "0.01:20")]
        r_range: String,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Resonances and Robin parameters of the linear family for several xi.
    ScanXi {
        /// Comma-separated.
        #[arg(long, default_value = "0,0.3,0.7,1", allow_hyphen_values = true)]
        xi_list: String,
        #[arg(long, default_value = "-120:-0.1", allow_hyphen_values = true)]
        theta_range: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 3)]
        max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelChoice {
    Scaled,
    Robin,
    Dirichlet,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("{what}: cannot parse `{s}` as a number")))
}

pub fn parse_range(s: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(usage(format!("{what}: expected lo:hi, got `{s}`")));
    }
    let (lo, hi) = (parse_f64(parts[0], what)?, parse_f64(parts[1], what)?);
    if !(lo < hi) {
        return Err(usage(format!("{what}: need lo < hi, got `{s}`")));
    }
    Ok((lo, hi))
}

pub fn parse_grid(s: &str, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("{what}: expected lo:hi:n, got `{s}`")));
    }
    let (lo, hi) = (parse_f64(parts[0], what)?, parse_f64(parts[1], what)?);
    let n: usize = parts[2]
        .parse()
        .map_err(|_| usage(format!("{what}: bad point count in `{s}`")))?;
    if n < 1 || hi < lo {
        return Err(usage(format!("{what}: need n >= 1 and lo <= hi, got `{s}`")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|p| parse_f64(p, what)).collect()
}

pub fn parse_z(s: &str) -> Result<Complex64> {
    let v = parse_list(s, "--z")?;
    if v.len() != 2 {
        return Err(usage(format!("--z: expected re,im, got `{s}`")));
    }
    if v[1] == 0.0 {
        return Err(usage("--z: imaginary part must be nonzero"));
    }
    Ok(Complex64::new(v[0], v[1]))
}

pub fn parse_eps(s: &str) -> Result<Vec<f64>> {
    let v = parse_list(s, "--eps")?;
    if v.is_empty() || v.iter().any(|&e| !(e > 0.0)) || v.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(usage(format!("--eps: need positive, strictly decreasing values, got `{s}`")));
    }
    Ok(v)
}

fn parse_source(s: &str) -> Result<Source> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["indicator", a, b] => Ok(Source::indicator(parse_f64(a, "--source")?, parse_f64(b, "--source")?)?),
        ["exp", r] => Ok(Source::exp_decay(parse_f64(r, "--source")?)?),
        _ => Err(usage(format!("--source: expected indicator:a:b or exp:rate, got `{s}`"))),
    }
}

pub fn load_potential(p: &PotentialArgs) -> Result<Potential> {
    match p.potential.as_str() {
        "square" => Ok(Potential::square()),
        "linear" => match p.xi {
            Some(xi) => Ok(Potential::linear(xi)),
            None => Err(usage("--potential linear needs --xi")),
        },
        s if s.trim_start().starts_with('{') => Ok(Potential::from_json(s)?),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("--potential: cannot read `{path}`: {e}")))?;
            Ok(Potential::from_json(&text)?)
        }
    }
}

fn sink(output: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match output {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Parses `argv` and runs the subcommand; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let out = || sink(&cli.output);
    match &cli.command {
        Command::Resonances {
            pot,
            theta_range,
            max,
            root_tol,
            ode_tol,
            cells,
        } => {
            let v = load_potential(pot)?;
            let range = parse_range(theta_range, "--theta-range")?;
            let opts = ScanOptions {
                cells: *cells,
                ode_tol: *ode_tol,
            };
            let hits = resonance::find_resonances_with(&v, range, *max, *root_tol, &opts)?;
            let rows: Vec<ResonanceRow> = hits
                .iter()
                .map(|h| ResonanceRow {
                    theta: h.theta,
                    residual: h.residual,
                    psi_m: h.psi_at_m,
                    integral_i: h.integral,
                    dg_dtheta: h.dg_dtheta,
                    alpha_per_omega: h.alpha_per_omega(),
                })
                .collect();
            write_csv(out()?, &rows)?;
        }
        Command::Alpha {
            pot,
            theta,
            omega,
            root_tol,
        } => {
            let v = load_potential(pot)?;
            let hit = resonance::resonance_near(&v, *theta, *root_tol, deltalimit::ode::DEFAULT_TOL)?
                .ok_or(deltalimit::Error::NotAResonance {
                    theta: *theta,
                    residual: resonance::shoot_residual(&v, *theta, deltalimit::ode::DEFAULT_TOL)?.1,
                })?;
            let alpha = resonance::robin_alpha(&hit, *omega)?;
            let row = AlphaRow {
                theta: hit.theta,
                omega: *omega,
                alpha,
                alpha_per_omega: hit.alpha_per_omega(),
            };
            write_csv(out()?, &[row])?;
        }
        Command::Kernel {
            pot,
            kind,
            lambda,
            theta,
            omega,
            eps,
            alpha,
            z,
            x,
            y,
            ode_tol,
        } => {
            let z = parse_z(z)?;
            let xs = parse_grid(x, "--x")?;
            let ys = parse_grid(y, "--y")?;
            let k = match kind {
                KernelChoice::Scaled => {
                    let v = load_potential(pot)?;
                    let lam = match (lambda, theta) {
                        (Some(l), _) => *l,
                        (None, Some(t)) => ScalingLaw::critical(*t, *omega).lambda(*eps),
                        (None, None) => return Err(usage("scaled kernel needs --lambda or --theta")),
                    };
                    resolvent::kernel_scaled(&v, lam, *eps, z, *ode_tol)?
                }
                KernelChoice::Robin => {
                    let a = alpha.ok_or_else(|| usage("robin kernel needs --alpha"))?;
                    resolvent::kernel_reference(LimitKind::Robin { alpha: a }, z)?
                }
                KernelChoice::Dirichlet => resolvent::kernel_reference(LimitKind::Dirichlet, z)?,
            };
            let mut rows = Vec::with_capacity(xs.len() * ys.len());
            for &xv in &xs {
                for &yv in &ys {
                    if xv < 0.0 || yv < 0.0 {
                        return Err(usage("kernel grids must lie in x, y >= 0"));
                    }
                    let g = k.eval(xv, yv);
                    rows.push(KernelRow {
                        x: xv,
                        y: yv,
                        g_re: g.re,
                        g_im: g.im,
                    });
                }
            }
            write_csv(out()?, &rows)?;
        }
        Command::Converge {
            pot,
            theta,
            omega,
            remainder,
            z,
            eps,
            source,
            x_grid,
            ode_tol,
        } => {
            let v = load_potential(pot)?;
            let z = parse_z(z)?;
            let eps = parse_eps(eps)?;
            let f = parse_source(source)?;
            let grid = parse_grid(x_grid, "--x-grid")?;
            let law = match remainder {
                Some(g) => ScalingLaw::with_remainder(*theta, *omega, *g)?,
                None => ScalingLaw::critical(*theta, *omega),
            };
            let study = resolvent::convergence_study(&v, &law, z, &f, &eps, &grid, *ode_tol)?;
            let rows: Vec<ConvergeRow> = study
                .rows
                .iter()
                .map(|r| ConvergeRow {
                    epsilon: r.epsilon,
                    lambda: r.lambda,
                    error_l2: r.error_l2,
                    alpha_estimate: r.alpha_estimate,
                    reference_kind: r.reference_kind.clone(),
                })
                .collect();
            write_csv(out()?, &rows)?;
            eprintln!(
                "reference {} monotone {} order {}",
                study.reference,
                study.monotone,
                study.observed_order.map_or("n/a".to_string(), fmt15)
            );
        }
        Command::AiryTable { range, n } => {
            let (lo, hi) = parse_range(range, "--range")?;
            let xs = parse_grid(&format!("{lo}:{hi}:{n}"), "--n")?;
            let rows = xs
                .iter()
                .map(|&x| {
                    let q = airy_quad(x)?;
                    Ok(AiryRow {
                        x,
                        ai: q.ai,
                        dai: q.dai,
                        bi: q.bi,
                        dbi: q.dbi,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_csv(out()?, &rows)?;
        }
        Command::Classify3d {
            pot,
            theta,
            omega,
            tol,
            profile,
            r_range,
            n,
        } => {
            let v = load_potential(pot)?;
            let case = radial3d::classify_3d(&v, *theta, *omega, *tol)?;
            let row = Classify3dRow {
                theta: case.hit.as_ref().map_or(*theta, |h| h.theta),
                omega: *omega,
                verdict: case.verdict.to_string(),
                alpha: case.alpha.unwrap_or(f64::INFINITY),
            };
            write_csv(out()?, &[row])?;
            if let Some(path) = profile {
                if case.verdict == Verdict::Resonant {
                    let (lo, hi) = parse_range(r_range, "--r-range")?;
                    let grid = radial3d::log_grid(lo, hi, *n)?;
                    let rows: Vec<ProfileRow> = radial3d::resonance_profile(&case, &grid)?
                        .into_iter()
                        .map(|(r, psi)| ProfileRow { r, psi })
                        .collect();
                    write_csv(File::create(path)?, &rows)?;
                } else {
                    eprintln!("no profile: theta is not resonant");
                }
            }
        }
        Command::ScanXi {
            xi_list,
            theta_range,
            omega,
            max,
        } => {
            let xis = parse_list(xi_list, "--xi-list")?;
            let range = parse_range(theta_range, "--theta-range")?;
            let mut rows = Vec::new();
            for xi in xis {
                let v = Potential::linear(xi);
                let ode_hits = resonance::find_resonances(&v, range, *max, 1e-12)?;
                let airy_roots = airy::linear_resonances(xi, range, *max, 1e-14)?;
                for (k, (h, &t)) in ode_hits.iter().zip(&airy_roots).enumerate() {
                    let a = airy::alpha_linear(xi, t, *omega)?;
                    rows.push(XiRow {
                        xi,
                        index: k,
                        theta_airy: t,
                        theta_ode: h.theta,
                        discrepancy: (t - h.theta).abs(),
                        alpha_per_omega: if *omega == 0.0 { h.alpha_per_omega() } else { a / omega },
                    });
                }
            }
            write_csv(out()?, &rows)?;
        }
    }
    Ok(())
}
