//! Compactly supported, piecewise-cubic potentials on the half-line.
//!
//! A potential is stored as an ordered list of breakpoints `0 = x_0 < ... < x_n = M`
//! and one cubic per piece `[x_i, x_{i+1})`, written in the absolute variable `x`.
//! Everything beyond `M` is zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which closed-form family a potential came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    /// `V = 1` on `[0, 1]`.
    Square,
    /// `V = 1 - xi x` on `[0, 1]`.
    Linear(f64),
    Piecewise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    breakpoints: Vec<f64>,
    coeffs: Vec<[f64; 4]>,
}

/// On-disk description of a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    Square,
    Linear {
        xi: f64,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        coeffs: Vec<Vec<f64>>,
    },
}

fn horner(c: &[f64; 4], x: f64) -> f64 {
    ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
}

impl Potential {
    pub fn square() -> Self {
        Potential {
            kind: PotentialKind::Square,
            breakpoints: vec![0.0, 1.0],
            coeffs: vec![[1.0, 0.0, 0.0, 0.0]],
        }
    }

    /// The family `V_xi(x) = (1 - xi x) 1_[0,1]`.
    pub fn linear(xi: f64) -> Self {
        Potential {
            kind: PotentialKind::Linear(xi),
            breakpoints: vec![0.0, 1.0],
            coeffs: vec![[1.0, -xi, 0.0, 0.0]],
        }
    }

    /// Identically zero potential with nominal support `[0, m]`.
    pub fn zero(m: f64) -> Result<Self> {
        Self::piecewise(vec![0.0, m], vec![vec![0.0]])
    }

    /// Builds a piecewise polynomial potential. Each coefficient list holds
    /// `c0..c3` (shorter lists are zero-padded) of `c0 + c1 x + c2 x^2 + c3 x^3`.
    pub fn piecewise(breakpoints: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidInput("need at least two breakpoints".into()));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidInput("first breakpoint must be 0".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if coeffs.len() != breakpoints.len() - 1 {
            return Err(Error::InvalidInput(format!(
                "{} pieces need {} coefficient lists, got {}",
                breakpoints.len() - 1,
                breakpoints.len() - 1,
                coeffs.len()
            )));
        }
        let mut padded = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.is_empty() || c.len() > 4 {
                return Err(Error::InvalidInput(
                    "each piece needs 1 to 4 coefficients (degree <= 3)".into(),
                ));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("coefficients must be finite".into()));
            }
            let mut p = [0.0; 4];
            p[..c.len()].copy_from_slice(&c);
            padded.push(p);
        }
        Ok(Potential {
            kind: PotentialKind::Piecewise,
            breakpoints,
            coeffs: padded,
        })
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::Square => Ok(Self::square()),
            PotentialSpec::Linear { xi } => {
                if !xi.is_finite() {
                    return Err(Error::InvalidInput("xi must be finite".into()));
                }
                Ok(Self::linear(*xi))
            }
            PotentialSpec::Piecewise {
                breakpoints,
                coeffs,
            } => Self::piecewise(breakpoints.clone(), coeffs.clone()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PotentialSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("potential description: {e}")))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> PotentialSpec {
        match self.kind {
            PotentialKind::Square => PotentialSpec::Square,
            PotentialKind::Linear(xi) => PotentialSpec::Linear { xi },
            PotentialKind::Piecewise => PotentialSpec::Piecewise {
                breakpoints: self.breakpoints.clone(),
                coeffs: self.coeffs.iter().map(|c| c.to_vec()).collect(),
            },
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    /// Right end `M` of the support.
    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// All abscissae where the potential may be discontinuous or kinked,
    /// including `0` and `M`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_pieces(&self) -> usize {
        self.coeffs.len()
    }

    /// Interval `[x_i, x_{i+1}]` of piece `i`.
    pub fn piece_interval(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn piece_coeffs(&self, i: usize) -> &[f64; 4] {
        &self.coeffs[i]
    }

    /// Evaluates piece `i`'s polynomial at `x`, regardless of where `x` lies.
    /// Integrators use this so that a step never mixes two pieces.
    #[inline]
    pub fn eval_piece(&self, i: usize, x: f64) -> f64 {
        horner(&self.coeffs[i], x)
    }

    /// `V(x)` for `x >= 0`; exactly zero beyond `M`. At interior breakpoints the
    /// right piece is used, at `M` itself the last piece.
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0, "potential evaluated at negative x = {x}");
        let m = self.support_end();
        if x > m {
            return 0.0;
        }
        let i = self
            .breakpoints
            .partition_point(|&b| b <= x)
            .saturating_sub(1)
            .min(self.coeffs.len() - 1);
        horner(&self.coeffs[i], x)
    }

    /// True when every piece is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|&v| v == 0.0))
    }
}
