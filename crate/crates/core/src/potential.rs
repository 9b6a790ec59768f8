//! Double-well energy density `F` and its derivative.
//!
//! The default well is `F(c) = (c^2 - 1)^2 / 4` with minimisers `+-1` on the
//! admissible interval `[-2, 2]`. Outside the interval `F` is continued with
//! constant curvature equal to its value at the nearer endpoint, so `F'` is
//! globally Lipschitz with the same constant as on `[f1, f2]`.

use crate::error::{Error, Result};

/// Anything the solver and the diagnostics need from an energy density.
pub trait Potential {
    fn value(&self, c: f64) -> f64;
    fn derivative(&self, c: f64) -> f64;
    /// Lipschitz constant of the derivative.
    fn lipschitz(&self) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WellKind {
    Quartic,
}

impl WellKind {
    pub fn name(&self) -> &'static str {
        match self {
            WellKind::Quartic => "quartic",
        }
    }
}

impl std::str::FromStr for WellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quartic" => Ok(WellKind::Quartic),
            other => Err(Error::InvalidPotential(format!("unknown potential kind {other:?}"))),
        }
    }
}

/// `max |3c^2 - 1|` over `[f1, f2]`: the Lipschitz constant of the quartic
/// derivative on that interval.
pub fn quartic_lipschitz_on(f1: f64, f2: f64) -> f64 {
    let curvature = |c: f64| 3.0 * c * c - 1.0;
    let mut l = curvature(f1).abs().max(curvature(f2).abs());
    if f1 <= 0.0 && 0.0 <= f2 {
        l = l.max(1.0);
    }
    l
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleWell {
    kind: WellKind,
    f1: f64,
    f2: f64,
    y1: f64,
    y2: f64,
    lipschitz: f64,
}

impl Default for DoubleWell {
    fn default() -> Self {
        DoubleWell::quartic(-2.0, 2.0).expect("default interval is admissible")
    }
}

impl DoubleWell {
    /// Quartic well on the interval `[f1, f2]`, which must strictly contain
    /// both minimisers.
    pub fn quartic(f1: f64, f2: f64) -> Result<Self> {
        let (y1, y2) = (-1.0, 1.0);
        if !(f1.is_finite() && f2.is_finite() && f1 < y1 && y2 < f2) {
            return Err(Error::InvalidPotential(format!(
                "interval [{f1}, {f2}] must satisfy f1 < {y1} < {y2} < f2"
            )));
        }
        let lipschitz = quartic_lipschitz_on(f1, f2);
        Ok(DoubleWell {
            kind: WellKind::Quartic,
            f1,
            f2,
            y1,
            y2,
            lipschitz,
        })
    }

    pub fn kind(&self) -> WellKind {
        self.kind
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.f1, self.f2)
    }

    pub fn minimizers(&self) -> (f64, f64) {
        (self.y1, self.y2)
    }

    fn quartic_parts(c: f64) -> (f64, f64, f64) {
        let c2 = c * c;
        (0.25 * (c2 - 1.0) * (c2 - 1.0), c * c2 - c, 3.0 * c2 - 1.0)
    }

    pub fn eval_f(&self, c: f64) -> f64 {
        let edge = if c < self.f1 {
            self.f1
        } else if c > self.f2 {
            self.f2
        } else {
            return Self::quartic_parts(c).0;
        };
        let (f, df, ddf) = Self::quartic_parts(edge);
        let d = c - edge;
        f + df * d + 0.5 * ddf * d * d
    }

    pub fn eval_fprime(&self, c: f64) -> f64 {
        let edge = if c < self.f1 {
            self.f1
        } else if c > self.f2 {
            self.f2
        } else {
            return Self::quartic_parts(c).1;
        };
        let (_, df, ddf) = Self::quartic_parts(edge);
        df + ddf * (c - edge)
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.lipschitz
    }
}

impl Potential for DoubleWell {
    fn value(&self, c: f64) -> f64 {
        self.eval_f(c)
    }

    fn derivative(&self, c: f64) -> f64 {
        self.eval_fprime(c)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}
