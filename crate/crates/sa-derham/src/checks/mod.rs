//! Executable identity checks over seeded or fixed fixtures, each reporting a
//! measured value against a bound.

use std::fmt;

pub mod boundary;
pub mod bundles;
pub mod extension;
pub mod gluing;
pub mod logarithm;
pub mod poincare;
pub mod products;
pub mod stokes;

use crate::chain::Chain;
use crate::complex::{point, GeoComplex, OrientedSimplex, Simplex};
use crate::error::Result;
use crate::pa::PAForm;
use crate::rational::Q;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Equals(f64),
    Within { expected: f64, tolerance: f64 },
    /// Reported without a pass criterion.
    Recorded,
}

impl Bound {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Bound::AtMost(t) => value <= t,
            Bound::AtLeast(t) => value >= t,
            Bound::Equals(e) => value == e,
            Bound::Within { expected, tolerance } => (value - expected).abs() <= tolerance,
            Bound::Recorded => true,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<={t:e}"),
            Bound::AtLeast(t) => write!(f, ">={t}"),
            Bound::Equals(e) => write!(f, "={e}"),
            Bound::Within { expected, tolerance } => write!(f, "{expected}+-{tolerance:e}"),
            Bound::Recorded => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Check { name: name.into(), value, bound }
    }

    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Bound::AtMost(tolerance))
    }

    pub fn equals(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self::new(name, value, Bound::Equals(expected))
    }

    pub fn recorded(name: impl Into<String>, value: f64) -> Self {
        Self::new(name, value, Bound::Recorded)
    }

    pub fn pass(&self) -> bool {
        self.bound.holds(self.value)
    }
}

/// Largest `|⟨a, γ⟩ − ⟨b, γ⟩|` over the probes.
pub fn pairing_gap(a: &PAForm, b: &PAForm, probes: &[Chain]) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in probes {
        worst = worst.max((a.pair(g)? - b.pair(g)?).abs());
    }
    Ok(worst)
}

/// A point of `ℝⁿ` as a 0-chain on its own one-vertex complex.
pub fn point_chain(p: Vec<Q>) -> Chain {
    let k: Arc<GeoComplex> = point(p);
    Chain::simplex(&k, &OrientedSimplex::positive(Simplex::new(vec![0])))
}
