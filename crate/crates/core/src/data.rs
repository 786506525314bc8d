//! Observed data and the order-constraint boundary.

use std::fmt;

use crate::error::{Error, Result};

/// `y` successes out of `n` Bernoulli trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinomialData {
    n: u64,
    y: u64,
}

impl BinomialData {
    pub fn new(n: u64, y: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroTrials);
        }
        if y > n {
            return Err(Error::SuccessesExceedTrials { n, y });
        }
        Ok(BinomialData { n, y })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn failures(&self) -> u64 {
        self.n - self.y
    }

    /// Every data set of size `n`, in ascending `y`.
    pub fn sample_space(n: u64) -> Result<impl Iterator<Item = BinomialData>> {
        if n == 0 {
            return Err(Error::ZeroTrials);
        }
        Ok((0..=n).map(move |y| BinomialData { n, y }))
    }
}

impl fmt::Display for BinomialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.y, self.n)
    }
}

/// Cutpoint `z` of the constrained model `θ ≤ z`, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Boundary(f64);

impl Boundary {
    pub fn new(z: f64) -> Result<Self> {
        if z > 0.0 && z < 1.0 {
            Ok(Boundary(z))
        } else {
            Err(Error::BoundaryOutOfRange(z))
        }
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.0
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z = {}", self.0)
    }
}

/// Prior on θ shared (up to truncation) by both models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorFamily {
    /// Beta(1, 1).
    Uniform,
    /// Beta(½, ½), the Jeffreys prior for a binomial rate.
    Jeffreys,
}

impl PriorFamily {
    /// Beta shapes of the prior.
    pub fn shapes(self) -> (f64, f64) {
        match self {
            PriorFamily::Uniform => (1.0, 1.0),
            PriorFamily::Jeffreys => (0.5, 0.5),
        }
    }
}
