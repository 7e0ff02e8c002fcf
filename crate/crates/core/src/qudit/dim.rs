use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest supported qudit dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported qudit dimension.
pub const MAX_DIM: usize = 16;

/// Dimension `d` shared by every qudit in a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dim(usize);

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        if (MIN_DIM..=MAX_DIM).contains(&d) {
            Ok(Dim(d))
        } else {
            Err(Error::InvalidDimension(d))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `d^n`, the number of basis states of an `n`-wire register.
    pub fn pow(self, n: usize) -> usize {
        self.0.pow(n as u32)
    }

    /// True when every gate in the set is its own adjoint.
    pub fn is_qubit(self) -> bool {
        self.0 == 2
    }

    /// `k mod d`, always non-negative.
    pub fn reduce(self, k: i64) -> usize {
        k.rem_euclid(self.0 as i64) as usize
    }

    pub fn check_digit(self, digit: usize) -> Result<usize> {
        if digit < self.0 {
            Ok(digit)
        } else {
            Err(Error::DigitOutOfRange { digit, dim: self.0 })
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Dim::new(d)
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `e^{2πi (k mod d)/d}`.
///
/// The angle is formed from the reduced residue so that equal residues give
/// bit-identical values, and the quarter turns (`1`, `i`, `-1`, `-i`) are
/// returned exactly.
pub fn root_of_unity(dim: Dim, k: i64) -> Complex64 {
    let d = dim.get();
    let r = dim.reduce(k);
    // Exact quarter turns; sin/cos of π/2 multiples are off by an ulp.
    if (4 * r).is_multiple_of(d) {
        return match 4 * r / d {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * (r as f64) / (d as f64);
    Complex64::new(theta.cos(), theta.sin())
}
