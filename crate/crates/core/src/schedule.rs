//! The `a * n^b * (ln n + 1)^c` function family used for sample counts `N(n)`
//! and error levels `eps(n)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PowerLaw {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "power law needs a > 0 and finite exponents, got a={a}, b={b}, c={c}"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn constant(a: f64) -> Result<Self> {
        Self::new(a, 0.0, 0.0)
    }

    /// Value at `n` (taken as at least 1).
    #[inline]
    pub fn eval(&self, n: usize) -> f64 {
        let x = n.max(1) as f64;
        self.a * x.powf(self.b) * (x.ln() + 1.0).powf(self.c)
    }

    /// `max(1, ceil(eval(n)))`, the integer form used for sample counts.
    pub fn eval_count(&self, n: usize) -> usize {
        let v = self.eval(n).ceil();
        if v >= usize::MAX as f64 {
            usize::MAX
        } else {
            (v as usize).max(1)
        }
    }
}

impl fmt::Display for PowerLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.a)?;
        if self.b != 0.0 {
            write!(f, "*n^{}", self.b)?;
        }
        if self.c != 0.0 {
            write!(f, "*L^{}", self.c)?;
        }
        Ok(())
    }
}
