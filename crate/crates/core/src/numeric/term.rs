//! Values that remember how large their summands were.
//!
//! Identity sides are sums of products whose pieces can be twenty orders of
//! magnitude above the result. `mag` follows the same arithmetic with
//! absolute values, so rounding noise can be judged against it.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::jet::{Jet, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub value: C64,
    pub mag: f64,
}

impl Term {
    pub fn exact(value: C64) -> Self {
        Term {
            value,
            mag: value.norm(),
        }
    }

    pub fn real(v: f64) -> Self {
        Self::exact(C64::new(v, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn of(j: &Jet) -> Self {
        Self::exact(j.value)
    }

    /// Scale used for relative residuals: never below |value|.
    pub fn scale(&self) -> f64 {
        self.mag.max(self.value.norm())
    }

    pub fn powi(self, n: u32) -> Self {
        Term {
            value: self.value.powu(n),
            mag: self.mag.powi(n as i32),
        }
    }

    pub fn sq(self) -> Self {
        self * self
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.mag.is_finite()
    }
}

impl From<f64> for Term {
    fn from(v: f64) -> Self {
        Term::real(v)
    }
}

impl From<C64> for Term {
    fn from(v: C64) -> Self {
        Term::exact(v)
    }
}

impl Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        Term {
            value: self.value + rhs.value,
            mag: self.mag + rhs.mag,
        }
    }
}

impl Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        Term {
            value: self.value - rhs.value,
            mag: self.mag + rhs.mag,
        }
    }
}

impl Mul for Term {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term {
            value: self.value * rhs.value,
            mag: self.mag * rhs.mag,
        }
    }
}

impl Div for Term {
    type Output = Term;
    fn div(self, rhs: Term) -> Term {
        let d = rhs.value.norm();
        Term {
            value: self.value / rhs.value,
            mag: self.mag * rhs.mag / (d * d),
        }
    }
}

impl Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term {
            value: -self.value,
            mag: self.mag,
        }
    }
}

impl Mul<f64> for Term {
    type Output = Term;
    fn mul(self, c: f64) -> Term {
        Term {
            value: self.value * c,
            mag: self.mag * c.abs(),
        }
    }
}

impl Mul<Term> for f64 {
    type Output = Term;
    fn mul(self, t: Term) -> Term {
        t * self
    }
}

impl Mul<C64> for Term {
    type Output = Term;
    fn mul(self, c: C64) -> Term {
        Term {
            value: self.value * c,
            mag: self.mag * c.norm(),
        }
    }
}

impl Add<f64> for Term {
    type Output = Term;
    fn add(self, c: f64) -> Term {
        self + Term::real(c)
    }
}

impl Sub<f64> for Term {
    type Output = Term;
    fn sub(self, c: f64) -> Term {
        self - Term::real(c)
    }
}

impl Div<f64> for Term {
    type Output = Term;
    fn div(self, c: f64) -> Term {
        self * (1.0 / c)
    }
}

impl Add<Term> for f64 {
    type Output = Term;
    fn add(self, t: Term) -> Term {
        Term::real(self) + t
    }
}

impl Sub<Term> for f64 {
    type Output = Term;
    fn sub(self, t: Term) -> Term {
        Term::real(self) - t
    }
}
