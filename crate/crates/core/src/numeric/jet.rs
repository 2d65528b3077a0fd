//! Forward-mode multi-dual numbers over the six canonical phase variables.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Number of phase variables: (q1, q2, q3, p1, p2, p3).
pub const DIM: usize = 6;

/// Smallest divisor magnitude accepted by [`Jet::try_div`] and friends.
pub const DIV_FLOOR: f64 = 1e-14;

/// Relative width of the guard band around the negative real axis.
pub const BRANCH_GUARD: f64 = 1e-10;

/// Cap on integer exponents.
pub const MAX_POWER: u32 = 64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Complex value together with its six first partials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: C64,
    pub grad: [C64; DIM],
}

/// Elementary-function tags accepted by [`Jet::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Sqrt,
    Sin,
    Cos,
    Tan,
    Cot,
    Csc,
    Recip,
    Powi(u32),
}

/// Principal square root. Values with an exactly zero imaginary part are
/// treated as real so a signed zero cannot flip the branch.
pub fn principal_sqrt(z: C64) -> Result<C64> {
    if z.im == 0.0 {
        return Ok(if z.re >= 0.0 {
            C64::new(z.re.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-z.re).sqrt())
        });
    }
    if z.re < 0.0 && z.im.abs() <= BRANCH_GUARD * z.norm() {
        return Err(Error::BranchCutViolation { re: z.re, im: z.im });
    }
    Ok(z.sqrt())
}

fn ensure_divisor(v: C64) -> Result<()> {
    let m = v.norm();
    if m.is_nan() || m <= DIV_FLOOR {
        return Err(Error::DivisionNearZero(m));
    }
    Ok(())
}

impl Jet {
    pub const ZERO: Jet = Jet {
        value: C64 { re: 0.0, im: 0.0 },
        grad: [C64 { re: 0.0, im: 0.0 }; DIM],
    };

    pub fn constant(value: C64) -> Self {
        Jet {
            value,
            grad: [C64::new(0.0, 0.0); DIM],
        }
    }

    pub fn real(value: f64) -> Self {
        Self::constant(C64::new(value, 0.0))
    }

    /// Coordinate lift: value `v`, unit gradient along `index`.
    pub fn variable(v: f64, index: usize) -> Self {
        let mut j = Self::real(v);
        j.grad[index] = C64::new(1.0, 0.0);
        j
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }

    pub fn check_finite(self, what: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(what))
        }
    }

    /// Chain rule with outer value `f` and outer derivative `df`.
    fn chain(self, f: C64, df: C64) -> Jet {
        let mut grad = self.grad;
        for g in grad.iter_mut() {
            *g *= df;
        }
        Jet { value: f, grad }
    }

    pub fn scale(self, c: C64) -> Jet {
        self.chain(self.value * c, c)
    }

    pub fn sq(self) -> Jet {
        self * self
    }

    pub fn recip(self) -> Result<Jet> {
        ensure_divisor(self.value)?;
        let inv = self.value.inv();
        Ok(self.chain(inv, -inv * inv))
    }

    pub fn try_div(self, rhs: Jet) -> Result<Jet> {
        ensure_divisor(rhs.value)?;
        let q = self.value / rhs.value;
        let inv = rhs.value.inv();
        let mut grad = [C64::new(0.0, 0.0); DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = (self.grad[k] - q * rhs.grad[k]) * inv;
        }
        Ok(Jet { value: q, grad })
    }

    pub fn sqrt(self) -> Result<Jet> {
        let s = principal_sqrt(self.value)?;
        ensure_divisor(s)?;
        Ok(self.chain(s, (2.0 * s).inv()))
    }

    pub fn sin(self) -> Jet {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Jet {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn tan(self) -> Result<Jet> {
        let c = self.value.cos();
        ensure_divisor(c)?;
        let t = self.value.sin() / c;
        Ok(self.chain(t, (c * c).inv()))
    }

    pub fn cot(self) -> Result<Jet> {
        let s = self.value.sin();
        ensure_divisor(s)?;
        let ct = self.value.cos() / s;
        Ok(self.chain(ct, -(s * s).inv()))
    }

    pub fn csc(self) -> Result<Jet> {
        let s = self.value.sin();
        ensure_divisor(s)?;
        let cs = s.inv();
        Ok(self.chain(cs, -cs * self.value.cos() / s))
    }

    /// Two-argument arctangent of real-valued jets (imaginary parts are
    /// ignored in the value and carried through the derivative).
    pub fn atan2(y: Jet, x: Jet) -> Result<Jet> {
        let d = x.value * x.value + y.value * y.value;
        ensure_divisor(d)?;
        let mut grad = [C64::new(0.0, 0.0); DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = (x.value * y.grad[k] - y.value * x.grad[k]) / d;
        }
        Ok(Jet {
            value: C64::new(y.value.re.atan2(x.value.re), 0.0),
            grad,
        })
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Result<Jet> {
        if n > MAX_POWER {
            return Err(Error::ExponentTooLarge(n));
        }
        let mut acc = Jet::real(1.0);
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Ok(acc)
    }

    pub fn apply(self, f: Elementary) -> Result<Jet> {
        let out = match f {
            Elementary::Sqrt => self.sqrt()?,
            Elementary::Sin => self.sin(),
            Elementary::Cos => self.cos(),
            Elementary::Tan => self.tan()?,
            Elementary::Cot => self.cot()?,
            Elementary::Csc => self.csc()?,
            Elementary::Recip => self.recip()?,
            Elementary::Powi(n) => self.powi(n)?,
        };
        out.check_finite("elementary function")
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::real(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.value += rhs.value;
        for k in 0..DIM {
            self.grad[k] += rhs.grad[k];
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.value -= rhs.value;
        for k in 0..DIM {
            self.grad[k] -= rhs.grad[k];
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut grad = [C64::new(0.0, 0.0); DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.grad[k] * rhs.value + rhs.grad[k] * self.value;
        }
        Jet {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: C64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<C64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: C64) -> Jet {
        self.value += rhs;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> C64>(f: F, x: f64, h: f64) -> C64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn lift_and_product_rule() {
        let r = Jet::variable(2.0, 0);
        let pr = Jet::variable(1.0, 3);
        assert_eq!(r.grad[0], C64::new(1.0, 0.0));
        let prod = r * pr;
        assert_eq!(prod.value, C64::new(2.0, 0.0));
        let expect = [1.0, 0.0, 0.0, 2.0, 0.0, 0.0];
        for (g, e) in prod.grad.iter().zip(expect) {
            assert_eq!(*g, C64::new(e, 0.0));
        }
    }

    #[test]
    fn sqrt_of_lift() {
        let s = Jet::variable(2.0, 0).sqrt().unwrap();
        assert!((s.value.re - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.grad[0].re - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn sqrt_scaled_gradient() {
        let mut z = Jet::real(4.0);
        z.grad[0] = C64::new(2.0, 0.0);
        let s = z.sqrt().unwrap();
        assert_eq!(s.value, C64::new(2.0, 0.0));
        assert_eq!(s.grad[0], C64::new(0.5, 0.0));
    }

    #[test]
    fn sin_of_constant() {
        let s = Jet::real(std::f64::consts::FRAC_PI_2).sin();
        assert!((s.value.re - 1.0).abs() < 1e-16);
        assert!(s.grad.iter().all(|g| g.norm() == 0.0));
    }

    #[test]
    fn cot_matches_finite_difference() {
        let x = 0.7;
        let j = Jet::variable(x, 1).cot().unwrap();
        let d = fd(|t| C64::new(t.cos() / t.sin(), 0.0), x, 1e-6);
        assert!((j.grad[1] - d).norm() / d.norm() < 1e-8);
    }

    #[test]
    fn csc_and_tan_match_finite_difference() {
        let x = 1.1;
        let c = Jet::variable(x, 2).csc().unwrap();
        let dc = fd(|t| C64::new(1.0 / t.sin(), 0.0), x, 1e-6);
        assert!((c.grad[2] - dc).norm() / dc.norm() < 1e-8);
        let t = Jet::variable(x, 2).tan().unwrap();
        let dt = fd(|t| C64::new(t.tan(), 0.0), x, 1e-6);
        assert!((t.grad[2] - dt).norm() / dt.norm() < 1e-8);
    }

    #[test]
    fn negative_real_sqrt_is_upper_branch() {
        let s = principal_sqrt(C64::new(-4.0, -0.0)).unwrap();
        assert_eq!(s, C64::new(0.0, 2.0));
        assert!(matches!(
            principal_sqrt(C64::new(-4.0, 1e-14)),
            Err(Error::BranchCutViolation { .. })
        ));
    }

    #[test]
    fn division_floor() {
        assert!(matches!(
            Jet::real(1.0).try_div(Jet::real(0.0)),
            Err(Error::DivisionNearZero(_))
        ));
        assert!(Jet::real(0.0).recip().is_err());
    }

    #[test]
    fn power_cap_and_values() {
        let x = Jet::variable(1.1, 0);
        let p = x.powi(7).unwrap();
        assert!((p.value.re - 1.1f64.powi(7)).abs() < 1e-14);
        assert!((p.grad[0].re - 7.0 * 1.1f64.powi(6)).abs() < 1e-13);
        assert_eq!(x.powi(0).unwrap().value, C64::new(1.0, 0.0));
        assert!(matches!(x.powi(65), Err(Error::ExponentTooLarge(65))));
    }

    #[test]
    fn division_quotient_rule() {
        let a = Jet::variable(3.0, 0);
        let b = Jet::variable(2.0, 4);
        let q = a.try_div(b).unwrap();
        assert!((q.grad[0].re - 0.5).abs() < 1e-15);
        assert!((q.grad[4].re + 0.75).abs() < 1e-15);
    }
}
