//! Sparse polynomials in (H, L2, L3, K0) with numeric coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub const VARS: [&str; 4] = ["H", "L2", "L3", "K0"];

pub type Exps = [u32; 4];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    pub terms: BTreeMap<Exps, f64>,
}

/// One monomial of a polynomial, in report form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialCoeff {
    pub monomial: String,
    pub exponents: Exps,
    pub coefficient: f64,
}

pub fn monomial_name(e: &Exps) -> String {
    let parts: Vec<String> = VARS
        .iter()
        .zip(e)
        .filter(|(_, &k)| k > 0)
        .map(|(v, &k)| {
            if k == 1 {
                v.to_string()
            } else {
                format!("{v}^{k}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// All exponent vectors of total degree at most `deg`, in lexicographic order.
pub fn monomials(deg: u32) -> Vec<Exps> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            for c in 0..=deg - a - b {
                for d in 0..=deg - a - b - c {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

pub fn eval_monomial(e: &Exps, x: &[f64; 4]) -> f64 {
    e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product()
}

impl Poly {
    pub fn constant(c: f64) -> Self {
        Self::mono(c, [0, 0, 0, 0])
    }

    pub fn mono(c: f64, e: Exps) -> Self {
        let mut p = Poly::default();
        p.add_term(e, c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::mono(1.0, e)
    }

    pub fn add_term(&mut self, e: Exps, c: f64) {
        if c == 0.0 {
            return;
        }
        let v = self.terms.entry(e).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Poly::default();
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn coeff(&self, e: &Exps) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * eval_monomial(e, x))
            .sum()
    }

    /// Sum of |c m(x)| over the terms; the size rounding is judged against.
    pub fn magnitude(&self, x: &[f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| (c * eval_monomial(e, x)).abs())
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops coefficients below `floor` in absolute value.
    pub fn pruned(&self, floor: f64) -> Self {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            if c.abs() > floor {
                out.add_term(*e, *c);
            }
        }
        out
    }

    pub fn table(&self) -> Vec<MonomialCoeff> {
        self.terms
            .iter()
            .map(|(e, c)| MonomialCoeff {
                monomial: monomial_name(e),
                exponents: *e,
                coefficient: *c,
            })
            .collect()
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Add<f64> for Poly {
    type Output = Poly;
    fn add(self, c: f64) -> Poly {
        &self + &Poly::constant(c)
    }
}

impl Mul<Poly> for f64 {
    type Output = Poly;
    fn mul(self, p: Poly) -> Poly {
        p.scale(self)
    }
}
