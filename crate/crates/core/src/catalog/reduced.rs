//! Quantities that depend on the phase point only through (H, L2, L3):
//! the product polynomials P1, P2, the constants D1, D2, and their closed
//! form partial derivatives.
//!
//! Every function takes jets so the same code yields both catalog jets and
//! plain scalars (pass constant jets).

use crate::error::Result;
use crate::numeric::Jet;
use crate::systems::{SystemKind, SystemParams};

use super::blocks::q_of;

fn sign(e: u32) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// d/dx of f^a where f' is given.
fn dpow(f: Jet, a: u32, df: Jet) -> Result<Jet> {
    if a == 0 {
        return Ok(Jet::real(0.0));
    }
    Ok(f.powi(a - 1)? * df * a as f64)
}

/// W = (β - γ - L3)² - 4γL3.
pub fn w_of(l3: Jet, p: &SystemParams) -> Jet {
    (p.beta - p.gamma - l3).sq() - 4.0 * p.gamma * l3
}

fn dw_dl3(l3: Jet, p: &SystemParams) -> Jet {
    -2.0 * (p.beta - p.gamma - l3) - 4.0 * p.gamma
}

pub fn q(l2: Jet, l3: Jet, p: &SystemParams) -> Jet {
    q_of(l2, l3, p.d())
}

fn dq_dl2(l2: Jet, l3: Jet, d: f64) -> Jet {
    -2.0 * (l3 - l2 - d) - 4.0 * d
}

fn dq_dl3(l2: Jet, l3: Jet, d: f64) -> Jet {
    2.0 * (l3 - l2 - d)
}

/// α² + 4HL2.
fn s1sq(h: Jet, l2: Jet, p: &SystemParams) -> Jet {
    p.alpha * p.alpha + 4.0 * h * l2
}

fn exps(p: &SystemParams) -> (u32, u32, u32, u32) {
    (p.k1.p(), p.k1.q(), p.k2.p(), p.k2.q())
}

pub fn p1(h: Jet, l2: Jet, l3: Jet, p: &SystemParams) -> Result<Jet> {
    let (p1, q1, _, _) = exps(p);
    match p.system {
        SystemKind::Kc3 => Ok((l2 - l3).powi(q1)? * s1sq(h, l2, p).powi(p1)?),
        _ => Ok(q(l2, l3, p).powi(q1)? * s1sq(h, l2, p).powi(2 * p1)?),
    }
}

pub fn p2(l2: Jet, l3: Jet, p: &SystemParams) -> Result<Jet> {
    let (p1, q1, p2, q2) = exps(p);
    let w = w_of(l3, p).powi(p1 * q2)?;
    match p.system {
        SystemKind::Kc3 => Ok((l2 - l3).powi(2 * p2 * q1)? * w),
        _ => Ok(w * q(l2, l3, p).powi(p2 * q1)?),
    }
}

/// ∂P1/∂L2 with H and L3 held fixed.
pub fn dp1_dl2(h: Jet, l2: Jet, l3: Jet, p: &SystemParams) -> Result<Jet> {
    let (p1, q1, _, _) = exps(p);
    let s = s1sq(h, l2, p);
    let ds = 4.0 * h;
    match p.system {
        SystemKind::Kc3 => {
            let f = l2 - l3;
            Ok(dpow(f, q1, Jet::real(1.0))? * s.powi(p1)? + f.powi(q1)? * dpow(s, p1, ds)?)
        }
        _ => {
            let f = q(l2, l3, p);
            let df = dq_dl2(l2, l3, p.d());
            Ok(dpow(f, q1, df)? * s.powi(2 * p1)? + f.powi(q1)? * dpow(s, 2 * p1, ds)?)
        }
    }
}

/// ∂P2/∂L3 with L2 held fixed.
pub fn dp2_dl3(l2: Jet, l3: Jet, p: &SystemParams) -> Result<Jet> {
    let (p1, q1, p2, q2) = exps(p);
    let w = w_of(l3, p);
    let dw = dw_dl3(l3, p);
    let (f, df, e) = match p.system {
        SystemKind::Kc3 => (l2 - l3, Jet::real(-1.0), 2 * p2 * q1),
        _ => (q(l2, l3, p), dq_dl3(l2, l3, p.d()), p2 * q1),
    };
    Ok(dpow(w, p1 * q2, dw)? * f.powi(e)? + w.powi(p1 * q2)? * dpow(f, e, df)?)
}

/// D1 = 2(-1)^((q1-1)/2) (δ - L3)^q1 α^(2p1). Four-parameter system only.
pub fn d1(l3: Jet, p: &SystemParams) -> Result<Jet> {
    let (p1, q1, _, _) = exps(p);
    let c = 2.0 * sign((q1 - 1) / 2) * p.alpha.powi(2 * p1 as i32);
    Ok((p.d() - l3).powi(q1)? * c)
}

pub fn dd1_dl3(l3: Jet, p: &SystemParams) -> Result<Jet> {
    let (p1, q1, _, _) = exps(p);
    let c = 2.0 * sign((q1 - 1) / 2) * p.alpha.powi(2 * p1 as i32);
    Ok(dpow(p.d() - l3, q1, Jet::real(-1.0))? * c)
}

fn d2_parts(l2: Jet, p: &SystemParams) -> (f64, Jet, u32) {
    let (p1, q1, p2, q2) = exps(p);
    let gb = (p.gamma - p.beta).powi((p1 * q2) as i32);
    match p.system {
        SystemKind::Kc3 => (2.0 * sign((p1 * q2 + p2 * q1) / 2 + 1) * gb, l2, p2 * q1),
        _ => (2.0 * sign((p1 * q2).div_ceil(2)) * gb, l2 - p.d(), p2 * q1),
    }
}

pub fn d2(l2: Jet, p: &SystemParams) -> Result<Jet> {
    let (c, base, e) = d2_parts(l2, p);
    Ok(base.powi(e)? * c)
}

pub fn dd2_dl2(l2: Jet, p: &SystemParams) -> Result<Jet> {
    let (c, base, e) = d2_parts(l2, p);
    Ok(dpow(base, e, Jet::real(1.0))? * c)
}

/// Scalar view of the reduced functions at fixed (H, L2, L3).
#[derive(Clone, Copy, Debug)]
pub struct Reduced {
    pub h: f64,
    pub l2: f64,
    pub l3: f64,
}

impl Reduced {
    fn j(&self) -> (Jet, Jet, Jet) {
        (Jet::real(self.h), Jet::real(self.l2), Jet::real(self.l3))
    }

    pub fn p1(&self, p: &SystemParams) -> Result<f64> {
        let (h, l2, l3) = self.j();
        Ok(p1(h, l2, l3, p)?.re())
    }

    pub fn p2(&self, p: &SystemParams) -> Result<f64> {
        let (_, l2, l3) = self.j();
        Ok(p2(l2, l3, p)?.re())
    }

    pub fn dp1_dl2(&self, p: &SystemParams) -> Result<f64> {
        let (h, l2, l3) = self.j();
        Ok(dp1_dl2(h, l2, l3, p)?.re())
    }

    pub fn dp2_dl3(&self, p: &SystemParams) -> Result<f64> {
        let (_, l2, l3) = self.j();
        Ok(dp2_dl3(l2, l3, p)?.re())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::RationalK;

    fn rk(s: &str) -> RationalK {
        s.parse().unwrap()
    }

    #[test]
    fn p1_vanishes_on_l2_eq_l3_for_three_parameters() {
        let p = SystemParams::kc3(1.0, 2.0, 3.0, rk("1/3"), rk("5/3"));
        let r = Reduced {
            h: 0.7,
            l2: 2.5,
            l3: 2.5,
        };
        assert_eq!(r.p1(&p).unwrap(), 0.0);
    }

    #[test]
    fn d2_sign_pattern() {
        // k = 1: D2 = 2(-1)^2 L2 (γ-β) for three parameters.
        let p = SystemParams::kc3(1.0, 2.0, 3.0, RationalK::ONE, RationalK::ONE);
        assert_eq!(d2(Jet::real(5.0), &p).unwrap().re(), 10.0);
        // four parameters: 2(-1)^1 (γ-β)(L2-δ).
        let p = SystemParams::kc4(1.0, 2.0, 3.0, 4.0, RationalK::ONE, RationalK::ONE);
        assert_eq!(d2(Jet::real(5.0), &p).unwrap().re(), -2.0);
        assert_eq!(d1(Jet::real(1.0), &p).unwrap().re(), 6.0);
    }
}
