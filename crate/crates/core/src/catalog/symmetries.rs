//! Raising/lowering symmetries and the polynomial constants built from them.

use crate::error::Result;
use crate::numeric::{Jet, I};
use crate::systems::{CoreJets, SystemKind, SystemParams};

use super::blocks::BlockValues;
use super::reduced;

#[derive(Clone, Copy, Debug)]
pub struct SymmetrySet {
    pub j_plus: Jet,
    pub j_minus: Jet,
    pub k_plus: Jet,
    pub k_minus: Jet,
    pub j1: Jet,
    pub j2: Jet,
    pub k1: Jet,
    pub k2: Jet,
    /// Four-parameter system only.
    pub d1: Option<Jet>,
    pub d2: Jet,
    /// Four-parameter system only: the analogous construction fails for
    /// the three-parameter J2.
    pub j0: Option<Jet>,
    pub k0: Jet,
    pub p1: Jet,
    pub p2: Jet,
    /// Four-parameter system only.
    pub q: Option<Jet>,
    /// J+ / (U1^q1 S1^e), e = p1 or 2p1. None where the denominator
    /// vanishes.
    pub j_ratio: Option<Jet>,
    /// K+ / (U2^(p1 q2) S2^(p2 q1)).
    pub k_ratio: Option<Jet>,
}

/// Size of the summands behind each polynomial constant, for residual
/// scaling. J1 and friends are sums of two conjugate terms that can be far
/// larger than the sum.
#[derive(Clone, Copy, Debug)]
pub struct SymmetryMagnitudes {
    pub j1: f64,
    pub j2: f64,
    pub k1: f64,
    pub k2: f64,
    pub j0: f64,
    pub k0: f64,
    pub p1: f64,
    pub p2: f64,
}

pub(crate) fn symmetries_from(
    b: &BlockValues,
    core: &CoreJets,
    p: &SystemParams,
    strict: bool,
) -> Result<SymmetrySet> {
    p.require_odd()?;
    let (p1, q1, p2, q2) = (p.k1.p(), p.k1.q(), p.k2.p(), p.k2.q());
    let CoreJets { h, l2, l3 } = *core;
    let ey = match p.system {
        SystemKind::Kc3 => p1,
        _ => 2 * p1,
    };
    let j_plus = b.x1.powi(q1)? * b.y1_bar.powi(ey)?;
    let j_minus = b.x1_bar.powi(q1)? * b.y1.powi(ey)?;
    let k_plus = b.x2.powi(p1 * q2)? * b.y2_bar.powi(p2 * q1)?;
    let k_minus = b.x2_bar.powi(p1 * q2)? * b.y2.powi(p2 * q1)?;
    let minus_i = -I;
    let j1 = (j_minus + j_plus).try_div(b.sqrt_l2)?;
    let j2 = (j_minus - j_plus).scale(minus_i);
    let (k1, k2) = match p.system {
        SystemKind::Kc3 => (
            (k_minus - k_plus).scale(minus_i).try_div(b.sqrt_l3)?,
            k_minus + k_plus,
        ),
        _ => (
            (k_minus + k_plus).try_div(b.sqrt_l3)?,
            (k_minus - k_plus).scale(minus_i),
        ),
    };
    let d2 = reduced::d2(l2, p)?;
    let k0 = (k2 - d2).try_div(l3)?;
    let (d1, j0, q) = if p.system == SystemKind::Kc4 {
        let d1 = reduced::d1(l3, p)?;
        (
            Some(d1),
            Some((j2 - d1).try_div(l2)?),
            Some(reduced::q(l2, l3, p)),
        )
    } else {
        (None, None, None)
    };
    let j_ratio = j_plus
        .try_div(b.u1.powi(q1)? * b.s1.powi(ey)?)
        .ok()
        .filter(Jet::is_finite);
    let k_ratio = k_plus
        .try_div(b.u2.powi(p1 * q2)? * b.s2.powi(p2 * q1)?)
        .ok()
        .filter(Jet::is_finite);
    let out = SymmetrySet {
        j_plus,
        j_minus,
        k_plus,
        k_minus,
        j1,
        j2,
        k1,
        k2,
        d1,
        d2,
        j0,
        k0,
        p1: reduced::p1(h, l2, l3, p)?,
        p2: reduced::p2(l2, l3, p)?,
        q,
        j_ratio,
        k_ratio,
    };
    if !strict {
        return Ok(out);
    }
    for j in [
        out.j_plus,
        out.j_minus,
        out.k_plus,
        out.k_minus,
        out.k0,
        out.p1,
        out.p2,
    ] {
        j.check_finite("symmetry")?;
    }
    Ok(out)
}

impl SymmetrySet {
    pub fn magnitudes(&self, b: &BlockValues, core: &CoreJets) -> SymmetryMagnitudes {
        let jp = self.j_plus.value.norm() + self.j_minus.value.norm();
        let kp = self.k_plus.value.norm() + self.k_minus.value.norm();
        let sl2 = b.sqrt_l2.value.norm();
        let sl3 = b.sqrt_l3.value.norm();
        let d1 = self.d1.map_or(0.0, |d| d.value.norm());
        SymmetryMagnitudes {
            j1: jp / sl2,
            j2: jp,
            k1: kp / sl3,
            k2: kp,
            j0: (jp + d1) / core.l2.value.norm(),
            k0: (kp + self.d2.value.norm()) / core.l3.value.norm(),
            p1: self.j_plus.value.norm() * self.j_minus.value.norm(),
            p2: self.k_plus.value.norm() * self.k_minus.value.norm(),
        }
    }
}
