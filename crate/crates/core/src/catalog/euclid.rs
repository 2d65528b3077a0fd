//! Extra constants of the Euclidean four-parameter case (k1 = k2 = 1).

use crate::error::Result;
use crate::numeric::{bracket, Jet, C64};
use crate::systems::{CoreJets, SystemParams};

use super::symmetries::SymmetrySet;

#[derive(Clone, Copy, Debug)]
pub struct EuclideanExtras {
    pub i_xy: Jet,
    pub i_xz: Jet,
    pub i_yz: Jet,
    pub m1: Jet,
    pub m2: Jet,
    pub m3: Jet,
    /// x p_x + y p_y + z p_z.
    pub dilation: Jet,
    pub j0_prime: Jet,
    /// 2α² - J0 - J0'.
    pub j0_dprime: Jet,
    pub l3_prime: Jet,
    pub k0_prime: Jet,
    /// ¼{L3', K0'}. A bracket of first-order jets, so only its value is kept.
    pub k1_prime: C64,
    pub s_closure: Jet,
}

/// The three "display" forms -16(M² + s D²/u²) + 8H(I + I' - Σ) + 2α² + 8sH
/// with the pairs (M3, δ, z), (M1, β, x), (M2, γ, y).
#[allow(clippy::too_many_arguments)]
pub(crate) fn display_form(
    m: Jet,
    s: f64,
    u: Jet,
    ia: Jet,
    ib: Jet,
    d: Jet,
    h: Jet,
    p: &SystemParams,
) -> Result<Jet> {
    let sigma = p.beta + p.gamma + p.d();
    let a2 = p.alpha * p.alpha;
    Ok(-16.0 * (m.sq() + s * d.sq().try_div(u.sq())?)
        + 8.0 * h * (ia + ib - sigma)
        + a2
        + a2
        + 8.0 * s * h)
}

pub(crate) fn extras_from(
    c: &[Jet; 6],
    core: &CoreJets,
    sym: &SymmetrySet,
    p: &SystemParams,
) -> Result<EuclideanExtras> {
    let [x, y, z, px, py, pz] = *c;
    let (a, b, g, d) = (p.alpha, p.beta, p.gamma, p.d());
    let (x2, y2, z2) = (x.sq(), y.sq(), z.sq());
    let r = (x2 + y2 + z2).sqrt()?;
    let i_xy = (x * py - y * px).sq() + b * (x2 + y2).try_div(x2)? + g * (x2 + y2).try_div(y2)?;
    let i_xz = (x * pz - z * px).sq() + b * (x2 + z2).try_div(x2)? + d * (x2 + z2).try_div(z2)?;
    let i_yz = (y * pz - z * py).sq() + g * (y2 + z2).try_div(y2)? + d * (y2 + z2).try_div(z2)?;
    let v = 0.5 * a * r.recip()? + b * x2.recip()? + g * y2.recip()? + d * z2.recip()?;
    let m3 = (y * pz - z * py) * py - (z * px - x * pz) * px - z * v;
    let m1 = (y * px - x * py) * py - (x * pz - z * px) * pz - x * v;
    let m2 = (z * py - y * pz) * pz - (y * px - x * py) * px - y * v;
    let dil = x * px + y * py + z * pz;
    let h = core.h;
    let j0_prime = display_form(m1, b, x, i_xy, i_xz, dil, h, p)?;
    let j0 = sym.j0.expect("four-parameter system has J0");
    let a2 = a * a;
    let j0_dprime = 2.0 * a2 - j0 - j0_prime;
    let sigma = b + g + d;
    let (l2, l3, k0) = (core.l2, core.l3, sym.k0);
    let l3_prime = 0.25 * k0 + 0.5 * l2 - 0.5 * l3 + 0.5 * sigma;
    let k0_prime = 0.5 * k0 - l2 + 3.0 * l3 - sigma;
    let s_closure = 2.0 * a2 - j0 - 2.0 * j0_prime;
    let out = EuclideanExtras {
        i_xy,
        i_xz,
        i_yz,
        m1,
        m2,
        m3,
        dilation: dil,
        j0_prime,
        j0_dprime,
        l3_prime,
        k0_prime,
        k1_prime: 0.25 * bracket(&l3_prime, &k0_prime),
        s_closure,
    };
    for j in [i_xy, i_xz, i_yz, m1, m2, m3, j0_prime] {
        j.check_finite("Euclidean extra")?;
    }
    Ok(out)
}
