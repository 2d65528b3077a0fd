//! The sinh/cosh block functions in exponential form.

use crate::error::{Error, Result};
use crate::numeric::{Jet, I};
use crate::systems::{CoreJets, SystemKind, SystemParams};

/// Smallest |sin| or |cos| of a singular angle factor accepted when
/// evaluating catalog formulas. The sampler uses the stricter
/// [`crate::sampler::ANGLE_FLOOR`].
pub const EVAL_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
pub struct BlockValues {
    pub x1: Jet,
    pub x1_bar: Jet,
    pub x2: Jet,
    pub x2_bar: Jet,
    pub y1: Jet,
    pub y1_bar: Jet,
    pub y2: Jet,
    pub y2_bar: Jet,
    pub u1: Jet,
    pub u2: Jet,
    pub s1: Jet,
    pub s2: Jet,
    /// √L2 and √L3, positive on admissible real points.
    pub sqrt_l2: Jet,
    pub sqrt_l3: Jet,
}

fn im(j: Jet) -> Jet {
    j.scale(I)
}

pub(crate) fn positive_sqrt(j: Jet, name: &'static str) -> Result<Jet> {
    let v = j.value;
    if v.re <= 0.0 || v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(Error::NegativeSqrtArgument { name, value: v.re });
    }
    j.sqrt()
}

/// Square root that tolerates an exactly zero argument: the value is 0 and
/// the gradient is NaN, so any later use of the derivative is caught by
/// the finiteness checks while the value itself stays usable.
fn root_or_zero(j: Jet) -> Result<Jet> {
    if j.value.norm() == 0.0 {
        let nan = crate::numeric::C64::new(f64::NAN, f64::NAN);
        return Ok(Jet {
            value: j.value,
            grad: [nan; 6],
        });
    }
    j.sqrt()
}

fn check_floor(what: &str, v: f64) -> Result<()> {
    if v.abs() < EVAL_FLOOR {
        Err(Error::InadmissiblePoint(format!(
            "|{what}| = {:.3e} below floor",
            v.abs()
        )))
    } else {
        Ok(())
    }
}

/// Block jets from spherical jets `v` and the matching core jets.
pub(crate) fn blocks_from(v: &[Jet; 6], core: &CoreJets, p: &SystemParams) -> Result<BlockValues> {
    let (a, b, g, d) = (p.alpha, p.beta, p.gamma, p.d());
    let c1 = v[1] * p.k1.value();
    let c2 = v[2] * p.k2.value();
    check_floor("sin(k1 th1)", c1.value.re.sin())?;
    check_floor("sin(k2 th2)", c2.value.re.sin())?;
    check_floor("cos(k2 th2)", c2.value.re.cos())?;
    if p.system == SystemKind::Kc4 {
        check_floor("cos(k1 th1)", c1.value.re.cos())?;
    }
    let (r, pr, pt1, pt2) = (v[0], v[3], v[4], v[5]);
    let CoreJets { h, l2, l3 } = *core;
    let sl2 = positive_sqrt(l2, "L2")?;
    let sl3 = positive_sqrt(l3, "L3")?;

    let x2_re = -(sl3 * (c2 * 2.0).sin() * pt2);
    let x2_im = l3 * (c2 * 2.0).cos() + (g - b);
    let y1_re = sl2 * pr * 2.0;
    let y1_im = a + l2.try_div(r)? * 2.0;
    let cot1 = c1.cot()?;
    let w = (b - g - l3).sq() - 4.0 * g * l3;
    let s1 = root_or_zero(a * a + 4.0 * h * l2)?;
    let u2 = root_or_zero(w)?;

    let (x1_re, x1_im, y2_re, y2_im, u1, s2) = match p.system {
        SystemKind::Kc3 => {
            let csc1 = c1.csc()?;
            (
                c1.sin() * pt1,
                -(sl2 * c1.cos()),
                -(sl3 * cot1 * pt1 * 2.0),
                l3 * csc1.sq() * 2.0 - l2 - l3,
                root_or_zero(l2 - l3)?,
                l3 - l2,
            )
        }
        SystemKind::Kc4 => {
            let q = q_of(l2, l3, d);
            let sq = root_or_zero(q)?;
            (
                sl2 * (c1 * 2.0).sin() * pt1,
                -(l2 * (c1 * 2.0).cos()) + (d - l3),
                -(l3 * cot1.sq() * 2.0) + (l2 - l3 - d),
                -(sl3 * cot1 * pt1 * 2.0),
                sq,
                sq,
            )
        }
        SystemKind::Osc => {
            return Err(Error::ChartMismatch(
                "no block functions for the oscillator".into(),
            ))
        }
    };
    let out = BlockValues {
        x1: x1_re + im(x1_im),
        x1_bar: x1_re - im(x1_im),
        x2: x2_re + im(x2_im),
        x2_bar: x2_re - im(x2_im),
        y1: y1_re - im(y1_im),
        y1_bar: y1_re + im(y1_im),
        y2: y2_re + im(y2_im),
        y2_bar: y2_re - im(y2_im),
        u1,
        u2,
        s1,
        s2,
        sqrt_l2: sl2,
        sqrt_l3: sl3,
    };
    for j in [out.x1, out.x2, out.y1, out.y2] {
        j.check_finite("block function")?;
    }
    Ok(out)
}

/// Q = (L3 - L2 - δ)² - 4δL2.
pub(crate) fn q_of(l2: Jet, l3: Jet, d: f64) -> Jet {
    (l3 - l2 - d).sq() - 4.0 * d * l2
}
