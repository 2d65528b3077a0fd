//! Named constants of motion and auxiliary quantities, evaluated as jets.

mod blocks;
mod euclid;
pub mod reduced;
mod symmetries;

use serde::Serialize;

pub use blocks::{BlockValues, EVAL_FLOOR};
pub use euclid::EuclideanExtras;
pub use symmetries::{SymmetryMagnitudes, SymmetrySet};

pub(crate) use euclid::display_form;

use crate::error::{Error, Result};
use crate::numeric::{lift, Jet, Term};
use crate::systems::{
    cartesian_core, check_chart, spherical_core, Chart, CoreJets, PhasePoint, SystemKind,
    SystemParams,
};

/// Which part of the catalog an observable lives in; decides applicability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Core,
    Block,
    Symmetry,
    /// Only in the four-parameter system.
    Symmetry4,
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conservation {
    Always,
    Never,
    /// M3 commutes with H only when δ = 0.
    WhenDeltaZero,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ObservableInfo {
    pub name: &'static str,
    pub family: Family,
    pub real: bool,
    pub conservation: Conservation,
}

const fn obs(
    name: &'static str,
    family: Family,
    real: bool,
    conservation: Conservation,
) -> ObservableInfo {
    ObservableInfo {
        name,
        family,
        real,
        conservation,
    }
}

use Conservation::{Always, Never, WhenDeltaZero};
use Family::{Block, Core, Euclidean, Symmetry, Symmetry4};

/// Every observable with its stable report name.
pub const OBSERVABLES: &[ObservableInfo] = &[
    obs("H", Core, true, Always),
    obs("L2", Core, true, Always),
    obs("L3", Core, true, Always),
    obs("X1", Block, false, Never),
    obs("X1_bar", Block, false, Never),
    obs("X2", Block, false, Never),
    obs("X2_bar", Block, false, Never),
    obs("Y1", Block, false, Never),
    obs("Y1_bar", Block, false, Never),
    obs("Y2", Block, false, Never),
    obs("Y2_bar", Block, false, Never),
    obs("U1", Block, false, Always),
    obs("U2", Block, false, Always),
    obs("S1", Block, false, Always),
    obs("S2", Block, false, Always),
    obs("J_plus", Symmetry, false, Always),
    obs("J_minus", Symmetry, false, Always),
    obs("K_plus", Symmetry, false, Always),
    obs("K_minus", Symmetry, false, Always),
    obs("J1", Symmetry, true, Always),
    obs("J2", Symmetry, true, Always),
    obs("K1", Symmetry, true, Always),
    obs("K2", Symmetry, true, Always),
    obs("D2", Symmetry, true, Always),
    obs("K0", Symmetry, true, Always),
    obs("P1", Symmetry, true, Always),
    obs("P2", Symmetry, true, Always),
    obs("J_ratio", Symmetry, false, Always),
    obs("K_ratio", Symmetry, false, Always),
    obs("D1", Symmetry4, true, Always),
    obs("J0", Symmetry4, true, Always),
    obs("Q", Symmetry4, true, Always),
    obs("I_xy", Euclidean, true, Always),
    obs("I_xz", Euclidean, true, Always),
    obs("I_yz", Euclidean, true, Always),
    obs("M1", Euclidean, true, Never),
    obs("M2", Euclidean, true, Never),
    obs("M3", Euclidean, true, WhenDeltaZero),
    obs("J0_prime", Euclidean, true, Always),
    obs("J0_dprime", Euclidean, true, Always),
    obs("L3_prime", Euclidean, true, Always),
    obs("K0_prime", Euclidean, true, Always),
    obs("S_closure", Euclidean, true, Always),
];

pub fn info(name: &str) -> Option<&'static ObservableInfo> {
    OBSERVABLES.iter().find(|o| o.name == name)
}

impl ObservableInfo {
    pub fn applicable(&self, p: &SystemParams) -> bool {
        match self.family {
            Core => true,
            Block => p.is_kc(),
            Symmetry => p.is_kc() && p.odd_indices(),
            Symmetry4 => p.system == SystemKind::Kc4 && p.odd_indices(),
            Euclidean => p.is_euclidean(),
        }
    }

    pub fn conserved(&self, p: &SystemParams) -> bool {
        match self.conservation {
            Always => true,
            Never => false,
            WhenDeltaZero => p.d() == 0.0,
        }
    }

    /// Claimed degree in the momenta for polynomial observables.
    pub fn degree_claim(&self, p: &SystemParams) -> Option<u32> {
        if !self.applicable(p) {
            return None;
        }
        let (p1, q1, p2, q2) = (p.k1.p(), p.k1.q(), p.k2.p(), p.k2.q());
        let kdeg = 2 * (p1 * q2 + p2 * q1);
        let jdeg = match p.system {
            SystemKind::Kc3 => q1 + 2 * p1,
            _ => 2 * q1 + 4 * p1,
        };
        Some(match self.name {
            "H" | "L2" | "L3" => 2,
            "J1" => jdeg - 1,
            "J2" => jdeg,
            "J0" => jdeg - 2,
            "K1" => kdeg - 1,
            "K2" => kdeg,
            "K0" => kdeg - 2,
            "I_xy" | "I_xz" | "I_yz" | "L3_prime" | "K0_prime" => 2,
            "J0_prime" | "J0_dprime" | "S_closure" => 4,
            _ => return None,
        })
    }
}

/// Names applicable to `p`, in registry order.
pub fn applicable_names(p: &SystemParams) -> Vec<&'static str> {
    OBSERVABLES
        .iter()
        .filter(|o| o.applicable(p))
        .map(|o| o.name)
        .collect()
}

/// Spherical and (where it exists) Cartesian jets of the point's own
/// chart variables.
pub(crate) fn phase_jets(x: &PhasePoint, p: &SystemParams) -> Result<([Jet; 6], Option<[Jet; 6]>)> {
    let v = lift(&x.to_array());
    match x.chart {
        Chart::Cartesian => Ok((spherical_from_cartesian(&v)?, Some(v))),
        Chart::SphericalKc if p.has_cartesian_form() => {
            Ok((v, Some(cartesian_from_spherical(&v)?)))
        }
        _ => Ok((v, None)),
    }
}

fn cartesian_from_spherical(v: &[Jet; 6]) -> Result<[Jet; 6]> {
    let [r, t1, t2, pr, pt1, pt2] = *v;
    let (s1, c1, s2, c2) = (t1.sin(), t1.cos(), t2.sin(), t2.cos());
    let er = [s1 * c2, s1 * s2, c1];
    let et = [c1 * c2, c1 * s2, -s1];
    let ep = [-s2, c2, Jet::real(0.0)];
    let a = pt1.try_div(r)?;
    let b = pt2.try_div(r * s1)?;
    let q: [Jet; 3] = std::array::from_fn(|k| r * er[k]);
    let m: [Jet; 3] = std::array::from_fn(|k| pr * er[k] + a * et[k] + b * ep[k]);
    Ok([q[0], q[1], q[2], m[0], m[1], m[2]])
}

fn spherical_from_cartesian(v: &[Jet; 6]) -> Result<[Jet; 6]> {
    let [x, y, z, px, py, pz] = *v;
    let rho2 = x.sq() + y.sq();
    let rho = rho2.sqrt()?;
    let r = (rho2 + z.sq()).sqrt()?;
    let t1 = Jet::atan2(rho, z)?;
    let t2 = Jet::atan2(y, x)?;
    let pr = (x * px + y * py + z * pz).try_div(r)?;
    let pt1 = (z * (x * px + y * py) - rho2 * pz).try_div(rho)?;
    let pt2 = x * py - y * px;
    Ok([r, t1, t2, pr, pt1, pt2])
}

/// Everything applicable at one point.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub params: SystemParams,
    pub point: PhasePoint,
    /// Spherical variables as jets of the point's chart.
    pub sph: [Jet; 6],
    /// Cartesian variables as jets of the point's chart (k1 = k2 = 1 only).
    pub cart: Option<[Jet; 6]>,
    pub core: CoreJets,
    pub blocks: Option<BlockValues>,
    pub syms: Option<SymmetrySet>,
    pub extras: Option<EuclideanExtras>,
}

impl Catalog {
    pub fn evaluate(x: &PhasePoint, p: &SystemParams) -> Result<Catalog> {
        Self::evaluate_with(x, p, true)
    }

    /// Like [`Catalog::evaluate`] but lets individual symmetries overflow.
    /// Callers must check finiteness of whatever they read. Used where the
    /// momenta are magnified far beyond the sampled range.
    pub fn evaluate_lenient(x: &PhasePoint, p: &SystemParams) -> Result<Catalog> {
        Self::evaluate_with(x, p, false)
    }

    fn evaluate_with(x: &PhasePoint, p: &SystemParams, strict: bool) -> Result<Catalog> {
        p.validate()?;
        check_chart(x, p)?;
        let (sph, cart) = phase_jets(x, p)?;
        let core = match (x.chart, cart) {
            (Chart::Cartesian, Some(c)) => cartesian_core(&c, p)?,
            _ => spherical_core(&sph, p)?,
        };
        for j in [&core.h, &core.l2, &core.l3] {
            j.check_finite("core Hamiltonian")?;
        }
        let mut out = Catalog {
            params: *p,
            point: *x,
            sph,
            cart,
            core,
            blocks: None,
            syms: None,
            extras: None,
        };
        if !p.is_kc() {
            return Ok(out);
        }
        let b = blocks::blocks_from(&sph, &core, p)?;
        out.blocks = Some(b);
        if !p.odd_indices() {
            return Ok(out);
        }
        let s = symmetries::symmetries_from(&b, &core, p, strict)?;
        out.syms = Some(s);
        if p.is_euclidean() {
            let c = cart.expect("Euclidean case has Cartesian jets");
            out.extras = Some(euclid::extras_from(&c, &core, &s, p)?);
        }
        Ok(out)
    }

    pub fn blocks(&self) -> Result<&BlockValues> {
        self.blocks
            .as_ref()
            .ok_or_else(|| Error::ChartMismatch("no block functions for this system".into()))
    }

    pub fn syms(&self) -> Result<&SymmetrySet> {
        self.syms.as_ref().ok_or_else(|| {
            let p = &self.params;
            Error::UnsupportedParity {
                p1: p.k1.p(),
                q1: p.k1.q(),
                p2: p.k2.p(),
                q2: p.k2.q(),
            }
        })
    }

    pub fn extras(&self) -> Result<&EuclideanExtras> {
        self.extras.as_ref().ok_or(Error::WrongK)
    }

    pub fn get(&self, name: &str) -> Option<Jet> {
        let b = self.blocks.as_ref();
        let s = self.syms.as_ref();
        let e = self.extras.as_ref();
        Some(match name {
            "H" => self.core.h,
            "L2" => self.core.l2,
            "L3" => self.core.l3,
            "X1" => b?.x1,
            "X1_bar" => b?.x1_bar,
            "X2" => b?.x2,
            "X2_bar" => b?.x2_bar,
            "Y1" => b?.y1,
            "Y1_bar" => b?.y1_bar,
            "Y2" => b?.y2,
            "Y2_bar" => b?.y2_bar,
            "U1" => b?.u1,
            "U2" => b?.u2,
            "S1" => b?.s1,
            "S2" => b?.s2,
            "J_plus" => s?.j_plus,
            "J_minus" => s?.j_minus,
            "K_plus" => s?.k_plus,
            "K_minus" => s?.k_minus,
            "J1" => s?.j1,
            "J2" => s?.j2,
            "K1" => s?.k1,
            "K2" => s?.k2,
            "D1" => s?.d1?,
            "D2" => s?.d2,
            "J0" => s?.j0?,
            "K0" => s?.k0,
            "P1" => s?.p1,
            "P2" => s?.p2,
            "Q" => s?.q?,
            "J_ratio" => s?.j_ratio?,
            "K_ratio" => s?.k_ratio?,
            "I_xy" => e?.i_xy,
            "I_xz" => e?.i_xz,
            "I_yz" => e?.i_yz,
            "M1" => e?.m1,
            "M2" => e?.m2,
            "M3" => e?.m3,
            "J0_prime" => e?.j0_prime,
            "J0_dprime" => e?.j0_dprime,
            "L3_prime" => e?.l3_prime,
            "K0_prime" => e?.k0_prime,
            "S_closure" => e?.s_closure,
            _ => return None,
        })
    }

    pub fn require(&self, name: &str) -> Result<Jet> {
        if info(name).is_none() {
            return Err(Error::UnknownObservable(name.to_string()));
        }
        self.get(name).ok_or_else(|| {
            Error::Config(format!(
                "observable '{name}' does not apply to these parameters"
            ))
        })
    }

    /// Value with the size of its summands, for residual scaling.
    pub fn term(&self, name: &str) -> Result<Term> {
        let j = self.require(name)?;
        let mag = match (self.syms.as_ref(), self.blocks.as_ref()) {
            (Some(s), Some(b)) => {
                let m = s.magnitudes(b, &self.core);
                match name {
                    "J1" => m.j1,
                    "J2" => m.j2,
                    "K1" => m.k1,
                    "K2" => m.k2,
                    "J0" => m.j0,
                    "K0" => m.k0,
                    "P1" => m.p1,
                    "P2" => m.p2,
                    _ => 0.0,
                }
            }
            _ => 0.0,
        };
        Ok(Term {
            value: j.value,
            mag: mag.max(j.value.norm()),
        })
    }
}

/// Block functions at a point of a KC system.
pub fn eval_blocks(x: &PhasePoint, p: &SystemParams) -> Result<BlockValues> {
    if !p.is_kc() {
        return Err(Error::ChartMismatch(
            "block functions need a Kepler-Coulomb system".into(),
        ));
    }
    p.validate()?;
    check_chart(x, p)?;
    let (sph, cart) = phase_jets(x, p)?;
    let core = match (x.chart, cart) {
        (Chart::Cartesian, Some(c)) => cartesian_core(&c, p)?,
        _ => spherical_core(&sph, p)?,
    };
    blocks::blocks_from(&sph, &core, p)
}

pub fn eval_symmetries(x: &PhasePoint, p: &SystemParams) -> Result<SymmetrySet> {
    p.require_odd()?;
    Ok(*Catalog::evaluate(x, p)?.syms()?)
}

pub fn eval_euclidean_extras(x: &PhasePoint, p: &SystemParams) -> Result<EuclideanExtras> {
    if !p.is_euclidean() {
        return Err(Error::WrongK);
    }
    Ok(*Catalog::evaluate(x, p)?.extras()?)
}
