//! Charts, parameters, the three Hamiltonian families and the Stäckel map.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{lift, Jet};

/// Positive rational p/q in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RationalK {
    p: u32,
    q: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RationalK {
    pub const ONE: RationalK = RationalK { p: 1, q: 1 };

    /// Reduces to lowest terms; zero numerator or denominator is rejected.
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Config(format!("k = {p}/{q} must be positive")));
        }
        let g = gcd(p, q);
        Ok(RationalK { p: p / g, q: q / g })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn is_odd_pair(&self) -> bool {
        self.p % 2 == 1 && self.q % 2 == 1
    }

    pub fn halve(&self) -> RationalK {
        RationalK::new(self.p, 2 * self.q).expect("positive")
    }
}

impl fmt::Display for RationalK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RationalK {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse '{s}' as p/q"));
        let (p, q) = match s.trim().split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let p: u32 = p.parse().map_err(|_| bad())?;
        let q: u32 = q.parse().map_err(|_| bad())?;
        RationalK::new(p, q)
    }
}

impl TryFrom<String> for RationalK {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RationalK> for String {
    fn from(k: RationalK) -> String {
        k.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// Three-parameter extended Kepler-Coulomb system.
    Kc3,
    /// Four-parameter extended Kepler-Coulomb system.
    Kc4,
    /// Caged isotropic oscillator.
    Osc,
}

impl FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kc3" => Ok(SystemKind::Kc3),
            "kc4" => Ok(SystemKind::Kc4),
            "osc" => Ok(SystemKind::Osc),
            _ => Err(Error::Config(format!("unknown system '{s}'"))),
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Kc3 => "kc3",
            SystemKind::Kc4 => "kc4",
            SystemKind::Osc => "osc",
        })
    }
}

/// Potential strengths and angular indices. For the oscillator the
/// strengths are the primed ones and `k1`, `k2` hold j1, j2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub system: SystemKind,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Absent for the three-parameter system.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    pub k1: RationalK,
    pub k2: RationalK,
}

impl SystemParams {
    pub fn kc3(alpha: f64, beta: f64, gamma: f64, k1: RationalK, k2: RationalK) -> Self {
        SystemParams {
            system: SystemKind::Kc3,
            alpha,
            beta,
            gamma,
            delta: None,
            k1,
            k2,
        }
    }

    pub fn kc4(
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        k1: RationalK,
        k2: RationalK,
    ) -> Self {
        SystemParams {
            system: SystemKind::Kc4,
            alpha,
            beta,
            gamma,
            delta: Some(delta),
            k1,
            k2,
        }
    }

    pub fn osc(
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        j1: RationalK,
        j2: RationalK,
    ) -> Self {
        SystemParams {
            system: SystemKind::Osc,
            alpha,
            beta,
            gamma,
            delta: Some(delta),
            k1: j1,
            k2: j2,
        }
    }

    /// δ, reading an absent value as zero.
    pub fn d(&self) -> f64 {
        self.delta.unwrap_or(0.0)
    }

    pub fn is_kc(&self) -> bool {
        matches!(self.system, SystemKind::Kc3 | SystemKind::Kc4)
    }

    pub fn is_euclidean(&self) -> bool {
        self.system == SystemKind::Kc4 && self.k1 == RationalK::ONE && self.k2 == RationalK::ONE
    }

    /// Both KC systems reduce to a Cartesian form when k1 = k2 = 1.
    pub fn has_cartesian_form(&self) -> bool {
        self.is_kc() && self.k1 == RationalK::ONE && self.k2 == RationalK::ONE
    }

    pub fn odd_indices(&self) -> bool {
        self.k1.is_odd_pair() && self.k2.is_odd_pair()
    }

    pub fn require_odd(&self) -> Result<()> {
        if self.odd_indices() {
            Ok(())
        } else {
            Err(Error::UnsupportedParity {
                p1: self.k1.p(),
                q1: self.k1.q(),
                p2: self.k2.p(),
                q2: self.k2.q(),
            })
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.alpha, self.beta, self.gamma, self.d()];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("potential strengths must be finite".into()));
        }
        if self.system == SystemKind::Kc3 && self.delta.is_some() {
            return Err(Error::Config(
                "the three-parameter system has no delta".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// (r, θ1, θ2; p_r, p_θ1, p_θ2)
    SphericalKc,
    /// (R, φ1, φ2; p_R, p_φ1, p_φ2)
    SphericalOsc,
    /// (x, y, z; p_x, p_y, p_z)
    Cartesian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub chart: Chart,
    pub q: [f64; 3],
    pub p: [f64; 3],
}

impl PhasePoint {
    pub fn new(chart: Chart, q: [f64; 3], p: [f64; 3]) -> Self {
        PhasePoint { chart, q, p }
    }

    pub fn from_array(chart: Chart, a: [f64; 6]) -> Self {
        PhasePoint {
            chart,
            q: [a[0], a[1], a[2]],
            p: [a[3], a[4], a[5]],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.q[0], self.q[1], self.q[2], self.p[0], self.p[1], self.p[2],
        ]
    }

    pub fn with_array(&self, a: [f64; 6]) -> Self {
        Self::from_array(self.chart, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreSym {
    H,
    L2,
    L3,
}

/// Jets of H, L2, L3 at one point.
#[derive(Clone, Copy, Debug)]
pub struct CoreJets {
    pub h: Jet,
    pub l2: Jet,
    pub l3: Jet,
}

/// Separated angular pieces shared by every spherical-chart formula.
pub fn spherical_core(v: &[Jet; 6], p: &SystemParams) -> Result<CoreJets> {
    let c1 = v[1] * p.k1.value();
    let c2 = v[2] * p.k2.value();
    let s1sq = c1.sin().sq();
    let l3 = v[5].sq() + barrier(p.beta, c2.cos().sq())? + barrier(p.gamma, c2.sin().sq())?;
    let mut l2 = v[4].sq() + l3.try_div(s1sq)?;
    if p.d() != 0.0 {
        l2 += p.d() * c1.cos().sq().recip()?;
    }
    let h = match p.system {
        SystemKind::Osc => v[3].sq() + p.alpha * v[0].sq() + l2.try_div(v[0].sq())?,
        _ => v[3].sq() + p.alpha * v[0].recip()? + l2.try_div(v[0].sq())?,
    };
    Ok(CoreJets { h, l2, l3 })
}

/// Cartesian forms, valid for k1 = k2 = 1.
pub fn cartesian_core(v: &[Jet; 6], p: &SystemParams) -> Result<CoreJets> {
    let [x, y, z, px, py, pz] = *v;
    let (x2, y2, z2) = (x.sq(), y.sq(), z.sq());
    let r = (x2 + y2 + z2).sqrt()?;
    let lxy = (x * py - y * px).sq();
    let lxz = (z * px - x * pz).sq();
    let lyz = (y * pz - z * py).sq();
    let rr = x2 + y2 + z2;
    let l3 = lxy + (x2 + y2) * (barrier(p.beta, x2)? + barrier(p.gamma, y2)?);
    let wall = barrier(p.beta, x2)? + barrier(p.gamma, y2)? + barrier(p.d(), z2)?;
    let l2 = lxy + lxz + lyz + rr * wall;
    let h = px.sq() + py.sq() + pz.sq() + barrier(p.alpha, r)? + wall;
    Ok(CoreJets { h, l2, l3 })
}

/// strength / s, or exactly zero when the strength is zero so that the
/// coordinate plane of an absent barrier stays regular.
fn barrier(strength: f64, s: Jet) -> Result<Jet> {
    if strength == 0.0 {
        Ok(s * 0.0)
    } else {
        Ok(strength * s.recip()?)
    }
}

pub(crate) fn check_chart(x: &PhasePoint, p: &SystemParams) -> Result<()> {
    let ok = match (p.system, x.chart) {
        (SystemKind::Osc, Chart::SphericalOsc) => true,
        (SystemKind::Kc3 | SystemKind::Kc4, Chart::SphericalKc) => true,
        (SystemKind::Kc3 | SystemKind::Kc4, Chart::Cartesian) => p.has_cartesian_form(),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ChartMismatch(format!(
            "{:?} point for system {} (k1={}, k2={})",
            x.chart, p.system, p.k1, p.k2
        )))
    }
}

/// H, L2 and L3 as jets in the point's own chart.
pub fn core_jets(x: &PhasePoint, p: &SystemParams) -> Result<CoreJets> {
    check_chart(x, p)?;
    let v = lift(&x.to_array());
    let c = match x.chart {
        Chart::Cartesian => cartesian_core(&v, p)?,
        _ => spherical_core(&v, p)?,
    };
    for j in [&c.h, &c.l2, &c.l3] {
        j.check_finite("core Hamiltonian")?;
    }
    Ok(c)
}

pub fn eval_core(sym: CoreSym, x: &PhasePoint, p: &SystemParams) -> Result<Jet> {
    let c = core_jets(x, p)?;
    Ok(match sym {
        CoreSym::H => c.h,
        CoreSym::L2 => c.l2,
        CoreSym::L3 => c.l3,
    })
}

/// Smallest |sin θ1| accepted by the Cartesian to spherical conversion.
pub const POLE_FLOOR: f64 = 1e-12;

fn frame(t1: f64, t2: f64) -> [[f64; 3]; 3] {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    [
        [s1 * c2, s1 * s2, c1],
        [c1 * c2, c1 * s2, -s1],
        [-s2, c2, 0.0],
    ]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Canonical point transformation; momenta follow the transpose-inverse
/// Jacobian so brackets are preserved.
pub fn cartesian_to_spherical(x: &PhasePoint) -> Result<PhasePoint> {
    if x.chart != Chart::Cartesian {
        return Err(Error::ChartMismatch("expected a Cartesian point".into()));
    }
    let [cx, cy, cz] = x.q;
    let r = (cx * cx + cy * cy + cz * cz).sqrt();
    let rho = (cx * cx + cy * cy).sqrt();
    if r == 0.0 || rho / r < POLE_FLOOR {
        return Err(Error::PoleSingularity(if r == 0.0 { 0.0 } else { rho / r }));
    }
    let t1 = rho.atan2(cz);
    let t2 = cy.atan2(cx);
    let [er, et, ep] = frame(t1, t2);
    let s1 = t1.sin();
    Ok(PhasePoint::new(
        Chart::SphericalKc,
        [r, t1, t2],
        [dot(&x.p, &er), r * dot(&x.p, &et), r * s1 * dot(&x.p, &ep)],
    ))
}

pub fn spherical_to_cartesian(x: &PhasePoint) -> Result<PhasePoint> {
    if x.chart != Chart::SphericalKc {
        return Err(Error::ChartMismatch("expected a spherical KC point".into()));
    }
    let [r, t1, t2] = x.q;
    let s1 = t1.sin();
    if s1.abs() < POLE_FLOOR {
        return Err(Error::PoleSingularity(s1));
    }
    let [er, et, ep] = frame(t1, t2);
    let [pr, pt, pp] = x.p;
    let mut q = [0.0; 3];
    let mut m = [0.0; 3];
    for k in 0..3 {
        q[k] = r * er[k];
        m[k] = pr * er[k] + pt / r * et[k] + pp / (r * s1) * ep[k];
    }
    Ok(PhasePoint::new(Chart::Cartesian, q, m))
}

/// Result of mapping an oscillator point to the Kepler-Coulomb side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StackelImage {
    pub kc: SystemParams,
    /// Kepler-Coulomb energy E.
    pub energy: f64,
    pub point: PhasePoint,
    /// False when j/2 is not a ratio of odd integers: the map is still
    /// valid but the identity suite does not apply.
    pub suite_applicable: bool,
}

/// Parameter half of the Stäckel map.
pub fn stackel_params(osc: &SystemParams, e_prime: f64) -> Result<(SystemParams, f64, bool)> {
    if osc.system != SystemKind::Osc {
        return Err(Error::ChartMismatch(
            "the Stäckel map starts from the oscillator".into(),
        ));
    }
    let k1 = osc.k1.halve();
    let k2 = osc.k2.halve();
    let kc = SystemParams::kc4(
        -e_prime / 4.0,
        osc.beta / 4.0,
        osc.gamma / 4.0,
        osc.d() / 4.0,
        k1,
        k2,
    );
    Ok((kc, -osc.alpha / 4.0, k1.is_odd_pair() && k2.is_odd_pair()))
}

/// r = R², θi = 2φi, p_r = p_R/(2R), p_θi = p_φi/2 together with the
/// parameter map. On the shell H' = E' the image satisfies H = E.
pub fn stackel_map(osc: &SystemParams, e_prime: f64, x: &PhasePoint) -> Result<StackelImage> {
    if x.chart != Chart::SphericalOsc {
        return Err(Error::ChartMismatch(
            "expected a spherical oscillator point".into(),
        ));
    }
    let (kc, energy, suite_applicable) = stackel_params(osc, e_prime)?;
    let [big_r, f1, f2] = x.q;
    if big_r <= 0.0 {
        return Err(Error::InadmissiblePoint("R must be positive".into()));
    }
    let point = PhasePoint::new(
        Chart::SphericalKc,
        [big_r * big_r, 2.0 * f1, 2.0 * f2],
        [x.p[0] / (2.0 * big_r), x.p[1] / 2.0, x.p[2] / 2.0],
    );
    Ok(StackelImage {
        kc,
        energy,
        point,
        suite_applicable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kc4_unit() -> SystemParams {
        SystemParams::kc4(1.0, 2.0, 3.0, 4.0, RationalK::ONE, RationalK::ONE)
    }

    #[test]
    fn rational_parsing_and_reduction() {
        let k: RationalK = "6/4".parse().unwrap();
        assert_eq!((k.p(), k.q()), (3, 2));
        assert!(!k.is_odd_pair());
        assert_eq!(
            "5".parse::<RationalK>().unwrap(),
            RationalK::new(5, 1).unwrap()
        );
        assert!("0/3".parse::<RationalK>().is_err());
        assert!("x/3".parse::<RationalK>().is_err());
        assert_eq!(RationalK::new(2, 1).unwrap().halve(), RationalK::ONE);
    }

    #[test]
    fn vanishing_potential_and_momenta() {
        let p = SystemParams::kc3(0.0, 0.0, 0.0, RationalK::ONE, RationalK::ONE);
        let x = PhasePoint::new(Chart::SphericalKc, [1.3, 0.6, 0.4], [0.0; 3]);
        assert_eq!(eval_core(CoreSym::H, &x, &p).unwrap().value.re, 0.0);
    }

    #[test]
    fn l3_is_p_theta2_squared_without_potential() {
        let p = SystemParams::kc3(1.0, 0.0, 0.0, RationalK::ONE, RationalK::ONE);
        let x = PhasePoint::new(Chart::SphericalKc, [1.3, 0.6, 0.4], [0.0, 0.0, 1.0]);
        assert_eq!(eval_core(CoreSym::L3, &x, &p).unwrap().value.re, 1.0);
    }

    #[test]
    fn pole_is_rejected() {
        let x = PhasePoint::new(Chart::Cartesian, [0.0, 0.0, 1.0], [0.0; 3]);
        assert!(matches!(
            cartesian_to_spherical(&x),
            Err(Error::PoleSingularity(_))
        ));
    }

    #[test]
    fn zero_momentum_maps_to_zero_momentum() {
        let x = PhasePoint::new(Chart::Cartesian, [1.0, 1.0, 1.0], [0.0; 3]);
        let s = cartesian_to_spherical(&x).unwrap();
        assert!((s.q[0] - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.p, [0.0; 3]);
    }

    #[test]
    fn chart_mismatch() {
        let p = SystemParams::kc4(
            1.0,
            2.0,
            3.0,
            4.0,
            RationalK::new(1, 3).unwrap(),
            RationalK::ONE,
        );
        let x = PhasePoint::new(Chart::Cartesian, [1.0, 0.5, 0.3], [0.1; 3]);
        assert!(matches!(
            eval_core(CoreSym::H, &x, &p),
            Err(Error::ChartMismatch(_))
        ));
        let y = PhasePoint::new(Chart::SphericalOsc, [1.0, 0.5, 0.3], [0.1; 3]);
        assert!(eval_core(CoreSym::H, &y, &kc4_unit()).is_err());
    }

    #[test]
    fn stackel_parameter_map() {
        let osc = SystemParams::osc(
            4.0,
            0.0,
            0.0,
            0.0,
            RationalK::new(2, 1).unwrap(),
            RationalK::new(2, 1).unwrap(),
        );
        let (kc, e, ok) = stackel_params(&osc, 8.0).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(kc.alpha, -2.0);
        assert_eq!(kc.k1, RationalK::ONE);
        assert_eq!(kc.k2, RationalK::ONE);
        assert!(ok);
        let odd = SystemParams::osc(
            4.0,
            0.0,
            0.0,
            0.0,
            RationalK::ONE,
            RationalK::new(2, 1).unwrap(),
        );
        assert!(!stackel_params(&odd, 8.0).unwrap().2);
    }
}
