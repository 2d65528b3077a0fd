//! The built-in relation catalog.
//!
//! Where a typeset relation and the verified one differ, the verified form
//! is asserted and the typeset form rides along as `printed`.

use crate::catalog::{display_form, Catalog};
use crate::error::Result;
use crate::numeric::{Term, I};
use crate::systems::{cartesian_to_spherical, Chart, PhasePoint, SystemKind, SystemParams};

use super::{Ctx, Floor, Group, IdentityRecord, Tier};

type R = Result<Term>;

/// Parameters as plain floats, captured by the closures.
#[derive(Clone, Copy)]
struct Kc {
    p1: f64,
    q1: f64,
    p2: f64,
    a: f64,
    b: f64,
    g: f64,
    d: f64,
}

impl Kc {
    fn of(p: &SystemParams) -> Self {
        Kc {
            p1: p.k1.p() as f64,
            q1: p.k1.q() as f64,
            p2: p.k2.p() as f64,
            a: p.alpha,
            b: p.beta,
            g: p.gamma,
            d: p.d(),
        }
    }
}

fn zero(_: &Ctx) -> R {
    Ok(Term::zero())
}

/// Sum of coefficient times product of factors.
fn poly(monos: &[(f64, &[Term])]) -> Term {
    let mut acc = Term::zero();
    for (c, fs) in monos {
        let mut t = Term::real(*c);
        for f in fs.iter() {
            t = t * *f;
        }
        acc = acc + t;
    }
    acc
}

fn rec<L, Rh>(id: &str, group: Group, tier: Tier, citation: &str, lhs: L, rhs: Rh) -> IdentityRecord
where
    L: Fn(&Ctx) -> R + Send + Sync + 'static,
    Rh: Fn(&Ctx) -> R + Send + Sync + 'static,
{
    IdentityRecord::new(id, group, tier, citation, lhs, rhs)
}

fn zero_bracket(
    id: &str,
    group: Group,
    citation: &str,
    a: &'static str,
    b: &'static str,
) -> IdentityRecord {
    rec(id, group, Tier::Jet, citation, move |c| c.br(a, b), zero)
}

/// Every relation applicable to `p`.
pub fn builtin_identities(p: &SystemParams) -> Vec<IdentityRecord> {
    let mut out = Vec::new();
    if !p.is_kc() {
        return out;
    }
    let kc4 = p.system == SystemKind::Kc4;
    let sys = if kc4 {
        "four-parameter"
    } else {
        "three-parameter"
    };

    out.push(zero_bracket(
        "a.H_L2",
        Group::A,
        "separation constants commute with H",
        "H",
        "L2",
    ));
    out.push(zero_bracket(
        "a.H_L3",
        Group::A,
        "separation constants commute with H",
        "H",
        "L3",
    ));
    out.push(zero_bracket(
        "a.L2_L3",
        Group::A,
        "L2 and L3 in involution",
        "L2",
        "L3",
    ));
    if !p.odd_indices() {
        return out;
    }
    let mut conserved = vec![
        "J_plus", "J_minus", "K_plus", "K_minus", "J1", "J2", "K1", "K2", "K0", "J_ratio",
        "K_ratio",
    ];
    if kc4 {
        conserved.push("J0");
    }
    for name in conserved {
        let cite = format!("{name} is a constant of the motion, {sys} system");
        out.push(zero_bracket(
            &format!("a.H_{name}"),
            Group::A,
            &cite,
            "H",
            name,
        ));
    }

    product_and_norm(p, &mut out, sys);
    grading(p, &mut out, sys);
    cross(p, &mut out, sys);
    quadratic_and_basis(p, &mut out, sys);
    if kc4 {
        generators_kc4(p, &mut out);
    } else {
        generators_kc3(p, &mut out);
    }
    if p.is_euclidean() {
        euclidean(p, &mut out);
    }
    out
}

fn product_and_norm(p: &SystemParams, out: &mut Vec<IdentityRecord>, sys: &str) {
    let k = Kc::of(p);
    let kc4 = p.system == SystemKind::Kc4;
    let mut jj = rec(
        "b.Jplus_Jminus",
        Group::B,
        Tier::Jet,
        &format!("product identity J+ J- = P1, {sys} system"),
        |c| Ok(c.t("J_plus")? * c.t("J_minus")?),
        |c| c.t("P1"),
    );
    if !kc4 {
        // The summary block prints the (L2 - L3) factor squared.
        jj = jj.printed(move |c| {
            let (h, l2, l3) = (c.t("H")?, c.t("L2")?, c.t("L3")?);
            Ok((l2 - l3).powi(2 * k.q1 as u32) * (k.a * k.a + 4.0 * h * l2).powi(k.p1 as u32))
        });
    }
    out.push(jj);
    out.push(rec(
        "b.Kplus_Kminus",
        Group::B,
        Tier::Jet,
        &format!("product identity K+ K- = P2, {sys} system"),
        |c| Ok(c.t("K_plus")? * c.t("K_minus")?),
        |c| c.t("P2"),
    ));
    for (id, x, xb, u) in [
        ("b.X1_norm", "X1", "X1_bar", "U1"),
        ("b.X2_norm", "X2", "X2_bar", "U2"),
        ("b.Y1_norm", "Y1", "Y1_bar", "S1"),
        ("b.Y2_norm", "Y2", "Y2_bar", "S2"),
    ] {
        let mut r = rec(
            id,
            Group::B,
            Tier::Jet,
            &format!("block norm {x} {xb} = {u}^2, {sys} system"),
            move |c| Ok(c.t(x)? * c.t(xb)?),
            move |c| Ok(c.t(u)?.sq()),
        );
        if !kc4 && id == "b.X2_norm" {
            // Typeset U2 has the opposite sign under the root.
            r = r.printed(move |c| Ok(-c.t(u)?.sq()));
        }
        out.push(r);
    }
}

fn grading(p: &SystemParams, out: &mut Vec<IdentityRecord>, sys: &str) {
    let k = Kc::of(p);
    let cj = if p.system == SystemKind::Kc4 {
        4.0
    } else {
        2.0
    };
    let cite = |what: &str| format!("{what}, {sys} summary");
    out.push(zero_bracket(
        "c.L3_Jplus",
        Group::C,
        &cite("J+ commutes with L3"),
        "L3",
        "J_plus",
    ));
    out.push(zero_bracket(
        "c.L3_Jminus",
        Group::C,
        &cite("J- commutes with L3"),
        "L3",
        "J_minus",
    ));
    out.push(zero_bracket(
        "c.L2_Kplus",
        Group::C,
        &cite("K+ commutes with L2"),
        "L2",
        "K_plus",
    ));
    out.push(zero_bracket(
        "c.L2_Kminus",
        Group::C,
        &cite("K- commutes with L2"),
        "L2",
        "K_minus",
    ));
    for (id, name, sgn) in [
        ("c.L2_Jplus", "J_plus", -1.0),
        ("c.L2_Jminus", "J_minus", 1.0),
    ] {
        out.push(rec(
            id,
            Group::C,
            Tier::Jet,
            &cite("L2 grades J+-"),
            move |c| c.br("L2", name),
            move |c| Ok(c.sqrt_l2()? * c.t(name)? * (I * (sgn * cj * k.p1))),
        ));
    }
    for (id, name, sgn) in [
        ("c.L3_Kplus", "K_plus", -1.0),
        ("c.L3_Kminus", "K_minus", 1.0),
    ] {
        out.push(rec(
            id,
            Group::C,
            Tier::Jet,
            &cite("L3 grades K+-"),
            move |c| c.br("L3", name),
            move |c| Ok(c.sqrt_l3()? * c.t(name)? * (I * (sgn * 4.0 * k.p1 * k.p2))),
        ));
    }
    out.push(rec(
        "d.Jplus_Jminus",
        Group::D,
        Tier::Jet,
        &cite("diagonal bracket of J+ and J-"),
        |c| c.br("J_plus", "J_minus"),
        move |c| Ok(c.sqrt_l2()? * c.dp1_dl2()? * (I * (cj * k.p1))),
    ));
    out.push(rec(
        "d.Kplus_Kminus",
        Group::D,
        Tier::Jet,
        &cite("diagonal bracket of K+ and K-"),
        |c| c.br("K_plus", "K_minus"),
        move |c| Ok(c.sqrt_l3()? * c.dp2_dl3()? * (I * (4.0 * k.p1 * k.p2))),
    ));
}

fn cross(p: &SystemParams, out: &mut Vec<IdentityRecord>, sys: &str) {
    let k = Kc::of(p);
    let kc4 = p.system == SystemKind::Kc4;
    // Ratio {J,K}/(J K) for the "same" and "opposite" pairings.
    let ratio = move |c: &Ctx, same: bool| -> R {
        let (s2, s3) = (c.sqrt_l2()?, c.sqrt_l3()?);
        let (l2, l3) = (c.t("L2")?, c.t("L3")?);
        let f = k.q1 * k.p1 * k.p2;
        if kc4 {
            let q = c.t("Q")?;
            let cross = 2.0 * s2 * s3;
            let (lin, quad) = if same {
                (s2 - s3, l2 + cross + l3 - k.d)
            } else {
                (s2 + s3, l2 - cross + l3 - k.d)
            };
            Ok(lin * quad / q * (I * (4.0 * f)))
        } else {
            let lin = if same { s2 + s3 } else { s2 - s3 };
            Ok(lin / (l2 - l3) * (I * (2.0 * f)))
        }
    };
    let floor = if kc4 {
        Floor::QNonzero
    } else {
        Floor::SplitL2L3
    };
    for (id, a, b, same, sgn) in [
        ("e.Jplus_Kplus", "J_plus", "K_plus", true, 1.0),
        ("e.Jminus_Kminus", "J_minus", "K_minus", true, -1.0),
        ("e.Jplus_Kminus", "J_plus", "K_minus", false, 1.0),
        ("e.Jminus_Kplus", "J_minus", "K_plus", false, -1.0),
    ] {
        out.push(
            rec(
                id,
                Group::E,
                Tier::Jet,
                &format!("cross bracket {{{a},{b}}}, {sys} summary"),
                move |c| c.br(a, b),
                move |c| Ok(ratio(c, same)? * c.t(a)? * c.t(b)? * sgn),
            )
            .needs(floor),
        );
    }
}

fn quadratic_and_basis(p: &SystemParams, out: &mut Vec<IdentityRecord>, sys: &str) {
    let k = Kc::of(p);
    let kc4 = p.system == SystemKind::Kc4;
    let cite = |what: &str| format!("{what}, {sys} system");
    out.push(rec(
        "f.J2_squared",
        Group::F,
        Tier::Jet,
        &cite("quadratic relation J2^2 = -L2 J1^2 + 4 P1"),
        |c| Ok(c.t("J2")?.sq()),
        |c| Ok(4.0 * c.t("P1")? - c.t("L2")? * c.t("J1")?.sq()),
    ));
    out.push(rec(
        "f.K2_squared",
        Group::F,
        Tier::Jet,
        &cite("quadratic relation K2^2 = -L3 K1^2 + 4 P2"),
        |c| Ok(c.t("K2")?.sq()),
        |c| Ok(4.0 * c.t("P2")? - c.t("L3")? * c.t("K1")?.sq()),
    ));

    // Signs and weights of the basis brackets differ between the systems.
    let (wj, sk) = if kc4 { (4.0, 1.0) } else { (2.0, -1.0) };
    let pp = k.p1 * k.p2;
    out.push(rec(
        "g.L2_J2",
        Group::G,
        Tier::Jet,
        &cite("{L2,J2}"),
        |c| c.br("L2", "J2"),
        move |c| Ok(c.t("L2")? * c.t("J1")? * (wj * k.p1)),
    ));
    out.push(rec(
        "g.L2_J1",
        Group::G,
        Tier::Jet,
        &cite("{L2,J1}"),
        |c| c.br("L2", "J1"),
        move |c| Ok(c.t("J2")? * (-wj * k.p1)),
    ));
    out.push(rec(
        "g.L3_K2",
        Group::G,
        Tier::Jet,
        &cite("{L3,K2}"),
        |c| c.br("L3", "K2"),
        move |c| Ok(c.t("L3")? * c.t("K1")? * (sk * 4.0 * pp)),
    ));
    out.push(rec(
        "g.L3_K1",
        Group::G,
        Tier::Jet,
        &cite("{L3,K1}"),
        |c| c.br("L3", "K1"),
        move |c| Ok(c.t("K2")? * (-sk * 4.0 * pp)),
    ));
    if kc4 {
        out.push(rec(
            "g.J1_J2",
            Group::G,
            Tier::Jet,
            &cite("{J1,J2}"),
            |c| c.br("J1", "J2"),
            move |c| Ok(c.t("J1")?.sq() * (-2.0 * k.p1) + c.dp1_dl2()? * (8.0 * k.p1)),
        ));
    } else {
        out.push(
            rec(
                "g.J2_J1",
                Group::G,
                Tier::Jet,
                &cite("{J2,J1}"),
                |c| c.br("J2", "J1"),
                move |c| Ok(c.t("J1")?.sq() * k.p1 - c.dp1_dl2()? * (4.0 * k.p1)),
            )
            .printed(move |c| Ok(c.t("J1")?.sq() * (-k.p1) - c.dp1_dl2()? * (4.0 * k.p1))),
        );
    }
    if kc4 {
        out.push(rec(
            "g.K1_K2",
            Group::G,
            Tier::Jet,
            &cite("{K1,K2}"),
            |c| c.br("K1", "K2"),
            move |c| Ok(c.t("K1")?.sq() * (-2.0 * pp) + c.dp2_dl3()? * (8.0 * pp)),
        ));
    } else {
        // Typeset as {K2,K1}; the sign flip of the grading carries over.
        out.push(rec(
            "g.K2_K1",
            Group::G,
            Tier::Jet,
            &cite("{K2,K1}"),
            |c| c.br("K2", "K1"),
            move |c| Ok(c.t("K1")?.sq() * (-2.0 * pp) + c.dp2_dl3()? * (8.0 * pp)),
        ));
    }
    if kc4 {
        mixed_kc4(k, out);
    } else {
        mixed_kc3(k, out);
    }
}

/// Mixed brackets of the three-parameter basis, f = 2 q1 p1 p2 / (L2 - L3).
fn mixed_kc3(k: Kc, out: &mut Vec<IdentityRecord>) {
    let f = move |c: &Ctx| -> R {
        Ok(Term::real(2.0 * k.q1 * k.p1 * k.p2) / (c.t("L2")? - c.t("L3")?))
    };
    let cite = "mixed polynomial bracket, three-parameter system";
    let g = |r: IdentityRecord| r.needs(Floor::SplitL2L3);
    out.push(g(rec(
        "g.J1_K1",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J1", "K1"),
        move |c| Ok(f(c)? * (c.t("J2")? * c.t("K1")? - c.t("J1")? * c.t("K2")?)),
    )));
    out.push(g(rec(
        "g.J2_K1",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J2", "K1"),
        move |c| Ok(-(f(c)? * (c.t("J2")? * c.t("K2")? + c.t("L2")? * c.t("J1")? * c.t("K1")?))),
    )
    .printed(move |c| {
        Ok(f(c)? * (c.t("J2")? * c.t("K2")? + c.t("L2")? * c.t("J1")? * c.t("K1")?))
    })));
    out.push(g(rec(
        "g.J1_K2",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J1", "K2"),
        move |c| Ok(f(c)? * (c.t("L3")? * c.t("J1")? * c.t("K1")? + c.t("J2")? * c.t("K2")?)),
    )
    .printed(move |c| {
        Ok(f(c)? * (c.t("L3")? * c.t("K1")? + c.t("J2")? * c.t("K2")?))
    })));
    out.push(g(rec(
        "g.J2_K2",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J2", "K2"),
        move |c| {
            Ok(f(c)?
                * (c.t("L3")? * c.t("J2")? * c.t("K1")? - c.t("L2")? * c.t("J1")? * c.t("K2")?))
        },
    )));
}

/// Mixed brackets of the four-parameter basis, f = 4 q1 p1 p2 / Q.
fn mixed_kc4(k: Kc, out: &mut Vec<IdentityRecord>) {
    let f = move |c: &Ctx| -> R { Ok(Term::real(4.0 * k.q1 * k.p1 * k.p2) / c.t("Q")?) };
    let plus = move |c: &Ctx| -> R { Ok(c.t("L2")? - c.t("L3")? + k.d) };
    let minus = move |c: &Ctx| -> R { Ok(c.t("L2")? - c.t("L3")? - k.d) };
    let cite = "mixed polynomial bracket, four-parameter system";
    let g = |r: IdentityRecord| r.needs(Floor::QNonzero);
    out.push(g(rec(
        "g.ident1",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J1", "K1"),
        move |c| {
            Ok(f(c)? * (c.t("J1")? * c.t("K2")? * plus(c)? + c.t("J2")? * c.t("K1")? * minus(c)?))
        },
    )));
    out.push(g(rec(
        "g.ident2",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J1", "K2"),
        move |c| {
            let a = c.t("J1")? * c.t("K1")? * c.t("L3")? * plus(c)?;
            let b = c.t("J2")? * c.t("K2")? * (-minus(c)?);
            Ok(-(f(c)? * (a + b)))
        },
    )));
    out.push(g(rec(
        "g.ident3",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J2", "K2"),
        move |c| {
            let a = c.t("J1")? * c.t("K2")? * c.t("L2")? * minus(c)?;
            let b = c.t("J2")? * c.t("K1")? * c.t("L3")? * plus(c)?;
            Ok(-(f(c)? * (a + b)))
        },
    )));
    out.push(g(rec(
        "g.ident4",
        Group::G,
        Tier::Jet,
        cite,
        |c| c.br("J2", "K1"),
        move |c| {
            let a = c.t("J1")? * c.t("K1")? * c.t("L2")? * minus(c)?;
            let b = c.t("J2")? * c.t("K2")? * (-plus(c)?);
            Ok(-(f(c)? * (a + b)))
        },
    )));
}

fn generators_common(k: Kc, kc4: bool, out: &mut Vec<IdentityRecord>) {
    let sys = if kc4 {
        "four-parameter"
    } else {
        "three-parameter"
    };
    let sgn = if kc4 { 1.0 } else { -1.0 };
    out.push(rec(
        "h.K2_decomposition",
        Group::H,
        Tier::Jet,
        &format!("K2 = L3 K0 + D2, {sys} system"),
        |c| c.t("K2"),
        |c| Ok(c.t("L3")? * c.t("K0")? + c.t("D2")?),
    ));
    out.push(rec(
        "h.L3_K0",
        Group::H,
        Tier::Jet,
        &format!("R2 = {{L3,K0}}, {sys} system"),
        |c| c.br("L3", "K0"),
        move |c| Ok(c.t("K1")? * (sgn * 4.0 * k.p1 * k.p2)),
    ));
    out.push(zero_bracket(
        "h.L2_K0",
        Group::H,
        &format!("K0 commutes with L2, {sys} system"),
        "L2",
        "K0",
    ));
}

fn generators_kc3(p: &SystemParams, out: &mut Vec<IdentityRecord>) {
    let k = Kc::of(p);
    generators_common(k, false, out);
    out.push(rec(
        "h.R1_squared",
        Group::H,
        Tier::Jet,
        "R1 = {L2,J1} squared, three-parameter system",
        move |c| Ok(c.br("L2", "J1")?.sq() / (4.0 * k.p1 * k.p1)),
        |c| Ok(4.0 * c.t("P1")? - c.t("L2")? * c.t("J1")?.sq()),
    ));
    let r2 = move |c: &Ctx, pname: &str| -> R {
        let lk = c.t("L3")? * c.t("K0")? + c.t("D2")?;
        Ok((4.0 * c.t(pname)? - lk.sq()) / c.t("L3")?)
    };
    out.push(
        rec(
            "h.R2_squared",
            Group::H,
            Tier::Jet,
            "R2 = {L3,K0} squared, three-parameter system",
            move |c| Ok(c.br("L3", "K0")?.sq() / (16.0 * (k.p1 * k.p2).powi(2))),
            move |c| r2(c, "P2"),
        )
        .printed(move |c| r2(c, "P1")),
    );
}

/// A and B of the R3 relation Q {J0,K0} = A J1 + B K1.
fn r3_coeffs(c: &Ctx, k: Kc) -> Result<(Term, Term)> {
    let (l2, l3, q) = (c.t("L2")?, c.t("L3")?, c.t("Q")?);
    let f = 4.0 * k.q1 * k.p1 * k.p2;
    let lk = l3 * c.t("K0")? + c.t("D2")?;
    let lj = l2 * c.t("J0")? + c.t("D1")?;
    let a = -(f * lk * (l2 - l3 - k.d) / l3) + 4.0 * k.p1 * q * c.dd2_dl2()? / l3;
    let b = -(f * lj * (l2 - l3 + k.d) / l2) - 4.0 * k.p1 * k.p2 * q * c.dd1_dl3()? / l2;
    Ok((a, b))
}

/// Right side of {J0, J1}; `d1_weight` is 4 in the verified form.
fn j0_j1(c: &Ctx, k: Kc, d1_weight: f64) -> R {
    let (l2, j1, j2) = (c.t("L2")?, c.t("J1")?, c.t("J2")?);
    let l2sq = l2.sq();
    Ok((2.0 * k.p1 * j1.sq() - 8.0 * k.p1 * c.dp1_dl2()?) / l2
        - d1_weight * k.p1 * c.t("D1")? * j2 / l2sq
        + 4.0 * k.p1 * j2.sq() / l2sq)
}

fn k0_j1(c: &Ctx, k: Kc) -> R {
    let (l2, l3, q) = (c.t("L2")?, c.t("L3")?, c.t("Q")?);
    let f = 4.0 * k.q1 * k.p1 * k.p2;
    let inner =
        c.t("J1")? * c.t("K1")? * l3 * (l2 - l3 + k.d) + c.t("J2")? * c.t("K2")? * (l3 - l2 + k.d);
    Ok(f * inner / (l3 * q) + 4.0 * k.p1 * c.t("J2")? * c.dd2_dl2()? / l3)
}

fn generators_kc4(p: &SystemParams, out: &mut Vec<IdentityRecord>) {
    let k = Kc::of(p);
    generators_common(k, true, out);
    let cite = |s: &str| format!("{s}, four-parameter system");
    out.push(rec(
        "h.J2_decomposition",
        Group::H,
        Tier::Jet,
        &cite("J2 = L2 J0 + D1"),
        |c| c.t("J2"),
        |c| Ok(c.t("L2")? * c.t("J0")? + c.t("D1")?),
    ));
    out.push(rec(
        "h.L2_J0",
        Group::H,
        Tier::Jet,
        &cite("R1 = {L2,J0}"),
        |c| c.br("L2", "J0"),
        move |c| Ok(c.t("J1")? * (4.0 * k.p1)),
    ));
    out.push(zero_bracket(
        "h.L3_J0",
        Group::H,
        &cite("J0 commutes with L3"),
        "L3",
        "J0",
    ));
    out.push(rec(
        "h.R1_squared",
        Group::H,
        Tier::Jet,
        &cite("R1 squared"),
        move |c| Ok(c.br("L2", "J0")?.sq() / (16.0 * k.p1 * k.p1)),
        |c| {
            let (l2, j0, d1) = (c.t("L2")?, c.t("J0")?, c.t("D1")?);
            Ok(-(l2 * j0.sq()) - 2.0 * d1 * j0 + (4.0 * c.t("P1")? - d1.sq()) / l2)
        },
    ));
    out.push(rec(
        "h.R2_squared",
        Group::H,
        Tier::Jet,
        &cite("R2 squared"),
        move |c| Ok(c.br("L3", "K0")?.sq() / (16.0 * (k.p1 * k.p2).powi(2))),
        |c| {
            let (l3, k0, d2) = (c.t("L3")?, c.t("K0")?, c.t("D2")?);
            Ok(-(l3 * k0.sq()) - 2.0 * d2 * k0 + (4.0 * c.t("P2")? - d2.sq()) / l3)
        },
    ));
    out.push(
        rec(
            "h.R3",
            Group::H,
            Tier::Jet,
            &cite("R3 = {J0,K0} as A J1 + B K1"),
            |c| Ok(c.t("Q")? * c.br("J0", "K0")?),
            move |c| {
                let (a, b) = r3_coeffs(c, k)?;
                Ok(a * c.t("J1")? + b * c.t("K1")?)
            },
        )
        .needs(Floor::QNonzero),
    );
    let l2r3 = move |c: &Ctx, sgn: f64| -> R {
        let (a, _) = r3_coeffs(c, k)?;
        let lj = c.t("L2")? * c.t("J0")? + c.t("D1")?;
        let w = c.t("L2")? - c.t("L3")? + k.d;
        Ok(sgn * 4.0 * k.p1 * a * lj
            - 16.0 * k.q1 * k.p1 * k.p1 * k.p2 * w * c.t("J1")? * c.t("K1")?)
    };
    out.push(
        rec(
            "h.L2_R3",
            Group::H,
            Tier::Nested,
            &cite("{L2,R3}"),
            |c| Ok(c.t("Q")? * c.nested("L2", "J0", "K0")?),
            move |c| l2r3(c, -1.0),
        )
        .printed(move |c| l2r3(c, 1.0))
        .needs(Floor::QNonzero),
    );
    out.push(
        rec(
            "h.L3_R3",
            Group::H,
            Tier::Nested,
            &cite("{L3,R3}"),
            |c| Ok(c.t("Q")? * c.nested("L3", "J0", "K0")?),
            move |c| {
                let (_, b) = r3_coeffs(c, k)?;
                let lk = c.t("L3")? * c.t("K0")? + c.t("D2")?;
                let w = c.t("L2")? - c.t("L3")? - k.d;
                let pp = k.p1 * k.p2;
                Ok(-(4.0 * pp * b * lk)
                    - 16.0 * k.q1 * k.p1 * pp * k.p2 * w * c.t("J1")? * c.t("K1")?)
            },
        )
        .needs(Floor::QNonzero),
    );
    let l2r1 = move |c: &Ctx, sgn: f64| -> R {
        Ok(sgn * 4.0 * k.p1 * (c.t("L2")? * c.t("J0")? + c.t("D1")?))
    };
    out.push(
        rec(
            "h.L2_R1",
            Group::H,
            Tier::Nested,
            &cite("{L2,R1}"),
            move |c| Ok(c.nested("L2", "L2", "J0")? / (4.0 * k.p1)),
            move |c| l2r1(c, -1.0),
        )
        .printed(move |c| l2r1(c, 1.0)),
    );
    out.push(rec(
        "h.L3_R1",
        Group::H,
        Tier::Nested,
        &cite("{L3,R1} vanishes"),
        |c| c.nested("L3", "L2", "J0"),
        zero,
    ));
    out.push(
        rec(
            "h.J0_R1",
            Group::H,
            Tier::Nested,
            &cite("{J0,R1}"),
            move |c| Ok(c.nested("J0", "L2", "J0")? / (4.0 * k.p1)),
            move |c| j0_j1(c, k, 4.0),
        )
        .printed(move |c| j0_j1(c, k, 2.0)),
    );
    out.push(
        rec(
            "h.J0_J1",
            Group::H,
            Tier::Jet,
            &cite("{J0,J1}"),
            |c| c.br("J0", "J1"),
            move |c| j0_j1(c, k, 4.0),
        )
        .printed(move |c| j0_j1(c, k, 2.0)),
    );
    out.push(
        rec(
            "h.K0_R1",
            Group::H,
            Tier::Nested,
            &cite("{K0,R1}"),
            move |c| Ok(c.nested("K0", "L2", "J0")? / (4.0 * k.p1)),
            move |c| k0_j1(c, k),
        )
        .needs(Floor::QNonzero),
    );
    out.push(
        rec(
            "h.K0_J1",
            Group::H,
            Tier::Jet,
            &cite("{K0,J1}"),
            |c| c.br("K0", "J1"),
            move |c| k0_j1(c, k),
        )
        .needs(Floor::QNonzero),
    );
}

/// J0 of the same system after swapping (x, β) with (z, δ), evaluated at
/// the image of the current point.
fn transposed_j0(c: &Ctx) -> R {
    let cart = c.cat.cart.ok_or(crate::error::Error::WrongK)?;
    let v = cart.map(|j| j.value.re);
    let swapped = PhasePoint::new(Chart::Cartesian, [v[2], v[1], v[0]], [v[5], v[4], v[3]]);
    let mut p = *c.p();
    (p.beta, p.delta) = (p.d(), Some(p.beta));
    let sph = cartesian_to_spherical(&swapped)?;
    let cat = Catalog::evaluate(&sph, &p)?;
    cat.term("J0")
}

/// X, the polynomial with K1^2 = X for the Euclidean case.
fn x_poly(c: &Ctx, k: Kc) -> R {
    let (l2, l3, k0) = (c.t("L2")?, c.t("L3")?, c.t("K0")?);
    let (b, g, d) = (k.b, k.g, k.d);
    Ok(poly(&[
        (-1.0, &[k0, k0, l3]),
        (-4.0 * b, &[k0, l2]),
        (4.0 * b * d, &[k0]),
        (4.0, &[l3, l3, l3]),
        (-4.0 * g * d, &[k0]),
        (4.0 * g, &[k0, l2]),
        (-8.0 * b, &[l2, l2]),
        (-8.0 * g, &[l2, l2]),
        (4.0, &[l3, l2, l2]),
        (-8.0, &[l3, l3, l2]),
        (4.0 * b * b, &[l3]),
        (-8.0 * b, &[l3, l3]),
        (4.0 * g * g, &[l3]),
        (-8.0 * g, &[l3, l3]),
        (-8.0 * d, &[l3, l3]),
        (4.0 * d * d, &[l3]),
        (16.0 * b * g * d, &[]),
        (16.0 * g * d, &[l2]),
        (16.0 * b * d, &[l2]),
        (16.0 * b * g, &[l2]),
        (-8.0 * b * b, &[l2]),
        (16.0 * b, &[l3, l2]),
        (-8.0 * g * g, &[l2]),
        (16.0 * g, &[l3, l2]),
        (-8.0 * d, &[l3, l2]),
        (-8.0 * b * g, &[l3]),
        (-8.0 * b * b * d, &[]),
        (16.0 * b * d, &[l3]),
        (-8.0 * g * g * d, &[]),
        (16.0 * g * d, &[l3]),
        (-8.0 * b * d * d, &[]),
        (-8.0 * g * d * d, &[]),
    ]))
}

/// The J1 R0 display divided by 32 H^2. `fixed` selects the verified L2
/// coefficients.
fn j1r0_bracket(c: &Ctx, k: Kc, fixed: bool) -> R {
    let (l2, l3, k0, j0, jp) = (
        c.t("L2")?,
        c.t("L3")?,
        c.t("K0")?,
        c.t("J0")?,
        c.t("J0_prime")?,
    );
    let (a2, b, g, d) = (k.a * k.a, k.b, k.g, k.d);
    let dl = l2 - l3;
    let (cj0, cjp) = if fixed {
        (6.0 * b - 6.0 * g + 4.0 * d, 8.0 * d)
    } else {
        (-6.0 * g + 4.0 * d, 6.0 * b + 4.0 * d)
    };
    Ok((-2.0 * dl.sq() + (l2 + l3) * k0) * j0 - 4.0 * dl.sq() * jp
        + (cj0 * l2 + 2.0 * (-b + g + 2.0 * d) * l3 - d * k0) * j0
        + (cjp * l2 + 8.0 * d * l3) * jp
        + 2.0 * d * (b - g - d) * j0
        - 4.0 * d * d * jp
        + a2 * (4.0 * dl.sq() + (2.0 * l2 - 6.0 * l3) * k0)
        + a2 * (-4.0 * (b - g + 2.0 * d) * (l2 + l3) - 2.0 * d * k0)
        + Term::real(4.0 * a2 * d * (5.0 * b - 5.0 * g + d)))
}

fn euclidean(p: &SystemParams, out: &mut Vec<IdentityRecord>) {
    let k = Kc::of(p);
    let sigma = k.b + k.g + k.d;
    let a2 = k.a * k.a;
    let cite = |s: &str| format!("{s}, Euclidean case");
    for name in [
        "I_xy",
        "I_xz",
        "I_yz",
        "J0_prime",
        "J0_dprime",
        "L3_prime",
        "K0_prime",
        "S_closure",
    ] {
        out.push(zero_bracket(
            &format!("i.H_{name}"),
            Group::I,
            &cite(&format!("{name} is conserved")),
            "H",
            name,
        ));
    }
    if k.d == 0.0 {
        out.push(zero_bracket(
            "i.H_M3",
            Group::I,
            &cite("M3 is conserved when delta = 0"),
            "H",
            "M3",
        ));
    }
    out.push(rec(
        "i.L2_decomposition",
        Group::I,
        Tier::Jet,
        &cite("L2 = I_xy + I_xz + I_yz - (beta + gamma + delta)"),
        |c| c.t("L2"),
        move |c| Ok(c.t("I_xy")? + c.t("I_xz")? + c.t("I_yz")? - sigma),
    ));
    out.push(rec(
        "i.L3_is_I_xy",
        Group::I,
        Tier::Jet,
        &cite("L3 = I_xy"),
        |c| c.t("L3"),
        |c| c.t("I_xy"),
    ));
    out.push(rec(
        "i.K0_decomposition",
        Group::I,
        Tier::Jet,
        &cite("K0 = 2(I_yz - I_xz)"),
        |c| c.t("K0"),
        |c| Ok(2.0 * (c.t("I_yz")? - c.t("I_xz")?)),
    ));

    let disp =
        move |c: &Ctx, m: &str, s: f64, u: usize, ia: &str, ib: &str, with_shift: bool| -> R {
            let cart = c.cat.cart.ok_or(crate::error::Error::WrongK)?;
            let e = c.cat.extras()?;
            let j = display_form(
                c.j(m)?,
                s,
                cart[u],
                c.j(ia)?,
                c.j(ib)?,
                e.dilation,
                c.cat.core.h,
                c.p(),
            )?;
            let shift = if with_shift {
                Term::real(0.0)
            } else {
                8.0 * s * c.t("H")?
            };
            Ok(Term::of(&j) - shift)
        };
    out.push(
        rec(
            "i.J0_display",
            Group::I,
            Tier::Jet,
            &cite("Cartesian display of J0"),
            |c| c.t("J0"),
            move |c| disp(c, "M3", k.d, 2, "I_xz", "I_yz", true),
        )
        .printed(move |c| disp(c, "M3", k.d, 2, "I_xz", "I_yz", false)),
    );
    out.push(
        rec(
            "i.J0_prime_transposed",
            Group::I,
            Tier::Jet,
            &cite("J0' is the image of J0 under (x,beta) <-> (z,delta)"),
            |c| c.t("J0_prime"),
            transposed_j0,
        )
        .printed(move |c| disp(c, "M1", k.b, 0, "I_xy", "I_xz", false)),
    );
    out.push(
        rec(
            "i.J0_dprime_display",
            Group::I,
            Tier::Jet,
            &cite("Cartesian display of J0''"),
            |c| c.t("J0_dprime"),
            move |c| disp(c, "M2", k.g, 1, "I_xy", "I_yz", true),
        )
        .printed(move |c| disp(c, "M2", k.g, 1, "I_xy", "I_yz", false)),
    );
    out.push(rec(
        "i.Jident",
        Group::I,
        Tier::Jet,
        &cite("J0 + J0' + J0'' = 2 alpha^2 with the displayed J0''"),
        move |c| Ok(c.t("J0")? + c.t("J0_prime")? + disp(c, "M2", k.g, 1, "I_xy", "I_yz", true)?),
        move |_| Ok(Term::real(2.0 * a2)),
    ));
    out.push(
        rec(
            "i.K1_prime",
            Group::I,
            Tier::Jet,
            &cite("K1' = (1/4){L3',K0'} = -K1"),
            |c| {
                let l3p = c.j("L3_prime")?;
                let k0p = c.j("K0_prime")?;
                Ok(0.25 * crate::numeric::bracket_term(&l3p, &k0p))
            },
            |c| Ok(-c.t("K1")?),
        )
        .printed(|c| Ok(-1.25 * c.t("K1")?)),
    );
    out.push(
        rec(
            "i.R2_prime",
            Group::I,
            Tier::Jet,
            &cite("R2' = {L3',K0'} = -R2"),
            |c| c.br("L3_prime", "K0_prime"),
            |c| Ok(-c.br("L3", "K0")?),
        )
        .printed(|c| Ok(-1.25 * c.br("L3", "K0")?)),
    );
    out.push(
        rec(
            "i.L3p_J0p",
            Group::I,
            Tier::Jet,
            &cite("{L3',J0'} vanishes"),
            |c| c.br("L3_prime", "J0_prime"),
            zero,
        )
        .printed(|c| Ok(c.br("L3_prime", "J0_prime")? - c.br("L3", "J0_prime")?)),
    );
    let closure = move |c: &Ctx| -> R {
        let (l2, l3, k0, j0) = (c.t("L2")?, c.t("L3")?, c.t("K0")?, c.t("J0")?);
        let (b, g, d) = (k.b, k.g, k.d);
        Ok(0.5 * (l2 + l3 - d) * j0 * k0
            + a2 * (l2 - 3.0 * l3 - d) * k0
            + (b - g) * (3.0 * l2 - l3 + d) * j0
            + 2.0 * a2 * (g - b) * (l2 + l3 - 5.0 * d)
            + c.t("S_closure")? * c.t("Q")?)
    };
    out.push(rec(
        "i.J1K1",
        Group::I,
        Tier::Jet,
        &cite("J1 K1 closure with S = -J0 - 2 J0' + 2 alpha^2"),
        |c| Ok(c.t("J1")? * c.t("K1")?),
        closure,
    ));
    out.push(rec(
        "i.K0R11",
        Group::I,
        Tier::Jet,
        &cite("{K0,J1} in the Euclidean basis"),
        |c| c.br("K0", "J1"),
        move |c| {
            let (k0, j0) = (c.t("K0")?, c.t("J0")?);
            let w = c.t("L2")? - c.t("L3")? + k.d;
            Ok(-2.0 * (2.0 * (k.g - k.b) + k0) * (j0 - 2.0 * a2) + 4.0 * w * c.t("S_closure")?)
        },
    ));
    out.push(rec(
        "i.J1_J0",
        Group::I,
        Tier::Jet,
        &cite("{J1,J0}"),
        |c| c.br("J1", "J0"),
        move |c| {
            let (h, l2, l3, j0) = (c.t("H")?, c.t("L2")?, c.t("L3")?, c.t("J0")?);
            let d = k.d;
            let quad =
                3.0 * l2.sq() + l3.sq() - 4.0 * d * l2 - 2.0 * d * l3 - 4.0 * l2 * l3 + d * d;
            Ok(-2.0 * j0.sq()
                + 128.0 * h.sq() * quad
                + 128.0 * a2 * h * (l2 - l3 - d)
                + 8.0 * a2 * a2)
        },
    ));
    let r0 = |c: &Ctx| c.br("J0", "J0_prime");
    out.push(rec(
        "i.R0_factor",
        Group::I,
        Tier::Jet,
        &cite("R0 = {J0,J0'} = 64 H^2 K1"),
        r0,
        |c| Ok(64.0 * c.t("H")?.sq() * c.t("K1")?),
    ));
    out.push(rec(
        "i.L2_R0",
        Group::I,
        Tier::Nested,
        &cite("{L2,R0} vanishes"),
        |c| c.nested("L2", "J0", "J0_prime"),
        zero,
    ));
    let r0sq_iform = move |c: &Ctx| -> R {
        let (ixy, ixz, iyz) = (c.t("I_xy")?, c.t("I_xz")?, c.t("I_yz")?);
        let (b, g, d) = (k.b, k.g, k.d);
        let h4 = c.t("H")?.powi(4);
        let body = ixy * ixz * iyz
            - b * iyz * (ixy + ixz)
            - g * ixz * (ixy + iyz)
            - d * ixy * (ixz + iyz)
            - b * iyz.sq()
            - g * ixz.sq()
            - d * ixy.sq()
            + (b * (b + 3.0 * g + 3.0 * d) + g * d) * iyz
            + (g * (g + 3.0 * d + 3.0 * b) + d * b) * ixz
            + (d * (d + 3.0 * b + 3.0 * g) + b * g) * ixy
            - 2.0 * (b * g * g + b * b * g + b * d * d + b * b * d + g * d * d + g * g * d);
        Ok(65536.0 * h4 * body)
    };
    out.push(
        rec(
            "i.R0_squared",
            Group::I,
            Tier::Jet,
            &cite("R0^2 = 4096 H^4 X"),
            move |c| Ok(r0(c)?.sq()),
            move |c| Ok(4096.0 * c.t("H")?.powi(4) * x_poly(c, k)?),
        )
        .printed(r0sq_iform),
    );
    out.push(
        rec(
            "i.K1R0",
            Group::I,
            Tier::Jet,
            &cite("K1 R0 = 64 H^2 X"),
            move |c| Ok(c.t("K1")? * r0(c)?),
            move |c| Ok(64.0 * c.t("H")?.sq() * x_poly(c, k)?),
        )
        .printed(move |c| x_poly(c, k)),
    );
    out.push(
        rec(
            "i.J1R0",
            Group::I,
            Tier::Jet,
            &cite("J1 R0 as a multiple of the J1 K1 closure"),
            move |c| Ok(c.t("J1")? * r0(c)?),
            move |c| Ok(32.0 * c.t("H")?.sq() * j1r0_bracket(c, k, true)?),
        )
        .printed(move |c| Ok(32.0 * c.t("H")?.sq() * j1r0_bracket(c, k, false)?)),
    );
    out.push(rec(
        "i.J0_R0",
        Group::I,
        Tier::Nested,
        &cite("{J0,R0}, odd under the transposition symmetry"),
        |c| c.nested("J0", "J0", "J0_prime"),
        move |c| {
            let (jp, jpp) = (c.t("J0_prime")?, c.t("J0_dprime")?);
            let (ixz, iyz) = (c.t("I_xz")?, c.t("I_yz")?);
            let (b, g, d) = (k.b, k.g, k.d);
            let body =
                (jp * iyz - jpp * ixz) + d * (jpp - jp) - g * jp + b * jpp + 2.0 * a2 * (ixz - iyz)
                    - Term::real(2.0 * a2 * (b - g));
            Ok(512.0 * c.t("H")?.sq() * body)
        },
    ));
}
