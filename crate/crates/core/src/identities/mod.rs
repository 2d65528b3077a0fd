//! Structure relations as residual functionals, and batch checking.

mod builtin;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use builtin::builtin_identities;

use crate::catalog::{reduced, Catalog};
use crate::error::{Error, Result};
use crate::numeric::{bracket, bracket_term, nested_bracket, Jet, Term, C64};
use crate::sampler::{Sampler, SamplerConfig, Q_FLOOR, SPLIT_FLOOR};
use crate::systems::{PhasePoint, SystemParams};

/// Tolerance tier; each tier has its own default bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    /// First derivatives only, exact through jets.
    Jet,
    /// Needs a bracket of a bracket; inner gradient by finite differences.
    Nested,
    /// High-order functional relations.
    Relation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub jet: f64,
    pub nested: f64,
    pub relation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            jet: 1e-8,
            nested: 1e-6,
            relation: 1e-5,
        }
    }
}

impl Tolerances {
    pub fn for_tier(&self, t: Tier) -> f64 {
        match t {
            Tier::Jet => self.jet,
            Tier::Nested => self.nested,
            Tier::Relation => self.relation,
        }
    }
}

/// Relation families, in catalog order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    /// Involution and conservation.
    A,
    /// Product identities and block norms.
    B,
    /// Grading by L2 and L3.
    C,
    /// Diagonal brackets of raising and lowering symmetries.
    D,
    /// Cross brackets of J and K symmetries.
    E,
    /// Quadratic relations.
    F,
    /// Brackets in the polynomial basis.
    G,
    /// Minimal generators and their commutators.
    H,
    /// Euclidean extras.
    I,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!("{self:?}").to_lowercase();
        f.write_str(&s)
    }
}

/// Conditions a point must meet beyond the sampler floors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Floor {
    /// |L2 - L3| bounded away from zero.
    SplitL2L3,
    /// |Q| bounded away from zero.
    QNonzero,
}

pub type Side = Arc<dyn Fn(&Ctx) -> Result<Term> + Send + Sync>;

#[derive(Clone)]
pub struct IdentityRecord {
    pub id: String,
    pub group: Group,
    /// Descriptive label of the relation and where it belongs.
    pub citation: String,
    pub tier: Tier,
    pub lhs: Side,
    pub rhs: Side,
    /// The relation as typeset, when it differs from the verified form.
    /// Reported as a diff, never asserted.
    pub printed: Option<Side>,
    pub nondegeneracy: Vec<Floor>,
}

impl fmt::Debug for IdentityRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityRecord")
            .field("id", &self.id)
            .field("group", &self.group)
            .field("tier", &self.tier)
            .finish()
    }
}

impl IdentityRecord {
    pub fn new<L, R>(id: &str, group: Group, tier: Tier, citation: &str, lhs: L, rhs: R) -> Self
    where
        L: Fn(&Ctx) -> Result<Term> + Send + Sync + 'static,
        R: Fn(&Ctx) -> Result<Term> + Send + Sync + 'static,
    {
        IdentityRecord {
            id: id.to_string(),
            group,
            citation: citation.to_string(),
            tier,
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
            printed: None,
            nondegeneracy: Vec::new(),
        }
    }

    pub fn printed<P>(mut self, f: P) -> Self
    where
        P: Fn(&Ctx) -> Result<Term> + Send + Sync + 'static,
    {
        self.printed = Some(Arc::new(f));
        self
    }

    pub fn needs(mut self, floor: Floor) -> Self {
        self.nondegeneracy.push(floor);
        self
    }
}

/// Evaluation context handed to identity sides.
pub struct Ctx<'a> {
    pub cat: &'a Catalog,
}

impl<'a> Ctx<'a> {
    pub fn new(cat: &'a Catalog) -> Self {
        Ctx { cat }
    }

    pub fn p(&self) -> &SystemParams {
        &self.cat.params
    }

    pub fn j(&self, name: &str) -> Result<Jet> {
        self.cat.require(name)
    }

    pub fn t(&self, name: &str) -> Result<Term> {
        self.cat.term(name)
    }

    pub fn br(&self, a: &str, b: &str) -> Result<Term> {
        Ok(bracket_term(&self.j(a)?, &self.j(b)?))
    }

    /// {outer, {a, b}}; the inner bracket is differentiated numerically.
    pub fn nested(&self, outer: &str, a: &str, b: &str) -> Result<Term> {
        let point = self.cat.point;
        let params = self.cat.params;
        let (a, b) = (a.to_string(), b.to_string());
        let inner = move |y: &[f64; 6]| -> Result<C64> {
            let c = Catalog::evaluate(&point.with_array(*y), &params)?;
            Ok(bracket(&c.require(&a)?, &c.require(&b)?))
        };
        nested_bracket(&self.j(outer)?, inner, &point.to_array())
    }

    pub fn sqrt_l2(&self) -> Result<Term> {
        Ok(Term::of(&self.cat.blocks()?.sqrt_l2))
    }

    pub fn sqrt_l3(&self) -> Result<Term> {
        Ok(Term::of(&self.cat.blocks()?.sqrt_l3))
    }

    fn core_consts(&self) -> (Jet, Jet, Jet) {
        let c = &self.cat.core;
        (
            Jet::constant(c.h.value),
            Jet::constant(c.l2.value),
            Jet::constant(c.l3.value),
        )
    }

    pub fn dp1_dl2(&self) -> Result<Term> {
        let (h, l2, l3) = self.core_consts();
        Ok(Term::of(&reduced::dp1_dl2(h, l2, l3, self.p())?))
    }

    pub fn dp2_dl3(&self) -> Result<Term> {
        let (_, l2, l3) = self.core_consts();
        Ok(Term::of(&reduced::dp2_dl3(l2, l3, self.p())?))
    }

    pub fn dd1_dl3(&self) -> Result<Term> {
        let (_, _, l3) = self.core_consts();
        Ok(Term::of(&reduced::dd1_dl3(l3, self.p())?))
    }

    pub fn dd2_dl2(&self) -> Result<Term> {
        let (_, l2, _) = self.core_consts();
        Ok(Term::of(&reduced::dd2_dl2(l2, self.p())?))
    }

    pub fn check_floors(&self, floors: &[Floor]) -> Result<()> {
        let l2 = self.cat.core.l2.value.re;
        let l3 = self.cat.core.l3.value.re;
        for f in floors {
            match f {
                Floor::SplitL2L3 => {
                    if (l2 - l3).abs() < SPLIT_FLOOR * (l2.abs() + l3.abs()) {
                        return Err(Error::InadmissiblePoint("L2 too close to L3".into()));
                    }
                }
                Floor::QNonzero => {
                    let d = self.p().d();
                    let q = (l3 - l2 - d).powi(2) - 4.0 * d * l2;
                    if q.abs() < Q_FLOOR * (l2 + l3 + d.abs()).powi(2) {
                        return Err(Error::InadmissiblePoint("Q too close to zero".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// |L - R| / max(|L|, |R|, 1, summand magnitudes).
pub fn relative_residual(l: Term, r: Term) -> f64 {
    (l.value - r.value).norm() / scale_of(l, r)
}

pub fn scale_of(l: Term, r: Term) -> f64 {
    l.scale().max(r.scale()).max(1.0)
}

/// One evaluation of an identity at a point.
#[derive(Clone, Copy, Debug)]
pub struct Evaluation {
    pub lhs: Term,
    pub rhs: Term,
    pub residual: f64,
    pub printed_rhs: Option<Term>,
}

pub fn evaluate_at(rec: &IdentityRecord, cat: &Catalog) -> Result<Evaluation> {
    let ctx = Ctx::new(cat);
    ctx.check_floors(&rec.nondegeneracy)?;
    let lhs = (rec.lhs)(&ctx)?;
    let rhs = (rec.rhs)(&ctx)?;
    if !lhs.is_finite() || !rhs.is_finite() {
        return Err(Error::NonFinite("identity side"));
    }
    let printed_rhs = match &rec.printed {
        Some(f) => f(&ctx).ok(),
        None => None,
    };
    Ok(Evaluation {
        lhs,
        rhs,
        residual: relative_residual(lhs, rhs),
        printed_rhs,
    })
}

pub fn check_identity(rec: &IdentityRecord, x: &PhasePoint, p: &SystemParams) -> Result<f64> {
    let cat = Catalog::evaluate(x, p)?;
    Ok(evaluate_at(rec, &cat)?.residual)
}

/// Best-fit scalar c with LHS ≈ c·printed, and the raw printed residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedDiff {
    pub best_fit_scale_re: f64,
    pub best_fit_scale_im: f64,
    pub max_residual: f64,
    pub median_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub id: String,
    pub group: Group,
    pub citation: String,
    pub tier: Tier,
    pub tolerance: f64,
    pub points: usize,
    pub max_residual: f64,
    pub median_residual: f64,
    /// Points with residual above tolerance or with an evaluation error.
    pub failures: usize,
    /// Evaluation errors among the failures, first message kept.
    pub errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed: Option<PrintedDiff>,
    pub pass: bool,
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn summarize(
    rec: &IdentityRecord,
    tol: f64,
    evals: &[std::result::Result<Evaluation, Error>],
) -> ResidualStats {
    let mut res = Vec::new();
    let mut errors = 0;
    let mut first_error = None;
    let (mut num, mut den) = (C64::new(0.0, 0.0), 0.0);
    let mut pres = Vec::new();
    for e in evals {
        match e {
            Ok(ev) => {
                res.push(ev.residual);
                if let Some(pr) = ev.printed_rhs {
                    let s = scale_of(ev.lhs, pr);
                    let (l, r) = (ev.lhs.value / s, pr.value / s);
                    num += r.conj() * l;
                    den += r.norm_sqr();
                    pres.push((ev.lhs.value - pr.value).norm() / s);
                }
            }
            Err(err) => {
                errors += 1;
                first_error.get_or_insert_with(|| err.to_string());
            }
        }
    }
    let over = res.iter().filter(|r| r.is_nan() || **r > tol).count();
    let failures = over + errors;
    let printed = rec.printed.as_ref().map(|_| {
        let c = if den > 0.0 {
            num / den
        } else {
            C64::new(f64::NAN, f64::NAN)
        };
        PrintedDiff {
            best_fit_scale_re: c.re,
            best_fit_scale_im: c.im,
            max_residual: pres.iter().cloned().fold(0.0, f64::max),
            median_residual: median(&pres),
        }
    });
    ResidualStats {
        id: rec.id.clone(),
        group: rec.group,
        citation: rec.citation.clone(),
        tier: rec.tier,
        tolerance: tol,
        points: evals.len(),
        max_residual: res.iter().cloned().fold(0.0, f64::max),
        median_residual: median(&res),
        failures,
        errors,
        first_error,
        printed,
        pass: failures == 0 && !evals.is_empty(),
    }
}

#[cfg(feature = "parallel")]
fn map_points<T: Send, F: Fn(&PhasePoint) -> T + Sync + Send>(pts: &[PhasePoint], f: F) -> Vec<T> {
    use rayon::prelude::*;
    pts.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<T, F: Fn(&PhasePoint) -> T>(pts: &[PhasePoint], f: F) -> Vec<T> {
    pts.iter().map(f).collect()
}

/// Checks each identity at the same `n` admissible points. Points are
/// drawn sequentially from the seed, evaluation may run in parallel, and
/// results are collected in point order, so output is deterministic.
pub fn batch_check(
    ids: &[IdentityRecord],
    p: &SystemParams,
    cfg: SamplerConfig,
    n: usize,
    tol: &Tolerances,
) -> Result<Vec<ResidualStats>> {
    let pts = Sampler::new(p, cfg).sample(n)?;
    check_at_points(ids, p, &pts, tol)
}

pub fn check_at_points(
    ids: &[IdentityRecord],
    p: &SystemParams,
    pts: &[PhasePoint],
    tol: &Tolerances,
) -> Result<Vec<ResidualStats>> {
    if pts.is_empty() {
        return Err(Error::Config("number of points must be at least 1".into()));
    }
    let per_point: Vec<Vec<std::result::Result<Evaluation, Error>>> =
        map_points(pts, |x| match Catalog::evaluate(x, p) {
            Ok(cat) => ids.iter().map(|r| evaluate_at(r, &cat)).collect(),
            Err(e) => ids.iter().map(|_| Err(e.clone())).collect(),
        });
    Ok(ids
        .iter()
        .enumerate()
        .map(|(k, rec)| {
            let evals: Vec<_> = per_point.iter().map(|row| row[k].clone()).collect();
            summarize(rec, tol.for_tier(rec.tier), &evals)
        })
        .collect())
}
