//! Poisson brackets from jet gradients, plus the finite-difference variant
//! used when the inner argument is itself a bracket.

use super::jet::{Jet, C64};
use super::term::Term;
use crate::error::Result;

/// Initial steps tried for the Ridders tableau, relative to max(1, |x_j|).
/// The estimate with the smallest error bound wins.
pub const NESTED_FD_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Step shrink factor between tableau rows.
const RIDDERS_SHRINK: f64 = 1.4;
const RIDDERS_ROWS: usize = 10;
/// Stop once the error grows by this factor over the best so far.
const RIDDERS_SAFE: f64 = 2.0;

/// {F,G} = sum_j dF/dq_j dG/dp_j - dF/dp_j dG/dq_j.
pub fn bracket(f: &Jet, g: &Jet) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..3 {
        acc += f.grad[j] * g.grad[j + 3] - f.grad[j + 3] * g.grad[j];
    }
    acc
}

/// Bracket carrying the summed magnitude of its six products.
pub fn bracket_term(f: &Jet, g: &Jet) -> Term {
    Term {
        value: bracket(f, g),
        mag: bracket_magnitude(&f.grad, &g.grad),
    }
}

fn bracket_magnitude(df: &[C64; 6], dg: &[C64; 6]) -> f64 {
    (0..3)
        .map(|j| df[j].norm() * dg[j + 3].norm() + df[j + 3].norm() * dg[j].norm())
        .sum()
}

/// One partial derivative by Ridders' polynomial extrapolation of central
/// differences. Steps that leave the domain are skipped by shrinking.
fn ridders<G>(g: &G, x: &[f64; 6], j: usize, h0: f64) -> Result<(C64, f64)>
where
    G: Fn(&[f64; 6]) -> Result<C64>,
{
    let central = |step: f64| -> Result<C64> {
        let mut up = *x;
        let mut dn = *x;
        up[j] += step;
        dn[j] -= step;
        Ok((g(&up)? - g(&dn)?) / (2.0 * step))
    };
    let c2 = RIDDERS_SHRINK * RIDDERS_SHRINK;
    let mut h = h0 * x[j].abs().max(1.0);
    let first = loop {
        match central(h) {
            Ok(v) => break v,
            Err(e) if e.is_point_failure() && h > 1e-9 => h /= RIDDERS_SHRINK,
            Err(e) => return Err(e),
        }
    };
    let mut prev = vec![first];
    let mut best = first;
    let mut err = f64::INFINITY;
    for _ in 1..RIDDERS_ROWS {
        h /= RIDDERS_SHRINK;
        let mut row = Vec::with_capacity(prev.len() + 1);
        row.push(central(h)?);
        let mut fac = c2;
        for m in 1..=prev.len() {
            let next = (row[m - 1] * fac - prev[m - 1]) / (fac - 1.0);
            fac *= c2;
            let e = (next - row[m - 1]).norm().max((next - prev[m - 1]).norm());
            row.push(next);
            if e <= err {
                err = e;
                best = next;
            }
        }
        let last = row.len() - 1;
        let drift = (row[last] - prev[last - 1]).norm();
        prev = row;
        if drift >= RIDDERS_SAFE * err {
            break;
        }
    }
    Ok((best, err))
}

/// Gradient of a value-only function by Ridders extrapolation.
pub fn fd_gradient<G>(g: G, x: &[f64; 6]) -> Result<[C64; 6]>
where
    G: Fn(&[f64; 6]) -> Result<C64>,
{
    let mut out = [C64::new(0.0, 0.0); 6];
    for (j, o) in out.iter_mut().enumerate() {
        let mut best = (C64::new(0.0, 0.0), f64::INFINITY);
        for h0 in NESTED_FD_STEPS {
            let cand = ridders(&g, x, j, h0)?;
            if cand.1 < best.1 {
                best = cand;
            }
        }
        *o = best.0;
    }
    Ok(out)
}

/// {F, G} where F is available as a jet and G only as a value function.
pub fn nested_bracket<G>(outer: &Jet, inner: G, x: &[f64; 6]) -> Result<Term>
where
    G: Fn(&[f64; 6]) -> Result<C64>,
{
    let dg = fd_gradient(inner, x)?;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..3 {
        acc += outer.grad[j] * dg[j + 3] - outer.grad[j + 3] * dg[j];
    }
    Ok(Term {
        value: acc,
        mag: bracket_magnitude(&outer.grad, &dg),
    })
}
