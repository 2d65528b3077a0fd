//! Complex scalars, jets and Poisson brackets.

pub mod bracket;
pub mod jet;
pub mod term;

pub use bracket::{bracket, bracket_term, fd_gradient, nested_bracket, NESTED_FD_STEPS};
pub use jet::{principal_sqrt, Elementary, Jet, BRANCH_GUARD, C64, DIM, DIV_FLOOR, I, MAX_POWER};
pub use term::Term;

/// Lift six phase-space numbers to coordinate jets.
pub fn lift(x: &[f64; 6]) -> [Jet; 6] {
    std::array::from_fn(|k| Jet::variable(x[k], k))
}
