//! Giant components of configuration-model random graphs.
//!
//! The library computes the limiting fraction `zeta_cm` of vertices in the
//! largest component of a configuration-model graph with i.i.d. degrees,
//! via the survival probability of the associated branching process with
//! downshifted size-biased offspring. Alongside it: the size-biasing /
//! thinning calculus on degree laws, stochastic order checks, closed-form
//! upper bounds, and a multigraph simulator for validating the analytic
//! answers.

pub mod branching;
pub mod dist;
mod error;
pub mod json;
pub mod mixing;
mod numeric;
pub mod orders;
pub mod pmf;
pub mod sim;

pub use dist::DegreeDistribution;
pub use error::{Error, Result};
pub use mixing::MixingDistribution;
pub use pmf::FinitePmf;

/// The three-point law p = (1/8)delta_1 + (6/8)delta_2 + (1/8)delta_3:
/// one half of the pair showing that convex degree ordering does not
/// force an ordering of giant-component fractions.
pub fn counterexample_p() -> FinitePmf {
    FinitePmf::from_pairs(&[(1, 1.0 / 8.0), (2, 6.0 / 8.0), (3, 1.0 / 8.0)]).expect("valid pmf")
}

/// The five-point law q obtained from p by a mean-preserving spread;
/// q dominates p in convex order yet has the larger giant component.
pub fn counterexample_q() -> FinitePmf {
    FinitePmf::from_pairs(&[
        (0, 1.0 / 16.0),
        (1, 2.0 / 16.0),
        (2, 10.0 / 16.0),
        (3, 2.0 / 16.0),
        (4, 1.0 / 16.0),
    ])
    .expect("valid pmf")
}
