//! Exact enumeration and Monte Carlo laboratory for the free energy of the
//! Sherrington-Kirkpatrick model with an added Curie-Weiss interaction.
//!
//! - [`combinat`]: Catalan numbers, rescaled Chebyshev polynomials, the
//!   binomial change of basis and Wick moments, in checked integer arithmetic.
//! - [`randmat`]: seeded symmetric Gaussian ensembles, the planted (tilted)
//!   ensemble and power traces.
//! - [`cycles`]: signed cycle counts and their spectral counterparts.
//! - [`gibbs`]: Hamiltonian, exact partition function, limit-law targets.
//! - [`experiments`]: replicated Monte Carlo runs and JSON reports.
//! - [`cli`]: the `skcw` command-line front end.

pub mod cli;
pub mod combinat;
pub mod cycles;
pub mod error;
pub mod experiments;
pub mod gibbs;
pub mod randmat;

pub use error::{Error, Result};
