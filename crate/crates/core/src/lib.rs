//! Quantum temporal correlators and macrorealism (MR) conditions for
//! N-level spin systems, N = 2..5.
//!
//! The crate computes first- through fourth-order temporal correlators of
//! dichotomic (and trichotomic) observables under projective measurement,
//! evaluates the full family of MR conditions on the resulting data sets
//! (two- and three-time Leggett-Garg inequalities, cycle LG4/LG5,
//! higher-order LGIs, n-time full-set and pentagon inequalities,
//! trichotomic LG2/LG3), and searches parameter space for regimes where
//! the standard LGIs are satisfied while an extended condition is violated.
//!
//! Modules mirror the pipeline: [`numerics`] (dense complex kernel),
//! [`states`] (initial states), [`observables`] (operators and spin models),
//! [`correlators`] (data sets), [`conditions`] (MR condition evaluators),
//! [`search`] (scans and randomized searches), [`shots`] (finite-statistics
//! simulation), [`io`] (JSON/CSV schemas).

pub mod conditions;
pub mod correlators;
pub mod error;
pub mod figures;
pub mod io;
pub mod numerics;
pub mod observables;
pub mod search;
pub mod shots;
pub mod states;

pub use error::{Error, Result};

/// Map a fallible-free iterator in parallel when the `parallel` feature is
/// enabled, sequentially otherwise. Output order matches input order.
pub(crate) fn maybe_par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
