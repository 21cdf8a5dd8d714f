//! Exact computational engine for local monomialization along a valuation.
//!
//! Modules, from the bottom up:
//!
//! * [`valuegroup`]: ordered value groups embedded in the reals by square roots.
//! * [`series`]: polynomials and truncated series with Gauss values.
//! * [`perron`]: Perron transforms of types I and II.
//! * [`lattice`]: the lattice `G`, the semigroups `H` and `I`, module generators.
//! * [`cosets`]: coset decomposition of polynomials and the rewrite in `x`.
//! * [`cuts`]: lifting transforms from the small ring to the big ring, and the solver.
//! * [`certify`]: independent certificate checking.
//! * [`problem`]: problem files.

pub mod certify;
pub mod cosets;
pub mod cuts;
pub mod error;
pub mod intmat;
pub mod lattice;
pub mod linalg;
pub mod num;
pub mod perron;
pub mod problem;
pub mod series;
pub mod valuegroup;

pub use error::{Error, Result};
pub use num::Q;
