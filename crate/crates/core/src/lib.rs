//! Finite-precision computation in the Iwasawa algebra `Z_p[[T]]`.
//!
//! The library works with exact arithmetic at explicit, pessimistically
//! propagated precision: integers mod `p^M`, series mod `(p^M, T^N)`, and
//! exact integers wherever a verdict must be definitive. On top of that it
//! provides:
//!
//! - [`padic`]: arithmetic in `Z/p^M` with valuations, and characters with
//!   values in the principal units;
//! - [`series`]: truncated series arithmetic, Weierstrass preparation and the
//!   mu/lambda invariants, the omega family, determinants and resultants;
//! - [`exact`]: exact integer polynomials and resultants;
//! - [`invariants`]: characteristic polynomials of torsion modules, twisting
//!   by a character, and the finiteness criterion for coinvariants at each
//!   level of the tower;
//! - [`duality`]: finite-level group rings, restriction/corestriction, the
//!   self-duality of the Pontryagin pairing and its commuting diagrams, and
//!   growth tables for direct limits;
//! - [`ledger`]: integer bookkeeping for declared Selmer-group data (corank
//!   accounting, non-primitive lambdas, the lambda-difference comparison);
//! - [`selftest`]: the aggregated invariant suite behind the `selftest`
//!   command.

pub mod duality;
pub mod error;
pub mod exact;
pub mod invariants;
pub mod ledger;
pub mod padic;
pub mod selftest;
pub mod series;

pub use error::{Error, Result};
pub use exact::IntPoly;
pub use invariants::{CharPoly, ElementaryModule, Finiteness, FinitenessMode};
pub use padic::{Character, PadicInt, Valuation};
pub use series::{DistinguishedPoly, LambdaElem, WeierstrassForm};
