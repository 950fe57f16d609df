//! Relators, lax extensions and (bi)simulations for finite coalgebras.
//!
//! Relations between finite sets live in [`finrel`], set functors built
//! from a small grammar in [`functor`], relators over them in [`relator`],
//! submonoid-induced extensions of exponential functors in [`submonoid`],
//! simulation and behavioural equivalence in [`bisim`] and labelled
//! transition systems in [`lts`]. [`syntax`] parses the textual forms.

pub mod bisim;
pub mod error;
pub mod finrel;
pub mod functor;
pub mod lts;
pub mod relator;
pub mod submonoid;
pub mod syntax;

pub use bisim::{behavioural_equivalence, is_simulation, minimal_witness, similarity, Coalgebra};
pub use error::{Error, Result};
pub use finrel::{FinFun, FinRel, FinSet};
pub use functor::FunctorExpr;
pub use lts::{twisted_relator, Lts, TwistedSpec};
pub use relator::RelatorSpec;
pub use submonoid::UCSubmonoid;
pub use syntax::{parse_functor, parse_relator};
