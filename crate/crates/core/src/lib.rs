//! Čech cocycles for Deligne and hermitian-holomorphic Deligne cohomology over sector
//! covers of punctured domains: tame symbols, higher symbols of line bundles, the
//! Heisenberg model, numerical holonomy, and the Hodge–Tate period calculus.

pub mod bundle_data;
pub mod cech_engine;
pub mod cover_nerve;
pub mod error;
pub mod exact_algebra;
pub mod form_calculus;
pub mod heisenberg_model;
pub mod hodge_tate;
pub mod holonomy;
pub mod report;
pub mod symbols;

pub use error::{Error, Result};
