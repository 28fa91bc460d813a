//! Energy scaling of a thin elastic sheet pressed onto a sphere, in the
//! Föppl–von Kármán model with a Winkler substrate.
//!
//! All energies are radial integrals `∫ (·) r dr` of angular averages.
//! Multiply by [`model::ANGULAR_MEASURE`] for the `∫∫ dθ r dr` normalization.

pub mod construction;
pub mod energy;
pub mod error;
pub mod jet;
pub mod model;
pub mod relaxed;
pub mod scalelab;

pub use error::{Error, Result};
pub use jet::Jet;
