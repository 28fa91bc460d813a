//! Lower-bound certificates, random inputs, parameter sweeps and power-law fits.

pub mod fit;
pub mod lemma;
pub mod random;
pub mod report;
pub mod sweep;

pub use fit::{decades_spanned, fit_powerlaw, log_spaced, FitModel, PowerFit};
pub use lemma::{lemma_check, lemma_check_sampled, lemma_ws, lemma_ws2, LemmaCheckResult, LemmaKind};
pub use random::{random_wrinkle_field, WrinkleField};
pub use report::ScalingReport;
pub use sweep::{sweep_excess, sweep_values, SweepMode, SweepOptions};
