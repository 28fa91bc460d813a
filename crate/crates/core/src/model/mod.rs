//! Parameters, derived scales, radial grids and field containers.

pub mod angular;
pub mod config;
pub mod grid;
pub mod params;
pub mod profile;
pub mod state;

pub use angular::{AngularFamily, AngularField, AngularSlice, JetMode, Trig, TrigMode};
pub use config::RunConfig;
pub use grid::{build_grid, GridScheme, RadialGrid};
pub use params::{exponents, validate_and_derive, DerivedScales, ModelParams};
pub use profile::RadialProfile;
pub use state::{SheetSlice, SheetSource, SheetState};

/// Factor converting angular averages into integrals over `[0, 2π)`.
pub const ANGULAR_MEASURE: f64 = 2.0 * std::f64::consts::PI;
