//! Simulation and analysis of a four-tier dependent cellular network.
//!
//! Macro base stations form a stationary point process. Additional tiers
//! are placed on the macro Voronoi edges (a Poisson process per unit
//! length) and at the macro Voronoi vertices (an independent thinning),
//! while an independent small-cell tier is either Poisson or a Matérn
//! cluster process. On top of the realizations the crate evaluates
//! received-signal-strength rasters, coverage fractions and Monte Carlo
//! estimates of the per-tier intensities.

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod coverage;
pub mod error;
pub mod export;
pub mod geometry;
pub mod model;
pub mod point_processes;
pub mod presets;
pub mod rng;
pub mod statistics;
pub mod tessellation;

pub use coverage::{
    calibrate_alpha, compute_rss_grid, coverage_report, rss_db, CoverageReport, PathLossModel,
    RssGrid,
};
pub use error::{HetnetError, Result};
pub use geometry::{Point, PointSet, Tier, Window};
pub use model::{
    build_realization, dbm_to_watts, expected_power_density, realized_total_power,
    theoretical_tier_intensities, NetworkRealization, ScenarioConfig, TierIntensities,
};
pub use presets::{preset, PRESET_NAMES};
pub use rng::RandomStream;
pub use statistics::{empirical_intensity, monte_carlo, McSummary, Metric};
