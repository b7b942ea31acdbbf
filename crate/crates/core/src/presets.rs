//! Named scenarios reproducing the published example networks.
//!
//! All presets use a 20 x 20 analysis window, `d0 = 0.01`, the calibrated
//! exponent [`DEFAULT_ALPHA`], a -30 dB threshold and a 500 x 500 raster.

use crate::coverage::{PathLossModel, DEFAULT_ALPHA, DEFAULT_REFERENCE_DISTANCE};
use crate::error::{HetnetError, Result};
use crate::geometry::Window;
use crate::model::{
    EdgeTier, GridSpec, MacroTier, MacroVariant, ScenarioConfig, SmallCellVariant, SmallTier,
    VertexTier,
};

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3_tiers13", "fig_lattice", "fig_cluster"];

pub const PRESET_WINDOW_SIDE: f64 = 20.0;
pub const DEFAULT_THRESHOLD_DB: f64 = -30.0;
pub const DEFAULT_GRID: GridSpec = GridSpec { nx: 500, ny: 500 };

fn base(name: &str, tier1: MacroTier, tier2: EdgeTier, tier3: VertexTier, tier4: SmallTier) -> ScenarioConfig {
    ScenarioConfig {
        name: Some(name.to_string()),
        window: Window::square(PRESET_WINDOW_SIDE).expect("valid window"),
        buffer_margin: None,
        tier1,
        tier2,
        tier3,
        tier4,
        path_loss: PathLossModel {
            reference_distance: DEFAULT_REFERENCE_DISTANCE,
            exponent: DEFAULT_ALPHA,
        },
        threshold_db: DEFAULT_THRESHOLD_DB,
        grid: DEFAULT_GRID,
        seed: 1,
    }
}

fn ppp_macro(lambda: f64, power_dbm: f64) -> MacroTier {
    MacroTier {
        lambda_per_area: lambda,
        variant: MacroVariant::Ppp,
        power_dbm,
    }
}

fn edge(mu: f64, power_dbm: f64) -> EdgeTier {
    EdgeTier {
        mu_per_length: mu,
        power_dbm,
    }
}

fn vertex(p: f64, power_dbm: f64) -> VertexTier {
    VertexTier {
        retain_prob: p,
        power_dbm,
    }
}

fn small_ppp(nu: f64, power_dbm: f64) -> SmallTier {
    SmallTier {
        variant: SmallCellVariant::Ppp { nu_per_area: nu },
        power_dbm,
    }
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let cfg = match name {
        "fig1" => base(
            name,
            ppp_macro(0.2, 50.0),
            edge(1.0, 30.0),
            vertex(1.0, 40.0),
            small_ppp(1.0, 20.0),
        ),
        "fig2" => base(
            name,
            ppp_macro(0.4, 50.0),
            edge(0.0, 30.0),
            vertex(0.0, 40.0),
            small_ppp(1.0, 20.0),
        ),
        "fig3_tiers13" => base(
            name,
            ppp_macro(0.25, 50.0),
            edge(0.0, 30.0),
            vertex(1.0, 33.0),
            small_ppp(0.0, 20.0),
        ),
        "fig_lattice" => base(
            name,
            MacroTier {
                lambda_per_area: 0.1,
                variant: MacroVariant::PerturbedLattice {
                    perturbation_variance: 0.04,
                },
                power_dbm: 50.0,
            },
            edge(1.0, 30.0),
            vertex(0.0, 40.0),
            small_ppp(0.0, 20.0),
        ),
        "fig_cluster" => base(
            name,
            ppp_macro(0.1, 50.0),
            edge(0.0, 30.0),
            vertex(0.0, 40.0),
            SmallTier {
                variant: SmallCellVariant::MaternCluster {
                    parent_per_area: 1.0 / 20.0,
                    mean_points_per_cluster: 10.0,
                    cluster_radius: 1.0,
                },
                power_dbm: 26.0,
            },
        ),
        _ => {
            return Err(HetnetError::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(cfg)
}
