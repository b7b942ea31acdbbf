//! Four-tier network model: scenario configuration, realizations and the
//! closed-form per-tier intensities and power densities.
//!
//! Tier 1 is a stationary macro process (Poisson or perturbed triangular
//! lattice). Tier 2 is a Poisson process on the macro Voronoi edges, tier 3
//! an independent thinning of the macro Voronoi vertices, and tier 4 an
//! independent small-cell process (Poisson or Matérn cluster).

use serde::{Deserialize, Serialize};

use crate::coverage::PathLossModel;
use crate::error::{HetnetError, Result};
use crate::geometry::{Point, PointSet, Tier, Window};
use crate::point_processes::{
    sample_homogeneous_ppp, sample_matern_cluster, sample_perturbed_triangular_lattice, thin,
    LatticePerturbation, MaternClusterParams,
};
use crate::rng::RandomStream;
use crate::tessellation::{compute_voronoi, interior_vertices, sample_ppp_on_edges, Tessellation};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MacroVariant {
    Ppp,
    PerturbedLattice { perturbation_variance: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroTier {
    pub lambda_per_area: f64,
    #[serde(flatten)]
    pub variant: MacroVariant,
    pub power_dbm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeTier {
    pub mu_per_length: f64,
    pub power_dbm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexTier {
    pub retain_prob: f64,
    pub power_dbm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SmallCellVariant {
    Ppp {
        nu_per_area: f64,
    },
    MaternCluster {
        parent_per_area: f64,
        mean_points_per_cluster: f64,
        cluster_radius: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallTier {
    #[serde(flatten)]
    pub variant: SmallCellVariant,
    pub power_dbm: f64,
}

impl SmallTier {
    pub fn cluster_params(&self) -> Option<MaternClusterParams> {
        match self.variant {
            SmallCellVariant::Ppp { .. } => None,
            SmallCellVariant::MaternCluster {
                parent_per_area,
                mean_points_per_cluster,
                cluster_radius,
            } => Some(MaternClusterParams {
                parent_per_area,
                mean_points_per_cluster,
                cluster_radius,
            }),
        }
    }

    pub fn intensity(&self) -> f64 {
        match self.variant {
            SmallCellVariant::Ppp { nu_per_area } => nu_per_area,
            SmallCellVariant::MaternCluster {
                parent_per_area,
                mean_points_per_cluster,
                ..
            } => parent_per_area * mean_points_per_cluster,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

/// Full parameterization of one network scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub window: Window,
    /// Sampling margin around the analysis window; `None` means `3/sqrt(lambda)`.
    #[serde(default)]
    pub buffer_margin: Option<f64>,
    pub tier1: MacroTier,
    pub tier2: EdgeTier,
    pub tier3: VertexTier,
    pub tier4: SmallTier,
    pub path_loss: PathLossModel,
    pub threshold_db: f64,
    pub grid: GridSpec,
    pub seed: u64,
}

fn config_err(field: &str, reason: impl Into<String>) -> HetnetError {
    HetnetError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn check_nonneg(field: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(config_err(field, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn check_finite(field: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(config_err(field, format!("must be finite, got {v}")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.window
            .validate()
            .map_err(|e| config_err("window", e.to_string()))?;
        if let Some(m) = self.buffer_margin {
            check_nonneg("buffer_margin", m)?;
        }
        let t1 = &self.tier1;
        check_nonneg("tier1.lambda_per_area", t1.lambda_per_area)?;
        check_finite("tier1.power_dbm", t1.power_dbm)?;
        if let MacroVariant::PerturbedLattice {
            perturbation_variance,
        } = t1.variant
        {
            check_nonneg("tier1.perturbation_variance", perturbation_variance)?;
            if t1.lambda_per_area <= 0.0 {
                return Err(config_err(
                    "tier1.lambda_per_area",
                    "lattice variant needs a positive density",
                ));
            }
        }
        check_nonneg("tier2.mu_per_length", self.tier2.mu_per_length)?;
        check_finite("tier2.power_dbm", self.tier2.power_dbm)?;
        let p = self.tier3.retain_prob;
        if !(0.0..=1.0).contains(&p) {
            return Err(config_err("tier3.retain_prob", format!("must lie in [0, 1], got {p}")));
        }
        check_finite("tier3.power_dbm", self.tier3.power_dbm)?;
        if (self.tier2.mu_per_length > 0.0 || p > 0.0) && t1.lambda_per_area <= 0.0 {
            return Err(config_err(
                "tier1.lambda_per_area",
                "must be > 0 when tier 2 or tier 3 is active",
            ));
        }
        match self.tier4.variant {
            SmallCellVariant::Ppp { nu_per_area } => check_nonneg("tier4.nu_per_area", nu_per_area)?,
            SmallCellVariant::MaternCluster {
                parent_per_area,
                mean_points_per_cluster,
                cluster_radius,
            } => {
                check_nonneg("tier4.parent_per_area", parent_per_area)?;
                check_nonneg("tier4.mean_points_per_cluster", mean_points_per_cluster)?;
                if !cluster_radius.is_finite() || cluster_radius <= 0.0 {
                    return Err(config_err(
                        "tier4.cluster_radius",
                        format!("must be > 0, got {cluster_radius}"),
                    ));
                }
            }
        }
        check_finite("tier4.power_dbm", self.tier4.power_dbm)?;
        self.path_loss
            .validate()
            .map_err(|e| config_err("path_loss", e.to_string()))?;
        check_finite("threshold_db", self.threshold_db)?;
        if self.grid.nx < 2 || self.grid.ny < 2 {
            return Err(config_err(
                "grid",
                format!("need at least 2x2 pixels, got {}x{}", self.grid.nx, self.grid.ny),
            ));
        }
        Ok(())
    }

    pub fn tier_power_dbm(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.tier1.power_dbm,
            Tier::Edge => self.tier2.power_dbm,
            Tier::Vertex => self.tier3.power_dbm,
            Tier::Small => self.tier4.power_dbm,
        }
    }

    /// Margin actually used around the analysis window.
    pub fn effective_margin(&self) -> f64 {
        match self.buffer_margin {
            Some(m) => m,
            None if self.tier1.lambda_per_area > 0.0 => 3.0 / self.tier1.lambda_per_area.sqrt(),
            None => 0.0,
        }
    }

    pub fn sampling_window(&self) -> Result<Window> {
        self.window.expand(self.effective_margin())
    }
}

/// Per-tier values in tier order 1..=4.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct TierIntensities(pub [f64; 4]);

impl TierIntensities {
    pub fn get(&self, tier: Tier) -> f64 {
        self.0[tier.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// `(lambda, 2 mu sqrt(lambda), 2 p lambda, nu)`, with `nu = M nu_p` for the
/// cluster variant.
pub fn theoretical_tier_intensities(scenario: &ScenarioConfig) -> TierIntensities {
    let lambda = scenario.tier1.lambda_per_area;
    TierIntensities([
        lambda,
        2.0 * scenario.tier2.mu_per_length * lambda.sqrt(),
        2.0 * scenario.tier3.retain_prob * lambda,
        scenario.tier4.intensity(),
    ])
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Expected transmit power per unit area, in watts.
pub fn expected_power_density(scenario: &ScenarioConfig) -> f64 {
    let ints = theoretical_tier_intensities(scenario);
    Tier::ALL
        .iter()
        .map(|&t| ints.get(t) * dbm_to_watts(scenario.tier_power_dbm(t)))
        .sum()
}

/// One tier of a realization with its per-tier transmit power.
#[derive(Clone, Debug, PartialEq)]
pub struct TierLayer {
    pub points: PointSet,
    pub power_dbm: f64,
}

/// A sampled network. Tier point sets cover the whole sampling window
/// (analysis window plus margin); reporting restricts to the analysis window.
#[derive(Clone, Debug)]
pub struct NetworkRealization {
    pub scenario: ScenarioConfig,
    pub seed: u64,
    pub analysis_window: Window,
    pub sampling_window: Window,
    pub layers: [TierLayer; 4],
    pub tessellation: Option<Tessellation>,
    pub cluster_parents: Option<PointSet>,
}

impl NetworkRealization {
    pub fn layer(&self, tier: Tier) -> &TierLayer {
        &self.layers[tier.index()]
    }

    /// Tier points inside the analysis window.
    pub fn reported(&self, tier: Tier) -> PointSet {
        self.layer(tier).points.restricted_to(&self.analysis_window)
    }

    pub fn total_bs_count(&self) -> usize {
        self.layers.iter().map(|l| l.points.len()).sum()
    }

    /// Copy with the given tiers emptied.
    pub fn without_tiers(&self, tiers: &[Tier]) -> NetworkRealization {
        let mut r = self.clone();
        for t in tiers {
            r.layers[t.index()].points.points.clear();
        }
        r
    }

    /// All base stations as `(tier, point, power_dbm)`, analysis window only.
    pub fn reported_stations(&self) -> Vec<(Tier, Point, f64)> {
        Tier::ALL
            .iter()
            .flat_map(|&t| {
                let l = self.layer(t);
                l.points
                    .iter()
                    .filter(|p| self.analysis_window.contains(p))
                    .map(move |&p| (t, p, l.power_dbm))
            })
            .collect()
    }
}

pub fn build_realization(scenario: &ScenarioConfig, seed: u64) -> Result<NetworkRealization> {
    scenario.validate()?;
    let analysis = scenario.window;
    let sampling = scenario.sampling_window()?;

    let t1 = &scenario.tier1;
    let macro_pts = match t1.variant {
        MacroVariant::Ppp => sample_homogeneous_ppp(
            &sampling,
            t1.lambda_per_area,
            Tier::Macro,
            &RandomStream::new(seed, "tier1"),
        )?,
        MacroVariant::PerturbedLattice {
            perturbation_variance,
        } => sample_perturbed_triangular_lattice(
            &sampling,
            t1.lambda_per_area,
            LatticePerturbation::new(perturbation_variance)?,
            Tier::Macro,
            &RandomStream::new(seed, "tier1"),
        )?,
    };

    let mu = scenario.tier2.mu_per_length;
    let p = scenario.tier3.retain_prob;
    let needs_tess = mu > 0.0 || p > 0.0;
    let tessellation = if macro_pts.len() >= 2 {
        Some(compute_voronoi(&macro_pts, &sampling)?)
    } else if needs_tess {
        return Err(HetnetError::DegenerateScenario(format!(
            "tiers 2/3 need at least 2 macro sites, realization has {}",
            macro_pts.len()
        )));
    } else {
        None
    };

    let (edge_pts, vertex_pts) = match &tessellation {
        Some(tess) if needs_tess => (
            sample_ppp_on_edges(tess, mu, &sampling, &RandomStream::new(seed, "tier2"))?,
            thin(
                &interior_vertices(tess, &sampling),
                p,
                &RandomStream::new(seed, "tier3"),
            )?,
        ),
        _ => (PointSet::empty(Tier::Edge), PointSet::empty(Tier::Vertex)),
    };

    let (small_pts, cluster_parents) = match scenario.tier4.cluster_params() {
        None => (
            sample_homogeneous_ppp(
                &sampling,
                scenario.tier4.intensity(),
                Tier::Small,
                &RandomStream::new(seed, "tier4"),
            )?,
            None,
        ),
        Some(params) => {
            let c = sample_matern_cluster(&sampling, &params, Tier::Small, &RandomStream::new(seed, "tier4"))?;
            (c.daughters, Some(c.parents))
        }
    };

    let layer = |points: PointSet, tier: Tier| TierLayer {
        points,
        power_dbm: scenario.tier_power_dbm(tier),
    };
    Ok(NetworkRealization {
        scenario: scenario.clone(),
        seed,
        analysis_window: analysis,
        sampling_window: sampling,
        layers: [
            layer(macro_pts, Tier::Macro),
            layer(edge_pts, Tier::Edge),
            layer(vertex_pts, Tier::Vertex),
            layer(small_pts, Tier::Small),
        ],
        tessellation,
        cluster_parents,
    })
}

/// Sum of transmit powers of all base stations in the analysis window (W).
pub fn realized_total_power(real: &NetworkRealization) -> f64 {
    real.reported_stations()
        .iter()
        .map(|(_, _, dbm)| dbm_to_watts(*dbm))
        .sum()
}
