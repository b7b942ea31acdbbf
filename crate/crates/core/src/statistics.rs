//! Empirical estimators and Monte Carlo aggregation over independent
//! realizations.
//!
//! Realization `k` of a batch uses the seed `derive_seed(scenario.seed, k)`,
//! and values are reduced in index order, so results do not depend on the
//! number of worker threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::{compute_rss_grid, coverage_report, CoverageReport};
use crate::error::{HetnetError, Result};
use crate::geometry::{PointSet, Tier, Window};
use crate::model::{
    build_realization, expected_power_density, realized_total_power, theoretical_tier_intensities,
    MacroVariant, NetworkRealization, ScenarioConfig,
};
use crate::rng::derive_seed;
use crate::tessellation::{
    cell_perimeter_totals, edge_length_density, interior_vertices, mean_cell_perimeter,
};

/// z-quantile for a two-sided 99% normal interval.
pub const Z99: f64 = 2.575_829_303_548_901;

pub fn empirical_intensity(points: &PointSet, window: &Window) -> f64 {
    points.count_in(window) as f64 / window.area()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    TierIntensity(Tier),
    TotalIntensity,
    VertexIntensity,
    EdgeLengthDensity,
    MeanPerimeter,
    UncoveredFraction,
    CoveredFraction(Tier),
    StrongestFraction(Tier),
    TotalPower,
}

impl Metric {
    pub fn all() -> Vec<Metric> {
        let mut v: Vec<Metric> = Tier::ALL.iter().map(|&t| Metric::TierIntensity(t)).collect();
        v.extend([
            Metric::TotalIntensity,
            Metric::VertexIntensity,
            Metric::EdgeLengthDensity,
            Metric::MeanPerimeter,
            Metric::UncoveredFraction,
        ]);
        v.extend(Tier::ALL.iter().map(|&t| Metric::CoveredFraction(t)));
        v.extend(Tier::ALL.iter().map(|&t| Metric::StrongestFraction(t)));
        v.push(Metric::TotalPower);
        v
    }

    pub fn name(&self) -> String {
        match self {
            Metric::TierIntensity(t) => format!("tier{t}_intensity"),
            Metric::TotalIntensity => "total_intensity".into(),
            Metric::VertexIntensity => "vertex_intensity".into(),
            Metric::EdgeLengthDensity => "edge_length_density".into(),
            Metric::MeanPerimeter => "mean_perimeter".into(),
            Metric::UncoveredFraction => "uncovered_fraction".into(),
            Metric::CoveredFraction(t) => format!("tier{t}_covered_fraction"),
            Metric::StrongestFraction(t) => format!("tier{t}_strongest_fraction"),
            Metric::TotalPower => "total_power_w".into(),
        }
    }

    /// Whether the metric needs an RSS raster.
    pub fn needs_grid(&self) -> bool {
        matches!(
            self,
            Metric::UncoveredFraction | Metric::CoveredFraction(_) | Metric::StrongestFraction(_)
        )
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Metric {
    type Err = HetnetError;

    fn from_str(s: &str) -> Result<Self> {
        Metric::all()
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| HetnetError::UnknownMetric {
                name: s.to_string(),
                known: Metric::all().iter().map(|m| m.name()).collect::<Vec<_>>().join(", "),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub metric: String,
    pub samples: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` when fewer than two samples.
    pub std_dev: Option<f64>,
    pub std_error: Option<f64>,
    pub ci99_low: f64,
    pub ci99_high: f64,
}

impl McSummary {
    pub fn from_samples(metric: impl Into<String>, values: &[f64]) -> McSummary {
        let k = values.len();
        let mean = if k == 0 { f64::NAN } else { neumaier_sum(values.iter().copied()) / k as f64 };
        let (std_dev, std_error) = if k >= 2 {
            let ss = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
            let sd = (ss / (k - 1) as f64).sqrt();
            (Some(sd), Some(sd / (k as f64).sqrt()))
        } else {
            (None, None)
        };
        let half = std_error.map_or(0.0, |se| Z99 * se);
        McSummary {
            metric: metric.into(),
            samples: k,
            mean,
            std_dev,
            std_error,
            ci99_low: mean - half,
            ci99_high: mean + half,
        }
    }

    /// Pooled ratio `sum(w v) / sum(w)` over realizations, with the
    /// delta-method standard error. `std_dev` is reported as
    /// `std_error * sqrt(K)`.
    pub fn from_weighted(metric: impl Into<String>, values: &[f64], weights: &[f64]) -> McSummary {
        assert_eq!(values.len(), weights.len(), "one weight per value");
        let k = values.len();
        let w_total = neumaier_sum(weights.iter().copied());
        let mean = if k == 0 || w_total <= 0.0 {
            f64::NAN
        } else {
            neumaier_sum(values.iter().zip(weights).map(|(v, w)| v * w)) / w_total
        };
        let std_error = (k >= 2 && mean.is_finite()).then(|| {
            let ss = neumaier_sum(
                values
                    .iter()
                    .zip(weights)
                    .map(|(v, w)| (w * (v - mean)).powi(2)),
            );
            (ss * k as f64 / (k - 1) as f64).sqrt() / w_total
        });
        let half = std_error.map_or(0.0, |se| Z99 * se);
        McSummary {
            metric: metric.into(),
            samples: k,
            mean,
            std_dev: std_error.map(|se| se * (k as f64).sqrt()),
            std_error,
            ci99_low: mean - half,
            ci99_high: mean + half,
        }
    }

    /// `|mean - expected| <= n_sigma * std_error`.
    pub fn within_sigma(&self, expected: f64, n_sigma: f64) -> bool {
        match self.std_error {
            Some(se) => (self.mean - expected).abs() <= n_sigma * se,
            None => false,
        }
    }

    pub const CSV_HEADER: &'static str = "metric,samples,mean,std_dev,std_error,ci99_low,ci99_high";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        format!(
            "{},{},{},{},{},{},{}",
            self.metric,
            self.samples,
            self.mean,
            opt(self.std_dev),
            opt(self.std_error),
            self.ci99_low,
            self.ci99_high
        )
    }
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Closed-form expectation of `metric` under `scenario`, where one exists.
///
/// Edge-length and perimeter laws hold for a Poisson macro tier only; the
/// vertex law (two vertices per cell) holds for any macro process in
/// general position. Coverage fractions have no closed form here.
pub fn theoretical_value(scenario: &ScenarioConfig, metric: Metric) -> Option<f64> {
    let lambda = scenario.tier1.lambda_per_area;
    let poisson_macro = matches!(scenario.tier1.variant, MacroVariant::Ppp) && lambda > 0.0;
    // 2 mu sqrt(lambda) is the Poisson edge-length law
    let edge_law = poisson_macro || scenario.tier2.mu_per_length == 0.0;
    let theory = theoretical_tier_intensities(scenario);
    match metric {
        Metric::TierIntensity(Tier::Edge) | Metric::TotalIntensity | Metric::TotalPower if !edge_law => None,
        Metric::TierIntensity(t) => Some(theory.get(t)),
        Metric::TotalIntensity => Some(theory.total()),
        Metric::VertexIntensity if lambda > 0.0 => Some(2.0 * lambda),
        Metric::EdgeLengthDensity if poisson_macro => Some(2.0 * lambda.sqrt()),
        Metric::MeanPerimeter if poisson_macro => Some(4.0 / lambda.sqrt()),
        Metric::TotalPower => Some(expected_power_density(scenario) * scenario.window.area()),
        _ => None,
    }
}

/// Evaluate `metrics` on one realization.
pub fn evaluate_metrics(real: &NetworkRealization, metrics: &[Metric]) -> Result<Vec<f64>> {
    Ok(evaluate_weighted(real, metrics)?.into_iter().map(|(v, _)| v).collect())
}

/// Values with their pooling weights: the number of cells for
/// `MeanPerimeter`, 1 otherwise.
fn evaluate_weighted(real: &NetworkRealization, metrics: &[Metric]) -> Result<Vec<(f64, f64)>> {
    let scenario = &real.scenario;
    let analysis = &real.analysis_window;
    let report: Option<CoverageReport> = if metrics.iter().any(Metric::needs_grid) {
        let grid = compute_rss_grid(real, scenario.grid, &scenario.path_loss)?;
        Some(coverage_report(&grid, scenario.threshold_db, real))
    } else {
        None
    };
    let tess = || {
        real.tessellation.as_ref().ok_or_else(|| {
            HetnetError::DegenerateScenario("realization has no macro tessellation".into())
        })
    };
    metrics
        .iter()
        .map(|m| {
            let v = match m {
                Metric::TierIntensity(t) => empirical_intensity(&real.layer(*t).points, analysis),
                Metric::TotalIntensity => Tier::ALL
                    .iter()
                    .map(|t| empirical_intensity(&real.layer(*t).points, analysis))
                    .sum(),
                Metric::VertexIntensity => {
                    interior_vertices(tess()?, analysis).len() as f64 / analysis.area()
                }
                Metric::EdgeLengthDensity => edge_length_density(tess()?, analysis),
                Metric::MeanPerimeter => {
                    let t = tess()?;
                    let (_, cells) = cell_perimeter_totals(t, analysis);
                    return Ok((mean_cell_perimeter(t, analysis)?, cells as f64));
                }
                Metric::TotalPower => realized_total_power(real),
                Metric::UncoveredFraction => report.as_ref().expect("grid").uncovered_fraction,
                Metric::CoveredFraction(t) => report.as_ref().expect("grid").covered_fraction[t.index()],
                Metric::StrongestFraction(t) => {
                    report.as_ref().expect("grid").strongest_fraction[t.index()]
                }
            };
            Ok((v, 1.0))
        })
        .collect()
}

fn sample_weighted(
    scenario: &ScenarioConfig,
    realizations: usize,
    metrics: &[Metric],
    threads: Option<usize>,
) -> Result<Vec<Vec<(f64, f64)>>> {
    if realizations == 0 {
        return Err(HetnetError::Parameter {
            name: "realizations",
            reason: "need at least one realization".into(),
        });
    }
    scenario.validate()?;
    let run = || -> Result<Vec<Vec<(f64, f64)>>> {
        (0..realizations)
            .into_par_iter()
            .map(|k| {
                let real = build_realization(scenario, derive_seed(scenario.seed, k as u64))?;
                evaluate_weighted(&real, metrics)
            })
            .collect()
    };
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HetnetError::Parameter {
                name: "threads",
                reason: e.to_string(),
            })?
            .install(run)?,
        None => run()?,
    };
    Ok((0..metrics.len())
        .map(|m| rows.iter().map(|r| r[m]).collect())
        .collect())
}

/// Raw per-realization values: `result[m][k]` is metric `m` on realization `k`.
/// `threads = Some(n)` runs on a dedicated pool of `n` workers.
pub fn sample_metrics(
    scenario: &ScenarioConfig,
    realizations: usize,
    metrics: &[Metric],
    threads: Option<usize>,
) -> Result<Vec<Vec<f64>>> {
    Ok(sample_weighted(scenario, realizations, metrics, threads)?
        .into_iter()
        .map(|col| col.into_iter().map(|(v, _)| v).collect())
        .collect())
}

/// Summaries over `realizations` realizations. `mean_perimeter` is pooled
/// over cells (total perimeter over total cell count), which removes the
/// small-window bias of averaging per-window means.
pub fn monte_carlo_metrics(
    scenario: &ScenarioConfig,
    realizations: usize,
    metrics: &[Metric],
    threads: Option<usize>,
) -> Result<Vec<McSummary>> {
    let samples = sample_weighted(scenario, realizations, metrics, threads)?;
    Ok(metrics
        .iter()
        .zip(&samples)
        .map(|(m, col)| {
            let (v, w): (Vec<f64>, Vec<f64>) = col.iter().copied().unzip();
            match m {
                Metric::MeanPerimeter => McSummary::from_weighted(m.name(), &v, &w),
                _ => McSummary::from_samples(m.name(), &v),
            }
        })
        .collect())
}

/// Run `realizations` independent realizations and summarize the named metric.
pub fn monte_carlo(scenario: &ScenarioConfig, realizations: usize, metric: &str) -> Result<McSummary> {
    let m: Metric = metric.parse()?;
    let mut out = monte_carlo_metrics(scenario, realizations, &[m], None)?;
    Ok(out.remove(0))
}
