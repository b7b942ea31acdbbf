use hetnet_core::statistics::{monte_carlo_metrics, theoretical_value, Metric};
use hetnet_core::{ScenarioConfig, Tier};

use crate::CliError;

/// Intensity estimators are only compared against theory from this many
/// realizations on.
pub const MIN_REALIZATIONS: usize = 50;

fn candidate_metrics(cfg: &ScenarioConfig) -> Vec<Metric> {
    let mut v: Vec<Metric> = Tier::ALL.iter().map(|&t| Metric::TierIntensity(t)).collect();
    v.push(Metric::TotalIntensity);
    if cfg.tier1.lambda_per_area > 0.0 {
        v.extend([Metric::VertexIntensity, Metric::EdgeLengthDensity, Metric::MeanPerimeter]);
    }
    v.push(Metric::TotalPower);
    v
}

pub fn validate(cfg: &ScenarioConfig, realizations: usize, sigma: f64) -> Result<(), CliError> {
    if realizations < MIN_REALIZATIONS {
        return Err(CliError::Config(format!(
            "refusing intensity checks with {realizations} realizations; need at least {MIN_REALIZATIONS}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(CliError::Config(format!("--sigma must be positive, got {sigma}")));
    }
    let (checked, skipped): (Vec<Metric>, Vec<Metric>) = candidate_metrics(cfg)
        .into_iter()
        .partition(|m| theoretical_value(cfg, *m).is_some());
    let rows = monte_carlo_metrics(cfg, realizations, &checked, None)?;

    println!(
        "scenario {} | K = {realizations} | seed {} | tolerance {sigma} sigma",
        cfg.name.as_deref().unwrap_or("<config>"),
        cfg.seed
    );
    println!(
        "{:<22} {:>14} {:>12} {:>14} {:>8}  result",
        "metric", "mean", "std_error", "expected", "z"
    );
    let mut failures = 0;
    for (m, row) in checked.iter().zip(&rows) {
        let expected = theoretical_value(cfg, *m).expect("partitioned on Some");
        let se = row.std_error.unwrap_or(0.0);
        let diff = row.mean - expected;
        let z = if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
        let pass = row.within_sigma(expected, sigma);
        if !pass {
            failures += 1;
        }
        println!(
            "{:<22} {:>14.6} {:>12.6} {:>14.6} {:>8.2}  {}",
            row.metric,
            row.mean,
            se,
            expected,
            z,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    for m in &skipped {
        println!("{:<22} {:>14} {:>12} {:>14} {:>8}  SKIP (no closed form)", m.name(), "-", "-", "-", "-");
    }
    if failures > 0 {
        return Err(CliError::Validation(format!("{failures} of {} checks failed", checked.len())));
    }
    println!("all {} checks passed", checked.len());
    Ok(())
}
