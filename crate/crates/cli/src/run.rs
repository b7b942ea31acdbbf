use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use hetnet_core::coverage::{compute_rss_grid, coverage_report, CoverageReport};
use hetnet_core::export::{
    write_association_csv, write_coverage_pgm, write_coverage_ppm, write_points_csv, write_rss_csv,
    write_summaries_csv,
};
use hetnet_core::rng::derive_seed;
use hetnet_core::statistics::{monte_carlo_metrics, Metric};
use hetnet_core::{
    build_realization, empirical_intensity, expected_power_density, realized_total_power,
    theoretical_tier_intensities, McSummary, ScenarioConfig, Tier,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub realization_seed: u64,
    pub realizations: usize,
    pub versions: Versions,
    pub files: Vec<FileEntry>,
}

#[derive(Serialize, Deserialize)]
pub struct Versions {
    pub hetnet_cli: String,
    pub hetnet_core: String,
}

#[derive(Serialize)]
struct PowerTotals {
    expected_density_w_per_area: f64,
    expected_total_w: f64,
    realized_total_w: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: Option<&'a str>,
    seed: u64,
    realization_seed: u64,
    analysis_area: f64,
    theoretical_intensities: [f64; 4],
    theoretical_total_density: f64,
    empirical_intensities: [f64; 4],
    empirical_total_density: f64,
    base_stations_in_window: [usize; 4],
    coverage: &'a CoverageReport,
    power: PowerTotals,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<&'a [McSummary]>,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))
}

fn finish(w: BufWriter<File>) -> Result<(), CliError> {
    w.into_inner()
        .map_err(|e| CliError::Io(e.to_string()))?
        .sync_all()?;
    Ok(())
}

fn sha256_file(path: &Path) -> Result<(u64, String), CliError> {
    let data = fs::read(path)?;
    Ok((data.len() as u64, hex::encode(Sha256::digest(&data))))
}

pub fn simulate(
    cfg: &ScenarioConfig,
    out: &Path,
    realizations: usize,
    edges: bool,
) -> Result<RunManifest, CliError> {
    if realizations == 0 {
        return Err(CliError::Config("--realizations must be at least 1".into()));
    }
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("creating {}: {e}", out.display())))?;

    let seed0 = derive_seed(cfg.seed, 0);
    let real = build_realization(cfg, seed0)?;
    let grid = compute_rss_grid(&real, cfg.grid, &cfg.path_loss)?;
    let report = coverage_report(&grid, cfg.threshold_db, &real);

    let mut files = vec!["points.csv", "rss.csv", "association.csv", "coverage.pgm", "coverage.ppm"];

    let mut w = create(out, "points.csv")?;
    write_points_csv(&real, &mut w)?;
    finish(w)?;
    let mut w = create(out, "rss.csv")?;
    write_rss_csv(&grid, &mut w)?;
    finish(w)?;
    let mut w = create(out, "association.csv")?;
    write_association_csv(&grid, &mut w)?;
    finish(w)?;
    let mut w = create(out, "coverage.pgm")?;
    write_coverage_pgm(&grid, cfg.threshold_db, &mut w)?;
    finish(w)?;
    let mut w = create(out, "coverage.ppm")?;
    write_coverage_ppm(&grid, cfg.threshold_db, &mut w)?;
    finish(w)?;
    if edges {
        if let Some(tess) = &real.tessellation {
            let mut w = create(out, "edges.csv")?;
            tess.write_edges_csv(&mut w)?;
            finish(w)?;
            files.push("edges.csv");
        } else {
            log::warn!("no macro tessellation in this realization, edges.csv skipped");
        }
    }

    let mc = if realizations > 1 {
        let metrics: Vec<Metric> = Metric::all()
            .into_iter()
            .filter(|m| {
                cfg.tier1.lambda_per_area > 0.0
                    || !matches!(m, Metric::VertexIntensity | Metric::EdgeLengthDensity | Metric::MeanPerimeter)
            })
            .collect();
        let rows = monte_carlo_metrics(cfg, realizations, &metrics, None)?;
        let mut w = create(out, "monte_carlo.csv")?;
        write_summaries_csv(&rows, &mut w)?;
        finish(w)?;
        files.push("monte_carlo.csv");
        Some(rows)
    } else {
        None
    };

    let theory = theoretical_tier_intensities(cfg);
    let area = real.analysis_window.area();
    let emp = Tier::ALL.map(|t| empirical_intensity(&real.layer(t).points, &real.analysis_window));
    let counts = Tier::ALL.map(|t| real.layer(t).points.count_in(&real.analysis_window));
    let summary = Summary {
        scenario: cfg.name.as_deref(),
        seed: cfg.seed,
        realization_seed: seed0,
        analysis_area: area,
        theoretical_intensities: theory.0,
        theoretical_total_density: theory.total(),
        empirical_intensities: emp,
        empirical_total_density: emp.iter().sum(),
        base_stations_in_window: counts,
        coverage: &report,
        power: PowerTotals {
            expected_density_w_per_area: expected_power_density(cfg),
            expected_total_w: expected_power_density(cfg) * area,
            realized_total_w: realized_total_power(&real),
        },
        monte_carlo: mc.as_deref(),
    };
    let mut w = create(out, "summary.json")?;
    serde_json::to_writer_pretty(&mut w, &summary).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    finish(w)?;
    files.push("summary.json");

    let entries = files
        .iter()
        .map(|name| {
            let (bytes, sha256) = sha256_file(&out.join(name))?;
            Ok(FileEntry {
                path: name.to_string(),
                bytes,
                sha256,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let manifest = RunManifest {
        config: cfg.clone(),
        seed: cfg.seed,
        realization_seed: seed0,
        realizations,
        versions: Versions {
            hetnet_cli: env!("CARGO_PKG_VERSION").to_string(),
            hetnet_core: hetnet_core::VERSION.to_string(),
        },
        files: entries,
    };
    let mut w = create(out, "manifest.json")?;
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    finish(w)?;
    Ok(manifest)
}
