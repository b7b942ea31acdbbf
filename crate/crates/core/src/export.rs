//! Plain-text and binary raster outputs.
//!
//! Rasters are row-major and north-up: the first row is the top of the
//! window (`y_max`).

use std::io::Write;

use crate::coverage::{coverage_map, RssGrid};
use crate::error::Result;
use crate::model::NetworkRealization;
use crate::statistics::McSummary;

/// `tier,x,y,tx_power_dbm`, one row per base station in the analysis window.
pub fn write_points_csv<W: Write>(real: &NetworkRealization, mut out: W) -> Result<()> {
    writeln!(out, "tier,x,y,tx_power_dbm")?;
    for (tier, p, dbm) in real.reported_stations() {
        writeln!(out, "{},{},{},{}", tier.id(), p.x, p.y, dbm)?;
    }
    Ok(())
}

fn write_raster<W: Write, T: std::fmt::Display>(
    nx: usize,
    values: impl Iterator<Item = T>,
    mut out: W,
) -> Result<()> {
    for (i, v) in values.enumerate() {
        if i % nx != 0 {
            out.write_all(b",")?;
        }
        write!(out, "{v}")?;
        if i % nx == nx - 1 {
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Best RSS in dBm, `ny` lines of `nx` comma-separated values.
pub fn write_rss_csv<W: Write>(grid: &RssGrid, out: W) -> Result<()> {
    write_raster(grid.nx, grid.best_rss.iter().map(|v| format!("{v:.4}")), out)
}

/// Tier id of the strongest transmitter per pixel.
pub fn write_association_csv<W: Write>(grid: &RssGrid, out: W) -> Result<()> {
    write_raster(grid.nx, grid.best_tx.iter().map(|t| t.tier.id()), out)
}

/// Binary PGM (P5, maxval 4): tier id where covered, 0 where not.
pub fn write_coverage_pgm<W: Write>(grid: &RssGrid, threshold_db: f64, mut out: W) -> Result<()> {
    write!(out, "P5\n{} {}\n4\n", grid.nx, grid.ny)?;
    out.write_all(&coverage_map(grid, threshold_db))?;
    Ok(())
}

/// Tier colours for the PPM rendering; index 0 is uncovered.
pub const TIER_COLORS: [[u8; 3]; 5] = [
    [255, 255, 255],
    [0, 0, 255],
    [0, 160, 0],
    [255, 0, 0],
    [255, 0, 255],
];

/// Binary PPM (P6) of the coverage map for quick viewing.
pub fn write_coverage_ppm<W: Write>(grid: &RssGrid, threshold_db: f64, mut out: W) -> Result<()> {
    write!(out, "P6\n{} {}\n255\n", grid.nx, grid.ny)?;
    let bytes: Vec<u8> = coverage_map(grid, threshold_db)
        .into_iter()
        .flat_map(|t| TIER_COLORS[t as usize])
        .collect();
    out.write_all(&bytes)?;
    Ok(())
}

pub fn write_summaries_csv<W: Write>(rows: &[McSummary], mut out: W) -> Result<()> {
    writeln!(out, "{}", McSummary::CSV_HEADER)?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
