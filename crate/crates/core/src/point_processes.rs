//! Samplers for the stationary planar point processes of the model:
//! homogeneous Poisson, independent thinning, perturbed triangular lattice
//! and the Matérn cluster process viewed as a Cox process.
//!
//! Every sampler is a pure function of its parameters and a
//! [`RandomStream`]; output order is deterministic for a given stream.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::geometry::{Point, PointSet, Tier, Window};
use crate::rng::RandomStream;

/// Draw a Poisson(`mean`) count. `mean == 0` yields 0 without touching the rng.
pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    d.sample(rng) as usize
}

fn check_intensity(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(param(name, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

pub fn sample_homogeneous_ppp(
    window: &Window,
    intensity: f64,
    tier: Tier,
    stream: &RandomStream,
) -> Result<PointSet> {
    check_intensity("intensity", intensity)?;
    window.validate()?;
    let mut rng = stream.rng();
    let n = poisson_count(intensity * window.area(), &mut rng);
    let points = (0..n).map(|_| window.sample_uniform(&mut rng)).collect();
    Ok(PointSet::new(tier, points))
}

/// Keep each point independently with probability `retain_prob`.
/// `retain_prob == 1` returns the input unchanged.
pub fn thin(points: &PointSet, retain_prob: f64, stream: &RandomStream) -> Result<PointSet> {
    if !(0.0..=1.0).contains(&retain_prob) {
        return Err(param(
            "retain_prob",
            format!("must lie in [0, 1], got {retain_prob}"),
        ));
    }
    if retain_prob == 1.0 {
        return Ok(points.clone());
    }
    if retain_prob == 0.0 {
        return Ok(PointSet::empty(points.tier));
    }
    let mut rng = stream.rng();
    let kept = points
        .points
        .iter()
        .copied()
        .filter(|_| rng.random::<f64>() < retain_prob)
        .collect();
    Ok(PointSet::new(points.tier, kept))
}

/// Per-coordinate Gaussian displacement of lattice nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePerturbation {
    /// Variance of each coordinate's displacement (squared length units).
    pub variance: f64,
}

impl LatticePerturbation {
    pub fn new(variance: f64) -> Result<Self> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(param(
                "perturbation_variance",
                format!("must be finite and >= 0, got {variance}"),
            ));
        }
        Ok(Self { variance })
    }
}

/// Spacing of a triangular lattice with `density` nodes per unit area.
pub fn triangular_lattice_spacing(density: f64) -> f64 {
    (2.0 / (3.0_f64.sqrt() * density)).sqrt()
}

/// Triangular lattice with one axis along x, a uniform random translation
/// over the fundamental cell and independent Gaussian jitter per node.
///
/// Nodes are laid out on the window grown by one spacing plus six standard
/// deviations so that jitter moves points into the window as often as out of
/// it; the result is stationary with intensity `density`.
pub fn sample_perturbed_triangular_lattice(
    window: &Window,
    density: f64,
    perturbation: LatticePerturbation,
    tier: Tier,
    stream: &RandomStream,
) -> Result<PointSet> {
    if !density.is_finite() || density <= 0.0 {
        return Err(param("density", format!("must be > 0, got {density}")));
    }
    LatticePerturbation::new(perturbation.variance)?;
    window.validate()?;

    let mut rng = stream.rng();
    let a = triangular_lattice_spacing(density);
    let row_h = a * 3.0_f64.sqrt() / 2.0;
    let sigma = perturbation.variance.sqrt();
    let margin = a + 6.0 * sigma;

    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let ox = u * a + v * a / 2.0;
    let oy = v * row_h;

    let j_lo = ((window.y_min - margin - oy) / row_h).floor() as i64;
    let j_hi = ((window.y_max + margin - oy) / row_h).ceil() as i64;
    let noise = if sigma > 0.0 {
        Some(Normal::new(0.0, sigma).expect("finite sigma"))
    } else {
        None
    };

    let mut points = Vec::new();
    for j in j_lo..=j_hi {
        let y = oy + j as f64 * row_h;
        let shift = ox + j as f64 * a / 2.0;
        let i_lo = ((window.x_min - margin - shift) / a).floor() as i64;
        let i_hi = ((window.x_max + margin - shift) / a).ceil() as i64;
        for i in i_lo..=i_hi {
            let mut p = Point::new(shift + i as f64 * a, y);
            if let Some(n) = &noise {
                p.x += n.sample(&mut rng);
                p.y += n.sample(&mut rng);
            }
            if window.contains(&p) {
                points.push(p);
            }
        }
    }
    Ok(PointSet::new(tier, points))
}

/// Matérn cluster process: Poisson parents, each with Poisson(M) daughters
/// uniform on a disk of radius `r` around it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaternClusterParams {
    pub parent_per_area: f64,
    pub mean_points_per_cluster: f64,
    pub cluster_radius: f64,
}

impl MaternClusterParams {
    pub fn new(parent_per_area: f64, mean_points_per_cluster: f64, cluster_radius: f64) -> Result<Self> {
        let p = Self {
            parent_per_area,
            mean_points_per_cluster,
            cluster_radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_intensity("parent_per_area", self.parent_per_area)?;
        check_intensity("mean_points_per_cluster", self.mean_points_per_cluster)?;
        if !self.cluster_radius.is_finite() || self.cluster_radius <= 0.0 {
            return Err(param(
                "cluster_radius",
                format!("must be > 0, got {}", self.cluster_radius),
            ));
        }
        Ok(())
    }

    /// Overall daughter intensity `M * parent_per_area`.
    pub fn intensity(&self) -> f64 {
        self.mean_points_per_cluster * self.parent_per_area
    }

    /// Daughter intensity kernel for a parent at the origin.
    pub fn kernel(&self, offset_norm: f64) -> f64 {
        let r = self.cluster_radius;
        if offset_norm < r {
            self.mean_points_per_cluster / (PI * r * r)
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterRealization {
    /// Parents on the window grown by the cluster radius; diagnostic only.
    pub parents: PointSet,
    /// Daughters inside the requested window.
    pub daughters: PointSet,
}

pub fn sample_matern_cluster(
    window: &Window,
    params: &MaternClusterParams,
    tier: Tier,
    stream: &RandomStream,
) -> Result<ClusterRealization> {
    params.validate()?;
    let parent_window = window.expand(params.cluster_radius)?;
    let parents = sample_homogeneous_ppp(
        &parent_window,
        params.parent_per_area,
        tier,
        &stream.child("parents"),
    )?;
    let daughters = sample_cluster_daughters(&parents, params, window, &stream.child("daughters"))?;
    Ok(ClusterRealization { parents, daughters })
}

/// Daughter step of the cluster process for fixed parents, i.e. a draw from
/// the Poisson process with intensity [`cox_intensity_at`] restricted to
/// `window`.
pub fn sample_cluster_daughters(
    parents: &PointSet,
    params: &MaternClusterParams,
    window: &Window,
    stream: &RandomStream,
) -> Result<PointSet> {
    params.validate()?;
    let mut rng = stream.rng();
    let r = params.cluster_radius;
    let mut out = Vec::new();
    for parent in &parents.points {
        let n = poisson_count(params.mean_points_per_cluster, &mut rng);
        for _ in 0..n {
            let rho = r * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            let p = Point::new(parent.x + rho * theta.cos(), parent.y + rho * theta.sin());
            if window.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(PointSet::new(parents.tier, out))
}

/// Conditional intensity of the cluster tier given its parents:
/// the sum of the disk kernel over all parents.
pub fn cox_intensity_at(x: &Point, parents: &PointSet, params: &MaternClusterParams) -> f64 {
    let r2 = params.cluster_radius * params.cluster_radius;
    let hits = parents.points.iter().filter(|y| x.dist2(y) < r2).count();
    hits as f64 * params.mean_points_per_cluster / (PI * r2)
}
