//! Voronoi tessellation of the macro sites and the two tiers built on it:
//! the Poisson process on the Voronoi edges and the Voronoi vertices.

mod delaunay;

use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{param, HetnetError, Result};
use crate::geometry::{Point, PointSet, Tier, Window};
use crate::point_processes::poisson_count;
use crate::rng::RandomStream;
use delaunay::{circumcenter, Triangulation};

/// Relative tolerance for equidistance checks, scaled by the window diameter.
pub const EQUIDISTANCE_RTOL: f64 = 1e-9;

/// A Voronoi edge clipped to the bounding window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    pub left_site: usize,
    pub right_site: usize,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.dist(&self.b)
    }
}

/// A Voronoi vertex: circumcenter of a Delaunay triangle of three sites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiVertex {
    pub point: Point,
    pub sites: [usize; 3],
}

#[derive(Clone, Debug)]
pub struct Tessellation {
    sites: PointSet,
    edges: Vec<Segment>,
    vertices: Vec<VoronoiVertex>,
    bounding: Window,
    cell_perimeter: Vec<f64>,
    cell_complete: Vec<bool>,
    merged_duplicates: usize,
}

/// Remove exact duplicates, keeping the first occurrence and input order.
fn dedup_sites(points: &[Point]) -> (Vec<Point>, usize) {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i]
            .x
            .total_cmp(&points[j].x)
            .then(points[i].y.total_cmp(&points[j].y))
            .then(i.cmp(&j))
    });
    let mut keep = vec![true; points.len()];
    for w in idx.windows(2) {
        if points[w[0]] == points[w[1]] {
            keep[w[1]] = false;
        }
    }
    let out: Vec<Point> = points
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(p, _)| *p)
        .collect();
    let dropped = points.len() - out.len();
    (out, dropped)
}

pub fn compute_voronoi(sites: &PointSet, bounding: &Window) -> Result<Tessellation> {
    bounding.validate()?;
    if sites.points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(HetnetError::DegenerateInput("non-finite site coordinate".into()));
    }
    let (unique, merged) = dedup_sites(&sites.points);
    if merged > 0 {
        warn!("merged {merged} duplicate site(s) before tessellation");
    }
    if unique.len() < 2 {
        return Err(HetnetError::DegenerateInput(format!(
            "need at least 2 distinct sites, got {}",
            unique.len()
        )));
    }

    let tri = Triangulation::build(&unique);
    let n = unique.len();
    let tol = EQUIDISTANCE_RTOL * bounding.diameter();

    let centers: Vec<Point> = tri
        .tris
        .iter()
        .map(|t| {
            let [a, b, c] = t.v.map(|v| tri.points[v]);
            circumcenter(a, b, c)
        })
        .collect();

    let mut cell_complete = vec![true; n];
    let mut vertices = Vec::new();
    for (t, tr) in tri.tris.iter().enumerate() {
        let inside = bounding.contains_closed(&centers[t]);
        if tri.has_super(tr) || !inside {
            for &v in &tr.v {
                if v < n {
                    cell_complete[v] = false;
                }
            }
        }
        if !tri.has_super(tr) && inside {
            vertices.push(VoronoiVertex {
                point: centers[t],
                sites: tr.v,
            });
        }
    }

    let mut edges = Vec::new();
    let mut cell_perimeter = vec![0.0; n];
    for (t, tr) in tri.tris.iter().enumerate() {
        for k in 0..3 {
            let nb = tr.adj[k];
            if nb == delaunay::NONE || nb < t {
                continue;
            }
            let u = tr.v[(k + 1) % 3];
            let w = tr.v[(k + 2) % 3];
            if tri.is_super(u) || tri.is_super(w) {
                continue;
            }
            let Some((a, b)) = bounding.clip_segment(centers[t], centers[nb]) else {
                continue;
            };
            let len = a.dist(&b);
            cell_perimeter[u] += len;
            cell_perimeter[w] += len;
            // co-circular sites produce coincident circumcenters
            if len > tol {
                edges.push(Segment {
                    a,
                    b,
                    left_site: w,
                    right_site: u,
                });
            }
        }
    }

    Ok(Tessellation {
        sites: PointSet::new(sites.tier, unique),
        edges,
        vertices,
        bounding: *bounding,
        cell_perimeter,
        cell_complete,
        merged_duplicates: merged,
    })
}

impl Tessellation {
    pub fn sites(&self) -> &PointSet {
        &self.sites
    }

    pub fn edges(&self) -> &[Segment] {
        &self.edges
    }

    pub fn vertices(&self) -> &[VoronoiVertex] {
        &self.vertices
    }

    pub fn bounding_window(&self) -> &Window {
        &self.bounding
    }

    pub fn merged_duplicates(&self) -> usize {
        self.merged_duplicates
    }

    /// Perimeter of a site's cell inside the bounding window, and whether the
    /// cell is complete (bounded and not clipped).
    pub fn cell_perimeter(&self, site: usize) -> (f64, bool) {
        (self.cell_perimeter[site], self.cell_complete[site])
    }

    pub fn tolerance(&self) -> f64 {
        EQUIDISTANCE_RTOL * self.bounding.diameter()
    }

    /// Whether `v` is equidistant from its three sites within tolerance.
    pub fn vertex_is_equidistant(&self, v: &VoronoiVertex) -> bool {
        let [d0, d1, d2] = v.sites.map(|s| v.point.dist(&self.sites.points[s]));
        let tol = self.tolerance().max(EQUIDISTANCE_RTOL * d0);
        (d0 - d1).abs() <= tol && (d0 - d2).abs() <= tol
    }

    /// Write the clipped edges as CSV: `ax,ay,bx,by,left_site,right_site`.
    pub fn write_edges_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "ax,ay,bx,by,left_site,right_site")?;
        for e in &self.edges {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                e.a.x, e.a.y, e.b.x, e.b.y, e.left_site, e.right_site
            )?;
        }
        Ok(())
    }
}

/// Voronoi vertices strictly inside `analysis`, each checked to be
/// equidistant from its three generating sites.
pub fn interior_vertices(tess: &Tessellation, analysis: &Window) -> PointSet {
    let mut out = Vec::new();
    for v in &tess.vertices {
        if !analysis.contains_strict(&v.point) {
            continue;
        }
        if tess.vertex_is_equidistant(v) {
            out.push(v.point);
        } else {
            warn!("dropping vertex {:?}: not equidistant from its sites", v.point);
        }
    }
    PointSet::new(Tier::Vertex, out)
}

/// Poisson process with `mu` points per unit length on every edge, restricted
/// to `window`.
pub fn sample_ppp_on_edges(
    tess: &Tessellation,
    mu: f64,
    window: &Window,
    stream: &RandomStream,
) -> Result<PointSet> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(param("mu", format!("must be finite and >= 0, got {mu}")));
    }
    let mut out = Vec::new();
    if mu == 0.0 {
        return Ok(PointSet::new(Tier::Edge, out));
    }
    let mut rng = stream.rng();
    for e in &tess.edges {
        let Some((a, b)) = window.clip_segment(e.a, e.b) else {
            continue;
        };
        let n = poisson_count(mu * a.dist(&b), &mut rng);
        for _ in 0..n {
            let t: f64 = rand::Rng::random(&mut rng);
            out.push(a.lerp(&b, t));
        }
    }
    Ok(PointSet::new(Tier::Edge, out))
}

/// Total edge length inside `window` per unit area.
pub fn edge_length_density(tess: &Tessellation, window: &Window) -> f64 {
    let total: f64 = tess
        .edges
        .iter()
        .filter_map(|e| window.clip_segment(e.a, e.b))
        .map(|(a, b)| a.dist(&b))
        .sum();
    total / window.area()
}

/// Total perimeter and count of the cells whose site lies in `analysis` and
/// whose cell is complete within the bounding window.
pub fn cell_perimeter_totals(tess: &Tessellation, analysis: &Window) -> (f64, usize) {
    tess.sites
        .points
        .iter()
        .enumerate()
        .filter(|(i, p)| analysis.contains(p) && tess.cell_complete[*i])
        .fold((0.0, 0usize), |(s, c), (i, _)| (s + tess.cell_perimeter[i], c + 1))
}

/// Mean perimeter over the cells counted by [`cell_perimeter_totals`].
pub fn mean_cell_perimeter(tess: &Tessellation, analysis: &Window) -> Result<f64> {
    let (sum, count) = cell_perimeter_totals(tess, analysis);
    if count == 0 {
        return Err(HetnetError::InsufficientWindow(format!(
            "no complete Voronoi cell with its site inside {analysis}"
        )));
    }
    Ok(sum / count as f64)
}
