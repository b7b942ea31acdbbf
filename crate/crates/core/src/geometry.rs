//! Planar primitives shared by every module: points, rectangular windows,
//! tier tags and tagged point sets.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HetnetError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    #[inline]
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }

    pub fn scaled(&self, c: f64) -> Point {
        Point::new(self.x * c, self.y * c)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Axis-aligned rectangle used as sampling, bounding and analysis region.
///
/// Membership is half-open (`x_min <= x < x_max`) so that adjacent windows
/// never count the same point twice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let w = Self {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        w.validate()?;
        Ok(w)
    }

    /// `[0, side] x [0, side]`.
    pub fn square(side: f64) -> Result<Self> {
        Self::new(0.0, side, 0.0, side)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(HetnetError::Parameter {
                name: "window",
                reason: format!("need finite bounds with x_max > x_min and y_max > y_min, got {self}"),
            });
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x < self.x_max && p.y >= self.y_min && p.y < self.y_max
    }

    #[inline]
    pub fn contains_strict(&self, p: &Point) -> bool {
        p.x > self.x_min && p.x < self.x_max && p.y > self.y_min && p.y < self.y_max
    }

    #[inline]
    pub fn contains_closed(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Grow (positive margin) or shrink (negative margin) on all four sides.
    pub fn expand(&self, margin: f64) -> Result<Window> {
        Window::new(
            self.x_min - margin,
            self.x_max + margin,
            self.y_min - margin,
            self.y_max + margin,
        )
    }

    pub fn inset(&self, margin: f64) -> Result<Window> {
        self.expand(-margin)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    pub fn scaled(&self, c: f64) -> Result<Window> {
        Window::new(self.x_min * c, self.x_max * c, self.y_min * c, self.y_max * c)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        Point::new(
            self.x_min + u * self.width(),
            self.y_min + v * self.height(),
        )
    }

    /// Liang-Barsky clipping of segment `a -> b`. Returns the clipped
    /// endpoints, or `None` when the segment misses the window.
    pub fn clip_segment(&self, a: Point, b: Point) -> Option<(Point, Point)> {
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        let checks = [
            (-dx, a.x - self.x_min),
            (dx, self.x_max - a.x),
            (-dy, a.y - self.y_min),
            (dy, self.y_max - a.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    if r > t1 {
                        return None;
                    }
                    t0 = t0.max(r);
                } else {
                    if r < t0 {
                        return None;
                    }
                    t1 = t1.min(r);
                }
            }
        }
        if t0 > t1 {
            return None;
        }
        let ca = if t0 > 0.0 { a.lerp(&b, t0) } else { a };
        let cb = if t1 < 1.0 { a.lerp(&b, t1) } else { b };
        Some((ca, cb))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]",
            self.x_min, self.x_max, self.y_min, self.y_max
        )
    }
}

/// The four tiers of the network, in their fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Tier {
    /// Homogeneous macro tier; its tessellation carries tiers 2 and 3.
    Macro = 1,
    /// Points on the macro Voronoi edges.
    Edge = 2,
    /// Thinned macro Voronoi vertices.
    Vertex = 3,
    /// Independent small cells (PPP or cluster process).
    Small = 4,
}

impl Tier {
    pub const ALL: [Tier; 4] = [Tier::Macro, Tier::Edge, Tier::Vertex, Tier::Small];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_id(id: u8) -> Option<Tier> {
        match id {
            1 => Some(Tier::Macro),
            2 => Some(Tier::Edge),
            3 => Some(Tier::Vertex),
            4 => Some(Tier::Small),
            _ => None,
        }
    }
}

impl From<Tier> for u8 {
    fn from(t: Tier) -> u8 {
        t.id()
    }
}

impl TryFrom<u8> for Tier {
    type Error = String;

    fn try_from(id: u8) -> std::result::Result<Self, Self::Error> {
        Tier::from_id(id).ok_or_else(|| format!("tier id must be 1..=4, got {id}"))
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// A finite realization of one tier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub tier: Tier,
    pub points: Vec<Point>,
}

impl PointSet {
    pub fn new(tier: Tier, points: Vec<Point>) -> Self {
        Self { tier, points }
    }

    pub fn empty(tier: Tier) -> Self {
        Self::new(tier, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Points falling inside `window` (half-open), order preserved.
    pub fn restricted_to(&self, window: &Window) -> PointSet {
        PointSet::new(
            self.tier,
            self.points
                .iter()
                .copied()
                .filter(|p| window.contains(p))
                .collect(),
        )
    }

    pub fn count_in(&self, window: &Window) -> usize {
        self.points.iter().filter(|p| window.contains(p)).count()
    }
}
