//! Incremental Bowyer-Watson Delaunay triangulation on exact predicates.
//!
//! The input is enclosed in a large super-triangle whose three vertices are
//! appended after the real points. A triangle whose circumcircle passes
//! exactly through the new point is *not* part of the cavity, which acts as
//! a consistent symbolic perturbation: co-circular inputs resolve to one of
//! the valid triangulations (chosen by insertion order) and no triangle is
//! ever degenerate.

use robust::{incircle, orient2d, Coord};

use crate::geometry::Point;

pub(crate) const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tri {
    /// Vertices in counter-clockwise order.
    pub v: [usize; 3],
    /// `adj[k]` is the triangle across the edge opposite `v[k]`.
    pub adj: [usize; 3],
}

pub(crate) struct Triangulation {
    /// Real points followed by the three super-triangle vertices.
    pub points: Vec<Point>,
    pub n_real: usize,
    pub tris: Vec<Tri>,
}

#[inline]
fn c(p: Point) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

#[inline]
pub(crate) fn orient(a: Point, b: Point, p: Point) -> f64 {
    orient2d(c(a), c(b), c(p))
}

#[inline]
pub(crate) fn in_circle(a: Point, b: Point, cc: Point, d: Point) -> f64 {
    incircle(c(a), c(b), c(cc), c(d))
}

pub(crate) fn circumcenter(a: Point, b: Point, cc: Point) -> Point {
    let bx = b.x - a.x;
    let by = b.y - a.y;
    let cx = cc.x - a.x;
    let cy = cc.y - a.y;
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Point::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d)
}

impl Triangulation {
    pub fn is_super(&self, v: usize) -> bool {
        v >= self.n_real
    }

    pub fn has_super(&self, t: &Tri) -> bool {
        t.v.iter().any(|&v| self.is_super(v))
    }

    /// Triangulate distinct points. Insertion follows a Hilbert order so the
    /// point-location walk stays short.
    pub fn build(sites: &[Point]) -> Triangulation {
        let n = sites.len();
        let (mut lo, mut hi) = (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in sites {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
        let mid = Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
        let m = 1.0e4 * extent;

        let mut points = sites.to_vec();
        points.push(Point::new(mid.x - m, mid.y - m));
        points.push(Point::new(mid.x + m, mid.y - m));
        points.push(Point::new(mid.x, mid.y + m));

        let mut tri = Triangulation {
            points,
            n_real: n,
            tris: vec![Tri {
                v: [n, n + 1, n + 2],
                adj: [NONE; 3],
            }],
        };

        let mut order: Vec<usize> = (0..n).collect();
        let keys: Vec<u64> = sites
            .iter()
            .map(|p| hilbert_key(p, &lo, extent))
            .collect();
        order.sort_by_key(|&i| (keys[i], i));

        let mut scratch = Scratch::default();
        let mut last = 0usize;
        for i in order {
            last = tri.insert(i, last, &mut scratch);
        }
        tri
    }

    fn locate(&self, p: Point, start: usize) -> usize {
        let mut t = start;
        let limit = 4 * self.tris.len() + 16;
        for step in 0..limit {
            let tr = &self.tris[t];
            let mut next = NONE;
            for e in 0..3 {
                let k = (e + step) % 3;
                let a = self.points[tr.v[(k + 1) % 3]];
                let b = self.points[tr.v[(k + 2) % 3]];
                if orient(a, b, p) < 0.0 {
                    next = tr.adj[k];
                    break;
                }
            }
            if next == NONE {
                return t;
            }
            t = next;
        }
        // Walk failed to converge; fall back to a scan.
        self.tris
            .iter()
            .position(|tr| {
                (0..3).all(|k| {
                    orient(
                        self.points[tr.v[(k + 1) % 3]],
                        self.points[tr.v[(k + 2) % 3]],
                        p,
                    ) >= 0.0
                })
            })
            .expect("point lies inside the super-triangle")
    }

    fn circle_contains(&self, t: usize, p: Point) -> bool {
        let v = self.tris[t].v;
        in_circle(self.points[v[0]], self.points[v[1]], self.points[v[2]], p) > 0.0
    }

    fn insert(&mut self, pi: usize, hint: usize, s: &mut Scratch) -> usize {
        let p = self.points[pi];
        let start = self.locate(p, hint);

        s.stamp += 1;
        if s.mark.len() < self.tris.len() {
            s.mark.resize(self.tris.len(), 0);
        }
        s.cavity.clear();
        s.stack.clear();
        s.stack.push(start);
        s.mark[start] = s.stamp;
        while let Some(t) = s.stack.pop() {
            s.cavity.push(t);
            for k in 0..3 {
                let nb = self.tris[t].adj[k];
                if nb != NONE && s.mark[nb] != s.stamp && self.circle_contains(nb, p) {
                    s.mark[nb] = s.stamp;
                    s.stack.push(nb);
                }
            }
        }

        // Boundary edges (a, b) with the outside neighbour.
        s.boundary.clear();
        for &t in &s.cavity {
            let tr = self.tris[t];
            for k in 0..3 {
                let nb = tr.adj[k];
                if nb == NONE || s.mark[nb] != s.stamp {
                    s.boundary
                        .push((tr.v[(k + 1) % 3], tr.v[(k + 2) % 3], nb));
                }
            }
        }

        // Slots: reuse the cavity, append the rest.
        s.slots.clear();
        for (i, _) in s.boundary.iter().enumerate() {
            if i < s.cavity.len() {
                s.slots.push(s.cavity[i]);
            } else {
                s.slots.push(self.tris.len());
                self.tris.push(Tri {
                    v: [NONE; 3],
                    adj: [NONE; 3],
                });
            }
        }

        for (i, &(a, b, outer)) in s.boundary.iter().enumerate() {
            let t = s.slots[i];
            self.tris[t] = Tri {
                v: [a, b, pi],
                adj: [NONE, NONE, outer],
            };
            if outer != NONE {
                let o = &mut self.tris[outer];
                for j in 0..3 {
                    if o.v[(j + 1) % 3] == b && o.v[(j + 2) % 3] == a {
                        o.adj[j] = t;
                    }
                }
            }
        }

        // Link the fan around p: (a, b, p) meets (b, c, p) along (b, p).
        s.by_start.clear();
        s.by_start
            .extend(s.boundary.iter().enumerate().map(|(i, &(a, _, _))| (a, s.slots[i])));
        s.by_start.sort_unstable();
        for (i, &(_, b, _)) in s.boundary.iter().enumerate() {
            let t = s.slots[i];
            let pos = s
                .by_start
                .binary_search_by_key(&b, |&(v, _)| v)
                .expect("cavity boundary is a closed cycle");
            let t2 = s.by_start[pos].1;
            self.tris[t].adj[0] = t2;
            self.tris[t2].adj[1] = t;
        }
        s.slots[0]
    }
}

#[derive(Default)]
struct Scratch {
    stamp: u32,
    mark: Vec<u32>,
    stack: Vec<usize>,
    cavity: Vec<usize>,
    boundary: Vec<(usize, usize, usize)>,
    slots: Vec<usize>,
    by_start: Vec<(usize, usize)>,
}

fn hilbert_key(p: &Point, lo: &Point, extent: f64) -> u64 {
    const ORDER: u32 = 16;
    let side = (1u64 << ORDER) - 1;
    let qx = (((p.x - lo.x) / extent) * side as f64).clamp(0.0, side as f64) as u64;
    let qy = (((p.y - lo.y) / extent) * side as f64).clamp(0.0, side as f64) as u64;
    let (mut x, mut y) = (qx, qy);
    let mut d = 0u64;
    let mut s = 1u64 << (ORDER - 1);
    while s > 0 {
        let rx = u64::from(x & s > 0);
        let ry = u64::from(y & s > 0);
        d += s * s * ((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = side - x;
                y = side - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s >>= 1;
    }
    d
}
