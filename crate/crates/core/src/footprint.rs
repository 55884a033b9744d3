//! Footprint geometry: convex hulls, shoelace areas, convex clipping and the
//! per-algorithm footprint metrics built from them.

use serde::{Deserialize, Serialize};

use crate::model::{Coordinates2D, Outcome};

/// Distance tolerance for on-boundary membership.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum FootprintError {
    #[error("footprint of {0} is degenerate")]
    DegenerateFootprint(String),
    #[error("{coords} coordinates but {labels} labels")]
    LengthMismatch { coords: usize, labels: usize },
}

pub type Point = [f64; 2];

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex polygon with counter-clockwise extreme-point vertices. Fewer than
/// three vertices means the polygon is degenerate and has no area.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    /// Point-in-polygon with boundary counted as inside.
    pub fn contains(&self, p: Point) -> bool {
        if self.is_degenerate() {
            return false;
        }
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cross(a, b, p) >= -BOUNDARY_TOLERANCE * len
        })
    }
}

/// Andrew's monotone chain. Collinear boundary points are dropped; inputs
/// with fewer than three non-collinear points give an empty polygon.
pub fn convex_hull(points: &[Point]) -> ConvexPolygon {
    let mut pts: Vec<Point> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return ConvexPolygon::empty();
    }

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // closing point repeats the first
    hull.pop();

    if hull.len() < 3 {
        return ConvexPolygon::empty();
    }
    ConvexPolygon { vertices: hull }
}

/// Shoelace area with a single wraparound term.
pub fn polygon_area(poly: &ConvexPolygon) -> f64 {
    if poly.is_degenerate() {
        return 0.0;
    }
    signed_area(&poly.vertices)
}

fn signed_area(v: &[Point]) -> f64 {
    let k = v.len();
    let mut s = 0.0;
    for j in 0..k {
        let (a, b) = (v[j], v[(j + 1) % k]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Sutherland-Hodgman clip of `a` against every edge of `b`, re-canonicalized
/// to CCW extreme points.
pub fn convex_intersection(a: &ConvexPolygon, b: &ConvexPolygon) -> ConvexPolygon {
    if a.is_degenerate() || b.is_degenerate() {
        return ConvexPolygon::empty();
    }
    let mut output: Vec<Point> = a.vertices.clone();
    let m = b.vertices.len();
    for i in 0..m {
        if output.is_empty() {
            break;
        }
        let (e0, e1) = (b.vertices[i], b.vertices[(i + 1) % m]);
        let input = std::mem::take(&mut output);
        let inside = |p: Point| cross(e0, e1, p) >= 0.0;
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            match (inside(prev), inside(cur)) {
                (true, true) => output.push(cur),
                (true, false) => output.push(line_intersection(prev, cur, e0, e1)),
                (false, true) => {
                    output.push(line_intersection(prev, cur, e0, e1));
                    output.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    convex_hull(&output)
}

/// Intersection of segment `p-q` with the infinite line through `e0-e1`.
fn line_intersection(p: Point, q: Point, e0: Point, e1: Point) -> Point {
    let dp = cross(e0, e1, p);
    let dq = cross(e0, e1, q);
    let t = dp / (dp - dq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Metrics for one algorithm's region of good performance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub algorithm: String,
    pub good_hull: ConvexPolygon,
    pub bad_hull: ConvexPolygon,
    /// `good_hull ∩ bad_hull`, the region where BAD evidence contradicts.
    pub contradiction: ConvexPolygon,
    pub area_good: f64,
    pub area_net: f64,
    pub purity: f64,
    pub density: f64,
    pub good_count: usize,
    pub bad_count: usize,
    /// GOOD instances inside (or on) `good_hull`.
    pub good_inside: usize,
    /// BAD instances inside (or on) `good_hull`.
    pub bad_inside: usize,
    /// Set when fewer than three GOOD instances (or only collinear ones) exist.
    pub degenerate: bool,
}

impl Footprint {
    /// Areas divided by the area of the hull of all instances.
    pub fn normalized_areas(&self, space_area: f64) -> (f64, f64) {
        if space_area > 0.0 {
            (self.area_good / space_area, self.area_net / space_area)
        } else {
            (0.0, 0.0)
        }
    }
}

/// Builds the footprint of one algorithm from its per-instance labels.
/// MISSING instances are ignored.
pub fn compute_footprint(
    coords: &Coordinates2D,
    labels: &[Outcome],
    algorithm: &str,
) -> Result<Footprint, FootprintError> {
    if coords.len() != labels.len() {
        return Err(FootprintError::LengthMismatch {
            coords: coords.len(),
            labels: labels.len(),
        });
    }
    let pick = |want: Outcome| -> Vec<Point> {
        coords
            .points
            .iter()
            .zip(labels)
            .filter(|(_, l)| **l == want)
            .map(|(p, _)| *p)
            .collect()
    };
    let good = pick(Outcome::Good);
    let bad = pick(Outcome::Bad);
    let good_hull = if good.len() >= 3 { convex_hull(&good) } else { ConvexPolygon::empty() };
    let bad_hull = convex_hull(&bad);
    let contradiction = convex_intersection(&good_hull, &bad_hull);

    let area_good = polygon_area(&good_hull);
    let area_net = (area_good - polygon_area(&contradiction)).max(0.0);
    let good_inside = good.iter().filter(|p| good_hull.contains(**p)).count();
    let bad_inside = bad.iter().filter(|p| good_hull.contains(**p)).count();
    let labelled_inside = good_inside + bad_inside;
    let purity = if labelled_inside > 0 {
        good_inside as f64 / labelled_inside as f64
    } else {
        0.0
    };
    let density = if area_good > 0.0 { good_inside as f64 / area_good } else { 0.0 };

    Ok(Footprint {
        algorithm: algorithm.to_string(),
        degenerate: good_hull.is_degenerate(),
        good_hull,
        bad_hull,
        contradiction,
        area_good,
        area_net,
        purity,
        density,
        good_count: good.len(),
        bad_count: bad.len(),
        good_inside,
        bad_inside,
    })
}

/// `area(good_a ∩ good_b) / min(area_a, area_b)`.
pub fn footprint_overlap(a: &Footprint, b: &Footprint) -> Result<f64, FootprintError> {
    for f in [a, b] {
        if f.degenerate || f.area_good <= 0.0 {
            return Err(FootprintError::DegenerateFootprint(f.algorithm.clone()));
        }
    }
    let shared = polygon_area(&convex_intersection(&a.good_hull, &b.good_hull));
    Ok((shared / a.area_good.min(b.area_good)).clamp(0.0, 1.0))
}
