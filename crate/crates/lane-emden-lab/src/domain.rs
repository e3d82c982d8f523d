//! Planar domain geometry: the shapes Ω we solve on, with exact signed
//! distance and point-membership queries.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point in the plane.
pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("disk radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("annulus radii must satisfy 0 < r_inner < r_outer, got ({0}, {1})")]
    BadAnnulus(f64, f64),
    #[error("rectangle corners must be ordered componentwise")]
    BadRectangle,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon must be simple (edges {0} and {1} intersect)")]
    SelfIntersecting(usize, usize),
    #[error("polygon must be positively oriented (signed area {0} <= 0)")]
    NegativelyOriented(f64),
}

/// The domain Ω: a disk, an annulus, an axis-aligned rectangle, or a simple
/// positively oriented polygon.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk { center: Point, radius: f64 },
    Annulus { center: Point, r_inner: f64, r_outer: f64 },
    Rectangle { corner_min: Point, corner_max: Point },
    Polygon { vertices: Vec<Point> },
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk { center: [0.0, 0.0], radius: 1.0 }
    }

    /// Checks the shape invariants. Called by the grid builder and the
    /// config loader; direct construction of invalid specs is possible but
    /// every entry point validates.
    pub fn validate(&self) -> Result<(), DomainError> {
        match self {
            DomainSpec::Disk { radius, .. } => {
                if *radius <= 0.0 || !radius.is_finite() {
                    return Err(DomainError::BadRadius(*radius));
                }
            }
            DomainSpec::Annulus { r_inner, r_outer, .. } => {
                if !(0.0 < *r_inner && r_inner < r_outer) || !r_outer.is_finite() {
                    return Err(DomainError::BadAnnulus(*r_inner, *r_outer));
                }
            }
            DomainSpec::Rectangle { corner_min, corner_max } => {
                if !(corner_min[0] < corner_max[0] && corner_min[1] < corner_max[1]) {
                    return Err(DomainError::BadRectangle);
                }
            }
            DomainSpec::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(DomainError::TooFewVertices(vertices.len()));
                }
                if let Some((i, j)) = first_self_intersection(vertices) {
                    return Err(DomainError::SelfIntersecting(i, j));
                }
                let a = signed_area(vertices);
                if a <= 0.0 {
                    return Err(DomainError::NegativelyOriented(a));
                }
            }
        }
        Ok(())
    }

    /// Signed distance to ∂Ω: negative inside, positive outside, |d| the
    /// Euclidean distance to the boundary. Exact for every variant.
    pub fn signed_distance(&self, x: Point) -> f64 {
        match self {
            DomainSpec::Disk { center, radius } => dist(x, *center) - radius,
            DomainSpec::Annulus { center, r_inner, r_outer } => {
                let rho = dist(x, *center);
                (r_inner - rho).max(rho - r_outer)
            }
            DomainSpec::Rectangle { corner_min, corner_max } => {
                let qx = (corner_min[0] - x[0]).max(x[0] - corner_max[0]);
                let qy = (corner_min[1] - x[1]).max(x[1] - corner_max[1]);
                if qx > 0.0 || qy > 0.0 {
                    (qx.max(0.0).powi(2) + qy.max(0.0).powi(2)).sqrt()
                } else {
                    qx.max(qy)
                }
            }
            DomainSpec::Polygon { vertices } => {
                let d = polygon_boundary_distance(vertices, x);
                if winding_number(vertices, x) != 0 {
                    -d
                } else {
                    d
                }
            }
        }
    }

    pub fn contains(&self, x: Point) -> bool {
        self.signed_distance(x) < 0.0
    }

    /// Axis-aligned bounding box of the closure of Ω.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            DomainSpec::Disk { center, radius }
            | DomainSpec::Annulus { center, r_outer: radius, .. } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            DomainSpec::Rectangle { corner_min, corner_max } => (*corner_min, *corner_max),
            DomainSpec::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }

    /// The smallest geometric feature: disk radius, annulus gap width,
    /// shortest rectangle side or polygon edge. The grid builder requires
    /// at least 16 nodes across it.
    pub fn min_feature(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius, .. } => *radius,
            DomainSpec::Annulus { r_inner, r_outer, .. } => r_outer - r_inner,
            DomainSpec::Rectangle { corner_min, corner_max } => {
                (corner_max[0] - corner_min[0]).min(corner_max[1] - corner_min[1])
            }
            DomainSpec::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| dist(vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Short label used in report tables.
    pub fn label(&self) -> String {
        match self {
            DomainSpec::Disk { .. } => "disk".into(),
            DomainSpec::Annulus { r_inner, r_outer, .. } => {
                format!("annulus({r_inner},{r_outer})")
            }
            DomainSpec::Rectangle { .. } => "rectangle".into(),
            DomainSpec::Polygon { vertices } => format!("polygon({})", vertices.len()),
        }
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

fn polygon_boundary_distance(vertices: &[Point], x: Point) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| point_segment_distance(x, vertices[i], vertices[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Standard crossing-based winding number; nonzero means inside.
fn winding_number(vertices: &[Point], x: Point) -> i32 {
    let n = vertices.len();
    let mut w = 0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if a[1] <= x[1] {
            if b[1] > x[1] && cross(a, b, x) > 0.0 {
                w += 1;
            }
        } else if b[1] <= x[1] && cross(a, b, x) < 0.0 {
            w -= 1;
        }
    }
    w
}

fn cross(a: Point, b: Point, p: Point) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])
}

fn segments_properly_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn first_self_intersection(vertices: &[Point]) -> Option<(usize, usize)> {
    let n = vertices.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // adjacent edges share a vertex; skip them (and the wrap pair)
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_properly_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}
