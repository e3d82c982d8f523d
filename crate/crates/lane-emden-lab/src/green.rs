//! Dirichlet Green functions G(x, y) for the supported domains, their
//! regular parts H(x, y) = G(x, y) + log|x−y|/(2π), and the Robin function
//! h(x) = H(x, x) with gradients.
//!
//! Three backends, picked per domain:
//! * disk: the reflection closed form, gradients analytic;
//! * rectangle: image series along the longer axis, resummed into log terms
//!   so every shell decays geometrically (truncated below 1e−14);
//! * everything else (and optionally any domain, for cross-checks): method
//!   of fundamental solutions, a log-charge layer on a dilated boundary fit
//!   by truncated SVD collocation.

use crate::constants::ON_BOUNDARY_TOL;
use crate::domain::{DomainSpec, Point};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("green function arguments coincide at ({0:.6}, {1:.6})")]
    CoincidentPoints(f64, f64),
    #[error("point ({0:.6}, {1:.6}) lies outside the domain")]
    PointOutside(f64, f64),
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm2(a: Point) -> f64 {
    a[0] * a[0] + a[1] * a[1]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub struct GreenFn {
    spec: DomainSpec,
    diameter: f64,
    backend: Backend,
}

enum Backend {
    DiskExact { center: Point, radius: f64 },
    RectangleImages(RectGreen),
    Collocation(Mfs),
}

impl GreenFn {
    /// Picks the most accurate backend the domain admits.
    pub fn for_domain(spec: &DomainSpec) -> Self {
        let backend = match spec {
            DomainSpec::Disk { center, radius } => {
                Backend::DiskExact { center: *center, radius: *radius }
            }
            DomainSpec::Rectangle { corner_min, corner_max } => {
                Backend::RectangleImages(RectGreen::new(*corner_min, *corner_max))
            }
            _ => Backend::Collocation(Mfs::new(spec, 0)),
        };
        GreenFn { spec: spec.clone(), diameter: spec.diameter(), backend }
    }

    /// Forces the collocation backend regardless of domain; `charges = 0`
    /// picks a default count. Used to cross-check the closed forms.
    pub fn collocation(spec: &DomainSpec, charges: usize) -> Self {
        GreenFn {
            spec: spec.clone(),
            diameter: spec.diameter(),
            backend: Backend::Collocation(Mfs::new(spec, charges)),
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.spec
    }

    fn check_inside(&self, x: Point) -> Result<(), GreenError> {
        if self.spec.signed_distance(x) > ON_BOUNDARY_TOL * self.diameter.max(1.0) {
            return Err(GreenError::PointOutside(x[0], x[1]));
        }
        Ok(())
    }

    fn check_distinct(&self, x: Point, y: Point) -> Result<(), GreenError> {
        if norm2(sub(x, y)).sqrt() < 1e-12 * self.diameter {
            return Err(GreenError::CoincidentPoints(x[0], x[1]));
        }
        Ok(())
    }

    pub fn green(&self, x: Point, y: Point) -> Result<f64, GreenError> {
        self.check_inside(x)?;
        self.check_inside(y)?;
        self.check_distinct(x, y)?;
        Ok(match &self.backend {
            Backend::DiskExact { center, radius } => disk_green(*center, *radius, x, y),
            Backend::RectangleImages(r) => r.green(x, y),
            Backend::Collocation(m) => {
                m.regular_part(x, y) - (norm2(sub(x, y)).sqrt().ln()) / (2.0 * PI)
            }
        })
    }

    pub fn regular_part(&self, x: Point, y: Point) -> Result<f64, GreenError> {
        self.check_inside(x)?;
        self.check_inside(y)?;
        if norm2(sub(x, y)).sqrt() < 1e-9 * self.diameter {
            return self.robin(x);
        }
        Ok(match &self.backend {
            Backend::DiskExact { center, radius } => disk_regular(*center, *radius, x, y),
            Backend::RectangleImages(r) => {
                r.green(x, y) + norm2(sub(x, y)).sqrt().ln() / (2.0 * PI)
            }
            Backend::Collocation(m) => m.regular_part(x, y),
        })
    }

    /// Robin function h(x) = H(x, x).
    pub fn robin(&self, x: Point) -> Result<f64, GreenError> {
        self.check_inside(x)?;
        Ok(match &self.backend {
            Backend::DiskExact { center, radius } => {
                let q = sub(x, *center);
                ((radius * radius - norm2(q)) / radius).ln() / (2.0 * PI)
            }
            Backend::RectangleImages(r) => r.robin(x),
            Backend::Collocation(m) => m.regular_part(x, x),
        })
    }

    pub fn grad_x_green(&self, x: Point, y: Point) -> Result<Point, GreenError> {
        self.check_inside(x)?;
        self.check_inside(y)?;
        self.check_distinct(x, y)?;
        Ok(match &self.backend {
            Backend::DiskExact { center, radius } => {
                let gh = disk_grad_regular(*center, *radius, x, y);
                let d = sub(x, y);
                let n2 = norm2(d);
                [gh[0] - d[0] / (2.0 * PI * n2), gh[1] - d[1] / (2.0 * PI * n2)]
            }
            Backend::RectangleImages(r) => {
                // step shrinks with the separation (G is singular at y) and
                // with the inset so the stencil stays inside the rectangle
                let sep = norm2(sub(x, y)).sqrt();
                let inset = -self.spec.signed_distance(x);
                let h = (1e-3 * sep)
                    .min(1e-4 * r.l1)
                    .min(0.45 * inset.max(1e-8 * r.l1));
                central_grad(&|z| r.green(z, y), x, h)
            }
            Backend::Collocation(m) => {
                let gh = m.grad_x_regular_part(x, y);
                let d = sub(x, y);
                let n2 = norm2(d);
                [gh[0] - d[0] / (2.0 * PI * n2), gh[1] - d[1] / (2.0 * PI * n2)]
            }
        })
    }

    /// ∇₁H(x, y); valid at x = y, where it is half the Robin gradient.
    pub fn grad_x_regular_part(&self, x: Point, y: Point) -> Result<Point, GreenError> {
        self.check_inside(x)?;
        self.check_inside(y)?;
        Ok(match &self.backend {
            Backend::DiskExact { center, radius } => disk_grad_regular(*center, *radius, x, y),
            Backend::RectangleImages(r) => {
                // H is smooth across x = y, so the step only minds the walls
                let inset = -self.spec.signed_distance(x);
                let h = (1e-4 * r.l1).min(0.45 * inset.max(1e-8 * r.l1));
                central_grad(
                    &|z| {
                        r.green(z, y) + norm2(sub(z, y)).sqrt().ln() / (2.0 * PI)
                    },
                    x,
                    h,
                )
            }
            Backend::Collocation(m) => m.grad_x_regular_part(x, y),
        })
    }

    pub fn grad_robin(&self, x: Point) -> Result<Point, GreenError> {
        self.check_inside(x)?;
        Ok(match &self.backend {
            Backend::DiskExact { center, radius } => {
                let q = sub(x, *center);
                let den = PI * (radius * radius - norm2(q));
                [-q[0] / den, -q[1] / den]
            }
            Backend::RectangleImages(r) => {
                let inset = -self.spec.signed_distance(x);
                let h = (1e-4 * r.l1).min(0.45 * inset.max(1e-8 * r.l1));
                central_grad(&|z| r.robin(z), x, h)
            }
            // h(x) = H(x, x) and H is symmetric, so ∇h = 2∇₁H; the layer
            // representation is analytic in the first slot, which beats
            // differencing the fitted h through its solve noise
            Backend::Collocation(m) => {
                let g = m.grad_x_regular_part(x, x);
                [2.0 * g[0], 2.0 * g[1]]
            }
        })
    }

    /// Max boundary misfit of the collocation layer for source point `y`;
    /// zero for the closed-form backends.
    pub fn fit_residual(&self, y: Point) -> Result<f64, GreenError> {
        self.check_inside(y)?;
        Ok(match &self.backend {
            Backend::Collocation(m) => m.fit_residual(y),
            _ => 0.0,
        })
    }
}

/// Fourth-order five-point derivative; keeps the rounding-noise floor of
/// series-backed gradients near 1e−12 where a two-point stencil sits at
/// 1e−9 or worse.
fn central_grad(f: &dyn Fn(Point) -> f64, x: Point, h: f64) -> Point {
    let d = |fm2: f64, fm1: f64, fp1: f64, fp2: f64| (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    [
        d(
            f([x[0] - 2.0 * h, x[1]]),
            f([x[0] - h, x[1]]),
            f([x[0] + h, x[1]]),
            f([x[0] + 2.0 * h, x[1]]),
        ),
        d(
            f([x[0], x[1] - 2.0 * h]),
            f([x[0], x[1] - h]),
            f([x[0], x[1] + h]),
            f([x[0], x[1] + 2.0 * h]),
        ),
    ]
}

// disk closed forms; D = |x|²|y|²/R² − 2x·y + R² is the stable symmetric
// combination (|x − y*||y|/R)² with y* the reflection of y
fn disk_d(center: Point, radius: f64, x: Point, y: Point) -> f64 {
    let xs = sub(x, center);
    let ys = sub(y, center);
    norm2(xs) * norm2(ys) / (radius * radius) - 2.0 * dot(xs, ys) + radius * radius
}

fn disk_green(center: Point, radius: f64, x: Point, y: Point) -> f64 {
    let d = disk_d(center, radius, x, y);
    (d / norm2(sub(x, y))).ln() / (4.0 * PI)
}

fn disk_regular(center: Point, radius: f64, x: Point, y: Point) -> f64 {
    disk_d(center, radius, x, y).ln() / (4.0 * PI) - radius.ln() / (2.0 * PI)
}

fn disk_grad_regular(center: Point, radius: f64, x: Point, y: Point) -> Point {
    let xs = sub(x, center);
    let ys = sub(y, center);
    let d = disk_d(center, radius, x, y);
    let gx = 2.0 * norm2(ys) * xs[0] / (radius * radius) - 2.0 * ys[0];
    let gy = 2.0 * norm2(ys) * xs[1] / (radius * radius) - 2.0 * ys[1];
    [gx / (4.0 * PI * d), gy / (4.0 * PI * d)]
}

/// Rectangle Green function. The sine expansion runs along the shorter side
/// (length l1) and the image reflections along the longer side (length l2),
/// resummed with Σ qⁿ cos(nθ)/n = −log(1 − 2q·cosθ + q²)/2, so each image
/// shell contributes four log terms and shells decay like exp(−2π·l2/l1).
struct RectGreen {
    corner: Point,
    l1: f64,
    l2: f64,
    swapped: bool,
}

/// 1 − 2q·cosθ + q² = (1−q)² + 4q·sin²(θ/2), with 1−q passed separately so
/// it stays accurate when q → 1 and θ → 0.
fn p_fn(q: f64, one_minus_q: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    one_minus_q * one_minus_q + 4.0 * q * s * s
}

impl RectGreen {
    fn new(cmin: Point, cmax: Point) -> Self {
        let (a, b) = (cmax[0] - cmin[0], cmax[1] - cmin[1]);
        if a <= b {
            RectGreen { corner: cmin, l1: a, l2: b, swapped: false }
        } else {
            RectGreen { corner: cmin, l1: b, l2: a, swapped: true }
        }
    }

    fn local(&self, x: Point) -> (f64, f64) {
        let p = sub(x, self.corner);
        if self.swapped {
            (p[1], p[0])
        } else {
            (p[0], p[1])
        }
    }

    /// (q, 1−q) with q = e^{−πd/l1}, the exponent kept in range.
    fn q_of(&self, d: f64) -> (f64, f64) {
        let e = -PI * d / self.l1;
        if e < -745.0 {
            (0.0, 1.0)
        } else {
            (e.exp(), -f64::exp_m1(e))
        }
    }

    fn green(&self, x: Point, y: Point) -> f64 {
        let (x1, x2) = self.local(x);
        let (y1, y2) = self.local(y);
        let (al, be) = (PI * x1 / self.l1, PI * y1 / self.l1);
        let t = |d: f64| -> f64 {
            let (q, omq) = self.q_of(d);
            0.25 * (p_fn(q, omq, al + be) / p_fn(q, omq, al - be)).ln()
        };
        let mut g = 0.0;
        for j in 0..32 {
            let off = 2.0 * self.l2 * j as f64;
            let shell = t((x2 - y2).abs() + off) - t(2.0 * self.l2 - (x2 + y2) + off)
                - t(x2 + y2 + off)
                + t(2.0 * self.l2 - (x2 - y2).abs() + off);
            g += shell;
            if j >= 1 && shell.abs() < 1e-15 {
                break;
            }
        }
        g / PI
    }

    /// Analytic x → y limit of G + log|x−y|/(2π). The j = 0 near-diagonal
    /// log term cancels the free-space singularity and leaves log(l1/π).
    fn robin(&self, x: Point) -> f64 {
        let (x1, x2) = self.local(x);
        let al = PI * x1 / self.l1;
        let t_at = |d: f64| -> f64 {
            let (q, omq) = self.q_of(d);
            0.25 * (p_fn(q, omq, 2.0 * al) / (omq * omq)).ln()
        };
        let mut s = (self.l1 / PI).ln() / (2.0 * PI) + 0.25 * p_fn(1.0, 0.0, 2.0 * al).ln() / PI;
        for j in 0..32 {
            let off = 2.0 * self.l2 * j as f64;
            let mut shell = -t_at(2.0 * self.l2 - 2.0 * x2 + off) - t_at(2.0 * x2 + off)
                + t_at(2.0 * self.l2 + off);
            if j >= 1 {
                shell += t_at(off);
            }
            s += shell / PI;
            if j >= 1 && shell.abs() < 1e-15 {
                break;
            }
        }
        s
    }
}

/// Method of fundamental solutions: H(·, y) is fit as a combination of
/// log charges placed on a dilated copy of the boundary, collocated at 4×
/// as many boundary points and solved through a truncated SVD (cutoff
/// 1e−12·σ_max). One factorization serves every query.
struct Mfs {
    charges: Vec<Point>,
    colloc: Vec<Point>,
    u_t: DMatrix<f64>,
    sinv: DVector<f64>,
    v: DMatrix<f64>,
    cache: Mutex<Option<(Point, Vec<f64>)>>,
}

impl Mfs {
    fn new(spec: &DomainSpec, charges_hint: usize) -> Self {
        let diam = spec.diameter();
        let offset = 0.15 * diam;
        let (charges, colloc) = match spec {
            DomainSpec::Disk { center, radius } => {
                let n = if charges_hint > 0 { charges_hint } else { 110 };
                let ring = |r: f64, m: usize, phase: f64| -> Vec<Point> {
                    (0..m)
                        .map(|k| {
                            let th = 2.0 * PI * (k as f64 + phase) / m as f64;
                            [center[0] + r * th.cos(), center[1] + r * th.sin()]
                        })
                        .collect()
                };
                (ring(radius + offset, n, 0.0), ring(*radius, 4 * n, 0.5))
            }
            DomainSpec::Annulus { center, r_inner, r_outer } => {
                let n = if charges_hint > 0 { charges_hint } else { 110 };
                let inner_off = offset.min(0.5 * r_inner);
                let ring = |r: f64, m: usize, phase: f64| -> Vec<Point> {
                    (0..m)
                        .map(|k| {
                            let th = 2.0 * PI * (k as f64 + phase) / m as f64;
                            [center[0] + r * th.cos(), center[1] + r * th.sin()]
                        })
                        .collect()
                };
                let mut ch = ring(r_outer + offset, n, 0.0);
                ch.extend(ring(r_inner - inner_off, n, 0.0));
                let mut co = ring(*r_outer, 4 * n, 0.5);
                co.extend(ring(*r_inner, 4 * n, 0.5));
                (ch, co)
            }
            DomainSpec::Rectangle { corner_min, corner_max } => {
                let verts = vec![
                    *corner_min,
                    [corner_max[0], corner_min[1]],
                    *corner_max,
                    [corner_min[0], corner_max[1]],
                ];
                polygon_layers(&verts, charges_hint, offset)
            }
            DomainSpec::Polygon { vertices } => polygon_layers(vertices, charges_hint, offset),
        };

        let m = colloc.len();
        let n = charges.len();
        let mut a = DMatrix::<f64>::zeros(m, n);
        for j in 0..m {
            for k in 0..n {
                a[(j, k)] = -(norm2(sub(colloc[j], charges[k])).sqrt().ln()) / (2.0 * PI);
            }
        }
        let svd = a.svd(true, true);
        let u = svd.u.expect("svd with u");
        let v_t = svd.v_t.expect("svd with v_t");
        let smax = svd.singular_values.max();
        let sinv = svd
            .singular_values
            .map(|s| if s > 1e-12 * smax { 1.0 / s } else { 0.0 });
        Mfs {
            charges,
            colloc,
            u_t: u.transpose(),
            sinv,
            v: v_t.transpose(),
            cache: Mutex::new(None),
        }
    }

    fn target(&self, xb: Point, y: Point) -> f64 {
        norm2(sub(xb, y)).sqrt().ln() / (2.0 * PI)
    }

    fn coeffs(&self, y: Point) -> Vec<f64> {
        if let Some((cy, c)) = self.cache.lock().unwrap().as_ref() {
            if *cy == y {
                return c.clone();
            }
        }
        let rhs = DVector::from_iterator(
            self.colloc.len(),
            self.colloc.iter().map(|xb| self.target(*xb, y)),
        );
        let mut ut_rhs = &self.u_t * rhs;
        for (i, s) in self.sinv.iter().enumerate() {
            ut_rhs[i] *= s;
        }
        let c = (&self.v * ut_rhs).iter().copied().collect::<Vec<f64>>();
        *self.cache.lock().unwrap() = Some((y, c.clone()));
        c
    }

    fn regular_part(&self, x: Point, y: Point) -> f64 {
        let c = self.coeffs(y);
        let mut h = 0.0;
        for (ck, qk) in c.iter().zip(&self.charges) {
            h += ck * (-(norm2(sub(x, *qk)).sqrt().ln()) / (2.0 * PI));
        }
        h
    }

    fn grad_x_regular_part(&self, x: Point, y: Point) -> Point {
        let c = self.coeffs(y);
        let mut g = [0.0, 0.0];
        for (ck, qk) in c.iter().zip(&self.charges) {
            let d = sub(x, *qk);
            let n2 = norm2(d);
            g[0] -= ck * d[0] / (2.0 * PI * n2);
            g[1] -= ck * d[1] / (2.0 * PI * n2);
        }
        g
    }

    fn fit_residual(&self, y: Point) -> f64 {
        let c = self.coeffs(y);
        let mut worst = 0.0f64;
        for xb in &self.colloc {
            let mut h = 0.0;
            for (ck, qk) in c.iter().zip(&self.charges) {
                h += ck * (-(norm2(sub(*xb, *qk)).sqrt().ln()) / (2.0 * PI));
            }
            worst = worst.max((h - self.target(*xb, y)).abs());
        }
        worst
    }
}

/// Boundary sampling for polygonal domains: collocation points spread by
/// arc length, charges at every 4th sample pushed out along the edge normal.
fn polygon_layers(vertices: &[Point], charges_hint: usize, offset: f64) -> (Vec<Point>, Vec<Point>) {
    let n_charges = if charges_hint > 0 { charges_hint } else { (vertices.len() * 24).max(160) };
    let n_colloc = 4 * n_charges;
    let mut lens = Vec::with_capacity(vertices.len());
    let mut total = 0.0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        let l = norm2(sub(b, a)).sqrt();
        lens.push(l);
        total += l;
    }
    let mut colloc = Vec::with_capacity(n_colloc);
    let mut charges = Vec::with_capacity(n_charges);
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        let m = ((n_colloc as f64 * lens[i] / total).round() as usize).max(4);
        let e = sub(b, a);
        // positively oriented polygon: outward normal is the right-hand side
        let nrm = [e[1] / lens[i], -e[0] / lens[i]];
        for k in 0..m {
            let t = (k as f64 + 0.5) / m as f64;
            let pt = [a[0] + t * e[0], a[1] + t * e[1]];
            colloc.push(pt);
            if k % 4 == 2 {
                charges.push([pt[0] + offset * nrm[0], pt[1] + offset * nrm[1]]);
            }
        }
    }
    (charges, colloc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    fn unit_disk_green() -> GreenFn {
        GreenFn::for_domain(&DomainSpec::unit_disk())
    }

    #[test]
    fn disk_robin_closed_form() {
        let g = unit_disk_green();
        let r = g.robin([0.5, 0.0]).unwrap();
        assert!((r - 0.75f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((r + 0.045_785_9).abs() < 1e-6);
        assert_eq!(g.robin([0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn disk_grad_frozen_value() {
        let g = unit_disk_green();
        let grad = g.grad_x_green([0.3, 0.0], [-0.3, 0.0]).unwrap();
        // symmetric pair on a diameter: d/dt G((t,0),(−a,0)) at t = a
        // collapses to (a/(a²+1) − 1/(2a))/(2π)
        let exact = (0.3 / 1.09 - 1.0 / 0.6) / (2.0 * PI);
        assert!((grad[0] - exact).abs() < 1e-12);
        assert!((grad[0] + 0.221_454_1).abs() < 1e-6);
        assert!(grad[1].abs() < 1e-12);
        // independent finite-difference check
        let h = 1e-6;
        let fd = (g.green([0.3 + h, 0.0], [-0.3, 0.0]).unwrap()
            - g.green([0.3 - h, 0.0], [-0.3, 0.0]).unwrap())
            / (2.0 * h);
        assert!((grad[0] - fd).abs() < 1e-8);
    }

    #[test]
    fn disk_symmetry_and_boundary() {
        let g = unit_disk_green();
        let a = [0.2, 0.4];
        let b = [-0.5, 0.1];
        assert!((g.green(a, b).unwrap() - g.green(b, a).unwrap()).abs() < 1e-14);
        assert!(g.green([1.0, 0.0], b).unwrap().abs() < 1e-12);
        assert!(g.green(a, b).unwrap() > 0.0);
    }

    #[test]
    fn disk_grad_robin_identity() {
        let g = unit_disk_green();
        let x = [0.35, -0.2];
        let gr = g.grad_robin(x).unwrap();
        let gh = g.grad_x_regular_part(x, x).unwrap();
        assert!((gr[0] - 2.0 * gh[0]).abs() < 1e-13);
        assert!((gr[1] - 2.0 * gh[1]).abs() < 1e-13);
    }

    #[test]
    fn rectangle_series_basics() {
        let spec = DomainSpec::Rectangle { corner_min: [0.0, 0.0], corner_max: [1.0, 1.0] };
        let g = GreenFn::for_domain(&spec);
        let a = [0.3, 0.4];
        let b = [0.7, 0.6];
        assert!((g.green(a, b).unwrap() - g.green(b, a).unwrap()).abs() < 1e-13);
        assert!(g.green(a, b).unwrap() > 0.0);
        assert!(g.green([0.3, 1.0], b).unwrap().abs() < 1e-12);
        assert!(g.green([0.0, 0.4], b).unwrap().abs() < 1e-12);

        // H is harmonic in x away from y: 5-point laplacian ≈ 0
        let h = 1e-3;
        let hp = |x: Point| g.regular_part(x, b).unwrap();
        let lap = (hp([a[0] + h, a[1]]) + hp([a[0] - h, a[1]]) + hp([a[0], a[1] + h])
            + hp([a[0], a[1] - h])
            - 4.0 * hp(a))
            / (h * h);
        assert!(lap.abs() < 1e-5, "laplacian of H = {lap}");
    }

    #[test]
    fn rectangle_robin_is_diagonal_limit() {
        let spec = DomainSpec::Rectangle { corner_min: [0.0, 0.0], corner_max: [2.0, 1.0] };
        let g = GreenFn::for_domain(&spec);
        for x in [[1.0, 0.5], [0.4, 0.7], [1.6, 0.2]] {
            let r = g.robin(x).unwrap();
            // two-level probe cancels the O(δ) drift of H along the diagonal
            let d = 1e-5;
            let h1 = g.regular_part(x, [x[0] + d, x[1] + d]).unwrap();
            let h2 = g.regular_part(x, [x[0] + 0.5 * d, x[1] + 0.5 * d]).unwrap();
            let near = 2.0 * h2 - h1;
            assert!((r - near).abs() < 1e-8, "robin {r} vs near-diagonal {near} at {x:?}");
        }
        // symmetric domain: robin has a critical point at the center
        let gr = g.grad_robin([1.0, 0.5]).unwrap();
        assert!(gr[0].abs() < 1e-8 && gr[1].abs() < 1e-8);
    }

    #[test]
    fn collocation_matches_disk_closed_form() {
        let spec = DomainSpec::unit_disk();
        let exact = GreenFn::for_domain(&spec);
        let mfs = GreenFn::collocation(&spec, 110);
        let pairs = [([0.2, 0.3], [-0.4, 0.1]), ([0.0, 0.0], [0.5, 0.5]), ([0.6, 0.0], [0.61, 0.0])];
        for (x, y) in pairs {
            let ge = exact.green(x, y).unwrap();
            let gm = mfs.green(x, y).unwrap();
            assert!((ge - gm).abs() < 1e-8, "G mismatch {ge} vs {gm}");
        }
        let re = exact.robin([0.5, 0.0]).unwrap();
        let rm = mfs.robin([0.5, 0.0]).unwrap();
        assert!((re - rm).abs() < 1e-8);
        let gre = exact.grad_robin([0.3, 0.2]).unwrap();
        let grm = mfs.grad_robin([0.3, 0.2]).unwrap();
        assert!((gre[0] - grm[0]).abs() < 1e-6 && (gre[1] - grm[1]).abs() < 1e-6);
        assert!(mfs.fit_residual([0.5, 0.0]).unwrap() < 1e-9);
    }

    #[test]
    fn annulus_collocation_boundary_and_symmetry() {
        let spec = DomainSpec::Annulus { center: [0.0, 0.0], r_inner: 0.3, r_outer: 1.0 };
        let g = GreenFn::for_domain(&spec);
        let y = [0.63, 0.0];
        assert!(g.fit_residual(y).unwrap() < 1e-8);
        for th in [0.0f64, 1.0, 2.5] {
            let outer = [0.999_999 * th.cos(), 0.999_999 * th.sin()];
            let inner = [0.300_001 * th.cos(), 0.300_001 * th.sin()];
            assert!(g.green(outer, y).unwrap().abs() < 1e-6);
            assert!(g.green(inner, y).unwrap().abs() < 1e-6);
        }
        let a = [0.0, 0.63];
        assert!((g.green(a, y).unwrap() - g.green(y, a).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn error_paths() {
        let g = unit_disk_green();
        assert!(matches!(
            g.green([0.2, 0.2], [0.2, 0.2]),
            Err(GreenError::CoincidentPoints(_, _))
        ));
        assert!(matches!(g.robin([1.5, 0.0]), Err(GreenError::PointOutside(_, _))));
        assert!(matches!(g.green([0.1, 0.0], [2.0, 0.0]), Err(GreenError::PointOutside(_, _))));
    }
}
