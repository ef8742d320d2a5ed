//! Analytic closed boundary curves, (possibly multiply-connected) domains and
//! their equispaced discretizations.
//!
//! Every curve is a 2π-periodic map `t ↦ x(t)`. Unit normals are stored
//! pointing to the exterior of the domain Ω on every curve: outward on the
//! outer curve and into the hole on hole curves. Kernel assembly uses the
//! stored normals as-is.

use crate::error::{Error, Result};
use crate::Point;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Number of samples used for shape validity and containment checks.
pub const SHAPE_CHECK_SAMPLES: usize = 10_000;

/// Interior grid points closer than this many node spacings (in arc length)
/// to Γ are masked.
pub const NEAR_BOUNDARY_SPACINGS: f64 = 5.0;

/// Minimum sample count for the oversampled spectral differentiation grid.
const SPECTRAL_OVERSAMPLE: usize = 256;

/// Resolution of the internal discretization used for area, perimeter and
/// stand-alone containment queries.
const FINE_N: usize = 1024;

/// JSON shape description.
///
/// ```json
/// {"type": "radial", "a0": 1.0, "cos": [0, 0, 0.2], "sin": [0, 0.3]}
/// {"type": "annulus", "outer": {"type": "ellipse", "a": 1, "b": 1},
///                     "inner": {"type": "ellipse", "a": 0.4, "b": 0.4}}
/// ```
///
/// For `radial`, `cos[j-1]` and `sin[j-1]` are the amplitudes of `cos jθ` and
/// `sin jθ` in `r(θ) = a0 + Σ_j (cos_j cos jθ + sin_j sin jθ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ShapeSpec {
    Radial {
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Crescent,
    Annulus {
        outer: Box<ShapeSpec>,
        inner: Box<ShapeSpec>,
    },
}

impl ShapeSpec {
    /// `r(θ) = 1 + 0.2 cos 3θ + 0.3 sin 2θ`.
    pub fn nonsymmetric() -> Self {
        ShapeSpec::Radial {
            a0: 1.0,
            cos: vec![0.0, 0.0, 0.2],
            sin: vec![0.0, 0.3],
        }
    }

    /// Outer curve as [`nonsymmetric`](Self::nonsymmetric), hole
    /// `r(θ) = 0.5 + 0.1 cos 3θ + 0.15 sin 2θ`.
    pub fn nonsymmetric_annulus() -> Self {
        ShapeSpec::Annulus {
            outer: Box::new(Self::nonsymmetric()),
            inner: Box::new(ShapeSpec::Radial {
                a0: 0.5,
                cos: vec![0.0, 0.0, 0.1],
                sin: vec![0.0, 0.15],
            }),
        }
    }

    pub fn disk(radius: f64) -> Self {
        ShapeSpec::Ellipse {
            a: radius,
            b: radius,
        }
    }

    pub fn build(&self) -> Result<Boundary> {
        match self {
            ShapeSpec::Annulus { outer, inner } => {
                Boundary::annulus(outer.curve()?, inner.curve()?)
            }
            other => Ok(Boundary::simple(other.curve()?)),
        }
    }

    fn curve(&self) -> Result<Curve> {
        match self {
            ShapeSpec::Radial { a0, cos, sin } => Curve::radial(*a0, cos, sin),
            ShapeSpec::Ellipse { a, b } => Curve::ellipse(*a, *b),
            ShapeSpec::Crescent => Ok(Curve::crescent()),
            ShapeSpec::Annulus { .. } => Err(Error::InvalidShape(
                "an annulus cannot be nested inside another shape".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    ClosedForm,
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Radial {
        a0: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Crescent,
}

/// A closed analytic curve `x(t)`, `t ∈ [0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    shape: Shape,
    mode: DerivativeMode,
}

impl Curve {
    /// Polar curve with `r(θ) = a0 + Σ_j (cos[j-1] cos jθ + sin[j-1] sin jθ)`.
    pub fn radial(a0: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        let all_finite = a0.is_finite() && cos.iter().chain(sin).all(|c| c.is_finite());
        if !all_finite {
            return Err(Error::InvalidShape("non-finite radial coefficient".into()));
        }
        let curve = Curve {
            shape: Shape::Radial {
                a0,
                cos: cos.to_vec(),
                sin: sin.to_vec(),
            },
            mode: DerivativeMode::ClosedForm,
        };
        let min_r = (0..SHAPE_CHECK_SAMPLES)
            .map(|k| curve.radius(TAU * k as f64 / SHAPE_CHECK_SAMPLES as f64).0)
            .fold(f64::INFINITY, f64::min);
        if min_r <= 0.0 {
            return Err(Error::InvalidShape(format!(
                "radial curve has nonpositive radius (min r = {min_r})"
            )));
        }
        Ok(curve)
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidShape(format!(
                "ellipse semi-axes must be positive, got ({a}, {b})"
            )));
        }
        Ok(Curve {
            shape: Shape::Ellipse { a, b },
            mode: DerivativeMode::ClosedForm,
        })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::ellipse(radius, radius)
    }

    /// Crescent `r(s) = 0.2/(1 + exp(4(s−3π/2)(s−π/2))) + 0.4`,
    /// `θ(s) = −(49/50)π sin s`. Derivatives are spectral.
    pub fn crescent() -> Self {
        Curve {
            shape: Shape::Crescent,
            mode: DerivativeMode::Spectral,
        }
    }

    /// Same curve, but with derivatives taken by trigonometric
    /// differentiation of sampled positions.
    pub fn with_spectral_derivatives(mut self) -> Self {
        self.mode = DerivativeMode::Spectral;
        self
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn name(&self) -> &'static str {
        match self.shape {
            Shape::Radial { .. } => "radial",
            Shape::Ellipse { .. } => "ellipse",
            Shape::Crescent => "crescent",
        }
    }

    pub fn spec(&self) -> ShapeSpec {
        match &self.shape {
            Shape::Radial { a0, cos, sin } => ShapeSpec::Radial {
                a0: *a0,
                cos: cos.clone(),
                sin: sin.clone(),
            },
            Shape::Ellipse { a, b } => ShapeSpec::Ellipse { a: *a, b: *b },
            Shape::Crescent => ShapeSpec::Crescent,
        }
    }

    // r, r', r'' of a radial curve
    fn radius(&self, t: f64) -> (f64, f64, f64) {
        match &self.shape {
            Shape::Radial { a0, cos, sin } => {
                let (mut r, mut dr, mut ddr) = (*a0, 0.0, 0.0);
                for (j, c) in cos.iter().enumerate() {
                    let m = (j + 1) as f64;
                    let (s, co) = (m * t).sin_cos();
                    r += c * co;
                    dr -= c * m * s;
                    ddr -= c * m * m * co;
                }
                for (j, c) in sin.iter().enumerate() {
                    let m = (j + 1) as f64;
                    let (s, co) = (m * t).sin_cos();
                    r += c * s;
                    dr += c * m * co;
                    ddr -= c * m * m * s;
                }
                (r, dr, ddr)
            }
            _ => unreachable!("radius() on a non-radial curve"),
        }
    }

    pub fn position(&self, t: f64) -> Point {
        match &self.shape {
            Shape::Radial { .. } => {
                let r = self.radius(t).0;
                let (s, c) = t.sin_cos();
                [r * c, r * s]
            }
            Shape::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                [a * c, b * s]
            }
            Shape::Crescent => {
                let r = 0.2 / (1.0 + (4.0 * (t - 1.5 * PI) * (t - 0.5 * PI)).exp()) + 0.4;
                let theta = -0.98 * PI * t.sin();
                let (s, c) = theta.sin_cos();
                [r * c, r * s]
            }
        }
    }

    /// `(x'(t), x''(t))` from closed-form expressions, when the shape has them.
    pub fn closed_form_derivatives(&self, t: f64) -> Option<(Point, Point)> {
        match &self.shape {
            Shape::Radial { .. } => {
                let (r, dr, ddr) = self.radius(t);
                let (s, c) = t.sin_cos();
                Some((
                    [dr * c - r * s, dr * s + r * c],
                    [ddr * c - 2.0 * dr * s - r * c, ddr * s + 2.0 * dr * c - r * s],
                ))
            }
            Shape::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                Some(([-a * s, b * c], [-a * c, -b * s]))
            }
            Shape::Crescent => None,
        }
    }

    /// Positions and derivatives at `s_k = 2πk/n` in the curve's own
    /// derivative mode.
    fn sample(&self, n: usize) -> (Vec<Point>, Vec<Point>, Vec<Point>) {
        let s = |k: usize| TAU * k as f64 / n as f64;
        let x: Vec<Point> = (0..n).map(|k| self.position(s(k))).collect();
        match self.mode {
            DerivativeMode::ClosedForm => {
                let (dx, ddx) = (0..n)
                    .map(|k| self.closed_form_derivatives(s(k)).expect("closed form"))
                    .unzip();
                (x, dx, ddx)
            }
            DerivativeMode::Spectral => {
                let factor = SPECTRAL_OVERSAMPLE.div_ceil(n).max(1);
                let nf = n * factor;
                let fine: Vec<Point> = if factor == 1 {
                    x.clone()
                } else {
                    (0..nf)
                        .map(|k| self.position(TAU * k as f64 / nf as f64))
                        .collect()
                };
                let (dx, ddx) = spectral_derivatives(&fine);
                (
                    x,
                    dx.into_iter().step_by(factor).collect(),
                    ddx.into_iter().step_by(factor).collect(),
                )
            }
        }
    }
}

/// First and second derivatives of periodic samples on `2πk/n`, by
/// trigonometric differentiation. The Nyquist mode is dropped for the first
/// derivative and kept for the second.
pub fn spectral_derivatives(x: &[Point]) -> (Vec<Point>, Vec<Point>) {
    let n = x.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut d1 = vec![[0.0; 2]; n];
    let mut d2 = vec![[0.0; 2]; n];
    for comp in 0..2 {
        let mut spec: Vec<Complex64> = x.iter().map(|p| Complex64::new(p[comp], 0.0)).collect();
        fwd.process(&mut spec);
        let mut first = spec.clone();
        let mut second = spec;
        for k in 0..n {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            let nyquist = n.is_multiple_of(2) && k == n / 2;
            first[k] *= if nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, m)
            };
            second[k] *= -m * m;
        }
        inv.process(&mut first);
        inv.process(&mut second);
        for k in 0..n {
            d1[k][comp] = first[k].re / n as f64;
            d2[k][comp] = second[k].re / n as f64;
        }
    }
    (d1, d2)
}

/// One outer curve plus optional holes.
#[derive(Clone, Debug, PartialEq)]
pub struct Boundary {
    pub outer: Curve,
    pub holes: Vec<Curve>,
}

impl Boundary {
    pub fn simple(outer: Curve) -> Self {
        Boundary {
            outer,
            holes: Vec::new(),
        }
    }

    pub fn annulus(outer: Curve, inner: Curve) -> Result<Self> {
        Self::new(outer, vec![inner])
    }

    /// Validates that each hole lies strictly inside `outer` and that the
    /// holes are pairwise disjoint.
    pub fn new(outer: Curve, holes: Vec<Curve>) -> Result<Self> {
        let outer_disc = DiscreteCurve::new(&outer, FINE_N, false);
        for (h, hole) in holes.iter().enumerate() {
            for k in 0..SHAPE_CHECK_SAMPLES {
                let p = hole.position(TAU * k as f64 / SHAPE_CHECK_SAMPLES as f64);
                if outer_disc.winding_number(p).abs() != 1 {
                    return Err(Error::InvalidShape(format!(
                        "hole {h} is not contained in the outer curve"
                    )));
                }
            }
        }
        for (i, a) in holes.iter().enumerate() {
            let a_disc = DiscreteCurve::new(a, FINE_N, true);
            for (j, b) in holes.iter().enumerate() {
                if i == j {
                    continue;
                }
                let hit = (0..SHAPE_CHECK_SAMPLES / 10).any(|k| {
                    let p = b.position(TAU * k as f64 / (SHAPE_CHECK_SAMPLES / 10) as f64);
                    a_disc.winding_number(p) != 0
                });
                if hit {
                    return Err(Error::InvalidShape(format!("holes {i} and {j} overlap")));
                }
            }
        }
        Ok(Boundary { outer, holes })
    }

    /// Outer curve first, then holes.
    pub fn curves(&self) -> impl Iterator<Item = &Curve> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn spec(&self) -> ShapeSpec {
        match self.holes.as_slice() {
            [] => self.outer.spec(),
            [inner] => ShapeSpec::Annulus {
                outer: Box::new(self.outer.spec()),
                inner: Box::new(inner.spec()),
            },
            _ => self.outer.spec(),
        }
    }

    pub fn area(&self) -> f64 {
        let disc = DiscreteBoundary::new(self, FINE_N).expect("fine discretization");
        disc.area()
    }

    pub fn perimeter(&self) -> f64 {
        let disc = DiscreteBoundary::new(self, FINE_N).expect("fine discretization");
        disc.perimeter()
    }

    /// Builds a fine discretization per call; for many queries discretize
    /// once and use [`DiscreteBoundary::contains`].
    pub fn contains(&self, p: Point) -> bool {
        DiscreteBoundary::new(self, FINE_N)
            .expect("fine discretization")
            .contains(p)
    }

    /// Simply connected and star-shaped with respect to the origin or the
    /// centroid of the outer curve.
    pub fn is_star_shaped(&self) -> bool {
        if !self.holes.is_empty() {
            return false;
        }
        let n = 4096;
        let (x, dx, _) = self.outer.sample(n);
        let centroid = {
            let s = x.iter().fold([0.0, 0.0], |acc, p| [acc[0] + p[0], acc[1] + p[1]]);
            [s[0] / n as f64, s[1] / n as f64]
        };
        [[0.0, 0.0], centroid].iter().any(|c| {
            let crosses: Vec<f64> = x
                .iter()
                .zip(&dx)
                .map(|(p, d)| (p[0] - c[0]) * d[1] - (p[1] - c[1]) * d[0])
                .collect();
            crosses.iter().all(|&v| v > 0.0) || crosses.iter().all(|&v| v < 0.0)
        })
    }

    /// `(x_min, x_max, y_min, y_max)` of the outer curve.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for k in 0..SHAPE_CHECK_SAMPLES {
            let p = self
                .outer
                .position(TAU * k as f64 / SHAPE_CHECK_SAMPLES as f64);
            b[0] = b[0].min(p[0]);
            b[1] = b[1].max(p[0]);
            b[2] = b[2].min(p[1]);
            b[3] = b[3].max(p[1]);
        }
        b
    }
}

/// Node data of one curve at `s_k = 2πk/n`.
#[derive(Clone, Debug)]
pub struct DiscreteCurve {
    pub curve: Curve,
    pub is_hole: bool,
    pub n: usize,
    pub s: Vec<f64>,
    pub x: Vec<Point>,
    pub dx: Vec<Point>,
    pub ddx: Vec<Point>,
    pub speed: Vec<f64>,
    pub normal: Vec<Point>,
}

impl DiscreteCurve {
    fn new(curve: &Curve, n: usize, is_hole: bool) -> Self {
        let (x, dx, ddx) = curve.sample(n);
        let speed: Vec<f64> = dx.iter().map(|d| d[0].hypot(d[1])).collect();
        let signed_area: f64 = x
            .iter()
            .zip(&dx)
            .map(|(p, d)| p[0] * d[1] - p[1] * d[0])
            .sum::<f64>()
            * PI
            / n as f64;
        let ccw = signed_area > 0.0;
        // (x2', -x1') is outward for a counterclockwise curve
        let sign = if ccw != is_hole { 1.0 } else { -1.0 };
        let normal = dx
            .iter()
            .zip(&speed)
            .map(|(d, &v)| [sign * d[1] / v, -sign * d[0] / v])
            .collect();
        DiscreteCurve {
            curve: curve.clone(),
            is_hole,
            n,
            s: (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
            x,
            dx,
            ddx,
            speed,
            normal,
        }
    }

    /// Winding number of the curve about `p` (trapezoid rule on the angle
    /// increment, rounded).
    pub fn winding_number(&self, p: Point) -> i32 {
        let w: f64 = self
            .x
            .iter()
            .zip(&self.dx)
            .map(|(x, d)| {
                let (rx, ry) = (x[0] - p[0], x[1] - p[1]);
                (rx * d[1] - ry * d[0]) / (rx * rx + ry * ry)
            })
            .sum::<f64>()
            / self.n as f64;
        w.round() as i32
    }

    /// `(1/2)∮(x dy − y dx)`, signed.
    pub fn signed_area(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.dx)
            .map(|(p, d)| p[0] * d[1] - p[1] * d[0])
            .sum::<f64>()
            * PI
            / self.n as f64
    }

    pub fn length(&self) -> f64 {
        self.speed.iter().sum::<f64>() * TAU / self.n as f64
    }

    /// Largest distance between consecutive nodes.
    pub fn max_spacing(&self) -> f64 {
        (0..self.n)
            .map(|k| {
                let a = self.x[k];
                let b = self.x[(k + 1) % self.n];
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .fold(0.0, f64::max)
    }
}

/// Equispaced discretization of every curve of a [`Boundary`].
#[derive(Clone, Debug)]
pub struct DiscreteBoundary {
    pub curves: Vec<DiscreteCurve>,
}

impl DiscreteBoundary {
    /// `n` nodes on every curve; `n` must be even and at least 4.
    pub fn new(boundary: &Boundary, n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) || n < 4 {
            return Err(Error::Contract(format!(
                "nodes per curve must be even and >= 4, got {n}"
            )));
        }
        let curves = boundary
            .curves()
            .enumerate()
            .map(|(i, c)| DiscreteCurve::new(c, n, i > 0))
            .collect();
        Ok(DiscreteBoundary { curves })
    }

    /// Splits a total node budget evenly across curves, rounding each share
    /// up to an even number.
    pub fn with_total(boundary: &Boundary, n_total: usize) -> Result<Self> {
        let count = 1 + boundary.holes.len();
        let per = n_total.div_ceil(count);
        Self::new(boundary, per + per % 2)
    }

    /// Same curves with `factor` times as many nodes each.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Contract("refinement factor must be positive".into()));
        }
        let curves = self
            .curves
            .iter()
            .map(|c| DiscreteCurve::new(&c.curve, c.n * factor, c.is_hole))
            .collect();
        Ok(DiscreteBoundary { curves })
    }

    pub fn total_nodes(&self) -> usize {
        self.curves.iter().map(|c| c.n).sum()
    }

    /// Global index of the first node of each curve.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.curves.len());
        let mut acc = 0;
        for c in &self.curves {
            off.push(acc);
            acc += c.n;
        }
        off
    }

    /// Row/column index → `(curve, node)`.
    pub fn node_map(&self) -> Vec<(usize, usize)> {
        self.curves
            .iter()
            .enumerate()
            .flat_map(|(c, dc)| (0..dc.n).map(move |k| (c, k)))
            .collect()
    }

    pub fn contains(&self, p: Point) -> bool {
        let mut curves = self.curves.iter();
        let outer = curves.next().expect("outer curve");
        outer.winding_number(p) != 0 && curves.all(|h| h.winding_number(p) == 0)
    }

    pub fn area(&self) -> f64 {
        let mut curves = self.curves.iter();
        let outer = curves.next().expect("outer curve").signed_area().abs();
        outer - curves.map(|h| h.signed_area().abs()).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.curves.iter().map(DiscreteCurve::length).sum()
    }

    /// Masking distance for interior evaluation.
    pub fn exclusion_distance(&self) -> f64 {
        NEAR_BOUNDARY_SPACINGS
            * self
                .curves
                .iter()
                .map(DiscreteCurve::max_spacing)
                .fold(0.0, f64::max)
    }

    fn distance_to_nodes(&self, p: Point) -> f64 {
        self.curves
            .iter()
            .flat_map(|c| c.x.iter())
            .map(|x| (x[0] - p[0]).hypot(x[1] - p[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellState {
    Inside,
    Outside,
    NearBoundary,
}

/// Cell-centred rectangular grid with an inside mask; the crude interior
/// quadrature used for L²(Ω) norms.
#[derive(Clone, Debug)]
pub struct InteriorGrid {
    pub bbox: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    /// Row-major `ny × nx`.
    pub mask: Vec<CellState>,
    /// Accepted points and their row-major cell indices.
    pub points: Vec<Point>,
    pub cells: Vec<usize>,
    pub cell_area: f64,
}

impl InteriorGrid {
    pub fn new(disc: &DiscreteBoundary, bbox: [f64; 4], nx: usize, ny: usize) -> Self {
        let hx = (bbox[1] - bbox[0]) / nx as f64;
        let hy = (bbox[3] - bbox[2]) / ny as f64;
        let excl = disc.exclusion_distance();
        let centres: Vec<Point> = (0..ny)
            .flat_map(|j| {
                (0..nx).map(move |i| {
                    [
                        bbox[0] + (i as f64 + 0.5) * hx,
                        bbox[2] + (j as f64 + 0.5) * hy,
                    ]
                })
            })
            .collect();
        let mask = crate::par::map(&centres, |&p| {
            if disc.distance_to_nodes(p) < excl {
                CellState::NearBoundary
            } else if disc.contains(p) {
                CellState::Inside
            } else {
                CellState::Outside
            }
        });
        let (cells, points) = mask
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == CellState::Inside)
            .map(|(i, _)| (i, centres[i]))
            .unzip();
        InteriorGrid {
            bbox,
            nx,
            ny,
            mask,
            points,
            cells,
            cell_area: hx * hy,
        }
    }

    /// Grid over the boundary's bounding box, padded slightly, with roughly
    /// square cells and `n` cells along the longer side.
    pub fn covering(disc: &DiscreteBoundary, boundary: &Boundary, n: usize) -> Self {
        let b = boundary.bbox();
        let pad = 0.02 * (b[1] - b[0]).max(b[3] - b[2]);
        let bbox = [b[0] - pad, b[1] + pad, b[2] - pad, b[3] + pad];
        let (w, h) = (bbox[1] - bbox[0], bbox[3] - bbox[2]);
        let (nx, ny) = if w >= h {
            (n, ((n as f64 * h / w).ceil() as usize).max(1))
        } else {
            (((n as f64 * w / h).ceil() as usize).max(1), n)
        };
        Self::new(disc, bbox, nx, ny)
    }
}
