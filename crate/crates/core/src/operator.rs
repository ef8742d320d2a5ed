//! Kernel splits, product quadrature and Nyström assembly of the boundary
//! operators `2D(κ)` (double layer) and `2S(κ)` (single layer).
//!
//! On a smooth closed curve both parametrized kernels have the form
//! `K(t,s) = K₁(t,s) ln(4 sin²((t−s)/2)) + K₂(t,s)` with `K₁`, `K₂` analytic.
//! The logarithmic part is integrated exactly against the trigonometric
//! interpolant of the density (weights [`kress_weight`]); the smooth part with
//! the trapezoid rule.

use crate::error::{Error, Result};
use crate::geometry::{DiscreteBoundary, DiscreteCurve};
use crate::specfun::{Cylinder, EULER_GAMMA};
use crate::Point;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_PI, PI, TAU};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which boundary operator is being discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Double layer only, `I − 2D`.
    Dlp,
    /// Combined field, `I − 2D − 2iηS`.
    Cfie,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Dlp => "dlp",
            Representation::Cfie => "cfie",
        }
    }
}

/// Values of one kernel at a parameter pair.
///
/// `full` is `None` on the diagonal, where only the split parts exist.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSplit {
    pub full: Option<Complex64>,
    pub log_part: Complex64,
    pub smooth_part: Complex64,
}

/// Source-node data needed by the kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceNode {
    pub x: Point,
    pub ddx: Point,
    pub speed: f64,
    pub normal: Point,
}

impl SourceNode {
    pub fn of(curve: &DiscreteCurve, k: usize) -> Self {
        SourceNode {
            x: curve.x[k],
            ddx: curve.ddx[k],
            speed: curve.speed[k],
            normal: curve.normal[k],
        }
    }
}

/// `ln(4 sin²(d/2))`.
#[inline]
pub fn log_factor(d: f64) -> f64 {
    let s = (0.5 * d).sin();
    (4.0 * s * s).ln()
}

#[inline]
fn is_diagonal(t_minus_s: f64) -> bool {
    (0.5 * t_minus_s).sin().abs() < 1e-14
}

/// Product-quadrature weight `R_k^{(N)}` as a function of `t − s_k`.
pub fn kress_weight(n: usize, offset: f64) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n / 2)
        .map(|m| (m as f64 * offset).cos() / m as f64)
        .sum();
    -4.0 * PI / nf * sum - 4.0 * PI / (nf * nf) * (0.5 * nf * offset).cos()
}

/// All `N` weights `R_k^{(N)}(t)`, `k = 0..N`.
pub fn kress_weights(n: usize, t: f64) -> Vec<f64> {
    (0..n)
        .map(|k| kress_weight(n, t - TAU * k as f64 / n as f64))
        .collect()
}

struct Pair {
    l: KernelSplit,
    q: KernelSplit,
}

// Both kernels at once: they share the Bessel evaluation.
#[inline]
fn split_pair(xt: Point, src: &SourceNode, t_minus_s: f64, kappa: f64) -> Pair {
    if is_diagonal(t_minus_s) {
        let curvature = src.normal[0] * src.ddx[0] + src.normal[1] * src.ddx[1];
        let l2 = curvature / (TAU * src.speed);
        let q2 = Complex64::new(
            -EULER_GAMMA * FRAC_1_PI - FRAC_1_PI * (0.5 * kappa * src.speed).ln(),
            0.5,
        ) * src.speed;
        return Pair {
            l: KernelSplit {
                full: None,
                log_part: Complex64::new(0.0, 0.0),
                smooth_part: Complex64::new(l2, 0.0),
            },
            q: KernelSplit {
                full: None,
                log_part: Complex64::new(-src.speed / TAU, 0.0),
                smooth_part: q2,
            },
        };
    }
    let d = [xt[0] - src.x[0], xt[1] - src.x[1]];
    let r = d[0].hypot(d[1]);
    let cross = src.speed * (src.normal[0] * d[0] + src.normal[1] * d[1]);
    let c = Cylinder::at(kappa * r);
    let ln4 = log_factor(t_minus_s);
    let l = 0.5 * I * kappa * cross / r * c.h1();
    let l1 = -kappa / TAU * cross * c.j1 / r;
    let q = 0.5 * I * src.speed * c.h0();
    let q1 = -src.speed / TAU * c.j0;
    Pair {
        l: KernelSplit {
            full: Some(l),
            log_part: Complex64::new(l1, 0.0),
            smooth_part: l - l1 * ln4,
        },
        q: KernelSplit {
            full: Some(q),
            log_part: Complex64::new(q1, 0.0),
            smooth_part: q - q1 * ln4,
        },
    }
}

/// Double-layer kernel `L` (discretizing `2D`) with target at position `xt`
/// and parameter offset `t − s` from the source.
pub fn double_layer_split(xt: Point, src: &SourceNode, t_minus_s: f64, kappa: f64) -> KernelSplit {
    split_pair(xt, src, t_minus_s, kappa).l
}

/// Single-layer kernel `Q = 2Φ|x′|` (discretizing `2S`).
pub fn single_layer_split(xt: Point, src: &SourceNode, t_minus_s: f64, kappa: f64) -> KernelSplit {
    split_pair(xt, src, t_minus_s, kappa).q
}

/// Double-layer split at nodes `i` (target) and `j` (source) of one curve.
pub fn kernel_l(curve: &DiscreteCurve, i: usize, j: usize, kappa: f64) -> KernelSplit {
    double_layer_split(curve.x[i], &SourceNode::of(curve, j), curve.s[i] - curve.s[j], kappa)
}

/// Single-layer split at nodes `i` (target) and `j` (source) of one curve.
pub fn kernel_q(curve: &DiscreteCurve, i: usize, j: usize, kappa: f64) -> KernelSplit {
    single_layer_split(curve.x[i], &SourceNode::of(curve, j), curve.s[i] - curve.s[j], kappa)
}

/// Dense `A = I − M_N(κ) − iη Q_N(κ)`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub a: DMatrix<Complex64>,
    pub kappa: f64,
    pub eta: f64,
    /// Row/column index → `(curve, node)`.
    pub node_map: Vec<(usize, usize)>,
}

impl OperatorMatrix {
    pub fn representation(&self) -> Representation {
        if self.eta == 0.0 {
            Representation::Dlp
        } else {
            Representation::Cfie
        }
    }
}

// Column-wise fill: column j holds the source node j. `f(m, q, diag)` maps
// the M_N and Q_N entries to the stored value.
fn fill<F>(disc: &DiscreteBoundary, kappa: f64, f: F) -> DMatrix<Complex64>
where
    F: Fn(Complex64, Complex64, bool) -> Complex64 + Sync + Send,
{
    let n_tot = disc.total_nodes();
    let node_map = disc.node_map();
    let offsets = disc.offsets();
    // per-curve tables indexed by |i − j|
    let weights: Vec<Vec<f64>> = disc
        .curves
        .iter()
        .map(|c| c.s.iter().map(|&s| kress_weight(c.n, s)).collect())
        .collect();
    let mut data = vec![Complex64::new(0.0, 0.0); n_tot * n_tot];
    crate::par::for_each_chunk(&mut data, n_tot, |col, out| {
        let (cb, l) = node_map[col];
        let src_curve = &disc.curves[cb];
        let src = SourceNode::of(src_curve, l);
        let h = TAU / src_curve.n as f64;
        for (ca, tgt_curve) in disc.curves.iter().enumerate() {
            let off = offsets[ca];
            if ca == cb {
                let rw = &weights[cb];
                for k in 0..tgt_curve.n {
                    let p = split_pair(tgt_curve.x[k], &src, tgt_curve.s[k] - src_curve.s[l], kappa);
                    let w = rw[k.abs_diff(l)];
                    let m = w * p.l.log_part + h * p.l.smooth_part;
                    let q = w * p.q.log_part + h * p.q.smooth_part;
                    out[off + k] = f(m, q, k == l);
                }
            } else {
                for k in 0..tgt_curve.n {
                    let (m, q) = smooth_pair(tgt_curve.x[k], &src, kappa);
                    out[off + k] = f(h * m, h * q, false);
                }
            }
        }
    });
    DMatrix::from_vec(n_tot, n_tot, data)
}

// full kernels for well-separated target and source
#[inline]
fn smooth_pair(xt: Point, src: &SourceNode, kappa: f64) -> (Complex64, Complex64) {
    let d = [xt[0] - src.x[0], xt[1] - src.x[1]];
    let r = d[0].hypot(d[1]);
    let cross = src.speed * (src.normal[0] * d[0] + src.normal[1] * d[1]);
    let c = Cylinder::at(kappa * r);
    (
        0.5 * I * kappa * cross / r * c.h1(),
        0.5 * I * src.speed * c.h0(),
    )
}

/// Assembles `A = I − M_N − iηQ_N`. Requires `κ > 0` and `ηκ ≥ 0`.
pub fn assemble(disc: &DiscreteBoundary, kappa: f64, eta: f64) -> Result<OperatorMatrix> {
    check_args(kappa, eta)?;
    let ie = I * eta;
    let a = fill(disc, kappa, |m, q, diag| {
        let one = if diag { 1.0 } else { 0.0 };
        one - m - ie * q
    });
    Ok(OperatorMatrix {
        a,
        kappa,
        eta,
        node_map: disc.node_map(),
    })
}

/// The Nyström matrices `(M_N, Q_N)` separately.
pub fn nystrom_matrices(
    disc: &DiscreteBoundary,
    kappa: f64,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    check_args(kappa, 0.0)?;
    let m = fill(disc, kappa, |m, _, _| m);
    let q = fill(disc, kappa, |_, q, _| q);
    Ok((m, q))
}

fn check_args(kappa: f64, eta: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Contract(format!("kappa must be positive, got {kappa}")));
    }
    if eta * kappa < 0.0 || !eta.is_finite() {
        return Err(Error::Contract(format!(
            "eta must have the sign of kappa, got eta = {eta}"
        )));
    }
    Ok(())
}

/// Nyström interpolant `((M_N + iηQ_N)ψ)(t)` at parameter `t` on curve
/// `curve`. At a node it reproduces the corresponding row of the matrix
/// product.
pub fn nystrom_interpolate(
    disc: &DiscreteBoundary,
    density: &[Complex64],
    curve: usize,
    t: f64,
    kappa: f64,
    eta: f64,
) -> Result<Complex64> {
    let n_tot = disc.total_nodes();
    if density.len() != n_tot {
        return Err(Error::Contract(format!(
            "density has length {}, expected {n_tot}",
            density.len()
        )));
    }
    let tgt = &disc.curves[curve];
    let xt = tgt.curve.position(t);
    let ie = I * eta;
    let mut acc = Complex64::new(0.0, 0.0);
    for ((cb, src_curve), off) in disc.curves.iter().enumerate().zip(disc.offsets()) {
        let h = TAU / src_curve.n as f64;
        for l in 0..src_curve.n {
            let src = SourceNode::of(src_curve, l);
            let psi = density[off + l];
            if cb == curve {
                let p = split_pair(xt, &src, t - src_curve.s[l], kappa);
                let w = kress_weight(src_curve.n, t - src_curve.s[l]);
                let m = w * p.l.log_part + h * p.l.smooth_part;
                let q = w * p.q.log_part + h * p.q.smooth_part;
                acc += (m + ie * q) * psi;
            } else {
                let (m, q) = smooth_pair(xt, &src, kappa);
                acc += h * (m + ie * q) * psi;
            }
        }
    }
    Ok(acc)
}

/// Interior potential `α𝒟φ + β𝒮φ` at each point, by the trapezoid rule. The
/// points must stay a few node spacings away from Γ.
pub fn layer_potential(
    disc: &DiscreteBoundary,
    density: &[Complex64],
    kappa: f64,
    double: Complex64,
    single: Complex64,
    points: &[Point],
) -> Vec<Complex64> {
    let sources: Vec<(SourceNode, f64)> = disc
        .curves
        .iter()
        .flat_map(|c| (0..c.n).map(move |k| (SourceNode::of(c, k), TAU / c.n as f64)))
        .collect();
    crate::par::map(points, |&p| {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((src, h), phi) in sources.iter().zip(density) {
            let (l, q) = smooth_pair(p, src, kappa);
            // L = 2 ∂Φ/∂n |x′|, Q = 2Φ|x′|
            acc += 0.5 * h * (double * l + single * q) * phi;
        }
        acc
    })
}

/// Interior evaluation needs points a few node spacings away from Γ. A
/// smooth density is trigonometrically interpolated onto this many times
/// more nodes first, which narrows the excluded band by the same factor.
pub const EVAL_UPSAMPLE: usize = 4;

/// Trigonometric interpolation of a nodal density onto `disc.refined(factor)`.
pub fn upsample(
    disc: &DiscreteBoundary,
    density: &[Complex64],
    factor: usize,
) -> Result<(DiscreteBoundary, Vec<Complex64>)> {
    if density.len() != disc.total_nodes() {
        return Err(Error::Contract(format!(
            "density has length {}, expected {}",
            density.len(),
            disc.total_nodes()
        )));
    }
    let fine = disc.refined(factor)?;
    let mut planner = rustfft::FftPlanner::new();
    let mut out = Vec::with_capacity(fine.total_nodes());
    for (c, off) in disc.curves.iter().zip(disc.offsets()) {
        let n = c.n;
        let m = n * factor;
        let mut spec = density[off..off + n].to_vec();
        planner.plan_fft_forward(n).process(&mut spec);
        let mut padded = vec![Complex64::new(0.0, 0.0); m];
        let half = n / 2;
        padded[..half].copy_from_slice(&spec[..half]);
        padded[m - n + half + 1..].copy_from_slice(&spec[half + 1..]);
        // split the Nyquist mode symmetrically
        if factor > 1 {
            padded[half] = 0.5 * spec[half];
            padded[m - half] = 0.5 * spec[half];
        } else {
            padded[half] = spec[half];
        }
        planner.plan_fft_inverse(m).process(&mut padded);
        let scale = 1.0 / n as f64;
        out.extend(padded.into_iter().map(|z| z * scale));
    }
    Ok((fine, out))
}

/// Convenience: `A ψ` for a density vector.
pub fn apply(a: &DMatrix<Complex64>, psi: &[Complex64]) -> Vec<Complex64> {
    (a * DVector::from_column_slice(psi)).as_slice().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Boundary, Curve, ShapeSpec};
    use crate::linalg::min_singular;
    use nalgebra::Schur;

    fn disk(n: usize) -> DiscreteBoundary {
        DiscreteBoundary::new(&Boundary::simple(Curve::circle(1.0).unwrap()), n).unwrap()
    }

    #[test]
    fn kress_weight_n4() {
        assert!((kress_weight(4, 0.0) + 1.25 * PI).abs() < 1e-14);
    }

    #[test]
    fn kress_weights_sum_and_cosine_identity() {
        for n in [16, 64, 256] {
            for &t in &[0.0, 0.3, 2.0] {
                let r = kress_weights(n, t);
                assert!(r.iter().sum::<f64>().abs() < 1e-12);
                for m in 1..n / 2 {
                    let s: f64 = r
                        .iter()
                        .enumerate()
                        .map(|(k, w)| w * (m as f64 * TAU * k as f64 / n as f64).cos())
                        .sum();
                    let exact = -TAU / m as f64 * (m as f64 * t).cos();
                    assert!((s - exact).abs() <= 1e-13, "n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn split_identity_on_circle() {
        let d = disk(6);
        let c = &d.curves[0];
        // s_0 = 0, s_1 = π/3
        let l = kernel_l(c, 0, 1, 1.0);
        let q = kernel_q(c, 0, 1, 1.0);
        let ln4 = log_factor(-PI / 3.0);
        assert!((l.log_part * ln4 + l.smooth_part - l.full.unwrap()).norm() < 1e-14);
        assert!((q.log_part * ln4 + q.smooth_part - q.full.unwrap()).norm() < 1e-14);
        let diag = kernel_l(c, 2, 2, 1.0);
        assert_eq!(diag.log_part, Complex64::new(0.0, 0.0));
        let dq = kernel_q(c, 2, 2, 1.0);
        assert!((dq.log_part.re + 1.0 / TAU).abs() < 1e-15);
    }

    // Richardson extrapolation of the smooth part towards the diagonal.
    fn diagonal_limit(split: impl Fn(f64) -> Complex64) -> Complex64 {
        let h = 1e-2;
        let mut table: Vec<Complex64> = (0..5).map(|k| split(h / 2f64.powi(k))).collect();
        for level in 1..table.len() {
            let f = 2f64.powi(level as i32);
            for k in (level..table.len()).rev() {
                table[k] = (f * table[k] - table[k - 1]) / (f - 1.0);
            }
        }
        *table.last().unwrap()
    }

    #[test]
    fn diagonal_limits_match_near_diagonal_oracle() {
        let curve = Curve::radial(1.0, &[0.0, 0.0, 0.2], &[0.0, 0.3]).unwrap();
        let kappa = 7.3;
        for &t in &[0.0, 0.7, 2.1, 4.4] {
            let x = curve.position(t);
            let (dx, ddx) = curve.closed_form_derivatives(t).unwrap();
            let speed = dx[0].hypot(dx[1]);
            let node = SourceNode {
                x,
                ddx,
                speed,
                normal: [dx[1] / speed, -dx[0] / speed],
            };
            let at = |s: f64| {
                let (dxs, ddxs) = curve.closed_form_derivatives(s).unwrap();
                let sp = dxs[0].hypot(dxs[1]);
                SourceNode {
                    x: curve.position(s),
                    ddx: ddxs,
                    speed: sp,
                    normal: [dxs[1] / sp, -dxs[0] / sp],
                }
            };
            let l_lim = diagonal_limit(|h| double_layer_split(x, &at(t + h), -h, kappa).smooth_part);
            let q_lim = diagonal_limit(|h| single_layer_split(x, &at(t + h), -h, kappa).smooth_part);
            let l_diag = double_layer_split(x, &node, 0.0, kappa).smooth_part;
            let q_diag = single_layer_split(x, &node, 0.0, kappa).smooth_part;
            assert!((l_lim - l_diag).norm() <= 1e-6, "L t={t}: {l_lim} vs {l_diag}");
            assert!((q_lim - q_diag).norm() <= 1e-6, "Q t={t}: {q_lim} vs {q_diag}");
        }
    }

    #[test]
    fn disk_first_eigenfrequency_is_singular() {
        let d = disk(128);
        let a = assemble(&d, 2.404825557695773, 0.0).unwrap();
        let s = min_singular(&a.a);
        assert!(s.sigma <= 1e-10, "{}", s.sigma);
        let a = assemble(&d, 2.404825557695773, 2.404825557695773).unwrap();
        assert!(min_singular(&a.a).sigma <= 1e-10);
    }

    #[test]
    fn circle_matrix_is_circulant() {
        let n = 64;
        let a = assemble(&disk(n), 3.7, 3.7).unwrap().a;
        for i in 0..n {
            for j in 0..n {
                let b = a[((i + 1) % n, (j + 1) % n)];
                assert!((a[(i, j)] - b).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn cfie_differs_by_single_layer() {
        let d = DiscreteBoundary::new(&ShapeSpec::nonsymmetric().build().unwrap(), 32).unwrap();
        let k = 4.2;
        let a0 = assemble(&d, k, 0.0).unwrap().a;
        let ak = assemble(&d, k, k).unwrap().a;
        let (_, q) = nystrom_matrices(&d, k).unwrap();
        let diff = (&a0 - &q * (I * k) - &ak).camax();
        assert!(diff < 1e-13);
    }

    #[test]
    fn negative_eta_rejected() {
        assert!(matches!(assemble(&disk(16), 2.0, -1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn continuity_in_kappa() {
        let d = DiscreteBoundary::new(&ShapeSpec::nonsymmetric_annulus().build().unwrap(), 32).unwrap();
        for &k in &[0.5, 2.0, 9.3] {
            let a = assemble(&d, k, k).unwrap().a;
            let b = assemble(&d, k + 1e-8, k + 1e-8).unwrap().a;
            assert!((a - b).camax() <= 1e-5);
        }
    }

    #[test]
    fn curve_order_permutes_blocks() {
        let b = ShapeSpec::nonsymmetric_annulus().build().unwrap();
        let d = DiscreteBoundary::new(&b, 24).unwrap();
        let mut swapped = d.clone();
        swapped.curves.reverse();
        let a = assemble(&d, 3.1, 3.1).unwrap().a;
        let s = assemble(&swapped, 3.1, 3.1).unwrap().a;
        let n = 24;
        let perm = |i: usize| (i + n) % (2 * n);
        for i in 0..2 * n {
            for j in 0..2 * n {
                assert!((a[(i, j)] - s[(perm(i), perm(j))]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn upsampling_reproduces_trig_polynomials() {
        let b = crate::geometry::Boundary::simple(crate::geometry::Curve::circle(1.0).unwrap());
        let disc = DiscreteBoundary::new(&b, 16).unwrap();
        let f = |s: f64| Complex64::new(1.0 + (3.0 * s).cos(), (7.0 * s).sin() - 0.5 * (8.0 * s).cos());
        let psi: Vec<Complex64> = disc.curves[0].s.iter().map(|&s| f(s)).collect();
        let (fine, up) = upsample(&disc, &psi, 4).unwrap();
        assert_eq!(fine.total_nodes(), 64);
        for (s, v) in fine.curves[0].s.iter().zip(&up) {
            assert!((v - f(*s)).norm() <= 1e-13, "{s}");
        }
        let (_, same) = upsample(&disc, &psi, 1).unwrap();
        assert!(same.iter().zip(&psi).all(|(a, b)| (a - b).norm() <= 1e-14));
    }

    #[test]
    fn interpolant_at_nodes_reproduces_product() {
        let d = DiscreteBoundary::new(&ShapeSpec::nonsymmetric_annulus().build().unwrap(), 24).unwrap();
        let psi: Vec<Complex64> = (0..48)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let (k, eta) = (2.9, 2.9);
        let a = assemble(&d, k, eta).unwrap().a;
        let ident = DMatrix::<Complex64>::identity(48, 48);
        let prod = apply(&(ident - a), &psi);
        for (row, &(c, node)) in d.node_map().iter().enumerate() {
            let v = nystrom_interpolate(&d, &psi, c, d.curves[c].s[node], k, eta).unwrap();
            assert!((v - prod[row]).norm() < 1e-12, "row {row}");
        }
        let zero = vec![Complex64::new(0.0, 0.0); 48];
        assert_eq!(nystrom_interpolate(&d, &zero, 0, 0.4, k, eta).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn interpolated_null_vector_matches_trigonometric_interpolation() {
        let n = 64;
        let d = disk(n);
        let kappa = 3.831705970207512;
        let a = assemble(&d, kappa, 0.0).unwrap();
        let v = min_singular(&a.a).v;
        let psi: Vec<Complex64> = v.iter().copied().collect();
        // trigonometric interpolation through the nodes
        let trig = |t: f64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, p) in psi.iter().enumerate() {
                let x = t - TAU * k as f64 / n as f64;
                let w = if x.abs() < 1e-15 {
                    1.0
                } else {
                    (0.5 * n as f64 * x).sin() / (n as f64 * (0.5 * x).tan())
                };
                acc += w * p;
            }
            acc
        };
        for k in 0..n {
            let t = TAU * (k as f64 + 0.5) / n as f64;
            let interp = nystrom_interpolate(&d, &psi, 0, t, kappa, 0.0).unwrap();
            assert!((interp - trig(t)).norm() <= 1e-8, "k={k}");
        }
    }

    #[test]
    fn operator_eigenvalues_converge_with_n() {
        let b = ShapeSpec::nonsymmetric().build().unwrap();
        let top = |n: usize| {
            let (m, _) = nystrom_matrices(&DiscreteBoundary::new(&b, n).unwrap(), 10.0).unwrap();
            let mut ev: Vec<Complex64> = Schur::new(m).eigenvalues().unwrap().iter().copied().collect();
            ev.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
            ev
        };
        let (e1, e2) = (top(128), top(256));
        for z in &e1[..20] {
            let best = e2[..30].iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-8, "{z}: {best:e}");
        }
    }
}
