//! Real roots of analytic functions on an interval by degree doubling of a
//! Chebyshev (cosine) interpolant, and a grid + parabola minimizer.
//!
//! With `κ(θ) = c + h cos θ`, the samples `g(κ(θ_j))`, `θ_j = πj/M`, extend
//! evenly to a `2M`-periodic grid whose FFT gives `g ≈ Σ_{|m|≤M} c_m e^{imθ}`.
//! The roots of `z^M Σ c_m z^m` near the unit circle map back through
//! `x = (z + 1/z)/2` to roots `κ = c + h x`, and `β = h Im x` measures how far
//! off the real axis each one landed.

use crate::error::{Error, Result};
use crate::linalg::companion_roots;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoydOptions {
    pub coeff_decay_tol: f64,
    pub m_initial: usize,
    pub m_max: usize,
    /// Largest accepted `|β|`.
    pub beta_max: f64,
    /// Companion roots with `||z| − 1| > circle_tol` are discarded.
    pub circle_tol: f64,
    /// Roots failing the β test that sit within this distance of another
    /// root are treated as a cluster and reported unresolved instead of
    /// forcing subdivision.
    pub cluster_tol: f64,
    /// Roots failing the β test with `|β| <= polish_beta` are reported
    /// unresolved instead of forcing subdivision, for callers that can
    /// polish single roots more cheaply. Zero disables this.
    pub polish_beta: f64,
}

impl Default for BoydOptions {
    fn default() -> Self {
        BoydOptions {
            coeff_decay_tol: 1e-12,
            m_initial: 4,
            m_max: 512,
            beta_max: 1e-12,
            circle_tol: 1e-2,
            cluster_tol: 1e-3,
            polish_beta: 0.0,
        }
    }
}

impl BoydOptions {
    fn validate(&self) -> Result<()> {
        let ok = self.coeff_decay_tol > 0.0
            && self.coeff_decay_tol < 1.0
            && self.m_initial >= 1
            && self.m_initial <= self.m_max
            && self.beta_max > 0.0
            && self.circle_tol > 0.0
            && self.cluster_tol >= 0.0
            && self.polish_beta >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Contract(format!("invalid Boyd options: {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub kappa: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    /// Accepted roots, ascending.
    pub roots: Vec<Root>,
    /// Roots whose β could not be driven below the threshold (clusters of
    /// close roots, or roots whose β stopped improving under subdivision).
    pub unresolved: Vec<Root>,
    /// Largest degree `M` used by any leaf interval.
    pub m_final: usize,
    pub subdivisions: usize,
    pub evaluations: usize,
}

impl RootSet {
    /// Accepted and unresolved roots together, ascending.
    pub fn all(&self) -> Vec<Root> {
        let mut v: Vec<Root> = self.roots.iter().chain(&self.unresolved).copied().collect();
        v.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
        v
    }
}

/// Finds the real roots of `g` on `[a, b]`.
pub fn boyd_find_roots<F>(g: F, a: f64, b: f64, opts: &BoydOptions) -> Result<RootSet>
where
    F: Fn(f64) -> Result<Complex64> + Sync + Send,
{
    opts.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Contract(format!("need a < b, got [{a}, {b}]")));
    }
    let mut out = RootSet::default();
    let mut planner = FftPlanner::new();
    recurse(&g, a, b, opts, &[], &mut out, &mut planner)?;
    out.roots = dedupe(std::mem::take(&mut out.roots));
    out.unresolved = dedupe(std::mem::take(&mut out.unresolved));
    Ok(out)
}

fn dedupe(mut v: Vec<Root>) -> Vec<Root> {
    v.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    let mut out: Vec<Root> = Vec::with_capacity(v.len());
    for r in v {
        match out.last_mut() {
            Some(last) if (r.kappa - last.kappa).abs() <= 1e-12 * r.kappa.abs().max(1.0) => {
                if r.beta.abs() < last.beta.abs() {
                    *last = r;
                }
            }
            _ => out.push(r),
        }
    }
    out
}

struct Leaf {
    roots: Vec<Root>,
    m: usize,
    converged: bool,
    evaluations: usize,
}

fn recurse<F>(
    g: &F,
    a: f64,
    b: f64,
    opts: &BoydOptions,
    parent_bad: &[Root],
    out: &mut RootSet,
    planner: &mut FftPlanner<f64>,
) -> Result<()>
where
    F: Fn(f64) -> Result<Complex64> + Sync + Send,
{
    let leaf = interpolate_roots(g, a, b, opts, planner)?;
    out.evaluations += leaf.evaluations;
    out.m_final = out.m_final.max(leaf.m);

    let split = |out: &mut RootSet, bad: &[Root], planner: &mut FftPlanner<f64>| -> Result<()> {
        let width = b - a;
        if width < 1e-13 * b.abs().max(1.0) {
            return Err(Error::NoConvergence {
                a,
                b,
                m: leaf.m,
                max_beta: bad.iter().map(|r| r.beta.abs()).fold(0.0, f64::max),
                evaluations: out.evaluations,
            });
        }
        out.subdivisions += 1;
        let mid = 0.5 * (a + b);
        recurse(g, a, mid, opts, bad, out, planner)?;
        recurse(g, mid, b, opts, bad, out, planner)
    };

    if !leaf.converged {
        return split(out, &[], planner);
    }

    let mut bad: Vec<Root> = Vec::new();
    let mut unresolved: Vec<Root> = Vec::new();
    let mut good: Vec<Root> = Vec::new();
    for (i, r) in leaf.roots.iter().enumerate() {
        if r.beta.abs() <= opts.beta_max {
            good.push(*r);
            continue;
        }
        let clustered = leaf
            .roots
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && (o.kappa - r.kappa).abs() <= opts.cluster_tol);
        let stalled = parent_bad.iter().any(|p| {
            (p.kappa - r.kappa).abs() <= 10.0 * p.beta.abs().max(opts.beta_max)
                && r.beta.abs() >= 0.5 * p.beta.abs()
        });
        let polishable = r.beta.abs() <= opts.polish_beta;
        if clustered || stalled || polishable {
            unresolved.push(*r);
        } else {
            bad.push(*r);
        }
    }
    if !bad.is_empty() {
        return split(out, &bad, planner);
    }
    out.roots.extend(good);
    out.unresolved.extend(unresolved);
    Ok(())
}

// Degree doubling on one interval, then root extraction.
fn interpolate_roots<F>(
    g: &F,
    a: f64,
    b: f64,
    opts: &BoydOptions,
    planner: &mut FftPlanner<f64>,
) -> Result<Leaf>
where
    F: Fn(f64) -> Result<Complex64> + Sync + Send,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let kappa_at = |theta: f64| center + half * theta.cos();

    let mut m = opts.m_initial;
    let nodes: Vec<f64> = (0..=m).map(|j| kappa_at(PI * j as f64 / m as f64)).collect();
    let mut samples = eval_all(g, &nodes)?;
    let mut evaluations = samples.len();
    loop {
        let c = cosine_coefficients(&samples, planner);
        let cmax = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let reference = if c[0].norm() > 1e-8 * cmax { c[0].norm() } else { cmax };
        let tail = c[m].norm().max(c[m - 1].norm());
        let converged = cmax == 0.0 || tail <= opts.coeff_decay_tol * reference;
        if converged || m >= opts.m_max {
            if !converged {
                return Ok(Leaf {
                    roots: Vec::new(),
                    m,
                    converged: false,
                    evaluations,
                });
            }
            let roots = extract_roots(&c, center, half, a, b, opts)?;
            return Ok(Leaf {
                roots,
                m,
                converged: true,
                evaluations,
            });
        }
        // double M: old samples sit at even indices of the new grid
        let m2 = 2 * m;
        let fresh: Vec<f64> = (0..m)
            .map(|j| kappa_at(PI * (2 * j + 1) as f64 / m2 as f64))
            .collect();
        let new_vals = eval_all(g, &fresh)?;
        evaluations += new_vals.len();
        let mut merged = Vec::with_capacity(m2 + 1);
        for j in 0..m {
            merged.push(samples[j]);
            merged.push(new_vals[j]);
        }
        merged.push(samples[m]);
        samples = merged;
        m = m2;
    }
}

fn eval_all<F>(g: &F, nodes: &[f64]) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64> + Sync + Send,
{
    crate::par::map(nodes, |&k| g(k)).into_iter().collect()
}

/// `c_0..c_M` of the cosine interpolant through `M+1` samples on `θ_j = πj/M`
/// (`c_{−m} = c_m`; the Nyquist coefficient is split between `±M`).
pub fn cosine_coefficients(samples: &[Complex64], planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let m = samples.len() - 1;
    let n = 2 * m;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| if j <= m { samples[j] } else { samples[n - j] })
        .collect();
    planner.plan_fft_forward(n).process(&mut buf);
    let mut c: Vec<Complex64> = buf[..=m].iter().map(|z| z / n as f64).collect();
    c[m] *= 0.5;
    c
}

fn extract_roots(
    c: &[Complex64],
    center: f64,
    half: f64,
    a: f64,
    b: f64,
    opts: &BoydOptions,
) -> Result<Vec<Root>> {
    let m = c.len() - 1;
    // q(z) = Σ_{k=0}^{2M} c_{|k−M|} z^k
    let coeffs: Vec<Complex64> = (0..=2 * m).map(|k| c[k.abs_diff(m)]).collect();
    let z = companion_roots(&coeffs)?;
    let near: Vec<Complex64> = z
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() <= opts.circle_tol)
        .collect();
    // z and 1/z give the same x; pair them up
    let mut used = vec![false; near.len()];
    let mut xs = Vec::new();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..near.len() {
        for j in i + 1..near.len() {
            pairs.push(((near[i] * near[j] - 1.0).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    for (_, i, j) in pairs {
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        xs.push(0.5 * (joukowski(near[i]) + joukowski(near[j])));
    }
    for (i, z) in near.iter().enumerate() {
        if !used[i] {
            xs.push(joukowski(*z));
        }
    }
    let slack = 1e-10;
    let mut roots: Vec<Root> = xs
        .into_iter()
        .filter(|x| x.re.abs() <= 1.0 + slack)
        .map(|x| Root {
            kappa: (center + half * x.re).clamp(a, b),
            beta: half * x.im,
        })
        .collect();
    roots.sort_by(|p, q| p.kappa.total_cmp(&q.kappa));
    Ok(roots)
}

#[inline]
fn joukowski(z: Complex64) -> Complex64 {
    0.5 * (z + 1.0 / z)
}

/// Tuning for [`grid_minimize`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMinOptions {
    pub n_grid: usize,
    /// Absolute abscissa tolerance of the parabolic refinement.
    pub tol: f64,
    /// Brackets wider than this are re-gridded before refinement, so that
    /// close minima sharing one coarse cell get separated. `None` refines
    /// every coarse bracket directly.
    pub zoom_floor: Option<f64>,
}

/// Local minima of `h ≥ 0` on `(a, b)`: grid scan, recursive zoom on every
/// bracket down to `100·tol`, then parabolic refinement.
pub fn grid_parabolic_min<H>(h: H, a: f64, b: f64, n_grid: usize, tol: f64) -> Vec<(f64, f64)>
where
    H: Fn(f64) -> f64 + Sync + Send,
{
    grid_minimize(
        &h,
        a,
        b,
        &GridMinOptions {
            n_grid,
            tol,
            zoom_floor: Some(100.0 * tol),
        },
    )
    .0
}

/// As [`grid_parabolic_min`], with explicit options; also returns the
/// number of evaluations of `h`.
pub fn grid_minimize<H>(h: &H, a: f64, b: f64, opts: &GridMinOptions) -> (Vec<(f64, f64)>, usize)
where
    H: Fn(f64) -> f64 + Sync + Send,
{
    let n = opts.n_grid.max(3);
    let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let hs = crate::par::map(&xs, |&x| h(x));
    let mut evals = n;
    let mut found = Vec::new();
    for i in 1..n - 1 {
        if !(hs[i] < hs[i - 1] && hs[i] <= hs[i + 1]) {
            continue;
        }
        let (lo, hi) = (xs[i - 1], xs[i + 1]);
        match opts.zoom_floor {
            Some(floor) if hi - lo > floor => {
                let (sub, e) = grid_minimize(h, lo, hi, opts);
                evals += e;
                found.extend(sub);
            }
            _ => {
                let (x, fx, e) = brent(h, lo, xs[i], hi, hs[i], opts.tol);
                evals += e;
                found.push((x, fx));
            }
        }
    }
    found.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(found.len());
    for (x, fx) in found {
        match out.last_mut() {
            Some(last) if (x - last.0).abs() <= 10.0 * opts.tol => {
                if fx < last.1 {
                    *last = (x, fx);
                }
            }
            _ => out.push((x, fx)),
        }
    }
    (out, evals)
}

/// Brent's parabolic/golden minimization on `[lo, hi]` starting from the
/// interior point `x0` with value `f0`. Returns `(x, f(x), evaluations)`.
pub fn brent<H>(h: &H, lo: f64, x0: f64, hi: f64, f0: f64, tol: f64) -> (f64, f64, usize)
where
    H: Fn(f64) -> f64,
{
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo, hi);
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0, f0);
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    let mut evals = 0;
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = tol + 1e-15 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = h(u);
        evals += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, Order};

    fn real(f: impl Fn(f64) -> f64 + Sync + Send) -> impl Fn(f64) -> Result<Complex64> + Sync + Send {
        move |x| Ok(Complex64::new(f(x), 0.0))
    }

    #[test]
    fn sine_root() {
        let rs = boyd_find_roots(real(f64::sin), 3.0, 4.0, &BoydOptions::default()).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!((rs.roots[0].kappa - PI).abs() < 1e-12);
        assert!(rs.m_final <= 32);
    }

    #[test]
    fn bessel_zeros() {
        let j0 = real(|x| bessel_j(Order::Zero, x).unwrap());
        let rs = boyd_find_roots(j0, 2.0, 15.0, &BoydOptions::default()).unwrap();
        // the fifth zero, 14.9309177..., also lies in the interval
        let expect = [
            2.404825557695773,
            5.520078110286311,
            8.653727912911013,
            11.791534439014281,
            14.930917708487787,
        ];
        assert_eq!(rs.roots.len(), 5, "{rs:?}");
        for (r, e) in rs.roots.iter().zip(expect) {
            assert!((r.kappa - e).abs() < 1e-10, "{} vs {e}", r.kappa);
        }
        assert!(rs.evaluations <= (rs.m_final + 1) * (rs.subdivisions + 1));
    }

    #[test]
    fn planted_root() {
        let k0 = 20.4300941760382;
        let g = real(move |k| (k - k0) * (k - 20.0).cosh());
        let rs = boyd_find_roots(g, 20.4, 20.5, &BoydOptions::default()).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!((rs.roots[0].kappa - k0).abs() < 1e-12);
        assert!(rs.m_final <= 64);
    }

    #[test]
    fn complex_valued_and_rescaled() {
        let g = |k: f64| Ok(Complex64::new(0.3, 1.7) * (k - 1.25) * (k - 1.75) * Complex64::new(0.0, k).exp());
        let scaled = |k: f64| g(k).map(|z| z * 3.0e-40);
        let a = boyd_find_roots(g, 1.0, 2.0, &BoydOptions::default()).unwrap();
        let b = boyd_find_roots(scaled, 1.0, 2.0, &BoydOptions::default()).unwrap();
        assert_eq!(a.roots.len(), 2);
        for (x, y) in a.roots.iter().zip(&b.roots) {
            assert!((x.kappa - y.kappa).abs() < 1e-12);
        }
        assert!((a.roots[0].kappa - 1.25).abs() < 1e-12 && (a.roots[1].kappa - 1.75).abs() < 1e-12);
    }

    #[test]
    fn endpoint_root() {
        let rs = boyd_find_roots(real(|x| x - 2.0), 1.0, 2.0, &BoydOptions::default()).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!((rs.roots[0].kappa - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(boyd_find_roots(real(f64::sin), 4.0, 3.0, &BoydOptions::default()).is_err());
    }

    #[test]
    fn double_root_is_unresolved() {
        let rs = boyd_find_roots(real(|x| (x - 1.5).powi(2) * (x + 1.0)), 1.0, 2.0, &BoydOptions::default()).unwrap();
        let all = rs.all();
        assert!(!all.is_empty());
        assert!(all.iter().all(|r| (r.kappa - 1.5).abs() < 1e-6));
    }

    #[test]
    fn parabola_minimum() {
        let m = grid_parabolic_min(|x| (x - 2.0).powi(2) + 1e-20, 1.0, 3.0, 16, 1e-11);
        assert_eq!(m.len(), 1);
        assert!((m[0].0 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn w_shape_has_two_minima() {
        let h = |x: f64| ((x - 2.0).powi(2)).min((x - 2.001).powi(2)) + 1e-18;
        let m = grid_parabolic_min(h, 1.9, 2.1, 16, 1e-10);
        assert_eq!(m.len(), 2, "{m:?}");
        assert!((m[0].0 - 2.0).abs() < 1e-7 && (m[1].0 - 2.001).abs() < 1e-7);
    }

    #[test]
    fn constant_has_no_minimum() {
        assert!(grid_parabolic_min(|_| 1.0, 0.0, 1.0, 10, 1e-9).is_empty());
    }
}
