//! Eigenfrequencies on an interval: windowed determinant root finding,
//! SVD refinement of close or unresolved roots, spurious-root cross-checks,
//! a posteriori error estimates and a Weyl-law audit.

use crate::error::{Error, Result};
use crate::geometry::{Boundary, DiscreteBoundary, InteriorGrid, ShapeSpec};
use crate::linalg::{lu_det, min_singular_fast, ScaledDeterminant, SingularTriplet};
use crate::operator::{assemble, layer_potential, upsample, Representation, EVAL_UPSAMPLE};
use crate::rootfind::{boyd_find_roots, brent, grid_minimize, BoydOptions, GridMinOptions, Root};
use crate::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use crate::par::Stopwatch;

/// Coupling parameter of the combined representation `u = 𝒟φ + iη𝒮φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Eta {
    /// η = κ.
    Kappa,
    /// Double layer only.
    Zero,
    Fixed(f64),
}

impl Eta {
    pub fn at(self, kappa: f64) -> f64 {
        match self {
            Eta::Kappa => kappa,
            Eta::Zero => 0.0,
            Eta::Fixed(e) => e,
        }
    }

    pub fn representation(self) -> Representation {
        match self {
            Eta::Zero | Eta::Fixed(0.0) => Representation::Dlp,
            _ => Representation::Cfie,
        }
    }
}

impl FromStr for Eta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "kappa" | "k" => Ok(Eta::Kappa),
            "0" | "0.0" | "zero" => Ok(Eta::Zero),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|e| e.is_finite() && *e >= 0.0)
                .map(Eta::Fixed)
                .ok_or_else(|| Error::Contract(format!("cannot parse eta from {s:?}"))),
        }
    }
}

/// `N(κ) = max(base, offset + slope·κ)`, rounded up to an even integer of
/// at least [`NRule::MIN_NODES`]. `N` is the total node count over all
/// curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NRule {
    pub base: f64,
    pub offset: f64,
    pub slope: f64,
}

impl NRule {
    pub const MIN_NODES: usize = 64;

    pub fn generic() -> Self {
        NRule {
            base: 150.0,
            offset: 100.0,
            slope: 5.0,
        }
    }

    pub fn crescent() -> Self {
        NRule {
            base: 350.0,
            offset: 100.0,
            slope: 7.0,
        }
    }

    pub fn fixed(n: usize) -> Self {
        NRule {
            base: n as f64,
            offset: 0.0,
            slope: 0.0,
        }
    }

    pub fn at(&self, kappa: f64) -> usize {
        let n = self.base.max(self.offset + self.slope * kappa).ceil().max(0.0) as usize;
        (n + n % 2).max(Self::MIN_NODES)
    }
}

impl fmt::Display for NRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "max({},{}+{}*kappa)", self.base, self.offset, self.slope)
    }
}

impl FromStr for NRule {
    type Err = Error;

    /// Accepts `max(A,B+C*kappa)` or a bare node count.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Contract(format!("cannot parse N rule from {s:?} (expected \"max(A,B+C*kappa)\")"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(n) = t.parse::<usize>() {
            return Ok(NRule::fixed(n));
        }
        let inner = t
            .strip_prefix("max(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, rest) = inner.split_once(',').ok_or_else(bad)?;
        let (b, c) = rest.split_once('+').ok_or_else(bad)?;
        let c = c
            .strip_suffix("*kappa")
            .or_else(|| c.strip_suffix("*k"))
            .ok_or_else(bad)?;
        let num = |x: &str| x.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        Ok(NRule {
            base: num(a)?,
            offset: num(b)?,
            slope: num(c)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub eta: Eta,
    pub n_rule: NRule,
    /// Roots closer than this are re-resolved by SVD minimization.
    pub close_root_s: f64,
    pub boyd: BoydOptions,
    /// SVD minima above this are not roots.
    pub svd_tol: f64,
    pub min_window: f64,
    /// Window width targets this many roots by the leading Weyl term.
    pub roots_per_window: f64,
    pub estimate_errors: bool,
    /// Cells along the longer side of the error-estimate grid.
    pub error_grid: usize,
    /// With η = 0, re-test every root with the combined representation.
    pub cross_check: bool,
    pub weyl: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            eta: Eta::Kappa,
            n_rule: NRule::generic(),
            close_root_s: 1e-3,
            boyd: BoydOptions {
                beta_max: 1e-14,
                polish_beta: 1e-10,
                ..BoydOptions::default()
            },
            svd_tol: 1e-6,
            min_window: 0.25,
            roots_per_window: 10.0,
            estimate_errors: true,
            error_grid: 200,
            cross_check: true,
            weyl: true,
        }
    }
}

impl SolveOptions {
    /// Defaults, with the node rule and β threshold for resonant shapes
    /// swapped in where the outer curve calls for it.
    pub fn for_boundary(boundary: &Boundary) -> Self {
        let mut o = SolveOptions::default();
        if boundary.outer.name() == "crescent" {
            o.n_rule = NRule::crescent();
            o.boyd.beta_max = 1e-12;
        }
        o
    }

    fn validate(&self) -> Result<()> {
        if !(self.close_root_s > 0.0) || !(self.svd_tol > 0.0) || !(self.min_window > 0.0) {
            return Err(Error::Contract(format!("invalid solve options: {self:?}")));
        }
        if !(self.roots_per_window > 0.0) || self.error_grid < 2 {
            return Err(Error::Contract(format!("invalid solve options: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "boyd-det")]
    BoydDet,
    #[serde(rename = "svd")]
    Svd,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::BoydDet => "boyd-det",
            Method::Svd => "svd",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigResult {
    pub kappa: f64,
    pub beta: f64,
    pub method: Method,
    #[serde(rename = "N")]
    pub n_used: usize,
    pub err_est: Option<f64>,
    #[serde(rename = "err_est_up_to_constant")]
    pub up_to_constant: bool,
    pub spurious: bool,
    /// Smallest singular value of the solving matrix at `kappa`.
    pub sigma_min: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylAudit {
    pub expected: f64,
    pub found: usize,
    pub area: f64,
    pub perimeter: f64,
}

impl WeylAudit {
    pub fn mismatch(&self) -> f64 {
        (self.found as f64 - self.expected).abs()
    }

    pub fn warning(&self) -> bool {
        self.mismatch() > WEYL_WARN
    }
}

/// Allowed gap between the Weyl estimate and the number of roots found.
pub const WEYL_WARN: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluations {
    /// LU factorizations for determinants.
    pub determinant: usize,
    /// Smallest-singular-value computations.
    pub svd: usize,
}

impl Evaluations {
    pub fn factorizations(&self) -> usize {
        self.determinant + self.svd
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub domain: ShapeSpec,
    pub interval: [f64; 2],
    pub representation: Representation,
    /// Ascending; a double root appears twice.
    pub eigenfrequencies: Vec<EigResult>,
    pub weyl: Option<WeylAudit>,
    pub timing_seconds: f64,
    pub evaluations: Evaluations,
    pub windows: usize,
}

impl Solution {
    pub fn weyl_warning(&self) -> bool {
        self.weyl.is_some_and(|w| w.warning())
    }

    /// Non-spurious eigenfrequencies.
    pub fn kappas(&self) -> Vec<f64> {
        self.eigenfrequencies
            .iter()
            .filter(|e| !e.spurious)
            .map(|e| e.kappa)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }
}

/// `Area·κ²/4π − Perimeter·κ/4π`.
pub fn weyl_count(boundary: &Boundary, kappa: f64) -> f64 {
    weyl_terms(boundary.area(), boundary.perimeter(), kappa)
}

fn weyl_terms(area: f64, perimeter: f64, kappa: f64) -> f64 {
    (area * kappa * kappa - perimeter * kappa) / (4.0 * PI)
}

/// Window edges covering `[a, b]`. The width at κ is chosen so that the
/// leading Weyl term predicts `roots_per_window` roots in it, and is never
/// below `min_window`.
pub fn window_edges(area: f64, a: f64, b: f64, opts: &SolveOptions) -> Vec<f64> {
    let grow = 4.0 * PI * opts.roots_per_window / area;
    let mut edges = vec![a];
    let mut k = a;
    while k < b {
        let w = ((k * k + grow).sqrt() - k).max(opts.min_window);
        k += w;
        if b - k < 0.25 * w {
            k = b;
        }
        edges.push(k.min(b));
    }
    edges
}

/// Scaled Fredholm determinant `det(I − M_N − iηQ_N)`.
pub fn determinant(disc: &DiscreteBoundary, kappa: f64, eta: f64) -> Result<ScaledDeterminant> {
    Ok(lu_det(&assemble(disc, kappa, eta)?.a))
}

// Work shared by one solve: discretizations per node count, interior grids,
// evaluation counters.
struct Context<'a> {
    boundary: &'a Boundary,
    opts: &'a SolveOptions,
    discs: Mutex<HashMap<usize, std::sync::Arc<DiscreteBoundary>>>,
    grids: Mutex<HashMap<usize, std::sync::Arc<InteriorGrid>>>,
    det_evals: AtomicUsize,
    svd_evals: AtomicUsize,
}

impl<'a> Context<'a> {
    fn new(boundary: &'a Boundary, opts: &'a SolveOptions) -> Self {
        Context {
            boundary,
            opts,
            discs: Mutex::new(HashMap::new()),
            grids: Mutex::new(HashMap::new()),
            det_evals: AtomicUsize::new(0),
            svd_evals: AtomicUsize::new(0),
        }
    }

    fn disc(&self, n: usize) -> Result<std::sync::Arc<DiscreteBoundary>> {
        if let Some(d) = self.discs.lock().unwrap().get(&n) {
            return Ok(d.clone());
        }
        let d = std::sync::Arc::new(DiscreteBoundary::with_total(self.boundary, n)?);
        self.discs.lock().unwrap().insert(n, d.clone());
        Ok(d)
    }

    fn grid(&self, n: usize) -> Result<std::sync::Arc<InteriorGrid>> {
        if let Some(g) = self.grids.lock().unwrap().get(&n) {
            return Ok(g.clone());
        }
        let fine = self.disc(n)?.refined(EVAL_UPSAMPLE)?;
        let g = std::sync::Arc::new(InteriorGrid::covering(&fine, self.boundary, self.opts.error_grid));
        self.grids.lock().unwrap().insert(n, g.clone());
        Ok(g)
    }

    fn det(&self, disc: &DiscreteBoundary, kappa: f64, eta: f64) -> Result<ScaledDeterminant> {
        self.det_evals.fetch_add(1, Ordering::Relaxed);
        determinant(disc, kappa, eta)
    }

    fn svd(&self, disc: &DiscreteBoundary, kappa: f64, eta: f64) -> Result<SingularTriplet> {
        self.svd_evals.fetch_add(1, Ordering::Relaxed);
        Ok(min_singular_fast(&assemble(disc, kappa, eta)?.a))
    }

    fn evaluations(&self) -> Evaluations {
        Evaluations {
            determinant: self.det_evals.load(Ordering::Relaxed),
            svd: self.svd_evals.load(Ordering::Relaxed),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    root: Root,
    n: usize,
    resolved: bool,
}

// One refined root plus what the SVD saw there.
struct Refined {
    kappa: f64,
    beta: f64,
    method: Method,
    n: usize,
    multiplicity: usize,
    triplet: Option<SingularTriplet>,
}

/// All eigenfrequencies in `[a, b]`.
pub fn solve_interval(boundary: &Boundary, a: f64, b: f64, opts: &SolveOptions) -> Result<Solution> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::Contract(format!("need 0 < a < b, got [{a}, {b}]")));
    }
    opts.validate()?;
    let start = Stopwatch::start();
    let ctx = Context::new(boundary, opts);
    let area = boundary.area();
    let edges = window_edges(area, a, b, opts);

    let mut candidates = Vec::new();
    for w in edges.windows(2) {
        candidates.extend(solve_window(&ctx, w[0], w[1])?);
    }
    let candidates = merge_candidates(candidates);
    let refined = refine(&ctx, &candidates, a, b)?;

    let mut eigs = Vec::new();
    for r in refined {
        let disc = ctx.disc(r.n)?;
        let eta = opts.eta.at(r.kappa);
        let needs_triplet = opts.estimate_errors || opts.cross_check;
        let triplet = match r.triplet {
            Some(t) => Some(t),
            None if needs_triplet => Some(ctx.svd(&disc, r.kappa, eta)?),
            None => None,
        };
        let spurious = match (&triplet, eta == 0.0 && opts.cross_check) {
            (Some(t), true) if t.sigma <= opts.svd_tol => {
                let cfie = ctx.svd(&disc, r.kappa, r.kappa)?;
                cfie.sigma > opts.svd_tol
            }
            _ => false,
        };
        let (err_est, up_to_constant) = match (&triplet, opts.estimate_errors) {
            (Some(t), true) => {
                let grid = ctx.grid(r.n)?;
                match estimate_with(boundary, &disc, &grid, r.kappa, eta, t) {
                    Ok(e) => (Some(e.value), e.up_to_constant),
                    Err(Error::EstimateUnavailable(msg)) => {
                        log::warn!("kappa = {}: {msg}", r.kappa);
                        (None, !boundary.is_star_shaped())
                    }
                    Err(e) => return Err(e),
                }
            }
            _ => (None, false),
        };
        let e = EigResult {
            kappa: r.kappa,
            beta: r.beta,
            method: r.method,
            n_used: r.n,
            err_est,
            up_to_constant,
            spurious,
            sigma_min: triplet.as_ref().map(|t| t.sigma),
        };
        for _ in 0..r.multiplicity {
            eigs.push(e.clone());
        }
    }
    eigs.sort_by(|p, q| p.kappa.total_cmp(&q.kappa));

    let weyl = if opts.weyl && weyl_count(boundary, a) < 0.5 {
        let w = WeylAudit {
            expected: weyl_count(boundary, b),
            found: eigs.iter().filter(|e| !e.spurious).count(),
            area,
            perimeter: boundary.perimeter(),
        };
        if w.warning() {
            log::warn!(
                "Weyl audit: expected {:.2} eigenfrequencies below {b}, found {}",
                w.expected,
                w.found
            );
        }
        Some(w)
    } else {
        None
    };

    Ok(Solution {
        domain: boundary.spec(),
        interval: [a, b],
        representation: opts.eta.representation(),
        eigenfrequencies: eigs,
        weyl,
        timing_seconds: start.seconds(),
        evaluations: ctx.evaluations(),
        windows: edges.len() - 1,
    })
}

fn solve_window(ctx: &Context, a: f64, b: f64) -> Result<Vec<Candidate>> {
    let n = ctx.opts.n_rule.at(b);
    let disc = ctx.disc(n)?;
    let eta = ctx.opts.eta;
    let mid = 0.5 * (a + b);
    let shift = ctx.det(&disc, mid, eta.at(mid))?.exponent;
    let g = |k: f64| ctx.det(&disc, k, eta.at(k))?.value_scaled(shift);
    let set = boyd_find_roots(g, a, b, &ctx.opts.boyd)?;
    log::debug!(
        "window [{a}, {b}]: N = {n}, {} roots, {} unresolved, M = {}, {} evaluations",
        set.roots.len(),
        set.unresolved.len(),
        set.m_final,
        set.evaluations
    );
    let tag = |resolved| move |&root| Candidate { root, n, resolved };
    Ok(set
        .roots
        .iter()
        .map(tag(true))
        .chain(set.unresolved.iter().map(tag(false)))
        .collect())
}

// Sort and drop duplicates found by neighbouring windows.
fn merge_candidates(mut v: Vec<Candidate>) -> Vec<Candidate> {
    v.sort_by(|p, q| p.root.kappa.total_cmp(&q.root.kappa));
    let mut out: Vec<Candidate> = Vec::with_capacity(v.len());
    for c in v {
        match out.last_mut() {
            Some(last) if (c.root.kappa - last.root.kappa).abs() <= 1e-11 * c.root.kappa.max(1.0) => {
                let better = (c.resolved && !last.resolved)
                    || (c.resolved == last.resolved && c.root.beta.abs() < last.root.beta.abs());
                if better {
                    *last = c;
                }
            }
            _ => out.push(c),
        }
    }
    out
}

// Groups roots closer than s (and any unresolved ones) and hands each group
// to the SVD path; isolated resolved roots pass through.
fn refine(ctx: &Context, cands: &[Candidate], a: f64, b: f64) -> Result<Vec<Refined>> {
    let s = ctx.opts.close_root_s;
    let mut groups: Vec<Vec<Candidate>> = Vec::new();
    for c in cands {
        match groups.last_mut() {
            Some(g) if c.root.kappa - g.last().unwrap().root.kappa < s => g.push(*c),
            _ => groups.push(vec![*c]),
        }
    }
    let isolated: Vec<f64> = groups
        .iter()
        .filter(|g| g.len() == 1 && g[0].resolved)
        .map(|g| g[0].root.kappa)
        .collect();
    let mut out = Vec::new();
    for g in groups {
        if g.len() == 1 && g[0].resolved {
            out.push(Refined {
                kappa: g[0].root.kappa,
                beta: g[0].root.beta,
                method: Method::BoydDet,
                n: g[0].n,
                multiplicity: 1,
                triplet: None,
            });
            continue;
        }
        for r in svd_cluster(ctx, &g)? {
            let dup = isolated.iter().any(|k| (k - r.kappa).abs() <= 1e-7);
            if !dup && r.kappa >= a && r.kappa <= b {
                out.push(r);
            }
        }
    }
    Ok(out)
}

// σ_min² at κ through the context, remembering every triplet so that the
// minima found need not be recomputed.
struct SigmaProbe<'c, 'a> {
    ctx: &'c Context<'a>,
    disc: std::sync::Arc<DiscreteBoundary>,
    cache: Mutex<Vec<(f64, SingularTriplet)>>,
    failure: Mutex<Option<Error>>,
}

impl<'c, 'a> SigmaProbe<'c, 'a> {
    fn new(ctx: &'c Context<'a>, n: usize) -> Result<Self> {
        Ok(SigmaProbe {
            ctx,
            disc: ctx.disc(n)?,
            cache: Mutex::new(Vec::new()),
            failure: Mutex::new(None),
        })
    }

    fn h(&self, k: f64) -> f64 {
        match self.ctx.svd(&self.disc, k, self.ctx.opts.eta.at(k)) {
            Ok(t) => {
                let v = t.sigma * t.sigma;
                self.cache.lock().unwrap().push((k, t));
                v
            }
            Err(e) => {
                *self.failure.lock().unwrap() = Some(e);
                f64::INFINITY
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self.failure.lock().unwrap().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    fn triplet(&self, k: f64) -> Result<SingularTriplet> {
        self.check()?;
        if let Some((_, t)) = self.cache.lock().unwrap().iter().find(|(x, _)| *x == k) {
            return Ok(t.clone());
        }
        self.h(k);
        self.triplet(k)
    }
}

// SVD path for a group of close or unresolved roots. Each Boyd estimate
// (conjugate-like pairs merged) seeds a parabolic fit of σ_min²; when that
// does not account for every root in the group, σ_min² is minimized on a
// grid over the padded group instead.
fn svd_cluster(ctx: &Context, group: &[Candidate]) -> Result<Vec<Refined>> {
    let s = ctx.opts.close_root_s;
    let lo = group.first().unwrap().root.kappa - 5.0 * s;
    let hi = group.last().unwrap().root.kappa + 5.0 * s;
    let n = ctx.opts.n_rule.at(hi);
    let probe = SigmaProbe::new(ctx, n)?;
    let tol = 1e-12 * hi.max(1.0);

    let mut seeds: Vec<(f64, f64)> = Vec::new(); // (κ, spread)
    for c in group {
        match seeds.last_mut() {
            Some(last) if c.root.kappa - last.0 <= 2.0 * c.root.beta.abs().max(last.1) => {
                last.1 = last.1.max(c.root.kappa - last.0).max(c.root.beta.abs());
                last.0 = 0.5 * (last.0 + c.root.kappa);
            }
            _ => seeds.push((c.root.kappa, c.root.beta.abs())),
        }
    }
    let mut minima: Vec<f64> = Vec::new();
    for &(x, spread) in &seeds {
        if let Some(v) = parabolic_polish(&probe, x, spread.max(1e-8 * x.max(1.0)), tol)? {
            if minima.iter().all(|m| (m - v).abs() > 1e-9 * v.max(1.0)) {
                minima.push(v);
            }
        }
    }
    let mut out = collect_minima(ctx, &probe, &minima, n)?;
    let count: usize = out.iter().map(|r| r.multiplicity).sum();
    if count < group.len() {
        log::debug!("seeded SVD refinement found {count} of {} roots near {lo}..{hi}", group.len());
        let minima = grid_search(&probe, lo, hi, group.len(), tol)?;
        out = collect_minima(ctx, &probe, &minima, n)?;
    }
    Ok(out)
}

// Vertex of the parabola through σ_min² at x − d, x, x + d, recentred until
// it lands inside the stencil. `None` when the fit is not convex.
fn parabolic_polish(probe: &SigmaProbe, mut x: f64, d: f64, tol: f64) -> Result<Option<f64>> {
    for _ in 0..6 {
        let (f0, fm, fp) = (probe.h(x), probe.h(x - d), probe.h(x + d));
        let curv = fp + fm - 2.0 * f0;
        if !(curv > 0.0) {
            probe.check()?;
            return Ok(None);
        }
        let v = x + 0.5 * d * (fm - fp) / curv;
        let inside = (v - x).abs() <= d;
        x = v;
        if inside || d <= tol {
            probe.h(x);
            probe.check()?;
            return Ok(Some(x));
        }
    }
    probe.check()?;
    Ok(None)
}

// Grid scan of σ_min² on [lo, hi]; while fewer than `expect` minima show
// up and the deepest one is not a double root, zoom around it.
fn grid_search(probe: &SigmaProbe, lo: f64, hi: f64, expect: usize, tol: f64) -> Result<Vec<f64>> {
    let h = |k: f64| probe.h(k);
    let opts = GridMinOptions {
        n_grid: 11,
        tol,
        zoom_floor: None,
    };
    let (mut minima, _) = grid_minimize(&h, lo, hi, &opts);
    let mut width = (hi - lo) / (opts.n_grid - 1) as f64;
    while minima.len() < expect && width > 1e3 * tol {
        let Some(&(x, _)) = minima.iter().min_by(|p, q| p.1.total_cmp(&q.1)) else {
            break;
        };
        if is_double(&probe.triplet(x)?) {
            break;
        }
        let (zoomed, _) = grid_minimize(&h, x - width, x + width, &opts);
        for z in zoomed {
            if minima.iter().all(|m| (m.0 - z.0).abs() > 10.0 * tol) {
                minima.push(z);
            }
        }
        minima.sort_by(|p, q| p.0.total_cmp(&q.0));
        width = 2.0 * width / (opts.n_grid - 1) as f64;
    }
    probe.check()?;
    Ok(minima.into_iter().map(|m| m.0).collect())
}

fn collect_minima(ctx: &Context, probe: &SigmaProbe, minima: &[f64], n: usize) -> Result<Vec<Refined>> {
    let mut out = Vec::new();
    for &x in minima {
        let t = probe.triplet(x)?;
        if t.sigma > ctx.opts.svd_tol {
            continue;
        }
        out.push(Refined {
            kappa: x,
            beta: 0.0,
            method: Method::Svd,
            n,
            multiplicity: if is_double(&t) { 2 } else { 1 },
            triplet: Some(t),
        });
    }
    out.sort_by(|p, q| p.kappa.total_cmp(&q.kappa));
    Ok(out)
}

// Second singular value within a decade of the first (or both at roundoff
// level): a repeated eigenfrequency.
fn is_double(t: &SingularTriplet) -> bool {
    t.sigma2 <= 10.0 * t.sigma.max(1e-12)
}

/// σ_min of the chosen representation at `n_samples` equispaced κ in
/// `[a, b]`, with `N = n_rule(b)`.
pub fn sweep_sigma_min(
    boundary: &Boundary,
    a: f64,
    b: f64,
    n_samples: usize,
    representation: Representation,
    n_rule: &NRule,
) -> Result<Vec<(f64, f64)>> {
    if n_samples < 2 {
        return Err(Error::Contract(format!("need at least 2 samples, got {n_samples}")));
    }
    if !(a > 0.0 && a <= b) {
        return Err(Error::Contract(format!("need 0 < a <= b, got [{a}, {b}]")));
    }
    let disc = DiscreteBoundary::with_total(boundary, n_rule.at(b))?;
    let ks: Vec<f64> = (0..n_samples)
        .map(|i| a + (b - a) * i as f64 / (n_samples - 1) as f64)
        .collect();
    let eta = match representation {
        Representation::Dlp => Eta::Zero,
        Representation::Cfie => Eta::Kappa,
    };
    ks.iter()
        .map(|&k| Ok((k, min_singular_fast(&assemble(&disc, k, eta.at(k))?.a).sigma)))
        .collect()
}

/// σ_min of the double-layer and combined matrices at each root; a root is
/// spurious when only the double-layer matrix is singular there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub kappa: f64,
    pub sigma_dlp: f64,
    pub sigma_cfie: f64,
    pub spurious: bool,
}

pub fn cross_check_representations(
    boundary: &Boundary,
    roots: &[f64],
    n_rule: &NRule,
    svd_tol: f64,
) -> Result<Vec<CrossCheck>> {
    roots
        .iter()
        .map(|&k| {
            let disc = DiscreteBoundary::with_total(boundary, n_rule.at(k))?;
            let sigma_dlp = min_singular_fast(&assemble(&disc, k, 0.0)?.a).sigma;
            let sigma_cfie = min_singular_fast(&assemble(&disc, k, k)?.a).sigma;
            Ok(CrossCheck {
                kappa: k,
                sigma_dlp,
                sigma_cfie,
                spurious: sigma_dlp <= svd_tol && sigma_cfie > svd_tol,
            })
        })
        .collect()
}

/// Relative error estimate for an eigenfrequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub sigma_min: f64,
    /// ‖(𝒟 + iη𝒮)φ̂‖ over Ω for the unit right singular vector φ̂.
    pub interior_norm: f64,
    pub constant: f64,
    /// The constant is only known for star-shaped domains.
    pub up_to_constant: bool,
}

/// Constant of the a posteriori bound for star-shaped domains.
pub const STAR_CONSTANT: f64 = 3.5;

/// Minimum number of accepted grid points for the interior norm.
pub const MIN_GRID_POINTS: usize = 100;

/// `C σ_min / (2κ‖(𝒟 + iη𝒮)φ̂‖_{L²(Ω)})` for the assembled matrix at κ, on an
/// interior grid with `grid_n` cells along the longer side. φ̂ is
/// interpolated to `disc` refined by [`EVAL_UPSAMPLE`] before summing.
pub fn estimate_error(
    boundary: &Boundary,
    disc: &DiscreteBoundary,
    kappa: f64,
    eta: f64,
    grid_n: usize,
) -> Result<ErrorEstimate> {
    let t = min_singular_fast(&assemble(disc, kappa, eta)?.a);
    let grid = InteriorGrid::covering(&disc.refined(EVAL_UPSAMPLE)?, boundary, grid_n);
    estimate_with(boundary, disc, &grid, kappa, eta, &t)
}

fn estimate_with(
    boundary: &Boundary,
    disc: &DiscreteBoundary,
    grid: &InteriorGrid,
    kappa: f64,
    eta: f64,
    t: &SingularTriplet,
) -> Result<ErrorEstimate> {
    if grid.points.len() < MIN_GRID_POINTS {
        return Err(Error::EstimateUnavailable(format!(
            "only {} interior grid points accepted, need {MIN_GRID_POINTS}",
            grid.points.len()
        )));
    }
    let (fine, phi) = upsample(disc, t.v.as_slice(), EVAL_UPSAMPLE)?;
    let u = layer_potential(
        &fine,
        &phi,
        kappa,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, eta),
        &grid.points,
    );
    let norm = (u.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_area).sqrt();
    if !(norm > 0.0) {
        return Err(Error::EstimateUnavailable("interior field vanishes".into()));
    }
    let star = boundary.is_star_shaped();
    let constant = if star { STAR_CONSTANT } else { 1.0 };
    Ok(ErrorEstimate {
        value: constant * t.sigma / (2.0 * kappa * norm),
        sigma_min: t.sigma,
        interior_norm: norm,
        constant,
        up_to_constant: !star,
    })
}

/// One row of a convergence study at fixed κ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    /// `|det(I − M_N − iηQ_N)|` at κ.
    pub det_abs: f64,
    /// Root nearest κ in `[κ − bracket, κ + bracket]` at this N.
    pub root: Option<f64>,
}

/// Determinant magnitude and nearest root for each total node count.
pub fn convergence_study(
    boundary: &Boundary,
    kappa: f64,
    ns: &[usize],
    eta: Eta,
    bracket: f64,
    boyd: &BoydOptions,
) -> Result<Vec<ConvergenceRow>> {
    if !(kappa > 0.0) || !(bracket > 0.0) || bracket >= kappa {
        return Err(Error::Contract(format!(
            "need kappa > bracket > 0, got kappa = {kappa}, bracket = {bracket}"
        )));
    }
    ns.iter()
        .map(|&n| {
            let disc = DiscreteBoundary::with_total(boundary, n)?;
            let det = determinant(&disc, kappa, eta.at(kappa))?;
            let det_abs = 2f64.powf(det.log2_abs());
            let shift = det.exponent;
            let g = |k: f64| determinant(&disc, k, eta.at(k))?.value_scaled(shift);
            let set = boyd_find_roots(g, kappa - bracket, kappa + bracket, boyd)?;
            let root = set
                .all()
                .into_iter()
                .map(|r| r.kappa)
                .min_by(|p, q| (p - kappa).abs().total_cmp(&(q - kappa).abs()));
            Ok(ConvergenceRow { n, det_abs, root })
        })
        .collect()
}

/// Plain SVD scan: σ_min² on a uniform grid of spacing `step`, every local
/// minimum refined by Brent to `tol`, minima above `svd_tol` dropped.
/// Returns the minima and the number of σ_min evaluations.
pub fn svd_scan(
    boundary: &Boundary,
    a: f64,
    b: f64,
    step: f64,
    tol: f64,
    opts: &SolveOptions,
) -> Result<(Vec<(f64, f64)>, usize)> {
    if !(a > 0.0 && a < b) || !(step > 0.0) {
        return Err(Error::Contract(format!("bad scan [{a}, {b}] step {step}")));
    }
    let disc = DiscreteBoundary::with_total(boundary, opts.n_rule.at(b))?;
    let eta = opts.eta;
    let h = |k: f64| {
        assemble(&disc, k, eta.at(k))
            .map(|m| min_singular_fast(&m.a).sigma.powi(2))
            .unwrap_or(f64::INFINITY)
    };
    let n_grid = ((b - a) / step).ceil() as usize + 1;
    let (minima, evals) = grid_minimize(
        &h,
        a,
        b,
        &GridMinOptions {
            n_grid,
            tol,
            zoom_floor: None,
        },
    );
    let kept = minima
        .into_iter()
        .map(|(x, h2)| (x, h2.sqrt()))
        .filter(|&(_, s)| s <= opts.svd_tol)
        .collect();
    Ok((kept, evals))
}

/// Refines a single root of σ_min² by Brent's method on `[lo, hi]` with
/// `N = n_rule(hi)`. Returns `(κ, σ_min)`.
pub fn svd_refine(boundary: &Boundary, lo: f64, hi: f64, opts: &SolveOptions) -> Result<(f64, f64)> {
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Contract(format!("bad bracket [{lo}, {hi}]")));
    }
    let disc = DiscreteBoundary::with_total(boundary, opts.n_rule.at(hi))?;
    let eta = opts.eta;
    let h = |k: f64| {
        assemble(&disc, k, eta.at(k))
            .map(|m| min_singular_fast(&m.a).sigma.powi(2))
            .unwrap_or(f64::INFINITY)
    };
    let x0 = 0.5 * (lo + hi);
    let (x, fx, _) = brent(&h, lo, x0, hi, h(x0), 1e-12 * hi.max(1.0));
    Ok((x, fx.sqrt()))
}
