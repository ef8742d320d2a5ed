//! Eigenfunctions from boundary data. At an eigenfrequency the left null
//! vector of the double-layer matrix `I − M_N` samples the normal derivative
//! `u_n` of the eigenfunction, and Green's representation formula reduces to
//! `u = 𝒮u_n` inside Ω.

use crate::error::{Error, Result};
use crate::geometry::{Boundary, CellState, DiscreteBoundary, InteriorGrid};
use crate::linalg::min_singular_fast;
use crate::operator::{assemble, layer_potential, nystrom_matrices, upsample, EVAL_UPSAMPLE};
use crate::{Complex64, Point};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::{self, Read, Write};

/// Largest σ_min of `I − M_N` accepted as an eigenfrequency.
pub const DENSITY_TOL: f64 = 1e-6;

const GRID_MAGIC: &[u8; 8] = b"DRUMGRD2";

/// Normal-derivative samples `u_n(x_k)` at the boundary nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDensity {
    pub kappa: f64,
    pub values: Vec<Complex64>,
    /// σ_min of `I − M_N` at `kappa`.
    pub sigma: f64,
    /// `‖û*(I − M_N)‖` for the unit left singular vector `û`.
    pub residual: f64,
}

/// Density at a converged root; fails with
/// [`Error::NotAnEigenfrequency`] when σ_min exceeds [`DENSITY_TOL`].
pub fn boundary_density(disc: &DiscreteBoundary, kappa: f64) -> Result<BoundaryDensity> {
    let d = boundary_density_unchecked(disc, kappa)?;
    if d.sigma > DENSITY_TOL {
        return Err(Error::NotAnEigenfrequency {
            kappa,
            sigma: d.sigma,
        });
    }
    Ok(d)
}

/// As [`boundary_density`] without the σ_min check.
pub fn boundary_density_unchecked(disc: &DiscreteBoundary, kappa: f64) -> Result<BoundaryDensity> {
    let a = assemble(disc, kappa, 0.0)?.a;
    let t = min_singular_fast(&a);
    let residual = (t.u.adjoint() * &a).norm();
    // the row vector û* pairs with quadrature weights h|x′|
    let values = disc
        .curves
        .iter()
        .flat_map(|c| {
            let h = TAU / c.n as f64;
            c.speed.iter().map(move |s| h * s)
        })
        .zip(t.u.iter())
        .map(|(w, u)| u.conj() / w)
        .collect();
    Ok(BoundaryDensity {
        kappa,
        values,
        sigma: t.sigma,
        residual,
    })
}

/// Real eigenmode sampled at cell centres of a rectangular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    pub bbox: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    /// Row-major `ny × nx`, shared with `values`.
    pub mask: Vec<CellState>,
    pub values: Vec<f64>,
    pub kappa: f64,
    /// Factor that brought the phase-fixed field to unit L²(Ω) norm.
    pub norm_constant: f64,
    /// ‖u‖ by the masked-grid quadrature (cells in the near-boundary band
    /// contribute nothing).
    pub grid_norm: f64,
}

impl ModeGrid {
    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.bbox[1] - self.bbox[0]) / self.nx as f64,
            (self.bbox[3] - self.bbox[2]) / self.ny as f64,
        )
    }

    /// Centre of cell `(i, j)`, column `i`, row `j`.
    pub fn point(&self, i: usize, j: usize) -> Point {
        let (hx, hy) = self.spacing();
        [
            self.bbox[0] + (i as f64 + 0.5) * hx,
            self.bbox[2] + (j as f64 + 0.5) * hy,
        ]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.nx + i] == CellState::Inside
    }

    /// `∫ u v` by the masked-grid quadrature; grids must match.
    pub fn inner(&self, other: &ModeGrid) -> Result<f64> {
        if self.nx != other.nx || self.ny != other.ny || self.bbox != other.bbox {
            return Err(Error::Contract("mode grids differ".into()));
        }
        let (hx, hy) = self.spacing();
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * hx
            * hy)
    }

    /// `max |Δ_h u + κ²u| / (κ² max|u|)` over cells whose four neighbours
    /// are all inside, with the 5-point Laplacian.
    pub fn helmholtz_residual(&self) -> f64 {
        let (hx, hy) = self.spacing();
        let k2 = self.kappa * self.kappa;
        let umax = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0_f64;
        for j in 1..self.ny.saturating_sub(1) {
            for i in 1..self.nx.saturating_sub(1) {
                let ok = [(i, j), (i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
                    .iter()
                    .all(|&(a, b)| self.is_inside(a, b));
                if !ok {
                    continue;
                }
                let u = self.value(i, j);
                let lap = (self.value(i - 1, j) - 2.0 * u + self.value(i + 1, j)) / (hx * hx)
                    + (self.value(i, j - 1) - 2.0 * u + self.value(i, j + 1)) / (hy * hy);
                worst = worst.max((lap + k2 * u).abs());
            }
        }
        if umax == 0.0 {
            0.0
        } else {
            worst / (k2 * umax)
        }
    }

    /// `x,y,value` per cell, header first.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,value")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let p = self.point(i, j);
                writeln!(w, "{},{},{}", p[0], p[1], self.value(i, j))?;
            }
        }
        Ok(())
    }

    /// Magic, bbox, nx, ny, κ, norm constant, then row-major values; all
    /// little-endian (`u64` sizes, `f64` otherwise). The mask is implied by
    /// zero values.
    /// Little-endian: magic, bbox, nx, ny (u64), κ, norm constant, grid
    /// norm, `nx·ny` values, then one mask byte per cell.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(GRID_MAGIC)?;
        for b in self.bbox {
            w.write_all(&b.to_le_bytes())?;
        }
        w.write_all(&(self.nx as u64).to_le_bytes())?;
        w.write_all(&(self.ny as u64).to_le_bytes())?;
        for x in [self.kappa, self.norm_constant, self.grid_norm] {
            w.write_all(&x.to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        let mask: Vec<u8> = self
            .mask
            .iter()
            .map(|m| match m {
                CellState::Outside => 0,
                CellState::NearBoundary => 1,
                CellState::Inside => 2,
            })
            .collect();
        w.write_all(&mask)
    }

    pub fn read_binary<R: Read>(mut r: R) -> io::Result<Self> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != GRID_MAGIC {
            return Err(bad("not a mode grid file"));
        }
        let mut word = || -> io::Result<[u8; 8]> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(b)
        };
        let mut bbox = [0.0; 4];
        for b in &mut bbox {
            *b = f64::from_le_bytes(word()?);
        }
        let nx = u64::from_le_bytes(word()?) as usize;
        let ny = u64::from_le_bytes(word()?) as usize;
        let cells = nx.checked_mul(ny).filter(|&c| c as u64 <= 1 << 32).ok_or_else(|| bad("grid too large"))?;
        let kappa = f64::from_le_bytes(word()?);
        let norm_constant = f64::from_le_bytes(word()?);
        let grid_norm = f64::from_le_bytes(word()?);
        let values = (0..cells)
            .map(|_| word().map(f64::from_le_bytes))
            .collect::<io::Result<Vec<_>>>()?;
        let mut bytes = vec![0u8; cells];
        r.read_exact(&mut bytes)?;
        let mask = bytes
            .iter()
            .map(|b| match b {
                0 => Ok(CellState::Outside),
                1 => Ok(CellState::NearBoundary),
                2 => Ok(CellState::Inside),
                _ => Err(bad("bad mask byte")),
            })
            .collect::<io::Result<Vec<_>>>()?;
        Ok(ModeGrid {
            bbox,
            nx,
            ny,
            mask,
            values,
            kappa,
            norm_constant,
            grid_norm,
        })
    }

    /// RGBA raster, top row first: blue–white–red scaled to `max|u|`,
    /// masked cells grey.
    pub fn to_rgba(&self) -> Vec<u8> {
        let umax = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut px = Vec::with_capacity(4 * self.nx * self.ny);
        for j in (0..self.ny).rev() {
            for i in 0..self.nx {
                let rgb = if self.is_inside(i, j) && umax > 0.0 {
                    diverging(self.value(i, j) / umax)
                } else {
                    [200, 200, 200]
                };
                px.extend_from_slice(&rgb);
                px.push(255);
            }
        }
        px
    }
}

/// Blue (−1) through white (0) to red (+1).
pub fn diverging(t: f64) -> [u8; 3] {
    let t = t.clamp(-1.0, 1.0);
    let fade = |c: f64| (255.0 * (1.0 - t.abs()) + c * t.abs()).round() as u8;
    if t >= 0.0 {
        [fade(178.0), fade(24.0), fade(43.0)]
    } else {
        [fade(33.0), fade(102.0), fade(172.0)]
    }
}

/// `u = 𝒮u_n` on the cell centres of `bbox` (`nx × ny` cells), summed over
/// the density interpolated to [`EVAL_UPSAMPLE`] times as many nodes. Cells
/// within that discretization's near-boundary band or outside Ω are 0. The global phase makes the
/// largest sample real and positive; the real part is then scaled to unit
/// L²(Ω) norm.
pub fn evaluate_mode(
    disc: &DiscreteBoundary,
    density: &[Complex64],
    kappa: f64,
    bbox: [f64; 4],
    nx: usize,
    ny: usize,
) -> Result<ModeGrid> {
    if density.len() != disc.total_nodes() {
        return Err(Error::Contract(format!(
            "density has length {}, expected {}",
            density.len(),
            disc.total_nodes()
        )));
    }
    if nx == 0 || ny == 0 || !(bbox[1] > bbox[0] && bbox[3] > bbox[2]) {
        return Err(Error::Contract(format!("bad grid {nx} x {ny} over {bbox:?}")));
    }
    let (fine, fine_density) = upsample(disc, density, EVAL_UPSAMPLE)?;
    let grid = InteriorGrid::new(&fine, bbox, nx, ny);
    if grid.points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let zero = Complex64::new(0.0, 0.0);
    let u = layer_potential(&fine, &fine_density, kappa, zero, Complex64::new(1.0, 0.0), &grid.points);
    let peak = u
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or(zero);
    let phase = if peak.norm() > 0.0 {
        peak.conj() / peak.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let real: Vec<f64> = u.iter().map(|z| (z * phase).re).collect();
    let grid_norm = (real.iter().map(|v| v * v).sum::<f64>() * grid.cell_area).sqrt();
    let exact = rellich_norm(disc, density, kappa, phase);
    let norm = match exact {
        Some(n) => n,
        None if grid_norm > 0.0 => grid_norm,
        None => return Err(Error::EmptyGrid),
    };
    let scale = 1.0 / norm;
    let mut values = vec![0.0; nx * ny];
    for (&cell, v) in grid.cells.iter().zip(&real) {
        values[cell] = v * scale;
    }
    Ok(ModeGrid {
        bbox,
        nx,
        ny,
        mask: grid.mask,
        values,
        kappa,
        norm_constant: scale,
        grid_norm: grid_norm * scale,
    })
}

// Rellich's identity for a Dirichlet eigenfunction,
// ∫_Ω u² = (1/2κ²) ∮ (x·n) u_n² ds, evaluated by the trapezoid rule.
fn rellich_norm(disc: &DiscreteBoundary, density: &[Complex64], kappa: f64, phase: Complex64) -> Option<f64> {
    let mut acc = 0.0;
    let mut k = 0;
    for c in &disc.curves {
        let h = TAU / c.n as f64;
        for j in 0..c.n {
            let g = (density[k] * phase).re;
            let xn = c.x[j][0] * c.normal[j][0] + c.x[j][1] * c.normal[j][1];
            acc += h * c.speed[j] * xn * g * g;
            k += 1;
        }
    }
    let sq = acc / (2.0 * kappa * kappa);
    (sq > 0.0 && sq.is_finite()).then(|| sq.sqrt())
}

/// `t[u] = ‖u‖_{L²(Γ)} / ‖u‖_{L²(Ω)}` for `u = 𝒮ψ`. The trace uses the
/// continuity of the single layer, `u|_Γ = ½Q_Nψ`; the interior norm uses
/// the masked grid with `grid_n` cells along the longer side.
pub fn mode_residual(
    boundary: &Boundary,
    disc: &DiscreteBoundary,
    density: &[Complex64],
    kappa: f64,
    grid_n: usize,
) -> Result<f64> {
    if density.len() != disc.total_nodes() {
        return Err(Error::Contract(format!(
            "density has length {}, expected {}",
            density.len(),
            disc.total_nodes()
        )));
    }
    let (_, q) = nystrom_matrices(disc, kappa)?;
    let trace = q * nalgebra::DVector::from_column_slice(density) * Complex64::new(0.5, 0.0);
    let weights = disc.curves.iter().flat_map(|c| {
        let h = TAU / c.n as f64;
        c.speed.iter().map(move |s| h * s)
    });
    let boundary_sq: f64 = weights.zip(trace.iter()).map(|(w, u)| w * u.norm_sqr()).sum();
    let (fine, fine_density) = upsample(disc, density, EVAL_UPSAMPLE)?;
    let grid = InteriorGrid::covering(&fine, boundary, grid_n);
    if grid.points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let zero = Complex64::new(0.0, 0.0);
    let u = layer_potential(&fine, &fine_density, kappa, zero, Complex64::new(1.0, 0.0), &grid.points);
    let interior_sq = u.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_area;
    if !(interior_sq > 0.0) {
        return Err(Error::EmptyGrid);
    }
    Ok((boundary_sq / interior_sq).sqrt())
}

/// Density and mode on a grid covering the domain with `grid_n` cells along
/// the longer side, from `n_total` boundary nodes.
pub fn reconstruct(boundary: &Boundary, kappa: f64, n_total: usize, grid_n: usize) -> Result<ModeGrid> {
    let disc = DiscreteBoundary::with_total(boundary, n_total)?;
    let d = boundary_density(&disc, kappa)?;
    let b = boundary.bbox();
    let pad = 0.02 * (b[1] - b[0]).max(b[3] - b[2]);
    let bbox = [b[0] - pad, b[1] + pad, b[2] - pad, b[3] + pad];
    let (w, h) = (bbox[1] - bbox[0], bbox[3] - bbox[2]);
    let (nx, ny) = if w >= h {
        (grid_n, ((grid_n as f64 * h / w).ceil() as usize).max(1))
    } else {
        (((grid_n as f64 * w / h).ceil() as usize).max(1), grid_n)
    };
    evaluate_mode(&disc, &d.values, kappa, bbox, nx, ny)
}
