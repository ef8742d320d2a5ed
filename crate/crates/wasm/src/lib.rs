//! Browser bindings: σ_min sweeps, interval solves and mode images.
//!
//! Shapes are passed as the same JSON accepted by the command-line tool,
//! results come back as JSON strings or raw RGBA bytes.

use drum_core::geometry::{Boundary, DiscreteBoundary, ShapeSpec};
use drum_core::modes::{boundary_density, evaluate_mode};
use drum_core::operator::Representation;
use drum_core::solver::{solve_interval, sweep_sigma_min, Eta, SolveOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn boundary(shape: &str) -> Result<Boundary, JsError> {
    let spec: ShapeSpec = serde_json::from_str(shape).map_err(|e| JsError::new(&format!("bad shape JSON: {e}")))?;
    Ok(spec.build()?)
}

#[derive(Serialize)]
struct Sweep {
    kappa: Vec<f64>,
    dlp: Vec<f64>,
    cfie: Vec<f64>,
}

/// σ_min of both representations at `samples` points of `[a, b]`, as JSON
/// `{kappa, dlp, cfie}`.
#[wasm_bindgen]
pub fn sweep(shape: &str, a: f64, b: f64, samples: usize) -> Result<String, JsError> {
    let bd = boundary(shape)?;
    let rule = SolveOptions::for_boundary(&bd).n_rule;
    let dlp = sweep_sigma_min(&bd, a, b, samples, Representation::Dlp, &rule)?;
    let cfie = sweep_sigma_min(&bd, a, b, samples, Representation::Cfie, &rule)?;
    let out = Sweep {
        kappa: dlp.iter().map(|r| r.0).collect(),
        dlp: dlp.iter().map(|r| r.1).collect(),
        cfie: cfie.iter().map(|r| r.1).collect(),
    };
    Ok(serde_json::to_string(&out)?)
}

/// Eigenfrequencies in `[a, b]` as the solver's JSON report. `eta` is
/// "kappa", "0" or a number.
#[wasm_bindgen]
pub fn solve(shape: &str, a: f64, b: f64, eta: &str) -> Result<String, JsError> {
    let bd = boundary(shape)?;
    let mut opts = SolveOptions::for_boundary(&bd);
    opts.eta = eta.parse::<Eta>()?;
    opts.estimate_errors = false;
    Ok(solve_interval(&bd, a, b, &opts)?.to_json())
}

/// Eigenmode at `kappa` on an `nx × ny` grid over the padded bounding box,
/// as RGBA bytes (top row first). Fails if `kappa` is not an
/// eigenfrequency.
#[wasm_bindgen]
pub fn mode_rgba(shape: &str, kappa: f64, nx: usize, ny: usize) -> Result<Vec<u8>, JsError> {
    let bd = boundary(shape)?;
    let opts = SolveOptions::for_boundary(&bd);
    let disc = DiscreteBoundary::with_total(&bd, opts.n_rule.at(kappa))?;
    let density = boundary_density(&disc, kappa)?;
    let b = bd.bbox();
    let pad = 0.02 * (b[1] - b[0]).max(b[3] - b[2]);
    let bbox = [b[0] - pad, b[1] + pad, b[2] - pad, b[3] + pad];
    Ok(evaluate_mode(&disc, &density.values, kappa, bbox, nx, ny)?.to_rgba())
}

/// Grid size with `n` cells along the longer side of the shape's box, as
/// `[nx, ny]`.
#[wasm_bindgen]
pub fn grid_size(shape: &str, n: usize) -> Result<Vec<usize>, JsError> {
    let b = boundary(shape)?.bbox();
    let (w, h) = (b[1] - b[0], b[3] - b[2]);
    let short = |r: f64| ((n as f64 * r).ceil() as usize).max(1);
    Ok(if w >= h { vec![n, short(h / w)] } else { vec![short(w / h), n] })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = r#"{"type":"ellipse","a":1,"b":1}"#;

    #[test]
    fn solve_reports_disk_root() {
        let json = solve(DISK, 2.0, 3.0, "kappa").unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let k = v["eigenfrequencies"][0]["kappa"].as_f64().unwrap();
        assert!((k - 2.404825557695773).abs() < 1e-10);
    }

    #[test]
    fn sweep_has_both_series() {
        let v: serde_json::Value = serde_json::from_str(&sweep(DISK, 2.3, 2.5, 3).unwrap()).unwrap();
        assert_eq!(v["kappa"].as_array().unwrap().len(), 3);
        assert_eq!(v["dlp"].as_array().unwrap().len(), 3);
        assert_eq!(v["cfie"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn mode_image_size() {
        let [nx, ny] = grid_size(DISK, 24).unwrap()[..] else { panic!() };
        let rgba = mode_rgba(DISK, 2.404825557695773, nx, ny).unwrap();
        assert_eq!(rgba.len(), 4 * nx * ny);
    }
}
