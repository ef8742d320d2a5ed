use drum_core::modes::ModeGrid;
use image::{Rgb, RgbImage, Rgba, RgbaImage};

const WIDTH: u32 = 900;
const HEIGHT: u32 = 420;
const MARGIN: u32 = 30;

const COLORS: [Rgb<u8>; 2] = [Rgb([200, 40, 40]), Rgb([30, 80, 200])];

/// Line plot of log10 σ_min against κ, one series per representation.
pub fn sweep_plot(kappa: &[f64], series: &[Vec<f64>]) -> RgbImage {
    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, Rgb([255, 255, 255]));
    let logs: Vec<Vec<f64>> = series
        .iter()
        .map(|s| s.iter().map(|v| v.max(1e-16).log10()).collect())
        .collect();
    let lo = logs.iter().flatten().copied().fold(f64::INFINITY, f64::min).floor();
    let hi = logs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max).ceil().max(lo + 1.0);
    let (k0, k1) = (kappa[0], kappa[kappa.len() - 1]);
    let px = |k: f64| MARGIN as f64 + (k - k0) / (k1 - k0).max(1e-300) * (WIDTH - 2 * MARGIN) as f64;
    let py = |v: f64| (HEIGHT - MARGIN) as f64 - (v - lo) / (hi - lo) * (HEIGHT - 2 * MARGIN) as f64;

    let grey = Rgb([210, 210, 210]);
    let mut decade = lo;
    while decade <= hi {
        line(&mut img, px(k0), py(decade), px(k1), py(decade), grey);
        decade += 1.0;
    }
    let axis = Rgb([0, 0, 0]);
    line(&mut img, px(k0), py(lo), px(k1), py(lo), axis);
    line(&mut img, px(k0), py(lo), px(k0), py(hi), axis);
    for (s, color) in logs.iter().zip(COLORS.iter().cycle()) {
        for i in 1..s.len() {
            line(&mut img, px(kappa[i - 1]), py(s[i - 1]), px(kappa[i]), py(s[i]), *color);
        }
    }
    img
}

fn line(img: &mut RgbImage, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb<u8>) {
    let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as usize;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let x = (x0 + t * (x1 - x0)).round();
        let y = (y0 + t * (y1 - y0)).round();
        if x >= 0.0 && y >= 0.0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, color);
        }
    }
}

pub fn mode_image(grid: &ModeGrid) -> RgbaImage {
    RgbaImage::from_raw(grid.nx as u32, grid.ny as u32, grid.to_rgba()).expect("rgba buffer matches grid")
}

/// Tiles mode images row by row, `cols` per row.
pub fn montage(grids: &[ModeGrid], cols: usize) -> RgbaImage {
    let cols = cols.max(1).min(grids.len().max(1));
    let rows = grids.len().div_ceil(cols);
    let w = grids.iter().map(|g| g.nx).max().unwrap_or(1) as u32;
    let h = grids.iter().map(|g| g.ny).max().unwrap_or(1) as u32;
    let gap = 4;
    let mut out = RgbaImage::from_pixel(
        cols as u32 * (w + gap) + gap,
        rows.max(1) as u32 * (h + gap) + gap,
        Rgba([255, 255, 255, 255]),
    );
    for (i, g) in grids.iter().enumerate() {
        let tile = mode_image(g);
        let x = gap + (i % cols) as u32 * (w + gap);
        let y = gap + (i / cols) as u32 * (h + gap);
        image::imageops::overlay(&mut out, &tile, x as i64, y as i64);
    }
    out
}
