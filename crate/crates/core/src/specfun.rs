//! Bessel functions J₀, J₁, Y₀, Y₁ and Hankel functions H₀⁽¹⁾, H₁⁽¹⁾ of
//! real positive argument.
//!
//! Below [`X_SWITCH`] the ascending power series are summed directly (the
//! logarithmic singularity of Y is split off analytically, so nothing
//! cancels). Above it the fdlibm rational/asymptotic approximations from the
//! `libm` crate are used; they carry absolute errors of a few ulp.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments `x <= X_SWITCH` are evaluated with the power series.
pub const X_SWITCH: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Zero,
    One,
}

/// J₀, Y₀, J₁, Y₁ at one argument; the kernels need all four together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cylinder {
    pub j0: f64,
    pub y0: f64,
    pub j1: f64,
    pub y1: f64,
}

impl Cylinder {
    /// Unchecked evaluation; `x` must be positive.
    #[inline]
    pub fn at(x: f64) -> Self {
        if x <= X_SWITCH {
            let (j0, y0) = series_order0(x);
            let (j1, y1) = series_order1(x);
            Cylinder { j0, y0, j1, y1 }
        } else {
            Cylinder {
                j0: libm::j0(x),
                y0: libm::y0(x),
                j1: libm::j1(x),
                y1: libm::y1(x),
            }
        }
    }

    #[inline]
    pub fn h0(&self) -> Complex64 {
        Complex64::new(self.j0, self.y0)
    }

    #[inline]
    pub fn h1(&self) -> Complex64 {
        Complex64::new(self.j1, self.y1)
    }
}

pub fn bessel_j(order: Order, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "bessel_j", x });
    }
    if x == 0.0 {
        return Ok(match order {
            Order::Zero => 1.0,
            Order::One => 0.0,
        });
    }
    Ok(match (order, x <= X_SWITCH) {
        (Order::Zero, true) => series_order0(x).0,
        (Order::One, true) => series_order1(x).0,
        (Order::Zero, false) => libm::j0(x),
        (Order::One, false) => libm::j1(x),
    })
}

pub fn bessel_y(order: Order, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "bessel_y", x });
    }
    Ok(match (order, x <= X_SWITCH) {
        (Order::Zero, true) => series_order0(x).1,
        (Order::One, true) => series_order1(x).1,
        (Order::Zero, false) => libm::y0(x),
        (Order::One, false) => libm::y1(x),
    })
}

/// H⁽¹⁾ = J + iY.
pub fn hankel1(order: Order, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "hankel1", x });
    }
    Ok(Complex64::new(bessel_j(order, x)?, bessel_y(order, x)?))
}

/// Series evaluation `(J, Y)` for `0 < x <= X_SWITCH`.
pub fn small_argument_forms(order: Order, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x <= X_SWITCH) {
        return Err(Error::Domain {
            func: "small_argument_forms",
            x,
        });
    }
    Ok(match order {
        Order::Zero => series_order0(x),
        Order::One => series_order1(x),
    })
}

/// The analytic remainder `Y₀(x) − (2/π)(ln(x/2) + γ)J₀(x)`, summed from its
/// own series so that it can be inspected near 0 without cancellation.
pub fn y0_regular_part(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        let add = -term * harmonic;
        sum += add;
        if add.abs() <= 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    FRAC_2_PI * sum
}

// J₀ = Σ (−q)^k/(k!)², Y₀ = (2/π)[(ln(x/2)+γ)J₀ + Σ_{k≥1} (−1)^{k+1} H_k q^k/(k!)²]
fn series_order0(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut j = 1.0;
    let mut harmonic = 0.0;
    let mut reg = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j += term;
        reg -= term * harmonic;
        if term.abs() < 1e-18 {
            break;
        }
    }
    let y = FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j + reg);
    (j, y)
}

// J₁ = (x/2) Σ (−q)^k/(k!(k+1)!)
// Y₁ = −2/(πx) + (2/π) ln(x/2) J₁ − (x/2π) Σ (−q)^k (ψ(k+1)+ψ(k+2))/(k!(k+1)!)
fn series_order1(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut hk = 0.0; // H_k
    let mut hk1 = 1.0; // H_{k+1}
    let mut s = 1.0;
    let mut psi_sum = -2.0 * EULER_GAMMA + hk + hk1;
    let mut t = psi_sum;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        hk1 += 1.0 / (kf + 1.0);
        psi_sum = -2.0 * EULER_GAMMA + hk + hk1;
        s += term;
        t += term * psi_sum;
        if term.abs() < 1e-18 {
            break;
        }
    }
    let j = 0.5 * x * s;
    let y = -2.0 / (PI * x) + FRAC_2_PI * (0.5 * x).ln() * j - 0.5 * x * t / PI;
    (j, y)
}
