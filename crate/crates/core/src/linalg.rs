//! Dense complex linear algebra: scaled determinants, smallest singular
//! triplets and polynomial roots via companion matrices.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

/// `mantissa · 2^exponent` with `|mantissa| ∈ [1, 2)` or `mantissa = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledDeterminant {
    pub mantissa: Complex64,
    pub exponent: i64,
}

impl ScaledDeterminant {
    pub const ZERO: Self = ScaledDeterminant {
        mantissa: Complex64::new(0.0, 0.0),
        exponent: 0,
    };

    pub const ONE: Self = ScaledDeterminant {
        mantissa: Complex64::new(1.0, 0.0),
        exponent: 0,
    };

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    fn normalized(mantissa: Complex64, exponent: i64) -> Self {
        let mag = mantissa.norm();
        if mag == 0.0 || !mag.is_finite() {
            return ScaledDeterminant {
                mantissa: if mag == 0.0 { Complex64::new(0.0, 0.0) } else { mantissa },
                exponent,
            };
        }
        let (_, e) = libm::frexp(mag);
        let shift = e - 1;
        ScaledDeterminant {
            mantissa: mantissa * libm::ldexp(1.0, -shift),
            exponent: exponent + shift as i64,
        }
    }

    /// Multiplies in one factor.
    pub fn times(self, z: Complex64) -> Self {
        Self::normalized(self.mantissa * z, self.exponent)
    }

    pub fn mul(self, other: Self) -> Self {
        Self::normalized(self.mantissa * other.mantissa, self.exponent + other.exponent)
    }

    /// `log₂|det|`, `-∞` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().log2() + self.exponent as f64
        }
    }

    /// Plain value; fails when the exponent is not representable.
    pub fn value(&self) -> Result<Complex64> {
        self.value_scaled(0)
    }

    /// `det · 2^(−shift)`.
    pub fn value_scaled(&self, shift: i64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(self.mantissa);
        }
        let e = self.exponent - shift;
        if !(-1020..=1020).contains(&e) {
            return Err(Error::DeterminantOverflow { exponent: e });
        }
        Ok(self.mantissa * libm::ldexp(1.0, e as i32))
    }
}

/// Determinant by partially pivoted LU, accumulated in scaled form.
pub fn lu_det(a: &DMatrix<Complex64>) -> ScaledDeterminant {
    assert!(a.is_square(), "lu_det needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return ScaledDeterminant::ONE;
    }
    let lu = a.clone().lu();
    let sign: Complex64 = lu.p().determinant();
    let packed = lu.lu_internal();
    let mut det = ScaledDeterminant::ONE.times(sign);
    for i in 0..n {
        det = det.times(packed[(i, i)]);
        if det.is_zero() {
            return ScaledDeterminant::ZERO;
        }
    }
    det
}

/// Smallest singular value with unit right (`v`) and left (`u`) vectors:
/// `‖A v‖ = ‖u* A‖ = σ`.
#[derive(Clone, Debug)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub v: DVector<Complex64>,
    pub u: DVector<Complex64>,
    /// Second-smallest singular value (`∞` for 1×1 matrices).
    pub sigma2: f64,
}

/// Full SVD; robust reference path.
pub fn min_singular(a: &DMatrix<Complex64>) -> SingularTriplet {
    assert!(a.is_square(), "min_singular needs a square matrix");
    let svd = a.clone().svd(true, true);
    let s = &svd.singular_values;
    let (imin, &sigma) = s
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty matrix");
    let sigma2 = s
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != imin)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    let u = svd.u.as_ref().expect("u requested").column(imin).into_owned();
    let v = svd
        .v_t
        .as_ref()
        .expect("v_t requested")
        .row(imin)
        .transpose()
        .map(|z| z.conj());
    SingularTriplet { sigma, v, u, sigma2 }
}

/// All singular values, ascending.
pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

const BLOCK: usize = 4;
const MAX_SWEEPS: usize = 60;

/// Smallest singular triplet via one LU factorization and block inverse
/// subspace iteration on `(A*A)⁻¹`, finished by a Rayleigh–Ritz step. Much
/// cheaper than a full SVD when σ_min is well separated; falls back to
/// [`min_singular`] when the iteration stalls.
pub fn min_singular_fast(a: &DMatrix<Complex64>) -> SingularTriplet {
    let n = a.nrows();
    if n <= 2 * BLOCK {
        return min_singular(a);
    }
    match inverse_subspace(a) {
        Some(t) => t,
        None => min_singular(a),
    }
}

fn inverse_subspace(a: &DMatrix<Complex64>) -> Option<SingularTriplet> {
    let n = a.nrows();
    let lu = a.clone().lu();
    let l = lu.l();
    let u = lu.u();
    // deterministic, generic start block
    let mut v = DMatrix::from_fn(n, BLOCK, |i, j| {
        let x = (i * 7 + j * 13 + 1) as f64;
        Complex64::new((x * 0.618_033_988_7).sin(), (x * 0.414_213_562_3 + j as f64).cos())
    });
    orthonormalize(&mut v);
    let mut prev = [f64::INFINITY; 2];
    for sweep in 0..MAX_SWEEPS {
        // (A*A)⁻¹ v = A⁻¹ A⁻ᴴ v; with P A = L U, A⁻ᴴ = P⁻¹ L⁻ᴴ U⁻ᴴ
        if !u.ad_solve_upper_triangular_mut(&mut v) || !l.ad_solve_lower_triangular_mut(&mut v) {
            return None;
        }
        lu.p().inv_permute_rows(&mut v);
        if !lu.solve_mut(&mut v) {
            return None;
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        orthonormalize(&mut v);
        let av = a * &v;
        let svd = av.svd(true, true);
        let mut order: Vec<usize> = (0..BLOCK).collect();
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        let ritz = [svd.singular_values[order[0]], svd.singular_values[order[1]]];
        let settled = (0..2).all(|k| (ritz[k] - prev[k]).abs() <= 1e-10 * ritz[k].max(1e-300));
        if settled || sweep + 1 == MAX_SWEEPS {
            if !settled {
                return None;
            }
            let vt = svd.v_t.as_ref()?;
            let coeffs = vt.row(order[0]).transpose().map(|z| z.conj());
            let right = &v * coeffs;
            // one more A⁻ᴴ step sharpens the left vector beyond the Ritz one
            let mut left = right.clone();
            if !u.ad_solve_upper_triangular_mut(&mut left) || !l.ad_solve_lower_triangular_mut(&mut left) {
                return None;
            }
            lu.p().inv_permute_rows(&mut left);
            let norm = left.norm();
            if !(norm > 0.0 && norm.is_finite()) {
                return None;
            }
            left.scale_mut(1.0 / norm);
            return Some(SingularTriplet {
                sigma: ritz[0],
                v: right,
                u: left,
                sigma2: ritz[1],
            });
        }
        prev = ritz;
    }
    None
}

// Modified Gram–Schmidt, twice for stability.
fn orthonormalize(v: &mut DMatrix<Complex64>) {
    for _ in 0..2 {
        for j in 0..v.ncols() {
            for k in 0..j {
                let proj = v.column(k).dotc(&v.column(j));
                let col_k = v.column(k).into_owned();
                v.column_mut(j).axpy(-proj, &col_k, Complex64::new(1.0, 0.0));
            }
            let norm = v.column(j).norm();
            if norm > 0.0 {
                v.column_mut(j).scale_mut(1.0 / norm);
            }
        }
    }
}

/// Roots of `Σ c_m z^m` as eigenvalues of the (balanced) companion matrix.
/// Leading coefficients below `1e−14·max|c|` are dropped first.
pub fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if cmax == 0.0 || !cmax.is_finite() {
        return Err(Error::DegeneratePolynomial);
    }
    let mut d = coeffs.len() - 1;
    while coeffs[d].norm() < 1e-14 * cmax {
        d -= 1;
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    // zero roots factor out exactly
    let low = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let c = &coeffs[low..=d];
    let deg = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    if deg == 0 {
        return Ok(roots);
    }
    let lead = c[deg];
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    balance(&mut m);
    let ev = Schur::new(m).eigenvalues().ok_or(Error::DegeneratePolynomial)?;
    roots.extend(ev.iter().copied());
    Ok(roots)
}

// Diagonal similarity scaling by powers of two (Parlett–Reinsch).
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            while cc < r / radix {
                f *= radix;
                cc *= radix * radix;
            }
            while cc > r * radix {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}
