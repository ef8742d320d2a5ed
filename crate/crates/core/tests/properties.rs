use std::f64::consts::PI;

use drum_core::geometry::{Boundary, Curve, DiscreteBoundary};
use drum_core::linalg::{lu_det, min_singular};
use drum_core::modes::{evaluate_mode, ModeGrid};
use drum_core::operator::{assemble, kress_weights};
use drum_core::rootfind::{boyd_find_roots, BoydOptions};
use drum_core::solver::{solve_interval, svd_refine, weyl_count, window_edges, Eta, Method, NRule, SolveOptions};
use drum_core::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

const J01: f64 = 2.404825557695773;
const J02: f64 = 5.520078110286311;
const J03: f64 = 8.653727912911013;

fn fast() -> SolveOptions {
    SolveOptions {
        estimate_errors: false,
        ..SolveOptions::default()
    }
}

fn radial(scale: f64, c3: f64, s2: f64) -> Boundary {
    Boundary::simple(Curve::radial(scale, &[0.0, 0.0, c3 * scale], &[0.0, s2 * scale]).unwrap())
}

fn few(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(few(64))]

    #[test]
    fn kress_weights_sum_to_zero(half in 2usize..80, t in 0.0..2.0 * PI) {
        let r = kress_weights(2 * half, t);
        let scale: f64 = r.iter().map(|w| w.abs()).sum();
        prop_assert!(r.iter().sum::<f64>().abs() <= 1e-14 * scale);
    }

    #[test]
    fn kress_cosine_identity(half in 2usize..64, t in 0.0..2.0 * PI, frac in 0.0..1.0f64) {
        let n = 2 * half;
        let m = 1 + ((half - 1) as f64 * frac) as usize;
        prop_assume!(m < half);
        let r = kress_weights(n, t);
        let s: f64 = r
            .iter()
            .enumerate()
            .map(|(k, w)| w * (m as f64 * 2.0 * PI * k as f64 / n as f64).cos())
            .sum();
        prop_assert!((s + 2.0 * PI * (m as f64 * t).cos() / m as f64).abs() <= 1e-13);
    }

    #[test]
    fn n_rule_is_even_bounded_and_monotone(base in 0.0..400.0, offset in 0.0..200.0, slope in 0.0..10.0, k in 0.0..100.0, dk in 0.0..10.0) {
        let rule = NRule { base, offset, slope };
        let n = rule.at(k);
        prop_assert_eq!(n % 2, 0);
        prop_assert!(n >= 64);
        prop_assert!(n as f64 >= base);
        prop_assert!(rule.at(k + dk) >= n);
        let parsed: NRule = rule.to_string().parse().unwrap();
        prop_assert_eq!(parsed.at(k), n);
    }

    #[test]
    fn windows_tile_the_interval(area in 0.1..10.0, a in 0.5..40.0, len in 0.01..60.0) {
        let o = SolveOptions::default();
        let b = a + len;
        let e = window_edges(area, a, b, &o);
        prop_assert_eq!(e[0], a);
        prop_assert_eq!(*e.last().unwrap(), b);
        for w in e.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        // only the last window may be narrower than the minimum
        for w in e[..e.len() - 1].windows(2) {
            prop_assert!(w[1] - w[0] >= o.min_window - 1e-12);
        }
    }

    #[test]
    fn normals_are_unit_and_outward(a in 0.3..2.0, b in 0.3..2.0, n in 8usize..64) {
        let bd = Boundary::simple(Curve::ellipse(a, b).unwrap());
        let disc = DiscreteBoundary::new(&bd, 2 * n).unwrap();
        let c = &disc.curves[0];
        // the winding-number test is only reliable a few fine spacings away
        let eps = 0.05 * a.min(b);
        for k in 0..c.n {
            let nk = c.normal[k];
            prop_assert!((nk[0].hypot(nk[1]) - 1.0).abs() <= 1e-14);
            let d = c.dx[k];
            prop_assert!((nk[0] * d[0] + nk[1] * d[1]).abs() <= 1e-12 * c.speed[k]);
            let out = [c.x[k][0] + eps * nk[0], c.x[k][1] + eps * nk[1]];
            let inn = [c.x[k][0] - eps * nk[0], c.x[k][1] - eps * nk[1]];
            prop_assert!(!bd.contains(out));
            prop_assert!(bd.contains(inn));
        }
    }

    #[test]
    fn holes_have_inward_normals(r in 0.2..0.6) {
        let bd = Boundary::annulus(Curve::circle(1.0).unwrap(), Curve::circle(r).unwrap()).unwrap();
        let disc = DiscreteBoundary::new(&bd, 32).unwrap();
        let hole = &disc.curves[1];
        prop_assert!(hole.is_hole);
        for k in 0..hole.n {
            let p = hole.x[k];
            let nk = hole.normal[k];
            // pointing out of Ω means towards the centre
            prop_assert!(p[0] * nk[0] + p[1] * nk[1] < 0.0);
        }
    }

    #[test]
    fn determinant_is_multiplicative(seed in 0u64..1000, n in 2usize..12) {
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        let b = DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        let lhs = lu_det(&(&a * &b)).value().unwrap();
        let rhs = lu_det(&a).mul(lu_det(&b)).value().unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1e-300));
    }

    #[test]
    fn boyd_recovers_polynomial_roots(r1 in 0.1..0.9f64, gap in 0.05..0.4f64, r3 in 1.2..1.9f64) {
        let roots = [r1, (r1 + gap).min(1.1), r3];
        let g = |x: f64| Ok(Complex64::new(roots.iter().map(|r| x - r).product::<f64>() * (1.0 + 0.3 * x.sin()), 0.0));
        let set = boyd_find_roots(g, 0.0, 2.0, &BoydOptions::default()).unwrap();
        let found: Vec<f64> = set.roots.iter().map(|r| r.kappa).collect();
        prop_assert_eq!(found.len(), 3);
        for (f, r) in found.iter().zip(&roots) {
            prop_assert!((f - r).abs() <= 1e-10, "{f} vs {r}");
        }
    }
}

proptest! {
    #![proptest_config(few(8))]

    // A = I − M − iηQ depends on κ and the geometry only through κ·length, so
    // scaling the domain by R and κ by 1/R leaves it unchanged (with η = κ or
    // η = 0).
    #[test]
    fn operator_is_scale_invariant(scale in 0.3..3.0, kappa in 1.0..15.0, c3 in -0.2..0.2, s2 in -0.3..0.3, cfie in any::<bool>()) {
        let n = 96;
        let one = DiscreteBoundary::new(&radial(1.0, c3, s2), n).unwrap();
        let big = DiscreteBoundary::new(&radial(scale, c3, s2), n).unwrap();
        let eta = |k: f64| if cfie { k } else { 0.0 };
        let a = assemble(&one, kappa, eta(kappa)).unwrap().a;
        let b = assemble(&big, kappa / scale, eta(kappa / scale)).unwrap().a;
        let diff = (&a - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-11, "{diff:e}");
        let sa = min_singular(&a).sigma;
        let sb = min_singular(&b).sigma;
        prop_assert!((sa - sb).abs() <= 1e-12);
    }

    #[test]
    fn mode_grid_binary_round_trip(nx in 1usize..20, ny in 1usize..20) {
        let disc = DiscreteBoundary::new(&Boundary::simple(Curve::circle(1.0).unwrap()), 64).unwrap();
        let density = vec![Complex64::new(1.0, 0.0); 64];
        let g = evaluate_mode(&disc, &density, J01, [-1.5, 1.5, -1.0, 1.0], nx.max(8), ny.max(8)).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        let back = ModeGrid::read_binary(buf.as_slice()).unwrap();
        prop_assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(few(4))]

    // Splitting the search interval does not change the roots.
    #[test]
    fn roots_do_not_depend_on_windows(cut in 3.0..9.0f64) {
        let disk = Boundary::simple(Curve::circle(1.0).unwrap());
        let o = fast();
        let whole = solve_interval(&disk, 2.0, 10.0, &o).unwrap().kappas();
        prop_assume!(whole.iter().all(|k| (k - cut).abs() > 0.01));
        let mut parts = solve_interval(&disk, 2.0, cut, &o).unwrap().kappas();
        parts.extend(solve_interval(&disk, cut, 10.0, &o).unwrap().kappas());
        prop_assert_eq!(whole.len(), parts.len());
        for (w, p) in whole.iter().zip(&parts) {
            prop_assert!((w - p).abs() <= 1e-10, "{w} vs {p}");
        }
    }

    // On an isolated root the determinant path and a direct σ_min
    // minimization agree.
    #[test]
    fn determinant_and_svd_agree_on_simple_roots(which in 0usize..3, radius in 0.8..1.25) {
        let j = [J01, J02, J03][which] / radius;
        let disk = Boundary::simple(Curve::circle(radius).unwrap());
        let o = fast();
        let sol = solve_interval(&disk, j - 0.05, j + 0.05, &o).unwrap();
        let det: Vec<_> = sol.eigenfrequencies.iter().filter(|e| e.method == Method::BoydDet).collect();
        prop_assert_eq!(det.len(), 1);
        let (svd, sigma) = svd_refine(&disk, j - 0.01, j + 0.01, &o).unwrap();
        prop_assert!(sigma <= 1e-8);
        prop_assert!((det[0].kappa - svd).abs() <= 1e-9, "{} vs {svd}", det[0].kappa);
    }
}

#[test]
fn disk_weyl_audit_is_consistent() {
    let disk = Boundary::simple(Curve::circle(1.0).unwrap());
    let sol = solve_interval(&disk, 0.5, 20.0, &fast()).unwrap();
    let audit = sol.weyl.expect("audit runs from near zero");
    assert!((audit.expected - weyl_count(&disk, 20.0)).abs() < 1e-12);
    assert!((audit.found as f64 - audit.expected).abs() <= 2.0, "{audit:?}");
    assert!(!sol.weyl_warning());
}

#[test]
fn dlp_cross_check_flags_nothing_on_simply_connected_domains() {
    let b = radial(1.0, 0.2, 0.3);
    let o = SolveOptions {
        eta: Eta::Zero,
        ..fast()
    };
    let sol = solve_interval(&b, 4.0, 6.0, &o).unwrap();
    assert!(!sol.eigenfrequencies.is_empty());
    assert!(sol.eigenfrequencies.iter().all(|e| !e.spurious));
}
