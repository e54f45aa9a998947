use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::energy::HelfrichParams;

fn fd_gradient(s: &ImplicitSurface, x: Vec3, step: f64) -> Vec3 {
    let mut g = [0.0; 3];
    for a in 0..3 {
        let mut p = x;
        let mut m = x;
        p[a] += step;
        m[a] -= step;
        g[a] = (s.signed_distance(p).unwrap() - s.signed_distance(m).unwrap()) / (2.0 * step);
    }
    g
}

#[test]
fn sphere_distance_examples() {
    let s = ImplicitSurface::sphere(1.0).unwrap();
    assert_eq!(s.signed_distance([0.0; 3]).unwrap(), 1.0);
    assert!((s.signed_distance([2.0, 0.0, 0.0]).unwrap() + 1.0).abs() < 1e-15);
    let flipped = s.with_orientation(Orientation::Outside);
    assert_eq!(flipped.signed_distance([0.0; 3]).unwrap(), -1.0);
}

#[test]
fn torus_outer_equator_is_on_surface() {
    let t = ImplicitSurface::torus(2.0, 0.5).unwrap();
    assert!(t.signed_distance([2.5, 0.0, 0.0]).unwrap().abs() < 1e-15);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(ImplicitSurface::sphere(0.0).is_err());
    assert!(ImplicitSurface::torus(1.0, 1.0).is_err());
    assert!(ImplicitSurface::ellipsoid(1.0, -1.0, 1.0).is_err());
    assert!(ImplicitSurface::sphere_chain(3, 1.0, 1.5).is_err());
    assert!(ImplicitSurface::sphere_chain(0, 1.0, 3.0).is_err());
    assert!(Orientation::from_sign(0).is_err());
}

#[test]
fn curvature_examples() {
    let s = ImplicitSurface::sphere(1.0).unwrap();
    let c = s.exact_curvatures([0.0, 0.0, 1.0]).unwrap();
    assert!((c.h.abs() - 2.0).abs() < 1e-15);
    assert_eq!(c.h, -2.0);
    assert!((c.k - 1.0).abs() < 1e-15);

    let t = ImplicitSurface::torus(2.0, 0.5).unwrap();
    let c = t.exact_curvatures([2.5, 0.0, 0.0]).unwrap();
    assert!((c.k - 0.8).abs() < 1e-14);
    let c = t.exact_curvatures([2.0, 0.0, 0.5]).unwrap();
    assert!(c.k.abs() < 1e-15);

    assert!(s.exact_curvatures([0.0, 0.0, 1.1]).is_err());
}

#[test]
fn orientation_flips_mean_but_not_gauss_curvature() {
    let s = ImplicitSurface::ellipsoid(1.5, 1.0, 0.7).unwrap();
    let f = s.with_orientation(Orientation::Outside);
    for p in s.surface_samples() {
        let a = s.exact_curvatures(p).unwrap();
        let b = f.exact_curvatures(p).unwrap();
        assert!((a.h + b.h).abs() < 1e-12);
        assert!((a.k - b.k).abs() < 1e-12);
    }
}

fn all_surfaces() -> Vec<ImplicitSurface> {
    vec![
        ImplicitSurface::sphere(1.0).unwrap(),
        ImplicitSurface::torus(2.0, 0.6).unwrap(),
        ImplicitSurface::ellipsoid(1.5, 1.0, 0.7).unwrap(),
        ImplicitSurface::sphere_chain(3, 1.0, 2.5).unwrap(),
    ]
}

#[test]
fn sff_norm_identity_at_samples() {
    for s in all_surfaces() {
        for p in s.surface_samples() {
            let c = s.exact_curvatures(p).unwrap();
            let lhs = c.b_norm_sq;
            let rhs = c.h * c.h - 2.0 * c.k;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0), "{:?} {p:?}", s.kind());
        }
    }
}

#[test]
fn surface_samples_lie_on_the_surface() {
    for s in all_surfaces() {
        for p in s.surface_samples() {
            assert!(s.signed_distance(p).unwrap().abs() < 1e-12, "{:?} {p:?}", s.kind());
        }
    }
}

#[test]
fn unit_gradient_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = 1e-5;
    for s in all_surfaces() {
        let reach = 0.5 / s.max_curvature();
        let r = s.bounding_radius() + 1.0;
        let mut checked = 0;
        while checked < 1000 {
            let x = [
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
            ];
            let d = s.signed_distance(x).unwrap();
            // stay off the medial axis: outside, or inside within the reach
            if d > reach || d < -1.0 {
                continue;
            }
            if let SurfaceKind::SphereChain { .. } = s.kind() {
                if d < -0.2 {
                    continue;
                }
            }
            let g = fd_gradient(&s, x, step);
            let n = crate::tensor::norm(g);
            assert!((n - 1.0).abs() < 1e-6, "{:?} at {x:?}: |∇d| = {n}", s.kind());
            checked += 1;
        }
    }
}

#[test]
fn analytic_distance_hessian_matches_differences() {
    for s in [
        ImplicitSurface::sphere(1.0).unwrap(),
        ImplicitSurface::torus(2.0, 0.6).unwrap(),
        ImplicitSurface::sphere_chain(2, 0.8, 2.0).unwrap(),
    ] {
        for p in s.surface_samples() {
            let n = s.distance_gradient(p);
            let y = [p[0] + 0.1 * n[0], p[1] + 0.1 * n[1], p[2] + 0.1 * n[2]];
            let a = s.distance_hessian(y).unwrap();
            let b = s.distance_hessian_fd(y, 1e-4).unwrap();
            assert!((a - b).frobenius_sq().sqrt() < 1e-5, "{:?} {y:?}", s.kind());
        }
    }
}

#[test]
fn distance_gradient_matches_differences_on_surface() {
    for s in all_surfaces() {
        for p in s.surface_samples() {
            let g = s.distance_gradient(p);
            let fd = fd_gradient(&s, p, 1e-6);
            for a in 0..3 {
                assert!((g[a] - fd[a]).abs() < 1e-6, "{:?} {p:?}", s.kind());
            }
        }
    }
}

#[test]
fn ellipsoid_curvature_matches_quadric_formulas() {
    // K = 1/(a²b²c² S²), κ₁+κ₂ = (|x|² − a² − b² − c²)/(a²b²c² S^{3/2}),
    // S = Σ x_i²/a_i⁴, with the inward-positive sign convention
    let (a, b, c) = (1.5, 1.0, 0.7);
    let s = ImplicitSurface::ellipsoid(a, b, c).unwrap();
    let abc2 = (a * b * c) * (a * b * c);
    for p in s.surface_samples() {
        let sum = p[0].powi(2) / a.powi(4) + p[1].powi(2) / b.powi(4) + p[2].powi(2) / c.powi(4);
        let k = 1.0 / (abc2 * sum * sum);
        let h = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - a * a - b * b - c * c) / (abc2 * sum.powf(1.5));
        let cv = s.exact_curvatures(p).unwrap();
        assert!((cv.h - h).abs() < 1e-12 * h.abs(), "{p:?}");
        assert!((cv.k - k).abs() < 1e-12 * k, "{p:?}");
        // the difference Hessian of the iterative distance is noisier
        let hess = s.distance_hessian(p).unwrap();
        assert!((hess.trace() - h).abs() < 1e-3, "{p:?}");
        assert!((hess.minor_sum() - k).abs() < 1e-3, "{p:?}");
    }
}

#[test]
fn sphere_sharp_energy_example() {
    let s = ImplicitSurface::sphere(1.0).unwrap();
    let hp = HelfrichParams::new(1.0, -0.5, 0.0).unwrap();
    let e = sharp_helfrich(&s, &hp);
    assert!((e.w_hel - 6.0 * PI).abs() < 1e-12);
    assert!((e.int_h2 - 16.0 * PI).abs() < 1e-12);
    assert!((e.int_k - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn gauss_bonnet_by_quadrature() {
    let hp = HelfrichParams::new(1.0, -0.5, 0.0).unwrap();
    for (s, genus) in [
        (ImplicitSurface::torus(2.0, 0.5).unwrap(), 1),
        (ImplicitSurface::torus(2.0, 0.6).unwrap(), 1),
        (ImplicitSurface::ellipsoid(1.5, 1.0, 0.7).unwrap(), 0),
        (ImplicitSurface::ellipsoid(1.0, 1.0, 0.3).unwrap(), 0),
    ] {
        let e = sharp_helfrich(&s, &hp);
        let target = 4.0 * PI * (1.0 - genus as f64);
        if genus == 1 {
            assert!(e.int_k.abs() < 1e-8, "{:?}: {}", s.kind(), e.int_k);
        } else {
            assert!((e.int_k - target).abs() < 1e-6 * target, "{:?}: {}", s.kind(), e.int_k);
        }
        assert!((e.int_b2 - (e.int_h2 - 2.0 * e.int_k)).abs() < 1e-9 * e.int_b2);
    }
}

#[test]
fn torus_area_and_willmore_closed_forms() {
    let (big, r) = (2.0, 0.6);
    let s = ImplicitSurface::torus(big, r).unwrap();
    let e = sharp_helfrich(&s, &HelfrichParams::new(1.0, -0.5, 0.0).unwrap());
    assert!((e.area - 4.0 * PI * PI * big * r).abs() < 1e-10);
    // four times the classical Willmore energy π² c²/√(c² − 1), c = R/r
    let c = big / r;
    let willmore = 4.0 * PI * PI * c * c / (c * c - 1.0).sqrt();
    assert!((e.int_h2 - willmore).abs() < 1e-9 * willmore, "{} vs {willmore}", e.int_h2);
}

#[test]
fn ellipsoid_of_revolution_area() {
    let (a, c) = (1.0, 0.5);
    let s = ImplicitSurface::ellipsoid(a, a, c).unwrap();
    let e = sharp_helfrich(&s, &HelfrichParams::new(1.0, -0.5, 0.0).unwrap());
    let ecc = (1.0 - c * c / (a * a)).sqrt();
    let area = 2.0 * PI * a * a * (1.0 + (1.0 - ecc * ecc) / ecc * ecc.atanh());
    assert!((e.area - area).abs() < 1e-10 * area);
}

#[test]
fn chain_scales_linearly() {
    let hp = HelfrichParams::new(1.0, -0.5, -2.0).unwrap();
    let one = sharp_helfrich(&ImplicitSurface::sphere_chain(1, 1.0, 2.0).unwrap(), &hp);
    assert!(one.int_bending.abs() < 1e-12);
    assert!((one.w_hel + 2.0 * PI).abs() < 1e-12);
    for h in 2..6 {
        let e = sharp_helfrich(&ImplicitSurface::sphere_chain(h, 1.0, 2.0).unwrap(), &hp);
        assert!((e.w_hel / e.area - hp.kappa_g).abs() < 1e-14);
        assert!((e.w_hel - h as f64 * one.w_hel).abs() < 1e-12 * e.w_hel.abs());
    }
}

#[test]
fn chain_distance_uses_nearest_ball() {
    let s = ImplicitSurface::sphere_chain(3, 1.0, 3.0).unwrap();
    assert!((s.signed_distance([3.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    assert!((s.signed_distance([-3.0, 0.0, 1.0]).unwrap()).abs() < 1e-15);
    assert!((s.signed_distance([1.5, 0.0, 0.0]).unwrap() + 0.5).abs() < 1e-15);
}

#[test]
fn lower_bound_holds_for_strict_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let kb = rng.gen_range(0.1..5.0);
        let kg = -kb * rng.gen_range(0.01..0.99);
        let h0 = rng.gen_range(-3.0..3.0);
        let hp = HelfrichParams::new(kb, kg, h0).unwrap();
        for s in all_surfaces() {
            let e = sharp_helfrich(&s, &hp);
            assert!(e.lower_bound.is_some());
            assert!(e.satisfies_lower_bound(), "{:?} {hp:?}", s.kind());
        }
    }
    let relaxed = HelfrichParams::new(1.0, -1.0, 1.0).unwrap();
    let e = sharp_helfrich(&all_surfaces()[0], &relaxed);
    assert!(e.lower_bound.is_none());
}

#[test]
fn offset_eigenvalue_law_on_sphere() {
    let s = ImplicitSurface::sphere(1.0).unwrap();
    let rows = distance_curvature_check(&s, &[0.0, 0.1]).unwrap();
    for r in &rows {
        if r.offset == 0.0 {
            assert!((r.laplacian_analytic - r.exact.h).abs() < 1e-15);
            assert!((r.minor_sum_analytic - 1.0).abs() < 1e-15);
        } else {
            assert!((r.minor_sum_analytic - 1.0 / 0.81).abs() < 1e-12);
            assert!((r.k_error_analytic() - 0.2345679).abs() < 1e-6);
        }
        assert!(r.within_bound());
        assert!((r.laplacian_numeric - r.laplacian_analytic).abs() < 1e-5);
        assert!((r.minor_sum_numeric - r.minor_sum_analytic).abs() < 1e-5);
    }
}

#[test]
fn offset_law_matches_numerics_on_torus_and_ellipsoid() {
    for s in [
        ImplicitSurface::torus(2.0, 0.6).unwrap(),
        ImplicitSurface::ellipsoid(1.5, 1.0, 0.7).unwrap(),
    ] {
        let tube = 0.5 / s.max_curvature();
        let rows = distance_curvature_check(&s, &[-0.5 * tube, 0.5 * tube]).unwrap();
        for r in rows {
            assert!(r.within_bound(), "{:?} {r:?}", s.kind());
            assert!((r.laplacian_numeric - r.laplacian_analytic).abs() < 1e-3, "{:?} {r:?}", s.kind());
            assert!((r.minor_sum_numeric - r.minor_sum_analytic).abs() < 1e-3, "{:?} {r:?}", s.kind());
        }
    }
}

#[test]
fn offsets_outside_the_tube_are_rejected() {
    let s = ImplicitSurface::sphere(1.0).unwrap();
    assert!(distance_curvature_check(&s, &[0.6]).is_err());
}
