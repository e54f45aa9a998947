//! Closest-point projection onto an axis-aligned ellipsoid.
//!
//! The point is reflected into the first octant and the semi-axes sorted in
//! decreasing order. Off the coordinate planes the closest point is
//! `x_i = r_i y_i / (s + r_i)` where `s` is the unique root of the monotone
//! function `F(s) = Σ (r_i z_i / (s + r_i))² − 1`; the root is found by
//! Newton steps from the lower bracket end, safeguarded with bisection. Points on coordinate planes fall
//! back to the 2D problem or to closed forms.

use crate::error::{Error, Result};

pub(crate) const MAX_ITERS: usize = 50;
pub(crate) const TOL: f64 = 1e-12;

/// Distance from `y` to the ellipsoid with semi-axes `axes`, and the sign
/// of the implicit function (negative inside).
pub(crate) fn distance(axes: [f64; 3], y: [f64; 3]) -> Result<(f64, bool)> {
    let inside = (0..3).map(|i| (y[i] / axes[i]).powi(2)).sum::<f64>() < 1.0;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| axes[b].partial_cmp(&axes[a]).unwrap());
    let e = order.map(|i| axes[i]);
    let z = order.map(|i| y[i].abs());
    let dist = distance_sorted_3d(e, z).map_err(|reason| Error::Evaluation { point: y, reason })?;
    Ok((dist, inside))
}

fn distance_sorted_3d(e: [f64; 3], y: [f64; 3]) -> std::result::Result<f64, String> {
    if y[2] > 0.0 {
        if y[1] > 0.0 {
            if y[0] > 0.0 {
                let z = [y[0] / e[0], y[1] / e[1], y[2] / e[2]];
                let g = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] - 1.0;
                if g == 0.0 {
                    return Ok(0.0);
                }
                let r = [(e[0] / e[2]).powi(2), (e[1] / e[2]).powi(2), 1.0];
                let s = root(&r, &z, g)?;
                let x: Vec<f64> = (0..3).map(|i| r[i] * y[i] / (s + r[i])).collect();
                Ok(((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt())
            } else {
                distance_sorted_2d([e[1], e[2]], [y[1], y[2]])
            }
        } else if y[0] > 0.0 {
            distance_sorted_2d([e[0], e[2]], [y[0], y[2]])
        } else {
            Ok((y[2] - e[2]).abs())
        }
    } else {
        let d0 = e[0] * e[0] - e[2] * e[2];
        let d1 = e[1] * e[1] - e[2] * e[2];
        let n0 = e[0] * y[0];
        let n1 = e[1] * y[1];
        if n0 < d0 && n1 < d1 {
            let a = n0 / d0;
            let b = n1 / d1;
            let discr = 1.0 - a * a - b * b;
            if discr > 0.0 {
                let x = [e[0] * a, e[1] * b, e[2] * discr.sqrt()];
                return Ok(((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + x[2] * x[2]).sqrt());
            }
        }
        distance_sorted_2d([e[0], e[1]], [y[0], y[1]])
    }
}

fn distance_sorted_2d(e: [f64; 2], y: [f64; 2]) -> std::result::Result<f64, String> {
    if y[1] > 0.0 {
        if y[0] > 0.0 {
            let z = [y[0] / e[0], y[1] / e[1]];
            let g = z[0] * z[0] + z[1] * z[1] - 1.0;
            if g == 0.0 {
                return Ok(0.0);
            }
            let r = [(e[0] / e[1]).powi(2), 1.0];
            let s = root(&r, &z, g)?;
            let x = [r[0] * y[0] / (s + r[0]), y[1] / (s + 1.0)];
            Ok(((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt())
        } else {
            Ok((y[1] - e[1]).abs())
        }
    } else {
        let n0 = e[0] * y[0];
        let d0 = e[0] * e[0] - e[1] * e[1];
        if n0 < d0 {
            let a = n0 / d0;
            let x = [e[0] * a, e[1] * (1.0 - a * a).sqrt()];
            Ok(((x[0] - y[0]).powi(2) + x[1] * x[1]).sqrt())
        } else {
            Ok((y[0] - e[0]).abs())
        }
    }
}

/// Root of `F(s) = Σ (r_i z_i/(s + r_i))² − 1` with the smallest ratio
/// normalized to `r = 1` (last entry).
fn root(r: &[f64], z: &[f64], g: f64) -> std::result::Result<f64, String> {
    let last = r.len() - 1;
    let f = |s: f64| -> (f64, f64) {
        let mut v = -1.0;
        let mut dv = 0.0;
        for i in 0..r.len() {
            let q = r[i] * z[i] / (s + r[i]);
            v += q * q;
            dv -= 2.0 * q * q / (s + r[i]);
        }
        (v, dv)
    };
    // At the root every term is at most one, so s ≥ r_i (z_i − 1) for all i.
    let mut lo = r
        .iter()
        .zip(z)
        .map(|(a, b)| a * (b - 1.0))
        .fold(z[last] - 1.0, f64::max);
    let mut hi = if g < 0.0 {
        0.0
    } else {
        r.iter().zip(z).map(|(a, b)| (a * b).powi(2)).sum::<f64>().sqrt() - 1.0
    };
    let mut s = lo;
    for _ in 0..MAX_ITERS {
        let (v, dv) = f(s);
        // F is a sum of O(1) terms minus one; below this it is rounding noise.
        if v.abs() <= 4.0 * f64::EPSILON {
            return Ok(s);
        }
        if v > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        if hi - lo <= 2.0 * TOL * (1.0 + s.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = s - v / dv;
        if (newton - s).abs() <= TOL * (1.0 + s.abs()) && newton > lo && newton < hi {
            return Ok(newton);
        }
        // Newton from the left is monotone for this convex F; bisect only
        // if rounding pushes it out of the bracket.
        s = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(format!(
        "ellipsoid projection did not converge in {MAX_ITERS} iterations (bracket width {:.3e})",
        hi - lo
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_case_matches_radius() {
        let (d, inside) = distance([2.0, 2.0, 2.0], [0.3, -1.0, 0.7]).unwrap();
        let r = (0.09f64 + 1.0 + 0.49).sqrt();
        assert!(inside);
        assert!((d - (2.0 - r)).abs() < 1e-10);
    }

    #[test]
    fn axis_points() {
        let axes = [3.0, 2.0, 1.0];
        assert!((distance(axes, [5.0, 0.0, 0.0]).unwrap().0 - 2.0).abs() < 1e-12);
        assert!((distance(axes, [0.0, 0.0, 0.25]).unwrap().0 - 0.75).abs() < 1e-12);
        // center: nearest point is the end of the shortest axis
        assert!((distance(axes, [0.0, 0.0, 0.0]).unwrap().0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_is_attained_by_brute_force_search() {
        let axes = [1.5, 1.0, 0.7];
        for y in [[0.4, 0.3, 0.2], [2.0, -1.0, 0.5], [0.1, 0.05, -0.6], [-1.2, 0.9, 0.0]] {
            let (d, _) = distance(axes, y).unwrap();
            let mut best = f64::INFINITY;
            let n = 400;
            for a in 0..=n {
                let th = std::f64::consts::PI * a as f64 / n as f64;
                for b in 0..2 * n {
                    let ph = std::f64::consts::PI * b as f64 / n as f64;
                    let x = [
                        axes[0] * th.sin() * ph.cos(),
                        axes[1] * th.sin() * ph.sin(),
                        axes[2] * th.cos(),
                    ];
                    let dd = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
                    best = best.min(dd);
                }
            }
            assert!(d <= best + 1e-12, "{y:?}: {d} vs {best}");
            assert!(best - d < 2e-4, "{y:?}: {d} vs {best}");
        }
    }
}
