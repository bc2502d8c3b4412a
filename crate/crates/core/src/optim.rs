//! Derivative-free numerical search primitives: a bracketed root finder and a
//! two-dimensional Nelder–Mead maximizer.

use crate::error::{Error, Result};

/// Controls for [`brent_root`].
#[derive(Debug, Clone, Copy)]
pub struct RootControls {
    /// Absolute tolerance on the root location.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for RootControls {
    fn default() -> Self {
        Self {
            xtol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Brent's method on `[lo, hi]`. The endpoints must bracket a sign change.
///
/// Combines bisection with secant and inverse quadratic interpolation steps,
/// falling back to bisection whenever an interpolated step would leave the
/// bracket or fail to shrink it quickly enough.
pub fn brent_root<F>(mut f: F, lo: f64, hi: f64, controls: RootControls) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo, hi });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..controls.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * controls.xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Domain(format!("root objective not finite at {b}")));
        }
    }
    Ok(b)
}

/// Controls for [`nelder_mead_2d`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadControls {
    /// Initial simplex edge lengths along each coordinate.
    pub step: [f64; 2],
    /// Convergence threshold on the spread of objective values across the simplex.
    pub ftol: f64,
    /// Convergence threshold on the simplex diameter.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadControls {
    fn default() -> Self {
        Self {
            step: [0.1, 0.1],
            ftol: 1e-8,
            xtol: 1e-8,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadResult {
    pub argmax: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Whether the simplex collapsed and the search was restarted.
    pub restarted: bool,
}

/// Maximizes `objective` over the plane with the Nelder–Mead simplex method.
///
/// Non-finite objective values are treated as `-inf`, so an objective can
/// reject infeasible points by returning `f64::NEG_INFINITY`. A simplex that
/// degenerates before converging is rebuilt once around its best vertex with
/// a perturbed orientation; a second collapse is reported as non-convergence.
pub fn nelder_mead_2d<F>(
    mut objective: F,
    start: [f64; 2],
    controls: NelderMeadControls,
) -> NelderMeadResult
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut eval = |x: [f64; 2]| {
        let v = objective(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let first = run_simplex(&mut eval, start, controls.step, controls, controls.max_iter);
    if !first.collapsed {
        return first.into_result(false);
    }
    let step = [controls.step[0] * 0.7, -controls.step[1] * 1.3];
    let remaining = controls.max_iter.saturating_sub(first.iterations);
    let second = run_simplex(&mut eval, first.best, step, controls, remaining);
    let collapsed = second.collapsed;
    let mut result = second.into_result(true);
    result.iterations += first.iterations;
    if collapsed {
        result.converged = false;
    }
    result
}

struct SimplexOutcome {
    best: [f64; 2],
    value: f64,
    iterations: usize,
    converged: bool,
    collapsed: bool,
}

impl SimplexOutcome {
    fn into_result(self, restarted: bool) -> NelderMeadResult {
        NelderMeadResult {
            argmax: self.best,
            value: self.value,
            iterations: self.iterations,
            converged: self.converged,
            restarted,
        }
    }
}

fn run_simplex<F>(
    eval: &mut F,
    start: [f64; 2],
    step: [f64; 2],
    controls: NelderMeadControls,
    max_iter: usize,
) -> SimplexOutcome
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut pts = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut vals = [eval(pts[0]), eval(pts[1]), eval(pts[2])];

    let mut iterations = 0;
    let mut converged = false;
    let mut collapsed = false;
    while iterations < max_iter {
        // Order descending: index 0 best, index 2 worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
        pts = [pts[order[0]], pts[order[1]], pts[order[2]]];
        vals = [vals[order[0]], vals[order[1]], vals[order[2]]];

        let spread = vals[0] - vals[2];
        let diameter = (0..2)
            .map(|i| dist(pts[0], pts[i + 1]))
            .fold(0.0_f64, f64::max);
        if vals[2].is_finite()
            && spread <= controls.ftol * (1.0 + vals[0].abs())
            && diameter <= controls.xtol * (1.0 + norm(pts[0]))
        {
            converged = true;
            break;
        }
        if vals[2].is_finite()
            && area(&pts) <= 1e-10 * diameter * diameter
            && diameter > controls.xtol
        {
            collapsed = true;
            break;
        }
        iterations += 1;

        let centroid = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let along = |t: f64| {
            [
                centroid[0] + t * (pts[2][0] - centroid[0]),
                centroid[1] + t * (pts[2][1] - centroid[1]),
            ]
        };

        let xr = along(-1.0);
        let fr = eval(xr);
        if fr > vals[0] {
            let xe = along(-2.0);
            let fe = eval(xe);
            if fe > fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr > vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        if fr > vals[2] {
            let xc = along(-0.5);
            let fc = eval(xc);
            if fc >= fr {
                pts[2] = xc;
                vals[2] = fc;
                continue;
            }
        } else {
            let xc = along(0.5);
            let fc = eval(xc);
            if fc > vals[2] {
                pts[2] = xc;
                vals[2] = fc;
                continue;
            }
        }
        for i in 1..3 {
            pts[i] = [
                pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
            ];
            vals[i] = eval(pts[i]);
        }
    }

    let best = (0..3)
        .max_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .unwrap_or(0);
    SimplexOutcome {
        best: pts[best],
        value: vals[best],
        iterations,
        converged,
        collapsed,
    }
}

fn area(p: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
        .abs()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cube_root_of_two() {
        let r = brent_root(|x| x * x * x - 2.0, 1.0, 2.0, RootControls::default()).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12, "{r}");
    }

    #[test]
    fn brent_rejects_bracket_without_sign_change() {
        let err = brent_root(|x| x * x + 1.0, -1.0, 1.0, RootControls::default()).unwrap_err();
        assert!(matches!(err, Error::NoBracket { .. }));
    }

    #[test]
    fn brent_accepts_root_at_endpoint() {
        let r = brent_root(|x| x - 1.0, 1.0, 3.0, RootControls::default()).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn nelder_mead_maximizes_concave_quadratic() {
        let res = nelder_mead_2d(
            |[x, y]| -(x - 3.0).powi(2) - (y + 1.0).powi(2),
            [0.0, 0.0],
            NelderMeadControls {
                step: [1.0, 1.0],
                ftol: 1e-16,
                xtol: 1e-9,
                max_iter: 500,
            },
        );
        assert!(res.converged);
        assert!((res.argmax[0] - 3.0).abs() < 1e-6, "{:?}", res.argmax);
        assert!((res.argmax[1] + 1.0).abs() < 1e-6, "{:?}", res.argmax);
    }

    #[test]
    fn nelder_mead_steers_away_from_infeasible_region() {
        // Maximum at (1, 1) with everything left of x = 0.5 infeasible.
        let res = nelder_mead_2d(
            |[x, y]| {
                if x < 0.5 {
                    f64::NEG_INFINITY
                } else {
                    -(x - 1.0).powi(2) - (y - 1.0).powi(2)
                }
            },
            [0.6, 0.0],
            NelderMeadControls {
                step: [0.5, 0.5],
                ftol: 1e-14,
                xtol: 1e-8,
                max_iter: 500,
            },
        );
        assert!((res.argmax[0] - 1.0).abs() < 1e-5);
        assert!((res.argmax[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn nelder_mead_reports_iteration_cap() {
        let res = nelder_mead_2d(
            |[x, y]| -(x - 100.0).powi(2) - y * y,
            [0.0, 0.0],
            NelderMeadControls {
                step: [0.01, 0.01],
                ftol: 1e-16,
                xtol: 1e-12,
                max_iter: 5,
            },
        );
        assert!(!res.converged);
        assert_eq!(res.iterations, 5);
    }
}
