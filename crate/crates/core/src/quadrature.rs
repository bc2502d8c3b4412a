//! Adaptive Gauss–Kronrod (7/15 point) quadrature in one dimension, and a
//! nested scheme for integrals over the triangle `0 < u < v < b`.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadControls {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadControls {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_intervals: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Globally adaptive integration of `f` over `[a, b]`: the interval with the
/// largest error estimate is bisected until the summed estimate meets the
/// tolerance or the interval budget is spent. Nodes never touch the endpoints,
/// so integrable endpoint singularities are tolerated.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    controls: QuadControls,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        };
    }
    let (v, e) = kronrod15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > controls.abs_tol.max(controls.rel_tol * total.abs())
        && pieces.len() < controls.max_intervals
    {
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, pv, pe) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval at floating-point resolution; keep it and stop refining.
            pieces.push((lo, hi, pv, pe));
            break;
        }
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
        total = pieces.iter().map(|p| p.2).sum();
        err = pieces.iter().map(|p| p.3).sum();
    }
    QuadResult {
        value: total,
        error: err,
        intervals: pieces.len(),
    }
}

/// Integrates `f(u, v)` over the triangle `0 < u < v < upper`, with `v` as the
/// outer variable.
///
/// Both coordinates are mapped through `x = upper * t^power`, which turns an
/// integrable `x^(a-1)` singularity at the origin into `t^(power*a - 1)`;
/// choose `power` so that `power * a >= 1` for the smallest shape `a`.
pub fn integrate_lower_triangle<F>(
    mut f: F,
    upper: f64,
    power: f64,
    controls: QuadControls,
) -> QuadResult
where
    F: FnMut(f64, f64) -> f64,
{
    let map = |t: f64| (upper * t.powf(power), upper * power * t.powf(power - 1.0));
    let inner_controls = QuadControls {
        abs_tol: controls.abs_tol * 0.1,
        ..controls
    };
    let mut inner_error = 0.0;
    let outer = integrate(
        |tv| {
            let (v, dv) = map(tv);
            if v <= 0.0 || dv == 0.0 {
                return 0.0;
            }
            let inner = integrate(
                |tu| {
                    let (u, du) = map(tu);
                    if u <= 0.0 || u >= v {
                        return 0.0;
                    }
                    f(u, v) * du
                },
                0.0,
                tv,
                inner_controls,
            );
            inner_error += inner.error * dv;
            inner.value * dv
        },
        0.0,
        1.0,
        controls,
    );
    QuadResult {
        value: outer.value,
        error: outer.error + inner_error.min(f64::MAX),
        intervals: outer.intervals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, QuadControls::default());
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(
            |x| x.powf(-0.5),
            0.0,
            1.0,
            QuadControls {
                abs_tol: 1e-9,
                rel_tol: 1e-12,
                max_intervals: 2000,
            },
        );
        assert!((r.value - 2.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn triangle_area_and_moment() {
        let area = integrate_lower_triangle(|_, _| 1.0, 2.0, 1.0, QuadControls::default());
        assert!((area.value - 2.0).abs() < 1e-12);
        // ∫∫_{0<u<v<1} u v = 1/8
        let m = integrate_lower_triangle(|u, v| u * v, 1.0, 3.0, QuadControls::default());
        assert!((m.value - 0.125).abs() < 1e-10, "{m:?}");
    }

    #[test]
    fn power_map_tames_origin_singularity() {
        // ∫∫_{0<u<v<1} 0.1 u^{-0.9} dv du  = ∫_0^1 0.1 u^{-0.9} (1-u) du = 1 - 0.1/1.1
        let r = integrate_lower_triangle(
            |u, _| 0.1 * u.powf(-0.9),
            1.0,
            20.0,
            QuadControls::default(),
        );
        assert!((r.value - (1.0 - 0.1 / 1.1)).abs() < 1e-8, "{r:?}");
    }
}
