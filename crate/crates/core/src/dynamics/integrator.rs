//! Dormand–Prince 5(4) integration, adaptive and fixed-step.

use nalgebra::SVector;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-11,
            atol: 1e-12,
            max_steps: 200_000,
        }
    }
}

/// Why an adaptive integration stopped early. `t` and `y` hold the last
/// accepted point.
#[derive(Clone, Debug)]
pub struct IntegrationFailure<const N: usize> {
    pub t: f64,
    pub y: SVector<f64, N>,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

struct Stage<const N: usize> {
    y5: SVector<f64, N>,
    err: SVector<f64, N>,
    k7: SVector<f64, N>,
}

fn dp_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &SVector<f64, N>,
    k1: &SVector<f64, N>,
    h: f64,
) -> Stage<N>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let k2 = f(t + C2 * h, &(y + h * (A21 * k1)));
    let k3 = f(t + C3 * h, &(y + h * (A31 * k1 + A32 * k2)));
    let k4 = f(t + C4 * h, &(y + h * (A41 * k1 + A42 * k2 + A43 * k3)));
    let k5 = f(
        t + C5 * h,
        &(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)),
    );
    let k6 = f(
        t + h,
        &(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)),
    );
    let y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(t + h, &y5);
    let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Stage { y5, err, k7 }
}

fn error_norm<const N: usize>(
    err: &SVector<f64, N>,
    y0: &SVector<f64, N>,
    y1: &SVector<f64, N>,
    tol: &Tolerances,
) -> f64 {
    let mut m = 0.0f64;
    for j in 0..N {
        let sc = tol.atol + tol.rtol * y0[j].abs().max(y1[j].abs());
        m = m.max((err[j] / sc).abs());
    }
    m
}

/// Adaptive integration of `y' = f(t, y)` from `t0` to `t1` (`t1 > t0`).
pub fn integrate_adaptive<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: SVector<f64, N>,
    t1: f64,
    tol: &Tolerances,
) -> Result<(SVector<f64, N>, StepStats), IntegrationFailure<N>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let mut stats = StepStats::default();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t0, &y0, &k1, span, tol);
    stats.evaluations += 1;
    let h_min = 1e-12 * span.abs().max(1.0);
    while t < t1 {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(IntegrationFailure {
                t,
                y,
                reason: format!("step limit {} reached", tol.max_steps),
            });
        }
        let last = t + h >= t1 - 1e-12 * span;
        let hs = if last { t1 - t } else { h };
        let stage = dp_step(&mut f, t, &y, &k1, hs);
        stats.evaluations += 6;
        let err = error_norm(&stage.err, &y, &stage.y5, tol);
        if !err.is_finite() || stage.y5.iter().any(|v| !v.is_finite()) {
            if hs <= h_min {
                return Err(IntegrationFailure {
                    t,
                    y,
                    reason: "non-finite derivative".into(),
                });
            }
            h = 0.25 * hs;
            stats.rejected += 1;
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = stage.y5;
            k1 = stage.k7;
            stats.accepted += 1;
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = hs * fac;
        } else {
            stats.rejected += 1;
            h = hs * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            if h < h_min {
                return Err(IntegrationFailure {
                    t,
                    y,
                    reason: format!("step size underflow (h = {h:e} s)"),
                });
            }
        }
    }
    Ok((y, stats))
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t0: f64,
    y0: &SVector<f64, N>,
    f0: &SVector<f64, N>,
    span: f64,
    tol: &Tolerances,
) -> f64
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let scale = |y: &SVector<f64, N>, j: usize| tol.atol + tol.rtol * y[j].abs();
    let d0 = (0..N)
        .map(|j| (y0[j] / scale(y0, j)).powi(2))
        .sum::<f64>()
        .sqrt();
    let d1 = (0..N)
        .map(|j| (f0[j] / scale(y0, j)).powi(2))
        .sum::<f64>()
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span.abs());
    let y1 = y0 + h0 * f0;
    let f1 = f(t0 + h0, &y1);
    let d2 = (0..N)
        .map(|j| ((f1[j] - f0[j]) / scale(y0, j)).powi(2))
        .sum::<f64>()
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span.abs())
}

/// Fixed-step integration with the fifth-order Dormand–Prince weights, using
/// the smallest number of equal steps no longer than `max_step`.
pub fn integrate_fixed<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: SVector<f64, N>,
    t1: f64,
    max_step: f64,
) -> SVector<f64, N>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return y0;
    }
    let n = (span.abs() / max_step).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut y = y0;
    let mut k1 = f(t0, &y);
    for j in 0..n {
        let t = t0 + j as f64 * h;
        let stage = dp_step(&mut f, t, &y, &k1, h);
        y = stage.y5;
        k1 = stage.k7;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector2;

    #[test]
    fn harmonic_oscillator() {
        let f = |_t: f64, y: &Vector2<f64>| Vector2::new(y[1], -y[0]);
        let (y, stats) =
            integrate_adaptive(f, 0.0, Vector2::new(1.0, 0.0), 10.0, &Tolerances::default())
                .unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
        assert!(stats.accepted > 10);
        let y = integrate_fixed(f, 0.0, Vector2::new(1.0, 0.0), 10.0, 0.01);
        assert!((y[0] - 10f64.cos()).abs() < 1e-11);
    }

    #[test]
    fn step_limit_reports_last_state() {
        let f = |_t: f64, y: &Vector2<f64>| Vector2::new(y[1], -y[0]);
        let tol = Tolerances {
            max_steps: 3,
            ..Tolerances::default()
        };
        let fail = integrate_adaptive(f, 0.0, Vector2::new(1.0, 0.0), 100.0, &tol).unwrap_err();
        assert!(fail.t > 0.0 && fail.t < 100.0);
        assert!((fail.y.norm() - 1.0).abs() < 1e-9);
    }
}
