//! Fixed-step classical fourth-order Runge–Kutta.

use alloc::vec::Vec;

/// One RK4 step of `y' = f(t, y)` from `t` to `t + h` (`h` may be negative).
/// `f` receives the stage time together with the step endpoints.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(f64, &[f64], (f64, f64)) -> Vec<f64>,
{
    let span = (t, t + h);
    let shifted = |y: &[f64], k: &[f64], s: f64| y.iter().zip(k).map(|(a, b)| a + s * b).collect::<Vec<_>>();
    let k1 = f(t, y, span);
    let k2 = f(t + 0.5 * h, &shifted(y, &k1, 0.5 * h), span);
    let k3 = f(t + 0.5 * h, &shifted(y, &k2, 0.5 * h), span);
    let k4 = f(t + h, &shifted(y, &k3, h), span);
    y.iter()
        .enumerate()
        .map(|(i, yi)| yi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}
