//! Adaptive Dormand-Prince 5(4) for complex state vectors.

use crate::spectral::C64;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t1` in place. `h` carries the step
/// size across calls (pass the value from the previous call to continue).
pub fn dopri5(
    mut f: impl FnMut(f64, &[C64], &mut [C64]),
    t0: f64,
    t1: f64,
    y: &mut [C64],
    h: &mut f64,
    rtol: f64,
    atol: f64,
) -> OdeStats {
    let n = y.len();
    let mut stats = OdeStats::default();
    let mut k = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut t = t0;
    if *h <= 0.0 || !h.is_finite() {
        *h = (t1 - t0) * 1e-2;
    }
    f(t, y, &mut k[0]);
    stats.evaluations += 1;
    while t1 - t > 1e-14 * t1.abs().max(1.0) {
        let step = h.min(t1 - t);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += kj[i] * (step * A[s][j]);
                }
                tmp[i] = acc;
            }
            let (_, tail) = k.split_at_mut(s);
            f(t + C[s] * step, &tmp, &mut tail[0]);
            stats.evaluations += 1;
        }
        // tmp now holds the fifth-order solution (stage 7 argument).
        let mut err = 0.0;
        for i in 0..n {
            let mut e = C64::new(0.0, 0.0);
            for (s, ks) in k.iter().enumerate() {
                e += ks[i] * (step * E[s]);
            }
            let sc = atol + rtol * y[i].norm().max(tmp[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if err <= 1.0 {
            t += step;
            y.copy_from_slice(&tmp);
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
            stats.accepted += 1;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // Keep the proposal from a truncated final step.
            if step == *h {
                *h = step * fac;
            } else {
                *h = h.max(step * fac);
            }
        } else {
            stats.rejected += 1;
            *h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_decay_and_rotation() {
        // y' = (-0.5 + 2i) y
        let lam = C64::new(-0.5, 2.0);
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut h = 0.0;
        let stats = dopri5(
            |_, y, dy| dy[0] = lam * y[0],
            0.0,
            3.0,
            &mut y,
            &mut h,
            1e-12,
            1e-12,
        );
        let exact = (lam * 3.0).exp();
        assert!((y[0] - exact).norm() < 1e-10);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn fifth_order_convergence_on_nonautonomous() {
        // y' = cos(t) y, y = exp(sin t)
        let run = |tol: f64| {
            let mut y = vec![C64::new(1.0, 0.0)];
            let mut h = 0.0;
            dopri5(
                |t, y, dy| dy[0] = y[0] * t.cos(),
                0.0,
                2.0,
                &mut y,
                &mut h,
                tol,
                tol,
            );
            (y[0].re - 2f64.sin().exp()).abs()
        };
        assert!(run(1e-6) < 1e-5);
        assert!(run(1e-12) < 1e-10);
    }
}
