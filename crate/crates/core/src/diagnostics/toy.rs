//! Scalar model of the singular limit: `eps u' + u = 1`, `u(0) = u0`, whose
//! solution `(u0 - 1) exp(-t/eps) + 1` tends to the reduced solution `1` away
//! from `t = 0` but never uniformly unless `u0 = 1`.

use crate::error::{Error, Result};

fn check(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "epsilon must be > 0, got {epsilon}"
        )))
    }
}

/// `u_eps(t)` at every entry of `times`.
pub fn toy_perturbation(u0: f64, epsilon: f64, times: &[f64]) -> Result<Vec<f64>> {
    check(epsilon)?;
    Ok(times
        .iter()
        .map(|&t| (u0 - 1.0) * (-t / epsilon).exp() + 1.0)
        .collect())
}

/// `u_eps(t) - 1`, evaluated without cancellation.
pub fn toy_deviation(u0: f64, epsilon: f64, t: f64) -> Result<f64> {
    check(epsilon)?;
    Ok((u0 - 1.0) * (-t / epsilon).exp())
}

/// `sup |u_eps(t) - 1|` over the entries of `times` with `t >= from`.
pub fn toy_distance(u0: f64, epsilon: f64, times: &[f64], from: f64) -> Result<f64> {
    check(epsilon)?;
    times
        .iter()
        .filter(|&&t| t >= from)
        .map(|&t| toy_deviation(u0, epsilon, t).map(f64::abs))
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        for eps in [1.0, 0.1, 1e-3] {
            assert!(toy_perturbation(1.0, eps, &times)
                .unwrap()
                .iter()
                .all(|&u| u == 1.0));
            assert_eq!(toy_distance(2.0, eps, &times, 0.0).unwrap(), 1.0);
        }
        let d = toy_deviation(2.0, 0.01, 0.1).unwrap();
        assert!((d - (-10.0f64).exp()).abs() < 1e-15);
        let u = toy_perturbation(2.0, 0.01, &[0.1]).unwrap()[0];
        assert!((u - 1.0 - (-10.0f64).exp()).abs() < 1e-15);
        // Interior distance on [0.5, 1] vanishes as eps -> 0.
        let a = toy_distance(2.0, 0.1, &times, 0.5).unwrap();
        let b = toy_distance(2.0, 0.05, &times, 0.5).unwrap();
        assert!(b < a && b < 1e-4);
        assert!(toy_perturbation(2.0, 0.0, &times).is_err());
    }
}
