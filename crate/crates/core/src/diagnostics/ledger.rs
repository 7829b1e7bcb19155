use crate::spectral::{
    divergence_defect, gradient_sq, l2_norm, weighted_pairing, SpectralField, VectorField,
    ViscosityParams,
};

/// Energy bookkeeping of a run, one entry per recorded time.
///
/// `visc_dissip = 2 (Vu, u) = 2 (D(u) - |u|^2)` and `work = 2 Re (f, u)`;
/// the `_cum` columns are their trapezoid integrals from the first entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub l2_sq: Vec<f64>,
    pub dirichlet: Vec<f64>,
    pub visc_dissip: Vec<f64>,
    pub work: Vec<f64>,
    pub visc_dissip_cum: Vec<f64>,
    pub work_cum: Vec<f64>,
    /// `|div u| / |u|`.
    pub div_residual: Vec<f64>,
    /// `|Au|^2 + |A*u|^2 = |grad u|^2`.
    pub grad_sq: Vec<f64>,
    /// `|f|^2`.
    pub forcing_sq: Vec<f64>,
}

impl EnergyLedger {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn record(&mut self, t: f64, u: &VectorField, f: Option<&VectorField>, visc: &ViscosityParams) {
        let grid = u.grid().clone();
        let l2 = l2_norm(u).powi(2);
        let d = weighted_pairing(u, u, |i| 1.0 + visc.symbol(grid.k2(i)));
        let dissip = 2.0 * (d - l2);
        let (work, fsq) = match f {
            Some(f) => (
                2.0 * weighted_pairing(f, u, |_| 1.0),
                weighted_pairing(f, f, |_| 1.0),
            ),
            None => (0.0, 0.0),
        };
        let (dcum, wcum) = match self.times.last() {
            Some(&t0) => {
                let h = t - t0;
                let n = self.times.len() - 1;
                (
                    self.visc_dissip_cum[n] + 0.5 * h * (self.visc_dissip[n] + dissip),
                    self.work_cum[n] + 0.5 * h * (self.work[n] + work),
                )
            }
            None => (0.0, 0.0),
        };
        self.times.push(t);
        self.l2_sq.push(l2);
        self.dirichlet.push(d);
        self.visc_dissip.push(dissip);
        self.work.push(work);
        self.visc_dissip_cum.push(dcum);
        self.work_cum.push(wcum);
        self.div_residual.push(divergence_defect(u));
        self.grad_sq.push(gradient_sq(u));
        self.forcing_sq.push(fsq);
    }

    /// Largest spacing between consecutive entries.
    pub fn max_step(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, taylor_green};

    #[test]
    fn taylor_green_entries() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let visc = ViscosityParams::new(1.0, 0.1, 1, 2).unwrap();
        let tg = taylor_green(&g, 1.0);
        let mut l = EnergyLedger::default();
        l.record(0.0, &tg, None, &visc);
        l.record(0.5, &tg, Some(&tg), &visc);
        let pi2 = 4.0 * std::f64::consts::PI.powi(2);
        // |TG|^2 = 2 pi^2, sigma = 2 nu + 2 eps = 2.2 on the |k|^2 = 2 shell
        let e = 0.5 * pi2;
        assert!((l.l2_sq[0] - e).abs() < 1e-12);
        assert!((l.dirichlet[0] - 3.2 * e).abs() < 1e-12);
        assert!((l.visc_dissip[0] - 4.4 * e).abs() < 1e-12);
        assert!((l.grad_sq[0] - 2.0 * e).abs() < 1e-12);
        assert!((l.work[1] - 2.0 * e).abs() < 1e-12);
        assert!((l.forcing_sq[1] - e).abs() < 1e-12);
        assert!((l.visc_dissip_cum[1] - 2.2 * e).abs() < 1e-12);
        assert!((l.work_cum[1] - 0.5 * e).abs() < 1e-12);
        assert!(l.dirichlet.iter().zip(&l.l2_sq).all(|(d, e)| d >= e));
        assert_eq!(l.max_step(), 0.5);
    }
}
