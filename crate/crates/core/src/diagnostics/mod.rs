//! Energy bookkeeping and executable versions of the energy inequality, the
//! uniform a priori bound, Gronwall's lemma, Ladyzhenskaya-class norms, the
//! `eps -> 0` sweep and the scalar boundary-layer model.

mod estimates;
mod ledger;
mod sweep;
mod toy;

pub use estimates::{
    check_apriori_bound, check_energy_estimate, gronwall_bound, in_ladyzhenskaya_class,
    ladyzhenskaya_norm, quadrature_tolerance, AprioriReport, EnergyReport, GronwallBound,
    LadyzhenskayaReport,
};
pub use ledger::EnergyLedger;
pub use sweep::{epsilon_sweep, trajectory_difference, SweepResult};
pub use toy::{toy_deviation, toy_distance, toy_perturbation};
