//! Time evolution of the system with monitors.
//!
//! The solver advances the spectra of `u` and `η` by classical RK4, with
//! quadratic products formed on the grid and dealiased. Characteristics
//! `q' = u(t, q)` ride along in the same RK4 stages, evaluating the velocity
//! by trigonometric interpolation.

mod record;
mod reports;
mod solver;

pub use record::{
    CharacteristicSample, CharacteristicTrace, HaltReason, InitialQuantities, MonitorSample, RunRecord, Snapshot,
    MONITOR_CSV_HEADER,
};
pub use reports::{
    apriori_bounds_report, conservation_report, energy_series, monotonicity_report, transport_identity_check,
    AprioriReport, ConservationReport, MonotonicityReport, TransportReport, RESOLVED_TAIL,
};
pub use solver::{integrate, rhs, rk4_step, DtPolicy, HaltThresholds, SolverConfig, SystemState};
