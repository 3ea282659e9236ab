//! The growth dynamics: clock realisations, the jump rule, the exact
//! variational oracle and coupled runs.

pub mod coupling;
pub mod dynamics;
pub mod events;
pub mod oracle;

pub use coupling::{couple_monotone, dependence_region, localized_difference, propagation_box, propagation_check, Checkpoints, CouplingError, OrderingReport, PropagationOutcome};
pub use dynamics::{inflow_room, simulate, step, Probes, Sample, SimError, SimOptions, StepOutcome, Trajectory};
pub use events::{generate_events, Event, EventError, EventStream};
pub use oracle::{variational_oracle, OracleError};
