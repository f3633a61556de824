//! Descent phases, the tunneling flow and the loop that alternates them.

mod config;
mod descent;
mod flow;
mod oracle;
mod run;

pub use config::{Clamp, DescentKind, TunnelConfig, MIN_DISTANCE};
pub use descent::{
    descend, estimate_lambda, fista_descent, gradient_descent, DescentTrace, Iterate, StablePoint,
    P_FLOOR,
};
pub use flow::{
    energy_function, penalty_factor, pole_factor, random_direction, same_state, tunnel_flow,
    FlowStatus, FlowStep, TunnelOutcome,
};
pub use oracle::{
    CostOracle, DistanceMeasure, Euclidean, Evaluation, FnOracle, HilbertSchmidt, StateToken,
    VqeOracle,
};
pub use run::{dynamic_tunneling, Phase, Termination, TraceRecord, TunnelAttempt, TunnelRun};
