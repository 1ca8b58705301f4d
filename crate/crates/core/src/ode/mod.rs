pub mod dopri;
pub mod rhs;
pub mod series;
pub mod solver;

pub use rhs::{chart_switch, chart_switch_back, rhs_chart_a, rhs_chart_b, rhs_kappa, ChartAState, ChartBState};
pub use series::{series_residual, series_residual_with, series_start};
pub use solver::{integrate, AbortReason, Event, EventKind, EventState, SolverConfig, Status, Trajectory};
