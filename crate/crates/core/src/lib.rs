//! Finite-volume simulation of the chemotaxis system with indirect signal
//! production
//!
//! ```text
//! u_t = eps Δu − ∇·(u∇v) + r u − mu u^theta
//!   0 = d1 Δv − beta v + alpha w
//!   0 = d2 Δw − delta w + gamma u
//! ```
//!
//! on rectangles with zero-flux boundaries, including the hyperbolic limit
//! `eps = 0`, together with the monitors and sweep experiments used to study
//! blow-up, vanishing viscosity and transient growth.

// `!(x > 0.0)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod experiments;
pub mod model;
pub mod output;

mod stencil;

pub use config::{parse_config, Mode, RunConfig};
pub use diagnostics::{
    bernoulli_envelope_fit, blowup_time_bound, check_mean_bound, fit_bernoulli, record,
    BlowupBoundInputs, DiagnosticsConfig, DiagnosticsRecord, EnvelopeFit,
};
pub use dynamics::{
    advance, advection_divergence, reaction_update, run, step, RunReport, RunVerdict, SignalModel,
    SimState, Simulation, StepConfig, StepOutcome, StepVerdict,
};
pub use elliptic::{residual, solve_helmholtz, solve_signals, HelmholtzProblem, Preconditioner, SolveConfig};
pub use error::{Error, Result};
pub use experiments::{
    ar_crosscheck, run_sweep, threshold_map, transient_growth, viscosity_vanishing, SweepResult,
    SweepRow, SweepSpec, SweepVariable, U0Spec,
};
pub use model::{ar_reduce, m1, make_bump, validate_params, ARParams, Field, Grid, Params};

/// Version string stamped into run headers.
pub const VERSION: &str = concat!("chemotaxis-core ", env!("CARGO_PKG_VERSION"));
