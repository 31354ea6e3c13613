//! Soft best-response equilibria for finite games.
//!
//! Players raise their expected returns to a selfishness level `alpha` and play
//! the normalized result. `alpha = 0` is indifference, `alpha -> inf` is strict
//! best response (Nash), and `alpha = 2` in continuous time is an imaginary-time
//! Schrödinger flow. The crate provides:
//!
//! - [`game`], [`schema`], [`transform`]: normal-form and pairwise graphical games,
//!   their JSON format, and the positive utility transforms that drive the dynamics;
//! - [`dynamics`]: the soft-response map, fixed-point search and alpha sweeps;
//! - [`nash`]: best-response dynamics, pure-Nash enumeration and bimatrix support enumeration;
//! - [`quantum`]: imaginary-time integration to stationary states;
//! - [`society`]: random pairwise-payoff societies with factorized expected returns;
//! - [`experiment`]: reproducible runs that write CSV, JSON summaries, manifests and SVG plots.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod game;
pub mod nash;
pub mod profile;
pub mod quantum;
pub mod schema;
pub mod seed;
pub mod society;
pub mod transform;

pub use dynamics::{
    epsilon_gap, find_equilibrium, soft_response_step, sweep_alpha, Alpha, AlphaLevel,
    DynamicsConfig, EquilibriumReport, SweepTable, UpdateOrder,
};
pub use error::{Error, Result};
pub use game::{
    overall_payoff, per_player_expected_payoff, GraphicalGame, NormalFormGame, PayoffModel,
};
pub use nash::{
    best_response_dynamics, enumerate_pure_nash, support_enumeration_mixed_nash,
    verify_epsilon_nash, OutcomeKind, PureOutcome,
};
pub use profile::StrategyProfile;
pub use quantum::{
    effective_field, eigen_residual, evolve_to_stationary, imaginary_time_step, QuantumConfig,
    StationaryReport, WavefunctionState,
};
pub use society::{
    generate_society, local_action_values, society_equilibrium_sample, SocietyRun, SocietySpec,
    SocietyView,
};
pub use transform::{
    expected_action_values, transform_utilities, UtilityModel, UtilityTransform, UtilityView,
};
