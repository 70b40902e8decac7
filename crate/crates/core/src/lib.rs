//! Pure exploration in misspecified linear bandits.
//!
//! Observations are noiseless, `y = f*(x)`, while the learner only knows that
//! some `theta` in the unit ball predicts every reward within `epsilon`. The
//! crate provides instance generators with misspecification certificates,
//! the confidence-set geometry (relaxed and exact widths), a width-maximizing
//! agent with simple baselines, and a sweep/regime harness.
//!
//! ```
//! use misspec_bandit::{gen_realizable_instance, run_episode, AgentConfig};
//!
//! let inst = gen_realizable_instance(50, 4, 0.01, 7).unwrap();
//! let cfg = AgentConfig::new(inst.epsilon, 0.25, inst.n_actions);
//! let trace = run_episode(&inst, &cfg).unwrap();
//! assert!(trace.stopped);
//! assert_eq!(trace.recommendation_optimal, Some(true));
//! ```

// Parameter guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod instances;
pub mod linalg;
pub mod numfmt;
pub mod rng;
pub mod verify;

pub use agent::baseline::{run_baseline, BaselineKind};
pub use agent::{min_tolerance, recommend, run_episode, trial_bound, AgentConfig, Round, Trace, WidthMode};
pub use error::{Error, Result};
pub use geometry::{ConfidenceState, ExactWidthSolver, FixedRidge, Observation, WidthReport};
pub use harness::{classify_regime, regime_map, run_sweep, AgentSpec, RegimeCell, SweepResult, SweepSpec};
pub use instances::{
    certify_misspecification, gen_needle_instance, gen_realizable_instance, min_misspec_oracle, required_dim, Instance,
    InstanceKind, MisspecCertificate,
};
