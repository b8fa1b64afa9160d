//! Closed-loop simulation of haptic shared control for remote driving.
//!
//! A human operator and a path-tracking autonomy share a steering wheel.
//! The operator torque and the autonomy torque are blended through an
//! assistance level that adapts to the operator's estimated visual workload
//! (a gaze-driven hidden Markov model classifier) and to how hard the
//! operator is currently steering. The crate provides the plant model, the
//! trajectory optimizer, the torque pipeline, the workload estimator, a
//! scripted operator, and a scenario/experiment harness around them.

pub mod config;
pub mod experiment;
pub mod filter;
pub mod gaze;
pub mod haptic;
pub mod hmm;
pub mod operator;
pub mod optimize;
pub mod pid;
pub mod planner;
pub mod scenario;
pub mod track;
pub mod vehicle;
pub mod wheel;
