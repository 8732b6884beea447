//! Grid path planning for field irrigation cruises.
//!
//! An ant colony optimizer proposes routes across a crop map, and a Bayesian step
//! model reweights each move by unexplored area, drought and nearby obstacles.
//! Repeated cruises water the field and track coverage round by round.
//!
//! Start with [`grid::parse_map`], plan with [`aco::optimize`] or
//! [`planner::run_cruises`], and compare arms with [`harness::run_experiment`].

pub mod aco;
pub mod bayes;
pub mod cli;
pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod planner;
pub mod render;
pub mod rng;
