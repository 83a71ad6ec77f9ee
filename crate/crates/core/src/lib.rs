//! Predicts how well causal structure learning will do on a dataset from its
//! observable characteristics.
//!
//! Synthetic Bayesian networks with known structure are generated across a
//! grid of characteristics ([`synth`], [`grid`]), PC, GES and MMHC are run on
//! them ([`learn`]), the results are scored ([`metrics`]) and pooled into a
//! datasheet with recommendations ([`datasheet`]).
//!
//! Probability tables, sampling, scoring and inference are generic over
//! [`scalar::Real`] (`f32` or `f64`); the aliases below fix the scalar.

pub mod datasheet;
pub mod graph;
pub mod grid;
pub mod learn;
pub mod metrics;
pub mod scalar;
pub mod score;
pub mod special;
pub mod synth;

pub type BayesNet = synth::DiscreteBayesNet<f64>;
pub type BayesNet32 = synth::DiscreteBayesNet<f32>;
pub type Cpt = synth::Cpt<f64>;
pub type Cpt32 = synth::Cpt<f32>;
pub type SyntheticInstance = synth::SyntheticInstance<f64>;
pub type SyntheticInstance32 = synth::SyntheticInstance<f32>;
