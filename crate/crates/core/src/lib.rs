//! Stylistic segmentation analysis: a smoothed word log-odds classifier feeds
//! per-word evidence into PELT, and the variance-normalized penalty at which a
//! document stops segmenting measures how clumped its LLM-attributed language is.

pub mod changepoint;
pub mod classifier;
pub mod config;
pub mod corpus;
pub mod pipeline;
pub mod plot;
pub mod regen;
pub mod stats;
pub mod synth;
