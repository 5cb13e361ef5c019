//! Time-series data augmentation: magnitude, time and frequency transforms,
//! DTW-based pattern mixing, EMD recombination, class-aware dataset expansion
//! and a deterministic 1-NN benchmark harness.
//!
//! Every stochastic operation draws from a [`rng::RandomStream`] keyed by
//! `(seed, sample, copy, method)`, so results do not depend on scheduling.

pub mod bench;
pub mod cli;
pub mod dtw;
pub mod emd;
pub mod error;
pub mod freq;
pub mod pattern;
pub mod pipeline;
pub mod rng;
pub mod series;
pub mod spline;
pub mod transform;

pub use error::{Error, Result};
pub use pipeline::{expand, expand_with_jobs, list_methods, AugmentSpec, Method, MethodConfig, RunLog};
pub use rng::{Lane, RandomStream};
pub use series::{Dataset, Label, LabeledSeries, Split, TimeSeries};
