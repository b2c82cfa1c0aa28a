#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
pub mod estimate;
pub mod kriging;
pub mod mcmc;
pub mod normal;
pub mod pipeline;
pub mod problem;
pub mod refine;
pub mod rng;
pub mod surrogate;

pub use error::{Error, Result};
