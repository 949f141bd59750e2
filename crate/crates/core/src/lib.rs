//! Technology-change forecasting: exponential performance fits, crossover
//! and knee detection, distribution-cost models and adoption shares.

pub mod adoption;
pub mod cost;
pub mod datasets;
pub mod error;
pub mod gml;
pub mod plot;
pub mod series;
pub mod sweep;

pub use error::{Error, Result};
pub use series::{AnnualSeries, Unit};
