//! Exact and high-precision construction of rational linear forms in `1`
//! and odd zeta values, with the linear-independence dimension bounds they
//! yield.

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod partial_fractions;
pub mod precision;
pub mod series;

pub use error::{Error, Result};
pub use exact::{lcm_upto, pochhammer, ExactRational};
pub use partial_fractions::{decompose, FormParams, PartialFractionTable};
pub use series::TruncatedSeries;
