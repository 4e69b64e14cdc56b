//! Configurable-precision evaluation: the binary float type, zeta values and
//! polylogarithms, the series `S_n(z)`, integer linear forms and the
//! Monte-Carlo check of the integral representation.

pub mod integral;
pub mod linear_form;
pub mod real;
pub mod series_sum;
pub mod zeta;

pub use integral::{mc_integral, McEstimate};
pub use linear_form::{
    build_linear_form, verify_form_json, verify_identity_at_z, FormJson, IntegerLinearForm,
};
pub use real::PrecisionReal;
pub use series_sum::eval_s;
pub use zeta::{polylog, zeta_odd};
