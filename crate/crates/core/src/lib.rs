//! Wing asymptotics of implied volatility for models specified through their
//! moment generating function.

pub mod asymptotics;
pub mod clocks;
pub mod desk;
pub mod diagnostics;
pub mod error;
pub mod levy;
pub mod model;
pub mod pricing;
pub mod quadrature;
pub mod roots;
pub mod time_change;

pub use asymptotics::*;
pub use clocks::*;
pub use diagnostics::*;
pub use error::{Error, Result};
pub use levy::*;
pub use model::*;
pub use num_complex::Complex64;
pub use pricing::*;
pub use time_change::*;
