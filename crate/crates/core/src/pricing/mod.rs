//! Transform pricing: Black-Scholes in total-volatility terms, damped
//! Fourier prices and tail probabilities, smile and tail curves.

pub mod curves;
pub mod fourier;
pub mod normal;
pub mod wings;

pub use curves::*;
pub use fourier::*;
pub use normal::*;
pub use wings::*;
