pub mod arith;
pub mod assemble;
pub mod benefit;
pub mod cache;
pub mod cli;
pub mod error;
pub mod gfunction;
pub mod oracle;
pub mod primes;
pub mod real;
pub mod superchampion;

pub use arith::PrimeFraction;
pub use assemble::{Landau, LandauResult};
pub use error::{LandauError, Result};
pub use gfunction::{GFraction, GSolver};
pub use primes::PrimeTable;
