pub mod config;
pub mod error;
pub mod experiments;
pub mod group;
pub mod hac;
pub mod io;
pub mod mac;
pub mod numeric;
pub mod dgp;
pub mod empirical;
pub mod quadrature;
pub mod rng;
pub mod series;
pub mod special;
pub mod tail;

pub use error::{Error, Result};
