pub mod clifford;
pub mod error;
pub mod fkm;
pub mod focal;
pub mod geometry;
pub mod record;
pub mod report;
pub mod rng;
pub mod willmore;

pub use error::{Error, Result};
