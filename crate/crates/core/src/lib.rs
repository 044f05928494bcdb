pub mod circuit;
pub mod error;
pub mod estimation;
pub mod fisher;
pub mod harness;
pub mod noise;
pub mod par;
pub mod qudit;
pub mod seed;
pub mod sqpt;

pub use error::{Error, Result};
