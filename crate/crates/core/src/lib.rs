pub mod analysis;
pub mod calculus;
pub mod chern;
pub mod error;
pub mod flow;
pub mod hopf;
pub mod report;
pub mod tensor;
pub mod verify;

pub use error::{GeometryError, Result};
