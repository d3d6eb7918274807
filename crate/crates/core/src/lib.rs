pub mod error;
pub mod lattice;
pub mod polytope;
pub mod solver;
pub mod startsys;
pub mod system;
pub mod toric;
pub mod tracker;

pub use error::{Error, Result};
