//! Exact verification of the weighted FC condition for union-closed families.

pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod poonen;
pub mod rational;
pub mod ratlp;
pub mod setfam;

pub use error::{Error, Result};
