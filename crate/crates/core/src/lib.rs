#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod compress;
pub mod error;
pub mod flags;
pub mod grassmann;
pub mod kernel;
pub mod lattice;
pub mod random;

pub use error::{Error, Result};
