//! File formats, seeded generators and experiment drivers around
//! [`tracial_core`].

pub mod formats;
pub mod harness;
