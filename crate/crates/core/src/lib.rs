//! Finite reflection groups, singular invariant differential operators and
//! a grid harness for comparing convex hulls of supports.

pub mod catalog;
pub mod cli;
pub mod convexgeo;
pub mod diffop;
pub mod error;
pub mod linalg;
pub mod rootsys;
pub mod verify;

pub use error::{Error, Result};

/// Version tag carried by every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;
