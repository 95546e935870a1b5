//! Spin-½ coupling schemes and Zeeman analysis for positronium-like systems.
//!
//! [`spin_core`] builds product-basis operators, [`coupling`] builds coupled
//! bases along a binary coupling tree, and [`zeeman`] classifies how each
//! coupled state responds to a magnetic field. [`cli`] wraps all of it in a
//! scenario runner.

pub mod cli;
pub mod coupling;
pub mod error;
pub mod half;
pub mod par;
pub mod spin_core;
pub mod zeeman;

pub use error::{Error, Result};
pub use half::HalfInt;
