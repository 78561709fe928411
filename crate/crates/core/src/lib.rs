//! Identification of linear forms in independent random variables on finite
//! abelian groups and on a-adic solenoids, through characteristic functions.

pub mod campaign;
pub mod dist;
pub mod endo;
pub mod error;
pub mod fixture;
pub mod funceq;
pub mod group;
pub mod identify;
pub mod solenoid;

pub use dist::{Distribution, LinearFormSpec};
pub use endo::{annihilator, Endo};
pub use error::{Error, Result};
pub use group::{Element, Group};
