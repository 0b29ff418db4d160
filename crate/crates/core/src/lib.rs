//! Exact polyhedral representation conversion up to symmetry.
pub mod cascade;
pub mod conemodel;
pub mod corpus;
pub mod decomp;
pub mod error;
pub mod exactlin;
pub mod faceset;
pub mod orbits;
pub mod permgrp;
pub mod pivotsym;
pub mod symdetect;

pub use error::{Error, Result};
pub use faceset::FaceSet;
