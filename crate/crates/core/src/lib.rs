pub mod cone;
pub mod error;
pub mod exact;
pub mod normgeom;
pub mod polyhedron;
pub mod verdict;

pub use error::{MonoError, Result};
pub use normgeom::{GraphPoint, NormSpec};
pub mod opmodel;
pub mod monocheck;
pub mod resolvent;
pub mod vardiff;
pub mod catalog;
pub mod cli;
