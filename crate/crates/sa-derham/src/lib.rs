pub mod bundle;
pub mod chain;
pub mod checks;
pub mod cohomology;
pub mod complex;
pub mod continuous;
pub mod error;
pub mod extension;
pub mod function;
pub mod geometry;
pub mod homotopy;
pub mod integrate;
pub mod mayer_vietoris;
pub mod minimal;
pub mod pa;
pub mod poly;
pub mod quadrature;
pub mod random;
pub mod rational;
pub mod ratfn;

pub use error::{Error, Result};
