pub mod error;
pub mod fock;
pub mod holospace;
pub mod io;
pub mod quadrature;
pub mod quantize;
pub mod scale;
pub mod selftest;
pub mod su2;
pub mod symbol;
pub mod transform;

pub use error::{Error, Result};
pub use scale::PlanckScale;
