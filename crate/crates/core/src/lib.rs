//! Numerical and exact checks for explicit gravitational instanton
//! constructions: Gibbons–Hawking metrics, hyperkähler triples, the flat
//! deformation operator, decay exponents, singular fibers, twistor
//! spectral curves and period maps.

pub mod asymptotics;
pub mod cli;
pub mod deformation;
pub mod error;
pub mod geometry;
pub mod gibbons_hawking;
pub mod kodaira;
pub mod poly;
pub mod torelli;
pub mod twistor;

pub use error::{Error, Result};
