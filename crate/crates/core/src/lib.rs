//! Thin-shell rigidity: Ansatz deformations on hyperbolic, parabolic and elliptic shells, their
//! energies over a thickness sweep, and fitted scaling exponents.

pub mod ansatz;
pub mod config;
pub mod error;
pub mod fd;
pub mod flows;
pub mod jet;
pub mod lemmas;
pub mod linalg3;
pub mod rigidity;
pub mod scalar;
pub mod scaling;
pub mod shell;
pub mod surface;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec3d = linalg3::Vec3<f64>;
pub type Mat3d = linalg3::Mat3<f64>;
pub type Vec3f = linalg3::Vec3<f32>;
pub type Mat3f = linalg3::Mat3<f32>;
pub type PointFramed = surface::PointFrame<f64>;
