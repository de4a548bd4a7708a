//! Geodesics, flat directions and principal coordinate nets on parabolic patches.

pub mod geodesic;
pub mod net;

pub use geodesic::{
    flat_direction, flat_geodesic, geodesic_flow, normal_variation, straightness_deviation, CurveTrace, DEFAULT_STEPS,
};
pub use net::{ConeNet, CylinderNet, NetGeometry, NetPoint, PrincipalNet};
