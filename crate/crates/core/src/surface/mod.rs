//! Charts and pointwise surface geometry.

pub mod chart;
pub mod frame;
pub mod ops;

pub use chart::{
    builtin_chart, polynomial_chart_from_config, Chart, ChartJet, Cone, Cylinder, Domain, FdChart, GeometryTag,
    Plane, PolynomialMap, Reparametrized, Saddle, SphereCap, BUILTIN_CHARTS,
};
pub use frame::{FrameDerivs, PointFrame, Sym2};
pub use ops::{
    asymptotic_residual, covariant_hessian, covariant_to_ambient, hyperbolic_jet, hyperbolic_z_v, rotate_q,
    rotate_q_in, surface_gradient, AsymptoticResidual, HyperbolicJet, ScalarJet2,
};
