//! Ansatz displacements `y` on hyperbolic, parabolic and elliptic shells, and the assembly of
//! their ambient gradients from the shell decomposition `y = W + wν`.

pub mod affine;
pub mod cutoff;
pub mod elliptic;
pub mod hyperbolic;
pub mod oracle;
pub mod parabolic;
pub mod params;
pub mod sample;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flows::{ConeNet, CylinderNet, NetGeometry, PrincipalNet};
use crate::scalar::Real;
use crate::surface::{builtin_chart, Chart, Domain};

pub use affine::AffineField;
pub use cutoff::{cutoff, radial_cutoff};
pub use elliptic::EllipticAnsatz;
pub use hyperbolic::{HyperbolicAnsatz, HyperbolicParts};
pub use oracle::{fd_gradient, oracle_check, OracleCheck};
pub use parabolic::{ParabolicAnsatz, ParabolicParts};
pub use params::{AnsatzParams, Geometry, ALL_GEOMETRIES};
pub use sample::{
    assemble_ambient_gradient, deformation_at, gradient_identity, identity_residual, p_tensor, symmetric_identity,
    Decomposition, DisplacementSample, SurfaceFields,
};

/// Integration rectangle in Ansatz coordinates. Outside `support_radius` (if any) the Ansatz
/// vanishes identically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region<T> {
    pub lo: [T; 2],
    pub hi: [T; 2],
    /// Axes along which `y` oscillates at the Ansatz frequency.
    pub oscillating: [bool; 2],
    pub support_radius: Option<T>,
}

impl<T: Real> Region<T> {
    pub fn in_support(&self, x: [T; 2]) -> bool {
        self.support_radius.is_none_or(|r| x[0].hypot(x[1]) < r)
    }
}

/// A displacement Ansatz over a shell, evaluated per surface node.
pub trait Ansatz<T: Real>: Send + Sync {
    fn params(&self) -> &AnsatzParams<T>;
    fn chart_name(&self) -> &str;
    fn region(&self) -> Region<T>;
    /// `t`-independent data at Ansatz coordinates `x`.
    fn fields(&self, x: [T; 2]) -> Result<SurfaceFields<T>>;

    fn sample(&self, x: [T; 2], t: T) -> Result<DisplacementSample<T>> {
        self.fields(x)?.sample(t)
    }
}

pub(crate) fn check_support<T: Real>(chart: &dyn Chart<T>, radius: T) -> Result<()> {
    for k in 0..16 {
        let a = T::lit(k as f64 * std::f64::consts::PI / 8.0);
        chart.check_domain([radius * a.cos(), radius * a.sin()])?;
    }
    Ok(())
}

/// Ansatz on a named built-in chart; the parabolic Ansatz uses the closed-form nets on
/// `cylinder` and `cone`.
pub fn builtin_ansatz<T: Real>(chart: &str, params: AnsatzParams<T>) -> Result<Arc<dyn Ansatz<T>>> {
    if params.geometry == Geometry::Parabolic {
        let (a, e) = (params.half_length, params.epsilon);
        let net: Option<Arc<dyn NetGeometry<T>>> = match chart {
            "cylinder" => Some(Arc::new(CylinderNet { p0: [T::zero(); 2], a, epsilon: e })),
            "cone" => Some(Arc::new(ConeNet { p0: [T::one(), T::zero()], a, epsilon: e })),
            _ => None,
        };
        if let Some(net) = net {
            return Ok(Arc::new(ParabolicAnsatz::new(net, params)?));
        }
    }
    let c = builtin_chart::<T>(chart).ok_or_else(|| Error::Config(format!("unknown chart `{chart}`")))?;
    ansatz_on_chart(c, params)
}

/// Ansatz on an arbitrary chart. The parabolic case builds a numerical principal net around the
/// center of the chart domain.
pub fn ansatz_on_chart<T: Real>(chart: Arc<dyn Chart<T>>, params: AnsatzParams<T>) -> Result<Arc<dyn Ansatz<T>>> {
    Ok(match params.geometry {
        Geometry::Hyperbolic => Arc::new(HyperbolicAnsatz::new(chart, params)?),
        Geometry::Elliptic => Arc::new(EllipticAnsatz::new(chart, params)?),
        Geometry::Parabolic => {
            let p0 = match chart.domain() {
                Domain::Rect { lo, hi } => [T::lit(0.5) * (lo[0] + hi[0]), T::lit(0.5) * (lo[1] + hi[1])],
                Domain::Disk { center, .. } => center,
            };
            let net = PrincipalNet::build(chart, p0, params.half_length, params.epsilon)?;
            Arc::new(ParabolicAnsatz::new(Arc::new(net), params)?)
        }
    })
}
