use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::GeometryTag;

/// Curvature regime of a shell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

pub const ALL_GEOMETRIES: [Geometry; 3] = [Geometry::Hyperbolic, Geometry::Parabolic, Geometry::Elliptic];

impl Geometry {
    /// Expected exponent of `‖∇u − I‖² / ‖dist(∇u, SO(3))‖²` in `1/h`.
    pub fn target_exponent(self) -> f64 {
        match self {
            Geometry::Hyperbolic => 4.0 / 3.0,
            Geometry::Parabolic => 1.5,
            Geometry::Elliptic => 1.0,
        }
    }

    /// `τ` must be strictly above this.
    pub fn tau_threshold(self) -> f64 {
        self.target_exponent()
    }

    /// `φ = h^{-e}`.
    pub fn frequency_exponent(self) -> f64 {
        match self {
            Geometry::Hyperbolic => 1.0 / 3.0,
            Geometry::Parabolic => 0.25,
            Geometry::Elliptic => 0.5,
        }
    }

    pub fn default_tau(self) -> f64 {
        match self {
            Geometry::Hyperbolic => 5.0 / 3.0,
            Geometry::Parabolic => 1.75,
            Geometry::Elliptic => 1.5,
        }
    }

    /// Second exponent used for the τ-independence check.
    pub fn alternate_tau(self) -> f64 {
        match self {
            Geometry::Hyperbolic => 2.0,
            Geometry::Parabolic => 1.9,
            Geometry::Elliptic => 2.0,
        }
    }

    pub fn default_chart(self) -> &'static str {
        match self {
            Geometry::Hyperbolic => "saddle",
            Geometry::Parabolic => "cylinder",
            Geometry::Elliptic => "sphere-cap",
        }
    }

    /// Chart tag the Ansatz requires.
    pub fn chart_tag(self) -> GeometryTag {
        match self {
            Geometry::Hyperbolic => GeometryTag::HyperbolicAsymptotic,
            Geometry::Parabolic => GeometryTag::ParabolicPrincipal,
            Geometry::Elliptic => GeometryTag::Elliptic,
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Hyperbolic => "hyperbolic",
            Geometry::Parabolic => "parabolic",
            Geometry::Elliptic => "elliptic",
        })
    }
}

impl FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" => Ok(Geometry::Hyperbolic),
            "parabolic" => Ok(Geometry::Parabolic),
            "elliptic" => Ok(Geometry::Elliptic),
            other => Err(Error::Config(format!("unknown geometry `{other}`"))),
        }
    }
}

pub const DEFAULT_DELTA: f64 = 0.25;
pub const DEFAULT_EPSILON: f64 = 0.5;
pub const DEFAULT_HALF_LENGTH: f64 = 0.8;

/// Parameters of one Ansatz evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnsatzParams<T> {
    pub geometry: Geometry,
    pub h: T,
    pub tau: T,
    /// Cutoff plateau radius; the support radius is `2δ` (hyperbolic, elliptic).
    pub delta: T,
    /// Half-width of the parabolic strip in `x₂`; plateau `ε/2`.
    pub epsilon: T,
    /// Half-length of the parabolic strip along the flat direction.
    pub half_length: T,
}

impl<T: Real> AnsatzParams<T> {
    pub fn new(geometry: Geometry, h: T) -> Self {
        AnsatzParams {
            geometry,
            h,
            tau: T::lit(geometry.default_tau()),
            delta: T::lit(DEFAULT_DELTA),
            epsilon: T::lit(DEFAULT_EPSILON),
            half_length: T::lit(DEFAULT_HALF_LENGTH),
        }
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_h(mut self, h: T) -> Self {
        self.h = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > T::zero() && self.h.is_finite()) {
            return Err(Error::Precondition(format!("h = {} must be positive", self.h)));
        }
        let th = self.geometry.tau_threshold();
        if !(self.tau.as_f64() > th) {
            return Err(Error::Precondition(format!(
                "τ = {} must exceed {:.4} for the {} Ansatz",
                self.tau, th, self.geometry
            )));
        }
        for (name, v) in [("delta", self.delta), ("epsilon", self.epsilon), ("half_length", self.half_length)] {
            if !(v > T::zero()) {
                return Err(Error::Precondition(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Oscillation frequency `φ`.
    pub fn frequency(&self) -> T {
        self.h.powf(-T::lit(self.geometry.frequency_exponent()))
    }

    /// `h^τ`.
    pub fn scale(&self) -> T {
        self.h.powf(self.tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_and_frequencies() {
        for g in ALL_GEOMETRIES {
            let p = AnsatzParams::<f64>::new(g, 1e-3);
            p.validate().unwrap();
            assert!(p.with_tau(g.tau_threshold()).validate().is_err());
            assert!(p.with_tau(g.alternate_tau()).validate().is_ok());
            assert_eq!(g.to_string().parse::<Geometry>().unwrap(), g);
        }
        let p = AnsatzParams::<f64>::new(Geometry::Hyperbolic, 1e-3);
        assert!((p.frequency() - 10.0).abs() < 1e-12);
        let p = AnsatzParams::<f64>::new(Geometry::Parabolic, 1e-4);
        assert!((p.frequency() - 10.0).abs() < 1e-12);
        let p = AnsatzParams::<f64>::new(Geometry::Elliptic, 1e-4);
        assert!((p.frequency() - 100.0).abs() < 1e-10);
        assert!(AnsatzParams::<f64>::new(Geometry::Elliptic, 0.0).validate().is_err());
        assert!("flat".parse::<Geometry>().is_err());
    }
}
