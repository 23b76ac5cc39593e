//! Physical parameters, system selection and validation.
//!
//! This module is the single source of truth for every constant appearing in
//! the two transmission systems and their energies. Component 1 is a string
//! (wave equation) on `(0, ell1)`, component 2 is a beam (fourth-order
//! equation) on `(0, ell2)`; they share the interface at `x = 0`. Exactly one
//! component carries a Cattaneo heat pair `(theta, q)`.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which component carries the heat conduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemKind {
    /// Thermoelastic string coupled to a purely elastic beam.
    S1ThermoStringElasticBeam,
    /// Purely elastic string coupled to a thermoelastic beam.
    S2ElasticStringThermoBeam,
}

impl SystemKind {
    /// Index (1 or 2) of the damped component.
    pub fn damped_component(self) -> usize {
        match self {
            SystemKind::S1ThermoStringElasticBeam => 1,
            SystemKind::S2ElasticStringThermoBeam => 2,
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemKind::S1ThermoStringElasticBeam => write!(f, "s1"),
            SystemKind::S2ElasticStringThermoBeam => write!(f, "s2"),
        }
    }
}

/// The twelve material constants plus the two component lengths.
///
/// Index 1 refers to the string, index 2 to the beam. On the undamped
/// component the heat constants are present but unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub alpha1: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub delta1: f64,
    pub tau1: f64,
    pub kappa1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub gamma2: f64,
    pub delta2: f64,
    pub tau2: f64,
    pub kappa2: f64,
    pub ell1: f64,
    pub ell2: f64,
}

impl MaterialParams {
    /// All constants equal to one, both lengths `pi`. The standard
    /// normalization for the resonance analysis.
    pub fn ones_pi() -> Self {
        MaterialParams {
            alpha1: 1.0,
            beta1: 1.0,
            gamma1: 1.0,
            delta1: 1.0,
            tau1: 1.0,
            kappa1: 1.0,
            alpha2: 1.0,
            beta2: 1.0,
            gamma2: 1.0,
            delta2: 1.0,
            tau2: 1.0,
            kappa2: 1.0,
            ell1: std::f64::consts::PI,
            ell2: std::f64::consts::PI,
        }
    }

    fn fields(&self) -> [(&'static str, f64); 14] {
        [
            ("alpha1", self.alpha1),
            ("beta1", self.beta1),
            ("gamma1", self.gamma1),
            ("delta1", self.delta1),
            ("tau1", self.tau1),
            ("kappa1", self.kappa1),
            ("alpha2", self.alpha2),
            ("beta2", self.beta2),
            ("gamma2", self.gamma2),
            ("delta2", self.delta2),
            ("tau2", self.tau2),
            ("kappa2", self.kappa2),
            ("ell1", self.ell1),
            ("ell2", self.ell2),
        ]
    }
}

/// Error raised by [`validate_params`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// A field that must be strictly positive is zero, negative or non-finite.
    NonPositiveParameter(&'static str),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NonPositiveParameter(name) => {
                write!(f, "parameter `{name}` must be strictly positive")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Parameters that have passed positivity validation.
///
/// Every constructor goes through [`validate_params`], so holding a
/// `ValidatedParams` is proof that all fields are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedParams {
    raw: MaterialParams,
}

/// Checks that every field is strictly positive. Values are passed through
/// unchanged; nothing is normalized.
pub fn validate_params(p: MaterialParams) -> Result<ValidatedParams, ModelError> {
    for (name, value) in p.fields() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(ModelError::NonPositiveParameter(name));
        }
    }
    Ok(ValidatedParams { raw: p })
}

impl std::ops::Deref for ValidatedParams {
    type Target = MaterialParams;
    fn deref(&self) -> &MaterialParams {
        &self.raw
    }
}

impl ValidatedParams {
    pub fn raw(&self) -> &MaterialParams {
        &self.raw
    }

    /// Coefficient multiplying the string tension `alpha1 * u1_x(0)` in the
    /// interface force balance, so that the stated energy is dissipated
    /// exactly. For S1 the shear balance reads
    /// `alpha2 u2_xxx(0) = (delta1/beta1) alpha1 u1_x(0)`, for S2 it reads
    /// `(delta2/beta2)(alpha2 u2_xxx(0) - beta2 theta2_x(0)) = alpha1 u1_x(0)`.
    pub fn interface_force_coefficient(&self, kind: SystemKind) -> f64 {
        match kind {
            SystemKind::S1ThermoStringElasticBeam => self.delta1 / self.beta1,
            SystemKind::S2ElasticStringThermoBeam => self.beta2 / self.delta2,
        }
    }
}

/// Scalar weights of the energy quadratic form, one per state block.
///
/// The energy is
/// `E = 1/2 [ w_v1 |u1_t|^2 + w_du1 |u1_x|^2 + w_theta |theta|^2
///          + w_q |q|^2 + w_v2 |u2_t|^2 + w_d2u2 |u2_xx|^2 ]`
/// integrated over the respective components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSet {
    pub v1: f64,
    pub du1: f64,
    pub theta: f64,
    pub q: f64,
    pub v2: f64,
    pub d2u2: f64,
}

/// Per-block energy weights for the selected system.
pub fn energy_weights(p: &ValidatedParams, kind: SystemKind) -> WeightSet {
    match kind {
        SystemKind::S1ThermoStringElasticBeam => WeightSet {
            v1: p.delta1 / p.beta1,
            du1: p.delta1 * p.alpha1 / p.beta1,
            theta: 1.0,
            q: p.gamma1 * p.tau1 / p.kappa1,
            v2: 1.0,
            d2u2: p.alpha2,
        },
        SystemKind::S2ElasticStringThermoBeam => WeightSet {
            v1: 1.0,
            du1: p.alpha1,
            theta: 1.0,
            q: p.gamma2 * p.tau2 / p.kappa2,
            v2: p.delta2 / p.beta2,
            d2u2: p.delta2 * p.alpha2 / p.beta2,
        },
    }
}

/// `gamma/kappa` of the damped component; the dissipation rate multiplier.
pub fn dissipation_coefficient(p: &ValidatedParams, kind: SystemKind) -> f64 {
    match kind {
        SystemKind::S1ThermoStringElasticBeam => p.gamma1 / p.kappa1,
        SystemKind::S2ElasticStringThermoBeam => p.gamma2 / p.kappa2,
    }
}
