//! Model parameters and coherent initial amplitudes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

fn default_g() -> f64 {
    1.0
}

/// Physical parameters of the coupled exciton-photon system, in units of the
/// exciton-photon coupling (g = 1 unless stated otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Exciton mode frequency.
    pub omega1: f64,
    /// Photon mode frequency.
    pub omega2: f64,
    /// Kerr-type exciton-exciton interaction strength.
    pub chi: f64,
    /// Exciton-photon coupling strength.
    #[serde(default = "default_g")]
    pub g: f64,
    /// Exciton damping rate into its bath.
    #[serde(default)]
    pub gamma: f64,
    /// Mean thermal occupation of the exciton bath. The photon bath is vacuum.
    #[serde(default)]
    pub n_th: f64,
}

impl SystemParams {
    pub fn new(omega1: f64, omega2: f64, chi: f64, g: f64) -> Result<Self> {
        Self {
            omega1,
            omega2,
            chi,
            g,
            gamma: 0.0,
            n_th: 0.0,
        }
        .validated()
    }

    /// Adds dissipation: damping rate `gamma` on both modes, thermal
    /// occupation `n_th` on the exciton bath only.
    pub fn with_damping(mut self, gamma: f64, n_th: f64) -> Result<Self> {
        self.gamma = gamma;
        self.n_th = n_th;
        self.validated()
    }

    /// CdS quantum-well parameters in coupling units.
    pub fn cds() -> Self {
        Self {
            omega1: 25.277,
            omega2: 24.013,
            chi: 0.05304,
            g: 1.0,
            gamma: 0.0,
            n_th: 0.0,
        }
    }

    /// Exciton-photon detuning `omega1 - omega2`.
    pub fn delta_omega(&self) -> f64 {
        self.omega1 - self.omega2
    }

    pub fn validated(self) -> Result<Self> {
        let fields = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("chi", self.chi),
            ("g", self.g),
            ("gamma", self.gamma),
            ("n_th", self.n_th),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {value}")));
            }
        }
        for (name, value) in [
            ("chi", self.chi),
            ("gamma", self.gamma),
            ("n_th", self.n_th),
        ] {
            if value < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be nonnegative, got {value}"
                )));
            }
        }
        Ok(self)
    }
}

/// Coherent amplitudes of the initial product state
/// `|alpha>_exciton (x) |beta>_photon` with `beta = beta_mag * exp(-i phi)`.
///
/// The relative phase `phi` selects which witnesses go nonclassical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialAmplitudes {
    /// Exciton amplitude, real by convention.
    pub alpha: f64,
    /// Photon amplitude magnitude.
    pub beta_mag: f64,
    /// Photon phase; `beta = beta_mag * exp(-i phi)`.
    #[serde(default)]
    pub phi: f64,
}

impl InitialAmplitudes {
    pub fn new(alpha: f64, beta_mag: f64, phi: f64) -> Result<Self> {
        let amps = Self {
            alpha,
            beta_mag,
            phi,
        };
        for (name, value) in [("alpha", alpha), ("beta_mag", beta_mag), ("phi", phi)] {
            if !value.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {value}")));
            }
        }
        if beta_mag < 0.0 {
            return Err(Error::Config(format!(
                "beta_mag must be nonnegative, got {beta_mag}"
            )));
        }
        Ok(amps)
    }

    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha, 0.0)
    }

    pub fn beta(&self) -> C64 {
        C64::from_polar(self.beta_mag, -self.phi)
    }
}
