//! Configuration types shared by the analytical engine, the simulator and
//! the CLI. All values here are linear SI units (W, Hz, m^-2, radians);
//! dB/dBm/km^-2 conversions happen once, at config load.

use crate::error::{Error, Result};
use crate::spectral::PulseKind;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ul,
    Dl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserClass {
    Ccu,
    Ceu,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Full-duplex base station serving one full-duplex user on a fully or
    /// partially overlapped channel pair.
    TwoNode,
    /// Full-duplex base station serving one half-duplex uplink user and one
    /// half-duplex downlink user on overlapping channels.
    ThreeNode,
}

/// Distribution of the random self-interference power gain h_s (unit mean).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiModel {
    Constant,
    Exponential,
    Rician { k: f64 },
}

/// Per-tier physical and protocol parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierParams {
    /// Base-station intensity in BS/m^2.
    pub lambda: f64,
    /// Downlink transmit power in W.
    pub p_d: f64,
    /// Uplink target receive power in W (channel-inversion power control).
    pub rho: f64,
    /// Association bias (distance weight); a UE joins the tier minimizing
    /// tau_k * r_k.
    pub tau: f64,
    /// Duplex overlap fraction in [0, 1].
    pub alpha: f64,
    pub pulse_ul: PulseKind,
    pub pulse_dl: PulseKind,
    /// Mean residual self-interference attenuation at the base station
    /// (linear).
    pub beta_u: f64,
    pub topology: Topology,
}

/// Network-wide parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalParams {
    /// Maximum UE transmit power in W.
    pub p_u_max: f64,
    /// Mean residual self-interference attenuation at the UE (linear).
    pub beta_d: f64,
    /// Noise power in W.
    pub n0: f64,
    pub eta_uu: f64,
    pub eta_dd: f64,
    pub eta_ud: f64,
    pub eta_du: f64,
    /// Minimum scheduling angle between the two users a three-node-topology
    /// base station serves on the same channel, in radians.
    pub delta_o: f64,
    pub si_model: SiModel,
    /// SINR threshold (linear).
    pub theta: f64,
}

/// Half-duplex band widths and guard fraction shared by all tiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandGlobals {
    pub b_u_hd: f64,
    pub b_d_hd: f64,
    pub epsilon: f64,
}

/// A complete resolved network configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub global: GlobalParams,
    pub band: BandGlobals,
    pub tiers: Vec<TierParams>,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let g = &self.global;
        if self.tiers.is_empty() {
            return Err(Error::config("at least one tier is required"));
        }
        if !(g.p_u_max > 0.0) {
            return Err(Error::config("p_u_max must be positive"));
        }
        if g.beta_d < 0.0 || g.n0 < 0.0 {
            return Err(Error::config("beta_d and n0 must be nonnegative"));
        }
        for (name, eta) in [
            ("eta_uu", g.eta_uu),
            ("eta_dd", g.eta_dd),
            ("eta_ud", g.eta_ud),
            ("eta_du", g.eta_du),
        ] {
            if !(eta > 2.0) {
                return Err(Error::config(format!("{name} must exceed 2, got {eta}")));
            }
        }
        // DL-to-DL and UL-to-UL paths are reciprocal.
        if (g.eta_dd - g.eta_uu).abs() > 1e-12 {
            return Err(Error::config("eta_dd and eta_uu must be equal (channel reciprocity)"));
        }
        if !(0.0..PI).contains(&g.delta_o) {
            return Err(Error::config("delta_o must lie in [0, pi)"));
        }
        if !(g.theta > 0.0) {
            return Err(Error::config("theta must be positive"));
        }
        if let SiModel::Rician { k } = g.si_model {
            if k < 0.0 {
                return Err(Error::config("Rician K factor must be nonnegative"));
            }
        }
        if !(self.band.b_u_hd > 0.0 && self.band.b_d_hd > 0.0) {
            return Err(Error::config("half-duplex bandwidths must be positive"));
        }
        if self.band.epsilon < 0.0 {
            return Err(Error::config("guard fraction epsilon must be nonnegative"));
        }
        for (i, t) in self.tiers.iter().enumerate() {
            if !(t.lambda > 0.0 && t.p_d > 0.0 && t.rho > 0.0 && t.tau > 0.0) {
                return Err(Error::config(format!(
                    "tier {i}: lambda, p_d, rho, tau must all be positive"
                )));
            }
            if !(0.0..=1.0).contains(&t.alpha) {
                return Err(Error::config(format!("tier {i}: alpha must lie in [0, 1]")));
            }
            if t.beta_u < 0.0 {
                return Err(Error::config(format!("tier {i}: beta_u must be nonnegative")));
            }
        }
        Ok(())
    }

    /// Effective density lambda_bar_i = sum_j (tau_i^2 / tau_j^2) lambda_j
    /// governing the serving-distance law of tier i.
    pub fn lambda_bar(&self, tier: usize) -> f64 {
        let ti = self.tiers[tier].tau;
        self.tiers.iter().map(|t| (ti * ti) / (t.tau * t.tau) * t.lambda).sum()
    }

    /// Cell-center boundary distance (P_u / rho_i)^(1/eta_dd) for tier i.
    pub fn ccu_radius(&self, tier: usize) -> f64 {
        (self.global.p_u_max / self.tiers[tier].rho).powf(1.0 / self.global.eta_dd)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10.0f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10.0f64.powf((dbm - 30.0) / 10.0)
}

pub fn per_km2_to_per_m2(x: f64) -> f64 {
    x * 1e-6
}

/// Table-style default single-tier configuration used throughout the tests
/// and figure presets: P_u = 3 W, P_d = 5 W, lambda = 1 BS/km^2, N_o = 0,
/// 1 MHz HD bands, theta = 1, beta_d = -75 dB, beta_u = -110 dB,
/// rho = -60 dBm, epsilon = 0.03134, Sinc DL / Sinc^2 UL pulses,
/// delta_o = 90 deg, eta_uu = eta_dd = eta_ud = 4, eta_du = 3.
pub fn default_single_tier() -> NetworkConfig {
    NetworkConfig {
        global: GlobalParams {
            p_u_max: 3.0,
            beta_d: db_to_linear(-75.0),
            n0: 0.0,
            eta_uu: 4.0,
            eta_dd: 4.0,
            eta_ud: 4.0,
            eta_du: 3.0,
            delta_o: PI / 2.0,
            si_model: SiModel::Exponential,
            theta: 1.0,
        },
        band: BandGlobals {
            b_u_hd: 1e6,
            b_d_hd: 1e6,
            epsilon: 0.03134,
        },
        tiers: vec![TierParams {
            lambda: per_km2_to_per_m2(1.0),
            p_d: 5.0,
            rho: dbm_to_watts(-60.0),
            tau: 1.0,
            alpha: 1.0,
            pulse_ul: PulseKind::SincSquared,
            pulse_dl: PulseKind::Sinc,
            beta_u: db_to_linear(-110.0),
            topology: Topology::TwoNode,
        }],
    }
}
