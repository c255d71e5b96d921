//! Band geometry of the overlap scheme and the effective received-energy
//! factors produced by pulse shaping, matched filtering and low-pass
//! filtering.
//!
//! The half-duplex layout places the UL band, a guard of epsilon*B, then
//! the DL band adjacent on the frequency axis (B = min of the two HD
//! widths). With overlap fraction alpha each band grows toward the other
//! by alpha*(epsilon+1)*B, so the bands fully coincide at alpha = 1 when
//! the HD widths are equal.

use crate::error::{Error, Result};
use crate::params::{BandGlobals, Direction, TierParams};
use crate::specfun::{integrate, QuadratureSpec};

/// Time-limited pulse shapes considered for the overlap scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Sinc,
    SincSquared,
}

/// Derived UL/DL band geometry for one tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPlan {
    pub alpha: f64,
    pub b_u_hd: f64,
    pub b_d_hd: f64,
    pub epsilon: f64,
    /// UL bandwidth under overlap alpha.
    pub b_u_alpha: f64,
    /// DL bandwidth under overlap alpha.
    pub b_d_alpha: f64,
    /// UL band center frequency, relative to the HD UL band center.
    pub f_u_center: f64,
    /// DL band center frequency, same reference.
    pub f_d_center: f64,
    /// Center-frequency offset f_u - f_d.
    pub delta_f: f64,
}

/// Derives the band plan for one tier from the shared HD layout.
pub fn make_band_plan(alpha: f64, b_u_hd: f64, b_d_hd: f64, epsilon: f64) -> Result<BandPlan> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if !(b_u_hd > 0.0 && b_d_hd > 0.0) {
        return Err(Error::domain("bandwidths must be positive"));
    }
    if epsilon < 0.0 {
        return Err(Error::domain("epsilon must be nonnegative"));
    }
    let b = b_u_hd.min(b_d_hd);
    let growth = alpha * (epsilon + 1.0) * b;
    // Each band grows one-sided toward the other, moving its center by
    // half the growth.
    let f_u_center = 0.5 * growth;
    let f_d_center = 0.5 * (b_u_hd + b_d_hd) + epsilon * b - 0.5 * growth;
    Ok(BandPlan {
        alpha,
        b_u_hd,
        b_d_hd,
        epsilon,
        b_u_alpha: b_u_hd + growth,
        b_d_alpha: b_d_hd + growth,
        f_u_center,
        f_d_center,
        delta_f: f_u_center - f_d_center,
    })
}

impl BandPlan {
    pub fn from_tier(tier: &TierParams, band: &BandGlobals) -> Result<BandPlan> {
        make_band_plan(tier.alpha, band.b_u_hd, band.b_d_hd, band.epsilon)
    }

    pub fn bandwidth(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Ul => self.b_u_alpha,
            Direction::Dl => self.b_d_alpha,
        }
    }

    pub fn center(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Ul => self.f_u_center,
            Direction::Dl => self.f_d_center,
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-10 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Unit-energy pulse spectrum value at frequency `f` for a pulse of
/// null-to-null bandwidth `bw`. Both spectra are real.
pub fn pulse_spectrum(kind: PulseKind, bw: f64, f: f64) -> f64 {
    let s = sinc(2.0 * f / bw);
    match kind {
        // integral of sinc^2(2f/bw) over all f is bw/2
        PulseKind::Sinc => s / (bw / 2.0).sqrt(),
        // integral of sinc^4(2f/bw) over all f is bw/3
        PulseKind::SincSquared => s * s / (bw / 3.0).sqrt(),
    }
}

fn factor_quad_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_depth: 45,
    }
}

/// Inner product of the receiver's matched-filter window with the
/// interferer's spectrum shifted by `shift`, over the receiver's low-pass
/// band [-rx_bw/2, rx_bw/2].
fn overlap_integral(
    rx_pulse: PulseKind,
    rx_bw: f64,
    tx_pulse: PulseKind,
    tx_bw: f64,
    shift: f64,
) -> Result<f64> {
    let spec = factor_quad_spec();
    integrate(
        |f| pulse_spectrum(rx_pulse, rx_bw, f) * pulse_spectrum(tx_pulse, tx_bw, f + shift),
        -rx_bw / 2.0,
        rx_bw / 2.0,
        &spec,
    )
}

fn pulse_for(tier: &TierParams, dir: Direction) -> PulseKind {
    match dir {
        Direction::Ul => tier.pulse_ul,
        Direction::Dl => tier.pulse_dl,
    }
}

fn self_energy(rx: &TierParams, dir: Direction, rx_plan: &BandPlan) -> Result<f64> {
    let bw = rx_plan.bandwidth(dir);
    overlap_integral(pulse_for(rx, dir), bw, pulse_for(rx, dir), bw, 0.0)
}

/// Normalized intra-mode received-energy factor |I~_v(alpha_i, alpha_k)|^2
/// for a receiver in tier `rx` and a same-direction interferer in tier `tx`.
pub fn intra_mode_factor(
    rx: &TierParams,
    tx: &TierParams,
    dir: Direction,
    rx_plan: &BandPlan,
    tx_plan: &BandPlan,
) -> Result<f64> {
    let shift = rx_plan.center(dir) - tx_plan.center(dir);
    let i = overlap_integral(
        pulse_for(rx, dir),
        rx_plan.bandwidth(dir),
        pulse_for(tx, dir),
        tx_plan.bandwidth(dir),
        shift,
    )?;
    let i_self = self_energy(rx, dir, rx_plan)?;
    Ok((i / i_self) * (i / i_self))
}

/// Normalized cross-mode received-energy factor |C~_v(alpha_i, alpha_k)|^2:
/// the interferer transmits in the opposite direction, so its spectrum is
/// shifted by the UL/DL center-frequency difference.
pub fn cross_mode_factor(
    rx: &TierParams,
    tx: &TierParams,
    dir: Direction,
    rx_plan: &BandPlan,
    tx_plan: &BandPlan,
) -> Result<f64> {
    let other = match dir {
        Direction::Ul => Direction::Dl,
        Direction::Dl => Direction::Ul,
    };
    let shift = rx_plan.center(dir) - tx_plan.center(other);
    let c = overlap_integral(
        pulse_for(rx, dir),
        rx_plan.bandwidth(dir),
        pulse_for(tx, other),
        tx_plan.bandwidth(other),
        shift,
    )?;
    let i_self = self_energy(rx, dir, rx_plan)?;
    Ok((c / i_self) * (c / i_self))
}

/// Eagerly computed factor table for every (direction, rx tier, tx tier)
/// combination of a configuration. Read-only after construction, so it can
/// be shared freely across threads.
#[derive(Debug, Clone)]
pub struct FactorSet {
    tiers: usize,
    /// [dir][rx][tx]
    intra: Vec<f64>,
    cross: Vec<f64>,
    plans: Vec<BandPlan>,
}

impl FactorSet {
    pub fn compute(tiers: &[TierParams], band: &BandGlobals) -> Result<FactorSet> {
        let n = tiers.len();
        let plans: Vec<BandPlan> = tiers
            .iter()
            .map(|t| BandPlan::from_tier(t, band))
            .collect::<Result<_>>()?;
        let mut intra = vec![0.0; 2 * n * n];
        let mut cross = vec![0.0; 2 * n * n];
        for (d, dir) in [Direction::Ul, Direction::Dl].into_iter().enumerate() {
            for i in 0..n {
                for k in 0..n {
                    let idx = d * n * n + i * n + k;
                    intra[idx] = intra_mode_factor(&tiers[i], &tiers[k], dir, &plans[i], &plans[k])?;
                    cross[idx] = cross_mode_factor(&tiers[i], &tiers[k], dir, &plans[i], &plans[k])?;
                }
            }
        }
        Ok(FactorSet {
            tiers: n,
            intra,
            cross,
            plans,
        })
    }

    fn dir_idx(dir: Direction) -> usize {
        match dir {
            Direction::Ul => 0,
            Direction::Dl => 1,
        }
    }

    pub fn intra(&self, dir: Direction, rx_tier: usize, tx_tier: usize) -> f64 {
        self.intra[Self::dir_idx(dir) * self.tiers * self.tiers + rx_tier * self.tiers + tx_tier]
    }

    pub fn cross(&self, dir: Direction, rx_tier: usize, tx_tier: usize) -> f64 {
        self.cross[Self::dir_idx(dir) * self.tiers * self.tiers + rx_tier * self.tiers + tx_tier]
    }

    /// Self cross-mode factor |C~_v(alpha_i, alpha_i)|^2 entering the
    /// residual self-interference terms.
    pub fn cross_self(&self, dir: Direction, tier: usize) -> f64 {
        self.cross(dir, tier, tier)
    }

    pub fn plan(&self, tier: usize) -> &BandPlan {
        &self.plans[tier]
    }

    /// Copy with every cross-mode factor forced to zero: models perfectly
    /// isolated UL/DL bands, the idealized half-duplex baseline.
    pub fn with_cross_suppressed(mut self) -> FactorSet {
        self.cross.iter_mut().for_each(|c| *c = 0.0);
        self
    }
}
