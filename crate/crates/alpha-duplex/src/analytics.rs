//! Analytical engine: serving-distance laws, interference Laplace
//! transforms, self-interference factors, outage probability and rate for
//! the overlapped-duplex multi-tier model, plus the single-tier closed
//! forms and the critical DL self-interference cancellation threshold.
//!
//! Conventions: everything is linear SI units; the "tagged" link sits in
//! tier `i`, interference aggregates over tiers `k`; `r_o` is the tagged
//! serving distance.

use crate::error::{Error, Result};
use crate::params::{Direction, NetworkConfig, SiModel, Topology, UserClass};
use crate::specfun::{
    erf, gamma, hyp2f1, integrate, ln_bessel_i0, lower_incomplete_gamma, QuadratureSpec,
};
use crate::spectral::FactorSet;
use std::f64::consts::PI;

/// Whether the engine uses the exact (semi-numerical) or the bounded /
/// approximate closed forms where both exist (cell-edge UL transform and
/// the intra-cell factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtMethod {
    Exact,
    Bounded,
}

/// Interference exclusion region around the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exclusion {
    /// No exclusion: interferers can be arbitrarily close.
    None,
    /// Fixed ball of the given radius (meters).
    Radius(f64),
    /// Power-dependent radius (P / rho)^(1/eta): an inverted-power
    /// transmitter cannot be closer to the receiver than the distance its
    /// power level implies.
    PowerControlled { rho: f64 },
}

/// Transmit power distribution of an interfering field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerDist {
    Constant(f64),
    /// `p_lo` with probability `w_lo`, else `p_hi`.
    TwoPoint { p_lo: f64, p_hi: f64, w_lo: f64 },
    /// Truncated channel-inversion UL power: rho * r^eta_dd for a
    /// Rayleigh-law serving distance, capped at p_max.
    UlTruncated {
        rho: f64,
        lambda_bar: f64,
        eta_dd: f64,
        p_max: f64,
    },
}

impl PowerDist {
    /// E[P^zeta]. Closed form for every variant.
    pub fn moment(&self, zeta: f64) -> Result<f64> {
        if zeta < 0.0 {
            return Err(Error::domain("power moment requires zeta >= 0"));
        }
        if zeta == 0.0 {
            return Ok(1.0);
        }
        match *self {
            PowerDist::Constant(p) => Ok(p.powf(zeta)),
            PowerDist::TwoPoint { p_lo, p_hi, w_lo } => {
                Ok(w_lo * p_lo.powf(zeta) + (1.0 - w_lo) * p_hi.powf(zeta))
            }
            PowerDist::UlTruncated {
                rho,
                lambda_bar,
                eta_dd,
                p_max,
            } => {
                let shape = zeta * eta_dd / 2.0 + 1.0;
                let scale = (PI * lambda_bar).powf(zeta * eta_dd / 2.0);
                if p_max.is_infinite() {
                    return Ok(rho.powf(zeta) * gamma(shape) / scale);
                }
                // x = pi * lambda_bar * d^2 with d the power-control radius
                let x = PI * lambda_bar * (p_max / rho).powf(2.0 / eta_dd);
                let body = rho.powf(zeta) * lower_incomplete_gamma(shape, x)? / scale;
                // remaining users transmit at the cap
                Ok(body + p_max.powf(zeta) * (-x).exp())
            }
        }
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1.0)
    }

    /// E[g(P)], with the continuous part integrated by quadrature.
    pub fn expect<F: FnMut(f64) -> Result<f64>>(
        &self,
        mut g: F,
        quad: &QuadratureSpec,
    ) -> Result<f64> {
        match *self {
            PowerDist::Constant(p) => g(p),
            PowerDist::TwoPoint { p_lo, p_hi, w_lo } => {
                Ok(w_lo * g(p_lo)? + (1.0 - w_lo) * g(p_hi)?)
            }
            PowerDist::UlTruncated {
                rho,
                lambda_bar,
                eta_dd,
                p_max,
            } => {
                let d = if p_max.is_infinite() {
                    f64::INFINITY
                } else {
                    (p_max / rho).powf(1.0 / eta_dd)
                };
                let hi = tail_cutoff(0.0, lambda_bar).min(d);
                let body = integrate_checked(
                    |r| Ok(g(rho * r.powf(eta_dd))? * 2.0 * PI * lambda_bar * r * (-PI * lambda_bar * r * r).exp()),
                    0.0,
                    hi,
                    quad,
                )?;
                let ceu_mass = if d.is_infinite() {
                    0.0
                } else {
                    (-PI * lambda_bar * d * d).exp()
                };
                let atom = if ceu_mass > 0.0 { ceu_mass * g(p_max)? } else { 0.0 };
                Ok(body + atom)
            }
        }
    }
}

/// Radius beyond which the Rayleigh-law density r*exp(-pi*lam*(r^2 - d^2))
/// carries less than ~1e-15 of the remaining mass.
fn tail_cutoff(d: f64, lambda_bar: f64) -> f64 {
    (d * d + 34.0 / (PI * lambda_bar)).sqrt()
}

/// Runs quadrature over a fallible integrand, propagating the first error.
fn integrate_checked<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut pending: Option<Error> = None;
    let v = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                if pending.is_none() {
                    pending = Some(e);
                }
                f64::NAN
            }
        },
        lo,
        hi,
        quad,
    );
    match pending {
        Some(e) => Err(e),
        None => v,
    }
}

/// One term of the excluded-ball LT exponent:
/// a^(2-eta) * s * p * 2F1(1, 1-2/eta; 2-2/eta; -a^(-eta) p s),
/// with its analytic a -> 0 limit used when the argument overflows.
fn excluded_exponent_term(a: f64, s: f64, p: f64, eta: f64) -> Result<f64> {
    if s == 0.0 || p == 0.0 {
        return Ok(0.0);
    }
    let b = 1.0 - 2.0 / eta;
    let z = p * s * a.powf(-eta);
    if !z.is_finite() || z > 1e250 {
        return Ok(b * PI / (PI * b).sin() * (s * p).powf(2.0 / eta));
    }
    Ok(a.powf(2.0 - eta) * s * p * hyp2f1(1.0, b, 1.0 + b, -z)?)
}

/// Laplace transform of the aggregate interference from a PPP field of
/// intensity `lambda` with Rayleigh fading, path-loss exponent `eta`,
/// the given exclusion region, and i.i.d. transmit powers.
pub fn lt_ppp_general(
    s: f64,
    lambda: f64,
    eta: f64,
    exclusion: Exclusion,
    power: &PowerDist,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(eta > 2.0) {
        return Err(Error::domain("lt_ppp_general requires eta > 2"));
    }
    if s < 0.0 {
        return Err(Error::domain("lt_ppp_general requires s >= 0"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let exponent = match exclusion {
        Exclusion::None => {
            let m = power.moment(2.0 / eta)?;
            PI * lambda * s.powf(2.0 / eta) * m * (2.0 * PI / eta) / (2.0 * PI / eta).sin()
        }
        Exclusion::Radius(a) if a == 0.0 => {
            return lt_ppp_general(s, lambda, eta, Exclusion::None, power, quad)
        }
        Exclusion::Radius(a) => {
            let t = power.expect(|p| excluded_exponent_term(a, s, p, eta), quad)?;
            2.0 * PI * lambda / (eta - 2.0) * t
        }
        Exclusion::PowerControlled { rho } => {
            // a = (P/rho)^(1/eta) collapses the expectation onto the
            // 2/eta power moment.
            let b = 1.0 - 2.0 / eta;
            let m = power.moment(2.0 / eta)?;
            2.0 * PI * lambda / (eta - 2.0)
                * rho.powf(1.0 - 2.0 / eta)
                * m
                * s
                * hyp2f1(1.0, b, 1.0 + b, -rho * s)?
        }
    };
    Ok((-exponent).exp())
}

/// Jensen lower bound on the excluded-ball LT: the mean power stands in
/// for the power expectation. Requires a fixed, power-independent radius.
pub fn lt_ppp_bound(s: f64, lambda: f64, eta: f64, a: f64, mean_power: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(
            "lt_ppp_bound requires a positive exclusion radius",
        ));
    }
    if !(eta > 2.0) {
        return Err(Error::domain("lt_ppp_bound requires eta > 2"));
    }
    if s < 0.0 {
        return Err(Error::domain("lt_ppp_bound requires s >= 0"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let t = excluded_exponent_term(a, s, mean_power, eta)?;
    Ok((-2.0 * PI * lambda / (eta - 2.0) * t).exp())
}

/// Which interference population a transform describes, named
/// source -> victim: Uu = UL users into the tagged BS, Du = other BSs into
/// the tagged BS, Dd = other BSs into the tagged UE, Ud = UL users into
/// the tagged UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtKind {
    Uu,
    Du,
    Dd,
    Ud,
}

/// Critical DL self-interference cancellation for the two-node topology
/// to beat the three-node topology (full overlap, eta_ud = 4,
/// delta_o = 90 deg, exponential SI). With a serving distance it is the
/// distance-resolved threshold; without one, the mean-distance reduction.
pub fn critical_beta_d(r_o: Option<f64>, lambda: f64) -> f64 {
    match r_o {
        Some(r) => {
            let base = 4.0 * lambda * r.powi(4) + 8.0 / PI * lambda.sqrt() * r.powi(3) + r * r;
            base.powi(-2)
        }
        None => 16.0 * lambda * lambda / 9.0,
    }
}

/// exp(x^2) * erfc(x) without overflow.
fn scaled_erfc(x: f64) -> f64 {
    if x <= 5.0 {
        (x * x).exp() * crate::specfun::erfc(x)
    } else {
        let x2 = x * x;
        (1.0 - 0.5 / x2 + 0.75 / (x2 * x2) - 1.875 / (x2 * x2 * x2)) / (x * PI.sqrt())
    }
}

pub struct Engine {
    cfg: NetworkConfig,
    factors: FactorSet,
    quad: QuadratureSpec,
    method: LtMethod,
}

impl Engine {
    pub fn new(cfg: NetworkConfig) -> Result<Engine> {
        cfg.validate()?;
        let factors = FactorSet::compute(&cfg.tiers, &cfg.band)?;
        Ok(Engine {
            cfg,
            factors,
            quad: QuadratureSpec::default(),
            method: LtMethod::Bounded,
        })
    }

    pub fn with_method(mut self, method: LtMethod) -> Engine {
        self.method = method;
        self
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Engine {
        self.quad = quad;
        self
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn factors(&self) -> &FactorSet {
        &self.factors
    }

    pub fn method(&self) -> LtMethod {
        self.method
    }

    /// (p_ccu, p_ceu) for the tier: the chance a random user can, or
    /// cannot, invert its path loss within the power cap.
    pub fn class_probabilities(&self, tier: usize) -> (f64, f64) {
        let d = self.cfg.ccu_radius(tier);
        if d.is_infinite() {
            return (1.0, 0.0);
        }
        let p_ceu = (-PI * self.cfg.lambda_bar(tier) * d * d).exp();
        (1.0 - p_ceu, p_ceu)
    }

    /// Serving-distance density conditioned on the user class; the Average
    /// class gives the unconditional Rayleigh law.
    pub fn serving_distance_pdf(&self, tier: usize, class: UserClass, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let lam = self.cfg.lambda_bar(tier);
        let d = self.cfg.ccu_radius(tier);
        let base = 2.0 * PI * lam * r;
        match class {
            UserClass::Average => base * (-PI * lam * r * r).exp(),
            UserClass::Ccu => {
                if r > d {
                    0.0
                } else {
                    let (p_ccu, _) = self.class_probabilities(tier);
                    base * (-PI * lam * r * r).exp() / p_ccu
                }
            }
            UserClass::Ceu => {
                if r <= d || d.is_infinite() {
                    0.0
                } else {
                    // normalized tail: the d^2 shift keeps the exponent small
                    base * (-PI * lam * (r * r - d * d)).exp()
                }
            }
        }
    }

    /// Marginal transmit power distribution of an UL user in the tier.
    pub fn ul_power_dist(&self, tier: usize) -> PowerDist {
        PowerDist::UlTruncated {
            rho: self.cfg.tiers[tier].rho,
            lambda_bar: self.cfg.lambda_bar(tier),
            eta_dd: self.cfg.global.eta_dd,
            p_max: self.cfg.global.p_u_max,
        }
    }

    /// E[(P_u)^zeta] for the tier's UL users.
    pub fn ul_power_moment(&self, tier: usize, zeta: f64) -> Result<f64> {
        self.ul_power_dist(tier).moment(zeta)
    }

    /// Laplace transform of the aggregate interference of the given kind
    /// from tier `k` onto a tagged link in tier `i`, evaluated at `s`
    /// (the spectral overlap factor is expected to be folded into `s`).
    /// `r_o` is the tagged serving distance; required whenever it sets the
    /// exclusion region or the intra-cell geometry.
    pub fn lt_interference(
        &self,
        kind: LtKind,
        class: UserClass,
        i: usize,
        k: usize,
        s: f64,
        r_o: Option<f64>,
    ) -> Result<f64> {
        if class == UserClass::Average {
            return Err(Error::domain(
                "lt_interference needs a concrete user class (Ccu or Ceu)",
            ));
        }
        if s < 0.0 {
            return Err(Error::domain("lt_interference requires s >= 0"));
        }
        let g = &self.cfg.global;
        let tx = &self.cfg.tiers[k];
        let need_ro = || {
            r_o.ok_or_else(|| Error::domain(format!("{kind:?}/{class:?} requires a serving distance r_o")))
        };
        match kind {
            LtKind::Du => lt_ppp_general(
                s,
                tx.lambda,
                g.eta_du,
                Exclusion::None,
                &PowerDist::Constant(tx.p_d),
                &self.quad,
            ),
            LtKind::Dd => {
                let a = need_ro()? * self.cfg.tiers[i].tau / tx.tau;
                lt_ppp_general(
                    s,
                    tx.lambda,
                    g.eta_dd,
                    Exclusion::Radius(a),
                    &PowerDist::Constant(tx.p_d),
                    &self.quad,
                )
            }
            LtKind::Uu => match class {
                UserClass::Ccu => lt_ppp_general(
                    s,
                    tx.lambda,
                    g.eta_uu,
                    Exclusion::PowerControlled { rho: tx.rho },
                    &self.ul_power_dist(k),
                    &self.quad,
                ),
                _ => {
                    let a = need_ro()?;
                    let dist = self.ul_power_dist(k);
                    match self.method {
                        LtMethod::Bounded => lt_ppp_bound(s, tx.lambda, g.eta_uu, a, dist.mean()?),
                        LtMethod::Exact => lt_ppp_general(
                            s,
                            tx.lambda,
                            g.eta_uu,
                            Exclusion::Radius(a),
                            &dist,
                            &self.quad,
                        ),
                    }
                }
            },
            LtKind::Ud => {
                let base = match class {
                    UserClass::Ccu => lt_ppp_general(
                        s,
                        tx.lambda,
                        g.eta_ud,
                        Exclusion::PowerControlled { rho: tx.rho },
                        &self.ul_power_dist(k),
                        &self.quad,
                    )?,
                    _ => lt_ppp_bound(s, tx.lambda, g.eta_ud, need_ro()?, self.ul_power_dist(k).mean()?)?,
                };
                // a three-node cell pairs a second, UL, user on the tagged
                // UE's own channel
                if i == k && self.cfg.tiers[i].topology == Topology::ThreeNode {
                    Ok(base * self.intracell_lt(self.method == LtMethod::Exact, i, need_ro()?, s)?)
                } else {
                    Ok(base)
                }
            }
        }
    }

    /// Laplace transform of the intra-cell interference from the paired UL
    /// user onto the tagged DL user of a three-node cell, at serving
    /// distance `r_o`. Exact: double quadrature over the partner's distance
    /// and scheduling angle. Approximate: both replaced by their means.
    pub fn intracell_lt(&self, exact: bool, tier: usize, r_o: f64, s: f64) -> Result<f64> {
        if r_o < 0.0 {
            return Err(Error::domain("intracell_lt requires r_o >= 0"));
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        let g = &self.cfg.global;
        let t = &self.cfg.tiers[tier];
        let lam = self.cfg.lambda_bar(tier);
        let d = self.cfg.ccu_radius(tier);
        let eta_pc = g.eta_dd; // sets the partner's power level
        let eta = g.eta_ud;
        let (p_ccu, p_ceu) = self.class_probabilities(tier);

        if exact {
            let span = PI - g.delta_o;
            // interference suppression averaged over the scheduling angle,
            // for a partner at distance r transmitting at power p
            let angle_avg = |r: f64, p: f64| -> Result<f64> {
                integrate_checked(
                    |delta: f64| {
                        let d2 = r * r + r_o * r_o - 2.0 * r * r_o * delta.cos();
                        Ok(1.0 / (1.0 + s * p * d2.powf(-eta / 2.0)))
                    },
                    g.delta_o,
                    PI,
                    &self.quad,
                )
                .map(|v| v / span)
            };
            let hi_c = tail_cutoff(0.0, lam).min(d);
            let ccu_part = integrate_checked(
                |r| {
                    let w = 2.0 * PI * lam * r * (-PI * lam * r * r).exp();
                    Ok(w * angle_avg(r, t.rho * r.powf(eta_pc))?)
                },
                0.0,
                hi_c,
                &self.quad,
            )?;
            let ceu_part = if p_ceu > 0.0 {
                integrate_checked(
                    |r| {
                        let w = p_ceu * self.serving_distance_pdf(tier, UserClass::Ceu, r);
                        Ok(w * angle_avg(r, g.p_u_max)?)
                    },
                    d,
                    tail_cutoff(d, lam),
                    &self.quad,
                )?
            } else {
                0.0
            };
            return Ok(ccu_part + ceu_part);
        }

        // approximate form: mean in-class distances and mean angle cosine
        let cos_term = 2.0 * g.delta_o.sin() / (PI - g.delta_o);
        let mut total = 0.0;
        if p_ccu > 0.0 {
            let r_c = if d.is_infinite() {
                1.0 / (2.0 * lam.sqrt())
            } else {
                let x = (PI * lam).sqrt() * d;
                (erf(x) - 2.0 * lam.sqrt() * d * (-x * x).exp())
                    / (2.0 * lam.sqrt() * (1.0 - (-x * x).exp()))
            };
            let d2 = r_c * r_c + r_o * r_o + cos_term * r_o * r_c;
            total += p_ccu / (1.0 + s * t.rho * r_c.powf(eta_pc) * d2.powf(-eta / 2.0));
        }
        if p_ceu > 0.0 {
            let x = (PI * lam).sqrt() * d;
            let r_e = d + scaled_erfc(x) / (2.0 * lam.sqrt());
            let d2 = r_e * r_e + r_o * r_o + cos_term * r_o * r_e;
            total += p_ceu / (1.0 + s * g.p_u_max * d2.powf(-eta / 2.0));
        }
        Ok(total)
    }

    /// Residual self-interference attenuation factor U_SI(x). For the UL
    /// the interfering source is the tagged BS's own DL chain (power
    /// folded in here); for the DL it only exists in the two-node topology
    /// where the source power is already part of `x`.
    pub fn si_factor(&self, dir: Direction, tier: usize, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::domain("si_factor requires x >= 0"));
        }
        let t = &self.cfg.tiers[tier];
        let c = match dir {
            Direction::Ul => x * t.beta_u * t.p_d * self.factors.cross_self(Direction::Ul, tier),
            Direction::Dl => match t.topology {
                Topology::ThreeNode => return Ok(1.0),
                Topology::TwoNode => {
                    x * self.cfg.global.beta_d * self.factors.cross_self(Direction::Dl, tier)
                }
            },
        };
        if c == 0.0 {
            return Ok(1.0);
        }
        match self.cfg.global.si_model {
            SiModel::Constant => Ok((-c).exp()),
            SiModel::Exponential => Ok(1.0 / (1.0 + c)),
            SiModel::Rician { k } => {
                // E[exp(-c h)] over the unit-mean Rician power gain
                let kp1 = 1.0 + k;
                integrate_checked(
                    |h: f64| {
                        let ln_f = kp1.ln() - k - kp1 * h + ln_bessel_i0(2.0 * (k * kp1 * h).sqrt());
                        Ok((ln_f - c * h).exp())
                    },
                    0.0,
                    f64::INFINITY,
                    &self.quad,
                )
            }
        }
    }

    /// Product over all tiers of the same-mode and cross-mode interference
    /// transforms for the tagged link.
    fn lt_product(
        &self,
        i: usize,
        dir: Direction,
        class: UserClass,
        s_base: f64,
        r_o: Option<f64>,
    ) -> Result<f64> {
        let (same_kind, cross_kind) = match dir {
            Direction::Ul => (LtKind::Uu, LtKind::Du),
            Direction::Dl => (LtKind::Dd, LtKind::Ud),
        };
        let mut prod = 1.0;
        for k in 0..self.cfg.tiers.len() {
            let s_same = s_base * self.factors.intra(dir, i, k);
            let s_cross = s_base * self.factors.cross(dir, i, k);
            prod *= self.lt_interference(same_kind, class, i, k, s_same, r_o)?;
            prod *= self.lt_interference(cross_kind, class, i, k, s_cross, r_o)?;
        }
        Ok(prod)
    }

    /// Outage probability of the tagged link.
    pub fn outage(&self, tier: usize, dir: Direction, class: UserClass, theta: f64) -> Result<f64> {
        if !(theta > 0.0) {
            return Err(Error::domain("outage requires theta > 0"));
        }
        let g = &self.cfg.global;
        let t = &self.cfg.tiers[tier];
        let lam = self.cfg.lambda_bar(tier);
        let d = self.cfg.ccu_radius(tier);

        match (dir, class) {
            (_, UserClass::Average) => {
                let (p_ccu, p_ceu) = self.class_probabilities(tier);
                let mut o = 0.0;
                if p_ccu > 0.0 {
                    o += p_ccu * self.outage(tier, dir, UserClass::Ccu, theta)?;
                }
                if p_ceu > 0.0 {
                    o += p_ceu * self.outage(tier, dir, UserClass::Ceu, theta)?;
                }
                Ok(o)
            }
            (Direction::Ul, UserClass::Ccu) => {
                // power control pins the received power at rho: no
                // serving-distance integral
                let s0 = theta / t.rho;
                let succ = (-g.n0 * s0).exp()
                    * self.si_factor(Direction::Ul, tier, s0)?
                    * self.lt_product(tier, Direction::Ul, UserClass::Ccu, s0, None)?;
                Ok((1.0 - succ).clamp(0.0, 1.0))
            }
            (Direction::Ul, UserClass::Ceu) => {
                if d.is_infinite() {
                    return Err(Error::domain("no cell-edge users when the power cap is infinite"));
                }
                let succ = integrate_checked(
                    |r| {
                        let s0 = theta * r.powf(g.eta_uu) / g.p_u_max;
                        Ok((-g.n0 * s0).exp()
                            * self.si_factor(Direction::Ul, tier, s0)?
                            * self.serving_distance_pdf(tier, UserClass::Ceu, r)
                            * self.lt_product(tier, Direction::Ul, UserClass::Ceu, s0, Some(r))?)
                    },
                    d,
                    tail_cutoff(d, lam),
                    &self.quad,
                )?;
                Ok((1.0 - succ).clamp(0.0, 1.0))
            }
            (Direction::Dl, class) => {
                let (lo, hi, src_power): (f64, f64, Box<dyn Fn(f64) -> f64>) = match class {
                    UserClass::Ccu => (
                        0.0,
                        tail_cutoff(0.0, lam).min(d),
                        Box::new(move |r: f64| t.rho * r.powf(g.eta_dd)),
                    ),
                    _ => {
                        if d.is_infinite() {
                            return Err(Error::domain(
                                "no cell-edge users when the power cap is infinite",
                            ));
                        }
                        (d, tail_cutoff(d, lam), Box::new(move |_| g.p_u_max))
                    }
                };
                let succ = integrate_checked(
                    |r| {
                        let s0 = theta * r.powf(g.eta_dd) / t.p_d;
                        Ok((-g.n0 * s0).exp()
                            * self.si_factor(Direction::Dl, tier, s0 * src_power(r))?
                            * self.serving_distance_pdf(tier, class, r)
                            * self.lt_product(tier, Direction::Dl, class, s0, Some(r))?)
                    },
                    lo,
                    hi,
                    &self.quad,
                )?;
                Ok((1.0 - succ).clamp(0.0, 1.0))
            }
        }
    }

    /// Link rate: direction bandwidth x spectral efficiency x success
    /// probability.
    pub fn rate(&self, tier: usize, dir: Direction, class: UserClass, theta: f64) -> Result<f64> {
        let bw = self.factors.plan(tier).bandwidth(dir);
        let o = self.outage(tier, dir, class, theta)?;
        Ok(bw * (1.0 + theta).log2() * (1.0 - o))
    }

    fn check_closed_form_preconditions(&self) -> Result<()> {
        let g = &self.cfg.global;
        if self.cfg.tiers.len() != 1 {
            return Err(Error::domain("closed form assumes a single tier"));
        }
        for (name, eta, want) in [
            ("eta_uu", g.eta_uu, 4.0),
            ("eta_dd", g.eta_dd, 4.0),
            ("eta_ud", g.eta_ud, 4.0),
            ("eta_du", g.eta_du, 3.0),
        ] {
            if (eta - want).abs() > 1e-9 {
                return Err(Error::domain(format!("closed form assumes {name} = {want}, got {eta}")));
            }
        }
        if (g.delta_o - PI / 2.0).abs() > 1e-9 {
            return Err(Error::domain("closed form assumes delta_o = 90 degrees"));
        }
        if g.si_model != SiModel::Exponential {
            return Err(Error::domain("closed form assumes exponential self-interference fading"));
        }
        if g.n0 != 0.0 {
            return Err(Error::domain("closed form assumes an interference-limited network (N_o = 0)"));
        }
        let (_, p_ceu) = self.class_probabilities(0);
        if p_ceu > 1e-9 {
            return Err(Error::domain(
                "closed form assumes an effectively unbounded UL power cap (no cell-edge users)",
            ));
        }
        Ok(())
    }

    /// Success-probability factor contributed by the near-end interferer
    /// at the DL receiver: residual self interference (two-node) or the
    /// paired UL user (three-node), conditioned on serving distance `r_o`.
    /// `beta_d` overrides the configured cancellation level when given.
    pub fn closed_form_unt(
        &self,
        topology: Topology,
        theta: f64,
        r_o: f64,
        beta_d: Option<f64>,
    ) -> Result<f64> {
        self.check_closed_form_preconditions()?;
        let g = &self.cfg.global;
        let t = &self.cfg.tiers[0];
        let cd = self.factors.cross_self(Direction::Dl, 0);
        match topology {
            Topology::TwoNode => {
                let b = beta_d.unwrap_or(g.beta_d);
                Ok(t.p_d / (t.p_d + b * cd * t.rho * r_o.powi(8) * theta))
            }
            Topology::ThreeNode => {
                let lam = t.lambda;
                let q = r_o.powi(4) * theta * cd * t.rho / t.p_d;
                match self.method {
                    LtMethod::Bounded => {
                        let den = 1.0 + 4.0 * lam * r_o * r_o + 8.0 / PI * lam.sqrt() * r_o;
                        Ok(1.0 / (1.0 + q * den.powi(-2)))
                    }
                    LtMethod::Exact => {
                        let span = PI - g.delta_o;
                        integrate_checked(
                            |r1: f64| {
                                let w = 2.0 * PI * lam * r1 * (-PI * lam * r1 * r1).exp();
                                let inner = integrate_checked(
                                    |delta: f64| {
                                        let ratio = r_o / r1;
                                        let d2 = 1.0 + ratio * ratio - 2.0 * ratio * delta.cos();
                                        Ok(1.0 / (1.0 + q * d2.powi(-2)))
                                    },
                                    g.delta_o,
                                    PI,
                                    &self.quad,
                                )? / span;
                                Ok(w * inner)
                            },
                            0.0,
                            tail_cutoff(0.0, lam),
                            &self.quad,
                        )
                    }
                }
            }
        }
    }

    /// Single-tier closed-form outage and rate (eta = 4/4/4/3,
    /// delta_o = 90 deg, exponential SI, no noise, unbounded power cap).
    /// The topology argument selects the near-end-interference branch for
    /// the DL; the UL expression is topology-independent.
    pub fn closed_form_single_tier(
        &self,
        dir: Direction,
        topology: Topology,
        theta: f64,
    ) -> Result<(f64, f64)> {
        self.check_closed_form_preconditions()?;
        if !(theta > 0.0) {
            return Err(Error::domain("closed form requires theta > 0"));
        }
        let t = &self.cfg.tiers[0];
        let lam = t.lambda;
        let bw = self.factors.plan(0).bandwidth(dir);
        let spectral = (1.0 + theta).log2();

        let outage = match dir {
            Direction::Ul => {
                let cu = self.factors.cross_self(Direction::Ul, 0);
                let exponent = -theta.sqrt() * theta.sqrt().atan()
                    - 4.0 * PI * PI * lam / (3.0 * 3.0f64.sqrt())
                        * (theta * cu * t.p_d / t.rho).powf(2.0 / 3.0);
                let si_den = 1.0 + t.beta_u * t.p_d * cu * theta / t.rho;
                1.0 - exponent.exp() / si_den
            }
            Direction::Dl => {
                let cd = self.factors.cross_self(Direction::Dl, 0);
                let succ = integrate_checked(
                    |r: f64| {
                        let q = (t.rho * r.powi(4) * theta * cd / t.p_d).sqrt();
                        let expo = -PI * lam * r * r * (1.0 + theta.sqrt() * theta.sqrt().atan())
                            - q * q.atan();
                        Ok(2.0 * PI * lam * r
                            * self.closed_form_unt(topology, theta, r, None)?
                            * expo.exp())
                    },
                    0.0,
                    tail_cutoff(0.0, lam),
                    &self.quad,
                )?;
                1.0 - succ
            }
        };
        let outage = outage.clamp(0.0, 1.0);
        Ok((outage, bw * spectral * (1.0 - outage)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{default_single_tier, UserClass};
    use proptest::prelude::*;

    fn engine() -> Engine {
        Engine::new(default_single_tier()).unwrap()
    }

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn class_probabilities_sum_to_one_and_match_limits() {
        let eng = engine();
        let (pc, pe) = eng.class_probabilities(0);
        assert_eq!(pc + pe, 1.0);
        assert!(pc > 0.0 && pc < 1.0);

        let mut cfg = default_single_tier();
        cfg.global.p_u_max = f64::INFINITY;
        let eng = Engine::new(cfg).unwrap();
        assert_eq!(eng.class_probabilities(0), (1.0, 0.0));

        let mut cfg = default_single_tier();
        cfg.global.p_u_max = 1e-30;
        let eng = Engine::new(cfg).unwrap();
        let (pc, _) = eng.class_probabilities(0);
        assert!(pc < 1e-9);
    }

    #[test]
    fn serving_pdfs_normalize() {
        let eng = engine();
        for class in [UserClass::Ccu, UserClass::Ceu, UserClass::Average] {
            let mass = integrate(
                |r| eng.serving_distance_pdf(0, class, r),
                0.0,
                f64::INFINITY,
                &quad(),
            )
            .unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "{class:?}: {mass}");
        }
    }

    #[test]
    fn untruncated_ccu_pdf_is_rayleigh_law() {
        let mut cfg = default_single_tier();
        cfg.global.p_u_max = f64::INFINITY;
        let eng = Engine::new(cfg).unwrap();
        let lam = eng.config().tiers[0].lambda;
        for &r in &[50.0, 300.0, 800.0] {
            let want = 2.0 * PI * lam * r * (-PI * lam * r * r).exp();
            let got = eng.serving_distance_pdf(0, UserClass::Ccu, r);
            assert!((got - want).abs() < 1e-15, "r={r}");
        }
    }

    #[test]
    fn lt_general_reduces_to_closed_eta4_form() {
        let lam = 1e-6;
        let p = 2.5;
        for &s in &[1e2f64, 1e4, 1e6] {
            let got = lt_ppp_general(s, lam, 4.0, Exclusion::None, &PowerDist::Constant(p), &quad())
                .unwrap();
            let want = (-PI * PI * lam / 2.0 * (s * p).sqrt()).exp();
            assert!((got - want).abs() < 1e-12 * want.max(1e-12), "s={s}");
        }
    }

    #[test]
    fn lt_general_matches_pgfl_quadrature() {
        // direct probability-generating-functional form:
        // exp(-2 pi lam int_a^inf (1 - 1/(1 + s P r^-eta)) r dr)
        let lam = 1e-6;
        let p = 2.5;
        for &(eta, a) in &[(4.0, 0.0), (4.0, 150.0), (3.5, 80.0)] {
            for &s in &[1e3f64, 1e5] {
                let got =
                    lt_ppp_general(s, lam, eta, Exclusion::Radius(a), &PowerDist::Constant(p), &quad())
                        .unwrap();
                let inner = integrate(
                    |r: f64| {
                        let x = s * p * r.powf(-eta);
                        x / (1.0 + x) * r
                    },
                    a,
                    f64::INFINITY,
                    &quad(),
                )
                .unwrap();
                let want = (-2.0 * PI * lam * inner).exp();
                assert!(
                    (got - want).abs() < 1e-8,
                    "eta={eta} a={a} s={s}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn lt_bound_equals_general_for_constant_power() {
        let lam = 1e-6;
        let p = 1.3;
        for &s in &[0.0f64, 1e3, 1e6] {
            let b = lt_ppp_bound(s, lam, 4.0, 120.0, p).unwrap();
            let g = lt_ppp_general(s, lam, 4.0, Exclusion::Radius(120.0), &PowerDist::Constant(p), &quad())
                .unwrap();
            assert!((b - g).abs() < 1e-10, "s={s}");
        }
    }

    #[test]
    fn lt_bound_is_lower_bound_for_two_point_power() {
        // mean-power substitution happens inside a convex exponent term,
        // so by Jensen it can only understate the transform
        let lam = 1e-6;
        let dist = PowerDist::TwoPoint {
            p_lo: 0.1,
            p_hi: 1.0,
            w_lo: 0.5,
        };
        let mean = dist.mean().unwrap();
        for i in 0..20 {
            let s = 10.0f64.powf(1.0 + 6.0 * i as f64 / 19.0);
            let exact =
                lt_ppp_general(s, lam, 4.0, Exclusion::Radius(100.0), &dist, &quad()).unwrap();
            let bound = lt_ppp_bound(s, lam, 4.0, 100.0, mean).unwrap();
            // epsilon covers quadrature error in the exact transform
            assert!(exact >= bound - 1e-9, "s={s}: exact {exact} < bound {bound}");
        }
    }

    #[test]
    fn lt_bound_rejects_zero_radius() {
        assert!(lt_ppp_bound(1.0, 1e-6, 4.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ul_power_moment_limits() {
        let eng = engine();
        assert_eq!(eng.ul_power_moment(0, 0.0).unwrap(), 1.0);

        // unbounded cap, eta = 4: E[P] = 2 rho / (pi lam)^2
        let mut cfg = default_single_tier();
        cfg.global.p_u_max = f64::INFINITY;
        let eng_inf = Engine::new(cfg).unwrap();
        let lam = eng_inf.config().lambda_bar(0);
        let rho = eng_inf.config().tiers[0].rho;
        let want = 2.0 * rho / (PI * lam).powi(2);
        let got = eng_inf.ul_power_moment(0, 1.0).unwrap();
        assert!((got / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ul_power_moment_matches_quadrature() {
        let eng = engine();
        let dist = eng.ul_power_dist(0);
        for &zeta in &[0.5f64, 1.0, 2.0 / 3.0] {
            let want = dist.expect(|p| Ok(p.powf(zeta)), &quad()).unwrap();
            let got = eng.ul_power_moment(0, zeta).unwrap();
            assert!((got / want - 1.0).abs() < 1e-8, "zeta={zeta}");
        }
    }

    #[test]
    fn lt_interference_is_one_at_zero() {
        let eng = engine();
        for kind in [LtKind::Uu, LtKind::Du, LtKind::Dd, LtKind::Ud] {
            for class in [UserClass::Ccu, UserClass::Ceu] {
                let v = eng.lt_interference(kind, class, 0, 0, 0.0, Some(150.0)).unwrap();
                assert_eq!(v, 1.0, "{kind:?}/{class:?}");
            }
        }
    }

    #[test]
    fn lt_interference_du_matches_free_form() {
        let eng = engine();
        let t = &eng.config().tiers[0];
        for &s in &[1e2f64, 1e5] {
            let got = eng.lt_interference(LtKind::Du, UserClass::Ccu, 0, 0, s, None).unwrap();
            let want = lt_ppp_general(
                s,
                t.lambda,
                eng.config().global.eta_du,
                Exclusion::None,
                &PowerDist::Constant(t.p_d),
                &quad(),
            )
            .unwrap();
            assert_eq!(got, want, "s={s}");
        }
    }

    #[test]
    fn lt_interference_requires_r_o_where_it_matters() {
        let eng = engine();
        assert!(eng.lt_interference(LtKind::Dd, UserClass::Ccu, 0, 0, 1.0, None).is_err());
        assert!(eng.lt_interference(LtKind::Uu, UserClass::Ceu, 0, 0, 1.0, None).is_err());
    }

    #[test]
    fn intracell_is_one_at_zero_and_below_one_after() {
        let eng = engine();
        for exact in [true, false] {
            assert_eq!(eng.intracell_lt(exact, 0, 200.0, 0.0).unwrap(), 1.0);
            let v = eng.intracell_lt(exact, 0, 200.0, 1e4).unwrap();
            assert!(v > 0.0 && v < 1.0, "exact={exact}: {v}");
        }
    }

    #[test]
    fn intracell_exact_close_to_approx_at_mean_distance() {
        let eng = engine();
        let lam = eng.config().lambda_bar(0);
        let r_o = 1.0 / (2.0 * lam.sqrt());
        for i in 0..10 {
            let s = 10.0f64.powf(2.0 + 6.0 * i as f64 / 9.0);
            let exact = eng.intracell_lt(true, 0, r_o, s).unwrap();
            let approx = eng.intracell_lt(false, 0, r_o, s).unwrap();
            assert!((exact - approx).abs() <= 0.05, "s={s}: {exact} vs {approx}");
        }
    }

    #[test]
    fn intracell_colocated_limit() {
        // r_o -> 0: the partner distance collapses to its own serving
        // distance r, so the exact form becomes a single expectation over r
        let eng = engine();
        let s = 1e4;
        let got = eng.intracell_lt(true, 0, 0.0, s).unwrap();
        let g = eng.config().global.clone();
        let t = &eng.config().tiers[0];
        let lam = eng.config().lambda_bar(0);
        let d = eng.config().ccu_radius(0);
        let ccu = integrate(
            |r: f64| {
                let w = 2.0 * PI * lam * r * (-PI * lam * r * r).exp();
                w / (1.0 + s * t.rho * r.powf(g.eta_dd) * r.powf(-g.eta_ud))
            },
            0.0,
            d,
            &quad(),
        )
        .unwrap();
        let ceu = integrate(
            |r: f64| {
                let w = 2.0 * PI * lam * r * (-PI * lam * (r * r - d * d)).exp() * (-PI * lam * d * d).exp();
                w / (1.0 + s * g.p_u_max * r.powf(-g.eta_ud))
            },
            d,
            (d * d + 34.0 / (PI * lam)).sqrt(),
            &quad(),
        )
        .unwrap();
        assert!((got - (ccu + ceu)).abs() < 1e-6, "{got} vs {}", ccu + ceu);
    }

    #[test]
    fn si_factor_trivial_cases() {
        let eng = engine();
        assert_eq!(eng.si_factor(Direction::Ul, 0, 0.0).unwrap(), 1.0);
        let mut cfg = default_single_tier();
        cfg.tiers[0].beta_u = 0.0;
        cfg.global.beta_d = 0.0;
        let eng0 = Engine::new(cfg).unwrap();
        assert_eq!(eng0.si_factor(Direction::Ul, 0, 5.0).unwrap(), 1.0);
        assert_eq!(eng0.si_factor(Direction::Dl, 0, 5.0).unwrap(), 1.0);
    }

    #[test]
    fn si_factor_exponential_matches_closed_denominator() {
        let eng = engine();
        let g = eng.config().global.clone();
        let t = eng.config().tiers[0].clone();
        let cu = eng.factors().cross_self(Direction::Ul, 0);
        let x = g.theta / t.rho;
        let got = eng.si_factor(Direction::Ul, 0, x).unwrap();
        let want = 1.0 / (1.0 + t.beta_u * t.p_d * cu * g.theta / t.rho);
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn si_factor_rician_matches_mgf_oracle() {
        let mut cfg = default_single_tier();
        cfg.global.si_model = SiModel::Rician { k: 5.0 };
        // make the SI term big enough to matter
        cfg.tiers[0].beta_u = 1e-3;
        let eng = Engine::new(cfg).unwrap();
        let t = eng.config().tiers[0].clone();
        let cu = eng.factors().cross_self(Direction::Ul, 0);
        for &x in &[1e-2f64, 1.0, 50.0] {
            let c = x * t.beta_u * t.p_d * cu;
            let got = eng.si_factor(Direction::Ul, 0, x).unwrap();
            // unit-mean Rician power MGF
            let k = 5.0;
            let want = (1.0 + k) / (1.0 + k + c) * (-k * c / (1.0 + k + c)).exp();
            assert!((got - want).abs() < 1e-7, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn si_factor_dl_three_node_is_one() {
        let mut cfg = default_single_tier();
        cfg.tiers[0].topology = Topology::ThreeNode;
        let eng = Engine::new(cfg).unwrap();
        assert_eq!(eng.si_factor(Direction::Dl, 0, 123.0).unwrap(), 1.0);
    }

    #[test]
    fn outage_limits_and_mixture() {
        let eng = engine();
        for dir in [Direction::Ul, Direction::Dl] {
            for class in [UserClass::Ccu, UserClass::Ceu] {
                let near_zero = eng.outage(0, dir, class, 1e-9).unwrap();
                let huge = eng.outage(0, dir, class, 1e9).unwrap();
                assert!(near_zero < 0.01, "{dir:?}/{class:?}: {near_zero}");
                assert!(huge > 0.99, "{dir:?}/{class:?}: {huge}");
            }
            let (pc, pe) = eng.class_probabilities(0);
            let avg = eng.outage(0, dir, UserClass::Average, 1.0).unwrap();
            let mix = pc * eng.outage(0, dir, UserClass::Ccu, 1.0).unwrap()
                + pe * eng.outage(0, dir, UserClass::Ceu, 1.0).unwrap();
            assert!((avg - mix).abs() < 1e-14, "{dir:?}");
        }
    }

    #[test]
    fn outage_monotone_in_theta() {
        let eng = engine();
        for dir in [Direction::Ul, Direction::Dl] {
            let mut prev = 0.0;
            for i in 0..8 {
                let theta = 10.0f64.powf(-2.0 + i as f64 * 0.7);
                let o = eng.outage(0, dir, UserClass::Average, theta).unwrap();
                assert!(o >= prev - 1e-9, "{dir:?} theta={theta}");
                prev = o;
            }
        }
    }

    #[test]
    fn rate_identity() {
        let eng = engine();
        let theta = 1.0;
        let o = eng.outage(0, Direction::Ul, UserClass::Average, theta).unwrap();
        let r = eng.rate(0, Direction::Ul, UserClass::Average, theta).unwrap();
        let bw = eng.factors().plan(0).bandwidth(Direction::Ul);
        assert!((r - bw * (2.0f64).log2() * (1.0 - o)).abs() < 1e-9);
    }

    #[test]
    fn dl_outage_nondecreasing_in_beta_d() {
        let mut prev = 0.0;
        for &db in &[-110.0, -95.0, -80.0, -65.0, -50.0] {
            let mut cfg = default_single_tier();
            cfg.global.beta_d = crate::params::db_to_linear(db);
            let eng = Engine::new(cfg).unwrap();
            let o = eng.outage(0, Direction::Dl, UserClass::Average, 1.0).unwrap();
            assert!(o >= prev - 1e-9, "beta_d={db} dB: {o} < {prev}");
            prev = o;
        }
    }

    #[test]
    fn three_node_dl_rate_nondecreasing_in_delta_o() {
        let mut prev = 0.0;
        for &deg in &[0.0, 30.0, 60.0, 90.0] {
            let mut cfg = default_single_tier();
            cfg.tiers[0].topology = Topology::ThreeNode;
            cfg.global.delta_o = deg * PI / 180.0;
            let eng = Engine::new(cfg).unwrap();
            let r = eng.rate(0, Direction::Dl, UserClass::Average, 1.0).unwrap();
            assert!(r >= prev - 1e-9, "delta_o={deg}: {r} < {prev}");
            prev = r;
        }
    }

    fn dense_cfg() -> crate::params::NetworkConfig {
        // effectively unbounded power cap for the closed-form regime
        let mut cfg = default_single_tier();
        cfg.global.p_u_max = 1e12;
        cfg
    }

    #[test]
    fn closed_form_preconditions_enforced() {
        let mut cfg = default_single_tier();
        cfg.global.eta_du = 3.5;
        let eng = Engine::new(cfg).unwrap();
        let err = eng
            .closed_form_single_tier(Direction::Ul, Topology::TwoNode, 1.0)
            .unwrap_err();
        assert!(err.to_string().contains("eta_du"));

        // bounded power cap -> cell-edge users exist -> rejected
        let eng = engine();
        let err = eng
            .closed_form_single_tier(Direction::Ul, Topology::TwoNode, 1.0)
            .unwrap_err();
        assert!(err.to_string().contains("power cap"));
    }

    #[test]
    fn closed_form_ul_reduces_when_cross_terms_vanish() {
        let mut cfg = dense_cfg();
        cfg.tiers[0].alpha = 0.0; // |C~_u|^2 ~ 2e-11
        cfg.tiers[0].beta_u = 0.0;
        let eng = Engine::new(cfg).unwrap();
        let theta = 1.0;
        let (o, _) = eng
            .closed_form_single_tier(Direction::Ul, Topology::TwoNode, theta)
            .unwrap();
        let want = 1.0 - (-theta.sqrt() * theta.sqrt().atan()).exp();
        assert!((o - want).abs() < 1e-6, "{o} vs {want}");
    }

    #[test]
    fn closed_form_matches_general_engine() {
        let theta = 1.0;
        for topology in [Topology::TwoNode, Topology::ThreeNode] {
            let mut cfg = dense_cfg();
            cfg.tiers[0].topology = topology;
            let eng = Engine::new(cfg).unwrap().with_method(LtMethod::Exact);
            for dir in [Direction::Ul, Direction::Dl] {
                let (o_closed, _) = eng.closed_form_single_tier(dir, topology, theta).unwrap();
                let o_general = eng.outage(0, dir, UserClass::Ccu, theta).unwrap();
                assert!(
                    (o_closed - o_general).abs() < 1e-3,
                    "{topology:?}/{dir:?}: closed {o_closed} vs general {o_general}"
                );
            }
        }
    }

    #[test]
    fn closed_form_unt_branches_agree() {
        let mut cfg = dense_cfg();
        cfg.tiers[0].topology = Topology::ThreeNode;
        let exact = Engine::new(cfg.clone()).unwrap().with_method(LtMethod::Exact);
        let approx = Engine::new(cfg).unwrap().with_method(LtMethod::Bounded);
        // mean-value substitution degrades as theta * r_o^4 grows; the grid
        // stays inside its validity region (well below the 500 m mean
        // serving distance for large theta)
        let grid: &[(f64, f64)] = &[
            (0.5, 100.0),
            (0.5, 200.0),
            (0.5, 300.0),
            (1.0, 100.0),
            (1.0, 200.0),
            (1.0, 300.0),
            (4.0, 100.0),
            (4.0, 200.0),
        ];
        for &(theta, r_o) in grid {
            let e = exact.closed_form_unt(Topology::ThreeNode, theta, r_o, None).unwrap();
            let a = approx.closed_form_unt(Topology::ThreeNode, theta, r_o, None).unwrap();
            assert!((e - a).abs() <= 0.05, "theta={theta} r_o={r_o}: {e} vs {a}");
        }
    }

    #[test]
    fn critical_beta_d_values() {
        let lam = 20e-6; // 20 BS/km^2 in m^-2
        assert_eq!(critical_beta_d(None, lam), 16.0 * lam * lam / 9.0);
        // monotone decreasing in r_o: farther users need less DL SIC in 2NT
        let mut prev = f64::INFINITY;
        for &r in &[50.0, 100.0, 200.0, 400.0] {
            let b = critical_beta_d(Some(r), lam);
            assert!(b < prev);
            prev = b;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lt_general_in_unit_interval_and_decreasing(
            log_s in 0.0f64..8.0,
            eta in 2.5f64..6.0,
            a in 0.0f64..500.0,
        ) {
            let s = 10.0f64.powf(log_s);
            let p = PowerDist::Constant(1.0);
            let v1 = lt_ppp_general(s, 1e-6, eta, Exclusion::Radius(a), &p, &quad()).unwrap();
            let v2 = lt_ppp_general(2.0 * s, 1e-6, eta, Exclusion::Radius(a), &p, &quad()).unwrap();
            prop_assert!(v1 > 0.0 && v1 <= 1.0);
            prop_assert!(v2 <= v1 + 1e-12);
        }

        #[test]
        fn class_probabilities_always_sum_to_one(
            lam_km2 in 0.1f64..50.0,
            p_max in 0.01f64..100.0,
        ) {
            let mut cfg = default_single_tier();
            cfg.tiers[0].lambda = lam_km2 * 1e-6;
            cfg.global.p_u_max = p_max;
            let eng = Engine::new(cfg).unwrap();
            let (pc, pe) = eng.class_probabilities(0);
            prop_assert_eq!(pc + pe, 1.0);
        }
    }
}
