//! Monte Carlo network simulator. Realizes Poisson base-station fields with
//! dense uniform user drops, biased association, truncated channel-inversion
//! power control and pair scheduling, then measures per-link SINR directly
//! from the sampled geometry with fresh fading draws. Shares only the
//! configuration and spectral-factor types (plus low-level special
//! functions) with the analytical engine, so the two act as independent
//! cross-checks.
//!
//! The measured link is always the scheduled pair of the cell whose base
//! station lies nearest the window center; interference is summed over the
//! whole window with no wrap-around, so the center link sees a (nearly)
//! unclipped interference field while edge cells act only as interferers.
//! In the three-node topology the downlink-role user of that center cell is
//! the one measured.
//!
//! The uplink interferers and the three-node in-cell partner can
//! alternatively be drawn under [`FieldMode::Assumed`], which replaces the
//! realized processes by the independent marginal laws the closed-form
//! analysis assumes; see [`FieldMode`] for why the two differ by a few
//! percent.

use crate::error::{Error, Result};
use crate::params::{Direction, NetworkConfig, SiModel, Topology, UserClass};
use crate::specfun::{gamma, lower_incomplete_gamma};
use crate::spectral::FactorSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;

/// Default simulation window, m^2.
pub const DEFAULT_WINDOW_AREA: f64 = 600e6;
/// Default mean number of candidate users per base station.
pub const DEFAULT_UE_PER_BS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bs {
    pub pos: [f64; 2],
    pub tier: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ue {
    pub pos: [f64; 2],
    pub serving_bs: u32,
    pub dist: f64,
    pub class: UserClass,
    /// Uplink transmit power: rho * dist^eta_dd for a cell-center user,
    /// the cap for a cell-edge user.
    pub tx_power: f64,
}

/// One sampled network: geometry, association, power control and per-cell
/// scheduling. Fading is not part of the realization; it is drawn fresh per
/// SINR sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub seed: u64,
    pub bs: Vec<Bs>,
    pub ue: Vec<Ue>,
    /// Scheduled (UL user, DL user) of each cell, indexed like `bs`. The two
    /// indices coincide in the two-node topology. `None` marks a cell that
    /// could not assemble a valid schedule (counted in `inactive_cells`).
    pub sched: Vec<Option<(u32, u32)>>,
    /// Three-node cells that attempted pair scheduling.
    pub sched_cells: u32,
    /// Of those, how many accepted their very first random pair.
    pub sched_first_try: u32,
    /// Users added by per-cell resampling to reach two candidates.
    pub refilled_ues: u32,
    pub inactive_cells: u32,
}

/// One measured link with its full energy budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    pub direction: Direction,
    pub tier: usize,
    pub user_class: UserClass,
    pub topology: Topology,
    pub signal: f64,
    pub interference_dd: f64,
    pub interference_uu: f64,
    pub interference_ud: f64,
    pub interference_du: f64,
    pub residual_si: f64,
    pub noise: f64,
    pub sinr: f64,
}

impl SinrSample {
    pub fn denominator(&self) -> f64 {
        self.interference_dd
            + self.interference_uu
            + self.interference_ud
            + self.interference_du
            + self.residual_si
            + self.noise
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub mean: f64,
    /// 95% normal-approximation halfwidth, 1.96 * stderr.
    pub ci_halfwidth: f64,
    /// Number of realizations that entered the estimate.
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Outage,
    Rate,
}

/// How the near-end interference populations are produced.
///
/// The analytical expressions idealize two populations: interfering uplink
/// users become an independent Poisson field with i.i.d. channel-inversion
/// powers and a power-implied exclusion (and stations an unthinned Poisson
/// field around the tagged receiver), and the three-node in-cell partner
/// gets an independent Rayleigh-law distance and a uniform scheduling angle.
/// The realized process is different in both respects: one transmitter per
/// cell is more regular than Poisson (a faithful simulation sits a few
/// percent above the analytical uplink rate), and a realized partner shares
/// its cell geometry with the tagged user (pushing the downlink a few
/// percent below — both through the partner's own geometry and because the
/// angle-constrained pair selection skews the accepted DL user's position
/// within its cell toward closely packed neighbor stations). `Assumed`
/// draws exactly the idealized marginals instead (and measures a uniformly
/// chosen user), which isolates the correctness of the transforms and
/// integrals from the modelling gap; `Realized` (the default) measures the
/// true process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldMode {
    /// Sum interference over the actually scheduled transmitters (default).
    #[default]
    Realized,
    /// Draw the uplink interferer field and the three-node partner from the
    /// marginal laws assumed analytically.
    Assumed,
}

// ---------------------------------------------------------------------------
// sampling helpers

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    // Knuth's product-of-uniforms method, chunked so exp(-mean) never
    // underflows.
    let mut count = 0usize;
    let mut remaining = mean;
    while remaining > 0.0 {
        let m = remaining.min(500.0);
        remaining -= m;
        let limit = (-m).exp();
        let mut p = 1.0;
        loop {
            p *= rng.gen::<f64>();
            if p <= limit {
                break;
            }
            count += 1;
        }
    }
    count
}

/// Unit-mean exponential fading power gain.
fn exp_fade(rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

/// Unit-mean self-interference power gain under the configured model.
fn si_gain(rng: &mut ChaCha8Rng, model: SiModel) -> f64 {
    match model {
        SiModel::Constant => 1.0,
        SiModel::Exponential => exp_fade(rng),
        SiModel::Rician { k } => {
            // |LOS + scatter|^2 with E = 1: Box-Muller for the scatter part.
            let u1 = 1.0 - rng.gen::<f64>();
            let u2 = rng.gen::<f64>();
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            let sigma = (0.5 / (1.0 + k)).sqrt();
            let mu = (k / (1.0 + k)).sqrt();
            let x = mu + sigma * r * c;
            let y = sigma * r * s;
            x * x + y * y
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// cos of the angle subtended at `apex` by `a` and `b`.
fn cos_angle(apex: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let v = [a[0] - apex[0], a[1] - apex[1]];
    let w = [b[0] - apex[0], b[1] - apex[1]];
    let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let nw = (w[0] * w[0] + w[1] * w[1]).sqrt();
    if nv == 0.0 || nw == 0.0 {
        return 1.0; // degenerate: treat as zero separation
    }
    ((v[0] * w[0] + v[1] * w[1]) / (nv * nw)).clamp(-1.0, 1.0)
}

// ---------------------------------------------------------------------------
// spatial index for biased nearest-station queries

struct Grid {
    h: f64,
    m: usize,
    half: f64,
    buckets: Vec<Vec<u32>>,
}

impl Grid {
    fn build(bs: &[Bs], side: f64) -> Grid {
        // about one station per bucket
        let m = ((bs.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let h = side / m as f64;
        let half = side / 2.0;
        let mut buckets = vec![Vec::new(); m * m];
        let mut g = Grid { h, m, half, buckets: Vec::new() };
        for (i, b) in bs.iter().enumerate() {
            let (cx, cy) = g.cell_of(b.pos);
            buckets[cy * m + cx].push(i as u32);
        }
        g.buckets = buckets;
        g
    }

    fn cell_of(&self, p: [f64; 2]) -> (usize, usize) {
        let clamp = |x: f64| (((x + self.half) / self.h) as usize).min(self.m - 1);
        (clamp(p[0]), clamp(p[1]))
    }

    /// Station minimizing tau_tier * distance, with the winning distance.
    fn nearest(&self, p: [f64; 2], bs: &[Bs], tau: &[f64], tau_min: f64) -> (u32, f64) {
        let (cx, cy) = self.cell_of(p);
        let mut best = u32::MAX;
        let mut best_w = f64::INFINITY;
        let mut best_d = f64::INFINITY;
        for ring in 0..=self.m {
            // stations in ring r are at least (r-1) buckets away
            if best != u32::MAX && (ring as f64 - 1.0) * self.h * tau_min >= best_w {
                break;
            }
            let lo_x = cx.saturating_sub(ring);
            let hi_x = (cx + ring).min(self.m - 1);
            let lo_y = cy.saturating_sub(ring);
            let hi_y = (cy + ring).min(self.m - 1);
            for gy in lo_y..=hi_y {
                for gx in lo_x..=hi_x {
                    // perimeter of the ring only; inner cells were already
                    // scanned on earlier passes
                    let cheb = gx.abs_diff(cx).max(gy.abs_diff(cy));
                    if cheb != ring {
                        continue;
                    }
                    for &i in &self.buckets[gy * self.m + gx] {
                        let b = &bs[i as usize];
                        let d = dist(p, b.pos);
                        let w = tau[b.tier] * d;
                        if w < best_w {
                            best_w = w;
                            best_d = d;
                            best = i;
                        }
                    }
                }
            }
        }
        (best, best_d)
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: NetworkConfig,
    factors: FactorSet,
    window_area: f64,
    ue_per_bs: f64,
    field_mode: FieldMode,
}

impl Simulator {
    pub fn new(cfg: NetworkConfig) -> Result<Simulator> {
        cfg.validate()?;
        let factors = FactorSet::compute(&cfg.tiers, &cfg.band)?;
        Ok(Simulator {
            cfg,
            factors,
            window_area: DEFAULT_WINDOW_AREA,
            ue_per_bs: DEFAULT_UE_PER_BS,
            field_mode: FieldMode::Realized,
        })
    }

    /// Select how the idealized interference populations are produced; see
    /// [`FieldMode`].
    pub fn with_field_mode(mut self, mode: FieldMode) -> Simulator {
        self.field_mode = mode;
        self
    }

    pub fn with_window_area(mut self, area: f64) -> Result<Simulator> {
        if !(area > 0.0) {
            return Err(Error::domain("window area must be positive"));
        }
        self.window_area = area;
        Ok(self)
    }

    pub fn with_ue_per_bs(mut self, n: f64) -> Result<Simulator> {
        if !(n >= 2.0) {
            return Err(Error::domain("need at least two candidate users per station on average"));
        }
        self.ue_per_bs = n;
        Ok(self)
    }

    /// Replace the spectral factor table, e.g. with cross-mode leakage
    /// suppressed for an idealized half-duplex baseline.
    pub fn with_factors(mut self, factors: FactorSet) -> Simulator {
        self.factors = factors;
        self
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn factors(&self) -> &FactorSet {
        &self.factors
    }

    /// Deterministic realization for `seed` (stream 0 of that seed; the
    /// batch estimator uses stream i for realization i of its root seed, so
    /// `realize(seed)` reproduces realization 0 of `simulate(.., seed)`).
    pub fn realize(&self, seed: u64) -> Result<NetworkRealization> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        self.realize_with_rng(seed, &mut rng)
    }

    fn classify(&self, tier: usize, r: f64) -> (UserClass, f64) {
        let g = &self.cfg.global;
        let p = self.cfg.tiers[tier].rho * r.powf(g.eta_dd);
        if p <= g.p_u_max {
            (UserClass::Ccu, p)
        } else {
            (UserClass::Ceu, g.p_u_max)
        }
    }

    fn realize_with_rng(&self, seed: u64, rng: &mut ChaCha8Rng) -> Result<NetworkRealization> {
        let area = self.window_area;
        let side = area.sqrt();
        let half = side / 2.0;
        let g = &self.cfg.global;
        let ntier = self.cfg.tiers.len();

        let mut bs = Vec::new();
        for (k, t) in self.cfg.tiers.iter().enumerate() {
            let n = poisson(rng, t.lambda * area);
            for _ in 0..n {
                bs.push(Bs {
                    pos: [rng.gen::<f64>() * side - half, rng.gen::<f64>() * side - half],
                    tier: k,
                });
            }
        }
        if bs.is_empty() {
            return Err(Error::NoConvergence {
                what: "empty base-station field; enlarge the window or raise the intensity".into(),
                terms: 0,
            });
        }
        let grid = Grid::build(&bs, side);
        let tau: Vec<f64> = self.cfg.tiers.iter().map(|t| t.tau).collect();
        let tau_min = tau.iter().cloned().fold(f64::INFINITY, f64::min);
        let lam_tot: f64 = self.cfg.tiers.iter().map(|t| t.lambda).sum();

        let mut ue: Vec<Ue> = Vec::new();
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); bs.len()];
        let n_ue = poisson(rng, self.ue_per_bs * lam_tot * area);
        for _ in 0..n_ue {
            let pos = [rng.gen::<f64>() * side - half, rng.gen::<f64>() * side - half];
            let (b, r) = grid.nearest(pos, &bs, &tau, tau_min);
            let (class, p) = self.classify(bs[b as usize].tier, r);
            members[b as usize].push(ue.len() as u32);
            ue.push(Ue { pos, serving_bs: b, dist: r, class, tx_power: p });
        }

        // Resample candidates for cells that came up short. Sampling near
        // the station and keeping only points that associate to it leaves
        // the within-cell distribution uniform.
        let mut refilled = 0u32;
        let draw_in_cell = |rng: &mut ChaCha8Rng, b: usize, attempts: usize| -> Option<(f64, [f64; 2])> {
            let mut w = grid.h.min(side);
            for a in 0..attempts {
                if a > 0 && a % 200 == 0 {
                    w = (w * 2.0).min(side);
                }
                let pos = [
                    bs[b].pos[0] + (rng.gen::<f64>() * 2.0 - 1.0) * w,
                    bs[b].pos[1] + (rng.gen::<f64>() * 2.0 - 1.0) * w,
                ];
                if pos[0].abs() > half || pos[1].abs() > half {
                    continue;
                }
                let (bb, r) = grid.nearest(pos, &bs, &tau, tau_min);
                if bb as usize == b {
                    return Some((r, pos));
                }
            }
            None
        };
        for b in 0..bs.len() {
            while members[b].len() < 2 {
                match draw_in_cell(rng, b, 2000) {
                    Some((r, pos)) => {
                        let (class, p) = self.classify(bs[b].tier, r);
                        members[b].push(ue.len() as u32);
                        ue.push(Ue { pos, serving_bs: b as u32, dist: r, class, tx_power: p });
                        refilled += 1;
                    }
                    // association region effectively empty (possible under
                    // strong bias): leave the cell understaffed
                    None => break,
                }
            }
        }

        let cos_do = g.delta_o.cos();
        let mut sched: Vec<Option<(u32, u32)>> = Vec::with_capacity(bs.len());
        let mut sched_cells = 0u32;
        let mut sched_first_try = 0u32;
        let mut inactive = 0u32;
        for b in 0..bs.len() {
            let mut m = members[b].clone();
            let topology = self.cfg.tiers[bs[b].tier].topology;
            let pair: Option<(u32, u32)> = match topology {
                Topology::TwoNode => {
                    if m.is_empty() {
                        None
                    } else {
                        let i = m[rng.gen_range(0..m.len())];
                        Some((i, i))
                    }
                }
                Topology::ThreeNode => {
                    if m.len() < 2 {
                        None
                    } else {
                        sched_cells += 1;
                        let mut chosen = None;
                        for attempt in 0..64 {
                            let i = rng.gen_range(0..m.len());
                            let j0 = rng.gen_range(0..m.len() - 1);
                            let j = if j0 >= i { j0 + 1 } else { j0 };
                            let ok = cos_angle(
                                bs[b].pos,
                                ue[m[i] as usize].pos,
                                ue[m[j] as usize].pos,
                            ) <= cos_do;
                            if ok {
                                if attempt == 0 {
                                    sched_first_try += 1;
                                }
                                chosen = Some((m[i], m[j]));
                                break;
                            }
                        }
                        if chosen.is_none() {
                            // rejection ran dry: pick uniformly among all
                            // qualifying pairs, if any exist
                            let mut quals = Vec::new();
                            for a in 0..m.len() {
                                for c in a + 1..m.len() {
                                    if cos_angle(
                                        bs[b].pos,
                                        ue[m[a] as usize].pos,
                                        ue[m[c] as usize].pos,
                                    ) <= cos_do
                                    {
                                        quals.push((m[a], m[c]));
                                    }
                                }
                            }
                            if !quals.is_empty() {
                                let (x, y) = quals[rng.gen_range(0..quals.len())];
                                chosen = Some(if rng.gen::<bool>() { (x, y) } else { (y, x) });
                            }
                        }
                        if chosen.is_none() {
                            // no qualifying pair among the candidates: draw
                            // fresh users until one partners with an
                            // existing candidate at the required angle
                            for _ in 0..200 {
                                let Some((r, pos)) = draw_in_cell(rng, b, 200) else {
                                    break;
                                };
                                let (class, p) = self.classify(bs[b].tier, r);
                                let idx = ue.len() as u32;
                                ue.push(Ue { pos, serving_bs: b as u32, dist: r, class, tx_power: p });
                                refilled += 1;
                                let partner = m.iter().copied().find(|&q| {
                                    cos_angle(bs[b].pos, ue[q as usize].pos, pos) <= cos_do
                                });
                                m.push(idx);
                                if let Some(q) = partner {
                                    chosen = Some(if rng.gen::<bool>() { (idx, q) } else { (q, idx) });
                                    break;
                                }
                            }
                        }
                        chosen
                    }
                }
            };
            if pair.is_none() {
                inactive += 1;
            }
            sched.push(pair);
        }

        debug_assert!(ntier >= 1);
        Ok(NetworkRealization {
            seed,
            bs,
            ue,
            sched,
            sched_cells,
            sched_first_try,
            refilled_ues: refilled,
            inactive_cells: inactive,
        })
    }

    /// Index of the measured cell for `tier`: the scheduled base station of
    /// that tier closest to the window center.
    pub fn tagged_cell(&self, rz: &NetworkRealization, tier: usize) -> Result<usize> {
        rz.bs
            .iter()
            .enumerate()
            .filter(|(i, b)| b.tier == tier && rz.sched[*i].is_some())
            .min_by(|(_, a), (_, b)| {
                let na = a.pos[0] * a.pos[0] + a.pos[1] * a.pos[1];
                let nb = b.pos[0] * b.pos[0] + b.pos[1] * b.pos[1];
                na.total_cmp(&nb)
            })
            .map(|(i, _)| i)
            .ok_or_else(|| Error::domain("no scheduled cell of the requested tier in the window"))
    }

    /// Measure the tagged link of `tier` in direction `dir`, drawing fresh
    /// fades from `rng`.
    pub fn compute_sinr(
        &self,
        rz: &NetworkRealization,
        tier: usize,
        dir: Direction,
        rng: &mut ChaCha8Rng,
    ) -> Result<SinrSample> {
        let b = self.tagged_cell(rz, tier)?;
        let (ul_ue, dl_ue) = rz.sched[b].expect("tagged cell is scheduled");
        let g = &self.cfg.global;
        let t = &self.cfg.tiers[tier];
        let f = &self.factors;

        let mut i_dd = 0.0;
        let mut i_uu = 0.0;
        let mut i_ud = 0.0;
        let mut i_du = 0.0;

        match dir {
            Direction::Ul if self.field_mode == FieldMode::Assumed => {
                self.ul_sample_assumed(tier, rng)
            }
            Direction::Ul => {
                let me = &rz.ue[ul_ue as usize];
                let rx = rz.bs[b].pos;
                let signal = me.tx_power * exp_fade(rng) * me.dist.powf(-g.eta_uu);
                for (j, other) in rz.bs.iter().enumerate() {
                    if j == b {
                        continue;
                    }
                    let k = other.tier;
                    i_du += self.cfg.tiers[k].p_d
                        * exp_fade(rng)
                        * dist(other.pos, rx).powf(-g.eta_du)
                        * f.cross(Direction::Ul, tier, k);
                    if let Some((ulj, _)) = rz.sched[j] {
                        let u = &rz.ue[ulj as usize];
                        i_uu += u.tx_power
                            * exp_fade(rng)
                            * dist(u.pos, rx).powf(-g.eta_uu)
                            * f.intra(Direction::Ul, tier, k);
                    }
                }
                let si = t.beta_u
                    * si_gain(rng, g.si_model)
                    * t.p_d
                    * f.cross_self(Direction::Ul, tier);
                let denom = i_uu + i_du + si + g.n0;
                Ok(SinrSample {
                    direction: dir,
                    tier,
                    user_class: me.class,
                    topology: t.topology,
                    signal,
                    interference_dd: 0.0,
                    interference_uu: i_uu,
                    interference_ud: 0.0,
                    interference_du: i_du,
                    residual_si: si,
                    noise: g.n0,
                    sinr: signal / denom,
                })
            }
            Direction::Dl => {
                // The analysis measures the typical (uniformly chosen) user.
                // The realized pair selection is angle-constrained, which
                // skews the accepted DL user's angular position within the
                // cell toward closely packed neighbor stations (the partner
                // must sit at least delta_o away, and the opposite-side cell
                // mass is smallest in the direction the cell extends), so in
                // Assumed mode the measured user is redrawn uniformly from
                // the cell's candidates.
                let me = if self.field_mode == FieldMode::Assumed
                    && t.topology == Topology::ThreeNode
                {
                    let members: Vec<u32> = (0..rz.ue.len() as u32)
                        .filter(|&u| rz.ue[u as usize].serving_bs == b as u32)
                        .collect();
                    &rz.ue[members[rng.gen_range(0..members.len())] as usize]
                } else {
                    &rz.ue[dl_ue as usize]
                };
                let rx = me.pos;
                let signal = t.p_d * exp_fade(rng) * me.dist.powf(-g.eta_dd);
                for (j, other) in rz.bs.iter().enumerate() {
                    if j == b {
                        continue;
                    }
                    let k = other.tier;
                    i_dd += self.cfg.tiers[k].p_d
                        * exp_fade(rng)
                        * dist(other.pos, rx).powf(-g.eta_dd)
                        * f.intra(Direction::Dl, tier, k);
                    if self.field_mode == FieldMode::Realized {
                        if let Some((ulj, _)) = rz.sched[j] {
                            let u = &rz.ue[ulj as usize];
                            i_ud += u.tx_power
                                * exp_fade(rng)
                                * dist(u.pos, rx).powf(-g.eta_ud)
                                * f.cross(Direction::Dl, tier, k);
                        }
                    }
                }
                if self.field_mode == FieldMode::Assumed {
                    // other-cell uplink interferers from the assumed marginal
                    // law (the realized one-per-cell process both is more
                    // regular than Poisson and violates the exclusion ball
                    // around far-out cell-edge victims)
                    i_ud += self.assumed_ul_interference(
                        me.class,
                        me.dist,
                        g.eta_ud,
                        |k| f.cross(Direction::Dl, tier, k),
                        rng,
                    )?;
                }
                let si = match t.topology {
                    Topology::ThreeNode => {
                        // the in-cell UL partner interferes over the air; no
                        // residual self-interference at a half-duplex user
                        let (p, d) = if self.field_mode == FieldMode::Assumed {
                            // draw the partner from the marginal laws the
                            // analysis assumes: an independent Rayleigh-law
                            // serving distance and a scheduling angle uniform
                            // over the admissible arc, instead of the realized
                            // partner that shares the cell geometry
                            use std::f64::consts::PI;
                            let lam_bar = self.cfg.lambda_bar(tier);
                            let r_p =
                                (-(1.0 - rng.gen::<f64>()).ln() / (PI * lam_bar)).sqrt();
                            let (_, p) = self.classify(tier, r_p);
                            let delta = g.delta_o + rng.gen::<f64>() * (PI - g.delta_o);
                            let d2 = r_p * r_p + me.dist * me.dist
                                - 2.0 * r_p * me.dist * delta.cos();
                            (p, d2.sqrt())
                        } else {
                            let partner = &rz.ue[ul_ue as usize];
                            (partner.tx_power, dist(partner.pos, rx))
                        };
                        i_ud += p
                            * exp_fade(rng)
                            * d.powf(-g.eta_ud)
                            * f.cross_self(Direction::Dl, tier);
                        0.0
                    }
                    Topology::TwoNode => {
                        g.beta_d
                            * si_gain(rng, g.si_model)
                            * me.tx_power
                            * f.cross_self(Direction::Dl, tier)
                    }
                };
                let denom = i_dd + i_ud + si + g.n0;
                Ok(SinrSample {
                    direction: dir,
                    tier,
                    user_class: me.class,
                    topology: t.topology,
                    signal,
                    interference_dd: i_dd,
                    interference_uu: 0.0,
                    interference_ud: i_ud,
                    interference_du: 0.0,
                    residual_si: si,
                    noise: g.n0,
                    sinr: signal / denom,
                })
            }
        }
    }

    /// Uplink sample drawn from the marginal laws the analytical expressions
    /// assume (see [`FieldMode::Assumed`]): Rayleigh-law serving distance for
    /// the tagged user, a Poisson disc of constant-power stations with no
    /// exclusion, and a Poisson disc of uplink users with i.i.d. truncated
    /// channel-inversion powers excluded inside the power-implied radius
    /// (tagged cell-center user) or the tagged serving distance (cell-edge).
    fn ul_sample_assumed(&self, tier: usize, rng: &mut ChaCha8Rng) -> Result<SinrSample> {
        use std::f64::consts::PI;
        let g = &self.cfg.global;
        let t = &self.cfg.tiers[tier];
        let f = &self.factors;
        let lam_bar = self.cfg.lambda_bar(tier);

        let r_o = (-(1.0 - rng.gen::<f64>()).ln() / (PI * lam_bar)).sqrt();
        let (class, _) = self.classify(tier, r_o);
        let signal = match class {
            // channel inversion pins the received power at the target
            UserClass::Ccu => t.rho * exp_fade(rng),
            _ => g.p_u_max * exp_fade(rng) * r_o.powf(-g.eta_uu),
        };

        // The synthetic field is not tied to the realized window; sample it
        // out to four window radii so the truncated remainder (mean-
        // compensated below) is a small, effectively deterministic residue
        // even for path exponents near 2.
        let r_field = 4.0 * (self.window_area / PI).sqrt();
        let mut i_du = 0.0;
        for (k, tk) in self.cfg.tiers.iter().enumerate() {
            let mean = tk.lambda * PI * r_field * r_field;
            let cross = f.cross(Direction::Ul, tier, k);
            for _ in 0..poisson(rng, mean) {
                let x = r_field * rng.gen::<f64>().sqrt();
                i_du += tk.p_d * exp_fade(rng) * x.powf(-g.eta_du) * cross;
            }
            // Mean compensation for the field beyond the sampled disc:
            // that aggregate is a sum of very many weak terms, so it is
            // effectively deterministic. Matters for path exponents near 2.
            let ring = 2.0 * PI * tk.lambda;
            i_du += cross * tk.p_d * ring / (g.eta_du - 2.0) * r_field.powf(2.0 - g.eta_du);
        }
        let i_uu = self.assumed_ul_interference(
            class,
            r_o,
            g.eta_uu,
            |k| f.intra(Direction::Ul, tier, k),
            rng,
        )?;
        let si = t.beta_u
            * si_gain(rng, g.si_model)
            * t.p_d
            * f.cross_self(Direction::Ul, tier);
        let denom = i_uu + i_du + si + g.n0;
        Ok(SinrSample {
            direction: Direction::Ul,
            tier,
            user_class: class,
            topology: t.topology,
            signal,
            interference_dd: 0.0,
            interference_uu: i_uu,
            interference_ud: 0.0,
            interference_du: i_du,
            residual_si: si,
            noise: g.n0,
            sinr: signal / denom,
        })
    }

    /// Aggregate interference from the uplink-user population drawn from the
    /// marginal laws the analysis assumes: per tier, a Poisson disc of users
    /// with i.i.d. truncated channel-inversion powers, excluded inside the
    /// power-implied radius (cell-center victim) or the victim's serving
    /// distance (cell-edge victim). `eta` is the path-loss exponent toward
    /// the victim and `factor(k)` the spectral overlap weight of tier `k`.
    /// The field beyond four window radii enters as its deterministic mean.
    fn assumed_ul_interference(
        &self,
        victim_class: UserClass,
        r_o: f64,
        eta: f64,
        factor: impl Fn(usize) -> f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<f64> {
        use std::f64::consts::PI;
        let r_field = 4.0 * (self.window_area / PI).sqrt();
        let mut total = 0.0;
        for (k, tk) in self.cfg.tiers.iter().enumerate() {
            let fac = factor(k);
            let mean = tk.lambda * PI * r_field * r_field;
            let lam_bar_k = self.cfg.lambda_bar(k);
            for _ in 0..poisson(rng, mean) {
                let x = r_field * rng.gen::<f64>().sqrt();
                let r_s = (-(1.0 - rng.gen::<f64>()).ln() / (PI * lam_bar_k)).sqrt();
                let (_, p) = self.classify(k, r_s);
                let excl = match victim_class {
                    UserClass::Ccu => (p / tk.rho).powf(1.0 / eta),
                    _ => r_o,
                };
                if x <= excl {
                    continue;
                }
                total += p * exp_fade(rng) * x.powf(-eta) * fac;
            }
            // deterministic mean of the truncated far field
            let ring = 2.0 * PI * tk.lambda;
            total += fac * self.mean_ul_power(k)? * ring / (eta - 2.0) * r_field.powf(2.0 - eta);
        }
        Ok(total)
    }

    /// Mean uplink transmit power of tier `k`: truncated channel inversion
    /// over a Rayleigh-law serving distance.
    fn mean_ul_power(&self, k: usize) -> Result<f64> {
        use std::f64::consts::PI;
        let g = &self.cfg.global;
        let t = &self.cfg.tiers[k];
        let lam_bar = self.cfg.lambda_bar(k);
        let shape = g.eta_dd / 2.0 + 1.0;
        let scale = (PI * lam_bar).powf(g.eta_dd / 2.0);
        if g.p_u_max.is_infinite() {
            return Ok(t.rho * gamma(shape) / scale);
        }
        let d = self.cfg.ccu_radius(k);
        let x = PI * lam_bar * d * d;
        Ok(t.rho * lower_incomplete_gamma(shape, x)? / scale + g.p_u_max * (-x).exp())
    }

    /// Run `n` independent realizations and record both directions of the
    /// tagged link of `tier`. Realization i uses stream i of the root seed,
    /// so results are bit-identical regardless of thread count.
    pub fn simulate(&self, tier: usize, n: usize, seed: u64) -> Result<SimBatch> {
        if n == 0 {
            return Err(Error::domain("need at least one realization"));
        }
        if tier >= self.cfg.tiers.len() {
            return Err(Error::domain("tier index out of range"));
        }
        let per: Result<Vec<_>> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let rz = self.realize_with_rng(seed, &mut rng)?;
                let ul = self.compute_sinr(&rz, tier, Direction::Ul, &mut rng)?;
                let dl = self.compute_sinr(&rz, tier, Direction::Dl, &mut rng)?;
                Ok(((ul, dl), (rz.sched_first_try, rz.sched_cells)))
            })
            .collect();
        let per = per?;
        let mut samples = Vec::with_capacity(n);
        let mut first_try = 0u64;
        let mut cells = 0u64;
        for ((ul, dl), (ft, c)) in per {
            samples.push((ul, dl));
            first_try += ft as u64;
            cells += c as u64;
        }
        Ok(SimBatch {
            tier,
            seed,
            bw_ul: self.factors.plan(tier).bandwidth(Direction::Ul),
            bw_dl: self.factors.plan(tier).bandwidth(Direction::Dl),
            samples,
            sched_first_try: first_try,
            sched_cells: cells,
        })
    }

    /// Empirical outage probability or rate of one link slice with a 95%
    /// confidence interval. Class-specific slices keep only realizations
    /// where the tagged user fell in that class.
    pub fn estimate(
        &self,
        tier: usize,
        dir: Direction,
        class: UserClass,
        theta: f64,
        metric: Metric,
        n: usize,
        seed: u64,
    ) -> Result<EstimateWithCI> {
        if n < 100 {
            return Err(Error::domain("need at least 100 realizations for a meaningful interval"));
        }
        self.simulate(tier, n, seed)?.estimate(dir, class, theta, metric)
    }
}

/// Samples from one batch of realizations, reusable across slices and
/// thresholds.
#[derive(Debug, Clone)]
pub struct SimBatch {
    pub tier: usize,
    pub seed: u64,
    pub bw_ul: f64,
    pub bw_dl: f64,
    /// (UL sample, DL sample) per realization, in realization order.
    pub samples: Vec<(SinrSample, SinrSample)>,
    pub sched_first_try: u64,
    pub sched_cells: u64,
}

impl SimBatch {
    pub fn estimate(
        &self,
        dir: Direction,
        class: UserClass,
        theta: f64,
        metric: Metric,
    ) -> Result<EstimateWithCI> {
        if !(theta > 0.0) {
            return Err(Error::domain("estimate requires theta > 0"));
        }
        let bw = match dir {
            Direction::Ul => self.bw_ul,
            Direction::Dl => self.bw_dl,
        };
        let eff = bw * (1.0 + theta).log2();
        let mut n = 0u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for (ul, dl) in &self.samples {
            let s = match dir {
                Direction::Ul => ul,
                Direction::Dl => dl,
            };
            if class != UserClass::Average && s.user_class != class {
                continue;
            }
            let v = match metric {
                Metric::Outage => {
                    if s.sinr < theta {
                        1.0
                    } else {
                        0.0
                    }
                }
                Metric::Rate => {
                    if s.sinr >= theta {
                        eff
                    } else {
                        0.0
                    }
                }
            };
            n += 1;
            sum += v;
            sumsq += v * v;
        }
        if n == 0 {
            return Err(Error::domain(format!(
                "no realization produced a tagged {class:?} user; raise n"
            )));
        }
        let mean = sum / n as f64;
        let var = if n > 1 {
            ((sumsq - sum * mean) / (n - 1) as f64).max(0.0)
        } else {
            0.0
        };
        Ok(EstimateWithCI {
            mean,
            ci_halfwidth: 1.96 * (var / n as f64).sqrt(),
            n,
        })
    }

    /// Fraction of three-node cells whose first random pair already met the
    /// angular constraint.
    pub fn scheduler_acceptance(&self) -> f64 {
        if self.sched_cells == 0 {
            f64::NAN
        } else {
            self.sched_first_try as f64 / self.sched_cells as f64
        }
    }

    /// One record per realization per direction, delimited text with a
    /// header row.
    pub fn write_raw<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "realization,direction,tier,class,topology,signal,i_dd,i_uu,i_ud,i_du,residual_si,noise,sinr"
        )?;
        for (i, (ul, dl)) in self.samples.iter().enumerate() {
            for s in [ul, dl] {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    i,
                    match s.direction {
                        Direction::Ul => "ul",
                        Direction::Dl => "dl",
                    },
                    s.tier,
                    match s.user_class {
                        UserClass::Ccu => "ccu",
                        UserClass::Ceu => "ceu",
                        UserClass::Average => "average",
                    },
                    match s.topology {
                        Topology::TwoNode => "2nt",
                        Topology::ThreeNode => "3nt",
                    },
                    s.signal,
                    s.interference_dd,
                    s.interference_uu,
                    s.interference_ud,
                    s.interference_du,
                    s.residual_si,
                    s.noise,
                    s.sinr
                )?;
            }
        }
        Ok(())
    }
}
