//! Configuration-driven front end: parameter sweeps over the analytical
//! engine and the Monte Carlo simulator, CSV emission, and
//! analytic-vs-simulation comparison reports.
//!
//! Config files are TOML with explicit units in the key names
//! (`lambda_per_km2`, `beta_d_db`, `rho_dbm`, ...); everything is converted
//! to linear SI units once, at load. The run manifest echoes the resolved
//! linear values so every emitted number is reproducible by calling the
//! library directly.

use crate::analytics::{critical_beta_d, Engine, LtMethod};
use crate::error::{Error, Result};
use crate::mcsim::{Metric, SimBatch, Simulator};
use crate::params::{
    db_to_linear, dbm_to_watts, per_km2_to_per_m2, BandGlobals, Direction, GlobalParams,
    NetworkConfig, SiModel, TierParams, Topology, UserClass,
};
use crate::spectral::PulseKind;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ALPHA_DUPLEX_OUT_DIR";

// ---------------------------------------------------------------------------
// config file schema

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Alpha,
    BetaDDb,
    LambdaPerKm2,
    DeltaODeg,
    Theta,
    ServingDistanceM,
}

impl SweepAxis {
    fn key(self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::BetaDDb => "beta_d_db",
            SweepAxis::LambdaPerKm2 => "lambda_per_km2",
            SweepAxis::DeltaODeg => "delta_o_deg",
            SweepAxis::Theta => "theta",
            SweepAxis::ServingDistanceM => "serving_distance_m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMetric {
    Rate,
    Outage,
    CriticalBetaD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    Exact,
    Bounded,
}

impl From<MethodSpec> for LtMethod {
    fn from(m: MethodSpec) -> LtMethod {
        match m {
            MethodSpec::Exact => LtMethod::Exact,
            MethodSpec::Bounded => LtMethod::Bounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileConfig {
    pub network: FileNetwork,
    pub band: FileBand,
    #[serde(rename = "tier")]
    pub tiers: Vec<FileTier>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<FileSweep>,
    #[serde(default, rename = "output", skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<FileOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<FileMc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileNetwork {
    pub p_u_max_w: f64,
    pub beta_d_db: f64,
    pub n0_w: f64,
    pub eta_uu: f64,
    pub eta_dd: f64,
    pub eta_ud: f64,
    pub eta_du: f64,
    pub delta_o_deg: f64,
    pub si_model: SiModel,
    /// SINR threshold, linear.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileBand {
    pub b_u_hd_hz: f64,
    pub b_d_hd_hz: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileTier {
    pub lambda_per_km2: f64,
    pub p_d_w: f64,
    pub rho_dbm: f64,
    pub tau: f64,
    pub alpha: f64,
    pub pulse_ul: PulseKind,
    pub pulse_dl: PulseKind,
    pub beta_u_db: f64,
    pub topology: Topology,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSweep {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileOutput {
    #[serde(default)]
    pub tier: usize,
    pub direction: Direction,
    pub class: UserClass,
    /// Overrides the tier's topology for this slice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Topology>,
    /// Overrides the tier's overlap fraction for this slice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodSpec>,
    pub metric: OutputMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileMc {
    pub n: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_area_km2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ue_per_bs: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn to_network(&self) -> Result<NetworkConfig> {
        let n = &self.network;
        let cfg = NetworkConfig {
            global: GlobalParams {
                p_u_max: n.p_u_max_w,
                beta_d: db_to_linear(n.beta_d_db),
                n0: n.n0_w,
                eta_uu: n.eta_uu,
                eta_dd: n.eta_dd,
                eta_ud: n.eta_ud,
                eta_du: n.eta_du,
                delta_o: n.delta_o_deg.to_radians(),
                si_model: n.si_model,
                theta: n.theta,
            },
            band: BandGlobals {
                b_u_hd: self.band.b_u_hd_hz,
                b_d_hd: self.band.b_d_hd_hz,
                epsilon: self.band.epsilon,
            },
            tiers: self
                .tiers
                .iter()
                .map(|t| TierParams {
                    lambda: per_km2_to_per_m2(t.lambda_per_km2),
                    p_d: t.p_d_w,
                    rho: dbm_to_watts(t.rho_dbm),
                    tau: t.tau,
                    alpha: t.alpha,
                    pulse_ul: t.pulse_ul,
                    pulse_dl: t.pulse_dl,
                    beta_u: db_to_linear(t.beta_u_db),
                    topology: t.topology,
                })
                .collect(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Table-style default configuration, including a rate-vs-alpha sweep over
/// the six standard link slices with simulation enabled.
pub fn default_file_config() -> FileConfig {
    let outputs = [
        (Direction::Dl, UserClass::Ccu, Topology::TwoNode),
        (Direction::Dl, UserClass::Ceu, Topology::TwoNode),
        (Direction::Dl, UserClass::Ccu, Topology::ThreeNode),
        (Direction::Dl, UserClass::Ceu, Topology::ThreeNode),
        (Direction::Ul, UserClass::Ccu, Topology::TwoNode),
        (Direction::Ul, UserClass::Ceu, Topology::TwoNode),
    ]
    .into_iter()
    .map(|(direction, class, topology)| FileOutput {
        tier: 0,
        direction,
        class,
        topology: Some(topology),
        alpha: None,
        method: None,
        metric: OutputMetric::Rate,
    })
    .collect();
    FileConfig {
        network: FileNetwork {
            p_u_max_w: 3.0,
            beta_d_db: -75.0,
            n0_w: 0.0,
            eta_uu: 4.0,
            eta_dd: 4.0,
            eta_ud: 4.0,
            eta_du: 3.0,
            delta_o_deg: 90.0,
            si_model: SiModel::Exponential,
            theta: 1.0,
        },
        band: FileBand {
            b_u_hd_hz: 1e6,
            b_d_hd_hz: 1e6,
            epsilon: 0.03134,
        },
        tiers: vec![FileTier {
            lambda_per_km2: 1.0,
            p_d_w: 5.0,
            rho_dbm: -60.0,
            tau: 1.0,
            alpha: 1.0,
            pulse_ul: PulseKind::SincSquared,
            pulse_dl: PulseKind::Sinc,
            beta_u_db: -110.0,
            topology: Topology::TwoNode,
        }],
        sweep: Some(FileSweep {
            axis: SweepAxis::Alpha,
            grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
        }),
        outputs,
        mc: Some(FileMc {
            n: 10_000,
            seed: 1,
            window_area_km2: None,
            ue_per_bs: None,
        }),
    }
}

/// The default configuration as TOML text.
pub fn defaults_text() -> String {
    toml::to_string_pretty(&default_file_config()).expect("default config serializes")
}

// ---------------------------------------------------------------------------
// sweep execution

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    /// Overrides the config's realization count; 0 disables simulation.
    pub mc_n: Option<usize>,
    pub seed: Option<u64>,
    /// Overrides every output's transform method.
    pub method: Option<LtMethod>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub warnings: usize,
}

struct Row {
    v: f64,
    analytic: f64,
    alternate: f64,
    sim: Option<(f64, f64)>,
}

fn dir_name(d: Direction) -> &'static str {
    match d {
        Direction::Ul => "ul",
        Direction::Dl => "dl",
    }
}

fn class_name(c: UserClass) -> &'static str {
    match c {
        UserClass::Ccu => "ccu",
        UserClass::Ceu => "ceu",
        UserClass::Average => "average",
    }
}

fn topo_name(t: Topology) -> &'static str {
    match t {
        Topology::TwoNode => "2nt",
        Topology::ThreeNode => "3nt",
    }
}

fn metric_name(m: OutputMetric) -> &'static str {
    match m {
        OutputMetric::Rate => "rate",
        OutputMetric::Outage => "outage",
        OutputMetric::CriticalBetaD => "critical_beta_d",
    }
}

fn apply_axis(cfg: &mut NetworkConfig, axis: SweepAxis, tier: usize, v: f64) {
    match axis {
        SweepAxis::Alpha => {
            for t in &mut cfg.tiers {
                t.alpha = v;
            }
        }
        SweepAxis::BetaDDb => cfg.global.beta_d = db_to_linear(v),
        SweepAxis::LambdaPerKm2 => cfg.tiers[tier].lambda = per_km2_to_per_m2(v),
        SweepAxis::DeltaODeg => cfg.global.delta_o = v.to_radians(),
        SweepAxis::Theta => cfg.global.theta = v,
        // the serving distance is not a network parameter; it enters the
        // critical-threshold formula directly
        SweepAxis::ServingDistanceM => {}
    }
}

fn slice_filename(out: &FileOutput, axis: SweepAxis, topo: Topology, method: LtMethod) -> String {
    let alpha_tag = out
        .alpha
        .map(|a| format!("_alpha{a}"))
        .unwrap_or_default();
    format!(
        "{}_vs_{}_tier{}_{}_{}_{}{}_{}.csv",
        metric_name(out.metric),
        axis.key(),
        out.tier,
        dir_name(out.direction),
        class_name(out.class),
        topo_name(topo),
        alpha_tag,
        match method {
            LtMethod::Exact => "exact",
            LtMethod::Bounded => "bounded",
        },
    )
}

#[derive(Serialize)]
struct Manifest<'a> {
    config_file: String,
    axis: SweepAxis,
    grid: &'a [f64],
    mc: Option<&'a FileMc>,
    files: &'a [String],
    /// Fully resolved parameters, linear SI units (W, Hz, m^-2, radians).
    resolved: &'a NetworkConfig,
}

/// Execute a sweep config: one CSV per output slice plus `manifest.toml`.
/// Numerical failures in single cells are emitted as NaN with a warning on
/// stderr; the run continues.
pub fn run(config_path: &Path, opts: &RunOptions) -> Result<RunSummary> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| Error::config(format!("{}: {e}", config_path.display())))?;
    let file = FileConfig::parse(&text)
        .map_err(|e| Error::config(format!("{}: {e}", config_path.display())))?;
    let base = file.to_network()?;

    let sweep = file
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("run requires a [sweep] section"))?;
    if sweep.grid.is_empty() {
        return Err(Error::config("sweep.grid must be nonempty"));
    }
    if !sweep.grid.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::config("sweep.grid must be sorted ascending"));
    }
    if file.outputs.is_empty() {
        return Err(Error::config("at least one [[output]] slice is required"));
    }
    for (i, o) in file.outputs.iter().enumerate() {
        if o.tier >= base.tiers.len() {
            return Err(Error::config(format!(
                "output[{i}].tier = {} but the config has {} tier(s)",
                o.tier,
                base.tiers.len()
            )));
        }
        if sweep.axis == SweepAxis::ServingDistanceM && o.metric != OutputMetric::CriticalBetaD {
            return Err(Error::config(format!(
                "output[{i}]: serving-distance sweeps only support the critical_beta_d metric"
            )));
        }
        if o.class == UserClass::Average && o.metric == OutputMetric::CriticalBetaD {
            // harmless, but the class is meaningless for this metric
        }
    }

    let mut mc = file.mc.clone();
    if let Some(n) = opts.mc_n {
        if n == 0 {
            mc = None;
        } else {
            let m = mc.get_or_insert(FileMc {
                n,
                seed: 0,
                window_area_km2: None,
                ue_per_bs: None,
            });
            m.n = n;
        }
    }
    if let (Some(seed), Some(m)) = (opts.seed, mc.as_mut()) {
        m.seed = seed;
    }

    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)?;

    let mut warnings = 0usize;
    let warn = |w: &mut usize, msg: String| {
        eprintln!("warning: {msg}");
        *w += 1;
    };

    let mut rows: Vec<Vec<Row>> = (0..file.outputs.len()).map(|_| Vec::new()).collect();
    for &v in &sweep.grid {
        // simulation batches shared by every slice with the same resolved
        // network at this grid point
        let mut cache: HashMap<(usize, Topology, u64), std::rc::Rc<SimBatch>> = HashMap::new();
        for (oi, out) in file.outputs.iter().enumerate() {
            let mut cfg = base.clone();
            let topo = out.topology.unwrap_or(cfg.tiers[out.tier].topology);
            cfg.tiers[out.tier].topology = topo;
            if let Some(a) = out.alpha {
                cfg.tiers[out.tier].alpha = a;
            }
            apply_axis(&mut cfg, sweep.axis, out.tier, v);
            let method = opts.method.or(out.method.map(LtMethod::from)).unwrap_or(LtMethod::Bounded);
            let theta = cfg.global.theta;

            let (analytic, alternate) = match out.metric {
                OutputMetric::CriticalBetaD => {
                    let r_o = (sweep.axis == SweepAxis::ServingDistanceM).then_some(v);
                    let b = critical_beta_d(r_o, cfg.tiers[out.tier].lambda);
                    (b, b)
                }
                _ => {
                    let eval = |m: LtMethod| -> Result<f64> {
                        let eng = Engine::new(cfg.clone())?.with_method(m);
                        match out.metric {
                            OutputMetric::Rate => eng.rate(out.tier, out.direction, out.class, theta),
                            OutputMetric::Outage => {
                                eng.outage(out.tier, out.direction, out.class, theta)
                            }
                            OutputMetric::CriticalBetaD => unreachable!(),
                        }
                    };
                    let other = match method {
                        LtMethod::Exact => LtMethod::Bounded,
                        LtMethod::Bounded => LtMethod::Exact,
                    };
                    let a = eval(method).unwrap_or_else(|e| {
                        warn(&mut warnings, format!("{} at {v}: {e}", metric_name(out.metric)));
                        f64::NAN
                    });
                    let alt = eval(other).unwrap_or(f64::NAN);
                    (a, alt)
                }
            };

            let sim = match (&mc, out.metric) {
                (Some(m), OutputMetric::Rate | OutputMetric::Outage) => {
                    let key = (out.tier, topo, cfg.tiers[out.tier].alpha.to_bits());
                    let batch = if let Some(b) = cache.get(&key) {
                        Some(b.clone())
                    } else {
                        let build = || -> Result<SimBatch> {
                            let mut s = Simulator::new(cfg.clone())?;
                            if let Some(a) = m.window_area_km2 {
                                s = s.with_window_area(a * 1e6)?;
                            }
                            if let Some(u) = m.ue_per_bs {
                                s = s.with_ue_per_bs(u)?;
                            }
                            s.simulate(out.tier, m.n, m.seed)
                        };
                        match build() {
                            Ok(b) => {
                                let b = std::rc::Rc::new(b);
                                cache.insert(key, b.clone());
                                Some(b)
                            }
                            Err(e) => {
                                warn(&mut warnings, format!("simulation at {v}: {e}"));
                                None
                            }
                        }
                    };
                    batch.and_then(|b| {
                        let metric = match out.metric {
                            OutputMetric::Rate => Metric::Rate,
                            _ => Metric::Outage,
                        };
                        match b.estimate(out.direction, out.class, theta, metric) {
                            Ok(e) => Some((e.mean, e.ci_halfwidth)),
                            Err(e) => {
                                warn(&mut warnings, format!("estimate at {v}: {e}"));
                                Some((f64::NAN, f64::NAN))
                            }
                        }
                    })
                }
                _ => None,
            };
            rows[oi].push(Row { v, analytic, alternate, sim });
        }
    }

    // emit
    let mut files = Vec::new();
    let mut names = Vec::new();
    for (oi, out) in file.outputs.iter().enumerate() {
        let topo = out.topology.unwrap_or(base.tiers[out.tier].topology);
        let method = opts.method.or(out.method.map(LtMethod::from)).unwrap_or(LtMethod::Bounded);
        let name = slice_filename(out, sweep.axis, topo, method);
        let path = out_dir.join(&name);
        let slice = &rows[oi];
        let distinct = slice.iter().any(|r| {
            let scale = r.analytic.abs().max(r.alternate.abs()).max(1e-300);
            (r.analytic - r.alternate).abs() > 1e-12 * scale
                || r.analytic.is_nan() != r.alternate.is_nan()
        });
        let with_sim = slice.iter().any(|r| r.sim.is_some());
        let mut text = String::new();
        text.push_str(sweep.axis.key());
        text.push_str(",analytic");
        if distinct {
            text.push_str(",alternate");
        }
        if with_sim {
            text.push_str(",sim_mean,sim_ci");
        }
        text.push('\n');
        for r in slice {
            text.push_str(&format!("{},{}", r.v, r.analytic));
            if distinct {
                text.push_str(&format!(",{}", r.alternate));
            }
            if with_sim {
                let (m, ci) = r.sim.unwrap_or((f64::NAN, f64::NAN));
                text.push_str(&format!(",{m},{ci}"));
            }
            text.push('\n');
        }
        fs::write(&path, text)?;
        files.push(path);
        names.push(name);
    }

    let manifest_path = out_dir.join("manifest.toml");
    let manifest = Manifest {
        config_file: config_path.display().to_string(),
        axis: sweep.axis,
        grid: &sweep.grid,
        mc: mc.as_ref(),
        files: &names,
        resolved: &base,
    };
    fs::write(
        &manifest_path,
        toml::to_string_pretty(&manifest).map_err(|e| Error::config(e.to_string()))?,
    )?;

    Ok(RunSummary { files, manifest: manifest_path, warnings })
}

// ---------------------------------------------------------------------------
// comparison report

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub points: usize,
    pub max_abs_deviation: f64,
    pub within_ci: usize,
    pub threshold: f64,
}

impl CompareReport {
    pub fn fraction_within(&self) -> f64 {
        self.within_ci as f64 / self.points as f64
    }

    pub fn pass(&self) -> bool {
        self.fraction_within() >= self.threshold
    }
}

fn parse_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::config(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| {
            Error::config(format!("{} row {}: {e}", path.display(), i + 2))
        })?;
        if row.len() != header.len() {
            return Err(Error::config(format!(
                "{} row {}: {} fields, header has {}",
                path.display(),
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

fn find_col(header: &[String], names: &[&str]) -> Option<usize> {
    names
        .iter()
        .find_map(|n| header.iter().position(|h| h == n))
}

/// Compare an analytic sweep CSV against a simulated one on the same grid:
/// maximum absolute deviation and the fraction of points where the analytic
/// value lies within the simulation's confidence interval.
pub fn compare(a: &Path, b: &Path, threshold: f64) -> Result<CompareReport> {
    let (ha, ra) = parse_csv(a)?;
    let (hb, rb) = parse_csv(b)?;
    let col_a = find_col(&ha, &["analytic", "sim_mean"])
        .ok_or_else(|| Error::config(format!("{}: no analytic or sim_mean column", a.display())))?;
    let col_b = find_col(&hb, &["sim_mean", "analytic"])
        .ok_or_else(|| Error::config(format!("{}: no sim_mean or analytic column", b.display())))?;
    let ci_b = find_col(&hb, &["sim_ci"]);

    if ra.len() != rb.len() {
        return Err(Error::config(format!(
            "grid mismatch: {} rows vs {} rows",
            ra.len(),
            rb.len()
        )));
    }
    let mut mismatched = Vec::new();
    for (i, (x, y)) in ra.iter().zip(&rb).enumerate() {
        let scale = x[0].abs().max(y[0].abs()).max(1e-300);
        if (x[0] - y[0]).abs() > 1e-9 * scale {
            mismatched.push(i + 2); // 1-based with header
        }
    }
    if !mismatched.is_empty() {
        return Err(Error::config(format!(
            "grid mismatch at rows {mismatched:?}"
        )));
    }

    let mut max_dev = 0.0f64;
    let mut within = 0usize;
    for (x, y) in ra.iter().zip(&rb) {
        let va = x[col_a];
        let vb = y[col_b];
        let dev = (va - vb).abs();
        if dev.is_finite() {
            max_dev = max_dev.max(dev);
        }
        let ci = ci_b.map(|c| y[c]).unwrap_or(0.0);
        if dev <= ci || dev == 0.0 {
            within += 1;
        }
    }
    Ok(CompareReport {
        points: ra.len(),
        max_abs_deviation: max_dev,
        within_ci: within,
        threshold,
    })
}

// ---------------------------------------------------------------------------
// argument parsing / entry point

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Bounded,
}

#[derive(Parser)]
#[command(
    name = "alpha-duplex",
    version,
    about = "Outage/rate analysis and Monte Carlo simulation of partially overlapped uplink/downlink duplexing"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a sweep config: one CSV per output slice plus a manifest
    Run {
        config: PathBuf,
        /// Output directory (default: $ALPHA_DUPLEX_OUT_DIR, then cwd)
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the Monte Carlo realization count; 0 disables simulation
        #[arg(long)]
        mc_n: Option<usize>,
        /// Override the Monte Carlo root seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the interference-transform method for all slices
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Compare an analytic sweep CSV against a simulated one
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Minimum fraction of points within the confidence interval
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
    },
    /// Print the default configuration (Table-style single tier)
    Defaults,
}

/// Binary entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { config, out_dir, mc_n, seed, method } => {
            let opts = RunOptions {
                out_dir,
                mc_n,
                seed,
                method: method.map(|m| match m {
                    MethodArg::Exact => LtMethod::Exact,
                    MethodArg::Bounded => LtMethod::Bounded,
                }),
            };
            match run(&config, &opts) {
                Ok(summary) => {
                    for f in &summary.files {
                        println!("wrote {}", f.display());
                    }
                    println!("wrote {}", summary.manifest.display());
                    if summary.warnings > 0 {
                        eprintln!("{} warning(s)", summary.warnings);
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Cmd::Compare { a, b, threshold } => match compare(&a, &b, threshold) {
            Ok(report) => {
                println!("points: {}", report.points);
                println!("max abs deviation: {}", report.max_abs_deviation);
                println!(
                    "within CI: {}/{} ({:.1}%)",
                    report.within_ci,
                    report.points,
                    100.0 * report.fraction_within()
                );
                if report.pass() {
                    println!("PASS (threshold {})", report.threshold);
                    0
                } else {
                    println!("FAIL (threshold {})", report.threshold);
                    1
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Cmd::Defaults => {
            print!("{}", defaults_text());
            0
        }
    }
}
