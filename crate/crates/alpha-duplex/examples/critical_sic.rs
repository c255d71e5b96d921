//! Locates the self-interference cancellation level at which serving the
//! downlink alongside an in-cell uplink partner (three-node) starts to beat
//! letting the device transmit and receive simultaneously (two-node).
//!
//! Two checks:
//!  1. conditioned on a fixed serving distance, bisect the crossing of the
//!     two closed-form near-end-interference factors and compare against
//!     the closed-form critical residual-SI expression;
//!  2. for the network-wide average downlink rate, bisect the crossing of
//!     the two topologies and compare against the distance-free limit
//!     16 lambda^2 / 9.
//!
//! Run with: cargo run --release --example critical_sic

use alpha_duplex::analytics::{critical_beta_d, Engine, LtMethod};
use alpha_duplex::params::{
    default_single_tier, linear_to_db, Direction, Topology, UserClass,
};

/// Bisect `f` (increasing in beta_d expressed in dB) for its zero.
fn bisect_db(mut f: impl FnMut(f64) -> alpha_duplex::Result<f64>) -> alpha_duplex::Result<f64> {
    let (mut lo, mut hi) = (-150.0, -60.0);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    assert!(
        flo < 0.0 && fhi > 0.0,
        "no sign change on [-150, -60] dB (flo={flo}, fhi={fhi})"
    );
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn main() -> alpha_duplex::Result<()> {
    // the closed forms assume every user is power-controlled (no cap)
    let mut cfg = default_single_tier();
    cfg.global.p_u_max = f64::INFINITY;
    let lambda = cfg.tiers[0].lambda;
    let theta = cfg.global.theta;

    println!("-- fixed serving distance --");
    println!(
        "{:>8} {:>16} {:>16} {:>16}",
        "r_o [m]", "closed form [dB]", "bisect bnd [dB]", "bisect exact [dB]"
    );
    for r_o in [100.0, 250.0, 500.0, 750.0] {
        let closed = linear_to_db(critical_beta_d(Some(r_o), lambda));
        let find = |method: LtMethod| -> alpha_duplex::Result<f64> {
            let eng = Engine::new(cfg.clone())?.with_method(method);
            let u_3nt = eng.closed_form_unt(Topology::ThreeNode, theta, r_o, None)?;
            bisect_db(|bd_db| {
                let b = alpha_duplex::params::db_to_linear(bd_db);
                let u_2nt = eng.closed_form_unt(Topology::TwoNode, theta, r_o, Some(b))?;
                // positive once residual SI is bad enough for 3NT to win
                Ok(u_3nt - u_2nt)
            })
        };
        println!(
            "{:>8.0} {:>16.2} {:>16.2} {:>16.2}",
            r_o,
            closed,
            find(LtMethod::Bounded)?,
            find(LtMethod::Exact)?
        );
    }

    println!("\n-- network-wide average downlink rate --");
    let crossing = bisect_db(|bd_db| {
        let mut c = cfg.clone();
        c.global.beta_d = alpha_duplex::params::db_to_linear(bd_db);
        let mut rate = |topo| -> alpha_duplex::Result<f64> {
            c.tiers[0].topology = topo;
            Engine::new(c.clone())?.rate(0, Direction::Dl, UserClass::Average, theta)
        };
        Ok(rate(Topology::ThreeNode)? - rate(Topology::TwoNode)?)
    })?;
    let limit = linear_to_db(critical_beta_d(None, lambda));
    println!("rate crossing at beta_d = {crossing:.2} dB");
    println!("distance-free closed-form limit 16 lambda^2 / 9 = {limit:.2} dB");
    println!(
        "\nBelow the crossing, on-device cancellation is good enough that the\n\
         two-node downlink wins; above it the three-node layout is better."
    );
    Ok(())
}
