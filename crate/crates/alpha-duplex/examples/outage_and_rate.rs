//! Tabulates outage probability and rate for the default single-tier
//! network: both link directions, both user classes, and both downlink
//! topologies (residual self-interference at the device vs. a scheduled
//! uplink partner in the same cell).
//!
//! Run with: cargo run --example outage_and_rate

use alpha_duplex::analytics::Engine;
use alpha_duplex::params::{default_single_tier, Direction, Topology, UserClass};

fn main() -> alpha_duplex::Result<()> {
    let theta = 1.0;
    println!(
        "{:<10} {:<8} {:<8} {:>10} {:>14}",
        "topology", "dir", "class", "outage", "rate [bit/s]"
    );
    for topology in [Topology::TwoNode, Topology::ThreeNode] {
        let mut cfg = default_single_tier();
        cfg.tiers[0].topology = topology;
        let eng = Engine::new(cfg)?;
        let (p_ccu, p_ceu) = eng.class_probabilities(0);
        for dir in [Direction::Ul, Direction::Dl] {
            for class in [UserClass::Ccu, UserClass::Ceu, UserClass::Average] {
                let o = eng.outage(0, dir, class, theta)?;
                let r = eng.rate(0, dir, class, theta)?;
                println!(
                    "{:<10} {:<8} {:<8} {:>10.6} {:>14.1}",
                    format!("{topology:?}"),
                    format!("{dir:?}"),
                    format!("{class:?}"),
                    o,
                    r
                );
            }
        }
        println!(
            "  (class mix: {:.1}% power-controlled, {:.1}% capped at P_u)\n",
            100.0 * p_ccu,
            100.0 * p_ceu
        );
    }
    println!(
        "The uplink does not depend on the downlink topology; the downlink\n\
         differs because the near-end interferer changes (own transmitter\n\
         vs. the paired uplink user elsewhere in the cell)."
    );
    Ok(())
}
