//! Sweeps the minimum scheduling angle between the downlink user and its
//! in-cell uplink partner (three-node topology) and shows how angular
//! separation recovers downlink rate, comparing the exact in-cell
//! interference transform against its closed-form approximation.
//!
//! Run with: cargo run --release --example scheduling_angle

use alpha_duplex::analytics::{Engine, LtMethod};
use alpha_duplex::params::{default_single_tier, Direction, Topology, UserClass};
use std::f64::consts::PI;

fn main() -> alpha_duplex::Result<()> {
    let theta = 1.0;
    let mut cfg = default_single_tier();
    cfg.tiers[0].topology = Topology::ThreeNode;

    // reference: two-node downlink with perfect on-device cancellation,
    // i.e. a downlink that pays no price at all for the full-duplex uplink
    let mut ideal = default_single_tier();
    ideal.global.beta_d = 0.0;
    let two_node = Engine::new(ideal)?.rate(0, Direction::Dl, UserClass::Average, theta)?;

    println!(
        "{:>12} {:>14} {:>14} {:>12}",
        "delta_o [deg]", "exact [bit/s]", "approx [bit/s]", "vs ideal 2NT"
    );
    for deg in [0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 89.0] {
        let mut c = cfg.clone();
        c.global.delta_o = deg * PI / 180.0;
        let exact = Engine::new(c.clone())?
            .with_method(LtMethod::Exact)
            .rate(0, Direction::Dl, UserClass::Average, theta)?;
        let approx = Engine::new(c)?
            .with_method(LtMethod::Bounded)
            .rate(0, Direction::Dl, UserClass::Average, theta)?;
        println!(
            "{:>12.0} {:>14.1} {:>14.1} {:>11.1}%",
            deg,
            exact,
            approx,
            100.0 * exact / two_node
        );
    }
    println!(
        "\nperfect-cancellation two-node reference: {two_node:.1} bit/s.\n\
         Forcing the uplink partner toward the opposite cell half (larger\n\
         delta_o) shrinks the three-node deficit from ~20% to a few percent,\n\
         without needing any cancellation hardware in the device."
    );
    Ok(())
}
