//! Prints the normalized same-mode and cross-mode received-energy factors
//! for the default single-tier network across the overlap fraction alpha.
//!
//! Run with: cargo run --example pulse_overlap_factors

use alpha_duplex::params::{default_single_tier, Direction};
use alpha_duplex::spectral::FactorSet;

fn main() -> alpha_duplex::Result<()> {
    let cfg = default_single_tier();
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "alpha", "|I~_u|^2", "|C~_u|^2", "|I~_d|^2", "|C~_d|^2");
    for i in 0..=20 {
        let mut tiers = cfg.tiers.clone();
        tiers[0].alpha = i as f64 / 20.0;
        let fs = FactorSet::compute(&tiers, &cfg.band)?;
        println!(
            "{:>6.2} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6e}",
            tiers[0].alpha,
            fs.intra(Direction::Ul, 0, 0),
            fs.cross_self(Direction::Ul, 0),
            fs.intra(Direction::Dl, 0, 0),
            fs.cross_self(Direction::Dl, 0),
        );
    }
    Ok(())
}
