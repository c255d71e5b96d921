//! Shows how the UL/DL band geometry evolves with the overlap fraction
//! alpha: effective bandwidths grow one-sided into the guard band and the
//! partner band, while the center-frequency separation shrinks.
//!
//! Run with: cargo run --example band_plan

use alpha_duplex::params::default_single_tier;
use alpha_duplex::spectral::make_band_plan;

fn main() -> alpha_duplex::Result<()> {
    let band = default_single_tier().band;
    println!(
        "{:>6} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "alpha", "B_u [Hz]", "B_d [Hz]", "f_u center", "f_d center", "delta_f [Hz]"
    );
    for i in 0..=10 {
        let alpha = i as f64 / 10.0;
        let plan = make_band_plan(alpha, band.b_u_hd, band.b_d_hd, band.epsilon)?;
        println!(
            "{:>6.1} {:>14.1} {:>14.1} {:>14.1} {:>14.1} {:>14.1}",
            alpha, plan.b_u_alpha, plan.b_d_alpha, plan.f_u_center, plan.f_d_center, plan.delta_f
        );
    }
    println!(
        "\nAt alpha = 1 both links occupy the full {} Hz span (full duplex);\n\
         at alpha = 0 they keep disjoint half-duplex allocations separated by\n\
         the guard band epsilon * B = {} Hz.",
        (band.b_u_hd + band.b_d_hd) * (1.0 + band.epsilon),
        band.epsilon * (band.b_u_hd + band.b_d_hd)
    );
    Ok(())
}
