//! Scans the uplink rate over the band-overlap fraction alpha and locates
//! the interior maximum. The uplink prefers a partial overlap: the pulse
//! pair keeps the cross-mode leakage nearly orthogonal around alpha ~ 0.29
//! while the uplink still gains bandwidth.
//!
//! Run with: cargo run --release --example ul_optimal_alpha

use alpha_duplex::analytics::Engine;
use alpha_duplex::params::{default_single_tier, Direction, UserClass};

fn main() -> alpha_duplex::Result<()> {
    let theta = 1.0;
    let rate_at = |alpha: f64| -> alpha_duplex::Result<f64> {
        let mut cfg = default_single_tier();
        cfg.tiers[0].alpha = alpha;
        Engine::new(cfg)?.rate(0, Direction::Ul, UserClass::Average, theta)
    };

    // The leakage notch of the sinc / sinc^2 pulse pair is narrow, so scan
    // finely; print a coarse table and keep the interior winner.
    println!("{:>6} {:>14}", "alpha", "UL rate [bit/s]");
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 1..500 {
        let alpha = i as f64 / 500.0;
        let r = rate_at(alpha)?;
        if r > best.1 {
            best = (alpha, r);
        }
        if i % 50 == 0 {
            println!("{:>6.2} {:>14.1}", alpha, r);
        }
    }

    // refine around the coarse winner with a golden-section search
    let (mut lo, mut hi) = ((best.0 - 0.002).max(0.0), (best.0 + 0.002).min(1.0));
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    for _ in 0..40 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if rate_at(a)? < rate_at(b)? {
            lo = a;
        } else {
            hi = b;
        }
    }
    let alpha_star = 0.5 * (lo + hi);
    println!(
        "\noptimal overlap alpha* = {:.4} with UL rate {:.1} bit/s",
        alpha_star,
        rate_at(alpha_star)?
    );
    println!(
        "no overlap (alpha = 0, half duplex) gives {:.1} bit/s and full\n\
         overlap (alpha = 1) gives {:.1} bit/s; the interior optimum sits in\n\
         the near-orthogonality notch of the sinc / sinc^2 pulse pair, where\n\
         the uplink gains bandwidth while cross-mode leakage stays negligible.",
        rate_at(0.0)?,
        rate_at(1.0)?
    );
    Ok(())
}
