//! Simulated catchment windows against the closed-form group count and size.
//! At low rates the closed form overshoots the count by up to one window.
//!
//! `cargo run --example catchment_oracle`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fcdn::catchment::validate_model;

fn main() -> fcdn::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("{:>6} {:>5} {:>10} {:>10} {:>8} {:>8}", "mu", "tau", "groups", "predicted", "size", "pred");
    for (mu, tau) in [(0.01, 1.0), (1.0, 1.0), (1.0, 10.0), (10.0, 0.1), (100.0, 1.0)] {
        let v = validate_model(mu, tau, 900.0, 500, 0.02, &mut rng)?;
        println!(
            "{mu:>6} {tau:>5} {:>10.2} {:>10.2} {:>8.3} {:>8.3}{}",
            v.simulated_count,
            v.expected_count,
            v.simulated_size,
            v.expected_size,
            if v.passed() { "" } else { "  outside 2%" }
        );
    }
    Ok(())
}
