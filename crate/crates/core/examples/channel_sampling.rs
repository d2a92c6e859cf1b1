//! Derives the reference configuration from its link budget and checks the
//! sampled gains against their exponential means and row-max CDF.

use crnoma::analytic::cdf_row_max_h;
use crnoma::channel::{derive_config, reference, sample_channels};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> crnoma::Result<()> {
    let budget = reference::link_budget(10.0);
    let (config, rho) = derive_config(&budget, reference::ANTENNAS, reference::thresholds())?;
    println!("omega_h = {:.4e}, omega_g = {:.4e}, rho = {rho:.3e}", config.omega_h, config.omega_g);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 200_000;
    let (mut sum_h, mut sum_g) = (0.0, 0.0);
    let probe = 1.0 / config.omega_h;
    let mut below = 0u64;
    for _ in 0..draws {
        let ch = sample_channels(&config, &mut rng);
        sum_h += ch.h_entries().iter().sum::<f64>();
        sum_g += ch.g_entries().iter().sum::<f64>();
        let row_max = ch.h_row(0).iter().copied().fold(0.0, f64::max);
        below += u64::from(row_max <= probe);
    }
    let per = (draws * config.n_bs * config.m_pu) as f64;
    println!("mean h = {:.4e} (expected {:.4e})", sum_h / per, 1.0 / config.omega_h);
    let per = (draws * config.n_bs * config.k_su) as f64;
    println!("mean g = {:.4e} (expected {:.4e})", sum_g / per, 1.0 / config.omega_g);
    println!(
        "P(max_m h_0m <= 1/omega_h) = {:.4} (closed form {:.4})",
        below as f64 / draws as f64,
        cdf_row_max_h(probe, &config)?
    );
    Ok(())
}
