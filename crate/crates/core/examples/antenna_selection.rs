//! Runs the four selection schemes on one realization and compares their
//! cost with the instrumented operation counters.

use crnoma::channel::{reference, sample_channels};
use crnoma::selection::{es_as_counted, sj_as_counted, OpCount, Scheme};
use crnoma::{Antennas, ChannelRealization};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> crnoma::Result<()> {
    let config = reference::config();
    let rho = reference::link_budget(10.0).rho();
    let ch = ChannelRealization::from_rows(
        &[vec![1.2e-8, 3.1e-8], vec![2.0e-8, 0.6e-8]],
        &[vec![4.0e-8, 1.0e-8], vec![2.5e-8, 6.0e-8]],
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for scheme in Scheme::ALL {
        let out = scheme.select(&ch, &config, rho, &mut rng);
        println!(
            "{:<11} triple={:?} b={:.4} gamma_s={:.4} outage={}",
            scheme.label(),
            out.triple.map(|t| (t.n, t.m, t.k)),
            out.b,
            out.gamma_s,
            out.outage
        );
    }

    println!("\n  N  M  K   sj-as ops  N(M+K+2)   es ops");
    for n in [1, 2, 4, 8] {
        for mk in [1, 4, 8] {
            let cfg = config.with_antennas(Antennas::new(n, mk, mk))?;
            let ch = sample_channels(&cfg, &mut rng);
            let (mut sj, mut es) = (OpCount::default(), OpCount::default());
            sj_as_counted(&ch, &cfg, rho, &mut sj);
            es_as_counted(&ch, &cfg, rho, &mut es);
            println!("{n:>3}{mk:>3}{mk:>3} {:>11} {:>9} {:>8}", sj.total(), n * (2 * mk + 2), es.total());
        }
    }
    Ok(())
}
