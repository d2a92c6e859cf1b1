//! Paired Monte Carlo sweep of all schemes next to the analytic curve.
//!
//! Pass a trial count as the first argument (default 200000).

use crnoma::analytic::p_outage_asymptotic;
use crnoma::channel::reference;
use crnoma::montecarlo::{run_plan, ExperimentPlan, Pairing};
use crnoma::Scheme;

fn main() -> crnoma::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let plan = ExperimentPlan {
        config: reference::config(),
        budget: reference::link_budget(0.0),
        power_grid_dbm: vec![0.0, 5.0, 10.0, 15.0, 20.0],
        schemes: Scheme::ALL.to_vec(),
        trials,
        master_seed: 2024,
        pairing: Pairing::Paired,
        workers: None,
    };
    let estimates = run_plan(&plan)?;
    println!("scheme        P(dBm)  p_outage    +/-ci95     mean_b   analytic");
    for e in &estimates {
        println!(
            "{:<12} {:>6}  {:<10.4e}  {:<10.2e}  {:.4}   {:.4e}",
            e.scheme.label(),
            e.power_dbm,
            e.p_hat,
            e.ci95_halfwidth,
            e.mean_b,
            p_outage_asymptotic(&plan.config, e.rho).clamp(0.0, 1.0)
        );
    }
    Ok(())
}
