//! Closed-form outage over a power sweep, with the high-SNR approximation,
//! the regime flag and the fitted diversity slope.

use crnoma::analytic::{q1_by_quadrature, q1_term, AnalyticCurve};
use crnoma::channel::reference;
use crnoma::numeric::top_decade_slope;

fn main() -> crnoma::Result<()> {
    let config = reference::config();
    let budget = reference::link_budget(0.0);
    let powers: Vec<f64> = (0..=30).step_by(2).map(f64::from).collect();
    let rho: Vec<f64> = powers.iter().map(|&p| budget.rho_at(p)).collect();
    let curve = AnalyticCurve::evaluate(&config, &rho)?;

    println!("P(dBm)  p_outage     high-SNR     regime violated");
    for (i, p) in powers.iter().enumerate() {
        println!(
            "{p:>6}  {:<11.4e}  {:<11.4e}  {}",
            curve.p_outage[i], curve.p_highsnr[i], curve.regime_violated[i]
        );
    }
    println!("diversity order N*min(M,K) = {}", curve.diversity);
    println!("top-decade slope: {:.3}", top_decade_slope(&rho, &curve.p_outage).unwrap_or(f64::NAN));
    println!("high-SNR slope:   {:.3}", top_decade_slope(&rho, &curve.p_highsnr).unwrap_or(f64::NAN));

    let r = budget.rho_at(15.0);
    println!(
        "Q1 at 15 dBm: series {:.12e}, quadrature {:.12e}",
        q1_term(&config, r),
        q1_by_quadrature(&config, r, 1e-12).value
    );
    Ok(())
}
