//! Closed-form outage analysis of the subset-based selection scheme.
//!
//! Per BS antenna `n`, let `h⁽ⁿ⁾ = max_m h_nm`, `g⁽ⁿ⁾ = max_k g_nk` and
//! `β⁽ⁿ⁾ = min(h⁽ⁿ⁾, g⁽ⁿ⁾)`. With i.i.d. exponential gains the row maxima have
//! CDFs `(1 − e^{−Ωx})^M`, and every probability below reduces to the
//! alternating double sum
//!
//! ```text
//! Σ_{m=1..M} Σ_{k=1..K} c_{m,k} · (term in φ_{m,k} = mΩ_h + kΩ_g)
//! c_{m,k} = (−1)^{m+k} C(M,m) C(K,k)
//! ```
//!
//! with `c₁ = γ_p/ρ` and `c₂ = γ_s(γ_p + 1)/ρ`. System outage splits into
//! `O₁` (no BS antenna can support the PU) and `O₂` (the best served SU SNR
//! is below `γ_s`). `Q₁` is exact; `Q₂` is replaced by its high-SNR limit, so
//! [`p_outage_asymptotic`] is only trustworthy once `ρ` is large.
//!
//! The alternating sums are accumulated with compensated summation and are
//! supported for `M, K ≤ 10`.

use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::numeric::{binomial, binomial_f64, CompensatedSum};
use crate::quadrature::{self, Estimate, Upper};

/// Largest per-user antenna count the alternating sums are validated for.
pub const MAX_SUPPORTED_ANTENNAS: usize = 10;

/// Accumulation strategy for the alternating sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    #[default]
    Compensated,
    Naive,
}

/// Constants shared by the closed forms at one transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticTerms {
    pub c1: f64,
    pub c2: f64,
    omega_h: f64,
    omega_g: f64,
    m_pu: u32,
    k_su: u32,
}

impl AnalyticTerms {
    pub fn new(config: &SystemConfig, rho: f64) -> Self {
        Self {
            c1: config.gamma_p_th / rho,
            c2: config.gamma_s_th * (config.gamma_p_th + 1.0) / rho,
            omega_h: config.omega_h,
            omega_g: config.omega_g,
            m_pu: config.m_pu as u32,
            k_su: config.k_su as u32,
        }
    }

    /// `(−1)^{m+k} C(M,m) C(K,k)`.
    pub fn c_mk(&self, m: u32, k: u32) -> f64 {
        let magnitude = binomial(self.m_pu, m) * binomial(self.k_su, k);
        let v = magnitude as f64;
        if (m + k).is_multiple_of(2) {
            v
        } else {
            -v
        }
    }

    /// `φ_{m,k} = mΩ_h + kΩ_g`.
    pub fn phi_mk(&self, m: u32, k: u32) -> f64 {
        f64::from(m) * self.omega_h + f64::from(k) * self.omega_g
    }

    /// `ϕ_{m,k} = mΩ_h c₁ + kΩ_g c₂`.
    pub fn psi_mk(&self, m: u32, k: u32) -> f64 {
        f64::from(m) * self.omega_h * self.c1 + f64::from(k) * self.omega_g * self.c2
    }

    /// `Σ_m Σ_k c_{m,k} · term(m, k)`.
    fn double_sum<F: Fn(u32, u32) -> f64>(&self, summation: Summation, term: F) -> f64 {
        let values = (1..=self.m_pu)
            .flat_map(|m| (1..=self.k_su).map(move |k| (m, k)))
            .map(|(m, k)| self.c_mk(m, k) * term(m, k));
        match summation {
            Summation::Compensated => values.collect::<CompensatedSum>().value(),
            Summation::Naive => values.sum(),
        }
    }

    fn q1(&self, summation: Summation) -> f64 {
        self.double_sum(summation, |m, k| {
            let phi = self.phi_mk(m, k);
            f64::from(k) * self.omega_g * (-phi * self.c1).exp() * -(-phi * self.c2).exp_m1() / phi
        })
    }

    fn q2(&self, summation: Summation) -> f64 {
        if self.c2 <= self.c1 {
            // the event c1 < h < g < c2 is empty; the series would integrate backwards
            return 0.0;
        }
        self.double_sum(summation, |m, k| {
            let phi = self.phi_mk(m, k);
            (f64::from(m) * self.omega_h * (-phi * self.c1).exp()
                + f64::from(k) * self.omega_g * (-phi * self.c2).exp())
                / phi
                - (-self.psi_mk(m, k)).exp()
        })
    }

    /// Per-antenna `O₂` kernel `Q₁ + Q₂` written as one double sum.
    fn outage_kernel(&self, summation: Summation) -> f64 {
        if self.c2 <= self.c1 {
            return self.q1(summation);
        }
        self.double_sum(summation, |m, k| {
            let phi = self.phi_mk(m, k);
            (-phi * self.c1).exp() - (-self.psi_mk(m, k)).exp()
                + f64::from(k) * self.omega_g * (-phi * self.c2).exp() * -(-phi * self.c1).exp_m1()
                    / phi
        })
    }
}

fn check_nonnegative(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("CDF argument must be nonnegative (got {x})")))
    }
}

/// `P(no exponential in a batch of `count` exceeds x)` = `(1 − e^{−Ωx})^count`.
fn max_cdf(x: f64, omega: f64, count: usize) -> f64 {
    (-(-omega * x).exp_m1()).powi(count as i32)
}

/// CDF of the PU row maximum `h⁽ⁿ⁾`.
pub fn cdf_row_max_h(x: f64, config: &SystemConfig) -> Result<f64> {
    check_nonnegative(x)?;
    Ok(max_cdf(x, config.omega_h, config.m_pu))
}

/// CDF of the SU row maximum `g⁽ⁿ⁾`.
pub fn cdf_row_max_g(x: f64, config: &SystemConfig) -> Result<f64> {
    check_nonnegative(x)?;
    Ok(max_cdf(x, config.omega_g, config.k_su))
}

/// PDF of `h⁽ⁿ⁾` as the binomial expansion `−Σ_{m≥1} (−1)^m C(M,m) mΩ_h e^{−mΩ_h x}`.
pub fn pdf_row_max_h(x: f64, config: &SystemConfig) -> Result<f64> {
    check_nonnegative(x)?;
    Ok(binomial_pdf(x, config.omega_h, config.m_pu as u32))
}

/// PDF of `g⁽ⁿ⁾`, same expansion with `K` and `Ω_g`.
pub fn pdf_row_max_g(x: f64, config: &SystemConfig) -> Result<f64> {
    check_nonnegative(x)?;
    Ok(binomial_pdf(x, config.omega_g, config.k_su as u32))
}

fn binomial_pdf(x: f64, omega: f64, count: u32) -> f64 {
    let mut acc = CompensatedSum::new();
    for j in 1..=count {
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        acc.add(sign * binomial_f64(count, j) * f64::from(j) * omega * (-f64::from(j) * omega * x).exp());
    }
    acc.value()
}

/// CDF of `β⁽ⁿ⁾ = min(h⁽ⁿ⁾, g⁽ⁿ⁾)`: `1 − (F_h − 1)(F_g − 1)`.
pub fn cdf_beta(x: f64, config: &SystemConfig) -> Result<f64> {
    let fh = cdf_row_max_h(x, config)?;
    let fg = cdf_row_max_g(x, config)?;
    Ok(1.0 - (fh - 1.0) * (fg - 1.0))
}

fn cdf_beta_at_c1(config: &SystemConfig, rho: f64) -> f64 {
    cdf_beta(config.gamma_p_th / rho, config).expect("c1 is positive")
}

/// `P(O₁) = F_β(c₁)^N`: no BS antenna supports the PU threshold.
pub fn p_outage_o1(config: &SystemConfig, rho: f64) -> f64 {
    cdf_beta_at_c1(config, rho).powi(config.n_bs as i32)
}

/// `Q₁ = P(c₁ < g⁽ⁿ⁾ < c₁ + c₂, h⁽ⁿ⁾ ≥ g⁽ⁿ⁾)`, exact.
pub fn q1_term(config: &SystemConfig, rho: f64) -> f64 {
    q1_term_with(config, rho, Summation::Compensated)
}

pub fn q1_term_with(config: &SystemConfig, rho: f64, summation: Summation) -> f64 {
    AnalyticTerms::new(config, rho).q1(summation)
}

/// High-SNR approximation of `Q₂`, i.e. `P(c₁ < h⁽ⁿ⁾ < g⁽ⁿ⁾ < c₂)`.
pub fn q2_term(config: &SystemConfig, rho: f64) -> f64 {
    q2_term_with(config, rho, Summation::Compensated)
}

pub fn q2_term_with(config: &SystemConfig, rho: f64, summation: Summation) -> f64 {
    AnalyticTerms::new(config, rho).q2(summation)
}

/// `F_α(γ_s/ρ) = (Q₁ + Q₂) / (1 − F_β(c₁))`: conditional per-antenna SU outage.
pub fn f_alpha(config: &SystemConfig, rho: f64) -> f64 {
    (q1_term(config, rho) + q2_term(config, rho)) / (1.0 - cdf_beta_at_c1(config, rho))
}

/// `P(|S₂| = ℓ) = C(N,ℓ) F_β(c₁)^{N−ℓ} (1 − F_β(c₁))^ℓ`.
pub fn p_subset_size(config: &SystemConfig, rho: f64, ell: usize) -> Result<f64> {
    if ell > config.n_bs {
        return Err(Error::Domain(format!(
            "subset size {ell} exceeds N = {}",
            config.n_bs
        )));
    }
    let fb = cdf_beta_at_c1(config, rho);
    let n = config.n_bs as u32;
    let ell = ell as u32;
    Ok(binomial_f64(n, ell) * fb.powi((n - ell) as i32) * (1.0 - fb).powi(ell as i32))
}

/// Raw asymptotic system outage probability of the subset scheme.
///
/// `Σ_ℓ C(N,ℓ) (Q₁+Q₂)^ℓ F_β(c₁)^{N−ℓ}`; the `ℓ = 0` term is `P(O₁)`. Not
/// clamped: at low `ρ` the approximation can leave `[0, 1]`.
pub fn p_outage_asymptotic(config: &SystemConfig, rho: f64) -> f64 {
    p_outage_asymptotic_with(config, rho, Summation::Compensated)
}

pub fn p_outage_asymptotic_with(config: &SystemConfig, rho: f64, summation: Summation) -> f64 {
    let kernel = AnalyticTerms::new(config, rho).outage_kernel(summation);
    let fb = cdf_beta_at_c1(config, rho);
    let n = config.n_bs as u32;
    (0..=n)
        .map(|ell| binomial_f64(n, ell) * kernel.powi(ell as i32) * fb.powi((n - ell) as i32))
        .collect::<CompensatedSum>()
        .value()
}

/// Leading-order high-SNR outage `ζ^N / ρ^{N·min(M,K)}`.
///
/// Evaluated as `(x^M + y^K − x^M y^K)^N` with `x = Ω_h γ_p/ρ`, `y = Ω_g γ_p/ρ`,
/// which is the same expression with the powers of `ρ` folded in and avoids
/// overflow for large antenna counts.
pub fn p_outage_high_snr(config: &SystemConfig, rho: f64) -> f64 {
    let x = (config.omega_h * config.gamma_p_th / rho).powi(config.m_pu as i32);
    let y = (config.omega_g * config.gamma_p_th / rho).powi(config.k_su as i32);
    (x + y - x * y).powi(config.n_bs as i32)
}

/// Diversity order `N·min(M, K)`.
pub fn diversity_order(config: &SystemConfig) -> usize {
    config.n_bs * config.m_pu.min(config.k_su)
}

/// Whether `ρ` is outside the range where the asymptotic formula is credible.
///
/// Flags a raw value above one, or `ρ·min(1/Ω_h, 1/Ω_g) < 10·γ_p` (average
/// received SNR on the weaker link less than ten times the PU threshold).
pub fn asymptotic_regime_violated(config: &SystemConfig, rho: f64, raw: f64) -> bool {
    let weaker_mean = (1.0 / config.omega_h).min(1.0 / config.omega_g);
    raw > 1.0 || rho * weaker_mean < 10.0 * config.gamma_p_th
}

/// Analytic outage over a transmit-SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCurve {
    pub rho_grid: Vec<f64>,
    /// Asymptotic outage clamped to `[0, 1]`.
    pub p_outage: Vec<f64>,
    pub p_outage_raw: Vec<f64>,
    pub p_highsnr: Vec<f64>,
    pub regime_violated: Vec<bool>,
    pub diversity: usize,
}

impl AnalyticCurve {
    pub fn evaluate(config: &SystemConfig, rho_grid: &[f64]) -> Result<Self> {
        config.validate()?;
        if config.m_pu > MAX_SUPPORTED_ANTENNAS || config.k_su > MAX_SUPPORTED_ANTENNAS {
            log::warn!(
                "M={} K={} exceeds the validated range of the alternating sums",
                config.m_pu,
                config.k_su
            );
        }
        if let Some(bad) = rho_grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::Domain(format!("transmit SNR must be positive (got {bad})")));
        }
        let p_outage_raw: Vec<f64> = rho_grid.iter().map(|&r| p_outage_asymptotic(config, r)).collect();
        Ok(Self {
            rho_grid: rho_grid.to_vec(),
            p_outage: p_outage_raw.iter().map(|p| p.clamp(0.0, 1.0)).collect(),
            p_highsnr: rho_grid.iter().map(|&r| p_outage_high_snr(config, r)).collect(),
            regime_violated: rho_grid
                .iter()
                .zip(&p_outage_raw)
                .map(|(&r, &p)| asymptotic_regime_violated(config, r, p))
                .collect(),
            p_outage_raw,
            diversity: diversity_order(config),
        })
    }
}

/// PDF of the maximum of `count` i.i.d. exponentials, in product form.
fn row_max_density(x: f64, omega: f64, count: usize) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let e = (-omega * x).exp();
    count as f64 * omega * e * (-(-omega * x).exp_m1()).powi(count as i32 - 1)
}

/// Adaptive 2-D quadrature of the defining probability of `Q₁`.
///
/// Integrates the joint density of `(h⁽ⁿ⁾, g⁽ⁿ⁾)` over
/// `c₁ < g < c₁ + c₂, h ≥ g` without using any of the series expansions.
pub fn q1_by_quadrature(config: &SystemConfig, rho: f64, tol: f64) -> Estimate {
    let t = AnalyticTerms::new(config, rho);
    let (oh, og, m, k) = (config.omega_h, config.omega_g, config.m_pu, config.k_su);
    quadrature::integrate_2d(
        |h, g| row_max_density(h, oh, m) * row_max_density(g, og, k),
        t.c1,
        t.c1 + t.c2,
        |g| (g, Upper::Infinity { scale: 1.0 / oh }),
        tol,
    )
}

/// Adaptive 2-D quadrature of `P(c₁ < h⁽ⁿ⁾ < g⁽ⁿ⁾ < c₂)`, the event `Q₂` tends to.
pub fn q2_limit_by_quadrature(config: &SystemConfig, rho: f64, tol: f64) -> Estimate {
    let t = AnalyticTerms::new(config, rho);
    let (oh, og, m, k) = (config.omega_h, config.omega_g, config.m_pu, config.k_su);
    if t.c2 <= t.c1 {
        return Estimate {
            value: 0.0,
            abs_error: 0.0,
        };
    }
    // outer variable h on (c1, c2), inner g on (h, c2)
    quadrature::integrate_2d(
        |g, h| row_max_density(h, oh, m) * row_max_density(g, og, k),
        t.c1,
        t.c2,
        |h| (h, Upper::At(t.c2)),
        tol,
    )
}

/// Adaptive 2-D quadrature of the exact (pre-approximation) `Q₂` event
/// `c₁ < h < g < γ_s(γ_p + 1)h / (hρ − γ_p)`.
pub fn q2_exact_by_quadrature(config: &SystemConfig, rho: f64, tol: f64) -> Estimate {
    let t = AnalyticTerms::new(config, rho);
    let (oh, og, m, k) = (config.omega_h, config.omega_g, config.m_pu, config.k_su);
    let (gp, gs) = (config.gamma_p_th, config.gamma_s_th);
    // above h* = c1 + c2 the upper limit drops below h and the region is empty
    quadrature::integrate_2d(
        |g, h| row_max_density(h, oh, m) * row_max_density(g, og, k),
        t.c1,
        t.c1 + t.c2,
        |h| {
            let upper = gs * (gp + 1.0) * h / (h * rho - gp);
            // the limit blows up as h → c1; past ~40 mean gains the density is gone
            if upper.is_finite() && upper < h + 40.0 / og {
                (h, Upper::At(upper))
            } else {
                (h, Upper::Infinity { scale: 1.0 / og })
            }
        },
        tol,
    )
}
