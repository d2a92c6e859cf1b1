//! System configuration, link budget and Rayleigh-faded channel gains.
//!
//! Only squared channel magnitudes enter the downstream formulas, so a
//! realization stores `h_nm = |h̃_nm|²` and `g_nk = |g̃_nk|²` directly. Under
//! Rayleigh fading these are exponential with rate `Ω = 1 / E[gain]`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::db_to_linear;

/// The immutable parameter set of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// BS antennas (N).
    pub n_bs: usize,
    /// PU antennas (M).
    pub m_pu: usize,
    /// SU antennas (K).
    pub k_su: usize,
    /// Reciprocal of the mean BS–PU gain.
    pub omega_h: f64,
    /// Reciprocal of the mean BS–SU gain.
    pub omega_g: f64,
    /// PU SINR threshold, linear.
    pub gamma_p_th: f64,
    /// SU SNR threshold, linear.
    pub gamma_s_th: f64,
}

impl SystemConfig {
    pub fn new(
        antennas: Antennas,
        omega_h: f64,
        omega_g: f64,
        thresholds: Thresholds,
    ) -> Result<Self> {
        let config = Self {
            n_bs: antennas.n_bs,
            m_pu: antennas.m_pu,
            k_su: antennas.k_su,
            omega_h,
            omega_g,
            gamma_p_th: thresholds.gamma_p_th,
            gamma_s_th: thresholds.gamma_s_th,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bs == 0 || self.m_pu == 0 || self.k_su == 0 {
            return Err(Error::Config(format!(
                "antenna counts must be at least 1 (got N={}, M={}, K={})",
                self.n_bs, self.m_pu, self.k_su
            )));
        }
        for (name, v) in [
            ("omega_h", self.omega_h),
            ("omega_g", self.omega_g),
            ("gamma_p_th", self.gamma_p_th),
            ("gamma_s_th", self.gamma_s_th),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite (got {v})"
                )));
            }
        }
        Ok(())
    }

    pub fn antennas(&self) -> Antennas {
        Antennas {
            n_bs: self.n_bs,
            m_pu: self.m_pu,
            k_su: self.k_su,
        }
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            gamma_p_th: self.gamma_p_th,
            gamma_s_th: self.gamma_s_th,
        }
    }

    /// Same configuration with different antenna counts.
    pub fn with_antennas(&self, antennas: Antennas) -> Result<Self> {
        Self::new(antennas, self.omega_h, self.omega_g, self.thresholds())
    }
}

/// Antenna counts `(N, M, K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Antennas {
    pub n_bs: usize,
    pub m_pu: usize,
    pub k_su: usize,
}

impl Antennas {
    pub const fn new(n_bs: usize, m_pu: usize, k_su: usize) -> Self {
        Self { n_bs, m_pu, k_su }
    }
}

/// Detection thresholds, both linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub gamma_p_th: f64,
    pub gamma_s_th: f64,
}

impl Thresholds {
    /// Thresholds for fixed target rates in bit/s/Hz: `γ = 2^r − 1`.
    pub fn from_rates(pu_rate: f64, su_rate: f64) -> Self {
        Self {
            gamma_p_th: 2f64.powf(pu_rate) - 1.0,
            gamma_s_th: 2f64.powf(su_rate) - 1.0,
        }
    }
}

/// Distance-based path loss and noise floor.
///
/// Powers are in dBm with `x dBm = 10^(x/10) mW`; `noise_power_dbm` is the
/// noise power σ², not its square root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// BS–PU distance in meters.
    pub d_p: f64,
    /// BS–SU distance in meters.
    pub d_s: f64,
    /// Path-loss exponent.
    pub epsilon: f64,
    pub noise_power_dbm: f64,
    pub tx_power_dbm: f64,
}

impl LinkBudget {
    /// `Ω_h = d_p^ε`.
    pub fn omega_h(&self) -> f64 {
        self.d_p.powf(self.epsilon)
    }

    /// `Ω_g = d_s^ε`.
    pub fn omega_g(&self) -> f64 {
        self.d_s.powf(self.epsilon)
    }

    /// Transmit SNR `ρ = P/σ²` at the budget's own transmit power.
    pub fn rho(&self) -> f64 {
        self.rho_at(self.tx_power_dbm)
    }

    /// Transmit SNR at an arbitrary transmit power.
    pub fn rho_at(&self, tx_power_dbm: f64) -> f64 {
        db_to_linear(tx_power_dbm - self.noise_power_dbm)
    }
}

/// Derives the system configuration and transmit SNR from a link budget.
pub fn derive_config(
    budget: &LinkBudget,
    antennas: Antennas,
    thresholds: Thresholds,
) -> Result<(SystemConfig, f64)> {
    for (name, v) in [
        ("d_p", budget.d_p),
        ("d_s", budget.d_s),
        ("epsilon", budget.epsilon),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!(
                "{name} must be positive and finite (got {v})"
            )));
        }
    }
    if !budget.noise_power_dbm.is_finite() || !budget.tx_power_dbm.is_finite() {
        return Err(Error::Config("power levels must be finite".into()));
    }
    let config = SystemConfig::new(antennas, budget.omega_h(), budget.omega_g(), thresholds)?;
    let rho = budget.rho();
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Config(format!(
            "transmit SNR must be positive and finite (got {rho})"
        )));
    }
    Ok((config, rho))
}

/// One draw of the `N×M` PU and `N×K` SU gain matrices, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_bs: usize,
    m_pu: usize,
    k_su: usize,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl ChannelRealization {
    /// An all-zero realization sized for `antennas`.
    pub fn zeros(antennas: Antennas) -> Self {
        Self {
            n_bs: antennas.n_bs,
            m_pu: antennas.m_pu,
            k_su: antennas.k_su,
            h: vec![0.0; antennas.n_bs * antennas.m_pu],
            g: vec![0.0; antennas.n_bs * antennas.k_su],
        }
    }

    /// Builds a realization from explicit rows.
    pub fn from_rows(h: &[Vec<f64>], g: &[Vec<f64>]) -> Result<Self> {
        let n_bs = h.len();
        if n_bs == 0 || g.len() != n_bs {
            return Err(Error::Config(
                "H and G must have the same nonzero number of rows".into(),
            ));
        }
        let m_pu = h[0].len();
        let k_su = g[0].len();
        if m_pu == 0 || k_su == 0 {
            return Err(Error::Config("empty channel row".into()));
        }
        if h.iter().any(|r| r.len() != m_pu) || g.iter().any(|r| r.len() != k_su) {
            return Err(Error::Config("ragged channel matrix".into()));
        }
        let h: Vec<f64> = h.iter().flatten().copied().collect();
        let g: Vec<f64> = g.iter().flatten().copied().collect();
        if h.iter().chain(&g).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config(
                "channel gains must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            n_bs,
            m_pu,
            k_su,
            h,
            g,
        })
    }

    pub fn antennas(&self) -> Antennas {
        Antennas::new(self.n_bs, self.m_pu, self.k_su)
    }

    pub fn h(&self, n: usize, m: usize) -> f64 {
        self.h[n * self.m_pu + m]
    }

    pub fn g(&self, n: usize, k: usize) -> f64 {
        self.g[n * self.k_su + k]
    }

    pub fn h_row(&self, n: usize) -> &[f64] {
        &self.h[n * self.m_pu..(n + 1) * self.m_pu]
    }

    pub fn g_row(&self, n: usize) -> &[f64] {
        &self.g[n * self.k_su..(n + 1) * self.k_su]
    }

    pub fn h_entries(&self) -> &[f64] {
        &self.h
    }

    pub fn g_entries(&self) -> &[f64] {
        &self.g
    }
}

/// Draws an exponential variate with the given rate by CDF inversion.
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    // 1 - U lies in (0, 1], so the logarithm is finite.
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Draws a fresh realization for `config`.
pub fn sample_channels<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let mut ch = ChannelRealization::zeros(config.antennas());
    resample_channels(config, rng, &mut ch);
    ch
}

/// Refills `ch` in place; H is drawn row by row before G.
///
/// Panics if `ch` was not sized for `config`.
pub fn resample_channels<R: Rng + ?Sized>(
    config: &SystemConfig,
    rng: &mut R,
    ch: &mut ChannelRealization,
) {
    assert_eq!(ch.antennas(), config.antennas(), "realization size mismatch");
    for v in ch.h.iter_mut() {
        *v = sample_exponential(rng, config.omega_h);
    }
    for v in ch.g.iter_mut() {
        *v = sample_exponential(rng, config.omega_g);
    }
}

/// The evaluation scenario used throughout the examples and acceptance suite:
/// `d_p = 350 m`, `d_s = 250 m`, `ε = 3`, σ² = −70 dBm, `γ_p = 2^0.5 − 1`,
/// `γ_s = 2^2.5 − 1`, two antennas at every node.
pub mod reference {
    use super::*;

    pub const ANTENNAS: Antennas = Antennas::new(2, 2, 2);
    pub const POWER_GRID_DBM: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];

    pub fn link_budget(tx_power_dbm: f64) -> LinkBudget {
        LinkBudget {
            d_p: 350.0,
            d_s: 250.0,
            epsilon: 3.0,
            noise_power_dbm: -70.0,
            tx_power_dbm,
        }
    }

    pub fn thresholds() -> Thresholds {
        Thresholds::from_rates(0.5, 2.5)
    }

    pub fn config() -> SystemConfig {
        derive_config(&link_budget(0.0), ANTENNAS, thresholds())
            .expect("reference scenario is valid")
            .0
    }
}
