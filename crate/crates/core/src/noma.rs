//! CR-NOMA power allocation and link SINRs for one fixed antenna triple.
//!
//! The BS superimposes `√a·s_p + √b·s_s` with `a + b = 1`. Both receivers
//! decode `s_p` treating `s_s` as noise; the SU then cancels `s_p` and decodes
//! `s_s` interference-free. The SU is served only with the power left over
//! once the PU threshold holds at both receivers.

/// Power split between the PU and SU.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    b: f64,
}

impl PowerSplit {
    /// Panics unless `0 <= b < 1`.
    pub fn new(b: f64) -> Self {
        assert!((0.0..1.0).contains(&b), "SU power coefficient out of range: {b}");
        Self { b }
    }

    /// SU coefficient.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// PU coefficient, `1 − b`.
    pub fn a(&self) -> f64 {
        1.0 - self.b
    }
}

/// Selected gains and transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub h: f64,
    pub g: f64,
    pub rho: f64,
}

impl LinkState {
    pub fn new(h: f64, g: f64, rho: f64) -> Self {
        debug_assert!(h >= 0.0 && g >= 0.0 && rho > 0.0);
        Self { h, g, rho }
    }

    /// `β = min(h, g)`.
    pub fn beta(&self) -> f64 {
        self.h.min(self.g)
    }

    /// The PU threshold can be met with some `b > 0`, i.e. `β·ρ > γ_p`.
    pub fn supports_pu(&self, gamma_p_th: f64) -> bool {
        is_feasible(self.beta(), self.rho, gamma_p_th)
    }
}

/// Strict feasibility test `β·ρ > γ_p`; the boundary counts as infeasible.
#[inline]
pub fn is_feasible(beta: f64, rho: f64, gamma_p_th: f64) -> bool {
    beta * rho > gamma_p_th
}

/// Largest SU coefficient that keeps both PU-signal SINRs at `γ_p`.
pub fn optimal_b(link: &LinkState, gamma_p_th: f64) -> PowerSplit {
    let beta_rho = link.beta() * link.rho;
    if beta_rho <= gamma_p_th {
        return PowerSplit { b: 0.0 };
    }
    PowerSplit {
        b: (beta_rho - gamma_p_th) / ((gamma_p_th + 1.0) * beta_rho),
    }
}

#[inline]
fn sinr_of_pu_signal(gain: f64, rho: f64, split: &PowerSplit) -> f64 {
    if gain == 0.0 {
        return 0.0;
    }
    split.a() * gain / (split.b() * gain + 1.0 / rho)
}

/// SINR of `s_p` at the PU.
pub fn sinr_pu(link: &LinkState, split: &PowerSplit) -> f64 {
    sinr_of_pu_signal(link.h, link.rho, split)
}

/// SINR of `s_p` at the SU, before cancellation.
pub fn sinr_su_decode_pu(link: &LinkState, split: &PowerSplit) -> f64 {
    sinr_of_pu_signal(link.g, link.rho, split)
}

/// SNR of `s_s` at the SU after cancelling `s_p`.
pub fn snr_su(link: &LinkState, split: &PowerSplit) -> f64 {
    split.b() * link.g * link.rho
}

/// SU SNR under the optimal split, zero when the PU threshold cannot be met.
///
/// Evaluated as `g·(ρ − γ_p/β)/(γ_p + 1)`: every step is a correctly rounded
/// monotone operation, so the result is nondecreasing in `h` and in `g` even
/// in floating point.
pub fn achievable_gamma_s(link: &LinkState, gamma_p_th: f64) -> f64 {
    gamma_s_from_gains(link.h, link.g, link.rho, gamma_p_th)
}

#[inline]
pub(crate) fn gamma_s_from_gains(h: f64, g: f64, rho: f64, gamma_p_th: f64) -> f64 {
    let beta = h.min(g);
    if !is_feasible(beta, rho, gamma_p_th) {
        return 0.0;
    }
    (g * ((rho - gamma_p_th / beta) / (gamma_p_th + 1.0))).max(0.0)
}
