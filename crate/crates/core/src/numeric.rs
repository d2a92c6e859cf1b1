//! Small numeric helpers shared by the analytic formulas.

/// Neumaier-compensated accumulator.
///
/// The alternating binomial sums in the outage expressions cancel heavily as
/// the antenna counts grow; the running compensation term keeps the lost
/// low-order bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Exact binomial coefficient `C(n, k)` as an integer.
///
/// Panics on overflow, which does not happen for the supported antenna counts.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc = acc
            .checked_mul(u128::from(n - i))
            .expect("binomial coefficient overflow")
            / u128::from(i + 1);
    }
    acc
}

/// `C(n, k)` converted to `f64`.
pub fn binomial_f64(n: u32, k: u32) -> f64 {
    binomial(n, k) as f64
}

/// Converts a dB (or dBm) quantity to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear quantity to dB. Zero maps to negative infinity.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a slope");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Slope of `log10(p)` against `log10(ρ)` over the last decade of the grid.
///
/// Only points with `ρ ≥ ρ_max/10` and `p > 0` are used; `None` when fewer
/// than two remain.
pub fn top_decade_slope(rho: &[f64], p: &[f64]) -> Option<f64> {
    assert_eq!(rho.len(), p.len());
    let rho_max = rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = rho
        .iter()
        .zip(p)
        .filter(|(r, v)| **r >= rho_max / 10.0 * (1.0 - 1e-12) && **v > 0.0)
        .map(|(r, v)| (r.log10(), v.log10()))
        .unzip();
    (xs.len() >= 2).then(|| fit_slope(&xs, &ys))
}
