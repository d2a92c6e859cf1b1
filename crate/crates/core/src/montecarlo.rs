//! Reproducible parallel Monte Carlo over channel realizations.
//!
//! Every trial owns its random streams. A ChaCha8 generator is keyed from the
//! master seed; the stream id encodes the power-grid point, the scheme (in
//! independent mode) and the purpose of the draws, and the word position
//! encodes the trial index. A trial therefore sees the same numbers no
//! matter which thread runs it or in what order.
//!
//! Trials are processed in fixed-size blocks. Each block is accumulated
//! sequentially and the block results are combined in index order, so the
//! floating-point sums are bit-identical for any worker count.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{resample_channels, ChannelRealization, LinkBudget, SystemConfig};
use crate::error::{Error, Result};
use crate::selection::Scheme;

/// Trials per reduction block.
pub const BLOCK_TRIALS: u64 = 1 << 14;

/// Below this many trials the normal-approximation interval is unreliable.
pub const MIN_TRIALS_FOR_CI: u64 = 1_000;

// Each trial gets 2^16 32-bit words of keystream per stream.
const TRIAL_WORD_SHIFT: u32 = 16;
const MAX_WORDS_PER_TRIAL: usize = 1 << TRIAL_WORD_SHIFT;

/// What a stream's draws are used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Channel = 0,
    Selection = 1,
}

/// How channel draws are shared between schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// All schemes see the same realization in trial `t`.
    #[default]
    Paired,
    /// Each scheme draws its own realizations.
    Independent,
}

/// Counter-based stream factory for one master seed.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    base: ChaCha8Rng,
}

impl TrialStreams {
    pub fn new(master_seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(master_seed),
        }
    }

    /// Generator for `(point, scheme tag, purpose, trial)`.
    ///
    /// Scheme tag 0 is shared by all schemes in paired mode.
    pub fn rng(&self, point: usize, scheme_tag: u8, purpose: Purpose, trial: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        let stream = ((point as u64) << 16) | (u64::from(scheme_tag) << 8) | purpose as u64;
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(trial) << TRIAL_WORD_SHIFT);
        rng
    }
}

/// A full Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub config: SystemConfig,
    pub budget: LinkBudget,
    /// Transmit powers in dBm, strictly increasing.
    pub power_grid_dbm: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub trials: u64,
    pub master_seed: u64,
    pub pairing: Pairing,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.power_grid_dbm.is_empty() {
            return Err(Error::Domain("power grid is empty".into()));
        }
        if self.power_grid_dbm.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("power grid contains a non-finite value".into()));
        }
        if self.power_grid_dbm.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("power grid must be strictly increasing".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Domain("no schemes selected".into()));
        }
        let a = self.config.antennas();
        // two words per f64 draw
        if 2 * a.n_bs * (a.m_pu + a.k_su) + 16 > MAX_WORDS_PER_TRIAL {
            return Err(Error::Domain(
                "antenna counts exceed the per-trial random stream budget".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::Domain("worker count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn rho_at(&self, point: usize) -> f64 {
        self.budget.rho_at(self.power_grid_dbm[point])
    }
}

/// Monte Carlo estimate for one scheme at one transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub scheme: Scheme,
    pub power_dbm: f64,
    pub rho: f64,
    pub p_hat: f64,
    pub trials: u64,
    pub outages: u64,
    pub ci95_halfwidth: f64,
    /// Linear mean of γ_s over all trials; infeasible trials count as zero.
    pub mean_gamma_s: f64,
    /// Mean SU power coefficient over all trials; infeasible trials count as zero.
    pub mean_b: f64,
}

impl OutageEstimate {
    fn from_tally(scheme: Scheme, power_dbm: f64, rho: f64, tally: &Tally) -> Self {
        let n = tally.trials as f64;
        let p_hat = tally.outages as f64 / n;
        Self {
            scheme,
            power_dbm,
            rho,
            p_hat,
            trials: tally.trials,
            outages: tally.outages,
            ci95_halfwidth: 1.96 * (p_hat * (1.0 - p_hat) / n).sqrt(),
            mean_gamma_s: tally.sum_gamma_s / n,
            mean_b: tally.sum_b / n,
        }
    }
}

/// Per-scheme running sums.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub trials: u64,
    pub outages: u64,
    pub sum_gamma_s: f64,
    pub sum_b: f64,
}

impl Tally {
    pub fn merge(mut self, other: &Tally) -> Self {
        self.trials += other.trials;
        self.outages += other.outages;
        self.sum_gamma_s += other.sum_gamma_s;
        self.sum_b += other.sum_b;
        self
    }
}

/// Deterministic parallel map-reduce over `0..trials`.
///
/// `block` is called on consecutive ranges of at most [`BLOCK_TRIALS`]
/// trials; results are folded with `combine` in range order.
pub fn reduce_trials<A, F, C>(trials: u64, workers: Option<usize>, block: F, combine: C) -> Result<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync,
    C: Fn(A, A) -> A,
{
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let run = || -> Vec<A> {
        (0..blocks)
            .into_par_iter()
            .map(|i| block(i * BLOCK_TRIALS..((i + 1) * BLOCK_TRIALS).min(trials)))
            .collect()
    };
    let parts = match workers {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?
            .install(run),
    };
    parts
        .into_iter()
        .reduce(combine)
        .ok_or_else(|| Error::Domain("trials must be at least 1".into()))
}

/// Tallies `schemes` at grid point `point` over `trials`.
///
/// In paired mode one realization per trial feeds every scheme.
fn tally_point(
    plan: &ExperimentPlan,
    schemes: &[Scheme],
    point: usize,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<Tally>> {
    let rho = plan.rho_at(point);
    let streams = TrialStreams::new(master_seed);
    let config = plan.config;
    let tag = |scheme: Scheme| -> u8 {
        match plan.pairing {
            Pairing::Paired => 0,
            Pairing::Independent => {
                1 + Scheme::ALL.iter().position(|s| *s == scheme).expect("known scheme") as u8
            }
        }
    };

    reduce_trials(
        trials,
        plan.workers,
        |range| {
            let mut tallies = vec![Tally::default(); schemes.len()];
            let mut ch = ChannelRealization::zeros(config.antennas());
            for t in range {
                let mut drawn_for: Option<u8> = None;
                for (tally, &scheme) in tallies.iter_mut().zip(schemes) {
                    let scheme_tag = tag(scheme);
                    if drawn_for != Some(scheme_tag) {
                        let mut rng = streams.rng(point, scheme_tag, Purpose::Channel, t);
                        resample_channels(&config, &mut rng, &mut ch);
                        drawn_for = Some(scheme_tag);
                    }
                    let outcome = scheme.select_deterministic(&ch, &config, rho).unwrap_or_else(|| {
                        let mut rng = streams.rng(point, scheme_tag, Purpose::Selection, t);
                        scheme.select(&ch, &config, rho, &mut rng)
                    });
                    tally.trials += 1;
                    tally.outages += u64::from(outcome.outage);
                    tally.sum_gamma_s += outcome.gamma_s;
                    tally.sum_b += outcome.b;
                }
            }
            tallies
        },
        |a, b| a.iter().zip(&b).map(|(x, y)| x.merge(y)).collect(),
    )
}

/// Estimates one scheme at grid point `point`.
pub fn run_point(
    plan: &ExperimentPlan,
    scheme: Scheme,
    point: usize,
    trials: u64,
    master_seed: u64,
) -> Result<OutageEstimate> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if point >= plan.power_grid_dbm.len() {
        return Err(Error::Domain(format!(
            "grid point {point} out of range (grid has {} points)",
            plan.power_grid_dbm.len()
        )));
    }
    plan.config.validate()?;
    warn_small(trials);
    let tally = tally_point(plan, &[scheme], point, trials, master_seed)?;
    Ok(OutageEstimate::from_tally(
        scheme,
        plan.power_grid_dbm[point],
        plan.rho_at(point),
        &tally[0],
    ))
}

/// Runs every scheme at every grid point.
///
/// Output is ordered by scheme (as listed in the plan), then by ascending
/// power. Each point is simulated once for all schemes; the numbers equal
/// what [`run_point`] returns for the same arguments.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<OutageEstimate>> {
    plan.validate()?;
    warn_small(plan.trials);
    let mut per_point = Vec::with_capacity(plan.power_grid_dbm.len());
    for point in 0..plan.power_grid_dbm.len() {
        let tallies = tally_point(plan, &plan.schemes, point, plan.trials, plan.master_seed)?;
        per_point.push(tallies);
    }
    let mut out = Vec::with_capacity(plan.schemes.len() * per_point.len());
    for (i, &scheme) in plan.schemes.iter().enumerate() {
        for (point, tallies) in per_point.iter().enumerate() {
            out.push(OutageEstimate::from_tally(
                scheme,
                plan.power_grid_dbm[point],
                plan.rho_at(point),
                &tallies[i],
            ));
        }
    }
    Ok(out)
}

fn warn_small(trials: u64) {
    if trials < MIN_TRIALS_FOR_CI {
        log::warn!("{trials} trials: normal-approximation confidence intervals are unreliable");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{reference, Thresholds};

    fn plan(trials: u64) -> ExperimentPlan {
        ExperimentPlan {
            config: reference::config(),
            budget: reference::link_budget(0.0),
            power_grid_dbm: reference::POWER_GRID_DBM.to_vec(),
            schemes: Scheme::ALL.to_vec(),
            trials,
            master_seed: 2024,
            pairing: Pairing::Paired,
            workers: None,
        }
    }

    #[test]
    fn certain_outage_with_unreachable_threshold() {
        let mut p = plan(1);
        p.config = SystemConfig::new(
            p.config.antennas(),
            p.config.omega_h,
            p.config.omega_g,
            Thresholds {
                gamma_p_th: 1e30,
                gamma_s_th: 1.0,
            },
        )
        .unwrap();
        let est = run_point(&p, Scheme::SjAs, 0, 1, 1).unwrap();
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(est.mean_b, 0.0);
        assert_eq!(est.mean_gamma_s, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_point(&plan(10), Scheme::Es, 0, 0, 1).is_err());
        assert!(run_plan(&plan(0)).is_err());
    }

    #[test]
    fn plan_validation() {
        let mut p = plan(10);
        p.power_grid_dbm = vec![5.0, 5.0];
        assert!(p.validate().is_err());
        p.power_grid_dbm = vec![];
        assert!(p.validate().is_err());
        let mut p = plan(10);
        p.schemes.clear();
        assert!(p.validate().is_err());
        let mut p = plan(10);
        p.workers = Some(0);
        assert!(p.validate().is_err());
        assert!(plan(10).validate().is_ok());
    }

    #[test]
    fn sjas_and_es_estimates_coincide() {
        let p = plan(50_000);
        for point in 0..5 {
            let sj = run_point(&p, Scheme::SjAs, point, p.trials, p.master_seed).unwrap();
            let es = run_point(&p, Scheme::Es, point, p.trials, p.master_seed).unwrap();
            assert_eq!(sj.outages, es.outages);
            assert_eq!(sj.mean_b, es.mean_b);
            assert_eq!(sj.mean_gamma_s, es.mean_gamma_s);
        }
    }

    #[test]
    fn plan_matches_point_runs() {
        let p = plan(20_000);
        let all = run_plan(&p).unwrap();
        assert_eq!(all.len(), 20);
        for (i, est) in all.iter().enumerate() {
            let scheme = p.schemes[i / 5];
            let point = i % 5;
            assert_eq!(est.scheme, scheme);
            assert_eq!(est.power_dbm, p.power_grid_dbm[point]);
            assert_eq!(*est, run_point(&p, scheme, point, p.trials, p.master_seed).unwrap());
        }
    }

    #[test]
    fn single_point_plan_is_singleton() {
        let mut p = plan(5_000);
        p.schemes = vec![Scheme::MaxMin];
        p.power_grid_dbm = vec![10.0];
        let all = run_plan(&p).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], run_point(&p, Scheme::MaxMin, 0, 5_000, p.master_seed).unwrap());
    }

    #[test]
    fn estimator_invariants() {
        for est in run_plan(&plan(3_000)).unwrap() {
            assert!((0.0..=1.0).contains(&est.p_hat));
            assert_eq!(est.p_hat, est.outages as f64 / est.trials as f64);
            let ci = 1.96 * (est.p_hat * (1.0 - est.p_hat) / est.trials as f64).sqrt();
            assert_eq!(est.ci95_halfwidth, ci);
            assert!((0.0..1.0).contains(&est.mean_b));
            assert!(est.mean_gamma_s >= 0.0);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut p = plan(3 * BLOCK_TRIALS + 17);
        p.workers = Some(1);
        let one = run_plan(&p).unwrap();
        p.workers = Some(7);
        assert_eq!(one, run_plan(&p).unwrap());
    }

    #[test]
    fn independent_mode_decouples_schemes() {
        let mut p = plan(20_000);
        p.pairing = Pairing::Independent;
        p.power_grid_dbm = vec![10.0];
        let all = run_plan(&p).unwrap();
        // different channel draws, so SJ-AS and ES no longer tie exactly
        assert_ne!(all[0].mean_b, all[1].mean_b);
        assert!((all[0].mean_b - all[1].mean_b).abs() < 0.02);
    }

    #[test]
    fn streams_are_position_addressed() {
        use rand::Rng;
        let s = TrialStreams::new(9);
        let a: u64 = s.rng(3, 0, Purpose::Channel, 77).random();
        let b: u64 = s.rng(3, 0, Purpose::Channel, 77).random();
        let c: u64 = s.rng(3, 0, Purpose::Channel, 78).random();
        let d: u64 = s.rng(3, 0, Purpose::Selection, 77).random();
        let e: u64 = s.rng(4, 0, Purpose::Channel, 77).random();
        assert_eq!(a, b);
        assert!(a != c && a != d && a != e);
    }
}
