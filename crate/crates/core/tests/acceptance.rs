//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::Instant;

use crnoma::analytic::{
    cdf_beta, cdf_row_max_g, cdf_row_max_h, p_outage_asymptotic, q1_by_quadrature, q1_term, AnalyticCurve,
};
use crnoma::channel::{reference, resample_channels};
use crnoma::cli::{self, config_file::ScenarioFile};
use crnoma::montecarlo::{run_plan, run_point, ExperimentPlan, OutageEstimate, Pairing, Purpose, TrialStreams};
use crnoma::numeric::top_decade_slope;
use crnoma::selection::{es_as, es_as_counted, maxmin_as, sj_as, sj_as_counted, OpCount};
use crnoma::{Antennas, ChannelRealization, Scheme, SystemConfig, Thresholds};

const SEED: u64 = 20_240_601;
const GRID: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];

/// Mean SU power coefficient per scheme at 0, 5, 10, 15, 20 dBm.
const REFERENCE_MEAN_B: [(Scheme, [f64; 5]); 4] = [
    (Scheme::Random, [0.0155, 0.1491, 0.3715, 0.5425, 0.6359]),
    (Scheme::MaxMin, [0.1441, 0.5006, 0.6417, 0.6864, 0.7006]),
    (Scheme::Es, [0.1418, 0.4624, 0.5997, 0.6641, 0.6915]),
    (Scheme::SjAs, [0.1418, 0.4624, 0.5997, 0.6641, 0.6915]),
];

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

fn plan(schemes: &[Scheme], grid: &[f64], trials: u64) -> ExperimentPlan {
    ExperimentPlan {
        config: reference::config(),
        budget: reference::link_budget(0.0),
        power_grid_dbm: grid.to_vec(),
        schemes: schemes.to_vec(),
        trials,
        master_seed: SEED,
        pairing: Pairing::Paired,
        workers: None,
    }
}

fn estimate(all: &[OutageEstimate], scheme: Scheme, power: f64) -> &OutageEstimate {
    all.iter()
        .find(|e| e.scheme == scheme && e.power_dbm == power)
        .expect("estimate present")
}

fn mean_b_table(estimates: &[OutageEstimate]) -> Outcome {
    let mut details = Vec::new();
    let mut failures = 0;
    for (scheme, expected) in REFERENCE_MEAN_B {
        for (p, want) in GRID.iter().zip(expected) {
            let got = estimate(estimates, scheme, *p).mean_b;
            let ok = (got - want).abs() <= 0.01;
            failures += usize::from(!ok);
            details.push(format!(
                "{} {:<11} {p:>4} dBm: simulated {got:.4}, reference {want:.4}, diff {:+.4}",
                if ok { "ok  " } else { "MISS" },
                scheme.label(),
                got - want
            ));
        }
    }
    let mut out = Outcome::new(
        failures == 0,
        format!("mean b table, N=M=K=2, 10^6 paired trials: {}/20 cells within 0.01", 20 - failures),
    );
    out.details = details;
    out
}

fn sj_es_equivalence() -> Outcome {
    let config = reference::config();
    let budget = reference::link_budget(0.0);
    let streams = TrialStreams::new(SEED);
    let trials = 1_000_000u64;
    let mut ch = ChannelRealization::zeros(config.antennas());
    let mut outage_mismatch = 0u64;
    let mut gamma_mismatch = 0u64;
    let mut details = Vec::new();
    for (point, p) in [0.0, 10.0, 20.0].into_iter().enumerate() {
        let rho = budget.rho_at(p);
        let (mut om, mut gm) = (0u64, 0u64);
        for t in 0..trials {
            resample_channels(&config, &mut streams.rng(point, 0, Purpose::Channel, t), &mut ch);
            let sj = sj_as(&ch, &config, rho);
            let es = es_as(&ch, &config, rho);
            om += u64::from(sj.outage != es.outage);
            let scale = sj.gamma_s.abs().max(es.gamma_s.abs());
            gm += u64::from((sj.gamma_s - es.gamma_s).abs() > 1e-12 * scale);
        }
        details.push(format!("{p:>4} dBm: outage mismatches {om}, gamma_s mismatches {gm}"));
        outage_mismatch += om;
        gamma_mismatch += gm;
    }
    let mut out = Outcome::new(
        outage_mismatch == 0 && gamma_mismatch == 0,
        format!(
            "SJ-AS vs ES on 3x10^6 realizations: {outage_mismatch} outage and {gamma_mismatch} gamma_s discrepancies"
        ),
    );
    out.details = details;
    out
}

fn analytic_convergence() -> Outcome {
    let powers = [10.0, 15.0, 20.0];
    let plan = plan(&[Scheme::SjAs], &powers, 10_000_000);
    let mut errors = Vec::new();
    let mut details = Vec::new();
    for (point, p) in powers.iter().enumerate() {
        let mc = run_point(&plan, Scheme::SjAs, point, plan.trials, plan.master_seed).expect("valid plan");
        let an = p_outage_asymptotic(&plan.config, mc.rho);
        let rel = (an - mc.p_hat).abs() / mc.p_hat;
        errors.push(rel);
        details.push(format!(
            "{p:>4} dBm: simulated {:.4e} (+/-{:.1e}), closed form {an:.4e}, relative error {:.2}%",
            mc.p_hat,
            mc.ci95_halfwidth,
            100.0 * rel
        ));
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let last = errors[errors.len() - 1];
    let mut out = Outcome::new(
        last <= 0.10 && monotone,
        format!(
            "closed form vs simulation at 20 dBm (10^7 trials): {:.2}% (limit 10%), errors decreasing: {monotone}",
            100.0 * last
        ),
    );
    out.details = details;
    out
}

fn diversity_slopes() -> Outcome {
    let config = reference::config();
    let budget = reference::link_budget(0.0);
    let rho: Vec<f64> = (0..=30).map(|p| budget.rho_at(f64::from(p))).collect();
    let curve = AnalyticCurve::evaluate(&config, &rho).expect("valid grid");
    let s = top_decade_slope(&rho, &curve.p_outage).unwrap_or(f64::NAN);
    let h = top_decade_slope(&rho, &curve.p_highsnr).unwrap_or(f64::NAN);
    let d = -(curve.diversity as f64);
    let ok = (s - d).abs() <= 0.15 * d.abs() && (h - d).abs() <= 0.02 * d.abs();
    Outcome::new(
        ok,
        format!("top-decade slopes (20-30 dBm): closed form {s:.3} (within 15% of {d}), high-SNR {h:.4} (within 2%)"),
    )
}

fn q1_exactness() -> Outcome {
    let base = reference::config();
    let budget = reference::link_budget(0.0);
    let settings: [(usize, usize, f64, (f64, f64)); 10] = [
        (1, 1, 10.0, (0.5, 2.5)),
        (1, 2, 15.0, (0.5, 2.5)),
        (2, 1, 20.0, (0.5, 2.5)),
        (2, 2, 10.0, (0.5, 2.5)),
        (2, 2, 20.0, (1.0, 3.0)),
        (2, 4, 15.0, (0.5, 2.5)),
        (4, 2, 12.0, (0.5, 2.0)),
        (4, 4, 20.0, (0.5, 2.5)),
        (1, 4, 25.0, (1.0, 1.0)),
        (4, 1, 8.0, (0.25, 1.0)),
    ];
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for (m, k, p, (rp, rs)) in settings {
        let config = SystemConfig::new(Antennas::new(2, m, k), base.omega_h, base.omega_g, Thresholds::from_rates(rp, rs))
            .expect("valid");
        let rho = budget.rho_at(p);
        let series = q1_term(&config, rho);
        let quad = q1_by_quadrature(&config, rho, 1e-12);
        let diff = (series - quad.value).abs();
        worst = worst.max(diff);
        details.push(format!(
            "M={m} K={k} {p:>4} dBm rates ({rp},{rs}): series {series:.12e}, quadrature {:.12e}, |diff| {diff:.1e}",
            quad.value
        ));
    }
    let mut out = Outcome::new(
        worst <= 1e-8,
        format!("Q1 series vs 2-D quadrature over 10 settings: max |diff| {worst:.2e} (limit 1e-8)"),
    );
    out.details = details;
    out
}

fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn distributions() -> Outcome {
    let config = reference::config();
    let streams = TrialStreams::new(SEED ^ 0x5eed);
    let n = 1_000_000u64;
    let mut ch = ChannelRealization::zeros(config.antennas());
    let (mut h, mut g, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for t in 0..n {
        resample_channels(&config, &mut streams.rng(0, 0, Purpose::Channel, t), &mut ch);
        let hm = ch.h_row(0).iter().copied().fold(0.0, f64::max);
        let gm = ch.g_row(0).iter().copied().fold(0.0, f64::max);
        h.push(hm);
        g.push(gm);
        b.push(hm.min(gm));
    }
    let dh = ks_statistic(&mut h, |x| cdf_row_max_h(x, &config).expect("x >= 0"));
    let dg = ks_statistic(&mut g, |x| cdf_row_max_g(x, &config).expect("x >= 0"));
    let db = ks_statistic(&mut b, |x| cdf_beta(x, &config).expect("x >= 0"));
    Outcome::new(
        dh.max(dg).max(db) < 0.005,
        format!("KS statistics at 10^6 samples: h {dh:.5}, g {dg:.5}, beta {db:.5} (limit 0.005)"),
    )
}

fn dominance() -> Outcome {
    let config = reference::config();
    let budget = reference::link_budget(0.0);
    let streams = TrialStreams::new(SEED);
    let trials = 1_000_000u64;
    let mut ch = ChannelRealization::zeros(config.antennas());
    let mut ok = true;
    let mut details = Vec::new();
    for (point, p) in GRID.iter().enumerate() {
        let rho = budget.rho_at(*p);
        let (mut es_n, mut sj_n, mut mm_n, mut rnd_n, mut violations) = (0u64, 0u64, 0u64, 0u64, 0u64);
        for t in 0..trials {
            resample_channels(&config, &mut streams.rng(point, 0, Purpose::Channel, t), &mut ch);
            let es = es_as(&ch, &config, rho);
            let sj = sj_as(&ch, &config, rho);
            let mm = maxmin_as(&ch, &config, rho);
            let rnd = Scheme::Random.select(&ch, &config, rho, &mut streams.rng(point, 0, Purpose::Selection, t));
            es_n += u64::from(es.outage);
            sj_n += u64::from(sj.outage);
            mm_n += u64::from(mm.outage);
            rnd_n += u64::from(rnd.outage);
            violations += u64::from(es.outage && !mm.outage);
        }
        // two-sample slack of 3 standard errors for the statistical inequality
        let (pm, pr) = (mm_n as f64 / trials as f64, rnd_n as f64 / trials as f64);
        let se = ((pm * (1.0 - pm) + pr * (1.0 - pr)) / trials as f64).sqrt();
        let here = violations == 0 && sj_n == es_n && es_n <= mm_n && pm <= pr + 3.0 * se;
        ok &= here;
        details.push(format!(
            "{p:>4} dBm: outages es {es_n}, sj {sj_n}, max-min {mm_n}, random {rnd_n}; per-realization violations {violations}"
        ));
    }
    let mut out = Outcome::new(
        ok,
        "outage counts es = sj <= max-min <= random on paired seeds, es <= max-min per realization",
    );
    out.details = details;
    out
}

fn complexity() -> Outcome {
    let config = reference::config();
    let rho = reference::link_budget(10.0).rho();
    let streams = TrialStreams::new(SEED);
    let sizes = [1usize, 2, 4, 8];
    let mut worst_ratio: f64 = 0.0;
    let mut es_exact = true;
    let mut case = 0u64;
    for n in sizes {
        for m in sizes {
            for k in sizes {
                let cfg = config.with_antennas(Antennas::new(n, m, k)).expect("valid");
                let mut ch = ChannelRealization::zeros(cfg.antennas());
                for t in 0..20 {
                    resample_channels(&cfg, &mut streams.rng(case as usize, 0, Purpose::Channel, t), &mut ch);
                    let (mut sj, mut es) = (OpCount::default(), OpCount::default());
                    sj_as_counted(&ch, &cfg, rho, &mut sj);
                    es_as_counted(&ch, &cfg, rho, &mut es);
                    worst_ratio = worst_ratio.max(sj.total() as f64 / (n * (m + k + 2)) as f64);
                    let nmk = (n * m * k) as u64;
                    es_exact &= (nmk..=3 * nmk).contains(&es.total());
                }
                case += 1;
            }
        }
    }
    Outcome::new(
        worst_ratio <= 1.0 && es_exact,
        format!(
            "SJ-AS ops <= C*N(M+K+2) with C = {worst_ratio:.3} over N,M,K in {{1,2,4,8}}; ES ops within [NMK, 3NMK]: {es_exact}"
        ),
    )
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let scenario = ScenarioFile::reference();
    let mut outputs = Vec::new();
    for workers in [1usize, 8] {
        let out = dir.path().join(format!("w{workers}.csv"));
        cli::simulate(&scenario, &Scheme::ALL, &GRID, 100_000, SEED, Some(workers), &out).expect("simulate");
        outputs.push(std::fs::read(&out).expect("read back"));
    }
    let same = outputs[0] == outputs[1];
    Outcome::new(
        same,
        format!(
            "simulate CSV with 1 vs 8 workers (100000 trials, {} bytes): byte-identical {same}",
            outputs[0].len()
        ),
    )
}

fn snr_ordering(estimates: &[OutageEstimate]) -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for p in GRID {
        let g = |s| estimate(estimates, s, p).mean_gamma_s;
        let (sj, es, mm, rnd) = (g(Scheme::SjAs), g(Scheme::Es), g(Scheme::MaxMin), g(Scheme::Random));
        ok &= sj == es && es >= mm && mm >= rnd;
        details.push(format!(
            "{p:>4} dBm: mean gamma_s sj {sj:.4e}, es {es:.4e}, max-min {mm:.4e}, random {rnd:.4e}"
        ));
    }
    let mut out = Outcome::new(ok, "mean SU SNR ordering SJ-AS = ES >= max-min >= random at every power");
    out.details = details;
    out
}

fn main() {
    let started = Instant::now();
    let table_plan = plan(&cli::TABLE1_SCHEMES, &GRID, 1_000_000);
    let table_estimates = run_plan(&table_plan).expect("valid plan");

    let criteria: Vec<(&str, Check)> = vec![
        ("1", Box::new(|| mean_b_table(&table_estimates))),
        ("2", Box::new(sj_es_equivalence)),
        ("3", Box::new(analytic_convergence)),
        ("4", Box::new(diversity_slopes)),
        ("5", Box::new(q1_exactness)),
        ("6", Box::new(distributions)),
        ("7", Box::new(dominance)),
        ("8", Box::new(complexity)),
        ("9", Box::new(reproducibility)),
        ("snr", Box::new(|| snr_ordering(&table_estimates))),
    ];

    let mut failed = Vec::new();
    for (id, check) in &criteria {
        let t = Instant::now();
        let outcome = check();
        println!(
            "{} criterion {id}: {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary,
            t.elapsed().as_secs_f64()
        );
        for d in &outcome.details {
            println!("      {d}");
        }
        if !outcome.pass {
            failed.push(*id);
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        criteria.len() - failed.len(),
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("acceptance: failed criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
