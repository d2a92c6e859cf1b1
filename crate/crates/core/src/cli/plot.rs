//! gnuplot scripts and whitespace-delimited data for the outage and SNR figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::tables::{AnalyticRow, Dataset, SimulateRow};
use super::CliError;
use crate::numeric::top_decade_slope;

/// Files to write, as `(file name, contents)` in a stable order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotBundle {
    pub files: Vec<(String, String)>,
}

impl PlotBundle {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }
}

/// Series drawn on the outage figure, with its top-decade slope.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSlope {
    pub series: String,
    pub slope: Option<f64>,
}

fn scheme_title(id: &str) -> &str {
    match id {
        "sjas" => "SJ-AS",
        "es" => "ES",
        "maxmin" => "Max-min",
        "random" => "Random",
        other => other,
    }
}

/// Builds the figure bundle from parsed CSVs.
///
/// Each scheme gets `outage_<scheme>.dat` and `snr_<scheme>.dat`; an analytic
/// CSV becomes `outage_analytic.dat`. `outage.gp` plots outage probability on
/// a log axis against transmit power; `snr.gp` plots mean SU SNR in dB.
pub fn build_bundle(datasets: &[(String, Dataset)]) -> Result<(PlotBundle, Vec<SeriesSlope>), CliError> {
    if datasets.is_empty() {
        return Err(CliError::Input("no input CSVs given".into()));
    }
    let mut schemes: BTreeMap<String, Vec<SimulateRow>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut analytic: Option<&[AnalyticRow]> = None;
    for (name, ds) in datasets {
        match ds {
            Dataset::Simulate(rows) => {
                let mut seen_here: Vec<&str> = Vec::new();
                for r in rows {
                    if !seen_here.contains(&r.scheme.as_str()) {
                        if schemes.contains_key(&r.scheme) {
                            return Err(CliError::Input(format!(
                                "{name}: scheme '{}' already provided by another input",
                                r.scheme
                            )));
                        }
                        seen_here.push(&r.scheme);
                    }
                }
                for r in rows {
                    if !schemes.contains_key(&r.scheme) {
                        order.push(r.scheme.clone());
                    }
                    schemes.entry(r.scheme.clone()).or_default().push(r.clone());
                }
            }
            Dataset::Analytic(rows) => {
                if analytic.is_some() {
                    return Err(CliError::Input(format!("{name}: more than one analytic input")));
                }
                analytic = Some(rows);
            }
        }
    }

    let mut bundle = PlotBundle::default();
    let mut slopes = Vec::new();
    let mut outage_plots = Vec::new();
    let mut snr_plots = Vec::new();

    for id in &order {
        let mut rows = schemes[id].clone();
        rows.sort_by(|a, b| a.power_dbm.total_cmp(&b.power_dbm));
        let mut outage = String::from("# power_dbm p_outage ci95 rho\n");
        let mut snr = String::from("# power_dbm mean_gamma_s_db\n");
        for r in &rows {
            let _ = writeln!(outage, "{} {} {} {}", r.power_dbm, r.p_outage, r.ci95, r.rho);
            let _ = writeln!(snr, "{} {}", r.power_dbm, r.mean_gamma_s_db);
        }
        let rho: Vec<f64> = rows.iter().map(|r| r.rho).collect();
        let p: Vec<f64> = rows.iter().map(|r| r.p_outage).collect();
        slopes.push(SeriesSlope {
            series: id.clone(),
            slope: top_decade_slope(&rho, &p),
        });
        let title = scheme_title(id);
        outage_plots.push(format!(
            "'outage_{id}.dat' using 1:2:3 with yerrorlines title '{title} (sim)'"
        ));
        snr_plots.push(format!("'snr_{id}.dat' using 1:2 with linespoints title '{title}'"));
        bundle.files.push((format!("outage_{id}.dat"), outage));
        bundle.files.push((format!("snr_{id}.dat"), snr));
    }

    if let Some(rows) = analytic {
        let mut rows = rows.to_vec();
        rows.sort_by(|a, b| a.power_dbm.total_cmp(&b.power_dbm));
        let mut text = String::from("# power_dbm p_outage_asymptotic p_outage_highsnr regime_flag rho\n");
        for r in &rows {
            let _ = writeln!(
                text,
                "{} {} {} {} {}",
                r.power_dbm,
                r.p_outage_asymptotic,
                r.p_outage_highsnr,
                u8::from(r.regime_flag),
                r.rho
            );
        }
        let rho: Vec<f64> = rows.iter().map(|r| r.rho).collect();
        let p: Vec<f64> = rows.iter().map(|r| r.p_outage_asymptotic).collect();
        let hs: Vec<f64> = rows.iter().map(|r| r.p_outage_highsnr).collect();
        slopes.push(SeriesSlope {
            series: "analytic".into(),
            slope: top_decade_slope(&rho, &p),
        });
        slopes.push(SeriesSlope {
            series: "highsnr".into(),
            slope: top_decade_slope(&rho, &hs),
        });
        outage_plots.push("'outage_analytic.dat' using 1:2 with lines dt 2 lw 2 title 'Analytic'".into());
        outage_plots.push("'outage_analytic.dat' using 1:3 with lines dt 3 title 'High-SNR'".into());
        bundle.files.push(("outage_analytic.dat".into(), text));
    }

    if !outage_plots.is_empty() {
        bundle.files.push(("outage.gp".into(), script(
            "outage",
            "Outage probability",
            true,
            &outage_plots,
        )));
    }
    if !snr_plots.is_empty() {
        bundle.files.push(("snr.gp".into(), script(
            "snr",
            "Average received SNR of the SU (dB)",
            false,
            &snr_plots,
        )));
    }

    let mut summary = String::from("# series top_decade_log_log_slope\n");
    for s in &slopes {
        match s.slope {
            Some(v) => {
                let _ = writeln!(summary, "{} {v}", s.series);
            }
            None => {
                let _ = writeln!(summary, "{} nan", s.series);
            }
        }
    }
    bundle.files.push(("slopes.txt".into(), summary));
    Ok((bundle, slopes))
}

fn script(stem: &str, ylabel: &str, log_y: bool, plots: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output '{stem}.png'");
    let _ = writeln!(s, "set xlabel 'Transmit power (dBm)'");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    if log_y {
        let _ = writeln!(s, "set logscale y");
        let _ = writeln!(s, "set format y '10^{{%L}}'");
    }
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set key bottom left");
    let _ = writeln!(s, "plot \\\n    {}", plots.join(", \\\n    "));
    s
}
