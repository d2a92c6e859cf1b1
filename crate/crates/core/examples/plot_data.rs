//! End-to-end CLI pipeline: simulate, analytic, then gnuplot data.
//!
//! Everything lands in `<temp>/crnoma_plots`; run `gnuplot outage.gp` there.

use crnoma::cli;

fn main() {
    let dir = std::env::temp_dir().join("crnoma_plots");
    std::fs::create_dir_all(&dir).expect("temp dir is writable");
    let cfg = dir.join("reference.cfg");
    std::fs::write(&cfg, cli::config_file::ScenarioFile::reference().to_text()).expect("temp dir is writable");
    let p = |name: &str| dir.join(name).display().to_string();
    let cfg = cfg.display().to_string();

    let steps: [Vec<String>; 3] = [
        vec!["simulate".into(), cfg.clone(), "--trials".into(), "200000".into(), "--out".into(), p("sim.csv")],
        vec!["analytic".into(), cfg, "--power-grid".into(), "0:30:1".into(), "--out".into(), p("analytic.csv")],
        vec!["plotdata".into(), "--from".into(), p("sim.csv"), p("analytic.csv"), "--out".into(), p("figures")],
    ];
    for step in steps {
        let code = cli::run(std::iter::once("crnoma".to_string()).chain(step));
        if code != 0 {
            std::process::exit(code);
        }
    }
    println!("figures in {}", p("figures"));
}
