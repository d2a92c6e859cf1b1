//! Mean SU power coefficient per scheme and power, laid out as a table.
//!
//! Pass a trial count as the first argument (default 200000). The CSV and
//! manifest are written to the system temp directory.

use crnoma::cli::{config_file::ScenarioFile, table1};

fn main() {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let out = std::env::temp_dir().join("crnoma_table1.csv");
    match table1(&ScenarioFile::reference(), trials, 1, None, &out) {
        Ok(text) => {
            print!("{text}");
            println!("\nwrote {}", out.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
