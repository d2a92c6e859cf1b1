//! Flat `key = value` scenario files.
//!
//! ```text
//! # reference scenario
//! n_bs = 2
//! m_pu = 2
//! k_su = 2
//! d_p_m = 350
//! d_s_m = 250
//! epsilon = 3
//! noise_dbm = -70
//! gamma_p_th = 0.41421356237309515
//! gamma_s_th = 4.656854249492381
//! ```
//!
//! `omega_h` / `omega_g` override the distance model. Thresholds may instead
//! be given in dB as `gamma_p_th_db` / `gamma_s_th_db`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::channel::{Antennas, LinkBudget, SystemConfig, Thresholds};
use crate::numeric::db_to_linear;

const KNOWN_KEYS: [&str; 13] = [
    "n_bs",
    "m_pu",
    "k_su",
    "d_p_m",
    "d_s_m",
    "epsilon",
    "noise_dbm",
    "gamma_p_th",
    "gamma_s_th",
    "gamma_p_th_db",
    "gamma_s_th_db",
    "omega_h",
    "omega_g",
];

/// A parsed scenario file, before the link budget is resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub n_bs: usize,
    pub m_pu: usize,
    pub k_su: usize,
    pub d_p_m: Option<f64>,
    pub d_s_m: Option<f64>,
    pub epsilon: Option<f64>,
    pub noise_dbm: f64,
    /// Linear, after any dB conversion.
    pub gamma_p_th: f64,
    pub gamma_s_th: f64,
    pub omega_h: Option<f64>,
    pub omega_g: Option<f64>,
}

/// Resolved configuration plus the budget used to map powers to `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub config: SystemConfig,
    pub budget: LinkBudget,
}

fn input_error(line: Option<usize>, msg: impl Into<String>) -> CliError {
    let msg = msg.into();
    match line {
        Some(l) => CliError::Input(format!("line {l}: {msg}")),
        None => CliError::Input(msg),
    }
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e.message())))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| input_error(Some(line_no), format!("expected key = value, got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(input_error(Some(line_no), format!("unknown key '{key}'")));
            }
            if value.is_empty() {
                return Err(input_error(Some(line_no), format!("missing value for '{key}'")));
            }
            if let Some((first, _)) = values.insert(key, (line_no, value)) {
                return Err(input_error(
                    Some(line_no),
                    format!("duplicate key '{key}' (first set on line {first})"),
                ));
            }
        }

        let real = |key: &str| -> Result<Option<f64>, CliError> {
            match values.get(key) {
                None => Ok(None),
                Some(&(line, v)) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(Some)
                    .ok_or_else(|| input_error(Some(line), format!("'{key}' is not a finite number: '{v}'"))),
            }
        };
        let count = |key: &str| -> Result<usize, CliError> {
            let &(line, v) = values
                .get(key)
                .ok_or_else(|| input_error(None, format!("missing required key '{key}'")))?;
            match v.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(input_error(Some(line), format!("'{key}' must be a positive integer, got '{v}'"))),
            }
        };
        let threshold = |key: &str| -> Result<f64, CliError> {
            let db_key = format!("{key}_db");
            let linear = real(key)?;
            let db = real(&db_key)?;
            let value = match (linear, db) {
                (Some(_), Some(_)) => {
                    let line = values[db_key.as_str()].0;
                    return Err(input_error(Some(line), format!("both '{key}' and '{db_key}' given")));
                }
                (Some(v), None) => v,
                (None, Some(d)) => db_to_linear(d),
                (None, None) => return Err(input_error(None, format!("missing required key '{key}'"))),
            };
            if value <= 0.0 {
                let line = values.get(key).or(values.get(db_key.as_str())).map(|v| v.0);
                return Err(input_error(line, format!("'{key}' must be positive")));
            }
            Ok(value)
        };
        let positive = |key: &str| -> Result<Option<f64>, CliError> {
            match real(key)? {
                Some(v) if v <= 0.0 => Err(input_error(Some(values[key].0), format!("'{key}' must be positive"))),
                other => Ok(other),
            }
        };

        let file = ScenarioFile {
            n_bs: count("n_bs")?,
            m_pu: count("m_pu")?,
            k_su: count("k_su")?,
            d_p_m: positive("d_p_m")?,
            d_s_m: positive("d_s_m")?,
            epsilon: positive("epsilon")?,
            noise_dbm: real("noise_dbm")?
                .ok_or_else(|| input_error(None, "missing required key 'noise_dbm'"))?,
            gamma_p_th: threshold("gamma_p_th")?,
            gamma_s_th: threshold("gamma_s_th")?,
            omega_h: positive("omega_h")?,
            omega_g: positive("omega_g")?,
        };
        if file.epsilon.is_none() && (file.omega_h.is_none() || file.omega_g.is_none()) {
            return Err(input_error(None, "missing required key 'epsilon'"));
        }
        if file.omega_h.is_none() && file.d_p_m.is_none() {
            return Err(input_error(None, "missing required key 'd_p_m' (or 'omega_h')"));
        }
        if file.omega_g.is_none() && file.d_s_m.is_none() {
            return Err(input_error(None, "missing required key 'd_s_m' (or 'omega_g')"));
        }
        file.resolve()?;
        Ok(file)
    }

    /// Builds the system configuration and link budget.
    ///
    /// An `omega` override is folded back into an equivalent distance so that
    /// `budget.omega_h()` and `config.omega_h` always agree.
    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let epsilon = self.epsilon.unwrap_or(1.0);
        let omega_h = match self.omega_h {
            Some(o) => o,
            None => self.d_p_m.expect("checked at parse").powf(epsilon),
        };
        let omega_g = match self.omega_g {
            Some(o) => o,
            None => self.d_s_m.expect("checked at parse").powf(epsilon),
        };
        let config = SystemConfig::new(
            Antennas::new(self.n_bs, self.m_pu, self.k_su),
            omega_h,
            omega_g,
            Thresholds {
                gamma_p_th: self.gamma_p_th,
                gamma_s_th: self.gamma_s_th,
            },
        )
        .map_err(|e| CliError::Input(e.to_string()))?;
        let budget = LinkBudget {
            d_p: omega_h.powf(1.0 / epsilon),
            d_s: omega_g.powf(1.0 / epsilon),
            epsilon,
            noise_power_dbm: self.noise_dbm,
            tx_power_dbm: 0.0,
        };
        Ok(Scenario { config, budget })
    }

    /// Renders the file back in `key = value` form; parsing it gives `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n_bs = {}", self.n_bs);
        let _ = writeln!(out, "m_pu = {}", self.m_pu);
        let _ = writeln!(out, "k_su = {}", self.k_su);
        for (key, v) in [
            ("d_p_m", self.d_p_m),
            ("d_s_m", self.d_s_m),
            ("epsilon", self.epsilon),
        ] {
            if let Some(v) = v {
                let _ = writeln!(out, "{key} = {v:?}");
            }
        }
        let _ = writeln!(out, "noise_dbm = {:?}", self.noise_dbm);
        let _ = writeln!(out, "gamma_p_th = {:?}", self.gamma_p_th);
        let _ = writeln!(out, "gamma_s_th = {:?}", self.gamma_s_th);
        for (key, v) in [("omega_h", self.omega_h), ("omega_g", self.omega_g)] {
            if let Some(v) = v {
                let _ = writeln!(out, "{key} = {v:?}");
            }
        }
        out
    }

    /// The reference scenario with two antennas everywhere.
    pub fn reference() -> Self {
        let t = crate::channel::reference::thresholds();
        Self {
            n_bs: 2,
            m_pu: 2,
            k_su: 2,
            d_p_m: Some(350.0),
            d_s_m: Some(250.0),
            epsilon: Some(3.0),
            noise_dbm: -70.0,
            gamma_p_th: t.gamma_p_th,
            gamma_s_th: t.gamma_s_th,
            omega_h: None,
            omega_g: None,
        }
    }
}
