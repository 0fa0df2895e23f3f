//! Plain-text scenario files.
//!
//! One `key = value` pair per line, `#` starts a comment. A `preset` key is
//! applied first wherever it appears; the remaining keys then override it in
//! file order, and command-line flags override the file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ppsm_core::fisher::optimal_modulation;
use ppsm_core::numerics::Interval;
use ppsm_core::{Case, GaussianPointer};

use crate::error::{CliError, Result};

pub const DEFAULT_PHIS: [f64; 4] = [0.05, 0.2, 0.5, 1.0];

/// Modulation setting: a fixed value or centred on a nominal coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulation {
    Fixed(f64),
    Auto,
}

impl FromStr for Modulation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Modulation::Auto);
        }
        parse_f64(s).map(Modulation::Fixed)
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Fixed(v) => write!(f, "{v}"),
            Modulation::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub case: Case,
    pub q0: f64,
    pub sigma: f64,
    pub unit: String,
    pub phis: Vec<f64>,
    pub g_min: f64,
    pub g_max: f64,
    pub g_steps: usize,
    pub g_mod: Modulation,
    /// Tie the post-selection angle to the coupling, `φ = 2 q0 g'`.
    pub lock_phi: bool,
    pub fraction: f64,
    pub seed: u64,
    pub n_total: u64,
    pub replications: u64,
    /// Coupling simulated by `estimate` and `adaptive`.
    pub g_true: f64,
    pub phi_final: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            case: Case::Balanced,
            q0: 0.0,
            sigma: 1.0,
            unit: String::new(),
            phis: DEFAULT_PHIS.to_vec(),
            g_min: -3.0,
            g_max: 3.0,
            g_steps: 400,
            g_mod: Modulation::Fixed(0.0),
            lock_phi: false,
            fraction: 0.1,
            seed: 1,
            n_total: 100_000,
            replications: 1,
            g_true: 0.0,
            phi_final: 0.1,
        }
    }
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> Scenario,
}

pub const PRESETS: [Preset; 2] = [
    Preset {
        name: "beam-deflection",
        description: "centred transverse pointer, q0 = 0 um, sigma = 200 um; coupling is a momentum kick in 1/um",
        build: beam_deflection,
    },
    Preset {
        name: "time-delay",
        description: "spectral pointer at 2400 THz with 200 THz width; coupling is a delay in ps",
        build: time_delay,
    },
];

fn beam_deflection() -> Scenario {
    Scenario {
        case: Case::Balanced,
        q0: 0.0,
        sigma: 200.0,
        unit: "um".into(),
        g_min: -0.015,
        g_max: 0.015,
        ..Scenario::default()
    }
}

fn time_delay() -> Scenario {
    Scenario {
        case: Case::Unbalanced,
        q0: 2400.0,
        sigma: 200.0,
        unit: "THz".into(),
        g_min: -0.01,
        g_max: 0.01,
        ..Scenario::default()
    }
}

pub fn preset(name: &str) -> Option<Scenario> {
    PRESETS.iter().find(|p| p.name == name.trim()).map(|p| (p.build)())
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{}' is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{}' is not finite", s.trim()))
    }
}

fn parse_int<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.trim()
        .replace('_', "")
        .parse()
        .map_err(|_| format!("'{}' is not a non-negative integer", s.trim()))
}

/// `0.05, 0.2` style list.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(parse_f64).collect()
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("'{other}' is not a boolean")),
    }
}

impl Scenario {
    /// Set one key. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "preset" => {
                *self = preset(value).ok_or_else(|| format!("unknown preset '{}'", value.trim()))?;
            }
            "case" => self.case = value.parse().map_err(|e: ppsm_core::Error| e.to_string())?,
            "q0" => self.q0 = parse_f64(value)?,
            "sigma" => self.sigma = parse_f64(value)?,
            "unit" => self.unit = value.trim().to_string(),
            "phi" => self.phis = parse_list(value)?,
            "g_min" => self.g_min = parse_f64(value)?,
            "g_max" => self.g_max = parse_f64(value)?,
            "g_steps" | "steps" => self.g_steps = parse_int(value)?,
            "g_mod" => self.g_mod = value.parse()?,
            "lock_phi" => self.lock_phi = parse_bool(value)?,
            "fraction" => self.fraction = parse_f64(value)?,
            "seed" => self.seed = parse_int(value)?,
            "n_total" => self.n_total = parse_int(value)?,
            "replications" => self.replications = parse_int(value)?,
            "g_true" => self.g_true = parse_f64(value)?,
            "phi_final" => self.phi_final = parse_f64(value)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn parse_str(text: &str, origin: &str) -> Result<Self> {
        Self::parse_onto(Scenario::default(), text, origin)
    }

    /// Apply the keys in `text` on top of `base`.
    pub fn parse_onto(base: Scenario, text: &str, origin: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Parse {
                path: origin.to_string(),
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            entries.push((i + 1, key.trim().to_string(), value.trim().to_string()));
        }
        let mut scenario = base;
        let (presets, rest): (Vec<_>, Vec<_>) = entries.into_iter().partition(|(_, k, _)| k == "preset");
        for (line, key, value) in presets.into_iter().chain(rest) {
            scenario.set(&key, &value).map_err(|message| CliError::Parse {
                path: origin.to_string(),
                line,
                message,
            })?;
        }
        Ok(scenario)
    }

    pub fn from_file(base: Scenario, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_onto(base, &text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Validation(m));
        if self.g_steps < 2 {
            return fail(format!("g_steps must be at least 2, got {}", self.g_steps));
        }
        if self.g_min.is_nan() || self.g_max.is_nan() || self.g_min >= self.g_max {
            return fail(format!("g range needs g_min < g_max, got [{}, {}]", self.g_min, self.g_max));
        }
        if self.sigma.is_nan() || self.sigma <= 0.0 {
            return fail(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.phis.is_empty() && !self.lock_phi {
            return fail("at least one phi value is required".into());
        }
        if !(self.fraction > 0.0 && self.fraction < 0.5) {
            return fail(format!("fraction must lie in (0, 0.5), got {}", self.fraction));
        }
        if self.case == Case::Unbalanced && self.pointer()?.is_balanced() {
            return fail("the unbalanced case needs q0 != 0".into());
        }
        if self.lock_phi && self.case != Case::Unbalanced {
            return fail("lock_phi needs the unbalanced case".into());
        }
        if self.replications == 0 {
            return fail("replications must be at least 1".into());
        }
        Ok(())
    }

    pub fn pointer(&self) -> Result<GaussianPointer> {
        Ok(GaussianPointer::new(self.q0, self.sigma)?)
    }

    pub fn g_range(&self) -> Result<Interval> {
        Ok(Interval::new(self.g_min, self.g_max)?)
    }

    pub fn g_grid(&self) -> Vec<f64> {
        Interval { lower: self.g_min, upper: self.g_max }.linspace(self.g_steps)
    }

    /// Concrete modulation for angle `phi`; `auto` centres the information
    /// peak on `nominal`.
    pub fn modulation_for(&self, phi: f64, nominal: f64) -> Result<f64> {
        match self.g_mod {
            Modulation::Fixed(v) => Ok(v),
            Modulation::Auto => Ok(optimal_modulation(nominal, &self.pointer()?, phi, self.case)?),
        }
    }

    /// Render as a scenario file that parses back to `self`.
    pub fn to_config(&self) -> String {
        let phis: Vec<String> = self.phis.iter().map(|p| format!("{p:?}")).collect();
        format!(
            "case = {}\nq0 = {:?}\nsigma = {:?}\nunit = {}\nphi = {}\ng_min = {:?}\ng_max = {:?}\n\
             g_steps = {}\ng_mod = {}\nlock_phi = {}\nfraction = {:?}\nseed = {}\nn_total = {}\n\
             replications = {}\ng_true = {:?}\nphi_final = {:?}\n",
            self.case,
            self.q0,
            self.sigma,
            self.unit,
            phis.join(", "),
            self.g_min,
            self.g_max,
            self.g_steps,
            self.g_mod,
            self.lock_phi,
            self.fraction,
            self.seed,
            self.n_total,
            self.replications,
            self.g_true,
            self.phi_final,
        )
    }
}
