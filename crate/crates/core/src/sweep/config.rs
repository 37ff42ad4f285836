//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Reals accept plain decimals,
//! fractions (`1/3`) and multiples of pi (`15pi`, `15*pi`, `pi/2`). Lists are
//! comma separated.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::ConfigError;
use crate::operators::{DissipationConvention, LatticeParams};
use crate::propagator::{Dissipation, EvolveOptions};
use crate::ramp::{Parameter, RampPlan, RampSchedule};
use crate::spectrum::{EigenOptions, GapScanOptions, Solver, MIN_SCAN_RESOLUTION};

/// Every key the drivers understand; anything else is a typo.
const KNOWN_KEYS: &[&str] = &[
    "L", "N", "initial", "initial_file",
    "g0", "gT", "rg", "J0", "JT", "rJ", "d0", "dT", "rd", "T", "g_hz",
    "kappa", "gamma", "dissipation", "fidelity",
    "steps_per_time", "steps", "refine", "tolerance", "checkpoints",
    "solver", "eigen_tolerance",
    "JT_min", "JT_max", "JT_points", "dT_min", "dT_max", "dT_points", "rJ_values",
    "J_min", "J_max", "J_points", "Delta_min", "Delta_max", "Delta_points", "rho_i", "rho_j",
    "g", "J", "Delta", "levels",
    "resolution", "refine_tol", "any_gap",
    "pulse", "epsilon", "g_d", "omega_L", "omega_0",
    "dump",
];

/// Parsed key/value pairs with their line numbers.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, message: format!("expected key = value, got `{content}`") });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax { line, message: format!("invalid key `{key}`") });
            }
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::Syntax { line, message: format!("unknown key `{key}`") });
            }
            if value.is_empty() {
                return Err(ConfigError::Syntax { line, message: format!("key `{key}` has no value") });
            }
            if let Some((_, first)) = entries.insert(key.to_string(), (value.to_string(), line)) {
                return Err(ConfigError::Syntax { line, message: format!("`{key}` already set on line {first}") });
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let line = self.entries.get(key).map_or(0, |e| e.1);
        ConfigError::Syntax { line, message: format!("`{key}`: {}", message.into()) }
    }

    pub fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key)
            .map(|v| parse_real(v).map_err(|m| self.invalid(key, m)))
            .transpose()
    }

    pub fn real_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.real(key)?.unwrap_or(default))
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.raw(key)
            .map(|v| v.parse::<usize>().map_err(|_| self.invalid(key, format!("expected a non-negative integer, got `{v}`"))))
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.raw(key)
            .map(|v| match v {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(self.invalid(key, format!("expected true/false, got `{v}`"))),
            })
            .transpose()
    }

    pub fn reals(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|item| parse_real(item.trim()).map_err(|m| self.invalid(key, m)))
                    .collect()
            })
            .transpose()
    }

    fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<Option<&'a str>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => options
                .iter()
                .find(|o| **o == v)
                .map(|o| Some(*o))
                .ok_or_else(|| self.invalid(key, format!("expected one of {}, got `{v}`", options.join("|")))),
        }
    }
}

/// Parses `1.5`, `-2e-3`, `1/3`, `pi`, `15pi`, `15*pi`, `pi/2`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let bad = || format!("cannot read `{text}` as a number");
    let value = if let Some((num, den)) = t.split_once('/') {
        let n = parse_real(num)?;
        let d = parse_real(den)?;
        if d == 0.0 {
            return Err(format!("division by zero in `{text}`"));
        }
        n / d
    } else if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        match coef {
            "" | "+" => PI,
            "-" => -PI,
            c => c.parse::<f64>().map_err(|_| bad())? * PI,
        }
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Product of lower polaritons at the start parameters.
    Mi,
    /// Uniform photon condensate.
    Sf,
    /// Eigensolver ground state at the start parameters.
    Ground,
    /// Amplitudes from a text file, one `re [im]` pair per line in basis order.
    File(PathBuf),
}

impl InitialState {
    pub fn label(&self) -> String {
        match self {
            InitialState::Mi => "mi".into(),
            InitialState::Sf => "sf".into(),
            InitialState::Ground => "ground".into(),
            InitialState::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// How the reported fidelity treats the norm of the final state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FidelityNorm {
    /// `|<psi|G>|^2` on the raw amplitudes.
    #[default]
    Raw,
    /// `|<psi|G>|^2 / <psi|psi>`.
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Axis { min, max, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { self.max } else { self.min + step * i as f64 }).collect()
    }

    fn read(cfg: &ConfigFile, name: &str, default: Axis) -> Result<Axis, ConfigError> {
        let axis = Axis {
            min: cfg.real_or(&format!("{name}_min"), default.min)?,
            max: cfg.real_or(&format!("{name}_max"), default.max)?,
            points: cfg.count(&format!("{name}_points"))?.unwrap_or(default.points),
        };
        if axis.points == 0 {
            return Err(ConfigError::Invalid { key: format!("{name}_points"), message: "needs at least one point".into() });
        }
        Ok(axis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseKind {
    Mi,
    Sf,
}

/// Fully resolved run settings; every field has a default so that each
/// subcommand reads only what it needs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub sites: usize,
    pub excitations: usize,
    pub initial: InitialState,
    pub plan: RampPlan,
    pub dissipation: Dissipation,
    pub fidelity_norm: FidelityNorm,
    pub evolve: EvolveOptions,
    pub checkpoints: usize,
    pub eigen: EigenOptions,
    pub gap: GapScanOptions,
    pub target_hopping: Axis,
    pub target_detuning: Axis,
    pub rj_values: Vec<f64>,
    pub rho_hopping: Axis,
    pub rho_detuning: Axis,
    pub rho_sites: (usize, usize),
    pub point: LatticeParams,
    pub levels: usize,
    pub pulse_kind: PulseKind,
    pub drive: f64,
    pub tunable_coupling: f64,
    pub drive_frequency: f64,
    pub auxiliary_splitting: f64,
    pub dump: String,
}

const DEFAULT_DURATION: f64 = 15.0 * PI;

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        Self::from_file(&ConfigFile::parse(text)?, None)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_file(&ConfigFile::read(path)?, path.parent())
    }

    /// `base` resolves a relative `initial_file`.
    pub fn from_file(cfg: &ConfigFile, base: Option<&Path>) -> Result<Self, ConfigError> {
        let sites = cfg.count("L")?.unwrap_or(6);
        let excitations = cfg.count("N")?.unwrap_or(sites);
        if sites == 0 {
            return Err(ConfigError::Invalid { key: "L".into(), message: "lattice needs at least one site".into() });
        }

        let initial = match cfg.choice("initial", &["mi", "sf", "ground", "file"])?.unwrap_or("mi") {
            "mi" => InitialState::Mi,
            "sf" => InitialState::Sf,
            "ground" => InitialState::Ground,
            _ => {
                let p = cfg.raw("initial_file").ok_or(ConfigError::Missing("initial_file"))?;
                let p = PathBuf::from(p);
                InitialState::File(match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                })
            }
        };

        // physical units: kappa, gamma in Hz and T in seconds when g_hz is set
        let g_hz = cfg.real("g_hz")?;
        if let Some(g) = g_hz {
            if !(g > 0.0) {
                return Err(ConfigError::Invalid { key: "g_hz".into(), message: "must be positive".into() });
            }
        }
        let rate = |key: &str| -> Result<f64, ConfigError> {
            let v = cfg.real_or(key, 0.0)?;
            if v < 0.0 {
                return Err(ConfigError::Invalid { key: key.into(), message: "decay rates are non-negative".into() });
            }
            Ok(g_hz.map_or(v, |g| v / g))
        };
        let kappa = rate("kappa")?;
        let gamma = rate("gamma")?;
        let duration = match (cfg.real("T")?, g_hz) {
            (Some(t), Some(g)) => t * 2.0 * PI * g,
            (Some(t), None) => t,
            (None, _) => DEFAULT_DURATION,
        };

        let plan = read_plan(cfg, duration)?;

        let convention = match cfg.choice("dissipation", &["off", "literal", "number-conserving"])? {
            Some("off") => None,
            Some("number-conserving") => Some(DissipationConvention::NumberConserving),
            Some(_) => Some(DissipationConvention::LiteralSigmaZ),
            None if kappa > 0.0 || gamma > 0.0 => Some(DissipationConvention::LiteralSigmaZ),
            None => None,
        };
        let dissipation = match convention {
            Some(c) => Dissipation { cavity_decay: kappa, qubit_decay: gamma, convention: c },
            None => Dissipation::none(),
        };
        let fidelity_norm = match cfg.choice("fidelity", &["raw", "normalized"])? {
            Some("normalized") => FidelityNorm::Normalized,
            _ => FidelityNorm::Raw,
        };

        let mut evolve = EvolveOptions::default();
        if let Some(d) = cfg.real("steps_per_time")? {
            if !(d > 0.0) {
                return Err(ConfigError::Invalid { key: "steps_per_time".into(), message: "must be positive".into() });
            }
            evolve.step_density = d;
        }
        evolve.initial_steps = cfg.count("steps")?;
        evolve.fixed_steps = !cfg.flag("refine")?.unwrap_or(true);
        evolve.tolerance = cfg.real_or("tolerance", evolve.tolerance)?;

        let mut eigen = EigenOptions::default();
        eigen.solver = match cfg.choice("solver", &["auto", "dense", "lanczos"])? {
            Some("dense") => Solver::Dense,
            Some("lanczos") => Solver::Lanczos,
            _ => Solver::Auto,
        };
        if let Some(t) = cfg.real("eigen_tolerance")? {
            eigen.lanczos.tolerance = t;
        }

        let mut gap = GapScanOptions { eigen, ..GapScanOptions::default() };
        if let Some(r) = cfg.count("resolution")? {
            if r < MIN_SCAN_RESOLUTION {
                return Err(ConfigError::Invalid {
                    key: "resolution".into(),
                    message: format!("at least {MIN_SCAN_RESOLUTION} points"),
                });
            }
            gap.resolution = r;
        }
        gap.refine_tol = cfg.real_or("refine_tol", gap.refine_tol)?;
        gap.with_any_gap = cfg.flag("any_gap")?.unwrap_or(false);

        let rho_i = cfg.count("rho_i")?.unwrap_or(1);
        let rho_j = cfg.count("rho_j")?.unwrap_or(4.min(sites));
        for (key, v) in [("rho_i", rho_i), ("rho_j", rho_j)] {
            if v == 0 || v > sites {
                return Err(ConfigError::Invalid { key: key.into(), message: format!("site {v} outside 1..={sites}") });
            }
        }

        let rj_values = cfg.reals("rJ_values")?.unwrap_or_else(|| vec![1.0 / 3.0, 0.5, 1.0, 2.0]);
        if rj_values.iter().any(|r| !(*r > 0.0)) {
            return Err(ConfigError::Invalid { key: "rJ_values".into(), message: "indices must be positive".into() });
        }

        let pulse_kind = match cfg.choice("pulse", &["mi", "sf"])? {
            Some("mi") => PulseKind::Mi,
            _ => PulseKind::Sf,
        };

        Ok(RunConfig {
            sites,
            excitations,
            initial,
            plan,
            dissipation,
            fidelity_norm,
            evolve,
            checkpoints: cfg.count("checkpoints")?.unwrap_or(20).max(1),
            eigen,
            gap,
            target_hopping: Axis::read(cfg, "JT", Axis::new(0.0, 0.5, 9))?,
            target_detuning: Axis::read(cfg, "dT", Axis::new(-1.0, 1.0, 9))?,
            rj_values,
            rho_hopping: Axis::read(cfg, "J", Axis::new(0.0, 0.5, 11))?,
            rho_detuning: Axis::read(cfg, "Delta", Axis::new(-2.0, 2.0, 9))?,
            rho_sites: (rho_i, rho_j),
            point: LatticeParams::new(
                cfg.real_or("g", 1.0)?,
                cfg.real_or("J", 0.0)?,
                cfg.real_or("Delta", 0.0)?,
            ),
            levels: cfg.count("levels")?.unwrap_or(6).max(1),
            pulse_kind,
            drive: cfg.real_or("epsilon", 0.02)?,
            tunable_coupling: cfg.real_or("g_d", 0.02)?,
            drive_frequency: cfg.real_or("omega_L", 50.0)?,
            auxiliary_splitting: cfg.real_or("omega_0", 50.0)?,
            dump: cfg.choice("dump", &["basis", "hamiltonian", "coupling", "hopping", "photon", "translation"])?
                .unwrap_or("basis")
                .to_string(),
        })
    }
}

fn read_plan(cfg: &ConfigFile, duration: f64) -> Result<RampPlan, ConfigError> {
    let invalid = |key: &str, e: String| ConfigError::Invalid { key: key.into(), message: e };
    let schedule = |p: Parameter, k0: &str, k1: &str, kr: &str, default: f64| -> Result<RampSchedule, ConfigError> {
        let start = cfg.real_or(k0, default)?;
        let end = cfg.real_or(k1, start)?;
        let index = cfg.real_or(kr, 1.0)?;
        RampSchedule::new(p, start, end, index).map_err(|e| invalid(kr, e.to_string()))
    };
    let g = schedule(Parameter::Coupling, "g0", "gT", "rg", 1.0)?;
    let j = schedule(Parameter::Hopping, "J0", "JT", "rJ", 0.0)?;
    let d = schedule(Parameter::Detuning, "d0", "dT", "rd", 0.0)?;
    RampPlan::new(g, j, d, duration).map_err(|e| invalid("T", e.to_string()))
}
