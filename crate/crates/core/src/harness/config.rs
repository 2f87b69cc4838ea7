//! INI-style sweep configuration.
//!
//! ```text
//! [wave]
//! rho_L = 1          # left state, required
//! theta_L = 1        # required
//! u_L = 1            # required
//! rho_R = 0.5        # right density, required
//! family = 1         # 1 or 3
//! margin = 0.2       # domain half-width margin
//!
//! [grid]
//! N = 1600
//! cfl = 0.8
//! reconstruction = muscl       # or first-order
//! init = mollified             # or exact (then t0 is required)
//! init_width = 0.05            # optional, mollified only
//! t0 = 0.1                     # exact only
//!
//! [sweep]
//! eps = 0.2, 0.1, 0.05, 0.025  # strictly decreasing
//! a_rule = square              # a = eps^2; or `power P`, P > 1, or `zero`
//! T = 0.5
//! probe_times = 0.1, 0.2, 0.3, 0.4   # default 0.2T, 0.4T, 0.6T, 0.8T
//! mu_bar = 1
//! eta_bar = 0
//! kappa_bar = 1
//! beta = 6.5
//!
//! [output]
//! dir = out
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::eos::{EosParams, DEFAULT_BETA};
use crate::rarefaction::{Family, PrimitiveState, RarefactionWave};
use crate::solver::{Grid, InitMode, Reconstruction, DEFAULT_CFL};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{key}` {constraint}")]
    Invalid {
        key: String,
        line: usize,
        constraint: String,
    },
    #[error("missing key `{key}` in [{section}] (required)")]
    Missing { section: String, key: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ARule {
    Zero,
    /// `a = ε^p`; `square` is `p = 2`.
    Power(f64),
}

impl ARule {
    pub fn a_of(&self, eps: f64) -> f64 {
        match *self {
            ARule::Zero => 0.0,
            ARule::Power(p) => eps.powf(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitSpec {
    Mollified { width: Option<f64> },
    Exact { t0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSpec {
    pub left: PrimitiveState,
    pub rho_right: f64,
    pub family: Family,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub wave: WaveSpec,
    pub cells: usize,
    pub cfl: f64,
    pub reconstruction: Reconstruction,
    pub init: InitSpec,
    pub eps: Vec<f64>,
    pub a_rule: ARule,
    pub final_time: f64,
    pub probe_times: Vec<f64>,
    pub mu_bar: f64,
    pub eta_bar: f64,
    pub kappa_bar: f64,
    pub beta: f64,
    pub output_dir: PathBuf,
}

pub const DEFAULT_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const DEFAULT_CELLS: usize = 1600;
pub const DEFAULT_T: f64 = 0.5;
pub const DEFAULT_PROBE_FRACTIONS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

const KEYS: &[(&str, &[&str])] = &[
    ("wave", &["rho_L", "theta_L", "u_L", "rho_R", "family", "margin"]),
    ("grid", &["N", "cfl", "reconstruction", "init", "init_width", "t0"]),
    (
        "sweep",
        &["eps", "a_rule", "T", "probe_times", "mu_bar", "eta_bar", "kappa_bar", "beta"],
    ),
    ("output", &["dir"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw `section -> key -> value` map with line numbers.
struct Ini {
    entries: BTreeMap<(String, String), Entry>,
}

fn parse_ini(text: &str) -> Result<Ini, ConfigError> {
    let mut entries = BTreeMap::new();
    let mut section: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("unterminated section header `{content}`"),
            })?;
            let name = name.trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("unknown section [{name}]; expected one of [wave], [grid], [sweep], [output]"),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.clone().ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("key `{key}` appears before any section header"),
        })?;
        let allowed = KEYS.iter().find(|(s, _)| *s == sec).map(|(_, keys)| *keys).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                line,
                constraint: format!("is not a recognised key of [{sec}] (allowed: {})", allowed.join(", ")),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                line,
                constraint: "has an empty value".into(),
            });
        }
        let entry = Entry { value: value.to_string(), line };
        if let Some(prev) = entries.insert((sec.clone(), key.to_string()), entry) {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                line,
                constraint: format!("is already set on line {}", prev.line),
            });
        }
    }
    Ok(Ini { entries })
}

fn invalid(key: &str, line: usize, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        line,
        constraint: constraint.into(),
    }
}

impl Ini {
    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn line(&self, section: &str, key: &str) -> usize {
        self.get(section, key).map_or(0, |e| e.line)
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        let v: f64 = e
            .value
            .parse()
            .map_err(|_| invalid(key, e.line, format!("must be a number, found `{}`", e.value)))?;
        if !v.is_finite() {
            return Err(invalid(key, e.line, format!("must be finite, found `{}`", e.value)));
        }
        Ok(Some(v))
    }

    fn required(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        self.number(section, key)?.ok_or_else(|| ConfigError::Missing {
            section: section.to_string(),
            key: key.to_string(),
        })
    }

    fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| invalid(key, e.line, format!("must be a comma-separated list of numbers, found `{item}`")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn positive(key: &str, line: usize, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, line, format!("must be > 0, found {v}")))
    }
}

fn non_negative(key: &str, line: usize, v: f64) -> Result<f64, ConfigError> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, line, format!("must be >= 0, found {v}")))
    }
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

pub fn parse_config_str(text: &str) -> Result<SweepConfig, ConfigError> {
    let ini = parse_ini(text)?;

    let rho_l = ini.required("wave", "rho_L")?;
    let theta_l = ini.required("wave", "theta_L")?;
    let u_l = ini.required("wave", "u_L")?;
    let rho_r = ini.required("wave", "rho_R")?;
    positive("rho_L", ini.line("wave", "rho_L"), rho_l)?;
    positive("theta_L", ini.line("wave", "theta_L"), theta_l)?;
    positive("rho_R", ini.line("wave", "rho_R"), rho_r)?;
    let family = match ini.get("wave", "family") {
        None => Family::One,
        Some(e) => match e.value.as_str() {
            "1" => Family::One,
            "3" => Family::Three,
            other => return Err(invalid("family", e.line, format!("must be 1 or 3, found `{other}`"))),
        },
    };
    let margin = match ini.number("wave", "margin")? {
        Some(m) => positive("margin", ini.line("wave", "margin"), m)?,
        None => crate::rarefaction::DEFAULT_MARGIN,
    };

    let cells = match ini.get("grid", "N") {
        None => DEFAULT_CELLS,
        Some(e) => {
            let n: usize = e
                .value
                .parse()
                .map_err(|_| invalid("N", e.line, format!("must be a positive integer, found `{}`", e.value)))?;
            if n < crate::solver::MIN_CELLS {
                return Err(invalid("N", e.line, format!("must be >= {}, found {n}", crate::solver::MIN_CELLS)));
            }
            n
        }
    };
    let cfl = match ini.number("grid", "cfl")? {
        Some(c) if c > 0.0 && c <= 1.0 => c,
        Some(c) => return Err(invalid("cfl", ini.line("grid", "cfl"), format!("must satisfy 0 < cfl <= 1, found {c}"))),
        None => DEFAULT_CFL,
    };
    let reconstruction = match ini.get("grid", "reconstruction").map(|e| (e.value.as_str(), e.line)) {
        None | Some(("muscl", _)) => Reconstruction::Muscl,
        Some(("first-order", _)) => Reconstruction::FirstOrder,
        Some((other, line)) => {
            return Err(invalid("reconstruction", line, format!("must be `muscl` or `first-order`, found `{other}`")))
        }
    };
    let width = ini.number("grid", "init_width")?;
    let t0 = ini.number("grid", "t0")?;
    let init = match ini.get("grid", "init").map(|e| (e.value.as_str(), e.line)) {
        None | Some(("mollified", _)) => {
            if t0.is_some() {
                return Err(invalid("t0", ini.line("grid", "t0"), "is only allowed with init = exact"));
            }
            let width = width.map(|w| positive("init_width", ini.line("grid", "init_width"), w)).transpose()?;
            InitSpec::Mollified { width }
        }
        Some(("exact", line)) => {
            if width.is_some() {
                return Err(invalid("init_width", ini.line("grid", "init_width"), "is only allowed with init = mollified"));
            }
            let t0 = t0.ok_or_else(|| invalid("init", line, "= exact requires `t0` in [grid]"))?;
            InitSpec::Exact { t0: positive("t0", ini.line("grid", "t0"), t0)? }
        }
        Some((other, line)) => return Err(invalid("init", line, format!("must be `mollified` or `exact`, found `{other}`"))),
    };

    let eps_line = ini.line("sweep", "eps");
    let eps = ini.list("sweep", "eps")?.unwrap_or_else(|| DEFAULT_EPS.to_vec());
    for &e in &eps {
        positive("eps", eps_line, e)?;
    }
    for w in eps.windows(2) {
        if w[1] >= w[0] {
            return Err(invalid(
                "eps",
                eps_line,
                format!("must be strictly decreasing, but {} is followed by {}", w[0], w[1]),
            ));
        }
    }
    let a_rule = match ini.get("sweep", "a_rule") {
        None => ARule::Power(2.0),
        Some(e) => parse_a_rule(&e.value).map_err(|c| invalid("a_rule", e.line, c))?,
    };
    if let ARule::Power(_) = a_rule {
        for w in eps.windows(2) {
            if a_rule.a_of(w[1]) / w[1] >= a_rule.a_of(w[0]) / w[0] {
                return Err(invalid(
                    "a_rule",
                    ini.line("sweep", "a_rule").max(eps_line),
                    format!("must make a(eps)/eps strictly decreasing along eps, fails between {} and {}", w[0], w[1]),
                ));
            }
        }
    }
    let final_time = match ini.number("sweep", "T")? {
        Some(t) => positive("T", ini.line("sweep", "T"), t)?,
        None => DEFAULT_T,
    };
    let start = match init {
        InitSpec::Exact { t0 } => {
            if t0 >= final_time {
                return Err(invalid("t0", ini.line("grid", "t0"), format!("must be < T = {final_time}, found {t0}")));
            }
            t0
        }
        InitSpec::Mollified { .. } => 0.0,
    };
    let probe_line = ini.line("sweep", "probe_times");
    let probe_times = ini
        .list("sweep", "probe_times")?
        .unwrap_or_else(|| DEFAULT_PROBE_FRACTIONS.iter().map(|f| f * final_time).collect());
    if probe_times.is_empty() {
        return Err(invalid("probe_times", probe_line, "must not be empty"));
    }
    for &p in &probe_times {
        if !(p > start && p <= final_time) {
            return Err(invalid(
                "probe_times",
                probe_line,
                format!("must lie in ({start}, T = {final_time}], found {p}"),
            ));
        }
    }
    for w in probe_times.windows(2) {
        if w[1] <= w[0] {
            return Err(invalid(
                "probe_times",
                probe_line,
                format!("must be strictly increasing, but {} is followed by {}", w[0], w[1]),
            ));
        }
    }
    let mut transport = [1.0, 0.0, 1.0, DEFAULT_BETA];
    for (slot, key) in transport.iter_mut().zip(["mu_bar", "eta_bar", "kappa_bar", "beta"]) {
        if let Some(v) = ini.number("sweep", key)? {
            *slot = non_negative(key, ini.line("sweep", key), v)?;
        }
    }
    let output_dir = ini.get("output", "dir").map_or_else(|| PathBuf::from("out"), |e| PathBuf::from(&e.value));

    let config = SweepConfig {
        wave: WaveSpec {
            left: PrimitiveState::new(rho_l, theta_l, u_l),
            rho_right: rho_r,
            family,
            margin,
        },
        cells,
        cfl,
        reconstruction,
        init,
        eps,
        a_rule,
        final_time,
        probe_times,
        mu_bar: transport[0],
        eta_bar: transport[1],
        kappa_bar: transport[2],
        beta: transport[3],
        output_dir,
    };
    // Wave admissibility depends on several keys together; report it
    // against the right-state density.
    config
        .wave()
        .map_err(|e| invalid("rho_R", ini.line("wave", "rho_R"), format!("gives no admissible wave: {e}")))?;
    Ok(config)
}

fn parse_a_rule(value: &str) -> Result<ARule, String> {
    let mut words = value.split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some("square"), None, None) => Ok(ARule::Power(2.0)),
        (Some("zero"), None, None) => Ok(ARule::Zero),
        (Some("power"), Some(p), None) => match p.parse::<f64>() {
            Ok(p) if p > 1.0 && p.is_finite() => Ok(ARule::Power(p)),
            _ => Err(format!("power exponent must be a number > 1, found `{p}`")),
        },
        _ => Err(format!("must be `square`, `zero` or `power P`, found `{value}`")),
    }
}

pub fn parse_config(path: &Path) -> Result<SweepConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

impl SweepConfig {
    /// The wave in the frame the solver runs in: inflow on the left. Waves
    /// with `u_L <= 0` are reflected.
    pub fn wave(&self) -> Result<RarefactionWave, crate::rarefaction::WaveError> {
        let w = RarefactionWave::from_left_state(
            self.wave.left,
            self.wave.family,
            self.wave.rho_right,
            self.final_time,
            self.wave.margin,
        )?;
        Ok(if w.ends.left.u > 0.0 { w } else { w.reflected() })
    }

    pub fn eos(&self, eps: f64) -> Result<EosParams, crate::eos::EosError> {
        EosParams::new(self.wave.left.z(), eps)?
            .with_radiation(self.a_rule.a_of(eps))?
            .with_transport(self.mu_bar, self.eta_bar, self.kappa_bar, self.beta)
    }

    pub fn init_mode(&self, grid: &Grid) -> InitMode {
        match self.init {
            InitSpec::Mollified { width: Some(width) } => InitMode::MollifiedRiemann { width },
            InitSpec::Mollified { width: None } => InitMode::default_mollified(grid),
            InitSpec::Exact { t0 } => InitMode::ExactWaveAt { t0 },
        }
    }

    /// Canonical text form; parses back to an identical configuration.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let w = &self.wave;
        let _ = writeln!(s, "[wave]");
        let _ = writeln!(s, "rho_L = {}", w.left.rho);
        let _ = writeln!(s, "theta_L = {}", w.left.theta);
        let _ = writeln!(s, "u_L = {}", w.left.u);
        let _ = writeln!(s, "rho_R = {}", w.rho_right);
        let _ = writeln!(s, "family = {}", w.family.index());
        let _ = writeln!(s, "margin = {}", w.margin);
        let _ = writeln!(s, "\n[grid]");
        let _ = writeln!(s, "N = {}", self.cells);
        let _ = writeln!(s, "cfl = {}", self.cfl);
        let recon = match self.reconstruction {
            Reconstruction::Muscl => "muscl",
            Reconstruction::FirstOrder => "first-order",
        };
        let _ = writeln!(s, "reconstruction = {recon}");
        match self.init {
            InitSpec::Mollified { width } => {
                let _ = writeln!(s, "init = mollified");
                if let Some(width) = width {
                    let _ = writeln!(s, "init_width = {width}");
                }
            }
            InitSpec::Exact { t0 } => {
                let _ = writeln!(s, "init = exact");
                let _ = writeln!(s, "t0 = {t0}");
            }
        }
        let _ = writeln!(s, "\n[sweep]");
        let _ = writeln!(s, "eps = {}", fmt_list(&self.eps));
        let rule = match self.a_rule {
            ARule::Zero => "zero".to_string(),
            ARule::Power(2.0) => "square".to_string(),
            ARule::Power(p) => format!("power {p}"),
        };
        let _ = writeln!(s, "a_rule = {rule}");
        let _ = writeln!(s, "T = {}", self.final_time);
        let _ = writeln!(s, "probe_times = {}", fmt_list(&self.probe_times));
        let _ = writeln!(s, "mu_bar = {}", self.mu_bar);
        let _ = writeln!(s, "eta_bar = {}", self.eta_bar);
        let _ = writeln!(s, "kappa_bar = {}", self.kappa_bar);
        let _ = writeln!(s, "beta = {}", self.beta);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.output_dir.display());
        s
    }
}
