//! `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment, unknown or repeated keys are
//! rejected. List-valued keys take comma-separated values. Overrides given as
//! `key=value` strings are applied after the file and replace file values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::channel::ChannelModelKind;
use crate::design::Objective;
use crate::error::{Error, Result};
use crate::geometry::{kappa_from_gamma, LinkConfig};

/// Speed of light used to convert a carrier frequency to a wavelength.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const KEYS: &[&str] = &[
    "distance",
    "wavelength",
    "frequency",
    "snr_db",
    "kappa",
    "gamma",
    "m",
    "m_h",
    "m_v",
    "delta_h",
    "delta_v",
    "width",
    "model",
    "baseline",
    "objective",
    "sweep_variable",
    "sweep_start",
    "sweep_stop",
    "sweep_step",
    "sweep_count",
    "output",
    "timestamp",
];

/// What a one-dimensional sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Both spacings together.
    Delta,
    DeltaH,
    DeltaV,
    Kappa,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::Delta => "delta",
            SweepVariable::DeltaH => "delta_h",
            SweepVariable::DeltaV => "delta_v",
            SweepVariable::Kappa => "kappa",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(SweepVariable::Delta),
            "delta_h" => Ok(SweepVariable::DeltaH),
            "delta_v" => Ok(SweepVariable::DeltaV),
            "kappa" => Ok(SweepVariable::Kappa),
            other => Err(Error::Config(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepStride {
    Step(f64),
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub stride: SweepStride,
}

impl SweepSpec {
    /// Default spacing grid: 0.02 m to 1.0 m in 1 mm steps.
    pub fn default_spacing() -> Self {
        Self {
            variable: SweepVariable::Delta,
            start: 0.02,
            stop: 1.0,
            stride: SweepStride::Step(0.001),
        }
    }

    /// Default leakage grid: 0 to 0.45 in steps of 0.05.
    pub fn default_kappa() -> Self {
        Self {
            variable: SweepVariable::Kappa,
            start: 0.0,
            stop: 0.45,
            stride: SweepStride::Step(0.05),
        }
    }

    /// Grid points, computed as `start + i * step` so that every point is
    /// reproducible from its index.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Err(Error::Config(format!(
                "sweep range [{}, {}] must be finite and nonempty",
                self.start, self.stop
            )));
        }
        match self.stride {
            SweepStride::Step(step) => {
                if !(step > 0.0) || !step.is_finite() {
                    return Err(Error::Config(format!("sweep_step must be > 0, got {step}")));
                }
                let span = (self.stop - self.start) / step;
                let n = (span + 1e-9).floor() as usize + 1;
                Ok((0..n).map(|i| self.start + i as f64 * step).collect())
            }
            SweepStride::Count(0) => Err(Error::Config("sweep_count must be >= 1".into())),
            SweepStride::Count(1) => Ok(vec![self.start]),
            SweepStride::Count(n) => {
                let step = (self.stop - self.start) / (n - 1) as f64;
                Ok((0..n).map(|i| self.start + i as f64 * step).collect())
            }
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distance: f64,
    pub wavelength: f64,
    /// Carrier frequency, when the wavelength was derived from one.
    pub frequency: Option<f64>,
    pub snr_db: f64,
    /// Leakage values; the first drives single-valued operations.
    pub kappas: Vec<f64>,
    /// Total antenna counts for factorization sweeps.
    pub m_values: Vec<usize>,
    pub m_h: usize,
    pub m_v: usize,
    /// Fixed spacings; the optimal spacing is used when absent.
    pub delta_h: Option<f64>,
    pub delta_v: Option<f64>,
    pub width: f64,
    pub models: Vec<ChannelModelKind>,
    /// Add single-polarized capacity columns to spacing sweeps.
    pub baseline: bool,
    pub objectives: Vec<Objective>,
    pub sweep: Option<SweepSpec>,
    pub output: PathBuf,
    /// Emit a wall-clock metadata line (breaks byte-identical reruns).
    pub timestamp: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            distance: 100.0,
            wavelength: 0.01,
            frequency: None,
            snr_db: 25.0,
            kappas: vec![0.0],
            m_values: vec![64],
            m_h: 8,
            m_v: 8,
            delta_h: None,
            delta_v: None,
            width: 0.005,
            models: vec![ChannelModelKind::Exact],
            baseline: false,
            objectives: vec![Objective::Area, Objective::ApertureLength],
            sweep: None,
            output: PathBuf::from("out.csv"),
            timestamp: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut raw = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_pair(line).ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                ))
            })?;
            check_key(key)?;
            if raw.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Config(format!(
                    "line {}: key `{key}` given twice",
                    lineno + 1
                )));
            }
        }
        for o in overrides {
            let (key, value) = split_pair(o)
                .ok_or_else(|| Error::Config(format!("override `{o}` is not `key=value`")))?;
            check_key(key)?;
            raw.insert(key.to_string(), value.to_string());
        }
        Self::from_map(&raw)
    }

    fn from_map(raw: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = Self::default();
        let get = |k: &str| raw.get(k).map(String::as_str);

        if let Some(v) = get("distance") {
            cfg.distance = parse_f64("distance", v)?;
        }
        match (get("wavelength"), get("frequency")) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either wavelength or frequency, not both".into(),
                ))
            }
            (Some(v), None) => cfg.wavelength = parse_f64("wavelength", v)?,
            (None, Some(v)) => {
                let f = parse_f64("frequency", v)?;
                if !(f > 0.0) {
                    return Err(Error::Config(format!("frequency must be > 0, got {f}")));
                }
                cfg.frequency = Some(f);
                cfg.wavelength = SPEED_OF_LIGHT / f;
            }
            (None, None) => {}
        }
        if let Some(v) = get("snr_db") {
            cfg.snr_db = parse_f64("snr_db", v)?;
        }
        cfg.kappas = resolve_leakage(get("kappa"), get("gamma"))?.unwrap_or(cfg.kappas);
        if let Some(v) = get("m") {
            cfg.m_values = parse_list(v, |s| parse_count("m", s))?;
        }
        if let Some(v) = get("m_h") {
            cfg.m_h = parse_count("m_h", v)?;
        }
        if let Some(v) = get("m_v") {
            cfg.m_v = parse_count("m_v", v)?;
        }
        if let Some(v) = get("delta_h") {
            cfg.delta_h = Some(parse_f64("delta_h", v)?);
        }
        if let Some(v) = get("delta_v") {
            cfg.delta_v = Some(parse_f64("delta_v", v)?);
        }
        cfg.width = match get("width") {
            Some(v) => parse_f64("width", v)?,
            None => cfg.wavelength / 2.0,
        };
        if let Some(v) = get("model") {
            cfg.models = parse_list(v, |s| {
                if s == "both" {
                    Err(Error::Config("use `model = exact, approx`".into()))
                } else {
                    s.parse()
                }
            })?;
        }
        if let Some(v) = get("baseline") {
            cfg.baseline = parse_bool("baseline", v)?;
        }
        if let Some(v) = get("objective") {
            cfg.objectives = parse_list(v, str::parse)?;
        }
        if let Some(v) = get("timestamp") {
            cfg.timestamp = parse_bool("timestamp", v)?;
        }
        if let Some(v) = get("output") {
            cfg.output = PathBuf::from(v);
        }
        cfg.sweep = parse_sweep(raw)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for k in &self.kappas {
            self.link_for(*k)?;
        }
        if self.kappas.is_empty() || self.models.is_empty() || self.m_values.is_empty() {
            return Err(Error::Config(
                "kappa, model and m lists must be nonempty".into(),
            ));
        }
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::Config(format!(
                "width must be > 0, got {}",
                self.width
            )));
        }
        for (name, d) in [("delta_h", self.delta_h), ("delta_v", self.delta_v)] {
            if let Some(d) = d {
                if !(d >= 0.0) || !d.is_finite() {
                    return Err(Error::Config(format!(
                        "{name} must be finite and >= 0, got {d}"
                    )));
                }
            }
        }
        if let Some(s) = &self.sweep {
            s.points()?;
        }
        Ok(())
    }

    /// Link for one leakage value.
    pub fn link_for(&self, kappa: f64) -> Result<LinkConfig<f64>> {
        LinkConfig::with_kappa(self.distance, self.wavelength, kappa, self.snr_db)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Link for the first configured leakage.
    pub fn link(&self) -> Result<LinkConfig<f64>> {
        self.link_for(self.kappas[0])
    }

    /// Canonical `key = value` form. Parsing it yields an equal config.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("distance", fmt_f64(self.distance));
        match self.frequency {
            Some(f) => put("frequency", fmt_f64(f)),
            None => put("wavelength", fmt_f64(self.wavelength)),
        }
        put("snr_db", fmt_f64(self.snr_db));
        put("kappa", join(self.kappas.iter().map(|k| fmt_f64(*k))));
        put("m", join(self.m_values.iter().map(|m| m.to_string())));
        put("m_h", self.m_h.to_string());
        put("m_v", self.m_v.to_string());
        if let Some(d) = self.delta_h {
            put("delta_h", fmt_f64(d));
        }
        if let Some(d) = self.delta_v {
            put("delta_v", fmt_f64(d));
        }
        put("width", fmt_f64(self.width));
        put(
            "model",
            join(self.models.iter().map(|m| m.label().to_string())),
        );
        put("baseline", self.baseline.to_string());
        put(
            "objective",
            join(self.objectives.iter().map(|o| o.label().to_string())),
        );
        if let Some(sw) = &self.sweep {
            put("sweep_variable", sw.variable.label().to_string());
            put("sweep_start", fmt_f64(sw.start));
            put("sweep_stop", fmt_f64(sw.stop));
            match sw.stride {
                SweepStride::Step(st) => put("sweep_step", fmt_f64(st)),
                SweepStride::Count(n) => put("sweep_count", n.to_string()),
            }
        }
        put("output", self.output.display().to_string());
        put("timestamp", self.timestamp.to_string());
        s
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn split_pair(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown key `{key}`")))
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: `{v}` is not finite")));
    }
    Ok(x)
}

fn parse_count(key: &str, v: &str) -> Result<usize> {
    match v.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::Config(format!(
            "{key}: `{v}` is not a positive integer"
        ))),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: `{v}` is not a boolean"))),
    }
}

fn parse_list<T>(v: &str, mut f: impl FnMut(&str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',').map(|s| f(s.trim())).collect()
}

/// Converts `gamma` to `kappa` once. When both are given they must agree
/// entry by entry.
fn resolve_leakage(kappa: Option<&str>, gamma: Option<&str>) -> Result<Option<Vec<f64>>> {
    let kappas = kappa
        .map(|v| parse_list(v, |s| parse_f64("kappa", s)))
        .transpose()?;
    let gammas = gamma
        .map(|v| parse_list(v, |s| parse_f64("gamma", s)))
        .transpose()?;
    if let Some(g) = &gammas {
        if let Some(bad) = g.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::Config(format!(
                "gamma must lie in [0, 1], got {bad}"
            )));
        }
    }
    let from_gamma = gammas.map(|g| g.into_iter().map(kappa_from_gamma).collect::<Vec<f64>>());
    match (kappas, from_gamma) {
        (Some(k), Some(g)) => {
            let consistent = k.len() == g.len()
                && k.iter()
                    .zip(&g)
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
            if !consistent {
                return Err(Error::Config(format!(
                    "kappa {k:?} is inconsistent with gamma (implies kappa {g:?})"
                )));
            }
            Ok(Some(k))
        }
        (k, g) => Ok(k.or(g)),
    }
}

fn parse_sweep(raw: &BTreeMap<String, String>) -> Result<Option<SweepSpec>> {
    let get = |k: &str| raw.get(k).map(String::as_str);
    let any = [
        "sweep_variable",
        "sweep_start",
        "sweep_stop",
        "sweep_step",
        "sweep_count",
    ]
    .iter()
    .any(|k| raw.contains_key(*k));
    if !any {
        return Ok(None);
    }
    let variable = SweepVariable::parse(
        get("sweep_variable").ok_or_else(|| Error::Config("sweep_variable is required".into()))?,
    )?;
    let defaults = match variable {
        SweepVariable::Kappa => SweepSpec::default_kappa(),
        _ => SweepSpec::default_spacing(),
    };
    let start = get("sweep_start")
        .map(|v| parse_f64("sweep_start", v))
        .transpose()?;
    let stop = get("sweep_stop")
        .map(|v| parse_f64("sweep_stop", v))
        .transpose()?;
    let stride = match (get("sweep_step"), get("sweep_count")) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give either sweep_step or sweep_count, not both".into(),
            ))
        }
        (Some(v), None) => SweepStride::Step(parse_f64("sweep_step", v)?),
        (None, Some(v)) => SweepStride::Count(parse_count("sweep_count", v)?),
        (None, None) => defaults.stride,
    };
    Ok(Some(SweepSpec {
        variable,
        start: start.unwrap_or(defaults.start),
        stop: stop.unwrap_or(defaults.stop),
        stride,
    }))
}
