//! Flat `key = value` run configuration.
//!
//! ```text
//! # periodic coupling jumps, |kappa|² in units of g²
//! g2 = 2.5e-3
//! gamma = 5e-3
//! kappa2_out = 1.01
//! kappa2_in = 4
//! delta_z = 0.02D      # D: the optimal period of the base coupling
//! z_total = 10D
//! ```
//!
//! Lengths are plain numbers (absolute) or carry a `D` suffix (multiples of
//! `π / |Re(E1 - E2)|` at `kappa2_out`). Complex values are written `re` or
//! `re, im`. Every optional key has a default; [`parse_config_report`] lists
//! the defaults it filled in.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::experiments::{default_dz_max, phase_aligned_start, InitialState, ScenarioConfig};
use crate::linalg::{Vec2, C64};
use crate::propagation::NonlinearParams;
use crate::schedule::{optimal_period, CouplingSchedule};
use crate::spectral::{SystemParams, DEFAULT_EP_TOL};

/// A length, absolute or in units of the optimal period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Absolute(f64),
    Periods(f64),
}

impl Length {
    pub fn resolve(self, optimal: Option<f64>) -> Result<f64> {
        match self {
            Length::Absolute(x) => Ok(x),
            Length::Periods(k) => optimal.map(|d| k * d).ok_or_else(|| {
                Error::invalid(
                    "D",
                    "lengths in units of D need kappa2_out > 1 (no oscillation period at or below the EP)",
                )
            }),
        }
    }

    fn scaled(self, s: f64) -> Length {
        match self {
            Length::Absolute(x) => Length::Absolute(x * s),
            Length::Periods(k) => Length::Periods(k * s),
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Absolute(x) => write!(f, "{x}"),
            Length::Periods(k) => write!(f, "{k}D"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    /// First window where the interference phase of the unperturbed
    /// evolution first reaches `cos Φ = +1`.
    Auto,
    At(Length),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSpec {
    Waveguide(C64, C64),
    Eigen(C64, C64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub g2: f64,
    pub gamma: f64,
    pub kappa2_out: f64,
    pub kappa2_in: f64,
    pub beta: f64,
    pub period: Length,
    pub delta_z: Length,
    pub z_total: Length,
    pub z_first: Start,
    pub initial: InitialSpec,
    pub normalize: bool,
    pub sample_dz: Length,
    pub ep_tol: f64,
    pub h: Length,
    pub nonlinear: bool,
    pub g_c: f64,
    pub alpha: f64,
    pub dz_points: usize,
    pub dz_max: Option<Length>,
    pub period_ratio_min: f64,
    pub period_ratio_max: f64,
    pub period_ratio_points: usize,
}

/// What the parser filled in or wants to flag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseReport {
    pub defaults_applied: Vec<(&'static str, String)>,
    pub warnings: Vec<String>,
}

const KEYS: &[&str] = &[
    "g2",
    "gamma",
    "kappa2_out",
    "kappa2_in",
    "beta",
    "period",
    "delta_z",
    "z_total",
    "z_first",
    "u1",
    "u2",
    "a1",
    "a2",
    "normalize",
    "sample_dz",
    "ep_tol",
    "h",
    "nonlinear",
    "g_c",
    "alpha",
    "dz_points",
    "dz_max",
    "period_ratio_min",
    "period_ratio_max",
    "period_ratio_points",
];

struct Entries {
    map: BTreeMap<&'static str, (usize, String)>,
    report: ParseReport,
}

fn config_err(line: usize, key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| config_err(line, key, format!("not a number: `{v}`")))?;
    if !x.is_finite() {
        return Err(config_err(line, key, "must be finite"));
    }
    Ok(x)
}

fn parse_length(line: usize, key: &str, v: &str) -> Result<Length> {
    match v.strip_suffix('D') {
        Some(k) => Ok(Length::Periods(parse_f64(line, key, k.trim())?)),
        None => Ok(Length::Absolute(parse_f64(line, key, v)?)),
    }
}

fn parse_complex(line: usize, key: &str, v: &str) -> Result<C64> {
    match v.split_once(',') {
        Some((re, im)) => Ok(C64::new(
            parse_f64(line, key, re.trim())?,
            parse_f64(line, key, im.trim())?,
        )),
        None => Ok(C64::new(parse_f64(line, key, v)?, 0.0)),
    }
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(config_err(line, key, format!("expected true or false, got `{v}`"))),
    }
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize> {
    match v.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(config_err(line, key, format!("expected a positive integer, got `{v}`"))),
    }
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, content, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            let key = KEYS
                .iter()
                .find(|&&known| known == k)
                .ok_or_else(|| config_err(line, k, "unknown key"))?;
            if v.is_empty() {
                return Err(config_err(line, k, "missing value"));
            }
            if let Some((first, _)) = map.insert(*key, (line, v.to_string())) {
                return Err(config_err(line, k, format!("duplicate key (first set on line {first})")));
            }
        }
        Ok(Entries {
            map,
            report: ParseReport::default(),
        })
    }

    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }

    fn required<T>(&self, key: &'static str, f: fn(usize, &str, &str) -> Result<T>) -> Result<T> {
        match self.map.get(key) {
            Some((line, v)) => f(*line, key, v),
            None => Err(config_err(0, key, "missing required key")),
        }
    }

    fn optional<T: Clone>(
        &mut self,
        key: &'static str,
        f: fn(usize, &str, &str) -> Result<T>,
        default: T,
        show: impl Fn(&T) -> String,
    ) -> Result<T> {
        match self.map.get(key) {
            Some((line, v)) => f(*line, key, v),
            None => {
                self.report.defaults_applied.push((key, show(&default)));
                Ok(default)
            }
        }
    }
}

/// Parses and validates a config, discarding the report.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_report(text).map(|(c, _)| c)
}

pub fn parse_config_report(text: &str) -> Result<(RunConfig, ParseReport)> {
    let mut e = Entries::parse(text)?;
    let g2 = e.required("g2", parse_f64)?;
    let gamma = e.required("gamma", parse_f64)?;
    let kappa2_out = e.required("kappa2_out", parse_f64)?;
    let kappa2_in = e.required("kappa2_in", parse_f64)?;
    for (key, v) in [("g2", g2), ("kappa2_out", kappa2_out), ("kappa2_in", kappa2_in)] {
        if v < 0.0 {
            return Err(config_err(e.line(key), key, "must be >= 0"));
        }
    }

    let show_len = |l: &Length| l.to_string();
    let show_f = |x: &f64| x.to_string();
    let beta = e.optional("beta", parse_f64, 0.0, show_f)?;
    let period = e.optional("period", parse_length, Length::Periods(1.0), show_len)?;
    let delta_z = e.optional("delta_z", parse_length, period.scaled(1.0 / 50.0), show_len)?;
    let z_total = e.optional("z_total", parse_length, period.scaled(10.0), show_len)?;
    let z_first = match e.map.get("z_first") {
        Some((_, v)) if v == "auto" => Start::Auto,
        Some((line, v)) => Start::At(parse_length(*line, "z_first", v)?),
        None => {
            e.report.defaults_applied.push(("z_first", "auto".into()));
            Start::Auto
        }
    };

    let has = |k: &str| e.map.contains_key(k);
    let initial = match (has("u1") || has("u2"), has("a1") || has("a2")) {
        (true, true) => {
            let line = e.line("a1").max(e.line("a2"));
            return Err(config_err(line, "a1", "give either u1/u2 or a1/a2, not both"));
        }
        (false, true) => InitialSpec::Eigen(
            e.required("a1", parse_complex)?,
            e.required("a2", parse_complex)?,
        ),
        (true, false) => InitialSpec::Waveguide(
            e.required("u1", parse_complex)?,
            e.required("u2", parse_complex)?,
        ),
        (false, false) => {
            e.report.defaults_applied.push(("u1", "1".into()));
            e.report.defaults_applied.push(("u2", "1".into()));
            InitialSpec::Waveguide(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
        }
    };

    let normalize = e.optional("normalize", parse_bool, false, bool::to_string)?;
    let sample_dz = e.optional("sample_dz", parse_length, period.scaled(1.0 / 100.0), show_len)?;
    let ep_tol = e.optional("ep_tol", parse_f64, DEFAULT_EP_TOL, show_f)?;
    let h = e.optional("h", parse_length, period.scaled(1.0 / 1024.0), show_len)?;
    let nonlinear = e.optional("nonlinear", parse_bool, false, bool::to_string)?;
    let g_c = e.optional("g_c", parse_f64, g2.sqrt(), show_f)?;
    let alpha = e.optional("alpha", parse_f64, 1e-4, show_f)?;
    let dz_points = e.optional("dz_points", parse_count, 200, usize::to_string)?;
    let dz_max = match e.map.get("dz_max") {
        Some((_, v)) if v == "auto" => None,
        Some((line, v)) => Some(parse_length(*line, "dz_max", v)?),
        None => {
            e.report.defaults_applied.push(("dz_max", "auto".into()));
            None
        }
    };
    let period_ratio_min = e.optional("period_ratio_min", parse_f64, 0.5, show_f)?;
    let period_ratio_max = e.optional("period_ratio_max", parse_f64, 1.5, show_f)?;
    let period_ratio_points = e.optional("period_ratio_points", parse_count, 101, usize::to_string)?;

    let positive = [
        ("ep_tol", ep_tol > 0.0),
        ("g_c", g_c >= 0.0),
        ("alpha", alpha >= 0.0),
        ("period_ratio_min", period_ratio_min > 0.0),
        ("period_ratio_max", period_ratio_max >= period_ratio_min),
    ];
    for (key, ok) in positive {
        if !ok {
            return Err(config_err(e.line(key), key, "out of range"));
        }
    }
    let lengths = [
        ("period", Some(period)),
        ("delta_z", Some(delta_z)),
        ("z_total", Some(z_total)),
        ("sample_dz", Some(sample_dz)),
        ("h", Some(h)),
        ("dz_max", dz_max),
    ];
    for (key, l) in lengths {
        let v = match l {
            Some(Length::Absolute(x) | Length::Periods(x)) => x,
            None => continue,
        };
        if !(v > 0.0) {
            return Err(config_err(e.line(key), key, "must be > 0"));
        }
    }
    if let Start::At(Length::Absolute(x) | Length::Periods(x)) = z_first {
        if x < 0.0 {
            return Err(config_err(e.line("z_first"), "z_first", "must be >= 0"));
        }
    }

    if kappa2_in <= 1.0 {
        e.report.warnings.push(format!(
            "kappa2_in = {kappa2_in} <= 1: the perturbed coupling sits at or below the EP"
        ));
    }
    if kappa2_out <= 1.0 {
        e.report.warnings.push(format!(
            "kappa2_out = {kappa2_out} <= 1: the base coupling sits at or below the EP"
        ));
    }

    let cfg = RunConfig {
        g2,
        gamma,
        kappa2_out,
        kappa2_in,
        beta,
        period,
        delta_z,
        z_total,
        z_first,
        initial,
        normalize,
        sample_dz,
        ep_tol,
        h,
        nonlinear,
        g_c,
        alpha,
        dz_points,
        dz_max,
        period_ratio_min,
        period_ratio_max,
        period_ratio_points,
    };
    Ok((cfg, e.report))
}

fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}, {}", c.re, c.im)
    }
}

/// Writes every key explicitly; reparsing gives back an equal config.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    put("g2", cfg.g2.to_string());
    put("gamma", cfg.gamma.to_string());
    put("kappa2_out", cfg.kappa2_out.to_string());
    put("kappa2_in", cfg.kappa2_in.to_string());
    put("beta", cfg.beta.to_string());
    put("period", cfg.period.to_string());
    put("delta_z", cfg.delta_z.to_string());
    put("z_total", cfg.z_total.to_string());
    put(
        "z_first",
        match cfg.z_first {
            Start::Auto => "auto".into(),
            Start::At(l) => l.to_string(),
        },
    );
    match cfg.initial {
        InitialSpec::Waveguide(u1, u2) => {
            put("u1", fmt_complex(u1));
            put("u2", fmt_complex(u2));
        }
        InitialSpec::Eigen(a1, a2) => {
            put("a1", fmt_complex(a1));
            put("a2", fmt_complex(a2));
        }
    }
    put("normalize", cfg.normalize.to_string());
    put("sample_dz", cfg.sample_dz.to_string());
    put("ep_tol", cfg.ep_tol.to_string());
    put("h", cfg.h.to_string());
    put("nonlinear", cfg.nonlinear.to_string());
    put("g_c", cfg.g_c.to_string());
    put("alpha", cfg.alpha.to_string());
    put("dz_points", cfg.dz_points.to_string());
    put(
        "dz_max",
        cfg.dz_max.map_or_else(|| "auto".into(), |l| l.to_string()),
    );
    put("period_ratio_min", cfg.period_ratio_min.to_string());
    put("period_ratio_max", cfg.period_ratio_max.to_string());
    put("period_ratio_points", cfg.period_ratio_points.to_string());
    out
}

impl RunConfig {
    /// Base parameters with `kappa` at `kappa2_out`.
    pub fn params(&self) -> Result<SystemParams> {
        let mut p = SystemParams::from_squared(self.g2, self.gamma, self.kappa2_out)?;
        p.beta = self.beta;
        p.validate()?;
        Ok(p)
    }

    fn kappa_in(&self) -> C64 {
        C64::new((self.kappa2_in * self.g2).sqrt(), 0.0)
    }

    /// Optimal period of the base coupling, when it has one.
    pub fn optimal_period(&self) -> Option<f64> {
        self.params().ok().and_then(|p| optimal_period(&p).ok())
    }

    /// Fully resolved scenario; `nonlinear` forces the saturable path on.
    pub fn scenario(&self, nonlinear: bool) -> Result<ScenarioConfig> {
        let params = self.params()?;
        let d = self.optimal_period();
        let initial = match self.initial {
            InitialSpec::Waveguide(u1, u2) => InitialState::Waveguide(Vec2::new(u1, u2)),
            InitialSpec::Eigen(a1, a2) => InitialState::Eigen { a1, a2 },
        };
        let nl = if nonlinear || self.nonlinear {
            Some(NonlinearParams::new(self.g_c, self.alpha)?)
        } else {
            None
        };
        let mut cfg = ScenarioConfig {
            params,
            schedule: CouplingSchedule {
                kappa_base: params.kappa,
                kappa_pert: self.kappa_in(),
                delta_z: self.delta_z.resolve(d)?,
                period: self.period.resolve(d)?,
                z_first: 0.0,
                z_total: self.z_total.resolve(d)?,
            },
            initial,
            normalize: self.normalize,
            nonlinear: nl,
            sample_dz: self.sample_dz.resolve(d)?,
            rk4_step: self.h.resolve(d)?,
            ep_tol: self.ep_tol,
        };
        cfg.schedule.z_first = match self.z_first {
            Start::At(l) => l.resolve(d)?,
            Start::Auto => {
                let u0 = cfg.initial_state()?;
                match phase_aligned_start(&params, &u0, self.ep_tol) {
                    Ok(z) => z,
                    // No interference term to align: start at the entrance.
                    Err(Error::UndefinedPhase(_) | Error::ExceptionalPoint(_)) => 0.0,
                    Err(err) => return Err(err),
                }
            }
        };
        cfg.schedule.validate()?;
        Ok(cfg)
    }

    /// Window lengths for the sweeps.
    pub fn dz_grid(&self, scenario: &ScenarioConfig) -> Result<Vec<f64>> {
        let top = match self.dz_max {
            Some(l) => l.resolve(self.optimal_period())?,
            None => default_dz_max(&scenario.params, &scenario.schedule),
        };
        Ok(crate::experiments::open_grid(top, self.dz_points))
    }

    pub fn period_ratios(&self) -> Vec<f64> {
        crate::experiments::closed_grid(
            self.period_ratio_min,
            self.period_ratio_max,
            self.period_ratio_points,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "g2 = 2.5e-3\ngamma = 5e-3\nkappa2_out = 1.01\nkappa2_in = 4\n";

    #[test]
    fn minimal_config_defaults() {
        let (cfg, report) = parse_config_report(MINIMAL).unwrap();
        assert_eq!(cfg.beta, 0.0);
        assert_eq!(cfg.period, Length::Periods(1.0));
        assert_eq!(cfg.delta_z, Length::Periods(0.02));
        assert_eq!(cfg.z_total, Length::Periods(10.0));
        assert!(report.warnings.is_empty());
        assert!(report.defaults_applied.iter().any(|(k, _)| *k == "delta_z"));

        let sc = cfg.scenario(false).unwrap();
        let d = std::f64::consts::PI / 0.01;
        assert!((sc.schedule.period - d).abs() < 1e-9);
        assert!((sc.schedule.delta_z - d / 50.0).abs() < 1e-9);
        assert!((sc.schedule.z_total - 10.0 * d).abs() < 1e-9);
        assert!((sc.schedule.z_first - d).abs() < 1e-9);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{MINIMAL}beta = 0.5   # trailing\n");
        assert_eq!(parse_config(&text).unwrap().beta, 0.5);
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        let err = parse_config(&format!("{MINIMAL}kapa = 3\n")).unwrap_err();
        assert!(matches!(err, Error::Config { line: 5, ref key, .. } if key == "kapa"));
        let err = parse_config("g2 = 1\ngamma = 0\nkappa2_out = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "kappa2_in"));
        assert!(err.is_config_error());
    }

    #[test]
    fn rejects_bad_values() {
        for extra in [
            "beta = abc",
            "period = -1D",
            "dz_points = 0",
            "normalize = yes",
            "gamma = 1",
            "u1 = 1\na1 = 1",
            "z_first = -2",
            "ep_tol = 0",
            "beta",
        ] {
            let text = format!("{MINIMAL}{extra}\n");
            let err = parse_config(&text).unwrap_err();
            assert!(err.is_config_error(), "{extra}: {err}");
        }
    }

    #[test]
    fn ep_crossing_is_a_warning() {
        let text = MINIMAL.replace("kappa2_in = 4", "kappa2_in = 0.9");
        let (_, report) = parse_config_report(&text).unwrap();
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn round_trip() {
        let text = format!(
            "{MINIMAL}a1 = 1, 0.5\na2 = -0.25\nz_first = 12.5\ndz_max = 0.1D\nh = 0.5\n"
        );
        let cfg = parse_config(&text).unwrap();
        let again = parse_config(&serialize_config(&cfg)).unwrap();
        assert_eq!(cfg, again);
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&serialize_config(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn periods_need_a_beat() {
        let text = MINIMAL.replace("kappa2_out = 1.01", "kappa2_out = 1");
        let cfg = parse_config(&text).unwrap();
        assert!(cfg.scenario(false).unwrap_err().is_config_error());
        let text = format!("{text}period = 300\n");
        assert!(parse_config(&text).unwrap().scenario(false).is_ok());
    }

    #[test]
    fn invalid_schedule_is_a_config_error() {
        let text = format!("{MINIMAL}delta_z = 2D\n");
        let err = parse_config(&text).unwrap().scenario(false).unwrap_err();
        assert!(err.is_config_error());
    }
}
