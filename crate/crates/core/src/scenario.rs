//! Scenario files, single runs, chirality sweeps and their CSV/JSON output.
//!
//! A scenario is a TOML document with the sections `system`, `chain`,
//! `pulse`, `integrator`, `output` and optionally `sweep`. Per-emitter chain
//! values accept a scalar (same for every emitter) or a list. The resolved
//! form, echoed in every JSON summary, has all defaults filled in and all
//! per-emitter values expanded to lists; it loads back as JSON.
//!
//! ```toml
//! [system]
//! emitters = 3
//! photons = 3
//!
//! [chain]
//! gamma_r = 1.0
//! gamma_l = 1.0
//!
//! [output]
//! populations = ["x1", "x2", "x3"]
//! fill = true
//!
//! [sweep]
//! ratios = [1, 2, 3, 4, 5]
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hierarchy::{initial_state, MAX_PHOTONS};
use crate::integrator::{integrate, IntegratorConfig};
use crate::liouvillian::{ChainConfig, EmitterParams};
use crate::observables::{ConservationReport, OutputSpec, PeakSummary, PopulationLabel, Trajectory};
use crate::pulse::GaussianPulse;
use crate::qubit_algebra::{EmitterRegister, MAX_EMITTERS};

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    /// Scenario file could not be read.
    Read { path: PathBuf, message: String },
    /// Malformed or invalid scenario; `key` is the dotted path of the culprit.
    Parse { key: String, message: String },
    /// The integration produced non-finite values.
    BlowUp { time: f64 },
    /// Any other failure while evaluating a valid scenario.
    Run(Error),
    /// Output could not be written.
    Write { path: PathBuf, message: String },
}

impl ScenarioError {
    fn key(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Parse { key: key.into(), message: message.into() }
    }

    /// 2 for unreadable or invalid scenarios, 3 for failed integrations,
    /// 1 for output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Read { .. } | Self::Parse { .. } => 2,
            Self::BlowUp { .. } | Self::Run(_) => 3,
            Self::Write { .. } => 1,
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Read { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            Self::Parse { key, message } => write!(f, "invalid `{key}`: {message}"),
            Self::BlowUp { time } => write!(f, "integration blew up at t = {time}"),
            Self::Run(e) => write!(f, "{e}"),
            Self::Write { path, message } => write!(f, "cannot write {}: {message}", path.display()),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { time } => Self::BlowUp { time },
            Error::InvalidParameter { name, reason } => Self::key(name, reason),
            other => Self::Run(other),
        }
    }
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;

/// One value for every emitter, or one per emitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerEmitter {
    Each(Vec<f64>),
    All(f64),
}

impl PerEmitter {
    fn expand(&self, n: usize, key: &str) -> ScenarioResult<Vec<f64>> {
        match self {
            Self::All(v) => Ok(vec![*v; n]),
            Self::Each(v) if v.len() == n => Ok(v.clone()),
            Self::Each(v) => Err(ScenarioError::key(key, format!("expected {n} values (one per emitter), got {}", v.len()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub emitters: usize,
    #[serde(default = "default_photons")]
    pub photons: usize,
}

fn default_photons() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub gamma_r: PerEmitter,
    pub gamma_l: PerEmitter,
    /// Spontaneous emission into non-waveguide modes.
    pub gamma: PerEmitter,
    pub delta: PerEmitter,
    /// Drive phase per emitter, radians.
    pub k0d: PerEmitter,
    /// Spacing over resonant wavelength.
    pub d_ratio: f64,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            gamma_r: PerEmitter::All(1.0),
            gamma_l: PerEmitter::All(1.0),
            gamma: PerEmitter::All(0.0),
            delta: PerEmitter::All(0.0),
            k0d: PerEmitter::All(0.0),
            d_ratio: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Γ_r/Γ_l values; each run uses Γ_l = 1 and Γ_r = ratio for every emitter.
    pub ratios: Vec<f64>,
    /// Series whose maximum is aggregated. Defaults to `fill`, then
    /// `concurrence`, then the first population.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub system: SystemSection,
    #[serde(default)]
    pub chain: ChainSection,
    #[serde(default)]
    pub pulse: GaussianPulse,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

fn path_error<E: fmt::Display>(e: serde_path_to_error::Error<E>) -> ScenarioError {
    let path = e.path().to_string();
    let key = if path == "." { "<top level>".to_string() } else { path };
    ScenarioError::key(key, e.inner().to_string())
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> ScenarioResult<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            ScenarioError::key("<syntax>", e.message().to_string())
        })?;
        let scn: Self = serde_path_to_error::deserialize(table).map_err(path_error)?;
        scn.validate()?;
        Ok(scn)
    }

    pub fn from_json_str(text: &str) -> ScenarioResult<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let scn: Self = serde_path_to_error::deserialize(&mut de).map_err(path_error)?;
        scn.validate()?;
        Ok(scn)
    }

    /// Loads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> ScenarioResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| ScenarioError::Read { path: path.to_path_buf(), message: e.to_string() })?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn register(&self) -> ScenarioResult<EmitterRegister> {
        EmitterRegister::new(self.system.emitters)
            .map_err(|e| ScenarioError::key("system.emitters", e.to_string()))
    }

    pub fn chain_config(&self) -> ScenarioResult<ChainConfig> {
        let n = self.system.emitters;
        let c = &self.chain;
        let gamma_r = c.gamma_r.expand(n, "chain.gamma_r")?;
        let gamma_l = c.gamma_l.expand(n, "chain.gamma_l")?;
        let gamma = c.gamma.expand(n, "chain.gamma")?;
        let delta = c.delta.expand(n, "chain.delta")?;
        let emitters = (0..n)
            .map(|i| EmitterParams { gamma_r: gamma_r[i], gamma_l: gamma_l[i], gamma_spont: gamma[i], delta: delta[i] })
            .collect();
        let cfg = ChainConfig { emitters, d_ratio: c.d_ratio, k0d: c.k0d.expand(n, "chain.k0d")? };
        cfg.validate().map_err(|e| match e {
            Error::InvalidParameter { name: "chain.gamma_spont", reason } => ScenarioError::key("chain.gamma", reason),
            other => other.into(),
        })?;
        Ok(cfg)
    }

    /// Series name aggregated by a sweep.
    pub fn sweep_series(&self) -> ScenarioResult<String> {
        if let Some(name) = self.sweep.as_ref().and_then(|s| s.series.clone()) {
            return Ok(name);
        }
        if self.output.fill {
            Ok("fill".into())
        } else if self.output.concurrence {
            Ok("concurrence".into())
        } else if let Some(first) = self.output.populations.first() {
            Ok(format!("P_{}", first.trim()))
        } else {
            Err(ScenarioError::key("output", "a sweep needs at least one requested series"))
        }
    }

    fn series_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.output.populations.iter().map(|p| format!("P_{}", p.trim())).collect();
        if self.output.concurrence {
            names.push("concurrence".into());
        }
        if self.output.fill {
            names.push("fill".into());
        }
        if self.output.pulse {
            names.push("pulse_intensity".into());
        }
        names
    }

    pub fn validate(&self) -> ScenarioResult<()> {
        let n = self.system.emitters;
        if !(1..=MAX_EMITTERS).contains(&n) {
            return Err(ScenarioError::key("system.emitters", format!("must be in 1..={MAX_EMITTERS}, got {n}")));
        }
        let p = self.system.photons;
        if !(1..=MAX_PHOTONS).contains(&p) {
            return Err(ScenarioError::key("system.photons", format!("must be in 1..={MAX_PHOTONS}, got {p}")));
        }
        self.chain_config()?;
        GaussianPulse::new(self.pulse.mu, self.pulse.t_bar)?;
        self.integrator.validate()?;

        let reg = self.register()?;
        for label in &self.output.populations {
            PopulationLabel::parse(&reg, label).map_err(|e| ScenarioError::key("output.populations", e.to_string()))?;
        }
        if self.output.concurrence && n != 2 {
            return Err(ScenarioError::key("output.concurrence", format!("needs 2 emitters, scenario has {n}")));
        }
        if self.output.fill && n != 3 {
            return Err(ScenarioError::key("output.fill", format!("needs 3 emitters, scenario has {n}")));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.ratios.is_empty() {
                return Err(ScenarioError::key("sweep.ratios", "must not be empty"));
            }
            if let Some(r) = sweep.ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
                return Err(ScenarioError::key("sweep.ratios", format!("ratios must be finite and >= 0, got {r}")));
            }
            let name = self.sweep_series()?;
            if !self.series_names().contains(&name) {
                return Err(ScenarioError::key("sweep.series", format!("`{name}` is not a requested series")));
            }
        }
        Ok(())
    }

    /// Copy with defaults filled in and per-emitter values expanded to lists.
    pub fn resolved(&self) -> ScenarioResult<Self> {
        let cfg = self.chain_config()?;
        let mut out = self.clone();
        out.chain = ChainSection {
            gamma_r: PerEmitter::Each(cfg.emitters.iter().map(|e| e.gamma_r).collect()),
            gamma_l: PerEmitter::Each(cfg.emitters.iter().map(|e| e.gamma_l).collect()),
            gamma: PerEmitter::Each(cfg.emitters.iter().map(|e| e.gamma_spont).collect()),
            delta: PerEmitter::Each(cfg.emitters.iter().map(|e| e.delta).collect()),
            k0d: PerEmitter::Each(cfg.k0d.clone()),
            d_ratio: cfg.d_ratio,
        };
        if let Some(sweep) = &mut out.sweep {
            sweep.series = Some(self.sweep_series()?);
        }
        Ok(out)
    }

    /// Replaces the integration step.
    pub fn with_dt(mut self, dt: f64) -> ScenarioResult<Self> {
        self.integrator.dt = dt;
        self.integrator.validate()?;
        Ok(self)
    }

    /// Copy with Γ_l = 1 and Γ_r = `ratio` on every emitter.
    pub fn with_ratio(&self, ratio: f64) -> Self {
        let mut out = self.clone();
        out.chain.gamma_l = PerEmitter::All(1.0);
        out.chain.gamma_r = PerEmitter::All(ratio);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPeak {
    pub series: String,
    #[serde(flatten)]
    pub peak: PeakSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub peaks: Vec<NamedPeak>,
    pub diagnostics: ConservationReport,
}

impl RunOutput {
    pub fn peak(&self, series: &str) -> Option<PeakSummary> {
        self.peaks.iter().find(|p| p.series == series).map(|p| p.peak)
    }
}

/// Integrates one scenario and extracts its requested series.
pub fn run(scn: &Scenario) -> ScenarioResult<RunOutput> {
    scn.validate()?;
    let reg = scn.register()?;
    let chain = scn.chain_config()?;
    let state0 = initial_state(reg, scn.system.photons)?;
    let states = integrate(&chain, scn.pulse, &state0, &scn.integrator)?;
    let trajectory = Trajectory::from_states(&reg, &states, &scn.pulse, &scn.output)?;
    let peaks = trajectory
        .series
        .iter()
        .map(|s| Ok(NamedPeak { series: s.name.clone(), peak: trajectory.peak(&s.name)? }))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(RunOutput { trajectory, peaks, diagnostics: ConservationReport::from_states(&states) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub ratio: f64,
    pub peak: PeakSummary,
    pub run: RunOutput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub series: String,
    pub points: Vec<SweepPoint>,
}

/// One run per ratio, in the order the ratios are listed. Runs go to the
/// rayon pool with the `parallel` feature.
pub fn sweep(scn: &Scenario) -> ScenarioResult<SweepOutput> {
    scn.validate()?;
    let spec = scn.sweep.as_ref().ok_or_else(|| ScenarioError::key("sweep", "section missing"))?;
    let series = scn.sweep_series()?;
    let one = |&ratio: &f64| {
        let run = run(&scn.with_ratio(ratio))?;
        let peak = run.peak(&series).ok_or_else(|| ScenarioError::key("sweep.series", format!("no series `{series}`")))?;
        Ok(SweepPoint { ratio, peak, run })
    };
    #[cfg(feature = "parallel")]
    let points = spec.ratios.par_iter().map(one).collect::<ScenarioResult<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let points = spec.ratios.iter().map(one).collect::<ScenarioResult<Vec<_>>>()?;
    Ok(SweepOutput { series, points })
}

/// C `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-4, 1e12)`.
pub fn format_sig12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `t` followed by every series, one row per recorded time.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t");
    for s in &traj.series {
        out.push(',');
        out.push_str(&s.name);
    }
    out.push('\n');
    for (i, t) in traj.times.iter().enumerate() {
        out.push_str(&format_sig12(*t));
        for s in &traj.series {
            out.push(',');
            out.push_str(&format_sig12(s.values[i]));
        }
        out.push('\n');
    }
    out
}

pub fn sweep_csv(sw: &SweepOutput) -> String {
    let mut out = format!("ratio,{}_max,t_at_max\n", sw.series);
    for p in &sw.points {
        out.push_str(&format!("{},{},{}\n", format_sig12(p.ratio), format_sig12(p.peak.value), format_sig12(p.peak.time)));
    }
    out
}

#[derive(Serialize)]
struct RunSummary<'a> {
    config: &'a Scenario,
    peaks: &'a [NamedPeak],
    diagnostics: &'a ConservationReport,
}

#[derive(Serialize)]
struct SweepEntry<'a> {
    ratio: f64,
    peaks: &'a [NamedPeak],
    diagnostics: &'a ConservationReport,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    config: &'a Scenario,
    series: &'a str,
    runs: Vec<SweepEntry<'a>>,
}

pub fn run_summary_json(resolved: &Scenario, out: &RunOutput) -> String {
    let summary = RunSummary { config: resolved, peaks: &out.peaks, diagnostics: &out.diagnostics };
    serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
}

pub fn sweep_summary_json(resolved: &Scenario, sw: &SweepOutput) -> String {
    let runs = sw
        .points
        .iter()
        .map(|p| SweepEntry { ratio: p.ratio, peaks: &p.run.peaks, diagnostics: &p.run.diagnostics })
        .collect();
    let summary = SweepSummary { config: resolved, series: &sw.series, runs };
    serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
}

fn write_file(path: PathBuf, contents: &str) -> ScenarioResult<PathBuf> {
    fs::write(&path, contents).map_err(|e| ScenarioError::Write { path: path.clone(), message: e.to_string() })?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> ScenarioResult<()> {
    fs::create_dir_all(dir).map_err(|e| ScenarioError::Write { path: dir.to_path_buf(), message: e.to_string() })
}

/// Writes `<stem>.csv` and `<stem>.summary.json`; returns the paths written.
pub fn write_run(dir: &Path, stem: &str, resolved: &Scenario, out: &RunOutput) -> ScenarioResult<Vec<PathBuf>> {
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir.join(format!("{stem}.csv")), &trajectory_csv(&out.trajectory))?,
        write_file(dir.join(format!("{stem}.summary.json")), &run_summary_json(resolved, out))?,
    ])
}

/// Writes the aggregate `<stem>.sweep.csv`, `<stem>.sweep.json`, and one
/// trajectory CSV per ratio as `<stem>.ratio-<r>.csv`.
pub fn write_sweep(dir: &Path, stem: &str, resolved: &Scenario, sw: &SweepOutput) -> ScenarioResult<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut paths = vec![
        write_file(dir.join(format!("{stem}.sweep.csv")), &sweep_csv(sw))?,
        write_file(dir.join(format!("{stem}.sweep.json")), &sweep_summary_json(resolved, sw))?,
    ];
    for p in &sw.points {
        let name = format!("{stem}.ratio-{}.csv", format_sig12(p.ratio));
        paths.push(write_file(dir.join(name), &trajectory_csv(&p.run.trajectory))?);
    }
    Ok(paths)
}
