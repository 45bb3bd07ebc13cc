//! Experiment configuration: built-in defaults, an optional config file and
//! command-line overrides, applied in that order.
//!
//! Config files are flat `key = value` lines. Keys before the first
//! `[section]` apply to every experiment; a section named after an
//! experiment (`[phase-diagram]`, `[evolve]`, ...) applies to that one only.
//! `#` and `;` start comments. Keys match the long flag names, with `-` or
//! `_` accepted interchangeably.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use steadyent::liouville::{liouvillian, SystemParams};
use steadyent::ReservoirModel;

use crate::initial::{parse_initial_list, InitialState};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Evolve,
    Steady,
    PhaseDiagram,
    Fidelities,
    TransferScan,
    SingleQubit,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Evolve,
        Experiment::Steady,
        Experiment::PhaseDiagram,
        Experiment::Fidelities,
        Experiment::TransferScan,
        Experiment::SingleQubit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::Steady => "steady",
            Experiment::PhaseDiagram => "phase-diagram",
            Experiment::Fidelities => "fidelities",
            Experiment::TransferScan => "transfer-scan",
            Experiment::SingleQubit => "single-qubit",
        }
    }

    /// Names of the grid axes the experiment scans.
    pub fn axes(self) -> &'static [&'static str] {
        match self {
            Experiment::Evolve | Experiment::Steady => &[],
            Experiment::PhaseDiagram => &["omega", "coupling"],
            Experiment::Fidelities | Experiment::SingleQubit => &["omega"],
            Experiment::TransferScan => &["g_tau"],
        }
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::invalid("experiment", s, "unknown experiment"))
    }
}

/// Parameter sets of the two time-evolution figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Separate reservoirs, `Omega = 2`, `omega_xx = 5`, Werner family.
    Fig1,
    /// Common reservoir, `Omega = 1.5`, `omega_xx = 10`, Yu-Eberly, Werner
    /// and eg-ge families.
    Fig2,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
        }
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            _ => Err(CliError::invalid("preset", s, "expected fig1 or fig2")),
        }
    }
}

/// Parses a real number, also accepting `pi`, `X*pi`, `Xpi` and `pi/X`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let pi = std::f64::consts::PI;
    let value = if s == "pi" {
        pi
    } else if let Some(d) = s.strip_prefix("pi/") {
        pi / d.parse::<f64>().ok()?
    } else {
        s.strip_suffix("pi")?.trim_end_matches('*').parse::<f64>().ok()? * pi
    };
    value.is_finite().then_some(value)
}

/// `steps` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: &str, start: f64, stop: f64, steps: usize) -> Self {
        Self { name: name.to_string(), start, stop, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last
                }
            })
            .collect()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}:{}:{}", self.name, self.start, self.stop, self.steps)
    }
}

/// Axes written as `name=start:stop:steps`, comma separated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn axis(&self, name: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    pub fn values(&self, name: &str) -> Vec<f64> {
        self.axis(name).map(Axis::values).unwrap_or_default()
    }

    /// Replaces axes of the same name, appends new ones.
    pub fn merged(mut self, other: &Grid) -> Grid {
        for axis in &other.axes {
            match self.axes.iter_mut().find(|a| a.name == axis.name) {
                Some(slot) => *slot = axis.clone(),
                None => self.axes.push(axis.clone()),
            }
        }
        self
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.axes.iter().map(Axis::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| CliError::invalid("grid", s, reason);
        let mut axes = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, range) = part.split_once('=').ok_or_else(|| bad("expected name=start:stop:steps"))?;
            let fields: Vec<&str> = range.split(':').collect();
            let [start, stop, steps] = fields[..] else {
                return Err(bad("expected name=start:stop:steps"));
            };
            let start = parse_number(start).ok_or_else(|| bad("start is not a finite number"))?;
            let stop = parse_number(stop).ok_or_else(|| bad("stop is not a finite number"))?;
            let steps: usize = steps.trim().parse().map_err(|_| bad("steps is not a count"))?;
            if steps < 2 {
                return Err(bad("scans need at least 2 steps"));
            }
            let name = name.trim().replace('-', "_");
            if axes.iter().any(|a: &Axis| a.name == name) {
                return Err(bad("axis listed twice"));
            }
            axes.push(Axis { name, start, stop, steps });
        }
        if axes.is_empty() {
            return Err(bad("no axes given"));
        }
        Ok(Grid { axes })
    }
}

/// Optional settings from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub omega: Option<f64>,
    pub omega2: Option<f64>,
    pub delta: Option<f64>,
    pub delta2: Option<f64>,
    pub coupling: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma2: Option<f64>,
    pub reservoir: Option<ReservoirModel>,
    pub initial: Option<Vec<InitialState>>,
    pub t_final: Option<f64>,
    pub samples: Option<usize>,
    pub grid: Option<Grid>,
    pub g_tau: Option<f64>,
    pub spot_checks: Option<usize>,
    pub preset: Option<Preset>,
    pub output: Option<PathBuf>,
    pub boundary: Option<PathBuf>,
}

impl Overrides {
    /// Sets one field from its textual key and value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let number = || parse_number(value).ok_or_else(|| CliError::invalid(&key, value, "not a finite number"));
        let count = || value.parse::<usize>().map_err(|_| CliError::invalid(&key, value, "not a count"));
        match key.as_str() {
            "omega" => self.omega = Some(number()?),
            "omega2" => self.omega2 = Some(number()?),
            "delta" => self.delta = Some(number()?),
            "delta2" => self.delta2 = Some(number()?),
            "coupling" => self.coupling = Some(number()?),
            "gamma" => self.gamma = Some(number()?),
            "gamma2" => self.gamma2 = Some(number()?),
            "reservoir" => {
                self.reservoir =
                    Some(value.parse().map_err(|_| CliError::invalid(&key, value, "expected separate or common"))?)
            }
            "initial" => self.initial = Some(parse_initial_list(value)?),
            "t_final" => self.t_final = Some(number()?),
            "samples" => self.samples = Some(count()?),
            "grid" => self.grid = Some(value.parse()?),
            "g_tau" => self.g_tau = Some(number()?),
            "spot_checks" => self.spot_checks = Some(count()?),
            "preset" => self.preset = Some(value.parse()?),
            "output" => self.output = Some(PathBuf::from(value)),
            "boundary" => self.boundary = Some(PathBuf::from(value)),
            _ => return Err(CliError::invalid(&key, value, "unknown key")),
        }
        Ok(())
    }

    /// Fields set in `over` win.
    pub fn merge(self, over: Overrides) -> Overrides {
        let grid = match (self.grid, over.grid) {
            (Some(a), Some(b)) => Some(a.merged(&b)),
            (a, b) => b.or(a),
        };
        Overrides {
            omega: over.omega.or(self.omega),
            omega2: over.omega2.or(self.omega2),
            delta: over.delta.or(self.delta),
            delta2: over.delta2.or(self.delta2),
            coupling: over.coupling.or(self.coupling),
            gamma: over.gamma.or(self.gamma),
            gamma2: over.gamma2.or(self.gamma2),
            reservoir: over.reservoir.or(self.reservoir),
            initial: over.initial.or(self.initial),
            t_final: over.t_final.or(self.t_final),
            samples: over.samples.or(self.samples),
            grid,
            g_tau: over.g_tau.or(self.g_tau),
            spot_checks: over.spot_checks.or(self.spot_checks),
            preset: over.preset.or(self.preset),
            output: over.output.or(self.output),
            boundary: over.boundary.or(self.boundary),
        }
    }
}

/// Parsed config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub global: Overrides,
    pub sections: BTreeMap<Experiment, Overrides>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut file = ConfigFile::default();
        let mut current: Option<Experiment> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Config { line: line_no, message: "unterminated section header".into() })?;
                let exp = name.trim().parse::<Experiment>().map_err(|_| CliError::Config {
                    line: line_no,
                    message: format!("unknown experiment section [{}]", name.trim()),
                })?;
                file.sections.entry(exp).or_default();
                current = Some(exp);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config { line: line_no, message: "expected key = value".into() })?;
            // Strip a trailing comment; values never contain " #".
            let value = value.split(" #").next().unwrap_or(value);
            let target = match current {
                Some(e) => file.sections.entry(e).or_default(),
                None => &mut file.global,
            };
            target.set(key, value).map_err(|e| CliError::Config { line: line_no, message: e.to_string() })?;
        }
        Ok(file)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn for_experiment(&self, experiment: Experiment) -> Overrides {
        let section = self.sections.get(&experiment).cloned().unwrap_or_default();
        self.global.clone().merge(section)
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub preset: Option<Preset>,
    pub params: SystemParams,
    pub reservoir: ReservoirModel,
    pub initial: Vec<InitialState>,
    pub t_final: f64,
    pub samples: usize,
    pub grid: Grid,
    /// Integrated spot checks of the phase diagram.
    pub spot_checks: usize,
    pub output: Option<PathBuf>,
    pub boundary: Option<PathBuf>,
}

pub const DEFAULT_T_FINAL: f64 = 15.0;
pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SPOT_CHECKS: usize = 4;
pub const WERNER_FAMILY: [f64; 5] = [0.3, 0.5, 0.7, 0.9, 1.0];
/// Members of the Yu-Eberly and eg-ge families in the Fig. 2 preset.
pub const FIG2_FAMILY: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn werner_family() -> Vec<InitialState> {
    WERNER_FAMILY.iter().map(|&f| InitialState::Werner(f)).collect()
}

impl ExperimentConfig {
    /// Built-in defaults for an experiment and optional preset.
    pub fn defaults(experiment: Experiment, preset: Option<Preset>) -> Self {
        let grid = |s: &str| s.parse::<Grid>().expect("built-in grid");
        let (params, reservoir, initial, grid) = match experiment {
            Experiment::Evolve | Experiment::Steady => match preset {
                Some(Preset::Fig2) => {
                    let mut initial: Vec<InitialState> = FIG2_FAMILY.iter().map(|&a| InitialState::YuEberly(a)).collect();
                    initial.extend(werner_family());
                    initial.extend(FIG2_FAMILY.iter().map(|&a| InitialState::EgGe(a)));
                    (SystemParams::resonant(1.5, 10.0), ReservoirModel::Common, initial, Grid::default())
                }
                _ => (SystemParams::resonant(2.0, 5.0), ReservoirModel::Separate, werner_family(), Grid::default()),
            },
            Experiment::PhaseDiagram => (
                SystemParams::resonant(0.0, 0.0),
                ReservoirModel::Separate,
                vec![InitialState::Werner(1.0)],
                grid("omega=0:6:61,coupling=0:30:61"),
            ),
            Experiment::Fidelities => {
                (SystemParams::resonant(0.0, 7.0), ReservoirModel::Separate, werner_family(), grid("omega=0:6:61"))
            }
            Experiment::TransferScan => {
                (SystemParams::resonant(2.0, 20.0), ReservoirModel::Separate, werner_family(), grid("g_tau=0:pi:181"))
            }
            Experiment::SingleQubit => {
                (SystemParams::resonant(0.0, 0.0), ReservoirModel::Separate, werner_family(), grid("omega=0:8:161"))
            }
        };
        Self {
            experiment,
            preset,
            params,
            reservoir,
            initial,
            t_final: DEFAULT_T_FINAL,
            samples: DEFAULT_SAMPLES,
            grid,
            spot_checks: DEFAULT_SPOT_CHECKS,
            output: None,
            boundary: None,
        }
    }

    /// Applies `o` on top of the defaults and validates the result.
    pub fn resolve(experiment: Experiment, o: Overrides) -> Result<Self, CliError> {
        if let Some(preset) = o.preset.filter(|_| !matches!(experiment, Experiment::Evolve | Experiment::Steady)) {
            return Err(CliError::invalid("preset", preset.name(), "presets apply to evolve and steady"));
        }
        let mut c = Self::defaults(experiment, o.preset);
        let p = &mut c.params;
        if let Some(x) = o.omega {
            p.omega1 = x;
            p.omega2 = x;
        }
        if let Some(x) = o.omega2 {
            p.omega2 = x;
        }
        if let Some(x) = o.delta {
            p.delta1 = x;
            p.delta2 = x;
        }
        if let Some(x) = o.delta2 {
            p.delta2 = x;
        }
        if let Some(x) = o.coupling {
            p.coupling = x;
        }
        if let Some(x) = o.gamma {
            p.gamma1 = x;
            p.gamma2 = x;
        }
        if let Some(x) = o.gamma2 {
            p.gamma2 = x;
        }
        if let Some(r) = o.reservoir {
            c.reservoir = r;
        }
        if let Some(i) = o.initial {
            c.initial = i;
        }
        if let Some(t) = o.t_final {
            c.t_final = t;
        }
        if let Some(n) = o.samples {
            c.samples = n;
        }
        if let Some(g) = o.grid {
            c.grid = c.grid.merged(&g);
        }
        if let Some(g) = o.g_tau {
            if experiment != Experiment::TransferScan {
                return Err(CliError::invalid("g_tau", &g.to_string(), "only used by transfer-scan"));
            }
            c.grid = c.grid.merged(&Grid { axes: vec![Axis::new("g_tau", g, g, 1)] });
        }
        if let Some(n) = o.spot_checks {
            c.spot_checks = n;
        }
        c.output = o.output;
        c.boundary = o.boundary;
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(CliError::invalid("t_final", &self.t_final.to_string(), "must be positive and finite"));
        }
        if self.samples < 2 {
            return Err(CliError::invalid("samples", &self.samples.to_string(), "need at least 2"));
        }
        let allowed = self.experiment.axes();
        for axis in &self.grid.axes {
            if !allowed.contains(&axis.name.as_str()) {
                return Err(CliError::invalid(
                    "grid",
                    &axis.to_string(),
                    &format!("{} scans only {:?}", self.experiment.name(), allowed),
                ));
            }
        }
        if matches!(self.experiment, Experiment::PhaseDiagram | Experiment::Fidelities) {
            let omegas = self.grid.values("omega");
            if omegas.iter().any(|&w| w < 0.0) {
                return Err(CliError::invalid("grid", &self.grid.to_string(), "omega must be non-negative"));
            }
        }
        match self.experiment {
            Experiment::SingleQubit => {
                if !(self.params.gamma1 > 0.0) {
                    return Err(CliError::invalid("gamma", &self.params.gamma1.to_string(), "must be positive"));
                }
            }
            _ => {
                liouvillian(&self.params, self.reservoir)?;
            }
        }
        Ok(())
    }

    /// Comment lines recording every resolved setting.
    pub fn header(&self) -> Vec<String> {
        let p = &self.params;
        let mut lines = vec![
            format!("steadyent {}", env!("CARGO_PKG_VERSION")),
            format!("experiment = {}", self.experiment.name()),
        ];
        if let Some(preset) = self.preset {
            lines.push(format!("preset = {}", preset.name()));
        }
        lines.extend([
            format!("omega1 = {}", p.omega1),
            format!("omega2 = {}", p.omega2),
            format!("delta1 = {}", p.delta1),
            format!("delta2 = {}", p.delta2),
            format!("coupling = {}", p.coupling),
            format!("gamma1 = {}", p.gamma1),
            format!("gamma2 = {}", p.gamma2),
            format!("reservoir = {}", self.reservoir),
        ]);
        match self.experiment {
            Experiment::Evolve => {
                let names: Vec<String> = self.initial.iter().map(ToString::to_string).collect();
                lines.push(format!("initial = {}", names.join(";")));
                lines.push(format!("t_final = {}", self.t_final));
                lines.push(format!("samples = {}", self.samples));
            }
            Experiment::PhaseDiagram => {
                lines.push(format!("grid = {}", self.grid));
                lines.push(format!("spot_checks = {}", self.spot_checks));
            }
            Experiment::Steady => {}
            _ => lines.push(format!("grid = {}", self.grid)),
        }
        lines
    }
}
