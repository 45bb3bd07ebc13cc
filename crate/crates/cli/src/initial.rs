use std::fmt;
use std::str::FromStr;

use steadyent::state::{bell_state, egge_state, werner_state, ye_state};
use steadyent::{BellKind, DensityMatrix};

use crate::CliError;

/// Initial two-qubit state named on the command line, e.g. `werner:f=0.7`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Werner(f64),
    YuEberly(f64),
    EgGe(f64),
    Bell(BellKind),
}

impl InitialState {
    pub fn density_matrix(&self) -> Result<DensityMatrix, CliError> {
        let rho = match *self {
            InitialState::Werner(f) => werner_state(f),
            InitialState::YuEberly(a) => ye_state(a),
            InitialState::EgGe(a) => egge_state(a),
            InitialState::Bell(kind) => Ok(bell_state(kind).projector()),
        };
        rho.map_err(|e| CliError::InitialState { spec: self.to_string(), reason: e.to_string() })
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Werner(x) => write!(f, "werner:f={x}"),
            InitialState::YuEberly(x) => write!(f, "ye:alpha={x}"),
            InitialState::EgGe(x) => write!(f, "egge:a={x}"),
            InitialState::Bell(kind) => write!(f, "bell:{}", kind.label()),
        }
    }
}

impl FromStr for InitialState {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| CliError::InitialState { spec: s.to_string(), reason: reason.to_string() };
        let (family, arg) = s.trim().split_once(':').ok_or_else(|| bad("expected family:parameter"))?;
        if family == "bell" {
            return BellKind::ALL
                .into_iter()
                .find(|k| k.label() == arg)
                .map(InitialState::Bell)
                .ok_or_else(|| bad("bell state must be one of psi+, psi-, phi+, phi-"));
        }
        let (key, value) = arg.split_once('=').ok_or_else(|| bad("expected key=value parameter"))?;
        let value: f64 = value.parse().map_err(|_| bad("parameter is not a number"))?;
        let state = match (family, key) {
            ("werner", "f") => InitialState::Werner(value),
            ("ye", "alpha") => InitialState::YuEberly(value),
            ("egge", "a") => InitialState::EgGe(value),
            _ => return Err(bad("unknown family; use werner:f=, ye:alpha=, egge:a= or bell:")),
        };
        state.density_matrix()?;
        Ok(state)
    }
}

/// Parses a `;`-separated list of initial states.
pub fn parse_initial_list(s: &str) -> Result<Vec<InitialState>, CliError> {
    let states: Vec<InitialState> =
        s.split(';').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect::<Result<_, _>>()?;
    if states.is_empty() {
        return Err(CliError::InitialState { spec: s.to_string(), reason: "no states given".into() });
    }
    Ok(states)
}
