//! Run configuration: a TOML file with `experiment`, `seed`, `[output]` and an
//! experiment-specific `[parameters]` table. Frequencies are in Hz.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Filter,
    Multimode,
    Transfer,
    Fidelity,
    Circulator,
    Waveguide,
    Design,
    Nv,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Filter => "filter",
            Experiment::Multimode => "multimode",
            Experiment::Transfer => "transfer",
            Experiment::Fidelity => "fidelity",
            Experiment::Circulator => "circulator",
            Experiment::Waveguide => "waveguide",
            Experiment::Design => "design",
            Experiment::Nv => "nv",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; the file is `<dir>/<experiment>.<format>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// A scalar or a list of values; lists are swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterParams {
    pub omega_m: f64,
    pub gamma: f64,
    pub gamma0: f64,
    pub kappa: f64,
    pub n_th: f64,
    /// Defaults to the impedance-matched `sqrt((γ+γ0)κ/2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_alpha: Option<f64>,
    /// Laser detuning; defaults to the red sideband `-ω_m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    pub rotating_wave: bool,
    /// Half-width of the frequency window in units of γ.
    pub span: f64,
    pub points: usize,
    pub fit: bool,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            omega_m: 1.2e9,
            gamma: 1e6,
            gamma0: 0.0,
            kappa: 3e8,
            n_th: 40.0,
            g_alpha: None,
            detuning: None,
            rotating_wave: true,
            span: 10.0,
            points: 4001,
            fit: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultimodeParams {
    pub n_sites: usize,
    pub omega_m: f64,
    pub coupling_k: f64,
    pub gamma0: f64,
    pub kappa: f64,
    pub g_alpha: OneOrMany,
    pub n_th: f64,
    /// Site whose spectrum is written (1-based); defaults to the far end.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    /// Half-width of the window around `ω_m` in units of K.
    pub span: f64,
    pub points: usize,
}

impl Default for MultimodeParams {
    fn default() -> Self {
        MultimodeParams {
            n_sites: 10,
            omega_m: 1e8,
            coupling_k: 1e6,
            gamma0: 5e4,
            kappa: 5e5,
            g_alpha: OneOrMany::Many(vec![0.0, 5e5]),
            n_th: 1.0,
            site: None,
            span: 3.0,
            points: 2001,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseKind {
    Analytic,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransferParams {
    pub gamma_max: f64,
    /// Protocol length `τ_p Γ_max`.
    pub window: f64,
    /// Rates below `cutoff_floor · Γ_max` are set to zero.
    pub cutoff_floor: f64,
    pub pulse: PulseKind,
    pub samples: usize,
}

impl Default for TransferParams {
    fn default() -> Self {
        TransferParams { gamma_max: 1e5, window: 28.0, cutoff_floor: 0.0, pulse: PulseKind::Analytic, samples: 1001 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityModel {
    Reduced,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    Plus,
    Excited,
    Ground,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FidelityParams {
    /// Channel coupling γ of the filter cavity.
    pub gamma: f64,
    pub gamma_max: OneOrMany,
    pub n_th: OneOrMany,
    pub model: FidelityModel,
    /// Whether the optomechanical filter is on.
    pub filter: bool,
    /// Intrinsic loss of the filter cavity.
    pub gamma0: f64,
    /// Optical damping; defaults to `γ - γ0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_op: Option<f64>,
    pub state: InitialState,
    /// Fock cutoff of the full model; defaults to `max(4, ⌈4N⌉ + 4)` capped at 30.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_cutoff: Option<usize>,
}

impl Default for FidelityParams {
    fn default() -> Self {
        FidelityParams {
            gamma: 1e6,
            gamma_max: OneOrMany::One(1e4),
            n_th: OneOrMany::Many(vec![0.5, 2.0, 5.0, 10.0, 20.0]),
            model: FidelityModel::Reduced,
            filter: true,
            gamma0: 160.0,
            gamma_op: None,
            state: InitialState::Plus,
            fock_cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CirculatorParams {
    pub gamma: f64,
    /// Tunneling amplitude; defaults to `γ/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Phase of the `b1 → b2` link in radians.
    pub phi: f64,
    pub gamma0: f64,
    /// Half-width of the window in units of γ.
    pub span: f64,
    pub points: usize,
}

impl Default for CirculatorParams {
    fn default() -> Self {
        CirculatorParams { gamma: 1e6, t: None, phi: -std::f64::consts::FRAC_PI_2, gamma0: 0.0, span: 5.0, points: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveguideParams {
    pub n_sites: usize,
    pub omega0: f64,
    pub coupling_k: f64,
    /// Lattice constant in metres.
    pub lattice_a: f64,
    pub gamma0: f64,
    pub n_th: f64,
    /// Floor N0 of the Lorentzian dip fed into the waveguide.
    pub dip_floor: f64,
    /// Half-width of that dip; defaults to `K/100`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dip_width: Option<f64>,
    /// Propagation distances in units of the mean free path.
    pub distances: Vec<f64>,
    /// Also run the microscopic lossy-chain model (at most 400 sites).
    pub simulate_chain: bool,
    pub points: usize,
}

impl Default for WaveguideParams {
    fn default() -> Self {
        WaveguideParams {
            n_sites: 64,
            omega0: 4e9,
            coupling_k: 5e7,
            lattice_a: 1e-6,
            gamma0: 4e3,
            n_th: 20.0,
            dip_floor: 0.5,
            dip_width: None,
            distances: vec![0.0, 0.05, 0.2, 1.0],
            simulate_chain: false,
            points: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignParams {
    pub gamma: f64,
    /// Target tunneling; defaults to `γ/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub phi: f64,
    pub omega_m: f64,
    /// Laser detunings; default `-ω_m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
    pub j: f64,
    pub kappa: f64,
    /// Single-photon optomechanical coupling.
    pub g: f64,
    pub alpha_max: f64,
}

impl Default for DesignParams {
    fn default() -> Self {
        DesignParams {
            gamma: 2.5e7,
            t: None,
            phi: -std::f64::consts::FRAC_PI_2,
            omega_m: 4e9,
            delta1: None,
            delta2: None,
            j: 1e9,
            kappa: 5e7,
            g: 1e3,
            alpha_max: 1e7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NvParams {
    pub lambda: f64,
    pub omega_m: f64,
    pub rabi0: f64,
    pub rabi1: f64,
    pub gamma_e: f64,
    /// Half-width of the mean-detuning sweep in units of ω_m.
    pub span: f64,
    pub points: usize,
}

impl Default for NvParams {
    fn default() -> Self {
        NvParams { lambda: 1e6, omega_m: 5e9, rabi0: 1e8, rabi1: 1e8, gamma_e: 1.5e7, span: 1.0, points: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    Filter(FilterParams),
    Multimode(MultimodeParams),
    Transfer(TransferParams),
    Fidelity(FidelityParams),
    Circulator(CirculatorParams),
    Waveguide(WaveguideParams),
    Design(DesignParams),
    Nv(NvParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Reserved; every computation is deterministic.
    pub seed: u64,
    pub output: OutputConfig,
    pub parameters: Parameters,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<Experiment>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: OutputConfig,
    #[serde(default)]
    parameters: toml::Table,
}

// Re-parsed from text so the error carries the offending line.
fn typed<T: serde::de::DeserializeOwned>(table: toml::Table) -> Result<T, CliError> {
    let text = toml::to_string(&table).map_err(|e| CliError::Config(e.to_string()))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("[parameters] {}", e.to_string().trim_end())))
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("parameters.{name} must be positive and finite, got {x}")))
    }
}

fn non_negative(name: &str, x: f64) -> Result<(), CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("parameters.{name} must be non-negative and finite, got {x}")))
    }
}

fn at_least(name: &str, n: usize, min: usize) -> Result<(), CliError> {
    if n >= min {
        Ok(())
    } else {
        Err(CliError::Config(format!("parameters.{name} must be at least {min}, got {n}")))
    }
}

fn non_empty(name: &str, v: &OneOrMany) -> Result<Vec<f64>, CliError> {
    let values = v.values();
    if values.is_empty() {
        return Err(CliError::Config(format!("parameters.{name} must not be empty")));
    }
    Ok(values)
}

/// Parses and validates a configuration, filling in defaults.
///
/// `expected` is the subcommand; a file naming a different experiment is
/// rejected, and a file without `experiment` takes it from the subcommand.
pub fn parse_config(text: &str, expected: Option<Experiment>) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
    let experiment = match (raw.experiment, expected) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Config(format!("config is for experiment `{a}` but `{b}` was requested")))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(CliError::Config("missing required key `experiment`".into())),
    };
    let p = raw.parameters;
    let parameters = match experiment {
        Experiment::Filter => Parameters::Filter(resolve_filter(typed(p)?)?),
        Experiment::Multimode => Parameters::Multimode(resolve_multimode(typed(p)?)?),
        Experiment::Transfer => Parameters::Transfer(resolve_transfer(typed(p)?)?),
        Experiment::Fidelity => Parameters::Fidelity(resolve_fidelity(typed(p)?)?),
        Experiment::Circulator => Parameters::Circulator(resolve_circulator(typed(p)?)?),
        Experiment::Waveguide => Parameters::Waveguide(resolve_waveguide(typed(p)?)?),
        Experiment::Design => Parameters::Design(resolve_design(typed(p)?)?),
        Experiment::Nv => Parameters::Nv(resolve_nv(typed(p)?)?),
    };
    Ok(RunConfig { experiment, seed: raw.seed, output: raw.output, parameters })
}

fn resolve_filter(mut p: FilterParams) -> Result<FilterParams, CliError> {
    positive("omega_m", p.omega_m)?;
    positive("gamma", p.gamma)?;
    non_negative("gamma0", p.gamma0)?;
    positive("kappa", p.kappa)?;
    non_negative("n_th", p.n_th)?;
    positive("span", p.span)?;
    at_least("points", p.points, 5)?;
    p.g_alpha.get_or_insert(((p.gamma + p.gamma0) * p.kappa / 2.0).sqrt());
    p.detuning.get_or_insert(-p.omega_m);
    non_negative("g_alpha", p.g_alpha.unwrap_or(0.0))?;
    Ok(p)
}

fn resolve_multimode(mut p: MultimodeParams) -> Result<MultimodeParams, CliError> {
    at_least("n_sites", p.n_sites, 1)?;
    positive("omega_m", p.omega_m)?;
    non_negative("coupling_k", p.coupling_k)?;
    positive("gamma0", p.gamma0)?;
    positive("kappa", p.kappa)?;
    non_negative("n_th", p.n_th)?;
    positive("span", p.span)?;
    at_least("points", p.points, 2)?;
    for g in non_empty("g_alpha", &p.g_alpha)? {
        non_negative("g_alpha", g)?;
    }
    let site = *p.site.get_or_insert(p.n_sites);
    if site < 1 || site > p.n_sites {
        return Err(CliError::Config(format!("parameters.site must lie in 1..={}, got {site}", p.n_sites)));
    }
    Ok(p)
}

fn resolve_transfer(p: TransferParams) -> Result<TransferParams, CliError> {
    positive("gamma_max", p.gamma_max)?;
    positive("window", p.window)?;
    non_negative("cutoff_floor", p.cutoff_floor)?;
    at_least("samples", p.samples, 2)?;
    Ok(p)
}

fn resolve_fidelity(mut p: FidelityParams) -> Result<FidelityParams, CliError> {
    positive("gamma", p.gamma)?;
    for g in non_empty("gamma_max", &p.gamma_max)? {
        positive("gamma_max", g)?;
    }
    for n in non_empty("n_th", &p.n_th)? {
        non_negative("n_th", n)?;
    }
    non_negative("gamma0", p.gamma0)?;
    let op = *p.gamma_op.get_or_insert((p.gamma - p.gamma0).max(0.0));
    non_negative("gamma_op", op)?;
    if let Some(c) = p.fock_cutoff {
        at_least("fock_cutoff", c, 2)?;
    }
    Ok(p)
}

fn resolve_circulator(mut p: CirculatorParams) -> Result<CirculatorParams, CliError> {
    positive("gamma", p.gamma)?;
    non_negative("gamma0", p.gamma0)?;
    positive("span", p.span)?;
    at_least("points", p.points, 2)?;
    if !p.phi.is_finite() {
        return Err(CliError::Config("parameters.phi must be finite".into()));
    }
    non_negative("t", *p.t.get_or_insert(p.gamma / 2.0))?;
    Ok(p)
}

fn resolve_waveguide(mut p: WaveguideParams) -> Result<WaveguideParams, CliError> {
    at_least("n_sites", p.n_sites, 2)?;
    positive("omega0", p.omega0)?;
    non_negative("coupling_k", p.coupling_k)?;
    positive("lattice_a", p.lattice_a)?;
    non_negative("gamma0", p.gamma0)?;
    non_negative("n_th", p.n_th)?;
    non_negative("dip_floor", p.dip_floor)?;
    at_least("points", p.points, 2)?;
    for &z in &p.distances {
        non_negative("distances", z)?;
    }
    if p.distances.is_empty() {
        return Err(CliError::Config("parameters.distances must not be empty".into()));
    }
    positive("dip_width", *p.dip_width.get_or_insert(p.coupling_k / 100.0))?;
    Ok(p)
}

fn resolve_design(mut p: DesignParams) -> Result<DesignParams, CliError> {
    positive("gamma", p.gamma)?;
    positive("omega_m", p.omega_m)?;
    non_negative("j", p.j)?;
    positive("kappa", p.kappa)?;
    positive("g", p.g)?;
    positive("alpha_max", p.alpha_max)?;
    positive("t", *p.t.get_or_insert(p.gamma / 2.0))?;
    p.delta1.get_or_insert(-p.omega_m);
    p.delta2.get_or_insert(-p.omega_m);
    Ok(p)
}

fn resolve_nv(p: NvParams) -> Result<NvParams, CliError> {
    non_negative("lambda", p.lambda)?;
    positive("omega_m", p.omega_m)?;
    non_negative("rabi0", p.rabi0)?;
    non_negative("rabi1", p.rabi1)?;
    positive("gamma_e", p.gamma_e)?;
    positive("span", p.span)?;
    at_least("points", p.points, 2)?;
    Ok(p)
}

impl RunConfig {
    /// The resolved configuration as TOML; parsing it back gives the same config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration is always representable as TOML")
    }

    /// Number of independent runs the configuration expands to.
    pub fn sweep_len(&self) -> usize {
        match &self.parameters {
            Parameters::Fidelity(p) => p.gamma_max.values().len() * p.n_th.values().len(),
            Parameters::Multimode(p) => p.g_alpha.values().len(),
            _ => 1,
        }
    }
}
