//! Experiment configuration: TOML with dotted sections, parsed with serde and
//! checked by [`validate`].

use serde::{Deserialize, Serialize};

use kitaev_vqe::hamiltonians::PROJECTOR_MAX_SPINS;
use kitaev_vqe::oracle::ITERATIVE_MAX_QUBITS;
use kitaev_vqe::statevector::MAX_STATE_QUBITS;
use kitaev_vqe::vqe::{GradientMethod, OptimizerConfig};
use kitaev_vqe::{build_lattice, LatticeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FixedGaugeSweep,
    DynamicalFieldSweep,
    VortexSplitting,
    SingleRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    FixedGauge,
    Dynamical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: String,
    pub l1: usize,
    pub l2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingsSection {
    #[serde(rename = "J", default = "default_j")]
    pub j: [f64; 3],
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub kappa_int: f64,
    #[serde(default)]
    pub h: [f64; 3],
}

fn default_j() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}

impl Default for CouplingsSection {
    fn default() -> Self {
        CouplingsSection { j: default_j(), kappa: 0.0, kappa_int: 0.0, h: [0.0; 3] }
    }
}

/// A one-dimensional grid: explicit values, or `start`/`stop` with `steps` points
/// (inclusive) or a `step` increment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        #[serde(default)]
        steps: Option<usize>,
        #[serde(default)]
        step: Option<f64>,
    },
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        match self {
            Grid::Values(v) => Ok(v.clone()),
            Grid::Range { start, stop, steps, step } => match (steps, step) {
                (Some(n), None) => match *n {
                    0 => Ok(vec![]),
                    1 => Ok(vec![*start]),
                    n => Ok((0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()),
                },
                (None, Some(dx)) if *dx > 0.0 => {
                    let n = ((stop - start) / dx + 1e-9).floor() as usize + 1;
                    Ok((0..n).map(|i| start + dx * i as f64).collect())
                }
                (None, Some(_)) => Err("step must be positive".into()),
                _ => Err("give exactly one of steps or step".into()),
            },
        }
    }
}

/// `kappa_int` during a fixed-gauge sweep: tied to `kappa` or held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaInt {
    Fixed(f64),
    Tied,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub kappa: Option<Grid>,
    /// Fixed-gauge sweeps: `"kappa"` ties it to the swept value; vortex splitting: a list.
    #[serde(default)]
    pub kappa_int: Option<toml::Value>,
    /// Field magnitudes `h0`; the field is `h0 * direction`.
    #[serde(default)]
    pub h: Option<Grid>,
    #[serde(default)]
    pub direction: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    /// Vortex-free sector with a physical matter vacuum and the lowest energy.
    #[default]
    Reference,
    /// All links `+1` in stored orientation.
    Standard,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSection {
    #[serde(default)]
    pub sector: Sector,
    /// Plaquette pair hosting a vortex pair.
    #[serde(default)]
    pub vortices: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    #[serde(default = "default_gradient")]
    pub gradient: String,
    #[serde(default = "default_budget")]
    pub max_evaluations: usize,
    #[serde(default = "default_fd")]
    pub fd_step: f64,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub trace: bool,
}

fn default_gradient() -> String {
    "adjoint".into()
}
fn default_budget() -> usize {
    OptimizerConfig::default().max_evaluations
}
fn default_fd() -> f64 {
    OptimizerConfig::default().fd_step
}
fn default_tol() -> f64 {
    OptimizerConfig::default().tolerance
}
fn default_restarts() -> usize {
    OptimizerConfig::default().restarts
}

impl Default for OptimizerSection {
    fn default() -> Self {
        OptimizerSection {
            gradient: default_gradient(),
            max_evaluations: default_budget(),
            fd_step: default_fd(),
            tolerance: default_tol(),
            restarts: default_restarts(),
            trace: false,
        }
    }
}

pub fn parse_gradient(s: &str) -> Option<GradientMethod> {
    match s {
        "adjoint" => Some(GradientMethod::Adjoint),
        "finite-difference" => Some(GradientMethod::FiniteDifference),
        "parameter-shift" => Some(GradientMethod::ParameterShift),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Single runs only.
    #[serde(default)]
    pub mode: Option<RunMode>,
    pub output: String,
    #[serde(default)]
    pub seed: u64,
    pub lattice: LatticeSection,
    #[serde(default)]
    pub couplings: CouplingsSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub gauge: GaugeSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
}

/// One finding of [`validate`], tied to a config field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Parses TOML text; syntax and type errors carry line and column.
pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

impl ExperimentConfig {
    pub fn lattice_kind(&self) -> Option<LatticeKind> {
        self.lattice.kind.parse().ok()
    }

    /// Effective run mode: sweeps imply theirs.
    pub fn run_mode(&self) -> Option<RunMode> {
        match self.experiment {
            ExperimentKind::FixedGaugeSweep | ExperimentKind::VortexSplitting => Some(RunMode::FixedGauge),
            ExperimentKind::DynamicalFieldSweep => Some(RunMode::Dynamical),
            ExperimentKind::SingleRun => self.mode,
        }
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        OptimizerConfig {
            gradient: parse_gradient(&self.optimizer.gradient).unwrap_or(GradientMethod::Adjoint),
            max_evaluations: self.optimizer.max_evaluations,
            fd_step: self.optimizer.fd_step,
            tolerance: self.optimizer.tolerance,
            restarts: self.optimizer.restarts,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }

    /// Values of `kappa_int` for a vortex-splitting sweep.
    pub fn kappa_int_list(&self) -> Result<Vec<f64>, String> {
        match &self.sweep.kappa_int {
            None => Ok(vec![self.couplings.kappa_int]),
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    toml::Value::Float(f) => Ok(*f),
                    toml::Value::Integer(i) => Ok(*i as f64),
                    _ => Err("entries must be numbers".to_string()),
                })
                .collect(),
            Some(toml::Value::Float(f)) => Ok(vec![*f]),
            Some(toml::Value::Integer(i)) => Ok(vec![*i as f64]),
            Some(_) => Err("expected a number or a list of numbers".into()),
        }
    }

    /// `kappa_int` rule of a fixed-gauge sweep.
    pub fn kappa_int_rule(&self) -> Result<KappaInt, String> {
        match &self.sweep.kappa_int {
            None => Ok(KappaInt::Fixed(self.couplings.kappa_int)),
            Some(toml::Value::String(s)) if s == "kappa" => Ok(KappaInt::Tied),
            Some(toml::Value::Float(f)) => Ok(KappaInt::Fixed(*f)),
            Some(toml::Value::Integer(i)) => Ok(KappaInt::Fixed(*i as f64)),
            Some(_) => Err("expected \"kappa\" or a number".into()),
        }
    }
}

fn check_grid(diags: &mut Vec<Diagnostic>, field: &str, grid: Option<&Grid>, required: bool) {
    let push = |diags: &mut Vec<Diagnostic>, msg: String| diags.push(Diagnostic { field: field.into(), message: msg });
    match grid {
        None if required => push(diags, "grid is required for this experiment".into()),
        None => {}
        Some(g) => match g.points() {
            Err(e) => push(diags, e),
            Ok(p) if p.is_empty() => push(diags, "grid is empty".into()),
            Ok(p) if p.iter().any(|v| !v.is_finite()) => push(diags, "grid values must be finite".into()),
            Ok(p) if p.windows(2).any(|w| w[1] <= w[0]) => push(diags, "grid must be strictly increasing".into()),
            Ok(_) => {}
        },
    }
}

/// Static checks; an empty result means the config can run.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    let mut push = |field: &str, message: String| d.push(Diagnostic { field: field.into(), message });
    let kind = cfg.lattice_kind();
    if kind.is_none() {
        push("lattice.kind", format!("unknown lattice kind {:?} (honeycomb or square-octagon)", cfg.lattice.kind));
    }
    let lattice = kind.map(|k| build_lattice(k, cfg.lattice.l1, cfg.lattice.l2));
    if let Some(Err(e)) = &lattice {
        push("lattice", e.to_string());
    }
    let lattice = lattice.and_then(|l| l.ok());
    let c = &cfg.couplings;
    if c.j.iter().chain(&c.h).chain([&c.kappa, &c.kappa_int]).any(|v| !v.is_finite()) {
        push("couplings", "couplings must be finite".into());
    }
    let mode = cfg.run_mode();
    if mode.is_none() {
        push("mode", "single-run needs mode = \"fixed-gauge\" or \"dynamical\"".into());
    }
    if mode == Some(RunMode::FixedGauge) {
        if c.h.iter().any(|v| *v != 0.0) {
            push("couplings.h", "a magnetic field mixes gauge sectors; fixed-gauge runs need h = 0".into());
        }
        if cfg.sweep.h.is_some() {
            push("sweep.h", "field sweeps need the dynamical representation".into());
        }
    }
    if parse_gradient(&cfg.optimizer.gradient).is_none() {
        push("optimizer.gradient", format!("unknown gradient {:?}", cfg.optimizer.gradient));
    }
    if let Err(e) = cfg.optimizer_config().validate() {
        push("optimizer", e);
    }
    if cfg.output.trim().is_empty() {
        push("output", "output path is empty".into());
    }
    if let Some(lat) = &lattice {
        let n = lat.n_sites();
        let needs_plaquettes =
            cfg.experiment == ExperimentKind::VortexSplitting || mode == Some(RunMode::Dynamical) || cfg.gauge.vortices.is_some();
        if needs_plaquettes && !lat.plaquettes_well_defined() {
            push("lattice", "plaquette experiments need a honeycomb lattice with both sides at least 2".into());
        }
        match mode {
            Some(RunMode::FixedGauge) => {
                if n / 2 > ITERATIVE_MAX_QUBITS.min(MAX_STATE_QUBITS) {
                    push("lattice", format!("{} matter qubits exceeds the limit of {}", n / 2, ITERATIVE_MAX_QUBITS));
                }
                if cfg.experiment != ExperimentKind::VortexSplitting && n < 4 {
                    push("lattice", "the fixed-gauge ansatz needs at least 4 spins".into());
                }
            }
            Some(RunMode::Dynamical) => {
                if n > PROJECTOR_MAX_SPINS {
                    push("lattice", format!("{n} spins exceeds the projector cap of {PROJECTOR_MAX_SPINS}"));
                }
                if 2 * n > MAX_STATE_QUBITS {
                    push("lattice", format!("{} qubits exceeds the statevector limit of {MAX_STATE_QUBITS}", 2 * n));
                }
                if cfg.gauge.vortices.is_some() || cfg.gauge.sector != Sector::Reference {
                    push("gauge", "dynamical runs fix their own reference sector".into());
                }
            }
            None => {}
        }
        if let Some([a, b]) = cfg.gauge.vortices {
            let np = lat.plaquettes.len();
            if a >= np || b >= np {
                push("gauge.vortices", format!("plaquette index out of range (lattice has {np})"));
            } else if a == b {
                push("gauge.vortices", "vortex plaquettes must differ".into());
            }
        }
    }
    match cfg.experiment {
        ExperimentKind::FixedGaugeSweep => {
            check_grid(&mut d, "sweep.kappa", cfg.sweep.kappa.as_ref(), true);
            if let Err(e) = cfg.kappa_int_rule() {
                d.push(Diagnostic { field: "sweep.kappa_int".into(), message: e });
            }
        }
        ExperimentKind::DynamicalFieldSweep => {
            check_grid(&mut d, "sweep.h", cfg.sweep.h.as_ref(), true);
            if cfg.sweep.direction.is_none() {
                d.push(Diagnostic { field: "sweep.direction".into(), message: "field direction is required".into() });
            }
        }
        ExperimentKind::VortexSplitting => {
            check_grid(&mut d, "sweep.kappa", cfg.sweep.kappa.as_ref(), true);
            match cfg.kappa_int_list() {
                Err(e) => d.push(Diagnostic { field: "sweep.kappa_int".into(), message: e }),
                Ok(v) if v.is_empty() => d.push(Diagnostic { field: "sweep.kappa_int".into(), message: "list is empty".into() }),
                Ok(_) => {}
            }
            if cfg.gauge.vortices.is_none() {
                d.push(Diagnostic { field: "gauge.vortices".into(), message: "vortex pair is required".into() });
            }
        }
        ExperimentKind::SingleRun => {}
    }
    d
}
