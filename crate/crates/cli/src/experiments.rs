//! Experiment drivers: each grid point becomes one CSV row, computed in a
//! worker pool and written in grid order.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use kitaev_vqe::freefermion;
use kitaev_vqe::hamiltonians::{
    fixed_gauge_hamiltonian, reference_gauge, spin_hamiltonian, spin_magnetization, spin_plaquette_operators, Couplings,
};
use kitaev_vqe::lattice::{insert_vortex_pair, standard_gauge};
use kitaev_vqe::oracle::{ground_manifold, infidelity, lowest_eigenpairs, manifold_average, SolverMode, SpectrumRequest};
use kitaev_vqe::pauli::PauliSum;
use kitaev_vqe::vqe::{fixed_gauge_circuit, run_dynamical, run_fixed_gauge, OptimizerConfig};
use kitaev_vqe::{ansatz, build_lattice, GaugeConfig, Lattice};

use crate::config::{validate, ExperimentConfig, ExperimentKind, KappaInt, RunMode, Sector};
use crate::CliError;

/// Largest ground manifold tracked for infidelities and manifold averages.
const MANIFOLD_CAP: usize = 16;

/// Whether to run the optimizer or only the exact references.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pass {
    Full,
    OracleOnly,
}

/// A computed CSV row plus its optimizer trace.
struct Row {
    cells: Vec<String>,
    trace: Vec<(usize, f64)>,
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn relative_error(e: f64, exact: f64) -> f64 {
    ((e - exact) / exact).abs()
}

fn sector_gauge(lat: &Lattice, cfg: &ExperimentConfig, c: &Couplings<f64>) -> Result<GaugeConfig, CliError> {
    let base = match cfg.gauge.sector {
        Sector::Reference => reference_gauge(lat, c)?,
        Sector::Standard => standard_gauge(lat),
    };
    Ok(match cfg.gauge.vortices {
        Some([a, b]) => insert_vortex_pair(lat, &base, a, b)?,
        None => base,
    })
}

fn couplings(cfg: &ExperimentConfig) -> Couplings<f64> {
    let c = &cfg.couplings;
    Couplings::new(c.j).with_kappa(c.kappa, c.kappa_int).with_field(c.h)
}

pub fn fixed_header(pass: Pass) -> Vec<&'static str> {
    match pass {
        Pass::Full => {
            vec!["kappa", "E_vqe", "E_exact", "E_error", "infidelity", "kappa_int", "branch", "evaluations", "converged"]
        }
        Pass::OracleOnly => vec!["kappa", "kappa_int", "E_exact", "E_freefermion"],
    }
}

fn fixed_point(
    lat: &Lattice,
    cfg: &ExperimentConfig,
    opt: &OptimizerConfig,
    c: Couplings<f64>,
    pass: Pass,
) -> Result<Row, CliError> {
    let gauge = sector_gauge(lat, cfg, &c)?;
    let h = fixed_gauge_hamiltonian(lat, &gauge, &c)?;
    let (e_exact, manifold) = ground_manifold(&h, SolverMode::Auto, MANIFOLD_CAP)?;
    if pass == Pass::OracleOnly {
        let ff = freefermion::ground_energy(&freefermion::canonical_form(&freefermion::build_k(lat, &gauge, &c)?)?);
        let ff = if c.kappa_int == 0.0 { fmt_f64(ff) } else { String::new() };
        return Ok(Row { cells: vec![fmt_f64(c.kappa), fmt_f64(c.kappa_int), fmt_f64(e_exact), ff], trace: vec![] });
    }
    let r = run_fixed_gauge(lat, &gauge, &c, opt)?;
    let circuit = fixed_gauge_circuit(lat, &c, r.parity_branch)?;
    let psi = ansatz::prepare(&circuit, &r.best_parameters)?;
    Ok(Row {
        cells: vec![
            fmt_f64(c.kappa),
            fmt_f64(r.best_energy),
            fmt_f64(e_exact),
            fmt_f64(relative_error(r.best_energy, e_exact)),
            fmt_f64(infidelity(&manifold, &psi.amps)),
            fmt_f64(c.kappa_int),
            r.parity_branch.name().into(),
            r.evaluations.to_string(),
            r.converged.to_string(),
        ],
        trace: r.trace,
    })
}

pub fn dynamical_header(pass: Pass) -> Vec<&'static str> {
    match pass {
        Pass::Full => vec![
            "h",
            "E_vqe",
            "E_exact",
            "m_z_vqe",
            "m_z_exact",
            "w_vqe",
            "w_exact",
            "phys_norm",
            "E_error",
            "evaluations",
            "converged",
        ],
        Pass::OracleOnly => vec!["h", "E_exact", "m_z_exact", "w_exact", "degeneracy"],
    }
}

/// Exact energy, magnetization and plaquette average of the spin model,
/// averaged over the ground manifold.
pub struct SpinReference {
    pub energy: f64,
    pub m_z: f64,
    pub w: f64,
    pub degeneracy: usize,
}

pub fn spin_reference(lat: &Lattice, c: &Couplings<f64>) -> Result<SpinReference, CliError> {
    let h = spin_hamiltonian(lat, c);
    let (energy, manifold) = ground_manifold(&h, SolverMode::Auto, MANIFOLD_CAP)?;
    let m_z = manifold_average(&spin_magnetization(lat), &manifold);
    let ws: Vec<PauliSum<f64>> = spin_plaquette_operators(lat)?;
    let w = ws.iter().map(|op| manifold_average(op, &manifold)).sum::<f64>() / ws.len() as f64;
    Ok(SpinReference { energy, m_z, w, degeneracy: manifold.len() })
}

fn dynamical_point(lat: &Lattice, opt: &OptimizerConfig, h0: f64, c: Couplings<f64>, pass: Pass) -> Result<Row, CliError> {
    let exact = spin_reference(lat, &c)?;
    if pass == Pass::OracleOnly {
        return Ok(Row {
            cells: vec![fmt_f64(h0), fmt_f64(exact.energy), fmt_f64(exact.m_z), fmt_f64(exact.w), exact.degeneracy.to_string()],
            trace: vec![],
        });
    }
    let r = run_dynamical(lat, &c, opt)?;
    Ok(Row {
        cells: vec![
            fmt_f64(h0),
            fmt_f64(r.best_energy),
            fmt_f64(exact.energy),
            fmt_f64(r.m_z.unwrap_or(f64::NAN)),
            fmt_f64(exact.m_z),
            fmt_f64(r.w.unwrap_or(f64::NAN)),
            fmt_f64(exact.w),
            fmt_f64(r.physical_norm.unwrap_or(f64::NAN)),
            fmt_f64(relative_error(r.best_energy, exact.energy)),
            r.evaluations.to_string(),
            r.converged.to_string(),
        ],
        trace: r.trace,
    })
}

pub fn splitting_header() -> Vec<&'static str> {
    vec!["kappa", "kappa_int", "splitting", "method"]
}

/// Gap between the two lowest states of the fixed-gauge model in `gauge`:
/// free-fermion `2 min e_n` when `kappa_int = 0`, exact diagonalization otherwise.
pub fn splitting(lat: &Lattice, gauge: &GaugeConfig, c: &Couplings<f64>) -> Result<(f64, &'static str), CliError> {
    if c.kappa_int == 0.0 {
        let cf = freefermion::canonical_form(&freefermion::build_k(lat, gauge, c)?)?;
        return Ok((freefermion::parity_splitting(&cf), "freefermion"));
    }
    let h = fixed_gauge_hamiltonian(lat, gauge, c)?;
    let pairs = lowest_eigenpairs(&SpectrumRequest { operator: &h, k: 2, mode: SolverMode::Auto })?;
    Ok((pairs[1].value - pairs[0].value, "ed"))
}

fn splitting_point(lat: &Lattice, cfg: &ExperimentConfig, c: Couplings<f64>) -> Result<Row, CliError> {
    let gauge = sector_gauge(lat, cfg, &c)?;
    let (s, method) = splitting(lat, &gauge, &c)?;
    Ok(Row { cells: vec![fmt_f64(c.kappa), fmt_f64(c.kappa_int), fmt_f64(s), method.into()], trace: vec![] })
}

enum Point {
    Fixed(Couplings<f64>),
    Dynamical(f64, Couplings<f64>),
    Splitting(Couplings<f64>),
}

fn points(cfg: &ExperimentConfig) -> Result<Vec<Point>, CliError> {
    let base = couplings(cfg);
    let grid = |g: &Option<crate::config::Grid>| -> Result<Vec<f64>, CliError> {
        g.as_ref().map(|g| g.points()).transpose().map_err(CliError::Config).map(|v| v.unwrap_or_default())
    };
    Ok(match cfg.experiment {
        ExperimentKind::FixedGaugeSweep => {
            let rule = cfg.kappa_int_rule().map_err(CliError::Config)?;
            grid(&cfg.sweep.kappa)?
                .into_iter()
                .map(|k| {
                    let ki = match rule {
                        KappaInt::Tied => k,
                        KappaInt::Fixed(v) => v,
                    };
                    Point::Fixed(base.with_kappa(k, ki))
                })
                .collect()
        }
        ExperimentKind::DynamicalFieldSweep => {
            let dir = cfg.sweep.direction.unwrap_or([0.0, 0.0, 1.0]);
            grid(&cfg.sweep.h)?
                .into_iter()
                .map(|h0| Point::Dynamical(h0, base.with_field([h0 * dir[0], h0 * dir[1], h0 * dir[2]])))
                .collect()
        }
        ExperimentKind::VortexSplitting => {
            let kis = cfg.kappa_int_list().map_err(CliError::Config)?;
            let ks = grid(&cfg.sweep.kappa)?;
            kis.iter().flat_map(|&ki| ks.iter().map(move |&k| Point::Splitting(base.with_kappa(k, ki)))).collect()
        }
        ExperimentKind::SingleRun => match cfg.run_mode() {
            Some(RunMode::FixedGauge) => vec![Point::Fixed(base)],
            Some(RunMode::Dynamical) => {
                let h0 = base.h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                vec![Point::Dynamical(h0, base)]
            }
            None => return Err(CliError::Config("single-run needs a mode".into())),
        },
    })
}

fn header(cfg: &ExperimentConfig, pass: Pass) -> Vec<&'static str> {
    match cfg.experiment {
        ExperimentKind::VortexSplitting => splitting_header(),
        _ => match cfg.run_mode() {
            Some(RunMode::Dynamical) => dynamical_header(pass),
            _ => fixed_header(pass),
        },
    }
}

/// Paths written by a run.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub trace: Option<PathBuf>,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

fn manifest_text(cfg_text: &str, cfg: &ExperimentConfig, pass: Pass) -> String {
    let mut s = String::new();
    s.push_str("# run manifest\n");
    s.push_str(&format!("kitaev_vqe_version = \"{}\"\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("pass = \"{}\"\n", if pass == Pass::Full { "run" } else { "oracle" }));
    s.push_str(&format!("seed = {}\n", cfg.seed));
    s.push_str("config = '''\n");
    s.push_str(cfg_text);
    if !cfg_text.ends_with('\n') {
        s.push('\n');
    }
    s.push_str("'''\n");
    s
}

/// Runs a validated experiment. `base_dir` resolves a relative output path.
pub fn run_experiment(cfg_text: &str, base_dir: &Path, pass: Pass) -> Result<Outputs, CliError> {
    let cfg = crate::config::parse(cfg_text).map_err(CliError::Config)?;
    let diags = validate(&cfg);
    if !diags.is_empty() {
        return Err(CliError::Invalid(diags));
    }
    let kind = cfg.lattice_kind().ok_or_else(|| CliError::Config("lattice.kind".into()))?;
    let lat = build_lattice(kind, cfg.lattice.l1, cfg.lattice.l2)?;
    let opt = cfg.optimizer_config();
    let out = base_dir.join(&cfg.output);
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let manifest = sibling(&out, ".manifest.toml");
    std::fs::write(&manifest, manifest_text(cfg_text, &cfg, pass))?;
    let trace_path = (cfg.optimizer.trace && pass == Pass::Full).then(|| sibling(&out, ".trace.csv"));
    let mut trace_writer = match &trace_path {
        Some(p) => {
            let mut w = csv::Writer::from_path(p)?;
            w.write_record(["point", "evaluation", "cost"])?;
            Some(w)
        }
        None => None,
    };
    let mut writer = csv::Writer::from_writer(File::create(&out)?);
    writer.write_record(header(&cfg, pass))?;
    writer.flush()?;
    let pts = points(&cfg)?;
    let chunk = rayon::current_num_threads().max(1);
    let mut index = 0;
    for group in pts.chunks(chunk) {
        let rows: Vec<Result<Row, CliError>> = group
            .par_iter()
            .map(|p| match p {
                Point::Fixed(c) => fixed_point(&lat, &cfg, &opt, *c, pass),
                Point::Dynamical(h0, c) => dynamical_point(&lat, &opt, *h0, *c, pass),
                Point::Splitting(c) => splitting_point(&lat, &cfg, *c),
            })
            .collect();
        for row in rows {
            let row = row?;
            writer.write_record(&row.cells)?;
            if let Some(w) = trace_writer.as_mut() {
                for (e, f) in &row.trace {
                    w.write_record([index.to_string(), e.to_string(), fmt_f64(*f)])?;
                }
            }
            index += 1;
        }
        writer.flush()?;
        if let Some(w) = trace_writer.as_mut() {
            w.flush()?;
        }
    }
    writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?.flush()?;
    Ok(Outputs { csv: out, manifest, trace: trace_path })
}
