use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{load_config, RunConfig, SweepVariable};
use super::plot::emit_flow_svg;
use super::table::{emit_flow_csv, write_flow_csv};
use crate::error::{Error, Result};
use crate::fock::FockParams;
use crate::linalg::ComplexMatrix;
use crate::model::{
    broken_supercharges, free_supercharges, grading_operator, h_total_r, hamiltonian,
    mass_increment, renormalized_frequency, ModelParams,
};
use crate::spectral::{
    coupling_hamiltonian, default_witten_beta, goldstino_check, spectral_flow_g, spectral_flow_r,
    susy_algebra_report_with, truncation_convergence, witten_index, AlgebraReport,
    AlgebraThresholds, FlowResult, DEFAULT_WITTEN_K,
};
use crate::transforms::{
    heavy_boson_identity, renormalized_polaron_identity, u_a2, A2_RESIDUAL_TOL, HEAVY_RESIDUAL_TOL,
    POLARON_RESIDUAL_TOL,
};

/// Worker-count override for the parallel sweeps.
pub const WORKERS_ENV: &str = "RABI_SUSY_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

/// Goldstino residual bound.
pub const GOLDSTINO_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "rabi-susy",
    version,
    about = "Spectra, supersymmetry checks and spectral flows of the quantum Rabi model with an A² term",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Configuration flags; each overrides the matching key of the config file.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    /// JSON configuration file
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long = "g-max", visible_alias = "g", global = true)]
    pub g_max: Option<f64>,
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true, value_name = "NAME")]
    pub omega_a_schedule: Option<String>,
    #[arg(long, global = true, value_name = "NAME")]
    pub g_schedule: Option<String>,
    #[arg(long, global = true)]
    pub n_fock: Option<usize>,
    #[arg(long, global = true)]
    pub buffer: Option<usize>,
    /// `r` or `g`
    #[arg(long, global = true)]
    pub sweep_kind: Option<String>,
    #[arg(long, global = true)]
    pub sweep_start: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_stop: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_points: Option<usize>,
    #[arg(long, global = true)]
    pub k_levels: Option<usize>,
    #[arg(long, global = true)]
    pub tol_degeneracy: Option<f64>,
    #[arg(long, global = true)]
    pub tol_algebra: Option<f64>,
    #[arg(long, global = true)]
    pub tol_convergence: Option<f64>,
    #[arg(long, global = true, value_name = "FILE")]
    pub out_csv: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    pub out_svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest levels at one point of the sweep (default: its end)
    Spectrum {
        #[arg(long)]
        at: Option<f64>,
    },
    /// Spectral flow over the configured grid
    Sweep,
    /// Supersymmetry algebra and unitary-equivalence checks
    Verify,
    /// Witten index at both ends of the r schedule
    Witten {
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_WITTEN_K)]
        levels: usize,
    },
    /// Truncation convergence study at one point of the sweep (default: its end)
    Converge {
        #[arg(long)]
        at: Option<f64>,
    },
    /// Heavy-boson frequency and mass increment
    Mass,
    /// Eigen-relation of the broken supercharges on the vacua
    Goldstino,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        set!(
            omega,
            g_max,
            c,
            omega_a_schedule,
            g_schedule,
            n_fock,
            buffer
        );
        set!(k_levels, tol_degeneracy, tol_algebra, tol_convergence);
        if let Some(kind) = &self.sweep_kind {
            cfg.sweep.kind = kind.parse()?;
        }
        if let Some(v) = self.sweep_start {
            cfg.sweep.start = v;
        }
        if let Some(v) = self.sweep_stop {
            cfg.sweep.stop = Some(v);
        }
        if let Some(v) = self.sweep_points {
            cfg.sweep.points = v;
        }
        if let Some(p) = &self.out_csv {
            cfg.out_csv = Some(p.clone());
        }
        if let Some(p) = &self.out_svg {
            cfg.out_svg = Some(p.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) => EXIT_VALIDATION,
        Error::TransformMismatch { .. } => EXIT_VERIFICATION,
        _ => EXIT_NUMERICAL,
    }
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Config(format!(
                "{WORKERS_ENV}: expected a positive integer, got `{v}`"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Parses `argv` and runs the command, returning the process exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "error: {}", text.trim_start_matches("error: "));
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = cli
        .config
        .resolve()
        .and_then(|cfg| worker_pool().map(|pool| (cfg, pool)))
        .and_then(|(cfg, pool)| {
            pool.install(|| {
                let mut buf = Vec::new();
                dispatch(&cli.command, &cfg, &mut buf).map(|code| (code, buf))
            })
        })
        .and_then(|(code, buf)| out.write_all(&buf).map(|_| code).map_err(io_out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_out(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn dispatch(cmd: &Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Spectrum { at } => spectrum(cfg, *at, out),
        Command::Sweep => sweep(cfg, out),
        Command::Verify => verify(cfg, out),
        Command::Witten { beta, levels } => witten(cfg, *beta, *levels, out),
        Command::Converge { at } => converge(cfg, *at, out),
        Command::Mass => mass(cfg, out),
        Command::Goldstino => goldstino(cfg, out),
    }
}

fn flow_at(cfg: &RunConfig, grid: &[f64]) -> Result<FlowResult> {
    let fp = cfg.fock()?;
    let mut flow = match cfg.sweep.kind {
        SweepVariable::R => spectral_flow_r(&cfg.schedule()?, grid, cfg.k_levels, &fp)?,
        SweepVariable::G => spectral_flow_g(cfg.omega, cfg.c, grid, cfg.k_levels, &fp)?,
    };
    flow.regroup(cfg.tol_degeneracy);
    Ok(flow)
}

fn point_hamiltonian(cfg: &RunConfig, x: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    match cfg.sweep.kind {
        SweepVariable::R => h_total_r(&cfg.schedule()?, x, fp),
        SweepVariable::G => coupling_hamiltonian(cfg.omega, cfg.c, x, fp),
    }
}

fn emit_csv(flow: &FlowResult, cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    match &cfg.out_csv {
        Some(path) => {
            emit_flow_csv(flow, path)?;
            writeln!(
                out,
                "wrote {} rows to {}",
                flow.grid.len() * flow.levels(),
                path.display()
            )
            .map_err(io_out)
        }
        None => write_flow_csv(flow, out),
    }
}

fn spectrum(cfg: &RunConfig, at: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let x = at.unwrap_or(cfg.sweep_stop());
    let flow = flow_at(cfg, &[x])?;
    emit_csv(&flow, cfg, out)?;
    Ok(EXIT_OK)
}

fn sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = cfg.grid()?;
    let mut flow = flow_at(cfg, &grid)?;
    let stop = *grid.last().expect("validated grid");
    let last = flow.tables.last().expect("one table per point");
    let fp_end = cfg.fock()?.rescaled(last.n_fock_used)?;
    match truncation_convergence(
        |fp| point_hamiltonian(cfg, stop, fp),
        cfg.k_levels,
        cfg.tol_convergence,
        &fp_end,
    ) {
        Ok(rep) => {
            for t in &mut flow.tables {
                t.converged = t.n_fock_used >= rep.n_star;
            }
        }
        Err(Error::TruncationNotConverged { cap, drift }) => {
            log::warn!("sweep endpoint not converged below n_fock = {cap} (drift {drift:e})");
        }
        Err(e) => return Err(e),
    }
    if let Some(path) = &cfg.out_svg {
        emit_flow_svg(&flow, path)?;
    }
    emit_csv(&flow, cfg, out)?;
    Ok(EXIT_OK)
}

struct Check {
    name: String,
    value: f64,
    threshold: f64,
    pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

fn algebra_checks(prefix: &str, rep: &AlgebraReport, omega: f64, checks: &mut Vec<Check>) {
    for (name, v) in rep.algebra_residuals() {
        checks.push(Check::below(
            format!("{prefix}.{name}"),
            v,
            rep.thresholds.algebra,
        ));
    }
    let expected = rep.expected_vacuum_norm(omega);
    for (i, v) in rep.vacuum_annihilation.iter().enumerate() {
        let (value, threshold) = if expected == 0.0 {
            (*v, rep.thresholds.vacuum)
        } else {
            ((v - expected).abs(), rep.thresholds.broken_vacuum)
        };
        checks.push(Check::below(
            format!("{prefix}.vacuum_{i}"),
            value,
            threshold,
        ));
    }
}

fn verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let fp = cfg.fock()?;
    let w = cfg.omega;
    let thresholds = AlgebraThresholds {
        algebra: cfg.tol_algebra,
        ..AlgebraThresholds::default()
    };
    let mut checks = Vec::new();

    let h_free = hamiltonian(&ModelParams::new(w, w, 0.0, 0.0)?, &fp)?;
    let rep = susy_algebra_report_with(&h_free, &free_supercharges(w, &fp)?, &fp, thresholds)?;
    algebra_checks("free", &rep, w, &mut checks);
    let h_broken = hamiltonian(&ModelParams::new(0.0, w, 0.0, 0.0)?, &fp)?;
    let rep = susy_algebra_report_with(&h_broken, &broken_supercharges(w, &fp)?, &fp, thresholds)?;
    algebra_checks("broken", &rep, w, &mut checks);

    let p = ModelParams::new(w, w, cfg.g_max, cfg.c)?;
    let a2_residual = match u_a2(&p, &fp) {
        Ok(t) => t.report.residual,
        Err(Error::TransformMismatch { residual, .. }) => residual,
        Err(e) => return Err(e),
    };
    checks.push(Check::below(
        "transform.a2_squeeze",
        a2_residual,
        A2_RESIDUAL_TOL,
    ));
    let rep = renormalized_polaron_identity(&p, &fp)?;
    checks.push(Check::below(
        "transform.polaron",
        rep.residual,
        POLARON_RESIDUAL_TOL,
    ));
    let s = cfg.schedule()?;
    for r in [0.0, 0.5, 1.0] {
        let rep = heavy_boson_identity(&s, r, &fp)?;
        checks.push(Check::below(
            format!("transform.heavy_boson_r{r}"),
            rep.residual,
            HEAVY_RESIDUAL_TOL,
        ));
    }

    let mut text = String::from("check,value,threshold,status\n");
    for c in &checks {
        text.push_str(&format!(
            "{},{:.3e},{:.1e},{}\n",
            c.name,
            c.value,
            c.threshold,
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
    out.write_all(text.as_bytes()).map_err(io_out)?;
    if let Some(path) = &cfg.out_csv {
        std::fs::write(path, &text).map_err(|e| Error::io(path, e))?;
    }
    Ok(if checks.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

fn witten(cfg: &RunConfig, beta: Option<f64>, levels: usize, out: &mut dyn Write) -> Result<i32> {
    let fp = cfg.fock()?;
    let s = cfg.schedule()?;
    let beta = beta.unwrap_or(default_witten_beta(cfg.omega));
    let nf = grading_operator(&fp);
    writeln!(
        out,
        "r,beta,index_value,rounded,truncation_tail,levels_used"
    )
    .map_err(io_out)?;
    for r in [0.0, 1.0] {
        let rep = witten_index(&h_total_r(&s, r, &fp)?, &nf, beta, levels)?;
        writeln!(
            out,
            "{r},{:.6},{:.9},{},{:.3e},{}",
            rep.beta, rep.index_value, rep.rounded, rep.truncation_tail, rep.levels_used
        )
        .map_err(io_out)?;
    }
    Ok(EXIT_OK)
}

fn converge(cfg: &RunConfig, at: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let x = at.unwrap_or(cfg.sweep_stop());
    let rep = truncation_convergence(
        |fp| point_hamiltonian(cfg, x, fp),
        cfg.k_levels,
        cfg.tol_convergence,
        &cfg.fock()?,
    )?;
    writeln!(out, "n_fock,drift").map_err(io_out)?;
    for step in &rep.history {
        writeln!(out, "{},{:.3e}", step.n_fock, step.drift).map_err(io_out)?;
    }
    writeln!(out, "n_star = {}", rep.n_star).map_err(io_out)?;
    writeln!(out, "drift = {:.3e}", rep.drift).map_err(io_out)?;
    Ok(EXIT_OK)
}

fn mass(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (omega_g, g_tilde) = renormalized_frequency(cfg.omega, cfg.c, cfg.g_max);
    let dm = mass_increment(cfg.omega, cfg.c, cfg.g_max);
    writeln!(out, "omega_g = {omega_g:.10}").map_err(io_out)?;
    writeln!(out, "delta_m = {dm:.10}").map_err(io_out)?;
    writeln!(out, "g_tilde = {g_tilde:.10}").map_err(io_out)?;
    if cfg.c > 0.0 {
        writeln!(out, "self_energy_limit = {:.10}", 1.0 / (4.0 * cfg.c)).map_err(io_out)?;
    } else {
        writeln!(out, "self_energy_limit = inf").map_err(io_out)?;
    }
    Ok(EXIT_OK)
}

fn goldstino(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let rep = goldstino_check(cfg.omega, &cfg.fock()?)?;
    let rows = [
        ("plus_eigen_residual", rep.plus_residual),
        ("minus_eigen_residual", rep.minus_residual),
        ("plus_ladder_residual", rep.plus_ladder_residual),
        ("minus_ladder_residual", rep.minus_ladder_residual),
        ("partner_residual", rep.partner_residual),
        ("energy_increment", rep.energy_increment),
        ("plus_norm", rep.plus_norm),
        ("minus_norm", rep.minus_norm),
    ];
    for (name, v) in rows {
        writeln!(out, "{name} = {v:.6e}").map_err(io_out)?;
    }
    Ok(if rep.passes(GOLDSTINO_TOL) {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["rabi-susy"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn mass_command() {
        let (code, out, _) = run_str(&[
            "mass", "--omega", "6.2832", "--g", "6.2832", "--c", "0.2513",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("omega_g = 16.99"), "{out}");
        assert!(out.contains("delta_m = 15.79"), "{out}");
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run_str(&["nonsense"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(err.starts_with("error:"));
        let (code, _, err) = run_str(&["mass", "--omega", "-1"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(err.starts_with("error:"), "{err}");
        let (code, _, _) = run_str(&["sweep", "--sweep-points", "1"]);
        assert_eq!(code, EXIT_VALIDATION);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sweep"));
    }

    #[test]
    fn spectrum_to_stdout() {
        let (code, out, _) = run_str(&["spectrum", "--at", "0", "--n-fock", "32", "--buffer", "8"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 8);
        assert!(lines[1].starts_with("r_sweep,0.00000000000e0,0,"));
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
        assert_eq!(
            exit_code(&Error::NoConvergence {
                dim: 2,
                index: None
            }),
            2
        );
        assert_eq!(
            exit_code(&Error::TransformMismatch {
                identity: "x".into(),
                residual: 1.0,
                threshold: 0.0
            }),
            3
        );
    }
}
