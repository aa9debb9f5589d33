//! Command-line front end: spectra, benchmark tables, modulation scans,
//! invariant verification and entropy bounds.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 acceptance failure (table or verification mismatch).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{MethodChoice, RunConfig};
use crate::error::{Error, Result};
use crate::floquet::{solve_floquet, FloquetSystem};
use crate::observables::{
    engine_report, entropy_bounds, modulation, split_coefficients, sweep_spectrum, Method,
    SpectrumRow,
};
use crate::tables::{evaluate_table, table};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for configuration errors (bad config file, bad flags, I/O).
pub const EXIT_CONFIG: i32 = 1;
/// Exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 2;
/// Exit code for acceptance failures (table or verification mismatch).
pub const EXIT_ACCEPTANCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "eit-engine",
    version,
    about = "Steady-state spectra, benchmark tables and invariants of tripod EIT heat engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct JobArgs {
    /// Flat key = value configuration file (defaults apply when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (defaults to the config `out` key, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Response backend: closed-form, floquet or both.
    #[arg(long)]
    method: Option<String>,
    /// Probe-detuning grid as min:max:points (2π·MHz).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Floquet truncation order L.
    #[arg(long = "harmonics", value_name = "L")]
    harmonics: Option<usize>,
}

#[derive(Args, Clone)]
struct TableArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Benchmark table to reproduce (1, 2 or 3).
    #[arg(long = "table-id", value_name = "N")]
    table_id: u8,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Brightness spectrum sweep over the probe detuning (CSV).
    Spectrum(JobArgs),
    /// Coherence-modulation sweep (CSV; requires a mirror-coupled variant).
    Modulation(JobArgs),
    /// Recompute a benchmark table and compare against the reference values.
    Table(TableArgs),
    /// Run the invariant suite and emit a machine-readable report.
    Verify(JobArgs),
    /// Print the second-law entropy bounds for the configured variant.
    Bounds(JobArgs),
}

/// Run the CLI on the given argument list; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version land here with a zero exit
            let code = if e.exit_code() == 0 { EXIT_OK } else { EXIT_CONFIG };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => EXIT_NUMERICAL,
                _ => EXIT_CONFIG,
            }
        }
    }
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Spectrum(job) => cmd_spectrum(job, false),
        Command::Modulation(job) => cmd_spectrum(job, true),
        Command::Table(args) => cmd_table(args),
        Command::Verify(job) => cmd_verify(job),
        Command::Bounds(job) => cmd_bounds(job),
    }
}

fn load_config(job: &JobArgs) -> Result<RunConfig> {
    let mut cfg = match &job.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &job.method {
        cfg.method = MethodChoice::parse(m)?;
    }
    if let Some(g) = &job.grid {
        let parts: Vec<&str> = g.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid must be min:max:points, got '{g}'")));
        }
        cfg.grid_min = parts[0]
            .parse()
            .map_err(|_| Error::Config(format!("grid min: expected a number, got '{}'", parts[0])))?;
        cfg.grid_max = parts[1]
            .parse()
            .map_err(|_| Error::Config(format!("grid max: expected a number, got '{}'", parts[1])))?;
        cfg.grid_points = parts[2]
            .parse()
            .map_err(|_| Error::Config(format!("grid points: expected an integer, got '{}'", parts[2])))?;
    }
    if let Some(l) = job.harmonics {
        cfg.l_max = l;
    }
    if let Some(out) = &job.out {
        cfg.out = Some(out.to_string_lossy().into_owned());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// 9-significant-digit lowercase scientific formatting (byte-deterministic).
fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.8e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn row_flags(row: &SpectrumRow) -> String {
    if row.error.is_some() {
        "error".to_string()
    } else if row.gain {
        "gain".to_string()
    } else {
        String::new()
    }
}

const SPECTRUM_COLUMNS: [&str; 7] = [
    "sigma_abs",
    "sigma_em",
    "brightness",
    "brightness_over_n41",
    "mod_amplitude",
    "mod_phase_over_pi",
    "flags",
];

fn push_row_fields(out: &mut String, row: &SpectrumRow) {
    let _ = write!(
        out,
        ",{},{},{},{},{},{},{}",
        fmt_num(row.sigma_abs),
        fmt_num(row.sigma_em),
        fmt_opt(row.brightness),
        fmt_opt(row.brightness_over_n41),
        fmt_opt(row.mod_amplitude),
        fmt_opt(row.mod_phase.map(|a| a / std::f64::consts::PI)),
        row_flags(row)
    );
}

fn cmd_spectrum(job: &JobArgs, modulation_required: bool) -> Result<i32> {
    let cfg = load_config(job)?;
    let params = cfg.engine_params();
    if modulation_required && !cfg.variant.has_control_channel() {
        return Err(Error::Config(format!(
            "variant: coherence modulation needs the mirror-coupled control channel (got {})",
            cfg.variant.label()
        )));
    }
    let methods = cfg.methods();
    let sweeps: Vec<Vec<SpectrumRow>> = methods
        .iter()
        .map(|&m| sweep_spectrum(&params, cfg.grid(), m, true))
        .collect::<Result<_>>()?;

    let mut out = String::from("delta_pr_2pi_mhz");
    if methods.len() == 1 {
        for c in SPECTRUM_COLUMNS {
            let _ = write!(out, ",{c}");
        }
    } else {
        for suffix in ["closed_form", "floquet"] {
            for c in SPECTRUM_COLUMNS {
                let _ = write!(out, ",{c}_{suffix}");
            }
        }
    }
    out.push('\n');
    for i in 0..cfg.grid_points {
        let _ = write!(out, "{}", fmt_num(sweeps[0][i].delta_pr));
        for sweep in &sweeps {
            push_row_fields(&mut out, &sweep[i]);
        }
        out.push('\n');
    }
    emit(&cfg, &out)?;
    Ok(EXIT_OK)
}

fn cmd_table(args: &TableArgs) -> Result<i32> {
    let cfg = load_config(&args.job)?;
    let spec = table(args.table_id)?;
    let method = *cfg
        .methods()
        .first()
        .expect("methods() is never empty");
    let rows = evaluate_table(&spec, cfg.grid(), method)?;

    let mut out = String::from(
        "row,omega_m_2pi_mhz,drive_over_gamma41,\
         t_max_computed,t_max_reference,t_max_rel_err,\
         s_computed,s_reference,s_rel_err,\
         r_computed,r_reference,r_rel_err,status\n",
    );
    let mut passed = 0usize;
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.row.index,
            r.row.omega_m.map(fmt_num).unwrap_or_default(),
            fmt_num(r.row.drive_over_gamma41),
            fmt_num(r.computed[0]),
            fmt_num(r.row.expected[0]),
            fmt_num(r.rel_err[0]),
            fmt_num(r.computed[1]),
            fmt_num(r.row.expected[1]),
            fmt_num(r.rel_err[1]),
            fmt_num(r.computed[2]),
            fmt_num(r.row.expected[2]),
            fmt_num(r.rel_err[2]),
            if r.within { "pass" } else { "fail" }
        );
        if r.within {
            passed += 1;
        }
    }
    emit(&cfg, &out)?;
    eprintln!("table {}: {passed}/{} rows within tolerance", spec.id, rows.len());
    Ok(if passed == rows.len() { EXIT_OK } else { EXIT_ACCEPTANCE })
}

struct Check {
    name: &'static str,
    residual: f64,
    threshold: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.residual <= self.threshold
    }
}

fn cmd_verify(job: &JobArgs) -> Result<i32> {
    let cfg = load_config(job)?;
    let params = cfg.engine_params();
    let mut checks: Vec<Check> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    if cfg.epsilon > 0.1 {
        warnings.push(format!(
            "epsilon = {} is outside the perturbative modulation regime (ε ≪ 1); \
             first-harmonic observables may be inaccurate",
            cfg.epsilon
        ));
    }

    // full Floquet steady state with the probe on
    let system = FloquetSystem::from_params(&params)?;
    let state = solve_floquet(&system, cfg.l_max)?;
    let dc = state.dc();
    let trace: crate::engine::C64 = (0..4).map(|i| dc[(i, i)]).sum();
    checks.push(Check {
        name: "trace_preservation",
        residual: (trace - crate::engine::C64::new(1.0, 0.0)).norm(),
        threshold: 1e-12,
    });
    checks.push(Check {
        name: "hermiticity",
        residual: state.hermiticity_defect(),
        threshold: 1e-12,
    });

    // positivity over one reconstructed mirror cycle
    let mut min_eig = f64::INFINITY;
    for k in 0..16 {
        let phase = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
        let m = state.at_phase(phase);
        let herm = (m + m.adjoint()) * crate::engine::C64::new(0.5, 0.0);
        for ev in herm.symmetric_eigenvalues().iter() {
            min_eig = min_eig.min(*ev);
        }
    }
    checks.push(Check {
        name: "positivity",
        residual: (-min_eig).max(0.0),
        threshold: 1e-8,
    });

    // closed form vs Floquet on the DC coefficients
    let tol = {
        let g41 = params.dephasing().gamma_41;
        let r = params.omega_pr / g41;
        (r * r).max(1e-3)
    };
    let cf = split_coefficients(&params, Method::default())?;
    let fl = split_coefficients(&params, Method::Floquet { l_max: cfg.l_max })?;
    let scale = cf.sigma_abs.abs().max(cf.sigma_em.abs()).max(1e-300);
    let dc_err = ((cf.sigma_abs - fl.sigma_abs).abs().max((cf.sigma_em - fl.sigma_em).abs())) / scale;
    checks.push(Check { name: "oracle_equivalence_dc", residual: dc_err, threshold: tol });

    if params.variant.has_control_channel() && params.epsilon > 0.0 {
        let mc = modulation(&params, Method::default())?;
        let mf = modulation(&params, Method::Floquet { l_max: cfg.l_max })?;
        let scale = mf.amplitude.abs().max(1e-300);
        checks.push(Check {
            name: "oracle_equivalence_modulation",
            residual: (mc.amplitude - mf.amplitude).abs() / scale,
            threshold: tol,
        });
    }

    // second-law bounds on the entropy flow
    let report = engine_report(&params, cfg.grid(), *cfg.methods().first().unwrap())?;
    let outside = (report.entropy_lower - report.s_over_kb)
        .max(report.s_over_kb - report.entropy_upper)
        .max(0.0);
    checks.push(Check { name: "entropy_bounds", residual: outside, threshold: 0.0 });

    let mut out = String::new();
    for w in &warnings {
        let _ = writeln!(out, "warning={w}");
    }
    let mut all_pass = true;
    for c in &checks {
        all_pass &= c.pass();
        let _ = writeln!(
            out,
            "check={} residual={} threshold={} status={}",
            c.name,
            fmt_num(c.residual),
            fmt_num(c.threshold),
            if c.pass() { "pass" } else { "fail" }
        );
    }
    let _ = writeln!(out, "result={}", if all_pass { "pass" } else { "fail" });
    emit(&cfg, &out)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_ACCEPTANCE })
}

fn cmd_bounds(job: &JobArgs) -> Result<i32> {
    let cfg = load_config(job)?;
    let params = cfg.engine_params();
    let (upper, lower) = entropy_bounds(params.variant, &params.reservoirs);
    let mut out = String::new();
    let _ = writeln!(out, "variant={}", params.variant.label());
    let _ = writeln!(out, "entropy_upper={}", fmt_num(upper));
    let _ = writeln!(out, "entropy_lower={}", fmt_num(lower));
    emit(&cfg, &out)?;
    Ok(EXIT_OK)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_nine_significant_digits() {
        assert_eq!(fmt_num(0.035), "3.50000000e-2");
        assert_eq!(fmt_num(-50.0), "-5.00000000e1");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn grid_flag_overrides_config() {
        let job = JobArgs { grid: Some("-10:10:11".into()), ..Default::default() };
        let cfg = load_config(&job).unwrap();
        assert_eq!(cfg.grid_min, -10.0);
        assert_eq!(cfg.grid_max, 10.0);
        assert_eq!(cfg.grid_points, 11);
        assert!(load_config(&JobArgs { grid: Some("1:2".into()), ..Default::default() }).is_err());
    }

    #[test]
    fn bad_method_flag_is_config_error() {
        let job = JobArgs { method: Some("magic".into()), ..Default::default() };
        assert!(matches!(load_config(&job), Err(Error::Config(_))));
    }
}
