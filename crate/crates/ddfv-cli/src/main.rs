//! `ddfv`: stationary drift-diffusion device simulation runs.
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 solver failure,
//! 3 hard bound violation.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, ScenarioKind};
use ddfv_core::bounds::{certificate, verify_solution_bounds, BoundInputs};
use ddfv_core::fvm::{DiscreteSystem, StateVector};
use ddfv_core::newton::{continuation_solve, equilibrium_state, standard_ladder};
use ddfv_core::scenario::DeviceScenario;
use ddfv_core::scenarios::{
    contact_current, lbic_scan, lbic_scenario, parameter_sweep, psc_scenario_with,
    CurrentMethod, ScenarioFamily, SweepParameter,
};
use output::ManifestBuilder;

#[derive(Parser)]
#[command(name = "ddfv", version, about = "Stationary drift-diffusion finite-volume device simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the TOML run configuration.
    config: String,
    /// Output directory (overrides the config's output.dir).
    #[arg(long)]
    out: Option<String>,
    /// Dotted-path config overrides, e.g. --set scenario.voltage=1.5.
    #[arg(long = "set")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one operating point and write profile.csv + manifest.txt.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep a parameter and write sweep.csv + manifest.txt.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of: G0, V, lambda, C.
        #[arg(long)]
        param: String,
        /// "lo:hi:logN", "lo:hi:linN" or a comma list.
        #[arg(long)]
        values: String,
    },
    /// Scan the laser beam and write lbic.csv + manifest.txt.
    Lbic {
        #[command(flatten)]
        common: Common,
        /// Scan line, e.g. y=2 (default). Positions are the node abscissae.
        #[arg(long)]
        line: Option<String>,
        /// Scan every mesh node instead of one line.
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Print the a-priori bound certificate without solving.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Write the mesh in the plain-text dump format.
    DumpMesh {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl std::fmt::Display) -> Failure {
    Failure { code, message: message.to_string() }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { common } => cmd_solve(&common),
        Command::Sweep { common, param, values } => cmd_sweep(&common, &param, &values),
        Command::Lbic { common, line, grid, threads } => cmd_lbic(&common, line, grid, threads),
        Command::Bounds { common } => cmd_bounds(&common),
        Command::DumpMesh { common } => cmd_dump_mesh(&common),
    }
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let cfg = RunConfig::load(&common.config, &common.set).map_err(|e| fail(1, e))?;
    let dir = PathBuf::from(common.out.clone().unwrap_or_else(|| cfg.output.dir.clone()));
    Ok((cfg, dir))
}

fn build_scenario(cfg: &RunConfig) -> Result<DeviceScenario, Failure> {
    match cfg.scenario.kind {
        ScenarioKind::Psc => psc_scenario_with(
            cfg.psc_species(),
            cfg.scenario.voltage,
            cfg.scenario.generation,
            &cfg.psc_params(),
        )
        .map_err(|e| fail(1, e)),
        ScenarioKind::Lbic => {
            lbic_scenario(cfg.scenario.beam_center, &cfg.lbic_params()).map_err(|e| fail(1, e))
        }
    }
}

fn write(dir: &Path, name: &str, content: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| fail(1, format!("cannot create {}: {e}", dir.display())))?;
    std::fs::write(dir.join(name), content)
        .map_err(|e| fail(1, format!("cannot write {name}: {e}")))
}

fn solve_to_target(
    cfg: &RunConfig,
    scenario: &DeviceScenario,
    manifest: &mut ManifestBuilder,
) -> Result<StateVector, Failure> {
    let ladder = standard_ladder(cfg.scenario.voltage, cfg.scenario.generation);
    manifest.note(&format!(
        "continuation ladder: {}",
        ladder
            .iter()
            .map(|r| format!("{:?}={}", r.parameter, r.value))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    if ladder.is_empty() {
        manifest.note("equilibrium point (V = 0, G0 = 0)");
        return equilibrium_state(scenario).map_err(|e| fail(2, e));
    }
    let reports = continuation_solve(scenario, &ladder, &cfg.newton_config())
        .map_err(|e| fail(2, e))?;
    let tagged: Vec<(String, &ddfv_core::newton::SolveReport)> = ladder
        .iter()
        .zip(&reports)
        .map(|(r, rep)| (format!("{:?}={}", r.parameter, r.value), rep))
        .collect();
    manifest.reports("newton history", &tagged);
    Ok(reports.last().unwrap().state.clone())
}

fn cmd_solve(common: &Common) -> Result<(), Failure> {
    let (cfg, dir) = load(common)?;
    let scenario = build_scenario(&cfg)?;
    let mut manifest = ManifestBuilder::new("solve", &cfg.to_toml_string());
    let state = solve_to_target(&cfg, &scenario, &mut manifest)?;

    let sys = DiscreteSystem::new(&scenario).map_err(|e| fail(2, e))?;
    for (tag, name) in [(0usize, "I_d1"), (1, "I_d2")] {
        let bfs = contact_current(&sys, &state, tag, CurrentMethod::BoundaryFluxSum)
            .map_err(|e| fail(2, e))?;
        let vtf = contact_current(&sys, &state, tag, CurrentMethod::VolumeTestFunction)
            .map_err(|e| fail(2, e))?;
        manifest.note(&format!(
            "{name}: boundary_flux_sum={:e} volume_test_function={:e}",
            bfs.value, vtf.value
        ));
    }

    let inputs = BoundInputs::from_scenario(&scenario, &cfg.bound_config())
        .map_err(|e| fail(1, e))?;
    let cert = certificate(&scenario, &inputs).map_err(|e| fail(1, e))?;
    let verdict = verify_solution_bounds(&sys, &state, &cert).map_err(|e| fail(2, e))?;
    manifest.verdict(&verdict);

    write(&dir, "profile.csv", &output::profile_csv(&sys, &state).map_err(|e| fail(2, e))?)?;
    write(&dir, "manifest.txt", &manifest.build())?;

    if !verdict.hard_ok() {
        return Err(fail(3, "hard bound violation (see manifest.txt)"));
    }
    Ok(())
}

fn parse_values(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = |s: &str| fail(1, format!("bad --values `{s}`"));
    if let Some((range, tail)) = spec.rsplit_once(':') {
        let scale_log = tail.strip_prefix("log");
        let scale_lin = tail.strip_prefix("lin");
        if let Some(n_str) = scale_log.or(scale_lin) {
            let n: usize = n_str.parse().map_err(|_| bad(spec))?;
            let (lo_s, hi_s) = range.split_once(':').ok_or_else(|| bad(spec))?;
            let lo: f64 = lo_s.parse().map_err(|_| bad(spec))?;
            let hi: f64 = hi_s.parse().map_err(|_| bad(spec))?;
            if n < 1 {
                return Err(bad(spec));
            }
            if n == 1 {
                return Ok(vec![lo]);
            }
            let vals = (0..n)
                .map(|k| {
                    let t = k as f64 / (n - 1) as f64;
                    if scale_log.is_some() {
                        (lo.ln() + t * (hi.ln() - lo.ln())).exp()
                    } else {
                        lo + t * (hi - lo)
                    }
                })
                .collect();
            return Ok(vals);
        }
    }
    spec.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad(spec)))
        .collect()
}

fn cmd_sweep(common: &Common, param: &str, values: &str) -> Result<(), Failure> {
    let (cfg, dir) = load(common)?;
    let parameter = match param {
        "G0" => SweepParameter::Generation,
        "V" => SweepParameter::Voltage,
        "lambda" => SweepParameter::Lambda,
        "C" => SweepParameter::DopingMagnitude,
        other => return Err(fail(1, format!("unknown sweep parameter `{other}`"))),
    };
    let values = parse_values(values)?;
    // validate the base scenario before sweeping
    build_scenario(&cfg)?;
    let family = match cfg.scenario.kind {
        ScenarioKind::Psc => ScenarioFamily::Psc {
            species: cfg.psc_species(),
            params: cfg.psc_params(),
            voltage: cfg.scenario.voltage,
            generation: cfg.scenario.generation,
        },
        ScenarioKind::Lbic => ScenarioFamily::Lbic {
            beam_center: cfg.scenario.beam_center,
            params: cfg.lbic_params(),
        },
    };
    let result =
        parameter_sweep(&family, parameter, &values, &cfg.newton_config(), &cfg.bound_config());

    let mut manifest = ManifestBuilder::new("sweep", &cfg.to_toml_string());
    manifest.note(&format!("sweep parameter {param}, {} values", values.len()));
    for (v, msg) in &result.failures {
        manifest.note(&format!("FAILED value {v}: {msg}"));
    }
    write(&dir, "sweep.csv", &output::sweep_csv(param, &result))?;
    write(&dir, "manifest.txt", &manifest.build())?;
    if !result.failures.is_empty() {
        return Err(fail(2, format!("{} sweep value(s) failed", result.failures.len())));
    }
    if result.rows.iter().any(|r| !r.bounds_hard_ok) {
        return Err(fail(3, "hard bound violation in sweep rows"));
    }
    Ok(())
}

fn cmd_lbic(common: &Common, line: Option<String>, grid: bool, threads: usize) -> Result<(), Failure> {
    let (cfg, dir) = load(common)?;
    if cfg.scenario.kind != ScenarioKind::Lbic {
        return Err(fail(1, "lbic command needs scenario.kind = \"lbic\""));
    }
    let params = cfg.lbic_params();
    let mesh = lbic_scenario([4.0, 2.0], &params).map_err(|e| fail(1, e))?.mesh;

    let positions: Vec<[f64; 2]> = if grid {
        mesh.cells.iter().map(|c| c.center).collect()
    } else {
        let spec = line.unwrap_or_else(|| "y=2".into());
        let y: f64 = spec
            .strip_prefix("y=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| fail(1, format!("bad --line `{spec}`; expected y=<value>")))?;
        if !mesh.y_lines.iter().any(|&v| (v - y).abs() < 1e-12) {
            return Err(fail(1, format!("scan line y={y} is not a mesh node line")));
        }
        mesh.x_lines.iter().map(|&x| [x, y]).collect()
    };

    let signal = lbic_scan(&positions, &params, &cfg.newton_config(), threads);

    let mut manifest = ManifestBuilder::new("lbic", &cfg.to_toml_string());
    manifest.note(&format!(
        "scan: {} positions, {} converged, {} failed, threads {threads}",
        positions.len(),
        signal.points.len(),
        signal.failures.len()
    ));
    for p in &signal.points {
        manifest.note(&format!(
            "position ({}, {}): I={:e} bound={:e}",
            p.x0, p.y0, p.current, p.current_bound
        ));
    }
    for (pos, msg) in &signal.failures {
        manifest.note(&format!("FAILED position ({}, {}): {msg}", pos[0], pos[1]));
    }
    write(&dir, "lbic.csv", &output::lbic_csv(&signal))?;
    write(&dir, "manifest.txt", &manifest.build())?;
    if !signal.failures.is_empty() {
        return Err(fail(2, format!("{} scan position(s) failed", signal.failures.len())));
    }
    Ok(())
}

fn cmd_bounds(common: &Common) -> Result<(), Failure> {
    let (cfg, _) = load(common)?;
    let scenario = build_scenario(&cfg)?;
    let inputs =
        BoundInputs::from_scenario(&scenario, &cfg.bound_config()).map_err(|e| fail(1, e))?;
    let cert = certificate(&scenario, &inputs).map_err(|e| fail(1, e))?;
    println!("scenario: {}", scenario.name);
    println!("N^D (Dirichlet density bound): {}", cert.n_dirichlet);
    println!("Nbar (density upper bound):    {}", cert.n_upper);
    println!("M_psi (electric potential):    {}", cert.m_psi);
    println!("M_v (quasi-Fermi potentials):  {}", cert.m_v);
    if let Some(m_a) = cert.m_a {
        println!("M_a (ion level):               {m_a}");
    }
    if let Some(s) = cert.saturation {
        println!("S_a (ion saturation, hard):    {s}");
    }
    let st = &cert.stampacchia;
    println!(
        "stampacchia: x0={} zeta={} alpha={} beta={} E0={}",
        st.x0, st.zeta, st.alpha, st.beta, st.e0
    );
    Ok(())
}

fn cmd_dump_mesh(common: &Common) -> Result<(), Failure> {
    let (cfg, dir) = load(common)?;
    let scenario = build_scenario(&cfg)?;
    write(&dir, "mesh.txt", &scenario.mesh.dump())
}
