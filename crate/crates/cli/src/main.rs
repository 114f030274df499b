mod config;
mod exit;
mod export;
mod info;
mod inputs;
mod meta;
mod output;
mod synth;
mod verify;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::{parse_resolution, ActionSpec, RunConfig};
use exit::{CliError, Code};
use output::Outcome;

#[derive(Parser, Debug)]
#[command(name = "polargeo", version, about = "Polar actions, isoparametric orbits and invariant hypersurfaces")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long = "fd-step", global = true)]
    fd_step: Option<f64>,
    /// Profile nodes by group elements, e.g. `64x64`.
    #[arg(long, global = true, value_parser = parse_resolution)]
    resolution: Option<[usize; 2]>,
    /// Output directory.
    #[arg(long, global = true, env = "POLARGEO_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cohomogeneity, section and polarity certificate of an action.
    ActionInfo {
        #[arg(long)]
        action: Option<PathBuf>,
    },
    /// Principal normals, curvature table and Weyl group of an orbit.
    Orbit {
        #[arg(long)]
        action: Option<PathBuf>,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Sweeps a profile into an invariant hypersurface and writes a mesh.
    Synth {
        /// `sweep`, `rotation`, `multirot` or `warped`.
        #[arg(long)]
        mode: Option<String>,
        /// Profile point file, replacing the configured profile.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Re-checks a mesh written by `synth`.
    Verify {
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Converts a mesh to a 3D projection or CSV.
    Export {
        #[arg(long)]
        mesh: PathBuf,
        /// `obj3` or `csv`.
        #[arg(long, default_value = "obj3")]
        format: String,
        /// Coordinates kept by `obj3`, e.g. `0,1,2`.
        #[arg(long)]
        coords: Option<String>,
    },
}

fn cwd_path(p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.to_path_buf())
    }
}

fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::new(Code::Usage, format!("bad coordinate `{t}` in --point")))
        })
        .collect()
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(&cwd_path(p))?,
        None => RunConfig { base_dir: std::env::current_dir().unwrap_or_default(), ..RunConfig::default() },
    };
    cfg.seed = cli.seed.or(cfg.seed);
    cfg.tol = cli.tol.or(cfg.tol);
    cfg.fd_step = cli.fd_step.or(cfg.fd_step);
    cfg.resolution = cli.resolution.or(cfg.resolution);
    if let Some(o) = &cli.out {
        cfg.out = Some(cwd_path(o));
    } else if let Some(o) = cfg.out.clone() {
        cfg.out = Some(cfg.resolve(&o));
    }
    Ok(cfg)
}

fn action_from(cfg: &RunConfig, flag: &Option<PathBuf>) -> Result<polargeo::LinearAction, CliError> {
    match flag {
        Some(f) => {
            let spec = ActionSpec { file: Some(cwd_path(f)), blocks: None, weights: None };
            inputs::load_action(cfg, &spec)
        }
        None => {
            let spec = cfg.action.as_ref().ok_or_else(|| CliError::new(Code::Usage, "no action: pass --action or set [action]"))?;
            inputs::load_action(cfg, spec)
        }
    }
}

/// Runs the command; the returned directory receives the report files.
fn run(cli: &Cli, o: &mut Outcome) -> Result<Option<PathBuf>, CliError> {
    let mut cfg = load_config(cli)?;
    match &cli.command {
        Command::ActionInfo { action } => {
            let a = action_from(&cfg, action)?;
            info::action_info(&cfg, &a, o)?;
            Ok(cfg.out.clone())
        }
        Command::Orbit { action, point } => {
            let a = action_from(&cfg, action)?;
            let p = match point {
                Some(s) => parse_point(s)?,
                None => cfg
                    .orbit
                    .as_ref()
                    .map(|s| s.point.clone())
                    .ok_or_else(|| CliError::new(Code::Usage, "no point: pass --point or set [orbit]"))?,
            };
            info::orbit(&cfg, &a, &p, o)?;
            Ok(cfg.out.clone())
        }
        Command::Synth { mode, profile } => {
            let out = cfg.out_dir()?;
            if let Some(s) = cfg.synth.as_mut() {
                if let Some(m) = mode {
                    s.mode = m.clone();
                }
                if let Some(p) = profile {
                    s.profile = config::ProfileSpec {
                        kind: "points".into(),
                        center: None,
                        radius: None,
                        arc: None,
                        file: Some(cwd_path(p)),
                        coeffs: None,
                        range: None,
                    };
                }
            }
            // Report files still land in the output directory on failure.
            let r = synth::synth(&cfg, o);
            r.map(|_| Some(out.clone())).or_else(|e| {
                o.fail(e);
                Ok(Some(out))
            })
        }
        Command::Verify { mesh, trials } => {
            let path = match mesh {
                Some(m) => cwd_path(m),
                None => cfg
                    .verify
                    .as_ref()
                    .and_then(|v| v.mesh.as_ref())
                    .map(|m| cfg.resolve(m))
                    .ok_or_else(|| CliError::new(Code::Usage, "no mesh: pass --mesh or set [verify] mesh"))?,
            };
            let out = cfg.out.clone().or_else(|| path.parent().map(Path::to_path_buf));
            if let Err(e) = verify::verify(&cfg, &path, *trials, o) {
                o.fail(e);
            }
            Ok(out)
        }
        Command::Export { mesh, format, coords } => {
            let out = cfg.out_dir()?;
            export::export(&cwd_path(mesh), format, coords.as_deref(), &out, o)?;
            Ok(Some(out))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let name = match &cli.command {
        Command::ActionInfo { .. } => "action-info",
        Command::Orbit { .. } => "orbit",
        Command::Synth { .. } => "synth",
        Command::Verify { .. } => "verify",
        Command::Export { .. } => "export",
    };
    let mut o = Outcome::new(name);
    let dir = match run(&cli, &mut o) {
        Ok(d) => d,
        Err(e) => {
            o.fail(e);
            None
        }
    };
    print!("{}", o.report());
    if let Some(d) = dir {
        if let Err(e) = o.write(&d) {
            eprintln!("polargeo: cannot write report: {e}");
            std::process::exit(Code::Io as i32);
        }
    }
    let code = o.exit_code();
    eprintln!("polargeo {name}: {} (exit {})", if code == Code::Ok { "pass" } else { "fail" }, code as i32);
    std::process::exit(code as i32);
}
