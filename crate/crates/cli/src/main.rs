//! `hierarchy`: evaluate expressions, print extension tables and KP data,
//! and run the verification suites.
//!
//! Exit codes: 0 success, 1 nonzero residual, 2 usage error, 3 window or
//! depth exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use hierarchy_core::emit::{Emit, Format};
use hierarchy_core::forms::{solve_wave_extension, WaveWindow};
use hierarchy_core::jets::JetWindow;
use hierarchy_core::parse::{parse_jets, parse_weyl};
use hierarchy_core::psdo::{
    dress, kp_flows, l_power, verify_s_relations, zero_curvature_residual,
};
use hierarchy_core::suite::{run_suite, SuiteName, SuiteWindow};
use hierarchy_core::weyl::StructureTable;
use hierarchy_core::Error;

#[derive(Parser)]
#[command(name = "hierarchy", version, about = "Exact heat/KP hierarchy calculus")]
struct Cli {
    /// key = value file supplying window defaults (flags take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel suites.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Text,
    Latex,
    Json,
}

impl From<EmitArg> for Format {
    fn from(e: EmitArg) -> Format {
        match e {
            EmitArg::Text => Format::Text,
            EmitArg::Latex => Format::Latex,
            EmitArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Clone, Default)]
struct WindowArgs {
    /// Highest 𝒯-degree M.
    #[arg(long)]
    m_max: Option<u32>,
    /// Highest z/j-index K.
    #[arg(long)]
    k_max: Option<u32>,
    /// Highest time index N.
    #[arg(long)]
    tmax: Option<u32>,
    /// Highest jet order P.
    #[arg(long)]
    jetmax: Option<u32>,
    /// Pseudo-differential tail depth.
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Weyl-algebra expressions and the structure table.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Operators acting on the jet ring.
    #[command(subcommand)]
    Jets(JetsCmd),
    /// The wave-function extension.
    #[command(subcommand)]
    Extend(ExtendCmd),
    /// Run a verification suite.
    Verify {
        /// heat-compat, symmetry, structure, extended-flatness, reduction,
        /// zero-curvature or dressing.
        suite: String,
        #[command(flatten)]
        window: WindowArgs,
        /// First flow of the zero-curvature pair.
        #[arg(long)]
        j: Option<u32>,
        /// Second flow of the zero-curvature pair.
        #[arg(long)]
        k: Option<u32>,
        /// Highest flow in the dressing suite.
        #[arg(long)]
        imax: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
    /// KP hierarchy computations.
    #[command(subcommand)]
    Kp(KpCmd),
}

#[derive(Subcommand)]
enum WeylCmd {
    /// Normal-order an expression such as `[D, z]` or `D^2 z^3`.
    Eval {
        expr: String,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
    /// Structure constants of the symmetry algebra up to a bound.
    Table {
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
}

#[derive(Subcommand)]
enum JetsCmd {
    /// Evaluate an expression such as `V(1,1)(p0)`.
    Eval {
        expr: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
}

#[derive(Subcommand)]
enum ExtendCmd {
    /// Print dt_0 … dt_K in the η-coframe.
    Wave {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
}

#[derive(Subcommand)]
enum KpCmd {
    /// Flow equations ∂_{t_j} v^a.
    Flows {
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
    /// The power L^j.
    Power {
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
    /// Zero-curvature residual for the pair (j, k).
    Zc {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
    /// g, g⁻¹ and L = g∂g⁻¹.
    Dress {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "text")]
        emit: EmitArg,
    },
    /// [L,S] = 1 and the flows of S = g𝒯g⁻¹ (𝒯 truncated at --tmax).
    SRelations {
        #[arg(long, default_value_t = 2)]
        imax: u32,
        #[command(flatten)]
        window: WindowArgs,
    },
}

/// Window defaults read from a config file.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    m_max: Option<u32>,
    k_max: Option<u32>,
    tmax: Option<u32>,
    jetmax: Option<u32>,
    depth: Option<u32>,
    jobs: Option<usize>,
}

fn read_config(path: &Path) -> Result<ConfigFile, Error> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&src).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Flags over config over defaults.
fn resolve(flags: &WindowArgs, config: &ConfigFile) -> SuiteWindow {
    let d = SuiteWindow::default();
    SuiteWindow {
        m_max: flags.m_max.or(config.m_max).unwrap_or(d.m_max),
        k_max: flags.k_max.or(config.k_max).unwrap_or(d.k_max),
        tmax: flags.tmax.or(config.tmax).unwrap_or(d.tmax),
        jetmax: flags.jetmax.or(config.jetmax).unwrap_or(d.jetmax),
        depth: flags.depth.or(config.depth).unwrap_or(d.depth),
        ..d
    }
}

struct Output {
    stdout: String,
    code: i32,
}

fn ok(stdout: String) -> Result<Output, Error> {
    Ok(Output { stdout, code: 0 })
}

fn terminated(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn run(cli: Cli) -> Result<Output, Error> {
    let config = match &cli.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    if let Some(n) = cli.jobs.or(config.jobs) {
        if n == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Weyl(WeylCmd::Eval { expr, emit }) => ok(parse_weyl(&expr)?.emit(emit.into())),
        Command::Weyl(WeylCmd::Table { bound, emit }) => {
            if bound == 0 {
                return Err(Error::InvalidArgument("--bound must be at least 1".into()));
            }
            ok(StructureTable::new(bound).emit(emit.into()))
        }
        Command::Jets(JetsCmd::Eval { expr, window, emit }) => {
            let w = resolve(&window, &config);
            let e = parse_jets(&expr, JetWindow::new(w.tmax, w.jetmax))?;
            ok(e.emit(emit.into()))
        }
        Command::Extend(ExtendCmd::Wave { window, emit }) => {
            let w = resolve(&window, &config);
            let mut wave = WaveWindow::new(w.m_max, w.k_max);
            if let Some(n) = window.tmax.or(config.tmax) {
                wave = wave.with_tmax(n);
            }
            ok(solve_wave_extension(wave)?.emit(emit.into()))
        }
        Command::Verify { suite, window, j, k, imax, emit } => {
            let name: SuiteName = suite.parse()?;
            let mut w = resolve(&window, &config);
            w.pair = match (j, k) {
                (Some(j), Some(k)) => Some((j, k)),
                (None, None) => None,
                _ => return Err(Error::InvalidArgument("--j and --k go together".into())),
            };
            if let Some(i) = imax {
                w.imax = i;
            }
            let report = run_suite(name, &w);
            eprintln!("{} finished in {:.3}s", report.suite, report.wall_time.as_secs_f64());
            Ok(Output {
                stdout: report.emit(emit.into()),
                code: report.exit_code(),
            })
        }
        Command::Kp(KpCmd::Flows { j, window, emit }) => {
            let w = resolve(&window, &config);
            ok(kp_flows(j, w.depth)?.emit(emit.into()))
        }
        Command::Kp(KpCmd::Power { j, window, emit }) => {
            let w = resolve(&window, &config);
            ok(l_power(j, w.depth)?.emit(emit.into()))
        }
        Command::Kp(KpCmd::Zc { j, k, window, emit }) => {
            let w = resolve(&window, &config);
            let res = zero_curvature_residual(j, k, w.depth)?;
            let code = if res.is_zero() { 0 } else { 1 };
            Ok(Output {
                stdout: res.emit(emit.into()),
                code,
            })
        }
        Command::Kp(KpCmd::Dress { window, emit }) => {
            let w = resolve(&window, &config);
            let d = dress(w.depth)?;
            let out = match Format::from(emit) {
                Format::Json => format!(
                    "{{\"g\":{},\"g_inv\":{},\"l\":{}}}",
                    d.g.json(),
                    d.g_inv.json(),
                    d.l.json()
                ),
                f => format!(
                    "g = {}\ng^-1 = {}\nL = {}",
                    d.g.emit(f),
                    d.g_inv.emit(f),
                    d.l.emit(f)
                ),
            };
            ok(out)
        }
        Command::Kp(KpCmd::SRelations { imax, window }) => {
            let w = resolve(&window, &config);
            let cells = verify_s_relations(imax, w.tmax, w.depth)?;
            ok(format!("{} coefficients checked, all zero", cells.len()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", terminated(out.stdout));
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
