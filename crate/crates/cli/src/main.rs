mod experiment;
mod state_spec;

use std::f64::consts::{PI, TAU};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magicast::cloners::{bh_sweep, eta_max, wz_output_for_input, BhParams, SweepPoint, WzParams};
use magicast::magic::{rom_qubit, MagicReport};
use magicast::optimize::{Objective, OptimizerConfig};
use magicast::qstate::{basis_angles, bloch_from_density, BlochVector, PureState};
use magicast::stabkit::{broadcast_geometry_certificate, BroadcastCertificate};
use magicast::verify::{geometry_disagrees, random_geometry_instance, run_suite, GeometryInstance, Suite};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use state_spec::{amps_of, parse_bloch, parse_state};

/// Version tag carried by every JSON document.
pub const SCHEMA: u32 = 1;

const CSV_HELP: &str = "\
CSV output has the fixed header `theta,zeta,input_magic,output_magic,ratio`.
theta and zeta are the input's angles in the machine's basis (the reference
basis for wz, the computational basis for bh); the magic columns are
robustness values clipped at 1 and ratio = output_magic / input_magic.
Floats are written with 17 significant digits.";

const STATE_HELP: &str = "\
STATE is a name (T, Tperp, H, 0, 1, +, -, +i, -i, plus, minus, ...),
an angle pair `theta,zeta[,basis=T|computational]` (default computational),
or raw amplitudes `amps:a0,a1[,a2,a3]` with complex entries like 0.3+0.4i.";

#[derive(Debug, Parser)]
#[command(name = "magicast", version, about = "Magic monotones, cloning machines and broadcasting experiments")]
struct Cli {
    /// RNG seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit JSON instead of text or CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Output file (for `experiment`, the output directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON optimizer config for `experiment`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Witness D, robustness R, M2 and the extended M2 of one state.
    #[command(after_help = STATE_HELP)]
    Magic {
        #[arg(allow_hyphen_values = true)]
        state: String,
    },
    /// Output magic of a Wootters-Zurek or Buzek-Hillery cloner.
    #[command(after_help = format!("{CSV_HELP}\n\n{STATE_HELP}"))]
    Clone(CloneArgs),
    /// Run a property suite; exits 1 when it fails.
    Verify {
        /// lemma1, clifford, additivity, convexity, theorem2, theorem3,
        /// geometry, monotone or faithfulness.
        suite: String,
        /// Sample count (suite default when omitted).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Batch of broadcasting optimizations on Haar-random inputs; resumable.
    Experiment {
        /// magic or state.
        objective: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Equal-ratio certificate for two output lines.
    Geometry(GeometryArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Machine {
    Wz,
    Bh,
}

#[derive(Debug, Args)]
struct CloneArgs {
    machine: Machine,
    /// wz reference angle (default: the T reference).
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// wz reference phase (default pi/4).
    #[arg(long, allow_hyphen_values = true)]
    gamma_prime: Option<f64>,
    /// bh parameter xi in [0, 1/2] (default 1/6).
    #[arg(long)]
    xi: Option<f64>,
    /// bh parameter eta (default: the largest allowed for xi).
    #[arg(long)]
    eta: Option<f64>,
    /// Single input state.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
    input: Option<String>,
    /// Sweep grid `NxM`: N thetas over [0, pi], M zetas over [0, 2pi).
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct GeometryArgs {
    /// System line start `x,y,z`.
    #[arg(long, allow_hyphen_values = true, requires_all = ["sys1", "aux0", "aux1"])]
    sys0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sys1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    aux0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    aux1: Option<String>,
    /// Target robustness level r >= 1.
    #[arg(long)]
    level: Option<f64>,
    /// Both lines run from T to T_perp.
    #[arg(long, conflicts_with_all = ["sys0", "random"])]
    t_type: bool,
    /// Draw an instance from --seed and cross-check it with a dense scan.
    #[arg(long, conflicts_with = "sys0")]
    random: bool,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input; exit code 2.
    Usage(String),
    /// A check failed or the run could not complete; exit code 1.
    Failure(String),
}

impl From<magicast::Error> for CliError {
    fn from(e: magicast::Error) -> Self {
        match e {
            magicast::Error::Internal(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema: u32,
    #[serde(flatten)]
    body: T,
}

fn versioned<T: Serialize>(body: T) -> String {
    serde_json::to_string_pretty(&Versioned { schema: SCHEMA, body }).expect("serializable") + "\n"
}

/// 17 significant digits.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Failure(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Failure(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(pass)`.
fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Magic { state } => cmd_magic(state, cli.json, out),
        Command::Clone(args) => cmd_clone(args, cli.json, out),
        Command::Verify { suite, samples } => cmd_verify(suite, *samples, cli.seed.unwrap_or(0), cli.json, out),
        Command::Experiment { objective, samples } => {
            cmd_experiment(objective, *samples, cli.seed, cli.config.as_deref(), cli.json, out)
        }
        Command::Geometry(args) => cmd_geometry(args, cli.seed.unwrap_or(0), cli.json, out),
    }
}

#[derive(Serialize)]
struct MagicOutput<'a> {
    state: &'a str,
    amps: Vec<[f64; 2]>,
    bloch: Option<BlochVector>,
    #[serde(flatten)]
    report: MagicReport,
}

fn cmd_magic(spec: &str, json: bool, out: Option<&Path>) -> Result<bool, CliError> {
    let psi = parse_state(spec).map_err(CliError::Usage)?;
    let report = MagicReport::for_pure(&psi)?;
    let bloch = if psi.dim() == 2 { Some(bloch_from_density(&psi.density())?) } else { None };
    let text = if json {
        versioned(MagicOutput { state: spec, amps: amps_of(&psi), bloch, report })
    } else {
        let mut s = format!("state: {spec}\nqubits: {}\n", report.n);
        if let Some(b) = bloch {
            let [x, y, z] = b.components();
            s += &format!("bloch: {x:.12} {y:.12} {z:.12}\n");
        }
        s += &format!("D: {:.12}\n", report.d);
        if let Some(r) = report.rom {
            s += &format!("R: {r:.12}\n");
        }
        if let Some(m) = report.sre2 {
            s += &format!("M2: {m:.12}\n");
        }
        s += &format!("M2_extended: {:.12}\n", report.extended_sre2);
        s
    };
    emit(out, &text)?;
    Ok(true)
}

#[derive(Serialize)]
#[serde(tag = "machine", rename_all = "lowercase")]
enum MachineParams {
    Wz { gamma: f64, gamma_prime: f64, reference_magic: f64 },
    Bh { xi: f64, eta: f64 },
}

#[derive(Serialize)]
struct CloneOutput {
    #[serde(flatten)]
    params: MachineParams,
    points: Vec<SweepPoint>,
}

fn parse_grid(s: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let bad = || CliError::Usage(format!("grid must look like 50x72, got '{s}'"));
    let (n, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    if n == 0 || m == 0 {
        return Err(bad());
    }
    let thetas = if n == 1 { vec![0.0] } else { (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect() };
    let zetas = (0..m).map(|j| TAU * j as f64 / m as f64).collect();
    Ok((thetas, zetas))
}

fn qubit_input(spec: &str) -> Result<PureState, CliError> {
    let psi = parse_state(spec).map_err(CliError::Usage)?;
    if psi.dim() != 2 {
        return Err(CliError::Usage("cloners take single-qubit inputs".into()));
    }
    Ok(psi)
}

fn cmd_clone(args: &CloneArgs, json: bool, out: Option<&Path>) -> Result<bool, CliError> {
    if args.input.is_none() && args.grid.is_none() {
        return Err(CliError::Usage("give --input STATE or --grid NxM".into()));
    }
    let (params, points) = match args.machine {
        Machine::Wz => {
            if args.xi.is_some() || args.eta.is_some() {
                return Err(CliError::Usage("--xi/--eta belong to bh".into()));
            }
            let t = WzParams::t_reference();
            let p = WzParams::new(args.gamma.unwrap_or(t.gamma), args.gamma_prime.unwrap_or(t.gamma_prime))?;
            let points = match (&args.input, &args.grid) {
                (Some(spec), _) => {
                    let psi = qubit_input(spec)?;
                    let (theta, zeta) = basis_angles(&psi, &p.reference_state(), &p.reference_perp())?;
                    let input_magic = rom_qubit(&psi.density())?;
                    let output_magic = rom_qubit(&wz_output_for_input(&p, &psi)?)?;
                    vec![SweepPoint { theta, zeta, input_magic, output_magic, ratio: output_magic / input_magic }]
                }
                (None, Some(g)) => {
                    let (thetas, zetas) = parse_grid(g)?;
                    magicast::cloners::wz_sweep(&p, &thetas, &zetas)
                }
                (None, None) => unreachable!(),
            };
            let params =
                MachineParams::Wz { gamma: p.gamma, gamma_prime: p.gamma_prime, reference_magic: p.reference_magic() };
            (params, points)
        }
        Machine::Bh => {
            if args.gamma.is_some() || args.gamma_prime.is_some() {
                return Err(CliError::Usage("--gamma/--gamma-prime belong to wz".into()));
            }
            let xi = args.xi.unwrap_or(1.0 / 6.0);
            let p = BhParams::new(xi, args.eta.unwrap_or_else(|| eta_max(xi)))?;
            let (thetas, zetas) = match (&args.input, &args.grid) {
                (Some(spec), _) => {
                    let psi = qubit_input(spec)?;
                    let (zero, one) = (PureState::basis(2, 0)?, PureState::basis(2, 1)?);
                    let (theta, zeta) = basis_angles(&psi, &zero, &one)?;
                    (vec![theta], vec![zeta])
                }
                (None, Some(g)) => parse_grid(g)?,
                (None, None) => unreachable!(),
            };
            (MachineParams::Bh { xi: p.xi(), eta: p.eta() }, bh_sweep(&p, &thetas, &zetas))
        }
    };
    let text = if json {
        versioned(CloneOutput { params, points })
    } else {
        let mut w = csv::Writer::from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>, rec: &[String]| {
            w.write_record(rec).map_err(|e| CliError::Failure(e.to_string()))
        };
        write(&mut w, &["theta", "zeta", "input_magic", "output_magic", "ratio"].map(String::from))?;
        for p in &points {
            write(&mut w, &[p.theta, p.zeta, p.input_magic, p.output_magic, p.ratio].map(fmt17))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
        String::from_utf8(bytes).expect("ascii")
    };
    emit(out, &text)?;
    Ok(true)
}

fn cmd_verify(suite: &str, samples: Option<usize>, seed: u64, json: bool, out: Option<&Path>) -> Result<bool, CliError> {
    let suite = Suite::from_str(suite)?;
    let report = run_suite(suite, samples.unwrap_or_else(|| suite.default_samples()), seed)?;
    let pass = report.pass;
    let text = if json {
        versioned(report)
    } else {
        format!(
            "{} {}\nsamples: {}\ntolerance: {:e}\nmax_violation: {:e}\nseed: {}\nruntime_ms: {}\n{}\n",
            if pass { "PASS" } else { "FAIL" },
            report.check_name,
            report.samples,
            report.tolerance,
            report.max_violation,
            report.seed,
            report.runtime_ms,
            report.detail
        )
    };
    emit(out, &text)?;
    Ok(pass)
}

fn cmd_experiment(
    objective: &str,
    samples: usize,
    seed: Option<u64>,
    config: Option<&Path>,
    json: bool,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    let objective = Objective::from_str(objective)?;
    let mut cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<OptimizerConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => OptimizerConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let default_dir = PathBuf::from(format!("experiment-{}", if objective == Objective::Magic { "magic" } else { "state" }));
    let dir = out.map(Path::to_path_buf).unwrap_or(default_dir);
    let summary = experiment::run(&dir, objective, samples, &cfg)?;
    let text = if json {
        serde_json::to_string_pretty(&summary).expect("serializable") + "\n"
    } else {
        format!(
            "objective: {}\nsamples: {}\nconverged: {} ({:.1}%)\nmean_fidelity: {:.6}\nmin_fidelity: {:.6}\n\
             mean_overlap: {:.6}\nmean_magic_power: {:.6}\nresumed_from: {}\noutput: {}\n",
            if objective == Objective::Magic { "magic" } else { "state" },
            summary.n_samples,
            summary.n_converged,
            100.0 * summary.convergence_rate,
            summary.mean_fidelity,
            summary.min_fidelity,
            summary.mean_overlap,
            summary.mean_magic_power,
            summary.resumed_from,
            dir.display()
        )
    };
    emit(None, &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct GeometryOutput {
    sys: [BlochVector; 2],
    aux: [BlochVector; 2],
    #[serde(flatten)]
    certificate: BroadcastCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan_agrees: Option<bool>,
}

fn cmd_geometry(args: &GeometryArgs, seed: u64, json: bool, out: Option<&Path>) -> Result<bool, CliError> {
    let inst = if args.random {
        let mut inst = random_geometry_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        if let Some(r) = args.level {
            inst.level = r;
        }
        inst
    } else {
        let level = args.level.ok_or_else(|| CliError::Usage("--level is required".into()))?;
        let (sys, aux) = if args.t_type {
            let t = bloch_from_density(&magicast::qstate::t_state().density())?;
            ([t, -t], [t, -t])
        } else {
            let get = |v: &Option<String>, name: &str| {
                let s = v.as_deref().ok_or_else(|| CliError::Usage(format!("--{name} is required")))?;
                parse_bloch(s).map_err(CliError::Usage)
            };
            (
                [get(&args.sys0, "sys0")?, get(&args.sys1, "sys1")?],
                [get(&args.aux0, "aux0")?, get(&args.aux1, "aux1")?],
            )
        };
        GeometryInstance { sys, aux, level }
    };
    let certificate = broadcast_geometry_certificate(&inst.sys[0], &inst.sys[1], &inst.aux[0], &inst.aux[1], inst.level)?;
    let scan_agrees = if args.random { Some(!geometry_disagrees(&inst, 10_000)?) } else { None };
    let pass = scan_agrees.unwrap_or(true);
    let text = if json {
        versioned(GeometryOutput { sys: inst.sys, aux: inst.aux, certificate, scan_agrees })
    } else {
        let list = |v: &[f64]| v.iter().map(|t| format!("{t:.12}")).collect::<Vec<_>>().join(" ");
        let mut s = format!(
            "level: {}\nreference_level: {:.12}\nbroadcastable: {}\ncommon_t: {}\nsystem_t: {}\nauxiliary_t: {}\n",
            certificate.level,
            certificate.reference_level,
            certificate.broadcastable,
            list(&certificate.common_t),
            list(&certificate.system_t),
            list(&certificate.auxiliary_t)
        );
        if let Some(a) = scan_agrees {
            s += &format!("scan_agrees: {a}\n");
        }
        s
    };
    emit(out, &text)?;
    Ok(pass)
}
