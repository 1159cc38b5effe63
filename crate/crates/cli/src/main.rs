//! `polylp`: generate LDPC codes, decode LLR vectors, debug parity-polytope
//! projections and run error-rate sweeps.

mod config;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use polylp::format::format_g;
use polylp::simulator::{sweep, write_csv, Stopping};
use polylp::{
    gen_regular_ldpc, read_alist, AdmmConfig, BpConfig, ChannelModel, Decoder, DualAscentConfig,
    LlrVector, ParityCheckMatrix, ProjectionWorkspace,
};
use serde_json::json;

use config::ConfigFile;

#[derive(Parser, Debug)]
#[command(name = "polylp", version, about = "LP decoding of LDPC codes by ADMM")]
struct Cli {
    /// Flat `key = value` file supplying defaults for any long flag.
    /// Flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random (dv, dc)-regular LDPC code in alist format.
    GenCode(GenCodeArgs),
    /// Decode LLR vectors, printing one JSON object per vector.
    Decode(DecodeArgs),
    /// Project a vector read from stdin onto the parity polytope.
    Project,
    /// Estimate word and bit error rates over a sweep of channel points.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct GenCodeArgs {
    /// Block length N.
    #[arg(long)]
    n: Option<usize>,
    /// Variable degree.
    #[arg(long)]
    dv: Option<usize>,
    /// Check degree.
    #[arg(long)]
    dc: Option<usize>,
    /// Generator seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algo {
    Admm,
    Bp,
    DualAscent,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ChannelKind {
    Bsc,
    Awgn,
}

#[derive(Args, Debug)]
struct DecoderArgs {
    /// Decoding algorithm [default: admm]
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    /// ADMM penalty mu [default: 3]
    #[arg(long)]
    mu: Option<f64>,
    /// Stopping tolerance epsilon (ADMM, dual ascent) [default: 1e-5]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Maximum number of iterations [default: 1000]
    #[arg(long)]
    tmax: Option<usize>,
    /// ADMM over-relaxation rho in [1, 2) [default: 1.9]
    #[arg(long)]
    rho: Option<f64>,
    /// BP message saturation in nats [default: 30]
    #[arg(long)]
    llr_clip: Option<f64>,
    /// Dual-ascent step size [default: 0.1]
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct DecodeArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    code: Option<PathBuf>,
    /// LLR file (one vector per line) or an inline vector such as
    /// "1.2,-0.4,2.0". Positive values favour bit 0.
    #[arg(long, allow_hyphen_values = true)]
    llr: Option<String>,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Output path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Channel model [default: bsc]
    #[arg(long, value_enum)]
    channel: Option<ChannelKind>,
    /// Comma-separated channel points: crossover probabilities for bsc,
    /// Eb/N0 in dB for awgn.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    points: Option<Vec<f64>>,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Trials per point [default: 1000]
    #[arg(long, conflicts_with = "target_errors")]
    trials: Option<usize>,
    /// Stop each point after this many word errors (see --max-trials).
    #[arg(long)]
    target_errors: Option<usize>,
    /// Trial ceiling per point with --target-errors [default: 1000000]
    #[arg(long)]
    max_trials: Option<usize>,
    /// Master seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads [default: available parallelism]
    #[arg(long, env = "POLYLP_WORKERS")]
    workers: Option<usize>,
    /// Fill the wall-time columns (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    /// Output path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes 1 and 2.
enum Failure {
    Usage { subcommand: &'static str, msg: String },
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(subcommand: &'static str, msg: impl Into<String>) -> Failure {
    Failure::Usage {
        subcommand,
        msg: msg.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage { subcommand, msg }) => {
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(subcommand)
                .map(|c| c.render_usage().to_string())
                .unwrap_or_default();
            eprintln!("error: {msg}\n\n{usage}\n\nFor more information, try 'polylp {subcommand} --help'.");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::GenCode(args) => gen_code(args, &config),
        Command::Decode(args) => decode(args, &config),
        Command::Project => project(),
        Command::Simulate(args) => simulate(args, &config),
    }
}

/// Resolves a flag: command line, then config file, then `default`.
fn resolve<T: std::str::FromStr>(
    sub: &'static str,
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
    default: Option<T>,
) -> CliResult<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(raw) = config.get(key) {
        return raw
            .parse()
            .map_err(|_| usage(sub, format!("config key '{key}': invalid value '{raw}'")));
    }
    default.ok_or_else(|| usage(sub, format!("missing required flag --{key}")))
}

fn open_output(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("cannot create '{}'", path.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn read_code(path: &Path) -> anyhow::Result<ParityCheckMatrix> {
    read_alist(path).map_err(|e| match e {
        polylp::Error::Io { .. } => anyhow::Error::from(e),
        e => anyhow::Error::from(e).context(format!("invalid code file '{}'", path.display())),
    })
}

fn gen_code(args: GenCodeArgs, config: &ConfigFile) -> CliResult<()> {
    const SUB: &str = "gen-code";
    let n = resolve(SUB, args.n, config, "n", None)?;
    let dv = resolve(SUB, args.dv, config, "dv", None)?;
    let dc = resolve(SUB, args.dc, config, "dc", None)?;
    let seed = resolve(SUB, args.seed, config, "seed", Some(0))?;
    if n == 0 || dv == 0 || dc == 0 || (n * dv) % dc != 0 || dc > n {
        return Err(usage(
            SUB,
            format!("no ({dv},{dc})-regular code of length {n}: need positive values, dc <= n and dc dividing n*dv"),
        ));
    }
    let code = gen_regular_ldpc(n, dv, dc, seed).map_err(anyhow::Error::from)?;
    let mut out = open_output(&args.out)?;
    out.write_all(code.to_alist().as_bytes()).context("writing alist")?;
    out.flush().context("writing alist")?;
    Ok(())
}

fn build_decoder(sub: &'static str, args: &DecoderArgs, config: &ConfigFile) -> CliResult<Box<dyn Decoder>> {
    let algo = match args.algo {
        Some(a) => a,
        None => match config.get("algo") {
            Some(raw) => Algo::from_str(raw, true)
                .map_err(|_| usage(sub, format!("config key 'algo': invalid value '{raw}'")))?,
            None => Algo::Admm,
        },
    };
    let admm = AdmmConfig::default();
    let t_max = resolve(sub, args.tmax, config, "tmax", Some(admm.t_max))?;
    let decoder: Box<dyn Decoder> = match algo {
        Algo::Admm => {
            let c = AdmmConfig {
                mu: resolve(sub, args.mu, config, "mu", Some(admm.mu))?,
                epsilon: resolve(sub, args.epsilon, config, "epsilon", Some(admm.epsilon))?,
                t_max,
                rho: resolve(sub, args.rho, config, "rho", Some(admm.rho))?,
            };
            c.validate().map_err(|e| usage(sub, e.to_string()))?;
            Box::new(c)
        }
        Algo::Bp => {
            let c = BpConfig {
                t_max,
                llr_clip: resolve(sub, args.llr_clip, config, "llr-clip", Some(BpConfig::default().llr_clip))?,
                ..BpConfig::default()
            };
            c.validate().map_err(|e| usage(sub, e.to_string()))?;
            Box::new(c)
        }
        Algo::DualAscent => {
            let d = DualAscentConfig::default();
            let c = DualAscentConfig {
                step: resolve(sub, args.step, config, "step", Some(d.step))?,
                t_max,
                epsilon: resolve(sub, args.epsilon, config, "epsilon", Some(d.epsilon))?,
            };
            c.validate().map_err(|e| usage(sub, e.to_string()))?;
            Box::new(c)
        }
    };
    Ok(decoder)
}

fn parse_vector(text: &str) -> Option<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().ok())
        .collect()
}

/// Reads LLR vectors from a file (one per non-blank line) or, when no such
/// file exists, parses `source` itself as a single vector.
fn read_llrs(source: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    let path = Path::new(source);
    if !path.exists() {
        return match parse_vector(source) {
            Some(v) if !v.is_empty() => Ok(vec![v]),
            _ => Err(anyhow!("cannot read LLR file '{source}': no such file")),
        };
    }
    let text = fs::read_to_string(path).with_context(|| format!("cannot read LLR file '{source}'"))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| parse_vector(l).ok_or_else(|| anyhow!("{source}:{}: expected numbers", k + 1)))
        .collect()
}

fn decode(args: DecodeArgs, config: &ConfigFile) -> CliResult<()> {
    const SUB: &str = "decode";
    let code_path: PathBuf = resolve(SUB, args.code, config, "code", None)?;
    let llr_source: String = resolve(SUB, args.llr, config, "llr", None)?;
    let decoder = build_decoder(SUB, &args.decoder, config)?;
    let code = read_code(&code_path)?;
    let vectors = read_llrs(&llr_source)?;
    let mut out = open_output(&args.out)?;
    for gamma in vectors {
        let gamma = LlrVector::new(gamma).map_err(anyhow::Error::from)?;
        let result = decoder.decode(&gamma, &code).map_err(anyhow::Error::from)?;
        let line = json!({
            "x": result.x,
            "status": result.status.as_str(),
            "iterations": result.iterations,
            "integral": result.integral,
            "hard_decision": result.hard_decision,
            "ml_certificate": result.ml_certificate,
        });
        writeln!(out, "{line}").context("writing output")?;
    }
    out.flush().context("writing output")?;
    Ok(())
}

fn project() -> CliResult<()> {
    let mut input = String::new();
    io::stdin().read_to_string(&mut input).context("reading stdin")?;
    let u = parse_vector(&input).ok_or_else(|| anyhow!("stdin: expected whitespace-separated numbers"))?;
    let p = ProjectionWorkspace::new().project(&u).map_err(anyhow::Error::from)?;
    let z: Vec<String> = p.z.iter().map(|&x| format_g(x, 12)).collect();
    println!("z {}", z.join(" "));
    println!("beta_opt {}", format_g(p.beta_opt, 12));
    println!("r {}", p.r);
    Ok(())
}

fn simulate(args: SimulateArgs, config: &ConfigFile) -> CliResult<()> {
    const SUB: &str = "simulate";
    let code_path: PathBuf = resolve(SUB, args.code, config, "code", None)?;
    let kind = match args.channel {
        Some(k) => k,
        None => match config.get("channel") {
            Some(raw) => ChannelKind::from_str(raw, true)
                .map_err(|_| usage(SUB, format!("config key 'channel': invalid value '{raw}'")))?,
            None => ChannelKind::Bsc,
        },
    };
    let points = match args.points {
        Some(p) => p,
        None => match config.get("points") {
            Some(raw) => parse_vector(raw)
                .ok_or_else(|| usage(SUB, format!("config key 'points': invalid value '{raw}'")))?,
            None => return Err(usage(SUB, "missing required flag --points")),
        },
    };
    let decoder = build_decoder(SUB, &args.decoder, config)?;
    let stopping = match resolve(SUB, args.target_errors, config, "target-errors", Some(0))? {
        0 => Stopping::Trials(resolve(SUB, args.trials, config, "trials", Some(1000))?),
        target => Stopping::TargetErrors {
            target,
            max_trials: resolve(SUB, args.max_trials, config, "max-trials", Some(1_000_000))?,
        },
    };
    if stopping == Stopping::Trials(0) {
        return Err(usage(SUB, "--trials must be at least 1"));
    }
    if matches!(stopping, Stopping::TargetErrors { max_trials: 0, .. }) {
        return Err(usage(SUB, "--max-trials must be at least 1"));
    }
    let seed = resolve(SUB, args.seed, config, "seed", Some(0))?;
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = resolve(SUB, args.workers, config, "workers", Some(default_workers))?;
    if workers == 0 {
        return Err(usage(SUB, "--workers must be at least 1"));
    }
    let timing = args.timing || config.get("timing").is_some_and(|v| v == "true");

    let code = read_code(&code_path)?;
    let channels = points
        .iter()
        .map(|&x| match kind {
            ChannelKind::Bsc => ChannelModel::bsc(x),
            ChannelKind::Awgn => ChannelModel::awgn(x, code.rate()),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(SUB, e.to_string()))?;
    let stats = sweep(&code, &channels, decoder.as_ref(), stopping, seed, workers).map_err(anyhow::Error::from)?;
    let mut out = open_output(&args.out)?;
    write_csv(&stats, &mut out, timing).context("writing CSV")?;
    out.flush().context("writing CSV")?;
    if args.out.is_some() {
        for s in &stats {
            eprintln!(
                "{} {}={}: wer {} ber {} ({} trials)",
                s.decoder_id,
                s.channel.kind(),
                format_g(s.channel.param(), 6),
                format_g(s.wer(), 6),
                format_g(s.ber(), 6),
                s.trials
            );
        }
    }
    Ok(())
}
