//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mldr_core::bounds::{parse_rational, MessageProfile, RatePoint};

use crate::config::SystemConfigFile;
use crate::error::{HarnessError, Result};
use crate::report::{bounds_report, render_text, sweep_csv};
use crate::script::Script;
use crate::sharefile::{bytes_to_symbols, symbols_to_bytes, ShareFile};
use crate::sim::simulate;
use crate::steps::run_catalog;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "mldr", version, about = "Multilevel diversity coding with regeneration: codes, bounds, prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Outer bounds, corner points and optional feasibility of a point.
    Bounds(BoundsArgs),
    /// Encodes message files into one share file per node.
    Encode {
        #[arg(long)]
        config: PathBuf,
        /// `k=path`, one per nonempty level; file length must equal B_k.
        #[arg(long = "message", value_name = "K=PATH")]
        messages: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Recovers the level-k message from at least k share files.
    Decode {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
        shares: Vec<PathBuf>,
    },
    /// Rebuilds a lost node from d helper share files.
    Repair {
        #[arg(long)]
        target: usize,
        #[arg(long)]
        out: PathBuf,
        /// Checks the helpers against this configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        helpers: Vec<PathBuf>,
    },
    /// Seeded failure, repair and audit simulation.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        rounds: usize,
        /// Overrides the configuration seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Runs a proof script, shipped (`theorem_d2`, `zhang_yeung`) or from a file.
    Prove {
        script: String,
        #[arg(long)]
        certificates: bool,
        #[arg(long)]
        json: bool,
    },
    /// Checks every step of the derivation catalog for repair degree d.
    Catalog {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Normalized profile, e.g. `0,1/3,2/3`.
    #[arg(long, conflicts_with_all = ["sizes", "config"])]
    profile: Option<String>,
    /// Raw message sizes, e.g. `0,15,30`.
    #[arg(long, conflicts_with = "config")]
    sizes: Option<String>,
    /// Takes the sizes from a system configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Candidate `(alpha_bar, beta_bar)` as `a,b`.
    #[arg(long)]
    point: Option<String>,
    /// Writes a sweep of the storage line over beta_bar.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long)]
    json: bool,
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

fn parse_list(text: &str) -> Result<Vec<mldr_core::Rational>> {
    text.split(',').map(|s| parse_rational(s.trim()).map_err(HarnessError::from)).collect()
}

fn parse_sizes(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("bad size `{s}`"))))
        .collect()
}

fn json_line<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("plain data serializes"))?;
    Ok(())
}

fn read_share(path: &Path) -> Result<ShareFile> {
    ShareFile::from_bytes(&std::fs::read(path)?).map_err(|e| match e {
        HarnessError::Format(msg) => HarnessError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn read_shares(paths: &[PathBuf]) -> Result<Vec<ShareFile>> {
    let shares = paths.iter().map(|p| read_share(p)).collect::<Result<Vec<_>>>()?;
    if let Some(first) = shares.first() {
        if let Some(other) = shares.iter().find(|s| !first.same_system(s)) {
            return Err(HarnessError::Format(format!("node {} comes from a different system", other.node)));
        }
    }
    Ok(shares)
}

fn cmd_bounds(out: &mut dyn Write, args: BoundsArgs) -> Result<u8> {
    let BoundsArgs { profile, sizes, config, point, csv, steps, json } = args;
    let profile = match (profile, sizes, config) {
        (Some(p), _, _) => MessageProfile::new(parse_list(&p)?)?,
        (_, Some(s), _) => MessageProfile::from_sizes(&parse_sizes(&s)?)?,
        (_, _, Some(c)) => {
            let c = SystemConfigFile::load(&c)?;
            MessageProfile::from_sizes(&c.sizes.iter().map(|&b| b as u64).collect::<Vec<_>>())?
        }
        _ => return Err(usage("bounds needs --profile, --sizes or --config")),
    };
    let point = match point {
        Some(p) => match parse_list(&p)?.as_slice() {
            [a, b] => Some(RatePoint::new(a.clone(), b.clone())),
            _ => return Err(usage("--point takes two values `a,b`")),
        },
        None => None,
    };
    let report = bounds_report(&profile, point.as_ref());
    if let Some(path) = csv {
        std::fs::write(path, sweep_csv(&profile, steps))?;
    }
    if json {
        json_line(out, &report)?;
    } else {
        write!(out, "{}", render_text(&report))?;
    }
    Ok(EXIT_OK)
}

fn cmd_encode(out: &mut dyn Write, config: &Path, messages: &[String], dir: &Path) -> Result<u8> {
    let config = SystemConfigFile::load(config)?;
    let system = config.system()?;
    let field = system.config().field;
    let mut files: Vec<Option<PathBuf>> = vec![None; config.d];
    for m in messages {
        let (k, path) = m.split_once('=').ok_or_else(|| usage(format!("--message expects K=PATH, got `{m}`")))?;
        let k: usize = k.parse().map_err(|_| usage(format!("bad level `{k}`")))?;
        if !(1..=config.d).contains(&k) || files[k - 1].is_some() {
            return Err(usage(format!("level {k} is out of range or given twice")));
        }
        files[k - 1] = Some(PathBuf::from(path));
    }
    let mut symbols = Vec::with_capacity(config.d);
    for (k, (file, &size)) in files.iter().zip(&config.sizes).enumerate() {
        let bytes = match file {
            Some(p) => std::fs::read(p)?,
            None if size == 0 => Vec::new(),
            None => return Err(usage(format!("level {} needs a message of {size} bytes", k + 1))),
        };
        if bytes.len() != size {
            return Err(usage(format!("level {} message has {} bytes, configuration says {size}", k + 1, bytes.len())));
        }
        symbols.push(bytes_to_symbols(&field, &bytes)?);
    }
    std::fs::create_dir_all(dir)?;
    for share in system.encode(&symbols)? {
        let path = dir.join(format!("node_{}.share", share.node));
        std::fs::write(&path, ShareFile::from_share(&system, &share).to_bytes()?)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn cmd_decode(out: &mut dyn Write, level: usize, path: &Path, shares: &[PathBuf]) -> Result<u8> {
    let shares = read_shares(shares)?;
    let first = shares.first().ok_or(HarnessError::NotEnoughShares { need: level.max(1), got: 0 })?;
    if level == 0 || level > first.d {
        return Err(usage(format!("level must be in 1..={}", first.d)));
    }
    if shares.len() < level {
        return Err(HarnessError::NotEnoughShares { need: level, got: shares.len() });
    }
    let system = first.system()?;
    let picked: Vec<_> = shares[..level].iter().map(ShareFile::share).collect();
    let decoded = system.reconstruct(&picked)?;
    std::fs::write(path, symbols_to_bytes(&decoded[level - 1])?)?;
    writeln!(out, "level {level}: {} bytes to {}", decoded[level - 1].len(), path.display())?;
    Ok(EXIT_OK)
}

fn cmd_repair(out: &mut dyn Write, target: usize, path: &Path, config: Option<PathBuf>, helpers: &[PathBuf]) -> Result<u8> {
    let helpers = read_shares(helpers)?;
    let first = helpers.first().ok_or(HarnessError::NotEnoughShares { need: 1, got: 0 })?;
    if helpers.len() < first.d {
        return Err(HarnessError::NotEnoughShares { need: first.d, got: helpers.len() });
    }
    let system = first.system()?;
    if let Some(c) = config {
        let expected = SystemConfigFile::load(&c)?.system()?;
        if expected.layouts() != system.layouts() || expected.config().n != first.n {
            return Err(HarnessError::Format("helper shares do not match the configuration".into()));
        }
    }
    let picked: Vec<_> = helpers[..first.d].iter().map(ShareFile::share).collect();
    let rebuilt = system.regenerate_node(target, &picked)?;
    std::fs::write(path, ShareFile::from_share(&system, &rebuilt).to_bytes()?)?;
    writeln!(out, "node {target} rebuilt from {} helpers to {}", first.d, path.display())?;
    Ok(EXIT_OK)
}

fn cmd_simulate(out: &mut dyn Write, config: &Path, rounds: usize, seed: Option<u64>, json: bool) -> Result<u8> {
    let config = SystemConfigFile::load(config)?;
    let report = simulate(&config, rounds, seed.unwrap_or(config.seed))?;
    if json {
        json_line(out, &report)?;
    } else {
        writeln!(out, "{} rounds, seed {}: {} repairs, {} audits passed", report.rounds, report.seed, report.events.len(), report.audits.len())?;
        writeln!(out, "per node {} symbols, per helper {} symbols", report.alpha_total, report.beta_total)?;
        writeln!(out, "empirical point ({}, {})", report.empirical.alpha_bar, report.empirical.beta_bar)?;
        let verdict = if report.feasible { "feasible" } else { "infeasible" };
        writeln!(out, "{verdict}: floor slack {}, line slack {}", report.beta_slack, report.line_slack)?;
    }
    Ok(if report.feasible { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_prove(out: &mut dyn Write, script: &str, certificates: bool, json: bool) -> Result<u8> {
    let report = Script::load(script)?.run(certificates)?;
    if json {
        json_line(out, &report)?;
    } else {
        writeln!(out, "{}: {} columns, {} rows", report.name, report.columns, report.rows)?;
        for q in &report.queries {
            let mark = if q.as_expected { "ok" } else { "UNEXPECTED" };
            writeln!(out, "{}: {} (expected {}, lp {:.3e}) {mark}", q.name, q.verdict.status, q.expect, q.verdict.lp_value)?;
            writeln!(out, "  {}", q.verdict.claim)?;
            for line in q.verdict.certificate.iter().flatten() {
                writeln!(out, "    {line}")?;
            }
        }
    }
    Ok(if report.failed() { EXIT_VERIFY } else { EXIT_OK })
}

fn cmd_catalog(out: &mut dyn Write, d: usize, json: bool) -> Result<u8> {
    let report = run_catalog(d)?;
    if json {
        json_line(out, &report)?;
    } else {
        for s in &report.steps {
            let mark = if s.as_expected() { "ok" } else { "UNEXPECTED" };
            writeln!(out, "{} [{}] {mark}: {}", s.name, s.kind, s.detail)?;
        }
        for i in &report.identities {
            writeln!(out, "{} {}: {} vs {}", i.name, if i.holds { "ok" } else { "UNEXPECTED" }, i.lhs, i.rhs)?;
        }
        let bad = report.steps.iter().filter(|s| !s.as_expected()).count();
        writeln!(out, "{} steps, {} identities, {bad} unexpected", report.steps.len(), report.identities.len())?;
    }
    Ok(if report.all_as_expected() { EXIT_OK } else { EXIT_VERIFY })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Bounds(args) => cmd_bounds(out, args),
        Command::Encode { config, messages, out: dir } => cmd_encode(out, &config, &messages, &dir),
        Command::Decode { level, out: path, shares } => cmd_decode(out, level, &path, &shares),
        Command::Repair { target, out: path, config, helpers } => cmd_repair(out, target, &path, config, &helpers),
        Command::Simulate { config, rounds, seed, json } => cmd_simulate(out, &config, rounds, seed, json),
        Command::Prove { script, certificates, json } => cmd_prove(out, &script, certificates, json),
        Command::Catalog { d, json } => cmd_catalog(out, d, json),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                HarnessError::SimulationFault(_) | HarnessError::Solver(_) => EXIT_VERIFY,
                _ => EXIT_USAGE,
            }
        }
    }
}
