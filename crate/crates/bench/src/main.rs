use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dynmatch::coins::replicate_seeds;
use dynmatch::format::{parse_instance, write_instance};
use dynmatch::generators::GeneratorSpec;
use dynmatch::oracle::{offline_opt, EXHAUSTIVE_LIMIT};
use dynmatch::{Algorithm, DynamicInstance};
use dynmatch_bench::{run_experiment, BenchConfig};

#[derive(Parser)]
#[command(name = "dynmatch", about = "Online matching in dynamic markets", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[arg(long)]
        family: String,
        /// Generator parameters as key=value; may be repeated.
        #[arg(long = "param", short = 'p')]
        params: Vec<String>,
        /// Positional key=value parameters.
        rest: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an algorithm on an instance for several seeds.
    Run {
        #[arg(long)]
        algo: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the audits and certificate checks; exits nonzero on failure.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        algo: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment described by a TOML config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

type CliResult = Result<ExitCode, String>;

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn load(path: &Path) -> Result<DynamicInstance<f64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn gen(family: &str, params: &[String], out: Option<&Path>) -> CliResult {
    let pairs: Vec<(&str, &str)> = params
        .iter()
        .map(|p| p.split_once('=').ok_or_else(|| format!("expected key=value, got {p:?}")))
        .collect::<Result<_, _>>()?;
    let spec = GeneratorSpec::parse(family, pairs).map_err(|e| e.to_string())?;
    let inst = spec.generate().map_err(|e| e.to_string())?;
    let mut w = output(out)?;
    w.write_all(write_instance(&inst).as_bytes()).map_err(|e| e.to_string())?;
    w.flush().map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn run(algo: &str, instance: &Path, seed: u64, reps: usize, out: Option<&Path>) -> CliResult {
    let algo: Algorithm = algo.parse().map_err(|e: dynmatch::algorithms::AlgorithmError| e.to_string())?;
    let inst = load(instance)?;
    let exact_opt = inst.horizon() <= EXHAUSTIVE_LIMIT || inst.roles().is_some();
    let mut w = output(out)?;
    let io = |e: io::Error| e.to_string();
    writeln!(w, "rep\tseed\talgorithm\tvalue\topt\tratio\tmatched_fraction\taudits").map_err(io)?;
    let seeds = if reps == 1 { vec![seed] } else { replicate_seeds(seed, reps) };
    for (rep, s) in seeds.into_iter().enumerate() {
        let result = algo.run(&inst, s).map_err(|e| e.to_string())?;
        let opt = exact_opt.then(|| offline_opt(&inst, &result.deadlines).value);
        let ratio = opt.map(|o| if o > 0.0 { result.total_value / o } else { 1.0 });
        let show = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
        writeln!(
            w,
            "{rep}\t{s}\t{algo}\t{}\t{}\t{}\t{:.6}\t{}",
            result.total_value,
            show(opt),
            show(ratio),
            result.matched_fraction(),
            if result.audits_pass() { "pass" } else { "fail" }
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(instance: &Path, algo: &str, seed: u64) -> CliResult {
    let algo: Algorithm = algo.parse().map_err(|e: dynmatch::algorithms::AlgorithmError| e.to_string())?;
    let inst = load(instance)?;
    let result = algo.run(&inst, seed).map_err(|e| e.to_string())?;
    for rec in &result.audit {
        println!("{rec}");
    }
    println!("total value {}", result.total_value);
    if result.audits_pass() {
        println!("all {} checks passed", result.audit.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{} checks failed", result.failures().count());
        Ok(ExitCode::FAILURE)
    }
}

fn bench(config: &Path) -> CliResult {
    let cfg = BenchConfig::load(config).map_err(|e| format!("{}: {e}", config.display()))?;
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let io = |e: io::Error| e.to_string();
    if let Some(p) = &cfg.output.detail {
        report.write_detail(output(Some(p))?).map_err(io)?;
    }
    report.write_summary(output(cfg.output.summary.as_deref())?).map_err(io)?;
    let failures: usize = report.summary.iter().map(|s| s.audit_failures).sum();
    if failures > 0 {
        eprintln!("{failures} runs failed their audits");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen {
            family,
            params,
            rest,
            out,
        } => {
            let all: Vec<String> = params.iter().chain(rest).cloned().collect();
            gen(family, &all, out.as_deref())
        }
        Command::Run {
            algo,
            instance,
            seed,
            reps,
            out,
        } => run(algo, instance, *seed, *reps, out.as_deref()),
        Command::Verify { instance, algo, seed } => verify(instance, algo, *seed),
        Command::Bench { config } => bench(config),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
