use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use ergm::experiments::{
    diag, metastable, mix, phase, sample, sha256_hex, validate, ExperimentConfig, OutputDir, RunManifest,
};
use ergm::rng::DEFAULT_SEED;
use ergm::ErgmError;

#[derive(Parser)]
#[command(name = "ergm", version, about = "Sampling and analysis toolkit for exponential random graph models")]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory (default: runs/<command>).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for replicas (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Regime classification of L over one β or a sweep.
    Phase,
    /// Thinned samples with concentration reports.
    Sample,
    /// Coalescence-time scaling and exact total-variation curves.
    Mix,
    /// Cavity metastability experiment (edge + triangle models).
    Metastable,
    /// Concentration report for a graph snapshot.
    Diag,
    /// Runs the oracle suite; exits nonzero on any failure.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Phase => "phase",
            Command::Sample => "sample",
            Command::Mix => "mix",
            Command::Metastable => "metastable",
            Command::Diag => "diag",
            Command::Validate => "validate",
        }
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn load_config(path: Option<&PathBuf>) -> Result<ExperimentConfig, ErgmError> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ErgmError::Config(format!("cannot read {}: {e}", p.display())))?;
            ExperimentConfig::from_toml(&text).map_err(|e| match e {
                ErgmError::Config(m) => ErgmError::Config(format!("{}: {m}", p.display())),
                other => other,
            })
        }
    }
}

/// Returns `Ok(false)` when the command ran but reported failures.
fn run(cli: &Cli) -> Result<bool, ErgmError> {
    let cmd = cli.command;
    let mut cfg = load_config(cli.config.as_ref())?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let root = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("runs").join(cmd.name()));
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| ErgmError::Config(format!("--threads: {e}")))?;
    }
    // the effective config is stored without the output path so that reruns
    // into another directory produce identical files
    cfg.seed = Some(seed);
    cfg.out = None;
    let effective = cfg.to_toml()?;
    let started = unix_now();
    let mut out = OutputDir::create(&root)?;
    out.write("config.toml", effective.as_bytes())?;
    let mut ok = true;
    match cmd {
        Command::Phase => {
            let o = phase::run_phase(&cfg)?;
            for p in &o.points {
                println!("beta = {:?}: {} ({} local maxima)", p.beta, p.report.regime, p.report.maxima.len());
            }
            for t in &o.transitions {
                println!("transition {} -> {} at {}", t.from, t.to, t.threshold);
            }
            o.write(&mut out)?;
        }
        Command::Sample => {
            let o = sample::run_sample(&cfg, seed)?;
            let r = o.rates;
            println!(
                "p* = {}, {} samples: gamma {:.3}, degree {:.3}, wedge {:.3}, g {:.3}",
                o.p_star,
                o.records.len(),
                r.gamma,
                r.degree,
                r.wedge,
                r.g
            );
            o.write(&mut out)?;
        }
        Command::Mix => {
            let o = mix::run_mix(&cfg, seed)?;
            for s in &o.sizes {
                println!("n = {}: median {} ({} timeouts)", s.n, s.median, s.timeouts);
            }
            if let Some((slope, _)) = o.fit {
                println!("log-log slope {slope:.4}");
            }
            if let Some(e) = &o.exact {
                println!("exact n = {}: monotone {}, hitting time {:?}, C = {:?}", e.n, e.monotone, e.hit, e.fitted_c);
            }
            o.write(&mut out)?;
        }
        Command::Metastable => {
            let o = metastable::run_metastable(&cfg, seed)?;
            println!("p1* = {}, p2* = {}, q* = {}", o.solution.p1, o.solution.p2, o.solution.q);
            for arm in [metastable::Arm::Treatment, metastable::Arm::Control] {
                let rate = o.persistence_rate(arm);
                if rate.is_finite() {
                    println!("{arm}: persistence {rate:.3}");
                }
            }
            o.write(&mut out)?;
        }
        Command::Diag => {
            let o = diag::run_diag(&cfg, seed)?;
            println!(
                "n = {}, p* = {}: r in [{}, {}], gamma member {}, g max {}",
                o.n, o.p_star, o.report.r_min, o.report.r_max, o.report.gamma_member, o.g_max
            );
            o.write(&mut out)?;
        }
        Command::Validate => {
            let results = validate::run_validate(&cfg, seed);
            for r in &results {
                println!(
                    "{:<4} {:<28} {:>8.2}s  {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.seconds,
                    r.detail
                );
            }
            ok = results.iter().all(|r| r.passed);
            validate::write_results(&results, &mut out)?;
        }
    }
    let manifest = RunManifest {
        command: cmd.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: sha256_hex(effective.as_bytes()),
        seed,
        started_unix: started,
        finished_unix: unix_now(),
        outputs: out.files().to_vec(),
    };
    out.write_json(RunManifest::FILE, &manifest)?;
    println!("wrote {}", out.root().display());
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ ErgmError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
