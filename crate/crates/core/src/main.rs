use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eegcx::classify::DEFAULT_SUITE;
use eegcx::eval::{CvConfig, Grouping, Placement};
use eegcx::features::{HfdParams, SampEnParams};
use eegcx::pipeline::{
    cmd_audit, cmd_evaluate, cmd_extract, cmd_generate, AuditConfig, EvaluateConfig, ExtractConfig, GenerateConfig,
    FEATURES_FILE, MANIFEST_FILE,
};
use eegcx::signal::CohortSpec;
use eegcx::{Error, Result};

/// EEG complexity features, PCA and classifier benchmarking.
#[derive(Parser)]
#[command(name = "eegcx", version)]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic cohort (channel CSVs and a manifest).
    Generate(GenerateArgs),
    /// Compute HFD and SampEn features for every channel.
    Extract(ExtractArgs),
    /// Cross-validate the classifier suite on principal components.
    Evaluate(EvaluateArgs),
    /// Measure leakage optimism on pure-noise data.
    Audit(AuditArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 14)]
    patients: usize,
    #[arg(long, default_value_t = 20)]
    controls: usize,
    /// Channels per subject.
    #[arg(long, default_value_t = 19)]
    channels: usize,
    /// Samples per channel.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0.3)]
    patient_hurst: f64,
    #[arg(long, default_value_t = 0.7)]
    control_hurst: f64,
    /// White-noise weight blended into the increments.
    #[arg(long, default_value_t = 0.1)]
    noise_mix: f64,
    #[arg(long, default_value = "out/cohort")]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    /// Cohort manifest.
    #[arg(long, default_value = "out/cohort/manifest.json")]
    manifest: PathBuf,
    /// Comma-separated channel labels to keep (default: all).
    #[arg(long, value_delimiter = ',')]
    channels: Option<Vec<String>>,
    #[arg(long, default_value_t = 8)]
    kmax: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0.15)]
    r_factor: f64,
    /// Split recordings into epochs of this many samples.
    #[arg(long)]
    epoch_samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    max_epochs: usize,
    #[arg(long, default_value = "out/features")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Proper,
    Leaky,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Subject,
    Instance,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Feature CSV written by `extract`.
    #[arg(long, default_value = "out/features/features.csv")]
    features: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Comma-separated principal-component counts.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,10")]
    pc: Vec<usize>,
    #[arg(long, value_enum, default_value = "proper")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "subject")]
    group: Group,
    /// Comma-separated classifier names.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SUITE.map(String::from))]
    classifiers: Vec<String>,
    /// Feed raw PC scores instead of re-standardized ones.
    #[arg(long)]
    no_restandardize: bool,
    #[arg(long, default_value = "out/report")]
    out: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Instances per null data set.
    #[arg(long, default_value_t = 34)]
    n: usize,
    /// Features per null data set.
    #[arg(long, default_value_t = 38)]
    k: usize,
    /// Monte-Carlo repetitions.
    #[arg(long, default_value_t = 50)]
    seeds: usize,
    /// Comma-separated sample sizes for the optimism curve.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
    sizes: Vec<usize>,
    /// Comma-separated feature counts for the optimism curve (default: --k).
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    #[arg(long, default_value = "out/audit")]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate(a) => {
            let config = GenerateConfig {
                cohort: CohortSpec {
                    n_patients: a.patients,
                    n_controls: a.controls,
                    channels: a.channels,
                    epoch_samples: a.samples,
                    seed: a.seed,
                    patient_hurst: a.patient_hurst,
                    control_hurst: a.control_hurst,
                    noise_mix: a.noise_mix,
                },
                out: a.out,
            };
            let s = cmd_generate(&config)?;
            println!(
                "wrote {} subjects ({} patients, {} controls), {} channels x {} samples, to {}",
                s.subjects,
                s.patients,
                s.controls,
                s.channels,
                s.samples,
                config.out.join(MANIFEST_FILE).display()
            );
        }
        Command::Extract(a) => {
            let config = ExtractConfig {
                manifest: a.manifest,
                channels: a.channels,
                hfd: HfdParams { k_max: a.kmax },
                sampen: SampEnParams { m: a.m, r_factor: a.r_factor },
                epoch_samples: a.epoch_samples,
                max_epochs: a.max_epochs,
                out: a.out,
            };
            let s = cmd_extract(&config)?;
            println!(
                "wrote {} instances x {} features to {}",
                s.instances,
                s.features.len(),
                config.out.join(FEATURES_FILE).display()
            );
        }
        Command::Evaluate(a) => {
            let config = EvaluateConfig {
                features: a.features,
                cv: CvConfig {
                    folds: a.folds,
                    seed: a.seed,
                    grouping: match a.group {
                        Group::Subject => Grouping::BySubject,
                        Group::Instance => Grouping::ByInstance,
                    },
                    placement: match a.mode {
                        Mode::Proper => Placement::InsideFolds,
                        Mode::Leaky => Placement::WholeDataset,
                    },
                    pc_counts: a.pc,
                    restandardize_pcs: !a.no_restandardize,
                },
                classifiers: a.classifiers,
                out: a.out,
            };
            let report = cmd_evaluate(&config)?;
            print!("{}", report.to_table());
        }
        Command::Audit(a) => {
            let config = AuditConfig {
                n: a.n,
                k: a.k,
                seeds: a.seeds,
                seed: a.seed,
                sizes: a.sizes,
                ks: a.ks.unwrap_or_else(|| vec![a.k]),
                out: a.out,
            };
            let r = cmd_audit(&config)?;
            println!("null-data audit: n={}, k={}, {} seeds", config.n, config.k, config.seeds);
            for p in &r.audit.pipelines {
                println!("  {:<20} mean {:6.2}%  sd {:5.2}", format!("{:?}", p.pipeline), p.mean_accuracy, p.sd_accuracy);
            }
            if let Some(curve) = &r.optimism {
                println!("selection-leak optimism:");
                for p in &curve.points {
                    println!("  n={:<6} k={:<4} mean {:6.2}%", p.n, p.k, p.mean_accuracy);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
