use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use repeat_infer::corpus::{
    as_notes, emit_heatmap, generate_synthetic, load_performance, load_score, run_audit, NoiseRates,
};
use repeat_infer::performance::performance_json;
use repeat_infer::{
    enumerate_versions, infer_all, parse_structure, result_json, segment_score, Error, Gain,
    InferConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "repeat-infer",
    version,
    about = "Infer the repeat structure of MIDI performances and audit corpus annotations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infer the structure of one performance and print the result JSON
    Infer {
        #[arg(long)]
        score: PathBuf,
        /// Standard MIDI File or performance JSON
        #[arg(long)]
        performance: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the gain matrix as a PGM image
        #[arg(long)]
        heatmap: Option<PathBuf>,
        /// Write the gain matrix with the selected alignment paths drawn in white
        #[arg(long)]
        heatmap_overlay: Option<PathBuf>,
        #[command(flatten)]
        params: Params,
    },
    /// Compare predictions with the annotations listed in a manifest
    Audit {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        params: Params,
    },
    /// List the structural versions of a score
    Versions {
        #[arg(long)]
        score: PathBuf,
        #[arg(long, default_value_t = repeat_infer::DEFAULT_VERSION_LIMIT)]
        max_versions: usize,
    },
    /// Render a structure of a score as a (noisy) performance JSON
    Synth {
        #[arg(long)]
        score: PathBuf,
        /// Structure string to render, e.g. ABB
        #[arg(long)]
        structure: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        substitution_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        deletion_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        insertion_rate: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Params {
    /// Upper bound of the accumulated gain
    #[arg(long, default_value_t = 10.0)]
    bound: Gain,
    /// Penalty per segment of a version
    #[arg(long, default_value_t = 2.0)]
    lambda: Gain,
    /// Maximum number of structural versions scored
    #[arg(long, default_value_t = repeat_infer::DEFAULT_VERSION_LIMIT)]
    max_versions: usize,
}

impl From<Params> for InferConfig<Gain> {
    fn from(p: Params) -> Self {
        InferConfig {
            bound: p.bound,
            lambda: p.lambda,
            limit: p.max_versions,
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rate_ok(name: &'static str, rate: f64) -> Result<f64, Error> {
    if (0.0..1.0).contains(&rate) {
        Ok(rate)
    } else {
        Err(repeat_infer::ValidationError::new(name, format!("rate {rate} outside [0, 1)")).into())
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Infer {
            score,
            performance,
            output,
            heatmap,
            heatmap_overlay,
            params,
        } => {
            let score = load_score(&score)?;
            let performance = load_performance(&performance)?;
            let inference = infer_all(&score, &performance, &params.into())?;
            if let Some(path) = &heatmap {
                emit_heatmap(&inference.matrix, None, path)?;
            }
            if let Some(path) = &heatmap_overlay {
                emit_heatmap(&inference.matrix, Some(&inference.best.alignments), path)?;
            }
            let text = result_json(&performance.source, &score.name, &inference.best);
            write_out(output.as_deref(), &text)
        }
        Command::Audit {
            manifest,
            output,
            params,
        } => {
            let report = run_audit(&manifest, &InferConfig::<Gain>::from(params))?;
            write_out(output.as_deref(), &report.to_json())
        }
        Command::Versions {
            score,
            max_versions,
        } => {
            let score = load_score(&score)?;
            let text: String = enumerate_versions(&score, max_versions)?
                .into_iter()
                .map(|v| v.structure + "\n")
                .collect();
            write_out(None, &text)
        }
        Command::Synth {
            score,
            structure,
            seed,
            substitution_rate,
            deletion_rate,
            insertion_rate,
            output,
        } => {
            let score = load_score(&score)?;
            let version = parse_structure(&structure, &segment_score(&score)?)?;
            let noise = NoiseRates {
                substitution_rate: rate_ok("substitution_rate", substitution_rate)?,
                deletion_rate: rate_ok("deletion_rate", deletion_rate)?,
                insertion_rate: rate_ok("insertion_rate", insertion_rate)?,
            };
            let perf = generate_synthetic(&score, &version, noise, seed);
            let mut text = performance_json(&perf.source, &as_notes(&perf, 0.25));
            text.push('\n');
            write_out(output.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
