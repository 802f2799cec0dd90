use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use pavecrack::pipeline::{detect, run_stage, Stage, StageCounts, StageOutput};
use pavecrack::raster::pgm::{load_mask, load_pgm, save_pgm};
use pavecrack::synth::SyntheticSceneSpec;
use pavecrack::{evaluate, EvalReport, Error, PipelineConfig};

#[derive(Parser)]
#[command(name = "pavecrack", version, about = "Pavement crack detection and scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a grayscale PGM and write the crack mask.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Score the detection against this reference mask.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Overrides the configured search radius.
        #[arg(long)]
        tau: Option<f64>,
        /// Write stick and ball saliency maps of every voting pass here.
        #[arg(long, value_name = "DIR")]
        dump_saliency: Option<PathBuf>,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score a detected mask against a reference mask.
    Evaluate {
        /// Detected mask.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = pavecrack::eval::DEFAULT_TAU)]
        tau: f64,
        /// Physical size of one pixel; scales the reported distances.
        #[arg(long)]
        pixel_scale: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a single stage: median, bottomhat, binarize, otsu or enhance.
    Stage {
        name: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Render a synthetic scene and its ground-truth crack mask.
    Synth {
        /// Scene spec (TOML). Without it a random noisy-crack scene is drawn.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Ground-truth crack mask.
        #[arg(long)]
        reference: PathBuf,
        /// Overrides the spec seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Side of the preset scene.
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Speck count of the preset scene.
        #[arg(long, default_value_t = 200)]
        specks: usize,
    },
    /// Print the resolved configuration as TOML.
    Config {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig, Error> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn emit(value: &impl Serialize, report: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    match report {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| io_error(p, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Serialize)]
struct DetectReport<'a> {
    input: String,
    output: String,
    width: usize,
    height: usize,
    counts: StageCounts,
    config: &'a PipelineConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<EvalReport>,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Detect {
            input,
            output,
            config,
            reference,
            tau,
            dump_saliency,
            report,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(t) = tau {
                cfg.tau = t;
            }
            if dump_saliency.is_some() {
                cfg.dump_saliency = true;
            }
            cfg.validate()?;
            let img = load_pgm(&input)?;
            let reference = reference.map(load_mask).transpose()?;
            let det = detect(&img, &cfg)?;
            save_pgm(&det.mask, &output)?;
            if cfg.dump_saliency {
                let dir = match dump_saliency {
                    Some(d) => d,
                    None => output.parent().map(Path::to_path_buf).unwrap_or_default(),
                };
                std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
                let stem = output
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "mask".into());
                for (stage, maps) in &det.saliency {
                    let base = format!("{stem}.{}", stage.name());
                    save_pgm(&maps.stick_image(), dir.join(format!("{base}.stick.pgm")))?;
                    save_pgm(&maps.ball_image(), dir.join(format!("{base}.ball.pgm")))?;
                }
            }
            let evaluation = reference
                .map(|r| evaluate(&det.mask, &r, cfg.tau))
                .transpose()?;
            eprintln!("{}", json!({ "timings": det.timings }));
            emit(
                &DetectReport {
                    input: input.display().to_string(),
                    output: output.display().to_string(),
                    width: img.width(),
                    height: img.height(),
                    counts: det.counts,
                    config: &cfg,
                    evaluation,
                },
                report.as_deref(),
            )
        }
        Command::Evaluate {
            input,
            reference,
            tau,
            pixel_scale,
            report,
        } => {
            let detected = load_mask(&input)?;
            let reference = load_mask(&reference)?;
            let mut rep = evaluate(&detected, &reference, tau)?;
            if let Some(s) = pixel_scale {
                rep = rep.with_pixel_scale(s)?;
            }
            emit(&rep, report.as_deref())
        }
        Command::Stage {
            name,
            input,
            output,
            config,
        } => {
            let stage: Stage = name.parse()?;
            let cfg = load_config(config.as_deref())?;
            let img = load_pgm(&input)?;
            let foreground = match run_stage(stage, &img, &cfg)? {
                StageOutput::Image(out) => {
                    save_pgm(&out, &output)?;
                    None
                }
                StageOutput::Mask(out) => {
                    save_pgm(&out, &output)?;
                    Some(out.count())
                }
            };
            emit(
                &json!({
                    "stage": stage.name(),
                    "output": output.display().to_string(),
                    "foreground": foreground,
                }),
                None,
            )
        }
        Command::Synth {
            config,
            output,
            reference,
            seed,
            size,
            specks,
        } => {
            let mut spec = match config {
                Some(p) => SyntheticSceneSpec::load(p)?,
                None => SyntheticSceneSpec::noisy_crack(seed.unwrap_or(0), size, specks),
            };
            if let Some(s) = seed {
                spec.seed = s;
            }
            for w in spec.warnings(PipelineConfig::default().bottomhat_radius) {
                eprintln!("{}", json!({ "warning": w }));
            }
            let scene = spec.render()?;
            save_pgm(&scene.image, &output)?;
            save_pgm(&scene.crack, &reference)?;
            emit(
                &json!({
                    "output": output.display().to_string(),
                    "reference": reference.display().to_string(),
                    "width": spec.width,
                    "height": spec.height,
                    "seed": spec.seed,
                    "crack_pixels": scene.crack.count(),
                    "noise_pixels": scene.noise.count(),
                }),
                None,
            )
        }
        Command::Config { config } => {
            print!("{}", load_config(config.as_deref())?.to_toml_string());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default();
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("{}", json!({ "error": { "kind": "usage", "message": first } }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut err = json!({ "kind": e.kind(), "message": e.to_string() });
            if let Some(stage) = e.stage() {
                err["stage"] = json!(stage);
            }
            if let Some(path) = error_path(&e) {
                err["path"] = json!(path.display().to_string());
            }
            eprintln!("{}", json!({ "error": err }));
            ExitCode::FAILURE
        }
    }
}

fn error_path(e: &Error) -> Option<&Path> {
    match e {
        Error::Io { path, .. } | Error::Pgm { path, .. } => Some(path),
        Error::Stage { source, .. } => error_path(source),
        _ => None,
    }
}
