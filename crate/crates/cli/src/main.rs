//! Command-line entry point for the see-through contrast enhancement
//! simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ostce_cli::bench::{
    format_table, run_bench_protocol, BENCH_HEIGHT, BENCH_SAMPLES, BENCH_WIDTH,
};
use ostce_cli::config::{
    parse_config_file, parse_fov, parse_methods, Method, PartialConfig, RunConfig,
};
use ostce_cli::error::CliError;
use ostce_cli::pipeline::{run_compare, run_enhance};

/// Simulates color contrast enhanced rendering for optical see-through
/// displays: optimizes displayed colors against a captured background,
/// blends the result the way an additive combiner would, and reports
/// enhancement metrics.
#[derive(Parser, Debug)]
#[command(name = "ostce", version, about)]
struct Cli {
    /// Rendered virtual content (PNG; alpha channel marks the foreground)
    #[arg(long = "virtual", value_name = "PATH")]
    virtual_image: Option<PathBuf>,

    /// Background capture: a PNG, or a directory of PNG frames processed in
    /// lexicographic order
    #[arg(long, value_name = "PATH")]
    background: Option<PathBuf>,

    /// Output directory for images and reports
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Scaled color-difference budget λ'_E in [0, 2] [default: 0.4]
    #[arg(long = "lambda-e", value_name = "FLOAT")]
    lambda_e: Option<f64>,

    /// Just noticeable difference in unscaled CIELAB units, used by the
    /// evaluation and (divided by 128) by the optimizer [default: 2.3]
    #[arg(long, value_name = "FLOAT")]
    jnd: Option<f64>,

    /// Gaussian blur standard deviation [default: 1.5]
    #[arg(long = "blur-sigma", value_name = "FLOAT")]
    blur_sigma: Option<f64>,

    /// Gaussian blur kernel size, odd [default: 3]
    #[arg(long = "blur-kernel", value_name = "ODD-INT")]
    blur_kernel: Option<usize>,

    /// Background luminance attenuation through the combiner, in [0, 1]
    /// [default: 0.6]
    #[arg(long, value_name = "FLOAT")]
    attenuation: Option<f64>,

    /// FoV calibration mapping [default: 0.65,0.65,0.13,0.17]
    #[arg(long, value_name = "SU,SV,BU,BV", allow_hyphen_values = true)]
    fov: Option<String>,

    /// Enhancement method: ours, subtract, lumchroma, opposite-hue, none
    /// [default: ours]
    #[arg(long, value_name = "NAME")]
    method: Option<String>,

    /// Also write the cyan diagnostic overlay of enhanced pixels
    #[arg(long = "emit-overlay")]
    emit_overlay: bool,

    /// Metrics JSON path; defaults to metrics.json inside the output
    /// directory
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Run the throughput benchmark sweep instead of processing images
    #[arg(long)]
    bench: bool,

    /// Run several methods over the same inputs and write a comparison
    /// grid plus per-method metrics
    #[arg(long, value_name = "M1,M2,...")]
    compare: Option<String>,

    /// Plain-text key-value config file; explicit flags win on conflict
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl Cli {
    fn to_partial(&self) -> Result<PartialConfig, CliError> {
        Ok(PartialConfig {
            virtual_path: self.virtual_image.clone(),
            background_path: self.background.clone(),
            out_dir: self.out.clone(),
            lambda_e: self.lambda_e,
            jnd: self.jnd,
            blur_sigma: self.blur_sigma,
            blur_kernel: self.blur_kernel,
            attenuation: self.attenuation,
            fov: self.fov.as_deref().map(parse_fov).transpose()?,
            method: self.method.as_deref().map(Method::from_name).transpose()?,
            emit_overlay: if self.emit_overlay { Some(true) } else { None },
            report_path: self.report.clone(),
            compare: self.compare.as_deref().map(parse_methods).transpose()?,
            bench: if self.bench { Some(true) } else { None },
        })
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        parse_config_file(path)?.apply(&mut cfg);
    }
    cli.to_partial()?.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(&cli)?;

    if cfg.bench {
        let report = run_bench_protocol(&cfg, BENCH_WIDTH, BENCH_HEIGHT, BENCH_SAMPLES)?;
        print!("{}", format_table(&report));
        let report_path = match (&cfg.report_path, &cfg.out_dir) {
            (Some(path), _) => Some(path.clone()),
            (None, Some(dir)) => {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
                Some(dir.join("bench.json"))
            }
            (None, None) => None,
        };
        if let Some(path) = report_path {
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Io(format!("cannot serialize bench report: {e}")))?;
            std::fs::write(&path, json + "\n")
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        }
        return Ok(());
    }

    match &cfg.compare {
        Some(methods) => run_compare(&cfg, &methods.clone()),
        None => run_enhance(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
