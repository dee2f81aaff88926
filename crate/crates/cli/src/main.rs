//! Batch front end for the reconstruction pipeline. Exit code 0 on
//! success, 2 when the input is geometrically degenerate, 1 on I/O or
//! parse failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use surfrec::{
    export_outputs, load_point_cloud, reconstruct, PipelineConfig, PipelineError,
};

#[derive(Parser)]
#[command(
    name = "reconstruct",
    version,
    about = "Reconstructs all closed component surfaces of a noisy point cloud"
)]
struct Args {
    /// Input point cloud: whitespace XYZ text, OBJ, or PLY.
    input: PathBuf,

    /// Fraction of cycle faces kept by simplification, in (0, 1).
    #[arg(long, default_value_t = 0.25, value_parser = parse_ratio)]
    ratio: f64,

    /// Loop subdivision depth of the fitted surface.
    #[arg(long, default_value_t = 2)]
    levels: usize,

    /// Relative-RMS stopping threshold of the fit, positive.
    #[arg(long, default_value_t = 1e-3, value_parser = parse_eps)]
    eps: f64,

    /// Iteration cap of the fit.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    max_iters: u64,

    /// Directory the meshes and reports are written to.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Also export the persistence diagram as diagram.csv.
    #[arg(long)]
    export_pd: bool,

    /// Seed of the symbolic perturbation that breaks geometric ties.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must lie strictly between 0 and 1".to_string())
    }
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be a positive number".to_string())
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = PipelineConfig {
        target_ratio: args.ratio,
        subdiv_levels: args.levels,
        epsilon: args.eps,
        max_iters: args.max_iters as usize,
        output_dir: args.out,
        export_pd: args.export_pd,
        perturbation_seed: args.seed,
    };

    let cloud = match load_point_cloud(&args.input) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {}", args.input.display(), e);
            return ExitCode::from(1);
        }
    };

    let result = match reconstruct(&cloud, &cfg) {
        Ok(r) => r,
        Err(e @ PipelineError::DegenerateInput(_)) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    for w in &result.warnings {
        eprintln!("warning: {}", w);
    }

    match export_outputs(&result, &cfg) {
        Ok(files) => {
            println!(
                "{} component(s); topology {:.3} s, fitting {:.3} s",
                result.components.len(),
                result.timings.topology_seconds,
                result.timings.fitting_seconds
            );
            for f in &files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
