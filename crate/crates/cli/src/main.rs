//! `plexsim` command-line tool.
//!
//! Exit codes: 0 success, 2 bad input or configuration, 3 a requested
//! statistic is undefined on the data (for example zero attribute variance).

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use plexsim::Execution;

use args::{Cli, Command};
use commands::{AnalysisArgs, SynthOverrides};

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<plexsim::Error>() {
            return if e.is_undefined_statistic() { 3 } else { 2 };
        }
    }
    2
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) -> anyhow::Result<()> {
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn set_threads(n: usize) -> anyhow::Result<()> {
    if n > 1 {
        log::warn!("built without the `parallel` feature; --threads {n} ignored");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    set_threads(cli.threads)?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let out = cli.out_dir.as_path();
    match &cli.command {
        Command::Build { input, alpha } => commands::build(input, *alpha, out),
        Command::Similarity {
            input,
            attrs,
            alpha,
            convention,
            format,
        } => {
            let a = AnalysisArgs {
                input,
                attrs,
                alphas: alpha,
                convention: (*convention).into(),
                format: *format,
            };
            commands::similarity(&a, out)
        }
        Command::Pvalues {
            input,
            attrs,
            alpha,
            convention,
            null,
            format,
        } => {
            let a = AnalysisArgs {
                input,
                attrs,
                alphas: alpha,
                convention: (*convention).into(),
                format: *format,
            };
            commands::pvalues(&a, null, exec, out)
        }
        Command::Sweep {
            input,
            attrs,
            alphas,
            convention,
            bootstrap_replicas,
            seed,
            format,
        } => {
            let grid = commands::alpha_grid(alphas);
            let a = AnalysisArgs {
                input,
                attrs,
                alphas: &grid,
                convention: (*convention).into(),
                format: *format,
            };
            commands::sweep(&a, *bootstrap_replicas, *seed, exec, out)
        }
        Command::Overlap {
            input,
            alphas,
            pair_domain,
            format,
        } => {
            let grid = commands::alpha_grid(alphas);
            commands::overlap(input, &grid, (*pair_domain).into(), *format, exec, out)
        }
        Command::Synth {
            config,
            nodes,
            seed,
            cross_link,
            layer_coupling,
        } => {
            let o = SynthOverrides {
                nodes: *nodes,
                seed: *seed,
                cross_link: *cross_link,
                layer_coupling: *layer_coupling,
            };
            commands::synth(config.as_deref(), &o, out)
        }
        Command::ExportGraph {
            input,
            alpha,
            prune,
        } => commands::export_graph(input, *alpha, *prune, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
