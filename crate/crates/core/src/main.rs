use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use ontoweave::pipeline::{run, RunOptions};
use ontoweave::synth::{generate, write_bundle, SynthParams};

#[derive(Debug, Parser)]
#[command(
    name = "ontoweave",
    version,
    about = "Deduplicate ontology concepts and build a seed-anchored hierarchy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline on an input directory.
    Integrate {
        /// Directory holding nodes.csv, mappings.csv and edges_hierarchy.csv.
        #[arg(long, value_name = "DIR")]
        input: PathBuf,
        /// TOML configuration (seed, source priority, mapping-type groups).
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "DIR")]
        output: PathBuf,
        /// Exit with status 2 and write nothing if any warning is raised.
        #[arg(long)]
        fail_on_warning: bool,
        /// Skip report/index.html and report/metrics.json.
        #[arg(long)]
        no_report: bool,
        /// Print errors only.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Write a synthetic input bundle and config.toml.
    Generate {
        #[arg(long, value_name = "DIR")]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        sources: usize,
        #[arg(long, default_value_t = 1000)]
        concepts: usize,
        #[arg(long)]
        mappings: Option<usize>,
        #[arg(long)]
        edges: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Integrate {
            input,
            config,
            output,
            fail_on_warning,
            no_report,
            quiet,
        } => {
            let options = RunOptions {
                input_dir: input,
                config_path: config,
                output_dir: output,
                fail_on_warning,
                emit_report: !no_report,
                quiet,
            };
            ExitCode::from(run(&options).code())
        }
        Command::Generate {
            output,
            seed,
            sources,
            concepts,
            mappings,
            edges,
        } => match generate_bundle(&output, seed, sources, concepts, mappings, edges) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(1)
            }
        },
    }
}

fn generate_bundle(
    output: &Path,
    seed: u64,
    sources: usize,
    concepts: usize,
    mappings: Option<usize>,
    edges: Option<usize>,
) -> anyhow::Result<()> {
    anyhow::ensure!(sources >= 1, "at least one source is required");
    let mut params = SynthParams::large();
    params.sources = sources;
    params.concepts = concepts;
    params.mappings = mappings.unwrap_or(concepts * 9 / 4);
    params.edges = edges.unwrap_or(concepts * 27 / 20);
    let bundle = generate(&params, seed);
    write_bundle(&bundle, output).with_context(|| format!("writing {}", output.display()))?;
    eprintln!(
        "wrote {} concepts, {} mappings, {} hierarchy edges to {}",
        bundle.nodes.len(),
        bundle.mappings.len(),
        bundle.hierarchy.len(),
        output.display()
    );
    Ok(())
}
