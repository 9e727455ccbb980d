// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use overlapnet::sbmf::{NormMode, PenaltyMode};

#[derive(Parser, Debug)]
#[command(
    name = "overlapnet",
    version,
    about = "Overlapping community detection by binary matrix factorization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect communities in an edge list.
    Detect(DetectArgs),
    /// Write a synthetic benchmark network with its planted communities.
    Generate(GenerateArgs),
    /// Score a found cover against ground truth.
    Eval(EvalArgs),
    /// Membership entropy of a soft membership matrix.
    Entropy(EntropyArgs),
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Edge list, or GML when the name ends in `.gml`
    #[arg(long)]
    pub input: PathBuf,
    /// Node ids in the input start at 1.
    #[arg(long)]
    pub one_based: bool,
    /// Fixed number of communities.
    #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
    pub c: Option<usize>,
    /// Inclusive range `lo:hi` of community counts to sweep.
    #[arg(long, value_parser = parse_range)]
    pub sweep: Option<(usize, usize)>,
    #[arg(long, default_value_t = overlapnet::pipeline::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = overlapnet::snmf::DEFAULT_ITERATIONS)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = NormMode::Induced)]
    pub norm: NormMode,
    #[arg(long, default_value_t = PenaltyMode::ZeroRows)]
    pub penalty: PenaltyMode,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
}

#[derive(Subcommand, Debug)]
pub enum GenerateKind {
    /// Four groups of 32 nodes with expected degree 16.
    Gn(GnArgs),
    /// Power-law degrees and community sizes with overlapping nodes.
    Overlap(OverlapArgs),
}

#[derive(Args, Debug)]
pub struct GnArgs {
    /// Expected number of links to other groups.
    #[arg(long)]
    pub zout: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Preset {
    LfrPaper,
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    #[arg(long, value_enum, default_value_t = Preset::LfrPaper)]
    pub preset: Preset,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub min_size: Option<usize>,
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub overlap_fraction: Option<f64>,
    #[arg(long)]
    pub memberships: Option<usize>,
    #[arg(long)]
    pub avg_degree: Option<f64>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Nmi,
    Gnmi,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Cover file or community file (`node c1 c2 ...`).
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub found: PathBuf,
    #[arg(long, value_enum, default_value_t = Metric::Gnmi)]
    pub metric: Metric,
    /// Node ids in community files start at 1. Cover files are always 0-based.
    #[arg(long)]
    pub one_based: bool,
    /// Give every overlapping or unassigned found node its strongest
    /// community so plain NMI applies.
    #[arg(long, requires = "soft")]
    pub force_hard: bool,
    /// Soft membership written by `detect`.
    #[arg(long)]
    pub soft: Option<PathBuf>,
    /// Also write metric.json and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[arg(long)]
    pub soft: PathBuf,
    #[arg(long)]
    pub cover: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound {hi:?}"))?;
    if lo == 0 || lo > hi {
        return Err(format!("empty or invalid range {s:?}"));
    }
    Ok((lo, hi))
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("OVERLAPNET_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        anyhow::anyhow!("OVERLAPNET_THREADS must be a positive integer, got {raw:?}")
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numeric = err.chain().any(|cause| {
        cause
            .downcast_ref::<overlapnet::Error>()
            .is_some_and(overlapnet::Error::is_numeric)
    });
    if numeric {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Detect(args) => commands::detect(&args),
        Command::Generate(args) => commands::generate(&args),
        Command::Eval(args) => commands::eval(&args),
        Command::Entropy(args) => commands::entropy(&args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2:20"), Ok((2, 20)));
        assert_eq!(parse_range("3:3"), Ok((3, 3)));
        assert!(parse_range("0:4").is_err());
        assert!(parse_range("5:4").is_err());
        assert!(parse_range("5").is_err());
    }

    #[test]
    fn numeric_errors_map_to_three() {
        let err = anyhow::Error::new(overlapnet::Error::Numeric("nan".into()));
        assert_eq!(exit_code(&err), 3);
        let err = anyhow::Error::new(overlapnet::Error::EmptyInput).context("reading x");
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
