//! Command-line driver for the concentration laboratory.
//!
//! Every experiment is a subcommand; output is CSV or JSON records carrying
//! the seed and artifact version, written to stdout or to a file (a
//! directory in suite mode, one file per experiment, each written
//! atomically). Identical (subcommand, parameters, seed) triples produce
//! byte-identical output; `--timings` adds wall-clock columns and is
//! therefore off by default. Exit codes: 0 all checks passed, 1 a numerical
//! invariant failed (records still emitted) or I/O failed, 2 parameter or
//! usage error. Worker thread count follows RAYON_NUM_THREADS.

use clap::{Parser, Subcommand, ValueEnum};
use levylab::commands::{
    self, ActionGroupArg, ActionTargetArg, CommandOutput, Ctx, EmbeddingArg, FamilyArg,
    HaarGroupArg, RouteArg, SetArg,
};
use levylab::record::{self, RecordSet};
use levylab_core::rootdata::SeriesTag;
use levylab_core::Error;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesArg {
    A,
    B,
    C,
    D,
}

impl From<SeriesArg> for SeriesTag {
    fn from(s: SeriesArg) -> Self {
        match s {
            SeriesArg::A => SeriesTag::A,
            SeriesArg::B => SeriesTag::B,
            SeriesArg::C => SeriesTag::C,
            SeriesArg::D => SeriesTag::D,
        }
    }
}

/// Numerical laboratory for volumes, curvature constants, Haar sampling,
/// and concentration of measure on the classical compact groups.
#[derive(Parser, Debug)]
#[command(
    name = "levylab",
    version,
    arg_required_else_help = true,
    after_help = "Worker thread count follows RAYON_NUM_THREADS; for a fixed \
                  seed the output bytes do not depend on it."
)]
struct RunConfig {
    /// Seed recorded in, and driving, every randomized record.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format for records.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; suite mode treats this as a directory with one file per
    /// experiment. Stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Append wall-clock runtime columns (breaks byte-reproducibility).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group volumes along one series, by both computation paths.
    Volume {
        #[arg(long, value_enum, ignore_case = true)]
        series: SeriesArg,
        #[arg(long)]
        n_max: u32,
        /// Defaults to the smallest valid parameter of the series.
        #[arg(long)]
        n_min: Option<u32>,
        /// Order of the central subgroup to quotient by.
        #[arg(long, default_value_t = 1)]
        center: u32,
    },
    /// Consecutive-volume ratios, normalized per added dimension.
    Ratio {
        /// Repeatable; defaults to all four series.
        #[arg(long, value_enum, ignore_case = true)]
        series: Vec<SeriesArg>,
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        n_min: Option<u32>,
    },
    /// Killing constant measured from structure constants.
    Chi {
        #[arg(long, value_enum, ignore_case = true)]
        series: SeriesArg,
        #[arg(long)]
        n: u32,
    },
    /// Haar sampler residuals and first-entry distribution test.
    HaarCheck {
        #[arg(long, value_enum)]
        group: HaarGroupArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Write the raw sample matrices to a binary dump file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Concentration of the distance-to-hyperplane angle on CP^n.
    Cpn {
        /// Repeatable.
        #[arg(long, required = true)]
        n: Vec<u32>,
        /// Repeatable deviation threshold.
        #[arg(long, required = true)]
        epsilon: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
        /// Also write (n, epsilon, exact, mc, halfwidth) rows to a CSV file.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// The two circle families: shrinking metric (y) and concentrating
    /// measure (z).
    Circle {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Repeatable.
        #[arg(long, required = true)]
        n: Vec<u64>,
        /// Tube width (family y) or arc half-width around the antipode
        /// (family z).
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        /// Also estimate the z-family mass by Monte Carlo.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Pushforward of Haar measure under a declared group action.
    Action {
        #[arg(long, value_enum)]
        group: ActionGroupArg,
        #[arg(long)]
        group_n: Option<usize>,
        /// Comma-separated integer weights for --group weights.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, value_enum)]
        target: ActionTargetArg,
        /// Sphere dimension or truncation size.
        #[arg(long)]
        target_n: Option<usize>,
        #[arg(long, value_enum, default_value_t = EmbeddingArg::Fundamental)]
        embedding: EmbeddingArg,
        /// Comma-separated axis for --embedding axis.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated base point (a single angle for circle targets).
        #[arg(long)]
        base: String,
        #[arg(long, value_enum)]
        set: SetArg,
        /// arc: start,length | halfspace: coordinate,level |
        /// weakball: center,epsilon,v1,...
        #[arg(long)]
        set_params: String,
        /// Use the complement of the target set.
        #[arg(long)]
        outside: bool,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
    },
    /// Coordinate moments and tails on truncated Hilbert spheres.
    Hilbert {
        /// Repeatable truncation dimension.
        #[arg(long, required = true)]
        dim: Vec<usize>,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        /// Tail threshold for P(|<e1, X>| > level).
        #[arg(long, default_value_t = 0.1)]
        level: f64,
        /// Comma-separated coefficients of the test vector (default e1).
        #[arg(long)]
        vector: Option<String>,
    },
    /// Sobolev and L2 norms of the normalized sine modes.
    Sobolev {
        /// Repeatable mode number.
        #[arg(long, required = true)]
        n: Vec<u32>,
        /// Quadrature points (default 20 per oscillation).
        #[arg(long)]
        points: Option<usize>,
    },
    /// The full deterministic battery of experiments.
    Suite {
        /// Monte Carlo trials per stochastic section.
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
    },
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidSpec(_)
        | Error::Domain(_)
        | Error::Resolution { .. }
        | Error::SizeGuard { .. }
        | Error::InsufficientData(_) => 2,
        _ => 1,
    }
}

fn render(set: &RecordSet, format: Format) -> String {
    match format {
        Format::Csv => set.to_csv(),
        Format::Json => set.to_json(),
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Write the produced record sets: concatenated to stdout or a single file
/// for ordinary commands, one atomically-written file per experiment for
/// suite mode.
fn deliver(
    sets: &[RecordSet],
    format: Format,
    out: Option<&Path>,
    suite_mode: bool,
) -> levylab_core::Result<()> {
    match (out, suite_mode) {
        (None, _) => {
            let mut first = true;
            for set in sets {
                if !first {
                    println!();
                }
                first = false;
                print!("{}", render(set, format));
            }
        }
        (Some(path), false) => {
            let mut body = String::new();
            for (i, set) in sets.iter().enumerate() {
                if i > 0 {
                    body.push('\n');
                }
                body.push_str(&render(set, format));
            }
            record::write_atomic(path, body.as_bytes())?;
        }
        (Some(dir), true) => {
            std::fs::create_dir_all(dir)?;
            for (i, set) in sets.iter().enumerate() {
                let name = format!("{:02}-{}.{}", i + 1, set.experiment, extension(format));
                record::write_atomic(&dir.join(name), render(set, format).as_bytes())?;
            }
        }
    }
    Ok(())
}

fn dispatch(config: &RunConfig) -> levylab_core::Result<CommandOutput> {
    let ctx = Ctx { seed: config.seed, timings: config.timings };
    match &config.command {
        Command::Volume { series, n_max, n_min, center } => {
            commands::volume((*series).into(), *n_min, *n_max, *center, ctx)
        }
        Command::Ratio { series, n_max, n_min } => {
            let tags: Vec<SeriesTag> = if series.is_empty() {
                SeriesTag::ALL.to_vec()
            } else {
                series.iter().map(|s| (*s).into()).collect()
            };
            commands::ratio(&tags, *n_min, *n_max, ctx)
        }
        Command::Chi { series, n } => commands::chi(&[((*series).into(), *n)], ctx),
        Command::HaarCheck { group, n, samples, dump } => {
            commands::haar_check(&[(*group, *n)], *samples, dump.as_deref(), ctx, 0)
        }
        Command::Cpn { n, epsilon, trials, route, plot } => {
            commands::cpn(n, epsilon, *trials, *route, plot.as_deref(), ctx, 0)
        }
        Command::Circle { family, n, delta, trials } => {
            commands::circle(*family, n, *delta, *trials, ctx, 0)
        }
        Command::Action {
            group,
            group_n,
            weights,
            target,
            target_n,
            embedding,
            axis,
            base,
            set,
            set_params,
            outside,
            trials,
        } => commands::action(
            *group,
            *group_n,
            weights.as_deref(),
            *target,
            *target_n,
            *embedding,
            axis.as_deref(),
            base,
            *set,
            set_params,
            *outside,
            *trials,
            ctx,
            0,
        ),
        Command::Hilbert { dim, trials, level, vector } => {
            commands::hilbert(dim, *trials, *level, vector.as_deref(), ctx, 0)
        }
        Command::Sobolev { n, points } => commands::sobolev(n, *points, ctx),
        Command::Suite { trials } => commands::suite(*trials, ctx),
    }
}

fn main() {
    let config = RunConfig::parse();
    let suite_mode = matches!(config.command, Command::Suite { .. });
    match dispatch(&config) {
        Ok(output) => {
            if let Err(e) = deliver(&output.sets, config.format, config.out.as_deref(), suite_mode)
            {
                eprintln!("error: {e}");
                std::process::exit(1);
            }
            std::process::exit(if output.invariants_hold { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}
