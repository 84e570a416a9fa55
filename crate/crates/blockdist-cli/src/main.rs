//! Command-line interface: generate point sets, enumerate tuple sets,
//! measure energies, pigeonhole by richness, run scaling scans against the
//! exponent tables, print the tables, and run the invariant suite.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 usage error. Primary output
//! goes to stdout and is byte-reproducible for fixed seed and inputs;
//! progress and timings go to stderr.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blockdist::adaptability::{energy_with_threshold, min_separation, separate_thin};
use blockdist::bset::{b_set, projection_bounds, BsetOptions};
use blockdist::error::Error;
use blockdist::exponents::exponent_report;
use blockdist::generators::GeneratorSpec;
use blockdist::geometry::{Partition, PointSet};
use blockdist::regularize::{extract_regular, richness};

use blockdist_cli::checks::check_suite;
use blockdist_cli::compare::CompareOptions;
use blockdist_cli::config::{scan, ScanConfig};
use blockdist_cli::scaling::{DiagonalConvention, ScanOptions};

#[derive(Parser)]
#[command(
    name = "blockdist",
    version,
    about = "Exact block-distance tuple sets of integer point sets"
)]
struct Cli {
    /// Seed for randomized generators (unless the generator spec carries its
    /// own).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Worker threads; 0 uses the rayon default.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Refuse instances above this many ordered pairs.
    #[arg(long, global = true, default_value_t = 2_000_000_000)]
    pair_budget: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Count every tuple instead of only the all-components-nonzero ones
    /// (affects `scan`; `bset` always reports both counts).
    #[arg(long, global = true)]
    include_diagonal: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct GenArgs {
    /// grid | lattice_sphere | sphere_pair | subspace_embed | random_cube |
    /// jittered_grid
    #[arg(long)]
    kind: String,
    /// Ambient dimension (grid, lattice_sphere, random_cube, jittered_grid).
    #[arg(long)]
    dim: Option<usize>,
    /// Grid side length.
    #[arg(long)]
    side: Option<u64>,
    /// Point count (random_cube).
    #[arg(long)]
    count: Option<usize>,
    /// Coordinate range (random_cube draws from 0..range).
    #[arg(long)]
    range: Option<u64>,
    /// Squared radius (lattice_sphere, sphere_pair).
    #[arg(long)]
    radius_sq: Option<u64>,
    /// Partition, comma-separated (e.g. 2,2).
    #[arg(long)]
    parts: Option<String>,
    /// Jitter amplitude (jittered_grid).
    #[arg(long)]
    jitter: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a point set and write it in the point-set file format.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        /// Output file; stdout when omitted. Pairs write two files with
        /// suffixes .e and .f.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the distance-tuple set of one set (or a pair) under a
    /// partition.
    Bset {
        /// Point-set file for E.
        #[arg(long)]
        points: PathBuf,
        /// Optional point-set file for F (defaults to E).
        #[arg(long)]
        points2: Option<PathBuf>,
        /// Partition, comma-separated.
        #[arg(long)]
        parts: String,
        /// How many of the largest multiplicities to include in JSON output.
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Drop pairs with x = y (the classical distinct-distances count).
        #[arg(long)]
        exclude_diagonal: bool,
        /// Also report per-block projection bounds.
        #[arg(long)]
        projections: bool,
    },
    /// Discrete energy, minimum separation, and separation thinning at s.
    Energy {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        s: f64,
        /// Energy threshold for the adaptability verdict.
        #[arg(long, default_value_t = 10.0)]
        threshold: f64,
        /// Thin to the separation floor before reading the energy.
        #[arg(long)]
        thin_first: bool,
    },
    /// Richness histogram and the regular (fixed dyadic richness) subset of
    /// a block.
    Pigeonhole {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        parts: String,
        /// Block index, 1-based.
        #[arg(long, default_value_t = 1)]
        block: usize,
    },
    /// Scaling ladder: generate, count, fit the log-log slope, compare
    /// against the exponent table.
    Scan {
        /// JSON config with generator, ladder, and partition.
        #[arg(long, conflicts_with_all = ["kind", "ladder", "parts"])]
        config: Option<PathBuf>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        range: Option<u64>,
        #[arg(long)]
        parts: Option<String>,
        /// Ladder values, comma-separated (sides, counts, or radii).
        #[arg(long)]
        ladder: Option<String>,
    },
    /// The predicted-exponent table for a partition.
    Exponents {
        #[arg(long)]
        parts: String,
    },
    /// Run the seeded invariant suite; nonzero exit on failure.
    Check {
        /// Corpus sizes, comma-separated.
        #[arg(long)]
        sizes: Option<String>,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidInput(format!("bad {what} entry `{tok}`")))
        })
        .collect()
}

fn spec_from_args(gen: &GenArgs, seed: u64) -> Result<GeneratorSpec, Error> {
    let need = |opt: Option<u64>, name: &str| {
        opt.ok_or_else(|| Error::InvalidInput(format!("--{name} is required for this kind")))
    };
    let need_usize = |opt: Option<usize>, name: &str| {
        opt.ok_or_else(|| Error::InvalidInput(format!("--{name} is required for this kind")))
    };
    match gen.kind.as_str() {
        "grid" => Ok(GeneratorSpec::Grid {
            dim: need_usize(gen.dim, "dim")?,
            side: need(gen.side, "side")?,
        }),
        "lattice_sphere" => Ok(GeneratorSpec::LatticeSphere {
            dim: need_usize(gen.dim, "dim")?,
            radius_sq: need(gen.radius_sq, "radius-sq")?,
        }),
        "sphere_pair" => Ok(GeneratorSpec::SpherePair {
            parts: parse_list(
                gen.parts
                    .as_deref()
                    .ok_or_else(|| Error::InvalidInput("--parts is required".into()))?,
                "parts",
            )?,
            radius_sq: need(gen.radius_sq, "radius-sq")?,
        }),
        "subspace_embed" => Ok(GeneratorSpec::SubspaceEmbed {
            parts: parse_list(
                gen.parts
                    .as_deref()
                    .ok_or_else(|| Error::InvalidInput("--parts is required".into()))?,
                "parts",
            )?,
            side: need(gen.side, "side")?,
            fixed: None,
        }),
        "random_cube" => Ok(GeneratorSpec::RandomCube {
            dim: need_usize(gen.dim, "dim")?,
            count: need_usize(gen.count, "count")?,
            range: need(gen.range, "range")?,
            seed,
        }),
        "jittered_grid" => Ok(GeneratorSpec::JitteredGrid {
            dim: need_usize(gen.dim, "dim")?,
            side: need(gen.side, "side")?,
            jitter: gen.jitter.unwrap_or(1),
            seed,
        }),
        other => Err(Error::InvalidInput(format!(
            "unknown generator kind `{other}`"
        ))),
    }
}

fn print_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).expect("stdout");
    if !text.ends_with('\n') {
        out.write_all(b"\n").expect("stdout");
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let bopts = BsetOptions {
        include_diagonal: true,
        pair_budget: cli.pair_budget as u128,
    };
    match &cli.command {
        Command::Generate { gen, out } => {
            let spec = spec_from_args(gen, cli.seed)?;
            let built = spec.build()?;
            match (out, &built.f) {
                (Some(path), None) => built.e.write_to_path(path)?,
                (Some(path), Some(f)) => {
                    built.e.write_to_path(path.with_extension("e"))?;
                    f.write_to_path(path.with_extension("f"))?;
                    eprintln!(
                        "pair written to {} and {}",
                        path.with_extension("e").display(),
                        path.with_extension("f").display()
                    );
                }
                (None, _) => {
                    let mut buf = Vec::new();
                    built.e.write_to(&mut buf)?;
                    if let Some(f) = &built.f {
                        f.write_to(&mut buf)?;
                    }
                    print_stdout(&String::from_utf8(buf).expect("ascii output"));
                }
            }
            Ok(())
        }
        Command::Bset {
            points,
            points2,
            parts,
            top,
            exclude_diagonal,
            projections,
        } => {
            let e = PointSet::read_from_path(points)?;
            let f = match points2 {
                Some(p) => Some(PointSet::read_from_path(p)?),
                None => None,
            };
            let partition = Partition::new(parse_list(parts, "parts")?)?;
            let f_ref = f.as_ref().unwrap_or(&e);
            let opts = BsetOptions {
                include_diagonal: !exclude_diagonal,
                ..bopts.clone()
            };
            let stats = b_set(&e, f_ref, &partition, &opts)?;
            match cli.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    stats.write_csv(&mut buf)?;
                    print_stdout(&String::from_utf8(buf).expect("ascii output"));
                }
                _ => {
                    let mut v = stats.to_json(*top);
                    v["strictly_positive_count"] = stats.strictly_positive_count().into();
                    if *projections {
                        let pb = projection_bounds(&e, &partition)?;
                        v["projection_bounds"] = serde_json::json!({
                            "delta_sizes": pb.delta_sizes,
                            "projected_sizes": pb.projected_sizes,
                            "bound": pb.bound,
                        });
                    }
                    print_stdout(&serde_json::to_string_pretty(&v).expect("json"));
                }
            }
            Ok(())
        }
        Command::Energy {
            points,
            s,
            threshold,
            thin_first,
        } => {
            let e = PointSet::read_from_path(points)?;
            let thin = separate_thin(&e, *s)?;
            let report = if *thin_first {
                energy_with_threshold(&thin.kept, *s, *threshold)?
            } else {
                energy_with_threshold(&e, *s, *threshold)?
            };
            let sep = min_separation(&e)?;
            print_stdout(
                &serde_json::to_string_pretty(&report.to_json(Some(sep), Some(&thin)))
                    .expect("json"),
            );
            Ok(())
        }
        Command::Pigeonhole {
            points,
            parts,
            block,
        } => {
            let e = PointSet::read_from_path(points)?;
            let partition = Partition::new(parse_list(parts, "parts")?)?;
            if *block == 0 || *block > partition.num_blocks() {
                return Err(Error::BlockOutOfRange {
                    index: *block,
                    blocks: partition.num_blocks(),
                });
            }
            let b = block - 1;
            let profile = richness(&e, &partition, b)?;
            let hist = profile.histogram(&e, &partition)?;
            let reg = extract_regular(&e, &partition, b)?;
            match cli.format {
                Format::Csv => {
                    let mut s = String::from("class_low,class_high,fiber_count,point_count\n");
                    for row in &hist {
                        s.push_str(&format!(
                            "{},{},{},{}\n",
                            row.class_low, row.class_high, row.fiber_count, row.point_count
                        ));
                    }
                    print_stdout(&s);
                }
                _ => {
                    let v = serde_json::json!({
                        "block": block,
                        "n": e.len(),
                        "max_richness": profile.max_value,
                        "histogram": hist.iter().map(|r| serde_json::json!({
                            "class_low": r.class_low,
                            "class_high": r.class_high,
                            "fiber_count": r.fiber_count,
                            "point_count": r.point_count,
                        })).collect::<Vec<_>>(),
                        "regular_subset": {
                            "size": reg.points.len(),
                            "richness_level": reg.richness_level,
                            "class_bounds": [reg.class_bounds.0, reg.class_bounds.1],
                        },
                    });
                    print_stdout(&serde_json::to_string_pretty(&v).expect("json"));
                }
            }
            Ok(())
        }
        Command::Scan {
            config,
            kind,
            dim,
            range,
            parts,
            ladder,
        } => {
            let cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str::<ScanConfig>(&text)
                        .map_err(|e| Error::InvalidInput(format!("bad config: {e}")))?
                }
                None => {
                    let kind = kind
                        .clone()
                        .ok_or_else(|| Error::InvalidInput("need --config or --kind".into()))?;
                    let parts_s = parts
                        .clone()
                        .ok_or_else(|| Error::InvalidInput("--parts is required".into()))?;
                    let ladder_s = ladder
                        .clone()
                        .ok_or_else(|| Error::InvalidInput("--ladder is required".into()))?;
                    let ladder: Vec<u64> = parse_list(&ladder_s, "ladder")?;
                    let first = *ladder
                        .first()
                        .ok_or_else(|| Error::InvalidInput("ladder must not be empty".into()))?;
                    let gen = GenArgs {
                        kind,
                        dim: *dim,
                        side: Some(first),
                        count: Some(first as usize),
                        range: *range,
                        radius_sq: Some(first),
                        parts: Some(parts_s.clone()),
                        jitter: None,
                    };
                    ScanConfig {
                        generator: spec_from_args(&gen, cli.seed)?,
                        ladder,
                        partition: parse_list(&parts_s, "parts")?,
                    }
                }
            };
            let opts = ScanOptions {
                diagonal: if cli.include_diagonal {
                    DiagonalConvention::Included
                } else {
                    DiagonalConvention::Excluded
                },
                pair_budget: cli.pair_budget as u128,
                progress: true,
            };
            let out = scan(&cfg, &opts, &CompareOptions::default())?;
            match cli.format {
                Format::Csv => {
                    let mut s = String::from("size,n,b_count\n");
                    for m in out["measurements"].as_array().unwrap() {
                        s.push_str(&format!("{},{},{}\n", m["size"], m["n"], m["b_count"]));
                    }
                    print_stdout(&s);
                }
                _ => print_stdout(&serde_json::to_string_pretty(&out).expect("json")),
            }
            Ok(())
        }
        Command::Exponents { parts } => {
            let partition = Partition::new(parse_list(parts, "parts")?)?;
            let table = exponent_report(&partition)?;
            match cli.format {
                Format::Table => print_stdout(&table.to_table()),
                _ => print_stdout(&serde_json::to_string_pretty(&table.to_json()).expect("json")),
            }
            Ok(())
        }
        Command::Check { sizes } => {
            let sizes: Vec<usize> = match sizes {
                Some(s) => parse_list(s, "sizes")?,
                None => vec![],
            };
            let report = check_suite(cli.seed, &sizes);
            match cli.format {
                Format::Json => {
                    print_stdout(&serde_json::to_string_pretty(&report.to_json()).expect("json"))
                }
                _ => print_stdout(&report.render()),
            }
            if !report.all_passed() {
                return Err(Error::InvariantViolation("check suite failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::InvariantViolation(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
