use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use urysohn::hyperspace::{hausdorff_ballmin, hausdorff_supinf, FiniteSubset};
use urysohn::injectivity::{embed_space, extend_one_point, ExtensionDocument, ExtensionProblem};
use urysohn::petals::{distance_to_petal, generate_heirs};
use urysohn::products::{lp_counterexample, Exponent};
use urysohn::spaces::validate_ultrametric;
use urysohn::suite::{self, SuiteConfig};
use urysohn::{Error, FiniteUltrametricSpace, Rational, RangeSet, UrysohnPoint};

#[derive(Parser)]
#[command(name = "urysohn", version, about = "Exact ultrametric spaces and the Urysohn map-space model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the ultrametric axioms of a space file.
    Validate { space: PathBuf },
    /// Embed a space into the model; prints label → point.
    Embed {
        space: PathBuf,
        /// Image of the first label (default: the empty map).
        #[arg(long)]
        basepoint: Option<PathBuf>,
    },
    /// Solve a one-point extension problem; prints the new point.
    Extend { problem: PathBuf },
    /// Hausdorff distance of two subsets by both algorithms.
    Hausdorff { first: PathBuf, second: PathBuf },
    /// Generate a truncated heir tree.
    Heirs {
        /// Comma-separated rationals; 0 is added if missing.
        #[arg(long, value_delimiter = ',', required = true)]
        range: Vec<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        branching: usize,
    },
    /// Print the non-injectivity certificate for the ℓp product.
    CertifyLp {
        /// A rational at least 1, or `inf`.
        #[arg(long)]
        p: String,
    },
    /// Run the seeded property suites.
    Check {
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Maximum points per generated space or subset.
        #[arg(long, default_value_t = 8)]
        size: usize,
        /// Fraction of the full case counts to run.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Run only the named suite.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Distance from a point to the piece with support in the given range.
    PetalDistance {
        point: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        range: Vec<String>,
    },
}

enum Failure {
    /// The command ran but its answer is negative (invalid space).
    Negative,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => 2,
        Error::Postcondition(_) => 4,
        _ => 3,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        location: format!("{}:{}:{}", path.display(), e.line(), e.column()),
        message: e.to_string(),
    })
}

fn parse_range(values: &[String]) -> Result<RangeSet, Error> {
    let parsed = values
        .iter()
        .map(|v| v.trim().parse::<Rational>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RangeSet::from_values(parsed))
}

fn emit<T: serde::Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { space } => {
            let space: FiniteUltrametricSpace = read_json::<urysohn::spaces::SpaceDocument>(&space)?.try_into()?;
            let report = validate_ultrametric(&space);
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "kind": v.kind(),
                        "points": v.indices().iter().map(|&i| space.label(i)).collect::<Vec<_>>(),
                        "detail": v.describe(&space),
                    })
                })
                .collect();
            emit(&json!({ "ok": report.is_ok(), "violations": violations }));
            eprintln!("{} points, {} violations", space.len(), report.violations.len());
            if report.is_ok() {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
        Command::Embed { space, basepoint } => {
            let space: FiniteUltrametricSpace = read_json::<urysohn::spaces::SpaceDocument>(&space)?.try_into()?;
            let basepoint: Option<UrysohnPoint> = basepoint.as_deref().map(read_json).transpose()?;
            let embedding = embed_space(&space, basepoint.as_ref())?;
            emit(&embedding);
            eprintln!("embedded {} points", space.len());
            Ok(())
        }
        Command::Extend { problem } => {
            let problem: ExtensionProblem = read_json::<ExtensionDocument>(&problem)?.try_into()?;
            let t = extend_one_point(&problem)?;
            emit(&t);
            eprintln!("extended at θ = {}", problem.theta());
            Ok(())
        }
        Command::Hausdorff { first, second } => {
            let e: FiniteSubset = read_json(&first)?;
            let f: FiniteSubset = read_json(&second)?;
            let supinf = hausdorff_supinf(&e, &f);
            let ballmin = hausdorff_ballmin(&e, &f);
            emit(&json!({ "supinf": supinf, "ballmin": ballmin }));
            if supinf != ballmin {
                return Err(Error::Postcondition(format!("sup-inf {supinf} != ball-min {ballmin}")).into());
            }
            eprintln!("Hausdorff distance {supinf}");
            Ok(())
        }
        Command::Heirs { range, depth, branching } => {
            let s = parse_range(&range)?;
            let tree = generate_heirs(&s, depth, branching)?;
            emit(&tree);
            eprintln!("{} heirs over S = {s}", tree.nodes.len());
            Ok(())
        }
        Command::CertifyLp { p } => {
            let p: Exponent = p.parse()?;
            let cert = lp_counterexample(&p)?;
            emit(&cert);
            eprintln!("{}", cert.consistency_defect);
            Ok(())
        }
        Command::Check { seed, size, scale, suite: only } => {
            if size == 0 || scale.is_nan() || scale <= 0.0 {
                return Err(Error::InvalidArgument("size and scale must be positive".into()).into());
            }
            let config = SuiteConfig { seed, size, scale };
            let outcomes = match only {
                Some(name) => vec![suite::run_suite(&name, &config)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{name}`")))?],
                None => suite::run_all(&config),
            };
            for o in &outcomes {
                eprintln!(
                    "{} {} ({} cases, {} ms)",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.cases,
                    o.millis
                );
            }
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
            emit(&json!({ "seed": seed, "size": size, "suites": to_value(&outcomes) }));
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Postcondition(format!("suites failed: {}", failed.join(", "))).into())
            }
        }
        Command::PetalDistance { point, range } => {
            let x: UrysohnPoint = read_json(&point)?;
            let s = parse_range(&range)?;
            let projection = distance_to_petal(&x, &s);
            emit(&projection);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::FAILURE,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
