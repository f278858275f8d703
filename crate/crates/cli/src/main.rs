//! Command-line front end: set classification, the two symbolic-point
//! builders with trace writing and re-validation, the product-recurrence
//! experiment harness, finite-semigroup reports, and density calculators.
//!
//! Exit codes: 0 = verified, 2 = refuted / failed at horizon, 3 = input
//! error, 4 = horizon exhausted / inconclusive.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use retlab_core::ambient::Ambient;
use retlab_core::cert::PointFile;
use retlab_core::chain::chain_validate;
use retlab_core::classify::{classify_pws, classify_syndetic, classify_thick, VerdictStatus};
use retlab_core::construct::{
    build_group, build_n0, check_group_trace, check_n0_trace, BlockScheduleSupplier,
    DefaultN0Supplier, DefaultP1, DefaultP2, GroupTrace, N0Trace, StageSupplier,
};
use retlab_core::density::{banach_density, upper_density, FolnerSeq};
use retlab_core::dsl::{parse_chain, parse_family, parse_set};
use retlab_core::error::SetError;
use retlab_core::family::Family;
use retlab_core::semigroup::{verify_section5, FiniteSemigroup};
use retlab_core::setexpr::SetExpr;
use retlab_core::subshift::{joint_return, Cylinder, SymbolicPoint};

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_HORIZON: u8 = 4;

#[derive(Parser)]
#[command(
    name = "retlab",
    about = "Return-time set laboratory: classifiers, builders, and finite semigroup algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output file for the JSON artifact (written atomically).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed recorded in emitted artifacts (sweeps are seed-stamped).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a set expression as thick / syndetic / piecewise syndetic.
    Classify {
        #[arg(long, value_parser = parse_ambient)]
        ambient: Ambient,
        #[arg(long)]
        set: String,
        /// Property: thick | syndetic | pws.
        #[arg(long)]
        prop: String,
        #[arg(long, default_value_t = 1000)]
        horizon: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Run the inductive builder over N0 and re-validate its trace.
    ConstructN0 {
        /// Chain descriptor, e.g. `const:ep:0,2,{0}` or `scaled:2`.
        #[arg(long)]
        chain: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 10_000)]
        horizon: u32,
        /// Stage supplier: `default` or `blocks:<spacing>,<width>`.
        #[arg(long, default_value = "default")]
        supplier: String,
        /// Directory receiving trace and point files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the group builder over Z / Z2 / F2 and re-validate its trace.
    ConstructG {
        #[arg(long, value_parser = parse_ambient)]
        ambient: Ambient,
        #[arg(long)]
        chain: String,
        /// Declared family of the chain: ps | inf.
        #[arg(long, default_value = "ps")]
        family: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 1000)]
        ball: u32,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-validate an emitted trace file.
    CheckTrace {
        /// Trace kind: n0 | group.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        trace: PathBuf,
        /// Chain descriptor the trace was built from.
        #[arg(long)]
        chain: String,
        /// Family for group traces.
        #[arg(long, default_value = "ps")]
        family: String,
        #[arg(long, value_parser = parse_ambient, default_value = "N0")]
        ambient: Ambient,
    },
    /// Joint-return experiment for a product pair (finite-horizon
    /// demonstration).
    ExperimentProduct {
        #[arg(long, value_parser = parse_ambient)]
        ambient: Ambient,
        /// Point descriptor: ones | zeros | ind:<set> | file:<path>.
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 200)]
        horizon: u32,
        /// Depth of the cylinder grid.
        #[arg(long, default_value_t = 3)]
        basis: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Ideal structure of a finite semigroup from a CSV table.
    Semigroup {
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Upper density (Følner boxes) or upper Banach density of a set.
    Density {
        #[arg(long, value_parser = parse_ambient)]
        ambient: Ambient,
        #[arg(long)]
        set: String,
        /// Følner shape (only `boxes` is built in).
        #[arg(long, default_value = "boxes")]
        folner: String,
        /// Compute the Banach density instead (over Z).
        #[arg(long, default_value_t = false)]
        banach: bool,
        #[arg(long, default_value_t = 256)]
        n_max: u32,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_ambient(s: &str) -> Result<Ambient, String> {
    match s {
        "N0" | "n0" => Ok(Ambient::N0),
        "Z" | "z" => Ok(Ambient::Z),
        "Z2" | "z2" => Ok(Ambient::Z2),
        "F2" | "f2" => Ok(Ambient::F2),
        other => Err(format!("unknown ambient `{other}` (N0 | Z | Z2 | F2)")),
    }
}

/// Atomic write: temp file in the same directory, then rename.
fn write_atomic(path: &Path, data: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, data)?;
    std::fs::rename(&tmp, path)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(value).expect("serializable");
    println!("{json}");
    if let Some(path) = out {
        write_atomic(path, &json)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Stamped<T: Serialize> {
    schema: String,
    seed: u64,
    #[serde(flatten)]
    payload: T,
}

fn stamp<T: Serialize>(payload: T, seed: u64) -> Stamped<T> {
    Stamped {
        schema: "rl-cert-1".into(),
        seed,
        payload,
    }
}

fn parse_point(am: Ambient, desc: &str) -> Result<SymbolicPoint, String> {
    if desc == "ones" {
        return Ok(SymbolicPoint::constant(am, true));
    }
    if desc == "zeros" {
        return Ok(SymbolicPoint::constant(am, false));
    }
    if let Some(rest) = desc.strip_prefix("ind:") {
        let expr = parse_set(am, rest).map_err(|e| e.to_string())?;
        return Ok(SymbolicPoint::indicator(am, expr));
    }
    if let Some(path) = desc.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let file: PointFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        if file.ambient != am {
            return Err(format!("point file is over {}, not {am}", file.ambient));
        }
        return Ok(file.restore());
    }
    Err(format!(
        "unknown point descriptor `{desc}` (ones | zeros | ind:<set> | file:<path>)"
    ))
}

fn classify_exit(status: VerdictStatus) -> u8 {
    match status {
        VerdictStatus::CertifiedYes => EXIT_OK,
        VerdictStatus::CertifiedNo => EXIT_REFUTED,
        VerdictStatus::Inconclusive => EXIT_HORIZON,
    }
}

fn set_error_exit(e: &SetError) -> u8 {
    match e {
        SetError::Horizon(_) | SetError::HorizonExceeded { .. } => EXIT_HORIZON,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Classify {
            ambient,
            set,
            prop,
            horizon,
            common,
        } => {
            let expr = parse_set(ambient, &set).map_err(|e| e.to_string())?;
            let verdict = match prop.as_str() {
                "thick" => classify_thick(ambient, &expr, horizon),
                "syndetic" => classify_syndetic(ambient, &expr, horizon),
                "pws" | "ps" => classify_pws(ambient, &expr, horizon),
                other => return Err(format!("unknown property `{other}`")),
            };
            match verdict {
                Ok(v) => {
                    emit(&stamp(&v, common.seed), common.out.as_deref())
                        .map_err(|e| e.to_string())?;
                    Ok(classify_exit(v.status))
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(set_error_exit(&e))
                }
            }
        }
        Command::ConstructN0 {
            chain,
            depth,
            horizon,
            supplier,
            out_dir,
            common,
        } => {
            let presentation = parse_chain(Ambient::N0, Family::PiecewiseSyndetic, &chain)
                .map_err(|e| e.to_string())?;
            let target = presentation.set(1);
            if depth == 0 {
                // Vacuous build: the indicator of the identity.
                let z = SymbolicPoint::indicator(
                    Ambient::N0,
                    SetExpr::finite([Ambient::N0.identity()]),
                );
                let point =
                    PointFile::capture(&z, horizon, common.seed).map_err(|e| e.to_string())?;
                if let Some(dir) = &out_dir {
                    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
                    let json = serde_json::to_string_pretty(&point).unwrap();
                    write_atomic(&dir.join("point.json"), &json).map_err(|e| e.to_string())?;
                }
                println!("depth 0: point = indicator of the identity");
                return Ok(EXIT_OK);
            }
            let cert = chain_validate(&presentation, depth, 3, horizon.min(2000))
                .map_err(|e| e.to_string())?;
            if !cert.passed {
                eprintln!(
                    "chain validation failed: {}",
                    serde_json::to_string(&cert.failures).unwrap()
                );
                return Ok(EXIT_REFUTED);
            }
            let block_supplier: Box<dyn StageSupplier> =
                if let Some(rest) = supplier.strip_prefix("blocks:") {
                    let mut parts = rest.splitn(2, ',');
                    let spacing = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or("bad supplier spec")?;
                    let width = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or("bad supplier spec")?;
                    Box::new(BlockScheduleSupplier { spacing, width })
                } else {
                    Box::new(DefaultN0Supplier)
                };
            let built = build_n0(&target, &chain, block_supplier.as_ref(), depth, horizon);
            let (z, trace) = match built {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("builder stage failure: {e}");
                    return Ok(set_error_exit(&e));
                }
            };
            let report = check_n0_trace(&trace, &target).map_err(|e| e.to_string())?;
            let point = PointFile::capture(&z, horizon, common.seed).map_err(|e| e.to_string())?;
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
                write_atomic(
                    &dir.join("trace.json"),
                    &serde_json::to_string_pretty(&trace).unwrap(),
                )
                .map_err(|e| e.to_string())?;
                write_atomic(
                    &dir.join("point.json"),
                    &serde_json::to_string_pretty(&point).unwrap(),
                )
                .map_err(|e| e.to_string())?;
            }
            emit(&stamp(&report, common.seed), common.out.as_deref())
                .map_err(|e| e.to_string())?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::ConstructG {
            ambient,
            chain,
            family,
            depth,
            ball,
            out_dir,
            common,
        } => {
            let fam = parse_family(&family).map_err(|e| e.to_string())?;
            let presentation = parse_chain(ambient, fam, &chain).map_err(|e| e.to_string())?;
            let cert = chain_validate(&presentation, depth, 3, ball.min(100))
                .map_err(|e| e.to_string())?;
            if !cert.passed {
                eprintln!(
                    "chain validation failed: {}",
                    serde_json::to_string(&cert.failures).unwrap()
                );
                return Ok(EXIT_REFUTED);
            }
            let built = build_group(&presentation, &DefaultP1, &DefaultP2, depth, ball);
            let (z, trace) = match built {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("builder stage failure: {e}");
                    return Ok(set_error_exit(&e));
                }
            };
            let report = check_group_trace(&trace, &presentation).map_err(|e| e.to_string())?;
            let point = PointFile::capture(&z, ball, common.seed).map_err(|e| e.to_string())?;
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
                write_atomic(
                    &dir.join("trace.json"),
                    &serde_json::to_string_pretty(&trace).unwrap(),
                )
                .map_err(|e| e.to_string())?;
                write_atomic(
                    &dir.join("point.json"),
                    &serde_json::to_string_pretty(&point).unwrap(),
                )
                .map_err(|e| e.to_string())?;
            }
            emit(&stamp(&report, common.seed), common.out.as_deref())
                .map_err(|e| e.to_string())?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::CheckTrace {
            kind,
            trace,
            chain,
            family,
            ambient,
        } => {
            let text = std::fs::read_to_string(&trace).map_err(|e| e.to_string())?;
            match kind.as_str() {
                "n0" => {
                    let trace: N0Trace = serde_json::from_str(&text).map_err(|e| e.to_string())?;
                    let presentation =
                        parse_chain(Ambient::N0, Family::PiecewiseSyndetic, &chain)
                            .map_err(|e| e.to_string())?;
                    let report = check_n0_trace(&trace, &presentation.set(1))
                        .map_err(|e| e.to_string())?;
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    Ok(if report.passed() { EXIT_OK } else { EXIT_REFUTED })
                }
                "group" => {
                    let trace: GroupTrace =
                        serde_json::from_str(&text).map_err(|e| e.to_string())?;
                    let fam = parse_family(&family).map_err(|e| e.to_string())?;
                    let presentation =
                        parse_chain(ambient, fam, &chain).map_err(|e| e.to_string())?;
                    let report =
                        check_group_trace(&trace, &presentation).map_err(|e| e.to_string())?;
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    Ok(if report.passed() { EXIT_OK } else { EXIT_REFUTED })
                }
                other => Err(format!("unknown trace kind `{other}`")),
            }
        }
        Command::ExperimentProduct {
            ambient,
            x,
            y,
            horizon,
            basis,
            common,
        } => {
            let px = parse_point(ambient, &x).map_err(|e| e.to_string())?;
            let py = parse_point(ambient, &y).map_err(|e| e.to_string())?;
            match experiment_product(ambient, &px, &py, basis, horizon) {
                Ok(report) => {
                    let outcome = report.outcome.clone();
                    emit(&stamp(&report, common.seed), common.out.as_deref())
                        .map_err(|e| e.to_string())?;
                    Ok(match outcome.as_str() {
                        "witnessed" => EXIT_OK,
                        "refuted-at-horizon" => EXIT_REFUTED,
                        _ => EXIT_HORIZON,
                    })
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(set_error_exit(&e))
                }
            }
        }
        Command::Semigroup { table, common } => {
            let text = std::fs::read_to_string(&table).map_err(|e| e.to_string())?;
            let s = match FiniteSemigroup::from_csv(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_INPUT);
                }
            };
            #[derive(Serialize)]
            struct SemigroupOut {
                structure: retlab_core::semigroup::IdealStructure,
                section5: retlab_core::semigroup::Section5Report,
            }
            let out = SemigroupOut {
                structure: s.ideal_structure(),
                section5: verify_section5(&s),
            };
            let ok = out.section5.all_passed;
            let mut stamped = stamp(&out, common.seed);
            stamped.schema = "rl-sgp-1".into();
            emit(&stamped, common.out.as_deref()).map_err(|e| e.to_string())?;
            Ok(if ok { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::Density {
            ambient,
            set,
            folner,
            banach,
            n_max,
            common,
        } => {
            let expr = parse_set(ambient, &set).map_err(|e| e.to_string())?;
            if banach {
                if ambient != Ambient::Z {
                    return Err("Banach density is computed over Z".into());
                }
                let report = banach_density(&expr, n_max).map_err(|e| e.to_string())?;
                emit(&stamp(&report, common.seed), common.out.as_deref())
                    .map_err(|e| e.to_string())?;
                return Ok(EXIT_OK);
            }
            if folner != "boxes" {
                return Err("only the `boxes` Følner shape is built in".into());
            }
            let seq = FolnerSeq::boxes(ambient).map_err(|e| e.to_string())?;
            let report = upper_density(&expr, &seq, n_max as usize).map_err(|e| e.to_string())?;
            emit(&stamp(&report, common.seed), common.out.as_deref())
                .map_err(|e| e.to_string())?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct ProductReport {
    label: String,
    outcome: String,
    /// Joint return to the [1] x [1] cylinders on the ball.
    joint_one: Vec<String>,
    /// Sizes of the joint returns across the cylinder grid r = 1..basis.
    grid_sizes: Vec<(u32, u64)>,
    horizon: u32,
}

fn experiment_product(
    am: Ambient,
    x: &SymbolicPoint,
    y: &SymbolicPoint,
    basis: u32,
    horizon: u32,
) -> Result<ProductReport, SetError> {
    let one = Cylinder::one(am);
    let joint = joint_return(x, y, &one, &one, horizon)?;
    let mut grid_sizes = Vec::new();
    for r in 1..=basis {
        let cx = x.pattern_cylinder(r)?;
        let cy = y.pattern_cylinder(r)?;
        let j = joint_return(x, y, &cx, &cy, horizon)?;
        grid_sizes.push((r, j.len() as u64));
    }
    let identity_only = joint.len() == 1 && joint.contains(&am.identity());
    // Witnessed when every grid entry returns beyond the identity.
    let witnessed = !identity_only && grid_sizes.iter().all(|(_, n)| *n >= 2);
    let outcome = if identity_only {
        "refuted-at-horizon"
    } else if witnessed {
        "witnessed"
    } else {
        "inconclusive"
    };
    let joint_one: Vec<String> = joint.iter().take(64).map(|e| e.to_string()).collect();
    Ok(ProductReport {
        label: "finite-horizon demonstration".into(),
        outcome: outcome.into(),
        joint_one,
        grid_sizes,
        horizon,
    })
}
