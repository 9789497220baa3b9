use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acs6::char_class::euler_number_lemma22;
use acs6::cstruct::{j_from_octonion_projective, recover_x, ComplexStructureR6};
use acs6::degree::{degree_on_rp7, mapping_degree, DegreeConfig, DegreeError, MapFamily};
use acs6::homotopy::{pi_j_s6, pi_xg, GroupExpr, Pi7Table};
use acs6::io::parse_matrix_json;
use acs6::suite::{
    run_suite, AggregateReport, SuiteError, SuiteOptions, SuiteReport, DEFAULT_TOLERANCE, SUITES,
};
use acs6::twistor::{companion, SO7Element};
use acs6::{Mode, Rational, Scalar};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "acs6",
    version,
    about = "Verification suites for octonions, complex structures on R^6 and the twistor space of S^6"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite, or all of them.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Sample count (default: per suite).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        /// Float-mode residual tolerance.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// CSV table of `π_m(S⁷)` values (columns m,group,source).
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Mapping degree by signed preimage counting.
    Degree {
        /// identity | squaring | power:k | conjugation | theta-circle | rp7-cube |
        /// cylinder-loop | cylinder-collapse, composed with `*`.
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Newton starts per pass.
        #[arg(long)]
        starts: Option<usize>,
        /// Require the map to be odd and report the degree on RP⁷.
        #[arg(long)]
        rp7: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Companion octonion of an 8×8 matrix in SO(7).
    Companion {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value = "float")]
        mode: Mode,
    },
    /// Recover x from a 6×6 complex structure J = J_x.
    Recover {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value = "float")]
        mode: Mode,
    },
    /// Chern-class computations.
    Chern {
        /// Euler number of the normal bundle of CP² in the Grassmannian.
        #[arg(long)]
        lemma22: bool,
        #[arg(long)]
        json: bool,
    },
    /// Homotopy groups of spaces of almost complex structures.
    Homotopy {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long)]
        k: i64,
        /// Required for `xg`.
        #[arg(long)]
        genus: Option<i64>,
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    S6,
    Xg,
}

/// A usage error (exit 2) or a failed computation (exit 1).
enum Failure {
    Usage(String),
    Failed(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn failed(e: impl ToString) -> Failure {
    Failure::Failed(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify {
            suite,
            samples,
            mode,
            tol,
            seed,
            json,
            table,
        } => verify(
            &suite,
            samples,
            mode,
            tol,
            seed,
            json.as_deref(),
            table.as_deref(),
        ),
        Command::Degree {
            map,
            trials,
            seed,
            starts,
            rp7,
            json,
        } => degree(&map, trials, seed, starts, rp7, json.as_deref()),
        Command::Companion { matrix, mode } => match mode {
            Mode::Exact => companion_cmd::<Rational>(&matrix),
            Mode::Float => companion_cmd::<f64>(&matrix),
        },
        Command::Recover { matrix, mode } => match mode {
            Mode::Exact => recover_cmd::<Rational>(&matrix),
            Mode::Float => recover_cmd::<f64>(&matrix),
        },
        Command::Chern { lemma22, json } => chern(lemma22, json),
        Command::Homotopy {
            space,
            k,
            genus,
            table,
        } => homotopy(space, k, genus, table.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_table(path: Option<&Path>) -> Result<Option<Pi7Table>, Failure> {
    path.map(|p| Pi7Table::from_path(p).map_err(|e| usage(format!("{}: {e}", p.display()))))
        .transpose()
}

fn print_suite(r: &SuiteReport) {
    let verdict = if r.passed() { "PASS" } else { "FAIL" };
    let mode = match r.mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    };
    let residual = r
        .max_residual
        .map(|x| format!(" max_residual={x:e}"))
        .unwrap_or_default();
    println!(
        "{:<16} {mode} {verdict} samples={} checks={} failures={}{residual} ({} ms)",
        r.suite,
        r.samples,
        r.checks,
        r.failures.len(),
        r.elapsed_ms
    );
    if let Some(degrees) = r.results.get("degrees").and_then(|d| d.as_object()) {
        let list: Vec<String> = degrees.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        println!("  degrees {}", list.join(" "));
    }
}

fn verify(
    suite: &str,
    samples: Option<usize>,
    mode: Mode,
    tolerance: f64,
    seed: u64,
    json: Option<&Path>,
    table: Option<&Path>,
) -> Result<bool, Failure> {
    let options = SuiteOptions {
        samples,
        mode,
        seed,
        tolerance,
        table: load_table(table)?,
    };
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        vec![suite]
    };
    let mut reports = Vec::new();
    for name in names {
        let r = run_suite(name, &options).map_err(|e| match e {
            SuiteError::UnknownSuite(_) => usage(format!("{e} (known: all, {})", SUITES.join(", "))),
            SuiteError::BadConfig(_) => usage(e),
        })?;
        print_suite(&r);
        reports.push(r);
    }
    let passed = reports.iter().all(SuiteReport::passed);
    if let Some(path) = json {
        if suite == "all" {
            write_json(
                path,
                &AggregateReport {
                    mode,
                    seed,
                    passed,
                    suites: reports,
                },
            )?;
        } else {
            write_json(path, &reports[0])?;
        }
    }
    Ok(passed)
}

fn degree(
    map: &str,
    trials: usize,
    seed: u64,
    starts: Option<usize>,
    rp7: bool,
    json: Option<&Path>,
) -> Result<bool, Failure> {
    let family: MapFamily = map.parse().map_err(usage)?;
    let mut config = DegreeConfig {
        trials,
        ..DegreeConfig::default()
    };
    if let Some(s) = starts {
        config.starts = s;
    }
    let on_rp7 = rp7 || family == MapFamily::Rp7Cube;
    let run = if on_rp7 { degree_on_rp7 } else { mapping_degree };
    let report = run(&family, seed, &config).map_err(|e| match e {
        DegreeError::BadConfig(_) | DegreeError::UnknownMap(_) => usage(e),
        e => failed(e),
    })?;
    let per_trial: Vec<String> = report
        .trials
        .iter()
        .map(|t| format!("{} ({} preimages)", t.degree, t.preimages.len()))
        .collect();
    let space = if on_rp7 { " on RP⁷" } else { "" };
    println!(
        "{}{space}: degree {}  trials: {}",
        report.map,
        report.degree,
        per_trial.join(", ")
    );
    if let Some(path) = json {
        write_json(path, &report)?;
    }
    Ok(true)
}

fn companion_cmd<S: Scalar>(path: &Path) -> Result<bool, Failure> {
    let m = parse_matrix_json::<S>(&read(path)?, 8, 8).map_err(usage)?;
    let l = SO7Element::new(m).map_err(usage)?;
    let c = companion(&l).map_err(failed)?;
    let out = json!({ "a": c.a.to_strings(), "residual": c.residual, "kernel_dim": c.kernel_dim });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    Ok(true)
}

fn recover_cmd<S: Scalar>(path: &Path) -> Result<bool, Failure> {
    let m = parse_matrix_json::<S>(&read(path)?, 6, 6).map_err(usage)?;
    let j = ComplexStructureR6::from_matrix(m).map_err(usage)?;
    let x = recover_x(&j).map_err(failed)?;
    let back = j_from_octonion_projective(&x).map_err(failed)?;
    let out = json!({
        "x": x.to_strings(),
        "unit": x.is_unit(),
        "round_trip": back.same_as(&j),
        "residual": back.max_abs_diff(&j),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    Ok(back.same_as(&j))
}

fn chern(lemma22: bool, json: bool) -> Result<bool, Failure> {
    if !lemma22 {
        return Err(usage("nothing to compute; pass --lemma22"));
    }
    let trace = euler_number_lemma22().map_err(failed)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&trace).expect("serializes"));
    } else {
        for line in &trace.lines {
            println!("{line}");
        }
    }
    Ok(trace.euler_number == 1)
}

fn homotopy(space: Space, k: i64, genus: Option<i64>, table: Option<&Path>) -> Result<bool, Failure> {
    let group: GroupExpr = match (space, genus) {
        (Space::S6, None) => pi_j_s6(k).map_err(usage)?,
        (Space::S6, Some(_)) => return Err(usage("--genus applies to --space xg only")),
        (Space::Xg, Some(g)) => pi_xg(g, k).map_err(usage)?,
        (Space::Xg, None) => return Err(usage("--space xg needs --genus")),
    };
    let group = match load_table(table)? {
        Some(t) => group.resolve(&t),
        None => group,
    };
    println!("{group}");
    println!("{}", serde_json::to_string(&group).expect("serializes"));
    Ok(true)
}
