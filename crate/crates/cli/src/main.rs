use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wittlift_core::corpus::{self, CorpusConfig};
use wittlift_core::endo::{etale_family, triangular_example};
use wittlift_core::pipeline::{self, RunOptions};
use wittlift_core::specfile::{SpecFile, Task};
use wittlift_core::{Endo, Error};

/// Decide whether an endomorphism of a Weyl algebra over F_{p^m} lifts to
/// the length-two Witt vectors.
#[derive(Parser)]
#[command(name = "wittlift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the input and check the commutation relations.
    Validate(FileArgs),
    /// Obstruction matrix and Poisson, étale and degree-bound flags.
    Analyze(FileArgs),
    /// Construct an explicit lift, or report the obstruction.
    Lift(FileArgs),
    /// Solve the gamma_i / f_i equations and check the symmetry criterion.
    Gamma(FileArgs),
    /// Trace and operator identities in the matrix model.
    TraceCheck(FileArgs),
    /// Generate seeded random endomorphisms and analyse each.
    Corpus(CorpusArgs),
    /// Run the built-in example endomorphisms and check their known flags.
    Selftest(OutArgs),
}

#[derive(Args)]
struct OutArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Include wall-clock timings (makes output nondeterministic).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct FileArgs {
    #[arg(long)]
    input: PathBuf,
    /// Extra tasks, comma separated (validate, analyze, oracle, gamma, lift, trace, all).
    #[arg(long)]
    task: Option<String>,
    /// Term budget for the obstruction computation.
    #[arg(long)]
    budget: Option<u128>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Restrict to one characteristic (default: 2, 3 and 5).
    #[arg(long)]
    p: Option<u32>,
    /// Restrict to one n (default: 1 and 2).
    #[arg(long)]
    n: Option<usize>,
    /// Tasks run on every element.
    #[arg(long, default_value = "analyze,oracle,gamma")]
    task: String,
    #[arg(long)]
    budget: Option<u128>,
    #[command(flatten)]
    out: OutArgs,
}

fn emit(out: &OutArgs, doc: &str) -> Result<(), Error> {
    match &out.json_out {
        Some(path) => fs::write(path, format!("{doc}\n")).map_err(|e| Error::Input(format!("{}: {e}", path.display()))),
        None => {
            println!("{doc}");
            Ok(())
        }
    }
}

fn fail(out: &OutArgs, err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    let doc = serde_json::to_string_pretty(&pipeline::error_report(err)).expect("serialisable");
    let _ = emit(out, &doc);
    ExitCode::from(err.exit_code() as u8)
}

fn run_file(args: &FileArgs, base: Task) -> ExitCode {
    let result = (|| {
        let text = fs::read_to_string(&args.input)
            .map_err(|e| Error::Input(format!("{}: {e}", args.input.display())))?;
        let spec = SpecFile::parse(&text)?;
        let mut tasks = vec![base];
        if let Some(list) = &args.task {
            tasks.extend(Task::parse_list(list)?);
        }
        let opts = RunOptions {
            tasks: Some(tasks),
            budget: args.budget,
            timings: args.out.timings,
        };
        let report = pipeline::run(&spec, &opts)?;
        emit(&args.out, &report.to_json())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&args.out, &e),
    }
}

fn corpus_entry(idx: usize, e: &Endo, tasks: &[Task], timings: bool) -> Value {
    match pipeline::run_endo(e, tasks, timings) {
        Ok(r) => {
            let mut v = serde_json::to_value(&r).expect("serialisable");
            v["index"] = json!(idx);
            v
        }
        Err(err) => {
            let mut v = pipeline::error_report(&err);
            v["index"] = json!(idx);
            v["images"] = json!(e.images().iter().map(|u| u.to_string()).collect::<Vec<_>>());
            v
        }
    }
}

fn run_corpus(args: &CorpusArgs) -> ExitCode {
    let result = (|| {
        let mut cfg = CorpusConfig {
            seed: args.seed,
            count: args.count,
            ..Default::default()
        };
        if let Some(p) = args.p {
            cfg.primes = vec![p];
        }
        if let Some(n) = args.n {
            cfg.ns = vec![n];
        }
        let tasks = Task::parse_list(&args.task)?;
        let endos: Vec<Endo> = corpus::generate(&cfg)?
            .into_iter()
            .map(|e| match args.budget {
                Some(b) => e.with_budget(b),
                None => e,
            })
            .collect();
        let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(endos.len().max(1));
        let mut entries: Vec<Value> = vec![Value::Null; endos.len()];
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let (endos, tasks) = (&endos, &tasks);
                    s.spawn(move || {
                        (w..endos.len())
                            .step_by(workers)
                            .map(|i| (i, corpus_entry(i, &endos[i], tasks, args.out.timings)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, v) in h.join().expect("worker panicked") {
                    entries[i] = v;
                }
            }
        });
        let errors: Vec<&Value> = entries.iter().filter(|v| v["status"] == "error").collect();
        let worst = errors.iter().filter_map(|v| v["error"]["exit_code"].as_i64()).max().unwrap_or(0);
        let liftable = entries.iter().filter(|v| v["analysis"]["liftable"] == true).count();
        let doc = json!({
            "schema": pipeline::SCHEMA_VERSION,
            "seed": args.seed,
            "count": entries.len(),
            "summary": { "liftable": liftable, "errors": errors.len() },
            "results": entries,
        });
        emit(&args.out, &serde_json::to_string_pretty(&doc).expect("serialisable"))?;
        Ok::<i64, Error>(worst)
    })();
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => fail(&args.out, &e),
    }
}

struct Fixture {
    name: String,
    endo: Endo,
    liftable: bool,
}

fn fixtures() -> Result<Vec<Fixture>, Error> {
    let mut out = Vec::new();
    for p in [3, 5] {
        out.push(Fixture {
            name: format!("triangular p={p}"),
            endo: triangular_example(p)?,
            liftable: false,
        });
    }
    for i in 0..3 {
        out.push(Fixture {
            name: format!("etale p=3 i={i}"),
            endo: etale_family(3, i)?,
            liftable: i < 2,
        });
    }
    for p in [2, 3, 5] {
        let alg = wittlift_core::Algebra::new(2, wittlift_core::Field::prime(p)?)?;
        out.push(Fixture {
            name: format!("identity p={p}"),
            endo: Endo::identity(&alg),
            liftable: true,
        });
    }
    Ok(out)
}

fn run_selftest(out: &OutArgs) -> ExitCode {
    let fx = match fixtures() {
        Ok(f) => f,
        Err(e) => return fail(out, &e),
    };
    let mut results = Vec::new();
    let mut all_ok = true;
    for f in &fx {
        let tasks = [Task::Analyze, Task::Oracle, Task::Gamma, Task::Lift];
        let (passed, detail) = match pipeline::run_endo(&f.endo, &tasks, out.timings) {
            Ok(r) => {
                let got = r.analysis.as_ref().is_some_and(|a| a.liftable);
                (got == f.liftable, format!("liftable = {got}"))
            }
            Err(e) => (false, e.to_string()),
        };
        all_ok &= passed;
        eprintln!("[{}] {}: {}", if passed { "PASS" } else { "FAIL" }, f.name, detail);
        results.push(json!({ "name": f.name, "passed": passed, "detail": detail }));
    }
    let doc = json!({ "schema": pipeline::SCHEMA_VERSION, "selftest": results });
    if let Err(e) = emit(out, &serde_json::to_string_pretty(&doc).expect("serialisable")) {
        return fail(out, &e);
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate(a) => run_file(a, Task::Validate),
        Command::Analyze(a) => run_file(a, Task::Analyze),
        Command::Lift(a) => run_file(a, Task::Lift),
        Command::Gamma(a) => run_file(a, Task::Gamma),
        Command::TraceCheck(a) => run_file(a, Task::Trace),
        Command::Corpus(a) => run_corpus(a),
        Command::Selftest(o) => run_selftest(o),
    }
}
