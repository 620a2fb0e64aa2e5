//! `uimlab`: identification minors of finite functions from the command line.
//!
//! Files hold 0-based symbols; tuples, pairs and permutations are printed
//! 1-based. Exit status is 0 on success, 1 when a check fails or a search
//! finds a candidate counterexample, 2 on bad usage or unreadable input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use uimlab::analysis::{
    self, Classification, SearchMode, SearchParams, SearchReport, SuiteParams, SuiteReport,
};
use uimlab::construct::{self, Built};
use uimlab::io::{self, AnyTable};
use uimlab::tuples::{ofo, IndexPair};
use uimlab::{FunctionTable, Table};

#[derive(Parser)]
#[command(
    name = "uimlab",
    version,
    about = "Identification minors of finite functions"
)]
struct Cli {
    /// Print structured output as canonical JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identification minors of a table.
    Minors {
        file: PathBuf,
        /// A single pair, 1-based, as `i,j`.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Whether a table has a unique identification minor.
    Check { file: PathBuf },
    /// Symmetry, decomposition and UIM category of a table.
    Classify { file: PathBuf },
    /// Order of first occurrence of the characters of a string.
    Ofo { string: String },
    #[command(subcommand)]
    Construct(Construct),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Classify every table of a shape, or a seeded sample of them.
    Search(SearchArgs),
}

#[derive(Subcommand)]
enum Construct {
    /// The explicit UIM function of arity k+1, or its partial analogue of
    /// arity m+1 when `--m` is below `--k`.
    Prop4 {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        alpha: u8,
        #[arg(long)]
        beta: u8,
        /// Codomain size.
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Assemble a table from a construction spec file.
    Gpphi {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(analysis::SUITES))]
    suite: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["exhaustive", "samples"]))]
struct SearchArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    b: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    #[arg(long, requires = "samples")]
    seed: Option<u64>,
    /// Write the full report as canonical JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// A failed command with its exit status.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(var) = std::env::var("UIMLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = var.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        usage(format!(
            "UIMLAB_THREADS must be a positive integer, got {var:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(usage)
}

fn run(cli: &Cli) -> Outcome {
    let out = Output { json: cli.json };
    match &cli.command {
        Command::Minors { file, pair } => minors(&out, file, pair.as_deref()),
        Command::Check { file } => check(&out, file),
        Command::Classify { file } => classify(&out, file),
        Command::Ofo { string } => {
            let chars: Vec<char> = string.chars().collect();
            let result: String = ofo(&chars).into_iter().collect();
            out.emit(&json!({ "input": string, "ofo": result }), || {
                result.clone()
            });
            Ok(true)
        }
        Command::Construct(c) => construct_cmd(&out, c),
        Command::Verify(v) => verify(&out, v),
        Command::Search(s) => search(&out, s),
    }
}

struct Output {
    json: bool,
}

impl Output {
    fn emit(&self, value: &Value, human: impl FnOnce() -> String) {
        if self.json {
            print!("{}", io::canonical(value));
        } else {
            println!("{}", human());
        }
    }
}

fn read_table(path: &Path) -> Result<AnyTable, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    io::parse_table(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_pair(s: &str) -> Result<IndexPair, Failure> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| usage(format!("--pair expects i,j, got {s:?}")))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("--pair expects i,j, got {s:?}")))
    };
    IndexPair::from_one_based(parse(a)?, parse(b)?).map_err(usage)
}

fn values_row(f: &FunctionTable) -> String {
    f.values()
        .iter()
        .map(u8::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn minors(out: &Output, file: &Path, pair: Option<&str>) -> Outcome {
    let f = read_table(file)?;
    let pairs = match pair {
        Some(p) => vec![parse_pair(p)?],
        None => IndexPair::all(f.arity()),
    };
    let mut entries = Vec::new();
    for p in pairs {
        let minor = uimlab::ftable::identification_minor(&f, p).map_err(usage)?;
        entries.push((p, minor));
    }
    let value = json!({
        "minors": entries
            .iter()
            .map(|(p, g)| json!({ "pair": p.one_based(), "table": io::table_value(g) }))
            .collect::<Vec<_>>()
    });
    out.emit(&value, || {
        entries
            .iter()
            .map(|(p, g)| format!("f_{p}: {}", values_row(g)))
            .collect::<Vec<_>>()
            .join("\n")
    });
    Ok(true)
}

fn check(out: &Output, file: &Path) -> Outcome {
    let f = read_table(file)?;
    let uim = analysis::has_uim(&f).map_err(usage)?;
    out.emit(&json!({ "unique_identification_minor": uim }), || {
        format!(
            "unique identification minor: {}",
            if uim { "yes" } else { "no" }
        )
    });
    Ok(uim)
}

fn classify(out: &Output, file: &Path) -> Outcome {
    let c = match read_table(file)? {
        AnyTable::Total(f) => analysis::classify(&f),
        AnyTable::Partial(f) => analysis::classify_partial(&f),
    }
    .map_err(usage)?;
    let value = serde_json::to_value(&c).expect("serializable");
    out.emit(&value, || describe_classification(&c));
    Ok(true)
}

fn describe_classification(c: &Classification) -> String {
    let yn = |b: bool| if b { "yes" } else { "no" };
    let mut lines = vec![
        format!("category: {}", c.category),
        format!("unique identification minor: {}", yn(c.has_uim)),
        format!("invariance group order: {}", c.shape.inv_group_order),
        format!("totally symmetric: {}", yn(c.shape.totally_symmetric)),
        format!(
            "2-set-transitive: {}{}",
            yn(c.shape.two_set_transitive),
            if c.degenerate_arity { " (arity 2)" } else { "" }
        ),
        format!("ofo-determined: {}", yn(c.shape.ofo_determined)),
        format!(
            "equivalent to ofo-determined: {}",
            yn(c.shape.equiv_ofo_determined)
        ),
    ];
    if let Some(s) = c.supp_determined {
        lines.push(format!("supp-determined: {}", yn(s)));
    }
    if let Some(r) = &c.restricted {
        lines.push(format!(
            "on tuples with a repeat: group order {}, 2-set-transitive {}, equivalent to ofo-determined {}",
            r.inv_group_order,
            yn(r.two_set_transitive),
            yn(r.equiv_ofo_determined)
        ));
    }
    lines.join("\n")
}

fn construct_cmd(out: &Output, c: &Construct) -> Outcome {
    let (built, output) = match c {
        Construct::Prop4 {
            k,
            m,
            alpha,
            beta,
            b,
            output,
        } => {
            let built = match m {
                Some(m) if m < k => {
                    construct::prop4_partial_function(*k, *m, *b, *alpha, *beta).map(Built::Partial)
                }
                Some(m) if m > k => {
                    return Err(usage(format!(
                        "--m must not exceed --k, got m = {m}, k = {k}"
                    )))
                }
                _ => construct::prop4_function(*k, *b, *alpha, *beta).map(Built::Total),
            };
            (built.map_err(usage)?, output)
        }
        Construct::Gpphi { spec, output } => {
            let text =
                fs::read_to_string(spec).map_err(|e| usage(format!("{}: {e}", spec.display())))?;
            let spec_value =
                io::parse_spec(&text).map_err(|e| usage(format!("{}: {e}", spec.display())))?;
            let violations = construct::validate(&spec_value);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                return Err(Failure {
                    code: 1,
                    message: format!("{}: {} violation(s)", spec.display(), violations.len()),
                });
            }
            (construct::build(&spec_value).map_err(usage)?, output)
        }
    };
    let text = match &built {
        Built::Total(f) => io::write_table(f),
        Built::Partial(f) => io::write_table(f),
    };
    match output {
        Some(path) => {
            write_or_print(Some(path), &text)?;
            let (n, len) = match &built {
                Built::Total(f) => (f.arity(), f.len()),
                Built::Partial(f) => (f.arity(), f.len()),
            };
            let value = json!({ "arity": n, "entries": len, "output": path.display().to_string() });
            out.emit(&value, || {
                format!("wrote {} (arity {n}, {len} entries)", path.display())
            });
        }
        None => write_or_print(None, &text)?,
    }
    Ok(true)
}

fn verify(out: &Output, v: &VerifyArgs) -> Outcome {
    let params = SuiteParams {
        k: v.k,
        b: v.b,
        n: v.n,
        m: v.m,
    };
    let report: SuiteReport = analysis::verify_suite(&v.suite, params).map_err(usage)?;
    let value = serde_json::to_value(&report).expect("serializable");
    out.emit(&value, || {
        let params: Vec<String> = report
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        match &report.counterexample {
            None => format!(
                "{} [{}]: pass ({} cases)",
                report.suite,
                params.join(" "),
                report.cases
            ),
            Some(c) => format!(
                "{} [{}]: FAIL after {} cases\ncounterexample: {c}",
                report.suite,
                params.join(" "),
                report.cases
            ),
        }
    });
    Ok(report.passed)
}

fn search(out: &Output, s: &SearchArgs) -> Outcome {
    let mode = match (s.exhaustive, s.samples, s.seed) {
        (true, None, None) => SearchMode::Exhaustive,
        (false, Some(samples), Some(seed)) => SearchMode::Sampled { samples, seed },
        _ => return Err(usage("give either --exhaustive or --samples with --seed")),
    };
    let params = SearchParams {
        k: s.k,
        b: s.b,
        n: s.n,
        mode,
    };
    let report = analysis::search(params).map_err(usage)?;
    if let Some(path) = &s.report {
        write_or_print(Some(path), &io::canonical(&report))?;
    }
    let value = serde_json::to_value(&report).expect("serializable");
    out.emit(&value, || describe_search(&report));
    let clean = report.potential_counterexamples == 0
        && report.theorem_violations.is_empty()
        && report.spot_checks.failures.is_empty();
    Ok(clean)
}

fn describe_search(r: &SearchReport) -> String {
    let p = &r.parameters;
    let mut lines = vec![format!(
        "k={} b={} n={}: {} tables classified in {} ms",
        p.k, p.b, p.n, r.tables_classified, r.timing.elapsed_ms
    )];
    for (c, count) in &r.categories {
        lines.push(format!("  {c:<8} {count}"));
    }
    let f = &r.flags;
    lines.push(format!(
        "  flags: uim {} totally-symmetric {} 2-set-transitive {} ofo {} ofo-equivalent {} supp {}",
        f.has_uim,
        f.totally_symmetric,
        f.two_set_transitive,
        f.ofo_determined,
        f.equiv_ofo_determined,
        f.supp_determined
    ));
    lines.push(format!(
        "  spot checks: {} performed, {} failed",
        r.spot_checks.performed,
        r.spot_checks.failures.len()
    ));
    if !r.theorem_violations.is_empty() {
        lines.push(format!(
            "  THEOREM VIOLATIONS at positions {:?}",
            r.theorem_violations
        ));
    }
    if r.conjecture_range {
        if r.potential_counterexamples == 0 {
            lines.push("  no OTHER tables with a unique identification minor for n > k + 1".into());
        } else {
            lines.push(format!(
                "  POTENTIAL CONJECTURE COUNTEREXAMPLES: {} OTHER tables with n > k + 1",
                r.potential_counterexamples
            ));
        }
    }
    for w in &r.other_witnesses {
        let row: Vec<String> = w.values.iter().map(u8::to_string).collect();
        lines.push(format!("  OTHER #{}: {}", w.position, row.join(" ")));
    }
    lines.join("\n")
}
