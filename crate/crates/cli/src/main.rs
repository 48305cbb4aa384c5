use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use plci_core::dsep::d_connected;
use plci_core::experiment::{
    run_bench, summarize, write_records_csv, write_summary_csv, BenchConfig, Mode, BENCH_PROGRAM,
    PAIR_SAMPLING,
};
use plci_core::logic::{check_constraints, evaluate, stratify};
use plci_core::oracle::{format_rational, sweep, Sweep, DEFAULT_GUARD, DEFAULT_MAX_Z};
use plci_core::syntax::{parse_database, parse_params, parse_program, parse_query};
use plci_core::{
    CIQuery, Deadline, ExternalDatabase, FragmentReport, GroundingOptions, Instance, Oracle,
    ParameterAssignment, ProgramStructure,
};

#[derive(Parser)]
#[command(
    name = "plci",
    version,
    about = "Conditional independence in probabilistic logic programs"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Herbrand model of the internal part.
    Model(InputArgs),
    /// Check stratification, constraints and acyclicity.
    Check(InputArgs),
    /// Print the ground graph (DOT in text mode).
    GroundGraph(InputArgs),
    /// Print the ground structural equations.
    Equations(ParamArgs),
    /// Answer queries by d-separation.
    Dsep(DsepArgs),
    /// Answer queries by exact inference.
    Ci(CiArgs),
    /// Check membership in the completeness fragment.
    Fragment(FragmentArgs),
    /// Report d-separated triples that the exact oracle finds dependent.
    SweepSoundness(SweepArgs),
    /// Report d-connected triples that the exact oracle finds independent.
    SweepFaithfulness(SweepArgs),
    /// Run the random-DAG benchmark.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long, value_name = "FILE")]
    program: PathBuf,
    /// External database; empty when omitted.
    #[arg(long, value_name = "FILE")]
    database: Option<PathBuf>,
    /// Keep every grounding of the random predicates, not only typed ones.
    #[arg(long)]
    all_groundings: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Clause probabilities, `rcN = p` per line.
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    /// A query `indep(a, b, [z1, ...])`; repeatable.
    #[arg(long = "query", value_name = "QUERY")]
    query: Vec<String>,
    /// File with one query per line.
    #[arg(long, value_name = "FILE")]
    queries: Option<PathBuf>,
    /// Exit with status 1 unless every query is answered independent.
    #[arg(long)]
    assert: bool,
}

#[derive(Args)]
struct DsepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    queries: QueryArgs,
    #[arg(long, value_parser = humantime::parse_duration, value_name = "DUR")]
    timeout: Option<Duration>,
}

#[derive(Args)]
struct OracleArgs {
    /// Maximum number of error terms to enumerate.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: usize,
    #[arg(long, value_parser = humantime::parse_duration, value_name = "DUR")]
    timeout: Option<Duration>,
}

#[derive(Args)]
struct CiArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    queries: QueryArgs,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct FragmentArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Also check 0 < π(G) < 1 with the exact oracle when within the guard.
    #[arg(long)]
    proper: bool,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Largest conditioning set.
    #[arg(long, default_value_t = DEFAULT_MAX_Z)]
    max_z: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',', default_values_t = (1..=20).map(|i| 5 * i).collect::<Vec<usize>>())]
    sizes: Vec<usize>,
    /// Graphs per size.
    #[arg(long, default_value_t = 5)]
    graphs: usize,
    /// Query pairs per size.
    #[arg(long, default_value_t = 10)]
    pairs: usize,
    #[arg(long, default_value = "dsep")]
    mode: Mode,
    #[arg(long, env = "PLCI_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = humantime::parse_duration, default_value = "10s", value_name = "DUR")]
    timeout: Duration,
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write per-size median and maximum times as CSV.
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

/// Errors in the inputs, or a query that hit a resource limit.
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

type Run = std::result::Result<bool, InputError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<plci_core::Error>() {
                Some(
                    plci_core::Error::GuardExceeded { .. }
                    | plci_core::Error::Timeout
                    | plci_core::Error::SizeGuard { .. },
                ) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Run {
    match command {
        Command::Model(a) => cmd_model(&a),
        Command::Check(a) => cmd_check(&a),
        Command::GroundGraph(a) => cmd_ground_graph(&a),
        Command::Equations(a) => cmd_equations(&a),
        Command::Dsep(a) => cmd_dsep(&a),
        Command::Ci(a) => cmd_ci(&a),
        Command::Fragment(a) => cmd_fragment(&a),
        Command::SweepSoundness(a) => cmd_sweep(&a, Sweep::Soundness),
        Command::SweepFaithfulness(a) => cmd_sweep(&a, Sweep::Faithfulness),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(input: &InputArgs) -> Result<(ProgramStructure, ExternalDatabase)> {
    let program = parse_program(&read(&input.program)?)
        .with_context(|| format!("in {}", input.program.display()))?;
    let text = match &input.database {
        Some(p) => read(p)?,
        None => String::new(),
    };
    let db = parse_database(&text, &program).with_context(|| match &input.database {
        Some(p) => format!("in {}", p.display()),
        None => "in empty database".to_string(),
    })?;
    Ok((program, db))
}

fn options(input: &InputArgs) -> GroundingOptions {
    GroundingOptions {
        all_groundings: input.all_groundings,
    }
}

fn ground(input: &InputArgs) -> Result<Instance> {
    let (program, db) = load(input)?;
    Ok(Instance::new(&program, &db, options(input))?)
}

fn params(args: &ParamArgs, program: &ProgramStructure) -> Result<ParameterAssignment> {
    match &args.params {
        Some(p) => {
            Ok(parse_params(&read(p)?, program).with_context(|| format!("in {}", p.display()))?)
        }
        None => Ok(ParameterAssignment::from_program(program)),
    }
}

fn deadline(timeout: Option<Duration>) -> Deadline {
    timeout.map_or_else(Deadline::none, Deadline::after)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    emit(out, &s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_only_json(format: Format, what: &str) -> Result<()> {
    if format == Format::Csv {
        anyhow::bail!("{what} has no CSV output; use text or json");
    }
    Ok(())
}

fn queries(args: &QueryArgs, program: &ProgramStructure) -> Result<Vec<CIQuery>> {
    let mut texts = args.query.clone();
    if let Some(p) = &args.queries {
        texts.extend(
            read(p)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('%') && !l.starts_with('#'))
                .map(str::to_string),
        );
    }
    if texts.is_empty() {
        anyhow::bail!("no queries given; use --query or --queries");
    }
    texts
        .iter()
        .map(|t| parse_query(t, program).with_context(|| format!("query `{t}`")))
        .collect()
}

fn cmd_model(a: &InputArgs) -> Run {
    let (program, db) = load(a)?;
    let model = evaluate(&program, &db)?;
    let atoms: Vec<String> = model.atoms().iter().map(|x| x.to_string()).collect();
    match a.format {
        Format::Text => {
            let mut s = String::new();
            for x in &atoms {
                s.push_str(x);
                s.push_str(".\n");
            }
            emit(&a.out, &s)?;
        }
        Format::Json => emit_json(&a.out, &json!({ "atoms": atoms }))?,
        Format::Csv => {
            let mut s = String::from("atom\n");
            for x in &atoms {
                s.push_str(&csv_field(x));
                s.push('\n');
            }
            emit(&a.out, &s)?;
        }
    }
    Ok(true)
}

fn cmd_check(a: &InputArgs) -> Run {
    csv_only_json(a.format, "check")?;
    let (program, db) = load(a)?;
    let strata = stratify(&program)?;
    let model = evaluate(&program, &db)?;
    let report = check_constraints(&model, &program);
    let inst = Instance::from_model(&program, &db, model, options(a))?;
    let cycle: Option<Vec<String>> = inst.graph().check_acyclic().err().map(|c| {
        c.iter()
            .map(|&i| inst.graph().atom(i).to_string())
            .collect()
    });
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    match a.format {
        Format::Json => emit_json(
            &a.out,
            &json!({
                "strata": strata.strata.len(),
                "constraints_ok": report.ok,
                "violations": violations,
                "acyclic": cycle.is_none(),
                "cycle": cycle,
                "ground_variables": inst.graph().len(),
                "edges": inst.graph().edge_count(),
                "error_terms": inst.error_term_count(),
            }),
        )?,
        _ => {
            let mut s = format!("stratified: yes ({} strata)\n", strata.strata.len());
            if report.ok {
                s.push_str("constraints: ok\n");
            } else {
                s.push_str(&format!("constraints: {} violation(s)\n", violations.len()));
                for v in &violations {
                    s.push_str(&format!("  {v}\n"));
                }
            }
            match &cycle {
                None => s.push_str("acyclic: yes\n"),
                Some(c) => s.push_str(&format!("acyclic: no (cycle {})\n", c.join(" -> "))),
            }
            s.push_str(&format!(
                "ground variables: {}\nedges: {}\nerror terms: {}\n",
                inst.graph().len(),
                inst.graph().edge_count(),
                inst.error_term_count()
            ));
            emit(&a.out, &s)?;
        }
    }
    Ok(report.ok && cycle.is_none())
}

fn cmd_ground_graph(a: &InputArgs) -> Run {
    let inst = ground(a)?;
    let g = inst.graph();
    match a.format {
        Format::Text => emit(&a.out, &g.emit_dot())?,
        Format::Json => {
            let edges: Vec<Value> = g
                .edges()
                .iter()
                .map(|(&(x, y), cs)| {
                    json!({
                        "from": g.atom(x).to_string(),
                        "to": g.atom(y).to_string(),
                        "clauses": cs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let nodes: Vec<String> = g.nodes().iter().map(|n| n.to_string()).collect();
            emit_json(&a.out, &json!({ "nodes": nodes, "edges": edges }))?;
        }
        Format::Csv => {
            let mut s = String::from("from,to,clauses\n");
            for (&(x, y), cs) in g.edges() {
                let cs: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                s.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(&g.atom(x).to_string()),
                    csv_field(&g.atom(y).to_string()),
                    csv_field(&cs.join(" "))
                ));
            }
            emit(&a.out, &s)?;
        }
    }
    Ok(true)
}

fn cmd_equations(a: &ParamArgs) -> Run {
    csv_only_json(a.input.format, "equations")?;
    let inst = ground(&a.input)?;
    let eqs = inst.equations(&params(a, inst.program())?)?;
    match a.input.format {
        Format::Json => emit_json(&a.input.out, &eqs.to_json())?,
        _ => emit(&a.input.out, &eqs.to_string())?,
    }
    Ok(true)
}

fn cmd_dsep(a: &DsepArgs) -> Run {
    let inst = ground(&a.input)?;
    let qs = queries(&a.queries, inst.program())?;
    let deadline = deadline(a.timeout);
    let mut all_separated = true;
    let mut rows = Vec::new();
    for q in &qs {
        let (x, y, z) = inst.query_nodes(q)?;
        let v = d_connected(inst.dag(), x, y, &inst.observe(&z), &deadline)?;
        all_separated &= v.separated;
        rows.push((q, v.report(inst.dag())));
    }
    match a.input.format {
        Format::Text => {
            let mut s = String::new();
            for (q, r) in &rows {
                if r.separated {
                    s.push_str(&format!("{q}: separated\n"));
                } else {
                    s.push_str(&format!("{q}: connected via {}\n", r.witness.join(" ")));
                }
            }
            emit(&a.input.out, &s)?;
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(q, r)| json!({ "query": q.to_string(), "separated": r.separated, "witness": r.witness }))
                .collect();
            emit_json(&a.input.out, &Value::Array(v))?;
        }
        Format::Csv => {
            let mut s = String::from("query,separated,witness\n");
            for (q, r) in &rows {
                s.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(&q.to_string()),
                    r.separated,
                    csv_field(&r.witness.join(" "))
                ));
            }
            emit(&a.input.out, &s)?;
        }
    }
    Ok(!a.queries.assert || all_separated)
}

fn cmd_ci(a: &CiArgs) -> Run {
    let input = &a.params.input;
    let inst = ground(input)?;
    let qs = queries(&a.queries, inst.program())?;
    let params = params(&a.params, inst.program())?;
    let deadline = deadline(a.oracle.timeout);
    let oracle = Oracle::for_instance(&inst, &params, a.oracle.guard, &deadline)?;
    let mut all_independent = true;
    let mut rows = Vec::new();
    for q in &qs {
        let (x, y, z) = inst.query_nodes(q)?;
        let v = oracle.ci_check(x, y, &z)?;
        all_independent &= v.independent;
        rows.push((q, v));
    }
    match input.format {
        Format::Text => {
            let mut s = String::new();
            for (q, v) in &rows {
                s.push_str(&format!("{q}: {v}"));
                if let Some(c) = &v.counterexample {
                    s.push_str(&format!(
                        " (joint {} vs product {})",
                        format_rational(&c.lhs),
                        format_rational(&c.rhs)
                    ));
                }
                if v.skipped_contexts > 0 {
                    s.push_str(&format!(
                        ", {} zero-probability contexts skipped",
                        v.skipped_contexts
                    ));
                }
                s.push('\n');
            }
            emit(&input.out, &s)?;
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(q, v)| {
                    let mut j = v.to_json();
                    j["query"] = json!(q.to_string());
                    j
                })
                .collect();
            emit_json(&input.out, &Value::Array(v))?;
        }
        Format::Csv => {
            let mut s = String::from("query,independent,skipped_contexts\n");
            for (q, v) in &rows {
                s.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(&q.to_string()),
                    v.independent,
                    v.skipped_contexts
                ));
            }
            emit(&input.out, &s)?;
        }
    }
    Ok(!a.queries.assert || all_independent)
}

fn cmd_fragment(a: &FragmentArgs) -> Run {
    let input = &a.params.input;
    csv_only_json(input.format, "fragment")?;
    let inst = ground(input)?;
    let params = params(&a.params, inst.program())?;
    let mut report = FragmentReport::check(&inst, &params);
    if a.proper {
        let oracle =
            Oracle::for_instance(&inst, &params, a.oracle.guard, &deadline(a.oracle.timeout))?;
        report.proper = Some(oracle.improper().is_empty());
    }
    match input.format {
        Format::Json => emit_json(&input.out, &report.to_json(&inst, &params))?,
        _ => emit(&input.out, &report.render(&inst, &params))?,
    }
    Ok(report.complete_oracle() && report.proper != Some(false))
}

fn cmd_sweep(a: &SweepArgs, which: Sweep) -> Run {
    let input = &a.params.input;
    csv_only_json(input.format, "sweep")?;
    let inst = ground(input)?;
    let params = params(&a.params, inst.program())?;
    let deadline = deadline(a.oracle.timeout);
    let oracle = Oracle::for_instance(&inst, &params, a.oracle.guard, &deadline)?;
    let report = sweep(inst.dag(), &oracle, a.max_z, &deadline)?;
    let violations = match which {
        Sweep::Soundness => &report.unsound,
        Sweep::Faithfulness => &report.unfaithful,
    };
    match input.format {
        Format::Json => emit_json(&input.out, &report.to_json(oracle.vars(), which))?,
        _ => {
            let label = match which {
                Sweep::Soundness => "separated but dependent",
                Sweep::Faithfulness => "connected but independent",
            };
            let mut s = format!(
                "triples: {}\nseparated: {}\n{label}: {}\n",
                report.triples,
                report.separated,
                violations.len()
            );
            for t in violations {
                s.push_str(&format!("  {}\n", t.render(oracle.vars())));
            }
            emit(&input.out, &s)?;
        }
    }
    Ok(violations.is_empty())
}

fn cmd_bench(a: &BenchArgs) -> Run {
    if a.sizes.contains(&0) {
        return Err(anyhow::anyhow!("sizes must be positive").into());
    }
    if a.timeout.is_zero() {
        return Err(anyhow::anyhow!("timeout must be positive").into());
    }
    let cfg = BenchConfig {
        sizes: a.sizes.clone(),
        graphs_per_size: a.graphs,
        queries_per_size: a.pairs,
        seed: a.seed,
        timeout: a.timeout,
        mode: a.mode,
        guard: a.guard,
    };
    log::info!("seed {}, pair sampling: {PAIR_SAMPLING}", cfg.seed);
    let records = run_bench(&cfg)?;
    let summary = summarize(&records);
    match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_records_csv(&records, &mut buf)?;
            emit(&a.out, &String::from_utf8(buf)?)?;
        }
        Format::Json => emit_json(
            &a.out,
            &json!({
                "seed": cfg.seed,
                "program": BENCH_PROGRAM,
                "pair_sampling": PAIR_SAMPLING,
                "timeout_ms": cfg.timeout.as_millis() as u64,
                "guard": cfg.guard,
                "records": serde_json::to_value(&records)?,
                "summary": serde_json::to_value(&summary)?,
            }),
        )?,
        Format::Text => {
            let mut s = String::new();
            for r in &summary {
                s.push_str(&format!(
                    "S={:<4} {:<6} {:<5} median {:>9} us  max {:>9} us  timeouts {}\n",
                    r.size, r.mode, r.regime, r.median_us, r.max_us, r.timeouts
                ));
            }
            emit(&a.out, &s)?;
        }
    }
    if let Some(path) = &a.summary {
        let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_summary_csv(&summary, file)?;
    }
    Ok(true)
}
