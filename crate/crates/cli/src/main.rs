//! Command-line surface over the reconstruction library: input validation,
//! character tables, twist orbits, trace-based reconstruction, forward trace
//! evaluation, random round-trip testing, hyperelliptic point counting, and
//! weight checks.
//!
//! Results are printed as deterministic JSON on stdout; human-readable
//! summaries and warnings go to stderr. Exit codes: 0 success, 1 domain
//! failure, 2 unreadable input, 3 bad configuration.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use weiltrace::curves::{lefschetz_t1, recover_t1, FiniteField, HyperCurve};
use weiltrace::cyclo::CycloNum;
use weiltrace::groups::{CharTable, GroupData};
use weiltrace::reconstruct::{
    reconstruct_exact, reconstruct_float, roundtrip_shapes, run_roundtrip, twist_orbits,
    ReconstructConfig, Reconstruction, RoundTripShape, ROUNDTRIP_DIM,
};
use weiltrace::wdrep::{wd_from_kernel, wm_check, WDData, WEIGHT_TOL};
use weiltrace::weilmodel::{
    dataset_from_counts, dataset_from_traces, AnyDataset, CountData, FieldSlot, LocalShape, Scalar,
    TableCtx, TraceDataset,
};

#[derive(Parser)]
#[command(name = "weiltrace", about = "Trace-based reconstruction of local Weil representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a group file, and optionally a character table against it
    Validate(ValidateArgs),
    /// Compute the character table of a group
    Chartab(ChartabArgs),
    /// List the unramified-twist orbits of the irreducible characters
    Orbits(OrbitsArgs),
    /// Rebuild a representation from trace or count data
    Reconstruct(ReconstructArgs),
    /// Evaluate the traces of a reconstructed representation
    Traces(TracesArgs),
    /// Sample random representations and verify they survive reconstruction
    Roundtrip(RoundtripArgs),
    /// Count points on a hyperelliptic curve y^2 = f(x)
    Count(CountArgs),
    /// Recover the trace term from a point count modulo q
    RecoverT1(RecoverArgs),
    /// Check eigenvalue absolute values against the weight grid
    WmCheck(WmArgs),
    /// Split kernel eigenvalues into parts by weight
    WdFromKernel(WdKernelArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Pretty-print the JSON output
    #[arg(long)]
    pretty: bool,
    /// Suppress the human-readable summary on stderr
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args)]
struct ValidateArgs {
    /// Group file: {"order", "mul", "inertia", "frob"}
    #[arg(long)]
    group: PathBuf,
    /// Character table file to check against the group
    #[arg(long)]
    chartab: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ChartabArgs {
    #[arg(long)]
    group: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct OrbitsArgs {
    #[arg(long)]
    group: PathBuf,
    /// Character table file; computed from the group when absent
    #[arg(long)]
    chartab: Option<PathBuf>,
    /// Residue size of the base field
    #[arg(long)]
    q: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    chartab: Option<PathBuf>,
    #[arg(long)]
    q: u64,
    /// Trace dataset file (exclusive with --counts)
    #[arg(long)]
    traces: Option<PathBuf>,
    /// Point count file (exclusive with --traces)
    #[arg(long)]
    counts: Option<PathBuf>,
    /// Upper bound on the dimension of the representation
    #[arg(long = "dim-bound")]
    dim_bound: u64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Emit eigenvalue multisets only, without choosing roots
    #[arg(long)]
    no_mu: bool,
    /// Widen the cyclotomic field searched for eigenvalues
    #[arg(long)]
    split_conductor: Option<u32>,
    /// Widen the cyclotomic field searched for roots of eigenvalues
    #[arg(long)]
    mu_conductor: Option<u32>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct TracesArgs {
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    chartab: Option<PathBuf>,
    #[arg(long)]
    q: u64,
    /// Reconstruction file with chosen roots; its mode tag picks the scalars
    #[arg(long)]
    rep: PathBuf,
    /// Evaluate traces at every slot with residue degree up to this bound
    #[arg(long = "max-r")]
    max_r: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct RoundtripArgs {
    /// Group file; the built-in shape suite is used when absent
    #[arg(long)]
    group: Option<PathBuf>,
    #[arg(long)]
    chartab: Option<PathBuf>,
    /// Residue size, required with --group
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "dim-bound", default_value_t = ROUNDTRIP_DIM)]
    dim_bound: u64,
    /// Number of worker threads
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CountArgs {
    /// Field spec "p" or "p^k", p an odd prime
    #[arg(long)]
    field: String,
    /// Coefficients of f, constant first, comma-separated integers
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    genus: u32,
    #[arg(long)]
    count: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct WmArgs {
    /// Decomposition data file: {"q", "parts": [{"n", "eigs"}]}
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = WEIGHT_TOL)]
    tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct WdKernelArgs {
    /// Kernel file: {"q", "eigs": [{"re", "im"}]}
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = WEIGHT_TOL)]
    tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

enum Kind {
    Domain,
    Io,
    Config,
}

struct Failure {
    kind: Kind,
    message: String,
}

impl Failure {
    fn code(&self) -> u8 {
        match self.kind {
            Kind::Domain => 1,
            Kind::Io => 2,
            Kind::Config => 3,
        }
    }

    fn label(&self) -> &'static str {
        match self.kind {
            Kind::Domain => "domain",
            Kind::Io => "io",
            Kind::Config => "config",
        }
    }
}

fn domain(err: impl Display) -> Failure {
    Failure {
        kind: Kind::Domain,
        message: err.to_string(),
    }
}

fn config(message: impl Into<String>) -> Failure {
    Failure {
        kind: Kind::Config,
        message: message.into(),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        kind: Kind::Io,
        message: format!("{}: {}", path.display(), e),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure {
        kind: Kind::Io,
        message: format!("{}: {}", path.display(), e),
    })
}

fn emit(out: &OutputArgs, value: &impl Serialize) -> Result<(), Failure> {
    use std::io::Write;
    let text = if out.pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| Failure {
        kind: Kind::Io,
        message: e.to_string(),
    })?;
    if let Err(e) = writeln!(std::io::stdout().lock(), "{}", text) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        return Err(Failure {
            kind: Kind::Io,
            message: e.to_string(),
        });
    }
    Ok(())
}

fn note(out: &OutputArgs, line: impl Display) {
    if !out.json {
        eprintln!("{}", line);
    }
}

fn set_jobs(jobs: Option<usize>) -> Result<(), Failure> {
    let Some(jobs) = jobs else { return Ok(()) };
    if jobs == 0 {
        return Err(config("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| config(format!("thread pool: {}", e)))
}

fn load_group(path: &Path) -> Result<GroupData, Failure> {
    let group: GroupData = read_json(path)?;
    group.validate().into_result().map_err(domain)?;
    Ok(group)
}

fn load_table(group: &GroupData, path: Option<&PathBuf>) -> Result<CharTable, Failure> {
    let table = match path {
        Some(p) => read_json::<CharTable>(p)?,
        None => CharTable::compute(group).map_err(domain)?,
    };
    table.validate(group).map_err(domain)?;
    Ok(table)
}

fn slots_up_to(shape: &LocalShape, max_r: usize) -> Vec<FieldSlot> {
    (1..=max_r)
        .flat_map(|r| {
            shape
                .elements_of_degree(r)
                .iter()
                .map(move |&g| FieldSlot { g, r })
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}: {}", failure.label(), failure.message);
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate(args) => cmd_validate(args),
        Command::Chartab(args) => cmd_chartab(args),
        Command::Orbits(args) => cmd_orbits(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Traces(args) => cmd_traces(args),
        Command::Roundtrip(args) => cmd_roundtrip(args),
        Command::Count(args) => cmd_count(args),
        Command::RecoverT1(args) => cmd_recover_t1(args),
        Command::WmCheck(args) => cmd_wm_check(args),
        Command::WdFromKernel(args) => cmd_wd_from_kernel(args),
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let group = load_group(&args.group)?;
    let f = group.residue_degree();
    let classes = group.conjugacy_classes().count();
    let rows = match &args.chartab {
        Some(path) => {
            let table: CharTable = read_json(path)?;
            table.validate(&group).map_err(domain)?;
            Some(table.rows.len())
        }
        None => None,
    };
    emit(
        &args.out,
        &json!({
            "ok": true,
            "order": group.order,
            "inertia_order": group.inertia_order(),
            "residue_degree": f,
            "classes": classes,
            "table_rows": rows,
        }),
    )?;
    note(
        &args.out,
        format!(
            "group of order {} with inertia of order {} and residue degree {}: ok{}",
            group.order,
            group.inertia_order(),
            f,
            match rows {
                Some(r) => format!("; table with {} rows: ok", r),
                None => String::new(),
            }
        ),
    );
    Ok(())
}

fn cmd_chartab(args: ChartabArgs) -> Result<(), Failure> {
    let group = load_group(&args.group)?;
    let table = CharTable::compute(&group).map_err(domain)?;
    emit(&args.out, &table)?;
    let degrees: Vec<u64> = (0..table.rows.len())
        .map(|i| table.degree(&group, i).unwrap_or(0))
        .collect();
    note(
        &args.out,
        format!(
            "{} classes, {} irreducible characters of degrees {:?}",
            table.classes.len(),
            table.rows.len(),
            degrees
        ),
    );
    Ok(())
}

fn cmd_orbits(args: OrbitsArgs) -> Result<(), Failure> {
    let group = load_group(&args.group)?;
    let table = load_table(&group, args.chartab.as_ref())?;
    let shape = LocalShape::new(group, args.q).map_err(domain)?;
    let ctx = TableCtx::<CycloNum>::new(&table, &shape).map_err(domain)?;
    let orbits = twist_orbits(&table, &shape).map_err(domain)?;
    let listed: Vec<serde_json::Value> = orbits
        .iter()
        .map(|o| {
            json!({
                "rep": o.rep,
                "m": o.m,
                "members": o.members,
                "degree": ctx.degree(o.rep),
            })
        })
        .collect();
    emit(&args.out, &json!({ "orbits": listed }))?;
    for orbit in &orbits {
        note(
            &args.out,
            format!(
                "orbit of row {}: degree {}, m = {}, members {:?}",
                orbit.rep,
                ctx.degree(orbit.rep),
                orbit.m,
                orbit.members
            ),
        );
    }
    Ok(())
}

fn load_any_dataset(
    args: &ReconstructArgs,
    shape: &LocalShape,
    out: &OutputArgs,
) -> Result<AnyDataset, Failure> {
    match (&args.traces, &args.counts) {
        (Some(_), Some(_)) => Err(config("--traces and --counts are mutually exclusive")),
        (None, None) => Err(config("one of --traces or --counts is required")),
        (Some(path), None) => read_json(path),
        (None, Some(path)) => {
            let counts: CountData = read_json(path)?;
            let (data, warnings) =
                dataset_from_counts::<CycloNum>(shape, counts.genus, &counts.entries)
                    .map_err(domain)?;
            for warning in &warnings {
                if !out.json {
                    eprintln!("warning: {}", warning);
                }
            }
            Ok(AnyDataset::Exact(data))
        }
    }
}

fn embed_dataset(data: &TraceDataset<CycloNum>, shape: &LocalShape) -> TraceDataset<Complex64> {
    dataset_from_traces(shape, data.iter().map(|(slot, v)| (slot.g, slot.r, v.embed())))
        .expect("slots were already validated")
}

fn describe<S: Scalar>(out: &OutputArgs, result: &Reconstruction<S>, ctx: &TableCtx<S>) {
    for orbit in &result.orbits {
        let mu = match &orbit.mu {
            Some(list) => format!("{:?}", list),
            None => "none".to_string(),
        };
        note(
            out,
            format!(
                "row {}: degree {}, m = {}, dim {}, lambda {:?}, mu {}",
                orbit.rep_char,
                ctx.degree(orbit.rep_char),
                orbit.m,
                ctx.degree(orbit.rep_char) * orbit.lambda.len() as u64,
                orbit.lambda,
                mu
            ),
        );
    }
    note(
        out,
        format!(
            "total dimension {} within bound {}",
            result.dim(ctx),
            result.dim_bound
        ),
    );
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<(), Failure> {
    if args.dim_bound == 0 {
        return Err(config("--dim-bound must be at least 1"));
    }
    let group = load_group(&args.group)?;
    let table = load_table(&group, args.chartab.as_ref())?;
    let shape = LocalShape::new(group, args.q).map_err(domain)?;
    let data = load_any_dataset(&args, &shape, &args.out)?;
    let cfg = ReconstructConfig {
        split_conductor: args.split_conductor,
        mu_conductor: args.mu_conductor,
        emit_mu: !args.no_mu,
    };
    match (args.mode, data) {
        (Mode::Exact, AnyDataset::Exact(data)) => {
            let result = reconstruct_exact(&data, &table, &shape, args.dim_bound, &cfg)
                .map_err(domain)?;
            emit(&args.out, &result)?;
            let ctx = TableCtx::<CycloNum>::new(&table, &shape).map_err(domain)?;
            describe(&args.out, &result, &ctx);
        }
        (Mode::Exact, AnyDataset::Numeric(_)) => {
            return Err(config(
                "dataset contains floating entries; rerun with --mode float",
            ));
        }
        (Mode::Float, data) => {
            let data = match data {
                AnyDataset::Numeric(d) => d,
                AnyDataset::Exact(d) => embed_dataset(&d, &shape),
            };
            let result = reconstruct_float(&data, &table, &shape, args.dim_bound, &cfg)
                .map_err(domain)?;
            emit(&args.out, &result)?;
            let ctx = TableCtx::<Complex64>::new(&table, &shape).map_err(domain)?;
            describe(&args.out, &result, &ctx);
        }
    }
    Ok(())
}

fn cmd_traces(args: TracesArgs) -> Result<(), Failure> {
    if args.max_r == 0 {
        return Err(config("--max-r must be at least 1"));
    }
    let group = load_group(&args.group)?;
    let table = load_table(&group, args.chartab.as_ref())?;
    let shape = LocalShape::new(group, args.q).map_err(domain)?;
    let raw: serde_json::Value = read_json(&args.rep)?;
    let mode = raw.get("mode").and_then(|m| m.as_str()).unwrap_or("exact");
    let slots = slots_up_to(&shape, args.max_r);

    fn evaluate<S: Scalar>(
        raw: serde_json::Value,
        table: &CharTable,
        shape: &LocalShape,
        slots: &[FieldSlot],
    ) -> Result<TraceDataset<S>, Failure> {
        let rec: Reconstruction<S> = serde_json::from_value(raw).map_err(|e| Failure {
            kind: Kind::Io,
            message: e.to_string(),
        })?;
        let rep = rec
            .weil_rep()
            .ok_or_else(|| domain("reconstruction has no chosen roots; rerun without --no-mu"))?;
        let ctx = TableCtx::<S>::new(table, shape).map_err(domain)?;
        rep.dataset(&ctx, shape, slots).map_err(domain)
    }

    match mode {
        "float" => {
            let data = evaluate::<Complex64>(raw, &table, &shape, &slots)?;
            emit(&args.out, &data)?;
            note(&args.out, format!("{} trace entries up to residue degree {}", data.len(), args.max_r));
        }
        _ => {
            let data = evaluate::<CycloNum>(raw, &table, &shape, &slots)?;
            emit(&args.out, &data)?;
            note(&args.out, format!("{} trace entries up to residue degree {}", data.len(), args.max_r));
        }
    }
    Ok(())
}

fn cmd_roundtrip(args: RoundtripArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        note(&args.out, "0 trials requested");
    }
    if args.dim_bound == 0 {
        return Err(config("--dim-bound must be at least 1"));
    }
    set_jobs(args.jobs)?;
    let shapes = match &args.group {
        Some(path) => {
            let q = args
                .q
                .ok_or_else(|| config("--q is required together with --group"))?;
            let group = load_group(path)?;
            let table = load_table(&group, args.chartab.as_ref())?;
            let shape = LocalShape::new(group, q).map_err(domain)?;
            vec![RoundTripShape {
                label: "custom",
                shape,
                table,
            }]
        }
        None => {
            if args.chartab.is_some() || args.q.is_some() {
                return Err(config("--chartab and --q need --group"));
            }
            roundtrip_shapes()
        }
    };
    let report = run_roundtrip(&shapes, args.trials, args.seed, args.dim_bound);
    emit(
        &args.out,
        &json!({
            "trials": report.trials,
            "passes": report.trials - report.failures.len(),
            "failures": report.failures,
        }),
    )?;
    note(
        &args.out,
        format!(
            "{} trials over {} shape(s): {} passed",
            report.trials,
            shapes.len(),
            report.trials - report.failures.len()
        ),
    );
    if !report.is_clean() {
        return Err(domain(format!(
            "{} of {} round-trip trials failed",
            report.failures.len(),
            report.trials
        )));
    }
    Ok(())
}

fn parse_field_spec(spec: &str) -> Result<(u64, u32), Failure> {
    let parts: Vec<&str> = spec.split('^').collect();
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| config(format!("bad field spec {:?}", spec)))
    };
    match parts.as_slice() {
        [p] => Ok((parse(p)?, 1)),
        [p, k] => Ok((parse(p)?, parse(k)? as u32)),
        _ => Err(config(format!("bad field spec {:?}", spec))),
    }
}

fn cmd_count(args: CountArgs) -> Result<(), Failure> {
    set_jobs(args.jobs)?;
    let (p, k) = parse_field_spec(&args.field)?;
    let field = FiniteField::new(p, k).map_err(domain)?;
    let coeffs: Vec<u64> = args
        .poly
        .split(',')
        .map(|part| {
            let v = part
                .trim()
                .parse::<i64>()
                .map_err(|_| config(format!("bad coefficient {:?}", part.trim())))?;
            Ok(if v < 0 { field.from_int(v) } else { v as u64 })
        })
        .collect::<Result<_, Failure>>()?;
    let curve = HyperCurve::new(&field, coeffs).map_err(domain)?;
    let count = curve.count_points();
    let t1 = lefschetz_t1(count, field.q());
    emit(
        &args.out,
        &json!({
            "q": field.q(),
            "degree": curve.degree(),
            "genus": curve.genus(),
            "count": count,
            "t1": t1,
        }),
    )?;
    note(
        &args.out,
        format!(
            "{} points over the field with {} elements (genus {}, t1 = {})",
            count,
            field.q(),
            curve.genus(),
            t1
        ),
    );
    Ok(())
}

fn cmd_recover_t1(args: RecoverArgs) -> Result<(), Failure> {
    let t1 = recover_t1(args.count, args.q, args.genus).map_err(domain)?;
    emit(&args.out, &json!({ "t1": t1 }))?;
    note(
        &args.out,
        format!("t1 = {} from count {} mod q = {}", t1, args.count, args.q),
    );
    Ok(())
}

fn cmd_wm_check(args: WmArgs) -> Result<(), Failure> {
    if args.tol <= 0.0 {
        return Err(config("--tol must be positive"));
    }
    let wd: WDData = read_json(&args.input)?;
    let report = wm_check(&wd, args.tol);
    let parts: Vec<serde_json::Value> = report
        .parts
        .iter()
        .map(|p| {
            json!({
                "n": p.n,
                "expected": p.expected,
                "total": p.total,
                "failing": p.failing.len(),
            })
        })
        .collect();
    emit(&args.out, &json!({ "pass": report.passed(), "parts": parts }))?;
    if !args.out.json {
        eprint!("{}", report);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(domain("weight check failed"))
    }
}

#[derive(Deserialize)]
struct KernelFile {
    q: u64,
    eigs: Vec<KernelEig>,
}

#[derive(Deserialize)]
struct KernelEig {
    re: f64,
    im: f64,
}

fn cmd_wd_from_kernel(args: WdKernelArgs) -> Result<(), Failure> {
    if args.tol <= 0.0 {
        return Err(config("--tol must be positive"));
    }
    let file: KernelFile = read_json(&args.input)?;
    let eigs: Vec<Complex64> = file
        .eigs
        .iter()
        .map(|e| Complex64::new(e.re, e.im))
        .collect();
    let wd = wd_from_kernel(file.q, &eigs, args.tol).map_err(domain)?;
    emit(&args.out, &wd)?;
    for part in wd.parts() {
        note(
            &args.out,
            format!("n = {}: {} eigenvalue(s)", part.n, part.eigs.len()),
        );
    }
    Ok(())
}
