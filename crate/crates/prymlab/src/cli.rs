//! Command-line front end. Parses flags and spec files, drives the library
//! modules, and prints deterministic reports. No quantity is computed here;
//! every number in a report is the result of one library operation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::coverings::{count_hurwitz_classes, genus, CoveringData, CoveringError, HurwitzFilter};
use crate::families::{analyze_family, witness_covering, FamilyError, FamilyId, FamilyParams};
use crate::graphs::{certify_prym, spectrum_of, validate_srg, GraphError};
use crate::input::{
    build_covering, build_graph, build_hurwitz, build_triple_from_spec, covering_to_spec,
    parse_spec, CoveringSpecFile, GraphSpec, HurwitzSpecFile, InputError, TripleSpecFile,
};
use crate::permgroups::{PermError, PermGroup};
use crate::prym::{dimensions, fixed_point_analysis, PrymError};
use crate::report::{
    analysis_section, conversion_section, covering_section, example_section, graph_section,
    hurwitz_section, split_section, Report, ReportFormat,
};
use crate::splitting::{
    canonical_split, classical_prym_dims, convert_to_complement, convert_to_lattice, SplitError,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Prym(#[from] PrymError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Exit codes: 0 success, 1 validation failure, 2 budget exceeded,
/// 3 I/O or file parse error.
pub fn exit_code_for(error: &CliError) -> u8 {
    match error {
        CliError::Io(_) => 3,
        CliError::Input(InputError::Json(_)) => 3,
        CliError::Covering(CoveringError::BudgetExceeded { .. }) => 2,
        _ => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliFormat {
    Text,
    Json,
}

impl CliFormat {
    fn report_format(self) -> ReportFormat {
        match self {
            CliFormat::Text => ReportFormat::Text,
            CliFormat::Json => ReportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Conjugate a nine-point lattice triple to the complement model.
    ToComplement,
    /// Conjugate a nine-point complement triple to the lattice model.
    ToLattice,
}

#[derive(Parser, Debug)]
#[command(
    name = "prymlab",
    version,
    about = "Exact analysis of correspondences on branched coverings of the line"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the structured JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Format of the report printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = CliFormat::Text)]
    format: CliFormat,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a catalog graph, validate its parameters, certify its matrix.
    Graph(GraphArgs),
    /// Analyze the matrix-covering triple described by a JSON spec file.
    Triple {
        /// Path to a triple spec file.
        spec: PathBuf,
    },
    /// Decompose the covering of a triple through its block quotient.
    Split {
        /// Path to a triple spec file whose matrix part has repeated blocks.
        spec: PathBuf,
    },
    /// Convert a nine-point triple between the lattice and complement models.
    Convert {
        /// Path to a triple spec file on nine points.
        spec: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
    },
    /// Count branch-data classes for a finite permutation group.
    Hurwitz {
        /// Path to a class-counting spec file.
        spec: PathBuf,
        /// Abort if the exact enumeration would cost more than this.
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
    /// Reproduce a catalog example and check every closed-form claim.
    Examples {
        /// Example id: 5.1, 5.2, 5.3, 5.4, 6.4a, 6.4b, or 7.1.
        id: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        l1: Option<usize>,
        #[arg(long)]
        l2: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Catalog kind: lattice, lattice_complement, latin_square, schlaefli,
    /// paley, or complete_union.
    #[arg(long)]
    kind: String,
    /// Side length for lattice, lattice_complement, and latin_square.
    #[arg(long)]
    n: Option<usize>,
    /// Prime power for paley.
    #[arg(long)]
    q: Option<u64>,
    /// Number of copies for complete_union.
    #[arg(long)]
    m_copies: Option<usize>,
    /// Clique degree for complete_union.
    #[arg(long)]
    k: Option<usize>,
}

/// Parses the process arguments, runs one command, and prints its report.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = if error.use_stderr() { 1 } else { 0 };
            let _ = error.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(claims_pass) => {
            if claims_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let (report, claims_pass) = match &cli.command {
        Command::Graph(args) => cmd_graph(args)?,
        Command::Triple { spec } => cmd_triple(spec)?,
        Command::Split { spec } => cmd_split(spec)?,
        Command::Convert { spec, direction } => cmd_convert(spec, *direction)?,
        Command::Hurwitz { spec, budget } => cmd_hurwitz(spec, *budget)?,
        Command::Examples { id, n, l, l1, l2, m } => {
            let params =
                FamilyParams { n: *n, l: *l, l1: *l1, l2: *l2, m: *m };
            cmd_examples(id, &params)?
        }
    };
    emit(&report, cli.format.report_format(), cli.out.as_deref())?;
    Ok(claims_pass)
}

fn emit(report: &Report, format: ReportFormat, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(path) = out {
        fs::write(path, report.render(ReportFormat::Json)).map_err(|e| {
            CliError::Io(format!("cannot write report to {}: {e}", path.display()))
        })?;
    }
    print!("{}", report.render(format));
    Ok(())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// `graph`: catalog construction, parameter validation, spectrum, group
/// order, and the certificate or the reason it fails.
pub fn cmd_graph(args: &GraphArgs) -> Result<(Report, bool), CliError> {
    let spec = GraphSpec {
        kind: args.kind.clone(),
        n: args.n,
        q: args.q,
        m_copies: args.m_copies,
        k: args.k,
        entries: None,
    };
    let graph = build_graph(&spec)?;
    let params = validate_srg(&graph.matrix)?;
    let spectrum = spectrum_of(&params)?;
    let group_order = if graph.generators.is_empty() {
        None
    } else {
        Some(PermGroup::new(graph.matrix.size(), graph.generators.clone())?.order())
    };
    let certificate =
        certify_prym(&graph.matrix, &graph.generators).map_err(|e| e.to_string());
    let mut report = Report::new("graph");
    report.set("input", serde_json::to_value(&spec).expect("graph spec serializes"));
    graph_section(
        &mut report,
        &graph,
        &params,
        &spectrum,
        group_order.as_ref(),
        &certificate,
    );
    Ok((report, true))
}

fn echo_input(report: &mut Report, path: &Path, spec: &impl serde::Serialize) {
    report.set(
        "input",
        json!({
            "path": path.display().to_string(),
            "spec": serde_json::to_value(spec).expect("spec serializes"),
        }),
    );
    report.line(format!("input: {}", path.display()));
}

fn triple_graph_section(report: &mut Report, spec: &TripleSpecFile) -> Result<(), CliError> {
    let graph = build_graph(&spec.matrix)?;
    match validate_srg(&graph.matrix) {
        Ok(params) => {
            let spectrum = spectrum_of(&params)?;
            let certificate =
                certify_prym(&graph.matrix, &graph.generators).map_err(|e| e.to_string());
            graph_section(report, &graph, &params, &spectrum, None, &certificate);
        }
        Err(reason) => {
            report.set(
                "graph",
                json!({
                    "label": graph.label,
                    "vertices": graph.matrix.size(),
                    "not_strongly_regular": reason.to_string(),
                }),
            );
            report.line(format!(
                "graph: {} ({} vertices, not strongly regular: {reason})",
                graph.label,
                graph.matrix.size()
            ));
        }
    }
    Ok(())
}

/// `triple`: full dimension analysis of a triple spec file.
pub fn cmd_triple(path: &Path) -> Result<(Report, bool), CliError> {
    let spec: TripleSpecFile = parse_spec(&read_file(path)?)?;
    let triple = build_triple_from_spec(&spec)?;
    let mut report = Report::new("triple");
    echo_input(&mut report, path, &spec);
    triple_graph_section(&mut report, &spec)?;
    covering_section(&mut report, triple.covering());
    let analysis = dimensions(&triple, 0)?;
    let fixed = fixed_point_analysis(&triple);
    analysis_section(&mut report, &analysis, &fixed);
    Ok((report, true))
}

/// `split`: two-step decomposition of a triple with repeated blocks.
pub fn cmd_split(path: &Path) -> Result<(Report, bool), CliError> {
    let spec: TripleSpecFile = parse_spec(&read_file(path)?)?;
    let triple = build_triple_from_spec(&spec)?;
    let split = canonical_split(&triple)?;
    let dims = if split.complete_blocks {
        Some(classical_prym_dims(&split, genus(triple.covering()))?)
    } else {
        None
    };
    let mut report = Report::new("split");
    echo_input(&mut report, path, &spec);
    covering_section(&mut report, triple.covering());
    split_section(&mut report, &split, dims);
    Ok((report, true))
}

/// `convert`: carry a nine-point triple to the other rank-3 model and show
/// that the dimension data is preserved.
pub fn cmd_convert(path: &Path, direction: Direction) -> Result<(Report, bool), CliError> {
    let spec: TripleSpecFile = parse_spec(&read_file(path)?)?;
    let triple = build_triple_from_spec(&spec)?;
    let before = dimensions(&triple, 0)?;
    let mut report = Report::new("convert");
    echo_input(&mut report, path, &spec);
    match direction {
        Direction::ToComplement => {
            let conversion = convert_to_complement(&triple)?;
            let after = dimensions(&conversion.triple, 0)?;
            conversion_section(&mut report, "to-complement", Some(&conversion), &before, &after);
        }
        Direction::ToLattice => {
            let converted = convert_to_lattice(&triple)?;
            let after = dimensions(&converted, 0)?;
            conversion_section(&mut report, "to-lattice", None, &before, &after);
        }
    }
    Ok((report, true))
}

/// `hurwitz`: exact class counting with a cost budget.
pub fn cmd_hurwitz(path: &Path, budget: u64) -> Result<(Report, bool), CliError> {
    let spec: HurwitzSpecFile = parse_spec(&read_file(path)?)?;
    let problem = build_hurwitz(&spec)?;
    let filter_name = match problem.filter {
        HurwitzFilter::None => "none",
        HurwitzFilter::Transitive => "transitive",
        HurwitzFilter::Generating => "generating",
    };
    let count =
        count_hurwitz_classes(&problem.group, &problem.classes, problem.filter, budget)?;
    let mut report = Report::new("hurwitz");
    echo_input(&mut report, path, &spec);
    hurwitz_section(&mut report, filter_name, &count);
    Ok((report, true))
}

/// `examples`: cached witness construction, full pipeline, PASS/FAIL per
/// closed-form claim. Returns false when some claim fails.
pub fn cmd_examples(id: &str, params: &FamilyParams) -> Result<(Report, bool), CliError> {
    let family = FamilyId::parse(id)?;
    let covering = cached_witness(family, params)?;
    let outcome = analyze_family(family, params, covering)?;
    let mut report = Report::new("examples");
    let claims_pass = example_section(&mut report, &outcome);
    Ok((report, claims_pass))
}

/// Root of the fixture cache: `PRYMLAB_CACHE_DIR` if set, else a fixed
/// directory under the system temp dir.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os("PRYMLAB_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => std::env::temp_dir().join("prymlab-fixtures"),
    }
}

fn cache_file_name(id: FamilyId, params: &FamilyParams) -> String {
    let part = |v: Option<usize>| v.map_or_else(|| "x".to_string(), |v| v.to_string());
    format!(
        "{}-n{}-l{}-p{}-q{}-m{}.json",
        id.token(),
        part(params.n),
        part(params.l),
        part(params.l1),
        part(params.l2),
        part(params.m)
    )
}

fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().expect("cache file has a parent directory");
    fs::create_dir_all(dir)?;
    let file_name = path.file_name().expect("cache file has a name").to_string_lossy();
    let tmp = dir.join(format!(".{file_name}.{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

fn cached_witness_in(
    dir: &Path,
    id: FamilyId,
    params: &FamilyParams,
) -> Result<CoveringData, CliError> {
    let path = dir.join(cache_file_name(id, params));
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(spec) = parse_spec::<CoveringSpecFile>(&text) {
            if let Ok(covering) = build_covering(&spec) {
                return Ok(covering);
            }
        }
    }
    let covering = witness_covering(id, params)?;
    let spec = covering_to_spec(&covering);
    let rendered =
        serde_json::to_string_pretty(&spec).expect("covering spec serializes");
    // Cache writes are best effort; an unwritable cache must not fail a run.
    let _ = write_atomic(&path, &rendered);
    Ok(covering)
}

/// Loads the witness covering for (example, params) from the fixture cache,
/// rebuilding and rewriting it atomically when absent or corrupt.
pub fn cached_witness(id: FamilyId, params: &FamilyParams) -> Result<CoveringData, CliError> {
    cached_witness_in(&cache_dir(), id, params)
}
