use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cm_torsion::alpha::{analyze, flat_of, oracle_scan, SearchConfig, DEFAULT_ORACLE_CAP};
use cm_torsion::cm::{CmDatum, Equivalence};
use cm_torsion::document::{render_report, report_for, DatumDocument, DocumentError};
use cm_torsion::exec::{init_thread_pool, Execution};
use cm_torsion::finite_level::exponent_sweep;
use cm_torsion::group::{catalog_is_complete, FiniteGroup, COMPLETE_CATALOG_ORDER};
use cm_torsion::json::ExactRational;
use cm_torsion::sweep::{
    catalog_up_to, enumerate_coset_family, enumerate_family, verify, EnumerateOptions, EnumerationTable,
    VerifyOptions,
};
use cm_torsion::torus::{CharacterSystem, TorusError};

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_DUPLICATE: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "cmt", version, about = "Torsion growth exponents of CM abelian varieties")]
struct Cli {
    /// Run every sweep on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a datum, compute alpha and check the bounds.
    Analyze {
        file: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tabulate the CM types of a family of groups.
    Enumerate(EnumerateArgs),
    /// Finite-level torsion degrees along the optimal subspace.
    Simulate {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [5u64, 13, 101])]
        ell: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// `auto` for the optimal flat, or comma-separated character indices.
        #[arg(long, default_value = "auto")]
        witness: String,
        #[arg(long, value_enum, default_value_t = SimFormat::Csv)]
        format: SimFormat,
    },
    /// Exhaustive consistency checks over small groups.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_group_order: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Compare the search with the exhaustive subset scan.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
    },
}

#[derive(Args)]
struct EnumerateArgs {
    /// Invariant factors of one abelian group, e.g. `2,4`.
    #[arg(long, value_delimiter = ',', conflicts_with = "max_order", required_unless_present = "max_order")]
    abelian: Option<Vec<u64>>,
    /// Every cataloged group up to this order.
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long)]
    primitive_only: bool,
    #[arg(long)]
    up_to_translation: bool,
    /// Also merge types related by automorphisms fixing the conjugation.
    #[arg(long, requires = "up_to_translation")]
    up_to_automorphism: bool,
    /// Types on `G/H` with `[G:H]` equal to this, instead of `G/{e}`.
    #[arg(long)]
    coset_index: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Table)]
    format: TableFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Json,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

impl From<TorusError> for Failure {
    fn from(e: TorusError) -> Self {
        match e {
            TorusError::DuplicateCharacters { .. } => Failure::new(EXIT_DUPLICATE, e.to_string()),
            TorusError::InvalidDatum(_) => Failure::new(EXIT_INVALID, e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(EXIT_USAGE, e.to_string())
    }
}

fn read_datum(path: &Path) -> Result<(DatumDocument, CmDatum), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let doc = DatumDocument::parse(&text)?;
    let datum = doc.to_datum()?;
    Ok((doc, datum))
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_analyze(file: &Path, json: Option<&Path>, exec: Execution) -> Result<(), Failure> {
    let (doc, datum) = read_datum(file)?;
    let cs = CharacterSystem::build(&datum)?;
    let report = report_for(doc, &cs, SearchConfig { prune: true, exec });
    let text = render_report(&report);
    if let Some(path) = json {
        std::fs::write(path, &text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    }
    emit(&text)?;
    let failed: Vec<&str> = report
        .analysis
        .bound_checks
        .as_ref()
        .map(|b| b.named().into_iter().filter(|(_, ok)| *ok == Some(false)).map(|(n, _)| n).collect())
        .unwrap_or_default();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK, format!("failed checks: {}", failed.join(", "))))
    }
}

fn family(args: &EnumerateArgs) -> Result<Vec<Arc<FiniteGroup>>, Failure> {
    if let Some(inv) = &args.abelian {
        let g = FiniteGroup::abelian(inv).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
        return Ok(vec![Arc::new(g)]);
    }
    let n = args.max_order.expect("clap requires one of the two");
    if !catalog_is_complete(n) {
        eprintln!("warning: the group catalog is complete only up to order {COMPLETE_CATALOG_ORDER}");
    }
    Ok(catalog_up_to(n))
}

fn render_table(t: &EnumerationTable) -> String {
    let mut s = String::new();
    let cosets = t.rows.iter().any(|r| !r.subgroup.is_empty());
    for r in &t.rows {
        let h = if cosets { format!(" H={{{}}}", r.subgroup.join(",")) } else { String::new() };
        let d = r.d.map_or("-".into(), |d| d.to_string());
        let defect = r.defect.map_or("-".into(), |d| d.to_string());
        let bounds = match r.bounds_ok {
            Some(true) => "ok",
            Some(false) => "FAIL",
            None => "-",
        };
        let _ = writeln!(
            s,
            "{}{} c={} phi={{{}}} size={} primitive={} g={} d={} defect={} alpha={} bounds={}",
            r.group,
            h,
            r.conj,
            r.phi.join(","),
            r.class_size,
            r.primitive,
            r.g,
            d,
            defect,
            r.alpha_text(),
            bounds
        );
    }
    let m = &t.summary;
    let _ = writeln!(s, "classes: {} (primitive {})", m.classes, m.primitive);
    let _ = writeln!(s, "d >= 2 + log2 g on primitive types: {}", m.ribet_dim_bound_ok);
    let _ = writeln!(s, "g prime => nondegenerate: {}", m.prime_g_nondegenerate_ok);
    let _ = writeln!(s, "alpha <= 2g/(2 + log2 g): {}", m.th2_bound_ok);
    let _ = writeln!(s, "degenerate primitive: {}", m.degenerate_primitive);
    for &i in &m.degenerate_extremal {
        let r = &t.rows[i];
        let _ = writeln!(s, "extremal: {} phi={{{}}} g={} alpha={}", r.group, r.phi.join(","), r.g, r.alpha_text());
    }
    s
}

fn cmd_enumerate(args: &EnumerateArgs, exec: Execution) -> Result<(), Failure> {
    let groups = family(args)?;
    let equivalence = match (args.up_to_translation, args.up_to_automorphism) {
        (false, _) => Equivalence::None,
        (true, false) => Equivalence::Translation,
        (true, true) => Equivalence::TranslationAndAutomorphism,
    };
    let opts = EnumerateOptions {
        primitive_only: args.primitive_only,
        equivalence,
        exec,
    };
    let table = match args.coset_index {
        Some(k) => enumerate_coset_family(&groups, k, opts),
        None => enumerate_family(&groups, opts),
    };
    match args.format {
        TableFormat::Table => emit(&render_table(&table))?,
        TableFormat::Json => emit(&render_report(&table))?,
    }
    if table.summary.all_bounds_ok {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK, "a bound check failed"))
    }
}

fn parse_witness(cs: &CharacterSystem, spec: &str, exec: Execution) -> Result<cm_torsion::alpha::SubspaceWitness, Failure> {
    if spec == "auto" {
        return Ok(analyze(cs, SearchConfig { prune: true, exec }).witness);
    }
    let indices: Vec<usize> = spec
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::new(EXIT_USAGE, format!("--witness: expected `auto` or indices, got `{spec}`")))?;
    flat_of(cs, &indices).ok_or_else(|| Failure::new(EXIT_USAGE, format!("--witness: indices must be nonempty and below {}", cs.len())))
}

fn cmd_simulate(file: &Path, ell: &[u64], level: u32, witness: &str, format: SimFormat, exec: Execution) -> Result<(), Failure> {
    let (_, datum) = read_datum(file)?;
    let cs = CharacterSystem::build(&datum)?;
    let w = parse_witness(&cs, witness, exec)?;
    let table = exponent_sweep(&cs, &w, ell, level, exec).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    match format {
        SimFormat::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
            emit(&String::from_utf8(buf).expect("csv is utf-8"))?;
        }
        SimFormat::Json => emit(&render_report(&table))?,
    }
    if table.all_bounds_ok() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK, "degree sandwich failed for some prime"))
    }
}

fn cmd_verify(max_group_order: usize, seed: u64, json: bool, exec: Execution) -> Result<(), Failure> {
    let report = verify(VerifyOptions {
        max_group_order,
        seed,
        exec,
        ..Default::default()
    });
    if json {
        emit(&render_report(&report))?;
    } else {
        let mut s = String::new();
        if !report.catalog_complete {
            let _ = writeln!(s, "warning: the group catalog is complete only up to order {COMPLETE_CATALOG_ORDER}");
        }
        let _ = writeln!(
            s,
            "groups {}  data {}  analyzed {}  repeated characters {}  translation classes {}",
            report.groups, report.data_examined, report.analyzed, report.repeated_characters, report.translation_classes
        );
        for c in &report.checks {
            let status = if c.failed == 0 { "pass" } else { "FAIL" };
            let _ = writeln!(s, "{status} {:<24} {:>6} passed {:>4} failed", c.name, c.passed, c.failed);
        }
        for x in &report.degenerate_extremal {
            let _ = writeln!(s, "extremal: {} phi={{{}}} g={} d={} alpha={}", x.group, x.phi.join(","), x.g, x.d, x.alpha);
        }
        emit(&s)?;
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK, "verification failed"))
    }
}

#[derive(Serialize)]
struct OracleComparison {
    characters: usize,
    subsets: usize,
    alpha_search: ExactRational,
    alpha_oracle: ExactRational,
    agree: bool,
    bound_violations: usize,
}

fn cmd_oracle(file: &Path, cap: usize, exec: Execution) -> Result<(), Failure> {
    let (_, datum) = read_datum(file)?;
    let cs = CharacterSystem::build(&datum)?;
    let scan = oracle_scan(&cs, cap).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let searched = analyze(&cs, SearchConfig { prune: true, exec }).alpha;
    let cmp = OracleComparison {
        characters: cs.len(),
        subsets: scan.subsets,
        agree: searched == scan.alpha,
        alpha_search: ExactRational::from(&searched),
        alpha_oracle: ExactRational::from(&scan.alpha),
        bound_violations: scan.bound_violations,
    };
    emit(&render_report(&cmp))?;
    if cmp.agree && cmp.bound_violations == 0 {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK, "search and oracle disagree"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match &cli.command {
        Command::Analyze { file, json } => cmd_analyze(file, json.as_deref(), exec),
        Command::Enumerate(args) => cmd_enumerate(args, exec),
        Command::Simulate {
            file,
            ell,
            level,
            witness,
            format,
        } => cmd_simulate(file, ell, *level, witness, *format, exec),
        Command::Verify {
            max_group_order,
            seed,
            json,
        } => cmd_verify(*max_group_order, *seed, *json, exec),
        Command::Oracle { file, cap } => cmd_oracle(file, *cap, exec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let threads = std::env::var("CMT_THREADS").ok().and_then(|v| v.parse().ok());
    init_thread_pool(threads);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
