//! Command-line surface: construction, family inspection, representation
//! search, table building, and certificate verification, with deterministic
//! text or JSON output. Results go to standard output, diagnostics to
//! standard error.

use crate::discquality::{self, build_table, verify_entry_exact, RepTable, TableEntry};
use crate::family::{self, Family};
use crate::jsonint::JInt;
use crate::pipeline::{
    certificate_from_json, certificates_from_json_array, certificates_to_json_array, construct,
    verify_certificate, ConstructOptions, PipelineError, WeilCertificate,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::Serialize;
use std::io::BufReader;
use std::path::PathBuf;

pub const TABLE_ENV: &str = "WEILFORGE_TABLE";
pub const DEFAULT_TABLE_PATH: &str = "compliant_table.jsonl";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Orders at and above this never need their own table entry: the
/// representation recursion only consults smaller ones.
const TABLE_CEILING: u64 = 50_000;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    F,
    G,
    H,
    Hprime,
}

#[derive(Parser)]
#[command(
    name = "weilforge",
    version,
    about = "Certified Weil polynomials of prescribed order over the field with two elements"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct certified Weil polynomials whose variety has m points.
    Order {
        /// Prescribed order, a positive decimal integer.
        m: BigInt,
        /// How many certificates (of distinct degrees) to emit.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Largest family index n to try before giving up.
        #[arg(long = "n-max", default_value_t = 64)]
        n_max: usize,
        /// Representation table file (default: WEILFORGE_TABLE environment
        /// variable, else ./compliant_table.jsonl).
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Print one member of the polynomial families.
    Family {
        /// f needs --n; g needs --n and --k; h and hprime need --n and --m.
        #[arg(value_enum)]
        kind: FamilyKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<BigInt>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the nonadjacent-form digits of m, least significant first.
    Naf {
        m: BigInt,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Look up or derive a compliant representation of an odd order.
    Compliant {
        m: BigInt,
        /// Representation table file (default: WEILFORGE_TABLE environment
        /// variable, else ./compliant_table.jsonl).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build the compliant-representation table for every odd order up to
    /// a bound and write it as JSON lines.
    Table {
        #[arg(long)]
        max: u64,
        /// Output path (default: WEILFORGE_TABLE environment variable,
        /// else ./compliant_table.jsonl). An existing file is loaded,
        /// validated, and extended.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the build; the output is identical for
        /// every value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Re-check a table file or a certificate file by exact arithmetic.
    Verify { path: PathBuf },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Order {
            m,
            count,
            format,
            n_max,
            table,
        } => cmd_order(&m, count, format, n_max, table),
        Cmd::Family {
            kind,
            n,
            k,
            m,
            format,
        } => cmd_family(kind, n, k, m.as_ref(), format),
        Cmd::Naf { m, format } => cmd_naf(&m, format),
        Cmd::Compliant { m, table, format } => cmd_compliant(&m, table, format),
        Cmd::Table { max, out, jobs } => cmd_table(max, out, jobs),
        Cmd::Verify { path } => cmd_verify(&path),
    }
}

fn usage(msg: &str) -> i32 {
    eprintln!("usage error: {msg}");
    EXIT_USAGE
}

fn resolve_table_path(flag: Option<PathBuf>) -> PathBuf {
    if let Some(p) = flag {
        return p;
    }
    if let Some(env) = std::env::var_os(TABLE_ENV) {
        return PathBuf::from(env);
    }
    PathBuf::from(DEFAULT_TABLE_PATH)
}

/// Loads the table file if present and extends it in memory until it covers
/// everything the representation lookup for `m` can touch: `m` itself below
/// the ceiling, otherwise the sub-ceiling orders the recursion consults.
/// Nothing is written back; only the table command writes files.
fn table_for(m: &BigInt, flag: Option<PathBuf>) -> Result<RepTable, (i32, String)> {
    let path = resolve_table_path(flag);
    let mut table = RepTable::new();
    if path.exists() {
        let file = std::fs::File::open(&path)
            .map_err(|e| (EXIT_IO, format!("cannot open {}: {e}", path.display())))?;
        table = RepTable::load_jsonl(BufReader::new(file))
            .map_err(|e| (EXIT_IO, format!("cannot load {}: {e}", path.display())))?;
    }
    let ceiling = BigInt::from(TABLE_CEILING);
    let mut needed = if m >= &ceiling {
        TABLE_CEILING - 1
    } else {
        u64::try_from(m.clone()).expect("below the ceiling")
    };
    if needed % 2 == 0 {
        needed -= 1;
    }
    let covered = table
        .max_m()
        .is_some_and(|have| have >= &BigInt::from(needed));
    if !covered {
        let outcome = build_table(needed, 1, Some(table)).map_err(|e| (EXIT_IO, e.to_string()))?;
        if !outcome.uncovered.is_empty() {
            return Err((
                EXIT_IO,
                format!(
                    "table build left {} odd orders uncovered (first: {})",
                    outcome.uncovered.len(),
                    outcome.uncovered[0]
                ),
            ));
        }
        table = outcome.table;
    }
    Ok(table)
}

fn print_certificates(certs: &[WeilCertificate], format: Format) {
    match format {
        Format::Text => {
            for c in certs {
                println!("{}", c.summary_line());
            }
        }
        Format::Json => println!("{}", certificates_to_json_array(certs)),
    }
}

fn cmd_order(m: &BigInt, count: usize, format: Format, n_max: usize, table: Option<PathBuf>) -> i32 {
    if !m.is_positive() {
        return usage("order must be a positive integer");
    }
    if n_max == 0 {
        return usage("--n-max must be at least 1");
    }
    let table = if m.is_odd() {
        match table_for(m, table) {
            Ok(t) => t,
            Err((code, msg)) => {
                eprintln!("{msg}");
                return code;
            }
        }
    } else {
        RepTable::new()
    };
    let opts = ConstructOptions {
        count,
        n_budget: n_max,
    };
    match construct(m, &table, &opts) {
        Ok(certs) => {
            print_certificates(&certs, format);
            EXIT_OK
        }
        Err(PipelineError::BudgetExhausted {
            partial,
            diagnostics,
            want,
            got,
            ..
        }) => {
            print_certificates(&partial, format);
            for d in &diagnostics {
                eprintln!("{d}");
            }
            eprintln!("budget exhausted: {got} of {want} certificates within n <= {n_max}");
            EXIT_BUDGET
        }
        Err(PipelineError::BadOrder(_)) => usage("order must be a positive integer"),
        Err(e) => {
            eprintln!("{e}");
            EXIT_IO
        }
    }
}

fn print_poly(p: &crate::exactpoly::IntPoly, format: Format) {
    match format {
        Format::Text => println!("{p}"),
        Format::Json => {
            let coeffs: Vec<JInt> = p.coeffs().iter().cloned().map(JInt).collect();
            println!(
                "{}",
                serde_json::to_string(&coeffs).expect("coefficient serialization cannot fail")
            );
        }
    }
}

fn cmd_family(
    kind: FamilyKind,
    n: usize,
    k: Option<usize>,
    m: Option<&BigInt>,
    format: Format,
) -> i32 {
    let mut fam = Family::new();
    let poly = match kind {
        FamilyKind::F => {
            if k.is_some() || m.is_some() {
                return usage("kind f takes only --n");
            }
            fam.f(n)
        }
        FamilyKind::G => {
            if m.is_some() {
                return usage("kind g takes --n and --k only");
            }
            let Some(k) = k else {
                return usage("kind g needs --k");
            };
            fam.g(n, k)
        }
        FamilyKind::H | FamilyKind::Hprime => {
            if k.is_some() {
                return usage("kinds h and hprime take --n and --m only");
            }
            let Some(m) = m else {
                return usage("kinds h and hprime need --m");
            };
            if !m.is_positive() {
                return usage("--m must be a positive integer");
            }
            let built = match kind {
                FamilyKind::H => fam.h(m, n),
                _ => fam.h_prime(m, n),
            };
            match built {
                Ok(p) => p,
                Err(e) => return usage(&e.to_string()),
            }
        }
    };
    print_poly(&poly, format);
    EXIT_OK
}

#[derive(Serialize)]
struct NafOut {
    digits: Vec<JInt>,
    k: usize,
}

fn cmd_naf(m: &BigInt, format: Format) -> i32 {
    if !m.is_positive() {
        return usage("m must be a positive integer");
    }
    let rep = family::naf(m);
    match format {
        Format::Text => {
            let digits: Vec<String> = rep.digits.iter().map(|d| d.to_string()).collect();
            println!("digits=[{}] k={}", digits.join(","), rep.k());
        }
        Format::Json => {
            let out = NafOut {
                digits: rep.digits.iter().cloned().map(JInt).collect(),
                k: rep.k(),
            };
            println!(
                "{}",
                serde_json::to_string(&out).expect("digit serialization cannot fail")
            );
        }
    }
    EXIT_OK
}

/// The canonical JSON-lines record of a single table entry.
fn entry_json_line(e: &TableEntry) -> String {
    let mut t = RepTable::new();
    t.insert(e.clone());
    let mut buf = Vec::new();
    t.save_jsonl(&mut buf).expect("in-memory write cannot fail");
    String::from_utf8(buf)
        .expect("json lines are utf-8")
        .trim_end()
        .to_string()
}

fn cmd_compliant(m: &BigInt, table: Option<PathBuf>, format: Format) -> i32 {
    if !m.is_positive() || m.is_even() {
        return usage("compliant representations exist for positive odd orders only");
    }
    let table = match table_for(m, table) {
        Ok(t) => t,
        Err((code, msg)) => {
            eprintln!("{msg}");
            return code;
        }
    };
    match discquality::compliant_rep(m, &table) {
        Ok(entry) => {
            match format {
                Format::Text => println!(
                    "m={} rep = {} quality7={} src={}",
                    entry.m,
                    entry.rep,
                    entry.quality7,
                    entry.src.as_str()
                ),
                Format::Json => println!("{}", entry_json_line(&entry)),
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            EXIT_IO
        }
    }
}

fn cmd_table(max: u64, out: Option<PathBuf>, jobs: usize) -> i32 {
    if max == 0 {
        return usage("--max must be at least 1");
    }
    if jobs == 0 {
        return usage("--jobs must be at least 1");
    }
    let path = resolve_table_path(out);
    let mut seed = None;
    if path.exists() {
        match std::fs::File::open(&path) {
            Ok(f) => match RepTable::load_jsonl(BufReader::new(f)) {
                Ok(t) => seed = Some(t),
                Err(e) => {
                    eprintln!("cannot load existing {}: {e}", path.display());
                    return EXIT_IO;
                }
            },
            Err(e) => {
                eprintln!("cannot open {}: {e}", path.display());
                return EXIT_IO;
            }
        }
    }
    let outcome = match build_table(max, jobs, seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_IO;
        }
    };
    if outcome.seed_rejected > 0 {
        eprintln!(
            "{} seed entries failed the compliance recheck and were rebuilt",
            outcome.seed_rejected
        );
    }
    if !outcome.fallback_ms.is_empty() {
        eprintln!(
            "exact fallback scan used for {} orders",
            outcome.fallback_ms.len()
        );
    }
    for m in &outcome.uncovered {
        eprintln!("m={m}: no compliant representation found");
    }
    let file = match std::fs::File::create(&path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("cannot write {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    if let Err(e) = outcome.table.save_jsonl(std::io::BufWriter::new(file)) {
        eprintln!("cannot write {}: {e}", path.display());
        return EXIT_IO;
    }
    println!("entries={}", outcome.table.len());
    if let Some(q) = outcome.table.min_quality7_from(&BigInt::from(3095)) {
        println!("min_quality7_ge_3095={q}");
    }
    if outcome.uncovered.is_empty() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn verify_certs(certs: &[WeilCertificate]) -> i32 {
    let mut failures = 0usize;
    for (i, c) in certs.iter().enumerate() {
        let (ok, reasons) = verify_certificate(c);
        if !ok {
            failures += 1;
            for r in reasons {
                eprintln!("certificate {i} (m={}): {r}", c.m);
            }
        }
    }
    println!("certificates={}", certs.len());
    if failures == 0 {
        EXIT_OK
    } else {
        eprintln!("{failures} certificates failed verification");
        EXIT_VERIFY
    }
}

fn cmd_verify(path: &std::path::Path) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    let head = text.trim_start();
    if head.starts_with('[') {
        return match certificates_from_json_array(&text) {
            Ok(certs) => verify_certs(&certs),
            Err(e) => {
                eprintln!("{e}");
                EXIT_VERIFY
            }
        };
    }
    let first_line = head.lines().next().unwrap_or("");
    if first_line.contains("\"version\"") {
        let mut certs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match certificate_from_json(line) {
                Ok(c) => certs.push(c),
                Err(e) => {
                    eprintln!("line {}: {e}", idx + 1);
                    return EXIT_VERIFY;
                }
            }
        }
        return verify_certs(&certs);
    }
    // Table file: structural load, then the exact per-entry recheck.
    let table = match RepTable::load_jsonl(text.as_bytes()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_VERIFY;
        }
    };
    let mut failures = 0usize;
    for entry in table.iter() {
        match verify_entry_exact(entry) {
            Ok(true) => {}
            Ok(false) => {
                failures += 1;
                eprintln!("m={}: entry fails the exact recheck", entry.m);
            }
            Err(e) => {
                failures += 1;
                eprintln!("m={}: recheck errored: {e}", entry.m);
            }
        }
    }
    println!("entries={}", table.len());
    if let Some(q) = table.min_quality7_from(&BigInt::from(3095)) {
        println!("min_quality7_ge_3095={q}");
    }
    if failures == 0 {
        EXIT_OK
    } else {
        eprintln!("{failures} entries failed verification");
        EXIT_VERIFY
    }
}
