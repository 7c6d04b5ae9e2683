//! `cmbound`: reproducible experiments on modularity lower bounds for
//! elliptic curves over CM fields.
//!
//! Every command prints one JSON document (`command`, `seed`, `config`,
//! `result`) unless `--format table` is given. Exit codes: 0 ok, 2 bad or
//! inadmissible input, 3 enumeration cap exceeded.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use cmbound::bounds::{generic_bound, lower_bound, threshold, BoundResult};
use cmbound::density::{montecarlo_density, ordinary_density_exact};
use cmbound::ffcurves::{census, census_cross_checked, CROSS_CHECK_MAX_DEGREE};
use cmbound::gimage::{
    certify_with, checklist, dg_find_with, KCurve, PrimeTable, DEFAULT_SCAN_BOUND,
};
use cmbound::numfield::{
    normalize, splitting_of_5, FieldDescriptor, OKElement, RawDescriptor, SplittingData,
};
use cmbound::{Error, Result};

mod report;

#[derive(Parser)]
#[command(
    name = "cmbound",
    version,
    about = "Modularity lower bounds over CM fields"
)]
struct Cli {
    /// Output format; `report` defaults to a table, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every random choice; recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Exact,
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound (1 - 5^-f)^(2r) for a field, a splitting type or a degree.
    Bound {
        #[arg(long, conflicts_with_all = ["efr", "degree"])]
        field: Option<String>,
        /// Splitting data as e,f,r.
        #[arg(long, value_delimiter = ',', conflicts_with = "degree")]
        efr: Option<Vec<u32>>,
        /// Worst case (4/5)^(2 deg) for a CM field of this degree.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Singular / supersingular / ordinary counts over F_{5^f}.
    Census {
        #[arg(long)]
        f: usize,
        /// Also compare Deuring classification with point counts.
        #[arg(long)]
        cross_check: bool,
    },
    /// Residue-criterion density of coefficient pairs of height below X.
    Density {
        #[arg(long)]
        field: String,
        #[arg(long = "X")]
        x: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Certify that the mod-5 image contains SL_2(F_5).
    ImageScan {
        #[arg(long, required_unless_present = "batch")]
        field: Option<String>,
        /// Coordinates of A in the integral basis, comma separated.
        #[arg(
            long = "A",
            allow_hyphen_values = true,
            required_unless_present = "batch"
        )]
        a: Option<String>,
        #[arg(
            long = "B",
            allow_hyphen_values = true,
            required_unless_present = "batch"
        )]
        b: Option<String>,
        /// CSV of `field;Ax;Ay;Bx;By` rows; output is one JSON line per row.
        #[arg(long, conflicts_with_all = ["field", "a", "b"])]
        batch: Option<PathBuf>,
        #[arg(long = "L", default_value_t = DEFAULT_SCAN_BOUND)]
        l: u64,
    },
    /// Smallest decomposed generic prime up to L.
    DgFind {
        #[arg(long)]
        field: String,
        #[arg(long = "A", allow_hyphen_values = true)]
        a: String,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: String,
        #[arg(long = "L", default_value_t = DEFAULT_SCAN_BOUND)]
        l: u64,
    },
    /// Per-hypothesis report for a single curve.
    Checklist {
        #[arg(long)]
        field: String,
        #[arg(long = "A", allow_hyphen_values = true)]
        a: String,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: String,
        #[arg(long = "L", default_value_t = DEFAULT_SCAN_BOUND)]
        l: u64,
    },
    /// Smallest N with envelope(n) >= 1 - eps on N..=scan-max.
    Threshold {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        scan_max: u64,
    },
    /// Bounds for the three quadratic splitting types, generic degrees and
    /// cyclotomic fields of conductor up to 50.
    Report,
}

fn parse_field(text: &str) -> Result<FieldDescriptor> {
    normalize(text.parse::<RawDescriptor>()?)
}

fn parse_coords(d: &FieldDescriptor, text: &str) -> Result<OKElement> {
    let coords = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::InvalidInput(format!("bad coordinate list {text:?}: {e}")))?;
    if coords.len() == 1 {
        return Ok(d.from_int(coords[0]));
    }
    d.element(coords)
}

fn parse_curve(field: &str, a: &str, b: &str) -> Result<KCurve> {
    let d = parse_field(field)?;
    KCurve::new(d, parse_coords(&d, a)?, parse_coords(&d, b)?)
}

#[derive(Serialize)]
struct FieldBound {
    field: String,
    splitting: SplittingData,
    kind: &'static str,
    power_form: String,
    bound: BoundResult,
}

/// Rendered output: the JSON envelope, or lines for a table.
enum Output {
    Json(Value),
    Lines(Vec<String>),
}

fn envelope(command: &str, seed: u64, config: Value, result: impl Serialize) -> Value {
    json!({
        "command": command,
        "seed": seed,
        "config": config,
        "result": serde_json::to_value(result).expect("results serialize"),
    })
}

/// `key: value` lines from a JSON object, nested keys joined with dots.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}: {s}")),
        other => out.push(format!("{prefix}: {other}")),
    }
}

fn as_table(doc: &Value) -> Vec<String> {
    let mut lines = Vec::new();
    flatten("", doc, &mut lines);
    lines
}

fn run(cli: &Cli) -> Result<Output> {
    let seed = cli.seed;
    let table = cli.format == Some(Format::Table);
    let doc = match &cli.command {
        Command::Bound { field, efr, degree } => {
            let config = json!({ "field": field, "efr": efr, "degree": degree });
            if let Some(text) = field {
                let d = parse_field(text)?;
                let s = splitting_of_5(&d);
                let bound = lower_bound(s);
                let result = FieldBound {
                    field: d.to_string(),
                    splitting: s,
                    kind: s.kind(),
                    power_form: bound.power_form(),
                    bound,
                };
                envelope("bound", seed, config, result)
            } else if let Some(v) = efr {
                if v.len() != 3 {
                    return Err(Error::InvalidInput(format!(
                        "--efr takes e,f,r; got {} values",
                        v.len()
                    )));
                }
                let s = SplittingData::new(v[0], v[1], v[2])?;
                envelope("bound", seed, config, lower_bound(s))
            } else if let Some(deg) = degree {
                envelope("bound", seed, config, generic_bound(*deg)?)
            } else {
                return Err(Error::InvalidInput(
                    "bound needs one of --field, --efr, --degree".into(),
                ));
            }
        }
        Command::Census { f, cross_check } => {
            let config = json!({ "f": f, "cross_check": cross_check });
            if *cross_check {
                if *f > CROSS_CHECK_MAX_DEGREE {
                    return Err(Error::InvalidInput(format!(
                        "cross-check supports f <= {CROSS_CHECK_MAX_DEGREE}"
                    )));
                }
                let (c, x) = census_cross_checked(*f)?;
                envelope(
                    "census",
                    seed,
                    config,
                    json!({ "census": c, "cross_check": x }),
                )
            } else {
                envelope("census", seed, config, json!({ "census": census(*f)? }))
            }
        }
        Command::Density {
            field,
            x,
            mode,
            samples,
        } => {
            let d = parse_field(field)?;
            let config =
                json!({ "field": d.to_string(), "X": x, "mode": mode, "samples": samples });
            let result = match mode {
                Mode::Exact => ordinary_density_exact(&d, *x)?,
                Mode::Mc => montecarlo_density(&d, *x, *samples, seed)?,
            };
            envelope("density", seed, config, result)
        }
        Command::ImageScan {
            batch: Some(path),
            l,
            ..
        } => {
            return image_scan_batch(path, *l).map(Output::Lines);
        }
        Command::ImageScan { field, a, b, l, .. } => {
            let (field, a, b) = (
                field.as_deref().unwrap_or_default(),
                a.as_deref().unwrap_or_default(),
                b.as_deref().unwrap_or_default(),
            );
            let curve = parse_curve(field, a, b)?;
            let config = json!({ "field": curve.field().to_string(), "A": a, "B": b, "L": l });
            let t = PrimeTable::new(*curve.field(), *l);
            envelope("image-scan", seed, config, certify_with(&t, &curve)?)
        }
        Command::DgFind { field, a, b, l } => {
            let curve = parse_curve(field, a, b)?;
            let config = json!({ "field": curve.field().to_string(), "A": a, "B": b, "L": l });
            let t = PrimeTable::new(*curve.field(), *l);
            let found = dg_find_with(&t, &curve)?;
            envelope(
                "dg-find",
                seed,
                config,
                json!({ "curve": curve.id(), "scan_bound": l, "prime": found }),
            )
        }
        Command::Checklist { field, a, b, l } => {
            let curve = parse_curve(field, a, b)?;
            let config = json!({ "field": curve.field().to_string(), "A": a, "B": b, "L": l });
            envelope("checklist", seed, config, checklist(&curve, *l)?)
        }
        Command::Threshold { eps, scan_max } => {
            let config = json!({ "eps": eps, "scan_max": scan_max });
            envelope("threshold", seed, config, threshold(*eps, *scan_max)?)
        }
        Command::Report => {
            let rep = report::build()?;
            if cli.format != Some(Format::Json) {
                return Ok(Output::Lines(report::table(&rep)));
            }
            envelope("report", seed, json!({}), rep)
        }
    };
    Ok(if table {
        Output::Lines(as_table(&doc))
    } else {
        Output::Json(doc)
    })
}

fn image_scan_batch(path: &PathBuf, l: u64) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut curves = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::InvalidInput(format!("row {}: {e}", i + 1)))?;
        if i == 0 && row.get(0) == Some("field") {
            continue;
        }
        if row.len() != 5 {
            return Err(Error::InvalidInput(format!(
                "row {}: expected field;Ax;Ay;Bx;By, got {} columns",
                i + 1,
                row.len()
            )));
        }
        let a = format!("{},{}", &row[1], &row[2]);
        let b = format!("{},{}", &row[3], &row[4]);
        let curve = parse_curve(&row[0], &a, &b).map_err(|e| match e {
            Error::Singular => Error::InvalidInput(format!("row {}: singular curve", i + 1)),
            Error::InvalidInput(m) => Error::InvalidInput(format!("row {}: {m}", i + 1)),
            Error::Inadmissible(m) => Error::Inadmissible(format!("row {}: {m}", i + 1)),
            other => other,
        })?;
        curves.push(curve);
    }
    let mut tables: Vec<PrimeTable> = Vec::new();
    for c in &curves {
        if !tables.iter().any(|t| t.field() == c.field()) {
            tables.push(PrimeTable::new(*c.field(), l));
        }
    }
    curves
        .par_iter()
        .map(|c| {
            let t = tables
                .iter()
                .find(|t| t.field() == c.field())
                .expect("table built above");
            let report = certify_with(t, c)?;
            Ok(serde_json::to_string(&report).expect("reports serialize"))
        })
        .collect()
}

fn exit_code(e: &Error) -> u8 {
    if e.is_cap() {
        3
    } else {
        2
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("CMBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("CMBOUND_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let mut text = match output {
        Output::Json(v) => serde_json::to_string_pretty(&v).expect("json"),
        Output::Lines(lines) => lines.join("\n"),
    };
    text.push('\n');
    let written = match &cli.out {
        Some(path) => fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
