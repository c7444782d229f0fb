use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncd_moduli::building::{build, build_multi};
use ncd_moduli::dimension::{enhanced_balance, expected_dim, naive_gap, stratum_codim, DimensionInput};
use ncd_moduli::divisor::{simple_crossings, CombinatorialDivisor, CrossingPoset};
use ncd_moduli::exactnum::format_rational;
use ncd_moduli::fixtures;
use ncd_moduli::levelsys::{
    asymptotic_classes, beta_relations, build_system, feasible_positive, solve_gluing, torus_dim, GluingInput, Unknown,
};
use ncd_moduli::maptype::MapType;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use thiserror::Error;

const VERSION: &str = "ncd-moduli/1";

#[derive(Parser)]
#[command(name = "ncd-moduli", version, about = "Map types, level buildings and level systems over normal-crossings divisors")]
struct Cli {
    /// Machine-readable output wrapped in a versioned envelope.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every map-type validator.
    Validate { file: PathBuf },
    /// Component counts of the depth-k strata.
    Strata {
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Dump the level-m building over a divisor.
    Building {
        file: PathBuf,
        #[arg(long)]
        m: Option<u32>,
        /// One level count per component.
        #[arg(long, value_delimiter = ',')]
        multi: Option<Vec<u32>>,
    },
    /// Expected dimension, naive gap and codimension.
    Dim {
        file: Option<PathBuf>,
        #[arg(long = "c1A", allow_negative_numbers = true)]
        c1a: Option<i64>,
        #[arg(long = "dimX")]
        dim_x: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        chi: Option<i64>,
        #[arg(long)]
        ell: Option<i64>,
        #[arg(long = "AV", allow_negative_numbers = true)]
        av: Option<i64>,
    },
    /// Level equations, positive witness, torus dimension and relations.
    Levels { file: PathBuf },
    /// Solve a gluing problem for given rescaling parameters.
    Glue { file: PathBuf },
    /// Print or write a built-in map type.
    Example {
        name: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed input `{path}`: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

/// Human text, the JSON result, and a failure message if the run should
/// exit with status 1 after printing.
struct Report {
    text: String,
    json: Value,
    failure: Option<String>,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, failure: None }
    }
}

fn read_source(path: &Path) -> Result<String, CliError> {
    let name = path.display().to_string();
    if name == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Read { path: name, source })?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Read { path: name, source })
    }
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse(path, &read_source(path)?)
}

/// Accepts a divisor, a map type (its divisor is used) or a crossing poset.
fn load_divisor(path: &Path) -> Result<CombinatorialDivisor, CliError> {
    let text = read_source(path)?;
    let v: Value = parse(path, &text)?;
    let d = if v.get("divisor").is_some() {
        parse::<MapType>(path, &text)?.divisor
    } else if v.get("strata").is_some() {
        parse(path, &text)?
    } else {
        let poset: CrossingPoset = parse(path, &text)?;
        simple_crossings(&poset).map_err(|e| CliError::Input(e.to_string()))?
    };
    let violations = d.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Failed(format!("invalid divisor:\n  {}", list.join("\n  "))));
    }
    Ok(d)
}

fn validate(file: &Path) -> Result<Report, CliError> {
    let mt: MapType = load(file)?;
    let mut problems: Vec<String> = mt.divisor.validate().iter().map(|v| v.to_string()).collect();
    let mut enhanced = None;
    if problems.is_empty() {
        match mt.validate_all() {
            Ok(r) => enhanced = Some(r),
            Err(vs) => problems.extend(vs.iter().map(|v| v.to_string())),
        }
    }
    if problems.is_empty() && !mt.degree_check() {
        let found: u64 = mt.marked_points().iter().map(|p| p.contact.degree()).sum();
        problems.push(format!("contact degrees of marked points sum to {found}, AV = {}", mt.av));
    }
    let mut text = String::new();
    if problems.is_empty() {
        let r = enhanced.as_ref().expect("validated");
        let branches = r.branches.as_ref().map_or("?".to_string(), |b| b.to_string());
        writeln!(text, "ok: {} components, {} nodes", mt.components.len(), mt.nodes.len()).unwrap();
        writeln!(text, "enhanced matching: {branches} branches, {} free", r.free_dimension).unwrap();
    } else {
        for p in &problems {
            writeln!(text, "violation: {p}").unwrap();
        }
    }
    let json = json!({ "valid": problems.is_empty(), "violations": problems, "enhanced": enhanced });
    let failure = (!problems.is_empty()).then(|| format!("{} violation(s)", problems.len()));
    Ok(Report { text, json, failure })
}

fn strata(file: &Path, k: Option<usize>) -> Result<Report, CliError> {
    let d = load_divisor(file)?;
    let counts = |k| d.stratum_counts(k).map_err(|e| CliError::Input(e.to_string()));
    if let Some(k) = k {
        let c = counts(k)?;
        return Ok(Report::ok(format!("{c}\n"), json!({ "k": k, "counts": c })));
    }
    let mut text = String::new();
    let mut all = Vec::new();
    for k in 1..=d.max_depth() {
        let c = counts(k)?;
        writeln!(text, "k={k}: {c}").unwrap();
        all.push(json!({ "k": k, "counts": c }));
    }
    Ok(Report::ok(text, Value::Array(all)))
}

fn building(file: &Path, m: Option<u32>, multi: Option<Vec<u32>>) -> Result<Report, CliError> {
    let d = load_divisor(file)?;
    let b = match (m, multi) {
        (_, Some(levels)) => build_multi(&d, &levels).map_err(|e| CliError::Failed(e.to_string()))?,
        (Some(m), None) => build(&d, m),
        (None, None) => return Err(CliError::Input("building needs --m or --multi".into())),
    };
    let dump = b.dump().map_err(|e| CliError::Failed(e.to_string()))?;
    let mut text = String::new();
    let c = &dump.counts;
    writeln!(text, "pieces: {} ({} labelled, {} main classes)", c.pieces, c.labelled_pieces, c.main_classes).unwrap();
    for (k, n) in &c.classes_by_depth {
        writeln!(text, "depth {k}: {n} piece classes").unwrap();
    }
    writeln!(text, "divisor strata: {}", dump.divisor_strata.len()).unwrap();
    writeln!(text, "attaching pairs: {}", dump.attaching.len()).unwrap();
    let json = serde_json::to_value(&dump).expect("dump serializes");
    Ok(Report::ok(text, json))
}

struct DimFlags {
    c1a: Option<i64>,
    dim_x: Option<i64>,
    chi: Option<i64>,
    ell: Option<i64>,
    av: Option<i64>,
}

fn dim(file: Option<&Path>, f: DimFlags) -> Result<Report, CliError> {
    let mt: Option<MapType> = file.map(load).transpose()?;
    let base = match &mt {
        Some(mt) => Some(mt.dimension_input().map_err(|e| CliError::Input(e.to_string()))?),
        None => None,
    };
    let pick = |flag: Option<i64>, from: Option<i64>, name: &str| {
        flag.or(from).ok_or_else(|| CliError::Input(format!("missing --{name} (or a map-type file)")))
    };
    let input = DimensionInput::new(
        pick(f.c1a, base.map(|b| b.c1a), "c1A")?,
        pick(f.dim_x, base.map(|b| b.dim_x), "dimX")?,
        pick(f.chi, base.map(|b| b.chi), "chi")?,
        pick(f.ell, base.map(|b| b.ell), "ell")?,
        pick(f.av, base.map(|b| b.av), "AV")?,
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    let e = expected_dim(&input);
    let mut text = format!("expected_dim: {e}\n");
    let mut json = json!({ "input": input, "expected_dim": e });
    if let Some(mt) = &mt {
        let depths: Vec<u32> = mt.marked_points().iter().map(|p| p.contact.depth() as u32).collect();
        let gap = naive_gap(&depths);
        let balance = enhanced_balance(&depths);
        writeln!(text, "naive_gap: {gap}").unwrap();
        writeln!(text, "enhanced_balance: {balance}").unwrap();
        json["naive_gap"] = json!(gap);
        json["enhanced_balance"] = json!(balance);
        match stratum_codim(mt) {
            Ok(c) => {
                writeln!(text, "codim: {c}").unwrap();
                json["codim"] = json!(c);
            }
            Err(err) => return Err(CliError::Failed(format!("level system: {err}"))),
        }
    }
    Ok(Report::ok(text, json))
}

fn unknown_name(sys: &ncd_moduli::levelsys::LevelSystem, u: &Unknown) -> String {
    match u {
        Unknown::Node(n) => format!("alpha({n})"),
        Unknown::Level { group, level } => sys.beta_name(*group, *level),
    }
}

fn levels(file: &Path) -> Result<Report, CliError> {
    let mt: MapType = load(file)?;
    let sys = build_system(&mt).map_err(|e| CliError::Failed(format!("level system: {e}")))?;
    let equations: Vec<String> = sys.equations.iter().map(|e| sys.describe_equation(e)).collect();
    let mut text = String::from("equations:\n");
    for e in &equations {
        writeln!(text, "  {e}").unwrap();
    }
    let Some(w) = feasible_positive(&sys) else {
        text.push_str("no positive solution\n");
        let json = json!({ "system": sys, "equations": equations, "feasible": false });
        return Ok(Report { text, json, failure: Some("the level system has no positive solution".into()) });
    };
    let mut witness = serde_json::Map::new();
    let mut parts = Vec::new();
    for (name, q) in sys.node_names.iter().map(|n| format!("alpha({n})")).zip(w.alphas()) {
        parts.push(format!("{name} = {}", format_rational(q)));
        witness.insert(name, json!(format_rational(q)));
    }
    for ((g, l), q) in sys.betas().into_iter().zip(w.betas()) {
        let name = sys.beta_name(g, l);
        parts.push(format!("{name} = {}", format_rational(q)));
        witness.insert(name, json!(format_rational(q)));
    }
    writeln!(text, "witness: {}", parts.join(", ")).unwrap();
    let t = torus_dim(&sys);
    writeln!(text, "torus_dim: {t}").unwrap();
    let relations: Vec<String> = beta_relations(&sys).iter().map(|r| r.display(&sys).to_string()).collect();
    text.push_str("relations:\n");
    for r in &relations {
        writeln!(text, "  {r}").unwrap();
    }
    if relations.is_empty() {
        text.push_str("  (none)\n");
    }
    let classes = asymptotic_classes(&mt).map_err(|e| CliError::Failed(e.to_string()))?;
    text.push_str("classes:\n");
    let mut class_json = Vec::new();
    for c in &classes {
        let members: Vec<String> =
            c.members.iter().map(|(u, q)| format!("{}~{}", unknown_name(&sys, u), format_rational(q))).collect();
        writeln!(text, "  {{{}}}", members.join(", ")).unwrap();
        class_json.push(Value::Array(
            c.members
                .iter()
                .map(|(u, q)| json!({ "unknown": unknown_name(&sys, u), "exponent": format_rational(q) }))
                .collect(),
        ));
    }
    let json = json!({
        "system": sys,
        "equations": equations,
        "feasible": true,
        "witness": witness,
        "torus_dim": t,
        "relations": relations,
        "classes": class_json,
    });
    Ok(Report::ok(text, json))
}

fn glue(file: &Path) -> Result<Report, CliError> {
    let input: GluingInput = load(file)?;
    let sol = solve_gluing(&input.problem, &input.lambda).map_err(|e| CliError::Input(e.to_string()))?;
    let mut text = String::new();
    for n in &sol.nodes {
        match n.conflict {
            Some((i, j)) => writeln!(text, "{}: inconsistent (directions {i} and {j})", n.name).unwrap(),
            None => {
                let sols: Vec<String> = n.solutions.iter().map(|s| s.to_string()).collect();
                writeln!(text, "{}: {} solutions [{}]", n.name, n.count, sols.join(", ")).unwrap();
            }
        }
    }
    let consistent = sol.consistent();
    let total = sol.total();
    writeln!(text, "total: {total}").unwrap();
    let json = json!({ "consistent": consistent, "total": total.to_string(), "nodes": sol.nodes });
    let failure = (!consistent).then(|| "the gluing equations are inconsistent".to_string());
    Ok(Report { text, json, failure })
}

fn example(name: &str, emit: Option<&Path>, as_json: bool) -> Result<Report, CliError> {
    let mt = fixtures::fixture(name).ok_or_else(|| {
        CliError::Input(format!("unknown example `{name}`; known: {}", fixtures::names().join(", ")))
    })?;
    let mut body = serde_json::to_string_pretty(&mt).expect("map types serialize");
    body.push('\n');
    let json = serde_json::to_value(&mt).expect("map types serialize");
    match emit {
        Some(path) => {
            std::fs::write(path, &body)
                .map_err(|source| CliError::Write { path: path.display().to_string(), source })?;
            let note = format!("wrote {}\n", path.display());
            Ok(Report::ok(note, json!({ "name": name, "path": path.display().to_string() })))
        }
        // plain output is the file itself, so it can be piped into other subcommands
        None if !as_json => Ok(Report::ok(body, Value::Null)),
        None => Ok(Report::ok(String::new(), json)),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Strata { .. } => "strata",
        Command::Building { .. } => "building",
        Command::Dim { .. } => "dim",
        Command::Levels { .. } => "levels",
        Command::Glue { .. } => "glue",
        Command::Example { .. } => "example",
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Strata { file, k } => strata(&file, k),
        Command::Building { file, m, multi } => building(&file, m, multi),
        Command::Dim { file, c1a, dim_x, chi, ell, av } => dim(file.as_deref(), DimFlags { c1a, dim_x, chi, ell, av }),
        Command::Levels { file } => levels(&file),
        Command::Glue { file } => glue(&file),
        Command::Example { name, emit } => example(&name, emit.as_deref(), cli.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let as_json = cli.json;
    let command = command_name(&cli.command);
    match run(cli) {
        Ok(report) => {
            if as_json {
                let env = json!({ "version": VERSION, "command": command, "result": report.json });
                println!("{}", serde_json::to_string_pretty(&env).expect("values serialize"));
            } else {
                print!("{}", report.text);
            }
            match report.failure {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
