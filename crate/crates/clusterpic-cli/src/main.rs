use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use clusterpic::equivalence::{balance, canonical_string};
use clusterpic::genus2::classify_genus2;
use clusterpic::graph::{dual_graph, stable_graph};
use clusterpic::input::{parse_input, Curve};
use clusterpic::label::canonical_label;
use clusterpic::notation::to_bracket;
use clusterpic::report::{analyze, canonical_curve};
use clusterpic::semistability::check_semistability;
use clusterpic::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "clusterpic", version, about = "Invariants of hyperelliptic curves from cluster pictures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// fail (exit 2) when a residue-field or tameness hypothesis is not verified
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full invariant report
    Analyze { input: PathBuf },
    /// Dual graph of the special fibre
    Graph {
        input: PathBuf,
        /// emit Graphviz DOT instead of JSON
        #[arg(long)]
        dot: bool,
        /// contract chains to the stable graph first
        #[arg(long)]
        stable: bool,
    },
    /// Genus 2 reduction type, or the canonical graph label in higher genus
    Classify { input: PathBuf },
    /// Balanced representative of the equivalence class and the moves reaching it
    Balance { input: PathBuf },
    /// Semistability criterion with witnesses; exit 2 when it fails
    CheckSemistable { input: PathBuf },
    /// Whether two pictures are equivalent
    Equivalent { a: PathBuf, b: PathBuf },
}

enum Failure {
    Lib(Error),
    Io(String),
    Semantic { kind: &'static str, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn parts(&self) -> (&str, String, u8) {
        match self {
            Failure::Lib(e) => (e.kind(), e.to_string(), if e.is_parse() { 1 } else { 2 }),
            Failure::Io(m) => ("io", m.clone(), 1),
            Failure::Semantic { kind, message } => (kind, message.clone(), 2),
        }
    }
}

fn read(path: &PathBuf) -> Result<Curve, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
    };
    Ok(parse_input(&text)?)
}

// a closed pipe (`| head`) is not an error worth reporting
fn out(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn emit(format: Format, value: serde_json::Value, text: String) {
    match format {
        Format::Json => out(&format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))),
        Format::Text => out(&text),
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.cmd {
        Cmd::Analyze { input } => {
            let report = analyze(&read(input)?)?;
            match cli.format {
                Format::Json => out(&format!("{}\n", report.to_json())),
                Format::Text => out(&report.to_text()),
            }
            let open = report.unverified();
            if cli.strict && !open.is_empty() {
                return Err(Failure::Semantic { kind: "unverified-hypothesis", message: open.join("; ") });
            }
        }
        Cmd::Graph { input, dot, stable } => {
            let c = read(input)?;
            let (pic, g) = canonical_curve(&c.picture, &c.galois);
            let dg = if *stable { stable_graph(&pic, &g)? } else { dual_graph(&pic, &g)? };
            if *dot {
                out(&dg.to_dot());
            } else {
                let text = format!("{} vertices, {} chains, betti {}\n", dg.vertices.len(), dg.chains.len(), dg.betti());
                emit(cli.format, serde_json::to_value(&dg).expect("json"), text);
            }
        }
        Cmd::Classify { input } => {
            let c = read(input)?;
            let (pic, g) = canonical_curve(&c.picture, &c.galois);
            if pic.genus() == 2 {
                let t = classify_genus2(&pic, &g)?;
                let text = format!("{}\n", t.label);
                emit(cli.format, serde_json::to_value(&t).expect("json"), text);
            } else {
                let label = canonical_label(&dual_graph(&pic, &g)?)?;
                emit(cli.format, json!({ "label": label }), format!("{label}\n"));
            }
        }
        Cmd::Balance { input } => {
            let c = read(input)?;
            let (b, moves) = balance(&c.picture);
            let picture = to_bracket(&b, None);
            let moves: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
            let text = format!("{picture}\nmoves: {}\n", if moves.is_empty() { "none".into() } else { moves.join(", ") });
            emit(
                cli.format,
                json!({ "picture": picture, "moves": moves, "canonical": canonical_string(&b) }),
                text,
            );
        }
        Cmd::CheckSemistable { input } => {
            let c = read(input)?;
            let (pic, g) = canonical_curve(&c.picture, &c.galois);
            let v = check_semistability(&pic, &g);
            let mut text = format!("semistable: {}\n", v.semistable);
            for w in &v.witnesses {
                text.push_str(&format!(
                    "  clause {} at {}: {}\n",
                    w.clause,
                    w.cluster.as_deref().unwrap_or("-"),
                    w.reason
                ));
            }
            emit(cli.format, serde_json::to_value(&v).expect("json"), text);
            if !v.semistable {
                return Ok(2);
            }
        }
        Cmd::Equivalent { a, b } => {
            let (ca, cb) = (read(a)?, read(b)?);
            let (ba, bb) = (canonical_string(&balance(&ca.picture).0), canonical_string(&balance(&cb.picture).0));
            let eq = ba == bb;
            emit(cli.format, json!({ "equivalent": eq, "balanced": [ba, bb] }), format!("{eq}\n"));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (kind, message, code) = f.parts();
            match cli.format {
                Format::Json => eprintln!("{}", json!({ "error": { "kind": kind, "message": message } })),
                Format::Text => eprintln!("error ({kind}): {message}"),
            }
            ExitCode::from(code)
        }
    }
}
