use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pathnet_core::cuntz::{verify_cuntz, CuntzWindow, SchemeRegistry};
use pathnet_core::expr::parse_path;
use pathnet_core::homology::h1_data;
use pathnet_core::net::net_verify;
use pathnet_core::operator::WindowMatrix;
use pathnet_core::rep::represent;
use pathnet_core::suites::{SuiteConfig, SuiteRegistry};
use pathnet_core::window::{build_window, BasisWindow, WindowParams, DEFAULT_DEPTH};
use pathnet_core::word::{loop_group, replay, trace_from_json, trace_to_json, Certificate, Engine, Verdict};
use pathnet_core::{Error, Poset};

#[derive(Parser)]
#[command(name = "pathnet", version, about = "Path semigroups of posets and their operator representations")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PosetArg {
    /// Poset JSON file: {"elements": [...], "le": [[a, b], ...]}.
    #[arg(long)]
    poset: PathBuf,
}

#[derive(Args)]
struct WindowArg {
    /// Reduced-length bound for windows over non-directed posets.
    #[arg(long, default_value_t = 6)]
    len: usize,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Load a poset file and report its basic structure.
    CheckPoset { file: PathBuf },
    /// Print the normal form of a path.
    Normalize {
        #[command(flatten)]
        poset: PosetArg,
        expr: String,
    },
    /// Print the product `lhs * rhs` (rhs applied first).
    Mul {
        #[command(flatten)]
        poset: PosetArg,
        lhs: String,
        rhs: String,
    },
    /// Print the inverse of a path.
    Inv {
        #[command(flatten)]
        poset: PosetArg,
        expr: String,
    },
    /// Decide whether two paths are equal in the path semigroup.
    Eq {
        #[command(flatten)]
        poset: PosetArg,
        lhs: String,
        rhs: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Write the equality trace as JSON.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Check an equality trace written by `eq --trace-out`.
    Replay {
        #[command(flatten)]
        poset: PosetArg,
        lhs: String,
        rhs: String,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Spanning-tree presentation of the loop group at a base point.
    Loops {
        #[command(flatten)]
        poset: PosetArg,
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// First homology of the order complex, or the class of a loop.
    H1 {
        #[command(flatten)]
        poset: PosetArg,
        expr: Option<String>,
    },
    /// Basis windows and the represented operators.
    Rep {
        #[command(subcommand)]
        action: RepAction,
    },
    /// The isomorphism net between `S^a` blocks.
    Net {
        #[command(subcommand)]
        action: NetAction,
    },
    /// Cuntz relations of the extension generators on a window of ℕ.
    Cuntz(CuntzArgs),
    /// Export operators.
    Export {
        #[command(subcommand)]
        what: ExportWhat,
    },
    /// Run a named verification suite.
    Verify {
        suite: String,
        #[arg(long)]
        poset: Option<PathBuf>,
        #[command(flatten)]
        window: WindowArg,
        #[arg(long, default_value_t = 3)]
        simplices: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum RepAction {
    /// List the window basis.
    Build {
        #[command(flatten)]
        poset: PosetArg,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Run the representation suite.
    Verify {
        #[command(flatten)]
        poset: PosetArg,
        #[command(flatten)]
        window: WindowArg,
    },
}

#[derive(Subcommand)]
enum NetAction {
    Verify {
        #[command(flatten)]
        poset: PosetArg,
        #[command(flatten)]
        window: WindowArg,
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
}

#[derive(Args)]
struct CuntzArgs {
    /// Finite scheme with `n` blocks.
    #[arg(long, conflicts_with = "infinite", required_unless_present = "infinite")]
    n: Option<u64>,
    /// Infinite scheme, checking the first `m` generators.
    #[arg(long)]
    infinite: Option<usize>,
    /// Window size N over {0, …, N-1}.
    #[arg(long, default_value_t = 16)]
    window: usize,
    /// Partition scheme; `residue` for --n, `dyadic` for --infinite.
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Subcommand)]
enum ExportWhat {
    /// Write `T_p` on the window as a sparse matrix.
    Op {
        #[command(flatten)]
        poset: PosetArg,
        expr: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        window: WindowArg,
        /// Write the partial injection instead of the matrix.
        #[arg(long)]
        injection: bool,
    },
}

enum Status {
    Ok,
    Failed,
    Unknown,
}

struct Output {
    status: Status,
    text: String,
    json: Value,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Output { status: Status::Ok, text: text.into(), json }
    }

    fn verdict(passed: bool, text: impl Into<String>, json: Value) -> Self {
        let status = if passed { Status::Ok } else { Status::Failed };
        Output { status, text: text.into(), json }
    }
}

#[derive(Debug)]
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        InputError(e.to_string())
    }
}

type Res<T> = Result<T, InputError>;

fn load_poset(file: &PathBuf) -> Res<Poset> {
    let text = fs::read_to_string(file).map_err(|e| InputError(format!("{}: {e}", file.display())))?;
    Ok(Poset::from_json(&text)?)
}

fn window(p: &Poset, w: &WindowArg) -> Res<BasisWindow> {
    Ok(build_window(p, WindowParams::Reduced { max_len: w.len, depth: w.depth }.directed_if(p))?)
}

fn class_text<T: ToString>(v: &[T]) -> String {
    if v.is_empty() {
        "0".into()
    } else {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

fn run(cli: &Cli) -> Res<Output> {
    match &cli.command {
        Command::CheckPoset { file } => {
            let p = load_poset(file)?;
            let h1 = h1_data(&p).ok().map(|h| (h.rank, h.torsion.iter().map(ToString::to_string).collect::<Vec<_>>()));
            let text = format!(
                "{} elements, {} covering pairs, connected: {}, upward directed: {}{}",
                p.len(),
                p.cover_pairs().len(),
                p.is_connected(),
                p.is_upward_directed(),
                h1.as_ref().map(|(r, t)| format!(", H1 rank {r}, torsion {t:?}")).unwrap_or_default(),
            );
            let json = json!({
                "poset": serde_json::from_str::<Value>(&p.to_json()).expect("valid json"),
                "connected": p.is_connected(),
                "upward_directed": p.is_upward_directed(),
                "h1": h1.map(|(rank, torsion)| json!({"rank": rank, "torsion": torsion})),
            });
            Ok(Output::ok(text, json))
        }
        Command::Normalize { poset, expr } => {
            let p = load_poset(&poset.poset)?;
            let q = parse_path(expr, &p)?;
            Ok(Output::ok(q.render(&p), json!({"path": q.render(&p), "steps": q.len()})))
        }
        Command::Mul { poset, lhs, rhs } => {
            let p = load_poset(&poset.poset)?;
            let q = parse_path(lhs, &p)?.compose(&p, &parse_path(rhs, &p)?);
            Ok(Output::ok(q.render(&p), json!({"path": q.render(&p)})))
        }
        Command::Inv { poset, expr } => {
            let p = load_poset(&poset.poset)?;
            let q = parse_path(expr, &p)?.inverse();
            Ok(Output::ok(q.render(&p), json!({"path": q.render(&p)})))
        }
        Command::Eq { poset, lhs, rhs, depth, trace_out } => {
            let p = load_poset(&poset.poset)?;
            let (l, r) = (parse_path(lhs, &p)?, parse_path(rhs, &p)?);
            Ok(match Engine::new(&p).equal(&p, &l, &r, *depth) {
                Verdict::Equal { trace } => {
                    if let Some(out) = trace_out {
                        fs::write(out, trace_to_json(&p, &trace))?;
                    }
                    Output::ok(format!("equal ({} moves)", trace.len()), json!({"verdict": "equal", "moves": trace.len()}))
                }
                Verdict::Distinct(Certificate::EndpointMismatch) => Output::verdict(
                    false,
                    "distinct: endpoints differ",
                    json!({"verdict": "distinct", "certificate": "endpoints"}),
                ),
                Verdict::Distinct(Certificate::Homology { left, right }) => Output::verdict(
                    false,
                    format!("distinct: homology {} ≠ {}", class_text(&left), class_text(&right)),
                    json!({
                        "verdict": "distinct",
                        "certificate": "homology",
                        "left": left.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "right": right.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    }),
                ),
                Verdict::Unknown { explored } => Output {
                    status: Status::Unknown,
                    text: format!("unknown after {explored} words"),
                    json: json!({"verdict": "unknown", "explored": explored}),
                },
            })
        }
        Command::Replay { poset, lhs, rhs, trace } => {
            let p = load_poset(&poset.poset)?;
            let (l, r) = (parse_path(lhs, &p)?, parse_path(rhs, &p)?);
            let moves = trace_from_json(&p, &fs::read_to_string(trace)?)?;
            Ok(match replay(&p, &l, &r, &moves) {
                Ok(()) => Output::ok(format!("replayed {} moves", moves.len()), json!({"replayed": true})),
                Err(e) => Output::verdict(false, e.to_string(), json!({"replayed": false, "error": e.to_string()})),
            })
        }
        Command::Loops { poset, base, depth } => {
            let p = load_poset(&poset.poset)?;
            let lg = loop_group(&p, p.elem(base)?, *depth)?;
            let mut text = format!("loop group at {}: {} generators\n", base, lg.generators.len());
            let gens: Vec<Value> = lg
                .generators
                .iter()
                .map(|g| {
                    let (u, v) = (p.name(g.chord.0), p.name(g.chord.1));
                    let path = g.path.render(&p);
                    text.push_str(&format!(
                        "  ({u},{v}) {path}{}\n",
                        if g.reduces_to_unit { "  = unit" } else { "" }
                    ));
                    json!({"chord": [u, v], "path": path, "reduces_to_unit": g.reduces_to_unit})
                })
                .collect();
            text.push_str(&format!("{} relators", lg.relators.len()));
            let tree: Vec<[&str; 2]> = lg.tree_edges.iter().map(|&(a, b)| [p.name(a), p.name(b)]).collect();
            Ok(Output::ok(text, json!({"base": base, "tree_edges": tree, "generators": gens, "relators": lg.relators})))
        }
        Command::H1 { poset, expr } => {
            let p = load_poset(&poset.poset)?;
            let h = h1_data(&p)?;
            let torsion: Vec<String> = h.torsion.iter().map(ToString::to_string).collect();
            match expr {
                None => Ok(Output::ok(
                    format!("H1 = Z^{}{}", h.rank, torsion.iter().map(|t| format!(" + Z/{t}")).collect::<String>()),
                    json!({"rank": h.rank, "torsion": torsion}),
                )),
                Some(e) => {
                    let q = parse_path(e, &p)?;
                    let class = h.h1_class(&p, &q)?;
                    let strs: Vec<String> = class.iter().map(ToString::to_string).collect();
                    Ok(Output::ok(format!("class ({})", strs.join(", ")), json!({"class": strs, "rank": h.rank})))
                }
            }
        }
        Command::Rep { action: RepAction::Build { poset, window: wa } } => {
            let p = load_poset(&poset.poset)?;
            let w = window(&p, wa)?;
            let names = w.basis_names();
            let text = format!("{} basis paths\n{}", names.len(), names.join("\n"));
            Ok(Output::ok(text, json!({"directed": w.is_directed(), "basis": names})))
        }
        Command::Rep { action: RepAction::Verify { poset, window: wa } } => {
            let p = load_poset(&poset.poset)?;
            suite(cli, "rep", Some(&p), wa, 3, 100)
        }
        Command::Net { action: NetAction::Verify { poset, window: wa, samples } } => {
            let p = load_poset(&poset.poset)?;
            let w = window(&p, wa)?;
            let r = net_verify(&w, *samples, cli.seed)?;
            let text = format!("{} chains checked, {} failures", r.chains_checked, r.failures.len());
            let ok = r.failures.is_empty();
            Ok(Output::verdict(ok, text, serde_json::to_value(&r).expect("serializable")))
        }
        Command::Cuntz(args) => cuntz(args),
        Command::Export { what: ExportWhat::Op { poset, expr, out, window: wa, injection } } => {
            let p = load_poset(&poset.poset)?;
            let w = window(&p, wa)?;
            let t = represent(&w, &parse_path(expr, &p)?);
            let value = if *injection { t.to_json() } else { WindowMatrix::from_injection(&t).to_json(&w.basis_names()) };
            fs::write(out, serde_json::to_string_pretty(&value).expect("serializable"))?;
            Ok(Output::ok(
                format!("wrote {} ({} entries, {} escapes)", out.display(), t.len(), t.escapes().len()),
                json!({"out": out.display().to_string(), "entries": t.len(), "escapes": t.escapes().len()}),
            ))
        }
        Command::Verify { suite: name, poset, window: wa, simplices, samples } => {
            let p = poset.as_ref().map(load_poset).transpose()?;
            suite(cli, name, p.as_ref(), wa, *simplices, *samples)
        }
    }
}

fn suite(cli: &Cli, name: &str, p: Option<&Poset>, wa: &WindowArg, simplices: usize, samples: usize) -> Res<Output> {
    let registry = SuiteRegistry::default();
    let s = registry.get(name)?;
    let cfg = SuiteConfig { depth: wa.depth, max_len: wa.len, simplices, samples, seed: cli.seed };
    let report = s.run(p, &cfg)?;
    let mut text = String::new();
    for law in &report.laws {
        let mark = if law.passed() { "ok  " } else { "FAIL" };
        text.push_str(&format!("{mark} {} ({} checks)\n", law.name, law.checked));
        for f in &law.failures {
            text.push_str(&format!("       {f}\n"));
        }
    }
    text.push_str(if report.passed() { "suite passed" } else { "suite failed" });
    Ok(Output::verdict(report.passed(), text, serde_json::to_value(&report).expect("serializable")))
}

fn cuntz(args: &CuntzArgs) -> Res<Output> {
    let registry = SchemeRegistry::default();
    let (default, arity, m) = match (args.n, args.infinite) {
        (Some(n), _) => ("residue", Some(n), n as usize),
        (None, Some(m)) => ("dyadic", None, m),
        (None, None) => return Err(InputError("one of --n or --infinite is required".into())),
    };
    let scheme = registry.build(args.scheme.as_deref().unwrap_or(default), arity)?;
    let w = CuntzWindow::nat(args.window)?;
    let r = verify_cuntz(&w, scheme.as_ref(), m)?;
    let mut text = format!("{} on N = {}\n", r.scheme, r.n);
    for v in &r.relations {
        let region = match v.certified_region.a_max {
            Some(a) => format!("a <= {a}"),
            None => "nothing".into(),
        };
        text.push_str(&format!(
            "{} {} (certified on {region}, {} indices)\n",
            if v.holds { "ok  " } else { "FAIL" },
            v.name,
            v.certified_region.indices
        ));
    }
    if !r.defect_support.is_empty() {
        text.push_str(&format!("defect support: {} indices\n", r.defect_support.len()));
    }
    text.push_str(if r.holds() { "relations hold" } else { "relations fail" });
    Ok(Output::verdict(r.holds(), text, serde_json::to_value(&r).expect("serializable")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = if cli.json { serde_json::to_string_pretty(&out.json).expect("serializable") } else { out.text };
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout(), "{body}");
            ExitCode::from(match out.status {
                Status::Ok => 0,
                Status::Failed => 1,
                Status::Unknown => 3,
            })
        }
        Err(InputError(msg)) => {
            if cli.json {
                println!("{}", json!({"error": msg}));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
    }
}
