use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ghtree::geodesic::{hausdorff_subsets, slice, uniform_grid, verify_geodesic};
use ghtree::intervals::{oriented_hausdorff_sets, IntervalUnionSubset};
use ghtree::io::{self, Document, IoError};
use ghtree::metric::oriented_hausdorff;
use ghtree::verify::{run_all, run_criterion, OutputFormat, RunConfig, Trials, VerificationReport};
use ghtree::{
    connectivity_defect, dt_check, gh_exact, tree_report, ultrametrize, Budget, Error, MetricTree, DEFAULT_EPS,
};

#[derive(Parser)]
#[command(name = "ghtree", version, about = "Exact Hausdorff and Gromov-Hausdorff computations at desk scale")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Comparison tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Largest |X| * |Y| the exact solver will accept.
    #[arg(long = "budget-cells", global = true, default_value_t = 30)]
    budget_cells: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Trial count for every randomized check of `verify`.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Hausdorff distance between two subsets of a space or of a tree.
    Hausdorff {
        /// Finite metric space; `--a` and `--b` are comma-separated labels.
        #[arg(long, conflicts_with = "tree", required_unless_present = "tree")]
        space: Option<PathBuf>,
        /// Metric tree; `--a` and `--b` are subset or interval files.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Exact Gromov-Hausdorff distance between two finite spaces.
    Gh {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Minimax ultrametric, classes and merge heights.
    Ultra {
        #[arg(long)]
        space: PathBuf,
    },
    /// Hausdorff analysis of a finite subset of a metric tree.
    TreeReport {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        subset: PathBuf,
    },
    /// Canonical geodesic between two closed subsets of a tree.
    Geodesic {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Number of evenly spaced parameters.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        /// Explicit comma-separated parameters; overrides `--grid`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Sampled `D_t(X)` with its distortion and connectivity checks.
    DtCheck {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        t: f64,
        /// Sampling step along segments; defaults to t / 4.
        #[arg(long)]
        delta: Option<f64>,
        /// Label of the basepoint; defaults to the first point.
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Runs the verification suite.
    Verify {
        /// Run only this check.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

enum Failure {
    Usage(String),
    Io(IoError),
    Domain(Error),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn record(&self) -> Value {
        match self {
            Failure::Usage(m) => json!({ "error": "UsageError", "message": m }),
            Failure::Io(e) => e.to_json(),
            Failure::Domain(e) => {
                let dbg = format!("{e:?}");
                let variant = dbg.split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
                json!({ "error": "DomainError", "kind": variant, "message": e.to_string() })
            }
        }
    }
}

/// A command result: the nested JSON form and the rows of its CSV form.
struct Output {
    json: Value,
    rows: Vec<Value>,
    csv: Option<String>,
    ok: bool,
}

impl Output {
    fn single(json: Value) -> Self {
        let rows = vec![json.clone()];
        Output { json, rows, csv: None, ok: true }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json"),
            Format::Csv => self.csv.clone().unwrap_or_else(|| csv_rows(&self.rows)),
        }
    }
}

fn csv_rows(rows: &[Value]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = match rows.first() {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    };
    w.write_record(&header).expect("in-memory csv");
    for row in rows {
        let empty = Map::new();
        let m = row.as_object().unwrap_or(&empty);
        let cells: Vec<String> = header
            .iter()
            .map(|k| match m.get(k) {
                Some(Value::String(s)) => s.clone(),
                Some(Value::Null) | None => String::new(),
                Some(v) => v.to_string(),
            })
            .collect();
        w.write_record(&cells).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
}

fn labels(list: &str) -> Vec<String> {
    list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn closed_set(path: &Path, tree: &MetricTree, eps: f64) -> Result<IntervalUnionSubset, Failure> {
    match io::parse_inputs(path, eps)? {
        Document::Subset(_) => Ok(io::load_subset(path, tree)?.as_set(tree)),
        Document::Intervals(_) => Ok(io::load_intervals(path, tree)?),
        _ => Err(Failure::Usage(format!("{} is not a subset or interval file", path.display()))),
    }
}

fn intervals_json(tree: &MetricTree, set: &IntervalUnionSubset) -> Value {
    serde_json::to_value(io::intervals_to_doc(tree, set)).expect("json")
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    if !(g.eps > 0.0 && g.eps.is_finite()) {
        return Err(Failure::Usage(format!("--eps must be positive, got {}", g.eps)));
    }
    let budget = Budget::cells(g.budget_cells);
    match &cli.command {
        Command::Hausdorff { space, tree, a, b } => {
            if let Some(path) = space {
                let x = io::load_space(path, g.eps)?;
                let sa = x.subset_by_labels(&labels(a))?;
                let sb = x.subset_by_labels(&labels(b))?;
                let ab = oriented_hausdorff(Some(&sa), &sb)?;
                let ba = oriented_hausdorff(Some(&sb), &sa)?;
                Ok(Output::single(json!({ "hausdorff": ab.max(ba), "a_to_b": ab, "b_to_a": ba })))
            } else {
                let path = tree.as_ref().expect("clap enforces --space or --tree");
                let t = io::load_tree(path, g.eps)?;
                let sa = closed_set(Path::new(a), &t, g.eps)?;
                let sb = closed_set(Path::new(b), &t, g.eps)?;
                let ab = oriented_hausdorff_sets(&t, Some(&sa), &sb)?;
                let ba = oriented_hausdorff_sets(&t, Some(&sb), &sa)?;
                Ok(Output::single(json!({ "hausdorff": ab.max(ba), "a_to_b": ab, "b_to_a": ba })))
            }
        }
        Command::Gh { a, b } => {
            let x = io::load_space(a, g.eps)?;
            let y = io::load_space(b, g.eps)?;
            let r = gh_exact(&x, &y, budget)?;
            let pairs: Vec<Value> = r
                .witness
                .pairs()
                .iter()
                .map(|&(i, j)| json!([x.label(i), y.label(j)]))
                .collect();
            let json = json!({
                "gh": r.value,
                "distortion": r.distortion(),
                "witness": pairs,
                "nodes_explored": r.nodes_explored,
                "exact": r.exact,
            });
            let rows = r
                .witness
                .pairs()
                .iter()
                .map(|&(i, j)| json!({ "gh": r.value, "left": x.label(i), "right": y.label(j) }))
                .collect();
            Ok(Output { json, rows, csv: None, ok: true })
        }
        Command::Ultra { space } => {
            let x = io::load_space(space, g.eps)?;
            let u = ultrametrize(&x);
            let merges: Vec<Value> = u
                .merges
                .iter()
                .map(|m| json!({ "a": x.label(m.a), "b": x.label(m.b), "height": m.height, "size": m.size }))
                .collect();
            let json = json!({
                "labels": x.labels(),
                "u_matrix": u.u_matrix,
                "diameter": u.diameter(),
                "connectivity_defect": connectivity_defect(&x),
                "classes": u.classes.iter().map(|c| c.iter().map(|&i| x.label(i)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "merges": merges,
            });
            Ok(Output { rows: merges, json, csv: None, ok: true })
        }
        Command::TreeReport { tree, subset } => {
            let t = io::load_tree(tree, g.eps)?;
            let x = io::load_subset(subset, &t)?;
            let r = tree_report(&t, &x, budget);
            Ok(Output::single(serde_json::to_value(r).expect("json")))
        }
        Command::Geodesic { tree, a, b, grid, at } => {
            let t = io::load_tree(tree, g.eps)?;
            let sa = closed_set(a, &t, g.eps)?;
            let sb = closed_set(b, &t, g.eps)?;
            let d = hausdorff_subsets(&t, &sa, &sb)?;
            let params: Vec<f64> = match at {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("--at `{s}`: {e}"))))
                    .collect::<Result<_, _>>()?,
                None => uniform_grid(d, *grid),
            };
            let check = verify_geodesic(&t, &sa, &sb, &params)?;
            let slices = params
                .iter()
                .map(|&p| Ok(json!({ "t": p, "slice": intervals_json(&t, &slice(&t, &sa, &sb, p)?) })))
                .collect::<Result<Vec<_>, Failure>>()?;
            let mut rows = Vec::new();
            for i in 0..params.len() {
                for j in (i + 1)..params.len() {
                    let h = check.pairwise[i][j];
                    rows.push(json!({
                        "t_i": params[i],
                        "t_j": params[j],
                        "hausdorff": h,
                        "residual": (h - (params[j] - params[i]).abs()).abs(),
                    }));
                }
            }
            let mut json = serde_json::to_value(&check).expect("json");
            json["slices"] = Value::Array(slices);
            Ok(Output { json, rows, csv: None, ok: true })
        }
        Command::DtCheck { space, t, delta, basepoint } => {
            let x = io::load_space(space, g.eps)?;
            let bp = match basepoint {
                Some(l) => x.index_of(l).ok_or_else(|| Failure::Usage(format!("unknown basepoint `{l}`")))?,
                None => 0,
            };
            let delta = delta.unwrap_or(if *t > 0.0 { t / 4.0 } else { 1.0 });
            let c = dt_check(&x, *t, delta, bp, budget)?;
            let mut json = serde_json::to_value(&c).expect("json");
            json["diam_u"] = json!(ultrametrize(&x).diameter());
            Ok(Output::single(json))
        }
        Command::Verify { criterion } => {
            let trials = g.trials.map(Trials::uniform).unwrap_or_default();
            let format = match g.format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            let cfg = RunConfig { eps: g.eps, seed: g.seed, budget, format, trials };
            let report = match criterion {
                Some(id) => {
                    let rec = run_criterion(*id, &cfg)
                        .ok_or_else(|| Failure::Usage(format!("no check numbered {id}; expected 1 to 10")))?;
                    VerificationReport {
                        seed: cfg.seed,
                        eps: cfg.eps,
                        total_runtime_ms: rec.runtime_ms,
                        passed: rec.passed,
                        records: vec![rec],
                    }
                }
                None => run_all(&cfg),
            };
            Ok(Output {
                json: serde_json::to_value(&report).expect("json"),
                rows: Vec::new(),
                csv: Some(report.to_csv()),
                ok: report.passed,
            })
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            let res = stdout.write_all(text.as_bytes()).and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    stdout.write_all(b"\n")
                }
            });
            match res {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rec = Failure::Usage(e.render().to_string()).record();
            eprintln!("{rec}");
            return ExitCode::from(2);
        }
    };
    let format = cli.global.format;
    match run(&cli) {
        Ok(out) => {
            let text = out.render(format);
            if let Err(e) = emit(&text, cli.global.out.as_deref()) {
                eprintln!("{}", json!({ "error": "WriteError", "message": e.to_string() }));
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(2)
        }
    }
}
