mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use reeb_edit::io::parse_graph;
use reeb_edit::random::random_graph;
use reeb_edit::{
    bottleneck, canonicalize, connect, distance_report, extended_diagram, stability_experiment, ExecMode, Label,
    PersistenceDiagram, ReebGraph, SearchParams, SequenceFile, VertexClass,
};

/// Edit distance tools for labeled Reeb graphs.
#[derive(Debug, Parser)]
#[command(name = "reeb-edit", version)]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a graph file against the Reeb graph conditions.
    Validate { graph: PathBuf },
    /// Counts, genus and critical point classes.
    Info { graph: PathBuf },
    /// Random valid graph from a seed.
    Gen(GenArgs),
    /// Canonical form with a replayable sequence.
    Canon { graph: PathBuf },
    /// Deformation sequence between two graphs of equal genus.
    Connect { from: PathBuf, to: PathBuf },
    /// Lower and upper bounds on the edit distance.
    Dist {
        from: PathBuf,
        to: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Extended persistence diagram.
    Pd { graph: PathBuf },
    /// Bottleneck distance between two diagrams (or graphs).
    Bottleneck { first: PathBuf, second: PathBuf },
    /// Perturbation experiment, written as CSV.
    StabilityExp(StabilityArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    genus: usize,
    #[arg(long, default_value_t = 0)]
    leaf_pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    low: Label,
    #[arg(long, default_value = "100", allow_hyphen_values = true)]
    high: Label,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 32)]
    beam: usize,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Label step for enumerated moves; defaults to 1/1000 of the smallest gap.
    #[arg(long)]
    eps: Option<Label>,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl SearchArgs {
    fn params(&self) -> Result<SearchParams> {
        if self.beam == 0 || self.depth == 0 {
            bail!("--beam and --depth must be positive");
        }
        if self.eps.as_ref().is_some_and(|e| e.is_zero() || e.is_negative()) {
            bail!("--eps must be positive");
        }
        Ok(SearchParams {
            beam_width: self.beam,
            max_depth: self.depth,
            eps_grid: self.eps.clone(),
            seed: self.seed,
            exec: if self.sequential {
                ExecMode::Sequential
            } else {
                ExecMode::Parallel
            },
        })
    }
}

#[derive(Debug, Args)]
struct StabilityArgs {
    graph: PathBuf,
    /// Perturbation bound.
    #[arg(long, conflicts_with = "gap_divisor", allow_hyphen_values = true)]
    delta: Option<Label>,
    /// Use the smallest label gap divided by this number as the bound.
    #[arg(long)]
    gap_divisor: Option<u32>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 4)]
    beam: usize,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
}

enum Output {
    Json(Value),
    Text(String),
}

/// Domain failure that still produces output on stdout.
struct Reported {
    output: Output,
    message: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            emit(&out, cli.pretty);
            ExitCode::SUCCESS
        }
        Err(Failure::Reported(r)) => {
            emit(&r.output, cli.pretty);
            eprintln!("error: {}", r.message);
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

enum Failure {
    Reported(Reported),
    Domain(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Domain(e)
    }
}

fn emit(out: &Output, pretty: bool) {
    match out {
        Output::Json(v) if pretty => print!("{}", render::human(v)),
        Output::Json(v) => println!("{}", serde_json::to_string(v).expect("json value serializes")),
        Output::Text(t) => print!("{t}"),
    }
}

fn read_graph(path: &Path) -> Result<ReebGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_valid_graph(path: &Path) -> Result<ReebGraph> {
    let g = read_graph(path)?;
    let report = g.validate();
    if !report.ok {
        bail!("{}: invalid graph: {}", path.display(), report.summary());
    }
    Ok(g)
}

fn read_diagram(path: &Path) -> Result<PersistenceDiagram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(d) = serde_json::from_str::<PersistenceDiagram>(&text) {
        return Ok(d);
    }
    let g = read_valid_graph(path)?;
    Ok(extended_diagram(&g)?)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("output serializes")
}

fn run(command: &Command) -> Result<Output, Failure> {
    let out = match command {
        Command::Validate { graph } => {
            let g = read_graph(graph)?;
            let report = g.validate();
            let mut v = json!({
                "ok": report.ok,
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "violations": to_json(&report.violations),
            });
            if let Ok(genus) = g.genus() {
                v["genus"] = json!(genus);
            }
            if !report.ok {
                return Err(Failure::Reported(Reported {
                    output: Output::Json(v),
                    message: format!("invalid graph: {}", report.summary()),
                }));
            }
            Output::Json(v)
        }
        Command::Info { graph } => Output::Json(info(&read_valid_graph(graph)?)?),
        Command::Gen(args) => {
            if args.low >= args.high {
                return Err(Failure::Usage(anyhow::anyhow!("--low must be below --high")));
            }
            let g = random_graph(args.genus, args.leaf_pairs, &args.low, &args.high, args.seed);
            Output::Json(to_json(&g))
        }
        Command::Canon { graph } => {
            let g = read_valid_graph(graph)?;
            let res = canonicalize(&g).map_err(anyhow::Error::from)?;
            let cost = res.sequence.total_cost(&g).map_err(anyhow::Error::from)?;
            let mut v = to_json(&SequenceFile {
                start_graph: g,
                ops: res.sequence,
            });
            v["canonical_graph"] = to_json(&res.canonical_graph);
            v["cycle_rounds"] = json!(res.cycle_rounds);
            v["total_cost"] = to_json(&cost);
            Output::Json(v)
        }
        Command::Connect { from, to } => {
            let (g1, g2) = (read_valid_graph(from)?, read_valid_graph(to)?);
            let seq = connect(&g1, &g2).map_err(anyhow::Error::from)?;
            let cost = seq.total_cost(&g1).map_err(anyhow::Error::from)?;
            let mut v = to_json(&SequenceFile {
                start_graph: g1,
                ops: seq,
            });
            v["total_cost"] = to_json(&cost);
            Output::Json(v)
        }
        Command::Dist { from, to, search } => {
            let params = search.params().map_err(Failure::Usage)?;
            let (g1, g2) = (read_valid_graph(from)?, read_valid_graph(to)?);
            let report = distance_report(&g1, &g2, &params).map_err(anyhow::Error::from)?;
            Output::Json(to_json(&report))
        }
        Command::Pd { graph } => {
            let g = read_valid_graph(graph)?;
            Output::Json(to_json(&extended_diagram(&g).map_err(anyhow::Error::from)?))
        }
        Command::Bottleneck { first, second } => {
            let (d1, d2) = (read_diagram(first)?, read_diagram(second)?);
            Output::Json(to_json(&bottleneck(&d1, &d2)))
        }
        Command::StabilityExp(args) => stability(args)?,
    };
    Ok(out)
}

fn info(g: &ReebGraph) -> Result<Value> {
    let mut counts = serde_json::Map::new();
    for class in [
        VertexClass::Minimum,
        VertexClass::JoiningSaddle,
        VertexClass::SplittingSaddle,
        VertexClass::Maximum,
    ] {
        let n = g.ids().filter(|v| g.classify(v).ok() == Some(class)).count();
        counts.insert(to_json(&class).as_str().unwrap().to_string(), json!(n));
    }
    Ok(json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "genus": g.genus()?,
        "classes": counts,
        "min_label_gap": to_json(&g.min_label_gap()),
        "minimal": g.is_minimal()?,
        "canonical": g.is_canonical()?,
    }))
}

fn stability(args: &StabilityArgs) -> Result<Output, Failure> {
    if args.beam == 0 || args.depth == 0 {
        return Err(Failure::Usage(anyhow::anyhow!("--beam and --depth must be positive")));
    }
    let g = read_valid_graph(&args.graph)?;
    let delta = match (&args.delta, args.gap_divisor) {
        (Some(d), None) => d.clone(),
        (None, Some(0)) => return Err(Failure::Usage(anyhow::anyhow!("--gap-divisor must be positive"))),
        (None, Some(n)) => g.min_label_gap().unwrap_or_else(Label::zero) / Label::from_int(n.into()),
        _ => {
            return Err(Failure::Usage(anyhow::anyhow!(
                "give exactly one of --delta or --gap-divisor"
            )))
        }
    };
    let params = SearchParams {
        beam_width: args.beam,
        max_depth: args.depth,
        eps_grid: None,
        seed: args.seed,
        exec: if args.sequential {
            ExecMode::Sequential
        } else {
            ExecMode::Parallel
        },
    };
    let table = stability_experiment(&g, &delta, args.trials, args.seed, &params).map_err(anyhow::Error::from)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &table.rows {
        w.serialize(row).context("writing csv")?;
    }
    let text = String::from_utf8(w.into_inner().context("writing csv")?).context("csv is utf-8")?;
    let output = Output::Text(text);
    match table.check() {
        Ok(()) => Ok(output),
        Err(e) => Err(Failure::Reported(Reported {
            output,
            message: e.to_string(),
        })),
    }
}
