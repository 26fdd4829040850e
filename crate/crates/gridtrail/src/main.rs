use clap::{Parser, Subcommand, ValueEnum};
use gridtrail::clockwise::{generate, lift_with_plan};
use gridtrail::geom::{rat_from_string, rat_to_string, Rat};
use gridtrail::oracle::{feasible_starts, min_trail_search, SearchConfig, StartStatus, Verdict};
use gridtrail::render::{default_projection, render_segments, Projection};
use gridtrail::trail::{optimality_certificate, verify_trail, CoverageReport, Trail};
use gridtrail::trees::{
    full_tree_3, partial_tree_3, replicate_tree, tree_bounds, verify_tree, CoveringTree,
    TreeReport,
};
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

fn max_nodes() -> u64 {
    std::env::var("GRIDTRAIL_MAX_NODES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000)
}

#[derive(Parser)]
#[command(
    name = "gridtrail",
    about = "Minimum-link covering trails and covering trees for the 3^k grid"
)]
struct Cli {
    /// Emit exactly one JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Write the primary artifact to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a minimum-length covering trail for the 3^k grid.
    Gen {
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: GenFormat,
        /// Also report the four-phase lift decomposition for k >= 2.
        #[arg(long)]
        phases: bool,
    },
    /// Verify a trail or tree file: coverage, box extents, structure.
    Verify {
        /// Trail or tree JSON ("-" for stdin).
        path: String,
        /// Per-axis extent limits, e.g. 3,3,4 (default: 3 per axis).
        #[arg(long, value_delimiter = ',')]
        extent: Option<Vec<String>>,
    },
    /// Exhaustive minimum-trail search over a bounded turning lattice.
    Search {
        /// Grid dimensions, e.g. 3x3.
        #[arg(long)]
        grid: String,
        /// Maximum number of segments.
        #[arg(long)]
        budget: usize,
        /// Fixed first vertex, e.g. 0,0.
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<u8>>,
        /// Integer layers beyond the grid per axis (lattice class m).
        #[arg(long, default_value = "1")]
        margin: u8,
        /// Turning-point denominator (lattice class D).
        #[arg(long, default_value = "1")]
        denom: u8,
        #[arg(long, default_value = "1")]
        workers: usize,
    },
    /// Feasibility of each start node for an optimal covering trail.
    Starts {
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..=3))]
        k: u32,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Covering-tree constructions.
    Tree {
        #[command(subcommand)]
        which: TreeCmd,
    },
    /// Covering-tree size bounds for a range of dimensions.
    Bounds {
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..=40))]
        k: u32,
        /// Emit rows for all dimensions from K up to this limit.
        #[arg(long)]
        max: Option<u32>,
        /// Emit the table as CSV instead of aligned text.
        #[arg(long)]
        csv: bool,
    },
    /// Render a trail or tree file as a deterministic SVG figure.
    Render {
        /// Trail or tree JSON.
        path: PathBuf,
        /// Projection axis pair for k >= 3, e.g. 0,1.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        axes: Option<Vec<usize>>,
        /// Small multiples: one panel per layer of this axis (x, y, z or an index).
        #[arg(long)]
        layers: Option<String>,
    },
}

#[derive(Subcommand)]
enum TreeCmd {
    /// The 12-segment tree covering 26 of the 27 nodes, inside a 2x2x3 box.
    Partial3,
    /// The 12-segment tree covering all 27 nodes of the k=3 grid.
    Full3,
    /// Lift a tree missing at most one node to the next dimension.
    Replicate {
        /// Input tree JSON ("-" for stdin).
        path: String,
    },
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn emit(output: &Option<PathBuf>, artifact: &str) -> Result<bool, String> {
    match output {
        Some(p) => {
            fs::write(p, artifact).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(true)
        }
        None => {
            use std::io::Write;
            // Tolerate a closed pipe (e.g. downstream `head`).
            let _ = writeln!(std::io::stdout(), "{artifact}");
            Ok(false)
        }
    }
}

/// A loaded document: either a trail (vertex list) or a tree (segment set).
enum Doc {
    Trail(Trail),
    Tree(CoveringTree),
}

fn load_doc(text: &str) -> Result<Doc, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("parse error: {e}"))?;
    if value.get("vertices").is_some() {
        Trail::from_json(text).map(Doc::Trail).map_err(|e| e.to_string())
    } else if value.get("segments").is_some() {
        CoveringTree::from_json(text)
            .map(Doc::Tree)
            .map_err(|e| e.to_string())
    } else {
        Err("document has neither \"vertices\" (trail) nor \"segments\" (tree)".into())
    }
}

fn parse_extents(spec: &Option<Vec<String>>) -> Result<Option<Vec<Rat>>, String> {
    match spec {
        None => Ok(None),
        Some(parts) => {
            let mut v = Vec::with_capacity(parts.len());
            for p in parts {
                v.push(rat_from_string(p.trim()).map_err(|e| e.to_string())?);
            }
            Ok(Some(v))
        }
    }
}

fn trail_to_csv(t: &Trail) -> String {
    let mut out = String::new();
    for v in t.vertices() {
        let row: Vec<String> = v.coords().iter().map(rat_to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn print_trail_report(rep: &CoverageReport) {
    println!("segments:  {}", rep.segment_count);
    println!("covered:   {}", rep.covered.len());
    println!("missing:   {}", rep.missing.len());
    if !rep.missing.is_empty() {
        for m in &rep.missing {
            println!("  missing node {:?}", m);
        }
    }
    let ext: Vec<String> = rep.extents.iter().map(rat_to_string).collect();
    println!("extents:   [{}]", ext.join(", "));
    println!("box_ok:    {}", rep.box_ok);
    println!("complete:  {}", rep.complete);
}

fn print_tree_report(rep: &TreeReport) {
    println!("size:      {}", rep.size);
    println!("covered:   {}", rep.covered.len());
    println!("missing:   {}", rep.missing.len());
    if !rep.missing.is_empty() {
        for m in &rep.missing {
            println!("  missing node {:?}", m);
        }
    }
    println!("connected: {}", rep.connected);
    println!("acyclic:   {}", rep.acyclic);
    let ext: Vec<String> = rep.extents.iter().map(rat_to_string).collect();
    println!("extents:   [{}]", ext.join(", "));
    match rep.box_ok {
        Some(b) => println!("box_ok:    {b}"),
        None => println!("box_ok:    (no box requested)"),
    }
}

fn cmd_gen(cli: &Cli, k: u32, format: GenFormat, phases: bool) -> Result<u8, (u8, String)> {
    let nodes = 3u64.checked_pow(k).unwrap_or(u64::MAX);
    if nodes > max_nodes() {
        return Err((
            EXIT_LIMIT,
            format!("3^{k} = {nodes} nodes exceeds GRIDTRAIL_MAX_NODES = {}", max_nodes()),
        ));
    }
    let trail = generate(k as usize).map_err(|e| (EXIT_FAIL, e.to_string()))?;
    let cert = optimality_certificate(&trail).map_err(|e| (EXIT_FAIL, e.to_string()))?;
    let artifact = match format {
        GenFormat::Json => trail.to_json(),
        GenFormat::Csv => trail_to_csv(&trail),
    };
    let to_file = emit(&cli.output, &artifact).map_err(|e| (EXIT_USAGE, e))?;
    let say = |line: String| {
        if to_file && !cli.json {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    };
    say(format!("{} segments", trail.segment_count()));
    if cert.optimal {
        say(format!("OPTIMAL (bound {})", cert.bound));
    }
    if phases && k >= 2 {
        let prev = generate(k as usize - 1).map_err(|e| (EXIT_FAIL, e.to_string()))?;
        let (_, plan) = lift_with_plan(&prev).map_err(|e| (EXIT_FAIL, e.to_string()))?;
        let n = trail.segment_count();
        say(format!(
            "phases: forward 1..{}, backward {}..{}, link {}, final {}..{}",
            plan.forward.len(),
            plan.forward.len() + 1,
            plan.forward.len() + plan.backward.len(),
            plan.link_index,
            plan.link_index + 1,
            n
        ));
    }
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, path: &str, extent: &Option<Vec<String>>) -> Result<u8, (u8, String)> {
    let text = read_input(path).map_err(|e| (EXIT_USAGE, e))?;
    let doc = load_doc(&text).map_err(|e| (EXIT_USAGE, e))?;
    let lims = parse_extents(extent).map_err(|e| (EXIT_USAGE, e))?;
    match doc {
        Doc::Trail(t) => {
            let rep = verify_trail(&t, lims.as_deref()).map_err(|e| (EXIT_USAGE, e.to_string()))?;
            if cli.json {
                println!("{}", rep.to_json_value());
            } else {
                print_trail_report(&rep);
            }
            Ok(if rep.complete && rep.box_ok { EXIT_OK } else { EXIT_FAIL })
        }
        Doc::Tree(t) => {
            let rep = verify_tree(&t, lims.as_deref()).map_err(|e| (EXIT_USAGE, e.to_string()))?;
            if cli.json {
                println!("{}", rep.to_json_value());
            } else {
                print_tree_report(&rep);
            }
            let ok = rep.is_tree() && rep.covering() && rep.box_ok != Some(false);
            Ok(if ok { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn parse_grid(spec: &str) -> Result<Vec<u8>, String> {
    let dims: Result<Vec<u8>, _> = spec.split('x').map(|p| p.trim().parse()).collect();
    match dims {
        Ok(d) if !d.is_empty() && d.iter().all(|&x| x >= 1) => Ok(d),
        _ => Err(format!("bad --grid value: {spec} (expected e.g. 3x3)")),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    cli: &Cli,
    grid: &str,
    budget: usize,
    start: &Option<Vec<u8>>,
    margin: u8,
    denom: u8,
    workers: usize,
) -> Result<u8, (u8, String)> {
    let dims = parse_grid(grid).map_err(|e| (EXIT_USAGE, e))?;
    let mut cfg = SearchConfig::new(dims, budget);
    cfg.margin = margin;
    cfg.denom = denom;
    cfg.workers = workers.max(1);
    cfg.start = start.clone();
    cfg.max_points = max_nodes();
    let out = min_trail_search(&cfg).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("lattice") && msg.contains("exceeds") {
            (EXIT_LIMIT, msg)
        } else {
            (EXIT_USAGE, msg)
        }
    })?;
    let (m, d) = out.lattice_class;
    match out.verdict {
        Verdict::Found(t) => {
            if cli.json {
                let doc: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
                println!(
                    "{}",
                    serde_json::json!({
                        "lattice_class": {"d": d, "m": m},
                        "trail": doc,
                        "verdict": "found",
                    })
                );
            } else {
                println!("FOUND {} segments (lattice m={m},D={d})", t.segment_count());
                if emit(&cli.output, &t.to_json()).map_err(|e| (EXIT_USAGE, e))? {
                    // artifact written to file
                }
            }
            Ok(EXIT_OK)
        }
        Verdict::NoneExhaustive => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "lattice_class": {"d": d, "m": m},
                        "verdict": "none-exhaustive",
                    })
                );
            } else {
                println!("NONE (exhaustive over m={m},D={d})");
            }
            Ok(EXIT_FAIL)
        }
    }
}

fn cmd_starts(cli: &Cli, k: u32, budget: Option<usize>) -> Result<u8, (u8, String)> {
    let map = feasible_starts(k as usize, budget).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    if cli.json {
        let mut obj = serde_json::Map::new();
        for (node, status) in &map {
            let key: Vec<String> = node.iter().map(|c| c.to_string()).collect();
            obj.insert(
                key.join(","),
                serde_json::to_value(status).unwrap(),
            );
        }
        println!("{}", serde_json::Value::Object(obj));
    } else {
        let mut feasible = 0usize;
        for (node, status) in &map {
            let label = match status {
                StartStatus::Feasible => {
                    feasible += 1;
                    "feasible"
                }
                StartStatus::InfeasibleOverLattice => "infeasible-over-lattice",
                StartStatus::Unknown => "unknown",
            };
            println!("{:?}: {label}", node);
        }
        println!("{feasible} feasible of {}", map.len());
    }
    Ok(EXIT_OK)
}

fn cmd_tree(cli: &Cli, which: &TreeCmd) -> Result<u8, (u8, String)> {
    let tree = match which {
        TreeCmd::Partial3 => partial_tree_3(),
        TreeCmd::Full3 => full_tree_3(),
        TreeCmd::Replicate { path } => {
            let text = read_input(path).map_err(|e| (EXIT_USAGE, e))?;
            let input = CoveringTree::from_json(&text).map_err(|e| (EXIT_USAGE, e.to_string()))?;
            let out = replicate_tree(&input).map_err(|e| (EXIT_FAIL, e.to_string()))?;
            let bound = 3 * input.size() + 3;
            if !cli.json {
                eprintln!("replicated: size {} (bound {bound})", out.size());
            }
            out
        }
    };
    let rep = verify_tree(&tree, None).map_err(|e| (EXIT_FAIL, e.to_string()))?;
    let shape_ok = match which {
        TreeCmd::Partial3 => rep.is_tree() && rep.covered.len() == 26,
        _ => rep.is_tree() && rep.covering(),
    };
    if !shape_ok {
        return Err((EXIT_FAIL, "tree verification failed".to_string()));
    }
    if cli.json && cli.output.is_none() {
        println!("{}", tree.to_json());
    } else {
        let to_file = emit(&cli.output, &tree.to_json()).map_err(|e| (EXIT_USAGE, e))?;
        if to_file && cli.json {
            println!("{}", rep.to_json_value());
        } else if to_file {
            print_tree_report(&rep);
        } else {
            // Artifact went to stdout; report goes to stderr.
            eprintln!(
                "size {}, covered {}, connected {}, acyclic {}",
                rep.size,
                rep.covered.len(),
                rep.connected,
                rep.acyclic
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_bounds(cli: &Cli, k: u32, max: Option<u32>, csv: bool) -> Result<u8, (u8, String)> {
    let hi = max.unwrap_or(k).max(k);
    let mut rows = Vec::new();
    for kk in k..=hi {
        rows.push(tree_bounds(kk).map_err(|e| (EXIT_USAGE, e.to_string()))?);
    }
    if cli.json {
        let arr: Vec<serde_json::Value> = rows.iter().map(|b| b.to_json_value()).collect();
        println!("{}", serde_json::Value::Array(arr));
        return Ok(EXIT_OK);
    }
    let cell = |v: Option<u128>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("k,dt_upper,thm2_upper,lemma1_upper,gap_lower\n");
    for b in &rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            b.k,
            b.dt_upper,
            cell(b.thm2_upper),
            cell(b.lemma1_upper),
            cell(b.gap_lower)
        ));
    }
    if csv {
        emit(&cli.output, &out).map_err(|e| (EXIT_USAGE, e))?;
    } else {
        println!("{:>3} {:>10} {:>11} {:>13} {:>10}", "k", "h(k)", "thm2_upper", "lemma1_upper", "gap_lower");
        for b in &rows {
            println!(
                "{:>3} {:>10} {:>11} {:>13} {:>10}",
                b.k,
                b.dt_upper,
                cell(b.thm2_upper),
                cell(b.lemma1_upper),
                b.gap_lower.map(|g| format!(">={g}")).unwrap_or_default()
            );
        }
    }
    Ok(EXIT_OK)
}

fn axis_index(spec: &str, k: usize) -> Result<usize, String> {
    let idx = match spec {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        other => other
            .parse::<usize>()
            .map_err(|_| format!("bad axis: {other}"))?,
    };
    if idx >= k {
        return Err(format!("axis {idx} out of range for dimension {k}"));
    }
    Ok(idx)
}

fn cmd_render(
    cli: &Cli,
    path: &PathBuf,
    axes: &Option<Vec<usize>>,
    layers: &Option<String>,
) -> Result<u8, (u8, String)> {
    let text = fs::read_to_string(path).map_err(|e| (EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let doc = load_doc(&text).map_err(|e| (EXIT_USAGE, e))?;
    let (k, segments) = match &doc {
        Doc::Trail(t) => (t.k(), t.segments()),
        Doc::Tree(t) => (t.k(), t.segments().to_vec()),
    };
    let projection = match (axes, layers) {
        (Some(_), Some(_)) => {
            return Err((EXIT_USAGE, "--axes and --layers are mutually exclusive".into()))
        }
        (Some(a), None) => Projection::Axes(a[0], a[1]),
        (None, Some(ax)) => Projection::Layers(axis_index(ax, k).map_err(|e| (EXIT_USAGE, e))?),
        (None, None) => default_projection(k),
    };
    let svg = render_segments(k, &segments, projection).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    emit(&cli.output, &svg).map_err(|e| (EXIT_USAGE, e))?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen { k, format, phases } => cmd_gen(&cli, *k, *format, *phases),
        Command::Verify { path, extent } => cmd_verify(&cli, path, extent),
        Command::Search {
            grid,
            budget,
            start,
            margin,
            denom,
            workers,
        } => cmd_search(&cli, grid, *budget, start, *margin, *denom, *workers),
        Command::Starts { k, budget } => cmd_starts(&cli, *k, *budget),
        Command::Tree { which } => cmd_tree(&cli, which),
        Command::Bounds { k, max, csv } => cmd_bounds(&cli, *k, *max, *csv),
        Command::Render { path, axes, layers } => cmd_render(&cli, path, axes, layers),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
