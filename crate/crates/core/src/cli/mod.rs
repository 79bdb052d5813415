//! Command line front end. Every subcommand prints a human table by default
//! and JSON with `--format json`; graphs travel as [`GraphDocument`]s.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when the input fails
//! validation. Errors go to stderr as `error[code]: message`.

pub mod document;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{CurveClass, TargetProfile, WeightData};
use crate::category::{cartesian_isogeny_pullback, validate_isogeny};
use crate::chambers::{
    enumerate_chambers_with, format_subset, signature_of_kind, walls_between, walls_through, ChamberQuery, WallKind,
};
use crate::error::{Error, Result};
use crate::graph::dot::to_dot;
use crate::graph::stabilize::stabilize_with;
use crate::graph::WGraph;
use crate::gw_dim::{dimension_gate, vdim_moduli, Gate, Insertion};
use crate::reduction::{
    classify_reduction, combine_tails, contracted_divisors, cut_edge, forget_tail, glue, reduce_graph, reduction_path,
    self_glue, ReductionKind,
};
use crate::strata::{chamber_diff_of, contraction_poset, enumerate_strata, StrataQuery};

pub use document::{parse_graph, serialize_graph, GraphDocument, IsogenyDocument};

#[derive(Parser, Debug)]
#[command(name = "wsm", version, about = "Exact combinatorics of weighted stable maps")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the graph axioms and report totals
    Validate(GraphArg),
    /// Stabilize a graph
    Stabilize {
        #[command(flatten)]
        graph: GraphArg,
        /// Ignore curve classes
        #[arg(long)]
        absolute: bool,
    },
    /// Lower tail weights and contract unstable components
    Reduce {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        to: String,
    },
    /// Forget a tail (label, or `#id` for a flag id)
    Forget {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        tail: String,
    },
    /// Merge co-located tails into one
    Combine {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma separated labels or `#id` flag ids
        #[arg(long)]
        tails: String,
    },
    /// Join two weight-one tails into an edge
    Glue {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        tail: String,
        /// Second graph; without it both tails come from the first
        #[arg(long)]
        other: Option<String>,
        #[arg(long)]
        other_tail: String,
    },
    /// Cut an edge into two tails
    Cut {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        flag: usize,
    },
    /// Enumerate chambers of the weight domain
    Chambers {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "fine")]
        kind: String,
        #[arg(long)]
        genus: Option<u32>,
    },
    /// Walls through a weight point, or crossed between two
    Walls {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        between: Option<String>,
        #[arg(long, default_value = "fine")]
        kind: String,
    },
    /// Classify the reduction between two weight data
    Classify(Pair),
    /// Breakpoints and elementary factorization of a reduction
    Path(Pair),
    /// Cartesian pullback of an isogeny along a graph
    Pullback {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        isogeny: String,
    },
    /// Enumerate boundary strata
    Strata {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        dot: bool,
        /// Also report the images under reduction to these weights
        #[arg(long)]
        reduce_to: Option<String>,
    },
    /// Contraction poset of the boundary strata
    Poset {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        dot: bool,
    },
    /// Virtual dimension of a moduli space
    Dim(ModuliArgs),
    /// Dimension check for a correlator
    Gate {
        #[command(flatten)]
        moduli: ModuliArgs,
        /// `label:codim[:k]`, comma separated
        #[arg(long, default_value = "")]
        insertions: String,
    },
    /// Graphviz rendering of a graph
    Dot(GraphArg),
}

#[derive(Args, Debug)]
struct GraphArg {
    /// Graph document path, `-` for stdin
    #[arg(long)]
    graph: String,
}

#[derive(Args, Debug)]
struct Pair {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
}

#[derive(Args, Debug)]
struct ModuliArgs {
    #[arg(long, default_value_t = 0)]
    genus: u32,
    #[arg(long, default_value = "")]
    weights: String,
    #[arg(long, default_value = "")]
    beta: String,
    #[arg(long, default_value = "point")]
    profile: String,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    moduli: ModuliArgs,
    #[arg(long, default_value_t = 1)]
    max_edges: usize,
}

impl ModuliArgs {
    fn parse(&self) -> Result<(WeightData, CurveClass, TargetProfile)> {
        let weights = WeightData::parse(&self.weights)?;
        let profile = TargetProfile::parse(&self.profile)?;
        let beta = if self.beta.trim().is_empty() { CurveClass::zero(profile.rank()) } else { CurveClass::parse(&self.beta)? };
        profile.check_rank(&beta)?;
        Ok((weights, beta, profile))
    }
}

impl QueryArgs {
    fn query(&self) -> Result<StrataQuery> {
        let (weights, beta_total, profile) = self.moduli.parse()?;
        Ok(StrataQuery { genus_total: self.moduli.genus, weights, beta_total, profile, max_edges: self.max_edges })
    }
}

/// Process exit code for an error: 1 for usage, 2 for rejected input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => 1,
        _ => 2,
    }
}

/// Runs the command line with the given arguments (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = with_pool(|| execute(&cli));
    match result {
        Ok(Outcome { text, code }) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            exit_code(&e)
        }
    }
}

/// Runs `f` in a pool capped by `WSM_THREADS` when set.
fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var("WSM_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn read_source(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("{path}: {e}")))
    }
}

fn load_graph(path: &str) -> Result<WGraph> {
    parse_graph(&read_source(path)?)
}

/// A tail given by label, or by flag id as `#<id>`.
fn resolve_tail(g: &WGraph, arg: &str) -> Result<usize> {
    let arg = arg.trim();
    match arg.strip_prefix('#') {
        Some(id) => match id.parse::<usize>() {
            Ok(f) if f < g.flags.len() && g.is_tail(f) => Ok(f),
            Ok(f) => Err(Error::NotATail(f)),
            Err(_) => Err(Error::Usage(format!("bad flag id `{arg}`"))),
        },
        None => g.tail_with_label(arg).ok_or_else(|| Error::UnknownLabel(arg.to_string())),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn graph_value(g: &WGraph) -> Value {
    serde_json::to_value(GraphDocument::from_graph(g)).expect("serializable")
}

fn graph_output(g: &WGraph) -> Outcome {
    Outcome::ok(serialize_graph(g))
}

fn kind_of(s: &str) -> Result<WallKind> {
    s.parse()
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Validate(a) => {
            let g = load_graph(&a.graph)?;
            let unstable: Vec<usize> = (0..g.vertices.len()).filter(|&v| !g.vertex_is_stable(v)).collect();
            let st = g.stats();
            if json {
                let v = json!({
                    "valid": true,
                    "stable": unstable.is_empty(),
                    "unstable_vertices": unstable,
                    "connected": g.is_connected(),
                    "stats": st,
                });
                return Ok(Outcome::ok(to_json(&v)));
            }
            let mut s = String::from("valid\n");
            let _ = writeln!(s, "stable      {}", if unstable.is_empty() { "yes".to_string() } else { format!("no (vertices {unstable:?})") });
            let _ = writeln!(s, "connected   {}", if g.is_connected() { "yes" } else { "no" });
            let _ = writeln!(s, "genus       {}", st.genus_total);
            let _ = writeln!(s, "beta        {}", st.beta_total);
            let _ = writeln!(s, "vdim        {}", st.vdim);
            let _ = writeln!(s, "edges       {}", st.n_edges);
            let _ = writeln!(s, "tails       {}", st.n_tails);
            Ok(Outcome::ok(s))
        }
        Command::Stabilize { graph, absolute } => {
            let g = load_graph(&graph.graph)?;
            let st = stabilize_with(&g, *absolute);
            if json {
                let v = json!({
                    "graph": graph_value(&st.graph),
                    "vertex_map": st.vertex_map,
                    "flag_map": st.flag_map,
                    "trace": st.trace,
                });
                return Ok(Outcome::ok(to_json(&v)));
            }
            Ok(graph_output(&st.graph))
        }
        Command::Reduce { graph, to } => {
            let g = load_graph(&graph.graph)?;
            let b = WeightData::parse(to)?;
            Ok(graph_output(&reduce_graph(&g, &b)?))
        }
        Command::Forget { graph, tail } => {
            let g = load_graph(&graph.graph)?;
            let t = resolve_tail(&g, tail)?;
            Ok(graph_output(&forget_tail(&g, t)?))
        }
        Command::Combine { graph, tails } => {
            let g = load_graph(&graph.graph)?;
            let group = tails.split(',').map(|t| resolve_tail(&g, t)).collect::<Result<Vec<_>>>()?;
            Ok(graph_output(&combine_tails(&g, &group)?))
        }
        Command::Glue { graph, tail, other, other_tail } => {
            let g = load_graph(&graph.graph)?;
            let t1 = resolve_tail(&g, tail)?;
            let out = match other {
                Some(path) => {
                    let h = load_graph(path)?;
                    let t2 = resolve_tail(&h, other_tail)?;
                    glue(&g, t1, &h, t2)?
                }
                None => self_glue(&g, t1, resolve_tail(&g, other_tail)?)?,
            };
            Ok(graph_output(&out))
        }
        Command::Cut { graph, flag } => {
            let g = load_graph(&graph.graph)?;
            Ok(graph_output(&cut_edge(&g, *flag)?))
        }
        Command::Chambers { n, kind, genus } => {
            let kind = kind_of(kind)?;
            let chambers = enumerate_chambers_with(ChamberQuery { n: *n, kind, genus: *genus })?;
            if json {
                let v: Vec<Value> = chambers
                    .iter()
                    .map(|c| {
                        json!({
                            "signature": c.signature.code(),
                            "witness": c.witness.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                return Ok(Outcome::ok(to_json(&json!({ "n": n, "kind": kind, "count": chambers.len(), "chambers": v }))));
            }
            let mut s = format!("{} {kind:?} chambers for n = {n}\n", chambers.len()).to_lowercase();
            for (i, c) in chambers.iter().enumerate() {
                let w: Vec<String> = c.witness.iter().map(|w| w.to_string()).collect();
                let _ = writeln!(s, "{i:>4}  {}  ({})", c.signature.code(), w.join(", "));
            }
            Ok(Outcome::ok(s))
        }
        Command::Walls { weights, between, kind } => {
            let kind = kind_of(kind)?;
            let a = WeightData::parse(weights)?;
            let labels = a.labels().to_vec();
            let fmt = |ms: &[u64]| ms.iter().map(|&m| format_subset(m, &labels)).collect::<Vec<_>>();
            match between {
                None => {
                    let sig = signature_of_kind(&a, kind)?;
                    let on = fmt(&walls_through(&a, kind));
                    if json {
                        return Ok(Outcome::ok(to_json(&json!({ "signature": sig.code(), "on_walls": on }))));
                    }
                    let mut s = format!("signature {}\n", sig.code());
                    if on.is_empty() {
                        s.push_str("on no wall\n");
                    } else {
                        let _ = writeln!(s, "on walls {}", on.join(" "));
                    }
                    Ok(Outcome::ok(s))
                }
                Some(b) => {
                    let b = WeightData::parse(b)?;
                    let crossed = fmt(&walls_between(&a, &b, kind)?);
                    if json {
                        return Ok(Outcome::ok(to_json(&json!({ "crossed": crossed }))));
                    }
                    Ok(Outcome::ok(if crossed.is_empty() {
                        "no walls crossed\n".to_string()
                    } else {
                        format!("crossed {}\n", crossed.join(" "))
                    }))
                }
            }
        }
        Command::Classify(p) => {
            let a = WeightData::parse(&p.from)?;
            let b = WeightData::parse(&p.to)?;
            let kind = classify_reduction(&a, &b)?;
            let divisors = contracted_divisors(&a, &b)?;
            let labels = a.labels().to_vec();
            let on_wall: Vec<String> = divisors.iter().filter(|d| d.on_wall).map(|d| format_subset(d.i, &labels)).collect();
            if json {
                let ds: Vec<Value> = divisors
                    .iter()
                    .map(|d| {
                        json!({
                            "i": format_subset(d.i, &labels),
                            "j": format_subset(d.j, &labels),
                            "exceptional": d.is_exceptional,
                            "on_wall": d.on_wall,
                        })
                    })
                    .collect();
                let kind_v = match &kind {
                    ReductionKind::Blowup(m) => json!({ "kind": "blowup", "subset": format_subset(*m, &labels) }),
                    other => serde_json::to_value(other).expect("serializable"),
                };
                return Ok(Outcome::ok(to_json(&json!({ "classification": kind_v, "divisors": ds }))));
            }
            let mut s = match kind {
                ReductionKind::Isomorphism => "isomorphism\n".to_string(),
                ReductionKind::Blowup(m) => format!("blowup({})\n", format_subset(m, &labels)),
                ReductionKind::General => "general\n".to_string(),
            };
            for d in &divisors {
                let _ = writeln!(
                    s,
                    "  D{}|{}{}{}",
                    format_subset(d.i, &labels),
                    format_subset(d.j, &labels),
                    if d.is_exceptional { "  exceptional" } else { "" },
                    if d.on_wall { "  on wall" } else { "" }
                );
            }
            if !on_wall.is_empty() {
                let _ = writeln!(s, "warning: target weights lie on the walls {}", on_wall.join(" "));
            }
            Ok(Outcome::ok(s))
        }
        Command::Path(p) => {
            let a = WeightData::parse(&p.from)?;
            let b = WeightData::parse(&p.to)?;
            let path = reduction_path(&a, &b)?;
            let labels = a.labels().to_vec();
            let steps = path.factorization();
            if json {
                let bp: Vec<Value> = path
                    .breakpoints
                    .iter()
                    .map(|l| {
                        json!({
                            "lambda": l.to_string(),
                            "weights": path.weights_at(l).weights().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                            "walls": path.crossed_walls[l].iter().map(|&m| format_subset(m, &labels)).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                let fz: Vec<Value> = steps
                    .iter()
                    .map(|(x, y)| json!({ "from": x.to_list_string(), "to": y.to_list_string() }))
                    .collect();
                return Ok(Outcome::ok(to_json(&json!({ "breakpoints": bp, "factorization": fz }))));
            }
            let mut s = String::new();
            if path.breakpoints.is_empty() {
                s.push_str("no breakpoints\n");
            }
            for l in &path.breakpoints {
                let walls: Vec<String> = path.crossed_walls[l].iter().map(|&m| format_subset(m, &labels)).collect();
                let _ = writeln!(s, "lambda {l}  weights {}  walls {}", path.weights_at(l).to_list_string(), walls.join(" "));
            }
            for (i, (x, y)) in steps.iter().enumerate() {
                let _ = writeln!(s, "step {i}: {} -> {}", x.to_list_string(), y.to_list_string());
            }
            Ok(Outcome::ok(s))
        }
        Command::Pullback { sigma, isogeny } => {
            let sigma = load_graph(sigma)?;
            let phi = IsogenyDocument::parse(&read_source(isogeny)?)?.to_isogeny()?;
            let problems = validate_isogeny(&phi);
            if !problems.is_empty() {
                return Err(Error::InvalidMorphism(problems.iter().map(|p| p.to_string()).collect()));
            }
            let branches = cartesian_isogeny_pullback(&sigma, &phi)?;
            let docs: Vec<Value> = branches.iter().map(|b| graph_value(&b.graph)).collect();
            if json {
                return Ok(Outcome::ok(to_json(&json!({ "count": docs.len(), "branches": docs }))));
            }
            let mut s = format!("{} branches\n", docs.len());
            for (i, b) in branches.iter().enumerate() {
                let _ = writeln!(s, "branch {i}");
                s.push_str(&serialize_graph(&b.graph));
            }
            Ok(Outcome::ok(s))
        }
        Command::Strata { query, dot, reduce_to } => {
            let q = query.query()?;
            let strata = enumerate_strata(&q)?;
            let top = q.top().stats().vdim;
            if *dot {
                return Ok(Outcome::ok(contraction_poset(&strata).to_dot()));
            }
            let diff = match reduce_to {
                Some(b) => Some(chamber_diff_of(&strata, &WeightData::parse(b)?)?),
                None => None,
            };
            if json {
                let list: Vec<Value> = strata
                    .iter()
                    .map(|g| {
                        let st = g.stats();
                        json!({ "codim": st.n_edges, "vdim": st.vdim, "graph": graph_value(g) })
                    })
                    .collect();
                let mut v = json!({ "count": strata.len(), "top_vdim": top, "strata": list });
                if let Some(d) = &diff {
                    v["reduction"] = json!({
                        "entries": d.entries,
                        "fibers": d.fibers,
                        "images": d.images.iter().map(graph_value).collect::<Vec<_>>(),
                    });
                }
                return Ok(Outcome::ok(to_json(&v)));
            }
            let mut s = format!("{} strata, top vdim {top}\n", strata.len());
            let _ = writeln!(s, "{:>4}  {:>5}  {:>4}  vertices (genus, beta, tails)", "#", "codim", "vdim");
            for (i, g) in strata.iter().enumerate() {
                let st = g.stats();
                let _ = writeln!(s, "{i:>4}  {:>5}  {:>4}  {}", st.n_edges, st.vdim, describe(g));
            }
            if let Some(d) = &diff {
                s.push_str("reduction\n");
                for e in &d.entries {
                    let _ = writeln!(s, "{:>4} -> image {}{}", e.source, e.image, if e.contracted { "  contracted" } else { "" });
                }
            }
            Ok(Outcome::ok(s))
        }
        Command::Poset { query, dot } => {
            let q = query.query()?;
            let poset = contraction_poset(&enumerate_strata(&q)?);
            if *dot {
                return Ok(Outcome::ok(poset.to_dot()));
            }
            let covers: Vec<Value> = poset
                .covers
                .iter()
                .map(|c| json!({ "upper": c.upper, "lower": c.lower, "edge": [c.edge.0, c.edge.1] }))
                .collect();
            if json {
                let nodes: Vec<Value> = poset
                    .nodes
                    .iter()
                    .map(|g| {
                        let st = g.stats();
                        json!({ "codim": st.n_edges, "vdim": st.vdim, "graph": graph_value(g) })
                    })
                    .collect();
                return Ok(Outcome::ok(to_json(&json!({ "nodes": nodes, "covers": covers }))));
            }
            let mut s = format!("{} strata, {} covers\n", poset.nodes.len(), poset.covers.len());
            for c in &poset.covers {
                let _ = writeln!(s, "{} -> {}  (edge {}-{})", c.upper, c.lower, c.edge.0, c.edge.1);
            }
            Ok(Outcome::ok(s))
        }
        Command::Dim(m) => {
            let (w, beta, profile) = m.parse()?;
            let d = vdim_moduli(m.genus, &w, &beta, &profile)?;
            Ok(Outcome::ok(if json { to_json(&json!({ "vdim": d })) } else { format!("{d}\n") }))
        }
        Command::Gate { moduli, insertions } => {
            let (w, beta, profile) = moduli.parse()?;
            let ins = parse_insertions(insertions)?;
            let vdim = vdim_moduli(moduli.genus, &w, &beta, &profile)?;
            let gate = dimension_gate(moduli.genus, &w, &beta, &profile, &ins)?;
            if json {
                return Ok(Outcome::ok(to_json(&json!({ "vdim": vdim, "gate": gate }))));
            }
            Ok(Outcome::ok(match gate {
                Gate::Passes => format!("passes (vdim {vdim})\n"),
                Gate::Fails(d) => format!("fails({d:+}) (vdim {vdim})\n"),
            }))
        }
        Command::Dot(a) => Ok(Outcome::ok(to_dot(&load_graph(&a.graph)?))),
    }
}

/// One line summary: `(g, beta, [tails])` per vertex and the edges.
fn describe(g: &WGraph) -> String {
    let verts: Vec<String> = (0..g.vertices.len())
        .map(|v| {
            let tails: Vec<String> = g
                .flags_at(v)
                .into_iter()
                .filter(|&f| g.is_tail(f))
                .map(|f| crate::reduction::tail_key(g, f))
                .collect();
            format!("({}, {}, [{}])", g.vertices[v].genus, g.vertices[v].class, tails.join(" "))
        })
        .collect();
    let edges: Vec<String> =
        g.edges().iter().map(|&(a, b)| format!("{}-{}", g.flags[a].vertex, g.flags[b].vertex)).collect();
    if edges.is_empty() {
        verts.join(" ")
    } else {
        format!("{}  edges {}", verts.join(" "), edges.join(" "))
    }
}

fn parse_insertions(text: &str) -> Result<Vec<Insertion>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(':').collect();
            let bad = || Error::Usage(format!("bad insertion `{item}`, expected label:codim[:k]"));
            if parts.len() < 2 || parts.len() > 3 {
                return Err(bad());
            }
            let codim = parts[1].trim().parse().map_err(|_| bad())?;
            let k = match parts.get(2) {
                Some(k) => k.trim().parse().map_err(|_| bad())?,
                None => 0,
            };
            Ok(Insertion { codim, descendant_power: k, weight_label: parts[0].trim().to_string() })
        })
        .collect()
}

#[cfg(test)]
mod tests;
