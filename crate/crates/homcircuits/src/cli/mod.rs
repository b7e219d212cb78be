//! The `homc` command line. [`run`] parses arguments, dispatches and maps
//! the outcome to an exit code: 0 on success, 1 when a verification did not
//! hold, 2 on usage, parse or input errors.

pub mod suite;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::circuit::Circuit;
use crate::compile::{compile_auto, CompileShape};
use crate::error::{Error, Result};
use crate::exactnum::{int, random_rational, rng_from_seed, Rational, Rng64};
use crate::oracle::{colhom_eval, emb_eval, hom_count, ColouredGraph, Host};
use crate::pattern::{
    are_isomorphic, enumerate_patterns, find_minor, make_complete_binary_tree, make_complete_bipartite, make_cycle,
    make_grid, make_path, make_star, BipartiteMultigraph,
};
use crate::reduce::{
    btree_poly, btree_vp_gadget, clique_grid_gadget, clique_poly, minor_gadget, minor_oracle_size, path_poly,
    path_vbp_gadget, random_coloured, subgraph_oracle_size, BruteForceOracle, CountingOracle, Gadget,
    LincombExtractor, LincombOracle, MinorExtractor, SubgraphExtractor,
};
use crate::symmetry::{is_rigid, is_symmetric, rigidify, SymmetryAnalysis};
use crate::width::{
    check_decomposition, pathwidth_exact, treedepth_exact, treewidth_exact, Decomposition, EliminationTree,
    PathDecomposition, TreeDecomposition,
};

use suite::{Caps, CheckOutcome, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "homc", version, about = "Symmetric circuits for bipartite homomorphism polynomials")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// JSON file overriding suite size caps.
    #[arg(long, global = true, value_name = "FILE")]
    caps: Option<PathBuf>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Graphviz output where a graph or circuit is produced.
    #[arg(long, global = true, conflicts_with = "json")]
    dot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate, compare and enumerate patterns.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Exact treewidth, pathwidth and treedepth, or check a decomposition.
    Width(WidthArgs),
    /// Compile hom_{F,n,m} into a symmetric circuit.
    Compile(CompileArgs),
    /// Symmetry, rigidity, orbit and support analysis of a circuit.
    Analyze(AnalyzeArgs),
    /// Brute-force hom or emb value on a host.
    Oracle(OracleArgs),
    /// Reduction gadgets and extraction pipelines.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Run one identity suite or acceptance criterion.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Run a group of acceptance criteria.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Cycle,
    Grid,
    Star,
    Complete,
    Btree,
}

#[derive(Debug, Subcommand)]
enum PatternCmd {
    /// Generate a named pattern.
    Gen {
        family: Family,
        /// Vertices (path, btree), half-length (cycle: C_{2k}) or leaves (star).
        #[arg(long)]
        v: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        /// Side sizes of a complete bipartite graph.
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
    },
    /// Side-preserving isomorphism test.
    Iso { first: String, second: String },
    /// Search for branch sets of S as a minor of F.
    Minor { s: String, f: String },
    /// Patterns up to isomorphism within the given caps.
    Enumerate {
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = 1)]
        max_mult: u32,
        #[arg(long, default_value_t = 16)]
        max_edges: u32,
        #[arg(long)]
        no_isolated: bool,
    },
}

#[derive(Debug, Args)]
struct WidthArgs {
    /// Pattern file or generator spec.
    #[arg(long)]
    graph: String,
    /// Check this decomposition instead of computing widths.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompileArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, default_value = "td")]
    shape: CompileShape,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Circuit JSON or a compile report.
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Rigidify first and analyse the result.
    #[arg(long)]
    rigidify: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    graph: String,
    /// Host JSON; a random host of size n × m otherwise.
    #[arg(long)]
    host: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Injective maps per side instead of all maps.
    #[arg(long)]
    emb: bool,
}

#[derive(Debug, Subcommand)]
enum ReduceCmd {
    /// Grid gadget for clique_n; checked against the clique sum.
    CliqueGrid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ones: bool,
    },
    /// Binary tree gadget for p_m; checked against its expansion.
    Btree {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ones: bool,
    },
    /// Path gadget for the branching-program polynomial.
    Path {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ones: bool,
    },
    /// Minor gadget for S ⪯ F on a coloured graph (random if omitted).
    Minor {
        #[arg(long)]
        s: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_name = "FILE")]
        coloured: Option<PathBuf>,
    },
    /// colhom_S from a brute-force hom_F oracle via subgraph counting.
    ExtractSubgraph(ExtractArgs),
    /// colhom_S from a brute-force hom_F oracle via minors and quotients.
    ExtractMinor(ExtractArgs),
    /// A single term of a linear combination of hom polynomials.
    ExtractLincomb {
        /// Comma-separated coefficient:pattern terms, e.g. `1:path:2,2:path:3`.
        #[arg(long)]
        terms: String,
        /// 1-based index of the term to recover.
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Side length of the basis hosts.
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    s: String,
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    trials: usize,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// A named identity suite.
    Identity {
        #[arg(long)]
        name: String,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// One acceptance criterion, 1 to 10.
    Criterion {
        #[arg(long)]
        id: usize,
    },
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// all, compile, symmetry, reductions, width or separation.
    #[arg(default_value = "all")]
    name: String,
    /// Write the JSON report here.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Outcome of a command before it becomes an exit code.
enum Outcome {
    Ok,
    Failed,
}

struct Ctx {
    seed: u64,
    caps: Caps,
    json: bool,
    dot: bool,
    out: String,
}

impl Ctx {
    fn emit(&mut self, s: &str) {
        self.out.push_str(s);
        if !s.ends_with('\n') {
            self.out.push('\n');
        }
    }

    fn emit_json(&mut self, v: &Value) {
        let s = serde_json::to_string_pretty(v).expect("json");
        self.emit(&s);
    }

    fn rng(&self) -> Rng64 {
        rng_from_seed(self.seed)
    }

    fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            caps: self.caps.clone(),
        }
    }
}

/// Runs `homc` with the given arguments (including the program name),
/// printing to standard output and diagnostics to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (code, out, err) = run_captured(argv);
    print!("{out}");
    eprint!("{err}");
    code
}

/// Like [`run`] but returns `(exit code, stdout, stderr)`.
pub fn run_captured<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    let caps = match cli.caps.as_deref().map(load_caps).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return (2, String::new(), format!("error: {e}\n")),
    };
    let mut ctx = Ctx {
        seed: cli.seed,
        caps,
        json: cli.json,
        dot: cli.dot,
        out: String::new(),
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(Outcome::Ok) => (0, ctx.out, String::new()),
        Ok(Outcome::Failed) => (1, ctx.out, "verification failed\n".into()),
        Err(e) => (2, ctx.out, format!("error: {e}\n")),
    }
}

fn load_caps(p: &Path) -> Result<Caps> {
    Caps::from_json(&read_json(p)?)
}

fn read_json(p: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    Ok(serde_json::from_str(&s)?)
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Pattern(p) => pattern_cmd(p, ctx),
        Command::Width(a) => width_cmd(a, ctx),
        Command::Compile(a) => compile_cmd(a, ctx),
        Command::Analyze(a) => analyze_cmd(a, ctx),
        Command::Oracle(a) => oracle_cmd(a, ctx),
        Command::Reduce(r) => reduce_cmd(r, ctx),
        Command::Verify(v) => verify_cmd(v, ctx),
        Command::Suite(s) => suite_cmd(s, ctx),
    }
}

// ---------------------------------------------------------------------------
// Patterns

/// A pattern given as a JSON file or a spec `path:5`, `cycle:3` (C_6),
/// `grid:2x3`, `star:3`, `complete:2x3`, `btree:7`.
pub fn parse_pattern_arg(s: &str) -> Result<BipartiteMultigraph> {
    if let Some((kind, rest)) = s.split_once(':') {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::ParseError(format!("bad number in `{s}`")));
        let pair = || -> Result<(usize, usize)> {
            let (x, y) = rest.split_once('x').ok_or_else(|| Error::ParseError(format!("expected RxC in `{s}`")))?;
            Ok((num(x)?, num(y)?))
        };
        let known = match kind {
            "path" => Some(make_path(num(rest)?)),
            "cycle" => Some(make_cycle(num(rest)?)),
            "grid" => Some(pair().and_then(|(r, c)| make_grid(r, c))),
            "star" => Some(Ok(make_star(num(rest)?))),
            "complete" => Some(pair().map(|(a, b)| make_complete_bipartite(a, b))),
            "btree" => Some(make_complete_binary_tree(num(rest)?)),
            _ => None,
        };
        if let Some(g) = known {
            return g;
        }
    }
    BipartiteMultigraph::from_json(&read_json(Path::new(s))?)
}

fn gen_pattern(
    family: Family,
    v: Option<usize>,
    rows: Option<usize>,
    cols: Option<usize>,
    a: Option<usize>,
    b: Option<usize>,
) -> Result<BipartiteMultigraph> {
    let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required")));
    match family {
        Family::Path => make_path(need(v, "v")?),
        Family::Cycle => make_cycle(need(v, "v")?),
        Family::Star => Ok(make_star(need(v, "v")?)),
        Family::Btree => make_complete_binary_tree(need(v, "v")?),
        Family::Grid => make_grid(need(rows, "rows")?, need(cols, "cols")?),
        Family::Complete => Ok(make_complete_bipartite(need(a, "a")?, need(b, "b")?)),
    }
}

/// DOT rendering with A-vertices as boxes and multiplicities as labels.
pub fn pattern_to_dot(f: &BipartiteMultigraph) -> String {
    let mut s = String::from("graph F {\n");
    for v in 0..f.num_vertices() {
        let (side, shape) = if v < f.a_count() { ("a", "box") } else { ("b", "ellipse") };
        let _ = writeln!(s, "  v{} [label=\"{side}{}\", shape={shape}];", v + 1, f.local(v) + 1);
    }
    for (u, w, k) in f.global_edges() {
        if k == 1 {
            let _ = writeln!(s, "  v{} -- v{};", u + 1, w + 1);
        } else {
            let _ = writeln!(s, "  v{} -- v{} [label=\"{k}\"];", u + 1, w + 1);
        }
    }
    s.push_str("}\n");
    s
}

fn pattern_cmd(cmd: PatternCmd, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        PatternCmd::Gen { family, v, rows, cols, a, b } => {
            let f = gen_pattern(family, v, rows, cols, a, b)?;
            if ctx.dot {
                ctx.emit(&pattern_to_dot(&f));
            } else {
                ctx.emit_json(&f.to_json());
            }
        }
        PatternCmd::Iso { first, second } => {
            let (f, g) = (parse_pattern_arg(&first)?, parse_pattern_arg(&second)?);
            let iso = are_isomorphic(&f, &g)?;
            if ctx.json {
                ctx.emit_json(&json!({ "isomorphic": iso }));
            } else {
                ctx.emit(if iso { "isomorphic" } else { "not isomorphic" });
            }
        }
        PatternCmd::Minor { s, f } => {
            let (sg, fg) = (parse_pattern_arg(&s)?, parse_pattern_arg(&f)?);
            let found = find_minor(&sg, &fg)?;
            let one = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
            let v = match &found {
                Some(b) => json!({
                    "minor": true,
                    "branchSets": b.sets.iter().map(|s| one(s)).collect::<Vec<_>>(),
                    "remainder": one(&b.remainder),
                }),
                None => json!({ "minor": false }),
            };
            if ctx.json {
                ctx.emit_json(&v);
            } else if let Some(b) = found {
                ctx.emit("minor found");
                for (i, set) in b.sets.iter().enumerate() {
                    ctx.emit(&format!("  {} <- {:?}", i + 1, one(set)));
                }
                ctx.emit(&format!("  remainder {:?}", one(&b.remainder)));
            } else {
                ctx.emit("not a minor");
            }
        }
        PatternCmd::Enumerate { max_vertices, max_mult, max_edges, no_isolated } => {
            let all = enumerate_patterns(max_vertices, max_mult, max_edges, !no_isolated);
            if ctx.json {
                ctx.emit_json(&json!({
                    "count": all.len(),
                    "patterns": all.iter().map(BipartiteMultigraph::to_json).collect::<Vec<_>>(),
                }));
            } else {
                ctx.emit(&format!("{} patterns", all.len()));
            }
        }
    }
    Ok(Outcome::Ok)
}

// ---------------------------------------------------------------------------
// Widths

fn tree_dot(parent: &[Option<usize>], label: impl Fn(usize) -> String) -> String {
    let mut s = String::from("digraph T {\n");
    for (t, p) in parent.iter().enumerate() {
        let _ = writeln!(s, "  t{} [label=\"{}\"];", t + 1, label(t));
        if let Some(p) = p {
            let _ = writeln!(s, "  t{} -> t{};", p + 1, t + 1);
        }
    }
    s.push_str("}\n");
    s
}

fn bag_label(b: &std::collections::BTreeSet<usize>) -> String {
    let items: Vec<String> = b.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// DOT rendering of any decomposition; path bags are chained left to right.
pub fn decomposition_to_dot(d: &Decomposition) -> String {
    match d {
        Decomposition::Tree(t) => tree_dot(&t.parent, |i| bag_label(&t.bags[i])),
        Decomposition::Path(p) => {
            let parent: Vec<Option<usize>> = (0..p.bags.len()).map(|i| i.checked_sub(1)).collect();
            tree_dot(&parent, |i| bag_label(&p.bags[i]))
        }
        Decomposition::Elimination(e) => tree_dot(&e.parent, |v| (v + 1).to_string()),
    }
}

fn width_cmd(a: WidthArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let f = parse_pattern_arg(&a.graph)?;
    if let Some(p) = a.check {
        let d = Decomposition::from_json(&read_json(&p)?)?;
        let verdict = check_decomposition(&f, &d);
        if ctx.json {
            ctx.emit_json(&json!({
                "valid": verdict.is_ok(),
                "violation": verdict.as_ref().err().map(|v| v.to_string()),
            }));
        } else {
            match &verdict {
                Ok(()) => ctx.emit("valid"),
                Err(v) => ctx.emit(&format!("invalid: {v}")),
            }
        }
        return Ok(if verdict.is_ok() { Outcome::Ok } else { Outcome::Failed });
    }
    let (tw, td_cert): (usize, TreeDecomposition) = treewidth_exact(&f)?;
    let (pw, pd): (usize, PathDecomposition) = pathwidth_exact(&f)?;
    let (d, et): (usize, EliminationTree) = treedepth_exact(&f)?;
    if ctx.dot {
        ctx.emit(&decomposition_to_dot(&Decomposition::Tree(td_cert)));
        ctx.emit(&decomposition_to_dot(&Decomposition::Path(pd)));
        ctx.emit(&decomposition_to_dot(&Decomposition::Elimination(et)));
    } else if ctx.json {
        ctx.emit_json(&json!({
            "treewidth": tw,
            "pathwidth": pw,
            "treedepth": d,
            "treeDecomposition": td_cert.to_json(),
            "pathDecomposition": pd.to_json(),
            "eliminationTree": et.to_json(),
        }));
    } else {
        ctx.emit(&format!("treewidth {tw}\npathwidth {pw}\ntreedepth {d}"));
    }
    Ok(Outcome::Ok)
}

// ---------------------------------------------------------------------------
// Compile and analyze

fn compile_cmd(a: CompileArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let f = parse_pattern_arg(&a.graph)?;
    let r = compile_auto(&f, a.shape, a.n, a.m)?;
    let text = if ctx.dot {
        r.circuit.to_dot()
    } else {
        serde_json::to_string_pretty(&r.to_json())? + "\n"
    };
    match a.out {
        Some(p) => {
            std::fs::write(&p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            if !ctx.json {
                ctx.emit(&format!(
                    "{} circuit, size {}, depth {}, written to {}",
                    a.shape.name(),
                    r.circuit.size(),
                    r.circuit.depth(),
                    p.display()
                ));
            }
        }
        None => ctx.emit(&text),
    }
    Ok(Outcome::Ok)
}

fn read_circuit(p: &Path) -> Result<Circuit> {
    let v = read_json(p)?;
    Circuit::from_json(v.get("circuit").unwrap_or(&v))
}

fn analyze_cmd(a: AnalyzeArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let mut c = read_circuit(&a.circuit)?;
    if !is_symmetric(&c, a.n, a.m)? {
        return Err(Error::NotSymmetric);
    }
    let size_before = c.size();
    let mut rigid = is_rigid(&c)?;
    if a.rigidify && !rigid {
        c = rigidify(&c, a.n, a.m)?;
        rigid = true;
    }
    if !rigid {
        return Err(Error::InvalidParameter("circuit is not rigid; pass --rigidify".into()));
    }
    let an = SymmetryAnalysis::new(&c, a.n, a.m)?;
    let report = an.report();
    if ctx.dot {
        ctx.emit(&c.to_dot());
    } else if ctx.json {
        let mut v = report.to_json();
        v["symmetric"] = json!(true);
        v["sizeBefore"] = json!(size_before);
        v["size"] = json!(c.size());
        ctx.emit_json(&v);
    } else {
        let v = report.to_json();
        ctx.emit(&format!(
            "symmetric yes\nrigid yes\nsize {} (was {size_before})\nmaxOrb {}\nmaxSup {}\nsupportDepth {}",
            c.size(),
            v["maxOrb"],
            v["maxSup"],
            v["supportDepth"]
        ));
    }
    Ok(Outcome::Ok)
}

// ---------------------------------------------------------------------------
// Oracle

fn oracle_cmd(a: OracleArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let f = parse_pattern_arg(&a.graph)?;
    let host = match &a.host {
        Some(p) => Host::from_json(&read_json(p)?)?,
        None => Host::random(a.n, a.m, &mut ctx.rng()),
    };
    let value = if a.emb { emb_eval(&f, &host)? } else { hom_count(&f, &host)? };
    if ctx.json {
        ctx.emit_json(&json!({
            "kind": if a.emb { "emb" } else { "hom" },
            "host": host.to_json(),
            "value": value.to_string(),
        }));
    } else {
        ctx.emit(&value.to_string());
    }
    Ok(Outcome::Ok)
}

// ---------------------------------------------------------------------------
// Reductions

fn value_or_random(ones: bool, rng: &mut Rng64) -> Rational {
    if ones {
        int(1)
    } else {
        random_rational(rng)
    }
}

fn gadget_report(ctx: &mut Ctx, name: &str, g: &Gadget, got: &Rational, want: &Rational) -> Outcome {
    let ok = got == want;
    if ctx.dot {
        ctx.emit(&pattern_to_dot(&g.pattern));
    } else if ctx.json {
        ctx.emit_json(&json!({
            "gadget": name,
            "pattern": g.pattern.to_json(),
            "graph": g.graph.to_json(),
            "colhom": got.to_string(),
            "target": want.to_string(),
            "equal": ok,
        }));
    } else {
        ctx.emit(&format!(
            "{name}: pattern {} vertices, colhom {got}, target {want}, {}",
            g.pattern.num_vertices(),
            if ok { "equal" } else { "DIFFERENT" }
        ));
    }
    if ok {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

fn reduce_cmd(cmd: ReduceCmd, ctx: &mut Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng();
    match cmd {
        ReduceCmd::CliqueGrid { n, ones } => {
            let r = 2 * n;
            let mut y = vec![vec![int(0); r]; r];
            for (u, row) in y.iter_mut().enumerate() {
                for v in u + 1..r {
                    row[v] = value_or_random(ones, &mut rng);
                }
            }
            let yf = |u: usize, v: usize| y[u][v].clone();
            let g = clique_grid_gadget(n, &yf)?;
            let got = colhom_eval(&g.pattern, &g.graph)?;
            Ok(gadget_report(ctx, "clique-grid", &g, &got, &clique_poly(n, &yf)))
        }
        ReduceCmd::Btree { m, ones } => {
            let size = btree_index_range(m)?;
            let (x, y) = random_xy(size, ones, &mut rng);
            let g = btree_vp_gadget(m, &x, &y)?;
            let got = colhom_eval(&g.pattern, &g.graph)?;
            Ok(gadget_report(ctx, "btree", &g, &got, &btree_poly(m, &x, &y)?))
        }
        ReduceCmd::Path { m, ones } => {
            let (x, y) = random_xy(m * m, ones, &mut rng);
            let g = path_vbp_gadget(m, &x, &y)?;
            let got = colhom_eval(&g.pattern, &g.graph)?;
            Ok(gadget_report(ctx, "path", &g, &got, &path_poly(m, &x, &y)?))
        }
        ReduceCmd::Minor { s, f, n, coloured } => {
            let (sg, fg) = (parse_pattern_arg(&s)?, parse_pattern_arg(&f)?);
            let branch = find_minor(&sg, &fg)?
                .ok_or_else(|| Error::InvalidParameter("S is not a minor of F".into()))?;
            let y = match coloured {
                Some(p) => ColouredGraph::from_json(&read_json(&p)?)?,
                None => random_coloured(&sg, n, &mut rng),
            };
            let n = y.sizes.iter().copied().max().unwrap_or(n);
            let g = Gadget {
                graph: minor_gadget(&sg, &fg, &branch, n, &y)?,
                pattern: fg.clone(),
            };
            let got = colhom_eval(&fg, &g.graph)?;
            let want = colhom_eval(&sg, &y)?;
            Ok(gadget_report(ctx, "minor", &g, &got, &want))
        }
        ReduceCmd::ExtractSubgraph(a) => extract(ctx, a, false),
        ReduceCmd::ExtractMinor(a) => extract(ctx, a, true),
        ReduceCmd::ExtractLincomb { terms, ell, n, size, trials } => {
            let parsed = parse_terms(&terms)?;
            if ell == 0 || ell > parsed.len() {
                return Err(Error::InvalidParameter(format!("--ell must be in 1..={}", parsed.len())));
            }
            let patterns: Vec<BipartiteMultigraph> = parsed.iter().map(|(_, f)| f.clone()).collect();
            let alphas: Vec<Rational> = parsed.iter().map(|(a, _)| a.clone()).collect();
            let oracle = LincombOracle { terms: parsed, n: n * size, m: n * size };
            let counting = CountingOracle::new(&oracle);
            let ex = LincombExtractor::new(&patterns, &alphas, ell - 1, n, size, ctx.seed, &counting)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for _ in 0..trials {
                let g = Host::random(n, n, &mut rng);
                let got = ex.eval(&g)?;
                let want = hom_count(&patterns[ell - 1], &g)?;
                ok &= got == want;
                rows.push((got, want));
            }
            extract_report(ctx, "extract-lincomb", &rows, counting.calls(), ok)
        }
    }
}

/// The binary tree polynomial reads `X` and `Y` over `[m³]`.
fn btree_index_range(m: usize) -> Result<usize> {
    m.checked_pow(3)
        .filter(|&s| s <= 64)
        .ok_or_else(|| Error::SizeCap("btree index range capped at 64".into()))
}

fn random_xy(size: usize, ones: bool, rng: &mut Rng64) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let x = (0..size).map(|_| value_or_random(ones, rng)).collect();
    let y = (0..size).map(|_| (0..size).map(|_| value_or_random(ones, rng)).collect()).collect();
    (x, y)
}

/// `1:path:2,2:path:3` into coefficient and pattern pairs.
fn parse_terms(s: &str) -> Result<Vec<(Rational, BipartiteMultigraph)>> {
    s.split(',')
        .map(|t| {
            let (c, f) = t
                .split_once(':')
                .ok_or_else(|| Error::ParseError(format!("term `{t}` must be coefficient:pattern")))?;
            let c: i64 = c.trim().parse().map_err(|_| Error::ParseError(format!("bad coefficient in `{t}`")))?;
            Ok((int(c), parse_pattern_arg(f)?))
        })
        .collect()
}

fn extract(ctx: &mut Ctx, a: ExtractArgs, minor: bool) -> Result<Outcome> {
    let (s, f) = (parse_pattern_arg(&a.s)?, parse_pattern_arg(&a.f)?);
    let k = if minor { minor_oracle_size(&s, a.n) } else { subgraph_oracle_size(&s, a.n) };
    let oracle = BruteForceOracle { pattern: f.clone(), n: k, m: k };
    let counting = CountingOracle::new(&oracle);
    let mut rng = ctx.rng();
    let mut rows = Vec::new();
    let mut ok = true;
    let mut run = |eval: &dyn Fn(&ColouredGraph) -> Result<Rational>| -> Result<()> {
        for _ in 0..a.trials {
            let g = random_coloured(&s, a.n, &mut rng);
            let got = eval(&g)?;
            let want = colhom_eval(&s, &g)?;
            ok &= got == want;
            rows.push((got, want));
        }
        Ok(())
    };
    let name = if minor {
        let ex = MinorExtractor::new(&f, &s, a.n, &counting)?;
        run(&|g| ex.eval(g))?;
        "extract-minor"
    } else {
        let ex = SubgraphExtractor::new(&f, &s, a.n, &counting)?;
        run(&|g| ex.eval(g))?;
        "extract-subgraph"
    };
    extract_report(ctx, name, &rows, counting.calls(), ok)
}

fn extract_report(ctx: &mut Ctx, name: &str, rows: &[(Rational, Rational)], calls: usize, ok: bool) -> Result<Outcome> {
    if ctx.json {
        ctx.emit_json(&json!({
            "pipeline": name,
            "oracleCalls": calls,
            "trials": rows.iter().map(|(g, w)| json!({"extracted": g.to_string(), "oracle": w.to_string()})).collect::<Vec<_>>(),
            "equal": ok,
        }));
    } else {
        for (g, w) in rows {
            ctx.emit(&format!("{name}: extracted {g}, colhom {w}, {}", if g == w { "equal" } else { "DIFFERENT" }));
        }
        ctx.emit(&format!("{calls} oracle calls"));
    }
    Ok(if ok { Outcome::Ok } else { Outcome::Failed })
}

// ---------------------------------------------------------------------------
// Verification

fn outcome_of(ctx: &mut Ctx, outcomes: &[CheckOutcome], json: Value) -> Outcome {
    if ctx.json {
        ctx.emit_json(&json);
    } else {
        for o in outcomes {
            ctx.emit(&o.line());
            for f in &o.failures {
                ctx.emit(&format!("    {f}"));
            }
        }
    }
    if outcomes.iter().all(CheckOutcome::passed) {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

fn verify_cmd(cmd: VerifyCmd, ctx: &mut Ctx) -> Result<Outcome> {
    let mut cfg = ctx.suite_config();
    let o = match cmd {
        VerifyCmd::Identity { name, trials } => {
            if let Some(t) = trials {
                if t == 0 {
                    return Err(Error::InvalidParameter("--trials must be positive".into()));
                }
                cfg.caps.trials = t;
            }
            suite::run_identity(&name, &cfg)?
        }
        VerifyCmd::Criterion { id } => {
            if !(1..=10).contains(&id) {
                return Err(Error::InvalidParameter("--id must be in 1..=10".into()));
            }
            suite::run_criterion(id, &cfg)
        }
    };
    let v = o.to_json();
    Ok(outcome_of(ctx, &[o], v))
}

fn suite_cmd(a: SuiteArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let cfg = ctx.suite_config();
    let outcomes = suite::run_suite(&a.name, &cfg)?;
    let report = suite::report_json(&a.name, &cfg, &outcomes);
    if let Some(p) = &a.out {
        let text = serde_json::to_string_pretty(&report)? + "\n";
        std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(outcome_of(ctx, &outcomes, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homc(args: &[&str]) -> (i32, String, String) {
        run_captured(std::iter::once("homc").chain(args.iter().copied()))
    }

    #[test]
    fn pattern_gen_path_is_p5() {
        let (code, out, _) = homc(&["pattern", "gen", "path", "--v", "5"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let f = BipartiteMultigraph::from_json(&v).unwrap();
        assert!(are_isomorphic(&f, &make_path(5).unwrap()).unwrap());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(homc(&["frobnicate"]).0, 2);
        assert_eq!(homc(&["pattern", "gen", "path"]).0, 2);
        assert_eq!(homc(&["verify", "identity", "--name", "nope"]).0, 2);
        assert_eq!(homc(&["width", "--graph", "/nonexistent.json"]).0, 2);
        assert_eq!(homc(&["--help"]).0, 0);
    }

    #[test]
    fn quotient_identity_passes() {
        let (code, out, _) = homc(&["verify", "identity", "--name", "quotient", "--trials", "5", "--seed", "7"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("PASS"));
    }

    #[test]
    fn compile_then_analyze() {
        let dir = std::env::temp_dir().join(format!("homc-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p3 = dir.join("p3.json");
        std::fs::write(&p3, make_path(3).unwrap().to_json().to_string()).unwrap();
        let report = dir.join("c.json");
        let (code, _, err) = homc(&[
            "compile", "--shape", "td", "--graph", p3.to_str().unwrap(), "--n", "2", "--m", "2", "--out",
            report.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        let (code, out, err) = homc(&["--json", "analyze", "--circuit", report.to_str().unwrap(), "--n", "2", "--m", "2"]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["maxSup"].as_u64().unwrap() <= 2);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn invalid_decomposition_exits_one() {
        let dir = std::env::temp_dir().join(format!("homc-dec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let d = dir.join("d.json");
        std::fs::write(&d, r#"{"bags": [[1, 2]]}"#).unwrap();
        let (code, out, _) = homc(&["width", "--graph", "path:3", "--check", d.to_str().unwrap()]);
        assert_eq!(code, 1, "{out}");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn reductions_report_equality() {
        assert_eq!(homc(&["reduce", "clique-grid", "--n", "2"]).0, 0);
        assert_eq!(homc(&["reduce", "path", "--m", "2"]).0, 0);
        assert_eq!(homc(&["reduce", "minor", "--s", "path:2", "--f", "path:3"]).0, 0);
        assert_eq!(homc(&["reduce", "extract-subgraph", "--s", "path:2", "--f", "path:3", "--trials", "2"]).0, 0);
        assert_eq!(
            homc(&["reduce", "extract-lincomb", "--terms", "1:path:2,2:path:3", "--ell", "2", "--trials", "2"]).0,
            0
        );
    }

    #[test]
    fn suite_reports_are_deterministic() {
        let a = homc(&["--json", "--seed", "3", "suite", "separation"]);
        let b = homc(&["--json", "--seed", "3", "suite", "separation"]);
        assert_eq!(a.0, 0);
        assert_eq!(a, b);
    }

    #[test]
    fn caps_file_rejects_unknown_keys() {
        let dir = std::env::temp_dir().join(format!("homc-caps-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let c = dir.join("caps.json");
        std::fs::write(&c, r#"{"trails": 3}"#).unwrap();
        assert_eq!(homc(&["--caps", c.to_str().unwrap(), "verify", "identity", "--name", "product"]).0, 2);
        std::fs::write(&c, r#"{"trials": 2}"#).unwrap();
        assert_eq!(homc(&["--caps", c.to_str().unwrap(), "verify", "identity", "--name", "product"]).0, 0);
        std::fs::remove_dir_all(&dir).ok();
    }
}
