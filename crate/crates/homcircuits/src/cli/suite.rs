//! Check suites behind `homc verify` and `homc suite`, and the acceptance
//! test target. Every check is exact; random inputs come from the seed.
//!
//! Each criterion returns a [`CheckOutcome`] counting the individual
//! comparisons made and listing the first failures. Reports contain no
//! timings, so a fixed seed gives byte-identical output.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::{CircuitShape, Evaluator};
use crate::compile::{compile_auto, CompileShape};
use crate::error::{Error, Result};
use crate::exactnum::{int, random_rational, rng_from_seed, Assignment, Rational, Rng64};
use crate::oracle::{
    coloured_hom_eval, colhom_eval, emb_eval, hom_count, hom_count_factored, hom_indistinguishable, hom_to_emb_terms,
    ColouredGraph, Host,
};
use crate::pattern::{
    enumerate_patterns, find_minor, make_complete_binary_tree, make_complete_bipartite, make_cycle, make_grid,
    make_path, make_star, BipartiteMultigraph, Side,
};
use crate::reduce::{
    btree_poly, btree_vp_gadget, cfi_claim_check, cfi_pair, clique_grid_gadget, clique_poly, degree_slice,
    minor_gadget, minor_oracle_size, path_poly, path_vbp_gadget, quotient_expand, random_coloured,
    subgraph_oracle_size, tensor_product, uncolour_expand, BruteForceOracle, CountingOracle, LincombExtractor,
    LincombOracle, MinorExtractor, SubgraphExtractor,
};
use crate::symmetry::{is_rigid, is_symmetric, random_symmetric_circuit, rigidify, SymmetryAnalysis};
use crate::width::{check_decomposition, pathwidth_exact, treedepth_exact, treewidth_exact, Decomposition};

/// Size knobs of the suites; a `--caps` file overrides any subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Random hosts per identity.
    pub trials: usize,
    pub compile_max_vertices: usize,
    pub compile_max_edges: u32,
    pub compile_max_mult: u32,
    pub rigidify_circuits: usize,
    pub rigidify_max_gates: usize,
    pub support_n: usize,
    pub support_max_vertices: usize,
    pub width_max_vertices: usize,
    pub claim_max_graphs: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            trials: 5,
            compile_max_vertices: 6,
            compile_max_edges: 8,
            compile_max_mult: 2,
            rigidify_circuits: 200,
            rigidify_max_gates: 40,
            support_n: 8,
            support_max_vertices: 6,
            width_max_vertices: 8,
            claim_max_graphs: 1_000_000,
        }
    }
}

impl Caps {
    pub fn from_json(v: &Value) -> Result<Self> {
        let caps: Caps = serde_json::from_value(v.clone())?;
        if caps.trials == 0 || caps.rigidify_circuits == 0 || caps.support_n == 0 {
            return Err(Error::InvalidParameter("caps must be positive".into()));
        }
        Ok(caps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub caps: Caps,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            caps: Caps::default(),
        }
    }
}

const MAX_LISTED_FAILURES: usize = 10;

/// Result of one criterion or identity suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub id: String,
    pub title: String,
    pub checks: u64,
    pub failures: Vec<String>,
    pub failure_count: u64,
    pub notes: Vec<String>,
}

impl CheckOutcome {
    fn new(id: &str, title: &str) -> Self {
        CheckOutcome {
            id: id.to_string(),
            title: title.to_string(),
            checks: 0,
            failures: Vec::new(),
            failure_count: 0,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0 && self.checks > 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(msg);
        }
    }

    /// Records an error as a failure instead of aborting the suite.
    fn guard<T>(&mut self, r: Result<T>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.fail(format!("{}: {e}", ctx()));
                None
            }
        }
    }

    fn absorb(&mut self, other: CheckOutcome) {
        self.checks += other.checks;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(format!("[{}] {f}", other.id));
            }
        }
        for n in other.notes {
            self.notes.push(format!("[{}] {n}", other.id));
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {} {} ({} checks", self.id, self.title, self.checks);
        if self.failure_count > 0 {
            s.push_str(&format!(", {} failed", self.failure_count));
        }
        s.push(')');
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "title": self.title,
            "passed": self.passed(),
            "checks": self.checks,
            "failureCount": self.failure_count,
            "failures": self.failures,
            "notes": self.notes,
        })
    }
}

/// Identifiers and titles of the acceptance criteria.
pub const CRITERIA: [(&str, &str); 10] = [
    ("c01", "compiler correctness against the brute-force oracle"),
    ("c02", "declared shapes, symmetry and size/orbit/support bounds"),
    ("c03", "rigidification of random symmetric circuits"),
    ("c04", "orbit lower bound from support depth"),
    ("c05", "reduction identities"),
    ("c06", "gadget identities"),
    ("c07", "CFI separation claim"),
    ("c08", "extraction pipelines"),
    ("c09", "exact widths and width inequalities"),
    ("c10", "CFI pair indistinguishable by forests, separated by the 4-cycle"),
];

/// Named identity suites accepted by `verify identity --name`.
pub const IDENTITIES: [&str; 12] = [
    "uncolour",
    "product",
    "interpolation",
    "minor",
    "quotient",
    "hom-to-emb",
    "clique",
    "btree",
    "path",
    "cfi",
    "extraction",
    "separation",
];

/// Criteria in a named suite.
pub fn suite_members(name: &str) -> Option<Vec<usize>> {
    Some(match name {
        "all" => (1..=10).collect(),
        "compile" => vec![1, 2],
        "symmetry" => vec![3, 4],
        "reductions" => vec![5, 6, 7, 8],
        "width" => vec![9],
        "separation" => vec![10],
        _ => return None,
    })
}

pub fn run_criterion(k: usize, cfg: &SuiteConfig) -> CheckOutcome {
    match k {
        1 => compile_correctness(cfg),
        2 => shapes_and_bounds(cfg),
        3 => rigidification(cfg),
        4 => support_depth_bound(cfg),
        5 => reduction_identities(cfg),
        6 => gadget_identities(cfg),
        7 => cfi_claim(cfg),
        8 => extraction(cfg),
        9 => widths(cfg),
        10 => separation(cfg),
        _ => {
            let mut o = CheckOutcome::new("c??", "unknown criterion");
            o.fail(format!("no criterion {k}"));
            o
        }
    }
}

pub fn run_identity(name: &str, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(cfg.seed);
    let t = cfg.caps.trials;
    Ok(match name {
        "uncolour" => id_uncolour(t, &mut rng),
        "product" => id_product(t, &mut rng),
        "interpolation" => id_interpolation(t, &mut rng),
        "minor" => id_minor(t, &mut rng),
        "quotient" => id_quotient(t, &mut rng),
        "hom-to-emb" => id_hom_to_emb(t, &mut rng),
        "clique" => id_clique(t, &mut rng),
        "btree" => id_btree(&mut rng),
        "path" => id_path(t, &mut rng),
        "cfi" => cfi_claim(cfg),
        "extraction" => extraction(cfg),
        "separation" => separation(cfg),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown identity `{name}`; expected one of {}",
                IDENTITIES.join(", ")
            )))
        }
    })
}

/// Outcomes of a named suite in criterion order.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let members = suite_members(name).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "unknown suite `{name}`; expected all, compile, symmetry, reductions, width or separation"
        ))
    })?;
    Ok(members.into_iter().map(|k| run_criterion(k, cfg)).collect())
}

pub fn report_json(suite: &str, cfg: &SuiteConfig, outcomes: &[CheckOutcome]) -> Value {
    json!({
        "suite": suite,
        "seed": cfg.seed,
        "caps": serde_json::to_value(&cfg.caps).expect("caps serialize"),
        "passed": outcomes.iter().all(CheckOutcome::passed),
        "results": outcomes.iter().map(CheckOutcome::to_json).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// Criterion 1

fn compile_correctness(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[0];
    let mut o = CheckOutcome::new(id, title);
    let caps = &cfg.caps;
    let mut rng = rng_from_seed(cfg.seed);
    let patterns = enumerate_patterns(caps.compile_max_vertices, caps.compile_max_mult, caps.compile_max_edges, true);
    o.notes.push(format!("{} patterns up to isomorphism", patterns.len()));
    let shapes = [CompileShape::Td, CompileShape::Pw, CompileShape::Tw];
    for f in &patterns {
        for n in 1..=3usize {
            for m in 1..=3usize {
                let mut compiled = Vec::new();
                for shape in shapes {
                    let ctx = || format!("compile {} {f:?} at {n}×{m}", shape.name());
                    let Some(r) = o.guard(compile_auto(f, shape, n, m), ctx) else { continue };
                    let Some(ei) = o.guard(Evaluator::<i128>::for_host(&r.circuit, n, m), ctx) else { continue };
                    let Some(eq) = o.guard(Evaluator::<Rational>::for_host(&r.circuit, n, m), ctx) else { continue };
                    compiled.push((shape, ei, eq));
                }
                if n * m <= 9 {
                    for bits in 0u32..1 << (n * m) {
                        let w: Vec<i128> = (0..n * m).map(|k| (bits >> k & 1) as i128).collect();
                        let Some(want) = o.guard(hom_count_factored(f, n, m, &|i, j| w[i * m + j]), || "oracle".into())
                        else {
                            continue;
                        };
                        for (shape, ei, _) in &compiled {
                            let got = ei.eval(&w);
                            o.check(got == want, || {
                                format!("{} {f:?} {n}×{m} bits {bits:b}: {got} ≠ {want}", shape.name())
                            });
                        }
                    }
                }
                for _ in 0..caps.trials {
                    let h = Host::random(n, m, &mut rng);
                    let Some(want) = o.guard(hom_count_factored(f, n, m, &|i, j| h.get(i, j)), || "oracle".into())
                    else {
                        continue;
                    };
                    for (shape, _, eq) in &compiled {
                        let got = eq.eval(&h.w);
                        o.check(got == want, || format!("{} {f:?} {n}×{m} random host: {got} ≠ {want}", shape.name()));
                    }
                }
            }
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Criterion 2

fn bound_patterns() -> Vec<(String, BipartiteMultigraph)> {
    let mut out = Vec::new();
    for v in 2..=6 {
        out.push((format!("P{v}"), make_path(v).expect("path")));
    }
    for k in 2..=4 {
        out.push((format!("K1,{k}"), make_star(k)));
    }
    out.push(("C4".into(), make_cycle(2).expect("cycle")));
    out.push(("K2,2".into(), make_complete_bipartite(2, 2)));
    out.push(("B3".into(), make_complete_binary_tree(3).expect("tree")));
    out
}

fn shapes_and_bounds(_cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[1];
    let mut o = CheckOutcome::new(id, title);
    for (name, f) in bound_patterns() {
        let Some((d, _)) = o.guard(treedepth_exact(&f), || format!("treedepth {name}")) else { continue };
        let Some((pw, _)) = o.guard(pathwidth_exact(&f), || format!("pathwidth {name}")) else { continue };
        for n in 2..=4usize {
            let ctx = |s: &str| format!("{name} {s} n=m={n}");
            for shape in [CompileShape::Td, CompileShape::Pw, CompileShape::Tw] {
                let Some(r) = o.guard(compile_auto(&f, shape, n, n), || ctx(shape.name())) else { continue };
                let c = &r.circuit;
                o.check(c.validate(r.shape), || format!("{}: {:?}", ctx(shape.name()), c.shape_violation(r.shape)));
                o.check(c.validate(shape.circuit_shape()), || format!("{}: not {:?}", ctx(shape.name()), shape.circuit_shape()));
                let sym = o.guard(is_symmetric(c, n, n), || ctx(shape.name()));
                o.check(sym == Some(true), || format!("{}: not symmetric", ctx(shape.name())));
                match shape {
                    CompileShape::Td => {
                        let base = BigUint::from(f.num_vertices() * f.num_edges() as usize * 2 * n);
                        let bound = base.pow(d as u32);
                        o.check(BigUint::from(c.size()) <= bound, || {
                            format!("{}: size {} > {bound}", ctx("td"), c.size())
                        });
                        if let Some(an) = o.guard(SymmetryAnalysis::new(c, n, n), || ctx("td analysis")) {
                            let ms = an.max_sup();
                            o.check(ms <= d, || format!("{}: maxSup {ms} > td {d}", ctx("td")));
                        }
                    }
                    CompileShape::Pw => {
                        if let Some(an) = o.guard(SymmetryAnalysis::new(c, n, n), || ctx("pw analysis")) {
                            let orb = BigUint::from(an.max_orbit());
                            let bound = BigUint::from(2 * n).pow(pw as u32 + 1);
                            o.check(orb <= bound, || format!("{}: maxOrb {orb} > {bound}", ctx("pw")));
                        }
                    }
                    CompileShape::Tw => {}
                }
            }
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Criterion 3

fn rigidification(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[2];
    let mut o = CheckOutcome::new(id, title);
    let mut rng = rng_from_seed(cfg.seed);
    let want = cfg.caps.rigidify_circuits;
    let shapes = [CircuitShape::General, CircuitShape::Skew, CircuitShape::Formula];
    let (mut made, mut attempts, mut non_rigid, mut shrunk) = (0usize, 0usize, 0usize, 0usize);
    while made < want && attempts < 50 * want {
        let shape = shapes[attempts % 3];
        let n = 2 + (attempts / 3) % 2;
        attempts += 1;
        let steps = 2 + attempts % 5;
        let Some(c) = random_symmetric_circuit(&mut rng, n, n, shape, steps, cfg.caps.rigidify_max_gates) else {
            continue;
        };
        made += 1;
        let ctx = || format!("circuit {made} ({shape:?}, n=m={n}, {} gates)", c.len());
        o.check(c.validate(shape), || format!("{}: generator broke its shape", ctx()));
        let sym = o.guard(is_symmetric(&c, n, n), ctx);
        o.check(sym == Some(true), || format!("{}: generator produced an asymmetric circuit", ctx()));
        if o.guard(is_rigid(&c), ctx) == Some(false) {
            non_rigid += 1;
        }
        let Some(r) = o.guard(rigidify(&c, n, n), ctx) else { continue };
        if r.size() < c.size() {
            shrunk += 1;
        }
        o.check(o_ok(is_rigid(&r)), || format!("{}: output not rigid", ctx()));
        o.check(o_ok(is_symmetric(&r, n, n)), || format!("{}: output not symmetric", ctx()));
        o.check(r.size() <= c.size(), || format!("{}: size grew {} → {}", ctx(), c.size(), r.size()));
        let vars = c.variables();
        for _ in 0..10 {
            let a = Assignment::random(&vars, &mut rng);
            let same = matches!((c.evaluate(&a), r.evaluate(&a)), (Ok(x), Ok(y)) if x == y);
            o.check(same, || format!("{}: values differ", ctx()));
        }
        if c.validate(CircuitShape::Skew) {
            o.check(r.validate(CircuitShape::Skew), || format!("{}: skewness lost", ctx()));
        }
        if c.validate(CircuitShape::FormulaMulti) {
            o.check(r.validate(CircuitShape::FormulaMulti), || format!("{}: formula became a general circuit", ctx()));
        }
    }
    o.check(made >= want, || format!("only {made} of {want} circuits generated"));
    o.notes.push(format!("{made} circuits, {non_rigid} not rigid before, {shrunk} shrank"));
    o
}

fn o_ok(r: Result<bool>) -> bool {
    matches!(r, Ok(true))
}

// ---------------------------------------------------------------------------
// Criterion 4

fn support_depth_bound(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[3];
    let mut o = CheckOutcome::new(id, title);
    let n = cfg.caps.support_n;
    let patterns: Vec<BipartiteMultigraph> = enumerate_patterns(cfg.caps.support_max_vertices, 1, 64, false)
        .into_iter()
        .filter(BipartiteMultigraph::is_connected)
        .collect();
    let (mut tested, mut skipped) = (0, 0);
    for f in &patterns {
        let Some((d, _)) = o.guard(treedepth_exact(f), || format!("treedepth {f:?}")) else { continue };
        if d > 4 {
            skipped += 1;
            continue;
        }
        let Some(r) = o.guard(compile_auto(f, CompileShape::Td, n, n), || format!("compile {f:?}")) else {
            continue;
        };
        let Some(an) = o.guard(SymmetryAnalysis::new(&r.circuit, n, n), || format!("analysis {f:?}")) else {
            continue;
        };
        if an.max_sup() > 4 {
            skipped += 1;
            continue;
        }
        let Some(sd) = o.guard(an.support_depth(), || format!("support depth {f:?}")) else { continue };
        tested += 1;
        let orb = BigUint::from(an.max_orbit());
        // maxOrb ≥ n^sd / 2^sd
        let lhs = orb << sd;
        let rhs = BigUint::from(n).pow(sd as u32);
        o.check(lhs >= rhs, || format!("{f:?}: maxOrb {} < {n}^{sd}/2^{sd}", an.max_orbit()));
    }
    o.notes.push(format!("{tested} connected simple patterns tested, {skipped} above the maxSup cap"));
    o
}

// ---------------------------------------------------------------------------
// Criterion 5 and its identity suites

fn reduction_identities(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[4];
    let mut o = CheckOutcome::new(id, title);
    for name in ["uncolour", "product", "interpolation", "minor", "quotient", "hom-to-emb"] {
        o.absorb(run_identity(name, cfg).expect("known identity"));
    }
    o
}

/// Every 0/1 assignment of `slots` entries.
fn bit_sweep(slots: usize) -> impl Iterator<Item = Vec<Rational>> {
    (0u32..1 << slots).map(move |b| (0..slots).map(|k| int((b >> k & 1) as i64)).collect())
}

/// A graph coloured by `f` with one vertex per class and weight `vals[k]`
/// on the `k`-th pair of colours (all pairs, including a colour with itself).
fn all_pairs_graph(f: &BipartiteMultigraph, vals: &[Rational]) -> ColouredGraph {
    let mut g = ColouredGraph::for_pattern(f, 1);
    let mut k = 0;
    for u in 0..f.num_vertices() {
        for w in u..f.num_vertices() {
            g.set(u, 0, w, 0, vals[k].clone());
            k += 1;
        }
    }
    g
}

fn id_uncolour(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("uncolour", "hom of the flattened graph = Σ over colourings of colhom");
    for f in [make_path(2).expect("path"), make_path(3).expect("path")] {
        let v = f.num_vertices();
        let slots = v * (v + 1) / 2;
        for vals in bit_sweep(slots) {
            let g = all_pairs_graph(&f, &vals);
            if let Some((l, r)) = o.guard(uncolour_expand(&f, &g), || format!("{f:?}")) {
                o.check(l == r, || format!("{f:?} 0/1 {vals:?}: {l} ≠ {r}"));
            }
        }
        for n in [1, 2] {
            for _ in 0..trials {
                let mut g = ColouredGraph::for_pattern(&f, n);
                for u in 0..v {
                    for w in u..v {
                        for i in 0..n {
                            for j in 0..n {
                                g.set(u, i, w, j, random_rational(rng));
                            }
                        }
                    }
                }
                if let Some((l, r)) = o.guard(uncolour_expand(&f, &g), || format!("{f:?}")) {
                    o.check(l == r, || format!("{f:?} n={n} random: {l} ≠ {r}"));
                }
            }
        }
    }
    o
}

fn edge_graph(f: &BipartiteMultigraph, vals: &[Rational]) -> ColouredGraph {
    let mut g = ColouredGraph::for_pattern(f, 1);
    for (k, (u, w, _)) in f.global_edges().into_iter().enumerate() {
        g.set(u, 0, w, 0, vals[k].clone());
    }
    g
}

fn id_product(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("product", "colhom(G × H) = colhom(G)·colhom(H)");
    let f = make_path(3).expect("path");
    let e = f.global_edges().len();
    for vals in bit_sweep(2 * e) {
        let g = edge_graph(&f, &vals[..e]);
        let h = edge_graph(&f, &vals[e..]);
        product_check(&mut o, &f, &g, &h, None);
    }
    for _ in 0..trials {
        let g = random_coloured(&f, 2, rng);
        let h = random_coloured(&f, 2, rng);
        let k = random_coloured(&f, 1, rng);
        product_check(&mut o, &f, &g, &h, Some(&k));
    }
    let mut a = ColouredGraph::new(vec![Side::A, Side::B], vec![1, 1]);
    a.set(0, 0, 1, 0, int(2));
    let mut b = a.clone();
    b.set(0, 0, 1, 0, int(3));
    if let Some(ab) = o.guard(tensor_product(&a, &b), || "scalar product".into()) {
        o.check(ab.get(0, 0, 1, 0) == int(6), || "2 × 3 ≠ 6".into());
    }
    o
}

fn product_check(
    o: &mut CheckOutcome,
    f: &BipartiteMultigraph,
    g: &ColouredGraph,
    h: &ColouredGraph,
    third: Option<&ColouredGraph>,
) {
    let Some(gh) = o.guard(tensor_product(g, h), || "product".into()) else { return };
    let vals = (colhom_eval(f, &gh), colhom_eval(f, g), colhom_eval(f, h));
    let Some((x, y, z)) = o.guard(
        match vals {
            (Ok(x), Ok(y), Ok(z)) => Ok((x, y, z)),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => Err(e),
        },
        || "colhom".into(),
    ) else {
        return;
    };
    o.check(x == &y * &z, || format!("{x} ≠ {y}·{z}"));
    if let Some(k) = third {
        // associativity up to relabelling: equal class sizes and colhom values
        let left = tensor_product(&gh, k);
        let right = tensor_product(h, k).and_then(|hk| tensor_product(g, &hk));
        if let (Some(l), Some(r)) = (o.guard(left, || "(G×H)×K".into()), o.guard(right, || "G×(H×K)".into())) {
            o.check(l.sizes == r.sizes, || "associativity changed class sizes".into());
            let (a, b) = (colhom_eval(f, &l), colhom_eval(f, &r));
            o.check(matches!((&a, &b), (Ok(a), Ok(b)) if a == b), || "associativity changed colhom".into());
        }
    }
}

fn id_interpolation(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("interpolation", "degree slices of t ↦ p(t·G)");
    let p2 = make_path(2).expect("path");
    let p3 = make_path(3).expect("path");
    // p = colhom_{P2, c} + colhom_{P3}, with P2 coloured by the first edge of P3
    let c2: Vec<usize> = {
        let (u, w, _) = p3.global_edges()[0];
        vec![u, w]
    };
    let p = |g: &ColouredGraph| -> Result<Rational> { Ok(coloured_hom_eval(&p2, &c2, g)? + colhom_eval(&p3, g)?) };
    let mut graphs: Vec<ColouredGraph> = bit_sweep(2).map(|v| edge_graph(&p3, &v)).collect();
    for _ in 0..trials {
        graphs.push(random_coloured(&p3, 2, rng));
    }
    for g in &graphs {
        let Some(want1) = o.guard(coloured_hom_eval(&p2, &c2, g), || "colhom P2".into()) else { continue };
        let Some(want2) = o.guard(colhom_eval(&p3, g), || "colhom P3".into()) else { continue };
        for (k, want) in [(0, Rational::zero()), (1, want1), (2, want2), (3, Rational::zero())] {
            let got = degree_slice(k, 3, |t| p(&g.map(|w| w * t)));
            if let Some(got) = o.guard(got, || format!("slice {k}")) {
                o.check(got == want, || format!("slice {k}: {got} ≠ {want}"));
            }
        }
    }
    o
}

fn id_minor(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("minor", "colhom_{F′}(G′) = colhom_S(y) for the minor gadget");
    let cases = [
        ("P2 ⪯ P3", make_path(2).expect("path"), make_path(3).expect("path")),
        ("C4 ⪯ 2×3 grid", make_cycle(2).expect("cycle"), make_grid(2, 3).expect("grid")),
        ("C4 ⪯ C4", make_cycle(2).expect("cycle"), make_cycle(2).expect("cycle")),
    ];
    for (name, s, f) in cases {
        let Some(Some(branch)) = o.guard(find_minor(&s, &f), || name.to_string()) else {
            o.fail(format!("{name}: no branch sets found"));
            continue;
        };
        let mut ys: Vec<(usize, ColouredGraph)> = bit_sweep(s.global_edges().len()).map(|v| (1, edge_graph(&s, &v))).collect();
        for _ in 0..trials {
            ys.push((2, random_coloured(&s, 2, rng)));
        }
        for (n, y) in ys {
            let Some(g) = o.guard(minor_gadget(&s, &f, &branch, n, &y), || name.to_string()) else { continue };
            let (l, r) = (colhom_eval(&f, &g), colhom_eval(&s, &y));
            o.check(matches!((&l, &r), (Ok(a), Ok(b)) if a == b), || format!("{name} n={n}: {l:?} ≠ {r:?}"));
        }
    }
    o
}

fn id_quotient(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("quotient", "hom_{F,2n}(G⁻) = Σ_s hom_{F⊘s,n}(G)");
    let p2 = make_path(2).expect("path");
    // worked case: F = P2, n = 1, G = (x) gives 2 + 2x
    let mut xs = vec![int(0), int(1)];
    xs.extend((0..trials).map(|_| random_rational(rng)));
    for x in &xs {
        let g = Host::from_fn(1, 1, |_, _| x.clone());
        if let Some((l, r)) = o.guard(quotient_expand(&p2, &g), || "P2 n=1".into()) {
            let want = int(2) + int(2) * x;
            o.check(l == want && r == want, || format!("P2 at x={x}: {l}, {r}, want {want}"));
        }
    }
    for f in [make_path(3).expect("path"), make_cycle(2).expect("cycle"), BipartiteMultigraph::new(2, 1)] {
        let mut hosts: Vec<Host> = bit_sweep(1).map(|v| Host::from_fn(1, 1, |_, _| v[0].clone())).collect();
        hosts.extend((0..trials).map(|_| Host::random(2, 2, rng)));
        for g in hosts {
            if let Some((l, r)) = o.guard(quotient_expand(&f, &g), || format!("{f:?}")) {
                o.check(l == r, || format!("{f:?} n={}: {l} ≠ {r}", g.n));
            }
        }
    }
    o
}

fn id_hom_to_emb(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("hom-to-emb", "hom_F = Σ emb over side-wise quotients of F");
    let patterns: Vec<BipartiteMultigraph> = enumerate_patterns(6, 2, 4, true)
        .into_iter()
        .filter(|f| f.a_count() <= 3 && f.b_count() <= 3)
        .collect();
    o.notes.push(format!("{} patterns with ≤ 3 vertices per side", patterns.len()));
    let mut hosts: Vec<Host> = (0u64..16).map(|b| Host::from_bits(2, 2, b)).collect();
    hosts.extend((0..trials).map(|_| Host::random(3, 3, rng)));
    for f in &patterns {
        let Some(terms) = o.guard(hom_to_emb_terms(f), || format!("{f:?}")) else { continue };
        for h in &hosts {
            let want = hom_count_factored(f, h.n, h.m, &|i, j| h.get(i, j));
            let got: Result<Rational> = terms.iter().map(|q| emb_eval(q, h)).sum();
            o.check(matches!((&want, &got), (Ok(a), Ok(b)) if a == b), || format!("{f:?} at {}×{}", h.n, h.m));
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Criterion 6

fn gadget_identities(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[5];
    let mut o = CheckOutcome::new(id, title);
    let mut rng = rng_from_seed(cfg.seed);
    o.absorb(id_clique(cfg.caps.trials, &mut rng));
    o.absorb(id_btree(&mut rng));
    o.absorb(id_path(cfg.caps.trials, &mut rng));
    o
}

fn id_clique(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("clique", "grid gadget reproduces clique_n");
    let one = |_: usize, _: usize| int(1);
    for (n, want) in [(1, 2), (2, 6)] {
        if let Some(g) = o.guard(clique_grid_gadget(n, &one), || format!("n={n}")) {
            let v = colhom_eval(&g.pattern, &g.graph);
            o.check(v.as_ref().ok() == Some(&int(want)), || format!("n={n} all-ones: {v:?} ≠ {want}"));
        }
    }
    // y_{1,2} = 0 drops exactly the set {1, 2}
    let probe = |u: usize, v: usize| if (u, v) == (0, 1) { int(0) } else { int(1) };
    if let Some(g) = o.guard(clique_grid_gadget(2, &probe), || "probe".into()) {
        let v = colhom_eval(&g.pattern, &g.graph);
        o.check(v.as_ref().ok() == Some(&int(5)), || format!("probe: {v:?} ≠ 5"));
    }
    let mut assignments: Vec<Vec<Vec<Rational>>> = Vec::new();
    for bits in 0u32..64 {
        let mut y = vec![vec![int(0); 4]; 4];
        let mut k = 0;
        for u in 0..4 {
            for v in u + 1..4 {
                y[u][v] = int((bits >> k & 1) as i64);
                k += 1;
            }
        }
        assignments.push(y);
    }
    for _ in 0..trials {
        assignments.push((0..4).map(|_| (0..4).map(|_| random_rational(rng)).collect()).collect());
    }
    for y in &assignments {
        let yf = |u: usize, v: usize| y[u][v].clone();
        if let Some(g) = o.guard(clique_grid_gadget(2, &yf), || "n=2".into()) {
            let got = colhom_eval(&g.pattern, &g.graph);
            let want = clique_poly(2, &yf);
            o.check(got.as_ref().ok() == Some(&want), || format!("n=2: {got:?} ≠ {want}"));
        }
    }
    o
}

fn id_btree(rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("btree", "binary tree gadget reproduces p_m");
    // m = 1: a single vertex and class size 1
    for x in [int(0), int(1), random_rational(rng)] {
        let y = vec![vec![random_rational(rng)]];
        if let Some(g) = o.guard(btree_vp_gadget(1, &[x.clone()], &y), || "m=1".into()) {
            let v = colhom_eval(&g.pattern, &g.graph);
            o.check(v.as_ref().ok() == Some(&int(1)), || format!("m=1: {v:?} ≠ 1"));
        }
    }
    let size = 64;
    let ones_x = vec![1i128; size];
    let ones_y = vec![vec![1i128; size]; size];
    let mut x2 = ones_x.clone();
    x2[0] = 2;
    let mut cases: Vec<(String, Vec<i128>, Vec<Vec<i128>>)> = vec![("all-ones".into(), ones_x.clone(), ones_y.clone())];
    cases.push(("X1=2".into(), x2, ones_y.clone()));
    use rand::Rng;
    for t in 0..2 {
        let x: Vec<i128> = (0..size).map(|_| rng.gen_range(-3..=3)).collect();
        let y: Vec<Vec<i128>> = (0..size).map(|_| (0..size).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        cases.push((format!("random {t}"), x, y));
    }
    for (name, x, y) in &cases {
        let Some(g) = o.guard(btree_vp_gadget(2, x, y), || name.clone()) else { continue };
        let got = colhom_eval(&g.pattern, &g.graph);
        let want = btree_poly(2, x, y);
        o.check(matches!((&got, &want), (Ok(a), Ok(b)) if a == b), || format!("m=2 {name}: {got:?} ≠ {want:?}"));
        if name == "all-ones" {
            o.check(got.ok() == Some(64i128.pow(3)), || "m=2 all-ones ≠ 64³".into());
        }
    }
    o
}

fn id_path(trials: usize, rng: &mut Rng64) -> CheckOutcome {
    let mut o = CheckOutcome::new("path", "path gadget reproduces the branching-program polynomial");
    let mut cases: Vec<(usize, Vec<Rational>, Vec<Vec<Rational>>)> = Vec::new();
    for bits in 0u32..4 {
        cases.push((1, vec![int((bits & 1) as i64)], vec![vec![int((bits >> 1) as i64)]]));
    }
    cases.push((2, vec![int(1); 4], vec![vec![int(1); 4]; 4]));
    cases.push((2, vec![int(0); 4], vec![vec![int(1); 4]; 4]));
    for _ in 0..trials {
        for m in [1usize, 2] {
            let s = m * m;
            cases.push((
                m,
                (0..s).map(|_| random_rational(rng)).collect(),
                (0..s).map(|_| (0..s).map(|_| random_rational(rng)).collect()).collect(),
            ));
        }
    }
    for (m, x, y) in &cases {
        let Some(g) = o.guard(path_vbp_gadget(*m, x, y), || format!("m={m}")) else { continue };
        let got = colhom_eval(&g.pattern, &g.graph);
        let want = path_poly(*m, x, y);
        o.check(matches!((&got, &want), (Ok(a), Ok(b)) if a == b), || format!("m={m}: {got:?} ≠ {want:?}"));
        if *m == 1 {
            o.check(got.as_ref().ok() == Some(&(&x[0] * &x[0])), || "m=1 ≠ X₁²".into());
        }
    }
    // all-ones at m = 2: ordered pairs of distinct indices in [4]
    if let Ok(g) = path_vbp_gadget(2, &vec![int(1); 4], &vec![vec![int(1); 4]; 4]) {
        let v = colhom_eval(&g.pattern, &g.graph);
        o.check(v.as_ref().ok() == Some(&int(12)), || format!("m=2 all-ones: {v:?} ≠ 12"));
    }
    o
}

// ---------------------------------------------------------------------------
// Criterion 7

fn cfi_claim(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[6];
    let mut o = CheckOutcome::new(id, title);
    let bases = [
        ("P2", make_path(2).expect("path")),
        ("P3", make_path(3).expect("path")),
        ("P4", make_path(4).expect("path")),
        ("C4", make_cycle(2).expect("cycle")),
    ];
    for (name, s) in bases {
        let Some(pair) = o.guard(cfi_pair(&s), || name.to_string()) else { continue };
        let Some(r) = o.guard(cfi_claim_check(&pair, cfg.caps.claim_max_graphs), || name.to_string()) else {
            continue;
        };
        o.checks += r.checked as u64;
        for v in &r.violations {
            o.fail(format!("{name}: {v}"));
        }
        if r.isomorphic_found == 0 {
            o.fail(format!("{name}: the enumeration never produced S itself"));
        }
        o.notes.push(format!("{name}: {} coloured graphs", r.checked));
    }
    o
}

// ---------------------------------------------------------------------------
// Criterion 8

fn extraction(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[7];
    let mut o = CheckOutcome::new(id, title);
    let mut rng = rng_from_seed(cfg.seed);
    let trials = cfg.caps.trials;
    let p2 = make_path(2).expect("path");
    let p3 = make_path(3).expect("path");
    let p3d = BipartiteMultigraph::from_edges(2, 1, &[(0, 0, 1), (1, 0, 2)]).expect("doubled path");
    let grid = make_grid(2, 2).expect("grid");
    let pairs = [("P2 in P3", &p2, &p3), ("P2 in doubled P3", &p2, &p3d), ("P3 in 2×2 grid", &p3, &grid)];
    for (name, s, f) in pairs {
        for n in [1usize, 2] {
            let k = subgraph_oracle_size(s, n);
            let oracle = BruteForceOracle { pattern: f.clone(), n: k, m: k };
            let counting = CountingOracle::new(&oracle);
            if let Some(ex) = o.guard(SubgraphExtractor::new(f, s, n, &counting), || format!("subgraph {name} n={n}")) {
                for _ in 0..trials {
                    let g = random_coloured(s, n, &mut rng);
                    let (got, want) = (ex.eval(&g), colhom_eval(s, &g));
                    o.check(matches!((&got, &want), (Ok(a), Ok(b)) if a == b), || {
                        format!("subgraph {name} n={n}: {got:?} ≠ {want:?}")
                    });
                }
                let bound = trials * ex.calls_per_eval();
                o.check(counting.calls() <= bound, || format!("subgraph {name}: {} oracle calls", counting.calls()));
            }
            let k2 = minor_oracle_size(s, n);
            let oracle = BruteForceOracle { pattern: f.clone(), n: k2, m: k2 };
            if let Some(ex) = o.guard(MinorExtractor::new(f, s, n, &oracle), || format!("minor {name} n={n}")) {
                for _ in 0..trials {
                    let g = random_coloured(s, n, &mut rng);
                    let (got, want) = (ex.eval(&g), colhom_eval(s, &g));
                    o.check(matches!((&got, &want), (Ok(a), Ok(b)) if a == b), || {
                        format!("minor {name} n={n}: {got:?} ≠ {want:?}")
                    });
                }
            }
        }
    }
    // p = hom_{P2} + 2·hom_{P3} at n = 2, N = 3
    let patterns = [p2.clone(), p3.clone()];
    let alphas = [int(1), int(2)];
    let oracle = LincombOracle {
        terms: vec![(int(1), p2.clone()), (int(2), p3.clone())],
        n: 6,
        m: 6,
    };
    for (ell, f) in patterns.iter().enumerate() {
        let ex = LincombExtractor::new(&patterns, &alphas, ell, 2, 3, cfg.seed, &oracle);
        let Some(ex) = o.guard(ex, || format!("lincomb term {ell}")) else { continue };
        for _ in 0..trials {
            let g = Host::random(2, 2, &mut rng);
            let (got, want) = (ex.eval(&g), hom_count(f, &g));
            o.check(matches!((&got, &want), (Ok(a), Ok(b)) if a == b), || format!("lincomb term {ell}: {got:?} ≠ {want:?}"));
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Criterion 9

/// Golden widths `(tw, pw, td)`, each cross-checked in the width module's
/// tests against brute force over elimination orders and roots.
fn golden_widths() -> Vec<(&'static str, BipartiteMultigraph, (usize, usize, usize))> {
    let spider =
        BipartiteMultigraph::from_edges(4, 3, &[(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 0, 1), (2, 1, 1), (3, 2, 1)])
            .expect("spider");
    vec![
        ("P2", make_path(2).expect("path"), (1, 1, 2)),
        ("P5", make_path(5).expect("path"), (1, 1, 3)),
        ("P7", make_path(7).expect("path"), (1, 1, 3)),
        ("K1,3", make_star(3), (1, 1, 2)),
        ("K1,5", make_star(5), (1, 1, 2)),
        ("B4", make_complete_binary_tree(4).expect("tree"), (1, 1, 3)),
        ("spider(2,2,2)", spider, (1, 2, 3)),
        ("C4", make_cycle(2).expect("cycle"), (2, 2, 3)),
        ("C6", make_cycle(3).expect("cycle"), (2, 2, 4)),
        ("K2,2", make_complete_bipartite(2, 2), (2, 2, 3)),
        ("K2,3", make_complete_bipartite(2, 3), (2, 2, 3)),
        ("2×3 grid", make_grid(2, 3).expect("grid"), (2, 2, 4)),
    ]
}

fn exact_widths(o: &mut CheckOutcome, f: &BipartiteMultigraph) -> Option<(usize, usize, usize)> {
    let (tw, td_) = o.guard(treewidth_exact(f), || format!("treewidth {f:?}"))?;
    let (pw, pd) = o.guard(pathwidth_exact(f), || format!("pathwidth {f:?}"))?;
    let (d, et) = o.guard(treedepth_exact(f), || format!("treedepth {f:?}"))?;
    o.check(check_decomposition(f, &Decomposition::Tree(td_.clone())).is_ok() && td_.width() == tw, || {
        format!("{f:?}: bad tree decomposition")
    });
    o.check(check_decomposition(f, &Decomposition::Path(pd.clone())).is_ok() && pd.width() == pw, || {
        format!("{f:?}: bad path decomposition")
    });
    o.check(check_decomposition(f, &Decomposition::Elimination(et.clone())).is_ok() && et.height() == d, || {
        format!("{f:?}: bad elimination forest")
    });
    Some((tw, pw, d))
}

fn widths(cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[8];
    let mut o = CheckOutcome::new(id, title);
    for (name, f, want) in golden_widths() {
        if let Some(got) = exact_widths(&mut o, &f) {
            o.check(got == want, || format!("{name}: (tw, pw, td) = {got:?}, want {want:?}"));
        }
    }
    let all = enumerate_patterns(cfg.caps.width_max_vertices, 1, 64, true);
    o.notes.push(format!("{} simple graphs up to isomorphism", all.len()));
    for f in &all {
        let Some((tw, pw, d)) = exact_widths(&mut o, f) else { continue };
        o.check(tw <= pw && pw < d, || format!("{f:?}: tw {tw}, pw {pw}, td {d}"));
        let n = f.num_vertices();
        if n >= 2 {
            let bound = (tw as f64 + 1.0) * (n as f64).log2();
            o.check(d as f64 <= bound + 1e-9, || format!("{f:?}: td {d} > (tw+1)·log2 {n}"));
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Criterion 10

fn separation(_cfg: &SuiteConfig) -> CheckOutcome {
    let (id, title) = CRITERIA[9];
    let mut o = CheckOutcome::new(id, title);
    let c4 = make_cycle(2).expect("cycle");
    let Some(pair) = o.guard(cfi_pair(&c4), || "CFI(C4)".into()) else { return o };
    let hosts = pair.even.flatten_bipartite().and_then(|g| Ok((g, pair.odd.flatten_bipartite()?)));
    let Some((g0, g1)) = o.guard(hosts, || "flatten".into()) else { return o };
    let forests: Vec<BipartiteMultigraph> = enumerate_patterns(4, 1, 16, true)
        .into_iter()
        .filter(|f| treewidth_exact(f).map(|(tw, _)| tw <= 1).unwrap_or(false))
        .collect();
    o.notes.push(format!("{} patterns with ≤ 4 vertices and treewidth ≤ 1", forests.len()));
    for f in &forests {
        let same = hom_indistinguishable(&g0, &g1, std::slice::from_ref(f));
        o.check(matches!(same, Ok(true)), || format!("{f:?} distinguishes the pair"));
    }
    let h0 = hom_count(&c4, &g0);
    let h1 = hom_count(&c4, &g1);
    o.check(matches!((&h0, &h1), (Ok(a), Ok(b)) if a != b), || format!("C4 does not separate: {h0:?}, {h1:?}"));
    if let (Ok(a), Ok(b)) = (h0, h1) {
        o.notes.push(format!("hom(C4, even) = {a}, hom(C4, odd) = {b}"));
    }
    o
}
