//! Symmetric circuits for homomorphism polynomials.
//!
//! * [`compile_formula_td`]: a formula by induction on an elimination tree,
//!   with `1^{ℓ(v)}` tags on every child subformula.
//! * [`compile_skew_pw`]: a skew circuit by dynamic programming along a path
//!   decomposition, one gate per bag state, rigidified at the end.
//! * [`compile_circuit_tw`]: the same program over a tree decomposition;
//!   join nodes multiply their children.
//!
//! Isolated vertices are stripped first and contribute the constant factor
//! `n^{#isolated A} · m^{#isolated B}`. The colourful variants use the
//! variables `x_<c(a)>_<i>__<c(b)>_<j>` with every class of size `n`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use crate::circuit::{colourful_var_name, parse_colourful_var_name, var_name, Circuit, CircuitBuilder, CircuitShape, Label};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::oracle::ColouredGraph;
use crate::pattern::{BipartiteMultigraph, Side};
use crate::symmetry::rigidify;
use crate::width::{
    check_decomposition, pathwidth_exact, treedepth_exact, treewidth_exact, Decomposition, EliminationTree,
    PathDecomposition, TreeDecomposition,
};

/// Which construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompileShape {
    Td,
    Pw,
    Tw,
}

impl CompileShape {
    pub fn circuit_shape(self) -> CircuitShape {
        match self {
            CompileShape::Td => CircuitShape::FormulaMulti,
            CompileShape::Pw => CircuitShape::Skew,
            CompileShape::Tw => CircuitShape::General,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CompileShape::Td => "td",
            CompileShape::Pw => "pw",
            CompileShape::Tw => "tw",
        }
    }
}

impl std::str::FromStr for CompileShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "td" => Ok(CompileShape::Td),
            "pw" => Ok(CompileShape::Pw),
            "tw" => Ok(CompileShape::Tw),
            _ => Err(Error::InvalidParameter(format!("unknown shape `{s}` (td, pw or tw)"))),
        }
    }
}

/// Bounds the construction guarantees; `None` where none is claimed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClaimedBounds {
    pub size_bound: Option<BigUint>,
    pub orbit_bound: Option<BigUint>,
    pub support_bound: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileReport {
    pub circuit: Circuit,
    pub shape: CircuitShape,
    pub claimed_bounds: ClaimedBounds,
    /// Height of the elimination tree or width + 1 of the decomposition.
    pub parameter: usize,
    /// Longest chain of alternating sum layers, recorded next to
    /// [`Circuit::depth`] without being checked against anything.
    pub sum_depth: usize,
}

impl CompileReport {
    fn new(circuit: Circuit, shape: CircuitShape, claimed_bounds: ClaimedBounds, parameter: usize) -> Self {
        let sum_depth = sum_depth(&circuit);
        CompileReport {
            circuit,
            shape,
            claimed_bounds,
            parameter,
            sum_depth,
        }
    }

    pub fn to_json(&self) -> Value {
        let b = |x: &Option<BigUint>| x.as_ref().map(|v| v.to_string());
        json!({
            "shape": shape_name(self.shape),
            "parameter": self.parameter,
            "size": self.circuit.size(),
            "depth": self.circuit.depth(),
            "sumDepth": self.sum_depth,
            "claimedBounds": {
                "size": b(&self.claimed_bounds.size_bound),
                "orbit": b(&self.claimed_bounds.orbit_bound),
                "support": self.claimed_bounds.support_bound,
            },
            "circuit": self.circuit.to_json(),
        })
    }
}

pub fn shape_name(s: CircuitShape) -> &'static str {
    match s {
        CircuitShape::General => "general",
        CircuitShape::Skew => "skew",
        CircuitShape::Formula => "formula",
        CircuitShape::FormulaMulti => "formula-multi",
    }
}

/// Maximum number of sum gates on a path from the output to an input.
pub fn sum_depth(c: &Circuit) -> usize {
    let mut d = vec![0usize; c.len()];
    for (g, gate) in c.gates().iter().enumerate() {
        let below = gate.children.iter().map(|&(ch, _)| d[ch]).max().unwrap_or(0);
        d[g] = below + usize::from(gate.label == Label::Plus);
    }
    d.last().copied().unwrap_or(0)
}

/// Range of vertex images and the variable for an edge.
#[derive(Debug, Clone)]
struct Target<'a> {
    f: &'a BipartiteMultigraph,
    n: usize,
    m: usize,
    colouring: Option<&'a [usize]>,
}

impl Target<'_> {
    fn range(&self, v: usize) -> usize {
        match (self.colouring, self.f.side(v)) {
            (Some(_), _) => self.n,
            (None, Side::A) => self.n,
            (None, Side::B) => self.m,
        }
    }

    /// Variable for the edge `(a, b)` (global ids, `a` on side A).
    fn var(&self, a: usize, i: usize, b: usize, j: usize) -> String {
        match self.colouring {
            Some(c) => colourful_var_name(c[a], i, c[b], j),
            None => var_name(i, j),
        }
    }

    /// `x^{mult}` factors for the given edges under the partial map `img`.
    fn edge_factors(&self, b: &mut CircuitBuilder, edges: &[(usize, usize, u32)], img: &HashMap<usize, usize>) -> Vec<(usize, u32)> {
        edges
            .iter()
            .map(|&(u, w, k)| (b.var(&self.var(u, img[&u], w, img[&w])), k))
            .collect()
    }

    fn isolated_factor(&self, iso_a: usize, iso_b: usize) -> Rational {
        let (ra, rb) = match self.colouring {
            Some(_) => (self.n, self.n),
            None => (self.n, self.m),
        };
        Rational::from_integer((ra as u64).pow(iso_a as u32).into()) * Rational::from_integer((rb as u64).pow(iso_b as u32).into())
    }
}

/// All maps on `vs` (in order) as image vectors, row-major.
fn bag_maps(t: &Target, vs: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &v in vs {
        let r = t.range(v);
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..r).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

struct Stripped {
    graph: BipartiteMultigraph,
    /// Old global id → new global id for non-isolated vertices.
    map: BTreeMap<usize, usize>,
    iso_a: usize,
    iso_b: usize,
}

fn strip(f: &BipartiteMultigraph) -> Stripped {
    let (graph, map, iso_a, iso_b) = f.without_isolated();
    Stripped { graph, map, iso_a, iso_b }
}

fn restrict_bags(bags: &[BTreeSet<usize>], map: &BTreeMap<usize, usize>) -> Vec<BTreeSet<usize>> {
    bags.iter()
        .map(|b| b.iter().filter_map(|v| map.get(v).copied()).collect())
        .collect()
}

/// Drops vertices outside `map`, reattaching children to the nearest kept
/// ancestor.
fn restrict_elimination(t: &EliminationTree, map: &BTreeMap<usize, usize>) -> EliminationTree {
    let mut parent = vec![None; map.len()];
    for (&old, &new) in map {
        parent[new] = t.ancestors(old).into_iter().find_map(|a| map.get(&a).copied());
    }
    EliminationTree { parent }
}

fn constant_circuit(c: Rational) -> Circuit {
    let mut b = CircuitBuilder::new();
    let g = b.constant(c);
    b.finish(g)
}

/// Multiplies `core` by the isolated-vertex constant when it is not 1.
fn with_factor(b: &mut CircuitBuilder, core: usize, factor: Rational) -> usize {
    if factor.is_one() {
        core
    } else {
        let k = b.constant(factor);
        b.raw(Label::Times, vec![(core, 1), (k, 1)])
    }
}

/// `(|V(F)|·|E(F)|·(n+m))^d`, with `|E|` counted with multiplicity.
pub fn td_size_bound(f: &BipartiteMultigraph, n: usize, m: usize, d: usize) -> BigUint {
    let base = BigUint::from(f.num_vertices()) * BigUint::from(f.num_edges()) * BigUint::from(n + m);
    num_traits::pow(base, d)
}

fn pow_big(base: usize, e: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), e)
}

fn td_core(t: &Target, et: &EliminationTree) -> Result<Circuit> {
    let f = t.f;
    let nv = f.num_vertices();
    let children = et.children();
    // edges from u to its ancestors, with u's side first
    let mut up_edges: Vec<Vec<(usize, usize, u32)>> = vec![Vec::new(); nv];
    for (a, bv, k) in f.global_edges() {
        let lower = if et.ancestors(a).contains(&bv) { a } else { bv };
        up_edges[lower].push((a, bv, k));
    }
    let mut b = CircuitBuilder::new();
    let one = b.int(1);

    fn build(
        b: &mut CircuitBuilder,
        t: &Target,
        one: usize,
        u: usize,
        gamma: &mut HashMap<usize, usize>,
        children: &[Vec<usize>],
        up_edges: &[Vec<(usize, usize, u32)>],
    ) -> usize {
        let mut summands = Vec::new();
        for h in 0..t.range(u) {
            gamma.insert(u, h);
            let mut factors = t.edge_factors(b, &up_edges[u], gamma);
            for (pos, &v) in children[u].iter().enumerate() {
                let sub = build(b, t, one, v, gamma, children, up_edges);
                let tag = b.raw(Label::Times, vec![(sub, 1), (one, pos as u32 + 1)]);
                factors.push((tag, 1));
            }
            summands.push((b.times(factors), 1));
            gamma.remove(&u);
        }
        b.plus(summands)
    }

    let roots = et.roots();
    let mut gamma = HashMap::new();
    let subs: Vec<usize> = roots
        .iter()
        .map(|&r| build(&mut b, t, one, r, &mut gamma, &children, &up_edges))
        .collect();
    let out = if subs.len() == 1 {
        subs[0]
    } else {
        let tags: Vec<(usize, u32)> = subs
            .iter()
            .enumerate()
            .map(|(pos, &s)| (b.raw(Label::Times, vec![(s, 1), (one, pos as u32 + 1)]), 1))
            .collect();
        b.raw(Label::Times, tags)
    };
    Ok(b.finish(out))
}

fn compile_td_target(f: &BipartiteMultigraph, et: &EliminationTree, t_n: usize, t_m: usize, colouring: Option<&[usize]>) -> Result<CompileReport> {
    check_decomposition(f, &Decomposition::Elimination(et.clone())).map_err(|v| Error::InvalidEliminationTree(v.to_string()))?;
    let d = et.height();
    let s = strip(f);
    let target = Target {
        f: &s.graph,
        n: t_n,
        m: t_m,
        colouring: None,
    };
    let colours: Option<Vec<usize>> = colouring.map(|c| {
        let mut out = vec![0; s.graph.num_vertices()];
        for (&old, &new) in &s.map {
            out[new] = c[old];
        }
        out
    });
    let target = Target {
        colouring: colours.as_deref(),
        ..target
    };
    let factor = target.isolated_factor(s.iso_a, s.iso_b);
    let circuit = if s.graph.num_vertices() == 0 {
        constant_circuit(factor)
    } else {
        let core = td_core(&target, &restrict_elimination(et, &s.map))?;
        if factor.is_one() {
            core
        } else {
            let mut b = CircuitBuilder::new();
            let g = b.import(&core);
            let out = with_factor(&mut b, g, factor);
            b.finish(out)
        }
    };
    let bounds = ClaimedBounds {
        size_bound: (f.num_edges() > 0).then(|| td_size_bound(f, t_n, t_m, d)),
        orbit_bound: Some(pow_big(t_n + t_m, d)),
        support_bound: Some(d),
    };
    Ok(CompileReport::new(circuit, CircuitShape::FormulaMulti, bounds, d))
}

/// Rigid symmetric formula for `hom_{F,n,m}` from an elimination tree.
pub fn compile_formula_td(f: &BipartiteMultigraph, t: &EliminationTree, n: usize, m: usize) -> Result<CompileReport> {
    compile_td_target(f, t, n, m, None)
}

/// Bag-state dynamic program shared by the path and tree compilers.
/// Returns the output gate (before the isolated factor).
fn bag_program(b: &mut CircuitBuilder, t: &Target, td: &TreeDecomposition) -> Result<usize> {
    let f = t.f;
    let order = td.bottom_up()?;
    let children = td.children();
    // each edge goes to the first node in bottom-up order containing both ends
    let mut node_edges: Vec<Vec<(usize, usize, u32)>> = vec![Vec::new(); td.bags.len()];
    for (a, bv, k) in f.global_edges() {
        let node = order
            .iter()
            .copied()
            .find(|&s| td.bags[s].contains(&a) && td.bags[s].contains(&bv))
            .ok_or_else(|| Error::InvalidDecomposition(format!("edge {}-{} in no bag", a + 1, bv + 1)))?;
        node_edges[node].push((a, bv, k));
    }
    // sums[c] maps a restriction to the intersection with the parent bag to
    // the gate summing the child's states
    let mut sums: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); td.bags.len()];
    let mut root_gate = None;
    for &s in &order {
        let bag: Vec<usize> = td.bags[s].iter().copied().collect();
        let mut states = Vec::new();
        for img in bag_maps(t, &bag) {
            let map: HashMap<usize, usize> = bag.iter().copied().zip(img.iter().copied()).collect();
            let mut factors = t.edge_factors(b, &node_edges[s], &map);
            for &c in &children[s] {
                let key: Vec<usize> = td.bags[c]
                    .iter()
                    .filter(|v| td.bags[s].contains(v))
                    .map(|v| map[v])
                    .collect();
                factors.push((sums[c][&key], 1));
            }
            states.push((img, b.times(factors)));
        }
        match td.parent[s] {
            Some(p) => {
                let shared: Vec<usize> = (0..bag.len()).filter(|&k| td.bags[p].contains(&bag[k])).collect();
                let mut groups: BTreeMap<Vec<usize>, Vec<(usize, u32)>> = BTreeMap::new();
                for (img, g) in states {
                    let key: Vec<usize> = shared.iter().map(|&k| img[k]).collect();
                    groups.entry(key).or_default().push((g, 1));
                }
                for (key, gs) in groups {
                    let g = b.plus(gs);
                    sums[s].insert(key, g);
                }
            }
            None => {
                let all: Vec<(usize, u32)> = states.into_iter().map(|(_, g)| (g, 1)).collect();
                root_gate = Some(b.plus(all));
            }
        }
    }
    root_gate.ok_or_else(|| Error::InvalidDecomposition("empty decomposition".into()))
}

fn compile_bag_target(
    f: &BipartiteMultigraph,
    td: &TreeDecomposition,
    t_n: usize,
    t_m: usize,
    colouring: Option<&[usize]>,
) -> Result<Circuit> {
    check_decomposition(f, &Decomposition::Tree(td.clone())).map_err(|v| Error::InvalidDecomposition(v.to_string()))?;
    let s = strip(f);
    let colours: Option<Vec<usize>> = colouring.map(|c| {
        let mut out = vec![0; s.graph.num_vertices()];
        for (&old, &new) in &s.map {
            out[new] = c[old];
        }
        out
    });
    let target = Target {
        f: &s.graph,
        n: t_n,
        m: t_m,
        colouring: colours.as_deref(),
    };
    let factor = target.isolated_factor(s.iso_a, s.iso_b);
    if s.graph.num_vertices() == 0 {
        return Ok(constant_circuit(factor));
    }
    let restricted = TreeDecomposition {
        parent: td.parent.clone(),
        bags: restrict_bags(&td.bags, &s.map),
    };
    let mut b = CircuitBuilder::new();
    let core = bag_program(&mut b, &target, &restricted)?;
    let out = with_factor(&mut b, core, factor);
    Ok(b.finish(out))
}

/// Symmetric skew circuit for `hom_{F,n,m}` from a path decomposition,
/// rigidified.
pub fn compile_skew_pw(f: &BipartiteMultigraph, p: &PathDecomposition, n: usize, m: usize) -> Result<CompileReport> {
    let raw = compile_bag_target(f, &p.to_tree(), n, m, None)?;
    let circuit = rigidify(&raw, n, m)?;
    let k = p.width() + 1;
    let bounds = ClaimedBounds {
        size_bound: None,
        orbit_bound: Some(pow_big(n + m, k)),
        support_bound: Some(k),
    };
    Ok(CompileReport::new(circuit, CircuitShape::Skew, bounds, k))
}

/// Symmetric circuit for `hom_{F,n,m}` from a tree decomposition.
pub fn compile_circuit_tw(f: &BipartiteMultigraph, t: &TreeDecomposition, n: usize, m: usize) -> Result<CompileReport> {
    let circuit = compile_bag_target(f, t, n, m, None)?;
    let k = t.width() + 1;
    let bounds = ClaimedBounds {
        size_bound: None,
        orbit_bound: Some(pow_big(n + m, k)),
        support_bound: Some(k),
    };
    Ok(CompileReport::new(circuit, CircuitShape::General, bounds, k))
}

/// Compiles with an optimal decomposition computed by the width module.
pub fn compile_auto(f: &BipartiteMultigraph, shape: CompileShape, n: usize, m: usize) -> Result<CompileReport> {
    match shape {
        CompileShape::Td => compile_formula_td(f, &treedepth_exact(f)?.1, n, m),
        CompileShape::Pw => compile_skew_pw(f, &pathwidth_exact(f)?.1, n, m),
        CompileShape::Tw => compile_circuit_tw(f, &treewidth_exact(f)?.1, n, m),
    }
}

/// `Σ α_i · hom_{F_i,n,m}`, each term tagged with `1^{i+1}`.
pub fn compile_lincomb(terms: &[(Rational, BipartiteMultigraph)], n: usize, m: usize, shape: CompileShape) -> Result<CompileReport> {
    let reports = terms
        .iter()
        .map(|(_, f)| compile_auto(f, shape, n, m))
        .collect::<Result<Vec<_>>>()?;
    let mut b = CircuitBuilder::new();
    let one = b.int(1);
    let mut summands = Vec::new();
    for (pos, ((alpha, _), r)) in terms.iter().zip(&reports).enumerate() {
        let g = b.import(&r.circuit);
        let mut ch = vec![(g, 1), (one, pos as u32 + 1)];
        if !alpha.is_one() {
            ch.push((b.constant(alpha.clone()), 1));
        }
        summands.push((b.raw(Label::Times, ch), 1));
    }
    let out = if summands.is_empty() { b.int(0) } else { b.raw(Label::Plus, summands) };
    let mut circuit = b.finish(out);
    if shape == CompileShape::Pw {
        circuit = rigidify(&circuit, n, m)?;
    }
    let max_opt = |f: &dyn Fn(&ClaimedBounds) -> Option<BigUint>| reports.iter().map(|r| f(&r.claimed_bounds)).max().flatten();
    let bounds = ClaimedBounds {
        size_bound: None,
        orbit_bound: max_opt(&|b| b.orbit_bound.clone()),
        support_bound: reports.iter().filter_map(|r| r.claimed_bounds.support_bound).max(),
    };
    let parameter = reports.iter().map(|r| r.parameter).max().unwrap_or(0);
    Ok(CompileReport::new(circuit, shape.circuit_shape(), bounds, parameter))
}

/// Circuit for `colhom_{F,c,n}`; `c` maps pattern vertices to colours.
pub fn compile_colourful(f: &BipartiteMultigraph, c: &[usize], n: usize, shape: CompileShape) -> Result<CompileReport> {
    if c.len() != f.num_vertices() {
        return Err(Error::ColourMismatch(format!("{} colours for {} vertices", c.len(), f.num_vertices())));
    }
    match shape {
        CompileShape::Td => compile_td_target(f, &treedepth_exact(f)?.1, n, n, Some(c)),
        CompileShape::Pw => {
            let p = pathwidth_exact(f)?.1;
            let circuit = compile_bag_target(f, &p.to_tree(), n, n, Some(c))?;
            Ok(CompileReport::new(circuit, CircuitShape::Skew, ClaimedBounds::default(), p.width() + 1))
        }
        CompileShape::Tw => {
            let t = treewidth_exact(f)?.1;
            let circuit = compile_bag_target(f, &t, n, n, Some(c))?;
            Ok(CompileReport::new(circuit, CircuitShape::General, ClaimedBounds::default(), t.width() + 1))
        }
    }
}

/// Value of a colourful variable in a coloured host.
pub fn colourful_lookup(g: &ColouredGraph, name: &str) -> Option<Rational> {
    let (u, i, v, j) = parse_colourful_var_name(name)?;
    (u < g.num_colours() && v < g.num_colours() && i < g.sizes[u] && j < g.sizes[v]).then(|| g.get(u, i, v, j))
}

/// Evaluates a colourful circuit at a coloured host.
pub fn evaluate_colourful(c: &Circuit, g: &ColouredGraph) -> Result<Rational> {
    c.evaluate_with(|name| colourful_lookup(g, name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, random_rational, rng_from_seed};
    use crate::oracle::{colhom_eval, hom_count, Host};
    use crate::pattern::{enumerate_patterns, make_complete_bipartite, make_cycle, make_path, make_star};
    use crate::symmetry::{is_rigid, is_symmetric};

    fn eval(c: &Circuit, h: &Host) -> Rational {
        c.evaluate(&h.to_assignment()).unwrap()
    }

    #[test]
    fn td_examples() {
        let ones = Host::ones(2, 2);
        let p2 = make_path(2).unwrap();
        let r = compile_auto(&p2, CompileShape::Td, 2, 2).unwrap();
        assert_eq!(eval(&r.circuit, &ones), int(4));
        let p3 = make_path(3).unwrap();
        let r = compile_auto(&p3, CompileShape::Td, 2, 2).unwrap();
        assert_eq!(eval(&r.circuit, &ones), int(8));
        let mut h = Host::ones(2, 2);
        h.set(0, 0, int(2));
        assert_eq!(eval(&r.circuit, &h), hom_count(&p3, &h).unwrap());
        assert!(r.circuit.validate(CircuitShape::FormulaMulti));
        assert!(is_symmetric(&r.circuit, 2, 2).unwrap());
        assert!(is_rigid(&r.circuit).unwrap());
    }

    #[test]
    fn pw_examples() {
        let ones = Host::ones(2, 2);
        let r = compile_auto(&make_path(4).unwrap(), CompileShape::Pw, 2, 2).unwrap();
        assert_eq!(eval(&r.circuit, &ones), int(16));
        let r = compile_auto(&make_cycle(2).unwrap(), CompileShape::Pw, 2, 2).unwrap();
        assert_eq!(eval(&r.circuit, &ones), int(16));
        assert!(r.circuit.validate(CircuitShape::Skew));
        let double = BipartiteMultigraph::from_edges(1, 1, &[(0, 0, 2)]).unwrap();
        let r = compile_auto(&double, CompileShape::Pw, 2, 2).unwrap();
        let mut h = Host::zeros(2, 2);
        h.set(0, 0, int(2));
        assert_eq!(eval(&r.circuit, &h), int(4));
    }

    #[test]
    fn tw_examples() {
        let star = make_star(3);
        let r = compile_auto(&star, CompileShape::Tw, 2, 2).unwrap();
        assert_eq!(eval(&r.circuit, &Host::ones(2, 2)), int(16));
        let k22 = make_complete_bipartite(2, 2);
        let r = compile_auto(&k22, CompileShape::Tw, 3, 3).unwrap();
        let mut rng = rng_from_seed(3);
        for bits in [0b1_0110_1011u64, 0b0_1111_0001, 0b1_1111_1111] {
            let h = Host::from_bits(3, 3, bits);
            assert_eq!(eval(&r.circuit, &h), hom_count(&k22, &h).unwrap());
        }
        let p5 = make_path(5).unwrap();
        let tw = compile_auto(&p5, CompileShape::Tw, 2, 3).unwrap();
        let pw = compile_auto(&p5, CompileShape::Pw, 2, 3).unwrap();
        for _ in 0..10 {
            let h = Host::random(2, 3, &mut rng);
            assert_eq!(eval(&tw.circuit, &h), eval(&pw.circuit, &h));
        }
    }

    #[test]
    fn all_small_patterns_agree_with_oracle() {
        let mut rng = rng_from_seed(11);
        for f in enumerate_patterns(4, 2, 4, true) {
            for (n, m) in [(1, 2), (2, 2), (2, 1)] {
                let h = Host::random(n, m, &mut rng);
                let want = hom_count(&f, &h).unwrap();
                for shape in [CompileShape::Td, CompileShape::Pw, CompileShape::Tw] {
                    let r = compile_auto(&f, shape, n, m).unwrap();
                    assert_eq!(eval(&r.circuit, &h), want, "{shape:?} {f:?}");
                    assert!(r.circuit.validate(shape.circuit_shape()), "{shape:?} {f:?}");
                }
            }
        }
    }

    #[test]
    fn lincomb_examples() {
        let p2 = make_path(2).unwrap();
        let p3 = make_path(3).unwrap();
        let r = compile_lincomb(&[(int(1), p2.clone()), (int(2), p3.clone())], 2, 2, CompileShape::Td).unwrap();
        assert_eq!(eval(&r.circuit, &Host::ones(2, 2)), int(20));
        assert!(r.circuit.validate(CircuitShape::FormulaMulti));
        let z = compile_lincomb(&[(int(1), p3.clone()), (int(-1), p3.clone())], 2, 2, CompileShape::Pw).unwrap();
        let mut rng = rng_from_seed(2);
        for _ in 0..10 {
            assert_eq!(eval(&z.circuit, &Host::random(2, 2, &mut rng)), int(0));
        }
        let single = compile_lincomb(&[(int(1), p3.clone())], 2, 2, CompileShape::Tw).unwrap();
        let h = Host::random(2, 2, &mut rng);
        assert_eq!(eval(&single.circuit, &h), hom_count(&p3, &h).unwrap());
    }

    #[test]
    fn colourful_examples() {
        let p2 = make_path(2).unwrap();
        let r = compile_colourful(&p2, &[0, 1], 1, CompileShape::Td).unwrap();
        assert_eq!(r.circuit.variables(), vec![colourful_var_name(0, 0, 1, 0)]);
        let mut g: ColouredGraph = ColouredGraph::for_pattern(&p2, 2);
        for i in 0..2 {
            for j in 0..2 {
                g.set(0, i, 1, j, int(1));
            }
        }
        let r = compile_colourful(&p2, &[0, 1], 2, CompileShape::Pw).unwrap();
        assert_eq!(evaluate_colourful(&r.circuit, &g).unwrap(), int(4));
        let p3 = make_path(3).unwrap();
        let mut rng = rng_from_seed(7);
        let mut g: ColouredGraph = ColouredGraph::for_pattern(&p3, 2);
        for (a, bv, _) in p3.global_edges() {
            for i in 0..2 {
                for j in 0..2 {
                    g.set(a, i, bv, j, random_rational(&mut rng));
                }
            }
        }
        let want = colhom_eval(&p3, &g).unwrap();
        for shape in [CompileShape::Td, CompileShape::Pw, CompileShape::Tw] {
            let r = compile_colourful(&p3, &[0, 1, 2], 2, shape).unwrap();
            assert_eq!(evaluate_colourful(&r.circuit, &g).unwrap(), want);
        }
    }

    #[test]
    fn isolated_and_empty_patterns() {
        let empty = BipartiteMultigraph::new(0, 0);
        let r = compile_auto(&empty, CompileShape::Td, 3, 2).unwrap();
        assert_eq!(eval(&r.circuit, &Host::ones(3, 2)), int(1));
        let iso = BipartiteMultigraph::new(2, 1);
        for shape in [CompileShape::Td, CompileShape::Pw, CompileShape::Tw] {
            let r = compile_auto(&iso, shape, 3, 2).unwrap();
            assert_eq!(eval(&r.circuit, &Host::zeros(3, 2)), int(18));
        }
    }

    #[test]
    fn invalid_certificates_rejected() {
        let p3 = make_path(3).unwrap();
        let bad = EliminationTree { parent: vec![None, None, None] };
        assert!(matches!(compile_formula_td(&p3, &bad, 2, 2), Err(Error::InvalidEliminationTree(_))));
        let bad = PathDecomposition {
            bags: vec![[0, 1].into_iter().collect()],
        };
        assert!(matches!(compile_skew_pw(&p3, &bad, 2, 2), Err(Error::InvalidDecomposition(_))));
    }

    #[test]
    fn td_bounds_hold_on_small_patterns() {
        for f in [make_path(2).unwrap(), make_path(4).unwrap(), make_star(3), make_cycle(2).unwrap()] {
            let r = compile_auto(&f, CompileShape::Td, 2, 2).unwrap();
            assert!(BigUint::from(r.circuit.size()) <= r.claimed_bounds.size_bound.clone().unwrap());
        }
    }
}
