//! Reductions between homomorphism polynomials.
//!
//! Hardness gadgets (clique grid, binary tree, path, minor), CFI pairs,
//! tensor products of coloured graphs, the degree slicer, the `G⁻`
//! doubling, and the three extraction pipelines that recover a single
//! colourful or uncoloured homomorphism polynomial from an oracle for a
//! larger one. Oracles are abstracted by [`HomOracle`].
//!
//! Coloured graphs produced here are coloured by the global vertices of
//! the relevant pattern, so `colhom_eval(pattern, graph)` applies directly.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::circuit::{Circuit, Evaluator};
use crate::error::{Error, Result};
use crate::exactnum::{solve_linear, Rational, Scalar};
use crate::oracle::{
    coloured_hom_eval, find_hom_basis, for_each_tuple, hom_count_factored, set_partitions, ColouredGraph, Host,
};
use crate::pattern::{
    binary_tree_layout, grid_vertex, make_grid, make_path, quotient, BipartiteMultigraph, BranchSets, Side,
};

fn q(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn qpow(base: u64, e: usize) -> Rational {
    Rational::from_integer(BigInt::from(base).pow(e as u32))
}

/// A pattern together with a graph coloured by its global vertices.
#[derive(Debug, Clone)]
pub struct Gadget<W = Rational> {
    pub pattern: BipartiteMultigraph,
    pub graph: ColouredGraph<W>,
}

// ---------------------------------------------------------------------------
// Clique grid

/// Class members of grid cell `(i, j)` as `(first, second)` coordinates in
/// `[2n]`: diagonal cells hold `(v, v)`, the others all `(u, v)` with `u ≠ v`.
fn grid_class(n: usize, diag: bool) -> Vec<(usize, usize)> {
    let r = 2 * n;
    if diag {
        (0..r).map(|v| (v, v)).collect()
    } else {
        let mut out = Vec::with_capacity(r * (r - 1));
        for u in 0..r {
            for v in 0..r {
                if u != v {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// Grid gadget for `clique_n`. `y(u, v)` is read for `u < v` in `[2n]`
/// (0-based). Rows keep the first coordinate and strictly increase the
/// second; columns keep the second and strictly increase the first.
/// Horizontal edges into cells on or above the diagonal carry `y`.
pub fn clique_grid_gadget<W: Scalar>(n: usize, y: &dyn Fn(usize, usize) -> W) -> Result<Gadget<W>> {
    if n < 1 {
        return Err(Error::InvalidParameter("clique gadget needs n ≥ 1".into()));
    }
    let pattern = make_grid(n, n)?;
    let pos = grid_vertex(n, n);
    let classes: Vec<Vec<(usize, usize)>> = (0..n * n).map(|k| grid_class(n, k / n == k % n)).collect();
    let mut sizes = vec![0; n * n];
    for k in 0..n * n {
        sizes[pos[k]] = classes[k].len();
    }
    let sides = (0..n * n).map(|v| pattern.side(v)).collect();
    let mut graph = ColouredGraph::new(sides, sizes);
    for i in 0..n {
        for j in 0..n {
            let here = i * n + j;
            if j + 1 < n {
                let there = i * n + j + 1;
                for (a, &(u, v)) in classes[here].iter().enumerate() {
                    for (b, &(u2, v2)) in classes[there].iter().enumerate() {
                        if u2 != u || v2 <= v {
                            continue;
                        }
                        let w = if i <= j {
                            if u < v2 {
                                y(u, v2)
                            } else {
                                W::zero()
                            }
                        } else {
                            W::one()
                        };
                        graph.set(pos[here], a, pos[there], b, w);
                    }
                }
            }
            if i + 1 < n {
                let there = (i + 1) * n + j;
                for (a, &(u, v)) in classes[here].iter().enumerate() {
                    for (b, &(u2, v2)) in classes[there].iter().enumerate() {
                        if v2 == v && u2 > u {
                            graph.set(pos[here], a, pos[there], b, W::one());
                        }
                    }
                }
            }
        }
    }
    Ok(Gadget { pattern, graph })
}

/// `clique_n(y) = Σ_{A ⊆ [2n], |A| = n} Π_{u < v ∈ A} y(u, v)`, expanded directly.
pub fn clique_poly<W: Scalar>(n: usize, y: &dyn Fn(usize, usize) -> W) -> W {
    let r = 2 * n;
    let mut total = W::zero();
    for mask in 0u64..(1u64 << r) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let set: Vec<usize> = (0..r).filter(|&v| mask >> v & 1 == 1).collect();
        let mut p = W::one();
        for a in 0..set.len() {
            for b in a + 1..set.len() {
                p = p * y(set[a], set[b]);
            }
        }
        total = total + p;
    }
    total
}

// ---------------------------------------------------------------------------
// Binary tree and path

fn sym<W: Scalar>(y: &[Vec<W>], u: usize, v: usize) -> W {
    y[u.min(v)][u.max(v)].clone()
}

fn check_square<W>(y: &[Vec<W>], size: usize, what: &str) -> Result<()> {
    if y.len() != size || y.iter().any(|r| r.len() != size) {
        return Err(Error::InvalidParameter(format!("{what} must be a {size} × {size} matrix")));
    }
    Ok(())
}

/// Binary tree gadget on `B_m` with classes of size `m⁶`. `y` is a
/// symmetric matrix read at `(min, max)`, diagonal included.
pub fn btree_vp_gadget<W: Scalar>(m: usize, x: &[W], y: &[Vec<W>]) -> Result<Gadget<W>> {
    if m < 1 {
        return Err(Error::InvalidParameter("tree gadget needs m ≥ 1".into()));
    }
    let size = m.pow(6);
    if x.len() != size {
        return Err(Error::InvalidParameter(format!("X must have {size} entries")));
    }
    check_square(y, size, "Y")?;
    let (pattern, pos) = binary_tree_layout(m)?;
    let sides = (0..pattern.num_vertices()).map(|v| pattern.side(v)).collect();
    let mut graph = ColouredGraph::new(sides, vec![size; pattern.num_vertices()]);
    for k in 2..=pos.len() {
        let (p, c) = (pos[k / 2 - 1], pos[k - 1]);
        let right = k % 2 == 1;
        for u in 0..size {
            for v in 0..size {
                let w = sym(y, u, v);
                let w = if right { x[v].clone() * w } else { w };
                graph.set(p, u, c, v, w);
            }
        }
    }
    Ok(Gadget { pattern, graph })
}

/// `p_m = Σ_h Π_{right children v} X_{h(v)} Π_{uv} Y_{h(u),h(v)}`, expanded
/// over maps from the heap nodes of the tree.
pub fn btree_poly<W: Scalar>(m: usize, x: &[W], y: &[Vec<W>]) -> Result<W> {
    let size = m.pow(6);
    check_square(y, size, "Y")?;
    let (_, pos) = binary_tree_layout(m)?;
    let nodes = pos.len();
    if (size as f64).powi(nodes as i32) > 2e7 {
        return Err(Error::SizeCap("tree expansion too large".into()));
    }
    let mut total = W::zero();
    for_each_tuple(&vec![size; nodes], |h| {
        let mut p = W::one();
        for k in 2..=nodes {
            if k % 2 == 1 {
                p = p * x[h[k - 1]].clone();
            }
            p = p * sym(y, h[k / 2 - 1], h[k - 1]);
        }
        total = total.clone() + p;
    });
    Ok(total)
}

/// Path gadget on `P_{m+2}` with classes of size `m²`: the two end edges
/// pin equal indices and carry `X`; the middle edges carry `Y` off the
/// diagonal.
pub fn path_vbp_gadget<W: Scalar>(m: usize, x: &[W], y: &[Vec<W>]) -> Result<Gadget<W>> {
    if m < 1 {
        return Err(Error::InvalidParameter("path gadget needs m ≥ 1".into()));
    }
    let size = m * m;
    if x.len() != size {
        return Err(Error::InvalidParameter(format!("X must have {size} entries")));
    }
    check_square(y, size, "Y")?;
    let pattern = make_path(m + 2)?;
    let a = (m + 2).div_ceil(2);
    let at = |p: usize| if p % 2 == 0 { p / 2 } else { a + p / 2 };
    let sides = (0..m + 2).map(|v| pattern.side(v)).collect();
    let mut graph = ColouredGraph::new(sides, vec![size; m + 2]);
    for p in 0..=m {
        for u in 0..size {
            for v in 0..size {
                let w = if p == 0 || p == m {
                    if u == v {
                        x[u].clone()
                    } else {
                        W::zero()
                    }
                } else if u != v {
                    sym(y, u, v)
                } else {
                    W::zero()
                };
                graph.set(at(p), u, at(p + 1), v, w);
            }
        }
    }
    Ok(Gadget { pattern, graph })
}

/// `Σ_{h:[m]→[m²]} X_{h(1)} X_{h(m)} Π_{i<m} Y_{h(i)h(i+1)}` with `Y` read as
/// zero on the diagonal.
pub fn path_poly<W: Scalar>(m: usize, x: &[W], y: &[Vec<W>]) -> Result<W> {
    let size = m * m;
    check_square(y, size, "Y")?;
    if (size as f64).powi(m as i32) > 2e7 {
        return Err(Error::SizeCap("path expansion too large".into()));
    }
    let mut total = W::zero();
    for_each_tuple(&vec![size; m], |h| {
        let mut p = x[h[0]].clone() * x[h[m - 1]].clone();
        for i in 0..m - 1 {
            if h[i] == h[i + 1] {
                return;
            }
            p = p * sym(y, h[i], h[i + 1]);
        }
        total = total.clone() + p;
    });
    Ok(total)
}

// ---------------------------------------------------------------------------
// Minors

/// Gadget `G′` over `F′` with `colhom_{F′}(G′) = colhom_S(y)` for an
/// `S`-coloured `y` with classes of size `n`. Each branch set is copied
/// once per index `v ∈ [n]`; remainder vertices get classes of size 1.
pub fn minor_gadget<W: Scalar>(
    s: &BipartiteMultigraph,
    fprime: &BipartiteMultigraph,
    branch: &BranchSets,
    n: usize,
    y: &ColouredGraph<W>,
) -> Result<ColouredGraph<W>> {
    if !branch.verify(s, fprime) {
        return Err(Error::InvalidBranchSets("branch sets do not witness S as a minor of F′".into()));
    }
    if !fprime.is_simple() {
        return Err(Error::InvalidParameter("F′ must be simple".into()));
    }
    check_coloured_by(y, s, n)?;
    let nf = fprime.num_vertices();
    let mut owner: Vec<Option<usize>> = vec![None; nf];
    for (i, set) in branch.sets.iter().enumerate() {
        for &v in set {
            owner[v] = Some(i);
        }
    }
    let mut witness: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&(si, _), &(x, z)) in &branch.edge_witness {
        witness.insert((x.min(z), x.max(z)), si);
    }
    let sides = (0..nf).map(|v| fprime.side(v)).collect();
    let sizes = owner.iter().map(|o| if o.is_some() { n } else { 1 }).collect();
    let mut g = ColouredGraph::new(sides, sizes);
    for (p, r, _) in fprime.global_edges() {
        match (owner[p], owner[r]) {
            (Some(i), Some(j)) if i == j => {
                for u in 0..n {
                    g.set(p, u, r, u, W::one());
                }
            }
            (Some(i), Some(j)) => {
                let carrier = witness.get(&(p.min(r), p.max(r))).copied();
                for u in 0..n {
                    for v in 0..n {
                        let w = if carrier.is_some() { y.get(i, u, j, v) } else { W::one() };
                        g.set(p, u, r, v, w);
                    }
                }
            }
            _ => {
                let (sp, sr) = (g.sizes[p], g.sizes[r]);
                for u in 0..sp {
                    for v in 0..sr {
                        g.set(p, u, r, v, W::one());
                    }
                }
            }
        }
    }
    Ok(g)
}

fn check_coloured_by<W: Scalar>(g: &ColouredGraph<W>, s: &BipartiteMultigraph, n: usize) -> Result<()> {
    let ok = g.num_colours() == s.num_vertices()
        && (0..s.num_vertices()).all(|v| g.sides[v] == s.side(v) && g.sizes[v] == n);
    if ok {
        Ok(())
    } else {
        Err(Error::ColourMismatch(format!(
            "expected {} colour classes of size {n} following the pattern sides",
            s.num_vertices()
        )))
    }
}

// ---------------------------------------------------------------------------
// Coloured graph algebra

/// `G × H`: class sizes multiply, `(i, j) ↦ i·|H_c| + j`, weights multiply.
pub fn tensor_product<W: Scalar>(g: &ColouredGraph<W>, h: &ColouredGraph<W>) -> Result<ColouredGraph<W>> {
    if g.sides != h.sides {
        return Err(Error::ColourMismatch("colour sets differ".into()));
    }
    let sizes: Vec<usize> = g.sizes.iter().zip(&h.sizes).map(|(a, b)| a * b).collect();
    let mut out = ColouredGraph::new(g.sides.clone(), sizes);
    let mut by_pair: BTreeMap<(usize, usize), Vec<(usize, usize, W)>> = BTreeMap::new();
    for (((cu, i), (cv, j)), w) in h.entries() {
        by_pair.entry((cu, cv)).or_default().push((i, j, w.clone()));
    }
    // keys are ordered, so `cu ≤ cv`; within one colour both orientations count
    for (((cu, i), (cv, j)), w) in g.entries() {
        let Some(list) = by_pair.get(&(cu, cv)) else {
            continue;
        };
        for (k, l, x) in list {
            out.set(cu, i * h.sizes[cu] + k, cv, j * h.sizes[cv] + l, w.clone() * x.clone());
            if cu == cv && k != l {
                out.set(cu, i * h.sizes[cu] + l, cv, j * h.sizes[cv] + k, w.clone() * x.clone());
            }
        }
    }
    Ok(out)
}

/// Grows every class to `size` with isolated vertices.
pub fn pad_classes<W: Scalar>(g: &ColouredGraph<W>, size: usize) -> Result<ColouredGraph<W>> {
    if g.sizes.iter().any(|&s| s > size) {
        return Err(Error::InvalidParameter(format!("class larger than the padding size {size}")));
    }
    let mut out = ColouredGraph::new(g.sides.clone(), vec![size; g.num_colours()]);
    for (((cu, i), (cv, j)), w) in g.entries() {
        out.set(cu, i, cv, j, w.clone());
    }
    Ok(out)
}

/// Both sides of `hom_{F,|C|·n}(G°) = Σ_{c: V(F)→C} colhom_{F,c,n}(G)` for a
/// graph with uniform class size `n`.
pub fn uncolour_expand<W: Scalar>(f: &BipartiteMultigraph, g: &ColouredGraph<W>) -> Result<(W, W)> {
    let n = g.sizes.first().copied().unwrap_or(0);
    if g.sizes.iter().any(|&s| s != n) {
        return Err(Error::InvalidParameter("uncolouring needs uniform class sizes".into()));
    }
    let k = g.num_colours();
    let v = f.num_vertices();
    if (k as f64).powi(v as i32) > 1e6 {
        return Err(Error::SizeCap("colouring enumeration limited to 10^6".into()));
    }
    let flat = g.flatten_symmetric();
    let lhs = hom_count_factored(f, flat.n, flat.m, &|i, j| flat.get(i, j))?;
    let mut rhs = W::zero();
    let mut err = None;
    for_each_tuple(&vec![k; v], |c| match coloured_hom_eval(f, c, g) {
        Ok(x) => rhs = rhs.clone() + x,
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Interpolation

/// Coefficient of `t^k` in a polynomial of degree ≤ `max_deg` given by its
/// values: `p` is evaluated at `t = 0, 1, …, max_deg` and the Vandermonde
/// system is solved exactly.
pub fn degree_slice(k: usize, max_deg: usize, mut p: impl FnMut(&Rational) -> Result<Rational>) -> Result<Rational> {
    let nodes: Vec<Rational> = (0..=max_deg as u64).map(q).collect();
    let values = nodes.iter().map(&mut p).collect::<Result<Vec<_>>>()?;
    if k > max_deg {
        return Ok(Rational::zero());
    }
    let matrix: Vec<Vec<Rational>> = nodes
        .iter()
        .map(|t| {
            let mut row = Vec::with_capacity(max_deg + 1);
            let mut acc = Rational::one();
            for _ in 0..=max_deg {
                row.push(acc.clone());
                acc = &acc * t;
            }
            row
        })
        .collect();
    let coeffs = solve_linear(&matrix, &values)
        .ok_or_else(|| Error::InvalidParameter("interpolation nodes must be distinct".into()))?;
    Ok(coeffs[k].clone())
}

/// `t·G` for a coloured graph.
pub fn scale_coloured(g: &ColouredGraph, t: &Rational) -> ColouredGraph {
    g.map(|w| w * t)
}

// ---------------------------------------------------------------------------
// CFI graphs

/// Even and odd CFI graphs over a connected simple pattern `S`, coloured by
/// the vertices of `S`. Classes have their natural size `2^{deg−1}`.
#[derive(Debug, Clone)]
pub struct CfiPair {
    pub base: BipartiteMultigraph,
    pub even: ColouredGraph,
    pub odd: ColouredGraph,
}

pub const CFI_MAX_DEGREE: usize = 5;

/// Vertex `(s, X)` for every even subset `X` of the edges at `s`; an edge
/// joins `(u, X)` and `(w, Y)` iff `uw ∈ X ⟺ uw ∈ Y`, except on the first
/// edge of `S` in the odd graph, where membership must differ.
pub fn cfi_pair(s: &BipartiteMultigraph) -> Result<CfiPair> {
    if !s.is_simple() {
        return Err(Error::InvalidParameter("CFI base must be simple".into()));
    }
    if !s.is_connected() {
        return Err(Error::NotConnected);
    }
    if s.max_degree() > CFI_MAX_DEGREE {
        return Err(Error::SizeCap(format!("CFI graphs limited to maximum degree {CFI_MAX_DEGREE}")));
    }
    let edges = s.global_edges();
    let nv = s.num_vertices();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (e, &(u, w, _)) in edges.iter().enumerate() {
        incident[u].push(e);
        incident[w].push(e);
    }
    let gadgets: Vec<Vec<u32>> = incident
        .iter()
        .map(|inc| (0u32..1 << inc.len()).filter(|x| x.count_ones() % 2 == 0).collect())
        .collect();
    let sides: Vec<Side> = (0..nv).map(|v| s.side(v)).collect();
    let sizes: Vec<usize> = gadgets.iter().map(Vec::len).collect();
    let mut even = ColouredGraph::new(sides.clone(), sizes.clone());
    let mut odd = ColouredGraph::new(sides, sizes);
    for (e, &(u, w, _)) in edges.iter().enumerate() {
        let pu = incident[u].iter().position(|&x| x == e).expect("incident");
        let pw = incident[w].iter().position(|&x| x == e).expect("incident");
        for (i, &xa) in gadgets[u].iter().enumerate() {
            for (j, &xb) in gadgets[w].iter().enumerate() {
                let agree = (xa >> pu & 1) == (xb >> pw & 1);
                if agree {
                    even.set(u, i, w, j, Rational::one());
                }
                if agree != (e == 0) {
                    odd.set(u, i, w, j, Rational::one());
                }
            }
        }
    }
    Ok(CfiPair {
        base: s.clone(),
        even,
        odd,
    })
}

impl CfiPair {
    /// `2^{Δ−1}` (1 for a single vertex).
    pub fn class_bound(&self) -> usize {
        1 << self.base.max_degree().saturating_sub(1)
    }

    /// Both graphs padded to uniform classes of size [`Self::class_bound`].
    pub fn padded(&self) -> Result<(ColouredGraph, ColouredGraph)> {
        let d = self.class_bound();
        Ok((pad_classes(&self.even, d)?, pad_classes(&self.odd, d)?))
    }
}

/// Outcome of the exhaustive CFI separation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfiClaimReport {
    pub checked: usize,
    pub isomorphic_found: usize,
    pub violations: Vec<String>,
}

impl CfiClaimReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.isomorphic_found > 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "checked": self.checked,
            "isomorphic_found": self.isomorphic_found,
            "violations": self.violations,
            "holds": self.holds(),
        })
    }
}

/// Over every `S`-coloured multigraph `H` with `|E(S)|` edges on `S`-edge
/// colour pairs and no isolated vertices, checks
/// `hom(H, S_0) ≠ hom(H, S_1) ⟺ H ≅ S`.
pub fn cfi_claim_check(pair: &CfiPair, max_graphs: usize) -> Result<CfiClaimReport> {
    let s = &pair.base;
    let nv = s.num_vertices();
    let edges = s.global_edges();
    let e = edges.len();
    let mut report = CfiClaimReport {
        checked: 0,
        isomorphic_found: 0,
        violations: Vec::new(),
    };
    let mut choice = vec![0usize; e];
    loop {
        // slots per colour: (edge position, endpoint) pairs in order
        let mut slots: Vec<usize> = vec![0; nv];
        for &c in &choice {
            slots[edges[c].0] += 1;
            slots[edges[c].1] += 1;
        }
        let parts: Vec<Vec<Vec<usize>>> = slots.iter().map(|&k| set_partitions(k)).collect();
        let counts: Vec<usize> = parts.iter().map(Vec::len).collect();
        let mut err = None;
        for_each_tuple(&counts, |pick| {
            if err.is_some() {
                return;
            }
            report.checked += 1;
            if report.checked > max_graphs {
                err = Some(Error::SizeCap(format!("claim check limited to {max_graphs} graphs")));
                return;
            }
            match check_one(s, pair, &edges, &choice, &parts, pick) {
                Ok((is_s, differs)) => {
                    if is_s {
                        report.isomorphic_found += 1;
                    }
                    if is_s != differs {
                        report.violations.push(format!(
                            "edges {:?}, blocks {:?}: isomorphic={is_s}, distinguished={differs}",
                            choice, pick
                        ));
                    }
                }
                Err(x) => err = Some(x),
            }
        });
        if let Some(x) = err {
            return Err(x);
        }
        // next nondecreasing choice
        let mut k = e;
        loop {
            if k == 0 {
                return Ok(report);
            }
            k -= 1;
            if choice[k] + 1 < e {
                let nx = choice[k] + 1;
                for c in choice.iter_mut().skip(k) {
                    *c = nx;
                }
                break;
            }
        }
    }
}

fn check_one(
    s: &BipartiteMultigraph,
    pair: &CfiPair,
    edges: &[(usize, usize, u32)],
    choice: &[usize],
    parts: &[Vec<Vec<usize>>],
    pick: &[usize],
) -> Result<(bool, bool)> {
    let nv = s.num_vertices();
    let blocks: Vec<&Vec<usize>> = (0..nv).map(|c| &parts[c][pick[c]]).collect();
    let nblocks: Vec<usize> = blocks.iter().map(|b| b.iter().max().map_or(0, |x| x + 1)).collect();
    let mut a_index = BTreeMap::new();
    let mut b_index = BTreeMap::new();
    for c in 0..nv {
        for k in 0..nblocks[c] {
            match s.side(c) {
                Side::A => {
                    let l = a_index.len();
                    a_index.insert((c, k), l);
                }
                Side::B => {
                    let l = b_index.len();
                    b_index.insert((c, k), l);
                }
            }
        }
    }
    let mut h = BipartiteMultigraph::new(a_index.len(), b_index.len());
    let mut colour = vec![0usize; a_index.len() + b_index.len()];
    for (&(c, _), &l) in &a_index {
        colour[l] = c;
    }
    for (&(c, _), &l) in &b_index {
        colour[a_index.len() + l] = c;
    }
    let mut used = vec![0usize; nv];
    for &ci in choice {
        let (u, w, _) = edges[ci];
        let bu = blocks[u][used[u]];
        let bw = blocks[w][used[w]];
        used[u] += 1;
        used[w] += 1;
        h.add_edge(a_index[&(u, bu)], b_index[&(w, bw)], 1)?;
    }
    let distinct: BTreeSet<usize> = choice.iter().copied().collect();
    let is_s = nblocks.iter().all(|&b| b == 1) && distinct.len() == choice.len();
    let h0 = coloured_hom_eval(&h, &colour, &pair.even)?;
    let h1 = coloured_hom_eval(&h, &colour, &pair.odd)?;
    Ok((is_s, h0 != h1))
}

// ---------------------------------------------------------------------------
// Doubling and quotients

/// `G⁻`: the `2n × 2n` host with identity blocks on `AA` and `BB`, `G` on
/// `AB` and `Gᵀ` on `BA`. Index `(A, i) ↦ i`, `(B, i) ↦ n + i`.
pub fn bipartite_double<S: Scalar>(g: &Host<S>) -> Result<Host<S>> {
    if g.n != g.m {
        return Err(Error::NotSquare(g.n, g.m));
    }
    let n = g.n;
    Ok(Host::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, true) | (false, false) => {
            if r == c {
                S::one()
            } else {
                S::zero()
            }
        }
        (true, false) => g.get(r, c - n),
        (false, true) => g.get(c, r - n),
    }))
}

/// Both sides of `hom_{F,2n}(G⁻) = Σ_{s: V(F)→{A,B}} hom_{F⊘s,n}(G)`.
pub fn quotient_expand(f: &BipartiteMultigraph, g: &Host) -> Result<(Rational, Rational)> {
    let d = bipartite_double(g)?;
    let nv = f.num_vertices();
    if nv > 16 {
        return Err(Error::SizeCap("side enumeration limited to 16 vertices".into()));
    }
    let lhs = hom_count_factored(f, d.n, d.m, &|i, j| d.get(i, j))?;
    let mut rhs = Rational::zero();
    for mask in 0u32..1 << nv {
        let s: Vec<Side> = (0..nv).map(|v| if mask >> v & 1 == 0 { Side::A } else { Side::B }).collect();
        let (qf, _) = quotient(f, &s)?;
        rhs += hom_count_factored(&qf, g.n, g.m, &|i, j| g.get(i, j))?;
    }
    Ok((lhs, rhs))
}

/// Kronecker product `(G ⊗ X)[(i,k),(j,l)] = G[i][j]·X[k][l]`.
pub fn kronecker(g: &Host, x: &Host) -> Host {
    Host::from_fn(g.n * x.n, g.m * x.m, |r, c| g.get(r / x.n, c / x.m) * x.get(r % x.n, c % x.m))
}

// ---------------------------------------------------------------------------
// Oracles

/// An exact evaluator of a fixed polynomial in the variables of an `n × m`
/// host.
pub trait HomOracle {
    fn size(&self) -> (usize, usize);
    fn eval(&self, host: &Host) -> Result<Rational>;
}

/// `hom_{F,n,m}` by the factored brute force.
#[derive(Debug, Clone)]
pub struct BruteForceOracle {
    pub pattern: BipartiteMultigraph,
    pub n: usize,
    pub m: usize,
}

impl HomOracle for BruteForceOracle {
    fn size(&self) -> (usize, usize) {
        (self.n, self.m)
    }
    fn eval(&self, host: &Host) -> Result<Rational> {
        check_host(self, host)?;
        hom_count_factored(&self.pattern, host.n, host.m, &|i, j| host.get(i, j))
    }
}

/// `Σ αᵢ hom_{Fᵢ,n,m}` by brute force.
#[derive(Debug, Clone)]
pub struct LincombOracle {
    pub terms: Vec<(Rational, BipartiteMultigraph)>,
    pub n: usize,
    pub m: usize,
}

impl HomOracle for LincombOracle {
    fn size(&self) -> (usize, usize) {
        (self.n, self.m)
    }
    fn eval(&self, host: &Host) -> Result<Rational> {
        check_host(self, host)?;
        let mut total = Rational::zero();
        for (a, f) in &self.terms {
            total += a * hom_count_factored(f, host.n, host.m, &|i, j| host.get(i, j))?;
        }
        Ok(total)
    }
}

/// A compiled circuit evaluated on the host variables `x_{i,j}`.
#[derive(Debug, Clone)]
pub struct CircuitOracle {
    evaluator: Evaluator<Rational>,
    n: usize,
    m: usize,
}

impl CircuitOracle {
    pub fn new(c: &Circuit, n: usize, m: usize) -> Result<Self> {
        Ok(CircuitOracle {
            evaluator: Evaluator::for_host(c, n, m)?,
            n,
            m,
        })
    }
}

impl HomOracle for CircuitOracle {
    fn size(&self) -> (usize, usize) {
        (self.n, self.m)
    }
    fn eval(&self, host: &Host) -> Result<Rational> {
        check_host(self, host)?;
        Ok(self.evaluator.eval(&host.w))
    }
}

/// Counts the calls made to an inner oracle.
pub struct CountingOracle<'a> {
    inner: &'a dyn HomOracle,
    calls: Cell<usize>,
}

impl<'a> CountingOracle<'a> {
    pub fn new(inner: &'a dyn HomOracle) -> Self {
        CountingOracle {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }
}

impl HomOracle for CountingOracle<'_> {
    fn size(&self) -> (usize, usize) {
        self.inner.size()
    }
    fn eval(&self, host: &Host) -> Result<Rational> {
        self.calls.set(self.calls.get() + 1);
        self.inner.eval(host)
    }
}

fn check_host(o: &dyn HomOracle, host: &Host) -> Result<()> {
    if (host.n, host.m) != o.size() {
        return Err(Error::InvalidParameter(format!(
            "oracle expects a {:?} host, got {}×{}",
            o.size(),
            host.n,
            host.m
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Extraction pipelines

/// Sub-multisets of the edges of `f` with their binomial weights.
fn sub_multisets(f: &BipartiteMultigraph) -> Vec<(BipartiteMultigraph, u64)> {
    let edges = f.edge_list();
    let mut out = Vec::new();
    let mut keep = vec![0u32; edges.len()];
    fn binom(n: u32, k: u32) -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
    }
    fn rec(
        k: usize,
        f: &BipartiteMultigraph,
        edges: &[(usize, usize, u32)],
        keep: &mut Vec<u32>,
        weight: u64,
        out: &mut Vec<(BipartiteMultigraph, u64)>,
    ) {
        if k == edges.len() {
            let mut g = BipartiteMultigraph::new(f.a_count(), f.b_count());
            for (e, &(i, j, _)) in edges.iter().enumerate() {
                if keep[e] > 0 {
                    g.add_edge(i, j, keep[e]).expect("edge in range");
                }
            }
            out.push((g, weight));
            return;
        }
        let mult = edges[k].2;
        for c in 0..=mult {
            keep[k] = c;
            rec(k + 1, f, edges, keep, weight * binom(mult, c), out);
        }
    }
    rec(0, f, &edges, &mut keep, 1, &mut out);
    out
}

/// Number of bijections `V(q″) → V(S)` carrying the edge multiset of `q″`
/// (isolated vertices removed) onto `E(S)`, sides ignored.
fn isomorphisms_onto(q: &BipartiteMultigraph, s: &BipartiteMultigraph) -> u64 {
    let (core, _, _, _) = q.without_isolated();
    let k = s.num_vertices();
    if core.num_vertices() != k || core.num_edges() != s.num_edges() || !core.is_simple() {
        return 0;
    }
    let target: BTreeSet<(usize, usize)> = s.global_edges().iter().map(|&(u, w, _)| (u.min(w), u.max(w))).collect();
    let edges = core.global_edges();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut count = 0;
    permute(&mut perm, 0, &mut |p| {
        if edges.iter().all(|&(u, w, _)| target.contains(&(p[u].min(p[w]), p[u].max(p[w])))) {
            count += 1;
        }
    });
    count
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Precondition shared by the colourful pipelines.
fn check_target(s: &BipartiteMultigraph) -> Result<()> {
    if !s.is_simple() {
        return Err(Error::InvalidParameter("target S must be simple".into()));
    }
    if !s.is_connected() {
        return Err(Error::NotConnected);
    }
    if s.num_edges() == 0 {
        return Err(Error::InvalidParameter("target S needs an edge".into()));
    }
    Ok(())
}

struct CfiSetup {
    even: ColouredGraph,
    odd: ColouredGraph,
    delta: Rational,
    class: usize,
}

fn cfi_setup(s: &BipartiteMultigraph) -> Result<CfiSetup> {
    let pair = cfi_pair(s)?;
    let (even, odd) = pair.padded()?;
    let id: Vec<usize> = (0..s.num_vertices()).collect();
    let delta = coloured_hom_eval(s, &id, &even)? - coloured_hom_eval(s, &id, &odd)?;
    Ok(CfiSetup {
        class: pair.class_bound(),
        even,
        odd,
        delta,
    })
}

/// Host size `2^{Δ(S)−1}·|V(S)|·n` of the oracle used by [`SubgraphExtractor`].
pub fn subgraph_oracle_size(s: &BipartiteMultigraph, n: usize) -> usize {
    (1 << s.max_degree().saturating_sub(1)) * s.num_vertices() * n
}

/// Evaluates `colhom_{S,n}` with calls to an oracle for `hom_{F,K}`,
/// `K = 2^{Δ(S)−1}·|V(S)|·n`, where `S` is a connected simple subgraph of
/// `F`: the oracle is queried at `J + t·(G × S_b)°`, the `t^{|E(S)|}`
/// coefficient is interpolated, and the CFI difference is divided by an
/// enumerated normaliser.
pub struct SubgraphExtractor<'a> {
    f: BipartiteMultigraph,
    s: BipartiteMultigraph,
    n: usize,
    cfi: CfiSetup,
    normaliser: Rational,
    oracle: &'a dyn HomOracle,
}

impl<'a> SubgraphExtractor<'a> {
    pub fn new(f: &BipartiteMultigraph, s: &BipartiteMultigraph, n: usize, oracle: &'a dyn HomOracle) -> Result<Self> {
        check_target(s)?;
        let k = subgraph_oracle_size(s, n);
        if oracle.size() != (k, k) {
            return Err(Error::InvalidParameter(format!("oracle must have size {k}×{k}")));
        }
        let cfi = cfi_setup(s)?;
        let colours = s.num_vertices() as u64;
        let cls = (n * cfi.class) as u64;
        let mut normaliser = Rational::zero();
        for (sub, weight) in sub_multisets(f) {
            if sub.num_edges() != s.num_edges() {
                continue;
            }
            let isos = isomorphisms_onto(&sub, s);
            if isos == 0 {
                continue;
            }
            let iso = sub.isolated_vertices().len();
            normaliser += q(weight * isos) * qpow(colours * cls, iso) * &cfi.delta;
        }
        if normaliser.is_zero() {
            return Err(Error::ZeroNormalizer);
        }
        Ok(SubgraphExtractor {
            f: f.clone(),
            s: s.clone(),
            n,
            cfi,
            normaliser,
            oracle,
        })
    }

    pub fn normaliser(&self) -> &Rational {
        &self.normaliser
    }

    /// Oracle calls made by one [`Self::eval`].
    pub fn calls_per_eval(&self) -> usize {
        2 * (self.f.num_edges() as usize + 1)
    }

    pub fn eval(&self, g: &ColouredGraph) -> Result<Rational> {
        check_coloured_by(g, &self.s, self.n)?;
        let mut diff = Rational::zero();
        for (b, sb) in [(0, &self.cfi.even), (1, &self.cfi.odd)] {
            let x = tensor_product(g, sb)?.flatten_symmetric();
            let slice = degree_slice(self.s.num_edges() as usize, self.f.num_edges() as usize, |t| {
                let host = Host::from_fn(x.n, x.m, |i, j| Rational::one() + t * x.get(i, j));
                self.oracle.eval(&host)
            })?;
            if b == 0 {
                diff += slice;
            } else {
                diff -= slice;
            }
        }
        Ok(diff / &self.normaliser)
    }
}

/// Host size `2^{Δ(S)}·|V(S)|·n` of the oracle used by [`MinorExtractor`].
pub fn minor_oracle_size(s: &BipartiteMultigraph, n: usize) -> usize {
    2 * subgraph_oracle_size(s, n)
}

/// Evaluates `colhom_{S,n}` for a connected simple bipartite minor `S` of
/// `F` with an oracle for `hom_{F,2K}`: as [`SubgraphExtractor`], with the
/// oracle queried at `J + (t·(G × S_b)°)⁻`.
pub struct MinorExtractor<'a> {
    f: BipartiteMultigraph,
    s: BipartiteMultigraph,
    n: usize,
    cfi: CfiSetup,
    normaliser: Rational,
    oracle: &'a dyn HomOracle,
}

impl<'a> MinorExtractor<'a> {
    pub fn new(f: &BipartiteMultigraph, s: &BipartiteMultigraph, n: usize, oracle: &'a dyn HomOracle) -> Result<Self> {
        check_target(s)?;
        let k = minor_oracle_size(s, n);
        if oracle.size() != (k, k) {
            return Err(Error::InvalidParameter(format!("oracle must have size {k}×{k}")));
        }
        let nv = f.num_vertices();
        if nv > 16 {
            return Err(Error::SizeCap("side enumeration limited to 16 vertices".into()));
        }
        let cfi = cfi_setup(s)?;
        let colours = s.num_vertices() as u64;
        let cls = (n * cfi.class) as u64;
        let mut normaliser = Rational::zero();
        for (sub, weight) in sub_multisets(f) {
            for mask in 0u32..1 << nv {
                let sides: Vec<Side> = (0..nv).map(|v| if mask >> v & 1 == 0 { Side::A } else { Side::B }).collect();
                let (qf, _) = quotient(&sub, &sides)?;
                if qf.num_edges() != s.num_edges() {
                    continue;
                }
                let isos = isomorphisms_onto(&qf, s);
                if isos == 0 {
                    continue;
                }
                let iso = qf.isolated_vertices().len();
                normaliser += q(weight * isos) * qpow(colours * cls, iso) * &cfi.delta;
            }
        }
        if normaliser.is_zero() {
            return Err(Error::ZeroNormalizer);
        }
        Ok(MinorExtractor {
            f: f.clone(),
            s: s.clone(),
            n,
            cfi,
            normaliser,
            oracle,
        })
    }

    pub fn normaliser(&self) -> &Rational {
        &self.normaliser
    }

    pub fn calls_per_eval(&self) -> usize {
        2 * (self.f.num_edges() as usize + 1)
    }

    pub fn eval(&self, g: &ColouredGraph) -> Result<Rational> {
        check_coloured_by(g, &self.s, self.n)?;
        let mut diff = Rational::zero();
        for (b, sb) in [(0, &self.cfi.even), (1, &self.cfi.odd)] {
            let x = tensor_product(g, sb)?.flatten_symmetric();
            let slice = degree_slice(self.s.num_edges() as usize, self.f.num_edges() as usize, |t| {
                let d = bipartite_double(&Host::from_fn(x.n, x.m, |i, j| t * x.get(i, j)))?;
                let host = Host::from_fn(d.n, d.m, |i, j| Rational::one() + d.get(i, j));
                self.oracle.eval(&host)
            })?;
            if b == 0 {
                diff += slice;
            } else {
                diff -= slice;
            }
        }
        Ok(diff / &self.normaliser)
    }
}

/// Evaluates `hom_{F_ℓ,n}` from an oracle for `Σ αᵢ hom_{Fᵢ,n·N}`: with a
/// basis `x_j` of `N × N` hosts and `β` solving `Σ_j β_j hom_{Fᵢ,N}(x_j) =
/// δ_{iℓ}`, the value is `(1/α_ℓ) Σ_j β_j p(G ⊗ x_j)`.
pub struct LincombExtractor<'a> {
    n: usize,
    points: Vec<Host>,
    beta: Vec<Rational>,
    alpha: Rational,
    oracle: &'a dyn HomOracle,
}

impl<'a> LincombExtractor<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        patterns: &[BipartiteMultigraph],
        alphas: &[Rational],
        ell: usize,
        n: usize,
        size: usize,
        seed: u64,
        oracle: &'a dyn HomOracle,
    ) -> Result<Self> {
        if patterns.len() != alphas.len() || ell >= patterns.len() {
            return Err(Error::InvalidParameter("patterns, coefficients and index disagree".into()));
        }
        if alphas[ell].is_zero() {
            return Err(Error::ZeroCoefficient);
        }
        if oracle.size() != (n * size, n * size) {
            return Err(Error::InvalidParameter(format!("oracle must have size {}", n * size)));
        }
        let cert = find_hom_basis(patterns, size, seed)?;
        let mut e = vec![Rational::zero(); patterns.len()];
        e[ell] = Rational::one();
        let beta = solve_linear(&cert.matrix, &e).ok_or(Error::BasisNotFound(0))?;
        Ok(LincombExtractor {
            n,
            points: cert.points,
            beta,
            alpha: alphas[ell].clone(),
            oracle,
        })
    }

    pub fn calls_per_eval(&self) -> usize {
        self.points.len()
    }

    pub fn eval(&self, g: &Host) -> Result<Rational> {
        if g.n != self.n || g.m != self.n {
            return Err(Error::InvalidParameter(format!("host must be {0}×{0}", self.n)));
        }
        let mut total = Rational::zero();
        for (b, x) in self.beta.iter().zip(&self.points) {
            if b.is_zero() {
                continue;
            }
            total += b * self.oracle.eval(&kronecker(g, x))?;
        }
        Ok(total / &self.alpha)
    }
}

/// Random `S`-coloured graph with classes of size `n`, weights on `S`-edge
/// colour pairs only.
pub fn random_coloured(s: &BipartiteMultigraph, n: usize, rng: &mut crate::exactnum::Rng64) -> ColouredGraph {
    let mut g = ColouredGraph::for_pattern(s, n);
    for (u, w, _) in s.global_edges() {
        for i in 0..n {
            for j in 0..n {
                g.set(u, i, w, j, crate::exactnum::random_rational(rng));
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, random_rational, rng_from_seed};
    use crate::oracle::{colhom_eval, hom_count};
    use crate::pattern::{find_minor, make_cycle};

    fn ones(size: usize) -> Vec<Vec<Rational>> {
        vec![vec![int(1); size]; size]
    }

    #[test]
    fn clique_gadget_values() {
        let one = |_: usize, _: usize| int(1);
        let g1 = clique_grid_gadget(1, &one).unwrap();
        assert_eq!(colhom_eval(&g1.pattern, &g1.graph).unwrap(), int(2));
        let g2 = clique_grid_gadget(2, &one).unwrap();
        assert_eq!(colhom_eval(&g2.pattern, &g2.graph).unwrap(), int(6));
        let probe = |u: usize, v: usize| if (u, v) == (0, 1) { int(0) } else { int(1) };
        let g3 = clique_grid_gadget(2, &probe).unwrap();
        assert_eq!(colhom_eval(&g3.pattern, &g3.graph).unwrap(), int(5));
        assert_eq!(clique_poly(2, &probe), int(5));
    }

    #[test]
    fn clique_gadget_random() {
        let mut rng = rng_from_seed(11);
        for _ in 0..3 {
            let vals: Vec<Vec<Rational>> = (0..4).map(|_| (0..4).map(|_| random_rational(&mut rng)).collect()).collect();
            let y = |u: usize, v: usize| vals[u][v].clone();
            let g = clique_grid_gadget(2, &y).unwrap();
            assert_eq!(colhom_eval(&g.pattern, &g.graph).unwrap(), clique_poly(2, &y));
        }
    }

    #[test]
    fn btree_gadget_values() {
        let g = btree_vp_gadget(1, &[int(3)], &[vec![int(5)]]).unwrap();
        assert_eq!(colhom_eval(&g.pattern, &g.graph).unwrap(), int(1));
        let xs: Vec<i128> = vec![1; 64];
        let ys: Vec<Vec<i128>> = vec![vec![1; 64]; 64];
        let g = btree_vp_gadget(2, &xs, &ys).unwrap();
        assert_eq!(colhom_eval(&g.pattern, &g.graph).unwrap(), 64i128.pow(3));
        let mut xs2 = xs.clone();
        xs2[0] = 2;
        let g = btree_vp_gadget(2, &xs2, &ys).unwrap();
        let v = colhom_eval(&g.pattern, &g.graph).unwrap();
        assert_eq!(v, btree_poly(2, &xs2, &ys).unwrap());
        assert_eq!(v, 65 * 64 * 64);
    }

    #[test]
    fn path_gadget_values() {
        let g = path_vbp_gadget(1, &[int(3)], &ones(1)).unwrap();
        assert_eq!(colhom_eval(&g.pattern, &g.graph).unwrap(), int(9));
        let g = path_vbp_gadget(2, &vec![int(1); 4], &ones(4)).unwrap();
        // walks of length 1 with distinct endpoints in [4]
        assert_eq!(colhom_eval(&g.pattern, &g.graph).unwrap(), int(12));
        let g = path_vbp_gadget(2, &vec![int(0); 4], &ones(4)).unwrap();
        assert_eq!(colhom_eval(&g.pattern, &g.graph).unwrap(), int(0));
        let mut rng = rng_from_seed(3);
        for m in 1..=2 {
            let size = m * m;
            let x: Vec<Rational> = (0..size).map(|_| random_rational(&mut rng)).collect();
            let mut y = ones(size);
            for u in 0..size {
                for v in u..size {
                    y[u][v] = random_rational(&mut rng);
                }
            }
            let g = path_vbp_gadget(m, &x, &y).unwrap();
            assert_eq!(colhom_eval(&g.pattern, &g.graph).unwrap(), path_poly(m, &x, &y).unwrap());
        }
    }

    #[test]
    fn minor_gadget_identity() {
        let mut rng = rng_from_seed(5);
        let cases = [(make_path(2).unwrap(), make_path(3).unwrap()), (make_cycle(2).unwrap(), make_grid(2, 3).unwrap())];
        for (s, f) in cases {
            let branch = find_minor(&s, &f).unwrap().unwrap();
            for _ in 0..2 {
                let y = random_coloured(&s, 2, &mut rng);
                let g = minor_gadget(&s, &f, &branch, 2, &y).unwrap();
                assert_eq!(colhom_eval(&f, &g).unwrap(), colhom_eval(&s, &y).unwrap());
            }
        }
    }

    #[test]
    fn tensor_product_multiplies() {
        let mut rng = rng_from_seed(8);
        let f = make_path(3).unwrap();
        let g = random_coloured(&f, 2, &mut rng);
        let h = random_coloured(&f, 2, &mut rng);
        let gh = tensor_product(&g, &h).unwrap();
        assert_eq!(
            colhom_eval(&f, &gh).unwrap(),
            colhom_eval(&f, &g).unwrap() * colhom_eval(&f, &h).unwrap()
        );
        let mut a = ColouredGraph::new(vec![Side::A, Side::B], vec![1, 1]);
        a.set(0, 0, 1, 0, int(2));
        let mut b = a.clone();
        b.set(0, 0, 1, 0, int(3));
        assert_eq!(tensor_product(&a, &b).unwrap().get(0, 0, 1, 0), int(6));
        let other = ColouredGraph::<Rational>::new(vec![Side::A], vec![1]);
        assert!(matches!(tensor_product(&a, &other), Err(Error::ColourMismatch(_))));
    }

    #[test]
    fn uncolour_identity() {
        let mut rng = rng_from_seed(9);
        for f in [make_path(2).unwrap(), make_path(3).unwrap()] {
            let mut g = ColouredGraph::for_pattern(&f, 1);
            for u in 0..f.num_vertices() {
                for w in 0..f.num_vertices() {
                    g.set(u, 0, w, 0, random_rational(&mut rng));
                }
            }
            let (l, r) = uncolour_expand(&f, &g).unwrap();
            assert_eq!(l, r);
        }
    }

    #[test]
    fn degree_slice_examples() {
        // 3 + 5t + 7t²
        let p = |t: &Rational| Ok(int(3) + int(5) * t + int(7) * t * t);
        assert_eq!(degree_slice(1, 4, p).unwrap(), int(5));
        assert_eq!(degree_slice(3, 4, p).unwrap(), int(0));
        assert_eq!(degree_slice(9, 4, p).unwrap(), int(0));
    }

    #[test]
    fn cfi_examples() {
        let p2 = make_path(2).unwrap();
        let pair = cfi_pair(&p2).unwrap();
        let id = [0, 1];
        assert_eq!(coloured_hom_eval(&p2, &id, &pair.even).unwrap(), int(1));
        assert_eq!(coloured_hom_eval(&p2, &id, &pair.odd).unwrap(), int(0));
        let p3 = make_path(3).unwrap();
        let pair = cfi_pair(&p3).unwrap();
        let id = [0, 1, 2];
        assert_ne!(
            coloured_hom_eval(&p3, &id, &pair.even).unwrap(),
            coloured_hom_eval(&p3, &id, &pair.odd).unwrap()
        );
        let mut two = BipartiteMultigraph::new(2, 2);
        two.add_edge(0, 0, 1).unwrap();
        two.add_edge(1, 1, 1).unwrap();
        assert!(matches!(cfi_pair(&two), Err(Error::NotConnected)));
    }

    #[test]
    fn cfi_claim_small() {
        for s in [make_path(2).unwrap(), make_path(3).unwrap(), make_path(4).unwrap(), make_cycle(2).unwrap()] {
            let r = cfi_claim_check(&cfi_pair(&s).unwrap(), 1_000_000).unwrap();
            assert!(r.holds(), "{:?}", r.violations);
        }
    }

    #[test]
    fn doubling_identity() {
        let p2 = make_path(2).unwrap();
        let g = Host::from_fn(1, 1, |_, _| int(7));
        let (l, r) = quotient_expand(&p2, &g).unwrap();
        assert_eq!(l, int(16));
        assert_eq!(r, int(16));
        let mut rng = rng_from_seed(1);
        let g = Host::random(2, 2, &mut rng);
        let (l, r) = quotient_expand(&make_path(3).unwrap(), &g).unwrap();
        assert_eq!(l, r);
        assert!(matches!(bipartite_double(&Host::<Rational>::zeros(1, 2)), Err(Error::NotSquare(1, 2))));
    }

    #[test]
    fn kronecker_multiplies_hom() {
        let mut rng = rng_from_seed(4);
        let f = make_path(3).unwrap();
        let g = Host::random(2, 2, &mut rng);
        let x = Host::random(2, 2, &mut rng);
        assert_eq!(
            hom_count(&f, &kronecker(&g, &x)).unwrap(),
            hom_count(&f, &g).unwrap() * hom_count(&f, &x).unwrap()
        );
    }

    #[test]
    fn subgraph_extraction() {
        let mut rng = rng_from_seed(21);
        let p2 = make_path(2).unwrap();
        let p3 = make_path(3).unwrap();
        let mut p3d = BipartiteMultigraph::new(2, 1);
        p3d.add_edge(0, 0, 1).unwrap();
        p3d.add_edge(1, 0, 2).unwrap();
        for f in [p2.clone(), p3, p3d] {
            let k = subgraph_oracle_size(&p2, 1);
            let oracle = BruteForceOracle { pattern: f.clone(), n: k, m: k };
            let counting = CountingOracle::new(&oracle);
            let ex = SubgraphExtractor::new(&f, &p2, 1, &counting).unwrap();
            for _ in 0..3 {
                let g = random_coloured(&p2, 1, &mut rng);
                assert_eq!(ex.eval(&g).unwrap(), colhom_eval(&p2, &g).unwrap());
            }
            assert_eq!(counting.calls(), 3 * ex.calls_per_eval());
        }
    }

    #[test]
    fn minor_extraction_path() {
        let mut rng = rng_from_seed(22);
        let p2 = make_path(2).unwrap();
        let p3 = make_path(3).unwrap();
        let k = minor_oracle_size(&p2, 1);
        let oracle = BruteForceOracle { pattern: p3.clone(), n: k, m: k };
        let ex = MinorExtractor::new(&p3, &p2, 1, &oracle).unwrap();
        for _ in 0..3 {
            let g = random_coloured(&p2, 1, &mut rng);
            assert_eq!(ex.eval(&g).unwrap(), colhom_eval(&p2, &g).unwrap());
        }
    }

    #[test]
    fn lincomb_extraction() {
        let mut rng = rng_from_seed(23);
        let p2 = make_path(2).unwrap();
        let p3 = make_path(3).unwrap();
        let oracle = LincombOracle {
            terms: vec![(int(1), p2.clone()), (int(2), p3.clone())],
            n: 6,
            m: 6,
        };
        let pats = [p2.clone(), p3.clone()];
        let alphas = [int(1), int(2)];
        for (ell, f) in pats.iter().enumerate() {
            let ex = LincombExtractor::new(&pats, &alphas, ell, 2, 3, 7, &oracle).unwrap();
            for _ in 0..3 {
                let g = Host::random(2, 2, &mut rng);
                assert_eq!(ex.eval(&g).unwrap(), hom_count(f, &g).unwrap());
            }
        }
        assert!(matches!(
            LincombExtractor::new(&pats, &[int(1), int(0)], 1, 2, 3, 7, &oracle),
            Err(Error::ZeroCoefficient)
        ));
    }
}
