//! Bipartite multigraphs with a fixed bipartition, generators, isomorphism,
//! minors, quotients and the labelled-pattern algebra.
//!
//! Vertices are numbered globally: `A = 0..a`, `B = a..a+b`. Edges are
//! stored as `(a_index, b_index) -> multiplicity` with side-local indices.
//! Serialized forms use 1-based indices.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Default per-side cap for [`are_isomorphic`].
pub const ISO_SIDE_CAP: usize = 10;
/// Default cap on `‖F‖` for [`find_minor`].
pub const MINOR_NORM_CAP: usize = 24;
const MINOR_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteMultigraph {
    a: usize,
    b: usize,
    edges: BTreeMap<(usize, usize), u32>,
}

impl BipartiteMultigraph {
    pub fn new(a: usize, b: usize) -> Self {
        BipartiteMultigraph {
            a,
            b,
            edges: BTreeMap::new(),
        }
    }

    /// Builds a graph from `(a_index, b_index, multiplicity)` triples;
    /// repeated pairs add up.
    pub fn from_edges(a: usize, b: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut g = Self::new(a, b);
        for &(i, j, k) in edges {
            g.add_edge(i, j, k)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, mult: u32) -> Result<()> {
        if i >= self.a || j >= self.b {
            return Err(Error::IndexOutOfRange(format!(
                "edge ({i},{j}) in a {}x{} graph",
                self.a, self.b
            )));
        }
        if mult == 0 {
            return Err(Error::InvalidParameter("edge multiplicity must be ≥ 1".into()));
        }
        *self.edges.entry((i, j)).or_insert(0) += mult;
        Ok(())
    }

    pub fn a_count(&self) -> usize {
        self.a
    }

    pub fn b_count(&self) -> usize {
        self.b
    }

    pub fn num_vertices(&self) -> usize {
        self.a + self.b
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), u32> {
        &self.edges
    }

    pub fn edge_list(&self) -> Vec<(usize, usize, u32)> {
        self.edges.iter().map(|(&(i, j), &k)| (i, j, k)).collect()
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u32 {
        self.edges.get(&(i, j)).copied().unwrap_or(0)
    }

    /// `|E(F)|` counted with multiplicity.
    pub fn num_edges(&self) -> u32 {
        self.edges.values().sum()
    }

    /// Number of distinct adjacent pairs.
    pub fn num_edge_slots(&self) -> usize {
        self.edges.len()
    }

    /// `‖F‖ = |V(F)| + |E(F)|`.
    pub fn norm(&self) -> usize {
        self.num_vertices() + self.num_edges() as usize
    }

    pub fn is_simple(&self) -> bool {
        self.edges.values().all(|&k| k == 1)
    }

    pub fn side(&self, v: usize) -> Side {
        if v < self.a {
            Side::A
        } else {
            Side::B
        }
    }

    /// Global index of the B-vertex `j`.
    pub fn b_vertex(&self, j: usize) -> usize {
        self.a + j
    }

    /// Side-local index of a global vertex.
    pub fn local(&self, v: usize) -> usize {
        if v < self.a {
            v
        } else {
            v - self.a
        }
    }

    /// Global edge endpoints `(u, v, mult)` with `u ∈ A`.
    pub fn global_edges(&self) -> Vec<(usize, usize, u32)> {
        self.edges
            .iter()
            .map(|(&(i, j), &k)| (i, self.a + j, k))
            .collect()
    }

    /// Neighbour lists of the underlying simple graph (global indices).
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for (&(i, j), _) in &self.edges {
            adj[i].push(self.a + j);
            adj[self.a + j].push(i);
        }
        adj
    }

    /// Adjacency bitmasks of the underlying simple graph (needs ≤ 64 vertices).
    pub fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.num_vertices() <= 64);
        let mut adj = vec![0u64; self.num_vertices()];
        for (&(i, j), _) in &self.edges {
            adj[i] |= 1 << (self.a + j);
            adj[self.a + j] |= 1 << i;
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbours()[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbours().iter().map(|n| n.len()).max().unwrap_or(0)
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        self.neighbours()
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_empty())
            .map(|(v, _)| v)
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let adj = self.neighbours();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Induced subgraph on the given global vertices (kept in increasing
    /// order); returns the graph and the old→new global index map.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> (Self, BTreeMap<usize, usize>) {
        let a_keep: Vec<usize> = keep.iter().copied().filter(|&v| v < self.a).collect();
        let b_keep: Vec<usize> = keep.iter().copied().filter(|&v| v >= self.a).collect();
        let mut map = BTreeMap::new();
        for (k, &v) in a_keep.iter().enumerate() {
            map.insert(v, k);
        }
        for (k, &v) in b_keep.iter().enumerate() {
            map.insert(v, a_keep.len() + k);
        }
        let mut g = Self::new(a_keep.len(), b_keep.len());
        for (&(i, j), &k) in &self.edges {
            if let (Some(&u), Some(&w)) = (map.get(&i), map.get(&(self.a + j))) {
                g.edges.insert((u, w - a_keep.len()), k);
            }
        }
        (g, map)
    }

    /// Removes isolated vertices; also returns the number removed per side.
    pub fn without_isolated(&self) -> (Self, BTreeMap<usize, usize>, usize, usize) {
        let iso: BTreeSet<usize> = self.isolated_vertices().into_iter().collect();
        let keep: BTreeSet<usize> = (0..self.num_vertices()).filter(|v| !iso.contains(v)).collect();
        let iso_a = iso.iter().filter(|&&v| v < self.a).count();
        let iso_b = iso.len() - iso_a;
        let (g, map) = self.induced(&keep);
        (g, map, iso_a, iso_b)
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let mut g = Self::new(self.a + other.a, self.b + other.b);
        g.edges = self.edges.clone();
        for (&(i, j), &k) in &other.edges {
            g.edges.insert((self.a + i, self.b + j), k);
        }
        g
    }

    /// The same graph with sides exchanged.
    pub fn transposed(&self) -> Self {
        let mut g = Self::new(self.b, self.a);
        for (&(i, j), &k) in &self.edges {
            g.edges.insert((j, i), k);
        }
        g
    }

    /// Relabels A by `pa` and B by `pb` (new index of old vertex).
    pub fn permuted(&self, pa: &[usize], pb: &[usize]) -> Self {
        let mut g = Self::new(self.a, self.b);
        for (&(i, j), &k) in &self.edges {
            g.edges.insert((pa[i], pb[j]), k);
        }
        g
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": self.a,
            "b": self.b,
            "edges": self.edges.iter().map(|(&(i, j), &k)| json!([i + 1, j + 1, k])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let a = json_usize(v, "a")?;
        let b = json_usize(v, "b")?;
        let mut g = Self::new(a, b);
        if let Some(edges) = v.get("edges") {
            let edges = edges
                .as_array()
                .ok_or_else(|| Error::ParseError("`edges` must be an array".into()))?;
            for e in edges {
                let t = e
                    .as_array()
                    .filter(|t| t.len() == 3 || t.len() == 2)
                    .ok_or_else(|| Error::ParseError("edge must be [a, b, mult]".into()))?;
                let i = one_based(&t[0])?;
                let j = one_based(&t[1])?;
                let k = if t.len() == 3 {
                    t[2].as_u64()
                        .ok_or_else(|| Error::ParseError("bad multiplicity".into()))? as u32
                } else {
                    1
                };
                g.add_edge(i, j, k)?;
            }
        }
        Ok(g)
    }
}

pub(crate) fn json_usize(v: &Value, key: &str) -> Result<usize> {
    v.get(key)
        .and_then(|x| x.as_u64())
        .map(|x| x as usize)
        .ok_or_else(|| Error::ParseError(format!("missing or bad `{key}`")))
}

pub(crate) fn one_based(v: &Value) -> Result<usize> {
    match v.as_u64() {
        Some(k) if k >= 1 => Ok(k as usize - 1),
        _ => Err(Error::ParseError(format!("expected 1-based index, got {v}"))),
    }
}

/// Path on `v` vertices alternating A, B, starting in A.
pub fn make_path(v: usize) -> Result<BipartiteMultigraph> {
    if v < 1 {
        return Err(Error::InvalidParameter("path needs v ≥ 1".into()));
    }
    let a = v.div_ceil(2);
    let mut g = BipartiteMultigraph::new(a, v / 2);
    for k in 0..v - 1 {
        let (i, j) = if k % 2 == 0 { (k / 2, k / 2) } else { ((k + 1) / 2, k / 2) };
        g.add_edge(i, j, 1)?;
    }
    Ok(g)
}

/// Even cycle on `2k` vertices, `k ≥ 2`.
pub fn make_cycle(k: usize) -> Result<BipartiteMultigraph> {
    if k < 2 {
        return Err(Error::InvalidParameter("cycle needs k ≥ 2".into()));
    }
    let mut g = BipartiteMultigraph::new(k, k);
    for i in 0..k {
        g.add_edge(i, i, 1)?;
        g.add_edge((i + 1) % k, i, 1)?;
    }
    Ok(g)
}

/// Grid with `(i, j) ∈ A` iff `i + j` is even. Returns the graph; use
/// [`grid_vertex`] for the position→vertex map.
pub fn make_grid(rows: usize, cols: usize) -> Result<BipartiteMultigraph> {
    if rows < 1 || cols < 1 {
        return Err(Error::InvalidParameter("grid needs rows, cols ≥ 1".into()));
    }
    let pos = grid_vertex(rows, cols);
    let na = (rows * cols).div_ceil(2);
    let mut g = BipartiteMultigraph::new(na, rows * cols - na);
    let loc = |v: usize| if v < na { v } else { v - na };
    for i in 0..rows {
        for j in 0..cols {
            let here = pos[i * cols + j];
            for (di, dj) in [(0, 1), (1, 0)] {
                let (ni, nj) = (i + di, j + dj);
                if ni < rows && nj < cols {
                    let there = pos[ni * cols + nj];
                    let (u, w) = if (i + j) % 2 == 0 { (here, there) } else { (there, here) };
                    g.add_edge(loc(u), loc(w), 1)?;
                }
            }
        }
    }
    Ok(g)
}

/// Global vertex of grid cell `(i, j)` at position `i * cols + j`.
pub fn grid_vertex(rows: usize, cols: usize) -> Vec<usize> {
    let na = (rows * cols).div_ceil(2);
    let (mut ka, mut kb) = (0, 0);
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            if (i + j) % 2 == 0 {
                out.push(ka);
                ka += 1;
            } else {
                out.push(na + kb);
                kb += 1;
            }
        }
    }
    out
}

/// Heap layout of the perfect binary tree of height `floor(log2 n)`:
/// entry `k - 1` is the global vertex of heap node `k` (children `2k`,
/// `2k + 1`, left then right). Levels alternate A/B from the root in A.
pub fn binary_tree_layout(n: usize) -> Result<(BipartiteMultigraph, Vec<usize>)> {
    if n < 1 {
        return Err(Error::InvalidParameter("tree needs n ≥ 1".into()));
    }
    let h = usize::BITS - 1 - n.leading_zeros();
    let total = (1usize << (h + 1)) - 1;
    let level = |k: usize| (usize::BITS - 1 - k.leading_zeros()) as usize;
    let na = (1..=total).filter(|&k| level(k) % 2 == 0).count();
    let (mut ka, mut kb) = (0, 0);
    let mut pos = Vec::with_capacity(total);
    for k in 1..=total {
        if level(k) % 2 == 0 {
            pos.push(ka);
            ka += 1;
        } else {
            pos.push(na + kb);
            kb += 1;
        }
    }
    let mut g = BipartiteMultigraph::new(na, total - na);
    for k in 2..=total {
        let (p, c) = (pos[k / 2 - 1], pos[k - 1]);
        let (u, w) = if p < na { (p, c - na) } else { (c, p - na) };
        g.add_edge(u, w, 1)?;
    }
    Ok((g, pos))
}

/// Largest perfect binary tree with at most `n` leaves.
pub fn make_complete_binary_tree(n: usize) -> Result<BipartiteMultigraph> {
    Ok(binary_tree_layout(n)?.0)
}

pub fn make_complete_bipartite(a: usize, b: usize) -> BipartiteMultigraph {
    let mut g = BipartiteMultigraph::new(a, b);
    for i in 0..a {
        for j in 0..b {
            g.edges.insert((i, j), 1);
        }
    }
    g
}

/// Star with its centre in A and `k` leaves in B.
pub fn make_star(k: usize) -> BipartiteMultigraph {
    make_complete_bipartite(1, k)
}

fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Canonical form under independent relabelling of A and B: the
/// lexicographically least sorted list of B-columns over all A-orders.
/// Exponential in `|A|`; meant for enumeration of small patterns.
pub fn canonical_form(g: &BipartiteMultigraph) -> (usize, usize, Vec<Vec<u32>>) {
    let (a, b) = (g.a, g.b);
    let mut best: Option<Vec<Vec<u32>>> = None;
    let cols: Vec<Vec<u32>> = (0..b)
        .map(|j| (0..a).map(|i| g.multiplicity(i, j)).collect())
        .collect();
    for_each_permutation(a, &mut |p: &[usize]| {
        let mut cs: Vec<Vec<u32>> = cols
            .iter()
            .map(|c| {
                let mut v = vec![0; a];
                for i in 0..a {
                    v[p[i]] = c[i];
                }
                v
            })
            .collect();
        cs.sort();
        if best.as_ref().is_none_or(|b| cs < *b) {
            best = Some(cs);
        }
    });
    (a, b, best.unwrap_or_default())
}

/// Isomorphism preserving the bipartition and edge multiplicities.
pub fn are_isomorphic(f: &BipartiteMultigraph, g: &BipartiteMultigraph) -> Result<bool> {
    are_isomorphic_with_cap(f, g, ISO_SIDE_CAP)
}

pub fn are_isomorphic_with_cap(
    f: &BipartiteMultigraph,
    g: &BipartiteMultigraph,
    cap: usize,
) -> Result<bool> {
    for h in [f, g] {
        if h.a > cap || h.b > cap {
            return Err(Error::SizeCap(format!(
                "isomorphism test limited to {cap} vertices per side"
            )));
        }
    }
    if f.a != g.a || f.b != g.b || f.num_edges() != g.num_edges() {
        return Ok(false);
    }
    let mut fm: Vec<u32> = f.edges.values().copied().collect();
    let mut gm: Vec<u32> = g.edges.values().copied().collect();
    fm.sort();
    gm.sort();
    if fm != gm {
        return Ok(false);
    }
    let row_sig = |h: &BipartiteMultigraph, i: usize| {
        let mut r: Vec<u32> = (0..h.b).map(|j| h.multiplicity(i, j)).filter(|&k| k > 0).collect();
        r.sort();
        r
    };
    let col_sig = |h: &BipartiteMultigraph, j: usize| {
        let mut c: Vec<u32> = (0..h.a).map(|i| h.multiplicity(i, j)).filter(|&k| k > 0).collect();
        c.sort();
        c
    };
    let mut fr: Vec<_> = (0..f.a).map(|i| row_sig(f, i)).collect();
    let mut gr: Vec<_> = (0..g.a).map(|i| row_sig(g, i)).collect();
    let (fr_unsorted, gr_unsorted) = (fr.clone(), gr.clone());
    fr.sort();
    gr.sort();
    let mut fc: Vec<_> = (0..f.b).map(|j| col_sig(f, j)).collect();
    let mut gc: Vec<_> = (0..g.b).map(|j| col_sig(g, j)).collect();
    fc.sort();
    gc.sort();
    if fr != gr || fc != gc {
        return Ok(false);
    }
    // Map A-vertices of f to A-vertices of g one at a time; after each step
    // the multiset of partial B-columns must agree.
    let mut image = vec![usize::MAX; f.a];
    let mut used = vec![false; g.a];
    fn partial_cols(h: &BipartiteMultigraph, rows: &[usize]) -> Vec<Vec<u32>> {
        let mut cs: Vec<Vec<u32>> = (0..h.b)
            .map(|j| rows.iter().map(|&i| h.multiplicity(i, j)).collect())
            .collect();
        cs.sort();
        cs
    }
    fn rec(
        k: usize,
        f: &BipartiteMultigraph,
        g: &BipartiteMultigraph,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        fr: &[Vec<u32>],
        gr: &[Vec<u32>],
    ) -> bool {
        if k == f.a {
            return true;
        }
        for t in 0..g.a {
            if used[t] || fr[k] != gr[t] {
                continue;
            }
            image[k] = t;
            used[t] = true;
            let frows: Vec<usize> = (0..=k).collect();
            let grows: Vec<usize> = image[..=k].to_vec();
            if partial_cols(f, &frows) == partial_cols(g, &grows)
                && rec(k + 1, f, g, image, used, fr, gr)
            {
                return true;
            }
            used[t] = false;
        }
        false
    }
    Ok(rec(0, f, g, &mut image, &mut used, &fr_unsorted, &gr_unsorted))
}

/// All bipartite multigraphs with `a + b ≤ max_vertices`, multiplicities
/// `≤ max_mult` and `Σ mult ≤ max_edges`, one per isomorphism class.
pub fn enumerate_patterns(
    max_vertices: usize,
    max_mult: u32,
    max_edges: u32,
    allow_isolated: bool,
) -> Vec<BipartiteMultigraph> {
    let mut out = Vec::new();
    for total in 1..=max_vertices {
        for a in 0..=total {
            let b = total - a;
            let slots = a * b;
            let mut seen = HashSet::new();
            let mut entries = vec![0u32; slots];
            loop {
                let sum: u32 = entries.iter().sum();
                if sum <= max_edges {
                    let mut g = BipartiteMultigraph::new(a, b);
                    for (s, &k) in entries.iter().enumerate() {
                        if k > 0 {
                            g.edges.insert((s / b.max(1), s % b.max(1)), k);
                        }
                    }
                    if (allow_isolated || g.isolated_vertices().is_empty())
                        && seen.insert(canonical_form(&g))
                    {
                        out.push(g);
                    }
                }
                // odometer increment
                let mut pos = 0;
                loop {
                    if pos == slots {
                        break;
                    }
                    entries[pos] += 1;
                    if entries[pos] > max_mult {
                        entries[pos] = 0;
                        pos += 1;
                    } else {
                        break;
                    }
                }
                if pos == slots {
                    break;
                }
            }
        }
    }
    out
}

/// Branch sets witnessing a minor `S ⪯ F`: `sets[i]` is the branch set of
/// the global S-vertex `i`; `remainder` is `B_0`; `edge_witness` maps each
/// S-edge (global endpoints) to one F-edge joining the two branch sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSets {
    pub sets: Vec<Vec<usize>>,
    pub remainder: Vec<usize>,
    pub edge_witness: BTreeMap<(usize, usize), (usize, usize)>,
}

impl BranchSets {
    /// Checks the branch-set conditions for `S` in `F`.
    pub fn verify(&self, s: &BipartiteMultigraph, f: &BipartiteMultigraph) -> bool {
        let nf = f.num_vertices();
        if self.sets.len() != s.num_vertices() {
            return false;
        }
        let mut owner = vec![usize::MAX; nf];
        for (i, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return false;
            }
            for &v in set {
                if v >= nf || owner[v] != usize::MAX {
                    return false;
                }
                owner[v] = i;
            }
        }
        for &v in &self.remainder {
            if v >= nf || owner[v] != usize::MAX {
                return false;
            }
            owner[v] = usize::MAX - 1;
        }
        if owner.iter().any(|&o| o == usize::MAX) {
            return false;
        }
        let adj = f.neighbours();
        for set in &self.sets {
            if !connected_within(&adj, set) {
                return false;
            }
        }
        for (u, w, _) in s.global_edges() {
            match self.edge_witness.get(&(u, w)) {
                Some(&(x, y)) => {
                    if x >= nf || y >= nf || owner[x] != u || owner[y] != w || !adj[x].contains(&y) {
                        return false;
                    }
                }
                None => return false,
            }
        }
        true
    }
}

fn connected_within(adj: &[Vec<usize>], set: &[usize]) -> bool {
    let Some(&start) = set.first() else {
        return false;
    };
    let members: BTreeSet<usize> = set.iter().copied().collect();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if members.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == members.len()
}

/// Exhaustive branch-set search for the simple graph `S` as a minor of the
/// underlying simple graph of `F`.
pub fn find_minor(s: &BipartiteMultigraph, f: &BipartiteMultigraph) -> Result<Option<BranchSets>> {
    if !s.is_simple() {
        return Err(Error::InvalidParameter("minor S must be simple".into()));
    }
    if f.norm() > MINOR_NORM_CAP {
        return Err(Error::SizeCap(format!(
            "minor search limited to ‖F‖ ≤ {MINOR_NORM_CAP}"
        )));
    }
    let k = s.num_vertices();
    let nf = f.num_vertices();
    if k > nf {
        return Ok(None);
    }
    let adj = f.neighbours();
    let s_edges: Vec<(usize, usize)> = s.global_edges().into_iter().map(|(u, w, _)| (u, w)).collect();
    // owner[v] = 0 for the remainder, i + 1 for branch set i
    let mut owner = vec![0usize; nf];
    let mut counts = vec![0usize; k + 1];
    let mut budget = MINOR_NODE_BUDGET;

    fn complete(
        owner: &[usize],
        k: usize,
        adj: &[Vec<usize>],
        s_edges: &[(usize, usize)],
    ) -> Option<BranchSets> {
        let mut sets = vec![Vec::new(); k];
        let mut remainder = Vec::new();
        for (v, &o) in owner.iter().enumerate() {
            if o == 0 {
                remainder.push(v);
            } else {
                sets[o - 1].push(v);
            }
        }
        if sets.iter().any(|s| !connected_within(adj, s)) {
            return None;
        }
        let mut witness = BTreeMap::new();
        for &(u, w) in s_edges {
            let found = sets[u]
                .iter()
                .flat_map(|&x| adj[x].iter().map(move |&y| (x, y)))
                .find(|&(_, y)| owner[y] == w + 1)?;
            witness.insert((u, w), found);
        }
        Some(BranchSets {
            sets,
            remainder,
            edge_witness: witness,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        v: usize,
        owner: &mut Vec<usize>,
        counts: &mut Vec<usize>,
        k: usize,
        adj: &[Vec<usize>],
        s_edges: &[(usize, usize)],
        budget: &mut u64,
    ) -> Result<Option<BranchSets>> {
        if *budget == 0 {
            return Err(Error::SizeCap("minor search node budget exhausted".into()));
        }
        *budget -= 1;
        let nf = owner.len();
        let empty = counts[1..].iter().filter(|&&c| c == 0).count();
        if empty > nf - v {
            return Ok(None);
        }
        if v == nf {
            return Ok(complete(owner, k, adj, s_edges));
        }
        for o in 0..=k {
            owner[v] = o;
            counts[o] += 1;
            if let Some(w) = rec(v + 1, owner, counts, k, adj, s_edges, budget)? {
                return Ok(Some(w));
            }
            counts[o] -= 1;
        }
        owner[v] = 0;
        Ok(None)
    }

    rec(0, &mut owner, &mut counts, k, &adj, &s_edges, &mut budget)
}

/// `F ⊘ s`: contract the components of the `s`-monochromatic edges; the
/// remaining edges keep (and accumulate) multiplicities and the new
/// bipartition is given by `s`. Returns the quotient and, per global
/// vertex of `F`, its global vertex in the quotient.
pub fn quotient(f: &BipartiteMultigraph, s: &[Side]) -> Result<(BipartiteMultigraph, Vec<usize>)> {
    let n = f.num_vertices();
    if s.len() != n {
        return Err(Error::InvalidParameter("side map must be total".into()));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for (u, w, _) in f.global_edges() {
        if s[u] == s[w] {
            let (ru, rw) = (find(&mut parent, u), find(&mut parent, w));
            if ru != rw {
                parent[ru.max(rw)] = ru.min(rw);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    let comps: BTreeSet<usize> = roots.iter().copied().collect();
    let a_comps: Vec<usize> = comps.iter().copied().filter(|&r| s[r] == Side::A).collect();
    let b_comps: Vec<usize> = comps.iter().copied().filter(|&r| s[r] == Side::B).collect();
    let mut idx = BTreeMap::new();
    for (k, &r) in a_comps.iter().enumerate() {
        idx.insert(r, k);
    }
    for (k, &r) in b_comps.iter().enumerate() {
        idx.insert(r, a_comps.len() + k);
    }
    let mut q = BipartiteMultigraph::new(a_comps.len(), b_comps.len());
    for (u, w, k) in f.global_edges() {
        if s[u] != s[w] {
            let (x, y) = (idx[&roots[u]], idx[&roots[w]]);
            let (xa, yb) = if s[u] == Side::A { (x, y) } else { (y, x) };
            q.add_edge(xa, yb - a_comps.len(), k)?;
        }
    }
    let map = roots.iter().map(|r| idx[r]).collect();
    Ok((q, map))
}

/// Merges A-vertices by block of `pa` and B-vertices by block of `pb`
/// (block ids per vertex); parallel edges accumulate multiplicity.
pub fn merge_by_partition(
    f: &BipartiteMultigraph,
    pa: &[usize],
    pb: &[usize],
) -> Result<BipartiteMultigraph> {
    let na = pa.iter().copied().max().map_or(0, |x| x + 1);
    let nb = pb.iter().copied().max().map_or(0, |x| x + 1);
    let mut q = BipartiteMultigraph::new(na, nb);
    for (&(i, j), &k) in &f.edges {
        q.add_edge(pa[i], pb[j], k)?;
    }
    Ok(q)
}

/// A bipartite multigraph with tuples of labelled left and right vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledPattern {
    pub graph: BipartiteMultigraph,
    pub a_labels: Vec<usize>,
    pub b_labels: Vec<usize>,
}

impl LabelledPattern {
    pub fn new(graph: BipartiteMultigraph, a_labels: Vec<usize>, b_labels: Vec<usize>) -> Result<Self> {
        if a_labels.iter().any(|&i| i >= graph.a_count()) || b_labels.iter().any(|&j| j >= graph.b_count()) {
            return Err(Error::IndexOutOfRange("label outside its side".into()));
        }
        Ok(LabelledPattern {
            graph,
            a_labels,
            b_labels,
        })
    }

    /// Unlabelled pattern.
    pub fn plain(graph: BipartiteMultigraph) -> Self {
        LabelledPattern {
            graph,
            a_labels: Vec::new(),
            b_labels: Vec::new(),
        }
    }

    /// Edgeless pattern with `l` left and `r` right vertices, all labelled.
    pub fn all_labelled_edgeless(l: usize, r: usize) -> Self {
        LabelledPattern {
            graph: BipartiteMultigraph::new(l, r),
            a_labels: (0..l).collect(),
            b_labels: (0..r).collect(),
        }
    }

    /// Single edge carrying `l` copies of the left label and `r` copies of
    /// the right label.
    pub fn labelled_edge(l: usize, r: usize) -> Self {
        let mut g = BipartiteMultigraph::new(1, 1);
        g.add_edge(0, 0, 1).expect("in range");
        LabelledPattern {
            graph: g,
            a_labels: vec![0; l],
            b_labels: vec![0; r],
        }
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.a_labels.len(), self.b_labels.len())
    }

    /// Global vertices that carry at least one label.
    pub fn labelled_vertices(&self) -> BTreeSet<usize> {
        self.a_labels
            .iter()
            .copied()
            .chain(self.b_labels.iter().map(|&j| self.graph.b_vertex(j)))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.graph.to_json();
        v["a_labels"] = json!(self.a_labels.iter().map(|i| i + 1).collect::<Vec<_>>());
        v["b_labels"] = json!(self.b_labels.iter().map(|j| j + 1).collect::<Vec<_>>());
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let graph = BipartiteMultigraph::from_json(v)?;
        let labels = |key: &str| -> Result<Vec<usize>> {
            match v.get(key) {
                None => Ok(Vec::new()),
                Some(arr) => arr
                    .as_array()
                    .ok_or_else(|| Error::ParseError(format!("`{key}` must be an array")))?
                    .iter()
                    .map(one_based)
                    .collect(),
            }
        };
        LabelledPattern::new(graph, labels("a_labels")?, labels("b_labels")?)
    }
}

/// `F ⊗ G`: disjoint union with concatenated label tuples.
pub fn tensor_union(f: &LabelledPattern, g: &LabelledPattern) -> LabelledPattern {
    let (fa, fb) = (f.graph.a_count(), f.graph.b_count());
    LabelledPattern {
        graph: f.graph.disjoint_union(&g.graph),
        a_labels: f.a_labels.iter().copied().chain(g.a_labels.iter().map(|i| i + fa)).collect(),
        b_labels: f.b_labels.iter().copied().chain(g.b_labels.iter().map(|j| j + fb)).collect(),
    }
}

/// `F ⊙ G`: disjoint union, then identify the vertices carrying equal
/// label positions. Parallel edges add their multiplicities.
pub fn glue(f: &LabelledPattern, g: &LabelledPattern) -> Result<LabelledPattern> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch(format!(
            "{:?} vs {:?}",
            f.arity(),
            g.arity()
        )));
    }
    let u = tensor_union(f, g);
    let side_merge = |count: usize, labels: &[usize]| -> Vec<usize> {
        let mut parent: Vec<usize> = (0..count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for k in 0..labels.len() / 2 {
            let (x, y) = (find(&mut parent, labels[k]), find(&mut parent, labels[k + labels.len() / 2]));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
        let roots: Vec<usize> = (0..count).map(|v| find(&mut parent, v)).collect();
        let distinct: BTreeSet<usize> = roots.iter().copied().collect();
        let idx: BTreeMap<usize, usize> = distinct.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        roots.iter().map(|r| idx[r]).collect()
    };
    let pa = side_merge(u.graph.a_count(), &u.a_labels);
    let pb = side_merge(u.graph.b_count(), &u.b_labels);
    let graph = merge_by_partition(&u.graph, &pa, &pb)?;
    let graph = {
        // keep vertices that disappeared from the edge set
        let mut g2 = BipartiteMultigraph::new(
            pa.iter().copied().max().map_or(0, |x| x + 1),
            pb.iter().copied().max().map_or(0, |x| x + 1),
        );
        g2.edges = graph.edges;
        g2
    };
    Ok(LabelledPattern {
        graph,
        a_labels: f.a_labels.iter().map(|&i| pa[i]).collect(),
        b_labels: f.b_labels.iter().map(|&j| pb[j]).collect(),
    })
}

/// `Σ_i F`: removes the `i`-th (0-based) label on `side`.
pub fn drop_label(f: &LabelledPattern, side: Side, i: usize) -> Result<LabelledPattern> {
    let mut out = f.clone();
    let labels = match side {
        Side::A => &mut out.a_labels,
        Side::B => &mut out.b_labels,
    };
    if i >= labels.len() {
        return Err(Error::IndexOutOfRange(format!(
            "label {} of {} on side {:?}",
            i + 1,
            labels.len(),
            side
        )));
    }
    labels.remove(i);
    Ok(out)
}

/// Inserts a label for `vertex` (side-local) at position `i` on `side`.
pub fn add_label(f: &LabelledPattern, side: Side, i: usize, vertex: usize) -> Result<LabelledPattern> {
    let mut out = f.clone();
    let (labels, count) = match side {
        Side::A => (&mut out.a_labels, f.graph.a_count()),
        Side::B => (&mut out.b_labels, f.graph.b_count()),
    };
    if i > labels.len() || vertex >= count {
        return Err(Error::IndexOutOfRange("label position or vertex".into()));
    }
    labels.insert(i, vertex);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_examples() {
        let p1 = make_path(1).unwrap();
        assert_eq!((p1.a_count(), p1.b_count(), p1.num_edges()), (1, 0, 0));
        let p2 = make_path(2).unwrap();
        assert_eq!((p2.a_count(), p2.b_count(), p2.num_edges()), (1, 1, 1));
        let p5 = make_path(5).unwrap();
        assert_eq!((p5.a_count(), p5.b_count(), p5.num_edges()), (3, 2, 4));
        assert!(p5.is_connected());
        assert!(make_path(0).is_err());
    }

    #[test]
    fn grid_examples() {
        let g = make_grid(1, 1).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (1, 0));
        let g = make_grid(2, 2).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (4, 4));
        assert!(are_isomorphic(&g, &make_cycle(2).unwrap()).unwrap());
        let g = make_grid(3, 3).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (9, 12));
        let g = make_grid(2, 3).unwrap();
        assert_eq!(g.num_edges(), 2 * 6 - 2 - 3);
    }

    #[test]
    fn tree_examples() {
        let t = make_complete_binary_tree(1).unwrap();
        assert_eq!(t.num_vertices(), 1);
        let t = make_complete_binary_tree(2).unwrap();
        assert_eq!((t.num_vertices(), t.num_edges()), (3, 2));
        assert_eq!((t.a_count(), t.b_count()), (1, 2));
        let t = make_complete_binary_tree(7).unwrap();
        assert_eq!((t.num_vertices(), t.num_edges()), (7, 6));
        assert_eq!((t.a_count(), t.b_count()), (5, 2));
    }

    #[test]
    fn isomorphism_examples() {
        let p3 = make_path(3).unwrap();
        let relabelled = p3.permuted(&[1, 0], &[0]);
        assert!(are_isomorphic(&p3, &relabelled).unwrap());
        let single = BipartiteMultigraph::from_edges(1, 1, &[(0, 0, 1)]).unwrap();
        let double = BipartiteMultigraph::from_edges(1, 1, &[(0, 0, 2)]).unwrap();
        assert!(!are_isomorphic(&single, &double).unwrap());
        let p4 = make_path(4).unwrap();
        let star = BipartiteMultigraph::from_edges(1, 3, &[(0, 0, 1), (0, 1, 1), (0, 2, 1)]).unwrap();
        assert!(!are_isomorphic(&p4, &star).unwrap());
        let big = BipartiteMultigraph::new(11, 1);
        assert!(matches!(are_isomorphic(&big, &big), Err(Error::SizeCap(_))));
    }

    #[test]
    fn isomorphism_agrees_with_canonical_form() {
        let pats = enumerate_patterns(5, 2, 5, true);
        for (x, f) in pats.iter().enumerate().step_by(7) {
            for g in pats.iter().step_by(5) {
                let iso = are_isomorphic(f, g).unwrap();
                assert_eq!(iso, canonical_form(f) == canonical_form(g), "{x}");
            }
            let pa: Vec<usize> = (0..f.a_count()).rev().collect();
            let pb: Vec<usize> = (0..f.b_count()).rev().collect();
            assert!(are_isomorphic(f, &f.permuted(&pa, &pb)).unwrap());
        }
    }

    #[test]
    fn enumeration_counts_small_cases() {
        // one vertex: A or B; two vertices: AA, BB, AB edgeless, AB single, AB double
        let pats = enumerate_patterns(2, 2, 2, true);
        assert_eq!(pats.len(), 2 + 5);
    }

    #[test]
    fn minor_examples() {
        let p2 = make_path(2).unwrap();
        let p4 = make_path(4).unwrap();
        let w = find_minor(&p2, &p4).unwrap().unwrap();
        assert!(w.verify(&p2, &p4));
        let c4 = make_grid(2, 2).unwrap();
        assert!(find_minor(&c4, &p4).unwrap().is_none());
        let p3 = make_path(3).unwrap();
        let w = find_minor(&p3, &c4).unwrap().unwrap();
        assert!(w.verify(&p3, &c4));
        let g23 = make_grid(2, 3).unwrap();
        let w = find_minor(&c4, &g23).unwrap().unwrap();
        assert!(w.verify(&c4, &g23));
    }

    #[test]
    fn quotient_examples() {
        let e = make_path(2).unwrap();
        let (q, _) = quotient(&e, &[Side::A, Side::A]).unwrap();
        assert_eq!((q.num_vertices(), q.num_edges()), (1, 0));
        let (q, _) = quotient(&e, &[Side::A, Side::B]).unwrap();
        assert_eq!(q, e);
        // P3 = u - v - w with u, w in A and v in B (global 0, 2 | 1... )
        let p3 = make_path(3).unwrap();
        // global: A = {0 (u), 1 (w)}, B = {2 (v)}
        let (q, _) = quotient(&p3, &[Side::A, Side::B, Side::A]).unwrap();
        assert_eq!((q.a_count(), q.b_count()), (1, 1));
        assert_eq!(q.edge_list(), vec![(0, 0, 1)]);
    }

    #[test]
    fn quotient_edges_cross_the_new_bipartition() {
        let f = make_grid(2, 3).unwrap();
        let n = f.num_vertices();
        for mask in 0..(1u32 << n) {
            let s: Vec<Side> = (0..n).map(|v| if mask >> v & 1 == 1 { Side::B } else { Side::A }).collect();
            let (q, map) = quotient(&f, &s).unwrap();
            for v in 0..n {
                assert_eq!(q.side(map[v]), s[v]);
            }
            let kept: u32 = f.global_edges().iter().filter(|(u, w, _)| s[*u] != s[*w]).map(|e| e.2).sum();
            assert_eq!(q.num_edges(), kept);
        }
    }

    #[test]
    fn labelled_operations() {
        let j1 = LabelledPattern::new(BipartiteMultigraph::new(1, 0), vec![0], vec![]).unwrap();
        let e = LabelledPattern::labelled_edge(1, 1);
        let u = tensor_union(&j1, &e);
        assert_eq!((u.graph.num_vertices(), u.a_labels.len() + u.b_labels.len()), (3, 3));
        let empty = LabelledPattern::plain(BipartiteMultigraph::new(0, 0));
        assert_eq!(tensor_union(&e, &empty), e);
        let two = tensor_union(&e, &e);
        assert_eq!((two.graph.num_vertices(), two.graph.num_edges(), two.a_labels.len() + two.b_labels.len()), (4, 2, 4));

        let d = glue(&e, &e).unwrap();
        assert_eq!(d.graph.edge_list(), vec![(0, 0, 2)]);
        let j = LabelledPattern::all_labelled_edgeless(1, 1);
        let g = glue(&e, &j).unwrap();
        assert_eq!(g.graph, e.graph);
        assert!(matches!(glue(&e, &j1), Err(Error::ArityMismatch(_))));

        // P3 with both A endpoints labelled, glued with itself: 4-cycle
        let p3 = LabelledPattern::new(make_path(3).unwrap(), vec![0, 1], vec![]).unwrap();
        let c = glue(&p3, &p3).unwrap();
        assert!(are_isomorphic(&c.graph, &make_cycle(2).unwrap()).unwrap());

        let e1 = LabelledPattern::labelled_edge(1, 0);
        let dropped = drop_label(&e1, Side::A, 0).unwrap();
        assert_eq!(dropped.arity(), (0, 0));
        assert_eq!(add_label(&dropped, Side::A, 0, 0).unwrap(), e1);
        let j2 = LabelledPattern::all_labelled_edgeless(2, 0);
        assert_eq!(drop_label(&j2, Side::A, 1).unwrap().arity(), (1, 0));
        assert!(drop_label(&j2, Side::B, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = BipartiteMultigraph::from_edges(2, 3, &[(0, 1, 2), (1, 2, 1)]).unwrap();
        let v = f.to_json();
        assert_eq!(v["edges"], json!([[1, 2, 2], [2, 3, 1]]));
        assert_eq!(BipartiteMultigraph::from_json(&v).unwrap(), f);
        let l = LabelledPattern::new(f, vec![1], vec![0, 2]).unwrap();
        assert_eq!(LabelledPattern::from_json(&l.to_json()).unwrap(), l);
    }
}
