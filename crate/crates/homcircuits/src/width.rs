//! Exact treewidth, pathwidth and treedepth with certificates.
//!
//! All solvers are exponential dynamic programs over vertex subsets of the
//! underlying simple graph and are capped at [`VERTEX_CAP`] vertices.
//! Vertices are the global indices of [`BipartiteMultigraph`].

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::pattern::{one_based, BipartiteMultigraph, LabelledPattern};

pub const VERTEX_CAP: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// `parent[t]` is `None` exactly for the root.
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    pub bags: Vec<BTreeSet<usize>>,
}

/// Elimination forest: `parent[v]` is the parent of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationTree {
    pub parent: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Tree(TreeDecomposition),
    Path(PathDecomposition),
    Elimination(EliminationTree),
}

/// The first axiom a decomposition fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotATree,
    VertexOutOfRange(usize),
    VertexNotCovered(usize),
    EdgeNotCovered(usize, usize),
    OccurrencesDisconnected(usize),
    EdgeNotAncestral(usize, usize),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NotATree => write!(f, "parent links do not form a rooted tree"),
            Violation::VertexOutOfRange(v) => write!(f, "vertex {} out of range", v + 1),
            Violation::VertexNotCovered(v) => write!(f, "vertex {} in no bag", v + 1),
            Violation::EdgeNotCovered(u, w) => write!(f, "edge {}-{} in no bag", u + 1, w + 1),
            Violation::OccurrencesDisconnected(v) => {
                write!(f, "bags containing vertex {} are not connected", v + 1)
            }
            Violation::EdgeNotAncestral(u, w) => {
                write!(f, "edge {}-{} joins unrelated vertices", u + 1, w + 1)
            }
        }
    }
}

fn bags_json(bags: &[BTreeSet<usize>]) -> Value {
    json!(bags
        .iter()
        .map(|b| b.iter().map(|v| v + 1).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn parents_json(parent: &[Option<usize>]) -> Value {
    json!(parent.iter().map(|p| p.map(|x| x + 1)).collect::<Vec<_>>())
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn root(&self) -> Option<usize> {
        let roots: Vec<usize> = (0..self.parent.len()).filter(|&t| self.parent[t].is_none()).collect();
        (roots.len() == 1).then(|| roots[0])
    }

    /// Children lists.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(t);
            }
        }
        ch
    }

    /// Nodes ordered so that every child precedes its parent.
    pub fn bottom_up(&self) -> Result<Vec<usize>> {
        let root = self
            .root()
            .ok_or_else(|| Error::InvalidDecomposition("no unique root".into()))?;
        let ch = self.children();
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(t) = stack.pop() {
            order.push(t);
            stack.extend(ch[t].iter().copied());
        }
        if order.len() != self.parent.len() {
            return Err(Error::InvalidDecomposition("tree is not connected".into()));
        }
        order.reverse();
        Ok(order)
    }

    pub fn to_json(&self) -> Value {
        json!({"bags": bags_json(&self.bags), "parent": parents_json(&self.parent)})
    }
}

impl PathDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// The path as a tree rooted at its last bag.
    pub fn to_tree(&self) -> TreeDecomposition {
        let n = self.bags.len();
        TreeDecomposition {
            parent: (0..n).map(|t| (t + 1 < n).then_some(t + 1)).collect(),
            bags: self.bags.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"bags": bags_json(&self.bags)})
    }
}

impl EliminationTree {
    /// Number of vertices on a longest root-to-leaf path.
    pub fn height(&self) -> usize {
        (0..self.parent.len())
            .map(|v| self.ancestors(v).len() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Proper ancestors of `v`, nearest first.
    pub fn ancestors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.parent[v];
        while let Some(p) = cur {
            if out.len() > self.parent.len() {
                break;
            }
            out.push(p);
            cur = self.parent[p];
        }
        out
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(v);
            }
        }
        ch
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&v| self.parent[v].is_none()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"parent": parents_json(&self.parent), "height": self.height()})
    }
}

fn parse_bags(v: &Value) -> Result<Vec<BTreeSet<usize>>> {
    v.as_array()
        .ok_or_else(|| Error::ParseError("`bags` must be an array".into()))?
        .iter()
        .map(|b| {
            b.as_array()
                .ok_or_else(|| Error::ParseError("bag must be an array".into()))?
                .iter()
                .map(one_based)
                .collect()
        })
        .collect()
}

fn parse_parents(v: &Value) -> Result<Vec<Option<usize>>> {
    v.as_array()
        .ok_or_else(|| Error::ParseError("`parent` must be an array".into()))?
        .iter()
        .map(|p| if p.is_null() { Ok(None) } else { one_based(p).map(Some) })
        .collect()
}

impl Decomposition {
    /// Reads the JSON written by the `to_json` methods: bags and parents
    /// give a tree decomposition, bags alone a path decomposition, parents
    /// alone an elimination forest. Vertices and nodes are 1-based.
    pub fn from_json(v: &Value) -> Result<Self> {
        match (v.get("bags"), v.get("parent")) {
            (Some(b), Some(p)) => {
                let (bags, parent) = (parse_bags(b)?, parse_parents(p)?);
                if bags.len() != parent.len() {
                    return Err(Error::ParseError("`bags` and `parent` differ in length".into()));
                }
                Ok(Decomposition::Tree(TreeDecomposition { parent, bags }))
            }
            (Some(b), None) => Ok(Decomposition::Path(PathDecomposition { bags: parse_bags(b)? })),
            (None, Some(p)) => Ok(Decomposition::Elimination(EliminationTree { parent: parse_parents(p)? })),
            (None, None) => Err(Error::ParseError("decomposition needs `bags` or `parent`".into())),
        }
    }
}

fn check_cap(f: &BipartiteMultigraph) -> Result<()> {
    if f.num_vertices() > VERTEX_CAP {
        return Err(Error::SizeCap(format!(
            "exact width solvers limited to {VERTEX_CAP} vertices"
        )));
    }
    Ok(())
}

fn masks_with_clique(f: &BipartiteMultigraph, clique: &BTreeSet<usize>) -> Vec<u32> {
    let mut adj: Vec<u32> = f.adjacency_masks().into_iter().map(|m| m as u32).collect();
    for &u in clique {
        for &w in clique {
            if u != w {
                adj[u] |= 1 << w;
            }
        }
    }
    adj
}

/// Vertices outside `s ∪ {v}` reachable from `v` through `s`.
fn q_set(adj: &[u32], s: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut out = 0u32;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let nb = adj[u] & !seen;
        seen |= nb;
        out |= nb & !s;
        frontier |= nb & s;
    }
    out
}

fn treewidth_masks(adj: &[u32]) -> (usize, TreeDecomposition) {
    let n = adj.len();
    if n == 0 {
        return (
            0,
            TreeDecomposition {
                parent: vec![None],
                bags: vec![BTreeSet::new()],
            },
        );
    }
    let full = (1u32 << n) - 1;
    let mut tw = vec![0i32; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i32::MAX;
        let mut bv = 0;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let val = tw[prev as usize].max(q_set(adj, prev, v).count_ones() as i32);
            if val < best {
                best = val;
                bv = v;
            }
        }
        tw[s as usize] = best;
        choice[s as usize] = bv as u8;
    }
    // recover the elimination order: order[k] is eliminated k-th
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    let mut before = 0u32;
    for (k, &v) in order.iter().enumerate() {
        let q = q_set(adj, before, v);
        let mut bag: BTreeSet<usize> = (0..n).filter(|&w| q >> w & 1 == 1).collect();
        parent[k] = bag.iter().map(|&w| pos[w]).min();
        bag.insert(v);
        bags.push(bag);
        before |= 1 << v;
    }
    // join the roots of a forest into a tree
    let roots: Vec<usize> = (0..n).filter(|&k| parent[k].is_none()).collect();
    if let Some((&last, others)) = roots.split_last() {
        for &r in others {
            parent[r] = Some(last);
        }
    }
    let td = TreeDecomposition { parent, bags };
    (td.width(), td)
}

/// Exact treewidth of the underlying simple graph with a certificate.
pub fn treewidth_exact(f: &BipartiteMultigraph) -> Result<(usize, TreeDecomposition)> {
    check_cap(f)?;
    Ok(treewidth_masks(&masks_with_clique(f, &BTreeSet::new())))
}

/// Exact treewidth of a labelled pattern; with `labels_in_one_bag` the
/// decomposition must have a bag holding every labelled vertex.
pub fn treewidth_labelled(
    f: &LabelledPattern,
    labels_in_one_bag: bool,
) -> Result<(usize, TreeDecomposition)> {
    check_cap(&f.graph)?;
    let clique = if labels_in_one_bag {
        f.labelled_vertices()
    } else {
        BTreeSet::new()
    };
    Ok(treewidth_masks(&masks_with_clique(&f.graph, &clique)))
}

fn boundary(adj: &[u32], s: u32) -> u32 {
    let mut out = 0;
    let mut rest = s;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if adj[v] & !s != 0 {
            out |= 1 << v;
        }
    }
    out
}

/// Vertex separation DP started from the prefix `start`.
fn pathwidth_masks(adj: &[u32], start: u32) -> (usize, PathDecomposition) {
    let n = adj.len();
    if n == 0 {
        return (0, PathDecomposition { bags: vec![BTreeSet::new()] });
    }
    let full = (1u32 << n) - 1;
    let mut best = vec![i32::MAX; 1 << n];
    let mut choice = vec![u8::MAX; 1 << n];
    best[start as usize] = 0;
    for s in 1..=full {
        if s & start != start || s == start {
            continue;
        }
        let mut b = i32::MAX;
        let mut bv = u8::MAX;
        let mut rest = s & !start;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            if best[prev as usize] == i32::MAX {
                continue;
            }
            let val = best[prev as usize].max(boundary(adj, prev).count_ones() as i32);
            if val < b {
                b = val;
                bv = v as u8;
            }
        }
        best[s as usize] = b;
        choice[s as usize] = bv;
    }
    let mut order = Vec::new();
    let mut s = full;
    while s != start {
        let v = choice[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let mut bags = Vec::new();
    let mut prefix = start;
    if start != 0 {
        bags.push((0..n).filter(|&w| start >> w & 1 == 1).collect());
    }
    for &v in &order {
        let bd = boundary(adj, prefix);
        let mut bag: BTreeSet<usize> = (0..n).filter(|&w| bd >> w & 1 == 1).collect();
        bag.insert(v);
        bags.push(bag);
        prefix |= 1 << v;
    }
    let pd = PathDecomposition { bags };
    (pd.width(), pd)
}

/// Exact pathwidth of the underlying simple graph with a certificate.
pub fn pathwidth_exact(f: &BipartiteMultigraph) -> Result<(usize, PathDecomposition)> {
    check_cap(f)?;
    Ok(pathwidth_masks(&masks_with_clique(f, &BTreeSet::new()), 0))
}

/// Exact pathwidth of a labelled pattern; with `labels_in_one_bag` the first
/// bag (an end of the path) must hold every labelled vertex.
pub fn pathwidth_labelled(
    f: &LabelledPattern,
    labels_in_one_bag: bool,
) -> Result<(usize, PathDecomposition)> {
    check_cap(&f.graph)?;
    let adj = masks_with_clique(&f.graph, &BTreeSet::new());
    let start = if labels_in_one_bag {
        f.labelled_vertices().iter().fold(0u32, |m, &v| m | 1 << v)
    } else {
        0
    };
    Ok(pathwidth_masks(&adj, start))
}

/// Exact treedepth (height counts vertices) with an elimination forest.
pub fn treedepth_exact(f: &BipartiteMultigraph) -> Result<(usize, EliminationTree)> {
    check_cap(f)?;
    let adj: Vec<u32> = f.adjacency_masks().into_iter().map(|m| m as u32).collect();
    let n = adj.len();
    let mut memo: HashMap<u32, (usize, u8)> = HashMap::new();
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };

    fn components(adj: &[u32], s: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            let mut comp = 1u32 << v;
            let mut frontier = comp;
            while frontier != 0 {
                let u = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let nb = adj[u] & s & !comp;
                comp |= nb;
                frontier |= nb;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    // treedepth of a connected vertex set, with the chosen root
    fn td_conn(adj: &[u32], s: u32, memo: &mut HashMap<u32, (usize, u8)>) -> usize {
        if s.count_ones() == 1 {
            return 1;
        }
        if let Some(&(d, _)) = memo.get(&s) {
            return d;
        }
        let mut best = usize::MAX;
        let mut bv = 0;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let sub = s & !(1 << v);
            let mut d = 0;
            for c in components(adj, sub) {
                d = d.max(td_conn(adj, c, memo));
                if d + 1 >= best {
                    break;
                }
            }
            if d + 1 < best {
                best = d + 1;
                bv = v;
            }
        }
        memo.insert(s, (best, bv as u8));
        best
    }

    let mut parent = vec![None; n];
    let mut height = 0;
    let mut stack: Vec<(u32, Option<usize>)> = components(&adj, full).into_iter().map(|c| (c, None)).collect();
    for &(c, _) in &stack {
        height = height.max(td_conn(&adj, c, &mut memo));
    }
    while let Some((s, p)) = stack.pop() {
        let root = if s.count_ones() == 1 {
            s.trailing_zeros() as usize
        } else {
            td_conn(&adj, s, &mut memo);
            memo[&s].1 as usize
        };
        parent[root] = p;
        for c in components(&adj, s & !(1 << root)) {
            stack.push((c, Some(root)));
        }
    }
    Ok((height, EliminationTree { parent }))
}

fn tree_violation(f: &BipartiteMultigraph, parent: &[Option<usize>], bags: &[BTreeSet<usize>]) -> Option<Violation> {
    let t = bags.len();
    if parent.len() != t || t == 0 {
        return Some(Violation::NotATree);
    }
    let td = TreeDecomposition {
        parent: parent.to_vec(),
        bags: bags.to_vec(),
    };
    if parent.iter().any(|p| p.is_some_and(|p| p >= t)) || td.bottom_up().is_err() {
        return Some(Violation::NotATree);
    }
    let n = f.num_vertices();
    for b in bags {
        if let Some(&v) = b.iter().find(|&&v| v >= n) {
            return Some(Violation::VertexOutOfRange(v));
        }
    }
    for v in 0..n {
        if !bags.iter().any(|b| b.contains(&v)) {
            return Some(Violation::VertexNotCovered(v));
        }
    }
    for (u, w, _) in f.global_edges() {
        if !bags.iter().any(|b| b.contains(&u) && b.contains(&w)) {
            return Some(Violation::EdgeNotCovered(u, w));
        }
    }
    for v in 0..n {
        // occurrence set is connected iff exactly one occurrence lacks an
        // occurring parent
        let tops = (0..t)
            .filter(|&s| bags[s].contains(&v) && !parent[s].is_some_and(|p| bags[p].contains(&v)))
            .count();
        if tops != 1 {
            return Some(Violation::OccurrencesDisconnected(v));
        }
    }
    None
}

/// Checks the decomposition axioms; returns the first violation.
pub fn check_decomposition(f: &BipartiteMultigraph, d: &Decomposition) -> std::result::Result<(), Violation> {
    let found = match d {
        Decomposition::Tree(td) => tree_violation(f, &td.parent, &td.bags),
        Decomposition::Path(pd) => {
            let t = pd.to_tree();
            tree_violation(f, &t.parent, &t.bags)
        }
        Decomposition::Elimination(et) => {
            let n = f.num_vertices();
            if et.parent.len() != n || et.parent.iter().any(|p| p.is_some_and(|p| p >= n)) {
                Some(Violation::NotATree)
            } else if (0..n).any(|v| et.ancestors(v).contains(&v) || et.ancestors(v).len() >= n) {
                Some(Violation::NotATree)
            } else {
                f.global_edges()
                    .into_iter()
                    .find(|&(u, w, _)| !et.ancestors(u).contains(&w) && !et.ancestors(w).contains(&u))
                    .map(|(u, w, _)| Violation::EdgeNotAncestral(u, w))
            }
        }
    };
    match found {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

pub fn validate_decomposition(f: &BipartiteMultigraph, d: &Decomposition) -> bool {
    check_decomposition(f, d).is_ok()
}

/// `max_t |⋃_{s on the root path of t} β(s)|`.
pub fn rooted_depth(d: &TreeDecomposition) -> Result<usize> {
    let order = d.bottom_up()?;
    let mut acc: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); d.bags.len()];
    let mut best = 0;
    for &t in order.iter().rev() {
        let mut u = d.parent[t].map(|p| acc[p].clone()).unwrap_or_default();
        u.extend(d.bags[t].iter().copied());
        best = best.max(u.len());
        acc[t] = u;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{
        enumerate_patterns, make_complete_binary_tree, make_complete_bipartite, make_cycle, make_grid,
        make_path,
    };

    fn all_valid(f: &BipartiteMultigraph) -> (usize, usize, usize) {
        let (tw, td) = treewidth_exact(f).unwrap();
        let (pw, pd) = pathwidth_exact(f).unwrap();
        let (dp, et) = treedepth_exact(f).unwrap();
        assert_eq!(check_decomposition(f, &Decomposition::Tree(td.clone())), Ok(()));
        assert_eq!(check_decomposition(f, &Decomposition::Path(pd.clone())), Ok(()));
        assert_eq!(check_decomposition(f, &Decomposition::Elimination(et.clone())), Ok(()));
        assert_eq!(tw, td.width());
        assert_eq!(pw, pd.width());
        assert_eq!(dp, et.height());
        (tw, pw, dp)
    }

    // Independent brute force: treewidth as the min over all elimination
    // orders, treedepth by trying every root recursively on subsets.
    fn brute_tw(f: &BipartiteMultigraph) -> usize {
        let n = f.num_vertices();
        let adj0 = f.adjacency_masks();
        let mut best = usize::MAX;
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let mut adj = adj0.clone();
            let mut alive: u64 = if n == 0 { 0 } else { (1 << n) - 1 };
            let mut w = 0;
            for &v in &perm {
                let nb = adj[v] & alive & !(1 << v);
                w = w.max(nb.count_ones() as usize);
                for u in 0..n {
                    if nb >> u & 1 == 1 {
                        adj[u] |= nb & !(1 << u);
                    }
                }
                alive &= !(1 << v);
            }
            best = best.min(w);
            // next permutation
            let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
            let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        best
    }

    fn brute_pw(f: &BipartiteMultigraph) -> usize {
        let n = f.num_vertices();
        let adj = f.adjacency_masks();
        let mut best = usize::MAX;
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let mut prefix = 0u64;
            let mut w = 0;
            for &v in &perm {
                prefix |= 1 << v;
                let bd = (0..n).filter(|&u| prefix >> u & 1 == 1 && adj[u] & !prefix != 0).count();
                w = w.max(bd);
            }
            best = best.min(w);
            let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
            let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        best
    }

    fn brute_td(adj: &[u64], s: u64) -> usize {
        if s == 0 {
            return 0;
        }
        // components
        let mut comps = Vec::new();
        let mut rest = s;
        while rest != 0 {
            let mut c = rest & rest.wrapping_neg();
            loop {
                let mut next = c;
                for v in 0..adj.len() {
                    if c >> v & 1 == 1 {
                        next |= adj[v] & s;
                    }
                }
                if next == c {
                    break;
                }
                c = next;
            }
            comps.push(c);
            rest &= !c;
        }
        comps
            .into_iter()
            .map(|c| {
                (0..adj.len())
                    .filter(|&v| c >> v & 1 == 1)
                    .map(|v| 1 + brute_td(adj, c & !(1 << v)))
                    .min()
                    .unwrap()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(treewidth_exact(&make_path(5).unwrap()).unwrap().0, 1);
        assert_eq!(treewidth_exact(&make_complete_bipartite(2, 2)).unwrap().0, 2);
        assert_eq!(treewidth_exact(&make_path(1).unwrap()).unwrap().0, 0);
        for n in 2..9 {
            assert_eq!(pathwidth_exact(&make_path(n).unwrap()).unwrap().0, 1);
        }
        assert_eq!(pathwidth_exact(&make_path(2).unwrap()).unwrap().0, 1);
        assert_eq!(treedepth_exact(&make_path(1).unwrap()).unwrap().0, 1);
        assert_eq!(treedepth_exact(&make_path(3).unwrap()).unwrap().0, 2);
        assert_eq!(treedepth_exact(&make_path(2).unwrap()).unwrap().0, 2);
        let t = make_complete_binary_tree(4).unwrap();
        let (tw, pw, td) = all_valid(&t);
        assert!(tw <= pw && pw < td);
        // frozen: brute force over orders and roots (a caterpillar, so pw 1)
        assert_eq!((tw, pw, td), (1, 1, 3));
        assert_eq!(pw, brute_pw(&t));
    }

    #[test]
    fn frozen_values_on_named_graphs() {
        let cases: Vec<(BipartiteMultigraph, (usize, usize, usize))> = vec![
            (make_grid(3, 3).unwrap(), (3, 3, 5)),
            (make_cycle(3).unwrap(), (2, 2, 4)),
            (make_complete_bipartite(3, 3), (3, 3, 4)),
            (make_path(7).unwrap(), (1, 1, 3)),
            (make_grid(2, 4).unwrap(), (2, 2, 4)),
            (make_grid(2, 3).unwrap(), (2, 2, 4)),
            (make_complete_bipartite(2, 3), (2, 2, 3)),
            (BipartiteMultigraph::from_edges(4, 3, &[(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 0, 1), (2, 1, 1), (3, 2, 1)]).unwrap(), (1, 2, 3)),
            (make_complete_binary_tree(4).unwrap(), (1, 1, 3)),
            (make_path(5).unwrap(), (1, 1, 3)),
        ];
        for (g, want) in cases {
            let got = all_valid(&g);
            assert_eq!(got, want);
            assert_eq!(got.0, brute_tw(&g));
            assert_eq!(got.1, brute_pw(&g));
            let adj = g.adjacency_masks();
            assert_eq!(got.2, brute_td(&adj, (1 << g.num_vertices()) - 1));
        }
    }

    #[test]
    fn invariants_on_small_patterns() {
        for f in enumerate_patterns(6, 1, 9, true) {
            let (tw, pw, td) = all_valid(&f);
            assert!(tw <= pw && pw + 1 <= td, "{f:?}");
            let n = f.num_vertices();
            if n >= 2 {
                assert!(td as f64 <= (tw as f64 + 1.0) * (n as f64).log2() + 1e-9);
            }
            assert_eq!(tw, brute_tw(&f));
            assert_eq!(pw, brute_pw(&f));
            assert_eq!(td, brute_td(&f.adjacency_masks(), (1 << n) - 1));
            let doubled = BipartiteMultigraph::from_edges(
                f.a_count(),
                f.b_count(),
                &f.edge_list().into_iter().map(|(i, j, _)| (i, j, 2)).collect::<Vec<_>>(),
            )
            .unwrap();
            assert_eq!(all_valid(&doubled), (tw, pw, td));
        }
    }

    #[test]
    fn validation_reports_violations() {
        let p3 = make_path(3).unwrap();
        // global: A = {0, 1}, B = {2}; edges 0-2, 1-2
        let bad = TreeDecomposition {
            parent: vec![None, Some(0)],
            bags: vec![BTreeSet::from([0, 2]), BTreeSet::from([1])],
        };
        assert_eq!(check_decomposition(&p3, &Decomposition::Tree(bad)), Err(Violation::EdgeNotCovered(1, 2)));
        let split = PathDecomposition {
            bags: vec![BTreeSet::from([0, 2]), BTreeSet::from([1]), BTreeSet::from([1, 2])],
        };
        assert_eq!(
            check_decomposition(&p3, &Decomposition::Path(split)),
            Err(Violation::OccurrencesDisconnected(2))
        );
        let et = EliminationTree { parent: vec![None, Some(0), Some(0)] };
        assert_eq!(check_decomposition(&p3, &Decomposition::Elimination(et)), Err(Violation::EdgeNotAncestral(1, 2)));
    }

    #[test]
    fn rooted_depth_examples() {
        let single = TreeDecomposition { parent: vec![None], bags: vec![BTreeSet::from([0, 1, 2])] };
        assert_eq!(rooted_depth(&single).unwrap(), 3);
        let path = TreeDecomposition {
            parent: vec![None, Some(0), Some(1)],
            bags: vec![BTreeSet::from([0]), BTreeSet::from([0, 1]), BTreeSet::from([1, 2])],
        };
        assert_eq!(rooted_depth(&path).unwrap(), 3);
        let g = make_grid(3, 3).unwrap();
        let (tw, td) = treewidth_exact(&g).unwrap();
        assert!(rooted_depth(&td).unwrap() >= tw + 1);
        let broken = TreeDecomposition { parent: vec![None, None], bags: vec![BTreeSet::new(); 2] };
        assert!(rooted_depth(&broken).is_err());
    }

    #[test]
    fn labelled_widths() {
        // P3 with both ends labelled: tw 1 unconstrained, 2 with the ends in one bag
        let p = LabelledPattern::new(make_path(3).unwrap(), vec![0, 1], vec![]).unwrap();
        assert_eq!(treewidth_labelled(&p, false).unwrap().0, 1);
        let (w, td) = treewidth_labelled(&p, true).unwrap();
        assert_eq!(w, 2);
        assert!(td.bags.iter().any(|b| b.is_superset(&p.labelled_vertices())));
        let (w, pd) = pathwidth_labelled(&p, true).unwrap();
        assert_eq!(w, 2);
        assert!(pd.bags[0].is_superset(&p.labelled_vertices()));
        assert!(validate_decomposition(&p.graph, &Decomposition::Path(pd)));
        // a labelled centre of a star costs nothing
        let s = LabelledPattern::new(make_complete_bipartite(1, 4), vec![0], vec![]).unwrap();
        assert_eq!(pathwidth_labelled(&s, true).unwrap().0, 1);
    }

    #[test]
    fn caps() {
        let big = make_path(15).unwrap();
        assert!(matches!(treewidth_exact(&big), Err(Error::SizeCap(_))));
        assert!(matches!(pathwidth_exact(&big), Err(Error::SizeCap(_))));
        assert!(matches!(treedepth_exact(&big), Err(Error::SizeCap(_))));
    }
    #[test]
    fn decomposition_json_round_trip() {
        let g = make_grid(2, 3).unwrap();
        let (_, td) = treewidth_exact(&g).unwrap();
        let (_, pd) = pathwidth_exact(&g).unwrap();
        let (_, et) = treedepth_exact(&g).unwrap();
        assert_eq!(Decomposition::from_json(&td.to_json()).unwrap(), Decomposition::Tree(td));
        assert_eq!(Decomposition::from_json(&pd.to_json()).unwrap(), Decomposition::Path(pd));
        assert_eq!(Decomposition::from_json(&et.to_json()).unwrap(), Decomposition::Elimination(et));
        assert!(Decomposition::from_json(&json!({})).is_err());
    }
}
