//! Brute-force reference semantics.
//!
//! Maps `h` are enumerated row-major: A-vertices first, then B-vertices,
//! the last vertex varying fastest. Every routine is generic over
//! [`Scalar`] so the same code serves exact rationals, the `i128` fast path
//! and symbolic polynomial weights.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{determinant, rng_from_seed, Rational, RationalJson, Rng64, Scalar};
use crate::pattern::{
    are_isomorphic, json_usize, merge_by_partition, one_based, BipartiteMultigraph, LabelledPattern, Side,
};

/// Cap on the number of maps enumerated by the literal oracles.
pub const MAP_CAP: u128 = 10_000_000;

/// Weighted `n × m` host: the value of `x_{i,j}` for every pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Host<S = Rational> {
    pub n: usize,
    pub m: usize,
    pub w: Vec<S>,
}

impl<S: Scalar> Host<S> {
    pub fn zeros(n: usize, m: usize) -> Self {
        Host { n, m, w: vec![S::zero(); n * m] }
    }

    pub fn ones(n: usize, m: usize) -> Self {
        Host { n, m, w: vec![S::one(); n * m] }
    }

    pub fn from_fn(n: usize, m: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        Host {
            n,
            m,
            w: (0..n * m).map(|k| f(k / m.max(1), k % m.max(1))).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.w[i * self.m + j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.w[i * self.m + j] = v;
    }

    /// The host `x_{π(i),σ(j)}`.
    pub fn permuted(&self, pi: &[usize], sigma: &[usize]) -> Self {
        Host::from_fn(self.n, self.m, |i, j| self.get(pi[i], sigma[j]))
    }
}

impl Host<Rational> {
    /// All `0/1` hosts of the given shape, indexed by bitmask.
    pub fn from_bits(n: usize, m: usize, bits: u64) -> Self {
        Host::from_fn(n, m, |i, j| {
            if bits >> (i * m + j) & 1 == 1 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn random(n: usize, m: usize, rng: &mut Rng64) -> Self {
        Host::from_fn(n, m, |_, _| crate::exactnum::random_rational(rng))
    }

    /// Assignment to the variables `x_<i>_<j>`.
    pub fn to_assignment(&self) -> crate::exactnum::Assignment {
        let mut a = crate::exactnum::Assignment::new();
        for i in 0..self.n {
            for j in 0..self.m {
                a.set(crate::circuit::var_name(i, j), self.get(i, j));
            }
        }
        a
    }

    pub fn to_json(&self) -> Value {
        let mut ws = Vec::new();
        for i in 0..self.n {
            for j in 0..self.m {
                let v = self.get(i, j);
                if !v.is_zero() {
                    ws.push(json!([i + 1, j + 1, RationalJson::from(&v)]));
                }
            }
        }
        json!({"a": self.n, "b": self.m, "weights": ws})
    }

    /// Reads `{"a": n, "b": m, "weights": [[i, j, w]]}`; `w` is an integer
    /// or `{"num", "den"}`, missing pairs are 0.
    pub fn from_json(v: &Value) -> Result<Self> {
        let n = json_usize(v, "a").or_else(|_| json_usize(v, "n"))?;
        let m = json_usize(v, "b").or_else(|_| json_usize(v, "m"))?;
        let mut h = Host::zeros(n, m);
        let ws = v
            .get("weights")
            .and_then(|w| w.as_array())
            .ok_or_else(|| Error::ParseError("missing `weights`".into()))?;
        for e in ws {
            let t = e
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::ParseError("weight must be [i, j, w]".into()))?;
            let (i, j) = (one_based(&t[0])?, one_based(&t[1])?);
            if i >= n || j >= m {
                return Err(Error::IndexOutOfRange(format!("weight ({}, {})", i + 1, j + 1)));
            }
            let w = parse_weight(&t[2])?;
            h.set(i, j, w);
        }
        Ok(h)
    }
}

pub(crate) fn parse_weight(v: &Value) -> Result<Rational> {
    if let Some(k) = v.as_i64() {
        return Ok(Rational::from_integer(k.into()));
    }
    let rj: RationalJson = serde_json::from_value(v.clone())?;
    Rational::try_from(&rj)
}

/// Calls `f` on every tuple in `Π [sizes[k]]`, row-major.
pub(crate) fn for_each_tuple(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut t = vec![0usize; sizes.len()];
    loop {
        f(&t);
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            t[k] += 1;
            if t[k] < sizes[k] {
                break;
            }
            t[k] = 0;
        }
    }
}

fn check_maps(sizes: &[usize]) -> Result<()> {
    let total = sizes.iter().try_fold(1u128, |acc, &s| acc.checked_mul(s as u128));
    match total {
        Some(t) if t <= MAP_CAP => Ok(()),
        _ => Err(Error::SizeCap(format!("brute force limited to {MAP_CAP} maps"))),
    }
}

fn map_sizes(f: &BipartiteMultigraph, n: usize, m: usize) -> Vec<usize> {
    let mut s = vec![n; f.a_count()];
    s.extend(std::iter::repeat(m).take(f.b_count()));
    s
}

/// `Σ_h Π_{ab} w(h(a), h(b))^{mult}`, with `h` optionally pinned on some
/// vertices (`pins[v] = Some(value)`).
pub fn hom_sum_with<S: Scalar>(
    f: &BipartiteMultigraph,
    n: usize,
    m: usize,
    w: &dyn Fn(usize, usize) -> S,
    pins: &[Option<usize>],
) -> Result<S> {
    let mut sizes = map_sizes(f, n, m);
    for (v, p) in pins.iter().enumerate() {
        if let Some(x) = p {
            if *x >= sizes[v] {
                return Ok(S::zero());
            }
            sizes[v] = 1;
        }
    }
    check_maps(&sizes)?;
    let edges = f.global_edges();
    let mut total = S::zero();
    let mut h = vec![0usize; sizes.len()];
    for_each_tuple(&sizes, |t| {
        for v in 0..t.len() {
            h[v] = pins.get(v).copied().flatten().unwrap_or(t[v]);
        }
        let mut prod = S::one();
        for &(a, b, k) in &edges {
            prod = prod * w(h[a], h[b]).pow_u32(k);
        }
        total = total.clone() + prod;
    });
    Ok(total)
}

/// `hom_{F,n,m}` at a weighted host, by literal enumeration of all maps.
pub fn hom_count<S: Scalar>(f: &BipartiteMultigraph, host: &Host<S>) -> Result<S> {
    hom_sum_with(f, host.n, host.m, &|i, j| host.get(i, j), &[])
}

/// Same value as [`hom_count`]: sums over A-maps and multiplies the
/// independent sums over each B-vertex.
pub fn hom_count_factored<S: Scalar>(f: &BipartiteMultigraph, n: usize, m: usize, w: &dyn Fn(usize, usize) -> S) -> Result<S> {
    let sizes = vec![n; f.a_count()];
    check_maps(&sizes)?;
    let mut nbrs: Vec<Vec<(usize, u32)>> = vec![Vec::new(); f.b_count()];
    for (i, j, k) in f.edge_list() {
        nbrs[j].push((i, k));
    }
    let mut total = S::zero();
    let a_empty = f.a_count() == 0;
    let mut body = |t: &[usize]| {
        let mut prod = S::one();
        for nb in &nbrs {
            let mut s = S::zero();
            for j in 0..m {
                let mut p = S::one();
                for &(i, k) in nb {
                    p = p * w(t[i], j).pow_u32(k);
                }
                s = s + p;
            }
            prod = prod * s;
        }
        total = total.clone() + prod;
    };
    if a_empty {
        body(&[]);
    } else {
        for_each_tuple(&sizes, body);
    }
    Ok(total)
}

/// `emb_{F,n,m}`: the sum over maps injective on each side.
pub fn emb_eval<S: Scalar>(f: &BipartiteMultigraph, host: &Host<S>) -> Result<S> {
    let sizes = map_sizes(f, host.n, host.m);
    check_maps(&sizes)?;
    let a = f.a_count();
    let edges = f.global_edges();
    let mut total = S::zero();
    for_each_tuple(&sizes, |h| {
        let inj = |r: &[usize]| {
            let mut seen = std::collections::BTreeSet::new();
            r.iter().all(|x| seen.insert(*x))
        };
        if !inj(&h[..a]) || !inj(&h[a..]) {
            return;
        }
        let mut prod = S::one();
        for &(u, v, k) in &edges {
            prod = prod * host.get(h[u], h[v]).pow_u32(k);
        }
        total = total.clone() + prod;
    });
    Ok(total)
}

/// Restricted growth strings of all set partitions of `[k]`.
pub fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[i] = b;
            rec(i + 1, max.max(b), cur, out);
        }
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    cur[0] = 0;
    rec(1, 0, &mut cur, &mut out);
    out
}

/// The quotients `F/(π, σ)` over all pairs of partitions of A and B, with
/// parallel edges accumulating multiplicity; `hom_F = Σ emb_{F/(π,σ)}`.
pub fn hom_to_emb_terms(f: &BipartiteMultigraph) -> Result<Vec<BipartiteMultigraph>> {
    if f.a_count() > 6 || f.b_count() > 6 {
        return Err(Error::SizeCap("partition expansion limited to 6 vertices per side".into()));
    }
    let mut out = Vec::new();
    for pa in set_partitions(f.a_count()) {
        for pb in set_partitions(f.b_count()) {
            let mut q = merge_by_partition(f, &pa, &pb)?;
            // keep isolated blocks
            let na = pa.iter().copied().max().map_or(0, |x| x + 1);
            let nb = pb.iter().copied().max().map_or(0, |x| x + 1);
            if q.a_count() != na || q.b_count() != nb {
                let mut g = BipartiteMultigraph::new(na, nb);
                for (i, j, k) in q.edge_list() {
                    g.add_edge(i, j, k)?;
                }
                q = g;
            }
            out.push(q);
        }
    }
    Ok(out)
}

/// Edge-weighted coloured graph: colour classes with a side and a size;
/// weights between `(colour, index)` pairs, symmetric, missing means 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ColouredGraph<W = Rational> {
    pub sides: Vec<Side>,
    pub sizes: Vec<usize>,
    weights: HashMap<((usize, usize), (usize, usize)), W>,
}

fn wkey(p: (usize, usize), q: (usize, usize)) -> ((usize, usize), (usize, usize)) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

impl<W: Scalar> ColouredGraph<W> {
    pub fn new(sides: Vec<Side>, sizes: Vec<usize>) -> Self {
        assert_eq!(sides.len(), sizes.len());
        ColouredGraph {
            sides,
            sizes,
            weights: HashMap::new(),
        }
    }

    /// Colour classes follow the vertices of `f`, all of size `n`.
    pub fn for_pattern(f: &BipartiteMultigraph, n: usize) -> Self {
        let sides = (0..f.num_vertices()).map(|v| f.side(v)).collect();
        Self::new(sides, vec![n; f.num_vertices()])
    }

    pub fn num_colours(&self) -> usize {
        self.sides.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn set(&mut self, cu: usize, i: usize, cv: usize, j: usize, w: W) {
        assert!(i < self.sizes[cu] && j < self.sizes[cv], "vertex outside its class");
        let k = wkey((cu, i), (cv, j));
        if w.is_zero() {
            self.weights.remove(&k);
        } else {
            self.weights.insert(k, w);
        }
    }

    pub fn get(&self, cu: usize, i: usize, cv: usize, j: usize) -> W {
        self.weights
            .get(&wkey((cu, i), (cv, j)))
            .cloned()
            .unwrap_or_else(W::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (((usize, usize), (usize, usize)), &W)> {
        self.weights.iter().map(|(k, w)| (*k, w))
    }

    pub fn map<V: Scalar>(&self, f: impl Fn(&W) -> V) -> ColouredGraph<V> {
        let mut g = ColouredGraph::new(self.sides.clone(), self.sizes.clone());
        for (&k, w) in &self.weights {
            let v = f(w);
            if !v.is_zero() {
                g.weights.insert(k, v);
            }
        }
        g
    }

    /// Offsets of each colour class in the flat vertex order.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.sizes.len());
        let mut acc = 0;
        for &s in &self.sizes {
            off.push(acc);
            acc += s;
        }
        off
    }

    /// `G°`: the symmetric `N × N` host on all vertices, `N = |V(G)|`.
    pub fn flatten_symmetric(&self) -> Host<W> {
        let off = self.offsets();
        let n = self.num_vertices();
        let mut h = Host::zeros(n, n);
        for (&((cu, i), (cv, j)), w) in &self.weights {
            h.set(off[cu] + i, off[cv] + j, w.clone());
            h.set(off[cv] + j, off[cu] + i, w.clone());
        }
        h
    }

    /// The bipartite host with A-side classes as rows and B-side classes as
    /// columns (each in colour order).
    pub fn flatten_bipartite(&self) -> Result<Host<W>> {
        let mut row = vec![usize::MAX; self.sides.len()];
        let mut col = vec![usize::MAX; self.sides.len()];
        let (mut r, mut c) = (0, 0);
        for (k, s) in self.sides.iter().enumerate() {
            match s {
                Side::A => {
                    row[k] = r;
                    r += self.sizes[k];
                }
                Side::B => {
                    col[k] = c;
                    c += self.sizes[k];
                }
            }
        }
        let mut h = Host::zeros(r, c);
        for (&((cu, i), (cv, j)), w) in &self.weights {
            match (self.sides[cu], self.sides[cv]) {
                (Side::A, Side::B) => h.set(row[cu] + i, col[cv] + j, w.clone()),
                (Side::B, Side::A) => h.set(row[cv] + j, col[cu] + i, w.clone()),
                _ => return Err(Error::ColourMismatch("weight inside one side".into())),
            }
        }
        Ok(h)
    }
}

impl ColouredGraph<Rational> {
    /// `{"sides": ["A", "B", ...], "sizes": [...], "weights": [[cu, i, cv, j, w]]}`,
    /// colours and indices 1-based.
    pub fn to_json(&self) -> Value {
        let mut entries: Vec<_> = self.weights.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let ws: Vec<Value> = entries
            .into_iter()
            .map(|(&((cu, i), (cv, j)), w)| json!([cu + 1, i + 1, cv + 1, j + 1, RationalJson::from(w)]))
            .collect();
        let sides: Vec<&str> = self.sides.iter().map(|s| if *s == Side::A { "A" } else { "B" }).collect();
        json!({"sides": sides, "sizes": self.sizes, "weights": ws})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let sides = v
            .get("sides")
            .and_then(|s| s.as_array())
            .ok_or_else(|| Error::ParseError("missing `sides`".into()))?
            .iter()
            .map(|s| match s.as_str() {
                Some("A") => Ok(Side::A),
                Some("B") => Ok(Side::B),
                _ => Err(Error::ParseError(format!("side must be \"A\" or \"B\", got {s}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let sizes = v
            .get("sizes")
            .and_then(|s| s.as_array())
            .ok_or_else(|| Error::ParseError("missing `sizes`".into()))?
            .iter()
            .map(|s| s.as_u64().map(|x| x as usize).ok_or_else(|| Error::ParseError("bad class size".into())))
            .collect::<Result<Vec<_>>>()?;
        if sizes.len() != sides.len() {
            return Err(Error::ParseError("`sides` and `sizes` differ in length".into()));
        }
        let mut g = ColouredGraph::new(sides, sizes);
        let ws = v
            .get("weights")
            .and_then(|w| w.as_array())
            .ok_or_else(|| Error::ParseError("missing `weights`".into()))?;
        for e in ws {
            let t = e
                .as_array()
                .filter(|t| t.len() == 5)
                .ok_or_else(|| Error::ParseError("weight must be [cu, i, cv, j, w]".into()))?;
            let (cu, i, cv, j) = (one_based(&t[0])?, one_based(&t[1])?, one_based(&t[2])?, one_based(&t[3])?);
            if cu >= g.num_colours() || cv >= g.num_colours() || i >= g.sizes[cu] || j >= g.sizes[cv] {
                return Err(Error::IndexOutOfRange(format!("weight ({}, {}), ({}, {})", cu + 1, i + 1, cv + 1, j + 1)));
            }
            g.set(cu, i, cv, j, parse_weight(&t[4])?);
        }
        Ok(g)
    }
}

/// `Σ_{h} Π_{ab} x_{(c(a),h(a)),(c(b),h(b))}^{mult}` where `h(v)` ranges over
/// the class of colour `c(v)` in `g`.
pub fn coloured_hom_eval<W: Scalar>(f: &BipartiteMultigraph, c: &[usize], g: &ColouredGraph<W>) -> Result<W> {
    if c.len() != f.num_vertices() || c.iter().any(|&x| x >= g.num_colours()) {
        return Err(Error::ColourMismatch("colouring does not match pattern and host".into()));
    }
    let sizes: Vec<usize> = c.iter().map(|&x| g.sizes[x]).collect();
    check_maps(&sizes)?;
    let edges = f.global_edges();
    let mut total = W::zero();
    for_each_tuple(&sizes, |h| {
        let mut prod = W::one();
        for &(a, b, k) in &edges {
            let w = g.get(c[a], h[a], c[b], h[b]);
            if w.is_zero() {
                prod = W::zero();
                break;
            }
            prod = prod * w.pow_u32(k);
        }
        if !prod.is_zero() {
            total = total.clone() + prod;
        }
    });
    Ok(total)
}

/// `colhom_F(G)` for a host coloured by the vertices of `F`.
pub fn colhom_eval<W: Scalar>(f: &BipartiteMultigraph, g: &ColouredGraph<W>) -> Result<W> {
    if g.num_colours() != f.num_vertices() {
        return Err(Error::ColourMismatch(format!(
            "{} colours for a pattern with {} vertices",
            g.num_colours(),
            f.num_vertices()
        )));
    }
    let id: Vec<usize> = (0..f.num_vertices()).collect();
    coloured_hom_eval(f, &id, g)
}

/// Labelled evaluation: maps with `h(a_labels[k]) = v[k]` and
/// `h(b_labels[k]) = w[k]`.
pub fn labelled_hom_eval<S: Scalar>(p: &LabelledPattern, v: &[usize], w: &[usize], host: &Host<S>) -> Result<S> {
    if (v.len(), w.len()) != p.arity() {
        return Err(Error::ArityMismatch(format!("{:?} vs ({}, {})", p.arity(), v.len(), w.len())));
    }
    let n_v = p.graph.num_vertices();
    let mut pins: Vec<Option<usize>> = vec![None; n_v];
    let pairs = p
        .a_labels
        .iter()
        .zip(v)
        .map(|(&a, &x)| (a, x))
        .chain(p.b_labels.iter().zip(w).map(|(&b, &y)| (p.graph.b_vertex(b), y)));
    for (vert, val) in pairs {
        match pins[vert] {
            Some(old) if old != val => return Ok(S::zero()),
            _ => pins[vert] = Some(val),
        }
    }
    hom_sum_with(&p.graph, host.n, host.m, &|i, j| host.get(i, j), &pins)
}

/// A homomorphism polynomial map evaluated at one host: a table over
/// `[n]^l × [m]^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub r: usize,
    pub values: Vec<Rational>,
}

impl PolyMap {
    fn sizes(n: usize, m: usize, l: usize, r: usize) -> Vec<usize> {
        let mut s = vec![n; l];
        s.extend(std::iter::repeat(m).take(r));
        s
    }

    pub fn from_fn(n: usize, m: usize, l: usize, r: usize, mut f: impl FnMut(&[usize], &[usize]) -> Rational) -> Self {
        let mut values = Vec::new();
        for_each_tuple(&Self::sizes(n, m, l, r), |t| values.push(f(&t[..l], &t[l..])));
        if l + r == 0 {
            values = vec![f(&[], &[])];
        }
        PolyMap { n, m, l, r, values }
    }

    fn index(&self, v: &[usize], w: &[usize]) -> usize {
        let mut k = 0;
        for &x in v {
            k = k * self.n + x;
        }
        for &y in w {
            k = k * self.m + y;
        }
        k
    }

    pub fn at(&self, v: &[usize], w: &[usize]) -> Rational {
        self.values[self.index(v, w)].clone()
    }

    /// `p ↦ (v, w) ↦ hom_p(v, w)` at `host`.
    pub fn of_pattern(p: &LabelledPattern, host: &Host<Rational>) -> Result<Self> {
        let (l, r) = p.arity();
        let mut err = None;
        let pm = Self::from_fn(host.n, host.m, l, r, |v, w| match labelled_hom_eval(p, v, w, host) {
            Ok(x) => x,
            Err(e) => {
                err = err.clone().or(Some(e));
                Rational::zero()
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(pm),
        }
    }

    /// `[v_i = v_j]` on left labels (`D^{i,j}`).
    pub fn diagonal(n: usize, m: usize, l: usize, r: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, m, l, r, |v, _| if v[i] == v[j] { Rational::one() } else { Rational::zero() })
    }

    pub fn constant(n: usize, m: usize, l: usize, r: usize, c: Rational) -> Self {
        Self::from_fn(n, m, l, r, |_, _| c.clone())
    }

    /// `(φ ⊗ ψ)(v v', w w') = φ(v, w)·ψ(v', w')`.
    pub fn tensor(&self, o: &Self) -> Self {
        Self::from_fn(self.n, self.m, self.l + o.l, self.r + o.r, |v, w| {
            self.at(&v[..self.l], &w[..self.r]) * o.at(&v[self.l..], &w[self.r..])
        })
    }

    /// `(φ ⊙ ψ)(v, w) = φ(v, w)·ψ(v, w)`.
    pub fn glue(&self, o: &Self) -> Result<Self> {
        if (self.l, self.r) != (o.l, o.r) {
            return Err(Error::ArityMismatch("glue needs equal arities".into()));
        }
        Ok(Self::from_fn(self.n, self.m, self.l, self.r, |v, w| self.at(v, w) * o.at(v, w)))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.n, self.m, self.l, self.r, |v, w| self.at(v, w) + o.at(v, w))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_fn(self.n, self.m, self.l, self.r, |v, w| self.at(v, w) * c)
    }

    fn insert(t: &[usize], i: usize, u: usize) -> Vec<usize> {
        let mut out = t.to_vec();
        out.insert(i, u);
        out
    }

    /// `Σ_i` on the left (`side = A`) or right labels, over values not in
    /// `{v_j : j ∈ J}` (indices into the full tuple; empty `J` is plain Σ_i).
    pub fn restricted_sum(&self, side: Side, i: usize, j_set: &[usize]) -> Self {
        let (l, r) = match side {
            Side::A => (self.l - 1, self.r),
            Side::B => (self.l, self.r - 1),
        };
        let range = if side == Side::A { self.n } else { self.m };
        Self::from_fn(self.n, self.m, l, r, |v, w| {
            let mut s = Rational::zero();
            for u in 0..range {
                let (fv, fw) = match side {
                    Side::A => (Self::insert(v, i, u), w.to_vec()),
                    Side::B => (v.to_vec(), Self::insert(w, i, u)),
                };
                let full = if side == Side::A { &fv } else { &fw };
                if j_set.iter().any(|&j| full[j] == u) {
                    continue;
                }
                s += self.at(&fv, &fw);
            }
            s
        })
    }

    pub fn sum(&self, side: Side, i: usize) -> Self {
        self.restricted_sum(side, i, &[])
    }

    /// `Π_{i,J}` on the left labels.
    pub fn restricted_product(&self, i: usize, j_set: &[usize]) -> Self {
        Self::from_fn(self.n, self.m, self.l - 1, self.r, |v, w| {
            let mut p = Rational::one();
            for u in 0..self.n {
                let fv = Self::insert(v, i, u);
                if j_set.iter().any(|&j| fv[j] == u) {
                    continue;
                }
                p *= self.at(&fv, w);
            }
            p
        })
    }
}

/// Patterns, sample hosts and the invertible matrix `M[i][j] = hom_{F_i}(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomBasisCertificate {
    pub patterns: Vec<BipartiteMultigraph>,
    pub points: Vec<Host<Rational>>,
    pub matrix: Vec<Vec<Rational>>,
}

impl HomBasisCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "patterns": self.patterns.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "points": self.points.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "matrix": self.matrix.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

pub const BASIS_ATTEMPTS: usize = 200;

/// Samples `N × N` hosts until the evaluation matrix is invertible.
pub fn find_hom_basis(patterns: &[BipartiteMultigraph], size: usize, seed: u64) -> Result<HomBasisCertificate> {
    for (k, p) in patterns.iter().enumerate() {
        if !p.isolated_vertices().is_empty() {
            return Err(Error::IsolatedVertex(k));
        }
        if p.a_count() > size || p.b_count() > size {
            return Err(Error::InvalidParameter(format!("pattern {k} larger than the host size {size}")));
        }
    }
    for i in 0..patterns.len() {
        for j in i + 1..patterns.len() {
            if are_isomorphic(&patterns[i], &patterns[j])? {
                return Err(Error::NotPairwiseNonIsomorphic(i, j));
            }
        }
    }
    let k = patterns.len();
    let mut rng = rng_from_seed(seed);
    for attempt in 0..BASIS_ATTEMPTS {
        let hi = 3 + 2 * (attempt / 50) as i64;
        let points: Vec<Host<Rational>> = (0..k)
            .map(|_| Host::from_fn(size, size, |_, _| Rational::from_integer(rng.gen_range(0..=hi).into())))
            .collect();
        let matrix: Vec<Vec<Rational>> = patterns
            .iter()
            .map(|p| {
                points
                    .iter()
                    .map(|x| hom_count_factored(p, x.n, x.m, &|i, j| x.get(i, j)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        if !determinant(&matrix).is_zero() {
            return Ok(HomBasisCertificate {
                patterns: patterns.to_vec(),
                points,
                matrix,
            });
        }
    }
    Err(Error::BasisNotFound(BASIS_ATTEMPTS))
}

/// `hom(F, G) = hom(F, H)` for every listed pattern.
pub fn hom_indistinguishable<S: Scalar + PartialEq>(g: &Host<S>, h: &Host<S>, patterns: &[BipartiteMultigraph]) -> Result<bool> {
    for f in patterns {
        let x = hom_count_factored(f, g.n, g.m, &|i, j| g.get(i, j))?;
        let y = hom_count_factored(f, h.n, h.m, &|i, j| h.get(i, j))?;
        if x != y {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rng_from_seed};
    use crate::pattern::{enumerate_patterns, glue, make_cycle, make_path, tensor_union, drop_label};

    fn q(v: i64) -> Rational {
        int(v)
    }

    #[test]
    fn hom_examples() {
        let p2 = make_path(2).unwrap();
        assert_eq!(hom_count(&p2, &Host::<Rational>::ones(2, 2)).unwrap(), q(4));
        let mut iso = BipartiteMultigraph::new(2, 1);
        iso.add_edge(0, 0, 1).unwrap();
        let mut rng = rng_from_seed(4);
        let h = Host::random(3, 2, &mut rng);
        assert_eq!(hom_count(&iso, &h).unwrap(), q(3) * hom_count(&p2, &h).unwrap());
        let double = BipartiteMultigraph::from_edges(1, 1, &[(0, 0, 2)]).unwrap();
        let mut h = Host::<Rational>::zeros(2, 2);
        h.set(0, 0, q(3));
        assert_eq!(hom_count(&double, &h).unwrap(), q(9));
        let big = make_path(14).unwrap();
        assert!(matches!(hom_count(&big, &Host::<Rational>::ones(4, 4)), Err(Error::SizeCap(_))));
    }

    #[test]
    fn factored_agrees_with_literal() {
        let mut rng = rng_from_seed(5);
        for f in enumerate_patterns(5, 2, 5, true) {
            let h = Host::random(2, 3, &mut rng);
            let lit = hom_count(&f, &h).unwrap();
            assert_eq!(hom_count_factored(&f, 2, 3, &|i, j| h.get(i, j)).unwrap(), lit);
            let ones: Host<i128> = Host::ones(2, 3);
            assert_eq!(hom_count(&f, &ones).unwrap(), 2i128.pow(f.a_count() as u32) * 3i128.pow(f.b_count() as u32));
        }
    }

    #[test]
    fn multiplicative_and_permutation_invariant() {
        let mut rng = rng_from_seed(6);
        let pats = enumerate_patterns(4, 2, 4, false);
        let h = Host::random(2, 2, &mut rng);
        for f in pats.iter().step_by(3) {
            for g in pats.iter().step_by(4) {
                let u = f.disjoint_union(g);
                assert_eq!(hom_count(&u, &h).unwrap(), hom_count(f, &h).unwrap() * hom_count(g, &h).unwrap());
            }
            let p = h.permuted(&[1, 0], &[1, 0]);
            assert_eq!(hom_count(f, &p).unwrap(), hom_count(f, &h).unwrap());
        }
    }

    #[test]
    fn colhom_examples() {
        let p2 = make_path(2).unwrap();
        let mut g: ColouredGraph = ColouredGraph::for_pattern(&p2, 1);
        g.set(0, 0, 1, 0, q(7));
        assert_eq!(colhom_eval(&p2, &g).unwrap(), q(7));
        // isolated vertex: factor n
        let mut f = BipartiteMultigraph::new(2, 1);
        f.add_edge(0, 0, 1).unwrap();
        let mut rng = rng_from_seed(8);
        let mut g2: ColouredGraph = ColouredGraph::for_pattern(&f, 3);
        let mut g1: ColouredGraph = ColouredGraph::for_pattern(&p2, 3);
        for i in 0..3 {
            for j in 0..3 {
                let w = crate::exactnum::random_rational(&mut rng);
                g2.set(0, i, 2, j, w.clone());
                g1.set(0, i, 1, j, w);
            }
        }
        assert_eq!(colhom_eval(&f, &g2).unwrap(), q(3) * colhom_eval(&p2, &g1).unwrap());
        // 4-cycle, n = 2, 0/1 weights: compare with direct enumeration
        let c4 = make_cycle(2).unwrap();
        let mut g: ColouredGraph = ColouredGraph::for_pattern(&c4, 2);
        let edges = c4.global_edges();
        let mut bits = 0b1011_0110_1101_0111u64;
        for &(a, b, _) in &edges {
            for i in 0..2 {
                for j in 0..2 {
                    if bits & 1 == 1 {
                        g.set(a, i, b, j, q(1));
                    }
                    bits >>= 1;
                }
            }
        }
        let mut count = 0;
        for h in 0..16u32 {
            let hv = |v: usize| (h >> v & 1) as usize;
            if edges.iter().all(|&(a, b, _)| !g.get(a, hv(a), b, hv(b)).is_zero()) {
                count += 1;
            }
        }
        assert_eq!(colhom_eval(&c4, &g).unwrap(), q(count));
        // frozen: direct enumeration of the 16 colour-respecting maps
        assert_eq!(count, 2);
    }

    #[test]
    fn labelled_examples() {
        let mut rng = rng_from_seed(9);
        let h = Host::random(2, 3, &mut rng);
        let j = LabelledPattern::all_labelled_edgeless(2, 1);
        assert_eq!(labelled_hom_eval(&j, &[1, 0], &[2], &h).unwrap(), q(1));
        let e = LabelledPattern::labelled_edge(1, 1);
        assert_eq!(labelled_hom_eval(&e, &[1], &[2], &h).unwrap(), h.get(1, 2));
        let e2 = LabelledPattern::labelled_edge(2, 1);
        assert_eq!(labelled_hom_eval(&e2, &[0, 1], &[0], &h).unwrap(), q(0));
    }

    #[test]
    fn polymap_identities() {
        let mut rng = rng_from_seed(10);
        let h = Host::random(3, 2, &mut rng);
        let p3 = LabelledPattern::new(make_path(3).unwrap(), vec![0, 1], vec![]).unwrap();
        let e = LabelledPattern::new(make_path(2).unwrap(), vec![0], vec![0]).unwrap();
        let f = LabelledPattern::new(make_path(4).unwrap(), vec![0, 1], vec![]).unwrap();
        let mp = |p: &LabelledPattern| PolyMap::of_pattern(p, &h).unwrap();
        assert_eq!(mp(&tensor_union(&p3, &e)), mp(&p3).tensor(&mp(&e)));
        assert_eq!(mp(&glue(&p3, &f).unwrap()), mp(&p3).glue(&mp(&f)).unwrap());
        assert_eq!(mp(&drop_label(&p3, Side::A, 1).unwrap()), mp(&p3).sum(Side::A, 1));
        assert_eq!(mp(&drop_label(&e, Side::B, 0).unwrap()), mp(&e).sum(Side::B, 0));

        // Σ_{i,J} φ = Σ_i (δ ⊙ φ) with δ = Π_{j∈J} (1 − D^{i,j}), D^{i,j} the
        // all-labelled edgeless pattern with labels i and j on one vertex
        let three = LabelledPattern::new(
            BipartiteMultigraph::from_edges(3, 1, &[(0, 0, 1), (1, 0, 1), (2, 0, 2)]).unwrap(),
            vec![0, 1, 2],
            vec![],
        )
        .unwrap();
        let phi = mp(&three);
        let d_pattern = |i: usize, j: usize| {
            let mut labels = vec![0usize; 3];
            let mut next = 0;
            for k in 0..3 {
                if k == j {
                    continue;
                }
                labels[k] = next;
                next += 1;
            }
            labels[j] = labels[i];
            LabelledPattern::new(BipartiteMultigraph::new(2, 0), labels, vec![]).unwrap()
        };
        let one = PolyMap::constant(3, 2, 3, 0, q(1));
        for (i, js) in [(0usize, vec![1usize]), (0, vec![1, 2]), (2, vec![0]), (1, vec![])] {
            let mut delta = one.clone();
            for &jj in &js {
                let d = mp(&d_pattern(i, jj));
                assert_eq!(d, PolyMap::diagonal(3, 2, 3, 0, i, jj));
                delta = delta.glue(&one.add(&d.scale(&q(-1)))).unwrap();
            }
            let lhs = phi.restricted_sum(Side::A, i, &js);
            let rhs = delta.glue(&phi).unwrap().sum(Side::A, i);
            assert_eq!(lhs, rhs, "i={i} J={js:?}");
        }
        // restricted product times the excluded factors is the full product
        let full = phi.restricted_product(0, &[]);
        let part = phi.restricted_product(0, &[1]);
        for v1 in 0..3 {
            for v2 in 0..3 {
                let missing = phi.at(&[v1, v1, v2], &[]);
                assert_eq!(part.at(&[v1, v2], &[]) * missing, full.at(&[v1, v2], &[]));
            }
        }
    }

    #[test]
    fn emb_examples() {
        let p2 = make_path(2).unwrap();
        assert_eq!(emb_eval(&p2, &Host::<Rational>::ones(3, 2)).unwrap(), q(6));
        let two = p2.disjoint_union(&p2);
        assert_eq!(emb_eval(&two, &Host::<Rational>::ones(2, 2)).unwrap(), q(4));
        let star = BipartiteMultigraph::from_edges(3, 1, &[(0, 0, 1), (1, 0, 1), (2, 0, 1)]).unwrap();
        assert_eq!(emb_eval(&star, &Host::<Rational>::ones(2, 2)).unwrap(), q(0));
    }

    #[test]
    fn hom_to_emb_expansion() {
        let p2 = make_path(2).unwrap();
        assert_eq!(hom_to_emb_terms(&p2).unwrap(), vec![p2.clone()]);
        let two = p2.disjoint_union(&p2);
        let terms = hom_to_emb_terms(&two).unwrap();
        assert_eq!(terms.len(), 4);
        let ones = Host::<Rational>::ones(2, 2);
        let vals: Vec<Rational> = terms.iter().map(|t| emb_eval(t, &ones).unwrap()).collect();
        assert_eq!(vals, vec![q(4); 4]);
        assert!(terms.iter().any(|t| t.edge_list() == vec![(0, 0, 2)]));
        let mut rng = rng_from_seed(12);
        for f in enumerate_patterns(5, 2, 4, true) {
            let h = Host::random(2, 2, &mut rng);
            let sum = hom_to_emb_terms(&f)
                .unwrap()
                .iter()
                .fold(Rational::zero(), |acc, t| acc + emb_eval(t, &h).unwrap());
            assert_eq!(sum, hom_count(&f, &h).unwrap());
        }
    }

    #[test]
    fn basis_examples() {
        let p2 = make_path(2).unwrap();
        let c = find_hom_basis(std::slice::from_ref(&p2), 1, 1).unwrap();
        assert!(!c.matrix[0][0].is_zero());
        let double = BipartiteMultigraph::from_edges(1, 1, &[(0, 0, 2)]).unwrap();
        let c = find_hom_basis(&[p2.clone(), double], 2, 1).unwrap();
        assert!(!determinant(&c.matrix).is_zero());
        assert_eq!(find_hom_basis(&[p2.clone(), p2.clone()], 2, 1), Err(Error::NotPairwiseNonIsomorphic(0, 1)));
        let iso = BipartiteMultigraph::new(1, 0);
        assert_eq!(find_hom_basis(&[iso], 2, 1), Err(Error::IsolatedVertex(0)));
    }

    #[test]
    fn indistinguishability_examples() {
        let g = Host::<Rational>::from_bits(2, 2, 0b0111);
        assert!(hom_indistinguishable(&g, &g, &[make_path(3).unwrap()]).unwrap());
        let h = Host::<Rational>::from_bits(2, 2, 0b0011);
        assert!(!hom_indistinguishable(&g, &h, &[make_path(2).unwrap()]).unwrap());
    }

    #[test]
    fn set_partition_counts() {
        let bell: Vec<usize> = (0..7).map(|k| set_partitions(k).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn symbolic_weights() {
        use crate::exactnum::SparsePolynomial;
        let p3 = make_path(3).unwrap();
        let h: Host<SparsePolynomial> = Host::from_fn(1, 2, |i, j| SparsePolynomial::var(crate::circuit::var_name(i, j)));
        let p = hom_count(&p3, &h).unwrap();
        // x11^2 + x12^2
        let s = &SparsePolynomial::var("x_1_1").pow(2) + &SparsePolynomial::var("x_1_2").pow(2);
        assert_eq!(p, s);
    }
}
