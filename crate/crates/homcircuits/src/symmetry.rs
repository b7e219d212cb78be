//! The `Sym_n × Sym_m` action on circuits over `x_{i,j}`: automorphism
//! extension, symmetry checks, rigidification, orbits and supports.
//!
//! Extensions are found by bottom-up backtracking: input images are forced
//! by the permutation pair and each internal gate must map to a gate with
//! the same label whose children are exactly the images of its children.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde_json::{json, Value};

use crate::circuit::{parse_var_name, var_name, Circuit, CircuitBuilder, Gate, Label};
use crate::error::{Error, Result};
use crate::exactnum::{rng_from_seed, Assignment, Rational};

/// Default node budget of a single automorphism search.
pub const SEARCH_BUDGET: u64 = 5_000_000;

/// `(π, σ) ∈ Sym_n × Sym_m` acting by `x_{i,j} ↦ x_{π(i),σ(j)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationPair {
    pub pi: Vec<usize>,
    pub sigma: Vec<usize>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

impl PermutationPair {
    pub fn new(pi: Vec<usize>, sigma: Vec<usize>) -> Result<Self> {
        if !is_permutation(&pi) || !is_permutation(&sigma) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        Ok(PermutationPair { pi, sigma })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        PermutationPair {
            pi: (0..n).collect(),
            sigma: (0..m).collect(),
        }
    }

    /// Transposition of `i` and `j` on the left (`left = true`) or right side.
    pub fn transposition(n: usize, m: usize, left: bool, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n, m);
        let side = if left { &mut p.pi } else { &mut p.sigma };
        side.swap(i, j);
        p
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        PermutationPair {
            pi: other.pi.iter().map(|&x| self.pi[x]).collect(),
            sigma: other.sigma.iter().map(|&x| self.sigma[x]).collect(),
        }
    }

    pub fn apply_var(&self, name: &str) -> Option<String> {
        let (i, j) = parse_var_name(name)?;
        (i < self.pi.len() && j < self.sigma.len()).then(|| var_name(self.pi[i], self.sigma[j]))
    }

    /// The generating transpositions `(i i+1)` on both sides.
    pub fn generators(n: usize, m: usize) -> Vec<Self> {
        let mut g: Vec<Self> = (0..n.saturating_sub(1)).map(|i| Self::transposition(n, m, true, i, i + 1)).collect();
        g.extend((0..m.saturating_sub(1)).map(|j| Self::transposition(n, m, false, j, j + 1)));
        g
    }
}

/// A gate bijection: `image[g]` is the image of gate `g`.
pub type GateBijection = Vec<usize>;

type Key = (bool, Vec<(usize, u32)>);

/// Lookup tables shared by automorphism searches on one circuit.
struct Index {
    by_key: HashMap<Key, Vec<usize>>,
    var_gate: HashMap<String, usize>,
    /// Colour refinement with all variables alike; every automorphism
    /// preserves it.
    colour: Vec<usize>,
}

/// Initial colours: one per gate type, constants by value, and variables
/// by `var_colour`.
fn initial_colours(c: &Circuit, var_colour: &dyn Fn(&str) -> usize) -> Vec<usize> {
    let mut consts: HashMap<&Rational, usize> = HashMap::new();
    let mut out = Vec::with_capacity(c.len());
    for gate in c.gates() {
        out.push(match &gate.label {
            Label::Plus => 0,
            Label::Times => 1,
            Label::Const(v) => {
                let next = consts.len();
                2 + 2 * *consts.entry(v).or_insert(next)
            }
            Label::Var(name) => 3 + 2 * var_colour(name),
        });
    }
    out
}

/// Colour refinement over `init.len() / c.len()` disjoint copies of `c`,
/// splitting classes by the colours of children and parents.
fn refine_copies(c: &Circuit, parents: &[Vec<(usize, u32)>], init: &[usize]) -> Vec<usize> {
    let n = c.len();
    let copies = init.len() / n;
    let mut colour = init.to_vec();
    let mut classes = colour.iter().collect::<HashSet<_>>().len();
    loop {
        let mut sigs: HashMap<(usize, Vec<(usize, u32)>, Vec<(usize, u32)>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(n * copies);
        for k in 0..copies {
            let base = k * n;
            for g in 0..n {
                let mut ch: Vec<(usize, u32)> = c.gate(g).children.iter().map(|&(h, w)| (colour[base + h], w)).collect();
                ch.sort_unstable();
                let mut pa: Vec<(usize, u32)> = parents[g].iter().map(|&(p, w)| (colour[base + p], w)).collect();
                pa.sort_unstable();
                let fresh = sigs.len();
                next.push(*sigs.entry((colour[base + g], ch, pa)).or_insert(fresh));
            }
        }
        let count = sigs.len();
        colour = next;
        if count == classes {
            return colour;
        }
        classes = count;
    }
}


impl Index {
    fn new(c: &Circuit) -> Self {
        let mut by_key: HashMap<Key, Vec<usize>> = HashMap::new();
        let mut var_gate = HashMap::new();
        for (g, gate) in c.gates().iter().enumerate() {
            match &gate.label {
                Label::Var(v) => {
                    var_gate.insert(v.clone(), g);
                }
                Label::Const(_) => {}
                l => by_key
                    .entry((*l == Label::Times, gate.children.clone()))
                    .or_default()
                    .push(g),
            }
        }
        let colour = refine_copies(c, &c.parents(), &initial_colours(c, &|_| 0));
        Index { by_key, var_gate, colour }
    }
}

/// Backtracking search for a label- and wire-preserving gate bijection
/// whose input images are given by `input_image`, optionally forcing
/// `forced.0 ↦ forced.1`.
fn search(
    c: &Circuit,
    idx: &Index,
    input_image: &dyn Fn(usize) -> Option<usize>,
    forced: Option<(usize, usize)>,
    pair: Option<&[usize]>,
    budget: u64,
) -> Result<Option<GateBijection>> {
    let n = c.len();
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut cands: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut pos = vec![0usize; n];
    let mut steps = 0u64;
    let mut g = 0usize;
    loop {
        if g == n {
            return Ok(Some(img));
        }
        if cands[g].is_none() {
            let gate: &Gate = c.gate(g);
            let mut cs: Vec<usize> = if gate.label.is_input() {
                input_image(g).into_iter().collect()
            } else {
                let mut ch: Vec<(usize, u32)> = gate.children.iter().map(|&(h, k)| (img[h], k)).collect();
                ch.sort_unstable();
                idx.by_key
                    .get(&(gate.label == Label::Times, ch))
                    .cloned()
                    .unwrap_or_default()
            };
            match pair {
                Some(p) => cs.retain(|&x| p[n + x] == p[g]),
                None => cs.retain(|&x| idx.colour[x] == idx.colour[g]),
            }
            if let Some((from, to)) = forced {
                if from == g {
                    cs.retain(|&x| x == to);
                }
            }
            cands[g] = Some(cs);
            pos[g] = 0;
        }
        let cs = cands[g].as_ref().expect("set above");
        let next = (pos[g]..cs.len()).find(|&k| !used[cs[k]]);
        match next {
            Some(k) => {
                steps += 1;
                if steps > budget {
                    return Err(Error::SizeCap("automorphism search budget exhausted".into()));
                }
                img[g] = cs[k];
                used[cs[k]] = true;
                pos[g] = k + 1;
                g += 1;
            }
            None => {
                cands[g] = None;
                if g == 0 {
                    return Ok(None);
                }
                g -= 1;
                used[img[g]] = false;
                img[g] = usize::MAX;
            }
        }
    }
}

fn check_variables(c: &Circuit, n: usize, m: usize) -> Result<()> {
    for v in c.variables() {
        match parse_var_name(&v) {
            Some((i, j)) if i < n && j < m => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "variable {v} is not in X_{{{n},{m}}}"
                )))
            }
        }
    }
    Ok(())
}

fn pair_image<'a>(c: &'a Circuit, idx: &'a Index, p: &'a PermutationPair) -> impl Fn(usize) -> Option<usize> + 'a {
    move |g| match &c.gate(g).label {
        Label::Var(v) => p.apply_var(v).and_then(|w| idx.var_gate.get(&w).copied()),
        Label::Const(_) => Some(g),
        _ => None,
    }
}

/// Extends `p` to an automorphism of `c`, if possible.
pub fn extend_to_automorphism(c: &Circuit, p: &PermutationPair) -> Result<Option<GateBijection>> {
    let idx = Index::new(c);
    extend_with(c, &idx, &c.parents(), p)
}

/// Searches for an extension of `p`, restricting the image of each gate by
/// refining two copies of `c` whose variables are coloured by `p(x)` and
/// by `x` respectively.
fn extend_with(c: &Circuit, idx: &Index, parents: &[Vec<(usize, u32)>], p: &PermutationPair) -> Result<Option<GateBijection>> {
    let id = |name: &str| parse_var_name(name).map_or(usize::MAX / 4, |(i, j)| i * (1 << 20) + j);
    let mut init = initial_colours(c, &|x| p.apply_var(x).map_or(usize::MAX / 4, |y| id(&y)));
    init.extend(initial_colours(c, &id));
    let pair = refine_copies(c, parents, &init);
    let image = pair_image(c, idx, p);
    search(c, idx, &image, None, Some(&pair), SEARCH_BUDGET)
}

/// Every adjacent transposition on either side extends to an automorphism.
pub fn is_symmetric(c: &Circuit, n: usize, m: usize) -> Result<bool> {
    check_variables(c, n, m)?;
    let idx = Index::new(c);
    let parents = c.parents();
    for p in PermutationPair::generators(n, m) {
        if extend_with(c, &idx, &parents, &p)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (x, y) = (self.find(a), self.find(b));
        if x != y {
            self.0[x.max(y)] = x.min(y);
        }
    }
}

/// Colour refinement with all input gates individualised; gates in
/// different classes are never related by an input-fixing automorphism.
fn refinement_classes(c: &Circuit) -> Vec<usize> {
    let n = c.len();
    let parents = c.parents();
    let mut colour: Vec<usize> = (0..n)
        .map(|g| match c.gate(g).label {
            Label::Plus => 0,
            Label::Times => 1,
            _ => 2 + g,
        })
        .collect();
    let mut classes = colour.iter().collect::<BTreeSet<_>>().len();
    loop {
        let mut sigs: BTreeMap<(usize, Vec<(usize, u32)>, Vec<(usize, u32)>), usize> = BTreeMap::new();
        let keys: Vec<_> = (0..n)
            .map(|g| {
                let mut ch: Vec<(usize, u32)> = c.gate(g).children.iter().map(|&(h, k)| (colour[h], k)).collect();
                ch.sort_unstable();
                let mut pa: Vec<(usize, u32)> = parents[g].iter().map(|&(p, k)| (colour[p], k)).collect();
                pa.sort_unstable();
                (colour[g], ch, pa)
            })
            .collect();
        for k in &keys {
            let next = sigs.len();
            sigs.entry(k.clone()).or_insert(next);
        }
        let new: Vec<usize> = keys.iter().map(|k| sigs[k]).collect();
        let count = sigs.len();
        colour = new;
        if count == classes {
            return colour;
        }
        classes = count;
    }
}

/// Refinement of two copies with inputs individualised and `r` (first
/// copy) and `g` (second copy) marked, for searches forcing `r ↦ g`.
fn forced_pair_colours(c: &Circuit, parents: &[Vec<(usize, u32)>], r: usize, g: usize) -> Vec<usize> {
    let base: Vec<usize> = (0..c.len())
        .map(|h| match c.gate(h).label {
            Label::Plus => 0,
            Label::Times => 1,
            _ => 3 + h,
        })
        .collect();
    let mut init = base.clone();
    init[r] = 2;
    init.extend(base);
    init[c.len() + g] = 2;
    refine_copies(c, parents, &init)
}

/// Orbits of the automorphisms fixing every input gate, as a class id per
/// gate (the least gate of the orbit).
pub fn input_fixing_orbits(c: &Circuit) -> Result<Vec<usize>> {
    let idx = Index::new(c);
    let parents = c.parents();
    let colour = refinement_classes(c);
    let mut by_colour: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for g in 0..c.len() {
        by_colour.entry(colour[g]).or_default().push(g);
    }
    let mut uf = UnionFind::new(c.len());
    let fix = |g: usize| c.gate(g).label.is_input().then_some(g);
    for members in by_colour.values().filter(|m| m.len() > 1) {
        let mut reps: Vec<usize> = Vec::new();
        for &g in members {
            let mut placed = false;
            for &r in &reps {
                if uf.find(r) == uf.find(g) {
                    placed = true;
                    break;
                }
                let pair = forced_pair_colours(c, &parents, r, g);
                if let Some(img) = search(c, &idx, &fix, Some((r, g)), Some(&pair), SEARCH_BUDGET)? {
                    for (h, &k) in img.iter().enumerate() {
                        uf.union(h, k);
                    }
                    placed = true;
                    break;
                }
            }
            if !placed {
                reps.push(g);
            }
        }
    }
    Ok((0..c.len()).map(|g| uf.find(g)).collect())
}

/// Only the identity fixes every input gate.
pub fn is_rigid(c: &Circuit) -> Result<bool> {
    let orb = input_fixing_orbits(c)?;
    Ok(orb.iter().enumerate().all(|(g, &o)| g == o))
}

/// Merges each orbit of the input-fixing automorphism group into one gate,
/// summing the multiplicities of wires into a merged orbit; repeated until
/// rigid. Does not check symmetry.
pub fn rigidify_unchecked(c: &Circuit) -> Result<Circuit> {
    let mut cur = c.clone();
    loop {
        let orb = input_fixing_orbits(&cur)?;
        if orb.iter().enumerate().all(|(g, &o)| g == o) {
            return Ok(cur);
        }
        let reps: Vec<usize> = (0..cur.len()).filter(|&g| orb[g] == g).collect();
        let new_index: HashMap<usize, usize> = reps.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let gates: Vec<Gate> = reps
            .iter()
            .map(|&g| {
                let mut ch: BTreeMap<usize, u32> = BTreeMap::new();
                for &(h, k) in &cur.gate(g).children {
                    *ch.entry(new_index[&orb[h]]).or_insert(0) += k;
                }
                Gate {
                    label: cur.gate(g).label.clone(),
                    children: ch.into_iter().collect(),
                }
            })
            .collect();
        cur = Circuit::from_gates(gates)?;
    }
}

/// Rigid circuit computing the same polynomial; requires symmetry.
pub fn rigidify(c: &Circuit, n: usize, m: usize) -> Result<Circuit> {
    if !is_symmetric(c, n, m)? {
        return Err(Error::NotSymmetric);
    }
    let r = rigidify_unchecked(c)?;
    let vars = c.variables();
    let mut rng = rng_from_seed(0x5eed);
    for _ in 0..3 {
        let a = Assignment::random(&vars, &mut rng);
        if r.evaluate(&a)? != c.evaluate(&a)? {
            return Err(Error::InvalidCircuit("rigidification changed the polynomial".into()));
        }
    }
    Ok(r)
}

/// Extensions of all generators and transpositions of a rigid symmetric
/// circuit.
pub struct SymmetryAnalysis<'a> {
    circuit: &'a Circuit,
    n: usize,
    m: usize,
    /// `left[i][j]` / `right[i][j]` for `i < j`: extension of `(i j)`.
    left: Vec<Vec<GateBijection>>,
    right: Vec<Vec<GateBijection>>,
}

fn compose_maps(a: &[usize], b: &[usize]) -> GateBijection {
    b.iter().map(|&x| a[x]).collect()
}

impl<'a> SymmetryAnalysis<'a> {
    /// Checks rigidity and symmetry and extends every transposition.
    pub fn new(c: &'a Circuit, n: usize, m: usize) -> Result<Self> {
        check_variables(c, n, m)?;
        if !is_rigid(c)? {
            return Err(Error::NotRigid);
        }
        let idx = Index::new(c);
        let parents = c.parents();
        let gen_ext = |left: bool, i: usize| -> Result<GateBijection> {
            let p = PermutationPair::transposition(n, m, left, i, i + 1);
            extend_with(c, &idx, &parents, &p)?.ok_or(Error::NotSymmetric)
        };
        let mut sides = Vec::new();
        for (left, k) in [(true, n), (false, m)] {
            let gens: Vec<GateBijection> = (0..k.saturating_sub(1)).map(|i| gen_ext(left, i)).collect::<Result<_>>()?;
            let mut t: Vec<Vec<GateBijection>> = vec![vec![Vec::new(); k]; k];
            for j in 1..k {
                t[j - 1][j] = gens[j - 1].clone();
                for i in (0..j - 1).rev() {
                    // (i j) = (j-1 j)(i j-1)(j-1 j)
                    let s = &gens[j - 1];
                    t[i][j] = compose_maps(s, &compose_maps(&t[i][j - 1], s));
                }
            }
            sides.push(t);
        }
        let right = sides.pop().expect("two sides");
        let left = sides.pop().expect("two sides");
        Ok(SymmetryAnalysis { circuit: c, n, m, left, right })
    }

    pub fn circuit(&self) -> &Circuit {
        self.circuit
    }

    /// Gate orbits under the whole group, as a class id per gate.
    pub fn orbit_ids(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.circuit.len());
        for (t, k) in [(&self.left, self.n), (&self.right, self.m)] {
            for i in 1..k {
                for (g, &h) in t[i - 1][i].iter().enumerate() {
                    uf.union(g, h);
                }
            }
        }
        (0..self.circuit.len()).map(|g| uf.find(g)).collect()
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let ids = self.orbit_ids();
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (g, &o) in ids.iter().enumerate() {
            m.entry(o).or_default().push(g);
        }
        m.into_values().collect()
    }

    pub fn max_orbit(&self) -> usize {
        self.orbits().iter().map(|o| o.len()).max().unwrap_or(0)
    }

    /// Classes of `[k]` under "the transposition fixes `g`".
    fn classes(&self, g: usize, left: bool) -> Vec<BTreeSet<usize>> {
        let (t, k) = if left { (&self.left, self.n) } else { (&self.right, self.m) };
        let mut uf = UnionFind::new(k);
        for j in 0..k {
            for i in 0..j {
                if t[i][j][g] == g {
                    uf.union(i, j);
                }
            }
        }
        let mut m: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for x in 0..k {
            m.entry(uf.find(x)).or_default().insert(x);
        }
        m.into_values().collect()
    }

    /// Size of a minimal support of `g` per side; always well defined.
    pub fn support_size(&self, g: usize) -> (usize, usize) {
        let side = |left: bool, k: usize| {
            let largest = self.classes(g, left).iter().map(|c| c.len()).max().unwrap_or(0);
            k - largest
        };
        (side(true, self.n), side(false, self.m))
    }

    /// The minimal support `(S_A, S_B)` of `g`: per side, the complement of
    /// the largest class of points whose transpositions fix `g`. Fails with
    /// `UniquenessUnavailable` when that class is not unique.
    pub fn minimal_support(&self, g: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
        let side = |left: bool, k: usize| -> Result<BTreeSet<usize>> {
            if k == 0 {
                return Ok(BTreeSet::new());
            }
            let cls = self.classes(g, left);
            let largest = cls.iter().map(|c| c.len()).max().unwrap_or(0);
            let biggest: Vec<&BTreeSet<usize>> = cls.iter().filter(|c| c.len() == largest).collect();
            if biggest.len() != 1 {
                return Err(Error::UniquenessUnavailable(g));
            }
            Ok((0..k).filter(|x| !biggest[0].contains(x)).collect())
        };
        Ok((side(true, self.n)?, side(false, self.m)?))
    }

    /// `max_g |sup(g)|` over both sides.
    pub fn max_sup(&self) -> usize {
        (0..self.circuit.len())
            .map(|g| {
                let (a, b) = self.support_size(g);
                a + b
            })
            .max()
            .unwrap_or(0)
    }

    /// Support depth: the maximum over output-to-input paths of the number
    /// of support-changing gates whose successor on the path, or the final
    /// input gate, is a support-changing child. Exact for formulas.
    pub fn support_depth(&self) -> Result<usize> {
        let c = self.circuit;
        let sups: Vec<BTreeSet<(bool, usize)>> = (0..c.len())
            .map(|g| {
                let (a, b) = self.minimal_support(g)?;
                Ok(a.into_iter().map(|x| (true, x)).chain(b.into_iter().map(|x| (false, x))).collect())
            })
            .collect::<Result<_>>()?;
        let changing = |g: usize, h: usize| !sups[h].is_subset(&sups[g]);
        let mut best = 0;
        for x in (0..c.len()).filter(|&g| c.is_input(g)) {
            let mut val: Vec<Option<usize>> = vec![None; c.len()];
            val[x] = Some(0);
            for g in x + 1..c.len() {
                let gate = c.gate(g);
                let is_sc = gate.children.iter().any(|&(h, _)| changing(g, h));
                // the final input is itself a support-changing child of g
                let end_sc = gate.children.iter().any(|&(h, _)| h == x) && changing(g, x);
                val[g] = gate
                    .children
                    .iter()
                    .filter_map(|&(h, _)| val[h].map(|v| v + usize::from(is_sc && (changing(g, h) || end_sc))))
                    .max();
            }
            if let Some(v) = val[c.output()] {
                best = best.max(v);
            }
        }
        Ok(best)
    }

    pub fn report(&self) -> SupportReport {
        let c = self.circuit;
        let per_gate = (0..c.len())
            .map(|g| GateSupport {
                gate: g,
                size: self.support_size(g),
                support: self.minimal_support(g).ok(),
            })
            .collect();
        SupportReport {
            max_orb: self.max_orbit(),
            max_sup: self.max_sup(),
            support_depth: self.support_depth().ok(),
            per_gate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSupport {
    pub gate: usize,
    pub size: (usize, usize),
    pub support: Option<(BTreeSet<usize>, BTreeSet<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub max_orb: usize,
    pub max_sup: usize,
    /// `None` when some gate has no unique minimal support.
    pub support_depth: Option<usize>,
    pub per_gate: Vec<GateSupport>,
}

impl SupportReport {
    pub fn to_json(&self) -> Value {
        json!({
            "maxOrb": self.max_orb,
            "maxSup": self.max_sup,
            "supportDepth": self.support_depth,
            "perGate": self.per_gate.iter().map(|s| json!({
                "gate": s.gate + 1,
                "supportSize": [s.size.0, s.size.1],
                "support": s.support.as_ref().map(|(a, b)| json!({
                    "a": a.iter().map(|x| x + 1).collect::<Vec<_>>(),
                    "b": b.iter().map(|x| x + 1).collect::<Vec<_>>(),
                })),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Orbits of a rigid symmetric circuit.
pub fn gate_orbits(c: &Circuit, n: usize, m: usize) -> Result<Vec<Vec<usize>>> {
    Ok(SymmetryAnalysis::new(c, n, m)?.orbits())
}

pub fn max_orbit(c: &Circuit, n: usize, m: usize) -> Result<usize> {
    Ok(SymmetryAnalysis::new(c, n, m)?.max_orbit())
}

pub fn minimal_support(c: &Circuit, g: usize, n: usize, m: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    SymmetryAnalysis::new(c, n, m)?.minimal_support(g)
}

pub fn support_depth(c: &Circuit, n: usize, m: usize) -> Result<usize> {
    SymmetryAnalysis::new(c, n, m)?.support_depth()
}

/// Index type of a gate family: one gate, one per row, one per column, or
/// one per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Idx {
    Unit,
    Row,
    Col,
    Cell,
}

#[derive(Debug, Clone)]
struct Family {
    idx: Idx,
    gates: Vec<usize>,
    input: bool,
    used: bool,
}

#[derive(Debug, Clone)]
enum Step {
    Aggregate { src: usize, over_rows: bool, label: Label, k: u32 },
    Combine { f: usize, g: usize, label: Label, kf: u32, kg: u32 },
}

fn idx_len(idx: Idx, n: usize, m: usize) -> usize {
    match idx {
        Idx::Unit => 1,
        Idx::Row => n,
        Idx::Col => m,
        Idx::Cell => n * m,
    }
}

fn join(a: Idx, b: Idx) -> Idx {
    match (a, b) {
        (Idx::Unit, x) | (x, Idx::Unit) => x,
        (Idx::Row, Idx::Row) => Idx::Row,
        (Idx::Col, Idx::Col) => Idx::Col,
        _ => Idx::Cell,
    }
}

/// Gate of `f` at the cell `(i, j)` of a family of type `target`.
fn broadcast(f: &Family, target: Idx, e: usize, m: usize) -> usize {
    let (i, j) = match target {
        Idx::Unit => (0, 0),
        Idx::Row => (e, 0),
        Idx::Col => (0, e),
        Idx::Cell => (e / m, e % m),
    };
    match f.idx {
        Idx::Unit => f.gates[0],
        Idx::Row => f.gates[i],
        Idx::Col => f.gates[j],
        Idx::Cell => f.gates[i * m + j],
    }
}

fn apply_step(b: &mut CircuitBuilder, fams: &[Family], step: &Step, n: usize, m: usize) -> Family {
    match step {
        Step::Aggregate { src, over_rows, label, k } => {
            let f = &fams[*src];
            let (idx, gates) = match (f.idx, over_rows) {
                (Idx::Cell, false) => (
                    Idx::Row,
                    (0..n).map(|i| b.raw(label.clone(), (0..m).map(|j| (f.gates[i * m + j], *k)).collect())).collect(),
                ),
                (Idx::Cell, true) => (
                    Idx::Col,
                    (0..m).map(|j| b.raw(label.clone(), (0..n).map(|i| (f.gates[i * m + j], *k)).collect())).collect(),
                ),
                _ => (Idx::Unit, vec![b.raw(label.clone(), f.gates.iter().map(|&g| (g, *k)).collect())]),
            };
            Family { idx, gates, input: false, used: false }
        }
        Step::Combine { f, g, label, kf, kg } => {
            let (ff, gg) = (&fams[*f], &fams[*g]);
            let idx = join(ff.idx, gg.idx);
            let gates = (0..idx_len(idx, n, m))
                .map(|e| b.raw(label.clone(), vec![(broadcast(ff, idx, e, m), *kf), (broadcast(gg, idx, e, m), *kg)]))
                .collect();
            Family { idx, gates, input: false, used: false }
        }
    }
}

/// Random `Sym_n × Sym_m`-symmetric circuit built from gate families
/// indexed by rows, columns or cells; some families are built twice so the
/// result is usually not rigid. `shape` restricts the construction to skew
/// circuits or formulas. Returns `None` when the budget of `max_gates` is
/// exceeded.
pub fn random_symmetric_circuit(
    rng: &mut crate::exactnum::Rng64,
    n: usize,
    m: usize,
    shape: crate::circuit::CircuitShape,
    steps: usize,
    max_gates: usize,
) -> Option<Circuit> {
    use crate::circuit::CircuitShape;
    use rand::Rng;
    let skew = shape == CircuitShape::Skew;
    let formula = matches!(shape, CircuitShape::Formula | CircuitShape::FormulaMulti);
    let mut b = CircuitBuilder::new();
    let vars = (0..n * m).map(|e| b.var(&var_name(e / m, e % m))).collect();
    let mut fams = vec![Family { idx: Idx::Cell, gates: vars, input: true, used: false }];
    let mut history: Vec<Step> = Vec::new();
    let pick_label = |rng: &mut crate::exactnum::Rng64| if rng.gen_bool(0.5) { Label::Plus } else { Label::Times };
    let mut tries = 0;
    while history.len() < steps && tries < 20 * steps {
        tries += 1;
        let avail: Vec<usize> = (0..fams.len()).filter(|&f| !(formula && fams[f].used && !fams[f].input)).collect();
        let step = match rng.gen_range(0..4) {
            0 | 1 => {
                let src = avail[rng.gen_range(0..avail.len())];
                if fams[src].idx == Idx::Unit {
                    continue;
                }
                let label = pick_label(rng);
                if skew && label == Label::Times && !fams[src].input {
                    continue;
                }
                let k = if formula { 1 } else { rng.gen_range(1..=2) };
                Step::Aggregate { src, over_rows: rng.gen_bool(0.5), label, k }
            }
            2 => {
                let f = avail[rng.gen_range(0..avail.len())];
                let g = avail[rng.gen_range(0..avail.len())];
                if f == g {
                    continue;
                }
                if formula && fams[f].idx != fams[g].idx {
                    continue;
                }
                let label = pick_label(rng);
                let (mut kf, mut kg) = if formula { (1, 1) } else { (rng.gen_range(1..=2), rng.gen_range(1..=2)) };
                if skew && label == Label::Times {
                    match (fams[f].input, fams[g].input) {
                        (true, true) => {}
                        (true, false) => kg = 1,
                        (false, true) => kf = 1,
                        (false, false) => continue,
                    }
                }
                Step::Combine { f, g, label, kf, kg }
            }
            _ => {
                if history.is_empty() {
                    continue;
                }
                let s = history[rng.gen_range(0..history.len())].clone();
                let sources: Vec<usize> = match &s {
                    Step::Aggregate { src, .. } => vec![*src],
                    Step::Combine { f, g, .. } => vec![*f, *g],
                };
                if formula && sources.iter().any(|&x| !fams[x].input) {
                    continue;
                }
                s
            }
        };
        let fam = apply_step(&mut b, &fams, &step, n, m);
        match &step {
            Step::Aggregate { src, .. } => fams[*src].used = true,
            Step::Combine { f, g, .. } => {
                fams[*f].used = true;
                fams[*g].used = true;
            }
        }
        fams.push(fam);
        history.push(step);
        if b.len() > 2 * max_gates {
            return None;
        }
    }
    // reduce every unused family to a single gate and add them up, so that
    // replayed families reach the output
    let mut tops: Vec<usize> = (0..fams.len()).filter(|&f| !fams[f].used && !fams[f].input).collect();
    if tops.is_empty() {
        tops.push(fams.len() - 1);
    }
    let mut outs = Vec::new();
    for mut cur in tops {
        while fams[cur].idx != Idx::Unit {
            let step = Step::Aggregate { src: cur, over_rows: fams[cur].idx == Idx::Col, label: Label::Plus, k: 1 };
            let fam = apply_step(&mut b, &fams, &step, n, m);
            fams.push(fam);
            cur = fams.len() - 1;
        }
        outs.push((fams[cur].gates[0], 1));
    }
    let out = if outs.len() == 1 { outs[0].0 } else { b.plus(outs) };
    let c = b.finish(out);
    (c.len() <= max_gates).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, CircuitShape};
    use crate::exactnum::{int, Rational};

    /// Σ_{i,j} x_{i,j} built as Σ_i (Σ_j x_{i,j}).
    fn sum_all(n: usize, m: usize) -> Circuit {
        let mut b = CircuitBuilder::new();
        let rows: Vec<(usize, u32)> = (0..n)
            .map(|i| {
                let xs = (0..m).map(|j| (b.var(&var_name(i, j)), 1)).collect();
                (b.plus(xs), 1)
            })
            .collect();
        let out = b.plus(rows);
        b.finish(out)
    }

    fn all_pairs(n: usize, m: usize) -> Vec<PermutationPair> {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(k - 1) {
                for pos in 0..k {
                    let mut q = p.clone();
                    q.insert(pos, k - 1);
                    out.push(q);
                }
            }
            out
        }
        let mut out = Vec::new();
        for pi in perms(n) {
            for s in perms(m) {
                out.push(PermutationPair { pi: pi.clone(), sigma: s });
            }
        }
        out
    }

    /// Minimal supports by enumerating the whole group and all subsets.
    fn brute_supports(c: &Circuit, n: usize, m: usize) -> Vec<Vec<(BTreeSet<usize>, BTreeSet<usize>)>> {
        let exts: Vec<(PermutationPair, GateBijection)> = all_pairs(n, m)
            .into_iter()
            .map(|p| {
                let e = extend_to_automorphism(c, &p).unwrap().unwrap();
                (p, e)
            })
            .collect();
        (0..c.len())
            .map(|g| {
                let mut found = Vec::new();
                for size in 0..=n + m {
                    for mask in 0u32..(1 << (n + m)) {
                        if mask.count_ones() as usize != size {
                            continue;
                        }
                        let sa: BTreeSet<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                        let sb: BTreeSet<usize> = (0..m).filter(|&j| mask >> (n + j) & 1 == 1).collect();
                        let ok = exts.iter().all(|(p, e)| {
                            let fixes = sa.iter().all(|&i| p.pi[i] == i) && sb.iter().all(|&j| p.sigma[j] == j);
                            !fixes || e[g] == g
                        });
                        if ok {
                            found.push((sa, sb));
                        }
                    }
                    if !found.is_empty() {
                        break;
                    }
                }
                found
            })
            .collect()
    }

    /// Support depth by enumerating all output-to-input paths.
    fn brute_support_depth(c: &Circuit, sups: &[(BTreeSet<usize>, BTreeSet<usize>)]) -> usize {
        let changing = |g: usize, h: usize| !(sups[h].0.is_subset(&sups[g].0) && sups[h].1.is_subset(&sups[g].1));
        fn walk(c: &Circuit, path: &mut Vec<usize>, best: &mut usize, changing: &dyn Fn(usize, usize) -> bool) {
            let g = *path.last().unwrap();
            if c.is_input(g) {
                let count = path
                    .iter()
                    .filter(|&&x| {
                        let sc: Vec<usize> = c.gate(x).children.iter().map(|e| e.0).filter(|&h| changing(x, h)).collect();
                        !sc.is_empty() && path.iter().any(|y| sc.contains(y))
                    })
                    .count();
                *best = (*best).max(count);
                return;
            }
            for &(h, _) in &c.gate(g).children {
                path.push(h);
                walk(c, path, best, changing);
                path.pop();
            }
        }
        let mut best = 0;
        walk(c, &mut vec![c.output()], &mut best, &changing);
        best
    }

    #[test]
    fn extension_examples() {
        let c = sum_all(2, 2);
        let id = extend_to_automorphism(&c, &PermutationPair::identity(2, 2)).unwrap().unwrap();
        assert_eq!(id, (0..c.len()).collect::<Vec<_>>());
        let swap = PermutationPair::transposition(2, 2, true, 0, 1);
        let e = extend_to_automorphism(&c, &swap).unwrap().unwrap();
        assert_ne!(e, id);
        assert_eq!(e[c.output()], c.output());
        let mut b = CircuitBuilder::new();
        let x = b.var("x_1_1");
        let only = b.finish(x);
        assert!(extend_to_automorphism(&only, &swap).unwrap().is_none());
        assert!(!is_symmetric(&only, 2, 2).unwrap());
        let mut b = CircuitBuilder::new();
        let k = b.int(5);
        assert!(is_symmetric(&b.finish(k), 3, 3).unwrap());
        assert!(is_symmetric(&c, 2, 2).unwrap());
    }

    #[test]
    fn extension_is_a_homomorphism() {
        let c = sum_all(3, 3);
        let gens = PermutationPair::generators(3, 3);
        for a in &gens {
            for b in &gens {
                let ea = extend_to_automorphism(&c, a).unwrap().unwrap();
                let eb = extend_to_automorphism(&c, b).unwrap().unwrap();
                let eab = extend_to_automorphism(&c, &a.compose(b)).unwrap().unwrap();
                assert_eq!(eab, compose_maps(&ea, &eb));
            }
        }
    }

    #[test]
    fn rigidify_merges_duplicates() {
        // Plus over two separate copies each of x11·x22 and x12·x21
        let mut b = CircuitBuilder::new();
        let mut terms = Vec::new();
        for _copy in 0..2 {
            for (p, q) in [((0, 0), (1, 1)), ((0, 1), (1, 0))] {
                let (x, y) = (b.var(&var_name(p.0, p.1)), b.var(&var_name(q.0, q.1)));
                terms.push((b.raw(Label::Times, vec![(x, 1), (y, 1)]), 1));
            }
        }
        let out = b.raw(Label::Plus, terms);
        let c = b.finish(out);
        assert!(is_symmetric(&c, 2, 2).unwrap());
        assert!(!is_rigid(&c).unwrap());
        let r = rigidify(&c, 2, 2).unwrap();
        assert!(is_rigid(&r).unwrap());
        assert!(r.size() < c.size());
        let vars = c.variables();
        let mut rng = rng_from_seed(1);
        for _ in 0..10 {
            let a = Assignment::random(&vars, &mut rng);
            assert_eq!(r.evaluate(&a).unwrap(), c.evaluate(&a).unwrap());
        }
        // already rigid: unchanged
        let s = sum_all(2, 3);
        assert_eq!(rigidify(&s, 2, 3).unwrap(), s);
        let mut b = CircuitBuilder::new();
        let x = b.var("x_1_1");
        let lone = b.finish(x);
        assert_eq!(rigidify(&lone, 2, 2), Err(Error::NotSymmetric));
    }

    #[test]
    fn rigidify_commuted_plus_children() {
        // Times(Plus(x, y), Plus(y, x)) with x, y the two variables of a 1×2 host
        let mut b = CircuitBuilder::new();
        let (x, y) = (b.var("x_1_1"), b.var("x_1_2"));
        let p1 = b.raw(Label::Plus, vec![(x, 1), (y, 1)]);
        let p2 = b.raw(Label::Plus, vec![(y, 1), (x, 1)]);
        let t = b.raw(Label::Times, vec![(p1, 1), (p2, 1)]);
        let c = b.finish(t);
        let r = rigidify(&c, 1, 2).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.gate(r.output()).children, vec![(2, 2)]);
        let mut rng = rng_from_seed(2);
        let vars = c.variables();
        for _ in 0..10 {
            let a = Assignment::random(&vars, &mut rng);
            assert_eq!(r.evaluate(&a).unwrap(), c.evaluate(&a).unwrap());
        }
    }

    #[test]
    fn rigidify_keeps_formulas_with_multiedges() {
        // Plus(Times(S1, S2), S3) with three copies of S = Σ x_{i,j}
        let mut b = CircuitBuilder::new();
        let copy = |b: &mut CircuitBuilder| {
            let xs = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (b.var(&var_name(i, j)), 1)).collect();
            b.raw(Label::Plus, xs)
        };
        let (s1, s2, s3) = (copy(&mut b), copy(&mut b), copy(&mut b));
        let t = b.raw(Label::Times, vec![(s1, 1), (s2, 1)]);
        let out = b.raw(Label::Plus, vec![(t, 1), (s3, 1)]);
        let c = b.finish(out);
        assert!(c.validate(CircuitShape::Formula));
        let r = rigidify(&c, 2, 2).unwrap();
        assert!(r.validate(CircuitShape::FormulaMulti));
        assert!(is_rigid(&r).unwrap());
        assert!(r.size() <= c.size());
    }

    #[test]
    fn orbits_and_supports_of_a_row_sum() {
        let c = sum_all(2, 2);
        let an = SymmetryAnalysis::new(&c, 2, 2).unwrap();
        let orbits = an.orbits();
        assert!(orbits.iter().any(|o| o.len() == 4));
        assert!(orbits.contains(&vec![c.output()]));
        assert_eq!(an.max_orbit(), 4);
        let x = (0..c.len()).find(|&g| c.gate(g).label == Label::Var("x_1_2".into())).unwrap();
        // with n = m = 2 the support of an input is not unique
        assert_eq!(an.support_size(x), (1, 1));
        assert_eq!(an.minimal_support(x), Err(Error::UniquenessUnavailable(x)));
        assert_eq!(an.minimal_support(c.output()).unwrap(), (BTreeSet::new(), BTreeSet::new()));
    }

    #[test]
    fn supports_agree_with_group_enumeration() {
        for (n, m) in [(3, 3), (3, 4), (4, 3), (2, 3)] {
            let c = sum_all(n, m);
            let an = SymmetryAnalysis::new(&c, n, m).unwrap();
            let brute = brute_supports(&c, n, m);
            for g in 0..c.len() {
                let (a, b) = an.support_size(g);
                assert_eq!(brute[g][0].0.len() + brute[g][0].1.len(), a + b);
                match an.minimal_support(g) {
                    Ok(s) => assert_eq!(brute[g], vec![s]),
                    Err(Error::UniquenessUnavailable(_)) => assert!(brute[g].len() > 1),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn support_depth_agrees_with_path_enumeration() {
        let c = sum_all(3, 3);
        let an = SymmetryAnalysis::new(&c, 3, 3).unwrap();
        let sups: Vec<_> = (0..c.len()).map(|g| an.minimal_support(g).unwrap()).collect();
        let d = an.support_depth().unwrap();
        assert_eq!(d, brute_support_depth(&c, &sups));
        // frozen: supports go {i,j} -> {i} -> ∅
        assert_eq!(d, 2);
        let mut b = CircuitBuilder::new();
        let x = b.var("x_1_1");
        let single = b.finish(x);
        assert_eq!(support_depth(&single, 1, 1).unwrap(), 0);
    }

    #[test]
    fn compiled_path_formulas_support_depth() {
        use crate::compile::{compile_auto, CompileShape};
        use crate::pattern::make_path;
        for v in [2, 3] {
            let r = compile_auto(&make_path(v).unwrap(), CompileShape::Td, 4, 4).unwrap();
            let an = SymmetryAnalysis::new(&r.circuit, 4, 4).unwrap();
            let sups: Vec<_> = (0..r.circuit.len()).map(|g| an.minimal_support(g).unwrap()).collect();
            let d = an.support_depth().unwrap();
            assert_eq!(d, brute_support_depth(&r.circuit, &sups));
            // frozen: the P2 formula sums over its two vertices in two layers
            assert_eq!(d, 2, "P{v}");
        }
    }

    #[test]
    fn non_rigid_inputs_are_rejected() {
        let mut b = CircuitBuilder::new();
        let x = b.var("x_1_1");
        let p1 = b.raw(Label::Plus, vec![(x, 1)]);
        let p2 = b.raw(Label::Plus, vec![(x, 1)]);
        let t = b.raw(Label::Times, vec![(p1, 1), (p2, 1)]);
        let c = b.finish(t);
        assert!(matches!(SymmetryAnalysis::new(&c, 1, 1), Err(Error::NotRigid)));
        let r = rigidify_unchecked(&c).unwrap();
        assert_eq!(r.evaluate(&[("x_1_1", int(3))].into_iter().collect()).unwrap(), Rational::from_integer(9.into()));
    }
    #[test]
    fn random_symmetric_circuits_are_symmetric() {
        let mut rng = rng_from_seed(17);
        let mut made = 0;
        for k in 0..60 {
            let shape = [CircuitShape::General, CircuitShape::Skew, CircuitShape::Formula][k % 3];
            let n = 2 + k % 2;
            let Some(c) = random_symmetric_circuit(&mut rng, n, n, shape, 4, 40) else { continue };
            made += 1;
            assert!(c.len() <= 40);
            assert!(is_symmetric(&c, n, n).unwrap());
            if shape != CircuitShape::General {
                assert!(c.validate(shape), "{:?}", c.shape_violation(shape));
            }
            let r = rigidify(&c, n, n).unwrap();
            assert!(is_rigid(&r).unwrap());
            assert!(r.size() <= c.size());
        }
        assert!(made > 20);
    }
}
