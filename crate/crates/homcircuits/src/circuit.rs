//! Algebraic circuits: gate-labelled DAGs whose wires carry multiplicities.
//!
//! Gates are kept in topological order (every child has a smaller index
//! than its parent) and the output is the last gate. Input gates are unique
//! per variable and per constant. A wire of multiplicity `k` into a Plus
//! gate contributes `k·child`; into a Times gate it contributes `child^k`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{Assignment, Rational, RationalJson, Rng64, Scalar, SparsePolynomial};

/// Default cap on the number of monomials during symbolic expansion.
pub const EXPAND_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Var(String),
    Const(Rational),
    Plus,
    Times,
}

impl Label {
    pub fn is_input(&self) -> bool {
        matches!(self, Label::Var(_) | Label::Const(_))
    }

    fn short(&self) -> String {
        match self {
            Label::Var(v) => v.clone(),
            Label::Const(c) => c.to_string(),
            Label::Plus => "+".into(),
            Label::Times => "×".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub label: Label,
    /// `(child, multiplicity)`, children sorted and distinct.
    pub children: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitShape {
    General,
    Skew,
    Formula,
    FormulaMulti,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
}

/// `x_<i>_<j>` for the 0-based pair `(i, j)`.
pub fn var_name(i: usize, j: usize) -> String {
    format!("x_{}_{}", i + 1, j + 1)
}

/// `x_<u>_<i>__<v>_<j>` for the 0-based colourful variable.
pub fn colourful_var_name(u: usize, i: usize, v: usize, j: usize) -> String {
    format!("x_{}_{}__{}_{}", u + 1, i + 1, v + 1, j + 1)
}

/// Inverse of [`var_name`].
pub fn parse_var_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("x_")?;
    if rest.contains("__") {
        return None;
    }
    let (i, j) = rest.split_once('_')?;
    let (i, j): (usize, usize) = (i.parse().ok()?, j.parse().ok()?);
    (i >= 1 && j >= 1).then(|| (i - 1, j - 1))
}

/// Inverse of [`colourful_var_name`].
pub fn parse_colourful_var_name(name: &str) -> Option<(usize, usize, usize, usize)> {
    let rest = name.strip_prefix("x_")?;
    let (l, r) = rest.split_once("__")?;
    let (u, i) = l.split_once('_')?;
    let (v, j) = r.split_once('_')?;
    let p = |s: &str| s.parse::<usize>().ok().filter(|&x| x >= 1).map(|x| x - 1);
    Some((p(u)?, p(i)?, p(v)?, p(j)?))
}

/// Builds circuits bottom-up with hash-consed input gates.
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    vars: HashMap<String, usize>,
    consts: HashMap<Rational, usize>,
}

fn normalize_children(children: Vec<(usize, u32)>) -> Vec<(usize, u32)> {
    let mut m: BTreeMap<usize, u32> = BTreeMap::new();
    for (c, k) in children {
        if k > 0 {
            *m.entry(c).or_insert(0) += k;
        }
    }
    m.into_iter().collect()
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn label(&self, g: usize) -> &Label {
        &self.gates[g].label
    }

    pub fn var(&mut self, name: &str) -> usize {
        if let Some(&g) = self.vars.get(name) {
            return g;
        }
        self.gates.push(Gate {
            label: Label::Var(name.to_string()),
            children: Vec::new(),
        });
        self.vars.insert(name.to_string(), self.gates.len() - 1);
        self.gates.len() - 1
    }

    pub fn constant(&mut self, c: Rational) -> usize {
        if let Some(&g) = self.consts.get(&c) {
            return g;
        }
        self.gates.push(Gate {
            label: Label::Const(c.clone()),
            children: Vec::new(),
        });
        self.consts.insert(c, self.gates.len() - 1);
        self.gates.len() - 1
    }

    pub fn int(&mut self, c: i64) -> usize {
        self.constant(Rational::from_integer(c.into()))
    }

    /// Sum gate; an empty sum is the constant 0 and a single child with
    /// multiplicity 1 is returned as is.
    pub fn plus(&mut self, children: Vec<(usize, u32)>) -> usize {
        let ch = normalize_children(children);
        match ch.as_slice() {
            [] => self.int(0),
            [(c, 1)] => *c,
            _ => self.raw(Label::Plus, ch),
        }
    }

    /// Product gate; an empty product is the constant 1.
    pub fn times(&mut self, children: Vec<(usize, u32)>) -> usize {
        let ch = normalize_children(children);
        match ch.as_slice() {
            [] => self.int(1),
            [(c, 1)] => *c,
            _ => self.raw(Label::Times, ch),
        }
    }

    /// Internal gate with no simplification (children merged and sorted).
    pub fn raw(&mut self, label: Label, children: Vec<(usize, u32)>) -> usize {
        assert!(!label.is_input(), "use var/constant for input gates");
        let ch = normalize_children(children);
        assert!(ch.iter().all(|&(c, _)| c < self.gates.len()), "child must exist");
        self.gates.push(Gate { label, children: ch });
        self.gates.len() - 1
    }

    /// Finalizes with `output` as the output, pruning gates it does not
    /// reach; the output becomes the last gate.
    pub fn finish(self, output: usize) -> Circuit {
        let n = self.gates.len();
        let mut live = vec![false; n];
        live[output] = true;
        for g in (0..=output).rev() {
            if live[g] {
                for &(c, _) in &self.gates[g].children {
                    live[c] = true;
                }
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut gates = Vec::new();
        for g in 0..=output {
            if live[g] {
                index[g] = gates.len();
                let gate = &self.gates[g];
                gates.push(Gate {
                    label: gate.label.clone(),
                    children: gate.children.iter().map(|&(c, k)| (index[c], k)).collect(),
                });
            }
        }
        Circuit { gates }
    }
}

impl Circuit {
    /// Builds a circuit from gates in topological order, checking the
    /// structural invariants; the last gate is the output.
    pub fn from_gates(gates: Vec<Gate>) -> Result<Circuit> {
        if gates.is_empty() {
            return Err(Error::InvalidCircuit("no gates".into()));
        }
        let mut seen_inputs: BTreeSet<String> = BTreeSet::new();
        for (g, gate) in gates.iter().enumerate() {
            match &gate.label {
                Label::Var(_) | Label::Const(_) => {
                    if !gate.children.is_empty() {
                        return Err(Error::InvalidCircuit(format!("input gate {} has children", g + 1)));
                    }
                    let key = match &gate.label {
                        Label::Var(v) => format!("v:{v}"),
                        Label::Const(c) => format!("c:{c}"),
                        _ => unreachable!(),
                    };
                    if !seen_inputs.insert(key) {
                        return Err(Error::InvalidCircuit(format!("duplicate input gate {}", g + 1)));
                    }
                }
                Label::Plus | Label::Times => {
                    if gate.children.is_empty() {
                        return Err(Error::InvalidCircuit(format!("internal gate {} has no children", g + 1)));
                    }
                }
            }
            let mut prev = None;
            for &(c, k) in &gate.children {
                if c >= g || k == 0 || prev.is_some_and(|p| p >= c) {
                    return Err(Error::InvalidCircuit(format!("bad wire at gate {}", g + 1)));
                }
                prev = Some(c);
            }
        }
        let c = Circuit { gates };
        let parents = c.parent_counts();
        if let Some(g) = (0..c.len() - 1).find(|&g| parents[g] == 0) {
            return Err(Error::InvalidCircuit(format!("gate {} unreachable from the output", g + 1)));
        }
        Ok(c)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: usize) -> &Gate {
        &self.gates[g]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn output(&self) -> usize {
        self.gates.len() - 1
    }

    pub fn is_input(&self, g: usize) -> bool {
        self.gates[g].label.is_input()
    }

    pub fn num_wires(&self) -> u64 {
        self.gates
            .iter()
            .flat_map(|g| g.children.iter().map(|&(_, k)| k as u64))
            .sum()
    }

    /// `|gates| + Σ wire multiplicities`.
    pub fn size(&self) -> u64 {
        self.gates.len() as u64 + self.num_wires()
    }

    /// Internal gates on a longest output-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            if !gate.label.is_input() {
                d[g] = 1 + gate.children.iter().map(|&(c, _)| d[c]).max().unwrap_or(0);
            }
        }
        d[self.output()]
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vs: Vec<String> = self
            .gates
            .iter()
            .filter_map(|g| match &g.label {
                Label::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        vs.sort();
        vs
    }

    /// Number of distinct parent gates of each gate.
    pub fn parent_counts(&self) -> Vec<usize> {
        let mut p = vec![0; self.len()];
        for gate in &self.gates {
            for &(c, _) in &gate.children {
                p[c] += 1;
            }
        }
        p
    }

    pub fn parents(&self) -> Vec<Vec<(usize, u32)>> {
        let mut p = vec![Vec::new(); self.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            for &(c, k) in &gate.children {
                p[c].push((g, k));
            }
        }
        p
    }

    /// `None` when the shape holds, else a description of a violation.
    pub fn shape_violation(&self, shape: CircuitShape) -> Option<String> {
        match shape {
            CircuitShape::General => None,
            CircuitShape::Skew => self.gates.iter().enumerate().find_map(|(g, gate)| {
                let internal: u32 = gate
                    .children
                    .iter()
                    .filter(|&&(c, _)| !self.is_input(c))
                    .map(|&(_, k)| k)
                    .sum();
                (gate.label == Label::Times && internal > 1)
                    .then(|| format!("times gate {} has {internal} internal child wires", g + 1))
            }),
            CircuitShape::Formula | CircuitShape::FormulaMulti => {
                if shape == CircuitShape::Formula {
                    if let Some(g) = self.gates.iter().position(|gate| gate.children.iter().any(|&(_, k)| k > 1)) {
                        return Some(format!("gate {} has a multiedge", g + 1));
                    }
                }
                let parents = self.parent_counts();
                (0..self.output())
                    .find(|&g| !self.is_input(g) && parents[g] != 1)
                    .map(|g| format!("internal gate {} has {} parents", g + 1, parents[g]))
            }
        }
    }

    pub fn validate(&self, shape: CircuitShape) -> bool {
        self.shape_violation(shape).is_none()
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Rational> {
        self.evaluate_with(|v| a.0.get(v).cloned())
    }

    /// Evaluation in any [`Scalar`] with variable values from `lookup`.
    pub fn evaluate_with<S: Scalar>(&self, lookup: impl Fn(&str) -> Option<S>) -> Result<S> {
        let mut val: Vec<S> = Vec::with_capacity(self.len());
        for gate in &self.gates {
            let v = match &gate.label {
                Label::Var(name) => lookup(name).ok_or_else(|| Error::MissingVariable(name.clone()))?,
                Label::Const(c) => S::from_rational(c)
                    .ok_or_else(|| Error::InvalidParameter(format!("constant {c} not representable")))?,
                Label::Plus => gate.children.iter().fold(S::zero(), |acc, &(c, k)| {
                    acc + S::from_u64(k as u64) * val[c].clone()
                }),
                Label::Times => gate
                    .children
                    .iter()
                    .fold(S::one(), |acc, &(c, k)| acc * val[c].pow_u32(k)),
            };
            val.push(v);
        }
        Ok(val.pop().expect("nonempty"))
    }

    /// Expands the computed polynomial, refusing when a gate's projected
    /// term count exceeds `cap`.
    pub fn expand_symbolic_capped(&self, cap: usize) -> Result<SparsePolynomial> {
        let mut val: Vec<SparsePolynomial> = Vec::with_capacity(self.len());
        let too_big = || Error::SizeCap(format!("symbolic expansion limited to {cap} terms"));
        for gate in &self.gates {
            let p = match &gate.label {
                Label::Var(name) => SparsePolynomial::var(name.clone()),
                Label::Const(c) => SparsePolynomial::constant(c.clone()),
                Label::Plus => {
                    let projected: usize = gate.children.iter().map(|&(c, _)| val[c].num_terms()).sum();
                    if projected > cap {
                        return Err(too_big());
                    }
                    let mut acc = SparsePolynomial::zero();
                    for &(c, k) in &gate.children {
                        acc = &acc + &val[c].scale(&Rational::from_integer(k.into()));
                    }
                    acc
                }
                Label::Times => {
                    // projected count of each pairwise product
                    let mut acc = SparsePolynomial::constant(Rational::one());
                    for &(c, k) in &gate.children {
                        for _ in 0..k {
                            if acc.num_terms().saturating_mul(val[c].num_terms()) > cap {
                                return Err(too_big());
                            }
                            acc = &acc * &val[c];
                        }
                    }
                    acc
                }
            };
            val.push(p);
        }
        Ok(val.pop().expect("nonempty"))
    }

    pub fn expand_symbolic(&self) -> Result<SparsePolynomial> {
        self.expand_symbolic_capped(EXPAND_TERM_CAP)
    }

    pub fn to_json(&self) -> Value {
        let gates: Vec<Value> = self
            .gates
            .iter()
            .enumerate()
            .map(|(g, gate)| {
                let label = match &gate.label {
                    Label::Var(v) => json!({"var": v}),
                    Label::Const(c) => json!({"const": RationalJson::from(c)}),
                    Label::Plus => json!("plus"),
                    Label::Times => json!("times"),
                };
                json!({"id": g + 1, "label": label})
            })
            .collect();
        let wires: Vec<Value> = self
            .gates
            .iter()
            .enumerate()
            .flat_map(|(g, gate)| gate.children.iter().map(move |&(c, k)| json!([g + 1, c + 1, k])))
            .collect();
        json!({"gates": gates, "wires": wires, "output": self.output() + 1})
    }

    /// Reads the JSON form; gates may come in any order as long as the
    /// wires form a DAG with the given output as its unique sink.
    pub fn from_json(v: &Value) -> Result<Circuit> {
        let bad = |m: &str| Error::ParseError(m.to_string());
        let gates = v.get("gates").and_then(|g| g.as_array()).ok_or_else(|| bad("missing `gates`"))?;
        let mut labels: BTreeMap<usize, Label> = BTreeMap::new();
        for g in gates {
            let id = g.get("id").and_then(|x| x.as_u64()).ok_or_else(|| bad("gate without id"))? as usize;
            let l = g.get("label").ok_or_else(|| bad("gate without label"))?;
            let label = match l {
                Value::String(s) if s == "plus" => Label::Plus,
                Value::String(s) if s == "times" => Label::Times,
                Value::Object(o) if o.contains_key("var") => {
                    Label::Var(o["var"].as_str().ok_or_else(|| bad("var must be a string"))?.to_string())
                }
                Value::Object(o) if o.contains_key("const") => {
                    let rj: RationalJson = serde_json::from_value(o["const"].clone())?;
                    Label::Const(Rational::try_from(&rj)?)
                }
                _ => return Err(bad("unknown gate label")),
            };
            if labels.insert(id, label).is_some() {
                return Err(bad("duplicate gate id"));
            }
        }
        let mut children: BTreeMap<usize, Vec<(usize, u32)>> = BTreeMap::new();
        for w in v.get("wires").and_then(|w| w.as_array()).ok_or_else(|| bad("missing `wires`"))? {
            let t = w.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("wire must be [parent, child, mult]"))?;
            let p = t[0].as_u64().ok_or_else(|| bad("bad wire"))? as usize;
            let c = t[1].as_u64().ok_or_else(|| bad("bad wire"))? as usize;
            let k = t[2].as_u64().filter(|&k| k >= 1).ok_or_else(|| bad("bad multiplicity"))? as u32;
            if !labels.contains_key(&p) || !labels.contains_key(&c) {
                return Err(bad("wire to unknown gate"));
            }
            children.entry(p).or_default().push((c, k));
        }
        let output = v.get("output").and_then(|x| x.as_u64()).ok_or_else(|| bad("missing `output`"))? as usize;
        if !labels.contains_key(&output) {
            return Err(bad("unknown output gate"));
        }
        // Kahn's algorithm preferring small ids, so an already topological
        // id order is kept
        let mut parents_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut pending: BTreeMap<usize, usize> = labels.keys().map(|&g| (g, 0)).collect();
        for (&p, ch) in &children {
            let distinct: BTreeSet<usize> = ch.iter().map(|&(c, _)| c).collect();
            for c in distinct {
                parents_of.entry(c).or_default().push(p);
                *pending.get_mut(&p).expect("known gate") += 1;
            }
        }
        let mut ready: BTreeSet<usize> = pending.iter().filter(|(_, &k)| k == 0).map(|(&g, _)| g).collect();
        let mut order = Vec::new();
        while let Some(g) = ready.pop_first() {
            order.push(g);
            for &p in parents_of.get(&g).map(|v| v.as_slice()).unwrap_or(&[]) {
                let k = pending.get_mut(&p).expect("known gate");
                *k -= 1;
                if *k == 0 {
                    ready.insert(p);
                }
            }
        }
        if order.len() != labels.len() {
            return Err(bad("wires contain a cycle"));
        }
        if order.last() != Some(&output) {
            return Err(bad("output must be the unique sink"));
        }
        let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let gates = order
            .iter()
            .map(|g| Gate {
                label: labels[g].clone(),
                children: normalize_children(
                    children.get(g).map(|v| v.iter().map(|&(c, k)| (pos[&c], k)).collect()).unwrap_or_default(),
                ),
            })
            .collect();
        Circuit::from_gates(gates).map_err(|e| Error::ParseError(e.to_string()))
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph C {\n");
        for (g, gate) in self.gates.iter().enumerate() {
            let _ = writeln!(s, "  g{} [label=\"{}\"];", g + 1, gate.label.short().replace('"', "\\\""));
        }
        for (g, gate) in self.gates.iter().enumerate() {
            for &(c, k) in &gate.children {
                let _ = writeln!(s, "  g{} -> g{} [label=\"{}\"];", g + 1, c + 1, k);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Evaluation plan with variables resolved to slots of a value vector;
/// used by the exhaustive sweeps.
#[derive(Debug, Clone)]
pub struct Evaluator<S> {
    ops: Vec<Op<S>>,
}

#[derive(Debug, Clone)]
enum Op<S> {
    Slot(usize),
    Const(S),
    Plus(Vec<(usize, u32)>),
    Times(Vec<(usize, u32)>),
}

impl<S: Scalar> Evaluator<S> {
    pub fn new(c: &Circuit, slot_of: impl Fn(&str) -> Option<usize>) -> Result<Self> {
        let ops = c
            .gates
            .iter()
            .map(|gate| {
                Ok(match &gate.label {
                    Label::Var(v) => Op::Slot(slot_of(v).ok_or_else(|| Error::MissingVariable(v.clone()))?),
                    Label::Const(q) => Op::Const(
                        S::from_rational(q).ok_or_else(|| Error::InvalidParameter(format!("constant {q} not representable")))?,
                    ),
                    Label::Plus => Op::Plus(gate.children.clone()),
                    Label::Times => Op::Times(gate.children.clone()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Evaluator { ops })
    }

    /// Slots `i·m + j` for the variables `x_{i,j}` of an `n × m` host.
    pub fn for_host(c: &Circuit, n: usize, m: usize) -> Result<Self> {
        Self::new(c, |v| parse_var_name(v).filter(|&(i, j)| i < n && j < m).map(|(i, j)| i * m + j))
    }

    pub fn eval(&self, values: &[S]) -> S {
        let mut val: Vec<S> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match op {
                Op::Slot(k) => values[*k].clone(),
                Op::Const(c) => c.clone(),
                Op::Plus(ch) => ch
                    .iter()
                    .fold(S::zero(), |acc, &(c, k)| acc + S::from_u64(k as u64) * val[c].clone()),
                Op::Times(ch) => ch.iter().fold(S::one(), |acc, &(c, k)| acc * val[c].pow_u32(k)),
            };
            val.push(v);
        }
        val.pop().expect("nonempty")
    }
}

/// Random circuit over `vars` with about `internal` internal gates; used by
/// round-trip and evaluation tests.
pub fn random_circuit(rng: &mut Rng64, vars: &[String], internal: usize) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mut pool: Vec<usize> = vars.iter().map(|v| b.var(v)).collect();
    pool.push(b.constant(Rational::from_integer(rng.gen_range(-3i64..=3).into())));
    for _ in 0..internal {
        let k = rng.gen_range(1..=3usize);
        let ch: Vec<(usize, u32)> = (0..k)
            .map(|_| (pool[rng.gen_range(0..pool.len())], rng.gen_range(1..=2u32)))
            .collect();
        let label = if rng.gen_bool(0.5) { Label::Plus } else { Label::Times };
        let g = b.raw(label, ch);
        pool.push(g);
    }
    let top = b.raw(Label::Plus, pool.iter().rev().take(3).map(|&g| (g, 1)).collect());
    b.finish(top)
}

impl Zero for Circuit {
    fn zero() -> Self {
        let mut b = CircuitBuilder::new();
        let z = b.int(0);
        b.finish(z)
    }
    fn is_zero(&self) -> bool {
        self.len() == 1 && matches!(&self.gates[0].label, Label::Const(c) if c.is_zero())
    }
}

impl std::ops::Add for Circuit {
    type Output = Circuit;
    fn add(self, other: Circuit) -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.import(&self);
        let y = b.import(&other);
        let s = b.plus(vec![(x, 1), (y, 1)]);
        b.finish(s)
    }
}

impl CircuitBuilder {
    /// Copies `c` into the builder, sharing input gates; returns its output.
    pub fn import(&mut self, c: &Circuit) -> usize {
        let mut map = Vec::with_capacity(c.len());
        for gate in &c.gates {
            let g = match &gate.label {
                Label::Var(v) => self.var(v),
                Label::Const(q) => self.constant(q.clone()),
                l => self.raw(l.clone(), gate.children.iter().map(|&(ch, k)| (map[ch], k)).collect()),
            };
            map.push(g);
        }
        map[c.output()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rng_from_seed};

    fn plus_xy() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.var("x");
        let y = b.var("y");
        let p = b.plus(vec![(x, 1), (y, 1)]);
        b.finish(p)
    }

    #[test]
    fn shapes() {
        let mut b = CircuitBuilder::new();
        let x = b.var("x");
        let c = b.finish(x);
        for s in [CircuitShape::Formula, CircuitShape::FormulaMulti, CircuitShape::Skew, CircuitShape::General] {
            assert!(c.validate(s));
        }
        let mut b = CircuitBuilder::new();
        let (x, y) = (b.var("x"), b.var("y"));
        let p1 = b.plus(vec![(x, 1), (y, 1)]);
        let p2 = b.raw(Label::Plus, vec![(x, 1), (y, 2)]);
        let t = b.times(vec![(p1, 1), (p2, 1)]);
        let c = b.finish(t);
        assert!(!c.validate(CircuitShape::Skew));
        assert!(c.validate(CircuitShape::FormulaMulti));
        assert!(!c.validate(CircuitShape::Formula));

        let mut b = CircuitBuilder::new();
        let (x, y) = (b.var("x"), b.var("y"));
        let p = b.plus(vec![(x, 1), (y, 1)]);
        let t1 = b.times(vec![(p, 1), (x, 1)]);
        let t2 = b.times(vec![(p, 1), (y, 1)]);
        let top = b.plus(vec![(t1, 1), (t2, 1)]);
        let c = b.finish(top);
        assert!(!c.validate(CircuitShape::Formula));
        assert!(!c.validate(CircuitShape::FormulaMulti));
        assert!(c.validate(CircuitShape::General));
        assert!(c.validate(CircuitShape::Skew));
    }

    #[test]
    fn sizes() {
        let mut b = CircuitBuilder::new();
        let x = b.var("x");
        assert_eq!(b.finish(x).size(), 1);
        assert_eq!(plus_xy().size(), 5);
        let mut b = CircuitBuilder::new();
        let x = b.var("x");
        let p = b.plus(vec![(x, 2)]);
        assert_eq!(b.finish(p).size(), 4);
    }

    #[test]
    fn evaluation_examples() {
        let a: Assignment = [("x", int(2)), ("y", int(3))].into_iter().collect();
        assert_eq!(plus_xy().evaluate(&a).unwrap(), int(5));
        let a: Assignment = [("x", int(3))].into_iter().collect();
        let mut b = CircuitBuilder::new();
        let x = b.var("x");
        let t = b.times(vec![(x, 2)]);
        assert_eq!(b.finish(t).evaluate(&a).unwrap(), int(9));
        let mut b = CircuitBuilder::new();
        let x = b.var("x");
        let p = b.plus(vec![(x, 2)]);
        assert_eq!(b.finish(p).evaluate(&a).unwrap(), int(6));
        assert!(matches!(plus_xy().evaluate(&a), Err(Error::MissingVariable(v)) if v == "y"));
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(
            plus_xy().expand_symbolic().unwrap(),
            &SparsePolynomial::var("x") + &SparsePolynomial::var("y")
        );
        let mut b = CircuitBuilder::new();
        let x = b.var("x");
        let one = b.int(1);
        let m1 = b.int(-1);
        let p = b.plus(vec![(x, 1), (one, 1)]);
        let q = b.plus(vec![(x, 1), (m1, 1)]);
        let t = b.times(vec![(p, 1), (q, 1)]);
        let c = b.finish(t);
        let want = &SparsePolynomial::var("x").pow(2) - &SparsePolynomial::constant(int(1));
        assert_eq!(c.expand_symbolic().unwrap(), want);
        // (x + y)^40 has 41 terms; (x+y)^(2^20) would exceed any cap
        let mut b = CircuitBuilder::new();
        let (x, y) = (b.var("x"), b.var("y"));
        let p = b.plus(vec![(x, 1), (y, 1)]);
        let t = b.times(vec![(p, 40)]);
        let big = b.times(vec![(t, 1), (p, 1)]);
        let c = b.finish(big);
        assert!(matches!(c.expand_symbolic_capped(10), Err(Error::SizeCap(_))));
        assert_eq!(c.expand_symbolic().unwrap().num_terms(), 42);
    }

    #[test]
    fn evaluation_matches_expansion() {
        let mut rng = rng_from_seed(7);
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        for _ in 0..30 {
            let c = random_circuit(&mut rng, &vars, 6);
            let p = c.expand_symbolic().unwrap();
            for _ in 0..20 {
                let a = Assignment::random(&vars, &mut rng);
                assert_eq!(c.evaluate(&a).unwrap(), p.eval(&a).unwrap());
            }
            let ev = Evaluator::<Rational>::new(&c, |v| vars.iter().position(|w| w == v)).unwrap();
            let a = Assignment::random(&vars, &mut rng);
            let vals: Vec<Rational> = vars.iter().map(|v| a.0[v].clone()).collect();
            assert_eq!(ev.eval(&vals), c.evaluate(&a).unwrap());
        }
    }

    #[test]
    fn shape_implications() {
        let mut rng = rng_from_seed(11);
        let vars: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        for _ in 0..200 {
            let c = random_circuit(&mut rng, &vars, 5);
            if c.validate(CircuitShape::Formula) {
                assert!(c.validate(CircuitShape::FormulaMulti));
            }
            if c.validate(CircuitShape::FormulaMulti) || c.validate(CircuitShape::Skew) {
                assert!(c.validate(CircuitShape::General));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = rng_from_seed(3);
        let vars: Vec<String> = (0..3).map(|i| var_name(i, 0)).collect();
        for _ in 0..100 {
            let c = random_circuit(&mut rng, &vars, 8);
            let back = Circuit::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.size(), c.size());
        }
        let mut b = CircuitBuilder::new();
        let k = b.constant(crate::exactnum::rat(-7, 3));
        let c = b.finish(k);
        assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c);
        assert!(Circuit::from_json(&json!({"gates": []})).is_err());
        let cyclic = json!({"gates": [{"id": 1, "label": "plus"}, {"id": 2, "label": "plus"}],
                            "wires": [[1, 2, 1], [2, 1, 1]], "output": 1});
        assert!(matches!(Circuit::from_json(&cyclic), Err(Error::ParseError(_))));
    }

    #[test]
    fn dot_output() {
        let d = plus_xy().to_dot();
        assert_eq!(d.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 3);
        assert_eq!(d.lines().filter(|l| l.contains("->")).count(), 2);
    }

    #[test]
    fn variable_names() {
        assert_eq!(var_name(0, 1), "x_1_2");
        assert_eq!(parse_var_name("x_3_4"), Some((2, 3)));
        assert_eq!(parse_var_name("x_1_1__2_2"), None);
        assert_eq!(parse_colourful_var_name(&colourful_var_name(0, 1, 2, 3)), Some((0, 1, 2, 3)));
    }

    #[test]
    fn builder_dedups_inputs_and_prunes() {
        let mut b = CircuitBuilder::new();
        let x1 = b.var("x");
        let x2 = b.var("x");
        assert_eq!(x1, x2);
        let _unused = b.var("y");
        let c1 = b.int(2);
        let c2 = b.constant(crate::exactnum::rat(4, 2));
        assert_eq!(c1, c2);
        let p = b.plus(vec![(x1, 1), (c1, 1)]);
        let c = b.finish(p);
        assert_eq!(c.len(), 3);
        assert_eq!(c.variables(), vec!["x".to_string()]);
    }
}
