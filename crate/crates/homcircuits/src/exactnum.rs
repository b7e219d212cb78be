//! Exact rationals, sparse multivariate polynomials and identity testing.
//!
//! Polynomials keep a sorted variable list and a map from dense exponent
//! vectors to nonzero rational coefficients. Nothing here rounds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Seeded generator used for every randomized step in the crate.
pub type Rng64 = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A random rational `p/q` with `|p| ≤ 9` and `1 ≤ q ≤ 5`.
pub fn random_rational(rng: &mut Rng64) -> Rational {
    let p: i64 = rng.gen_range(-9..=9);
    let q: i64 = rng.gen_range(1..=5);
    rat(p, q)
}

/// `{"num": "...", "den": "..."}` with decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalJson {
    fn from(q: &Rational) -> Self {
        RationalJson {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

impl TryFrom<&RationalJson> for Rational {
    type Error = Error;
    fn try_from(j: &RationalJson) -> Result<Rational> {
        let num: BigInt = j
            .num
            .trim()
            .parse()
            .map_err(|_| Error::ParseError(format!("bad numerator `{}`", j.num)))?;
        let den: BigInt = j
            .den
            .trim()
            .parse()
            .map_err(|_| Error::ParseError(format!("bad denominator `{}`", j.den)))?;
        if den.is_zero() {
            return Err(Error::ParseError("zero denominator".into()));
        }
        Ok(Rational::new(num, den))
    }
}

/// Values a circuit or polynomial can be evaluated in.
///
/// `Rational` is the reference; `i128` is a fast path for integer hosts.
pub trait Scalar: Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> {
    fn from_rational(q: &Rational) -> Option<Self>;
    fn from_u64(v: u64) -> Self;

    fn pow_u32(&self, e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Option<Self> {
        Some(q.clone())
    }
    fn from_u64(v: u64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

impl Scalar for i128 {
    fn from_rational(q: &Rational) -> Option<Self> {
        if q.is_integer() {
            q.numer().to_i128()
        } else {
            None
        }
    }
    fn from_u64(v: u64) -> Self {
        v as i128
    }
}

/// Total map from variable names to rationals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(pub BTreeMap<String, Rational>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn set(&mut self, var: impl Into<String>, value: Rational) {
        self.0.insert(var.into(), value);
    }

    pub fn get(&self, var: &str) -> Result<&Rational> {
        self.0
            .get(var)
            .ok_or_else(|| Error::MissingVariable(var.to_string()))
    }

    /// Uniformly random values for `vars` (see [`random_rational`]).
    pub fn random(vars: &[String], rng: &mut Rng64) -> Self {
        let mut a = Assignment::new();
        for v in vars {
            a.set(v.clone(), random_rational(rng));
        }
        a
    }
}

impl<S: Into<String>> FromIterator<(S, Rational)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, Rational)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// Exact multivariate polynomial over `ℚ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl SparsePolynomial {
    pub fn zero() -> Self {
        SparsePolynomial {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rational::one());
        SparsePolynomial {
            vars: vec![name.into()],
            terms,
        }
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs where a
    /// monomial lists `(variable, exponent)` factors.
    pub fn from_terms<'a, I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<(&'a str, u32)>, Rational)>,
    {
        let mut acc = Self::zero();
        for (mono, c) in terms {
            let mut t = Self::constant(c);
            for (v, e) in mono {
                t = &t * &Self::var(v).pow(e);
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Re-expresses `self` over the sorted superset `vars`.
    fn lift(&self, vars: &[String]) -> BTreeMap<Vec<u32>, Rational> {
        let pos: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.binary_search(v).expect("superset"))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut f = vec![0u32; vars.len()];
                for (k, &p) in pos.iter().enumerate() {
                    f[p] = e[k];
                }
                (f, c.clone())
            })
            .collect()
    }

    fn union_vars(&self, other: &Self) -> Vec<String> {
        let set: BTreeSet<&String> = self.vars.iter().chain(other.vars.iter()).collect();
        set.into_iter().cloned().collect()
    }

    /// Drops variables that occur in no term.
    pub fn normalized(&self) -> Self {
        let used: Vec<usize> = (0..self.vars.len())
            .filter(|&k| self.terms.keys().any(|e| e[k] > 0))
            .collect();
        let vars = used.iter().map(|&k| self.vars[k].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (used.iter().map(|&k| e[k]).collect(), c.clone()))
            .collect();
        SparsePolynomial { vars, terms }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparsePolynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, a: &Assignment) -> Result<Rational> {
        let vals: Vec<&Rational> = self
            .vars
            .iter()
            .map(|v| a.get(v))
            .collect::<Result<_>>()?;
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    t *= Scalar::pow_u32(vals[k], x);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes polynomials for variables; unlisted variables stay.
    pub fn substitute(&self, map: &BTreeMap<String, SparsePolynomial>) -> Self {
        let mut acc = Self::zero();
        for (e, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            for (k, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let base = map
                    .get(&self.vars[k])
                    .cloned()
                    .unwrap_or_else(|| Self::var(self.vars[k].clone()));
                t = &t * &base.pow(x);
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let p = self.normalized();
        serde_json::json!({
            "vars": p.vars,
            "terms": p.terms.iter().map(|(e, c)| serde_json::json!({
                "exp": e,
                "num": c.numer().to_string(),
                "den": c.denom().to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Term {
            exp: Vec<u32>,
            num: String,
            den: String,
        }
        #[derive(Deserialize)]
        struct Raw {
            vars: Vec<String>,
            terms: Vec<Term>,
        }
        let raw: Raw = serde_json::from_value(v.clone())?;
        let mut acc = Self::zero();
        for t in raw.terms {
            if t.exp.len() != raw.vars.len() {
                return Err(Error::ParseError("exponent length mismatch".into()));
            }
            let c = Rational::try_from(&RationalJson {
                num: t.num,
                den: t.den,
            })?;
            let mono = raw
                .vars
                .iter()
                .zip(t.exp.iter())
                .map(|(v, &e)| (v.as_str(), e))
                .collect();
            acc = &acc + &Self::from_terms([(mono, c)]);
        }
        Ok(acc)
    }
}

impl<'a> Add for &'a SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, other: &SparsePolynomial) -> SparsePolynomial {
        let vars = self.union_vars(other);
        let mut terms = self.lift(&vars);
        for (e, c) in other.lift(&vars) {
            let entry = terms.entry(e).or_insert_with(Rational::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        SparsePolynomial { vars, terms }
    }
}

impl<'a> Neg for &'a SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        self.scale(&-Rational::one())
    }
}

impl<'a> Sub for &'a SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, other: &SparsePolynomial) -> SparsePolynomial {
        self + &(-other)
    }
}

impl<'a> Mul for &'a SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, other: &SparsePolynomial) -> SparsePolynomial {
        let vars = self.union_vars(other);
        let a = self.lift(&vars);
        let b = other.lift(&vars);
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let entry = terms.entry(e).or_insert_with(Rational::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        SparsePolynomial { vars, terms }
    }
}

impl Add for SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, other: SparsePolynomial) -> SparsePolynomial {
        &self + &other
    }
}

impl Mul for SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, other: SparsePolynomial) -> SparsePolynomial {
        &self * &other
    }
}

impl Zero for SparsePolynomial {
    fn zero() -> Self {
        SparsePolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for SparsePolynomial {
    fn one() -> Self {
        SparsePolynomial::constant(Rational::one())
    }
}

impl Scalar for SparsePolynomial {
    fn from_rational(q: &Rational) -> Option<Self> {
        Some(SparsePolynomial::constant(q.clone()))
    }
    fn from_u64(v: u64) -> Self {
        SparsePolynomial::constant(Rational::from_integer(BigInt::from(v)))
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(k, &x)| {
                    if x == 1 {
                        self.vars[k].clone()
                    } else {
                        format!("{}^{}", self.vars[k], x)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", a, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Exact structural equality after aligning variable lists.
pub fn poly_equal_symbolic(p: &SparsePolynomial, q: &SparsePolynomial) -> bool {
    (p - q).is_zero()
}

/// Schwartz–Zippel test of `f ≡ g` over `vars`.
///
/// Each trial samples every variable uniformly from integers in `[0, 2^32)`.
/// A wrong "equal" verdict has probability at most
/// `(degree_bound / 2^32)^trials`.
pub fn poly_equal_randomized<F, G>(
    vars: &[String],
    f: F,
    g: G,
    degree_bound: u32,
    trials: usize,
    seed: u64,
) -> Result<bool>
where
    F: Fn(&Assignment) -> Result<Rational>,
    G: Fn(&Assignment) -> Result<Rational>,
{
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    // constants agree everywhere iff they agree once
    let trials = if degree_bound == 0 { 1 } else { trials };
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let mut a = Assignment::new();
        for v in vars {
            let x: u64 = rng.gen_range(0..(1u64 << 32));
            a.set(v.clone(), Rational::from_integer(BigInt::from(x)));
        }
        if f(&a)? != g(&a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves `M x = b` exactly; `None` when `M` is singular.
pub fn solve_linear(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for k in col..=n {
            a[col][k] = &a[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for k in col..=n {
                    let t = &factor * &a[col][k];
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Exact determinant by fraction-carrying Gaussian elimination.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for k in col..n {
                let t = &factor * &a[col][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> SparsePolynomial {
        SparsePolynomial::var("x")
    }
    fn y() -> SparsePolynomial {
        SparsePolynomial::var("y")
    }

    #[test]
    fn eval_examples() {
        let a: Assignment = [("x", int(1)), ("y", int(1))].into_iter().collect();
        assert_eq!((&x() + &y()).eval(&a).unwrap(), int(2));
        assert_eq!(SparsePolynomial::zero().eval(&Assignment::new()).unwrap(), int(0));
        let b: Assignment = [("x", rat(3, 2))].into_iter().collect();
        assert_eq!(x().pow(2).eval(&b).unwrap(), rat(9, 4));
    }

    #[test]
    fn eval_reports_missing_variable() {
        let a: Assignment = [("x", int(1))].into_iter().collect();
        assert_eq!(
            (&x() + &y()).eval(&a),
            Err(Error::MissingVariable("y".into()))
        );
    }

    #[test]
    fn symbolic_equality_examples() {
        assert!(poly_equal_symbolic(&(&x() + &y()), &(&y() + &x())));
        let zero_y = &x() + &y().scale(&int(0));
        assert!(poly_equal_symbolic(&x(), &zero_y));
        assert!(!poly_equal_symbolic(&x(), &x().scale(&int(2))));
    }

    #[test]
    fn randomized_equality_examples() {
        let vars = vec!["x".to_string()];
        let sq = (&x() + &SparsePolynomial::constant(int(1))).pow(2);
        let expanded = SparsePolynomial::from_terms([
            (vec![("x", 2)], int(1)),
            (vec![("x", 1)], int(2)),
            (vec![], int(1)),
        ]);
        assert!(poly_equal_randomized(&vars, |a| sq.eval(a), |a| expanded.eval(a), 2, 5, 1).unwrap());
        let x2 = x().pow(2);
        let x1 = x();
        assert!(!poly_equal_randomized(&vars, |a| x2.eval(a), |a| x1.eval(a), 2, 5, 1).unwrap());
        assert!(matches!(
            poly_equal_randomized(&vars, |a| x1.eval(a), |a| x1.eval(a), 1, 0, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let p = SparsePolynomial::from_terms([
            (vec![("x", 2), ("y", 1)], rat(-3, 7)),
            (vec![], int(5)),
        ]);
        let j = p.to_json();
        assert_eq!(j["vars"], serde_json::json!(["x", "y"]));
        let q = SparsePolynomial::from_json(&j).unwrap();
        assert!(poly_equal_symbolic(&p, &q));
    }

    #[test]
    fn linear_algebra() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        assert_eq!(determinant(&m), int(5));
        let x = solve_linear(&m, &[int(3), int(4)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        let s = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(determinant(&s), int(0));
        assert!(solve_linear(&s, &[int(1), int(1)]).is_none());
    }

    fn random_poly(rng: &mut Rng64, vars: &[&str]) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero();
        let nterms = rng.gen_range(0..5);
        for _ in 0..nterms {
            let mut mono = Vec::new();
            let mut budget = rng.gen_range(0..=4u32);
            for v in vars {
                if budget == 0 {
                    break;
                }
                let e = rng.gen_range(0..=budget);
                budget -= e;
                mono.push((*v, e));
            }
            p = &p + &SparsePolynomial::from_terms([(mono, random_rational(rng))]);
        }
        p
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism() {
        let names = ["a", "b", "c", "d", "e"];
        let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let mut rng = rng_from_seed(11);
        for _ in 0..120 {
            let k = rng.gen_range(1..=5);
            let p = random_poly(&mut rng, &names[..k]);
            let q = random_poly(&mut rng, &names[..k]);
            let a = Assignment::random(&vars, &mut rng);
            let (pv, qv) = (p.eval(&a).unwrap(), q.eval(&a).unwrap());
            assert_eq!((&p + &q).eval(&a).unwrap(), &pv + &qv);
            assert_eq!((&p * &q).eval(&a).unwrap(), &pv * &qv);
            assert!(poly_equal_symbolic(&(&p * &q), &(&q * &p)));
        }
    }

    #[test]
    fn scalar_pow() {
        assert_eq!(Scalar::pow_u32(&3i128, 4), 81);
        assert_eq!(Scalar::pow_u32(&rat(1, 2), 3), rat(1, 8));
        assert_eq!(Scalar::pow_u32(&5i128, 0), 1);
    }
}
