//! Sparse multivariate polynomials over the Gaussian rationals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector, one entry per variable.
pub type Exps = Vec<u32>;

/// A polynomial with named variables and exact coefficients.
///
/// Terms are kept in a `BTreeMap`, so iteration order is lexicographic in
/// the exponent vectors with the first variable most significant. No zero
/// coefficient is ever stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Exps, Scalar>,
}

impl MultiPoly {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        MultiPoly {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: Scalar) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; p.vars.len()], c);
        }
        p
    }

    pub fn one<S: AsRef<str>>(vars: &[S]) -> Self {
        MultiPoly::constant(vars, Scalar::one())
    }

    /// The polynomial `name` itself.
    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Result<Self> {
        let mut p = MultiPoly::zero(vars);
        let k = p.var_index(name).ok_or_else(|| Error::MissingVariable(name.into()))?;
        let mut e = vec![0; p.vars.len()];
        e[k] = 1;
        p.terms.insert(e, Scalar::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms<S, I>(vars: &[S], terms: I) -> Result<Self>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = (Exps, Scalar)>,
    {
        let mut p = MultiPoly::zero(vars);
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(Error::InvalidInput(format!(
                    "exponent vector of length {} for {} variables",
                    e.len(),
                    p.vars.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(var: &str, coeffs: &[Scalar]) -> Self {
        let mut p = MultiPoly::zero(&[var]);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], c.clone());
        }
        p
    }

    fn add_term(&mut self, e: Exps, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exps, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&vec![0; self.vars.len()]).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Degree in `name`; zero when the variable is absent.
    pub fn degree(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(k) => self.degree_at(k),
            None => 0,
        }
    }

    fn degree_at(&self, k: usize) -> u32 {
        self.terms.keys().map(|e| e[k]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Variables that actually occur.
    pub fn used_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&k| self.degree_at(k) > 0)
            .map(|k| self.vars[k].clone())
            .collect()
    }

    /// Re-expresses the polynomial over `vars`. Every variable of positive
    /// degree must be present in `vars`.
    pub fn with_vars<S: AsRef<str>>(&self, vars: &[S]) -> Result<Self> {
        let target: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        let map: Vec<Option<usize>> =
            self.vars.iter().map(|v| target.iter().position(|t| t == v)).collect();
        for (k, m) in map.iter().enumerate() {
            if m.is_none() && self.degree_at(k) > 0 {
                return Err(Error::MissingVariable(self.vars[k].clone()));
            }
        }
        let mut out = MultiPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (k, m) in map.iter().enumerate() {
                if let Some(j) = m {
                    ne[*j] = e[k];
                }
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Drops variables that do not occur.
    pub fn trimmed(&self) -> Self {
        let used = self.used_vars();
        self.with_vars(&used).expect("used vars cover the polynomial")
    }

    /// Brings two polynomials into one variable universe: `a`'s variables
    /// followed by any new ones from `b`.
    pub fn unify(a: &MultiPoly, b: &MultiPoly) -> (MultiPoly, MultiPoly) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let mut vars = a.vars.clone();
        for v in &b.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        (a.with_vars(&vars).unwrap(), b.with_vars(&vars).unwrap())
    }

    pub fn rename(&self, from: &str, to: &str) -> Self {
        let mut p = self.clone();
        if let Some(k) = p.var_index(from) {
            p.vars[k] = to.to_string();
        }
        p
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Coefficients with respect to `name`, index `k` holding the
    /// coefficient of `name^k`. The coefficients keep the full variable list.
    pub fn coeffs_in(&self, name: &str) -> Vec<MultiPoly> {
        let k = match self.var_index(name) {
            Some(k) => k,
            None => return vec![self.clone()],
        };
        let d = self.degree_at(k) as usize;
        let mut out = vec![MultiPoly::zero(&self.vars); d + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[k] = 0;
            out[e[k] as usize].terms.insert(ne, c.clone());
        }
        out
    }

    /// Inverse of [`coeffs_in`](Self::coeffs_in).
    pub fn from_coeffs_in(name: &str, coeffs: &[MultiPoly]) -> Result<Self> {
        let mut vars: Vec<String> = vec![name.to_string()];
        for c in coeffs {
            for v in &c.vars {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        let x = MultiPoly::var(&vars, name)?;
        let mut acc = MultiPoly::zero(&vars);
        for c in coeffs.iter().rev() {
            acc = &(&acc * &x) + &c.with_vars(&vars)?;
        }
        Ok(acc)
    }

    pub fn leading_coeff_in(&self, name: &str) -> MultiPoly {
        self.coeffs_in(name).pop().unwrap_or_else(|| MultiPoly::zero(&self.vars))
    }

    pub fn derivative(&self, name: &str) -> Self {
        let mut out = MultiPoly::zero(&self.vars);
        if let Some(k) = self.var_index(name) {
            for (e, c) in &self.terms {
                if e[k] > 0 {
                    let mut ne = e.clone();
                    ne[k] -= 1;
                    out.add_term(ne, c * &Scalar::from_int(e[k] as i64));
                }
            }
        }
        out
    }

    /// Numeric evaluation, Horner style in each variable. Coefficients are
    /// converted to floating point only at the leaves.
    pub fn eval(&self, assignment: &HashMap<String, Complex64>) -> Result<Complex64> {
        let mut vals = Vec::with_capacity(self.vars.len());
        for (k, v) in self.vars.iter().enumerate() {
            match assignment.get(v) {
                Some(&z) => vals.push(z),
                None if self.degree_at(k) == 0 => vals.push(Complex64::new(0.0, 0.0)),
                None => return Err(Error::MissingVariable(v.clone())),
            }
        }
        Ok(self.eval_slice(&vals))
    }

    /// Evaluation with values given in variable order.
    pub fn eval_slice(&self, vals: &[Complex64]) -> Complex64 {
        let terms: Vec<(&Exps, Complex64)> =
            self.terms.iter().map(|(e, c)| (e, c.to_c64())).collect();
        horner(&terms, 0, vals)
    }

    pub fn eval_exact(&self, assignment: &HashMap<String, Scalar>) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        let mut vals = Vec::with_capacity(self.vars.len());
        for (k, v) in self.vars.iter().enumerate() {
            match assignment.get(v) {
                Some(z) => vals.push(z.clone()),
                None if self.degree_at(k) == 0 => vals.push(Scalar::zero()),
                None => return Err(Error::MissingVariable(v.clone())),
            }
        }
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &p) in vals.iter().zip(e) {
                if p > 0 {
                    t = &t * &x.pow(p);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Replaces `name` by the constant `value`, keeping the variable list.
    pub fn specialize(&self, name: &str, value: &Scalar) -> Self {
        let k = match self.var_index(name) {
            Some(k) => k,
            None => return self.clone(),
        };
        let mut out = MultiPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[k] = 0;
            out.add_term(ne, c * &value.pow(e[k]));
        }
        out
    }

    /// Composition: replaces `name` by the polynomial `q`.
    pub fn substitute(&self, name: &str, q: &MultiPoly) -> Self {
        if self.var_index(name).is_none() {
            return self.clone();
        }
        let (p, q) = MultiPoly::unify(self, q);
        let coeffs = p.coeffs_in(name);
        let mut acc = MultiPoly::zero(&p.vars);
        for c in coeffs.iter().rev() {
            acc = &(&acc * &q) + c;
        }
        acc
    }

    /// Largest term in lexicographic order.
    pub fn lex_leading(&self) -> Option<(&Exps, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Scaled so that the lexicographically largest term has coefficient 1.
    pub fn monic(&self) -> Self {
        match self.lex_leading() {
            Some((_, c)) => self.scale(&c.inv().unwrap()),
            None => self.clone(),
        }
    }

    /// True when `self = c * other` for a nonzero scalar `c` (after aligning
    /// variables by name).
    pub fn is_scalar_multiple_of(&self, other: &MultiPoly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let (a, b) = MultiPoly::unify(self, other);
        a.monic() == b.monic()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        if d.is_zero() {
            return None;
        }
        let (mut r, d) = MultiPoly::unify(self, d);
        let (de, dc) = d.lex_leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut q = MultiPoly::zero(&r.vars);
        while let Some((re, rc)) = r.lex_leading().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let me: Exps = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let m = MultiPoly::from_terms(&r.vars, [(me, &rc / &dc)]).unwrap();
            r = &r - &(&m * &d);
            q = &q + &m;
        }
        Some(q)
    }

    /// Pseudo-remainder of `self` by `b` in `name` (a scalar multiple of the
    /// true pseudo-remainder by a power of `lc(b)`).
    pub fn prem(&self, b: &MultiPoly, name: &str) -> MultiPoly {
        let (mut r, b) = MultiPoly::unify(self, b);
        let db = b.degree(name);
        let lcb = b.leading_coeff_in(name);
        let x = match MultiPoly::var(&r.vars, name) {
            Ok(x) => x,
            Err(_) => return MultiPoly::zero(&r.vars),
        };
        while !r.is_zero() && r.degree(name) >= db {
            let dr = r.degree(name);
            let lcr = r.leading_coeff_in(name);
            r = &(&lcb * &r) - &(&(&lcr * &x.pow(dr - db)) * &b);
        }
        r
    }

    /// GCD of the coefficients with respect to `name`, normalized monic.
    pub fn content_in(&self, name: &str) -> MultiPoly {
        let mut g = MultiPoly::zero(&self.vars);
        for c in self.coeffs_in(name) {
            g = gcd_rec(&g, &c);
            if g.is_constant() && !g.is_zero() {
                return MultiPoly::one(&self.vars);
            }
        }
        g.monic()
    }

    pub fn primitive_part_in(&self, name: &str) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(name);
        self.div_exact(&c).expect("content divides")
    }

    /// Content removed and repeated factors in `name` collapsed to
    /// multiplicity one; normalized monic.
    pub fn squarefree_content(&self, name: &str) -> Result<MultiPoly> {
        if self.degree(name) == 0 {
            return Err(Error::DegreeZero(name.to_string()));
        }
        let pp = self.primitive_part_in(name);
        let g = gcd(&pp, &pp.derivative(name));
        Ok(pp.div_exact(&g).expect("gcd divides").monic())
    }

    /// Sum of |coefficients|, a cheap size measure.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_c64().norm()).sum()
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            kind: Some("poly".into()),
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    re: rat_to_strings(&c.re),
                    im: rat_to_strings(&c.im),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            terms.push((t.exps.clone(), Scalar::new(strings_to_rat(&t.re)?, strings_to_rat(&t.im)?)));
        }
        MultiPoly::from_terms(&j.vars, terms)
    }

    /// Parses expressions such as `8*u*z^3 + 3*(1-u)*z + 1 - u`.
    ///
    /// Supports `+ - * /` (division by constants only), `^` with
    /// non-negative integer exponents, decimal literals (read exactly) and
    /// `i` as the imaginary unit unless `i` is a variable.
    pub fn parse<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        let mut p = Parser { chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, vars: &vars };
        let e = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("unexpected `{}` at {}", p.chars[p.pos], p.pos)));
        }
        Ok(e)
    }
}

fn horner(terms: &[(&Exps, Complex64)], k: usize, vals: &[Complex64]) -> Complex64 {
    if terms.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    if k == vals.len() {
        return terms.iter().map(|t| t.1).sum();
    }
    // terms are sorted lexicographically, so equal exps[k] are contiguous
    let mut groups: Vec<(u32, Complex64)> = Vec::new();
    let mut start = 0;
    while start < terms.len() {
        let p = terms[start].0[k];
        let mut end = start;
        while end < terms.len() && terms[end].0[k] == p {
            end += 1;
        }
        groups.push((p, horner(&terms[start..end], k + 1, vals)));
        start = end;
    }
    let x = vals[k];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prev = groups.last().unwrap().0;
    for &(p, c) in groups.iter().rev() {
        acc *= x.powu(prev - p);
        acc += c;
        prev = p;
    }
    acc * x.powu(prev)
}

fn rat_to_strings(q: &BigRational) -> [String; 2] {
    [q.numer().to_string(), q.denom().to_string()]
}

pub(crate) fn strings_to_rat(s: &[String; 2]) -> Result<BigRational> {
    let n: BigInt = s[0].parse().map_err(|_| Error::Parse(format!("bad integer `{}`", s[0])))?;
    let d: BigInt = s[1].parse().map_err(|_| Error::Parse(format!("bad integer `{}`", s[1])))?;
    if d == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(n, d))
}

/// GCD of two polynomials, normalized monic. Over `Q(i)` the result is
/// unique up to that normalization.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let (a, b) = MultiPoly::unify(a, b);
    gcd_rec(&a, &b).monic()
}

fn gcd_rec(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(&a.vars);
    }
    let n = a.vars.len();
    let v = (0..n).find(|&k| a.degree_at(k) > 0 || b.degree_at(k) > 0).unwrap();
    let name = a.vars[v].clone();
    if a.degree_at(v) == 0 {
        return gcd_rec(a, &b.content_in(&name));
    }
    if b.degree_at(v) == 0 {
        return gcd_rec(&a.content_in(&name), b);
    }
    let ca = a.content_in(&name);
    let cb = b.content_in(&name);
    let c = gcd_rec(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap();
    let mut q = b.div_exact(&cb).unwrap();
    if p.degree_at(v) < q.degree_at(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = p.prem(&q, &name);
        p = q;
        if r.is_zero() {
            break;
        }
        if r.degree_at(v) == 0 {
            p = MultiPoly::one(&a.vars);
            break;
        }
        q = r.primitive_part_in(&name);
    }
    &c * &p.primitive_part_in(&name)
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $m(self, o: &'a MultiPoly) -> MultiPoly {
                let f: fn(&MultiPoly, &MultiPoly) -> MultiPoly = $body;
                if self.vars == o.vars {
                    f(self, o)
                } else {
                    let (a, b) = MultiPoly::unify(self, o);
                    f(&a, &b)
                }
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, o: MultiPoly) -> MultiPoly {
                (&self).$m(&o)
            }
        }
    };
}

poly_binop!(Add, add, |a, b| {
    let mut out = a.clone();
    for (e, c) in &b.terms {
        out.add_term(e.clone(), c.clone());
    }
    out
});

poly_binop!(Sub, sub, |a, b| {
    let mut out = a.clone();
    for (e, c) in &b.terms {
        out.add_term(e.clone(), -c);
    }
    out
});

poly_binop!(Mul, mul, |a, b| {
    let mut acc: BTreeMap<Exps, Scalar> = BTreeMap::new();
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let p = ca * cb;
            match acc.get_mut(&e) {
                Some(v) => *v = &*v + &p,
                None => {
                    acc.insert(e, p);
                }
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    MultiPoly { vars: a.vars.clone(), terms: acc }
});

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(k, &p)| if p == 1 { self.vars[k].clone() } else { format!("{}^{}", self.vars[k], p) })
                .collect();
            let neg = c.is_real() && c.re < BigRational::from_integer(0.into());
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.vars.join(","), self)
    }
}

/// Wire format of a polynomial. Integers travel as decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub re: [String; 2],
    #[serde(default = "zero_pair")]
    pub im: [String; 2],
}

fn zero_pair() -> [String; 2] {
    ["0".into(), "1".into()]
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        MultiPoly::from_json(&j).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(Error::Parse("division by a non-constant or zero".into()));
                    }
                    acc = acc.scale(&d.constant_term().inv().unwrap());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent at {}", start)))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse(format!("expected `)` at {}", self.pos)));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                Ok(MultiPoly::constant(self.vars, parse_decimal(&s)?))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if self.vars.contains(&name) {
                    MultiPoly::var(self.vars, &name)
                } else if name == "i" {
                    Ok(MultiPoly::constant(self.vars, Scalar::i()))
                } else {
                    Err(Error::Parse(format!("unknown variable `{}`", name)))
                }
            }
            other => Err(Error::Parse(format!("unexpected {:?} at {}", other, self.pos))),
        }
    }
}

fn parse_decimal(s: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("bad number `{}`", s));
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    let digits = format!("{}{}", int, frac);
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Ok(Scalar::real(BigRational::new(n, d)))
}
