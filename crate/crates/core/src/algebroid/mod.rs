//! Algebroid curves `p₀(u) zⁿ + p₁(u) zⁿ⁻¹ + … + pₙ(u) = 0`: Puiseux
//! branches, singular points, path tracking and monodromy.

mod puiseux;
mod track;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elimination::discriminant;
use crate::error::{Error, Result};
use crate::poly::{gcd, MultiPoly, PolyJson};
use crate::roots::{distinct_roots, poly_roots};
use crate::scalar::{Coeff, Scalar};
use crate::series::{CoeffJson, Series};

use puiseux::{Chain, Descent, RawBranch, Rows, Val};

pub use track::{monodromy, monodromy_at_infinity, monodromy_product, track_branch, MonodromyPermutation, TrackOptions};

/// Where an expansion is centred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Place {
    Finite(Complex64),
    Infinity,
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Place::Finite(z) => [z.re, z.im].serialize(s),
            Place::Infinity => "infinity".serialize(s),
        }
    }
}

/// `p₀(u) zⁿ + … + pₙ(u)` with polynomial coefficients.
#[derive(Clone)]
pub struct AlgebroidCurve {
    f: MultiPoly,
    n: u32,
    p: Vec<MultiPoly>,
    // numeric coefficients: num[j][i] is the coefficient of u^i z^j
    num: Vec<Vec<Complex64>>,
    singular: OnceLock<Vec<Complex64>>,
}

impl std::fmt::Debug for AlgebroidCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AlgebroidCurve({} = 0)", self.f)
    }
}

impl AlgebroidCurve {
    /// Builds a curve from a polynomial in `u` and `z`.
    pub fn new(f: &MultiPoly) -> Result<Self> {
        let f = f.with_vars(&["u", "z"]).map_err(|e| match e {
            Error::MissingVariable(v) => Error::InvariantViolation(format!("unexpected variable `{}` in curve", v)),
            e => e,
        })?;
        let n = f.degree("z");
        if n == 0 {
            return Err(Error::InvariantViolation("curve has degree 0 in z".into()));
        }
        let mut p: Vec<MultiPoly> = f.coeffs_in("z").into_iter().rev().map(|c| c.with_vars(&["u"]).unwrap()).collect();
        for c in p.iter_mut() {
            *c = c.with_vars(&["u"]).unwrap();
        }
        if p[0].is_zero() {
            return Err(Error::InvariantViolation("p0 is identically zero".into()));
        }
        let g = gcd(&f, &f.derivative("z"));
        if g.degree("z") > 0 {
            return Err(Error::NotSquareFree);
        }
        let du = f.degree("u") as usize;
        let mut num = vec![vec![Complex64::new(0.0, 0.0); du + 1]; n as usize + 1];
        for (e, c) in f.terms() {
            num[e[1] as usize][e[0] as usize] = c.to_c64();
        }
        Ok(AlgebroidCurve { f, n, p, num, singular: OnceLock::new() })
    }

    /// From coefficients `p[0] … p[n]`, `p[0]` multiplying `zⁿ`.
    pub fn from_coeffs(p: &[MultiPoly]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvariantViolation("empty coefficient list".into()));
        }
        if p[0].is_zero() {
            return Err(Error::InvariantViolation("p0 is identically zero".into()));
        }
        let n = p.len() - 1;
        let vars = ["u", "z"];
        let z = MultiPoly::var(&vars, "z")?;
        let mut f = MultiPoly::zero(&vars);
        for (k, c) in p.iter().enumerate() {
            let c = c.with_vars(&vars).map_err(|e| match e {
                Error::MissingVariable(v) => Error::InvariantViolation(format!("coefficient uses variable `{}`", v)),
                e => e,
            })?;
            f = &f + &(&c * &z.pow((n - k) as u32));
        }
        if f.degree("z") as usize != n {
            return Err(Error::InvariantViolation("p0 is identically zero".into()));
        }
        AlgebroidCurve::new(&f)
    }

    pub fn parse(src: &str) -> Result<Self> {
        AlgebroidCurve::new(&MultiPoly::parse(src, &["u", "z"])?)
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.f
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// `p[k]` multiplies `z^(n−k)`.
    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.p
    }

    fn eval_rows(&self, u: Complex64) -> Vec<Complex64> {
        self.num
            .iter()
            .map(|row| row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + c))
            .collect()
    }

    /// Ascending coefficients of `F(u, ·)` in `z`.
    pub fn z_coeffs(&self, u: Complex64) -> Vec<Complex64> {
        self.eval_rows(u)
    }

    pub fn eval(&self, u: Complex64, z: Complex64) -> Complex64 {
        self.eval_rows(u).iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `(F, F_u, F_z, F_zz)` at `(u, z)`.
    pub fn partials(&self, u: Complex64, z: Complex64) -> [Complex64; 4] {
        let zero = Complex64::new(0.0, 0.0);
        let (mut f, mut fu, mut fz, mut fzz) = (zero, zero, zero, zero);
        let mut zp = vec![Complex64::new(1.0, 0.0)];
        for k in 1..=self.n as usize {
            zp.push(zp[k - 1] * z);
        }
        for (j, row) in self.num.iter().enumerate() {
            let mut a = zero;
            let mut da = zero;
            for c in row.iter().rev() {
                da = da * u + a;
                a = a * u + c;
            }
            f += a * zp[j];
            fu += da * zp[j];
            if j >= 1 {
                fz += a * zp[j - 1] * j as f64;
            }
            if j >= 2 {
                fzz += a * zp[j - 2] * (j * (j - 1)) as f64;
            }
        }
        [f, fu, fz, fzz]
    }

    /// Roots of `F(u, ·)` sorted by real then imaginary part.
    pub fn branch_values(&self, u: Complex64) -> Result<Vec<Complex64>> {
        let mut r = poly_roots(&self.z_coeffs(u))?;
        sort_values(&mut r);
        Ok(r)
    }

    /// `F(c + w, z)` as rows indexed by the power of `z`, exact.
    fn rows_at(&self, c: &Scalar) -> Rows<Scalar> {
        let vars = ["u", "z"];
        let shift = &MultiPoly::var(&vars, "u").unwrap() + &MultiPoly::constant(&vars, c.clone());
        let g = self.f.substitute("u", &shift);
        rows_of(&g, "u")
    }

    fn rows_at_numeric(&self, c: Complex64) -> Rows<Complex64> {
        // Taylor shift of every coefficient polynomial
        self.num
            .iter()
            .map(|row| {
                let d = row.len();
                (0..d)
                    .map(|m| (m..d).map(|k| row[k] * c.powu((k - m) as u32) * binomial(k, m)).sum())
                    .collect()
            })
            .collect()
    }

    /// `s^{deg_u F} F(1/s, z)`, exact.
    fn rows_at_infinity(&self) -> Rows<Scalar> {
        let du = self.f.degree("u");
        let mut rows = vec![vec![Scalar::zero(); du as usize + 1]; self.n as usize + 1];
        for (e, c) in self.f.terms() {
            rows[e[1] as usize][(du - e[0]) as usize] = c.clone();
        }
        rows
    }

    /// Finite singular locations (roots of `p₀` and of the discriminant),
    /// cached.
    pub fn singular_locations(&self) -> Result<&[Complex64]> {
        if let Some(s) = self.singular.get() {
            return Ok(s);
        }
        let pts = self.compute_singular_locations()?.into_iter().map(|(z, _)| z).collect();
        Ok(self.singular.get_or_init(|| pts))
    }

    fn compute_singular_locations(&self) -> Result<Vec<(Complex64, Source)>> {
        let mut out: Vec<(Complex64, Source)> = Vec::new();
        for z in distinct_roots(&self.p[0], "u")? {
            out.push((z, Source::P0Zero));
        }
        if self.n >= 2 {
            let d = discriminant(&self.f, "z")?.with_vars(&["u"])?;
            if d.is_zero() {
                return Err(Error::NotSquareFree);
            }
            for z in distinct_roots(&d, "u")? {
                match out.iter_mut().find(|(w, _)| (w - z).norm() < 1e-8) {
                    Some(entry) => {
                        if entry.1 == Source::P0Zero {
                            entry.1 = Source::Both;
                        }
                    }
                    None => out.push((z, Source::DiscriminantRoot)),
                }
            }
        }
        out.sort_by(|a, b| cmp_c(a.0, b.0));
        Ok(out)
    }

    /// Puiseux expansion of all `n` branches at a finite center.
    pub fn puiseux_expand(&self, center: Complex64, order: usize) -> Result<Vec<PuiseuxBranch>> {
        let exact = Scalar::approximate(center, 1e-12, 1_000_000).filter(|s| {
            // snap only when the snapped point is the intended one
            (s.to_c64() - center).norm() <= 1e-12 * center.norm().max(1.0)
                || self.is_exactly_singular(s)
        });
        let descent = Descent { order, tol: 1e-10 };
        let mut raw = Vec::new();
        let place = match &exact {
            Some(s) => {
                let rows = self.rows_at(s);
                descent.run(&rows, true, self.n as usize, &Chain::start(), &mut raw)?;
                Place::Finite(s.to_c64())
            }
            None => {
                let rows = self.rows_at_numeric(center);
                descent.run(&rows, true, self.n as usize, &Chain::start(), &mut raw)?;
                Place::Finite(center)
            }
        };
        Ok(assemble(raw, place, order))
    }

    /// Expansion at `u = ∞` in the local parameter `s = 1/u`.
    pub fn puiseux_at_infinity(&self, order: usize) -> Result<Vec<PuiseuxBranch>> {
        let descent = Descent { order, tol: 1e-10 };
        let mut raw = Vec::new();
        descent.run(&self.rows_at_infinity(), true, self.n as usize, &Chain::start(), &mut raw)?;
        Ok(assemble(raw, Place::Infinity, order))
    }

    fn is_exactly_singular(&self, s: &Scalar) -> bool {
        let a: HashMap<String, Scalar> = [("u".to_string(), s.clone())].into_iter().collect();
        if self.p[0].eval_exact(&a).map(|v| v.is_zero()).unwrap_or(false) {
            return true;
        }
        self.n >= 2
            && discriminant(&self.f, "z")
                .and_then(|d| d.eval_exact(&a))
                .map(|v| v.is_zero())
                .unwrap_or(false)
    }

    /// Classifies every finite singular point and the point at infinity.
    pub fn singular_points(&self) -> Result<SingularityReport> {
        let mut points = Vec::new();
        for (z, source) in self.compute_singular_locations()? {
            let branches = self.puiseux_expand(z, 4)?;
            points.push(SingularPoint::classify(Place::Finite(z), source, &branches, self.n));
        }
        let inf = self.puiseux_at_infinity(4)?;
        points.push(SingularPoint::classify(Place::Infinity, Source::Infinity, &inf, self.n));
        Ok(SingularityReport { points })
    }

    pub fn to_json(&self) -> CurveJson {
        CurveJson { kind: Some("curve".into()), n: self.n, p: self.p.iter().map(|c| PolySpec::Poly(c.to_json())).collect() }
    }

    pub fn from_json(j: &CurveJson) -> Result<Self> {
        if j.p.len() != j.n as usize + 1 {
            return Err(Error::InvariantViolation(format!("n = {} needs {} coefficients, found {}", j.n, j.n + 1, j.p.len())));
        }
        let p = j.p.iter().map(|c| c.to_poly()).collect::<Result<Vec<_>>>()?;
        AlgebroidCurve::from_coeffs(&p)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |r, i| r * (n - i) as f64 / (i + 1) as f64)
}

fn rows_of(g: &MultiPoly, var: &str) -> Rows<Scalar> {
    let n = g.degree("z") as usize;
    let d = g.degree(var) as usize;
    let iu = g.var_index(var).unwrap();
    let iz = g.var_index("z").unwrap();
    let mut rows = vec![vec![Scalar::zero(); d + 1]; n + 1];
    for (e, c) in g.terms() {
        rows[e[iz] as usize][e[iu] as usize] = c.clone();
    }
    rows
}

fn cmp_f(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0) {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

pub(crate) fn cmp_c(a: Complex64, b: Complex64) -> Ordering {
    cmp_f(a.re, b.re).then(cmp_f(a.im, b.im))
}

pub(crate) fn sort_values(v: &mut [Complex64]) {
    v.sort_by(|a, b| cmp_c(*a, *b));
}

/// One fractional power series branch:
/// `z = Σ_k coeffs[k] t^(low + k)` with `t^e = u − c` (or `t^e = 1/u` at
/// infinity).
#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxBranch {
    pub center: Place,
    pub e: u32,
    pub low: i32,
    pub order: usize,
    /// Branches in one cycle share this id.
    pub cycle: usize,
    #[serde(serialize_with = "ser_c64s")]
    pub coeffs: Vec<Complex64>,
    /// Exact coefficients when the expansion never left `Q(i)`.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_exact")]
    pub exact: Option<Vec<Scalar>>,
}

impl PuiseuxBranch {
    pub fn eval_t(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc * t.powi(self.low)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.e == 1 && self.low >= 0
    }

    pub fn is_polar(&self) -> bool {
        self.low < 0
    }

    pub fn is_algebraic_element(&self) -> bool {
        self.e > 1
    }

    /// Laurent series in `t` of the branch, numeric.
    pub fn series(&self) -> Series<Complex64> {
        Series::new(Complex64::new(0.0, 0.0), self.low, self.coeffs.clone())
    }

    /// Valuation in `t` of `F(c + t^e, z(t))` and the order to which that
    /// residual is known. Exact when the branch has exact coefficients.
    pub fn residual(&self, curve: &AlgebroidCurve) -> Result<(i32, i32)> {
        let rows_exact = match self.center {
            Place::Finite(c) => Scalar::approximate(c, 1e-12, 1_000_000)
                .filter(|s| (s.to_c64() - c).norm() <= 1e-12 * c.norm().max(1.0))
                .map(|s| curve.rows_at(&s)),
            Place::Infinity => Some(curve.rows_at_infinity()),
        };
        if let (Some(rows), Some(ex)) = (&rows_exact, &self.exact) {
            let z = Series::new(Scalar::zero(), self.low, ex.clone());
            return residual_of(rows, &z, self.e, 0.0);
        }
        let rows: Rows<Complex64> = match (&rows_exact, self.center) {
            (Some(r), _) => r.iter().map(|row| row.iter().map(|c| c.to_c64()).collect()).collect(),
            (None, Place::Finite(c)) => curve.rows_at_numeric(c),
            (None, Place::Infinity) => unreachable!(),
        };
        residual_of(&rows, &self.series(), self.e, 1e-9)
    }

    /// The invariant residual bound: valuation ≥ order − n·|low|.
    pub fn satisfies_residual_bound(&self, curve: &AlgebroidCurve) -> Result<bool> {
        let (v, _) = self.residual(curve)?;
        Ok(v as i64 >= self.order as i64 - curve.degree() as i64 * self.low.unsigned_abs() as i64)
    }
}

pub(crate) fn ser_c64s<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

fn ser_exact<S: serde::Serializer>(v: &Option<Vec<Scalar>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|v| v.iter().map(CoeffJson::from).collect::<Vec<_>>()).serialize(s)
}

fn residual_of<C: Coeff>(rows: &Rows<C>, z: &Series<C>, e: u32, tol: f64) -> Result<(i32, i32)> {
    let zero = C::zero();
    let center = z.center.clone();
    // large order for the exactly known polynomial factors
    let big = z.order() * (rows.len() as i32 + 1) + 64;
    let mut zp = Series::new(center.clone(), 0, {
        let mut v = vec![zero.clone(); big.max(1) as usize];
        v[0] = C::one();
        v
    });
    let mut acc: Option<Series<C>> = None;
    for row in rows.iter() {
        let mut coeffs = vec![zero.clone(); (row.len() - 1) * e as usize + 1];
        for (i, a) in row.iter().enumerate() {
            coeffs[i * e as usize] = a.clone();
        }
        let mut pu = Series::new(center.clone(), 0, coeffs);
        let extra = big - pu.order();
        if extra > 0 {
            pu.coeffs.extend(std::iter::repeat(zero.clone()).take(extra as usize));
        }
        let term = pu.mul(&zp)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
        zp = zp.mul(z)?;
    }
    let acc = acc.unwrap();
    let scale = acc.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max).max(1.0);
    let v = acc.valuation(tol * scale).unwrap_or(acc.order());
    Ok((v, acc.order()))
}

fn assemble(raw: Vec<RawBranch>, place: Place, order: usize) -> Vec<PuiseuxBranch> {
    let mut out = Vec::new();
    for (fam, rb) in raw.into_iter().enumerate() {
        let low = rb.terms.first().map(|t| t.0).unwrap_or(0);
        let mut coeffs = vec![Val::E(Scalar::zero()); order];
        for (k, v) in rb.terms {
            let idx = k - low;
            if idx >= 0 && (idx as usize) < order {
                coeffs[idx as usize] = v;
            }
        }
        for j in 0..rb.e {
            let mut num = Vec::with_capacity(order);
            let mut ex: Option<Vec<Scalar>> = Some(Vec::with_capacity(order));
            for (k, v) in coeffs.iter().enumerate() {
                let expo = low + k as i64;
                let m = (j as i64 * expo).rem_euclid(rb.e as i64);
                let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / rb.e as f64);
                // exact multipliers for the quarter turns
                let exact_mult = if (4 * m) % rb.e as i64 == 0 {
                    Some(match 4 * m / rb.e as i64 {
                        0 => Scalar::one(),
                        1 => Scalar::i(),
                        2 => Scalar::from_int(-1),
                        _ => -Scalar::i(),
                    })
                } else {
                    None
                };
                num.push(v.c64() * zeta);
                ex = match (ex, v, exact_mult) {
                    (Some(mut list), Val::E(s), Some(mu)) => {
                        list.push(s * &mu);
                        Some(list)
                    }
                    _ => None,
                };
            }
            out.push(PuiseuxBranch {
                center: place,
                e: rb.e,
                low: low as i32,
                order,
                cycle: fam,
                coeffs: num,
                exact: ex,
            });
        }
    }
    out.sort_by(|a, b| {
        a.low.cmp(&b.low).then(a.e.cmp(&b.e)).then_with(|| {
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                let o = cmp_c(*x, *y);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    });
    // renumber cycles in order of first appearance
    let mut map: HashMap<usize, usize> = HashMap::new();
    for b in out.iter_mut() {
        let next = map.len();
        b.cycle = *map.entry(b.cycle).or_insert(next);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    P0Zero,
    DiscriminantRoot,
    Both,
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularKind {
    Pole,
    Critical,
    PoleAndBranch,
    RegularForSomeBranches,
    /// Only reported for the point at infinity.
    Regular,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularPoint {
    pub location: Place,
    pub kind: SingularKind,
    /// Cycle lengths, descending; they sum to `n`.
    pub cycle_structure: Vec<u32>,
    pub source: Source,
    /// Number of branches with a pole here.
    pub polar_branches: usize,
}

impl SingularPoint {
    fn classify(location: Place, source: Source, branches: &[PuiseuxBranch], _n: u32) -> Self {
        let mut cycles: Vec<u32> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for b in branches {
            if seen.insert(b.cycle) {
                cycles.push(b.e);
            }
        }
        cycles.sort_by(|a, b| b.cmp(a));
        let polar = branches.iter().filter(|b| b.is_polar()).count();
        let ramified = cycles.iter().any(|&e| e > 1);
        let kind = match (polar > 0, ramified) {
            (true, true) => SingularKind::PoleAndBranch,
            (true, false) => SingularKind::Pole,
            (false, true) => SingularKind::Critical,
            (false, false) if source == Source::Infinity => SingularKind::Regular,
            (false, false) => SingularKind::RegularForSomeBranches,
        };
        SingularPoint { location, kind, cycle_structure: cycles, source, polar_branches: polar }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularityReport {
    pub points: Vec<SingularPoint>,
}

impl SingularityReport {
    pub fn finite(&self) -> impl Iterator<Item = (Complex64, &SingularPoint)> {
        self.points.iter().filter_map(|p| match p.location {
            Place::Finite(z) => Some((z, p)),
            Place::Infinity => None,
        })
    }

    pub fn at(&self, z: Complex64, tol: f64) -> Option<&SingularPoint> {
        self.finite().find(|(w, _)| (w - z).norm() <= tol).map(|(_, p)| p)
    }
}

/// A curve coefficient in JSON: a polynomial object or an expression.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Poly(PolyJson),
    Expr(String),
}

impl PolySpec {
    fn to_poly(&self) -> Result<MultiPoly> {
        match self {
            PolySpec::Poly(j) => MultiPoly::from_json(j),
            PolySpec::Expr(s) => MultiPoly::parse(s, &["u"]),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveJson {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n: u32,
    pub p: Vec<PolySpec>,
}

#[cfg(test)]
mod tests;
