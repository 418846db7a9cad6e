//! Newton-Puiseux expansion.
//!
//! Rows are bivariate polynomials `G(t, y) = Σ rows[j][i] t^i y^j`. Each
//! level picks an edge of the Newton polygon, solves the characteristic
//! polynomial and substitutes `t = s^q`, `y = s^p (c + y')`. A simple
//! characteristic root ends the descent; the remaining coefficients then
//! follow order by order from the implicit function theorem.

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::poly::{gcd, MultiPoly};
use crate::roots::poly_roots;
use crate::scalar::{Coeff, Scalar};

pub(crate) type Rows<C> = Vec<Vec<C>>;

/// A branch coefficient, exact when the whole descent stayed rational.
#[derive(Clone, Debug)]
pub(crate) enum Val {
    E(Scalar),
    N(Complex64),
}

impl Val {
    pub(crate) fn c64(&self) -> Complex64 {
        match self {
            Val::E(s) => s.to_c64(),
            Val::N(z) => *z,
        }
    }
}

pub(crate) enum CharRoot<C> {
    Same(C),
    Numeric(Complex64),
}

/// Coefficient types the descent can run on.
pub(crate) trait PField: Coeff {
    /// Nonzero roots of `Σ phi[k] ξ^k` with multiplicities.
    fn char_roots(phi: &[Self], tol: f64) -> Result<Vec<(CharRoot<Self>, usize)>>;
    /// Some `c` with `c^q = xi`, if representable in this type.
    fn root_q(xi: &Self, q: u32) -> Option<Self>;
    fn to_val(&self) -> Val;
}

impl PField for Complex64 {
    fn char_roots(phi: &[Self], tol: f64) -> Result<Vec<(CharRoot<Self>, usize)>> {
        let roots = poly_roots(phi)?;
        let mut used = vec![false; roots.len()];
        let mut out = Vec::new();
        let cluster = tol.sqrt().max(1e-6);
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            let mut members = vec![roots[i]];
            used[i] = true;
            for j in i + 1..roots.len() {
                if !used[j] && (roots[j] - roots[i]).norm() <= cluster * roots[i].norm().max(1.0) {
                    used[j] = true;
                    members.push(roots[j]);
                }
            }
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            out.push((CharRoot::Same(mean), members.len()));
        }
        Ok(out)
    }

    fn root_q(xi: &Self, q: u32) -> Option<Self> {
        Some(if q == 1 { *xi } else { xi.powf(1.0 / q as f64) })
    }

    fn to_val(&self) -> Val {
        Val::N(*self)
    }
}

fn snap_root(z: Complex64, f: &MultiPoly) -> Option<Scalar> {
    let s = Scalar::approximate(z, 1e-9, 1_000_000)?;
    let a = [("x".to_string(), s.clone())].into_iter().collect();
    match f.eval_exact(&a) {
        Ok(v) if v.is_zero() => Some(s),
        _ => None,
    }
}

impl PField for Scalar {
    fn char_roots(phi: &[Self], _tol: f64) -> Result<Vec<(CharRoot<Self>, usize)>> {
        let f = MultiPoly::univariate("x", phi);
        // Yun's square-free decomposition
        let mut g = gcd(&f, &f.derivative("x"));
        let mut w = f.div_exact(&g).expect("gcd divides");
        let mut mult = 1;
        let mut out = Vec::new();
        while w.degree("x") > 0 {
            let y = gcd(&w, &g);
            let factor = w.div_exact(&y).expect("gcd divides");
            if factor.degree("x") == 1 {
                let c = factor.coeffs_in("x");
                let r = -(&c[0].constant_term() / &c[1].constant_term());
                out.push((CharRoot::Same(r), mult));
            } else if factor.degree("x") > 1 {
                let coeffs: Vec<Complex64> =
                    factor.coeffs_in("x").iter().map(|c| c.constant_term().to_c64()).collect();
                for z in poly_roots(&coeffs)? {
                    match snap_root(z, &factor) {
                        Some(s) => out.push((CharRoot::Same(s), mult)),
                        None => out.push((CharRoot::Numeric(z), mult)),
                    }
                }
            }
            w = y.clone();
            g = g.div_exact(&y).expect("gcd divides");
            mult += 1;
        }
        Ok(out)
    }

    fn root_q(xi: &Self, q: u32) -> Option<Self> {
        if q == 1 {
            return Some(xi.clone());
        }
        let z = xi.to_c64();
        let base = z.powf(1.0 / q as f64);
        for k in 0..q {
            let c = base * Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / q as f64);
            if let Some(s) = Scalar::approximate(c, 1e-9, 1_000_000) {
                if s.pow(q) == *xi {
                    return Some(s);
                }
            }
        }
        None
    }

    fn to_val(&self) -> Val {
        Val::E(self.clone())
    }
}

/// State of one descent: `u − center = s^e` and
/// `z = Σ terms + s^exp · y`.
#[derive(Clone, Debug)]
pub(crate) struct Chain {
    pub e: u32,
    pub terms: Vec<(i64, Val)>,
    pub exp: i64,
}

impl Chain {
    pub(crate) fn start() -> Self {
        Chain { e: 1, terms: Vec::new(), exp: 0 }
    }

    fn refine(&self, p: i64, q: u32, c: Val) -> Chain {
        let q64 = q as i64;
        let mut terms: Vec<(i64, Val)> = self.terms.iter().map(|(k, v)| (k * q64, v.clone())).collect();
        let exp = self.exp * q64 + p;
        terms.push((exp, c));
        Chain { e: self.e * q, terms, exp }
    }
}

fn scale_of<C: Coeff>(rows: &Rows<C>) -> f64 {
    rows.iter().flatten().map(|c| c.magnitude()).fold(0.0, f64::max).max(1e-300)
}

fn lower_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // remove b if it lies on or above segment a-p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// `G(s^q, s^p (c + y)) / s^Q` with `Q` the minimal exponent.
fn transform<C: Coeff>(rows: &Rows<C>, p: i64, q: u32, c: &C, tol: f64) -> Rows<C> {
    let q = q as i64;
    let scale = scale_of(rows);
    let mut qmin = i64::MAX;
    for (j, row) in rows.iter().enumerate() {
        for (i, a) in row.iter().enumerate() {
            if !a.is_negligible(tol * scale) {
                qmin = qmin.min(q * i as i64 + p * j as i64);
            }
        }
    }
    let n = rows.len();
    let mut cp = vec![C::one()];
    for k in 1..n {
        cp.push(cp[k - 1].mul_ref(c));
    }
    let mut out: Rows<C> = vec![Vec::new(); n];
    for (j, row) in rows.iter().enumerate() {
        for (i, a) in row.iter().enumerate() {
            if a.is_negligible(tol * scale) {
                continue;
            }
            let e = q * i as i64 + p * j as i64 - qmin;
            if e < 0 {
                continue;
            }
            let e = e as usize;
            let mut binom: i64 = 1;
            for k in 0..=j {
                // coefficient of y^k in (c + y)^j is C(j, k) c^{j-k}
                let t = a.mul_ref(&cp[j - k]).scale_i64(binom);
                let r = &mut out[k];
                if r.len() <= e {
                    r.resize(e + 1, C::zero());
                }
                r[e] = r[e].add_ref(&t);
                binom = binom * (j - k) as i64 / (k + 1) as i64;
            }
        }
    }
    out
}

/// Solves `G(s, y(s)) = 0`, `y(0) = 0`, given `G_y(0, 0) ≠ 0`, for
/// `y_1 … y_m`.
fn implicit_series<C: Coeff>(rows: &Rows<C>, m: usize) -> Result<Vec<C>> {
    let g01 = rows.get(1).and_then(|r| r.first()).cloned().unwrap_or_else(C::zero);
    if g01.is_zero() {
        return Err(Error::NotSquareFree);
    }
    let n = rows.len();
    let mut y = vec![C::zero(); m + 1];
    // pow[j][k] = [s^k] y(s)^j
    let mut pow = vec![vec![C::zero(); m + 1]; n];
    pow[0][0] = C::one();
    for k in 1..=m {
        for j in 2..n {
            let mut acc = C::zero();
            for l in 1..k {
                if !y[l].is_zero() {
                    acc.mul_add_assign(&y[l], &pow[j - 1][k - l]);
                }
            }
            pow[j][k] = acc;
        }
        let mut r = C::zero();
        for (j, row) in rows.iter().enumerate() {
            for (i, a) in row.iter().enumerate().take(k + 1) {
                if j == 1 && i == 0 {
                    continue;
                }
                if a.is_zero() {
                    continue;
                }
                r.mul_add_assign(a, &pow[j][k - i]);
            }
        }
        y[k] = r.neg_ref().div_ref(&g01);
        if n > 1 {
            pow[1][k] = y[k].clone();
        }
    }
    Ok(y)
}

/// A branch before conjugation: `u − center = s^e`, `z = Σ terms`.
#[derive(Clone, Debug)]
pub(crate) struct RawBranch {
    pub e: u32,
    pub terms: Vec<(i64, Val)>,
}

pub(crate) struct Descent {
    pub order: usize,
    pub tol: f64,
}

impl Descent {
    /// All branches of `rows` (first level) or the `jmax` branches with
    /// `y → 0` (deeper levels).
    pub(crate) fn run<C: PField>(
        &self,
        rows: &Rows<C>,
        first: bool,
        jmax: usize,
        chain: &Chain,
        out: &mut Vec<RawBranch>,
    ) -> Result<()> {
        let scale = scale_of(rows);
        let thr = self.tol * scale;
        let val: Vec<Option<i64>> = (0..=jmax)
            .map(|j| {
                rows.get(j)
                    .and_then(|r| r.iter().position(|a| !a.is_negligible(thr)))
                    .map(|i| i as i64)
            })
            .collect();
        let mut start = 0;
        if val[0].is_none() {
            // y ≡ 0 solves G exactly
            out.push(self.finish_zero(chain));
            start = (1..=jmax).find(|&j| val[j].is_some()).unwrap_or(jmax + 1);
            if !first && start > 1 {
                return Err(Error::NotSquareFree);
            }
        }
        let points: Vec<(i64, i64)> =
            (start..=jmax).filter_map(|j| val[j].map(|i| (j as i64, i))).collect();
        if points.len() < 2 {
            return Ok(());
        }
        let hull = lower_hull(&points);
        for w in hull.windows(2) {
            let (j1, i1) = w[0];
            let (j2, i2) = w[1];
            let dj = j2 - j1;
            let di = i1 - i2;
            let g = di.abs().gcd(&dj);
            let (p, q) = (di / g, (dj / g) as u32);
            let phi: Vec<C> = (0..=(dj / q as i64))
                .map(|k| {
                    let j = (j1 + k * q as i64) as usize;
                    let i = i1 - k * p;
                    if i < 0 {
                        C::zero()
                    } else {
                        rows.get(j).and_then(|r| r.get(i as usize)).cloned().unwrap_or_else(C::zero)
                    }
                })
                .collect();
            for (root, mult) in C::char_roots(&phi, self.tol)? {
                match root {
                    CharRoot::Same(xi) => match C::root_q(&xi, q) {
                        Some(c) => self.descend(rows, p, q, c, mult, chain, out)?,
                        None => {
                            let c = xi.to_c64().powf(1.0 / q as f64);
                            let nrows: Rows<Complex64> =
                                rows.iter().map(|r| r.iter().map(|a| a.to_c64()).collect()).collect();
                            self.descend(&nrows, p, q, c, mult, chain, out)?;
                        }
                    },
                    CharRoot::Numeric(xi) => {
                        let c = xi.powf(1.0 / q as f64);
                        let nrows: Rows<Complex64> =
                            rows.iter().map(|r| r.iter().map(|a| a.to_c64()).collect()).collect();
                        self.descend(&nrows, p, q, c, mult, chain, out)?;
                    }
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn descend<C: PField>(
        &self,
        rows: &Rows<C>,
        p: i64,
        q: u32,
        c: C,
        mult: usize,
        chain: &Chain,
        out: &mut Vec<RawBranch>,
    ) -> Result<()> {
        let next = chain.refine(p, q, c.to_val());
        let g = transform(rows, p, q, &c, self.tol);
        if mult == 1 {
            let low = next.terms[0].0;
            let top = low + self.order as i64 - 1;
            let m = (top - next.exp).max(0) as usize;
            let y = implicit_series(&g, m)?;
            let mut terms = next.terms.clone();
            for (k, v) in y.iter().enumerate().skip(1) {
                terms.push((next.exp + k as i64, v.to_val()));
            }
            out.push(RawBranch { e: next.e, terms });
            Ok(())
        } else {
            if next.e > 4096 || next.terms.len() > 4 * self.order + 64 {
                return Err(Error::NotSquareFree);
            }
            self.run(&g, false, mult, &next, out)
        }
    }

    fn finish_zero(&self, chain: &Chain) -> RawBranch {
        RawBranch { e: chain.e, terms: chain.terms.clone() }
    }
}
