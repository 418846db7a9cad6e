//! Addition theorems: verification, discovery, algebraic relations, the
//! Koebe normalization chain, Schwarz's GCD reduction and doubling chains.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elimination::{eliminate_chain, gcd_in_w, resultant, PolyInW};
use crate::error::{Error, Result};
use crate::exec::{par_map, ExecMode};
use crate::function::FunctionSpec;
use crate::hp::Fixed;
use crate::linalg::{canonical_basis_exact, canonical_basis_numeric, kernel_exact, kernel_svd};
use crate::poly::{MultiPoly, PolyJson};
use crate::scalar::{Coeff, Scalar};
use crate::series::{compose_shift, radius_estimate, BiSeries, Series, TruncSeries};

const UVW: [&str; 3] = ["U", "V", "W"];

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn bi_x<C: Coeff>(s: &Series<C>, order: usize) -> Result<BiSeries<C>> {
    let mut b = BiSeries::from_x(s, C::zero(), order)?;
    b.center = (C::zero(), C::zero());
    Ok(b)
}

fn bi_y<C: Coeff>(s: &Series<C>, order: usize) -> Result<BiSeries<C>> {
    let mut b = BiSeries::from_y(s, C::zero(), order)?;
    b.center = (C::zero(), C::zero());
    Ok(b)
}

fn bi_sum<C: Coeff>(s: &Series<C>, order: usize) -> Result<BiSeries<C>> {
    let mut b = compose_shift(s, order)?;
    b.center = (C::zero(), C::zero());
    Ok(b)
}

fn powers<C: Coeff>(b: &BiSeries<C>, d: usize) -> Vec<BiSeries<C>> {
    let mut out = vec![BiSeries::constant(b.center.clone(), C::one(), b.order())];
    for k in 1..=d {
        out.push(out[k - 1].mul(b));
    }
    out
}

/// `G(U, V, W)` with bivariate series substituted.
pub fn substitute3<C: Coeff>(g: &MultiPoly, u: &BiSeries<C>, v: &BiSeries<C>, w: &BiSeries<C>) -> Result<BiSeries<C>> {
    let g = g.with_vars(&UVW)?;
    let pu = powers(u, g.degree("U") as usize);
    let pv = powers(v, g.degree("V") as usize);
    let pw = powers(w, g.degree("W") as usize);
    let order = u.order().min(v.order()).min(w.order());
    let mut acc = BiSeries::zero(u.center.clone(), order);
    for (e, c) in g.terms() {
        let t = pu[e[0] as usize].mul(&pv[e[1] as usize]).mul(&pw[e[2] as usize]);
        acc = acc.add(&t.scale(&C::from_scalar(c)));
    }
    Ok(acc)
}

/// The three elements of an addition theorem check: `U = P₁(x)`,
/// `V = P₂(y)`, `W = P₃(x + y)`.
enum Triple {
    Exact([BiSeries<Scalar>; 3]),
    Numeric([BiSeries<Complex64>; 3], f64),
}

fn triple(p: [&TruncSeries; 3], order: usize) -> Result<Triple> {
    if let [TruncSeries::Exact(a), TruncSeries::Exact(b), TruncSeries::Exact(c)] = p {
        return Ok(Triple::Exact([bi_x(a, order)?, bi_y(b, order)?, bi_sum(c, order)?]));
    }
    let [a, b, c] = p.map(|s| s.to_numeric());
    let radius = [&a, &b, &c]
        .iter()
        .map(|s| radius_estimate(s).unwrap_or(f64::INFINITY))
        .fold(f64::INFINITY, f64::min);
    Ok(Triple::Numeric([bi_x(&a, order)?, bi_y(&b, order)?, bi_sum(&c, order)?], radius))
}

/// Relative residual `|G| / Σ|c||U|^i|V|^j|W|^k` at seeded sample points
/// inside a tenth of the convergence radius.
fn sampled_residual(g: &MultiPoly, s: &[BiSeries<Complex64>; 3], radius: f64, samples: usize, seed: u64) -> f64 {
    let g = g.with_vars(&UVW).expect("U, V, W");
    let rho = 0.1 * radius.min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = Complex64::from_polar(rho * rng.gen::<f64>(), std::f64::consts::TAU * rng.gen::<f64>());
        let y = Complex64::from_polar(rho * rng.gen::<f64>(), std::f64::consts::TAU * rng.gen::<f64>());
        let vals = [s[0].eval(x, y), s[1].eval(x, y), s[2].eval(x, y)];
        let mut num = c0();
        let mut den = 0.0;
        for (e, c) in g.terms() {
            let mut t = c.to_c64();
            for k in 0..3 {
                t *= vals[k].powu(e[k]);
            }
            num += t;
            den += t.norm();
        }
        worst = worst.max(num.norm() / den.max(1e-300));
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct AatCertificate {
    #[serde(rename = "G")]
    pub g: PolyJson,
    pub function: String,
    pub base_point: [f64; 2],
    pub order_checked: usize,
    pub exact: bool,
    /// Lowest total degree with a nonzero residual coefficient; equals
    /// `order_checked` when the residual vanishes to the working order.
    pub residual_valuation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_max: Option<f64>,
    /// `verified` or `refuted`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failing_degree: Option<usize>,
}

impl AatCertificate {
    pub fn verified(&self) -> bool {
        self.status == "verified"
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: 1e-9, seed: 0, samples: 50 }
    }
}

/// Checks `G(φ(u), φ(v), φ(u + v)) = 0` on the element of `f` at its base
/// point.
pub fn verify_aat(g: &MultiPoly, f: &FunctionSpec, order: usize, opts: &VerifyOptions) -> Result<AatCertificate> {
    let g = g.with_vars(&UVW)?;
    let degree = g.total_degree();
    if order <= degree as usize {
        return Err(Error::OrderTooLowForDegree { order, degree });
    }
    let a = f.base_point();
    let elem = f.element_any(a, order).map_err(|e| match e {
        Error::SingularCenter(_) => Error::SingularBasePoint(a),
        e => e,
    })?;
    let (exact, valuation, max) = match triple([&elem, &elem, &elem], order)? {
        Triple::Exact([u, v, w]) => {
            let r = substitute3(&g, &u, &v, &w)?;
            (true, r.valuation(0.0).unwrap_or(order), None)
        }
        Triple::Numeric(s, radius) => {
            let r = substitute3(&g, &s[0], &s[1], &s[2])?;
            let scale = g.coeff_norm() * s.iter().map(|b| b.max_abs()).fold(1.0, f64::max).powi(degree as i32);
            let v = r.valuation(opts.tol * scale).unwrap_or(order);
            (false, v, Some(sampled_residual(&g, &s, radius, opts.samples, opts.seed)))
        }
    };
    let ok = match max {
        None => valuation >= order,
        Some(m) => m < opts.tol,
    };
    Ok(AatCertificate {
        g: g.to_json(),
        function: f.name.clone(),
        base_point: [a.re, a.im],
        order_checked: order,
        exact,
        residual_valuation: valuation,
        residual_max: max,
        status: if ok { "verified" } else { "refuted" }.into(),
        first_failing_degree: if ok { None } else { Some(valuation) },
    })
}

/// Exponent vectors ordered by ascending total degree, then descending
/// lexicographic order with the last variable most significant.
pub fn monomials(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for &b in bounds {
        out = out.into_iter().flat_map(|e| (0..=b).map(move |k| [e.clone(), vec![k]].concat())).collect();
    }
    out.sort_by(|a, b| {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        da.cmp(&db).then_with(|| b.iter().rev().cmp(a.iter().rev()))
    });
    out
}

fn polys_from_exact(basis: &[Vec<Scalar>], monos: &[Vec<u32>], vars: &[&str]) -> Result<Vec<MultiPoly>> {
    basis
        .iter()
        .map(|row| MultiPoly::from_terms(vars, monos.iter().cloned().zip(row.iter().cloned()).filter(|(_, c)| !c.is_zero())))
        .collect()
}

fn snap_coeff(z: Complex64) -> Scalar {
    Scalar::approximate(z, 1e-11 * z.norm().max(1.0), 10_000)
        .or_else(|| Scalar::from_c64(z).ok())
        .unwrap_or_else(Scalar::zero)
}

fn polys_from_numeric(basis: &[Vec<Complex64>], monos: &[Vec<u32>], vars: &[&str]) -> Result<Vec<MultiPoly>> {
    basis
        .iter()
        .map(|row| {
            MultiPoly::from_terms(
                vars,
                monos.iter().cloned().zip(row.iter().map(|z| snap_coeff(*z))).filter(|(_, c)| !c.is_zero()),
            )
        })
        .collect()
}

/// Kernel of the linear map from monomial coefficients to series
/// coefficients. `cols[k]` lists the series coefficients of monomial `k`.
fn kernel_of_columns_exact(cols: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let rows = cols.first().map_or(0, |c| c.len());
    let a: Vec<Vec<Scalar>> = (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let k = kernel_exact(&a, cols.len());
    if k.is_empty() {
        k
    } else {
        canonical_basis_exact(&k)
    }
}

fn kernel_of_columns_numeric(cols: &[Vec<Complex64>], rel: f64) -> Vec<Vec<Complex64>> {
    // columns scaled to unit norm before the SVD, unscaled afterwards
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300)).collect();
    let rows = cols.first().map_or(0, |c| c.len());
    let a: Vec<Vec<Complex64>> = (0..rows).map(|r| cols.iter().zip(&norms).map(|(c, n)| c[r] / *n).collect()).collect();
    let k = kernel_svd(&a, cols.len(), rel);
    if k.is_empty() {
        return k;
    }
    let unscaled: Vec<Vec<Complex64>> = k.iter().map(|v| v.iter().zip(&norms).map(|(x, n)| x / *n).collect()).collect();
    let big = unscaled.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    canonical_basis_numeric(&unscaled, 1e-9 * big)
}

#[derive(Clone, Debug, Serialize)]
pub struct Discovery {
    pub function: String,
    pub bounds: Vec<u32>,
    pub order: usize,
    pub exact: bool,
    pub kernel_dim: usize,
    #[serde(serialize_with = "ser_polys")]
    pub basis: Vec<MultiPoly>,
}

fn ser_polys<S: serde::Serializer>(v: &[MultiPoly], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|p| p.to_json()).collect::<Vec<_>>().serialize(s)
}

/// Nullspace of the monomials `U^i V^j W^k` (within `bounds`) evaluated on
/// `φ(u), φ(v), φ(u + v)`. An empty basis means no relation.
pub fn discover_aat(f: &FunctionSpec, bounds: (u32, u32, u32), order: usize, mode: ExecMode) -> Result<Discovery> {
    let (du, dv, dw) = bounds;
    let need = 2 * (du + dv + dw) as usize + 4;
    if order < need {
        return Err(Error::OrderTooLow { order, required: need });
    }
    let a = f.base_point();
    let elem = f.element_any(a, order).map_err(|e| match e {
        Error::SingularCenter(_) => Error::SingularBasePoint(a),
        e => e,
    })?;
    let monos = monomials(&[du, dv, dw]);
    let (exact, basis) = match triple([&elem, &elem, &elem], order)? {
        Triple::Exact([u, v, w]) => {
            let (pu, pv, pw) = (powers(&u, du as usize), powers(&v, dv as usize), powers(&w, dw as usize));
            let cols = par_map(mode, &monos, |e| {
                let b = pu[e[0] as usize].mul(&pv[e[1] as usize]).mul(&pw[e[2] as usize]);
                b.iter().map(|(_, _, c)| c.clone()).collect::<Vec<_>>()
            });
            (true, polys_from_exact(&kernel_of_columns_exact(&cols), &monos, &UVW)?)
        }
        Triple::Numeric([u, v, w], _) => {
            let (pu, pv, pw) = (powers(&u, du as usize), powers(&v, dv as usize), powers(&w, dw as usize));
            let cols = par_map(mode, &monos, |e| {
                let b = pu[e[0] as usize].mul(&pv[e[1] as usize]).mul(&pw[e[2] as usize]);
                b.iter().map(|(_, _, c)| *c).collect::<Vec<_>>()
            });
            (false, polys_from_numeric(&kernel_of_columns_numeric(&cols, 1e-8), &monos, &UVW)?)
        }
    };
    Ok(Discovery {
        function: f.name.clone(),
        bounds: vec![du, dv, dw],
        order,
        exact,
        kernel_dim: basis.len(),
        basis,
    })
}

/// Tries bounds `(d, d, d)` for `d = 1 ..= cap`, raising the order when the
/// bounds require it, and stops at the first nonempty kernel.
pub fn discover_search(f: &FunctionSpec, cap: u32, order: usize, mode: ExecMode) -> Result<Discovery> {
    let mut last = None;
    for d in 1..=cap.max(1) {
        let n = order.max(6 * d as usize + 4);
        let found = discover_aat(f, (d, d, d), n, mode)?;
        if found.kernel_dim > 0 {
            return Ok(found);
        }
        last = Some(found);
    }
    Ok(last.expect("cap >= 1"))
}

fn series_powers<C: Coeff>(s: &Series<C>, d: usize) -> Result<Vec<Series<C>>> {
    let mut out = vec![Series::constant(s.center.clone(), C::one(), s.order().max(0) as usize)];
    for k in 1..=d {
        out.push(out[k - 1].mul(s)?);
    }
    Ok(out)
}

/// Kernel over monomials `X^i Y^j` of the elements of `f` and `g` at a
/// common regular point (the base point of `f`).
pub fn algebraic_relation_basis(f: &FunctionSpec, g: &FunctionSpec, bounds: (u32, u32), order: usize) -> Result<Vec<MultiPoly>> {
    let (df, dg) = bounds;
    let need = (2 * (df + dg) as usize + 4).max(((df + 1) * (dg + 1)) as usize + 4);
    if order < need {
        return Err(Error::OrderTooLow { order, required: need });
    }
    let a = f.base_point();
    let ef = f.element_any(a, order)?;
    let eg = g.element_any(a, order)?;
    let monos = monomials(&[df, dg]);
    if let (TruncSeries::Exact(x), TruncSeries::Exact(y)) = (&ef, &eg) {
        let (px, py) = (series_powers(x, df as usize)?, series_powers(y, dg as usize)?);
        let mut cols = Vec::with_capacity(monos.len());
        for e in &monos {
            let s = px[e[0] as usize].mul(&py[e[1] as usize])?;
            cols.push(s.taylor_coeffs()?.into_iter().take(order).collect::<Vec<_>>());
        }
        let len = cols.iter().map(|c| c.len()).min().unwrap_or(0);
        cols.iter_mut().for_each(|c| c.truncate(len));
        return polys_from_exact(&kernel_of_columns_exact(&cols), &monos, &["X", "Y"]);
    }
    let (x, y) = (ef.to_numeric(), eg.to_numeric());
    let (px, py) = (series_powers(&x, df as usize)?, series_powers(&y, dg as usize)?);
    let mut cols = Vec::with_capacity(monos.len());
    for e in &monos {
        let s = px[e[0] as usize].mul(&py[e[1] as usize])?;
        cols.push(s.taylor_coeffs()?);
    }
    let len = cols.iter().map(|c| c.len()).min().unwrap_or(0);
    cols.iter_mut().for_each(|c| c.truncate(len));
    polys_from_numeric(&kernel_of_columns_numeric(&cols, 1e-8), &monos, &["X", "Y"])
}

/// The lowest-degree relation `H(X, Y)` between `f` and `g`, searching
/// bounds `(d, d)` for `d = 1 ..= cap`.
pub fn algebraic_relation(f: &FunctionSpec, g: &FunctionSpec, cap: u32, order: usize) -> Result<Option<MultiPoly>> {
    for d in 1..=cap.max(1) {
        let need = (4 * d as usize + 4).max(((d + 1) * (d + 1)) as usize + 4);
        let basis = algebraic_relation_basis(f, g, (d, d), order.max(need))?;
        if let Some(p) = basis.into_iter().min_by_key(|p| (p.total_degree(), p.num_terms())) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct KoebeReport {
    #[serde(rename = "G_bar", serialize_with = "ser_poly")]
    pub g_bar: MultiPoly,
    /// Intermediate polynomials `G1 … G4` in chain order.
    pub chain: Vec<(String, PolyJson)>,
    /// `P₁(0)` and `P₂(0)` as used by the chain.
    pub values: [String; 2],
    pub order: usize,
    pub exact: bool,
    pub residual_valuation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_max: Option<f64>,
}

fn ser_poly<S: serde::Serializer>(p: &MultiPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.to_json().serialize(s)
}

fn tidy(p: &MultiPoly, var: &str) -> MultiPoly {
    match p.squarefree_content(var) {
        Ok(q) => q,
        Err(_) => p.monic(),
    }
}

/// Residual valuation of `G(P₁(x), P₂(y), P₃(x+y))` and the sampled
/// relative residual in numeric mode.
fn chain_residual(g: &MultiPoly, p: [&TruncSeries; 3], order: usize, tol: f64) -> Result<(bool, usize, Option<f64>)> {
    Ok(match triple(p, order)? {
        Triple::Exact([u, v, w]) => (true, substitute3(g, &u, &v, &w)?.valuation(0.0).unwrap_or(order), None),
        Triple::Numeric(s, radius) => {
            let r = substitute3(g, &s[0], &s[1], &s[2])?;
            let scale = g.coeff_norm() * s.iter().map(|b| b.max_abs()).fold(1.0, f64::max).powi(g.total_degree() as i32);
            let v = r.valuation(tol * scale).unwrap_or(order);
            (false, v, Some(sampled_residual(g, &s, radius, 50, 0)))
        }
    })
}

/// Turns an addition theorem among three elements `P₁(x)`, `P₂(y)`,
/// `P₃(x + y)` (variables `U, V, W` of `g`) into one for `P₁` alone.
pub fn koebe_normalize(g: &MultiPoly, p1: &FunctionSpec, p2: &FunctionSpec, p3: &FunctionSpec, order: usize, tol: f64) -> Result<KoebeReport> {
    let g = g.with_vars(&UVW)?;
    let elems = [p1, p2, p3].map(|p| p.element_any(p.base_point(), order));
    let [e1, e2, e3] = elems;
    let (e1, e2, e3) = (e1?, e2?, e3?);
    let (_, v0, m0) = chain_residual(&g, [&e1, &e2, &e3], order, tol)?;
    let holds = match m0 {
        None => v0 >= order,
        Some(m) => m < tol,
    };
    if !holds {
        return Err(Error::PreconditionFailed(format!("G(P1(x), P2(y), P3(x+y)) has residual valuation {}", v0)));
    }
    let value = |e: &TruncSeries| -> Scalar {
        match e {
            TruncSeries::Exact(s) => s.coeff(0).unwrap_or_else(Scalar::zero),
            TruncSeries::Numeric(s) => snap_coeff(s.coeff(0).unwrap_or_else(c0)),
        }
    };
    let (a1, a2) = (value(&e1), value(&e2));
    let xyz = ["X", "Y", "Z"];
    let gx = g.rename("U", "X").rename("V", "Y").rename("W", "Z").with_vars(&xyz)?;
    let g1 = gx.specialize("X", &a1).with_vars(&["Y", "Z"])?;
    let g2 = gx.specialize("Y", &a2).with_vars(&["X", "Z"])?;
    let nonzero = |p: MultiPoly, step: &'static str| if p.is_zero() { Err(Error::ChainCollapse(step)) } else { Ok(p) };
    let deg_ok = |p: &MultiPoly, v: &str, step: &'static str| if p.degree(v) == 0 { Err(Error::ChainCollapse(step)) } else { Ok(()) };
    deg_ok(&g1, "Z", "G1")?;
    deg_ok(&g2, "Z", "G2")?;
    let g3 = nonzero(resultant(&g1, &g2, "Z")?, "G3")?.with_vars(&["X", "Y"])?;
    let g3 = tidy(&g3, "Y");
    let g4 = nonzero(resultant(&gx, &g2.rename("X", "W"), "Z")?, "G4")?.with_vars(&["X", "Y", "W"])?;
    let g4 = tidy(&g4, "W");
    deg_ok(&g4, "Y", "G_bar")?;
    deg_ok(&g3, "Y", "G_bar")?;
    let gbar = resultant(&g4.rename("X", "U"), &g3.rename("X", "V"), "Y")?;
    let gbar = nonzero(gbar, "G_bar")?.with_vars(&UVW)?;
    let gbar = tidy(&gbar, "W");
    let (exact, valuation, max) = chain_residual(&gbar, [&e1, &e1, &e1], order, tol)?;
    Ok(KoebeReport {
        chain: vec![
            ("G1".into(), g1.to_json()),
            ("G2".into(), g2.to_json()),
            ("G3".into(), g3.to_json()),
            ("G4".into(), g4.to_json()),
        ],
        g_bar: gbar,
        values: [a1.to_string(), a2.to_string()],
        order,
        exact,
        residual_valuation: valuation,
        residual_max: max,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublingReport {
    #[serde(serialize_with = "ser_poly")]
    pub gamma: MultiPoly,
    pub m: usize,
    pub order: usize,
    /// Valuation of `γ(φ(u/2^m), φ(u))` in `u`; `order` when it vanishes.
    pub residual_valuation: usize,
}

/// Runs the doubling chain for `f(z, x)` (`z = φ(u/2)`, `x = φ(u)`) and
/// checks the result on the element of `phi` at `0`.
pub fn doubling_chain(f: &MultiPoly, m: usize, phi: &FunctionSpec, order: usize) -> Result<DoublingReport> {
    let gamma = eliminate_chain(f, "z", "x", m)?;
    let e = phi.element_any(c0(), order)?;
    let scale = 2i64.pow(m as u32);
    let residual = |z: Vec<Complex64>, x: Vec<Complex64>| -> usize {
        let mut acc = vec![c0(); order];
        for (ex, c) in gamma.terms() {
            let mut t = vec![c0(); order];
            t[0] = c.to_c64();
            for _ in 0..ex[0] {
                t = mul_trunc(&t, &z);
            }
            for _ in 0..ex[1] {
                t = mul_trunc(&t, &x);
            }
            acc.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
        }
        let big = acc.iter().map(|z| z.norm()).fold(1.0, f64::max);
        acc.iter().position(|z| z.norm() > 1e-9 * big).unwrap_or(order)
    };
    let valuation = match &e {
        TruncSeries::Exact(s) => {
            let x = s.taylor_coeffs()?;
            let mut z = x.clone();
            let mut p = Scalar::one();
            let inv = Scalar::from_ratio(1, scale);
            for c in z.iter_mut() {
                *c = &*c * &p;
                p = &p * &inv;
            }
            let mut acc = vec![Scalar::zero(); order];
            for (ex, c) in gamma.terms() {
                let mut t = vec![Scalar::zero(); order];
                t[0] = c.clone();
                for _ in 0..ex[0] {
                    t = mul_trunc(&t, &z);
                }
                for _ in 0..ex[1] {
                    t = mul_trunc(&t, &x);
                }
                for (a, b) in acc.iter_mut().zip(&t) {
                    *a = &*a + b;
                }
            }
            acc.iter().position(|z| !z.is_zero()).unwrap_or(order)
        }
        TruncSeries::Numeric(s) => {
            let x = s.taylor_coeffs()?;
            let z: Vec<Complex64> = x.iter().enumerate().map(|(k, c)| c / (scale as f64).powi(k as i32)).collect();
            residual(z, x)
        }
    };
    Ok(DoublingReport { gamma, m, order, residual_valuation: valuation })
}

fn mul_trunc<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().min(b.len());
    let mut out = vec![C::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j].mul_add_assign(x, y);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub shifts: Vec<[f64; 2]>,
    /// `deg_W` before the first and after every accepted step.
    pub degrees: Vec<usize>,
    pub final_degree: usize,
    pub order: usize,
    /// Largest coefficient of `∂P/∂u − ∂P/∂v` over the reduced coefficients.
    pub invariance_residual: f64,
    /// Largest coefficient of the reduced polynomial evaluated at `W = φ(u+v)`.
    pub root_residual: f64,
    /// Reduced coefficients restricted to `v = 0`, `coefficients[k]`
    /// multiplying `W^k`.
    pub coefficients: Vec<crate::series::SeriesJson>,
    pub psi: crate::series::SeriesJson,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_poly")]
    pub h: Option<MultiPoly>,
    #[serde(skip)]
    pub psi_series: Series<Complex64>,
    #[serde(skip)]
    pub reduced: Vec<BiSeries<Complex64>>,
}

fn ser_opt_poly<S: serde::Serializer>(p: &Option<MultiPoly>, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.as_ref().map(|p| p.to_json()).serialize(s)
}

#[derive(Clone, Debug)]
pub struct SchwarzOptions {
    pub order: usize,
    /// Explicit shifts; the default schedule is `0.3 / 2^(i−1)` scaled by
    /// `min(1, radius)`.
    pub shifts: Option<Vec<Complex64>>,
    pub max_steps: usize,
    /// Zero test for fixed-point series coefficients.
    pub tol: f64,
    /// Largest bound tried when looking for `H`; `0` skips the search.
    pub relation_cap: u32,
}

impl Default for SchwarzOptions {
    fn default() -> Self {
        SchwarzOptions { order: 24, shifts: None, max_steps: 6, tol: 1e-35, relation_cap: 3 }
    }
}

struct Reducer<'a> {
    g: &'a MultiPoly,
    f: &'a FunctionSpec,
    base: Complex64,
    order: usize,
    tol: f64,
}

impl Reducer<'_> {
    fn a0(&self, s: Complex64) -> Result<PolyInW<Fixed>> {
        let eu = self.f.element::<Fixed>(self.base + s, self.order)?;
        let ev = self.f.element::<Fixed>(self.base - s, self.order)?;
        PolyInW::from_poly(self.g, &bi_x(&eu, self.order)?, &bi_y(&ev, self.order)?)
    }

    /// `A_level(s)` with shifts `k[..level]`.
    fn a(&self, level: usize, s: Complex64, k: &[Complex64]) -> Result<PolyInW<Fixed>> {
        if level == 0 {
            return self.a0(s);
        }
        let p = self.a(level - 1, s, k)?;
        let q = self.a(level - 1, s + k[level - 1], k)?;
        gcd_in_w(&p, &q, self.tol)
    }
}

fn fixed_series_to_c64(s: &Series<Fixed>) -> Series<Complex64> {
    s.map(|c| c.to_c64())
}

/// Schwarz's reduction: repeated GCDs of `G` (expanded in `W`) with its
/// `(u + k, v − k)` shifted copy until the degree stops dropping.
pub fn schwarz_reduce(g: &MultiPoly, f: &FunctionSpec, opts: &SchwarzOptions) -> Result<ReductionReport> {
    let g = g.with_vars(&UVW)?;
    if let Some(ks) = &opts.shifts {
        if ks.iter().any(|k| k.norm() == 0.0) {
            return Err(Error::ShiftDegenerate);
        }
    }
    let base = f.base_point();
    let order = opts.order;
    let red = Reducer { g: &g, f, base, order, tol: opts.tol };
    let radius = radius_estimate(&f.element::<Complex64>(base, order)?).unwrap_or(1.0);
    let scale = radius.min(1.0);
    let schedule: Vec<Complex64> = match &opts.shifts {
        Some(k) => k.clone(),
        None => (0..opts.max_steps).map(|i| Complex64::new(0.3 * scale / 2f64.powi(i as i32), 0.0)).collect(),
    };
    let mut cur = red.a(0, c0(), &[])?;
    let mut degree = cur.degree(opts.tol).ok_or(Error::DivisionByZeroSeries)?;
    let mut degrees = vec![degree];
    let mut used: Vec<Complex64> = Vec::new();
    while degree > 1 && used.len() < schedule.len() {
        let mut trial = used.clone();
        trial.push(schedule[used.len()]);
        let next = red.a(trial.len(), c0(), &trial)?;
        let d = next.degree(opts.tol).ok_or(Error::DivisionByZeroSeries)?;
        if d >= degree {
            break;
        }
        used = trial;
        cur = next;
        degree = d;
        degrees.push(d);
    }
    let monic = cur.monic(opts.tol)?;
    let coeffs: Vec<BiSeries<Complex64>> = monic.coeffs.iter().map(|c| c.map(|x| x.to_c64())).collect();
    let invariance = monic.coeffs.iter().map(|c| c.pde_residual().max_abs()).fold(0.0, f64::max);
    // the reduced polynomial must still vanish at W = φ(u + v)
    let ew = f.element::<Fixed>(base + base, order)?;
    let w = bi_sum(&ew, order)?;
    let mut at_w = BiSeries::zero(w.center.clone(), w.order());
    for c in monic.coeffs.iter().rev() {
        at_w = at_w.mul(&w).add(c);
    }
    let root_residual = at_w.max_abs();
    // ψ: the first non-constant coefficient below the leading one
    let m = degree;
    let psi_bi = (0..m)
        .rev()
        .map(|k| &monic.coeffs[k])
        .find(|c| (1..c.order()).any(|d| (0..=d).any(|j| !c.coeff(d - j, j).is_negligible(opts.tol))))
        .ok_or_else(|| Error::InvariantViolation("reduced polynomial has constant coefficients".into()))?;
    let psi_fixed = psi_bi.restrict_y0().neg();
    let mut psi = fixed_series_to_c64(&psi_fixed);
    psi.center = base + base;
    let h = if opts.relation_cap > 0 {
        let psi_spec = FunctionSpec::from_element(TruncSeries::Numeric(psi.clone()));
        let shifted_f = FunctionSpec::translate(f.clone(), base);
        algebraic_relation(&shifted_f, &psi_spec, opts.relation_cap, order).ok().flatten()
    } else {
        None
    };
    Ok(ReductionReport {
        shifts: used.iter().map(|k| [k.re, k.im]).collect(),
        degrees,
        final_degree: degree,
        order,
        invariance_residual: invariance,
        root_residual,
        coefficients: coeffs.iter().map(|c| TruncSeries::Numeric(c.restrict_y0()).to_json()).collect(),
        psi: TruncSeries::Numeric(psi.clone()).to_json(),
        h,
        psi_series: psi,
        reduced: coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Builtin;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s, &UVW).unwrap()
    }

    fn tan() -> FunctionSpec {
        FunctionSpec::builtin(Builtin::Tan)
    }

    #[test]
    fn monomial_order() {
        let m = monomials(&[1, 1, 1]);
        assert_eq!(m[0], vec![0, 0, 0]);
        assert_eq!(m[1], vec![0, 0, 1]);
        assert_eq!(m[2], vec![0, 1, 0]);
        assert_eq!(m[3], vec![1, 0, 0]);
        assert_eq!(m[7], vec![1, 1, 1]);
    }

    #[test]
    fn verify_examples() {
        let o = VerifyOptions::default();
        let exp = FunctionSpec::builtin(Builtin::Exp);
        assert!(verify_aat(&p("W-U*V"), &exp, 16, &o).unwrap().verified());
        assert!(verify_aat(&p("W*(1-U*V)-(U+V)"), &tan(), 16, &o).unwrap().verified());
        let r = verify_aat(&p("W-U-V"), &exp, 16, &o).unwrap();
        assert!(!r.verified());
        // exp(0) - exp(0) - exp(0) = -1 already fails at degree 0
        assert_eq!(r.first_failing_degree, Some(0));
        let sin = FunctionSpec::builtin(Builtin::Sin);
        assert!(verify_aat(&p("(W^2+U^2-V^2)^2-4*U^2*W^2*(1-V^2)"), &sin, 16, &o).unwrap().verified());
        assert!(matches!(verify_aat(&p("W-U*V"), &exp, 2, &o), Err(Error::OrderTooLowForDegree { .. })));
    }

    #[test]
    fn verify_numeric_mode() {
        let f = FunctionSpec::translate(FunctionSpec::builtin(Builtin::Exp), Complex64::new(0.3, 0.1));
        let o = VerifyOptions::default();
        let r = verify_aat(&p("W-U-V"), &f, 16, &o).unwrap();
        assert!(!r.exact && !r.verified());
        let t = FunctionSpec::translate(tan(), Complex64::new(0.2, 0.0));
        let r = verify_aat(&p("W*(1-U*V)-(U+V)"), &t, 16, &o).unwrap();
        assert!(!r.verified());
    }

    #[test]
    fn discover_examples() {
        let ident = FunctionSpec::rational("u", "1").unwrap();
        let d = discover_aat(&ident, (1, 1, 1), 16, ExecMode::best()).unwrap();
        assert!(d.basis.iter().any(|g| g.is_scalar_multiple_of(&p("W-U-V"))));
        let d = discover_aat(&tan(), (1, 1, 1), 16, ExecMode::best()).unwrap();
        assert_eq!(d.kernel_dim, 1);
        assert_eq!(d.basis[0], p("W-U-V-U*V*W"));
        let exp = FunctionSpec::builtin(Builtin::Exp);
        let d = discover_aat(&exp, (1, 1, 1), 16, ExecMode::Sequential).unwrap();
        assert_eq!(d.basis, vec![p("W-U*V")]);
        assert!(matches!(discover_aat(&exp, (1, 1, 1), 8, ExecMode::best()), Err(Error::OrderTooLow { .. })));
    }

    #[test]
    fn discover_square() {
        let sq = FunctionSpec::rational("u^2", "1").unwrap();
        let d = discover_aat(&sq, (2, 2, 2), 16, ExecMode::best()).unwrap();
        let target = p("W^2+U^2+V^2-2*U*W-2*V*W-2*U*V");
        // target lies in the span: appending it does not raise the rank
        let monos = monomials(&[2, 2, 2]);
        let row = |g: &MultiPoly| monos.iter().map(|e| g.coeff(e)).collect::<Vec<_>>();
        let mut rows: Vec<Vec<Scalar>> = d.basis.iter().map(row).collect();
        rows.push(row(&target));
        assert_eq!(canonical_basis_exact(&rows).len(), d.kernel_dim);
    }

    #[test]
    fn discovered_relations_verify() {
        for f in [tan(), FunctionSpec::builtin(Builtin::Exp)] {
            let d = discover_search(&f, 2, 16, ExecMode::best()).unwrap();
            for g in &d.basis {
                assert!(verify_aat(g, &f, 16, &VerifyOptions::default()).unwrap().verified());
            }
        }
    }

    #[test]
    fn translated_elements_keep_a_theorem() {
        for b in [Builtin::Exp, Builtin::Tan] {
            let g = FunctionSpec::translate(FunctionSpec::builtin(b), Complex64::new(0.25, 0.0));
            let moved = discover_aat(&g, (1, 1, 1), 16, ExecMode::best()).unwrap();
            assert!(!moved.exact);
            assert_eq!(moved.kernel_dim, 1, "{:?}", b);
            assert!(verify_aat(&moved.basis[0], &g, 16, &VerifyOptions::default()).unwrap().verified());
        }
    }

    #[test]
    fn relation_examples() {
        let sin = FunctionSpec::builtin(Builtin::Sin);
        let cos = FunctionSpec::builtin(Builtin::Cos);
        let xy = |s: &str| MultiPoly::parse(s, &["X", "Y"]).unwrap();
        let b = algebraic_relation_basis(&sin, &cos, (2, 2), 16).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].is_scalar_multiple_of(&xy("X^2+Y^2-1")));
        let sin2 = FunctionSpec::from_element(TruncSeries::Exact(
            sin.element_exact(c0(), 20).unwrap().unwrap().mul(&sin.element_exact(c0(), 20).unwrap().unwrap()).unwrap(),
        ));
        let h = algebraic_relation(&sin, &sin2, 3, 20).unwrap().unwrap();
        assert!(h.is_scalar_multiple_of(&xy("X^2-Y")));
        let curve = crate::algebroid::AlgebroidCurve::parse("z^2-u").unwrap();
        let one = Complex64::new(1.0, 0.0);
        let f0 = FunctionSpec::algebroid(curve.clone(), 0, one).unwrap();
        let f1 = FunctionSpec::algebroid(curve, 1, one).unwrap();
        let b = algebraic_relation_basis(&f0, &f1, (1, 1), 16).unwrap();
        assert!(b.iter().any(|h| h.is_scalar_multiple_of(&xy("X+Y"))));
    }

    #[test]
    fn koebe_examples() {
        let exp = FunctionSpec::builtin(Builtin::Exp);
        let two_exp = FunctionSpec::translate(exp.clone(), Complex64::new(2f64.ln(), 0.0));
        let r = koebe_normalize(&p("W-U*V"), &exp, &two_exp, &two_exp, 16, 1e-9).unwrap();
        assert!(r.g_bar.is_scalar_multiple_of(&p("W-U*V")), "{}", r.g_bar);
        assert!(r.residual_valuation >= 12);
        let r = koebe_normalize(&p("W-U*V"), &exp, &exp, &exp, 16, 1e-9).unwrap();
        assert!(r.g_bar.is_scalar_multiple_of(&p("W-U*V")));
        let id = FunctionSpec::rational("u", "1").unwrap();
        let at = |a: f64| FunctionSpec::translate(id.clone(), Complex64::new(a, 0.0));
        // P1(x) = 1 + x, P2(y) = 2 + y, P3(x+y) = 3 + x + y
        let r = koebe_normalize(&p("W-U-V-1"), &at(1.0), &at(2.0), &at(3.0), 16, 1e-9);
        assert!(matches!(r, Err(Error::PreconditionFailed(_))));
        let r = koebe_normalize(&p("W-U-V"), &at(1.0), &at(2.0), &at(3.0), 16, 1e-9).unwrap();
        assert!(r.g_bar.is_scalar_multiple_of(&p("W-U-V+1")), "{}", r.g_bar);
        assert!(r.exact && r.residual_valuation >= 16);
    }

    #[test]
    fn doubling_exp() {
        let f = MultiPoly::parse("x-z^2", &["z", "x"]).unwrap();
        let r = doubling_chain(&f, 3, &FunctionSpec::builtin(Builtin::Exp), 16).unwrap();
        assert!(r.gamma.is_scalar_multiple_of(&MultiPoly::parse("x-z^8", &["z", "x"]).unwrap()));
        assert!(r.residual_valuation >= 12);
    }

    #[test]
    fn schwarz_tan_needs_no_step() {
        let r = schwarz_reduce(&p("W*(1-U*V)-(U+V)"), &tan(), &SchwarzOptions { order: 12, relation_cap: 0, ..Default::default() }).unwrap();
        assert_eq!(r.final_degree, 1);
        assert!(r.shifts.is_empty());
        let t = tan().element::<Complex64>(c0(), 12).unwrap();
        for k in 0..12 {
            assert!((r.psi_series.coeffs[k] - t.coeffs[k]).norm() < 1e-12);
        }
        assert!(r.invariance_residual < 1e-30);
    }

    #[test]
    fn schwarz_sin_quartic() {
        let sin = FunctionSpec::builtin(Builtin::Sin);
        let g = p("(W^2+U^2-V^2)^2-4*U^2*W^2*(1-V^2)");
        let r = schwarz_reduce(&g, &sin, &SchwarzOptions::default()).unwrap();
        assert_eq!(r.degrees[0], 4);
        assert_eq!(r.final_degree, 2);
        assert_eq!(r.shifts.len(), 1);
        assert!(r.invariance_residual < 1e-25, "{}", r.invariance_residual);
        assert!(r.root_residual < 1e-25, "{}", r.root_residual);
        // psi = sin^2
        let s = sin.element::<Complex64>(c0(), 24).unwrap();
        let s2 = s.mul(&s).unwrap();
        for k in 0..20 {
            assert!((r.psi_series.coeffs[k] - s2.coeffs[k]).norm() < 1e-12, "k={}", k);
        }
        let xy = |s: &str| MultiPoly::parse(s, &["X", "Y"]).unwrap();
        assert!(r.h.unwrap().is_scalar_multiple_of(&xy("X^2-Y")));
    }

    #[test]
    fn schwarz_rejects_zero_shift() {
        let o = SchwarzOptions { shifts: Some(vec![c0()]), ..Default::default() };
        assert!(matches!(schwarz_reduce(&p("W-U*V"), &tan(), &o), Err(Error::ShiftDegenerate)));
    }
}
