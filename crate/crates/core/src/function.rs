//! Descriptions of the analytic function under study and their elements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebroid::{track_branch, AlgebroidCurve, CurveJson, PolySpec, TrackOptions};
use crate::error::{Error, Result};
use crate::hp::Fixed;
use crate::poly::MultiPoly;
use crate::scalar::{Analytic, Coeff, Scalar};
use crate::series::{Series, SeriesJson, TruncSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Exp,
    Sin,
    Cos,
    Tan,
}

#[derive(Clone, Debug)]
pub enum FunctionKind {
    Builtin(Builtin),
    /// `num(u) / den(u)`.
    Rational { num: MultiPoly, den: MultiPoly },
    /// Branch `branch` (index into the sorted roots) of a curve at `base`.
    Algebroid { curve: Box<AlgebroidCurve>, branch: usize, base: Complex64 },
    Element(TruncSeries),
    /// `φ(u + shift)`.
    Translate { of: Box<FunctionSpec>, shift: Complex64 },
}

#[derive(Clone, Debug)]
pub struct FunctionSpec {
    pub name: String,
    pub kind: FunctionKind,
}

/// Coefficient types an element can be built in.
pub trait Lift: Coeff {
    /// `(exp a, sin a, cos a)` when representable.
    fn elementary(a: &Self) -> Option<(Self, Self, Self)>;
    /// A point or coefficient; `exact` is preferred when present.
    fn lift(z: Complex64, exact: Option<&Scalar>) -> Option<Self>;
}

impl Lift for Scalar {
    fn elementary(a: &Self) -> Option<(Self, Self, Self)> {
        a.is_zero().then(|| (Scalar::one(), Scalar::zero(), Scalar::one()))
    }
    fn lift(_: Complex64, exact: Option<&Scalar>) -> Option<Self> {
        exact.cloned()
    }
}

impl Lift for Complex64 {
    fn elementary(a: &Self) -> Option<(Self, Self, Self)> {
        Some((a.exp(), a.sin(), a.cos()))
    }
    fn lift(z: Complex64, exact: Option<&Scalar>) -> Option<Self> {
        Some(exact.map_or(z, |s| s.to_c64()))
    }
}

impl Lift for Fixed {
    fn elementary(a: &Self) -> Option<(Self, Self, Self)> {
        Some((Analytic::exp(a), Analytic::sin(a), Analytic::cos(a)))
    }
    fn lift(z: Complex64, exact: Option<&Scalar>) -> Option<Self> {
        Some(exact.map_or_else(|| <Fixed as Analytic>::from_c64(z), Fixed::from_scalar))
    }
}

fn snap(z: Complex64) -> Option<Scalar> {
    Scalar::approximate(z, 1e-15, 1_000_000).filter(|s| s.to_c64() == z || (s.to_c64() - z).norm() <= 1e-15)
}

fn factorials<C: Coeff>(order: usize) -> Vec<C> {
    // 1/k!
    let mut out = Vec::with_capacity(order);
    let mut f = C::one();
    for k in 0..order {
        if k > 0 {
            f = f.div_ref(&C::from_i64(k as i64));
        }
        out.push(f.clone());
    }
    out
}

fn poly_at<C: Coeff>(p: &MultiPoly, a: &C, order: usize) -> Vec<C> {
    // Taylor coefficients of p(a + w)
    let coeffs: Vec<C> = p.coeffs_in("u").iter().map(|c| C::from_scalar(&c.constant_term())).collect();
    let d = coeffs.len();
    let mut out = vec![C::zero(); order.max(d)];
    let mut apow = vec![C::one()];
    for k in 1..d {
        apow.push(apow[k - 1].mul_ref(a));
    }
    for (m, o) in out.iter_mut().enumerate().take(d) {
        let mut binom: i64 = 1;
        let mut acc = C::zero();
        for k in m..d {
            if k > m {
                binom = binom * k as i64 / (k - m) as i64;
            }
            acc = acc.add_ref(&coeffs[k].mul_ref(&apow[k - m]).scale_i64(binom));
        }
        *o = acc;
    }
    out.truncate(order);
    out
}

impl FunctionSpec {
    pub fn builtin(b: Builtin) -> Self {
        let name = match b {
            Builtin::Exp => "exp",
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Tan => "tan",
        };
        FunctionSpec { name: name.into(), kind: FunctionKind::Builtin(b) }
    }

    pub fn rational(num: &str, den: &str) -> Result<Self> {
        let num = MultiPoly::parse(num, &["u"])?;
        let den = MultiPoly::parse(den, &["u"])?;
        FunctionSpec::rational_polys(num, den)
    }

    pub fn rational_polys(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let num = num.with_vars(&["u"])?;
        let den = den.with_vars(&["u"])?;
        let name = format!("({})/({})", num, den);
        Ok(FunctionSpec { name, kind: FunctionKind::Rational { num, den } })
    }

    pub fn algebroid(curve: AlgebroidCurve, branch: usize, base: Complex64) -> Result<Self> {
        let vals = curve.branch_values(base)?;
        if branch >= vals.len() {
            return Err(Error::InvalidInput(format!("branch {} out of range 0..{}", branch, vals.len())));
        }
        if curve.singular_locations()?.iter().any(|s| (s - base).norm() < 1e-8) {
            return Err(Error::SingularBasePoint(base));
        }
        Ok(FunctionSpec {
            name: format!("branch {} of {}", branch, curve.poly()),
            kind: FunctionKind::Algebroid { curve: Box::new(curve), branch, base },
        })
    }

    pub fn from_element(s: TruncSeries) -> Self {
        FunctionSpec { name: "element".into(), kind: FunctionKind::Element(s) }
    }

    pub fn translate(of: FunctionSpec, shift: Complex64) -> Self {
        FunctionSpec { name: format!("{}(u + {})", of.name, shift), kind: FunctionKind::Translate { of: Box::new(of), shift } }
    }

    /// `0`, or `1/2` when the function is singular at `0`.
    pub fn base_point(&self) -> Complex64 {
        match &self.kind {
            FunctionKind::Algebroid { base, .. } => *base,
            FunctionKind::Element(s) => s.center(),
            _ => {
                let zero = Complex64::new(0.0, 0.0);
                if self.element::<Complex64>(zero, 4).is_ok() {
                    zero
                } else {
                    Complex64::new(0.5, 0.0)
                }
            }
        }
    }

    /// Taylor element at `center` with `order` coefficients, exact when the
    /// Taylor data is rational. `Ok(None)` when no exact element exists.
    pub fn element_exact(&self, center: Complex64, order: usize) -> Result<Option<Series<Scalar>>> {
        match snap(center) {
            Some(c) => self.build::<Scalar>(center, Some(&c), order),
            None => Ok(None),
        }
    }

    /// Numeric Taylor element at `center`.
    pub fn element<C: Lift>(&self, center: Complex64, order: usize) -> Result<Series<C>> {
        let exact = snap(center);
        self.build::<C>(center, exact.as_ref(), order)?
            .ok_or_else(|| Error::InvalidInput(format!("{} has no element in this coefficient type", self.name)))
    }

    /// Exact element when possible, otherwise numeric.
    pub fn element_any(&self, center: Complex64, order: usize) -> Result<TruncSeries> {
        if let Some(s) = self.element_exact(center, order)? {
            return Ok(TruncSeries::Exact(s));
        }
        Ok(TruncSeries::Numeric(self.element::<Complex64>(center, order)?))
    }

    fn build<C: Lift>(&self, center: Complex64, exact: Option<&Scalar>, order: usize) -> Result<Option<Series<C>>> {
        let Some(a) = C::lift(center, exact) else { return Ok(None) };
        match &self.kind {
            FunctionKind::Builtin(b) => {
                let Some((e, s, c)) = C::elementary(&a) else { return Ok(None) };
                let inv = factorials::<C>(order);
                let coeffs: Vec<C> = match b {
                    Builtin::Exp => inv.iter().map(|f| e.mul_ref(f)).collect(),
                    Builtin::Sin | Builtin::Cos | Builtin::Tan => {
                        // derivatives of sin cycle through sin, cos, -sin, -cos
                        let cyc = |start: usize| -> Vec<C> {
                            let vals = [s.clone(), c.clone(), s.neg_ref(), c.neg_ref()];
                            (0..order).map(|k| vals[(start + k) % 4].mul_ref(&inv[k])).collect()
                        };
                        match b {
                            Builtin::Sin => cyc(0),
                            Builtin::Cos => cyc(1),
                            _ => {
                                if c.magnitude() < 1e-12 {
                                    return Err(Error::SingularCenter(center));
                                }
                                let sn = Series::new(a.clone(), 0, cyc(0));
                                let cs = Series::new(a.clone(), 0, cyc(1));
                                return Ok(Some(sn.div(&cs, 1e-300)?));
                            }
                        }
                    }
                };
                Ok(Some(Series::new(a, 0, coeffs)))
            }
            FunctionKind::Rational { num, den } => {
                let d = poly_at::<C>(den, &a, order);
                if d[0].magnitude() < 1e-12 * d.iter().map(|x| x.magnitude()).fold(1.0, f64::max) || d[0].is_zero() {
                    return Err(Error::SingularCenter(center));
                }
                let n = Series::new(a.clone(), 0, poly_at::<C>(num, &a, order));
                let d = Series::new(a.clone(), 0, d);
                Ok(Some(n.div(&d, 1e-300)?.truncate(order as i32)))
            }
            FunctionKind::Algebroid { curve, branch, base } => {
                let value = self.algebroid_value(curve, *branch, *base, center)?;
                let branches = curve.puiseux_expand(center, order)?;
                let b = branches
                    .iter()
                    .filter(|b| b.e == 1 && b.low >= 0)
                    .min_by(|x, y| {
                        let vx = (x.eval_t(Complex64::new(0.0, 0.0)) - value).norm();
                        let vy = (y.eval_t(Complex64::new(0.0, 0.0)) - value).norm();
                        vx.total_cmp(&vy)
                    })
                    .ok_or(Error::SingularCenter(center))?;
                if (b.eval_t(Complex64::new(0.0, 0.0)) - value).norm() > 1e-6 * value.norm().max(1.0) {
                    return Err(Error::SingularCenter(center));
                }
                let mut coeffs = Vec::with_capacity(b.coeffs.len());
                for (k, z) in b.coeffs.iter().enumerate() {
                    match C::lift(*z, b.exact.as_ref().map(|e| &e[k])) {
                        Some(x) => coeffs.push(x),
                        None => return Ok(None),
                    }
                }
                let s = Series::new(a, b.low, coeffs);
                Ok(Some(s.truncate(order as i32)))
            }
            FunctionKind::Element(ts) => {
                let moved;
                let src = if (ts.center() - center).norm() == 0.0 {
                    ts
                } else {
                    moved = ts.rearrange_at(center, 1e-13)?;
                    &moved
                };
                let out = match src {
                    TruncSeries::Exact(s) => {
                        Series::new(a, s.low, s.coeffs.iter().map(|q| C::lift(q.to_c64(), Some(q)).unwrap_or_else(|| C::from_scalar(q))).collect())
                    }
                    TruncSeries::Numeric(s) => {
                        let mut v = Vec::with_capacity(s.coeffs.len());
                        for z in &s.coeffs {
                            match C::lift(*z, None) {
                                Some(x) => v.push(x),
                                None => return Ok(None),
                            }
                        }
                        Series::new(a, s.low, v)
                    }
                };
                Ok(Some(out.truncate(order as i32)))
            }
            FunctionKind::Translate { of, shift } => {
                let inner_center = center + shift;
                let inner_exact = match (exact, snap(*shift)) {
                    (Some(c), Some(s)) => Some(c + &s),
                    _ => None,
                };
                let Some(s) = of.build::<C>(inner_center, inner_exact.as_ref(), order)? else { return Ok(None) };
                Ok(Some(Series::new(a, s.low, s.coeffs)))
            }
        }
    }

    fn algebroid_value(&self, curve: &AlgebroidCurve, branch: usize, base: Complex64, u: Complex64) -> Result<Complex64> {
        let z0 = curve.branch_values(base)?[branch];
        if (u - base).norm() == 0.0 {
            return Ok(z0);
        }
        let opts = TrackOptions::default();
        match track_branch(curve, &[base, u], z0, &opts) {
            Err(Error::NearSingular(_)) => {
                // go around through a point off the line
                let d = u - base;
                let mid = base + d * Complex64::new(0.5, 0.5);
                track_branch(curve, &[base, mid, u], z0, &opts)
            }
            r => r,
        }
    }

    /// `(φ(u), φ'(u))`.
    pub fn eval_d(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        let r = match &self.kind {
            FunctionKind::Builtin(b) => match b {
                Builtin::Exp => {
                    let e = u.exp();
                    (e, e)
                }
                Builtin::Sin => (u.sin(), u.cos()),
                Builtin::Cos => (u.cos(), -u.sin()),
                Builtin::Tan => {
                    if u.cos().norm() < 1e-14 {
                        return Err(Error::SingularCenter(u));
                    }
                    let t = u.tan();
                    (t, 1.0 + t * t)
                }
            },
            FunctionKind::Rational { num, den } => {
                let ev = |p: &MultiPoly| -> (Complex64, Complex64) {
                    let cs: Vec<Complex64> = p.coeffs_in("u").iter().map(|c| c.constant_term().to_c64()).collect();
                    crate::roots::horner(&cs, u)
                };
                let (n, dn) = ev(num);
                let (d, dd) = ev(den);
                if d.norm() < 1e-300 {
                    return Err(Error::SingularCenter(u));
                }
                (n / d, (dn * d - n * dd) / (d * d))
            }
            FunctionKind::Algebroid { curve, branch, base } => {
                let z = self.algebroid_value(curve, *branch, *base, u)?;
                let [_, fu, fz, _] = curve.partials(u, z);
                if fz.norm() == 0.0 {
                    return Err(Error::SingularCenter(u));
                }
                (z, -fu / fz)
            }
            FunctionKind::Element(s) => {
                let n = s.to_numeric();
                let d = n.derivative();
                (n.eval(u), d.eval(u))
            }
            FunctionKind::Translate { of, shift } => of.eval_d(u + shift)?,
        };
        if !(r.0.re.is_finite() && r.0.im.is_finite() && r.1.re.is_finite() && r.1.im.is_finite()) {
            return Err(Error::SingularCenter(u));
        }
        Ok(r)
    }

    pub fn eval(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.eval_d(u)?.0)
    }

    /// True for the kinds known to be single valued rational functions.
    pub fn is_rational(&self) -> bool {
        match &self.kind {
            FunctionKind::Rational { .. } => true,
            FunctionKind::Translate { of, .. } => of.is_rational(),
            _ => false,
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            FunctionKind::Builtin(b) => serde_json::json!({"type": "builtin", "name": b}),
            FunctionKind::Rational { num, den } => {
                serde_json::json!({"type": "rational", "num": num.to_json(), "den": den.to_json()})
            }
            FunctionKind::Algebroid { curve, branch, base } => serde_json::json!({
                "type": "algebroid",
                "curve": curve.to_json(),
                "branch": branch,
                "base": [base.re, base.im],
            }),
            FunctionKind::Element(s) => serde_json::to_value(s.to_json()).expect("serializable"),
            FunctionKind::Translate { of, shift } => serde_json::json!({
                "type": "translate",
                "of": of.to_json(),
                "shift": [shift.re, shift.im],
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v.get("type").and_then(Value::as_str).ok_or_else(|| schema("missing string field `type`"))?;
        let mut spec = match kind {
            "builtin" => {
                let j: BuiltinJson = from_value(v)?;
                FunctionSpec::builtin(j.name)
            }
            "rational" => {
                let j: RationalJson = from_value(v)?;
                FunctionSpec::rational_polys(j.num.to_poly_in(&["u"])?, j.den.to_poly_in(&["u"])?)?
            }
            "algebroid" => {
                let j: AlgebroidJson = from_value(v)?;
                let curve = AlgebroidCurve::from_json(&j.curve)?;
                let base = match j.base {
                    Some([re, im]) => Complex64::new(re, im),
                    None => default_curve_base(&curve)?,
                };
                FunctionSpec::algebroid(curve, j.branch, base)?
            }
            "element" => {
                let j: SeriesJson = from_value(v)?;
                FunctionSpec::from_element(TruncSeries::from_json(&j)?)
            }
            "translate" => {
                let j: TranslateJson = from_value(v)?;
                FunctionSpec::translate(FunctionSpec::from_json(&j.of)?, Complex64::new(j.shift[0], j.shift[1]))
            }
            other => return Err(schema(&format!("unknown function type `{}`", other))),
        };
        if let Some(name) = v.get("name").and_then(Value::as_str) {
            if kind != "builtin" {
                spec.name = name.to_string();
            }
        }
        Ok(spec)
    }
}

fn default_curve_base(curve: &AlgebroidCurve) -> Result<Complex64> {
    let sing = curve.singular_locations()?;
    for cand in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)] {
        if sing.iter().all(|s| (s - cand).norm() > 1e-3) {
            return Ok(cand);
        }
    }
    Ok(Complex64::new(0.5, 0.25))
}

fn schema(msg: &str) -> Error {
    Error::Schema { line: 0, column: 0, msg: msg.to_string() }
}

fn from_value<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| schema(&e.to_string()))
}

impl PolySpec {
    pub fn to_poly_in(&self, vars: &[&str]) -> Result<MultiPoly> {
        match self {
            PolySpec::Poly(j) => MultiPoly::from_json(j)?.with_vars(vars),
            PolySpec::Expr(s) => MultiPoly::parse(s, vars),
        }
    }
}

#[derive(Deserialize)]
struct BuiltinJson {
    name: Builtin,
}

#[derive(Deserialize)]
struct RationalJson {
    num: PolySpec,
    den: PolySpec,
}

#[derive(Deserialize)]
struct AlgebroidJson {
    curve: CurveJson,
    #[serde(default)]
    branch: usize,
    base: Option<[f64; 2]>,
}

#[derive(Deserialize)]
struct TranslateJson {
    of: Value,
    shift: [f64; 2],
}
