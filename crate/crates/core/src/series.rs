//! Truncated power series in one and two variables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::strings_to_rat;
use crate::scalar::{Coeff, Scalar};

/// `Σ coeffs[k] (z − center)^(low + k)`, known up to but excluding
/// exponent `order = low + coeffs.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    pub center: C,
    pub low: i32,
    pub coeffs: Vec<C>,
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn binomial_i64(n: usize, k: usize) -> i64 {
    let k = k.min(n - k);
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

impl<C: Coeff> Series<C> {
    pub fn new(center: C, low: i32, coeffs: Vec<C>) -> Self {
        Series { center, low, coeffs }
    }

    /// Taylor series with coefficients for exponents `0..coeffs.len()`.
    pub fn taylor(center: C, coeffs: Vec<C>) -> Self {
        Series { center, low: 0, coeffs }
    }

    pub fn constant(center: C, c: C, order: usize) -> Self {
        let mut coeffs = vec![C::zero(); order];
        if order > 0 {
            coeffs[0] = c;
        }
        Series::taylor(center, coeffs)
    }

    /// The series of `z` itself around `center`: `center + w`.
    pub fn identity(center: C, order: usize) -> Self {
        let mut coeffs = vec![C::zero(); order];
        if order > 0 {
            coeffs[0] = center.clone();
        }
        if order > 1 {
            coeffs[1] = C::one();
        }
        Series::taylor(center, coeffs)
    }

    pub fn order(&self) -> i32 {
        self.low + self.coeffs.len() as i32
    }

    /// Coefficient of exponent `k`; zero below `low`, `None` at or beyond
    /// the order.
    pub fn coeff(&self, k: i32) -> Option<C> {
        if k >= self.order() {
            None
        } else if k < self.low {
            Some(C::zero())
        } else {
            Some(self.coeffs[(k - self.low) as usize].clone())
        }
    }

    /// Exponent of the first coefficient that is not negligible.
    pub fn valuation(&self, tol: f64) -> Option<i32> {
        self.coeffs.iter().position(|c| !c.is_negligible(tol)).map(|p| self.low + p as i32)
    }

    /// Drops leading negligible coefficients.
    pub fn normalized(&self, tol: f64) -> Self {
        match self.coeffs.iter().position(|c| !c.is_negligible(tol)) {
            Some(p) => Series::new(self.center.clone(), self.low + p as i32, self.coeffs[p..].to_vec()),
            None => Series::new(self.center.clone(), self.order(), Vec::new()),
        }
    }

    pub fn truncate(&self, order: i32) -> Self {
        let keep = (order - self.low).clamp(0, self.coeffs.len() as i32) as usize;
        Series::new(self.center.clone(), self.low, self.coeffs[..keep].to_vec())
    }

    fn check_center(&self, o: &Self) -> Result<()> {
        if self.center == o.center {
            Ok(())
        } else {
            Err(Error::CenterMismatch)
        }
    }

    fn add_sub(&self, o: &Self, sub: bool) -> Result<Self> {
        self.check_center(o)?;
        let low = self.low.min(o.low);
        let order = self.order().min(o.order());
        let coeffs = (low..order)
            .map(|k| {
                let a = self.coeff(k).unwrap();
                let b = o.coeff(k).unwrap();
                if sub {
                    a.sub_ref(&b)
                } else {
                    a.add_ref(&b)
                }
            })
            .collect();
        Ok(Series::new(self.center.clone(), low, coeffs))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.add_sub(o, false)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add_sub(o, true)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_center(o)?;
        let low = self.low + o.low;
        let order = (self.order() + o.low).min(o.order() + self.low);
        let len = (order - low).max(0) as usize;
        let mut coeffs = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j].mul_add_assign(a, b);
            }
        }
        Ok(Series::new(self.center.clone(), low, coeffs))
    }

    /// Division; a divisor starting at exponent `v` shifts the result down
    /// by `v`, producing a Laurent tail when `v` exceeds the dividend's low
    /// exponent.
    pub fn div(&self, o: &Self, tol: f64) -> Result<Self> {
        self.check_center(o)?;
        let b = o.normalized(tol);
        if b.coeffs.is_empty() {
            return Err(Error::DivisionByZeroSeries);
        }
        let v = b.low;
        let order = self.order().min(self.low + b.order() - v) - v;
        let low = self.low - v;
        let len = (order - low).max(0) as usize;
        let b0 = b.coeffs[0].clone();
        let mut q: Vec<C> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = self.coeffs.get(k).cloned().unwrap_or_else(C::zero);
            for j in 1..=k.min(b.coeffs.len() - 1) {
                acc = acc.sub_ref(&b.coeffs[j].mul_ref(&q[k - j]));
            }
            q.push(acc.div_ref(&b0));
        }
        Ok(Series::new(self.center.clone(), low, q))
    }

    pub fn scale(&self, c: &C) -> Self {
        Series::new(self.center.clone(), self.low, self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn neg(&self) -> Self {
        Series::new(self.center.clone(), self.low, self.coeffs.iter().map(|a| a.neg_ref()).collect())
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<C> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a.scale_i64((self.low + k as i32) as i64))
            .collect();
        let s = Series::new(self.center.clone(), self.low - 1, coeffs);
        if self.low == 0 {
            // the constant term's derivative is exactly zero, drop it
            Series::new(s.center.clone(), 0, s.coeffs[1.min(s.coeffs.len())..].to_vec())
        } else {
            s
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series::new(f(&self.center), self.low, self.coeffs.iter().map(f).collect())
    }

    pub fn to_numeric(&self) -> Series<Complex64> {
        self.map(|c| c.to_c64())
    }

    /// Sums the truncated series at `z` (numerically).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z - self.center.to_c64();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c.to_c64();
        }
        acc * w.powi(self.low)
    }

    pub fn is_holomorphic(&self, tol: f64) -> bool {
        self.normalized(tol).low >= 0 || self.valuation(tol).is_none()
    }

    /// Coefficients as a Taylor list starting at exponent 0.
    pub fn taylor_coeffs(&self) -> Result<Vec<C>> {
        if self.low < 0 {
            if self.coeffs[..(-self.low) as usize].iter().all(|c| c.is_zero()) {
                return Ok(self.coeffs[(-self.low) as usize..].to_vec());
            }
            return Err(Error::NotHolomorphic);
        }
        let mut out = vec![C::zero(); self.low as usize];
        out.extend(self.coeffs.iter().cloned());
        Ok(out)
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

/// Cauchy-Hadamard estimate of the convergence radius from the top half of
/// the nonzero coefficients. Returns `f64::INFINITY` when the coefficients
/// decay faster than any geometric sequence.
pub fn radius_estimate<C: Coeff>(s: &Series<C>) -> Result<f64> {
    let pts: Vec<(f64, f64)> = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| ((s.low + k as i32) as f64, c.magnitude()))
        .filter(|&(n, m)| n >= 1.0 && m > 0.0 && m.is_finite())
        .collect();
    if pts.len() < 8 {
        return Err(Error::TooFewCoefficients(pts.len()));
    }
    let top = &pts[pts.len() / 2..];
    let roots: Vec<f64> = top.iter().map(|&(n, m)| m.powf(-1.0 / n)).collect();
    let first = roots[0];
    let last = *roots.last().unwrap();
    if last > 1.5 * first {
        return Ok(f64::INFINITY);
    }
    let r = roots.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if r > 1e12 { f64::INFINITY } else { r })
}

/// Re-expands a holomorphic element around `new_center`.
///
/// The binomial re-expansion of coefficient `m` is a tail sum; only the
/// prefix of coefficients whose estimated truncation error is below
/// `tol · max(1, |b_m|)` is kept, so the result usually has lower order.
pub fn rearrange_at(s: &Series<Complex64>, new_center: Complex64, tol: f64) -> Result<Series<Complex64>> {
    let d = new_center - s.center;
    if d.norm() == 0.0 {
        return Ok(s.clone());
    }
    let a = s.taylor_coeffs()?;
    let radius = match radius_estimate(s) {
        Ok(r) => r,
        Err(Error::TooFewCoefficients(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    if d.norm() >= radius {
        return Err(Error::OutsideDisc { distance: d.norm(), radius });
    }
    let n = a.len();
    // decay model for the unknown coefficients a_N, a_{N+1}, ...
    let nz: Vec<usize> = (0..n).filter(|&k| a[k].norm() > 0.0).collect();
    let last_mag = nz.last().map(|&k| a[k].norm()).unwrap_or(0.0);
    let rho = if radius.is_finite() {
        1.0 / radius
    } else if nz.len() >= 2 {
        let (k1, k2) = (nz[nz.len() - 2], nz[nz.len() - 1]);
        (a[k2].norm() / a[k1].norm()).powf(1.0 / (k2 - k1) as f64)
    } else {
        0.0
    };
    let dn = d.norm();
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        let mut b = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(1.0, 0.0);
        for (k, ak) in a.iter().enumerate().skip(m) {
            b += *ak * dp * binomial(k, m);
            dp *= d;
        }
        let mut tail = 0.0;
        let mut mag = last_mag;
        for k in n..n + 400 {
            mag *= rho;
            let t = binomial(k, m) * mag * dn.powi((k - m) as i32);
            tail += t;
            if t < 1e-30 * tail.max(1e-300) || mag == 0.0 {
                break;
            }
        }
        if tail > tol * b.norm().max(1.0) {
            break;
        }
        out.push(b);
    }
    if out.is_empty() {
        return Err(Error::OutsideDisc { distance: dn, radius });
    }
    Ok(Series::taylor(new_center, out))
}

/// Exact re-expansion of a polynomial-length exact series (all terms known),
/// used when the input is a finite Taylor polynomial.
pub fn shift_polynomial(a: &[Scalar], d: &Scalar) -> Vec<Scalar> {
    let n = a.len();
    let mut out = vec![Scalar::zero(); n];
    for (m, o) in out.iter_mut().enumerate() {
        for (k, ak) in a.iter().enumerate().skip(m) {
            *o = &*o + &(ak * &(&d.pow((k - m) as u32) * &Scalar::from_int(binomial_i64(k, m))));
        }
    }
    out
}

/// Bivariate series `Σ c_ij x^i y^j` truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<C> {
    pub center: (C, C),
    order: usize,
    data: Vec<C>,
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

impl<C: Coeff> BiSeries<C> {
    pub fn zero(center: (C, C), order: usize) -> Self {
        BiSeries { center, order, data: vec![C::zero(); order * (order + 1) / 2] }
    }

    pub fn constant(center: (C, C), c: C, order: usize) -> Self {
        let mut s = BiSeries::zero(center, order);
        if order > 0 {
            s.data[0] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> C {
        if i + j < self.order {
            self.data[tri(i, j)].clone()
        } else {
            C::zero()
        }
    }

    pub fn coeff_ref(&self, i: usize, j: usize) -> &C {
        &self.data[tri(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, c: C) {
        if i + j < self.order {
            self.data[tri(i, j)] = c;
        }
    }

    /// Iterator over `(i, j, coefficient)` for all stored positions.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        (0..self.order).flat_map(move |d| (0..=d).map(move |j| (d - j, j, &self.data[tri(d - j, j)])))
    }

    /// A series in `x` alone.
    pub fn from_x(s: &Series<C>, center_y: C, order: usize) -> Result<Self> {
        let a = s.taylor_coeffs()?;
        let order = order.min(a.len());
        let mut b = BiSeries::zero((s.center.clone(), center_y), order);
        for (i, c) in a.into_iter().enumerate().take(order) {
            b.set(i, 0, c);
        }
        Ok(b)
    }

    /// A series in `y` alone.
    pub fn from_y(s: &Series<C>, center_x: C, order: usize) -> Result<Self> {
        let a = s.taylor_coeffs()?;
        let order = order.min(a.len());
        let mut b = BiSeries::zero((center_x, s.center.clone()), order);
        for (j, c) in a.into_iter().enumerate().take(order) {
            b.set(0, j, c);
        }
        Ok(b)
    }

    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let order = self.order.min(o.order);
        let n = order * (order + 1) / 2;
        BiSeries {
            center: self.center.clone(),
            order,
            data: (0..n).map(|k| f(&self.data[k], &o.data[k])).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub_ref(b))
    }

    pub fn scale(&self, c: &C) -> Self {
        BiSeries { center: self.center.clone(), order: self.order, data: self.data.iter().map(|a| a.mul_ref(c)).collect() }
    }

    pub fn neg(&self) -> Self {
        BiSeries { center: self.center.clone(), order: self.order, data: self.data.iter().map(|a| a.neg_ref()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = BiSeries::zero(self.center.clone(), order);
        for da in 0..order {
            for ja in 0..=da {
                let a = &self.data[tri(da - ja, ja)];
                if a.is_zero() {
                    continue;
                }
                let ia = da - ja;
                for db in 0..order - da {
                    for jb in 0..=db {
                        let b = &o.data[tri(db - jb, jb)];
                        if b.is_zero() {
                            continue;
                        }
                        out.data[tri(ia + db - jb, ja + jb)].mul_add_assign(a, b);
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self, tol: f64) -> Result<Self> {
        let a00 = self.coeff(0, 0);
        if self.order == 0 || a00.is_negligible(tol) {
            return Err(Error::DivisionByZeroSeries);
        }
        let mut b = BiSeries::zero(self.center.clone(), self.order);
        b.data[0] = C::one().div_ref(&a00);
        for d in 1..self.order {
            for j in 0..=d {
                let i = d - j;
                let mut acc = C::zero();
                for k in 0..=i {
                    for l in 0..=j {
                        if k + l == 0 {
                            continue;
                        }
                        let a = &self.data[tri(k, l)];
                        if a.is_zero() {
                            continue;
                        }
                        acc.mul_add_assign(a, &b.data[tri(i - k, j - l)]);
                    }
                }
                b.data[tri(i, j)] = acc.neg_ref().div_ref(&a00);
            }
        }
        Ok(b)
    }

    pub fn div(&self, o: &Self, tol: f64) -> Result<Self> {
        Ok(self.mul(&o.inv(tol)?))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        BiSeries { center: self.center.clone(), order, data: self.data[..order * (order + 1) / 2].to_vec() }
    }

    /// Lowest total degree carrying a non-negligible coefficient; `None`
    /// when the series vanishes to its order.
    pub fn valuation(&self, tol: f64) -> Option<usize> {
        (0..self.order).find(|&d| (0..=d).any(|j| !self.data[tri(d - j, j)].is_negligible(tol)))
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.valuation(tol).is_none()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Setting `y = 0`.
    pub fn restrict_y0(&self) -> Series<C> {
        Series::taylor(self.center.0.clone(), (0..self.order).map(|i| self.coeff(i, 0)).collect())
    }

    pub fn dx(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = BiSeries::zero(self.center.clone(), order);
        for d in 0..order {
            for j in 0..=d {
                let i = d - j;
                out.data[tri(i, j)] = self.data[tri(i + 1, j)].scale_i64((i + 1) as i64);
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = BiSeries::zero(self.center.clone(), order);
        for d in 0..order {
            for j in 0..=d {
                let i = d - j;
                out.data[tri(i, j)] = self.data[tri(i, j + 1)].scale_i64((j + 1) as i64);
            }
        }
        out
    }

    /// `∂/∂x − ∂/∂y`, which vanishes exactly for functions of `x + y`.
    pub fn pde_residual(&self) -> Self {
        self.dx().sub(&self.dy())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> BiSeries<D> {
        BiSeries { center: (f(&self.center.0), f(&self.center.1)), order: self.order, data: self.data.iter().map(f).collect() }
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, j, c) in self.iter() {
            acc += c.to_c64() * x.powu(i as u32) * y.powu(j as u32);
        }
        acc
    }
}

/// Expands `f(c + x + y)` from the element of `f` at `c`: the coefficient of
/// `x^i y^j` is `C(i+j, i) · a_{i+j}`.
pub fn compose_shift<C: Coeff>(f: &Series<C>, order: usize) -> Result<BiSeries<C>> {
    let a = f.taylor_coeffs()?;
    let order = order.min(a.len());
    let mut b = BiSeries::zero((f.center.clone(), C::zero()), order);
    for d in 0..order {
        for j in 0..=d {
            b.set(d - j, j, a[d].scale_i64(binomial_i64(d, j)));
        }
    }
    Ok(b)
}

/// Series with an exactness tag.
#[derive(Clone, Debug, PartialEq)]
pub enum TruncSeries {
    Exact(Series<Scalar>),
    Numeric(Series<Complex64>),
}

impl TruncSeries {
    pub fn is_exact(&self) -> bool {
        matches!(self, TruncSeries::Exact(_))
    }

    pub fn order(&self) -> i32 {
        match self {
            TruncSeries::Exact(s) => s.order(),
            TruncSeries::Numeric(s) => s.order(),
        }
    }

    pub fn low(&self) -> i32 {
        match self {
            TruncSeries::Exact(s) => s.low,
            TruncSeries::Numeric(s) => s.low,
        }
    }

    pub fn center(&self) -> Complex64 {
        match self {
            TruncSeries::Exact(s) => s.center.to_c64(),
            TruncSeries::Numeric(s) => s.center,
        }
    }

    /// One-way promotion to floating point.
    pub fn to_numeric(&self) -> Series<Complex64> {
        match self {
            TruncSeries::Exact(s) => s.to_numeric(),
            TruncSeries::Numeric(s) => s.clone(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            TruncSeries::Exact(s) => s.eval(z),
            TruncSeries::Numeric(s) => s.eval(z),
        }
    }

    pub fn radius(&self) -> Result<f64> {
        match self {
            TruncSeries::Exact(s) => radius_estimate(s),
            TruncSeries::Numeric(s) => radius_estimate(s),
        }
    }

    /// Arithmetic between tagged series; mixing promotes to numeric.
    pub fn arith(&self, o: &TruncSeries, op: SeriesOp, tol: f64) -> Result<TruncSeries> {
        match (self, o) {
            (TruncSeries::Exact(a), TruncSeries::Exact(b)) => Ok(TruncSeries::Exact(apply(a, b, op, tol)?)),
            _ => Ok(TruncSeries::Numeric(apply(&self.to_numeric(), &o.to_numeric(), op, tol)?)),
        }
    }

    pub fn rearrange_at(&self, new_center: Complex64, tol: f64) -> Result<TruncSeries> {
        if new_center == self.center() {
            return Ok(self.clone());
        }
        Ok(TruncSeries::Numeric(rearrange_at(&self.to_numeric(), new_center, tol)?))
    }

    pub fn to_json(&self) -> SeriesJson {
        let c = self.center();
        match self {
            TruncSeries::Exact(s) => SeriesJson {
                kind: Some("element".into()),
                center: [c.re, c.im],
                low: s.low,
                order: s.order(),
                exact: true,
                coeffs: s
                    .coeffs
                    .iter()
                    .map(CoeffJson::from)
                    .collect(),
            },
            TruncSeries::Numeric(s) => SeriesJson {
                kind: Some("element".into()),
                center: [c.re, c.im],
                low: s.low,
                order: s.order(),
                exact: false,
                coeffs: s.coeffs.iter().map(|z| CoeffJson::Float([z.re, z.im])).collect(),
            },
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<TruncSeries> {
        if j.order - j.low != j.coeffs.len() as i32 {
            return Err(Error::InvalidInput(format!(
                "order {} and low {} imply {} coefficients, found {}",
                j.order,
                j.low,
                j.order - j.low,
                j.coeffs.len()
            )));
        }
        let cz = Complex64::new(j.center[0], j.center[1]);
        if j.exact {
            let mut cs = Vec::with_capacity(j.coeffs.len());
            for c in &j.coeffs {
                match c {
                    CoeffJson::Exact { re, im } => cs.push(Scalar::new(strings_to_rat(re)?, strings_to_rat(im)?)),
                    CoeffJson::Float(_) => {
                        return Err(Error::InvalidInput("float coefficient in an exact series".into()))
                    }
                }
            }
            Ok(TruncSeries::Exact(Series::new(Scalar::from_c64(cz)?, j.low, cs)))
        } else {
            let cs = j
                .coeffs
                .iter()
                .map(|c| match c {
                    CoeffJson::Float([a, b]) => Complex64::new(*a, *b),
                    CoeffJson::Exact { re, im } => {
                        let q = Scalar::new(strings_to_rat(re).unwrap_or_default(), strings_to_rat(im).unwrap_or_default());
                        q.to_c64()
                    }
                })
                .collect();
            Ok(TruncSeries::Numeric(Series::new(cz, j.low, cs)))
        }
    }
}

impl From<&Scalar> for CoeffJson {
    fn from(q: &Scalar) -> Self {
        CoeffJson::Exact {
            re: [q.re.numer().to_string(), q.re.denom().to_string()],
            im: [q.im.numer().to_string(), q.im.denom().to_string()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn apply<C: Coeff>(a: &Series<C>, b: &Series<C>, op: SeriesOp, tol: f64) -> Result<Series<C>> {
    match op {
        SeriesOp::Add => a.add(b),
        SeriesOp::Sub => a.sub(b),
        SeriesOp::Mul => a.mul(b),
        SeriesOp::Div => a.div(b, tol),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SeriesJson {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub center: [f64; 2],
    pub low: i32,
    pub order: i32,
    pub exact: bool,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffJson {
    Float([f64; 2]),
    Exact { re: [String; 2], im: [String; 2] },
}
