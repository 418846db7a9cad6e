//! Coefficient fields.
//!
//! [`Scalar`] is the exact Gaussian rational used by every symbolic routine.
//! [`Coeff`] abstracts over the three coefficient types the series and
//! elimination code runs on: exact [`Scalar`], double precision
//! [`Complex64`] and the 256-bit fixed point [`Fixed`](crate::hp::Fixed).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact complex rational `re + i·im`.
///
/// `BigRational` keeps both parts reduced with positive denominators, so
/// structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn real(re: BigRational) -> Self {
        Scalar::new(re, BigRational::zero())
    }

    /// The exact dyadic value of a finite double.
    pub fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x).map(Scalar::real).ok_or(Error::NonFinite)
    }

    pub fn from_c64(z: Complex64) -> Result<Self> {
        let re = BigRational::from_float(z.re).ok_or(Error::NonFinite)?;
        let im = BigRational::from_float(z.im).ok_or(Error::NonFinite)?;
        Ok(Scalar::new(re, im))
    }

    /// Best simple rational approximation of each component, accepted only
    /// when it lies within `tol` (relative to `max(1, |z|)`) and has
    /// denominator at most `max_den`.
    pub fn approximate(z: Complex64, tol: f64, max_den: i64) -> Option<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        let scale = z.norm().max(1.0);
        let re = rational_approx(z.re, tol * scale, max_den)?;
        let im = rational_approx(z.im, tol * scale, max_den)?;
        Some(Scalar::new(re, im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Largest denominator among the two parts, used to decide whether a
    /// value is "simple".
    pub fn max_denominator(&self) -> BigInt {
        std::cmp::max(self.re.denom().clone(), self.im.denom().clone())
    }
}

fn rational_approx(x: f64, tol: f64, max_den: i64) -> Option<BigRational> {
    // continued fraction convergents
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({}-{}i)", self.re, -self.im.clone())
                } else {
                    write!(f, "({}+{}i)", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| Scalar::new(&a.re + &b.re, &a.im + &b.im));
forward_binop!(Sub, sub, |a, b| Scalar::new(&a.re - &b.re, &a.im - &b.im));
forward_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return Scalar::real(&a.re * &b.re);
    }
    Scalar::new(
        &a.re * &b.re - &a.im * &b.im,
        &a.re * &b.im + &a.im * &b.re,
    )
});
forward_binop!(Div, div, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return Scalar::real(&a.re / &b.re);
    }
    a * &b.inv().expect("division by zero scalar")
});

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

/// Arithmetic shared by all coefficient types.
///
/// Methods take references so that big-number types avoid clones in inner
/// loops.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_scalar(s: &Scalar) -> Self;
    fn to_c64(&self) -> Complex64;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// Caller guarantees `o` is nonzero.
    fn div_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.add_ref(&a.mul_ref(b));
    }

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Exact types compare with zero exactly, rounded types against `tol`.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }

    fn scale_i64(&self, n: i64) -> Self {
        self.mul_ref(&Self::from_i64(n))
    }
}

impl Coeff for Scalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn from_i64(n: i64) -> Self {
        Scalar::from_int(n)
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }
    fn to_c64(&self) -> Complex64 {
        Scalar::to_c64(self)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let p = a * b;
        self.re += p.re;
        self.im += p.im;
    }
}

impl Coeff for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.to_c64()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// Coefficient types that can evaluate the elementary functions.
pub trait Analytic: Coeff {
    fn from_c64(z: Complex64) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
}

impl Analytic for Complex64 {
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn sin(&self) -> Self {
        Complex64::sin(*self)
    }
    fn cos(&self) -> Self {
        Complex64::cos(*self)
    }
}

/// `NaN`/`inf` guard used wherever user data enters numeric code.
pub fn checked(z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_field_ops() {
        let a = Scalar::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer(3.into()));
        let b = Scalar::from_ratio(-2, 3);
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!((&a * &a.inv().unwrap()), Scalar::one());
        assert_eq!(Scalar::i().pow(2), Scalar::from_int(-1));
    }

    #[test]
    fn approximate_snaps_simple_values() {
        let s = Scalar::approximate(Complex64::new(2.0 - 1e-15, 1.0 / 3.0), 1e-12, 1_000_000).unwrap();
        assert_eq!(s, Scalar::new(BigRational::from_integer(2.into()), BigRational::new(1.into(), 3.into())));
        assert!(Scalar::approximate(Complex64::new(std::f64::consts::PI, 0.0), 1e-14, 1000).is_none());
    }

    #[test]
    fn from_f64_is_exact() {
        let s = Scalar::from_f64(0.1).unwrap();
        assert_ne!(s, Scalar::from_ratio(1, 10));
        assert_eq!(s.to_c64().re, 0.1);
        assert!(Scalar::from_f64(f64::NAN).is_err());
    }
}
