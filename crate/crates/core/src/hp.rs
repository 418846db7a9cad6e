//! 256-bit fixed-point complex numbers.
//!
//! Used where double precision loses too many digits, chiefly the series GCD
//! in the Schwarz reduction: dividing by a bivariate series whose zero set
//! passes close to the origin amplifies rounding error by roughly
//! `(1/r)^order`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{Analytic, Coeff, Scalar};

/// Fractional bits of every [`Fixed`] value.
pub const BITS: u32 = 256;
const GUARD: u32 = 64;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Fixed {
    re: BigInt,
    im: BigInt,
}

fn one_at(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Multiply two fixed values at `bits` fractional bits.
fn fmul(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    (a * b) >> bits
}

fn rat_to_fixed(q: &num_rational::BigRational, bits: u32) -> BigInt {
    (q.numer() << bits).div_floor(q.denom())
}

fn f64_to_fixed(x: f64, bits: u32) -> BigInt {
    let q = num_rational::BigRational::from_float(x).expect("finite");
    rat_to_fixed(&q, bits)
}

fn fixed_to_f64(x: &BigInt, bits: u32) -> f64 {
    // keep 64 significant bits before converting
    let len = x.bits() as i64;
    let drop = (len - 64).max(0) as u32;
    let m = (x >> drop).to_f64().unwrap_or(0.0);
    m * 2f64.powi(drop as i32 - bits as i32)
}

/// Returns `(k, w, y)` with `y = x / 2^k`, `|y| < 1/2`, held at `w`
/// fractional bits (enough guard bits to absorb `k` squarings).
fn reduce_argument(x: &BigInt, bits: u32) -> (u32, u32, BigInt) {
    let half = one_at(bits - 1);
    let mut k = 0u32;
    while (x.abs() >> k) >= half {
        k += 1;
    }
    let w = bits + GUARD + 2 * k;
    (k, w, (x << (GUARD + 2 * k)) >> k)
}

/// exp(x) for real fixed-point x at `bits` fractional bits.
fn exp_real(x: &BigInt, bits: u32) -> BigInt {
    let (k, w2, y) = reduce_argument(x, bits);
    let one = one_at(w2);
    let mut sum = one.clone();
    let mut term = one;
    let mut n = 1u32;
    loop {
        term = fmul(&term, &y, w2) / BigInt::from(n);
        if term.is_zero() {
            break;
        }
        sum += &term;
        n += 1;
    }
    for _ in 0..k {
        sum = fmul(&sum, &sum, w2);
    }
    sum >> (w2 - bits)
}

/// (sin x, cos x) for real fixed-point x.
fn sincos_real(x: &BigInt, bits: u32) -> (BigInt, BigInt) {
    let (k, w2, y) = reduce_argument(x, bits);
    let y2 = fmul(&y, &y, w2);
    let mut s = y.clone();
    let mut c = one_at(w2);
    let mut ts = y;
    let mut tc = one_at(w2);
    let mut n = 1u32;
    loop {
        ts = -fmul(&ts, &y2, w2) / BigInt::from((2 * n) * (2 * n + 1));
        tc = -fmul(&tc, &y2, w2) / BigInt::from((2 * n - 1) * (2 * n));
        if ts.is_zero() && tc.is_zero() {
            break;
        }
        s += &ts;
        c += &tc;
        n += 1;
    }
    for _ in 0..k {
        let s2 = fmul(&s, &c, w2) << 1;
        let c2 = fmul(&c, &c, w2) - fmul(&s, &s, w2);
        s = s2;
        c = c2;
    }
    (s >> (w2 - bits), c >> (w2 - bits))
}

impl Fixed {
    pub fn from_parts_f64(re: f64, im: f64) -> Self {
        Fixed { re: f64_to_fixed(re, BITS), im: f64_to_fixed(im, BITS) }
    }

    fn real_parts(&self) -> (&BigInt, &BigInt) {
        (&self.re, &self.im)
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fixed({})", self.to_c64())
    }
}

impl Coeff for Fixed {
    const EXACT: bool = false;

    fn zero() -> Self {
        Fixed::default()
    }
    fn one() -> Self {
        Fixed { re: one_at(BITS), im: BigInt::zero() }
    }
    fn from_i64(n: i64) -> Self {
        Fixed { re: BigInt::from(n) << BITS, im: BigInt::zero() }
    }
    fn from_scalar(s: &Scalar) -> Self {
        Fixed { re: rat_to_fixed(&s.re, BITS), im: rat_to_fixed(&s.im, BITS) }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(fixed_to_f64(&self.re, BITS), fixed_to_f64(&self.im, BITS))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        Fixed { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Fixed { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul_ref(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Fixed { re: fmul(&self.re, &o.re, BITS), im: BigInt::zero() };
        }
        Fixed {
            re: (&self.re * &o.re - &self.im * &o.im) >> BITS,
            im: (&self.re * &o.im + &self.im * &o.re) >> BITS,
        }
    }
    fn div_ref(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Fixed { re: (&self.re << BITS).div_floor(&o.re), im: BigInt::zero() };
        }
        let den = &o.re * &o.re + &o.im * &o.im;
        let nre = &self.re * &o.re + &self.im * &o.im;
        let nim = &self.im * &o.re - &self.re * &o.im;
        Fixed { re: (nre << BITS).div_floor(&den), im: (nim << BITS).div_floor(&den) }
    }
    fn neg_ref(&self) -> Self {
        Fixed { re: -&self.re, im: -&self.im }
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if a.im.is_zero() && b.im.is_zero() {
            self.re += fmul(&a.re, &b.re, BITS);
            return;
        }
        self.re += (&a.re * &b.re - &a.im * &b.im) >> BITS;
        self.im += (&a.re * &b.im + &a.im * &b.re) >> BITS;
    }
    fn scale_i64(&self, n: i64) -> Self {
        let n = BigInt::from(n);
        Fixed { re: &self.re * &n, im: &self.im * &n }
    }
}

impl Analytic for Fixed {
    fn from_c64(z: Complex64) -> Self {
        Fixed::from_parts_f64(z.re, z.im)
    }

    fn exp(&self) -> Self {
        let (a, b) = self.real_parts();
        let ea = exp_real(a, BITS);
        if b.is_zero() {
            return Fixed { re: ea, im: BigInt::zero() };
        }
        let (s, c) = sincos_real(b, BITS);
        Fixed { re: fmul(&ea, &c, BITS), im: fmul(&ea, &s, BITS) }
    }

    fn sin(&self) -> Self {
        let (a, b) = self.real_parts();
        let (sa, ca) = sincos_real(a, BITS);
        if b.is_zero() {
            return Fixed { re: sa, im: BigInt::zero() };
        }
        let (ch, sh) = cosh_sinh(b);
        Fixed { re: fmul(&sa, &ch, BITS), im: fmul(&ca, &sh, BITS) }
    }

    fn cos(&self) -> Self {
        let (a, b) = self.real_parts();
        let (sa, ca) = sincos_real(a, BITS);
        if b.is_zero() {
            return Fixed { re: ca, im: BigInt::zero() };
        }
        let (ch, sh) = cosh_sinh(b);
        Fixed { re: fmul(&ca, &ch, BITS), im: -fmul(&sa, &sh, BITS) }
    }
}

fn cosh_sinh(b: &BigInt) -> (BigInt, BigInt) {
    let ep = exp_real(b, BITS);
    let em = exp_real(&-b, BITS);
    ((&ep + &em) >> 1, (&ep - &em) >> 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Fixed, b: Complex64, tol: f64) -> bool {
        (a.to_c64() - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn elementary_functions_match_f64() {
        for &(re, im) in &[(0.3, 0.0), (-2.5, 0.0), (0.7, -1.2), (5.0, 0.4), (0.0, 0.0)] {
            let z = Complex64::new(re, im);
            let f = Fixed::from_c64(z);
            assert!(close(&Analytic::exp(&f), z.exp(), 1e-14));
            assert!(close(&Analytic::sin(&f), z.sin(), 1e-14));
            assert!(close(&Analytic::cos(&f), z.cos(), 1e-14));
        }
    }

    #[test]
    fn pythagoras_holds_far_below_double_precision() {
        let x = Fixed::from_c64(Complex64::new(0.3, 0.0));
        let s = Analytic::sin(&x);
        let c = Analytic::cos(&x);
        let r = s.mul_ref(&s).add_ref(&c.mul_ref(&c)).sub_ref(&Fixed::one());
        assert!(r.magnitude() < 1e-70, "{}", r.magnitude());
    }

    #[test]
    fn division_round_trips() {
        let a = Fixed::from_c64(Complex64::new(1.25, -0.5));
        let b = Fixed::from_c64(Complex64::new(-0.3, 2.0));
        let q = a.div_ref(&b);
        assert!(q.mul_ref(&b).sub_ref(&a).magnitude() < 1e-70);
    }
}
