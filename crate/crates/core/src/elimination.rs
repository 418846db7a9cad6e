//! Resultants, discriminants, series-coefficient GCDs and iterated
//! elimination chains.

use crate::error::{Error, Result};
use crate::linalg::bareiss_det;
use crate::poly::MultiPoly;
use crate::scalar::{Coeff, Scalar};
use crate::series::BiSeries;

/// Sylvester matrix of `f` and `g` in `var`; entries are polynomials in the
/// remaining variables.
pub fn sylvester(f: &MultiPoly, g: &MultiPoly, var: &str) -> Vec<Vec<MultiPoly>> {
    let (f, g) = MultiPoly::unify(f, g);
    let vars = f.vars().to_vec();
    let fc = f.coeffs_in(var);
    let gc = g.coeffs_in(var);
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    let size = m + n;
    let zero = MultiPoly::zero(&vars);
    let mut rows = Vec::with_capacity(size);
    for r in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in fc.iter().rev().enumerate() {
            row[r + k] = c.clone();
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in gc.iter().rev().enumerate() {
            row[r + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// `Res_var(f, g)`, the exact Sylvester determinant.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly> {
    for p in [f, g] {
        if p.degree(var) == 0 {
            return Err(Error::DegreeZero(var.to_string()));
        }
    }
    let (fu, _) = MultiPoly::unify(f, g);
    let vars = fu.vars().to_vec();
    Ok(bareiss_det(sylvester(f, g, var), &vars))
}

/// `(−1)^{n(n−1)/2} Res(f, ∂f/∂var) / lc(f)`.
pub fn discriminant(f: &MultiPoly, var: &str) -> Result<MultiPoly> {
    let n = f.degree(var);
    if n < 2 {
        return Err(Error::DegreeTooLow { var: var.to_string(), degree: n, need: 2 });
    }
    let r = resultant(f, &f.derivative(var), var)?;
    let lc = f.leading_coeff_in(var);
    let q = r.div_exact(&lc).ok_or_else(|| Error::InvariantViolation("lc does not divide the resultant".into()))?;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Iterates the halving relation `f(z, x) = 0` (with `z = P(u/2)`,
/// `x = P(u)`) `m` times and eliminates the intermediate values. The result
/// is a polynomial in the same two variables where `z` now stands for
/// `P(u/2^m)`. Content and repeated factors are removed after every step.
pub fn eliminate_chain(f: &MultiPoly, z: &str, x: &str, m: usize) -> Result<MultiPoly> {
    if m == 0 {
        return Err(Error::InvalidInput("chain length must be at least 1".into()));
    }
    for v in [z, x] {
        if f.degree(v) == 0 {
            return Err(Error::DegreeZero(v.to_string()));
        }
    }
    let vars = [z, x];
    let f = f.with_vars(&vars)?;
    let mut cur = f.clone();
    const TMP: &str = "\u{3be}";
    for step in 2..=m {
        // f(x_k, x_{k-1}) with x_{k-1} named z and x_k named TMP
        let next = f.rename(z, TMP).rename(x, z);
        let r = resultant(&cur, &next, z)?;
        if r.is_zero() {
            return Err(Error::DegreeCollapse(step));
        }
        let r = r.rename(TMP, z).with_vars(&vars)?;
        cur = r.squarefree_content(z)?;
    }
    Ok(cur)
}

/// A polynomial in `W` whose coefficients are bivariate series.
#[derive(Clone, Debug)]
pub struct PolyInW<C> {
    /// `coeffs[k]` multiplies `W^k`.
    pub coeffs: Vec<BiSeries<C>>,
}

impl<C: Coeff> PolyInW<C> {
    /// Expands `G(U, V, W)` after substituting `U ← u_series`,
    /// `V ← v_series`.
    pub fn from_poly(g: &MultiPoly, u: &BiSeries<C>, v: &BiSeries<C>) -> Result<Self> {
        let g = g.with_vars(&["U", "V", "W"])?;
        let order = u.order().min(v.order());
        let center = u.center.clone();
        let du = g.degree("U") as usize;
        let dv = g.degree("V") as usize;
        let one = BiSeries::constant(center.clone(), C::one(), order);
        let mut up = vec![one.clone()];
        for k in 1..=du {
            up.push(up[k - 1].mul(u));
        }
        let mut vp = vec![one.clone()];
        for k in 1..=dv {
            vp.push(vp[k - 1].mul(v));
        }
        let dw = g.degree("W") as usize;
        let mut coeffs = vec![BiSeries::zero(center, order); dw + 1];
        for (e, c) in g.terms() {
            let t = up[e[0] as usize].mul(&vp[e[1] as usize]).scale(&C::from_scalar(c));
            coeffs[e[2] as usize] = coeffs[e[2] as usize].add(&t);
        }
        Ok(PolyInW { coeffs })
    }

    /// Degree in `W`, ignoring negligible top coefficients.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        (0..self.coeffs.len()).rev().find(|&k| !self.coeffs[k].is_negligible(tol))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.degree(tol).is_none()
    }

    fn trimmed(mut self, tol: f64) -> Self {
        match self.degree(tol) {
            Some(d) => self.coeffs.truncate(d + 1),
            None => self.coeffs.truncate(0),
        }
        self
    }

    /// Divides every coefficient by the leading one.
    pub fn monic(&self, tol: f64) -> Result<Self> {
        let d = self.degree(tol).ok_or(Error::DivisionByZeroSeries)?;
        let lc = &self.coeffs[d];
        let order = lc.order();
        let inv = lc.inv(tol).map_err(|_| Error::OrderExhausted(order))?;
        Ok(PolyInW { coeffs: self.coeffs[..=d].iter().map(|c| c.mul(&inv)).collect() })
    }

    /// Remainder of division by `b`; the leading coefficient of `b` must
    /// have an invertible constant term.
    pub fn rem(&self, b: &PolyInW<C>, tol: f64) -> Result<Self> {
        let db = b.degree(tol).ok_or(Error::DivisionByZeroSeries)?;
        let lcb = &b.coeffs[db];
        let inv = lcb.inv(tol).map_err(|_| Error::OrderExhausted(lcb.order()))?;
        let mut r = self.clone().trimmed(tol);
        while let Some(dr) = r.degree(tol) {
            if dr < db {
                break;
            }
            let q = r.coeffs[dr].mul(&inv);
            for k in 0..=db {
                let t = q.mul(&b.coeffs[k]);
                r.coeffs[dr - db + k] = r.coeffs[dr - db + k].sub(&t);
            }
            let order = r.coeffs[dr].order();
            r.coeffs[dr] = BiSeries::zero(r.coeffs[dr].center.clone(), order);
            r = r.trimmed(tol);
        }
        Ok(r)
    }

    /// Numeric value at `(x, y, W)`.
    pub fn eval(&self, x: num_complex::Complex64, y: num_complex::Complex64, w: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c.eval(x, y);
        }
        acc
    }
}

/// Monic GCD in `W` by the Euclidean algorithm over truncated series.
/// A coefficient counts as zero when all its entries are below `tol`.
pub fn gcd_in_w<C: Coeff>(a: &PolyInW<C>, b: &PolyInW<C>, tol: f64) -> Result<PolyInW<C>> {
    let mut a = a.clone().trimmed(tol);
    let mut b = b.clone().trimmed(tol);
    if a.degree(tol) < b.degree(tol) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero(tol) {
        let r = a.rem(&b, tol)?;
        a = b;
        b = r;
    }
    a.monic(tol)
}

/// Exact univariate helper: coefficients of `p` in `var` as scalars, for
/// polynomials that involve no other variable.
pub fn univariate_coeffs(p: &MultiPoly, var: &str) -> Vec<Scalar> {
    p.coeffs_in(var).iter().map(|c| c.constant_term()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, vars: &[&str]) -> MultiPoly {
        MultiPoly::parse(s, vars).unwrap()
    }

    #[test]
    fn resultant_examples() {
        let v = ["u", "w", "z"];
        let r = resultant(&p("z^2-u", &v), &p("z-w", &v), "z").unwrap();
        assert!(r.is_scalar_multiple_of(&p("w^2-u", &v)));
        let v = ["x", "x1", "x2"];
        let r = resultant(&p("x-x1^2", &v), &p("x1-x2^2", &v), "x1").unwrap();
        assert!(r.is_scalar_multiple_of(&p("x-x2^4", &v)));
        assert!(matches!(resultant(&p("x", &v), &p("x1", &v), "x2"), Err(Error::DegreeZero(_))));
    }

    #[test]
    fn discriminant_examples() {
        let v = ["u", "z"];
        assert!(discriminant(&p("z^2-u", &v), "z").unwrap().is_scalar_multiple_of(&p("u", &v)));
        let d = discriminant(&p("(z-1)*(z-2)", &v), "z").unwrap();
        assert!(d.is_constant() && !d.is_zero());
        let f = p("8*u*z^3+3*(1-u)*z+1-u", &v);
        assert_eq!(discriminant(&f, "z").unwrap(), p("-864*u*(1-u)^2*(1+u)", &v));
        assert!(matches!(discriminant(&p("z-u", &v), "z"), Err(Error::DegreeTooLow { .. })));
    }

    #[test]
    fn chain_examples() {
        let v = ["z", "x"];
        let g = eliminate_chain(&p("x-z^2", &v), "z", "x", 3).unwrap();
        assert!(g.is_scalar_multiple_of(&p("x-z^8", &v)));
        let g = eliminate_chain(&p("x-2*z", &v), "z", "x", 2).unwrap();
        assert!(g.is_scalar_multiple_of(&p("x-4*z", &v)));
        let g = eliminate_chain(&p("x-z^2", &v), "z", "x", 1).unwrap();
        assert_eq!(g, p("x-z^2", &v));
    }

    #[test]
    fn gcd_in_w_trivial() {
        let order = 6;
        let c = (Scalar::zero(), Scalar::zero());
        let k = |s: i64| BiSeries::constant(c.clone(), Scalar::from_int(s), order);
        let a = PolyInW { coeffs: vec![k(-1), k(0), k(1)] };
        let b = PolyInW { coeffs: vec![k(-1), k(1)] };
        let g = gcd_in_w(&a, &b, 0.0).unwrap();
        assert_eq!(g.coeffs.len(), 2);
        assert_eq!(g.coeffs[0], k(-1));
        assert_eq!(g.coeffs[1], k(1));
        let g = gcd_in_w(&a, &a, 0.0).unwrap();
        assert_eq!(g.coeffs.len(), 3);
        assert_eq!(g.coeffs[2], k(1));
    }
}
