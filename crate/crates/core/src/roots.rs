//! Univariate complex root finding: Aberth-Ehrlich iteration followed by
//! Newton polishing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;

/// `(p(z), p'(z))` for ascending coefficients.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Newton steps while the residual keeps shrinking.
pub fn polish(coeffs: &[Complex64], mut z: Complex64, iters: usize) -> Complex64 {
    let (mut p, _) = horner(coeffs, z);
    for _ in 0..iters {
        let (pz, dz) = horner(coeffs, z);
        if dz.norm() == 0.0 {
            break;
        }
        let cand = z - pz / dz;
        let (pc, _) = horner(coeffs, cand);
        if pc.norm() < p.norm() || pc.norm() == 0.0 {
            z = cand;
            p = pc;
            if p.norm() == 0.0 {
                break;
            }
        } else {
            break;
        }
    }
    z
}

/// All roots of the polynomial with ascending coefficients `coeffs`,
/// counted with multiplicity. Leading zero coefficients are dropped.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    // exact zero roots
    let mut roots = Vec::new();
    while c.len() > 1 && c[0].norm() == 0.0 {
        roots.push(Complex64::new(0.0, 0.0));
        c.remove(0);
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(roots);
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|z| z / lead).collect();
    if n == 1 {
        roots.push(-monic[0]);
        return Ok(roots);
    }
    // Fujiwara-style bound for the initial circle
    let bound = (0..n)
        .map(|k| monic[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        * 2.0;
    let r0 = bound.max(1e-3) * 0.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged && z.iter().any(|w| horner(&monic, *w).0.norm() > 1e-6 * horner(&monic, Complex64::new(bound, 0.0)).0.norm()) {
        return Err(Error::RootFindingFailure(format!("Aberth iteration did not converge (degree {})", n)));
    }
    for w in z {
        roots.push(polish(&monic, w, 8));
    }
    Ok(roots)
}

/// Distinct roots of a univariate exact polynomial: the square-free part is
/// computed exactly before the numeric solve, so multiple roots polish to
/// full precision.
pub fn distinct_roots(p: &MultiPoly, var: &str) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::RootFindingFailure(format!("{} is identically zero", p)));
    }
    if p.degree(var) == 0 {
        return Ok(Vec::new());
    }
    let sf = p.squarefree_content(var)?;
    let coeffs: Vec<Complex64> = sf.coeffs_in(var).iter().map(|c| c.constant_term().to_c64()).collect();
    let roots = poly_roots(&coeffs)
        .map_err(|_| Error::RootFindingFailure(p.to_string()))?;
    Ok(roots.into_iter().map(|z| polish(&coeffs, z, 20)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cubic_roots() {
        // (z-1)(z-2)(z+3) = z^3 - 7z + 6
        let mut r = poly_roots(&[c(6.0), c(-7.0), c(0.0), c(1.0)]).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (z, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((z - c(want)).norm() < 1e-12);
        }
    }

    #[test]
    fn distinct_roots_of_repeated_factor() {
        let p = MultiPoly::parse("-864*u*(u-1)^2*(u+1)", &["u"]).unwrap();
        let mut r = distinct_roots(&p, "u").unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(r.len(), 3);
        for (z, want) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((z - c(want)).norm() < 1e-12, "{}", z);
        }
    }

    #[test]
    fn complex_roots() {
        let r = poly_roots(&[c(1.0), c(0.0), c(1.0)]).unwrap();
        assert!(r.iter().all(|z| (z * z + 1.0).norm() < 1e-14));
    }
}
