//! Exact and floating-point linear algebra: fraction-free determinants,
//! reduced echelon forms and kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::poly::MultiPoly;
use crate::scalar::Scalar;

/// Determinant of a square matrix of polynomials by Bareiss elimination.
/// Every intermediate division is exact.
pub fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, vars: &[String]) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(vars);
    }
    let mut sign = false;
    let mut prev = MultiPoly::one(vars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return MultiPoly::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = MultiPoly::zero(vars);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Reduced row echelon form over `Q(i)`; returns the pivot columns.
pub fn rref_exact(a: &mut [Vec<Scalar>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().unwrap();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    if !a[r][j].is_zero() {
                        let t = &a[r][j] * &f;
                        a[i][j] = &a[i][j] - &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : A x = 0}`, one vector per free column.
pub fn kernel_exact(a: &[Vec<Scalar>], cols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = a.to_vec();
    let pivots = rref_exact(&mut m);
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); cols];
        v[f] = Scalar::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -&m[r][f];
        }
        out.push(v);
    }
    out
}

/// Canonical basis of the span of `basis`: reduced echelon form, so each
/// vector's first nonzero entry is 1 and sits in a column where all other
/// vectors vanish.
pub fn canonical_basis_exact(basis: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut m = basis.to_vec();
    let p = rref_exact(&mut m);
    m.truncate(p.len());
    m
}

/// Kernel by singular value decomposition; singular values below
/// `rel · σ_max` count as zero.
pub fn kernel_svd(a: &[Vec<Complex64>], cols: usize, rel: f64) -> Vec<Vec<Complex64>> {
    let rows = a.len().max(cols);
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (i, r) in a.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= rel * smax || smax == 0.0 {
            out.push((0..cols).map(|j| vt[(k, j)].conj()).collect());
        }
    }
    out
}

/// Reduced echelon form of floating-point row vectors with partial
/// pivoting; entries below `tol` are treated as zero.
pub fn canonical_basis_numeric(basis: &[Vec<Complex64>], tol: f64) -> Vec<Vec<Complex64>> {
    let mut a = basis.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, mag) = (r..rows)
            .map(|i| (i, a[i][c].norm()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            continue;
        }
        a.swap(r, p);
        let piv = a[r][c];
        for x in a[r].iter_mut() {
            *x /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i][c];
                if f.norm() > 0.0 {
                    for j in 0..cols {
                        let t = a[r][j] * f;
                        a[i][j] -= t;
                    }
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            if x.norm() <= tol {
                *x = Complex64::new(0.0, 0.0);
            }
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let vars = vec!["x".to_string()];
        let p = |s: &str| MultiPoly::parse(s, &vars).unwrap();
        let m = vec![
            vec![p("0"), p("1"), p("x")],
            vec![p("2"), p("x"), p("1")],
            vec![p("x^2"), p("0"), p("3")],
        ];
        // cofactor expansion along the first row
        let want = p("-(2*3 - 1*x^2) + x*(2*0 - x*x^2)");
        assert_eq!(bareiss_det(m, &vars), want);
    }

    #[test]
    fn exact_kernel() {
        let a = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let k = kernel_exact(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            for r in &a {
                let s = r.iter().zip(v).fold(Scalar::zero(), |acc, (x, y)| &acc + &(x * y));
                assert!(s.is_zero());
            }
        }
        let c = canonical_basis_exact(&k);
        assert_eq!(c[0][0], Scalar::one());
    }

    #[test]
    fn svd_kernel() {
        let z = |x: f64| Complex64::new(x, 0.0);
        let a = vec![vec![z(1.0), z(1.0), z(0.0)], vec![z(0.0), z(1.0), z(1.0)]];
        let k = kernel_svd(&a, 3, 1e-8);
        assert_eq!(k.len(), 1);
        let c = canonical_basis_numeric(&k, 1e-12);
        assert!((c[0][0] - z(1.0)).norm() < 1e-12);
        assert!((c[0][1] + z(1.0)).norm() < 1e-12);
        assert!((c[0][2] - z(1.0)).norm() < 1e-12);
    }
}
