#![allow(dead_code)]

use aat::algebroid::{track_branch, AlgebroidCurve, TrackOptions};
use aat::elimination::resultant;
use aat::roots::poly_roots;
use aat::series::Series;
use aat::{Error, MultiPoly, Scalar};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Integer coefficients, ascending, with a nonzero leading one.
pub fn random_int_poly(r: &mut ChaCha8Rng, max_deg: usize) -> Vec<i64> {
    let d = r.gen_range(1..=max_deg);
    let mut v: Vec<i64> = (0..=d).map(|_| r.gen_range(-5..=5)).collect();
    while v[d] == 0 {
        v[d] = r.gen_range(-5..=5);
    }
    v
}

/// `Res_x(f, g)` against `lc(f)^deg g · lc(g)^deg f · Π (αᵢ − βⱼ)`.
pub fn resultant_matches_roots(f: &[i64], g: &[i64]) -> Result<(), String> {
    let to_scalars = |v: &[i64]| v.iter().map(|&k| Scalar::from_int(k)).collect::<Vec<_>>();
    let pf = MultiPoly::univariate("x", &to_scalars(f));
    let pg = MultiPoly::univariate("x", &to_scalars(g));
    let res = resultant(&pf, &pg, "x").map_err(|e| e.to_string())?;
    if !res.is_constant() {
        return Err(format!("resultant {} is not a constant", res));
    }
    let got = res.constant_term().to_c64();
    let to_c = |v: &[i64]| v.iter().map(|&k| c(k as f64, 0.0)).collect::<Vec<_>>();
    let ra = poly_roots(&to_c(f)).map_err(|e| e.to_string())?;
    let rb = poly_roots(&to_c(g)).map_err(|e| e.to_string())?;
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let mut want = c(f[df] as f64, 0.0).powu(dg as u32) * c(g[dg] as f64, 0.0).powu(df as u32);
    for a in &ra {
        for b in &rb {
            want *= a - b;
        }
    }
    let scale = want.norm().max(got.norm()).max(1.0);
    if (got - want).norm() > 1e-6 * scale {
        return Err(format!("f={:?} g={:?}: resultant {} vs root product {}", f, g, got, want));
    }
    Ok(())
}

pub fn int_series(v: &[i64]) -> Series<Scalar> {
    Series::taylor(Scalar::zero(), v.iter().map(|&k| Scalar::from_int(k)).collect())
}

/// Ring axioms and exact division on truncated series.
pub fn series_ring_axioms(a: &[i64], b: &[i64], d: &[i64]) -> Result<(), String> {
    let (a, b, d) = (int_series(a), int_series(b), int_series(d));
    let e = |x: aat::Result<Series<Scalar>>| x.map_err(|e| e.to_string());
    let lhs = e(e(a.add(&b))?.add(&d))?;
    let rhs = e(a.add(&e(b.add(&d))?))?;
    if lhs != rhs {
        return Err("addition is not associative".into());
    }
    if e(a.mul(&b))? != e(b.mul(&a))? {
        return Err("multiplication is not commutative".into());
    }
    let lhs = e(a.mul(&e(b.add(&d))?))?;
    let rhs = e(e(a.mul(&b))?.add(&e(a.mul(&d))?))?;
    if lhs != rhs {
        return Err("distributivity fails".into());
    }
    let lhs = e(e(a.mul(&b))?.mul(&d))?;
    let rhs = e(a.mul(&e(b.mul(&d))?))?;
    if lhs != rhs {
        return Err("multiplication is not associative".into());
    }
    let one = Series::constant(Scalar::zero(), Scalar::one(), a.coeffs.len());
    if e(a.mul(&one))? != a {
        return Err("1 is not a unit".into());
    }
    if !b.coeffs[0].is_zero() {
        let q = e(e(a.mul(&b))?.div(&b, 0.0))?;
        if q != a {
            return Err("(a b) / b != a".into());
        }
    }
    Ok(())
}

/// A random square-free curve of degree 2 or 3 in `z` with coefficients of
/// degree at most 2 in `u`.
pub fn random_curve(r: &mut ChaCha8Rng) -> AlgebroidCurve {
    loop {
        let n = r.gen_range(2..=3);
        let coeffs: Vec<MultiPoly> = (0..=n)
            .map(|_| {
                let d = r.gen_range(0..=2);
                let v: Vec<Scalar> = (0..=d).map(|_| Scalar::from_int(r.gen_range(-3..=3))).collect();
                MultiPoly::univariate("u", &v)
            })
            .collect();
        if coeffs[n].is_zero() {
            continue;
        }
        match AlgebroidCurve::from_coeffs(&coeffs) {
            Ok(curve) => return curve,
            Err(Error::NotSquareFree) | Err(Error::InvariantViolation(_)) => continue,
            Err(e) => panic!("{}", e),
        }
    }
}

/// Branches at `center` number `n`, and the cycle lengths add up to `n`.
pub fn branch_completeness(curve: &AlgebroidCurve, center: Complex64) -> Result<(), String> {
    let br = curve.puiseux_expand(center, 4).map_err(|e| format!("{} at {}: {}", curve.poly(), center, e))?;
    let n = curve.degree() as usize;
    if br.len() != n {
        return Err(format!("{} at {}: {} branches for n = {}", curve.poly(), center, br.len(), n));
    }
    let mut cycles: Vec<(usize, u32)> = br.iter().map(|b| (b.cycle, b.e)).collect();
    cycles.sort();
    cycles.dedup();
    let total: u32 = cycles.iter().map(|(_, e)| e).sum();
    if total as usize != n {
        return Err(format!("{} at {}: sum of e = {} for n = {}", curve.poly(), center, total, n));
    }
    Ok(())
}

/// The sine quartic is unchanged when any of the three values changes sign.
pub fn sin_quartic_sign_flips(u: Complex64, v: Complex64) -> Result<(), String> {
    let g = |a: Complex64, b: Complex64, w: Complex64| {
        let s = w * w + a * a - b * b;
        (s * s - 4.0 * a * a * w * w * (1.0 - b * b), s.norm_sqr() + (4.0 * a * a * w * w * (1.0 - b * b)).norm())
    };
    let (a, b, w) = (u.sin(), v.sin(), (u + v).sin());
    for mask in 0..8 {
        let sgn = |bit: i32| if mask & (1 << bit) != 0 { -1.0 } else { 1.0 };
        let (val, scale) = g(a * sgn(0), b * sgn(1), w * sgn(2));
        if val.norm() > 1e-8 * scale.max(1.0) {
            return Err(format!("u={} v={} mask={}: residual {}", u, v, mask, val.norm()));
        }
    }
    // the other branch of arcsine: sin(π − u) has the same value
    let (val, scale) = g((std::f64::consts::PI - u).sin(), b, w);
    if val.norm() > 1e-8 * scale.max(1.0) {
        return Err("branch change broke the theorem".into());
    }
    Ok(())
}

/// Tracking a root along a segment and back returns it.
pub fn track_then_reverse(curve: &AlgebroidCurve, a: Complex64, b: Complex64) -> Result<(), String> {
    let opts = TrackOptions::default();
    let vals = curve.branch_values(a).map_err(|e| e.to_string())?;
    for z0 in vals {
        let end = match track_branch(curve, &[a, b], z0, &opts) {
            Ok(z) => z,
            Err(Error::NearSingular(_)) => return Ok(()),
            Err(e) => return Err(format!("{}: {}", curve.poly(), e)),
        };
        let back = track_branch(curve, &[b, a], end, &opts).map_err(|e| e.to_string())?;
        if (back - z0).norm() > 1e-7 * z0.norm().max(1.0) {
            return Err(format!("{}: {} -> {} -> {}", curve.poly(), z0, end, back));
        }
    }
    Ok(())
}

/// Random point in a box, kept away from the singular locations.
pub fn regular_point(curve: &AlgebroidCurve, r: &mut ChaCha8Rng, half: f64) -> Complex64 {
    let sing = curve.singular_locations().unwrap().to_vec();
    loop {
        let z = c(r.gen_range(-half..half), r.gen_range(-half..half));
        if sing.iter().all(|s| (s - z).norm() > 0.05) {
            return z;
        }
    }
}
