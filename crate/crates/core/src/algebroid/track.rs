//! Analytic continuation of branch values along polygonal paths.

use num_complex::Complex64;
use serde::Serialize;

use super::{cmp_c, AlgebroidCurve, Place};
use crate::error::{Error, Result};
use crate::exec::{par_map, ExecMode};

#[derive(Clone, Copy, Debug)]
pub struct TrackOptions {
    /// Newton stopping tolerance.
    pub tol: f64,
    /// Paths may not come closer than `clearance · max(1, |s|)` to a
    /// singular location `s`.
    pub clearance: f64,
    /// Vertices of the circle around the target.
    pub circle_vertices: usize,
    /// Endpoint matching tolerance.
    pub match_tol: f64,
    pub mode: ExecMode,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { tol: 1e-12, clearance: 1e-3, circle_vertices: 64, match_tol: 1e-8, mode: ExecMode::best() }
    }
}

fn dist_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / l2;
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

fn newton(curve: &AlgebroidCurve, u: Complex64, mut z: Complex64, tol: f64) -> Option<(Complex64, f64)> {
    let mut first = None;
    for _ in 0..30 {
        let [f, _, fz, _] = curve.partials(u, z);
        if fz.norm() == 0.0 {
            return None;
        }
        let d = f / fz;
        first.get_or_insert(d.norm());
        z -= d;
        if d.norm() <= tol * z.norm().max(1.0) {
            return Some((z, first.unwrap()));
        }
    }
    None
}

/// Continues the root `z0` of `F(path[0], ·)` along the polygon `path`.
pub fn track_branch(curve: &AlgebroidCurve, path: &[Complex64], z0: Complex64, opts: &TrackOptions) -> Result<Complex64> {
    let sing = curve.singular_locations()?;
    for w in path.windows(2) {
        for s in sing {
            if dist_to_segment(*s, w[0], w[1]) < opts.clearance * s.norm().max(1.0) {
                return Err(Error::NearSingular(*s));
            }
        }
    }
    let mut z = z0;
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut s = 0.0f64;
        let mut h = 0.01f64;
        while s < 1.0 {
            let step = h.min(1.0 - s);
            let u0 = a + (b - a) * s;
            let u1 = a + (b - a) * (s + step);
            let [_, fu, fz, _] = curve.partials(u0, z);
            let pred = z - (u1 - u0) * fu / fz;
            let ok = match newton(curve, u1, pred, opts.tol) {
                Some((zn, first)) => {
                    let [_, _, fz1, fzz1] = curve.partials(u1, zn);
                    let basin = if fzz1.norm() == 0.0 { f64::INFINITY } else { 0.1 * (fz1 / fzz1).norm() };
                    if first < basin {
                        Some(zn)
                    } else {
                        None
                    }
                }
                None => None,
            };
            match ok {
                Some(zn) => {
                    z = zn;
                    s += step;
                    h = (h * 1.5).min(0.05);
                }
                None => {
                    h *= 0.5;
                    if h < 1e-12 {
                        return Err(Error::CorrectionDiverged(u0));
                    }
                }
            }
        }
    }
    Ok(z)
}

/// Permutation of the branch values at `base` produced by one loop.
#[derive(Clone, Debug, Serialize)]
pub struct MonodromyPermutation {
    pub around: Place,
    pub base: [f64; 2],
    /// Branch values at the base point; branch `i` is `labels[i]`.
    pub labels: Vec<[f64; 2]>,
    /// Branch `i` ends as branch `perm[i]`.
    pub perm: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
}

impl MonodromyPermutation {
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cycles.iter().map(|c| c.len()).collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

pub(crate) fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut c = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            c.push(j);
            j = perm[j];
        }
        out.push(c);
    }
    out
}

fn base_values(curve: &AlgebroidCurve, base: Complex64, opts: &TrackOptions) -> Result<Vec<Complex64>> {
    for s in curve.singular_locations()? {
        if (s - base).norm() < opts.clearance * s.norm().max(1.0) {
            return Err(Error::SingularBasePoint(base));
        }
    }
    let vals = curve.branch_values(base)?;
    if vals.len() != curve.degree() as usize {
        return Err(Error::SingularBasePoint(base));
    }
    Ok(vals)
}

fn run_loop(curve: &AlgebroidCurve, base: Complex64, path: &[Complex64], around: Place, opts: &TrackOptions) -> Result<MonodromyPermutation> {
    let labels = base_values(curve, base, opts)?;
    let ends = par_map(opts.mode, &labels, |z| track_branch(curve, path, *z, opts));
    let mut perm = Vec::with_capacity(labels.len());
    for (i, end) in ends.into_iter().enumerate() {
        let end = end?;
        let hits: Vec<usize> = (0..labels.len())
            .filter(|&k| (labels[k] - end).norm() <= opts.match_tol * labels[k].norm().max(1.0))
            .collect();
        if hits.len() != 1 {
            return Err(Error::AmbiguousMatching(i));
        }
        perm.push(hits[0]);
    }
    let mut seen = vec![false; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::AmbiguousMatching(i));
        }
    }
    Ok(MonodromyPermutation {
        around,
        base: [base.re, base.im],
        labels: labels.iter().map(|z| [z.re, z.im]).collect(),
        cycles: cycles_of(&perm),
        perm,
    })
}

fn circle(center: Complex64, start: Complex64, vertices: usize, ccw: bool) -> Vec<Complex64> {
    let r = start - center;
    let sign = if ccw { 1.0 } else { -1.0 };
    (0..=vertices)
        .map(|k| {
            if k == vertices {
                start
            } else {
                center + r * Complex64::from_polar(1.0, sign * std::f64::consts::TAU * k as f64 / vertices as f64)
            }
        })
        .collect()
}

/// Monodromy of a counterclockwise loop from `base` around `target`
/// enclosing no other singular location.
pub fn monodromy(curve: &AlgebroidCurve, base: Complex64, target: Complex64, opts: &TrackOptions) -> Result<MonodromyPermutation> {
    let sing = curve.singular_locations()?;
    let others = sing
        .iter()
        .filter(|s| (*s - target).norm() > 1e-8 * s.norm().max(1.0))
        .map(|s| (s - target).norm())
        .fold(f64::INFINITY, f64::min);
    let d = (base - target).norm();
    if d == 0.0 {
        return Err(Error::SingularBasePoint(base));
    }
    let r = 0.5 * others.min(d);
    let start = target + (base - target) / d * r;
    let mut path = vec![base];
    path.extend(circle(target, start, opts.circle_vertices, true));
    path.push(base);
    run_loop(curve, base, &path, Place::Finite(target), opts)
}

/// Monodromy of a large loop, counterclockwise in `1/u` (clockwise in
/// `u`), enclosing every finite singular location.
pub fn monodromy_at_infinity(curve: &AlgebroidCurve, base: Complex64, opts: &TrackOptions) -> Result<MonodromyPermutation> {
    let sing = curve.singular_locations()?;
    let reach = sing.iter().map(|s| s.norm()).fold(base.norm(), f64::max);
    let big = 2.0 * reach + 1.0;
    let dir = if base.norm() == 0.0 { Complex64::new(0.0, -1.0) } else { base / base.norm() };
    let start = dir * big;
    let mut path = vec![base];
    path.extend(circle(Complex64::new(0.0, 0.0), start, 4 * opts.circle_vertices, false));
    path.push(base);
    run_loop(curve, base, &path, Place::Infinity, opts)
}

/// Composes the loops around every finite singular location in
/// counterclockwise order seen from `base`, and the loop at infinity.
/// Returns the finite loops (in composition order), the infinity loop, and
/// whether their product is the identity.
pub fn monodromy_product(
    curve: &AlgebroidCurve,
    base: Complex64,
    opts: &TrackOptions,
) -> Result<(Vec<MonodromyPermutation>, MonodromyPermutation, bool)> {
    let mut sing: Vec<Complex64> = curve.singular_locations()?.to_vec();
    sing.sort_by(|a, b| {
        let (x, y) = ((a - base).arg(), (b - base).arg());
        x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal).then(cmp_c(*a, *b))
    });
    let finite = sing.iter().map(|s| monodromy(curve, base, *s, opts)).collect::<Result<Vec<_>>>()?;
    let inf = monodromy_at_infinity(curve, base, opts)?;
    let n = curve.degree() as usize;
    let mut total: Vec<usize> = (0..n).collect();
    for m in &finite {
        total = total.iter().map(|&i| m.perm[i]).collect();
    }
    let closed = total.iter().map(|&i| inf.perm[i]).enumerate().all(|(i, j)| i == j);
    Ok((finite, inf, closed))
}
