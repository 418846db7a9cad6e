//! Period detection: roots of `φ(v) = C`, equal-value pairs among
//! `φ(υ + aᵢ)`, candidate verification, and lattice fitting of root sets.

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebroid::sort_values;
use crate::error::{Error, Result};
use crate::exec::{par_map, ExecMode};
use crate::function::{FunctionKind, FunctionSpec};
use crate::poly::MultiPoly;

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Axis-aligned rectangle `[re.0, re.1] × [im.0, im.1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Rect { re, im }
    }

    pub fn square(half: f64) -> Self {
        Rect { re: (-half, half), im: (-half, half) }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }

    /// Same center, both sides doubled.
    pub fn doubled(&self) -> Self {
        let grow = |(a, b): (f64, f64)| {
            let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
            (c - 2.0 * h, c + 2.0 * h)
        };
        Rect { re: grow(self.re), im: grow(self.im) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSet {
    pub target: [f64; 2],
    /// The region actually searched, after any growth.
    pub region: Rect,
    #[serde(serialize_with = "crate::algebroid::ser_c64s")]
    pub roots: Vec<Complex64>,
    pub residual_max: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Accepted `|φ(root) − C|`.
    pub residual: f64,
    /// Roots closer than this are merged.
    pub separation: f64,
    pub max_doublings: usize,
    /// Grid spacing of the Newton seeds.
    pub spacing: f64,
    pub mode: ExecMode,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { residual: 1e-10, separation: 1e-6, max_doublings: 6, spacing: 0.25, mode: ExecMode::best() }
    }
}

enum Seed {
    Root(Complex64),
    Flat,
    Lost,
}

fn newton_root(f: &FunctionSpec, c: Complex64, mut z: Complex64, tol: f64) -> Seed {
    for _ in 0..60 {
        let (v, d) = match f.eval_d(z) {
            Ok(r) => r,
            Err(_) => return Seed::Lost,
        };
        if d.norm() < 1e-300 {
            return Seed::Flat;
        }
        let step = (v - c) / d;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Seed::Lost;
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    match f.eval(z) {
        Ok(v) if (v - c).norm() <= tol => Seed::Root(z),
        _ => Seed::Lost,
    }
}

/// For rational `φ`, every root of `num − C·den` that is not a pole,
/// shifted back through any translations.
fn rational_roots(f: &FunctionSpec, c: Complex64) -> Option<Result<Vec<Complex64>>> {
    match &f.kind {
        FunctionKind::Rational { num, den } => {
            let cs = |p: &MultiPoly| -> Vec<Complex64> { p.coeffs_in("u").iter().map(|q| q.constant_term().to_c64()).collect() };
            let (n, d) = (cs(num), cs(den));
            let len = n.len().max(d.len());
            let p: Vec<Complex64> = (0..len)
                .map(|k| n.get(k).copied().unwrap_or_default() - c * d.get(k).copied().unwrap_or_default())
                .collect();
            Some(crate::roots::poly_roots(&p).map(|r| r.into_iter().filter(|z| f.eval(*z).is_ok_and(|v| (v - c).norm() <= 1e-8)).collect()))
        }
        FunctionKind::Translate { of, shift } => rational_roots(of, c).map(|r| r.map(|v| v.into_iter().map(|z| z - shift).collect())),
        _ => None,
    }
}

fn roots_in(f: &FunctionSpec, c: Complex64, region: &Rect, opts: &RootOptions) -> Result<Vec<Complex64>> {
    if let Some(all) = rational_roots(f, c) {
        let mut out: Vec<Complex64> = all?.into_iter().filter(|z| region.contains(*z)).collect();
        sort_values(&mut out);
        out.dedup_by(|a, b| (*a - *b).norm() <= opts.separation);
        return Ok(out);
    }
    let count = |w: f64| ((w / opts.spacing).ceil() as usize).clamp(8, 160);
    let (nx, ny) = (count(region.re.1 - region.re.0), count(region.im.1 - region.im.0));
    let seeds: Vec<Complex64> = (0..nx * ny)
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            Complex64::new(
                region.re.0 + (region.re.1 - region.re.0) * (i as f64 + 0.5) / nx as f64,
                region.im.0 + (region.im.1 - region.im.0) * (j as f64 + 0.5) / ny as f64,
            )
        })
        .collect();
    let results = par_map(opts.mode, &seeds, |s| newton_root(f, c, *s, opts.residual));
    if results.iter().all(|r| matches!(r, Seed::Flat)) {
        return Err(Error::DerivativeVanishes);
    }
    let mut found: Vec<Complex64> = results
        .into_iter()
        .filter_map(|r| match r {
            Seed::Root(z) if region.contains(z) => Some(z),
            _ => None,
        })
        .collect();
    sort_values(&mut found);
    let mut out: Vec<Complex64> = Vec::new();
    for z in found {
        if out.iter().all(|w| (w - z).norm() > opts.separation) {
            out.push(z);
        }
    }
    sort_values(&mut out);
    Ok(out)
}

/// Roots of `φ(v) = c` in `region`, doubling the region until at least
/// `want` are found.
pub fn find_roots(f: &FunctionSpec, c: Complex64, region: Rect, want: usize, opts: &RootOptions) -> Result<RootSet> {
    let mut region = region;
    let mut roots = Vec::new();
    for step in 0..=opts.max_doublings {
        if step > 0 {
            region = region.doubled();
        }
        roots = roots_in(f, c, &region, opts)?;
        if roots.len() >= want {
            break;
        }
        // a rational equation has no roots beyond those of one polynomial
        if let Some(all) = rational_roots(f, c) {
            if all?.len() < want {
                break;
            }
        }
    }
    if roots.len() < want {
        return Err(Error::InsufficientRoots { found: roots.len(), want });
    }
    let residual_max = roots.iter().map(|z| (f.eval(*z).unwrap_or(c) - c).norm()).fold(0.0, f64::max);
    Ok(RootSet { target: pair(c), region, roots, residual_max })
}

/// `max |φ(u + ω) − φ(u)|` over seeded points of `[−2, 2] × [−1, 1]`
/// where both values are finite and moderate.
pub fn verify_period(f: &FunctionSpec, omega: Complex64, seed: u64) -> Result<f64> {
    if omega.norm() == 0.0 || !(omega.re.is_finite() && omega.im.is_finite()) {
        return Err(Error::InvalidInput("period must be finite and nonzero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut used = 0;
    let mut tries = 0;
    while used < 100 && tries < 1000 {
        tries += 1;
        let u = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        let (Ok((a, da)), Ok((b, _))) = (f.eval_d(u), f.eval_d(u + omega)) else { continue };
        if da.norm() > 1e8 || a.norm() > 1e8 {
            continue;
        }
        worst = worst.max((a - b).norm());
        used += 1;
    }
    if used == 0 {
        return Err(Error::AllPointsSingular);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Periodic,
    Rational,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub classification: Classification,
    /// Smallest verified period after nearest-integer reduction of the
    /// verified candidates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fundamental: Option<[f64; 2]>,
    pub candidates: Vec<[f64; 2]>,
    /// `verify_period` of the fundamental period.
    pub residual: f64,
    pub attempts: usize,
    pub seed: u64,
}

impl PeriodReport {
    pub fn fundamental(&self) -> Option<Complex64> {
        self.fundamental.map(|[re, im]| Complex64::new(re, im))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PeriodOptions {
    pub seed: u64,
    pub retries: usize,
    /// Equal-pair tolerance, relative to `max(1, |φ|)`.
    pub pair_tol: f64,
    /// Candidates are kept when `verify_period` is below this.
    pub verify_tol: f64,
    pub half_width: f64,
    pub roots: RootOptions,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        PeriodOptions { seed: 0, retries: 8, pair_tol: 1e-8, verify_tol: 1e-9, half_width: 4.0, roots: RootOptions::default() }
    }
}

/// `±z` with positive real part, or positive imaginary part when real.
fn canonical_sign(z: Complex64) -> Complex64 {
    if z.re < -1e-12 * z.norm() || (z.re.abs() <= 1e-12 * z.norm() && z.im < 0.0) {
        -z
    } else {
        z
    }
}

/// Repeatedly replaces `c` by `c − round(c / c′) c′` for collinear pairs.
pub fn reduce_periods(periods: &[Complex64]) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = periods.iter().copied().filter(|z| z.norm() > 1e-9).collect();
    loop {
        let mut changed = false;
        v.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal));
        'outer: for i in 0..v.len() {
            for j in 0..v.len() {
                if i == j || v[j].norm() > v[i].norm() {
                    continue;
                }
                let q = v[i] / v[j];
                if q.im.abs() > 1e-6 * q.norm().max(1.0) {
                    continue;
                }
                let n = q.re.round();
                if n == 0.0 {
                    continue;
                }
                let r = v[i] - v[j] * n;
                if r.norm() < v[i].norm() - 1e-12 {
                    if r.norm() <= 1e-9 * v[j].norm().max(1.0) {
                        v.remove(i);
                    } else {
                        v[i] = r;
                    }
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            return v.into_iter().map(canonical_sign).collect();
        }
    }
}

/// Weierstrass's argument: among `m + 1` roots `aᵢ` of `φ(v) = C₂`, two
/// values `φ(υ + aᵢ)` coincide because each is a root of
/// `G(W, φ(υ), C₂)`; their difference is a period candidate.
pub fn weierstrass_period(f: &FunctionSpec, g: &MultiPoly, opts: &PeriodOptions) -> Result<PeriodReport> {
    let g = g.with_vars(&["U", "V", "W"])?;
    let m = g.degree("W") as usize;
    if m == 0 {
        return Err(Error::InvalidInput("G does not involve W".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut candidates: Vec<Complex64> = Vec::new();
    let mut verified: Vec<Complex64> = Vec::new();
    let mut attempts = 0;
    while attempts < opts.retries && verified.is_empty() {
        attempts += 1;
        let c2 = Complex64::new(rng.gen_range(0.3..1.7), rng.gen_range(0.3..1.7));
        let upsilon = Complex64::new(rng.gen_range(0.3..1.7), rng.gen_range(0.3..1.7));
        let set = match find_roots(f, c2, Rect::square(opts.half_width), m + 1, &opts.roots) {
            Ok(s) => s,
            Err(Error::InsufficientRoots { .. }) => {
                return Ok(PeriodReport {
                    classification: Classification::Rational,
                    fundamental: None,
                    candidates: vec![],
                    residual: 0.0,
                    attempts,
                    seed: opts.seed,
                })
            }
            Err(e) => return Err(e),
        };
        let mut a = set.roots.clone();
        a.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap_or(Ordering::Equal));
        a.truncate(m + 1);
        let values: Vec<Option<Complex64>> = a.iter().map(|ai| f.eval(upsilon + ai).ok()).collect();
        if values.iter().any(|v| v.is_none()) {
            continue;
        }
        let values: Vec<Complex64> = values.into_iter().flatten().collect();
        for k in 0..a.len() {
            for l in k + 1..a.len() {
                let tol = opts.pair_tol * values[k].norm().max(values[l].norm()).max(1.0);
                if (values[k] - values[l]).norm() >= tol {
                    continue;
                }
                let c = canonical_sign(a[k] - a[l]);
                candidates.push(c);
                if verify_period(f, c, opts.seed)? < opts.verify_tol {
                    verified.push(c);
                }
            }
        }
    }
    if verified.is_empty() {
        return Ok(PeriodReport {
            classification: Classification::Inconclusive,
            fundamental: None,
            candidates: candidates.iter().map(|z| pair(*z)).collect(),
            residual: f64::NAN,
            attempts,
            seed: opts.seed,
        });
    }
    let reduced = reduce_periods(&verified);
    let fundamental = reduced
        .iter()
        .copied()
        .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal))
        .expect("nonempty");
    let residual = verify_period(f, fundamental, opts.seed)?;
    Ok(PeriodReport {
        classification: Classification::Periodic,
        fundamental: Some(pair(fundamental)),
        candidates: candidates.iter().map(|z| pair(*z)).collect(),
        residual,
        attempts,
        seed: opts.seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Progression {
    pub offset: [f64; 2],
    pub omega: [f64; 2],
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForsythFit {
    pub progressions: Vec<Progression>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<[f64; 2]>,
    pub lambda_flag: bool,
}

impl ForsythFit {
    pub fn omega(&self) -> Option<Complex64> {
        self.omega.map(|[re, im]| Complex64::new(re, im))
    }
}

/// Splits `roots` into gap-free arithmetic progressions of step `d`, each
/// with at least two members.
fn progressions_with(roots: &[Complex64], d: Complex64, tol: f64) -> Option<Vec<Vec<Complex64>>> {
    let mut classes: Vec<Vec<(i64, Complex64)>> = Vec::new();
    'next: for &r in roots {
        for class in classes.iter_mut() {
            let q = (r - class[0].1) / d;
            let n = q.re.round();
            if ((q - n) * d).norm() <= tol * r.norm().max(1.0) {
                class.push((n as i64, r));
                continue 'next;
            }
        }
        classes.push(vec![(0, r)]);
    }
    let mut out = Vec::new();
    for mut class in classes {
        if class.len() < 2 {
            return None;
        }
        class.sort_by_key(|(n, _)| *n);
        if class.windows(2).any(|w| w[1].0 - w[0].0 != 1) {
            return None;
        }
        out.push(class.into_iter().map(|(_, z)| z).collect());
    }
    Some(out)
}

/// Fits the roots to `u₀ + nω` progressions sharing one `ω`; sets
/// `lambda_flag` when no common difference covers the data.
pub fn forsyth_fit(roots: &[Complex64]) -> Result<ForsythFit> {
    if roots.len() < 4 {
        return Err(Error::InsufficientRoots { found: roots.len(), want: 4 });
    }
    let tol = 1e-8;
    let mut r = roots.to_vec();
    r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)));
    let mut diffs: Vec<Complex64> = Vec::new();
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            let d = canonical_sign(r[j] - r[i]);
            if d.norm() > tol && diffs.iter().all(|e| (e - d).norm() > tol * d.norm().max(1.0)) {
                diffs.push(d);
            }
        }
    }
    diffs.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal));
    let mut best: Option<(usize, Complex64, Vec<Vec<Complex64>>)> = None;
    for d in diffs {
        if let Some(classes) = progressions_with(&r, d, tol) {
            if best.as_ref().is_none_or(|b| classes.len() < b.0) {
                best = Some((classes.len(), d, classes));
            }
        }
    }
    Ok(match best {
        Some((_, d, classes)) => ForsythFit {
            progressions: classes
                .iter()
                .map(|c| Progression { offset: pair(c[0]), omega: pair(d), count: c.len() })
                .collect(),
            omega: Some(pair(d)),
            lambda_flag: false,
        },
        None => ForsythFit {
            progressions: r.iter().map(|z| Progression { offset: pair(*z), omega: [0.0, 0.0], count: 1 }).collect(),
            omega: None,
            lambda_flag: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Builtin;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uvw(s: &str) -> MultiPoly {
        MultiPoly::parse(s, &["U", "V", "W"]).unwrap()
    }

    #[test]
    fn sin_half_roots() {
        let sin = FunctionSpec::builtin(Builtin::Sin);
        let set = find_roots(&sin, c(0.5, 0.0), Rect::new((-20.0, 20.0), (-1.0, 1.0)), 5, &RootOptions::default()).unwrap();
        // closed form: π/6 + 2πn and 5π/6 + 2πn
        let mut want = Vec::new();
        for n in -4..=4 {
            for a in [PI / 6.0, 5.0 * PI / 6.0] {
                let x = a + 2.0 * PI * n as f64;
                if x.abs() <= 20.0 {
                    want.push(x);
                }
            }
        }
        assert_eq!(set.roots.len(), want.len());
        for w in want {
            assert!(set.roots.iter().any(|z| (z - c(w, 0.0)).norm() < 1e-10), "{}", w);
        }
        assert!(set.residual_max <= 1e-10);
        let fit = forsyth_fit(&set.roots).unwrap();
        assert_eq!(fit.progressions.len(), 2);
        assert!((fit.omega().unwrap() - c(2.0 * PI, 0.0)).norm() < 1e-8);
        assert!(!fit.lambda_flag);
    }

    #[test]
    fn tan_one_roots() {
        let tan = FunctionSpec::builtin(Builtin::Tan);
        let set = find_roots(&tan, c(1.0, 0.0), Rect::new((-10.0, 10.0), (-1.0, 1.0)), 4, &RootOptions::default()).unwrap();
        for z in &set.roots {
            let n = ((z.re - PI / 4.0) / PI).round();
            assert!((z - c(PI / 4.0 + n * PI, 0.0)).norm() < 1e-10);
        }
        assert_eq!(set.roots.len(), 6);
        let fit = forsyth_fit(&set.roots).unwrap();
        assert_eq!(fit.progressions.len(), 1);
        assert!((fit.omega().unwrap() - c(PI, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn rational_has_few_roots() {
        let f = FunctionSpec::rational("1", "u").unwrap();
        let r = find_roots(&f, c(2.0, 0.0), Rect::square(1.0), 3, &RootOptions::default());
        assert!(matches!(r, Err(Error::InsufficientRoots { found: 1, want: 3 })));
    }

    #[test]
    fn non_lattice_data() {
        let fit = forsyth_fit(&[c(0.0, 0.0), c(1.0, 0.0), c(std::f64::consts::E, 0.0), c(PI, 0.0)]).unwrap();
        assert!(fit.lambda_flag);
        assert!(fit.omega.is_none());
        assert!(matches!(forsyth_fit(&[c(0.0, 0.0)]), Err(Error::InsufficientRoots { .. })));
    }

    #[test]
    fn verify_examples() {
        let sin = FunctionSpec::builtin(Builtin::Sin);
        assert!(verify_period(&sin, c(2.0 * PI, 0.0), 0).unwrap() < 1e-10);
        assert!(verify_period(&sin, c(PI, 0.0), 0).unwrap() > 0.5);
        let exp = FunctionSpec::builtin(Builtin::Exp);
        assert!(verify_period(&exp, c(0.0, 2.0 * PI), 0).unwrap() < 1e-10);
    }

    #[test]
    fn classical_periods() {
        let o = PeriodOptions::default();
        let cases = [
            (Builtin::Tan, "W*(1-U*V)-(U+V)", c(PI, 0.0)),
            (Builtin::Exp, "W-U*V", c(0.0, 2.0 * PI)),
            (Builtin::Sin, "(W^2+U^2-V^2)^2-4*U^2*W^2*(1-V^2)", c(2.0 * PI, 0.0)),
        ];
        for (b, g, want) in cases {
            let r = weierstrass_period(&FunctionSpec::builtin(b), &uvw(g), &o).unwrap();
            assert_eq!(r.classification, Classification::Periodic, "{:?}", b);
            assert!((r.fundamental().unwrap() - want).norm() < 1e-9, "{:?} {:?}", b, r.fundamental);
            assert!(r.residual < 1e-9);
        }
        let inv = FunctionSpec::rational("1", "u").unwrap();
        let r = weierstrass_period(&inv, &uvw("W*(U+V)-U*V"), &o).unwrap();
        assert_eq!(r.classification, Classification::Rational);
    }

    #[test]
    fn deterministic_under_seed() {
        let o = PeriodOptions { seed: 7, ..Default::default() };
        let tan = FunctionSpec::builtin(Builtin::Tan);
        let a = weierstrass_period(&tan, &uvw("W*(1-U*V)-(U+V)"), &o).unwrap();
        let b = weierstrass_period(&tan, &uvw("W*(1-U*V)-(U+V)"), &o).unwrap();
        assert_eq!(a.candidates, b.candidates);
        assert_eq!(a.fundamental, b.fundamental);
    }

    #[test]
    fn reduction() {
        let r = reduce_periods(&[c(4.0 * PI, 0.0), c(6.0 * PI, 0.0)]);
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(2.0 * PI, 0.0)).norm() < 1e-12);
        let r = reduce_periods(&[c(-2.0, 0.0)]);
        assert_eq!(r, vec![c(2.0, 0.0)]);
    }
}
