use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sample_cubic() -> AlgebroidCurve {
    AlgebroidCurve::parse("8*u*z^3 + 3*(1-u)*z + 1 - u").unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn square_root_branches() {
    let curve = AlgebroidCurve::parse("z^2 - u").unwrap();
    let br = curve.puiseux_expand(c(0.0, 0.0), 4).unwrap();
    assert_eq!(br.len(), 2);
    for b in &br {
        assert_eq!((b.e, b.low), (2, 1));
        assert!(b.coeffs[0].norm() > 0.99 && b.coeffs[0].norm() < 1.01);
        assert!(b.coeffs[1..].iter().all(|x| x.norm() < 1e-12));
        assert_eq!(b.exact.as_ref().unwrap()[0].pow(2), Scalar::one());
    }
    assert_eq!(br[0].cycle, br[1].cycle);
    assert!(close(br[0].coeffs[0] + br[1].coeffs[0], c(0.0, 0.0), 1e-14));
}

#[test]
fn cubic_at_zero() {
    let curve = sample_cubic();
    let br = curve.puiseux_expand(c(0.0, 0.0), 6).unwrap();
    assert_eq!(br.len(), 3);
    let holo: Vec<_> = br.iter().filter(|b| b.e == 1).collect();
    assert_eq!(holo.len(), 1);
    let ex = holo[0].exact.as_ref().unwrap();
    let want = [(-1, 3), (8, 81), (8, 729), (536, 19683), (9944, 1594323)];
    for (k, (p, q)) in want.iter().enumerate() {
        assert_eq!(ex[k], Scalar::from_ratio(*p, *q), "coefficient {}", k);
    }
    let polar: Vec<_> = br.iter().filter(|b| b.e == 2).collect();
    assert_eq!(polar.len(), 2);
    let s = (3.0f64 / 8.0).sqrt();
    let plus = polar.iter().find(|b| b.coeffs[0].im > 0.0).unwrap();
    assert_eq!(plus.low, -1);
    let want = [c(0.0, s), c(1.0 / 6.0, 0.0), c(0.0, -7.0 / 18.0 * s), c(-4.0 / 81.0, 0.0), c(0.0, -275.0 / 1944.0 * s), c(-4.0 / 729.0, 0.0)];
    for (k, w) in want.iter().enumerate() {
        assert!(close(plus.coeffs[k], *w, 1e-12), "k={} got {} want {}", k, plus.coeffs[k], w);
    }
    // the other branch of the cycle is t -> -t
    let minus = polar.iter().find(|b| b.coeffs[0].im < 0.0).unwrap();
    for k in 0..6 {
        let sign = if (k as i32 + plus.low) % 2 == 0 { 1.0 } else { -1.0 };
        assert!(close(minus.coeffs[k], plus.coeffs[k] * sign, 1e-12));
    }
    assert_eq!(plus.cycle, minus.cycle);
}

#[test]
fn cubic_at_minus_one() {
    let curve = sample_cubic();
    let br = curve.puiseux_expand(c(-1.0, 0.0), 4).unwrap();
    let ram: Vec<_> = br.iter().filter(|b| b.e == 2).collect();
    assert_eq!(ram.len(), 2);
    let hol: Vec<_> = br.iter().filter(|b| b.e == 1).collect();
    assert_eq!(hol.len(), 1);
    let ex = hol[0].exact.as_ref().unwrap();
    assert_eq!(ex[0], Scalar::one());
    assert_eq!(ex[1], Scalar::from_ratio(2, 9));
    assert_eq!(ex[2], Scalar::from_ratio(47, 243));
    let k = 1.0 / (2.0 * 6f64.sqrt());
    let mut lead: Vec<Complex64> = ram.iter().map(|b| b.coeffs[1]).collect();
    sort_values(&mut lead);
    for b in &ram {
        assert_eq!(b.low, 0);
        assert!(close(b.coeffs[0], c(-0.5, 0.0), 1e-12));
    }
    assert!(close(lead[0], c(-k, 0.0), 1e-12) && close(lead[1], c(k, 0.0), 1e-12));
}

#[test]
fn cubic_at_one_is_a_three_cycle() {
    let curve = sample_cubic();
    let br = curve.puiseux_expand(c(1.0, 0.0), 4).unwrap();
    assert_eq!(br.len(), 3);
    assert!(br.iter().all(|b| b.e == 3 && b.low == 1 && b.cycle == 0));
    let real = br.iter().find(|b| b.coeffs[0].im.abs() < 1e-12).unwrap();
    assert!(close(real.coeffs[0], c(0.5, 0.0), 1e-12));
}

#[test]
fn residual_bound_holds() {
    let curve = sample_cubic();
    for center in [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.3, 0.2)] {
        for b in curve.puiseux_expand(center, 8).unwrap() {
            assert!(b.satisfies_residual_bound(&curve).unwrap(), "center {}", center);
        }
    }
    for b in curve.puiseux_at_infinity(8).unwrap() {
        assert!(b.satisfies_residual_bound(&curve).unwrap());
    }
}

#[test]
fn cubic_singular_points() {
    let rep = sample_cubic().singular_points().unwrap();
    let at0 = rep.at(c(0.0, 0.0), 1e-9).unwrap();
    assert_eq!(at0.kind, SingularKind::PoleAndBranch);
    assert_eq!(at0.cycle_structure, vec![2, 1]);
    let at1 = rep.at(c(1.0, 0.0), 1e-9).unwrap();
    assert_eq!(at1.kind, SingularKind::Critical);
    assert_eq!(at1.cycle_structure, vec![3]);
    let atm1 = rep.at(c(-1.0, 0.0), 1e-9).unwrap();
    assert_eq!(atm1.kind, SingularKind::Critical);
    assert_eq!(atm1.cycle_structure, vec![2, 1]);
    assert_eq!(rep.points.len(), 4);
}

#[test]
fn other_singular_reports() {
    let rep = AlgebroidCurve::parse("z^2 - u").unwrap().singular_points().unwrap();
    assert_eq!(rep.points.len(), 2);
    assert_eq!(rep.at(c(0.0, 0.0), 1e-9).unwrap().cycle_structure, vec![2]);
    let inf = rep.points.iter().find(|p| p.location == Place::Infinity).unwrap();
    assert_eq!(inf.cycle_structure, vec![2]);
    let rep = AlgebroidCurve::parse("z^2 - (1 - u^2)").unwrap().singular_points().unwrap();
    for s in [1.0, -1.0] {
        let p = rep.at(c(s, 0.0), 1e-9).unwrap();
        assert_eq!((p.kind, p.cycle_structure.clone()), (SingularKind::Critical, vec![2]));
    }
    assert!(rep.at(c(0.0, 0.0), 1e-9).is_none());
    assert_eq!(AlgebroidCurve::parse("z^2 - (1 - u^2)").unwrap().puiseux_expand(c(0.0, 0.0), 3).unwrap().iter().filter(|b| b.is_holomorphic()).count(), 2);
}

#[test]
fn pole_only() {
    let rep = AlgebroidCurve::parse("u*z - 1").unwrap().singular_points().unwrap();
    let p = rep.at(c(0.0, 0.0), 1e-9).unwrap();
    assert_eq!(p.kind, SingularKind::Pole);
}

#[test]
fn invariants() {
    let z = MultiPoly::zero(&["u"]);
    let one = MultiPoly::one(&["u"]);
    assert!(matches!(AlgebroidCurve::from_coeffs(&[z, one.clone()]), Err(Error::InvariantViolation(_))));
    assert!(matches!(AlgebroidCurve::parse("(z-u)^2"), Err(Error::NotSquareFree)));
}

#[test]
fn monodromy_of_square_root() {
    let curve = AlgebroidCurve::parse("z^2 - u").unwrap();
    let m = monodromy(&curve, c(1.0, 0.0), c(0.0, 0.0), &TrackOptions::default()).unwrap();
    assert_eq!(m.perm, vec![1, 0]);
    let m = monodromy_at_infinity(&curve, c(1.0, 0.0), &TrackOptions::default()).unwrap();
    assert_eq!(m.perm, vec![1, 0]);
}

#[test]
fn cubic_monodromy() {
    let curve = sample_cubic();
    let opts = TrackOptions::default();
    let base = c(0.1, -1.0);
    let m0 = monodromy(&curve, base, c(0.0, 0.0), &opts).unwrap();
    assert_eq!(m0.cycle_lengths(), vec![2, 1]);
    let m1 = monodromy(&curve, base, c(1.0, 0.0), &opts).unwrap();
    assert_eq!(m1.cycle_lengths(), vec![3]);
    assert!(monodromy(&curve, base, c(5.0, 0.0), &opts).unwrap().is_identity());
    let mm = monodromy(&curve, base, c(-1.0, 0.0), &opts).unwrap();
    assert_eq!(mm.cycle_lengths(), vec![2, 1]);
    let (_, _, closed) = monodromy_product(&curve, base, &opts).unwrap();
    assert!(closed);
}

#[test]
fn tracking_refuses_singular_paths() {
    let curve = AlgebroidCurve::parse("z^2 - u").unwrap();
    let r = track_branch(&curve, &[c(-1.0, 0.0), c(1.0, 0.0)], c(0.0, 1.0), &TrackOptions::default());
    assert!(matches!(r, Err(Error::NearSingular(_))));
    let r = monodromy(&curve, c(0.0, 0.0), c(1.0, 0.0), &TrackOptions::default());
    assert!(matches!(r, Err(Error::SingularBasePoint(_))));
}

#[test]
fn json_round_trip() {
    let curve = sample_cubic();
    let j = serde_json::to_string(&curve.to_json()).unwrap();
    let back = AlgebroidCurve::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(back.poly(), curve.poly());
    let j: CurveJson = serde_json::from_str(r#"{"n":2,"p":["1","0","-u"]}"#).unwrap();
    let k = AlgebroidCurve::from_json(&j).unwrap();
    assert_eq!(k.poly(), AlgebroidCurve::parse("z^2-u").unwrap().poly());
}

#[test]
fn circle_around_origin_flips_the_root() {
    let curve = AlgebroidCurve::parse("z^2 - u").unwrap();
    let path: Vec<Complex64> = (0..=64).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 64.0)).collect();
    let end = track_branch(&curve, &path, c(1.0, 0.0), &TrackOptions::default()).unwrap();
    assert!(close(end, c(-1.0, 0.0), 1e-10));
}

#[test]
fn segment_matches_direct_newton() {
    let curve = sample_cubic();
    let a = c(2.0, 0.5);
    let b = c(3.0, 1.5);
    let opts = TrackOptions::default();
    for z0 in curve.branch_values(a).unwrap() {
        let end = track_branch(&curve, &[a, b], z0, &opts).unwrap();
        assert!(curve.eval(b, end).norm() < 1e-9);
        let back = track_branch(&curve, &[b, a], end, &opts).unwrap();
        assert!(close(back, z0, 1e-8));
    }
}

#[test]
fn non_repeated_branch_is_fixed_around_minus_one() {
    let curve = sample_cubic();
    let base = c(-1.0, -0.5);
    let m = monodromy(&curve, base, c(-1.0, 0.0), &TrackOptions::default()).unwrap();
    let fixed: Vec<usize> = (0..3).filter(|&i| m.perm[i] == i).collect();
    assert_eq!(fixed.len(), 1);
    // the fixed branch continues the value near 1
    let z = m.labels[fixed[0]];
    assert!((z[0] - 1.0).abs() < 0.3);
}
