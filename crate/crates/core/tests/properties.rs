mod common;

use aat::aat::{discover_aat, verify_aat, VerifyOptions};
use aat::function::{Builtin, FunctionSpec};
use aat::period::{find_roots, forsyth_fit, Rect, RootOptions};
use aat::ExecMode;
use common::*;
use proptest::prelude::*;

fn int_poly(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
    (1..=max_deg).prop_flat_map(|d| (prop::collection::vec(-5i64..=5, d), prop_oneof![-5i64..=-1, 1i64..=5]))
        .prop_map(|(mut v, lead)| {
            v.push(lead);
            v
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn resultant_agrees_with_roots(f in int_poly(4), g in int_poly(4)) {
        resultant_matches_roots(&f, &g).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn truncated_series_form_a_ring(
        a in prop::collection::vec(-9i64..=9, 8),
        b in prop::collection::vec(-9i64..=9, 8),
        d in prop::collection::vec(-9i64..=9, 8),
    ) {
        series_ring_axioms(&a, &b, &d).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn sine_quartic_survives_sign_flips(ur in -2.0f64..2.0, ui in -1.0f64..1.0, vr in -2.0f64..2.0, vi in -1.0f64..1.0) {
        sin_quartic_sign_flips(c(ur, ui), c(vr, vi)).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn branches_are_complete() {
    let mut r = rng(11);
    for _ in 0..5 {
        let curve = random_curve(&mut r);
        for _ in 0..4 {
            let z = regular_point(&curve, &mut r, 3.0);
            branch_completeness(&curve, z).unwrap();
        }
        for s in curve.singular_locations().unwrap().to_vec() {
            branch_completeness(&curve, s).unwrap();
        }
    }
}

#[test]
fn tracking_is_reversible() {
    let mut r = rng(12);
    for _ in 0..5 {
        let curve = random_curve(&mut r);
        for _ in 0..4 {
            let a = regular_point(&curve, &mut r, 3.0);
            let b = regular_point(&curve, &mut r, 3.0);
            track_then_reverse(&curve, a, b).unwrap();
        }
    }
}

#[test]
fn fit_is_stable_under_shifting_by_omega() {
    let sin = FunctionSpec::builtin(Builtin::Sin);
    let set = find_roots(&sin, c(0.5, 0.0), Rect::new((-20.0, 20.0), (-1.0, 1.0)), 5, &RootOptions::default()).unwrap();
    let fit = forsyth_fit(&set.roots).unwrap();
    let w = fit.omega().unwrap();
    let mut more = set.roots.clone();
    for z in &set.roots {
        let s = z + w;
        if more.iter().all(|x| (x - s).norm() > 1e-6) {
            more.push(s);
        }
    }
    let again = forsyth_fit(&more).unwrap();
    assert!((again.omega().unwrap() - w).norm() < 1e-8);
}

#[test]
fn sequential_and_parallel_agree() {
    for b in [Builtin::Exp, Builtin::Tan, Builtin::Sin] {
        let f = FunctionSpec::builtin(b);
        let s = discover_aat(&f, (1, 1, 2), 16, ExecMode::Sequential).unwrap();
        let p = discover_aat(&f, (1, 1, 2), 16, ExecMode::Parallel).unwrap();
        assert_eq!(s.basis, p.basis);
    }
    let tan = FunctionSpec::builtin(Builtin::Tan);
    let region = Rect::new((-10.0, 10.0), (-1.0, 1.0));
    let seq = find_roots(&tan, c(1.0, 0.0), region, 4, &RootOptions { mode: ExecMode::Sequential, ..Default::default() }).unwrap();
    let par = find_roots(&tan, c(1.0, 0.0), region, 4, &RootOptions { mode: ExecMode::Parallel, ..Default::default() }).unwrap();
    assert_eq!(seq.roots, par.roots);
}

#[test]
fn discovered_theorems_hold_at_other_base_points() {
    // the theorem of exp is unchanged by moving the element, up to a constant
    let f = FunctionSpec::translate(FunctionSpec::builtin(Builtin::Exp), c(0.4, 0.0));
    let d = discover_aat(&f, (1, 1, 1), 16, ExecMode::best()).unwrap();
    assert_eq!(d.kernel_dim, 1);
    assert!(verify_aat(&d.basis[0], &f, 16, &VerifyOptions::default()).unwrap().verified());
}
