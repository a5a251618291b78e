//! Property tests of the expression language and the exterior algebra.

use proptest::prelude::*;

use sws_core::chart::{ChartPoint, Coord, CoordBox, SampleSet};
use sws_core::displays;
use sws_core::expr::scaled_residual;
use sws_core::{Blade, Expr, KForm, Rational, VectorField};

use Coord::*;

/// Expressions that stay finite on the chart: every `ln` and quotient is
/// guarded by a strictly positive argument.
fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-2.0f64..2.0).prop_map(|c| Expr::constant((c * 8.0).round() / 8.0)),
        Just(Expr::u()),
        Just(Expr::v()),
        Just(Expr::r() / Expr::mass()),
        Just(Expr::t() / Expr::mass()),
        Just(displays::lapse_squared()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / (2.0 + b.sin())),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.sin().exp()),
            inner.clone().prop_map(|a| (1.5 + a.cos()).ln()),
            (inner, -3i32..=3, 1i32..=3).prop_map(|(a, n, d)| {
                Expr::pow(&(1.25 + a.sin()), Rational::new(n, d))
            }),
        ]
    })
}

fn coord_strategy() -> impl Strategy<Value = Coord> {
    prop_oneof![Just(U), Just(V), Just(R), Just(T)]
}

fn form_strategy(degree: usize) -> impl Strategy<Value = KForm> {
    let blades: Vec<Blade> = Blade::of_degree(degree).collect();
    prop::collection::vec(expr_strategy(), blades.len()).prop_map(move |coeffs| {
        KForm::from_terms(degree, blades.iter().copied().zip(coeffs)).unwrap()
    })
}

fn field_strategy() -> impl Strategy<Value = VectorField> {
    prop::array::uniform4(expr_strategy()).prop_map(VectorField::new)
}

/// Interior points kept away from the horizon, where the coefficients stay
/// of moderate size.
fn points() -> Vec<ChartPoint> {
    SampleSet::in_box(1.0, 77, 6, &CoordBox::default_for(1.0)).unwrap().points
}

fn form_residual(a: &KForm, b: &KForm) -> f64 {
    let mut worst = 0.0f64;
    for p in points() {
        let (x, y) = (a.eval(&p).unwrap(), b.eval(&p).unwrap());
        worst = worst.max(x.max_scaled_residual(&y));
    }
    worst
}

/// Worst `|d(da)|` relative to the largest first derivative of a coefficient
/// of `da`; those are the terms that cancel pairwise in `d(da)`.
fn d_squared_defect(a: &KForm) -> f64 {
    let da = a.d().unwrap();
    let dda = da.d().unwrap();
    let mut worst = 0.0f64;
    for p in points() {
        let mut scale = 1.0f64;
        for (_, coeff) in da.terms() {
            for c in Coord::ALL {
                scale = scale.max(coeff.diff(c).eval(&p).unwrap().abs());
            }
        }
        for (_, coeff) in dda.terms() {
            worst = worst.max(coeff.eval(&p).unwrap().abs() / scale);
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn d_squared_vanishes_on_small_forms(a in form_strategy(1)) {
        prop_assert!(d_squared_defect(&a) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_central_difference_at_second_order(e in expr_strategy(), c in coord_strategy()) {
        let p = ChartPoint::new(1.1, 2.3, 4.0, 0.7, 1.0).unwrap();
        let exact = e.diff(c).eval(&p).unwrap();
        let fd = |h: f64| {
            let x = p.coord(c);
            let hi = e.eval(&p.shifted(c, x + h)).unwrap();
            let lo = e.eval(&p.shifted(c, x - h)).unwrap();
            (hi - lo) / (2.0 * h)
        };
        let scale = 1.0f64.max(exact.abs());
        let err = |h: f64| (fd(h) - exact).abs() / scale;
        // Estimate the order on the first step pair inside the asymptotic
        // range: small enough that higher terms are negligible, large
        // enough that rounding of the difference quotient is.
        let steps: Vec<f64> = (0..8).map(|k| 1e-2 / f64::powi(2.0, k)).collect();
        let pair = steps.windows(2).map(|w| (err(w[0]), err(w[1]))).find(|&(e1, _)| e1 < 1e-3);
        if let Some((e1, e2)) = pair {
            if e1 > 1e-9 {
                let order = (e1 / e2).log2();
                prop_assert!(order >= 1.9, "order {order} (e1={e1:e}, e2={e2:e})");
            }
        }
    }

    #[test]
    fn d_squared_vanishes_on_two_forms(a in form_strategy(2)) {
        prop_assert!(d_squared_defect(&a) < 1e-12);
    }

    #[test]
    fn d_squared_vanishes_on_functions(f in expr_strategy()) {
        prop_assert!(d_squared_defect(&KForm::scalar(f)) < 1e-12);
    }

    #[test]
    fn d_is_a_graded_derivation(a in form_strategy(1), b in form_strategy(2)) {
        let lhs = a.wedge(&b).unwrap().d().unwrap();
        let rhs = a.d().unwrap().wedge(&b).unwrap().sub(&a.wedge(&b.d().unwrap()).unwrap()).unwrap();
        prop_assert!(form_residual(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn interior_product_is_an_antiderivation(x in field_strategy(), a in form_strategy(1), b in form_strategy(2)) {
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        let rhs = a
            .interior(&x)
            .unwrap()
            .wedge(&b)
            .unwrap()
            .sub(&a.wedge(&b.interior(&x).unwrap()).unwrap())
            .unwrap();
        prop_assert!(form_residual(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn hodge_star_pairs_with_the_metric(a in form_strategy(2), b in form_strategy(2)) {
        let g = displays::metric();
        let lhs = a.wedge(&g.hodge_star(&b).unwrap()).unwrap();
        let vol = g.hodge_star(&KForm::scalar(Expr::one())).unwrap();
        let rhs = vol.scale(&g.form_inner(&a, &b).unwrap());
        prop_assert!(form_residual(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn hodge_star_pairs_on_one_forms(a in form_strategy(1), b in form_strategy(1)) {
        let g = displays::metric();
        let lhs = a.wedge(&g.hodge_star(&b).unwrap()).unwrap();
        let vol = g.hodge_star(&KForm::scalar(Expr::one())).unwrap();
        let rhs = vol.scale(&g.form_inner(&a, &b).unwrap());
        prop_assert!(form_residual(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn display_parse_round_trip(e in expr_strategy()) {
        let text = e.to_string();
        let back: Expr = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
        let p = ChartPoint::new(0.9, 4.0, 6.0, -1.0, 1.0).unwrap();
        prop_assert_eq!(back.eval(&p).unwrap(), e.eval(&p).unwrap());
    }

    #[test]
    fn blade_canonicalization_is_antisymmetric(perm in Just(vec![U, V, R, T]).prop_shuffle(), k in 1usize..=4) {
        let coords = &perm[..k];
        let (blade, sign) = Blade::from_coords(coords).unwrap();
        prop_assert_eq!(blade.degree(), k);
        if k >= 2 {
            let mut swapped = coords.to_vec();
            swapped.swap(0, 1);
            let (blade2, sign2) = Blade::from_coords(&swapped).unwrap();
            prop_assert_eq!(blade, blade2);
            prop_assert_eq!(sign, -sign2);
            let f = KForm::monomial(Expr::one(), coords).unwrap();
            let g = KForm::monomial(Expr::one(), &swapped).unwrap();
            prop_assert!(f.add(&g).unwrap().is_structurally_zero());
        }
    }

    #[test]
    fn wedge_is_graded_commutative(a in form_strategy(1), b in form_strategy(2)) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert!(form_residual(&ab, &ba) < 1e-12);
        let aa = a.wedge(&a).unwrap();
        prop_assert!(form_residual(&aa, &KForm::zero(2).unwrap()) < 1e-12);
    }

    #[test]
    fn evaluation_rejects_points_off_the_chart(r_over_m in 0.1f64..2.0) {
        prop_assert!(ChartPoint::new(1.0, 1.0, r_over_m, 0.0, 1.0).is_err());
    }
}

#[test]
fn frozen_scalar_values() {
    let p = ChartPoint::new(1.0, 1.0, 4.0, 0.0, 1.0).unwrap();
    let phi = displays::warp();
    assert!(scaled_residual(phi.eval(&p).unwrap(), -0.34657359027997264) < 1e-15);
    assert!(scaled_residual(phi.diff(R).eval(&p).unwrap(), 0.125) < 1e-15);
    let q = ChartPoint::new(0.3, 1.0, 4.0, 0.0, 1.0).unwrap();
    assert!(scaled_residual(Expr::u().sin().diff(U).eval(&q).unwrap(), 0.955336489125606) < 1e-15);
}
