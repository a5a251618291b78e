//! Property tests of Hamiltonian fields, brackets and operators on random
//! functions.

use proptest::prelude::*;

use sws_core::chart::{ChartPoint, CoordBox, SampleSet};
use sws_core::prequant::{commutator_sides, test_sections, ConnectionPotential, PrequantumOperator, Quantization, ScaleMode};
use sws_core::symplectic::{bracket, hamiltonian_field, jacobi_defect, PoissonBracket};
use sws_core::{Coord, Expr, SpacetimeModel, VectorField};

fn function_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::u()),
        Just(Expr::v()),
        Just(Expr::r() / Expr::mass()),
        Just(Expr::t() / Expr::mass()),
        (-2.0f64..2.0).prop_map(Expr::constant),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| a.sin()),
            inner.prop_map(|a| a.cos()),
        ]
    })
}

/// `max_i Σ_j |X^j ∂_j Y^i| + |Y^j ∂_j X^i|`, the size of the terms whose
/// difference is `[X, Y]`, but at least `|X|·|Y|`: components that are
/// constant in a coordinate only after cancellation differentiate to
/// rounding noise of that size.
fn lie_term_scale(x: &VectorField, y: &VectorField, p: &ChartPoint) -> f64 {
    let (xv, yv) = (x.eval(p).unwrap(), y.eval(p).unwrap());
    let norm = |w: &[f64; 4]| w.iter().fold(0f64, |s, x| s.max(x.abs()));
    let mut worst = norm(&xv) * norm(&yv);
    for i in 0..4 {
        let mut total = 0.0;
        for (j, c) in Coord::ALL.iter().enumerate() {
            total += (xv[j] * y.components()[i].diff(*c).eval(p).unwrap()).abs();
            total += (yv[j] * x.components()[i].diff(*c).eval(p).unwrap()).abs();
        }
        worst = worst.max(total);
    }
    worst
}

fn points(m: f64) -> Vec<ChartPoint> {
    SampleSet::in_box(m, 5, 5, &CoordBox::default_for(m)).unwrap().points
}

fn model() -> SpacetimeModel {
    SpacetimeModel::schwarzschild(1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn defining_relation_holds(f in function_strategy()) {
        let m = model();
        let h = hamiltonian_field(&f, &m).unwrap();
        let rep = h.defining_residual(&m, "defining", 1e-10, &points(1.0));
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(f in function_strategy(), g in function_strategy(), h in function_strategy()) {
        let m = model();
        for p in points(1.0) {
            let fg = PoissonBracket::new(&m, f.clone(), g.clone()).at(&p).unwrap();
            let gf = PoissonBracket::new(&m, g.clone(), f.clone()).at(&p).unwrap();
            prop_assert!((fg + gf).abs() <= 1e-10 * 1f64.max(fg.abs()));
            let lhs = PoissonBracket::new(&m, f.clone(), &g * &h).at(&p).unwrap();
            let (t1, t2) = (fg * h.eval(&p).unwrap(), g.eval(&p).unwrap() * PoissonBracket::new(&m, f.clone(), h.clone()).at(&p).unwrap());
            let scale = 1f64.max(lhs.abs()).max(t1.abs()).max(t2.abs());
            prop_assert!((lhs - (t1 + t2)).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn hamiltonian_map_is_a_lie_homomorphism(f in function_strategy(), g in function_strategy()) {
        let m = model();
        let hf = hamiltonian_field(&f, &m).unwrap().field;
        let hg = hamiltonian_field(&g, &m).unwrap().field;
        let hfg = hamiltonian_field(&bracket(&m, &f, &g).unwrap(), &m).unwrap().field;
        let lie = hf.lie_bracket(&hg);
        for p in points(1.0) {
            let (a, b) = (lie.eval(&p).unwrap(), hfg.eval(&p).unwrap());
            // The bracket is a difference of products that may cancel.
            let scale = lie_term_scale(&hf, &hg, &p).max(1.0);
            for i in 0..4 {
                prop_assert!((a[i] - b[i]).abs() <= 1e-9 * scale, "{a:?} {b:?} scale {scale:e}");
            }
        }
    }

    #[test]
    fn jacobi_holds_on_random_functions(f in function_strategy(), g in function_strategy(), h in function_strategy()) {
        let (res, _) = jacobi_defect(&model(), &f, &g, &h, &points(1.0)).unwrap();
        prop_assert!(res < 1e-9, "{res}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn kostant_souriau_commutators_on_random_functions(f in function_strategy(), g in function_strategy(), seed in 0u64..1000) {
        let m = model();
        let conn = ConnectionPotential::standard(ScaleMode::Paper);
        let psi = &test_sections(seed, 1)[0];
        let (lhs, rhs) = commutator_sides(&f, &g, psi, &m, &conn, Quantization::KostantSouriau).unwrap();
        let op = |h: &Expr| PrequantumOperator::with_convention(h, &m, &conn, Quantization::KostantSouriau).unwrap();
        let (fo, go) = (op(&f), op(&g));
        let (fg, gf) = (fo.apply(&go.apply(psi)), go.apply(&fo.apply(psi)));
        for p in points(1.0) {
            let (a, b) = (lhs.eval(&p).unwrap(), rhs.eval(&p).unwrap());
            // [f̂,ĝ]ψ cancels between f̂ĝψ and ĝf̂ψ, both of order m·scale.
            let scale = (fg.eval(&p).unwrap().norm().max(gf.eval(&p).unwrap().norm()) / m.mass()).max(a.norm()).max(1.0);
            prop_assert!((a - b).norm() <= 1e-9 * scale, "{a} vs {b}, scale {scale:e}");
        }
    }
}

#[test]
fn brackets_scale_with_the_mass() {
    // Lengths scale with m; {u,v} ∝ 1/m and {r,t} ∝ m.
    for lambda in [0.5, 2.0, 10.0] {
        let base = SpacetimeModel::schwarzschild(1.0).unwrap();
        let scaled = SpacetimeModel::schwarzschild(lambda).unwrap();
        let p = ChartPoint::new(1.2, 2.0, 3.5, 1.0, 1.0).unwrap();
        let q = ChartPoint::new(1.2, 2.0, 3.5 * lambda, lambda, lambda).unwrap();
        let uv = |m: &SpacetimeModel, p| PoissonBracket::new(m, Expr::u(), Expr::v()).at(p).unwrap();
        let rt = |m: &SpacetimeModel, p| PoissonBracket::new(m, Expr::r(), Expr::t()).at(p).unwrap();
        assert!((uv(&scaled, &q) * lambda - uv(&base, &p)).abs() < 1e-12 * uv(&base, &p));
        assert!((rt(&scaled, &q) / lambda - rt(&base, &p)).abs() < 1e-12 * rt(&base, &p));
    }
}
