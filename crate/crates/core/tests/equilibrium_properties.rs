use proptest::prelude::*;
use stigma_olg::equilibrium::{
    best_response_cutoff, dominance_threshold, enumerate_equilibria, exact_dominance_threshold, fixed_point_bisection,
    interior_threshold, EquilibriumKind,
};
use stigma_olg::model::{coop_payoff, defect_payoff, CostDistribution, ModelParams};

fn p(pi: f64, b: f64, alpha: f64) -> ModelParams<f64> {
    ModelParams::new(pi, b, alpha).unwrap()
}

#[test]
fn closed_form_matches_bisection_on_grid() {
    let mut checked = 0;
    for i in 1..=19 {
        let pi = f64::from(i) * 0.05;
        for j in 0..29 {
            let b = 1.1 + f64::from(j) * 0.1;
            for &alpha in &[0.0, 0.25, 0.5] {
                let params = p(pi, b, alpha);
                if let Ok(Some(closed)) = interior_threshold(&params) {
                    let root = fixed_point_bisection(&params, 0.0, 1.0).unwrap();
                    assert!((closed - root).abs() <= 1e-10, "pi={pi} b={b} alpha={alpha}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 20, "only {checked} interior points");
}

#[test]
fn low_benefit_regions_on_fine_grid() {
    for i in 0..1000 {
        let pi = f64::from(i) / 1000.0;
        let set = enumerate_equilibria(&p(pi, 1.5, 0.0)).unwrap();
        assert_eq!(set.equilibria.len(), 1, "pi={pi}");
        let eq = set.equilibria[0];
        if pi < 1.0 / 3.0 {
            assert_eq!(eq.kind, EquilibriumKind::CornerLow);
        } else if pi > 0.5 {
            assert_eq!(eq.kind, EquilibriumKind::CornerHigh);
        } else if pi > 1.0 / 3.0 && pi < 0.5 {
            assert_eq!(eq.kind, EquilibriumKind::Interior);
            let formula = pi * (1.0 - 1.5 * (1.0 - pi)) / ((1.0 - pi) * (1.0 - 1.5 * pi));
            assert!((eq.cutoff - formula).abs() <= 1e-9);
        }
    }
}

#[test]
fn high_benefit_band_has_three_equilibria() {
    for i in 0..1000 {
        let pi = f64::from(i) / 1000.0;
        let n = enumerate_equilibria(&p(pi, 3.0, 0.0)).unwrap().equilibria.len();
        if pi > 0.5 && pi < 2.0 / 3.0 {
            assert_eq!(n, 3, "pi={pi}");
        } else if !(0.5..=2.0 / 3.0).contains(&pi) {
            assert_eq!(n, 1, "pi={pi}");
        }
    }
}

#[test]
fn forgiveness_never_raises_extreme_cutoffs() {
    let alphas: Vec<f64> = (0..10).map(|k| f64::from(k) / 10.0).collect();
    for i in 0..20 {
        let pi = 0.025 + f64::from(i) * 0.05;
        for j in 0..20 {
            let b = 1.05 + f64::from(j) * 0.15;
            let mut prev: Option<(f64, f64)> = None;
            for &alpha in &alphas {
                let set = enumerate_equilibria(&p(pi, b, alpha)).unwrap();
                let cur = (set.min_cutoff().unwrap(), set.max_cutoff().unwrap());
                if let Some((lo, hi)) = prev {
                    assert!(cur.0 <= lo && cur.1 <= hi, "pi={pi} b={b} alpha={alpha}");
                }
                prev = Some(cur);
            }
        }
    }
}

#[test]
fn cooperation_dominates_above_exact_bound() {
    for &b in &[1.1, 1.3, 1.5, 1.7, 1.9] {
        let bound = exact_dominance_threshold(b).unwrap();
        for k in 1..=10 {
            let pi = bound + (1.0 - bound) * f64::from(k) / 10.0 - 1e-9;
            let params = p(pi, b, 0.0);
            for &l in &[0.0, 0.5, 1.0] {
                for &c in &[0.0, 0.5, 1.0] {
                    assert!(coop_payoff(l, c, &params) > defect_payoff(c, &params), "b={b} pi={pi}");
                }
            }
        }
    }
}

/// `2 (1 - 1/b)` coincides with the worst-case root only at b = 1.5; below
/// it the bound is too low and the worst-case inequality fails just above it.
#[test]
fn stated_dominance_bound_is_exact_only_at_b_one_point_five() {
    let at = |b: f64| {
        (
            dominance_threshold(b).unwrap().value,
            exact_dominance_threshold(b).unwrap(),
        )
    };
    let (stated, exact) = at(1.5);
    assert!((stated - exact).abs() < 1e-15);
    let (stated, exact) = at(1.1);
    assert!(exact - stated > 0.4);
    let params = p(stated + 0.01, 1.1, 0.0);
    assert!(coop_payoff(1.0, 0.0, &params) < defect_payoff(0.0, &params));
}

#[test]
fn non_uniform_roots_are_fixed_points() {
    for &k in &[0.5, 2.0, 3.0] {
        for i in 1..20 {
            let pi = f64::from(i) / 20.0;
            let params = p(pi, 2.2, 0.1)
                .with_cost_distribution(CostDistribution::Power { exponent: k })
                .unwrap();
            let set = enumerate_equilibria(&params).unwrap();
            assert!(!set.equilibria.is_empty());
            for e in &set.equilibria {
                let br = best_response_cutoff(e.cutoff, &params).unwrap().clamped;
                assert!((br - e.cutoff).abs() <= 1e-10, "k={k} pi={pi} {e:?}");
            }
        }
    }
}

fn strategic_params() -> impl Strategy<Value = ModelParams<f64>> {
    (0.0..0.999f64, 1.0001..5.0f64, 0.0..0.999f64).prop_map(|(pi, b, a)| p(pi, b, a))
}

proptest! {
    #[test]
    fn best_response_is_affine_with_known_slope(params in strategic_params(), x in 0.0..0.5f64) {
        let y = x + 0.5;
        let slope = (best_response_cutoff(y, &params).unwrap().unclamped
            - best_response_cutoff(x, &params).unwrap().unclamped) / 0.5;
        let expected = params.b() * params.pi() * (1.0 - params.alpha());
        prop_assert!((slope - expected).abs() <= 1e-12 * (1.0 + expected.abs()) / (1.0 - params.pi()));
    }

    #[test]
    fn corner_inclusion_matches_analytic_conditions(params in strategic_params()) {
        let set = enumerate_equilibria(&params).unwrap();
        prop_assume!(!set.continuum);
        let (pi, b, a) = (params.pi(), params.b(), params.alpha());
        let low = pi <= (b - 1.0) / (b * (1.0 - a));
        let high = pi * (2.0 - b * a) >= 1.0;
        // skip points within rounding of a boundary
        prop_assume!((pi - (b - 1.0) / (b * (1.0 - a))).abs() > 1e-9 && (pi * (2.0 - b * a) - 1.0).abs() > 1e-9);
        prop_assert_eq!(set.contains(EquilibriumKind::CornerLow), low);
        prop_assert_eq!(set.contains(EquilibriumKind::CornerHigh), high);
    }

    #[test]
    fn equilibrium_sets_are_sorted_with_small_residuals(params in strategic_params()) {
        let set = enumerate_equilibria(&params).unwrap();
        prop_assert!(set.continuum || !set.equilibria.is_empty());
        prop_assert!(set.equilibria.windows(2).all(|w| w[0].cutoff < w[1].cutoff));
        for e in &set.equilibria {
            prop_assert!(e.residual <= 1e-10);
            match e.kind {
                EquilibriumKind::CornerLow => prop_assert_eq!(e.cutoff, 0.0),
                EquilibriumKind::CornerHigh => prop_assert_eq!(e.cutoff, 1.0),
                EquilibriumKind::Interior => prop_assert!(e.cutoff > 0.0 && e.cutoff < 1.0),
            }
        }
        if params.b() < 2.0 && params.alpha() == 0.0 {
            prop_assert_eq!(set.equilibria.len(), 1);
        }
    }
}
