use stigma_olg::statics::{
    check_monotonicity, cooperation_probability, figure_data, forgiveness_comparison, forgiveness_is_monotone,
    linspace, selection_decline_witness, sweep,
};

/// Quotient-rule derivative of the perfect-memory interior threshold.
fn threshold_derivative(pi: f64, b: f64) -> f64 {
    let n = pi * (1.0 - b + b * pi);
    let dn = 1.0 - b + 2.0 * b * pi;
    let d = (1.0 - pi) * (1.0 - b * pi);
    let dd = -1.0 - b + 2.0 * b * pi;
    (dn * d - n * dd) / (d * d)
}

#[test]
fn finite_difference_tracks_analytic_derivative() {
    let grid: Vec<f64> = linspace(1.0 / 3.0 + 1e-6, 0.5 - 1e-6, 400);
    let report = check_monotonicity(1.5, 0.0, &grid).unwrap();
    assert!(report.passes());
    let near = report
        .grid
        .iter()
        .min_by(|a, b| (a.pi - 0.4).abs().partial_cmp(&(b.pi - 0.4).abs()).unwrap())
        .unwrap();
    let exact = threshold_derivative(near.pi, 1.5);
    assert!(exact > 0.0);
    assert!((near.derivative - exact).abs() < 1e-4, "{} vs {exact}", near.derivative);
}

#[test]
fn monotone_for_all_low_benefits() {
    for k in 1..=9 {
        let b = 1.0 + f64::from(k) / 10.0;
        let lo = 1.0 - 1.0 / b;
        let report = check_monotonicity(b, 0.0, &linspace(lo + 1e-6, 0.5 - 1e-6, 200)).unwrap();
        assert!(report.passes(), "b={b}: {:?}", report.violations);
        assert!(report.sign_check.iter().all(|&(_, s)| s > 0.0));
    }
}

#[test]
fn cooperation_strictly_increasing_for_low_benefit() {
    for &b in &[1.2, 1.5, 1.8] {
        let rows = sweep(b, 0.0, &linspace(0.0, 0.999, 1000)).unwrap();
        for w in rows.windows(2) {
            let (c0, c1) = (w[0].coop_prob_max.unwrap(), w[1].coop_prob_max.unwrap());
            assert_eq!(w[0].coop_prob_min, w[0].coop_prob_max);
            if c0 == 1.0 {
                // all-cooperate corner: flat at full cooperation
                assert_eq!(c1, 1.0);
                continue;
            }
            assert!(c1 > c0, "b={b} pi={} -> {}", w[0].pi, w[1].pi);
        }
    }
}

#[test]
fn sweep_rows_are_internally_consistent() {
    for &b in &[1.5, 2.0, 3.0] {
        for row in sweep(b, 0.2, &linspace(0.0, 0.99, 200)).unwrap() {
            let (lo, hi) = (row.coop_prob_min.unwrap(), row.coop_prob_max.unwrap());
            assert!(lo <= hi && lo >= 0.0 && hi <= 1.0);
            assert_eq!(
                lo,
                cooperation_probability(row.pi, row.equilibria.min_cutoff().unwrap())
            );
            assert_eq!(
                hi,
                cooperation_probability(row.pi, row.equilibria.max_cutoff().unwrap())
            );
        }
    }
}

#[test]
fn selection_switch_lowers_cooperation() {
    let rows = sweep(3.0, 0.0, &[0.45, 0.55, 0.6, 0.7]).unwrap();
    assert_eq!(rows[1].coop_prob_max, Some(1.0));
    assert_eq!(rows[2].coop_prob_min, Some(0.6));
    assert_eq!(selection_decline_witness(&rows), Some((0.55, 0.6)));
}

#[test]
fn forgiveness_reports_nonincreasing_on_grid() {
    let alphas = linspace(0.0, 0.95, 20);
    for i in 0..20 {
        let pi = f64::from(i) / 20.0;
        for j in 0..20 {
            let b = 1.05 + f64::from(j) * 0.2;
            let rows = forgiveness_comparison(pi, b, &alphas).unwrap();
            assert!(forgiveness_is_monotone(&rows), "pi={pi} b={b}");
        }
    }
}

#[test]
fn figure_branches_meet_continuously() {
    for &b in &[1.2, 1.5, 1.8] {
        let fig = figure_data(b, &linspace(0.0, 0.99, 50)).unwrap();
        let (lo, hi): (f64, f64) = (fig.breakpoints[0], fig.breakpoints[1]);
        let formula = |pi: f64| pi * (1.0 - b * (1.0 - pi)) / ((1.0 - pi) * (1.0 - b * pi));
        assert!(formula(lo).abs() <= 1e-9);
        assert!((formula(hi) - 1.0).abs() <= 1e-9);
        // approaching from inside the interior band
        let inner = figure_data(b, &[lo + 1e-10, hi - 1e-10]).unwrap();
        assert!(inner.rows[0].interior.unwrap_or(0.0) <= 1e-9);
        assert!(1.0 - inner.rows[1].interior.unwrap_or(1.0) <= 1e-8);
    }
}
