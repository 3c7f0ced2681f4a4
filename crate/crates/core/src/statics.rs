//! Comparative statics over the honest fraction and the forgiveness rate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{
    classify_regime, enumerate_equilibria, interior_threshold, EquilibriumError, EquilibriumKind, EquilibriumSet,
    Regime,
};
use crate::model::{ModelError, ModelParams};
use crate::parallel::map_ordered;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StaticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error("grid must be ascending")]
    GridNotAscending,
    #[error("grid value {0} outside the admissible range")]
    GridOutOfRange(f64),
    #[error("no grid point admits an interior equilibrium")]
    EmptyInteriorRegion,
}

/// Population-wide probability that a young player cooperates with a clear
/// partner: `pi + (1 - pi) * cutoff`.
pub fn cooperation_probability<T: Scalar>(pi: T, cutoff: T) -> T {
    pi + (T::one() - pi) * cutoff
}

fn check_grid<T: Scalar>(grid: &[T], upper_inclusive: bool) -> Result<(), StaticsError> {
    for &x in grid {
        let in_range = x >= T::zero() && if upper_inclusive { x <= T::one() } else { x < T::one() };
        if !in_range {
            return Err(StaticsError::GridOutOfRange(x.as_f64()));
        }
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(StaticsError::GridNotAscending);
    }
    Ok(())
}

/// One point of a sweep in pi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepRow<T> {
    pub pi: T,
    pub b: T,
    pub alpha: T,
    pub equilibria: EquilibriumSet<T>,
    pub regime: Regime,
    pub boundaries: (T, T),
    pub coop_prob_min: Option<T>,
    pub coop_prob_max: Option<T>,
    /// Set when the point could not be solved (e.g. pi = 1).
    pub error: Option<String>,
}

impl<T: Scalar> SweepRow<T> {
    fn cutoff_of(&self, kind: EquilibriumKind) -> Option<T> {
        self.equilibria.find(kind).map(|e| e.cutoff)
    }

    pub fn eq_low(&self) -> Option<T> {
        self.cutoff_of(EquilibriumKind::CornerLow)
    }

    pub fn eq_interior(&self) -> Option<T> {
        self.cutoff_of(EquilibriumKind::Interior)
    }

    pub fn eq_high(&self) -> Option<T> {
        self.cutoff_of(EquilibriumKind::CornerHigh)
    }
}

fn sweep_point<T: Scalar>(base: ModelParams<T>, pi: T) -> SweepRow<T> {
    let params = base.with_pi(pi).expect("grid already validated");
    let classification = classify_regime(&params);
    let boundaries = crate::equilibrium::corner_boundaries(&params);
    let (equilibria, error) = match enumerate_equilibria(&params) {
        Ok(set) => (set, None),
        Err(e) => (
            EquilibriumSet {
                equilibria: Vec::new(),
                continuum: false,
            },
            Some(e.to_string()),
        ),
    };
    let regime = match classification {
        Ok(c) => c.regime,
        Err(_) => Regime::Vacuous,
    };
    let coop = |c: Option<T>| c.map(|c| cooperation_probability(pi, c));
    SweepRow {
        pi,
        b: params.b(),
        alpha: params.alpha(),
        coop_prob_min: coop(equilibria.min_cutoff()),
        coop_prob_max: coop(equilibria.max_cutoff()),
        equilibria,
        regime,
        boundaries,
        error,
    }
}

/// Solves every point of `pi_grid`; per-point failures are recorded in the row.
pub fn sweep<T: Scalar>(b: T, alpha: T, pi_grid: &[T]) -> Result<Vec<SweepRow<T>>, StaticsError> {
    sweep_with_threads(b, alpha, pi_grid, 1)
}

/// [`sweep`] spread over `threads` workers. Rows come back in grid order and
/// are identical to the sequential result.
pub fn sweep_with_threads<T: Scalar>(
    b: T,
    alpha: T,
    pi_grid: &[T],
    threads: usize,
) -> Result<Vec<SweepRow<T>>, StaticsError> {
    let base = ModelParams::new(T::zero(), b, alpha)?;
    check_grid(pi_grid, true)?;
    Ok(map_ordered(pi_grid, threads, |&pi| sweep_point(base, pi)))
}

/// Proof-local symbols of the interior threshold written as
/// `pi (A + B pi) / ((1 - pi) (C - D pi))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientSymbols<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> QuotientSymbols<T> {
    pub fn new(b: T, alpha: T) -> Self {
        let one = T::one();
        let k = b * (one - alpha);
        Self {
            a: one - b,
            b: k,
            c: one,
            d: k,
        }
    }

    /// Coefficients of `N'(pi) D(pi) - N(pi) D'(pi)`, lowest degree first.
    /// The cubic terms cancel.
    pub fn sign_coefficients(&self) -> [T; 3] {
        let two = T::lit(2.0);
        [
            self.a * self.c,
            two * self.b * self.c,
            -(self.a * self.d) - self.b * (self.c + self.d),
        ]
    }

    pub fn sign_polynomial(&self, pi: T) -> T {
        let [c0, c1, c2] = self.sign_coefficients();
        c0 + pi * (c1 + pi * c2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityPoint<T> {
    pub pi: T,
    pub cutoff: T,
    pub derivative: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MonotonicityReport<T> {
    pub b: T,
    pub alpha: T,
    pub grid: Vec<MonotonicityPoint<T>>,
    /// Points where the derivative estimate or the sign polynomial is not positive.
    pub violations: Vec<T>,
    pub sign_check: Vec<(T, T)>,
}

impl<T> MonotonicityReport<T> {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Finite-difference slope of the interior threshold at every grid point
/// that has one, together with the quotient-rule sign polynomial.
pub fn check_monotonicity<T: Scalar>(b: T, alpha: T, pi_grid: &[T]) -> Result<MonotonicityReport<T>, StaticsError> {
    let base = ModelParams::new(T::zero(), b, alpha)?;
    check_grid(pi_grid, false)?;

    let mut interior: Vec<(T, T)> = Vec::new();
    for &pi in pi_grid {
        match interior_threshold(&base.with_pi(pi)?) {
            Ok(Some(cutoff)) => interior.push((pi, cutoff)),
            Ok(None) | Err(EquilibriumError::Singular) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if interior.len() < 2 {
        return Err(StaticsError::EmptyInteriorRegion);
    }

    let symbols = QuotientSymbols::new(b, alpha);
    let last = interior.len() - 1;
    let mut grid = Vec::with_capacity(interior.len());
    let mut violations = Vec::new();
    let mut sign_check = Vec::with_capacity(interior.len());
    for i in 0..=last {
        let (lo, hi) = match i {
            0 => (0, 1),
            i if i == last => (last - 1, last),
            i => (i - 1, i + 1),
        };
        let derivative = (interior[hi].1 - interior[lo].1) / (interior[hi].0 - interior[lo].0);
        let (pi, cutoff) = interior[i];
        let sign = symbols.sign_polynomial(pi);
        if !(derivative > T::zero()) || !(sign > T::zero()) {
            violations.push(pi);
        }
        grid.push(MonotonicityPoint { pi, cutoff, derivative });
        sign_check.push((pi, sign));
    }
    Ok(MonotonicityReport {
        b,
        alpha,
        grid,
        violations,
        sign_check,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForgivenessRow<T> {
    pub alpha: T,
    pub min_cutoff: T,
    pub max_cutoff: T,
    pub min_coop_prob: T,
    pub max_coop_prob: T,
}

/// Extreme equilibrium cutoffs and cooperation probabilities for each
/// forgiveness rate in `alpha_grid`.
pub fn forgiveness_comparison<T: Scalar>(
    pi: T,
    b: T,
    alpha_grid: &[T],
) -> Result<Vec<ForgivenessRow<T>>, StaticsError> {
    check_grid(alpha_grid, false)?;
    alpha_grid
        .iter()
        .map(|&alpha| {
            let params = ModelParams::new(pi, b, alpha)?;
            let set = enumerate_equilibria(&params)?;
            let min_cutoff = set.min_cutoff().expect("equilibrium set is never empty");
            let max_cutoff = set.max_cutoff().expect("equilibrium set is never empty");
            Ok(ForgivenessRow {
                alpha,
                min_cutoff,
                max_cutoff,
                min_coop_prob: cooperation_probability(pi, min_cutoff),
                max_coop_prob: cooperation_probability(pi, max_cutoff),
            })
        })
        .collect()
}

/// Whether every column of a forgiveness report is nonincreasing in alpha.
pub fn forgiveness_is_monotone<T: Scalar>(rows: &[ForgivenessRow<T>]) -> bool {
    rows.windows(2).all(|w| {
        w[1].min_cutoff <= w[0].min_cutoff
            && w[1].max_cutoff <= w[0].max_cutoff
            && w[1].min_coop_prob <= w[0].min_coop_prob
            && w[1].max_coop_prob <= w[0].max_coop_prob
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureRow<T> {
    pub pi: T,
    /// 0 where the all-defect corner is an equilibrium.
    pub low: Option<T>,
    pub interior: Option<T>,
    /// 1 where the all-cooperate corner is an equilibrium.
    pub high: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FigureData<T> {
    pub b: T,
    /// Ascending `{1 - 1/b, 1/2}`.
    pub breakpoints: Vec<T>,
    pub rows: Vec<FigureRow<T>>,
}

/// Branches of the equilibrium threshold as a function of pi, without
/// forgiveness, ready for plotting.
pub fn figure_data<T: Scalar>(b: T, pi_grid: &[T]) -> Result<FigureData<T>, StaticsError> {
    let rows = sweep(b, T::zero(), pi_grid)?
        .into_iter()
        .map(|row| FigureRow {
            pi: row.pi,
            low: row.eq_low(),
            interior: row.eq_interior(),
            high: row.eq_high(),
        })
        .collect();
    let mut breakpoints = vec![T::one() - b.recip(), T::lit(0.5)];
    breakpoints.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    Ok(FigureData { b, breakpoints, rows })
}

/// A pair `pi0 < pi1` where the cooperative selection at `pi0` gives full
/// cooperation and the defecting selection at `pi1` gives strictly less:
/// more honest players, less cooperation.
pub fn selection_decline_witness<T: Scalar>(rows: &[SweepRow<T>]) -> Option<(T, T)> {
    let one = T::one();
    for (i, r0) in rows.iter().enumerate() {
        if r0.coop_prob_max != Some(one) || r0.equilibria.equilibria.len() < 2 {
            continue;
        }
        for r1 in &rows[i + 1..] {
            if r1.equilibria.equilibria.len() >= 2 && r1.coop_prob_min == Some(r1.pi) && r1.pi < one {
                return Some((r0.pi, r1.pi));
            }
        }
    }
    None
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace<T: Scalar>(start: T, end: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / T::lit((n - 1) as f64);
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        end
                    } else {
                        start + step * T::lit(i as f64)
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cooperation_probability_examples() {
        assert_abs_diff_eq!(cooperation_probability(0.4, 1.0 / 6.0), 0.5, epsilon = 1e-15);
        assert_eq!(cooperation_probability(0.5, 1.0), 1.0);
        assert_eq!(cooperation_probability(0.3, 0.0), 0.3);
    }

    #[test]
    fn sweep_examples() {
        let rows = sweep(1.5, 0.0, &[0.2, 0.4, 0.6]).unwrap();
        let regimes: Vec<_> = rows.iter().map(|r| r.regime).collect();
        assert_eq!(
            regimes,
            vec![Regime::AllDefect, Regime::UniqueInterior, Regime::AllCooperate]
        );

        let rows = sweep(3.0, 0.0, &[0.55]).unwrap();
        assert_eq!(rows[0].equilibria.equilibria.len(), 3);
        assert_abs_diff_eq!(rows[0].coop_prob_min.unwrap(), 0.55);
        assert_eq!(rows[0].coop_prob_max, Some(1.0));

        assert!(sweep(1.5, 0.0, &[]).unwrap().is_empty());
    }

    #[test]
    fn sweep_marks_vacuous_point_without_aborting() {
        let rows = sweep(1.5, 0.0, &[0.5, 1.0]).unwrap();
        assert!(rows[0].error.is_none());
        assert_eq!(rows[1].regime, Regime::Vacuous);
        assert!(rows[1].error.is_some());
        assert_eq!(rows[1].coop_prob_max, None);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        assert_eq!(sweep(1.5, 0.0, &[0.4, 0.2]), Err(StaticsError::GridNotAscending));
        assert_eq!(sweep(1.5, 0.0, &[0.4, 1.2]), Err(StaticsError::GridOutOfRange(1.2)));
        assert!(matches!(sweep(0.9, 0.0, &[0.4]), Err(StaticsError::Model(_))));
    }

    #[test]
    fn parallel_sweep_matches_sequential() {
        let grid = linspace(0.0, 0.99, 301);
        assert_eq!(
            sweep(3.0, 0.1, &grid).unwrap(),
            sweep_with_threads(3.0, 0.1, &grid, 4).unwrap()
        );
    }

    #[test]
    fn sign_polynomial_matches_direct_product() {
        for &b in &[1.1, 1.5, 1.9, 2.5] {
            for &alpha in &[0.0, 0.3] {
                let s = QuotientSymbols::new(b, alpha);
                for i in 0..=20 {
                    let pi = f64::from(i) / 20.0;
                    let n = pi * (s.a + s.b * pi);
                    let dn = s.a + 2.0 * s.b * pi;
                    let d = (1.0 - pi) * (s.c - s.d * pi);
                    let dd = -(s.c + s.d) + 2.0 * s.d * pi;
                    assert_abs_diff_eq!(s.sign_polynomial(pi), dn * d - n * dd, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn monotonicity_examples() {
        let grid = linspace(1.0 / 3.0 + 1e-3, 0.5 - 1e-3, 50);
        let report = check_monotonicity(1.5, 0.0, &grid).unwrap();
        assert!(report.passes());
        assert_eq!(report.grid.len(), 50);

        let lo = 1.0 - 1.0 / 1.9;
        let report = check_monotonicity(1.9, 0.0, &linspace(lo + 1e-4, 0.5 - 1e-4, 50)).unwrap();
        assert!(report.passes(), "{:?}", report.violations);

        assert_eq!(
            check_monotonicity(1.5, 0.0, &[0.1, 0.2]),
            Err(StaticsError::EmptyInteriorRegion)
        );
    }

    #[test]
    fn forgiveness_examples() {
        let rows = forgiveness_comparison(0.4, 1.5, &[0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(rows[0].max_cutoff, 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(rows[1].max_cutoff, 0.0);
        assert_abs_diff_eq!(rows[0].max_coop_prob, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rows[1].max_coop_prob, 0.4, epsilon = 1e-15);

        let rows = forgiveness_comparison(0.9, 1.5, &[0.0, 0.1]).unwrap();
        assert_eq!(rows[0].max_cutoff, 1.0);
        assert_eq!(rows[1].max_cutoff, 1.0);

        let rows = forgiveness_comparison(0.0, 2.0, &[0.0, 0.3, 0.6, 0.9]).unwrap();
        assert!(rows.iter().all(|r| r.max_cutoff == 0.0 && r.min_cutoff == 0.0));
        assert!(forgiveness_is_monotone(&rows));

        assert!(matches!(
            forgiveness_comparison(1.0, 1.5, &[0.0]),
            Err(StaticsError::Equilibrium(EquilibriumError::Vacuous))
        ));
    }

    #[test]
    fn figure_examples() {
        let fig = figure_data(1.5, &[0.45]).unwrap();
        assert_abs_diff_eq!(fig.breakpoints[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(fig.breakpoints[1], 0.5);
        assert_abs_diff_eq!(fig.rows[0].interior.unwrap(), 0.07875 / 0.17875, epsilon = 1e-12);
        assert_eq!((fig.rows[0].low, fig.rows[0].high), (None, None));

        let fig = figure_data(3.0, &[0.6]).unwrap();
        assert_eq!(fig.breakpoints[0], 0.5);
        assert_abs_diff_eq!(fig.breakpoints[1], 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(fig.rows[0].low, Some(0.0));
        assert_eq!(fig.rows[0].high, Some(1.0));
        assert!(fig.rows[0].interior.is_some());
    }

    #[test]
    fn witness_found_on_band() {
        let rows = sweep(3.0, 0.0, &[0.45, 0.55, 0.6, 0.7]).unwrap();
        let (p0, p1) = selection_decline_witness(&rows).unwrap();
        assert_eq!((p0, p1), (0.55, 0.6));
        assert!(selection_decline_witness(&sweep(1.5, 0.0, &linspace(0.0, 0.99, 100)).unwrap()).is_none());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 1.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 1.0);
        assert_abs_diff_eq!(g[3], 0.3, epsilon = 1e-15);
        assert_eq!(linspace(0.2, 0.9, 1), vec![0.2]);
    }
}
