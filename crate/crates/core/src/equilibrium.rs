//! Symmetric threshold equilibria.
//!
//! A strategic young player facing a clear partner cooperates iff his loss
//! is at most a cutoff. Given a believed population cutoff, the indifferent
//! loss is an affine function of the belief (for the uniform cost
//! distribution), and equilibria are the fixed points of that map clamped to
//! [0, 1]. Corners are read off the map's endpoints; the interior root has a
//! closed form which [`fixed_point_bisection`] checks independently.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{coop_payoff, defect_payoff, meeting_coop_prob, ModelError, ModelParams};
use crate::scalar::Scalar;

/// Relative tolerance on the singular locus `b * pi * (1 - alpha) = 1`.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-14;
/// Required fixed-point residual of a bisection root.
pub const BISECTION_RESIDUAL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;
/// Bound on the residual of every reported equilibrium.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-10;
/// Subintervals scanned for sign changes when the cost distribution has no
/// closed-form interior root.
const ROOT_SCAN_CELLS: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("pi = 1 leaves no strategic players; the equilibrium notion is vacuous")]
    Vacuous,
    #[error("b * pi * (1 - alpha) = 1: the interior threshold formula is singular")]
    Singular,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("fixed-point defect has the same sign at both bracket endpoints")]
    NoSignChange,
    #[error("every cutoff in the bracket is a fixed point")]
    Continuum,
    #[error("bracket [{low}, {high}] is not a sub-interval of [0, 1]")]
    InvalidBracket { low: f64, high: f64 },
    #[error("bisection did not reach the residual tolerance (residual {0})")]
    NoConvergence(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Scales an f64 tolerance to the precision of `T` (never below 64 ulps at 1).
pub(crate) fn tol<T: Scalar>(x: f64) -> T {
    T::lit(x).max(T::epsilon() * T::lit(64.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponse<T> {
    pub unclamped: T,
    pub clamped: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquilibriumKind {
    CornerLow,
    Interior,
    CornerHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEquilibrium<T> {
    pub cutoff: T,
    pub kind: EquilibriumKind,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet<T> {
    /// Ascending by cutoff.
    pub equilibria: Vec<ThresholdEquilibrium<T>>,
    /// Every cutoff in [0, 1] is an equilibrium; `equilibria` is then empty.
    pub continuum: bool,
}

impl<T: Scalar> EquilibriumSet<T> {
    /// Smallest equilibrium cutoff (0 for a continuum).
    pub fn min_cutoff(&self) -> Option<T> {
        if self.continuum {
            return Some(T::zero());
        }
        self.equilibria.first().map(|e| e.cutoff)
    }

    /// Largest equilibrium cutoff (1 for a continuum).
    pub fn max_cutoff(&self) -> Option<T> {
        if self.continuum {
            return Some(T::one());
        }
        self.equilibria.last().map(|e| e.cutoff)
    }

    pub fn find(&self, kind: EquilibriumKind) -> Option<&ThresholdEquilibrium<T>> {
        self.equilibria.iter().find(|e| e.kind == kind)
    }

    pub fn contains(&self, kind: EquilibriumKind) -> bool {
        self.find(kind).is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    AllDefect,
    UniqueInterior,
    AllCooperate,
    TripleEquilibrium,
    Continuum,
    DominantCooperation,
    Vacuous,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::AllDefect => "AllDefect",
            Regime::UniqueInterior => "UniqueInterior",
            Regime::AllCooperate => "AllCooperate",
            Regime::TripleEquilibrium => "TripleEquilibrium",
            Regime::Continuum => "Continuum",
            Regime::DominantCooperation => "DominantCooperation",
            Regime::Vacuous => "Vacuous",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Regime::AllDefect,
            Regime::UniqueInterior,
            Regime::AllCooperate,
            Regime::TripleEquilibrium,
            Regime::Continuum,
            Regime::DominantCooperation,
            Regime::Vacuous,
        ]
        .into_iter()
        .find(|r| r.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification<T> {
    pub regime: Regime,
    /// `(lower, upper)`: the all-defect corner is an equilibrium iff
    /// `pi <= lower`, the all-cooperate corner iff `pi >= upper`.
    pub boundaries: (T, T),
}

/// Cutoff returned by [`dominance_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceThreshold<T> {
    pub value: T,
    /// False when `b >= 2`, where the bound is not below one.
    pub within_unit_interval: bool,
}

fn require_strategic<T: Scalar>(params: &ModelParams<T>) -> Result<(), EquilibriumError> {
    if params.pi() >= T::one() {
        Err(EquilibriumError::Vacuous)
    } else {
        Ok(())
    }
}

/// Slope of the best-response map in the belief (uniform case).
fn slope<T: Scalar>(params: &ModelParams<T>) -> T {
    params.b() * params.pi() * (T::one() - params.alpha())
}

/// Loss that makes a strategic young player indifferent between cooperating
/// and defecting when everyone else uses cutoff `belief`.
pub fn best_response_cutoff<T: Scalar>(
    belief: T,
    params: &ModelParams<T>,
) -> Result<BestResponse<T>, EquilibriumError> {
    require_strategic(params)?;
    let (pi, b, alpha) = (params.pi(), params.b(), params.alpha());
    let one = T::one();
    let meet = meeting_coop_prob(belief, params);
    let unclamped = pi * (one - b + b * meet * (one - alpha)) / (one - pi);
    Ok(BestResponse {
        unclamped,
        clamped: unclamped.max(T::zero()).min(one),
    })
}

fn fixed_point_defect<T: Scalar>(cutoff: T, params: &ModelParams<T>) -> Result<T, EquilibriumError> {
    Ok(best_response_cutoff(cutoff, params)?.unclamped - cutoff)
}

/// Residual of `cutoff` as a fixed point of the clamped best-response map.
pub fn equilibrium_residual<T: Scalar>(cutoff: T, params: &ModelParams<T>) -> Result<T, EquilibriumError> {
    Ok((best_response_cutoff(cutoff, params)?.clamped - cutoff).abs())
}

/// `(lower, upper)` corner boundaries in pi for the current b and alpha.
pub fn corner_boundaries<T: Scalar>(params: &ModelParams<T>) -> (T, T) {
    let (b, alpha) = (params.b(), params.alpha());
    let one = T::one();
    let lower = (b - one) / (b * (one - alpha));
    let denom = T::lit(2.0) - b * alpha;
    let upper = if denom > T::zero() {
        denom.recip()
    } else {
        T::infinity()
    };
    (lower, upper)
}

/// Closed-form interior root of the best-response map,
/// `pi [1 - b + b pi (1 - alpha)] / ((1 - pi) [1 - b pi (1 - alpha)])`,
/// or `None` when that value is not strictly inside (0, 1).
pub fn interior_threshold<T: Scalar>(params: &ModelParams<T>) -> Result<Option<T>, EquilibriumError> {
    if !params.cost_distribution().is_uniform() {
        return Err(EquilibriumError::Unsupported(
            "closed-form interior threshold requires the uniform cost distribution",
        ));
    }
    require_strategic(params)?;
    let (pi, b) = (params.pi(), params.b());
    let one = T::one();
    let s = slope(params);
    if (s - one).abs() < tol::<T>(SINGULAR_TOL) {
        return Err(EquilibriumError::Singular);
    }
    let value = pi * (one - b + s) / ((one - pi) * (one - s));
    Ok((value > T::zero() && value < one).then_some(value))
}

/// Bisection on the fixed-point defect `BR(l) - l` over `[low, high]`.
///
/// Works for any cost distribution.
pub fn fixed_point_bisection<T: Scalar>(params: &ModelParams<T>, low: T, high: T) -> Result<T, EquilibriumError> {
    if !(low >= T::zero() && high <= T::one() && low <= high) {
        return Err(EquilibriumError::InvalidBracket {
            low: low.as_f64(),
            high: high.as_f64(),
        });
    }
    let residual_tol = tol::<T>(BISECTION_RESIDUAL);
    let g_low = fixed_point_defect(low, params)?;
    let g_high = fixed_point_defect(high, params)?;

    if g_low.abs() <= residual_tol && g_high.abs() <= residual_tol {
        let mid = (low + high) / T::lit(2.0);
        if fixed_point_defect(mid, params)?.abs() <= residual_tol {
            return Err(EquilibriumError::Continuum);
        }
    }
    if g_low == T::zero() {
        return Ok(low);
    }
    if g_high == T::zero() {
        return Ok(high);
    }
    if g_low.signum() == g_high.signum() {
        return Err(EquilibriumError::NoSignChange);
    }

    let width_tol = tol::<T>(BISECTION_WIDTH);
    let (mut lo, mut hi, mut g_lo) = (low, high, g_low);
    for _ in 0..BISECTION_MAX_ITER {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = fixed_point_defect(mid, params)?;
        if g_mid == T::zero() {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= width_tol {
            break;
        }
    }
    let root = lo + (hi - lo) / T::lit(2.0);
    let residual = fixed_point_defect(root, params)?.abs();
    if residual <= residual_tol {
        Ok(root)
    } else {
        Err(EquilibriumError::NoConvergence(residual.as_f64()))
    }
}

/// Interior roots for a general cost distribution, found by scanning for
/// sign changes and bisecting each one.
fn interior_roots_by_scan<T: Scalar>(params: &ModelParams<T>) -> Result<Vec<T>, EquilibriumError> {
    let n = T::lit(ROOT_SCAN_CELLS as f64);
    let mut roots = Vec::new();
    let mut prev_x = T::zero();
    let mut prev_g = fixed_point_defect(prev_x, params)?;
    for i in 1..=ROOT_SCAN_CELLS {
        let x = T::lit(i as f64) / n;
        let g = fixed_point_defect(x, params)?;
        if g == T::zero() && i < ROOT_SCAN_CELLS {
            roots.push(x);
        } else if prev_g != T::zero() && g != T::zero() && prev_g.signum() != g.signum() {
            roots.push(fixed_point_bisection(params, prev_x, x)?);
        }
        prev_x = x;
        prev_g = g;
    }
    roots.retain(|&r| r > T::zero() && r < T::one());
    Ok(roots)
}

/// All symmetric threshold equilibria.
pub fn enumerate_equilibria<T: Scalar>(params: &ModelParams<T>) -> Result<EquilibriumSet<T>, EquilibriumError> {
    require_strategic(params)?;
    let zero = T::zero();
    let one = T::one();
    let br_low = best_response_cutoff(zero, params)?;
    let br_high = best_response_cutoff(one, params)?;

    if params.cost_distribution().is_uniform() {
        let singular = (slope(params) - one).abs() < tol::<T>(SINGULAR_TOL);
        if singular && br_low.unclamped.abs() < tol::<T>(SINGULAR_TOL) {
            return Ok(EquilibriumSet {
                equilibria: Vec::new(),
                continuum: true,
            });
        }
    }

    let mut equilibria = Vec::with_capacity(3);
    if br_low.unclamped <= zero {
        equilibria.push(ThresholdEquilibrium {
            cutoff: zero,
            kind: EquilibriumKind::CornerLow,
            residual: equilibrium_residual(zero, params)?,
        });
    }

    let interior = if params.cost_distribution().is_uniform() {
        match interior_threshold(params) {
            Ok(v) => v.into_iter().collect(),
            Err(EquilibriumError::Singular) => Vec::new(),
            Err(e) => return Err(e),
        }
    } else {
        interior_roots_by_scan(params)?
    };
    for cutoff in interior {
        equilibria.push(ThresholdEquilibrium {
            cutoff,
            kind: EquilibriumKind::Interior,
            residual: equilibrium_residual(cutoff, params)?,
        });
    }

    if br_high.unclamped >= one {
        equilibria.push(ThresholdEquilibrium {
            cutoff: one,
            kind: EquilibriumKind::CornerHigh,
            residual: equilibrium_residual(one, params)?,
        });
    }

    equilibria.sort_by(|a, b| a.cutoff.partial_cmp(&b.cutoff).expect("finite cutoffs"));
    debug_assert!(equilibria
        .iter()
        .all(|e| e.residual <= tol::<T>(EQUILIBRIUM_RESIDUAL).max(T::epsilon().sqrt())));
    Ok(EquilibriumSet {
        equilibria,
        continuum: false,
    })
}

/// `2 (1 - 1/b)`, the honest-fraction bound stated for cooperation to be
/// dominant when `1 < b < 2`.
pub fn dominance_threshold<T: Scalar>(b: T) -> Result<DominanceThreshold<T>, EquilibriumError> {
    if !(b > T::one()) {
        return Err(ModelError::BenefitTooSmall(b.as_f64()).into());
    }
    let value = T::lit(2.0) * (T::one() - b.recip());
    Ok(DominanceThreshold {
        value,
        within_unit_interval: value < T::one(),
    })
}

/// Positive root of `b pi^2 + (2 - b) pi - 1`, the exact honest fraction
/// above which a loss-1 player cooperates against the all-defect belief.
pub fn exact_dominance_threshold<T: Scalar>(b: T) -> Result<T, EquilibriumError> {
    if !(b > T::one()) {
        return Err(ModelError::BenefitTooSmall(b.as_f64()).into());
    }
    let two = T::lit(2.0);
    Ok((b - two + (b * b + T::lit(4.0)).sqrt()) / (two * b))
}

/// Whether cooperating beats defecting for every loss and every belief,
/// checked at the worst case (loss 1, belief 0).
pub fn is_cooperation_dominant<T: Scalar>(params: &ModelParams<T>) -> Result<bool, EquilibriumError> {
    if params.alpha() != T::zero() {
        return Err(EquilibriumError::Unsupported(
            "dominance is only characterised without forgiveness (alpha = 0)",
        ));
    }
    Ok(coop_payoff(T::one(), T::zero(), params) > defect_payoff(T::zero(), params))
}

pub fn classify_regime<T: Scalar>(params: &ModelParams<T>) -> Result<RegimeClassification<T>, EquilibriumError> {
    let boundaries = corner_boundaries(params);
    if params.pi() >= T::one() {
        return Ok(RegimeClassification {
            regime: Regime::Vacuous,
            boundaries,
        });
    }
    let set = enumerate_equilibria(params)?;
    let regime = if set.continuum {
        Regime::Continuum
    } else if set.equilibria.len() > 1 {
        Regime::TripleEquilibrium
    } else {
        match set.equilibria.first().map(|e| e.kind) {
            Some(EquilibriumKind::CornerLow) => Regime::AllDefect,
            Some(EquilibriumKind::Interior) => Regime::UniqueInterior,
            Some(EquilibriumKind::CornerHigh) => {
                if params.alpha() == T::zero() && is_cooperation_dominant(params)? {
                    Regime::DominantCooperation
                } else {
                    Regime::AllCooperate
                }
            }
            // The clamped map is continuous on [0, 1], so a fixed point exists.
            None => unreachable!("empty equilibrium set without continuum"),
        }
    };
    Ok(RegimeClassification { regime, boundaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CostDistribution;
    use approx::assert_abs_diff_eq;

    fn p(pi: f64, b: f64, alpha: f64) -> ModelParams<f64> {
        ModelParams::new(pi, b, alpha).unwrap()
    }

    fn cutoffs(set: &EquilibriumSet<f64>) -> Vec<f64> {
        set.equilibria.iter().map(|e| e.cutoff).collect()
    }

    #[test]
    fn best_response_examples() {
        let br = best_response_cutoff(0.0, &p(0.4, 1.5, 0.0)).unwrap();
        assert_abs_diff_eq!(br.unclamped, 1.0 / 15.0, epsilon = 1e-15);
        let br = best_response_cutoff(1.0, &p(0.6, 1.5, 0.0)).unwrap();
        assert_abs_diff_eq!(br.unclamped, 1.5, epsilon = 1e-14);
        assert_eq!(br.clamped, 1.0);
        let params = p(0.5, 2.0, 0.0);
        for i in 0..=10 {
            let x = f64::from(i) / 10.0;
            assert_abs_diff_eq!(best_response_cutoff(x, &params).unwrap().unclamped, x, epsilon = 1e-15);
        }
        assert_eq!(
            best_response_cutoff(0.3, &p(1.0, 1.5, 0.0)),
            Err(EquilibriumError::Vacuous)
        );
    }

    #[test]
    fn interior_threshold_examples() {
        assert_abs_diff_eq!(
            interior_threshold(&p(0.4, 1.5, 0.0)).unwrap().unwrap(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            interior_threshold(&p(0.55, 3.0, 0.0)).unwrap().unwrap(),
            0.1925 / 0.2925,
            epsilon = 1e-15
        );
        assert_eq!(interior_threshold(&p(1.0 / 3.0, 1.5, 0.0)).unwrap(), None);
        assert_eq!(interior_threshold(&p(0.5, 2.0, 0.0)), Err(EquilibriumError::Singular));
        let power = p(0.4, 1.5, 0.0)
            .with_cost_distribution(CostDistribution::Power { exponent: 2.0 })
            .unwrap();
        assert!(matches!(
            interior_threshold(&power),
            Err(EquilibriumError::Unsupported(_))
        ));
    }

    #[test]
    fn bisection_examples() {
        let root = fixed_point_bisection(&p(0.4, 1.5, 0.0), 0.01, 0.99).unwrap();
        assert_abs_diff_eq!(root, 1.0 / 6.0, epsilon = 1e-12);
        let root = fixed_point_bisection(&p(0.55, 3.0, 0.0), 0.1, 0.9).unwrap();
        assert_abs_diff_eq!(root, 0.65812, epsilon = 1e-5);
        assert_eq!(
            fixed_point_bisection(&p(0.4, 1.5, 0.5), 0.01, 0.99),
            Err(EquilibriumError::NoSignChange)
        );
        assert_eq!(
            fixed_point_bisection(&p(0.5, 2.0, 0.0), 0.0, 1.0),
            Err(EquilibriumError::Continuum)
        );
        assert!(matches!(
            fixed_point_bisection(&p(0.4, 1.5, 0.0), 0.5, 0.2),
            Err(EquilibriumError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn enumerate_examples() {
        let set = enumerate_equilibria(&p(0.55, 3.0, 0.0)).unwrap();
        let c = cutoffs(&set);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0], 0.0);
        assert_abs_diff_eq!(c[1], 0.65812, epsilon = 1e-5);
        assert_eq!(c[2], 1.0);
        assert!(set.equilibria.iter().all(|e| e.residual <= 1e-10));

        let set = enumerate_equilibria(&p(0.4, 1.5, 0.0)).unwrap();
        assert_eq!(set.equilibria.len(), 1);
        assert_eq!(set.equilibria[0].kind, EquilibriumKind::Interior);
        assert_abs_diff_eq!(set.equilibria[0].cutoff, 1.0 / 6.0, epsilon = 1e-15);

        let set = enumerate_equilibria(&p(0.5, 2.0, 0.0)).unwrap();
        assert!(set.continuum);
        assert!(set.equilibria.is_empty());
        assert_eq!((set.min_cutoff(), set.max_cutoff()), (Some(0.0), Some(1.0)));

        assert_eq!(enumerate_equilibria(&p(1.0, 1.5, 0.0)), Err(EquilibriumError::Vacuous));
    }

    #[test]
    fn singular_locus_without_continuum_falls_back_to_corners() {
        // b pi = 1 at pi = 2/3 for b = 1.5: intercept is nonzero.
        let set = enumerate_equilibria(&p(2.0 / 3.0, 1.5, 0.0)).unwrap();
        assert!(!set.continuum);
        assert_eq!(cutoffs(&set), vec![1.0]);
    }

    #[test]
    fn continuum_with_forgiveness() {
        // pi (1 - alpha) = 1/2 with b = 2
        let set = enumerate_equilibria(&p(0.625, 2.0, 0.2)).unwrap();
        assert!(set.continuum);
    }

    #[test]
    fn band_endpoints_hold_both_corners() {
        let set = enumerate_equilibria(&p(0.5, 3.0, 0.0)).unwrap();
        assert_eq!(cutoffs(&set), vec![0.0, 1.0]);
        assert_eq!(
            classify_regime(&p(0.5, 3.0, 0.0)).unwrap().regime,
            Regime::TripleEquilibrium
        );
    }

    #[test]
    fn dominance_threshold_examples() {
        assert_abs_diff_eq!(dominance_threshold(1.5).unwrap().value, 2.0 / 3.0, epsilon = 1e-15);
        assert!(dominance_threshold(1.0 + 1e-9).unwrap().value < 1e-8);
        let at_two = dominance_threshold(2.0).unwrap();
        assert_eq!(at_two.value, 1.0);
        assert!(!at_two.within_unit_interval);
        assert!(dominance_threshold(1.0).is_err());
        assert!(dominance_threshold(0.5).is_err());
    }

    #[test]
    fn exact_dominance_threshold_is_root_of_worst_case_inequality() {
        for &b in &[1.1, 1.3, 1.5, 1.7, 1.9, 3.0] {
            let r = exact_dominance_threshold(b).unwrap();
            let params = p(r, b, 0.0);
            assert_abs_diff_eq!(
                coop_payoff(1.0, 0.0, &params),
                defect_payoff(0.0, &params),
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(exact_dominance_threshold(1.5).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn cooperation_dominance_examples() {
        assert!(is_cooperation_dominant(&p(0.7, 1.5, 0.0)).unwrap());
        assert!(!is_cooperation_dominant(&p(0.6, 1.5, 0.0)).unwrap());
        assert!(!is_cooperation_dominant(&p(0.0, 1.5, 0.0)).unwrap());
        assert!(matches!(
            is_cooperation_dominant(&p(0.7, 1.5, 0.1)),
            Err(EquilibriumError::Unsupported(_))
        ));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_regime(&p(0.2, 1.5, 0.0)).unwrap().regime, Regime::AllDefect);
        assert_eq!(
            classify_regime(&p(0.4, 1.5, 0.0)).unwrap().regime,
            Regime::UniqueInterior
        );
        assert_eq!(classify_regime(&p(0.6, 1.5, 0.0)).unwrap().regime, Regime::AllCooperate);
        assert_eq!(
            classify_regime(&p(0.6, 3.0, 0.0)).unwrap().regime,
            Regime::TripleEquilibrium
        );
        assert_eq!(
            classify_regime(&p(0.8, 1.5, 0.0)).unwrap().regime,
            Regime::DominantCooperation
        );
        assert_eq!(classify_regime(&p(0.5, 2.0, 0.0)).unwrap().regime, Regime::Continuum);
        assert_eq!(classify_regime(&p(0.8, 1.5, 0.2)).unwrap().regime, Regime::AllCooperate);
        assert_eq!(classify_regime(&p(1.0, 1.5, 0.0)).unwrap().regime, Regime::Vacuous);
        let c = classify_regime(&p(0.4, 1.5, 0.0)).unwrap();
        assert_abs_diff_eq!(c.boundaries.0, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.boundaries.1, 0.5, epsilon = 1e-15);
        // b alpha >= 2: the all-cooperate corner never appears
        assert!(classify_regime(&p(0.4, 3.0, 0.9)).unwrap().boundaries.1.is_infinite());
    }

    #[test]
    fn regime_names_round_trip() {
        for r in [
            Regime::AllDefect,
            Regime::Continuum,
            Regime::Vacuous,
            Regime::DominantCooperation,
        ] {
            assert_eq!(Regime::from_name(r.name()), Some(r));
        }
        assert_eq!(Regime::from_name("nope"), None);
    }

    #[test]
    fn non_uniform_distribution_uses_scan() {
        let params = p(0.45, 1.5, 0.0)
            .with_cost_distribution(CostDistribution::Power { exponent: 2.0 })
            .unwrap();
        let set = enumerate_equilibria(&params).unwrap();
        assert!(!set.equilibria.is_empty());
        for e in &set.equilibria {
            assert!(e.residual <= 1e-10, "{e:?}");
        }
    }

    #[test]
    fn f32_solver_agrees_with_f64() {
        let p32 = ModelParams::<f32>::new(0.55, 3.0, 0.0).unwrap();
        let set = enumerate_equilibria(&p32).unwrap();
        assert_eq!(set.equilibria.len(), 3);
        assert!((set.equilibria[1].cutoff - 0.658_119_7).abs() < 1e-5);
        let root = fixed_point_bisection(&p32, 0.1, 0.9).unwrap();
        assert!((root - 0.658_119_7).abs() < 1e-5);
    }
}
