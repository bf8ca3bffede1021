//! Closed-form alarm theory: optimal cutoffs, expected-cost ceilings,
//! concentration bounds, and the sample-size/error tradeoff curve.
//!
//! Costs assign `r_fn` to each missed collision and `r_fp` to each false
//! alarm. The optimal alarm fires when the collision probability exceeds
//! `r_fp / (r_fn + r_fp)`; every bound here is expressed relative to that
//! optimum as an expected additional cost (EAC).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// False-negative / false-positive penalty pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    pub r_fn: f64,
    pub r_fp: f64,
}

impl CostConfig {
    pub fn new(r_fn: f64, r_fp: f64) -> Result<Self> {
        if !(r_fn >= 0.0 && r_fp >= 0.0) || !(r_fn + r_fp > 0.0) {
            return Err(Error::BadCosts);
        }
        Ok(CostConfig { r_fn, r_fp })
    }

    pub fn sum(&self) -> f64 {
        self.r_fn + self.r_fp
    }

    /// Short label for report columns, e.g. `rfn10_rfp1`.
    pub fn label(&self) -> String {
        fn fmt(x: f64) -> String {
            if x == x.trunc() && x.abs() < 1e9 {
                format!("{}", x as i64)
            } else {
                format!("{x}")
            }
        }
        format!("rfn{}_rfp{}", fmt(self.r_fn), fmt(self.r_fp))
    }
}

/// Probability cutoff of the optimal alarm: `r_fp / (r_fn + r_fp)`.
pub fn optimal_cutoff(costs: &CostConfig) -> f64 {
    costs.r_fp / (costs.r_fn + costs.r_fp)
}

/// Worst-case expected cost of the optimal alarm over any single state:
/// `r_fp * r_fn / (r_fn + r_fp)`.
pub fn optimal_ec_ceiling(costs: &CostConfig) -> f64 {
    costs.r_fp * costs.r_fn / (costs.r_fn + costs.r_fp)
}

/// Two-sided concentration bound on the error of an `n`-sample mean of
/// indicators: `P(|estimate - truth| > eps) <= 2 exp(-n eps^2 / 2)`, capped
/// at one.
pub fn hoeffding_p_eps(n: usize, eps: f64) -> f64 {
    (2.0 * (-0.5 * n as f64 * eps * eps).exp()).min(1.0)
}

/// EAC bound for an approximate alarm whose estimate lies within `eps` of
/// the truth with failure probability `p_eps`:
/// `max(eps, p_eps) * (r_fn + r_fp)`, capped at the cost sum.
pub fn eac_bound(eps: f64, p_eps: f64, costs: &CostConfig) -> f64 {
    (eps.max(p_eps) * costs.sum()).min(costs.sum())
}

/// EAC bound for an `n`-sample Monte Carlo alarm at a fixed interval width.
pub fn mc_eac_bound_fixed_eps(n: usize, eps: f64, costs: &CostConfig) -> f64 {
    eac_bound(eps, hoeffding_p_eps(n, eps), costs)
}

/// Tightest EAC bound of the `max(eps, p_eps)` form for an `n`-sample Monte
/// Carlo alarm: minimized over the interval width.
///
/// Since `eps` increases and `2 exp(-n eps^2 / 2)` decreases, the minimum
/// sits at their crossing, found by bisection to 1e-10. `n = 0` (or an `n`
/// too small for the exponential to drop below one) returns the trivial cap
/// `r_fn + r_fp`.
pub fn mc_eac_bound(n: usize, costs: &CostConfig) -> f64 {
    costs.sum() * mc_eac_factor(n)
}

/// Cost-independent factor of [`mc_eac_bound`]; the bound is
/// `(r_fn + r_fp) * factor(n)`.
pub fn mc_eac_factor(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let g = |eps: f64| eps - 2.0 * (-0.5 * nf * eps * eps).exp();
    if g(1.0) <= 0.0 {
        // Exponential never drops below eps inside (0, 1]: vacuous bound.
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// EAC bound for a regression alarm with the given root-mean-squared error:
/// `(r_fn + r_fp) * rmse`, capped at the cost sum.
pub fn rmse_eac_bound(rmse: f64, costs: &CostConfig) -> f64 {
    (costs.sum() * rmse).min(costs.sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn costs(r_fn: f64, r_fp: f64) -> CostConfig {
        CostConfig::new(r_fn, r_fp).unwrap()
    }

    #[test]
    fn cutoff_hand_values() {
        assert_relative_eq!(optimal_cutoff(&costs(1.0, 1.0)), 0.5, epsilon = 1e-12);
        assert_relative_eq!(
            optimal_cutoff(&costs(10.0, 1.0)),
            1.0 / 11.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            optimal_cutoff(&costs(100.0, 1.0)),
            1.0 / 101.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ceiling_hand_values() {
        assert_relative_eq!(optimal_ec_ceiling(&costs(1.0, 1.0)), 0.5, epsilon = 1e-12);
        assert_relative_eq!(
            optimal_ec_ceiling(&costs(10.0, 1.0)),
            10.0 / 11.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            optimal_ec_ceiling(&costs(100.0, 1.0)),
            100.0 / 101.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn costs_reject_both_zero() {
        assert!(CostConfig::new(0.0, 0.0).is_err());
        assert!(CostConfig::new(-1.0, 1.0).is_err());
        assert!(CostConfig::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn hoeffding_hand_values() {
        assert_relative_eq!(hoeffding_p_eps(0, 0.5), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            hoeffding_p_eps(1000, 0.05),
            2.0 * (-1.25f64).exp(),
            epsilon = 1e-12
        );
        // 2 e^{-1.25} = 0.5730095937203802
        assert_relative_eq!(
            hoeffding_p_eps(1000, 0.05),
            0.5730095937203802,
            epsilon = 1e-12
        );
    }

    #[test]
    fn eac_bound_hand_values() {
        let c = costs(1.0, 1.0);
        assert_relative_eq!(eac_bound(0.1, 0.05, &c), 0.2, epsilon = 1e-12);
        assert_relative_eq!(eac_bound(0.0, 0.0, &c), 0.0, epsilon = 1e-12);
        assert_relative_eq!(
            eac_bound(0.05, 0.1, &c),
            eac_bound(0.1, 0.05, &c),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rmse_bound_hand_values() {
        assert_relative_eq!(rmse_eac_bound(0.0, &costs(1.0, 1.0)), 0.0, epsilon = 1e-12);
        assert_relative_eq!(
            rmse_eac_bound(0.1, &costs(10.0, 1.0)),
            1.1,
            epsilon = 1e-12
        );
    }

    /// Independent grid-search oracle for the optimal interval width, with
    /// three refinement passes down to a 1e-9 grid pitch.
    fn grid_factor(n: usize) -> f64 {
        let nf = n as f64;
        let f = |eps: f64| eps.max((2.0 * (-0.5 * nf * eps * eps).exp()).min(1.0));
        let (mut lo, mut hi, mut step) = (1e-6, 1.0, 1e-5);
        let mut best = (1.0, f(1.0));
        for _ in 0..3 {
            let mut eps = lo;
            while eps < hi {
                let v = f(eps);
                if v < best.1 {
                    best = (eps, v);
                }
                eps += step;
            }
            lo = (best.0 - 2.0 * step).max(step / 1e5);
            hi = best.0 + 2.0 * step;
            step /= 100.0;
        }
        best.1
    }

    #[test]
    fn mc_bound_matches_grid_oracle() {
        // Frozen from the pre-build grid search (step 1e-5, refined):
        // factor(1000) = 0.08020387...
        assert_relative_eq!(mc_eac_factor(1000), 0.0802038733, epsilon = 1e-8);
        for n in [100, 1000, 10_000] {
            let bis = mc_eac_factor(n);
            let grid = grid_factor(n);
            assert!(
                (bis - grid).abs() < 1e-6,
                "n={n}: bisection {bis} vs grid {grid}"
            );
        }
    }

    #[test]
    fn mc_bound_vanishes_for_huge_n() {
        assert!(mc_eac_factor(100_000_000) < 1e-3);
    }

    #[test]
    fn mc_bound_trivial_cap_for_tiny_n() {
        let c = costs(10.0, 1.0);
        assert_relative_eq!(mc_eac_bound(0, &c), 11.0, epsilon = 1e-12);
        assert_relative_eq!(mc_eac_bound(1, &c), 11.0, epsilon = 1e-12);
    }

    #[test]
    fn mc_bound_factorizes_over_costs() {
        for n in [10, 100, 1000] {
            let f = mc_eac_factor(n);
            assert_relative_eq!(mc_eac_bound(n, &costs(10.0, 1.0)), 11.0 * f, epsilon = 1e-12);
            assert_relative_eq!(
                mc_eac_bound(n, &costs(100.0, 1.0)),
                101.0 * f,
                epsilon = 1e-12
            );
        }
    }

    proptest! {
        #[test]
        fn hoeffding_monotone(n in 1usize..5000, eps in 0.001f64..0.5) {
            prop_assert!(hoeffding_p_eps(n + 100, eps) <= hoeffding_p_eps(n, eps));
            prop_assert!(hoeffding_p_eps(n, eps + 0.01) <= hoeffding_p_eps(n, eps));
        }

        #[test]
        fn mc_bound_decreasing_in_n(n in 2usize..2000) {
            let c = costs(10.0, 1.0);
            // Strictly decreasing once below the cap.
            let (a, b) = (mc_eac_bound(n, &c), mc_eac_bound(2 * n, &c));
            prop_assert!(b <= a);
            if a < c.sum() {
                prop_assert!(b < a);
            }
        }

        #[test]
        fn cutoff_moves_with_costs(r_fn in 0.1f64..100.0, r_fp in 0.1f64..100.0) {
            let base = optimal_cutoff(&costs(r_fn, r_fp));
            prop_assert!(base > 0.0 && base < 1.0);
            prop_assert!(optimal_cutoff(&costs(r_fn, r_fp + 1.0)) > base);
            prop_assert!(optimal_cutoff(&costs(r_fn + 1.0, r_fp)) < base);
        }
    }
}
