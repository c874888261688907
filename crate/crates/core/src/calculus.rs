//! Closed-form oracle query counts.
//!
//! Coefficients are dimensionless: a count divided by `√N` (or by the square
//! root of the sub-database size for a sequential step). The number of blocks
//! enters as a real `k ≥ 2` because the analytic statements hold on the whole
//! interval `[2, ∞)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::HierarchySpec;
use crate::optimizer::alpha_upper_bound;
use crate::scalar::Real;

pub(crate) fn check_blocks<T: Real>(k: T, what: &str) -> Result<()> {
    if !(k >= T::lit(2.0)) {
        return Err(Error::Domain(format!("{what} needs k >= 2, got {k}")));
    }
    Ok(())
}

/// Query count in units of `√N`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct QueryCoefficient<T>(pub T);

impl<T: Real> QueryCoefficient<T> {
    pub fn value(self) -> T {
        self.0
    }

    /// Absolute query count for a database of `n_items`.
    pub fn queries(self, n_items: u64) -> T {
        self.0 * T::from_count(n_items).sqrt()
    }
}

/// Optimal local-iteration parameter `α(k) = ½·arccos((k−2)/(2(k−1)))`.
pub fn alpha_opt<T: Real>(k: T) -> Result<T> {
    check_blocks(k, "alpha_opt")?;
    let two = T::lit(2.0);
    Ok(((k - two) / (two * (k - T::one()))).acos() / two)
}

/// Optimal global-iteration parameter `η(k) = ½√k·arctan(√(3k−4)/(k−2))`.
///
/// At `k = 2` the argument diverges and the arctangent takes its limit `π/2`.
pub fn eta_opt<T: Real>(k: T) -> Result<T> {
    check_blocks(k, "eta_opt")?;
    let two = T::lit(2.0);
    let angle = (T::lit(3.0) * k - T::lit(4.0)).sqrt().atan2(k - two);
    Ok(k.sqrt() / two * angle)
}

/// `η(α)` from the large-block cancellation condition, continued through the
/// zero of the denominator (the arctangent is taken as a polar angle, so
/// `2η/√k` runs continuously past `π/2`). No range check.
pub(crate) fn eta_continuous<T: Real>(alpha: T, k: T) -> T {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let num = two * k.sqrt() * (two * alpha).sin();
    // k − 4 sin²α written as (k − 4) + 4 cos²α keeps the k = 4 zero exact.
    let cos = alpha.cos();
    let den = (k - four) + four * cos * cos;
    let angle = if num == T::zero() && den == T::zero() {
        T::FRAC_PI_2()
    } else {
        num.atan2(den)
    };
    k.sqrt() / two * angle
}

/// `η` as a function of `α` on the principal branch, for `0 ≤ α ≤ α_B(k)`.
pub fn eta_of_alpha<T: Real>(alpha: T, k: T) -> Result<T> {
    check_blocks(k, "eta_of_alpha")?;
    check_alpha_range(alpha, k)?;
    Ok(eta_continuous(alpha, k))
}

pub(crate) fn check_alpha_range<T: Real>(alpha: T, k: T) -> Result<()> {
    let upper = alpha_upper_bound(crate::optimizer::BlockCount::Finite(k))?;
    let slack = T::lit(1e-12);
    if !(alpha >= -slack && alpha <= upper + slack * upper.max(T::one())) {
        return Err(Error::Range {
            name: "alpha",
            value: alpha.as_f64(),
            lo: 0.0,
            hi: upper.as_f64(),
        });
    }
    Ok(())
}

/// Scaled iteration parameters `(α, η)` at a given block count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledParams<T> {
    pub k: T,
    pub alpha: T,
    pub eta: T,
}

impl<T: Real> ScaledParams<T> {
    /// Parameters on the cancellation curve at the given `α`.
    pub fn on_constraint(k: T, alpha: T) -> Result<Self> {
        let eta = eta_of_alpha(alpha, k)?;
        let p = Self { k, alpha, eta };
        p.validate()?;
        Ok(p)
    }

    /// The query-minimizing point.
    pub fn optimal(k: T) -> Result<Self> {
        Ok(Self {
            k,
            alpha: alpha_opt(k)?,
            eta: eta_opt(k)?,
        })
    }

    /// Checks `0 ≤ α ≤ α_B(k)` and `α ≤ η ≤ (π/4)√k`.
    pub fn validate(&self) -> Result<()> {
        check_blocks(self.k, "scaled parameters")?;
        check_alpha_range(self.alpha, self.k)?;
        let slack = T::lit(1e-12);
        let eta_max = T::FRAC_PI_4() * self.k.sqrt();
        if !(self.eta >= self.alpha - slack && self.eta <= eta_max + slack) {
            return Err(Error::Range {
                name: "eta",
                value: self.eta.as_f64(),
                lo: self.alpha.as_f64(),
                hi: eta_max.as_f64(),
            });
        }
        Ok(())
    }

    /// `π/4 + (α − η)/√k`.
    pub fn coefficient(&self) -> QueryCoefficient<T> {
        QueryCoefficient(T::FRAC_PI_4() + (self.alpha - self.eta) / self.k.sqrt())
    }
}

fn alpha_minus_eta<T: Real>(k: T) -> Result<T> {
    Ok(alpha_opt(k)? - eta_opt(k)?)
}

/// Minimized GRK query count `S(k)/√N = π/4 + (α(k) − η(k))/√k`.
pub fn s_coeff<T: Real>(k: T) -> Result<QueryCoefficient<T>> {
    Ok(QueryCoefficient(T::FRAC_PI_4() + alpha_minus_eta(k)? / k.sqrt()))
}

/// Sequential GRK step after a level with `k_prev` blocks, in units of the
/// square root of the sub-database size:
/// `π/4 − α(k_prev)/2 + (α(k) − η(k))/√k`.
pub fn sbar_coeff<T: Real>(k_prev: T, k: T) -> Result<QueryCoefficient<T>> {
    let head_start = alpha_opt(k_prev)? / T::lit(2.0);
    Ok(QueryCoefficient(
        T::FRAC_PI_4() - head_start + alpha_minus_eta(k)? / k.sqrt(),
    ))
}

/// Two-level hierarchy total `T(k1, k2)/√N`.
pub fn t_coeff<T: Real>(k1: T, k2: T) -> Result<QueryCoefficient<T>> {
    t_coeff_levels(&[k1, k2])
}

/// Hierarchy total for real block counts `[K_1, …, K_m]`:
/// `π/4 + Σ_{i<m} [π/4 + α(K_i)/2 − η(K_i)]/√(K_1⋯K_i) + [α(K_m) − η(K_m)]/√(K_1⋯K_m)`.
pub fn t_coeff_levels<T: Real>(levels: &[T]) -> Result<QueryCoefficient<T>> {
    let Some((&last, head)) = levels.split_last() else {
        return Err(Error::Domain("hierarchy needs at least one level".into()));
    };
    let mut total = T::FRAC_PI_4();
    let mut product = T::one();
    for &k in head {
        product = product * k;
        total = total + lemma_one_bracket(k)? / product.sqrt();
    }
    product = product * last;
    total = total + alpha_minus_eta(last)? / product.sqrt();
    Ok(QueryCoefficient(total))
}

/// `π/4 + α(k)/2 − η(k)`.
pub(crate) fn lemma_one_bracket<T: Real>(k: T) -> Result<T> {
    Ok(T::FRAC_PI_4() + alpha_opt(k)? / T::lit(2.0) - eta_opt(k)?)
}

pub fn t_coeff_multi<T: Real>(spec: &HierarchySpec) -> Result<QueryCoefficient<T>> {
    t_coeff_levels(&spec.levels_as::<T>())
}

/// Direct GRK over the finest partition, `S(K_1⋯K_m)/√N`.
pub fn s_direct_multi<T: Real>(spec: &HierarchySpec) -> Result<QueryCoefficient<T>> {
    s_coeff(spec.levels_as::<T>().into_iter().fold(T::one(), |p, k| p * k))
}

/// `T − S` for the hierarchy; positive whenever every level has `K_i ≥ 2`
/// and there are at least two levels.
pub fn hierarchy_gap<T: Real>(spec: &HierarchySpec) -> Result<T> {
    Ok(t_coeff_multi::<T>(spec)?.value() - s_direct_multi::<T>(spec)?.value())
}

/// Worst-case and average query counts of block-by-block full search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaiveQueries<T> {
    pub worst: T,
    pub average: T,
}

fn full_search_count<T: Real>(n_items: u64) -> T {
    T::FRAC_PI_4() * T::from_count(n_items).sqrt()
}

/// `(π/4)√N`, the large-`N` Grover full-search count.
pub fn full_queries<T: Real>(n_items: u64) -> T {
    full_search_count(n_items)
}

/// Pick blocks one at a time and run a full search inside each.
pub fn naive_queries<T: Real>(n_items: u64, k: u64) -> Result<NaiveQueries<T>> {
    if k < 2 {
        return Err(Error::Domain(format!("naive search needs K >= 2, got {k}")));
    }
    let kf = T::from_count(k);
    let full = full_search_count::<T>(n_items);
    Ok(NaiveQueries {
        worst: (kf - T::one()) / kf.sqrt() * full,
        average: kf.sqrt() / T::lit(2.0) * full,
    })
}

/// Repeated halving with a full search in one half, worst case, for `K = 2^k`.
pub fn binary_queries<T: Real>(n_items: u64, k: u64) -> Result<T> {
    if k < 2 || !k.is_power_of_two() {
        return Err(Error::Domain(format!(
            "binary search needs K to be a power of two >= 2, got {k}"
        )));
    }
    let levels = k.trailing_zeros() as i32;
    let series: T = (1..=levels)
        .map(|i| T::lit(2.0).powf(T::lit(-(i as f64) / 2.0)))
        .sum();
    Ok(full_search_count::<T>(n_items) * series)
}

/// Full search over the complement of one randomly chosen block.
pub fn complement_queries<T: Real>(n_items: u64, k: u64) -> Result<T> {
    if k < 2 {
        return Err(Error::Domain(format!("complement search needs K >= 2, got {k}")));
    }
    let kf = T::from_count(k);
    Ok(full_search_count::<T>(n_items) * ((kf - T::one()) / kf).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn alpha_values() {
        assert!(close(alpha_opt(2.0).unwrap(), FRAC_PI_4, 1e-15));
        assert!(close(alpha_opt(4.0).unwrap(), 0.5 * (1.0f64 / 3.0).acos(), 1e-15));
        assert!(close(alpha_opt(4.0).unwrap(), 0.615480, 1e-6));
        assert!(alpha_opt(1.5).is_err());
    }

    #[test]
    fn eta_values() {
        assert!(close(eta_opt(2.0).unwrap(), PI / (2.0 * SQRT_2), 1e-15));
        assert!(close(eta_opt(2.0).unwrap(), 1.110721, 1e-6));
        assert!(close(eta_opt(4.0).unwrap(), 2f64.sqrt().atan(), 1e-15));
        assert!(close(eta_opt(4.0).unwrap(), 0.955317, 1e-6));
        assert!(eta_opt(f64::NAN).is_err());
    }

    #[test]
    fn eta_of_alpha_endpoints() {
        assert_eq!(eta_of_alpha(0.0, 5.0).unwrap(), 0.0);
        for k in [3.0, 5.0, 10.0] {
            let a = alpha_opt(k).unwrap();
            assert!(close(eta_of_alpha(a, k).unwrap(), eta_opt(k).unwrap(), 1e-12));
        }
        let e = eta_of_alpha(FRAC_PI_4, 2.0).unwrap();
        assert!(close(e, PI / (2.0 * SQRT_2), 1e-7));
        assert!(eta_of_alpha(1.0, 2.0).is_err());
        assert!(eta_of_alpha(-0.1, 5.0).is_err());
    }

    #[test]
    fn s_coeff_values() {
        assert!(close(s_coeff(4.0).unwrap().value(), 0.615480, 1e-6));
        assert!(close(s_coeff(6.0).unwrap().value(), 0.646015, 1e-6));
        assert!(close(s_coeff(9.0).unwrap().value(), 0.671394, 1e-6));
        for k in 2..200 {
            assert!(s_coeff(k as f64).unwrap().value() < FRAC_PI_4);
        }
    }

    #[test]
    fn single_level_hierarchy_is_s_coeff() {
        let expect = FRAC_PI_4 + (FRAC_PI_4 - PI / (2.0 * SQRT_2)) / SQRT_2;
        let spec = HierarchySpec::new(vec![2]).unwrap();
        let t = t_coeff_multi::<f64>(&spec).unwrap().value();
        assert!(close(t, expect, 1e-15));
        assert!(close(t, 0.555360, 1e-6));
        assert!(close(t, s_coeff(2.0).unwrap().value(), 1e-15));
    }

    #[test]
    fn sequential_step_coefficient() {
        let sbar = sbar_coeff(2.0, 2.0).unwrap().value();
        let expect = FRAC_PI_4 - PI / 8.0 + (FRAC_PI_4 - PI / (2.0 * SQRT_2)) / SQRT_2;
        assert!(close(sbar, expect, 1e-15));
        assert!(close(sbar, 0.162661, 1e-6));
        // S(K) + S̄(K, K̃)·√(N/K) = T(K, K̃)
        let t = s_coeff(2.0).unwrap().value() + sbar / SQRT_2;
        assert!(close(t, 0.670379, 1e-6));
        let t32 = s_coeff(3.0).unwrap().value() + sbar_coeff(3.0, 2.0).unwrap().value() / 3f64.sqrt();
        assert!(close(t32, 0.721158, 1e-6));
        // k_prev → ∞ removes π/12 from the head start
        let far = sbar_coeff(1e12, 5.0).unwrap().value();
        let lim = FRAC_PI_4 - PI / 12.0 + (alpha_opt(5.0).unwrap() - eta_opt(5.0).unwrap()) / 5f64.sqrt();
        assert!(close(far, lim, 1e-6));
    }

    #[test]
    fn two_level_totals() {
        assert!(close(t_coeff(2.0, 2.0).unwrap().value(), 0.670379, 1e-6));
        assert!(close(t_coeff(2.0, 4.0).unwrap().value(), 0.712890, 1e-6));
        let spec = HierarchySpec::new(vec![2, 2]).unwrap();
        assert!(close(hierarchy_gap::<f64>(&spec).unwrap(), 0.054899, 1e-6));
        let spec = HierarchySpec::new(vec![4, 2]).unwrap();
        assert!(close(hierarchy_gap::<f64>(&spec).unwrap(), 0.074769, 1e-6));
        let spec = HierarchySpec::new(vec![2, 2, 2]).unwrap();
        assert!(hierarchy_gap::<f64>(&spec).unwrap() > 0.0);
        assert!(t_coeff_levels::<f64>(&[]).is_err());
    }

    #[test]
    fn scaled_params_invariants() {
        for k in [2.0, 3.0, 4.0, 7.0, 50.0] {
            let p = ScaledParams::optimal(k).unwrap();
            p.validate().unwrap();
            assert!(close(p.coefficient().value(), s_coeff(k).unwrap().value(), 1e-15));
        }
        let p = ScaledParams::on_constraint(6.0, 0.3).unwrap();
        assert!(p.eta > p.alpha);
        assert!(ScaledParams::on_constraint(6.0, 1.3).is_err());
    }

    #[test]
    fn naive_search_only_wins_at_two_blocks() {
        let n = 1 << 20;
        let full = full_queries::<f64>(n);
        assert!(close(naive_queries::<f64>(n, 2).unwrap().worst, full / SQRT_2, 1e-9));
        assert!(naive_queries::<f64>(n, 2).unwrap().worst < full);
        let w3 = naive_queries::<f64>(n, 3).unwrap().worst;
        assert!(close(w3, 2.0 / 3f64.sqrt() * full, 1e-9));
        assert!(w3 > full);
        assert!(close(naive_queries::<f64>(n, 4).unwrap().average, full, 1e-9));
        assert!(naive_queries::<f64>(n, 1).is_err());
    }

    #[test]
    fn binary_search_counts() {
        let n = 1 << 16;
        let full = full_queries::<f64>(n);
        assert!(close(binary_queries::<f64>(n, 2).unwrap(), full / SQRT_2, 1e-9));
        let b4 = binary_queries::<f64>(n, 4).unwrap();
        assert!(close(b4, full * (1.0 / SQRT_2 + 0.5), 1e-9));
        assert!(b4 > full);
        // 20 terms of the series fall short of the limit by 2^-10 relative.
        let lim = binary_queries::<f64>(n, 1 << 20).unwrap() / full;
        assert!(close(lim, (1.0 - 2f64.powi(-10)) / (SQRT_2 - 1.0), 1e-12));
        assert!(close(lim, 1.0 / (SQRT_2 - 1.0), 3e-3));
        assert!(binary_queries::<f64>(n, 6).is_err());
    }

    #[test]
    fn complement_search_counts() {
        let n = 1 << 12;
        let full = full_queries::<f64>(n);
        assert!(close(complement_queries::<f64>(n, 2).unwrap(), FRAC_PI_4 * (n as f64 / 2.0).sqrt(), 1e-9));
        assert!(close(complement_queries::<f64>(n, 5).unwrap(), full * 0.8f64.sqrt(), 1e-9));
        for k in 2..=64 {
            assert!(complement_queries::<f64>(n, k).unwrap() < full);
        }
    }
}
