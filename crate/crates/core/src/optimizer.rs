//! The minimization behind the GRK optimum: parameter ranges, the objective
//! `f(α) = α − η(α)` and its derivatives, the two monotonicity lemmas used to
//! compare hierarchies with direct search, and large-`K` expansions.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calculus::{alpha_opt, check_alpha_range, check_blocks, eta_continuous, eta_opt};
use crate::error::{Error, Result};
use crate::roots::{bisect, sign_change_brackets};
use crate::scalar::Real;

/// Number of blocks, possibly the `K → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BlockCount<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> fmt::Display for BlockCount<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockCount::Finite(k) => write!(f, "{k}"),
            BlockCount::Infinite => f.write_str("inf"),
        }
    }
}

const ROOT_TOL: f64 = 1e-12;

/// Largest admissible `α` at `k` blocks.
///
/// For `k ≤ 4` this is the pole of `η(α)` at `sin²α = k/4`. For `k > 4` it is
/// the root of `α = η(α)`, which lies between the `k → ∞` bound and `π/2`.
/// The limit itself is the root of `α = sin 2α`.
pub fn alpha_upper_bound<T: Real>(k: BlockCount<T>) -> Result<T> {
    let half_pi = T::FRAC_PI_2();
    let tol = T::lit(ROOT_TOL);
    match k {
        BlockCount::Infinite => bisect(
            |a: T| a - (T::lit(2.0) * a).sin(),
            T::FRAC_PI_4(),
            half_pi,
            tol,
            "alpha - sin(2 alpha)",
        ),
        BlockCount::Finite(k) => {
            check_blocks(k, "alpha_upper_bound")?;
            if k <= T::lit(4.0) {
                return Ok((k.sqrt() / T::lit(2.0)).asin());
            }
            let lo = alpha_upper_bound::<T>(BlockCount::Infinite)?;
            bisect(|a| a - eta_continuous(a, k), lo, half_pi, tol, "alpha - eta(alpha)")
        }
    }
}

/// `f(α) = α − η(α)`, the `α`-dependent part of the query count.
pub fn f<T: Real>(alpha: T, k: T) -> Result<T> {
    check_blocks(k, "f")?;
    check_alpha_range(alpha, k)?;
    Ok(alpha - eta_continuous(alpha, k))
}

fn numerator<T: Real>(s: T, k: T) -> T {
    let sixteen = T::lit(16.0);
    sixteen * (k - T::one()) * s * s - T::lit(4.0) * k * k * s + k * k
}

fn denominator<T: Real>(s: T, k: T) -> T {
    let sixteen = T::lit(16.0);
    sixteen * (k - T::one()) * s * s - T::lit(8.0) * k * s - k * k
}

/// `f′(α) = [16(K−1)sin⁴α − 4K²sin²α + K²] / [16(K−1)sin⁴α − 8K sin²α − K²]`.
pub fn f_prime<T: Real>(alpha: T, k: T) -> Result<T> {
    check_blocks(k, "f_prime")?;
    check_alpha_range(alpha, k)?;
    let s = alpha.sin().powi(2);
    Ok(numerator(s, k) / denominator(s, k))
}

/// Denominator of `f″`, the square of the denominator of `f′`.
pub fn f_double_prime_denominator<T: Real>(alpha: T, k: T) -> Result<T> {
    check_blocks(k, "f_double_prime_denominator")?;
    check_alpha_range(alpha, k)?;
    Ok(denominator(alpha.sin().powi(2), k).powi(2))
}

/// `f″(α)`, from differentiating `f′` through `s = sin²α`.
pub fn f_double_prime<T: Real>(alpha: T, k: T) -> Result<T> {
    check_blocks(k, "f_double_prime")?;
    check_alpha_range(alpha, k)?;
    let s = alpha.sin().powi(2);
    let ds = (T::lit(2.0) * alpha).sin();
    let thirty_two = T::lit(32.0);
    let dn = thirty_two * (k - T::one()) * s - T::lit(4.0) * k * k;
    let dd = thirty_two * (k - T::one()) * s - T::lit(8.0) * k;
    let (n, d) = (numerator(s, k), denominator(s, k));
    Ok((dn * d - n * dd) * ds / (d * d))
}

/// Central-difference estimate of `f‴(α)`, Richardson-extrapolated. Uses the
/// continuous extension of `η`, so it is defined on both sides of `α_B(2)`.
fn third_derivative<T: Real>(alpha: T, k: T, h: T) -> T {
    let g = |a: T| a - eta_continuous(a, k);
    let d = |h: T| {
        let two = T::lit(2.0);
        (g(alpha + two * h) - two * g(alpha + h) + two * g(alpha - h) - g(alpha - two * h))
            / (two * h * h * h)
    };
    let half = d(h / T::lit(2.0));
    (T::lit(4.0) * half - d(h)) / T::lit(3.0)
}

/// Central-difference `f′` with step `h`, for validating the closed form.
pub fn f_prime_numeric<T: Real>(alpha: T, k: T, h: T) -> T {
    let g = |a: T| a - eta_continuous(a, k);
    (g(alpha + h) - g(alpha - h)) / (T::lit(2.0) * h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizationReport<T> {
    pub k: T,
    pub alpha_star: T,
    /// `f(α*) = α* − η*`.
    pub f_value: T,
    pub f_prime_at_star: T,
    pub f_double_prime_at_star: T,
    /// `(f(0), f(α_B))`.
    pub boundary_values: (T, T),
    /// Interior zeros of `f′` found by a sign-change scan of its numerator.
    pub critical_points: Vec<T>,
    /// `f‴(α*)/3!`, only at `k = 2` where the first two derivatives vanish.
    pub cubic_coefficient: Option<T>,
    pub is_local_min: bool,
    pub is_global_min: bool,
}

const CRITICAL_SCAN_CELLS: usize = 2000;

/// Checks that `α(k)` minimizes `f` on `[0, α_B(k)]`.
///
/// For `k > 2` the optimum is a strict local minimum. At `k = 2` it sits on
/// the range boundary with `f′ = f″ = 0`, and the cubic term of the Taylor
/// expansion is reported instead.
pub fn verify_local_min<T: Real>(k: T) -> Result<MinimizationReport<T>> {
    check_blocks(k, "verify_local_min")?;
    let alpha_star = alpha_opt(k)?;
    let upper = alpha_upper_bound(BlockCount::Finite(k))?;
    // α(2) = α_B(2) = π/4 up to rounding; keep it inside the checked range.
    let alpha_star = alpha_star.min(upper);
    let f_value = f(alpha_star, k)?;
    let f1 = f_prime(alpha_star, k)?;
    let f2 = f_double_prime(alpha_star, k)?;
    let boundary_values = (f(T::zero(), k)?, f(upper, k)?);

    let numer = |a: T| numerator(a.sin().powi(2), k);
    let mut critical_points = Vec::new();
    for (lo, hi) in sign_change_brackets(numer, T::zero(), upper, CRITICAL_SCAN_CELLS) {
        critical_points.push(bisect(numer, lo, hi, T::lit(ROOT_TOL), "f' numerator")?);
    }

    let at_two = k == T::lit(2.0);
    let cubic_coefficient = at_two.then(|| third_derivative(alpha_star, k, T::lit(1e-2)) / T::lit(6.0));
    let is_local_min = !at_two && f1.abs() <= T::lit(1e-9) && f2 > T::zero();
    let slack = T::lit(1e-12);
    let is_global_min = f_value <= boundary_values.0 + slack && f_value <= boundary_values.1 + slack;
    Ok(MinimizationReport {
        k,
        alpha_star,
        f_value,
        f_prime_at_star: f1,
        f_double_prime_at_star: f2,
        boundary_values,
        critical_points,
        cubic_coefficient,
        is_local_min,
        is_global_min,
    })
}

fn check_lemma_arg<T: Real>(x: T, what: &str) -> Result<()> {
    check_blocks(x, what)
}

/// `π/4 + α(x)/2 − η(x)`; positive on `[2, ∞)` and increasing.
pub fn lemma1_margin<T: Real>(x: T) -> Result<T> {
    check_lemma_arg(x, "lemma1_margin")?;
    Ok(T::FRAC_PI_4() + alpha_opt(x)? / T::lit(2.0) - eta_opt(x)?)
}

fn root_and_angle<T: Real>(x: T) -> (T, T) {
    let r = (T::lit(3.0) * x - T::lit(4.0)).sqrt();
    (r, r.atan2(x - T::lit(2.0)))
}

/// `3/√(3x−4) − arctan(√(3x−4)/(x−2))`. The derivative of
/// [`lemma1_margin`] is this factor over `4√x`; it is positive and tends to 0.
pub fn lemma1_derivative_factor<T: Real>(x: T) -> Result<T> {
    check_lemma_arg(x, "lemma1_derivative_factor")?;
    let (r, angle) = root_and_angle(x);
    Ok(T::lit(3.0) / r - angle)
}

/// `√(3x−4)/(x−1) − arctan(√(3x−4)/(x−2))`. The derivative of `α(x) − η(x)`
/// is this factor over `4√x`; it is negative and tends to 0.
pub fn lemma2_slope<T: Real>(x: T) -> Result<T> {
    check_lemma_arg(x, "lemma2_slope")?;
    let (r, angle) = root_and_angle(x);
    Ok(r / (x - T::one()) - angle)
}

/// `π/6 + 1/(2√3 x) + 5√3/(6x)²`. Accurate to `O(x⁻³)`; use for `x ≥ 10`.
pub fn asymptotic_alpha<T: Real>(x: T) -> Result<T> {
    check_lemma_arg(x, "asymptotic_alpha")?;
    let s3 = T::lit(3.0).sqrt();
    let six_x = T::lit(6.0) * x;
    Ok(T::PI() / T::lit(6.0) + T::one() / (T::lit(2.0) * s3 * x) + T::lit(5.0) * s3 / (six_x * six_x))
}

/// `√3/2 + 1/(2√3 x) + 11√3/(90x²)`. Accurate to `O(x⁻³)`; use for `x ≥ 10`.
pub fn asymptotic_eta<T: Real>(x: T) -> Result<T> {
    check_lemma_arg(x, "asymptotic_eta")?;
    let s3 = T::lit(3.0).sqrt();
    Ok(s3 / T::lit(2.0) + T::one() / (T::lit(2.0) * s3 * x) + T::lit(11.0) * s3 / (T::lit(90.0) * x * x))
}

/// Which block count dominates the large-`K` expansion of the hierarchy gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AsymptoticRegime {
    /// `K/K̃ → 0` (or finite): gap `≈ (π/3 − √3/2)/√K`.
    SmallRatio,
    /// `K/K̃ → ∞`: gap `≈ K^{−1/2}·K̃^{−5/2}/(20√3)`.
    LargeRatio,
}

impl FromStr for AsymptoticRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small-ratio" => Ok(Self::SmallRatio),
            "large-ratio" => Ok(Self::LargeRatio),
            other => Err(Error::Domain(format!(
                "unknown regime {other:?} (expected small-ratio or large-ratio)"
            ))),
        }
    }
}

/// Leading coefficient of the gap `T(k, k2) − S(k·k2)` in the given regime,
/// in units of `√N`.
pub fn asymptotic_gap<T: Real>(k: T, k2: T, regime: AsymptoticRegime) -> Result<T> {
    check_blocks(k, "asymptotic_gap")?;
    check_blocks(k2, "asymptotic_gap")?;
    let s3 = T::lit(3.0).sqrt();
    Ok(match regime {
        AsymptoticRegime::SmallRatio => (T::PI() / T::lit(3.0) - s3 / T::lit(2.0)) / k.sqrt(),
        AsymptoticRegime::LargeRatio => {
            T::one() / (T::lit(20.0) * s3) / k.sqrt() / k2.powf(T::lit(2.5))
        }
    })
}

/// The asymptotic gap as an absolute query count under both possible
/// scalings: multiplied by `√N` (consistent with the exact gap) and divided
/// by `√N` (as the expansion is sometimes written).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReadings<T> {
    pub coefficient: T,
    pub times_sqrt_n: T,
    pub over_sqrt_n: T,
}

pub fn asymptotic_gap_readings<T: Real>(
    k: T,
    k2: T,
    regime: AsymptoticRegime,
    n_items: u64,
) -> Result<GapReadings<T>> {
    let coefficient = asymptotic_gap(k, k2, regime)?;
    let root_n = T::from_count(n_items).sqrt();
    Ok(GapReadings {
        coefficient,
        times_sqrt_n: coefficient * root_n,
        over_sqrt_n: coefficient / root_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn fin(k: f64) -> BlockCount<f64> {
        BlockCount::Finite(k)
    }

    #[test]
    fn upper_bounds() {
        assert!((alpha_upper_bound(fin(2.0)).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((alpha_upper_bound(fin(3.0)).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((alpha_upper_bound(fin(4.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((alpha_upper_bound(fin(5.0)).unwrap() - 1.226827).abs() < 1e-5);
        assert!((alpha_upper_bound(fin(6.0)).unwrap() - 1.151001).abs() < 1e-5);
        assert!((alpha_upper_bound(fin(100.0)).unwrap() - 0.956221).abs() < 1e-5);
        let inf = alpha_upper_bound::<f64>(BlockCount::Infinite).unwrap();
        assert!((inf - 0.947747).abs() < 1e-6);
        assert!((inf - (2.0 * inf).sin()).abs() < 1e-12);
        assert!(alpha_upper_bound(fin(1.0)).is_err());
    }

    #[test]
    fn bounds_decrease_toward_limit() {
        let inf = alpha_upper_bound::<f64>(BlockCount::Infinite).unwrap();
        let mut prev = FRAC_PI_2;
        for k in [5.0, 8.0, 20.0, 100.0, 1e4] {
            let b = alpha_upper_bound(fin(k)).unwrap();
            assert!(b < prev && b > inf, "k = {k}");
            prev = b;
        }
    }

    #[test]
    fn objective_values() {
        assert_eq!(f(0.0, 7.0).unwrap(), 0.0);
        let a3 = alpha_opt(3.0f64).unwrap();
        assert!((f(a3, 3.0).unwrap() + 0.337098).abs() < 1e-6);
        assert!((f(alpha_opt(4.0f64).unwrap(), 4.0).unwrap() + 0.339837).abs() < 1e-6);
        assert!((f(PI / 3.0, 3.0).unwrap() + 0.313152).abs() < 1e-6);
        assert!((f(FRAC_PI_4, 2.0).unwrap() - FRAC_PI_4 * (1.0 - SQRT_2)).abs() < 1e-12);
        assert!(f(1.0, 2.0).is_err());
    }

    #[test]
    fn derivative_at_optimum() {
        let a = alpha_opt(4.0f64).unwrap();
        assert!(f_prime(a, 4.0).unwrap().abs() < 1e-12);
        let d = f_double_prime_denominator(a, 4.0).unwrap();
        assert!((d - 4096.0 / 9.0).abs() < 1e-9);
        for k in [3.0f64, 7.5, 100.0] {
            let a = alpha_opt(k).unwrap();
            let d = f_double_prime_denominator(a, k).unwrap();
            assert!((d / (k.powi(6) / (k - 1.0).powi(2)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        for k in [3.0, 5.0, 17.0, 50.0] {
            let upper = alpha_upper_bound(fin(k)).unwrap();
            for i in 1..20 {
                let a = upper * i as f64 / 20.0;
                let fd = f_prime_numeric(a, k, 1e-6);
                assert!((f_prime(a, k).unwrap() - fd).abs() < 1e-5, "k={k} a={a}");
                let h = 1e-5;
                let fd2 = (f_prime(a + h, k).unwrap() - f_prime(a - h, k).unwrap()) / (2.0 * h);
                assert!((f_double_prime(a, k).unwrap() - fd2).abs() < 1e-4, "k={k} a={a}");
            }
        }
    }

    #[test]
    fn minimum_for_three_or_more_blocks() {
        for k in 3..=100 {
            let r = verify_local_min(k as f64).unwrap();
            assert!(r.is_local_min, "k = {k}: {r:?}");
            assert!(r.is_global_min, "k = {k}");
            assert!(r.f_value < r.boundary_values.0);
            assert_eq!(r.critical_points.len(), 1, "k = {k}");
            assert!((r.critical_points[0] - r.alpha_star).abs() < 1e-9);
        }
    }

    #[test]
    fn two_blocks_is_a_saddle() {
        let r = verify_local_min(2.0f64).unwrap();
        assert!(!r.is_local_min);
        assert!(r.f_prime_at_star.abs() < 1e-12);
        assert!(r.f_double_prime_at_star.abs() < 1e-12);
        assert!((r.cubic_coefficient.unwrap() + 4.0 / 6.0).abs() < 1e-4);
        assert!(r.is_global_min);
    }

    #[test]
    fn lemma_one() {
        let m2 = lemma1_margin(2.0).unwrap();
        assert!((m2 - (3.0 - 2.0 * SQRT_2) * PI / 8.0).abs() < 1e-14);
        assert!((lemma1_derivative_factor(2.0).unwrap() - (3.0 / SQRT_2 - FRAC_PI_2)).abs() < 1e-14);
        let mut prev = 0.0;
        for i in 0..=400 {
            let x = 2.0 * 5000f64.powf(i as f64 / 400.0);
            let m = lemma1_margin(x).unwrap();
            assert!(m > prev, "x = {x}");
            assert!(lemma1_derivative_factor(x).unwrap() > 0.0);
            prev = m;
        }
        let far = lemma1_derivative_factor(1e6).unwrap();
        assert!(far > 0.0 && far < 1e-8);
        assert!(lemma1_margin(1.9).is_err());
    }

    #[test]
    fn lemma_two() {
        assert!((lemma2_slope(2.0).unwrap() - (SQRT_2 - FRAC_PI_2)).abs() < 1e-14);
        let diff = |x: f64| alpha_opt(x).unwrap() - eta_opt(x).unwrap();
        let mut prev = diff(2.0);
        for i in 1..=400 {
            let x = 2.0 * 5000f64.powf(i as f64 / 400.0);
            let d = diff(x);
            assert!(d < prev, "x = {x}");
            assert!(lemma2_slope(x).unwrap() < 0.0);
            prev = d;
        }
        let far = lemma2_slope(1e6).unwrap();
        assert!(far < 0.0 && far > -1e-8);
    }

    #[test]
    fn expansions() {
        assert!((alpha_opt(100.0f64).unwrap() - asymptotic_alpha(100.0).unwrap()).abs() <= 1e-5);
        assert!((eta_opt(1000.0f64).unwrap() - asymptotic_eta(1000.0).unwrap()).abs() <= 1e-7);
        let c = asymptotic_gap(1.0e6f64, 2.0, AsymptoticRegime::SmallRatio).unwrap() * 1e3;
        assert!((c - 0.181172).abs() < 1e-6);
        assert!(asymptotic_gap(4.0, 4.0, AsymptoticRegime::LargeRatio).unwrap() > 0.0);
        assert!("sideways".parse::<AsymptoticRegime>().is_err());
        let r = asymptotic_gap_readings(4.0, 2.0, AsymptoticRegime::SmallRatio, 1 << 20).unwrap();
        assert!((r.times_sqrt_n / r.over_sqrt_n - (1u64 << 20) as f64).abs() < 1e-6);
    }
}
