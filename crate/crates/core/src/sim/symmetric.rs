use serde::Serialize;

use super::{DatabaseGeometry, Op, RotationAngles};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense 3×3 real matrix acting on symmetric-basis coefficient vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Mat3([[o, z, z], [z, o, z], [z, z, o]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Mat3(out)
    }

    pub fn apply(&self, v: [T; 3]) -> [T; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = Self::identity();
        let mut base = *self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `2·u·uᵀ − I`, i.e. minus the reflection `I − 2|u⟩⟨u|`.
    fn minus_reflection(u: [T; 3]) -> Self {
        let two = T::lit(2.0);
        let mut m = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = two * u[i] * u[j];
            }
            m[i][i] = m[i][i] - T::one();
        }
        Mat3(m)
    }

    /// Oracle `I_t`: flips the sign of the target coefficient.
    fn oracle() -> Self {
        let mut m = Self::identity();
        m.0[0][0] = -T::one();
        m
    }

    /// Matrix of `op` in the orthonormal symmetric basis of `geometry`.
    pub fn for_op(geometry: &DatabaseGeometry, op: Op) -> Self {
        let s1 = uniform_coefficients::<T>(geometry);
        match op {
            // −I_s1·I_t
            Op::Global => Self::minus_reflection(s1).mul(&Self::oracle()),
            // −I_t·I_s1
            Op::GlobalInverse => Self::oracle().mul(&Self::minus_reflection(s1)),
            Op::ReflectUniform => {
                let mut m = Self::minus_reflection(s1);
                for row in m.0.iter_mut() {
                    for x in row.iter_mut() {
                        *x = -*x;
                    }
                }
                m
            }
            Op::Local | Op::LocalInverse => {
                // Inside the target block: −I_s2·I_t with |s2⟩ = (1/√b, √((b−1)/b)).
                // Other blocks hold a multiple of their own |s2⟩, which −I_s2 fixes.
                let b = T::from_count(geometry.block_size());
                let s2 = [
                    (T::one() / b).sqrt(),
                    (T::from_count(geometry.rest_count()) / b).sqrt(),
                    T::zero(),
                ];
                let mut m = if op == Op::Local {
                    Self::minus_reflection(s2).mul(&Self::oracle())
                } else {
                    Self::oracle().mul(&Self::minus_reflection(s2))
                };
                m.0[2] = [T::zero(), T::zero(), T::one()];
                m
            }
        }
    }
}

/// Coefficients of `|s1⟩` in the symmetric basis:
/// `(√(1/N), √((b−1)/N), √((K−1)b/N))`.
fn uniform_coefficients<T: Real>(geometry: &DatabaseGeometry) -> [T; 3] {
    let n = T::from_count(geometry.n_items());
    [
        (T::one() / n).sqrt(),
        (T::from_count(geometry.rest_count()) / n).sqrt(),
        (T::from_count(geometry.outside_count()) / n).sqrt(),
    ]
}

/// Exact database state inside the symmetric subspace, stored as per-item
/// amplitudes of the three classes.
///
/// When a class is empty (`b = 1` or `K = 1`) its amplitude carries no weight;
/// operators set it to zero and comparisons ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricState<T> {
    pub geometry: DatabaseGeometry,
    /// Amplitude of the target item.
    pub amp_target: T,
    /// Amplitude of each of the `b − 1` other items in the target block.
    pub amp_target_rest: T,
    /// Amplitude of each of the `(K − 1)·b` items in non-target blocks.
    pub amp_outside: T,
}

impl<T: Real> SymmetricState<T> {
    pub fn new(geometry: DatabaseGeometry, amp_target: T, amp_target_rest: T, amp_outside: T) -> Self {
        Self {
            geometry,
            amp_target,
            amp_target_rest,
            amp_outside,
        }
    }

    /// Uniform superposition `|s1⟩`: every item has amplitude `1/√N`.
    pub fn uniform(geometry: DatabaseGeometry) -> Self {
        let a = T::one() / T::from_count(geometry.n_items()).sqrt();
        Self::new(geometry, a, a, a)
    }

    fn class_weights(&self) -> [T; 3] {
        [
            T::one(),
            T::from_count(self.geometry.rest_count()).sqrt(),
            T::from_count(self.geometry.outside_count()).sqrt(),
        ]
    }

    /// Coefficients in the orthonormal symmetric basis.
    pub fn coefficients(&self) -> [T; 3] {
        let w = self.class_weights();
        [
            self.amp_target * w[0],
            self.amp_target_rest * w[1],
            self.amp_outside * w[2],
        ]
    }

    pub fn from_coefficients(geometry: DatabaseGeometry, c: [T; 3]) -> Self {
        let per_item = |coef: T, count: u64| {
            if count == 0 {
                T::zero()
            } else {
                coef / T::from_count(count).sqrt()
            }
        };
        Self::new(
            geometry,
            c[0],
            per_item(c[1], geometry.rest_count()),
            per_item(c[2], geometry.outside_count()),
        )
    }

    pub fn norm_squared(&self) -> T {
        self.coefficients().iter().map(|&c| c * c).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let deviation = (self.norm_squared().sqrt() - T::one()).abs().as_f64();
        if deviation.is_nan() || deviation > T::STATE_TOL {
            return Err(Error::InvalidState { deviation });
        }
        Ok(())
    }

    /// Probability of measuring an item of the target block.
    pub fn target_block_probability(&self) -> T {
        let c = self.coefficients();
        c[0] * c[0] + c[1] * c[1]
    }

    /// Probability of measuring an item outside the target block.
    pub fn leaked_probability(&self) -> T {
        let c = self.coefficients()[2];
        c * c
    }

    /// Applies one elementary operator.
    pub fn apply(&self, op: Op) -> Self {
        self.apply_matrix(&Mat3::for_op(&self.geometry, op))
    }

    pub fn apply_matrix(&self, m: &Mat3<T>) -> Self {
        Self::from_coefficients(self.geometry, m.apply(self.coefficients()))
    }

    /// Applies `op` `times` times; rejects unnormalized input.
    pub fn apply_power(&self, op: Op, times: u64) -> Result<Self> {
        self.check_normalized()?;
        if times == 0 {
            return Ok(*self);
        }
        Ok(self.apply_matrix(&Mat3::for_op(&self.geometry, op).pow(times)))
    }

    /// `G1^times`.
    pub fn apply_global(&self, times: u64) -> Result<Self> {
        self.apply_power(Op::Global, times)
    }

    /// `G2^times`. Leaves `amp_outside` untouched.
    pub fn apply_local(&self, times: u64) -> Result<Self> {
        let mut out = self.apply_power(Op::Local, times)?;
        out.amp_outside = self.amp_outside;
        Ok(out)
    }

    /// Applies a word of operators left to right (first element acts first).
    pub fn apply_word(&self, word: &[Op]) -> Result<Self> {
        self.check_normalized()?;
        let g = &self.geometry;
        let m = word
            .iter()
            .fold(Mat3::identity(), |acc, &op| Mat3::for_op(g, op).mul(&acc));
        let mut out = self.apply_matrix(&m);
        if word.iter().all(|&op| matches!(op, Op::Local | Op::LocalInverse)) {
            out.amp_outside = self.amp_outside;
        }
        Ok(out)
    }

    /// `G2^j` for real `j`: rotates the target-block sector by `2·j·θ2`,
    /// leaving the outside amplitude intact.
    pub fn rotate_local(&self, j: T) -> Self {
        let theta2 = RotationAngles::<T>::new(&self.geometry).theta2;
        let angle = T::lit(2.0) * j * theta2;
        let c = self.coefficients();
        // In the (rest, target) plane G2 is a rotation toward the target.
        let (sin, cos) = angle.sin_cos();
        let rest = c[1] * cos - c[0] * sin;
        let target = c[1] * sin + c[0] * cos;
        let mut out = Self::from_coefficients(self.geometry, [target, rest, c[2]]);
        out.amp_outside = self.amp_outside;
        out
    }

    /// Largest per-item amplitude difference over the non-empty classes.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = (self.amp_target - other.amp_target).abs();
        if self.geometry.rest_count() > 0 {
            d = d.max((self.amp_target_rest - other.amp_target_rest).abs());
        }
        if self.geometry.outside_count() > 0 {
            d = d.max((self.amp_outside - other.amp_outside).abs());
        }
        d
    }

    /// Euclidean distance between the two `N`-dimensional states.
    pub fn distance(&self, other: &Self) -> T {
        let (a, b) = (self.coefficients(), other.coefficients());
        (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum::<T>().sqrt()
    }

    /// Probability mass outside the target block is dropped and the remaining
    /// target-block state renormalized. Returns the new state and the dropped
    /// probability.
    pub fn truncate_to_target_block(&self) -> (Self, T) {
        let dropped = self.leaked_probability();
        let keep = self.target_block_probability().sqrt();
        let mut out = *self;
        out.amp_target = self.amp_target / keep;
        out.amp_target_rest = self.amp_target_rest / keep;
        out.amp_outside = T::zero();
        (out, dropped)
    }

    pub fn cast<U: Real>(&self) -> SymmetricState<U> {
        SymmetricState::new(
            self.geometry,
            U::lit(self.amp_target.as_f64()),
            U::lit(self.amp_target_rest.as_f64()),
            U::lit(self.amp_outside.as_f64()),
        )
    }
}

/// State after `j1` global iterations from `|s1⟩`, for real `j1 ≥ 0`:
/// the target carries `sin((2j1+1)θ1)`, every other item
/// `cos((2j1+1)θ1)/√(N−1)`.
pub fn global_closed_form<T: Real>(geometry: DatabaseGeometry, j1: T) -> SymmetricState<T> {
    let theta1 = RotationAngles::<T>::new(&geometry).theta1;
    let phase = (T::lit(2.0) * j1 + T::one()) * theta1;
    let others = geometry.n_items() - 1;
    let rest = if others == 0 {
        T::zero()
    } else {
        phase.cos() / T::from_count(others).sqrt()
    };
    let mut s = SymmetricState::new(geometry, phase.sin(), rest, rest);
    if geometry.rest_count() == 0 {
        s.amp_target_rest = T::zero();
    }
    if geometry.outside_count() == 0 {
        s.amp_outside = T::zero();
    }
    s
}

/// Exact Grover full-search iteration count and the success probability at
/// the nearest integer count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullSearch<T> {
    /// `π/(4θ1) − 1/2`.
    pub j_full: T,
    pub nearest_integer: u64,
    pub success_probability: T,
}

pub fn grover_full_search<T: Real>(n_items: u64) -> Result<FullSearch<T>> {
    if n_items < 2 {
        return Err(Error::InvalidGeometry(format!(
            "full search needs N >= 2, got N = {n_items}"
        )));
    }
    let g = DatabaseGeometry::unpartitioned(n_items)?;
    let theta1 = RotationAngles::<T>::new(&g).theta1;
    let j_full = T::FRAC_PI_4() / theta1 - T::lit(0.5);
    let nearest = j_full.round().to_u64().unwrap_or(0);
    let amp = ((T::lit(2.0) * T::from_count(nearest) + T::one()) * theta1).sin();
    Ok(FullSearch {
        j_full,
        nearest_integer: nearest,
        success_probability: amp * amp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn geo(n: u64, k: u64) -> DatabaseGeometry {
        DatabaseGeometry::new(n, k).unwrap()
    }

    #[test]
    fn uniform_state_amplitudes() {
        let s = SymmetricState::<f64>::uniform(geo(4, 2));
        assert_eq!((s.amp_target, s.amp_target_rest, s.amp_outside), (0.5, 0.5, 0.5));
        let s = SymmetricState::<f64>::uniform(geo(100, 4));
        assert!((s.amp_target - 0.1).abs() < 1e-16);
        assert!((s.amp_outside - 0.1).abs() < 1e-16);
        let s = SymmetricState::<f64>::uniform(geo(1_000_000, 10));
        assert!((s.amp_target_rest - 1e-3).abs() < 1e-16);
        s.check_normalized().unwrap();
    }

    #[test]
    fn one_grover_step_on_four_items() {
        let s = SymmetricState::<f64>::uniform(geo(4, 4)).apply_global(1).unwrap();
        assert!((s.amp_target - 1.0).abs() < 1e-15);
        assert!(s.amp_outside.abs() < 1e-15);
    }

    #[test]
    fn zero_power_is_identity() {
        let s = SymmetricState::<f64>::uniform(geo(64, 4)).apply_global(3).unwrap();
        assert_eq!(s.apply_global(0).unwrap(), s);
        assert_eq!(s.apply_local(0).unwrap(), s);
    }

    #[test]
    fn global_power_matches_closed_form() {
        let g = geo(16, 4);
        let a = SymmetricState::<f64>::uniform(g).apply_global(3).unwrap();
        assert!(a.max_abs_diff(&global_closed_form(g, 3.0)) < 1e-12);
        let g = geo(256, 8);
        for j in 1..=5u64 {
            let a = SymmetricState::<f64>::uniform(g).apply_global(j).unwrap();
            assert!(a.max_abs_diff(&global_closed_form(g, j as f64)) < 1e-12);
        }
    }

    #[test]
    fn closed_form_endpoints() {
        let g = geo(4, 2);
        let s0 = global_closed_form::<f64>(g, 0.0);
        assert!(s0.max_abs_diff(&SymmetricState::uniform(g)) < 1e-15);
        let s1 = global_closed_form::<f64>(g, 1.0);
        assert!((s1.amp_target - 1.0).abs() < 1e-15);
    }

    #[test]
    fn local_leaves_outside_intact() {
        let g = geo(120, 6);
        let s = SymmetricState::<f64>::uniform(g).apply_global(2).unwrap();
        let c = s.amp_outside;
        let t = s.apply_local(7).unwrap();
        assert_eq!(t.amp_outside, c);
        assert!((t.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_rotation_angle_is_two_theta2() {
        let g = geo(64, 4);
        let s = SymmetricState::<f64>::uniform(g);
        for j in 0..5u64 {
            let a = s.apply_local(j).unwrap();
            let b = s.rotate_local(j as f64);
            assert!(a.max_abs_diff(&b) < 1e-13, "j = {j}");
        }
    }

    #[test]
    fn unnormalized_input_rejected() {
        let mut s = SymmetricState::<f64>::uniform(geo(16, 4));
        s.amp_target = 0.9;
        assert!(matches!(s.apply_global(1), Err(Error::InvalidState { .. })));
        assert!(matches!(s.apply_local(1), Err(Error::InvalidState { .. })));
    }

    #[test]
    fn transpose_undoes_global_step() {
        let g = geo(96, 8);
        let s = SymmetricState::<f64>::uniform(g).apply_local(3).unwrap();
        let m = Mat3::<f64>::for_op(&g, Op::Global);
        let back = s.apply_matrix(&m).apply_matrix(&m.transpose());
        assert!(back.max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn inverse_op_is_transpose() {
        let g = geo(40, 4);
        let fwd = Mat3::<f64>::for_op(&g, Op::Global);
        let inv = Mat3::<f64>::for_op(&g, Op::GlobalInverse);
        let prod = fwd.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod.0[i][j] - expect).abs() < 1e-14);
                assert!((inv.0[i][j] - fwd.0[j][i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn local_inverse_undoes_local() {
        let g = geo(60, 3);
        let s = SymmetricState::<f64>::uniform(g).apply_global(2).unwrap();
        let back = s.apply_word(&[Op::Local, Op::Local, Op::LocalInverse, Op::LocalInverse]).unwrap();
        assert!(back.max_abs_diff(&s) < 1e-13);
    }

    #[test]
    fn target_block_probability_cases() {
        for k in [2u64, 4, 5, 10] {
            let s = SymmetricState::<f64>::uniform(geo(20 * k, k));
            assert!((s.target_block_probability() - 1.0 / k as f64).abs() < 1e-14);
        }
        let n = 1024u64;
        let fs = grover_full_search::<f64>(n).unwrap();
        let s = SymmetricState::<f64>::uniform(geo(n, 1))
            .apply_global(fs.nearest_integer)
            .unwrap();
        assert!(s.target_block_probability() > 0.999);
    }

    #[test]
    fn full_search_counts() {
        let fs = grover_full_search::<f64>(4).unwrap();
        assert!((fs.j_full - 1.0).abs() < 1e-14);
        assert!((fs.success_probability - 1.0).abs() < 1e-14);

        let fs = grover_full_search::<f64>(2).unwrap();
        assert!((fs.j_full - 0.5).abs() < 1e-14);
        let g = geo(2, 1);
        let theta = g.rotation_angles::<f64>().theta1;
        assert!((theta - PI / 4.0).abs() < 1e-15);
        assert!(((3.0 * theta).sin().powi(2) - 0.5).abs() < 1e-14);
        assert!((fs.success_probability - 0.5).abs() < 1e-14);

        let fs = grover_full_search::<f64>(1 << 40).unwrap();
        assert!((fs.j_full / 2f64.powi(20) - PI / 4.0).abs() < 1e-6);

        assert!(grover_full_search::<f64>(1).is_err());
    }

    #[test]
    fn single_precision_runs() {
        let g = geo(256, 4);
        let s = SymmetricState::<f32>::uniform(g).apply_global(5).unwrap();
        let c = global_closed_form::<f32>(g, 5.0);
        assert!(s.max_abs_diff(&c) < 1e-5);
        s.check_normalized().unwrap();
    }
}
