use serde::Serialize;

use super::{DatabaseGeometry, Op, SymmetricState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest database the brute-force simulator accepts unless configured otherwise.
pub const DEFAULT_FULL_VECTOR_CAP: u64 = 4096;

/// All `N` amplitudes of the database. Block `i` occupies `[i·b, (i+1)·b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullState<T> {
    pub geometry: DatabaseGeometry,
    pub amplitudes: Vec<T>,
    pub target_index: usize,
}

impl<T: Real> FullState<T> {
    pub fn uniform(geometry: DatabaseGeometry, target_index: usize, cap: u64) -> Result<Self> {
        check_cap(&geometry, cap)?;
        check_target(&geometry, target_index)?;
        let n = geometry.n_items() as usize;
        let a = T::one() / T::from_count(geometry.n_items()).sqrt();
        Ok(Self {
            geometry,
            amplitudes: vec![a; n],
            target_index,
        })
    }

    pub fn from_amplitudes(
        geometry: DatabaseGeometry,
        target_index: usize,
        amplitudes: Vec<T>,
    ) -> Result<Self> {
        check_target(&geometry, target_index)?;
        if amplitudes.len() as u64 != geometry.n_items() {
            return Err(Error::InvalidGeometry(format!(
                "{} amplitudes for N = {}",
                amplitudes.len(),
                geometry.n_items()
            )));
        }
        let s = Self {
            geometry,
            amplitudes,
            target_index,
        };
        let deviation = (s.norm() - T::one()).abs().as_f64();
        if deviation > T::STATE_TOL {
            return Err(Error::InvalidState { deviation });
        }
        Ok(s)
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    fn block_of(&self, index: usize) -> usize {
        index / self.geometry.block_size() as usize
    }

    fn target_block_range(&self) -> std::ops::Range<usize> {
        let b = self.geometry.block_size() as usize;
        let start = self.block_of(self.target_index) * b;
        start..start + b
    }

    fn invert_about_mean(values: &mut [T]) {
        let mean = values.iter().copied().sum::<T>() / T::from_count(values.len() as u64);
        let two_mean = T::lit(2.0) * mean;
        for v in values.iter_mut() {
            *v = two_mean - *v;
        }
    }

    /// Applies one operator in place using the literal `N`-dimensional reflections.
    pub fn apply(&mut self, op: Op) {
        let t = self.target_index;
        match op {
            Op::Global => {
                self.amplitudes[t] = -self.amplitudes[t];
                Self::invert_about_mean(&mut self.amplitudes);
            }
            Op::GlobalInverse => {
                Self::invert_about_mean(&mut self.amplitudes);
                self.amplitudes[t] = -self.amplitudes[t];
            }
            Op::ReflectUniform => {
                // I_s1 = −(inversion about the mean)
                Self::invert_about_mean(&mut self.amplitudes);
                for a in self.amplitudes.iter_mut() {
                    *a = -*a;
                }
            }
            Op::Local => {
                self.amplitudes[t] = -self.amplitudes[t];
                let b = self.geometry.block_size() as usize;
                for block in self.amplitudes.chunks_mut(b) {
                    Self::invert_about_mean(block);
                }
            }
            Op::LocalInverse => {
                let b = self.geometry.block_size() as usize;
                for block in self.amplitudes.chunks_mut(b) {
                    Self::invert_about_mean(block);
                }
                self.amplitudes[t] = -self.amplitudes[t];
            }
        }
    }

    /// Reads off the three class amplitudes, failing if any class is not
    /// constant within the state tolerance.
    pub fn project_to_symmetric(&self) -> Result<SymmetricState<T>> {
        let range = self.target_block_range();
        let t = self.target_index;
        let mut rest = Vec::with_capacity(range.len());
        let mut outside = Vec::with_capacity(self.amplitudes.len());
        for (i, &a) in self.amplitudes.iter().enumerate() {
            if i == t {
                continue;
            }
            if range.contains(&i) {
                rest.push(a);
            } else {
                outside.push(a);
            }
        }
        let mut max_deviation = T::zero();
        let mut class_value = |values: &[T]| {
            if values.is_empty() {
                return T::zero();
            }
            let mean = values.iter().copied().sum::<T>() / T::from_count(values.len() as u64);
            for &v in values {
                max_deviation = max_deviation.max((v - mean).abs());
            }
            mean
        };
        let amp_rest = class_value(&rest);
        let amp_outside = class_value(&outside);
        if max_deviation.as_f64() > T::STATE_TOL {
            return Err(Error::SubspaceViolation {
                max_deviation: max_deviation.as_f64(),
            });
        }
        Ok(SymmetricState::new(
            self.geometry,
            self.amplitudes[t],
            amp_rest,
            amp_outside,
        ))
    }

    /// Amplitudes of the target block, in layout order, with the target's
    /// position inside it.
    pub fn target_block(&self) -> (Vec<T>, usize) {
        let range = self.target_block_range();
        let local_target = self.target_index - range.start;
        (self.amplitudes[range].to_vec(), local_target)
    }
}

fn check_cap(geometry: &DatabaseGeometry, cap: u64) -> Result<()> {
    if geometry.n_items() > cap {
        return Err(Error::Capacity {
            n_items: geometry.n_items(),
            cap,
        });
    }
    Ok(())
}

fn check_target(geometry: &DatabaseGeometry, target_index: usize) -> Result<()> {
    if target_index as u64 >= geometry.n_items() {
        return Err(Error::InvalidGeometry(format!(
            "target index {target_index} outside [0, {})",
            geometry.n_items()
        )));
    }
    Ok(())
}

/// Brute-force evolution of the uniform state under `word` (first operator
/// acts first).
pub fn full_state_simulate<T: Real>(
    geometry: DatabaseGeometry,
    target_index: usize,
    word: &[Op],
    cap: u64,
) -> Result<FullState<T>> {
    let mut state = FullState::uniform(geometry, target_index, cap)?;
    for &op in word {
        state.apply(op);
    }
    Ok(state)
}
