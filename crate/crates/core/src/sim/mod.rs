//! Exact state evolution under global and local Grover iterations.
//!
//! Two representations are kept side by side:
//!
//! * [`SymmetricState`] stores one amplitude per symmetry class (the target,
//!   the other items of the target block, the items of every other block).
//!   Every operator used by partial search maps this 3-dimensional subspace to
//!   itself, so evolution is a 3×3 matrix product and costs nothing in `N`.
//! * [`FullState`] stores all `N` amplitudes and applies the literal
//!   reflections. It is the brute-force cross-check for the reduced simulator.
//!
//! Basis order is fixed as (target, rest of target block, outside) everywhere.

mod full;
mod symmetric;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use full::{full_state_simulate, FullState, DEFAULT_FULL_VECTOR_CAP};
pub use symmetric::{global_closed_form, grover_full_search, FullSearch, Mat3, SymmetricState};

/// Partition of an `N`-item database into `K` blocks of `b` items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DatabaseGeometry {
    n_items: u64,
    n_blocks: u64,
    block_size: u64,
}

impl DatabaseGeometry {
    pub fn new(n_items: u64, n_blocks: u64) -> Result<Self> {
        if n_items == 0 || n_blocks == 0 {
            return Err(Error::InvalidGeometry(format!(
                "N = {n_items} and K = {n_blocks} must both be positive"
            )));
        }
        if !n_items.is_multiple_of(n_blocks) {
            return Err(Error::InvalidGeometry(format!(
                "K = {n_blocks} does not divide N = {n_items}"
            )));
        }
        Ok(Self {
            n_items,
            n_blocks,
            block_size: n_items / n_blocks,
        })
    }

    pub fn from_blocks(n_blocks: u64, block_size: u64) -> Result<Self> {
        let n_items = n_blocks.checked_mul(block_size).ok_or_else(|| {
            Error::InvalidGeometry(format!("K = {n_blocks} times b = {block_size} overflows"))
        })?;
        Self::new(n_items, n_blocks)
    }

    /// A single-block geometry: plain Grover search over `n_items`.
    pub fn unpartitioned(n_items: u64) -> Result<Self> {
        Self::new(n_items, 1)
    }

    pub fn n_items(&self) -> u64 {
        self.n_items
    }

    pub fn n_blocks(&self) -> u64 {
        self.n_blocks
    }

    pub fn block_size(&self) -> u64 {
        self.block_size
    }

    /// Number of non-target items inside the target block, `b − 1`.
    pub fn rest_count(&self) -> u64 {
        self.block_size - 1
    }

    /// Number of items outside the target block, `(K − 1)·b`.
    pub fn outside_count(&self) -> u64 {
        (self.n_blocks - 1) * self.block_size
    }

    /// Partial search needs at least two blocks.
    pub fn require_partitioned(&self) -> Result<()> {
        if self.n_blocks < 2 {
            return Err(Error::InvalidGeometry(format!(
                "partial search needs K >= 2, got K = {}",
                self.n_blocks
            )));
        }
        Ok(())
    }

    /// Geometry of the target block viewed as a database of its own, split into
    /// `sub_blocks` sub-blocks.
    pub fn target_block_database(&self, sub_blocks: u64) -> Result<Self> {
        Self::new(self.block_size, sub_blocks)
    }

    pub fn rotation_angles<T: Real>(&self) -> RotationAngles<T> {
        RotationAngles::new(self)
    }
}

/// Rotation angles of the global and the local iteration.
///
/// `sin²θ1 = 1/N` and `sin²θ2 = 1/b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngles<T> {
    pub theta1: T,
    pub theta2: T,
}

impl<T: Real> RotationAngles<T> {
    pub fn new(geometry: &DatabaseGeometry) -> Self {
        let n = T::from_count(geometry.n_items);
        let b = T::from_count(geometry.block_size);
        Self {
            theta1: (T::one() / n.sqrt()).asin(),
            theta2: (T::one() / b.sqrt()).asin(),
        }
    }

    /// Large-block approximations `θ1 ≈ 1/√N`, `θ2 ≈ 1/√b`.
    pub fn large_block_limit(geometry: &DatabaseGeometry) -> Self {
        Self {
            theta1: T::one() / T::from_count(geometry.n_items).sqrt(),
            theta2: T::one() / T::from_count(geometry.block_size).sqrt(),
        }
    }
}

/// Elementary operators of the search algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    /// Global Grover iteration `G1 = −I_s1·I_t` (one oracle query).
    Global,
    /// Simultaneous local iteration `G2 = −(⊕ I_s2)·I_t` (one oracle query).
    Local,
    /// Inverse global iteration `G1⁻¹ = −I_t·I_s1` (one oracle query).
    GlobalInverse,
    /// Inverse local iteration `G2⁻¹ = −I_t·(⊕ I_s2)` (one oracle query).
    LocalInverse,
    /// Reflection `I_s1` about the uniform superposition (no query).
    ReflectUniform,
}

impl Op {
    /// Oracle queries consumed by one application.
    pub fn queries(self) -> u64 {
        match self {
            Op::Global | Op::Local | Op::GlobalInverse | Op::LocalInverse => 1,
            Op::ReflectUniform => 0,
        }
    }
}
