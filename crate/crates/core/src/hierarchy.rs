//! Hierarchies of GRK runs: each level refines the previous target block into
//! sub-blocks and searches it starting from the state the previous level left
//! behind.

use std::fmt;

use serde::Serialize;

use crate::calculus::{alpha_opt, eta_opt, lemma_one_bracket, s_coeff, t_coeff, QueryCoefficient};
use crate::error::{Error, Result};
use crate::grk::{best_integer_near, optimal_integer_schedule, run_grk, FinalOp, GrkResult};
use crate::scalar::Real;
use crate::sim::{global_closed_form, DatabaseGeometry, SymmetricState};

/// Block counts `[K_1, …, K_m]` of a hierarchy, coarsest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HierarchySpec {
    levels: Vec<u64>,
}

impl HierarchySpec {
    pub fn new(levels: Vec<u64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("hierarchy needs at least one level".into()));
        }
        if let Some(&k) = levels.iter().find(|&&k| k < 2) {
            return Err(Error::Domain(format!("every level needs K >= 2, got {k}")));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels_as<T: Real>(&self) -> Vec<T> {
        self.levels.iter().map(|&k| T::from_count(k)).collect()
    }

    /// `∏K_i`, the number of blocks of the equivalent direct search.
    pub fn total_blocks(&self) -> Result<u64> {
        self.levels.iter().try_fold(1u64, |p, &k| {
            p.checked_mul(k)
                .ok_or_else(|| Error::Domain(format!("block product overflows for {self}")))
        })
    }
}

impl fmt::Display for HierarchySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// What to do when a sequential level's global count comes out negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeGlobalPolicy {
    /// Run `|j1|` inverse global iterations `G1⁻¹ = −I_t·I_s1`.
    #[default]
    Invert,
    /// Run no global iterations at all.
    Clamp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord<T> {
    /// Database searched at this level (the previous target block).
    pub geometry: DatabaseGeometry,
    /// Real-valued schedule this level was rounded from.
    pub real_j1: T,
    pub real_j2: T,
    /// Executed counts; negative global steps are inverse iterations.
    pub global_steps: i64,
    pub local_steps: u64,
    /// Set when the negative global count was replaced by zero.
    pub clamped: bool,
    pub final_state: SymmetricState<T>,
    /// Probability outside this level's target block, relative to the
    /// level's own database.
    pub leaked_probability: T,
    /// Oracle calls made by this level, `|j1| + j2 + 1`.
    pub oracle_calls: u64,
    /// `j1 + j2 + 1` with the sign of `j1` kept.
    pub signed_queries: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyRun<T> {
    pub spec: HierarchySpec,
    pub n_items: u64,
    pub per_level: Vec<LevelRecord<T>>,
    pub total_oracle_calls: u64,
    pub total_signed_queries: i64,
    /// Probability that measuring at the end lands in the finest target block.
    pub success_probability: T,
    /// Single GRK over the finest partition, with its own optimal schedule.
    pub direct_equivalent: GrkResult<T>,
}

impl<T: Real> HierarchyRun<T> {
    pub fn total_oracle_calls(&self) -> u64 {
        self.per_level.iter().map(|l| l.oracle_calls).sum()
    }

    /// Signed query count over `√N`, comparable to the hierarchy total.
    pub fn signed_coefficient(&self) -> T {
        T::lit(self.total_signed_queries as f64) / T::from_count(self.n_items).sqrt()
    }

    pub fn oracle_coefficient(&self) -> T {
        T::from_count(self.total_oracle_calls) / T::from_count(self.n_items).sqrt()
    }
}

/// Geometries of every level: level `i` searches a database of
/// `N/∏_{j<i}K_j` items split into `K_i` blocks.
pub fn level_geometries(n_items: u64, spec: &HierarchySpec) -> Result<Vec<DatabaseGeometry>> {
    let total = spec.total_blocks()?;
    if !n_items.is_multiple_of(total) {
        return Err(Error::InvalidGeometry(format!(
            "hierarchy {spec} needs {total} | N, got N = {n_items}"
        )));
    }
    let mut out = Vec::with_capacity(spec.depth());
    let mut size = n_items;
    for &k in spec.levels() {
        let g = DatabaseGeometry::new(size, k)?;
        if g.block_size() < 4 {
            return Err(Error::InvalidGeometry(format!(
                "level with {size} items and K = {k} has block size {} < 4",
                g.block_size()
            )));
        }
        out.push(g);
        size = g.block_size();
    }
    Ok(out)
}

/// The previous level's target block, renormalized, as the uniform-class
/// state of a database of `b` items split into `sub_blocks`.
fn descend<T: Real>(state: &SymmetricState<T>, sub: DatabaseGeometry) -> (SymmetricState<T>, T) {
    let (kept, dropped) = state.truncate_to_target_block();
    let rest = kept.amp_target_rest;
    (SymmetricState::new(sub, kept.amp_target, rest, rest), dropped)
}

/// Real-valued schedule of a sequential level after a level with `k_prev`
/// blocks: `j1 = (π/4 − α(k_prev)/2 − η(K)/√K)·√N`, `j2 = α(K)·√b`.
pub fn sequential_real_schedule<T: Real>(geometry: DatabaseGeometry, k_prev: u64) -> Result<(T, T)> {
    let k = T::from_count(geometry.n_blocks());
    let head_start = alpha_opt(T::from_count(k_prev))? / T::lit(2.0);
    let j1 = (T::FRAC_PI_4() - head_start - eta_opt(k)? / k.sqrt())
        * T::from_count(geometry.n_items()).sqrt();
    let j2 = alpha_opt(k)? * T::from_count(geometry.block_size()).sqrt();
    Ok((j1, j2))
}

/// Runs the hierarchy level by level on the exact reduced state.
///
/// Each level's schedule is the large-block optimum rounded by the same
/// neighborhood search as [`optimal_integer_schedule`], evaluated from the
/// actual state handed down. Probability that leaked out of a target block
/// is dropped before the next level and accounted for in
/// `success_probability`.
pub fn run_hierarchy<T: Real>(
    n_items: u64,
    spec: &HierarchySpec,
    policy: NegativeGlobalPolicy,
) -> Result<HierarchyRun<T>> {
    let geometries = level_geometries(n_items, spec)?;
    let mut per_level = Vec::with_capacity(geometries.len());
    let mut surviving = T::one();
    let mut state = SymmetricState::uniform(geometries[0]);

    for (i, &g) in geometries.iter().enumerate() {
        let (j1, j2) = if i == 0 {
            let s = crate::grk::optimal_real_schedule::<T>(g)?;
            (s.j1, s.j2)
        } else {
            sequential_real_schedule::<T>(g, spec.levels()[i - 1])?
        };
        let min_global = match policy {
            NegativeGlobalPolicy::Invert => i64::MIN,
            NegativeGlobalPolicy::Clamp => 0,
        };
        let clamped = policy == NegativeGlobalPolicy::Clamp && j1.round() < T::zero();
        let j1_target = if clamped { T::zero() } else { j1 };
        let best = best_integer_near(&state, j1_target, j2, FinalOp::StandardG1, min_global)?;
        let oracle_calls = best.global_steps.unsigned_abs() + best.local_steps + 1;
        let signed_queries = best.global_steps + best.local_steps as i64 + 1;
        per_level.push(LevelRecord {
            geometry: g,
            real_j1: j1,
            real_j2: j2,
            global_steps: best.global_steps,
            local_steps: best.local_steps,
            clamped,
            final_state: best.final_state,
            leaked_probability: best.leaked_probability,
            oracle_calls,
            signed_queries,
        });
        if let Some(&next) = geometries.get(i + 1) {
            let (s, dropped) = descend(&best.final_state, next);
            surviving = surviving * (T::one() - dropped);
            state = s;
        } else {
            surviving = surviving * best.final_state.target_block_probability();
        }
    }

    let direct_geometry = DatabaseGeometry::new(n_items, spec.total_blocks()?)?;
    let direct_equivalent = run_grk(direct_geometry, optimal_integer_schedule::<T>(direct_geometry)?)?;
    let total_oracle_calls = per_level.iter().map(|l: &LevelRecord<T>| l.oracle_calls).sum();
    let total_signed_queries = per_level.iter().map(|l| l.signed_queries).sum();
    Ok(HierarchyRun {
        spec: spec.clone(),
        n_items,
        per_level,
        total_oracle_calls,
        total_signed_queries,
        success_probability: surviving,
        direct_equivalent,
    })
}

/// Compares the normalized target-block state after a single GRK level with
/// `G2^{(α(K)/2)·√b}|s2⟩`, the local iteration applied a real number of
/// times to the uniform state of the block. Returns the largest per-item
/// amplitude difference.
pub fn initial_state_deviation<T: Real>(geometry: DatabaseGeometry) -> Result<T> {
    let run = run_grk(geometry, optimal_integer_schedule::<T>(geometry)?)?;
    let block = DatabaseGeometry::unpartitioned(geometry.block_size())?;
    let (kept, _) = run.final_state.truncate_to_target_block();
    let actual = SymmetricState::new(block, kept.amp_target, kept.amp_target_rest, T::zero());
    let k = T::from_count(geometry.n_blocks());
    let j = alpha_opt(k)? / T::lit(2.0) * T::from_count(geometry.block_size()).sqrt();
    let ideal = global_closed_form(block, j);
    Ok(actual.max_abs_diff(&ideal))
}

/// `T − S` split along the proof of positivity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapDecomposition<T> {
    /// `[π/4 + α(K_i)/2 − η(K_i)]/√(K_1⋯K_i)` for `i < m`.
    pub lemma1_terms: Vec<T>,
    /// `{[α(K_m) − η(K_m)] − [α(∏K) − η(∏K)]}/√∏K`.
    pub lemma2_term: T,
    pub gap: T,
    /// Gap positive and every term positive.
    pub holds: bool,
}

/// Decomposes `T(K_1, …, K_m) − S(∏K_i)` for real block counts.
pub fn gap_decomposition<T: Real>(levels: &[T]) -> Result<GapDecomposition<T>> {
    let Some((&last, head)) = levels.split_last() else {
        return Err(Error::Domain("hierarchy needs at least one level".into()));
    };
    let mut lemma1_terms = Vec::with_capacity(head.len());
    let mut product = T::one();
    for &k in head {
        product = product * k;
        lemma1_terms.push(lemma_one_bracket(k)? / product.sqrt());
    }
    product = product * last;
    let diff = |k: T| -> Result<T> { Ok(alpha_opt(k)? - eta_opt(k)?) };
    let lemma2_term = (diff(last)? - diff(product)?) / product.sqrt();
    let gap = lemma1_terms.iter().copied().sum::<T>() + lemma2_term;
    let holds = gap > T::zero()
        && lemma1_terms.iter().all(|&t| t > T::zero())
        && (levels.len() == 1 || lemma2_term > T::zero());
    Ok(GapDecomposition {
        lemma1_terms,
        lemma2_term,
        gap,
        holds,
    })
}

/// Two-level comparison of the hierarchy against direct search.
pub fn theorem_check<T: Real>(k1: T, k2: T) -> Result<GapDecomposition<T>> {
    gap_decomposition(&[k1, k2])
}

/// Comparison for a hierarchy of two or more levels.
pub fn corollary_check<T: Real>(spec: &HierarchySpec) -> Result<GapDecomposition<T>> {
    if spec.depth() < 2 {
        return Err(Error::Domain(format!(
            "comparison needs at least two levels, got {spec}"
        )));
    }
    gap_decomposition(&spec.levels_as::<T>())
}

/// One row of the two-level query table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row<T> {
    pub k1: u64,
    pub k2: u64,
    pub s: T,
    pub t: T,
    pub gap: T,
}

/// Block pairs of the two-level query table, in print order.
pub const TABLE1_PAIRS: [(u64, u64); 6] = [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3)];

pub fn table1_row<T: Real>(k1: u64, k2: u64) -> Result<Table1Row<T>> {
    let (a, b) = (T::from_count(k1), T::from_count(k2));
    let s: QueryCoefficient<T> = s_coeff(a * b)?;
    let t = t_coeff(a, b)?;
    Ok(Table1Row {
        k1,
        k2,
        s: s.value(),
        t: t.value(),
        gap: t.value() - s.value(),
    })
}

pub fn table1_reproduce<T: Real>() -> Result<Vec<Table1Row<T>>> {
    TABLE1_PAIRS.iter().map(|&(a, b)| table1_row(a, b)).collect()
}
