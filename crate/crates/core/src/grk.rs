//! Three-step GRK partial search: `j1` global iterations, `j2` simultaneous
//! local iterations, one final operation.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calculus::{alpha_opt, eta_continuous, eta_opt, ScaledParams};
use crate::error::{Error, Result};
use crate::roots::{bisect, sign_change_brackets};
use crate::scalar::Real;
use crate::sim::{global_closed_form, DatabaseGeometry, Mat3, Op, RotationAngles, SymmetricState};

/// Last operation of a GRK run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalOp {
    /// One more global iteration `G1 = −I_s1·I_t`.
    #[default]
    StandardG1,
    /// `−I_t·I_s1`, equal to `G1⁻¹`.
    MinusOracleReflect,
    /// `I_s1` alone; no oracle query, target amplitude ends up negative.
    ReflectOnly,
}

impl FinalOp {
    pub const ALL: [FinalOp; 3] = [
        FinalOp::StandardG1,
        FinalOp::MinusOracleReflect,
        FinalOp::ReflectOnly,
    ];

    pub fn op(self) -> Op {
        match self {
            FinalOp::StandardG1 => Op::Global,
            FinalOp::MinusOracleReflect => Op::GlobalInverse,
            FinalOp::ReflectOnly => Op::ReflectUniform,
        }
    }

    pub fn queries(self) -> u64 {
        self.op().queries()
    }

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            FinalOp::StandardG1 => "g1",
            FinalOp::MinusOracleReflect => "it-is1",
            FinalOp::ReflectOnly => "is1",
        }
    }
}

impl fmt::Display for FinalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FinalOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(FinalOp::StandardG1),
            "it-is1" => Ok(FinalOp::MinusOracleReflect),
            "is1" => Ok(FinalOp::ReflectOnly),
            other => Err(Error::Domain(format!(
                "unknown final operation {other:?} (expected g1, it-is1 or is1)"
            ))),
        }
    }
}

/// Iteration counts of one GRK run. Real counts are allowed for the
/// closed-form evolution; only integer counts can be executed as operator
/// powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationSchedule<T> {
    pub j1: T,
    pub j2: T,
    pub final_op: FinalOp,
}

impl<T: Real> IterationSchedule<T> {
    pub fn new(j1: T, j2: T, final_op: FinalOp) -> Result<Self> {
        for (name, v) in [("j1", j1), ("j2", j2)] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::InvalidSchedule(format!(
                    "{name} = {v} must be finite and nonnegative"
                )));
            }
        }
        Ok(Self { j1, j2, final_op })
    }

    pub fn integer(j1: u64, j2: u64, final_op: FinalOp) -> Self {
        Self {
            j1: T::from_count(j1),
            j2: T::from_count(j2),
            final_op,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.j1.fract() == T::zero() && self.j2.fract() == T::zero()
    }

    /// `(j1, j2)` as integers when the schedule is executable.
    pub fn counts(&self) -> Option<(u64, u64)> {
        if !self.is_integral() {
            return None;
        }
        Some((self.j1.to_u64()?, self.j2.to_u64()?))
    }

    /// `j1 + j2` plus one when the final operation queries the oracle.
    pub fn queries(&self) -> T {
        self.j1 + self.j2 + T::from_count(self.final_op.queries())
    }
}

/// How the state is evolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evolution {
    /// Exact 3×3 matrix powers; integer schedules only.
    OperatorPower,
    /// Rotation-angle composition; accepts real schedules.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrkResult<T> {
    pub schedule: IterationSchedule<T>,
    pub final_state: SymmetricState<T>,
    /// Probability of measuring an item outside the target block.
    pub leaked_probability: T,
    pub queries_used: T,
}

impl<T: Real> GrkResult<T> {
    fn new(schedule: IterationSchedule<T>, final_state: SymmetricState<T>) -> Self {
        Self {
            schedule,
            final_state,
            leaked_probability: final_state.leaked_probability(),
            queries_used: schedule.queries(),
        }
    }

    pub fn target_block_probability(&self) -> T {
        self.final_state.target_block_probability()
    }
}

/// Runs GRK from the uniform state, as operator powers when the schedule is
/// integral and in closed form otherwise.
pub fn run_grk<T: Real>(
    geometry: DatabaseGeometry,
    schedule: IterationSchedule<T>,
) -> Result<GrkResult<T>> {
    let mode = if schedule.is_integral() {
        Evolution::OperatorPower
    } else {
        Evolution::ClosedForm
    };
    run_grk_with(geometry, schedule, mode)
}

pub fn run_grk_with<T: Real>(
    geometry: DatabaseGeometry,
    schedule: IterationSchedule<T>,
    mode: Evolution,
) -> Result<GrkResult<T>> {
    geometry.require_partitioned()?;
    let schedule = IterationSchedule::new(schedule.j1, schedule.j2, schedule.final_op)?;
    let state = match mode {
        Evolution::ClosedForm => closed_form_state(geometry, schedule.j1, schedule.j2, schedule.final_op),
        Evolution::OperatorPower => {
            let (j1, j2) = schedule.counts().ok_or(Error::NonIntegerSchedule {
                j1: schedule.j1.as_f64(),
                j2: schedule.j2.as_f64(),
            })?;
            evolve_integer(
                &SymmetricState::uniform(geometry),
                j1 as i64,
                j2,
                schedule.final_op,
            )?
        }
    };
    Ok(GrkResult::new(schedule, state))
}

/// `FinalOp ∘ G2^{j2} ∘ G1^{j1} |s1⟩` for real `j1, j2`.
pub fn closed_form_state<T: Real>(
    geometry: DatabaseGeometry,
    j1: T,
    j2: T,
    final_op: FinalOp,
) -> SymmetricState<T> {
    global_closed_form(geometry, j1)
        .rotate_local(j2)
        .apply(final_op.op())
}

/// Applies `global_steps` global iterations (inverse iterations when
/// negative), then `local_steps` local iterations and the final operation,
/// starting from an arbitrary normalized state.
pub fn evolve_integer<T: Real>(
    initial: &SymmetricState<T>,
    global_steps: i64,
    local_steps: u64,
    final_op: FinalOp,
) -> Result<SymmetricState<T>> {
    let global = if global_steps >= 0 { Op::Global } else { Op::GlobalInverse };
    initial
        .apply_power(global, global_steps.unsigned_abs())?
        .apply_local(local_steps)
        .map(|s| s.apply(final_op.op()))
}

/// Operator word of an integer GRK run, first operator first.
pub fn operator_word(global_steps: i64, local_steps: u64, final_op: FinalOp) -> Vec<Op> {
    let global = if global_steps >= 0 { Op::Global } else { Op::GlobalInverse };
    let mut word = vec![global; global_steps.unsigned_abs() as usize];
    word.extend(std::iter::repeat_n(Op::Local, local_steps as usize));
    word.push(final_op.op());
    word
}

/// Per-item amplitude of a non-target block after `G1·G2^{j2}·G1^{j1}|s1⟩`.
pub fn leaked_amplitude<T: Real>(geometry: DatabaseGeometry, j1: T, j2: T) -> Result<T> {
    geometry.require_partitioned()?;
    Ok(closed_form_state(geometry, j1, j2, FinalOp::StandardG1).amp_outside)
}

/// Number of cells the cancellation scan splits `[0, π/(4θ1)]` into.
const CANCELLATION_SCAN_CELLS: usize = 256;

/// Finds `j1` making the leaked amplitude vanish at the given `j2`.
///
/// When the scan finds several roots the one closest to the large-block
/// prediction `(π/4 − η(j2·θ2)/√K)·√N` is returned.
pub fn solve_cancellation<T: Real>(geometry: DatabaseGeometry, j2: T) -> Result<T> {
    geometry.require_partitioned()?;
    let angles = RotationAngles::<T>::new(&geometry);
    let hi = T::FRAC_PI_4() / angles.theta1;
    let leak = |j1: T| closed_form_state(geometry, j1, j2, FinalOp::StandardG1).amp_outside;
    let brackets = sign_change_brackets(leak, T::zero(), hi, CANCELLATION_SCAN_CELLS);
    if brackets.is_empty() {
        return Err(Error::NoRoot {
            what: "leaked amplitude",
            lo: 0.0,
            hi: hi.as_f64(),
        });
    }
    let k = T::from_count(geometry.n_blocks());
    let alpha_hat = j2 * angles.theta2;
    let eta_hat = eta_continuous(alpha_hat, k);
    let predicted = (T::FRAC_PI_4() - eta_hat / k.sqrt()) * T::from_count(geometry.n_items()).sqrt();
    let tol = T::lit(1e-12);
    let mut best: Option<(T, T)> = None;
    for (lo, hi) in brackets {
        let root = bisect(leak, lo, hi, tol, "leaked amplitude")?;
        let dist = (root - predicted).abs();
        if best.is_none_or(|(_, d)| dist < d) {
            best = Some((root, dist));
        }
    }
    Ok(best.expect("at least one bracket").0)
}

/// Real-valued schedule at the large-block optimum:
/// `j1 = (π/4 − η(K)/√K)·√N`, `j2 = α(K)·√b`.
pub fn optimal_real_schedule<T: Real>(geometry: DatabaseGeometry) -> Result<IterationSchedule<T>> {
    geometry.require_partitioned()?;
    let k = T::from_count(geometry.n_blocks());
    let n = T::from_count(geometry.n_items());
    let b = T::from_count(geometry.block_size());
    let j1 = (T::FRAC_PI_4() - eta_opt(k)? / k.sqrt()) * n.sqrt();
    let j2 = alpha_opt(k)? * b.sqrt();
    IterationSchedule::new(j1.max(T::zero()), j2, FinalOp::StandardG1)
}

/// An integer schedule found by [`best_integer_near`], allowing negative
/// global counts (inverse global iterations).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegerCandidate<T> {
    pub global_steps: i64,
    pub local_steps: u64,
    pub final_state: SymmetricState<T>,
    pub leaked_probability: T,
}

/// Half-width of the integer search window around a rounded schedule.
pub const NEIGHBORHOOD: i64 = 2;

/// Rounds `(j1, j2)` and searches the `±NEIGHBORHOOD` window for the
/// schedule with least leaked probability; ties go to the smaller total
/// count. Global counts below `min_global` are skipped.
pub fn best_integer_near<T: Real>(
    initial: &SymmetricState<T>,
    j1: T,
    j2: T,
    final_op: FinalOp,
    min_global: i64,
) -> Result<IntegerCandidate<T>> {
    let r1 = j1.round().to_i64().ok_or_else(|| Error::InvalidSchedule(format!("j1 = {j1}")))?;
    let r2 = j2.round().to_i64().ok_or_else(|| Error::InvalidSchedule(format!("j2 = {j2}")))?;
    let tie = T::lit(1e-15);
    let mut best: Option<IntegerCandidate<T>> = None;
    for g in (r1 - NEIGHBORHOOD)..=(r1 + NEIGHBORHOOD) {
        if g < min_global {
            continue;
        }
        for l in (r2 - NEIGHBORHOOD).max(0)..=(r2 + NEIGHBORHOOD).max(0) {
            let state = evolve_integer(initial, g, l as u64, final_op)?;
            let leak = state.leaked_probability();
            let better = match &best {
                None => true,
                Some(b) => {
                    leak < b.leaked_probability - tie
                        || (leak <= b.leaked_probability + tie
                            && g.abs() + l < b.global_steps.abs() + b.local_steps as i64)
                }
            };
            if better {
                best = Some(IntegerCandidate {
                    global_steps: g,
                    local_steps: l as u64,
                    final_state: state,
                    leaked_probability: leak,
                });
            }
        }
    }
    best.ok_or_else(|| {
        Error::InvalidSchedule(format!(
            "no integer schedule with j1 >= {min_global} near ({j1}, {j2})"
        ))
    })
}

/// Integer schedule nearest the large-block optimum with the least leaked
/// probability.
pub fn optimal_integer_schedule<T: Real>(geometry: DatabaseGeometry) -> Result<IterationSchedule<T>> {
    if geometry.block_size() < 4 {
        return Err(Error::InvalidGeometry(format!(
            "optimal schedule needs block size >= 4, got {}",
            geometry.block_size()
        )));
    }
    let real = optimal_real_schedule::<T>(geometry)?;
    let best = best_integer_near(
        &SymmetricState::uniform(geometry),
        real.j1,
        real.j2,
        FinalOp::StandardG1,
        0,
    )?;
    Ok(IterationSchedule::integer(
        best.global_steps as u64,
        best.local_steps,
        FinalOp::StandardG1,
    ))
}

/// `(α, η)` implied by a schedule: `α = j2/√b`, `η = (π/4 − j1/√N)·√K`.
pub fn implied_scaled_params<T: Real>(geometry: DatabaseGeometry, j1: T, j2: T) -> ScaledParams<T> {
    let k = T::from_count(geometry.n_blocks());
    let n = T::from_count(geometry.n_items());
    let b = T::from_count(geometry.block_size());
    ScaledParams {
        k,
        alpha: j2 / b.sqrt(),
        eta: (T::FRAC_PI_4() - j1 / n.sqrt()) * k.sqrt(),
    }
}

/// One of the three final states in [`compare_final_variants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinalVariant<T> {
    pub final_op: FinalOp,
    pub state: SymmetricState<T>,
    /// Sign of the target amplitude once the global phase is fixed so that
    /// the other items of the target block are positive.
    pub target_amplitude_negative: bool,
    pub queries_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalVariantsReport<T> {
    pub variants: Vec<FinalVariant<T>>,
    /// `‖−I_t·I_s1|v⟩ − G1|v⟩‖`.
    pub distance_it_is1_g1: T,
}

/// Evaluates the three final operations on `|v⟩ = G2^{j2}·G1^{j1}|s1⟩`.
pub fn compare_final_variants<T: Real>(
    geometry: DatabaseGeometry,
    j1: u64,
    j2: u64,
) -> Result<FinalVariantsReport<T>> {
    geometry.require_partitioned()?;
    let v = SymmetricState::<T>::uniform(geometry)
        .apply_global(j1)?
        .apply_local(j2)?;
    let variants: Vec<FinalVariant<T>> = FinalOp::ALL
        .iter()
        .map(|&f| {
            let state = v.apply_matrix(&Mat3::for_op(&geometry, f.op()));
            FinalVariant {
                final_op: f,
                state,
                target_amplitude_negative: state.amp_target * state.amp_target_rest.signum() < T::zero(),
                queries_used: j1 + j2 + f.queries(),
            }
        })
        .collect();
    let distance_it_is1_g1 = variants[1].state.distance(&variants[0].state);
    Ok(FinalVariantsReport {
        variants,
        distance_it_is1_g1,
    })
}
