//! Propagation of probability bounds from a premise family to a further
//! conditional event.
//!
//! Each direction (lower with probe value 0, upper with probe value 1)
//! walks the same loop: build the constituent mass system of the active
//! premises plus the probed target, test feasibility, and either optimize
//! the target mass directly (probe infeasible), accept the probe (target
//! conditioning mass attainable, or nothing left to constrain it), or
//! restart on the premise sub-family whose conditioning mass is forced to
//! zero. The restart set strictly shrinks, so both directions terminate.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::coherence::{
    check_coherence, closed_recursion, feasibility_outcome, indicator, push_assessment_rows,
    BoxAssessment, CoherenceError, Interval, PointStream, PreciseAssessment, TraceLevel,
    ZeroLayerTrace,
};
use crate::event::{constituents, ConditionalEvent};
use crate::lp::{
    feasible, lp_solve, Feasibility, LinearProgram, LpOutcome, Sense, SolvedProgram,
};
use crate::rational::{in_unit, Rational};
use crate::EngineConfig;

/// How a direction's bound was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagationBranch {
    /// Probe infeasible: the bound is the optimum of the target mass over
    /// the premise constraints.
    Optimized,
    /// Probe feasible with attainable target conditioning mass: the probe
    /// value itself is a coherent extension.
    ProbeAttained,
    /// Probe feasible, target conditioning mass forced to zero, and no
    /// premise left to restart on: the extension is unconstrained at this
    /// layer, so the probe value stands.
    Unconstrained,
}

impl fmt::Display for PropagationBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropagationBranch::Optimized => "optimized",
            PropagationBranch::ProbeAttained => "probe-attained",
            PropagationBranch::Unconstrained => "unconstrained",
        })
    }
}

/// One direction of a propagation run. In the trace, premise indices keep
/// their family positions and index `family.len()` denotes the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionReport {
    pub bound: Rational,
    pub branch: PropagationBranch,
    pub trace: ZeroLayerTrace,
}

/// Closed interval of coherent extension values with both direction
/// reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationResult {
    pub interval: Interval,
    pub lower: DirectionReport,
    pub upper: DirectionReport,
}

/// One verified achievable chunk of the extension set: a closed interval
/// whose endpoints are attained by the recorded premise points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSet {
    /// Disjoint achieved intervals, ascending. Their union is a verified
    /// subset of the true extension set.
    pub inner: Vec<AchievedInterval>,
    /// Envelope from propagating the closed hull of the premise box; the
    /// true extension set is contained in it.
    pub outer: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AchievedInterval {
    pub interval: Interval,
    /// Premise point whose extension interval attains the lower endpoint.
    pub lo_witness: PreciseAssessment,
    /// Premise point whose extension interval attains the upper endpoint.
    pub hi_witness: PreciseAssessment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropagationError {
    LengthMismatch { family: usize, assessment: usize },
    /// `propagate` takes closed boxes only.
    OpenInterval { index: usize },
    ValueOutOfRange { index: usize },
    /// The premise box fails g-coherence already on its closure.
    NotGCoherent { trace: ZeroLayerTrace },
    /// No coherent premise point surfaced within the sampling budget, so
    /// the witnessed extension set cannot be built.
    NoWitnessFound { tried: usize },
    Coherence(CoherenceError),
}

impl fmt::Display for PropagationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropagationError::LengthMismatch { family, assessment } => write!(
                f,
                "assessment of length {assessment} does not fit family of length {family}"
            ),
            PropagationError::OpenInterval { index } => {
                write!(f, "premise interval {index} is not closed")
            }
            PropagationError::ValueOutOfRange { index } => {
                write!(f, "value {index} outside [0,1]")
            }
            PropagationError::NotGCoherent { .. } => {
                write!(f, "premise assessment is not g-coherent")
            }
            PropagationError::NoWitnessFound { tried } => {
                write!(f, "no coherent premise point found in {tried} samples")
            }
            PropagationError::Coherence(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PropagationError {}

impl From<CoherenceError> for PropagationError {
    fn from(e: CoherenceError) -> PropagationError {
        PropagationError::Coherence(e)
    }
}

impl From<crate::event::EventError> for PropagationError {
    fn from(e: crate::event::EventError) -> PropagationError {
        PropagationError::Coherence(CoherenceError::Event(e))
    }
}

impl From<crate::lp::LpError> for PropagationError {
    fn from(e: crate::lp::LpError) -> PropagationError {
        PropagationError::Coherence(CoherenceError::Lp(e))
    }
}

/// Propagates the closed box `bx` on `family` to `target`: the result
/// interval contains exactly the values z such that appending z keeps the
/// assessment g-coherent.
pub fn propagate(
    family: &[ConditionalEvent],
    bx: &BoxAssessment,
    target: &ConditionalEvent,
) -> Result<PropagationResult, PropagationError> {
    propagate_impl(family, bx, target, None)
}

/// [`propagate`] over a precise premise point.
pub fn propagate_point(
    family: &[ConditionalEvent],
    values: &PreciseAssessment,
    target: &ConditionalEvent,
) -> Result<PropagationResult, PropagationError> {
    let bx = BoxAssessment::point(values.values())?;
    propagate_impl(family, &bx, target, None)
}

/// [`propagate`] that also returns every linear program it solved, in
/// order, for replay against an independent solver.
pub fn propagate_recorded(
    family: &[ConditionalEvent],
    bx: &BoxAssessment,
    target: &ConditionalEvent,
) -> Result<(PropagationResult, Vec<SolvedProgram>), PropagationError> {
    let mut rec = Vec::new();
    let result = propagate_impl(family, bx, target, Some(&mut rec))?;
    Ok((result, rec))
}

fn propagate_impl(
    family: &[ConditionalEvent],
    bx: &BoxAssessment,
    target: &ConditionalEvent,
    mut rec: Option<&mut Vec<SolvedProgram>>,
) -> Result<PropagationResult, PropagationError> {
    if bx.len() != family.len() {
        return Err(PropagationError::LengthMismatch {
            family: family.len(),
            assessment: bx.len(),
        });
    }
    if let Some(index) = bx.intervals().iter().position(|iv| !iv.is_closed()) {
        return Err(PropagationError::OpenInterval { index });
    }
    let (ok, trace) = closed_recursion(family, bx.intervals(), "premises", rec.as_deref_mut())?;
    if !ok {
        return Err(PropagationError::NotGCoherent { trace });
    }
    let lower = direction(family, bx, target, false, rec.as_deref_mut())?;
    let upper = direction(family, bx, target, true, rec)?;
    let interval = Interval::closed(lower.bound.clone(), upper.bound.clone())
        .expect("lower bound never exceeds upper bound");
    Ok(PropagationResult {
        interval,
        lower,
        upper,
    })
}

fn direction(
    family: &[ConditionalEvent],
    bx: &BoxAssessment,
    target: &ConditionalEvent,
    upper: bool,
    mut rec: Option<&mut Vec<SolvedProgram>>,
) -> Result<DirectionReport, PropagationError> {
    let probe = if upper {
        Rational::one()
    } else {
        Rational::zero()
    };
    let name = if upper { "upper" } else { "lower" };
    let target_idx = family.len();
    let mut active: Vec<usize> = (0..family.len()).collect();
    let mut trace = ZeroLayerTrace::default();
    let mut depth = 0usize;
    loop {
        let mut events: Vec<ConditionalEvent> =
            active.iter().map(|i| family[*i].clone()).collect();
        events.push(target.clone());
        let worlds = constituents(&events)?;

        // probed system: premise rows, the target pinned at the probe
        // value, unit total mass
        let mut lp = LinearProgram::feasibility(worlds.len());
        for orig in &active {
            push_assessment_rows(&mut lp, &worlds, &family[*orig], &bx.intervals()[*orig])?;
        }
        push_assessment_rows(&mut lp, &worlds, target, &Interval::point(probe.clone()))?;
        lp.push_eq(vec![Rational::one(); worlds.len()], Rational::one());
        let feas = feasible(&lp)?;
        if let Some(r) = rec.as_deref_mut() {
            r.push(SolvedProgram {
                label: alloc::format!("{name} level {depth} probe"),
                outcome: feasibility_outcome(&feas),
                lp: lp.clone(),
            });
        }

        if matches!(feas, Feasibility::Infeasible) {
            // optimize the target numerator over the premise constraints,
            // with the target's conditioning mass as the unit
            let mut opt = LinearProgram::feasibility(worlds.len());
            for orig in &active {
                push_assessment_rows(&mut opt, &worlds, &family[*orig], &bx.intervals()[*orig])?;
            }
            opt.push_eq(indicator(&worlds, target.antecedent())?, Rational::one());
            let both = target.consequent().clone().and(target.antecedent().clone());
            opt.objective = indicator(&worlds, &both)?;
            opt.sense = if upper { Sense::Max } else { Sense::Min };
            let outcome = lp_solve(&opt)?;
            if let Some(r) = rec.as_deref_mut() {
                r.push(SolvedProgram {
                    label: alloc::format!("{name} level {depth} optimize"),
                    lp: opt,
                    outcome: outcome.clone(),
                });
            }
            let bound = match outcome {
                LpOutcome::Optimal { value, .. } => value,
                // an infeasible probe guarantees a premise-consistent
                // solution with positive target conditioning mass, and the
                // objective is capped by that mass
                other => unreachable!("bounded target optimization: {other:?}"),
            };
            trace.levels.push(TraceLevel {
                active: with_target(&active, target_idx),
                feasible: false,
                maxima: Vec::new(),
                zero_set: Vec::new(),
            });
            return Ok(DirectionReport {
                bound,
                branch: PropagationBranch::Optimized,
                trace,
            });
        }

        // probe feasible: maximize each conditioning mass over its
        // solutions
        let mut maxima = Vec::new();
        let mut zero_premises = Vec::new();
        let mut target_attained = false;
        for (local, orig) in with_target(&active, target_idx).into_iter().enumerate() {
            let mut max_lp = lp.clone();
            max_lp.objective = indicator(&worlds, events[local].antecedent())?;
            max_lp.sense = Sense::Max;
            let outcome = lp_solve(&max_lp)?;
            if let Some(r) = rec.as_deref_mut() {
                r.push(SolvedProgram {
                    label: alloc::format!("{name} level {depth} max mass {orig}"),
                    lp: max_lp,
                    outcome: outcome.clone(),
                });
            }
            let value = match outcome {
                LpOutcome::Optimal { value, .. } => value,
                other => unreachable!("bounded mass maximization: {other:?}"),
            };
            if orig == target_idx {
                target_attained = !value.is_zero();
            } else if value.is_zero() {
                zero_premises.push(orig);
            }
            maxima.push((orig, value));
        }
        let mut zero_set = zero_premises.clone();
        if !target_attained {
            zero_set.push(target_idx);
        }
        trace.levels.push(TraceLevel {
            active: with_target(&active, target_idx),
            feasible: true,
            maxima,
            zero_set,
        });

        if target_attained || zero_premises.is_empty() {
            let branch = if target_attained {
                PropagationBranch::ProbeAttained
            } else {
                PropagationBranch::Unconstrained
            };
            return Ok(DirectionReport {
                bound: probe,
                branch,
                trace,
            });
        }
        // restart on the premises whose conditioning mass is forced to
        // zero; some premise mass is positive, so this strictly shrinks
        assert!(zero_premises.len() < active.len());
        active = zero_premises;
        depth += 1;
    }
}

fn with_target(active: &[usize], target_idx: usize) -> Vec<usize> {
    let mut v = active.to_vec();
    v.push(target_idx);
    v
}

/// Closed-form extension bounds for the weakly transitive family
/// (C|B, B|A, A|(A∨B)) at the precise point (x, y, t), target C|A.
pub fn wt_bounds(x: &Rational, y: &Rational, t: &Rational) -> Result<Interval, PropagationError> {
    for (index, v) in [x, y, t].into_iter().enumerate() {
        if !in_unit(v) {
            return Err(PropagationError::ValueOutOfRange { index });
        }
    }
    if t.is_zero() {
        return Ok(Interval::closed(Rational::zero(), Rational::one()).expect("unit interval"));
    }
    let one = Rational::one();
    let lo_raw = x * y - (&one - t) * (&one - x) / t;
    let hi_raw = (&one - x) * (&one - y) + x / t;
    let lo = if lo_raw < Rational::zero() {
        Rational::zero()
    } else {
        lo_raw
    };
    let hi = if hi_raw > one { Rational::one() } else { hi_raw };
    Ok(Interval::closed(lo, hi).expect("lower form never exceeds upper form on unit inputs"))
}

/// Closed-form extension bounds for the premise pair (C|A, B|A) at the
/// precise point (x, y), target C|(A∧B).
pub fn cm_bounds(x: &Rational, y: &Rational) -> Result<Interval, PropagationError> {
    for (index, v) in [x, y].into_iter().enumerate() {
        if !in_unit(v) {
            return Err(PropagationError::ValueOutOfRange { index });
        }
    }
    let one = Rational::one();
    let lo = if x + y > one {
        (x + y - &one) / y
    } else {
        Rational::zero()
    };
    let hi = if x < y { x / y } else { one };
    Ok(Interval::closed(lo, hi).expect("lower form never exceeds upper form on unit inputs"))
}

/// Builds the witnessed extension set of `target` under the (possibly
/// open) premise box: an outer envelope from the closed hull and inner
/// achieved intervals from sampled coherent premise points.
pub fn extension_set(
    bx: &BoxAssessment,
    family: &[ConditionalEvent],
    target: &ConditionalEvent,
    config: &EngineConfig,
) -> Result<ExtensionSet, PropagationError> {
    if bx.len() != family.len() {
        return Err(PropagationError::LengthMismatch {
            family: family.len(),
            assessment: bx.len(),
        });
    }
    let (ok, trace) = closed_recursion(family, bx.intervals(), "", None)?;
    if !ok {
        return Err(PropagationError::NotGCoherent { trace });
    }
    let outer = propagate(family, &bx.closure(), target)?.interval;

    let mut achieved: Vec<(Rational, Rational, PreciseAssessment)> = Vec::new();
    let mut stream = PointStream::new(bx.intervals(), config.budget, config.seed);
    while let Some(point) = stream.next() {
        if !bx.contains_point(&point) {
            continue;
        }
        let pa = PreciseAssessment::new(point)?;
        if !check_coherence(&pa, family)?.coherent {
            continue;
        }
        let res = propagate_point(family, &pa, target)?;
        achieved.push((res.interval.lo().clone(), res.interval.hi().clone(), pa));
    }
    if achieved.is_empty() {
        return Err(PropagationError::NoWitnessFound {
            tried: config.budget,
        });
    }
    achieved.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut inner: Vec<AchievedInterval> = Vec::new();
    for (lo, hi, witness) in achieved {
        match inner.last_mut() {
            // closed intervals merge whenever they touch
            Some(last) if lo <= *last.interval.hi() => {
                if hi > *last.interval.hi() {
                    last.interval = Interval::closed(last.interval.lo().clone(), hi)
                        .expect("merge keeps order");
                    last.hi_witness = witness;
                }
            }
            _ => {
                inner.push(AchievedInterval {
                    interval: Interval::closed(lo, hi).expect("achieved interval is ordered"),
                    lo_witness: witness.clone(),
                    hi_witness: witness,
                });
            }
        }
    }
    Ok(ExtensionSet { inner, outer })
}
