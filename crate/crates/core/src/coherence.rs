//! Coherence checking of precise and interval-valued assessments.
//!
//! The engine builds constituent mass systems and runs the zero-layer
//! recursion: solve the system, maximize the mass of every conditioning
//! event over its solutions, and restrict to the sub-family whose mass is
//! forced to zero. The active set strictly shrinks (the masses sum to at
//! least the unit total), so the recursion terminates in at most one level
//! per family member.
//!
//! Interval endpoints may be open. Open bounds are never certified by
//! limits of the closed system: a strict witness is searched and verified
//! exactly, and its absence is reported as `Unknown` rather than guessed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::event::{constituents, eval_event, ConditionalEvent, Event, EventError, World};
use crate::lp::{
    feasible, lp_solve, Feasibility, LinearProgram, LpError, LpOutcome, Sense, SolvedProgram,
};
use crate::rational::{in_unit, Rational};
use crate::EngineConfig;

/// Families longer than this are refused by the vertex-based total
/// coherence check (it runs `2^n` coherence checks).
pub const MAX_TOTAL_COHERENCE_FAMILY: usize = 12;

/// Rational interval with per-endpoint openness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    lo_open: bool,
    hi_open: bool,
}

impl Interval {
    pub fn new(
        lo: Rational,
        hi: Rational,
        lo_open: bool,
        hi_open: bool,
    ) -> Result<Interval, CoherenceError> {
        if lo > hi {
            return Err(CoherenceError::EmptyInterval);
        }
        if lo == hi && (lo_open || hi_open) {
            return Err(CoherenceError::EmptyInterval);
        }
        Ok(Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Interval, CoherenceError> {
        Interval::new(lo, hi, false, false)
    }

    pub fn point(v: Rational) -> Interval {
        Interval {
            lo: v.clone(),
            hi: v,
            lo_open: false,
            hi_open: false,
        }
    }

    /// `[0,1]`
    pub fn unit() -> Interval {
        Interval::closed(Rational::zero(), Rational::one()).expect("unit interval")
    }

    /// `[0,1[`
    pub fn unit_below_one() -> Interval {
        Interval::new(Rational::zero(), Rational::one(), false, true).expect("half-open unit")
    }

    /// `]0,1]`
    pub fn unit_above_zero() -> Interval {
        Interval::new(Rational::zero(), Rational::one(), true, false).expect("half-open unit")
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_closed(&self) -> bool {
        !self.lo_open && !self.hi_open
    }

    pub fn closure(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let above = if self.lo_open {
            *v > self.lo
        } else {
            *v >= self.lo
        };
        let below = if self.hi_open {
            *v < self.hi
        } else {
            *v <= self.hi
        };
        above && below
    }

    /// Every member of `self` is a member of `other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        let lo_ok = match self.lo.cmp(&other.lo) {
            core::cmp::Ordering::Greater => true,
            core::cmp::Ordering::Equal => self.lo_open || !other.lo_open,
            core::cmp::Ordering::Less => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Equal => self.hi_open || !other.hi_open,
            core::cmp::Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_open { "]" } else { "[" },
            crate::rational::format_rational(&self.lo),
            crate::rational::format_rational(&self.hi),
            if self.hi_open { "[" } else { "]" },
        )
    }
}

/// Ordered product of probability intervals, aligned with a family of
/// conditional events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxAssessment {
    intervals: Vec<Interval>,
}

impl BoxAssessment {
    pub fn new(intervals: Vec<Interval>) -> Result<BoxAssessment, CoherenceError> {
        for (index, iv) in intervals.iter().enumerate() {
            if !in_unit(&iv.lo) || !in_unit(&iv.hi) {
                return Err(CoherenceError::ValueOutOfRange { index });
            }
        }
        Ok(BoxAssessment { intervals })
    }

    /// Box with a single-point interval per coordinate.
    pub fn point(values: &[Rational]) -> Result<BoxAssessment, CoherenceError> {
        BoxAssessment::new(values.iter().cloned().map(Interval::point).collect())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.intervals.iter().all(Interval::is_closed)
    }

    pub fn closure(&self) -> BoxAssessment {
        BoxAssessment {
            intervals: self.intervals.iter().map(Interval::closure).collect(),
        }
    }

    pub fn contains_point(&self, point: &[Rational]) -> bool {
        point.len() == self.intervals.len()
            && self
                .intervals
                .iter()
                .zip(point)
                .all(|(iv, v)| iv.contains(v))
    }
}

/// Precise probability assessment: one unit-range rational per family
/// member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreciseAssessment {
    values: Vec<Rational>,
}

impl PreciseAssessment {
    pub fn new(values: Vec<Rational>) -> Result<PreciseAssessment, CoherenceError> {
        for (index, v) in values.iter().enumerate() {
            if !in_unit(v) {
                return Err(CoherenceError::ValueOutOfRange { index });
            }
        }
        Ok(PreciseAssessment { values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoherenceError {
    LengthMismatch { family: usize, assessment: usize },
    ValueOutOfRange { index: usize },
    EmptyInterval,
    FamilyTooLarge { len: usize, max: usize },
    Event(EventError),
    Lp(LpError),
}

impl fmt::Display for CoherenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoherenceError::LengthMismatch { family, assessment } => write!(
                f,
                "assessment of length {assessment} does not fit family of length {family}"
            ),
            CoherenceError::ValueOutOfRange { index } => {
                write!(f, "value {index} outside [0,1]")
            }
            CoherenceError::EmptyInterval => write!(f, "interval is empty"),
            CoherenceError::FamilyTooLarge { len, max } => {
                write!(f, "family of {len} exceeds the vertex-check cap of {max}")
            }
            CoherenceError::Event(e) => write!(f, "{e}"),
            CoherenceError::Lp(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CoherenceError {}

impl From<EventError> for CoherenceError {
    fn from(e: EventError) -> CoherenceError {
        CoherenceError::Event(e)
    }
}

impl From<LpError> for CoherenceError {
    fn from(e: LpError) -> CoherenceError {
        CoherenceError::Lp(e)
    }
}

/// One level of the zero-layer recursion. Indices refer to the original
/// family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLevel {
    pub active: Vec<usize>,
    pub feasible: bool,
    /// Maximum mass of each active conditioning event over the system's
    /// solutions.
    pub maxima: Vec<(usize, Rational)>,
    /// Active indices whose mass maximum is zero.
    pub zero_set: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZeroLayerTrace {
    pub levels: Vec<TraceLevel>,
}

/// Verdict of a precise coherence check together with its recursion trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceCheck {
    pub coherent: bool,
    pub trace: ZeroLayerTrace,
}

// 0/1 indicator row of an event over the constituent list.
pub(crate) fn indicator(worlds: &[World], e: &Event) -> Result<Vec<Rational>, EventError> {
    worlds
        .iter()
        .map(|w| {
            eval_event(e, w).map(|v| if v { Rational::one() } else { Rational::zero() })
        })
        .collect()
}

// Rows tying the mass of consequent-and-antecedent to the mass of the
// antecedent. A point value yields one equality; interval bounds yield one
// inequality per non-trivial side.
pub(crate) fn push_assessment_rows(
    lp: &mut LinearProgram,
    worlds: &[World],
    ce: &ConditionalEvent,
    iv: &Interval,
) -> Result<(), EventError> {
    let both = ce.consequent().clone().and(ce.antecedent().clone());
    let num = indicator(worlds, &both)?;
    let den = indicator(worlds, ce.antecedent())?;
    let row = |scale: &Rational| -> Vec<Rational> {
        num.iter()
            .zip(&den)
            .map(|(a, b)| a - &(scale * b))
            .collect()
    };
    if iv.is_point() {
        lp.push_eq(row(iv.lo()), Rational::zero());
        return Ok(());
    }
    if *iv.lo() > Rational::zero() {
        lp.push_ge(row(iv.lo()), Rational::zero());
    }
    if *iv.hi() < Rational::one() {
        lp.push_le(row(iv.hi()), Rational::zero());
    }
    Ok(())
}

// Constituent mass system of the closed box over the given sub-family: the
// assessment rows plus unit total mass.
fn build_system(
    family: &[ConditionalEvent],
    intervals: &[Interval],
    worlds: &[World],
) -> Result<LinearProgram, CoherenceError> {
    let mut lp = LinearProgram::feasibility(worlds.len());
    for (ce, iv) in family.iter().zip(intervals) {
        push_assessment_rows(&mut lp, worlds, ce, &iv.closure())?;
    }
    lp.push_eq(vec![Rational::one(); worlds.len()], Rational::one());
    Ok(lp)
}

// Feasibility restated as a recordable zero-objective solve.
pub(crate) fn feasibility_outcome(f: &Feasibility) -> LpOutcome {
    match f {
        Feasibility::Feasible(w) => LpOutcome::Optimal {
            value: Rational::zero(),
            witness: w.clone(),
        },
        Feasibility::Infeasible => LpOutcome::Infeasible,
    }
}

// Zero-layer recursion over the closed system. Decides solvability level by
// level; for fully closed boxes the verdict is exact, for open boxes it is
// the closure relaxation. Every solved program is appended to `rec` when a
// recorder is supplied, labeled under `tag`.
pub(crate) fn closed_recursion(
    family: &[ConditionalEvent],
    intervals: &[Interval],
    tag: &str,
    mut rec: Option<&mut Vec<SolvedProgram>>,
) -> Result<(bool, ZeroLayerTrace), CoherenceError> {
    let mut active: Vec<usize> = (0..family.len()).collect();
    let mut trace = ZeroLayerTrace::default();
    let mut depth = 0usize;
    loop {
        let fam: Vec<ConditionalEvent> = active.iter().map(|i| family[*i].clone()).collect();
        let ivs: Vec<Interval> = active.iter().map(|i| intervals[*i].clone()).collect();
        let worlds = constituents(&fam)?;
        let lp = build_system(&fam, &ivs, &worlds)?;
        let feas = feasible(&lp)?;
        if let Some(r) = rec.as_deref_mut() {
            r.push(SolvedProgram {
                label: alloc::format!("{tag} level {depth} system"),
                outcome: feasibility_outcome(&feas),
                lp: lp.clone(),
            });
        }
        if matches!(feas, Feasibility::Infeasible) {
            trace.levels.push(TraceLevel {
                active,
                feasible: false,
                maxima: Vec::new(),
                zero_set: Vec::new(),
            });
            return Ok((false, trace));
        }
        let mut maxima = Vec::new();
        let mut zero_set = Vec::new();
        for (local, orig) in active.iter().enumerate() {
            let mut max_lp = lp.clone();
            max_lp.objective = indicator(&worlds, fam[local].antecedent())?;
            max_lp.sense = Sense::Max;
            let outcome = lp_solve(&max_lp)?;
            if let Some(r) = rec.as_deref_mut() {
                r.push(SolvedProgram {
                    label: alloc::format!("{tag} level {depth} max mass {orig}"),
                    lp: max_lp,
                    outcome: outcome.clone(),
                });
            }
            let value = match outcome {
                LpOutcome::Optimal { value, .. } => value,
                // mass is capped by the unit total, so the maximum exists
                other => unreachable!("bounded mass maximization: {other:?}"),
            };
            if value.is_zero() {
                zero_set.push(*orig);
            }
            maxima.push((*orig, value));
        }
        trace.levels.push(TraceLevel {
            active: active.clone(),
            feasible: true,
            maxima,
            zero_set: zero_set.clone(),
        });
        if zero_set.is_empty() {
            return Ok((true, trace));
        }
        // the masses of the active conditioning events cover the unit total,
        // so at least one maximum is positive
        assert!(zero_set.len() < active.len());
        active = zero_set;
        depth += 1;
    }
}

/// Checks coherence of a precise assessment on a family of conditional
/// events via the zero-layer recursion.
pub fn check_coherence(
    assessment: &PreciseAssessment,
    family: &[ConditionalEvent],
) -> Result<CoherenceCheck, CoherenceError> {
    if assessment.len() != family.len() {
        return Err(CoherenceError::LengthMismatch {
            family: family.len(),
            assessment: assessment.len(),
        });
    }
    let intervals: Vec<Interval> = assessment
        .values()
        .iter()
        .cloned()
        .map(Interval::point)
        .collect();
    let (coherent, trace) = closed_recursion(family, &intervals, "", None)?;
    Ok(CoherenceCheck { coherent, trace })
}

/// Outcome of a g-coherence check of an interval-valued assessment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GCoherenceResult {
    /// A verified coherent point strictly inside the box.
    GCoherent { witness: PreciseAssessment },
    /// The closed relaxation is already unsolvable, which refutes the open
    /// box as well.
    NotGCoherent { trace: ZeroLayerTrace },
    /// The closed relaxation is solvable but no strict witness surfaced
    /// within the budget.
    Unknown,
}

/// G-coherence of a box assessment: does some coherent precise assessment
/// lie inside it (open endpoints respected strictly)?
pub fn check_g_coherence_box(
    bx: &BoxAssessment,
    family: &[ConditionalEvent],
    config: &EngineConfig,
) -> Result<GCoherenceResult, CoherenceError> {
    if bx.len() != family.len() {
        return Err(CoherenceError::LengthMismatch {
            family: family.len(),
            assessment: bx.len(),
        });
    }
    let (closure_ok, trace) = closed_recursion(family, bx.intervals(), "", None)?;
    if !closure_ok {
        return Ok(GCoherenceResult::NotGCoherent { trace });
    }
    let mut stream = PointStream::new(bx.intervals(), config.budget, config.seed);
    while let Some(point) = stream.next() {
        if !bx.contains_point(&point) {
            continue;
        }
        let candidate = PreciseAssessment::new(point)?;
        if check_coherence(&candidate, family)?.coherent {
            return Ok(GCoherenceResult::GCoherent { witness: candidate });
        }
    }
    Ok(GCoherenceResult::Unknown)
}

/// Certifies total coherence of the full unit box on the family by checking
/// coherence of every 0/1 vertex.
pub fn total_coherence_unit_box(family: &[ConditionalEvent]) -> Result<bool, CoherenceError> {
    if family.len() > MAX_TOTAL_COHERENCE_FAMILY {
        return Err(CoherenceError::FamilyTooLarge {
            len: family.len(),
            max: MAX_TOTAL_COHERENCE_FAMILY,
        });
    }
    let n = family.len();
    for mask in 0..1u32 << n {
        let values: Vec<Rational> = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let assessment = PreciseAssessment::new(values)?;
        if !check_coherence(&assessment, family)?.coherent {
            return Ok(false);
        }
    }
    Ok(true)
}

// Finite deterministic candidate values inside an interval: closed lower
// endpoint first, dyadic steps in from each open endpoint, closed upper
// endpoint after the lower-side candidates.
pub(crate) fn interval_candidates(iv: &Interval) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    let mut push = |v: Rational| {
        if !out.contains(&v) {
            out.push(v);
        }
    };
    if iv.is_point() {
        return vec![iv.lo().clone()];
    }
    let width = iv.hi() - iv.lo();
    let mut step = width.clone();
    if iv.lo_open() {
        for _ in 0..16 {
            step = step / Rational::from_integer(2.into());
            push(iv.lo() + &step);
        }
    } else {
        push(iv.lo().clone());
    }
    if iv.hi_open() {
        let mut step = width;
        for _ in 0..16 {
            step = step / Rational::from_integer(2.into());
            push(iv.hi() - &step);
        }
    } else {
        push(iv.hi().clone());
    }
    out
}

// Budgeted stream of candidate points of a box: the product of the
// per-interval candidate lists enumerated in depth layers (every coordinate
// index at most d, some coordinate index exactly d), then seeded uniform
// rational samples strictly inside each non-point interval.
pub(crate) struct PointStream {
    deterministic: Vec<Vec<Rational>>,
    next_det: usize,
    intervals: Vec<Interval>,
    rng: ChaCha12Rng,
    remaining: usize,
}

impl PointStream {
    pub(crate) fn new(intervals: &[Interval], budget: usize, seed: u64) -> PointStream {
        let lists: Vec<Vec<Rational>> = intervals.iter().map(interval_candidates).collect();
        let max_len = lists.iter().map(Vec::len).max().unwrap_or(0);
        let mut deterministic = Vec::new();
        'layers: for d in 0..max_len {
            let mut current: Vec<Rational> = Vec::with_capacity(lists.len());
            layer_tuples(&lists, d, 0, false, &mut current, &mut deterministic);
            if deterministic.len() >= budget {
                break 'layers;
            }
        }
        deterministic.truncate(budget);
        // an all-point box has a single candidate; re-drawing it adds nothing
        let remaining = if intervals.iter().all(Interval::is_point) {
            budget.min(1)
        } else {
            budget
        };
        PointStream {
            deterministic,
            next_det: 0,
            intervals: intervals.to_vec(),
            rng: ChaCha12Rng::seed_from_u64(seed),
            remaining,
        }
    }

    pub(crate) fn next(&mut self) -> Option<Vec<Rational>> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        if self.next_det < self.deterministic.len() {
            let point = self.deterministic[self.next_det].clone();
            self.next_det += 1;
            return Some(point);
        }
        let point = self
            .intervals
            .iter()
            .map(|iv| {
                if iv.is_point() {
                    iv.lo().clone()
                } else {
                    // strictly interior, so openness is always respected
                    let k = self.rng.gen_range(1..65536u32);
                    let frac = Rational::new(k.into(), 65536.into());
                    iv.lo() + (iv.hi() - iv.lo()) * frac
                }
            })
            .collect();
        Some(point)
    }
}

fn layer_tuples(
    lists: &[Vec<Rational>],
    d: usize,
    pos: usize,
    hit: bool,
    current: &mut Vec<Rational>,
    out: &mut Vec<Vec<Rational>>,
) {
    if pos == lists.len() {
        if hit {
            out.push(current.clone());
        }
        return;
    }
    let limit = d.min(lists[pos].len().saturating_sub(1));
    for idx in 0..=limit {
        current.push(lists[pos][idx].clone());
        layer_tuples(lists, d, pos + 1, hit || idx == d, current, out);
        current.pop();
    }
}
