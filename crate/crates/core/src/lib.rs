//! Exact-arithmetic engine for reasoning about conditional events: coherence
//! checking of precise and interval-valued probability assessments,
//! propagation of lower/upper probability bounds to further conditional
//! events, and knowledge bases of defaults and negated defaults with
//! certified entailment.
//!
//! No floating point enters any decision path: every probability, system
//! coefficient, and optimum is an arbitrary-precision rational.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coherence;
pub mod event;
pub mod kb;
pub mod lp;
pub mod parse;
pub mod propagation;
pub mod rational;

pub use coherence::{
    check_coherence, check_g_coherence_box, total_coherence_unit_box, BoxAssessment,
    CoherenceCheck, CoherenceError, GCoherenceResult, Interval, PreciseAssessment, TraceLevel,
    ZeroLayerTrace, MAX_TOTAL_COHERENCE_FAMILY,
};
pub use event::{
    constituents, eval_event, gn_included, ConditionalEvent, Event, EventError, World,
};
pub use kb::{
    conjugate, kb_to_assessment, p_consistent, p_entails, Certificate, CertifiedRule,
    ConsistencyStatus, ConsistencyVerdict, Counterexample, EntailmentStatus, EntailmentVerdict,
    KbError, KnowledgeBase, Statement, StatementKind,
};
pub use lp::{
    feasible, lp_solve, Constraint, Feasibility, LinearProgram, LpError, LpOutcome, Relation,
    Sense, SolvedProgram,
};
pub use propagation::{
    cm_bounds, extension_set, propagate, propagate_point, propagate_recorded, wt_bounds,
    AchievedInterval, DirectionReport, ExtensionSet, PropagationBranch, PropagationError,
    PropagationResult,
};
pub use rational::{format_rational, in_unit, parse_rational, rat, NumberError, Rational};

/// Search and verification parameters shared by the witness, counterexample,
/// and certificate machinery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Candidate points tried per witness or counterexample search.
    pub budget: usize,
    /// Seed for the random phase of candidate generation.
    pub seed: u64,
    /// Denominator of the re-verification grid used by entailment
    /// certificates.
    pub grid_denom: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            budget: 1000,
            seed: 0,
            grid_denom: 4,
        }
    }
}
