//! Runs a program's queries against the engine and renders the results
//! as a text report or as deterministic JSON.

use coherence_core::{
    extension_set, format_rational, kb_to_assessment, p_consistent, p_entails, propagate,
    BoxAssessment, ConsistencyStatus, ConsistencyVerdict, EngineConfig, EntailmentStatus,
    EntailmentVerdict, ExtensionSet, Interval, KnowledgeBase, PreciseAssessment,
    PropagationResult, Rational, ZeroLayerTrace,
};
use serde_json::{Map, Value};

use crate::program::{Program, Query};

pub struct Report {
    pub results: Vec<QueryResult>,
    /// Include zero-layer traces in the rendered output.
    pub trace: bool,
}

pub struct QueryResult {
    /// The query in surface syntax.
    pub query: String,
    pub kind: &'static str,
    /// Whether the query's expectation was met: `entails` wants ENTAILED,
    /// `notentails` wants NOT_ENTAILED, `pconsistent` wants a witness,
    /// `bounds` and `extension` want a computed result. UNKNOWN never
    /// counts as met.
    pub ok: bool,
    pub detail: Detail,
}

pub enum Detail {
    Consistency(ConsistencyVerdict),
    Entailment(EntailmentVerdict),
    Bounds(PropagationResult),
    Extension(ExtensionSet),
    /// The engine rejected the query's inputs; reported per query, never
    /// as a crash.
    Failure(String),
}

pub fn run_program(program: &Program, config: &EngineConfig, trace: bool) -> Report {
    let results = program
        .queries
        .iter()
        .map(|query| run_query(program, query, config))
        .collect();
    Report { results, trace }
}

fn base_of(program: &Program) -> Result<KnowledgeBase, String> {
    KnowledgeBase::new(program.statements.clone()).map_err(|e| e.to_string())
}

fn run_query(program: &Program, query: &Query, config: &EngineConfig) -> QueryResult {
    let text = query.to_string();
    let (kind, ok, detail) = match query {
        Query::PConsistent => run_pconsistent(program, config),
        Query::Entails(conclusion) => run_entailment(program, query, conclusion, config),
        Query::NotEntails(conclusion) => run_entailment(program, query, conclusion, config),
        Query::Bounds { target, premises } => {
            let family: Vec<_> = premises.iter().map(|(ce, _)| ce.clone()).collect();
            let intervals: Vec<_> = premises.iter().map(|(_, iv)| iv.clone()).collect();
            let outcome = BoxAssessment::new(intervals)
                .map_err(|e| e.to_string())
                .and_then(|bx| propagate(&family, &bx, target).map_err(|e| e.to_string()));
            match outcome {
                Ok(result) => ("bounds", true, Detail::Bounds(result)),
                Err(msg) => ("bounds", false, Detail::Failure(msg)),
            }
        }
        Query::Extension { target } => {
            let outcome = base_of(program).and_then(|base| {
                let (family, bx) = kb_to_assessment(&base);
                extension_set(&bx, &family, target, config).map_err(|e| e.to_string())
            });
            match outcome {
                Ok(ext) => ("extension", true, Detail::Extension(ext)),
                Err(msg) => ("extension", false, Detail::Failure(msg)),
            }
        }
    };
    QueryResult { query: text, kind, ok, detail }
}

fn run_pconsistent(program: &Program, config: &EngineConfig) -> (&'static str, bool, Detail) {
    let outcome = base_of(program)
        .and_then(|base| p_consistent(&base, config).map_err(|e| e.to_string()));
    match outcome {
        Ok(verdict) => {
            let ok = matches!(verdict.status, ConsistencyStatus::PConsistent { .. });
            ("pconsistent", ok, Detail::Consistency(verdict))
        }
        Err(msg) => ("pconsistent", false, Detail::Failure(msg)),
    }
}

fn run_entailment(
    program: &Program,
    query: &Query,
    conclusion: &coherence_core::Statement,
    config: &EngineConfig,
) -> (&'static str, bool, Detail) {
    let want_entailed = matches!(query, Query::Entails(_));
    let kind = if want_entailed { "entails" } else { "notentails" };
    let outcome = base_of(program)
        .and_then(|base| p_entails(&base, conclusion, config).map_err(|e| e.to_string()));
    match outcome {
        Ok(verdict) => {
            let ok = match verdict.status {
                EntailmentStatus::Entailed { .. } => want_entailed,
                EntailmentStatus::NotEntailed { .. } => !want_entailed,
                EntailmentStatus::Unknown => false,
            };
            (kind, ok, Detail::Entailment(verdict))
        }
        Err(msg) => (kind, false, Detail::Failure(msg)),
    }
}

impl Report {
    pub fn all_ok(&self) -> bool {
        self.results.iter().all(|r| r.ok)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&r.query);
            out.push('\n');
            self.detail_text(&mut out, &r.detail);
            out.push_str(if r.ok { "=> ok\n\n" } else { "=> failed\n\n" });
        }
        out.push_str(if self.all_ok() {
            "all queries ok\n"
        } else {
            "some queries failed\n"
        });
        out
    }

    fn detail_text(&self, out: &mut String, detail: &Detail) {
        match detail {
            Detail::Consistency(v) => match &v.status {
                ConsistencyStatus::PConsistent { witness } => {
                    out.push_str("status: P_CONSISTENT\n");
                    out.push_str(&format!("witness: {}\n", point_text(witness)));
                }
                ConsistencyStatus::NotPConsistent { trace } => {
                    out.push_str("status: NOT_P_CONSISTENT\n");
                    if self.trace {
                        trace_text(out, "trace", trace);
                    }
                }
                ConsistencyStatus::Unknown => out.push_str("status: UNKNOWN\n"),
            },
            Detail::Entailment(v) => match &v.status {
                EntailmentStatus::Entailed { certificate } => {
                    out.push_str("status: ENTAILED\n");
                    let indices: Vec<String> =
                        certificate.premise_indices.iter().map(|i| i.to_string()).collect();
                    out.push_str(&format!(
                        "certificate: {} (premises {})\n",
                        certificate.rule,
                        indices.join(", ")
                    ));
                }
                EntailmentStatus::NotEntailed { counterexample } => {
                    out.push_str("status: NOT_ENTAILED\n");
                    out.push_str(&format!(
                        "counterexample: premises {} extend to z = {}\n",
                        point_text(&counterexample.premise_values),
                        format_rational(&counterexample.z)
                    ));
                    out.push_str(&format!(
                        "extension interval: {}\n",
                        interval_text(&counterexample.extension_interval)
                    ));
                }
                EntailmentStatus::Unknown => out.push_str("status: UNKNOWN\n"),
            },
            Detail::Bounds(result) => {
                out.push_str(&format!("z_lo: {}\n", format_rational(result.interval.lo())));
                out.push_str(&format!("z_hi: {}\n", format_rational(result.interval.hi())));
                out.push_str(&format!(
                    "branch: lower {}, upper {}\n",
                    result.lower.branch, result.upper.branch
                ));
                if self.trace {
                    trace_text(out, "lower trace", &result.lower.trace);
                    trace_text(out, "upper trace", &result.upper.trace);
                }
            }
            Detail::Extension(ext) => {
                out.push_str(&format!("outer: {}\n", interval_text(&ext.outer)));
                if ext.inner.is_empty() {
                    out.push_str("inner: none found within budget\n");
                }
                for piece in &ext.inner {
                    out.push_str(&format!(
                        "inner: {} (lo at {}, hi at {})\n",
                        interval_text(&piece.interval),
                        point_text(&piece.lo_witness),
                        point_text(&piece.hi_witness)
                    ));
                }
            }
            Detail::Failure(msg) => {
                out.push_str(&format!("error: {msg}\n"));
            }
        }
    }

    pub fn to_json(&self) -> String {
        let queries: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                obj.insert("query".to_string(), Value::String(r.query.clone()));
                obj.insert("kind".to_string(), Value::String(r.kind.to_string()));
                obj.insert("ok".to_string(), Value::Bool(r.ok));
                self.detail_json(&mut obj, &r.detail);
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("ok".to_string(), Value::Bool(self.all_ok()));
        top.insert("queries".to_string(), Value::Array(queries));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serialization");
        s.push('\n');
        s
    }

    fn detail_json(&self, obj: &mut Map<String, Value>, detail: &Detail) {
        match detail {
            Detail::Consistency(v) => match &v.status {
                ConsistencyStatus::PConsistent { witness } => {
                    obj.insert("status".to_string(), Value::String("P_CONSISTENT".to_string()));
                    obj.insert("witness".to_string(), point_json(witness));
                }
                ConsistencyStatus::NotPConsistent { trace } => {
                    obj.insert(
                        "status".to_string(),
                        Value::String("NOT_P_CONSISTENT".to_string()),
                    );
                    if self.trace {
                        obj.insert("trace".to_string(), trace_json(trace));
                    }
                }
                ConsistencyStatus::Unknown => {
                    obj.insert("status".to_string(), Value::String("UNKNOWN".to_string()));
                }
            },
            Detail::Entailment(v) => match &v.status {
                EntailmentStatus::Entailed { certificate } => {
                    obj.insert("status".to_string(), Value::String("ENTAILED".to_string()));
                    let mut cert = Map::new();
                    cert.insert(
                        "rule".to_string(),
                        Value::String(certificate.rule.to_string()),
                    );
                    cert.insert(
                        "premises".to_string(),
                        Value::Array(
                            certificate
                                .premise_indices
                                .iter()
                                .map(|i| Value::Number((*i as u64).into()))
                                .collect(),
                        ),
                    );
                    obj.insert("certificate".to_string(), Value::Object(cert));
                }
                EntailmentStatus::NotEntailed { counterexample } => {
                    obj.insert("status".to_string(), Value::String("NOT_ENTAILED".to_string()));
                    let mut ce = Map::new();
                    ce.insert("point".to_string(), point_json(&counterexample.premise_values));
                    ce.insert(
                        "z".to_string(),
                        Value::String(format_rational(&counterexample.z)),
                    );
                    ce.insert(
                        "interval".to_string(),
                        interval_json(&counterexample.extension_interval),
                    );
                    obj.insert("counterexample".to_string(), Value::Object(ce));
                }
                EntailmentStatus::Unknown => {
                    obj.insert("status".to_string(), Value::String("UNKNOWN".to_string()));
                }
            },
            Detail::Bounds(result) => {
                obj.insert(
                    "z_lo".to_string(),
                    Value::String(format_rational(result.interval.lo())),
                );
                obj.insert(
                    "z_hi".to_string(),
                    Value::String(format_rational(result.interval.hi())),
                );
                let mut branch = Map::new();
                branch.insert(
                    "lower".to_string(),
                    Value::String(result.lower.branch.to_string()),
                );
                branch.insert(
                    "upper".to_string(),
                    Value::String(result.upper.branch.to_string()),
                );
                obj.insert("branch".to_string(), Value::Object(branch));
                if self.trace {
                    let mut traces = Map::new();
                    traces.insert("lower".to_string(), trace_json(&result.lower.trace));
                    traces.insert("upper".to_string(), trace_json(&result.upper.trace));
                    obj.insert("trace".to_string(), Value::Object(traces));
                }
            }
            Detail::Extension(ext) => {
                obj.insert("outer".to_string(), interval_json(&ext.outer));
                obj.insert(
                    "inner".to_string(),
                    Value::Array(
                        ext.inner
                            .iter()
                            .map(|piece| {
                                let mut p = Map::new();
                                p.insert(
                                    "z_lo".to_string(),
                                    Value::String(format_rational(piece.interval.lo())),
                                );
                                p.insert(
                                    "z_hi".to_string(),
                                    Value::String(format_rational(piece.interval.hi())),
                                );
                                p.insert("lo_witness".to_string(), point_json(&piece.lo_witness));
                                p.insert("hi_witness".to_string(), point_json(&piece.hi_witness));
                                Value::Object(p)
                            })
                            .collect(),
                    ),
                );
            }
            Detail::Failure(msg) => {
                obj.insert("error".to_string(), Value::String(msg.clone()));
            }
        }
    }
}

fn point_text(point: &PreciseAssessment) -> String {
    let parts: Vec<String> = point.values().iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Closed intervals render as `[lo, hi]`; open ends swap the bracket for
/// a parenthesis.
fn interval_text(iv: &Interval) -> String {
    let lo = if iv.lo_open() { '(' } else { '[' };
    let hi = if iv.hi_open() { ')' } else { ']' };
    format!(
        "{}{}, {}{}",
        lo,
        format_rational(iv.lo()),
        format_rational(iv.hi()),
        hi
    )
}

fn point_json(point: &PreciseAssessment) -> Value {
    Value::Array(
        point
            .values()
            .iter()
            .map(|v| Value::String(format_rational(v)))
            .collect(),
    )
}

fn interval_json(iv: &Interval) -> Value {
    let mut obj = Map::new();
    obj.insert("z_lo".to_string(), Value::String(format_rational(iv.lo())));
    obj.insert("z_hi".to_string(), Value::String(format_rational(iv.hi())));
    Value::Object(obj)
}

fn rational_pair_json(index: usize, value: &Rational) -> Value {
    let mut obj = Map::new();
    obj.insert("index".to_string(), Value::Number((index as u64).into()));
    obj.insert("value".to_string(), Value::String(format_rational(value)));
    Value::Object(obj)
}

fn trace_json(trace: &ZeroLayerTrace) -> Value {
    let levels: Vec<Value> = trace
        .levels
        .iter()
        .map(|level| {
            let mut obj = Map::new();
            obj.insert(
                "active".to_string(),
                Value::Array(
                    level
                        .active
                        .iter()
                        .map(|i| Value::Number((*i as u64).into()))
                        .collect(),
                ),
            );
            obj.insert("feasible".to_string(), Value::Bool(level.feasible));
            obj.insert(
                "maxima".to_string(),
                Value::Array(
                    level
                        .maxima
                        .iter()
                        .map(|(i, m)| rational_pair_json(*i, m))
                        .collect(),
                ),
            );
            obj.insert(
                "zero_set".to_string(),
                Value::Array(
                    level
                        .zero_set
                        .iter()
                        .map(|i| Value::Number((*i as u64).into()))
                        .collect(),
                ),
            );
            Value::Object(obj)
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("levels".to_string(), Value::Array(levels));
    Value::Object(obj)
}

fn trace_text(out: &mut String, label: &str, trace: &ZeroLayerTrace) {
    for (i, level) in trace.levels.iter().enumerate() {
        let maxima: Vec<String> = level
            .maxima
            .iter()
            .map(|(idx, m)| format!("{idx}={}", format_rational(m)))
            .collect();
        out.push_str(&format!(
            "{label} level {i}: active {:?}, {}, maxima [{}], zero {:?}\n",
            level.active,
            if level.feasible { "feasible" } else { "infeasible" },
            maxima.join(", "),
            level.zero_set
        ));
    }
}
