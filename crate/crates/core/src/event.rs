//! Propositional events, conditional events, possible worlds, and the
//! inclusion ordering on conditionals.
//!
//! Semantic questions (equality, implication, contradiction) are decided by
//! full truth-table enumeration over the atoms involved, capped at
//! [`MAX_ATOMS`]. Exactness over scalability: this is a desk-scale engine.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Truth-table enumeration refuses formulas over more atoms than this.
pub const MAX_ATOMS: usize = 20;

/// Propositional formula over named atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Top,
    Bot,
    Atom(String),
    Not(Box<Event>),
    And(Box<Event>, Box<Event>),
    Or(Box<Event>, Box<Event>),
}

impl Event {
    pub fn atom(name: impl Into<String>) -> Event {
        Event::Atom(name.into())
    }

    pub fn not(self) -> Event {
        Event::Not(Box::new(self))
    }

    pub fn and(self, other: Event) -> Event {
        Event::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Event) -> Event {
        Event::Or(Box::new(self), Box::new(other))
    }

    /// Negation with double-negation elimination at the top level.
    pub fn negated(&self) -> Event {
        match self {
            Event::Not(inner) => (**inner).clone(),
            Event::Top => Event::Bot,
            Event::Bot => Event::Top,
            other => other.clone().not(),
        }
    }

    /// Atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.collect_atoms(&mut set);
        set
    }

    fn collect_atoms(&self, set: &mut BTreeSet<String>) {
        match self {
            Event::Top | Event::Bot => {}
            Event::Atom(name) => {
                set.insert(name.clone());
            }
            Event::Not(inner) => inner.collect_atoms(set),
            Event::And(a, b) | Event::Or(a, b) => {
                a.collect_atoms(set);
                b.collect_atoms(set);
            }
        }
    }
}

// Canonical display: `|` loosest, then `&`, then `!`; parentheses only where
// precedence requires them, so parsing the output rebuilds the same tree.
impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Top => write!(f, "TOP"),
            Event::Bot => write!(f, "BOT"),
            Event::Atom(name) => write!(f, "{name}"),
            Event::Not(inner) => {
                if matches!(**inner, Event::And(..) | Event::Or(..)) {
                    write!(f, "!({inner})")
                } else {
                    write!(f, "!{inner}")
                }
            }
            Event::And(a, b) => {
                let wrap = |e: &Event| matches!(e, Event::Or(..));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " & ")?;
                if wrap(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Event::Or(a, b) => write!(f, "{a} | {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventError {
    UnassignedAtom(String),
    TooManyAtoms { count: usize },
    ContradictoryAntecedent,
    EmptyFamily,
}

impl fmt::Display for EventError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventError::UnassignedAtom(name) => write!(f, "atom {name} is not assigned"),
            EventError::TooManyAtoms { count } => {
                write!(f, "{count} atoms exceed the cap of {MAX_ATOMS}")
            }
            EventError::ContradictoryAntecedent => {
                write!(f, "conditioning event is a contradiction")
            }
            EventError::EmptyFamily => write!(f, "family of conditional events is empty"),
        }
    }
}

impl core::error::Error for EventError {}

/// Total truth assignment to a set of atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct World {
    assignment: BTreeMap<String, bool>,
}

impl World {
    pub fn new(pairs: impl IntoIterator<Item = (String, bool)>) -> World {
        World {
            assignment: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, atom: &str) -> Option<bool> {
        self.assignment.get(atom).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, bool> {
        &self.assignment
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (atom, value)) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if !*value {
                write!(f, "!")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// Standard propositional semantics; `TOP` is true, `BOT` false.
pub fn eval_event(e: &Event, w: &World) -> Result<bool, EventError> {
    match e {
        Event::Top => Ok(true),
        Event::Bot => Ok(false),
        Event::Atom(name) => w
            .get(name)
            .ok_or_else(|| EventError::UnassignedAtom(name.clone())),
        Event::Not(inner) => Ok(!eval_event(inner, w)?),
        Event::And(a, b) => Ok(eval_event(a, w)? && eval_event(b, w)?),
        Event::Or(a, b) => Ok(eval_event(a, w)? || eval_event(b, w)?),
    }
}

// Bit-level evaluation for truth-table sweeps: atom k of the sorted atom list
// reads bit (n-1-k), so the first atom is the most significant bit.
fn eval_bits(e: &Event, index: &BTreeMap<&str, usize>, bits: u32) -> bool {
    match e {
        Event::Top => true,
        Event::Bot => false,
        Event::Atom(name) => {
            let k = index[name.as_str()];
            let n = index.len();
            bits >> (n - 1 - k) & 1 == 1
        }
        Event::Not(inner) => !eval_bits(inner, index, bits),
        Event::And(a, b) => eval_bits(a, index, bits) && eval_bits(b, index, bits),
        Event::Or(a, b) => eval_bits(a, index, bits) || eval_bits(b, index, bits),
    }
}

fn atom_index(atoms: &BTreeSet<String>) -> Result<BTreeMap<&str, usize>, EventError> {
    if atoms.len() > MAX_ATOMS {
        return Err(EventError::TooManyAtoms { count: atoms.len() });
    }
    Ok(atoms
        .iter()
        .enumerate()
        .map(|(k, name)| (name.as_str(), k))
        .collect())
}

fn union_atoms(events: &[&Event]) -> BTreeSet<String> {
    let mut atoms = BTreeSet::new();
    for e in events {
        e.collect_atoms(&mut atoms);
    }
    atoms
}

/// `true` iff no assignment satisfies `e`.
pub fn is_contradiction(e: &Event) -> Result<bool, EventError> {
    let atoms = e.atoms();
    let index = atom_index(&atoms)?;
    let n = atoms.len() as u32;
    Ok((0..1u32 << n).all(|bits| !eval_bits(e, &index, bits)))
}

/// `true` iff every assignment over the combined atoms satisfying `a` also
/// satisfies `b`.
pub fn semantically_implies(a: &Event, b: &Event) -> Result<bool, EventError> {
    let atoms = union_atoms(&[a, b]);
    let index = atom_index(&atoms)?;
    let n = atoms.len() as u32;
    Ok((0..1u32 << n).all(|bits| !eval_bits(a, &index, bits) || eval_bits(b, &index, bits)))
}

/// Truth-table equality over the combined atoms.
pub fn semantically_equal(a: &Event, b: &Event) -> Result<bool, EventError> {
    let atoms = union_atoms(&[a, b]);
    let index = atom_index(&atoms)?;
    let n = atoms.len() as u32;
    Ok((0..1u32 << n).all(|bits| eval_bits(a, &index, bits) == eval_bits(b, &index, bits)))
}

/// Conditional event: consequent judged under a non-contradictory
/// conditioning event. Three-valued: true where both hold, false where the
/// conditioning event holds without the consequent, void elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalEvent {
    consequent: Event,
    antecedent: Event,
}

impl ConditionalEvent {
    pub fn new(consequent: Event, antecedent: Event) -> Result<ConditionalEvent, EventError> {
        if is_contradiction(&antecedent)? {
            return Err(EventError::ContradictoryAntecedent);
        }
        Ok(ConditionalEvent {
            consequent,
            antecedent,
        })
    }

    pub fn consequent(&self) -> &Event {
        &self.consequent
    }

    pub fn antecedent(&self) -> &Event {
        &self.antecedent
    }

    /// Atoms of both components.
    pub fn atoms(&self) -> BTreeSet<String> {
        union_atoms(&[&self.consequent, &self.antecedent])
    }
}

impl fmt::Display for ConditionalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}]", self.consequent, self.antecedent)
    }
}

/// Worlds over the union of the family's atoms that satisfy the disjunction
/// of its conditioning events.
///
/// Order: bitmasks descending with the alphabetically first atom as the most
/// significant bit, so the all-true world comes first.
pub fn constituents(family: &[ConditionalEvent]) -> Result<Vec<World>, EventError> {
    if family.is_empty() {
        return Err(EventError::EmptyFamily);
    }
    let mut atoms = BTreeSet::new();
    for ce in family {
        ce.consequent.collect_atoms(&mut atoms);
        ce.antecedent.collect_atoms(&mut atoms);
    }
    let index = atom_index(&atoms)?;
    let n = atoms.len() as u32;
    let names: Vec<&String> = atoms.iter().collect();
    let mut worlds = Vec::new();
    for bits in (0..1u32 << n).rev() {
        let in_h0 = family
            .iter()
            .any(|ce| eval_bits(&ce.antecedent, &index, bits));
        if !in_h0 {
            continue;
        }
        worlds.push(World::new(names.iter().enumerate().map(|(k, name)| {
            ((*name).clone(), bits >> (n as usize - 1 - k) & 1 == 1)
        })));
    }
    Ok(worlds)
}

/// Inclusion ordering on conditional events: `c1` is included in `c2` iff
/// `c1` true forces `c2` true and `c2` false forces `c1` false. Coherence
/// makes probability monotone along this ordering.
pub fn gn_included(c1: &ConditionalEvent, c2: &ConditionalEvent) -> Result<bool, EventError> {
    let t1 = c1.consequent.clone().and(c1.antecedent.clone());
    let t2 = c2.consequent.clone().and(c2.antecedent.clone());
    let f1 = c1.consequent.negated().and(c1.antecedent.clone());
    let f2 = c2.consequent.negated().and(c2.antecedent.clone());
    Ok(semantically_implies(&t1, &t2)? && semantically_implies(&f2, &f1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn atom(s: &str) -> Event {
        Event::atom(s)
    }

    fn world(pairs: &[(&str, bool)]) -> World {
        World::new(pairs.iter().map(|(a, v)| (a.to_string(), *v)))
    }

    #[test]
    fn eval_follows_propositional_semantics() {
        let w = world(&[("A", true), ("B", false)]);
        assert!(!eval_event(&atom("A").and(atom("B")), &w).unwrap());
        let w2 = world(&[("A", false), ("B", false)]);
        assert!(eval_event(&atom("A").not().or(atom("B")), &w2).unwrap());
        let w3 = world(&[("A", false), ("B", true)]);
        assert!(eval_event(&atom("A").or(atom("B")), &w3).unwrap());
        assert!(eval_event(&Event::Top, &w).unwrap());
        assert!(!eval_event(&Event::Bot, &w).unwrap());
    }

    #[test]
    fn eval_reports_unassigned_atom() {
        let w = world(&[("A", true)]);
        assert_eq!(
            eval_event(&atom("C"), &w),
            Err(EventError::UnassignedAtom("C".to_string()))
        );
    }

    #[test]
    fn constituent_enumeration_is_true_first() {
        let family = vec![
            ConditionalEvent::new(atom("C"), atom("B")).unwrap(),
            ConditionalEvent::new(atom("B"), atom("A")).unwrap(),
            ConditionalEvent::new(atom("A"), atom("A").or(atom("B"))).unwrap(),
            ConditionalEvent::new(atom("C"), atom("A")).unwrap(),
        ];
        let worlds = constituents(&family).unwrap();
        let expected = [
            [true, true, true],
            [true, true, false],
            [true, false, true],
            [true, false, false],
            [false, true, true],
            [false, true, false],
        ];
        assert_eq!(worlds.len(), 6);
        for (w, exp) in worlds.iter().zip(expected) {
            assert_eq!(w.get("A"), Some(exp[0]));
            assert_eq!(w.get("B"), Some(exp[1]));
            assert_eq!(w.get("C"), Some(exp[2]));
        }
    }

    #[test]
    fn constituents_restrict_to_conditioning_disjunction() {
        let family = vec![
            ConditionalEvent::new(atom("B"), atom("A")).unwrap(),
            ConditionalEvent::new(atom("C"), atom("A")).unwrap(),
        ];
        let worlds = constituents(&family).unwrap();
        assert_eq!(worlds.len(), 4);
        assert!(worlds.iter().all(|w| w.get("A") == Some(true)));

        let unconditional = vec![ConditionalEvent::new(atom("A"), Event::Top).unwrap()];
        assert_eq!(constituents(&unconditional).unwrap().len(), 2);
    }

    #[test]
    fn constituent_count_plus_excluded_is_full_table() {
        let family = vec![
            ConditionalEvent::new(atom("C"), atom("B")).unwrap(),
            ConditionalEvent::new(atom("B"), atom("A")).unwrap(),
        ];
        let worlds = constituents(&family).unwrap();
        // three atoms, worlds outside A|B excluded
        assert_eq!(worlds.len(), 6);
        assert_eq!(8 - worlds.len(), 2);
    }

    #[test]
    fn inclusion_ordering() {
        let a_given_b = ConditionalEvent::new(atom("A"), atom("B")).unwrap();
        let a_given_ab = ConditionalEvent::new(atom("A"), atom("A").or(atom("B"))).unwrap();
        let b_given_a = ConditionalEvent::new(atom("B"), atom("A")).unwrap();
        assert!(gn_included(&a_given_b, &a_given_ab).unwrap());
        assert!(gn_included(&a_given_b, &a_given_b).unwrap());
        assert!(!gn_included(&a_given_b, &b_given_a).unwrap());
    }

    #[test]
    fn mutual_inclusion_means_equal_truth_tables() {
        let c1 = ConditionalEvent::new(atom("A"), atom("B")).unwrap();
        let c2 = ConditionalEvent::new(atom("A").and(atom("B")), atom("B")).unwrap();
        assert!(gn_included(&c1, &c2).unwrap());
        assert!(gn_included(&c2, &c1).unwrap());
    }

    #[test]
    fn contradiction_antecedent_rejected() {
        let bot = atom("A").and(atom("A").not());
        assert_eq!(
            ConditionalEvent::new(atom("B"), bot),
            Err(EventError::ContradictoryAntecedent)
        );
        assert_eq!(
            ConditionalEvent::new(atom("B"), Event::Bot),
            Err(EventError::ContradictoryAntecedent)
        );
    }

    #[test]
    fn atom_cap_is_enforced() {
        let mut e = atom("a0");
        for i in 1..21 {
            e = e.or(atom(&alloc::format!("a{i}")));
        }
        assert_eq!(e.atoms().len(), 21);
        assert_eq!(
            is_contradiction(&e),
            Err(EventError::TooManyAtoms { count: 21 })
        );
    }

    #[test]
    fn semantic_equality_ignores_shape() {
        let ab = atom("A").or(atom("B"));
        let ba = atom("B").or(atom("A"));
        assert!(semantically_equal(&ab, &ba).unwrap());
        let demorgan = atom("A").not().and(atom("B").not());
        assert!(semantically_equal(&ab.clone().not(), &demorgan).unwrap());
        assert!(!semantically_equal(&ab, &atom("A")).unwrap());
    }

    #[test]
    fn display_round_trip_shape() {
        let e = atom("A").or(atom("B")).and(atom("C").not());
        assert_eq!(e.to_string(), "(A | B) & !C");
        let f = atom("A").or(atom("B").and(atom("C")));
        assert_eq!(f.to_string(), "A | B & C");
        let g = atom("A").and(atom("B")).not();
        assert_eq!(g.to_string(), "!(A & B)");
    }

    #[test]
    fn negated_eliminates_double_negation() {
        let e = atom("A").not();
        assert_eq!(e.negated(), atom("A"));
        assert_eq!(atom("A").negated(), atom("A").not());
        assert_eq!(Event::Top.negated(), Event::Bot);
    }
}
