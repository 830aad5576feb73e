//! Signal machine definitions: meta-signals, collision rules,
//! configurations, and validation.
//!
//! A machine is a finite set of named meta-signals, each with a constant
//! speed, plus a partial function from sets of meta-signals to sets of
//! meta-signals (the collision rules). Signals are instances of
//! meta-signals placed on the space axis. A collision among signals whose
//! meta-signal set has a rule is replaced by the rule's outputs; a
//! collision with no rule is blank and the signals pass through
//! unchanged.

use crate::geom::Point;
use crate::rational::Rational;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A declared signal kind: unique name plus constant speed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaSignal {
    pub name: String,
    pub speed: Rational,
}

/// One collision rule: at least two input meta-signals mapped to a
/// (possibly empty) output set. Empty output is a void collision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionRule {
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
}

/// The result of looking up a colliding set in the rule table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOutcome {
    /// A rule is defined; the collision is replaced by these outputs.
    Defined(BTreeSet<String>),
    /// No rule: the signals continue unchanged (the input set is
    /// returned as-is).
    Blank(BTreeSet<String>),
}

/// A full signal machine: the meta-signal table and the rule table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignalMachine {
    metasignals: Vec<MetaSignal>,
    index: BTreeMap<String, usize>,
    rules: BTreeMap<BTreeSet<String>, CollisionRule>,
}

/// An invariant violation found by [`SignalMachine::validate`].
/// Violations are data, not failures; an empty list means the machine is
/// well formed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateName { name: String },
    RuleArity { rule: String },
    UndeclaredName { rule: String, name: String },
    EqualSpeedOutputs { rule: String, a: String, b: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateName { name } => {
                write!(f, "meta-signal `{name}` declared more than once")
            }
            Violation::RuleArity { rule } => {
                write!(f, "rule `{rule}` needs at least two input meta-signals")
            }
            Violation::UndeclaredName { rule, name } => {
                write!(f, "rule `{rule}` references undeclared meta-signal `{name}`")
            }
            Violation::EqualSpeedOutputs { rule, a, b } => {
                write!(
                    f,
                    "rule `{rule}` outputs `{a}` and `{b}` with equal speed; they would overlap forever"
                )
            }
        }
    }
}

/// Error raised by rule lookup on undeclared names.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown meta-signal `{0}`")]
pub struct UnknownMetaSignal(pub String);

fn rule_label(inputs: &BTreeSet<String>) -> String {
    inputs.iter().cloned().collect::<Vec<_>>().join("+")
}

impl SignalMachine {
    pub fn new() -> SignalMachine {
        SignalMachine::default()
    }

    /// Declares a meta-signal. Duplicate names are kept so that
    /// `validate` can report them; lookups resolve to the first
    /// declaration.
    pub fn add_metasignal(&mut self, name: impl Into<String>, speed: Rational) {
        let name = name.into();
        let at = self.metasignals.len();
        self.metasignals.push(MetaSignal {
            name: name.clone(),
            speed,
        });
        self.index.entry(name).or_insert(at);
    }

    /// Adds a rule keyed by its input set. A later rule on the same set
    /// replaces the earlier one (R is a function).
    pub fn add_rule(&mut self, inputs: impl IntoIterator<Item = String>, outputs: impl IntoIterator<Item = String>) {
        let inputs: BTreeSet<String> = inputs.into_iter().collect();
        let outputs: BTreeSet<String> = outputs.into_iter().collect();
        self.rules.insert(
            inputs.clone(),
            CollisionRule { inputs, outputs },
        );
    }

    pub fn metasignals(&self) -> &[MetaSignal] {
        &self.metasignals
    }

    pub fn rules(&self) -> impl Iterator<Item = &CollisionRule> {
        self.rules.values()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn speed_of(&self, name: &str) -> Result<&Rational, UnknownMetaSignal> {
        self.index
            .get(name)
            .map(|&i| &self.metasignals[i].speed)
            .ok_or_else(|| UnknownMetaSignal(name.to_string()))
    }

    /// Largest absolute speed over all meta-signals (zero for an empty
    /// machine). Construction generators use this to place sweeps above
    /// every computation signal.
    pub fn max_abs_speed(&self) -> Rational {
        self.metasignals
            .iter()
            .map(|m| m.speed.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Looks up the rule for a colliding set. A defined rule yields its
    /// outputs; an undefined set is a blank collision and the inputs
    /// pass through.
    pub fn lookup_rule(&self, colliding: &BTreeSet<String>) -> Result<RuleOutcome, UnknownMetaSignal> {
        for name in colliding {
            if !self.contains(name) {
                return Err(UnknownMetaSignal(name.clone()));
            }
        }
        match self.rules.get(colliding) {
            Some(rule) => Ok(RuleOutcome::Defined(rule.outputs.clone())),
            None => Ok(RuleOutcome::Blank(colliding.clone())),
        }
    }

    /// Checks every machine invariant and reports each violation.
    ///
    /// Two outputs of one rule with equal speed are rejected: both are
    /// born at the collision point, so they would coincide forever. An
    /// output that merely matches the speed of a (dying) input is fine —
    /// it continues the input's trajectory.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for m in &self.metasignals {
            if !seen.insert(m.name.clone()) {
                out.push(Violation::DuplicateName {
                    name: m.name.clone(),
                });
            }
        }
        for rule in self.rules.values() {
            let label = rule_label(&rule.inputs);
            if rule.inputs.len() < 2 {
                out.push(Violation::RuleArity {
                    rule: label.clone(),
                });
            }
            for name in rule.inputs.iter().chain(rule.outputs.iter()) {
                if !self.contains(name) {
                    out.push(Violation::UndeclaredName {
                        rule: label.clone(),
                        name: name.clone(),
                    });
                }
            }
            let outs: Vec<&String> = rule.outputs.iter().filter(|n| self.contains(n)).collect();
            for i in 0..outs.len() {
                for j in i + 1..outs.len() {
                    if self.speed_of(outs[i]).unwrap() == self.speed_of(outs[j]).unwrap() {
                        out.push(Violation::EqualSpeedOutputs {
                            rule: label.clone(),
                            a: outs[i].clone(),
                            b: outs[j].clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

/// One signal in a configuration: where it is now, what it is, and where
/// it was born.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub position: Rational,
    pub metasignal: String,
    pub birth: Point,
}

/// The finite set of signals present at one instant, sorted by position.
/// Between collision events no two signals coincide.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Configuration {
    pub time: Rational,
    pub placements: Vec<Placement>,
}

impl Configuration {
    pub fn empty() -> Configuration {
        Configuration {
            time: Rational::zero(),
            placements: Vec::new(),
        }
    }

    /// Builds a time-zero configuration from `(position, name)` pairs.
    pub fn at_origin(placements: impl IntoIterator<Item = (Rational, String)>) -> Configuration {
        let mut placements: Vec<Placement> = placements
            .into_iter()
            .map(|(position, metasignal)| Placement {
                birth: Point::new(position.clone(), Rational::zero()),
                position,
                metasignal,
            })
            .collect();
        placements.sort_by(|a, b| a.position.cmp(&b.position));
        Configuration {
            time: Rational::zero(),
            placements,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    /// Positions must be pairwise distinct and every name declared.
    pub fn validate(&self, machine: &SignalMachine) -> Vec<String> {
        let mut problems = Vec::new();
        for pair in self.placements.windows(2) {
            if pair[0].position == pair[1].position {
                problems.push(format!(
                    "signals `{}` and `{}` share position {}",
                    pair[0].metasignal, pair[1].metasignal, pair[0].position
                ));
            }
        }
        for p in &self.placements {
            if !machine.contains(&p.metasignal) {
                problems.push(format!("undeclared meta-signal `{}` placed", p.metasignal));
            }
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, Rational};

    /// The four-signal worked example: a and d at speed 1, b at -1,
    /// c at 0; a+b -> d, then d+c is void.
    pub fn simple_example() -> (SignalMachine, Configuration) {
        let mut m = SignalMachine::new();
        m.add_metasignal("a", Rational::int(1));
        m.add_metasignal("b", Rational::int(-1));
        m.add_metasignal("c", Rational::zero());
        m.add_metasignal("d", Rational::int(1));
        m.add_rule(["a".into(), "b".into()], ["d".into()]);
        m.add_rule(["d".into(), "c".into()], Vec::<String>::new());
        let c = Configuration::at_origin([
            (Rational::int(-1), "a".into()),
            (Rational::int(1), "b".into()),
            (Rational::int(2), "c".into()),
        ]);
        (m, c)
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn defined_blank_and_void_lookups() {
        let (m, _) = simple_example();
        assert_eq!(
            m.lookup_rule(&set(&["a", "b"])).unwrap(),
            RuleOutcome::Defined(set(&["d"]))
        );
        assert_eq!(
            m.lookup_rule(&set(&["d", "c"])).unwrap(),
            RuleOutcome::Defined(BTreeSet::new())
        );
        assert_eq!(
            m.lookup_rule(&set(&["a", "c"])).unwrap(),
            RuleOutcome::Blank(set(&["a", "c"]))
        );
        assert_eq!(
            m.lookup_rule(&set(&["a", "nope"])),
            Err(UnknownMetaSignal("nope".into()))
        );
    }

    #[test]
    fn well_formed_machine_validates_clean() {
        let (m, c) = simple_example();
        assert!(m.validate().is_empty());
        assert!(c.validate(&m).is_empty());
    }

    #[test]
    fn arity_violation_reported() {
        let mut m = SignalMachine::new();
        m.add_metasignal("a", Rational::int(1));
        m.add_metasignal("b", Rational::int(2));
        m.add_rule(["a".into()], ["b".into()]);
        assert_eq!(
            m.validate(),
            vec![Violation::RuleArity { rule: "a".into() }]
        );
    }

    #[test]
    fn duplicate_name_reported() {
        let mut m = SignalMachine::new();
        m.add_metasignal("a", Rational::int(1));
        m.add_metasignal("a", Rational::int(2));
        assert_eq!(
            m.validate(),
            vec![Violation::DuplicateName { name: "a".into() }]
        );
    }

    #[test]
    fn equal_speed_outputs_rejected() {
        let mut m = SignalMachine::new();
        m.add_metasignal("a", Rational::int(1));
        m.add_metasignal("b", Rational::int(-1));
        m.add_metasignal("u", rat(1, 2));
        m.add_metasignal("v", rat(1, 2));
        m.add_rule(["a".into(), "b".into()], ["u".into(), "v".into()]);
        assert_eq!(
            m.validate(),
            vec![Violation::EqualSpeedOutputs {
                rule: "a+b".into(),
                a: "u".into(),
                b: "v".into()
            }]
        );
    }

    #[test]
    fn co_located_placements_rejected() {
        let (m, _) = simple_example();
        let c = Configuration::at_origin([
            (Rational::zero(), "a".into()),
            (Rational::zero(), "b".into()),
        ]);
        assert_eq!(c.validate(&m).len(), 1);
    }
}
