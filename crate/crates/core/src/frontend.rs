//! The machine-description text format for Turing machines and
//! alternating Turing machines.
//!
//! Line oriented, `#`-prefixed comments:
//!
//! ```text
//! state <name> [initial] [accept|reject]
//! quantifier <state> forall|exists
//! symbol <sym>
//! delta <state> <sym> -> <state> <sym> L|R
//! ```
//!
//! `#` (blank) and `^` (head marker) are implicit alphabet members; in
//! a `delta` line they are written literally. Repeating a `delta` line
//! for the same `(state, symbol)` declares the successors of a
//! quantified state; deterministic states may not repeat. The
//! signal-machine backend is binary, so more than two successors are
//! rejected here.

use crate::atm::{AlternatingTm, Quantifier};
use crate::text::ParseError;
use crate::tm::{Direction, Transition, TuringMachine, Verdict};
use std::collections::{BTreeMap, BTreeSet};

/// Which machine kind a text describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontendKind {
    Tm,
    Atm,
}

/// Result of parsing: deterministic machines parse to [`TuringMachine`],
/// alternating ones to [`AlternatingTm`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrontendMachine {
    Tm(TuringMachine),
    Atm(AlternatingTm),
}

impl FrontendMachine {
    pub fn as_atm(&self) -> AlternatingTm {
        match self {
            FrontendMachine::Atm(atm) => atm.clone(),
            FrontendMachine::Tm(tm) => AlternatingTm {
                states: tm.states.clone(),
                initial: tm.initial.clone(),
                symbols: tm.symbols.clone(),
                quantifier: BTreeMap::new(),
                branches: tm
                    .transitions
                    .iter()
                    .map(|(k, t)| (k.clone(), vec![t.clone()]))
                    .collect(),
                finals: tm.finals.clone(),
            },
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column: 1,
        message: message.into(),
    }
}

fn parse_symbol_token(tok: &str) -> Option<char> {
    let mut chars = tok.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

/// Parses the text format. With [`FrontendKind::Tm`] any branching is
/// an error; with [`FrontendKind::Atm`] branching requires a quantifier
/// and at most two successors.
pub fn parse_frontend_text(
    text: &str,
    kind: FrontendKind,
) -> Result<FrontendMachine, Vec<ParseError>> {
    let mut errors: Vec<ParseError> = Vec::new();
    let mut states: BTreeSet<String> = BTreeSet::new();
    let mut initial: Option<String> = None;
    let mut finals: BTreeMap<String, Verdict> = BTreeMap::new();
    let mut symbols: BTreeSet<char> = BTreeSet::new();
    let mut quantifier: BTreeMap<String, Quantifier> = BTreeMap::new();
    let mut deltas: Vec<(usize, String, char, Transition)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        // `#` is also the blank-symbol token, so only whole-line
        // comments are recognized.
        if raw.trim_start().starts_with('#') {
            continue;
        }
        let words: Vec<&str> = raw.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        match words[0] {
            "state" => {
                if words.len() < 2 {
                    errors.push(err(lineno, "state needs a name"));
                    continue;
                }
                let name = words[1].to_string();
                if !states.insert(name.clone()) {
                    errors.push(err(lineno, format!("state `{name}` declared twice")));
                }
                for flag in &words[2..] {
                    match *flag {
                        "initial" => {
                            if initial.replace(name.clone()).is_some() {
                                errors.push(err(lineno, "two initial states"));
                            }
                        }
                        "accept" => {
                            finals.insert(name.clone(), Verdict::Accept);
                        }
                        "reject" => {
                            finals.insert(name.clone(), Verdict::Reject);
                        }
                        other => errors.push(err(lineno, format!("unknown state flag `{other}`"))),
                    }
                }
            }
            "symbol" => {
                if words.len() != 2 {
                    errors.push(err(lineno, "symbol takes one single-character token"));
                    continue;
                }
                match parse_symbol_token(words[1]) {
                    Some(c) if c != '#' && c != '^' => {
                        symbols.insert(c);
                    }
                    Some(_) => {} // implicit anyway
                    None => errors.push(err(lineno, "symbols are single characters")),
                }
            }
            "quantifier" => {
                if words.len() != 3 {
                    errors.push(err(lineno, "quantifier takes a state and forall|exists"));
                    continue;
                }
                let q = match words[2] {
                    "forall" => Quantifier::Universal,
                    "exists" => Quantifier::Existential,
                    other => {
                        errors.push(err(lineno, format!("unknown quantifier `{other}`")));
                        continue;
                    }
                };
                quantifier.insert(words[1].to_string(), q);
            }
            "delta" => {
                if words.len() != 7 || words[3] != "->" {
                    errors.push(err(
                        lineno,
                        "delta form: delta <state> <sym> -> <state> <sym> L|R",
                    ));
                    continue;
                }
                let (Some(read), Some(write)) =
                    (parse_symbol_token(words[2]), parse_symbol_token(words[5]))
                else {
                    errors.push(err(lineno, "symbols are single characters"));
                    continue;
                };
                let direction = match words[6] {
                    "L" => Direction::Left,
                    "R" => Direction::Right,
                    other => {
                        errors.push(err(lineno, format!("unknown direction `{other}`")));
                        continue;
                    }
                };
                deltas.push((
                    lineno,
                    words[1].to_string(),
                    read,
                    Transition {
                        state: words[4].to_string(),
                        write,
                        direction,
                    },
                ));
            }
            other => errors.push(err(lineno, format!("unknown directive `{other}`"))),
        }
    }

    let Some(initial) = initial else {
        errors.push(err(
            text.lines().count().max(1),
            "missing initial state (`state <name> initial`)",
        ));
        return Err(errors);
    };

    let alphabet: BTreeSet<char> = symbols.iter().copied().chain(['#', '^']).collect();
    let mut branches: BTreeMap<(String, char), Vec<Transition>> = BTreeMap::new();
    for (lineno, state, read, t) in deltas {
        if !states.contains(&state) {
            errors.push(err(lineno, format!("undeclared state `{state}`")));
            continue;
        }
        if !states.contains(&t.state) {
            errors.push(err(lineno, format!("undeclared state `{}`", t.state)));
            continue;
        }
        if !alphabet.contains(&read) || !alphabet.contains(&t.write) {
            errors.push(err(lineno, "undeclared symbol in delta"));
            continue;
        }
        let entry = branches.entry((state.clone(), read)).or_default();
        entry.push(t);
        if entry.len() >= 2 && !quantifier.contains_key(&state) {
            errors.push(err(
                lineno,
                format!("state `{state}` branches on `{read}` but has no quantifier"),
            ));
        }
        if entry.len() > 2 {
            errors.push(err(
                lineno,
                format!("more than two successors for {state}/{read}"),
            ));
        }
    }

    if kind == FrontendKind::Tm {
        if let Some(((state, read), _)) = branches.iter().find(|(_, succ)| succ.len() > 1) {
            errors.push(err(
                1,
                format!("deterministic machine branches on {state}/{read}"),
            ));
        }
        if !quantifier.is_empty() {
            errors.push(err(1, "deterministic machine carries quantifiers"));
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    match kind {
        FrontendKind::Tm => Ok(FrontendMachine::Tm(TuringMachine {
            states,
            initial,
            symbols,
            transitions: branches
                .into_iter()
                .map(|(k, mut succ)| (k, succ.remove(0)))
                .collect(),
            finals,
        })),
        FrontendKind::Atm => Ok(FrontendMachine::Atm(AlternatingTm {
            states,
            initial,
            symbols,
            quantifier,
            branches,
            finals,
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atm::zeros_div_2_and_3;

    pub const TABLE_ATM: &str = "\
state q0 initial
state q1
state q2
state q3
state q4
state q5
state qtrue1 accept
state qfalse1 reject
state qtrue3 accept
state qfalse3 reject
quantifier q0 forall
symbol 0
symbol 1
delta q0 ^ -> q1 ^ R
delta q0 ^ -> q3 ^ R
delta q1 0 -> q2 0 R
delta q1 1 -> q1 1 R
delta q1 # -> qtrue1 # L
delta q2 0 -> q1 0 R
delta q2 1 -> q2 1 R
delta q2 # -> qfalse1 # L
delta q3 0 -> q4 0 R
delta q3 1 -> q3 1 R
delta q3 # -> qtrue3 # L
delta q4 0 -> q5 0 R
delta q4 1 -> q4 1 R
delta q4 # -> qfalse3 # L
delta q5 0 -> q3 0 R
delta q5 1 -> q5 1 R
delta q5 # -> qfalse3 # L
";

    #[test]
    fn the_bundled_listing_is_the_worked_machine() {
        let parsed = parse_frontend_text(TABLE_ATM, FrontendKind::Atm).unwrap();
        let FrontendMachine::Atm(atm) = parsed else {
            panic!("expected an alternating machine")
        };
        assert_eq!(atm, zeros_div_2_and_3());
        let succ = &atm.branches[&("q0".to_string(), '^')];
        assert_eq!(succ.len(), 2);
        assert_eq!(succ[0].state, "q1");
        assert_eq!(succ[1].state, "q3");
    }

    #[test]
    fn branch_without_quantifier_is_an_error() {
        let text = "\
state a initial
state b
state c
delta a ^ -> b ^ R
delta a ^ -> c ^ R
";
        let errs = parse_frontend_text(text, FrontendKind::Atm).unwrap_err();
        assert!(errs.iter().any(|e| e.message.contains("no quantifier")));
    }

    #[test]
    fn empty_text_is_missing_initial_state() {
        let errs = parse_frontend_text("", FrontendKind::Atm).unwrap_err();
        assert!(errs[0].message.contains("missing initial state"));
    }

    #[test]
    fn three_successors_rejected() {
        let text = "\
state a initial
state b
quantifier a exists
delta a ^ -> b ^ R
delta a ^ -> b ^ L
delta a ^ -> a ^ R
";
        let errs = parse_frontend_text(text, FrontendKind::Atm).unwrap_err();
        assert!(errs.iter().any(|e| e.message.contains("more than two")));
    }

    #[test]
    fn tm_kind_rejects_branching() {
        let text = "\
state a initial
state b
quantifier a exists
delta a ^ -> b ^ R
delta a ^ -> a ^ R
";
        let errs = parse_frontend_text(text, FrontendKind::Tm).unwrap_err();
        assert!(!errs.is_empty());
    }

    #[test]
    fn undeclared_state_is_an_error() {
        let text = "\
state a initial
delta a ^ -> ghost ^ R
";
        let errs = parse_frontend_text(text, FrontendKind::Tm).unwrap_err();
        assert!(errs[0].message.contains("undeclared state `ghost`"));
    }
}
