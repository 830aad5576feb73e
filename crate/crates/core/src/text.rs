//! The machine-definition text format.
//!
//! One directive per line; `#` starts a comment. Three directives:
//!
//! ```text
//! metasignal <name> <speed>
//! rule <name>+<name>[+<name>...] -> [<name>[+<name>...]]
//! initial <position> <name>
//! ```
//!
//! Speeds and positions use the rational text form (`p/q`, sign
//! optional, bare `p` means `p/1`). An empty right-hand side of a rule
//! is a void collision. Names are ASCII identifiers that may contain
//! `-` and digits.

use crate::machine::{Configuration, SignalMachine};
use crate::rational::Rational;
use std::collections::BTreeSet;
use std::fmt;

/// A parse problem with its source position (1-based line and column).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        && s.chars().next().is_some_and(|c| c != '-')
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Parses a machine definition and its initial configuration.
///
/// All errors are collected, each with line and column. Rules may only
/// reference declared meta-signals; redeclaring a rule for the same
/// input set is an error (the rule table is a function).
pub fn parse_machine_text(text: &str) -> Result<(SignalMachine, Configuration), Vec<ParseError>> {
    let mut machine = SignalMachine::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut rule_keys: BTreeSet<BTreeSet<String>> = BTreeSet::new();
    let mut placements: Vec<(Rational, String)> = Vec::new();
    let mut errors: Vec<ParseError> = Vec::new();

    // First pass gathers declarations so rules can be checked against
    // them regardless of line order.
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let mut words = line.split_whitespace();
        let Some(head) = words.next() else { continue };
        if head != "metasignal" {
            continue;
        }
        let col = head.len() + 2;
        let Some(name) = words.next() else {
            errors.push(err(lineno, col, "metasignal needs a name and a speed"));
            continue;
        };
        if !is_name(name) {
            errors.push(err(lineno, col, format!("invalid name `{name}`")));
            continue;
        }
        let Some(speed_text) = words.next() else {
            errors.push(err(lineno, col, format!("metasignal `{name}` is missing its speed")));
            continue;
        };
        match speed_text.parse::<Rational>() {
            Ok(speed) => {
                if names.contains(name) {
                    errors.push(err(lineno, col, format!("meta-signal `{name}` declared twice")));
                } else {
                    names.insert(name.to_string());
                    machine.add_metasignal(name, speed);
                }
            }
            Err(e) => errors.push(err(lineno, col, format!("bad speed `{speed_text}`: {e}"))),
        }
        if let Some(extra) = words.next() {
            errors.push(err(lineno, col, format!("unexpected trailing `{extra}`")));
        }
    }

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let mut words = line.split_whitespace();
        let Some(head) = words.next() else { continue };
        let col = 1;
        match head {
            "metasignal" => {}
            "rule" => {
                let rest: Vec<&str> = words.collect();
                let joined = rest.join(" ");
                let Some((lhs, rhs)) = joined.split_once("->") else {
                    errors.push(err(lineno, col, "rule needs `->`"));
                    continue;
                };
                let inputs: Vec<String> = lhs
                    .split('+')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                let outputs: Vec<String> = rhs
                    .split('+')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if inputs.len() < 2 {
                    errors.push(err(
                        lineno,
                        col,
                        "a rule needs at least two input meta-signals",
                    ));
                    continue;
                }
                let mut ok = true;
                for n in inputs.iter().chain(outputs.iter()) {
                    if !is_name(n) {
                        errors.push(err(lineno, col, format!("invalid name `{n}`")));
                        ok = false;
                    } else if !names.contains(n) {
                        errors.push(err(lineno, col, format!("undeclared meta-signal `{n}`")));
                        ok = false;
                    }
                }
                if !ok {
                    continue;
                }
                let key: BTreeSet<String> = inputs.iter().cloned().collect();
                if !rule_keys.insert(key.clone()) {
                    errors.push(err(
                        lineno,
                        col,
                        format!("duplicate rule for `{}`", inputs.join("+")),
                    ));
                    continue;
                }
                machine.add_rule(inputs, outputs);
            }
            "initial" => {
                let Some(pos_text) = words.next() else {
                    errors.push(err(lineno, col, "initial needs a position and a name"));
                    continue;
                };
                let Some(name) = words.next() else {
                    errors.push(err(lineno, col, "initial is missing its meta-signal name"));
                    continue;
                };
                match pos_text.parse::<Rational>() {
                    Ok(pos) => {
                        if !names.contains(name) {
                            errors.push(err(lineno, col, format!("undeclared meta-signal `{name}`")));
                        } else {
                            placements.push((pos, name.to_string()));
                        }
                    }
                    Err(e) => errors.push(err(lineno, col, format!("bad position `{pos_text}`: {e}"))),
                }
            }
            other => {
                errors.push(err(lineno, col, format!("unknown directive `{other}`")));
            }
        }
    }

    if errors.is_empty() {
        Ok((machine, Configuration::at_origin(placements)))
    } else {
        Err(errors)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Serializes a machine and configuration back to the text format in
/// canonical order: meta-signals sorted by name, rules by input set,
/// placements by position. Parsing the output yields an equivalent
/// machine, and serialize-of-parse is a fixed point.
pub fn serialize_machine(machine: &SignalMachine, config: &Configuration) -> String {
    let mut out = String::new();
    let mut metas: Vec<_> = machine.metasignals().to_vec();
    metas.sort_by(|a, b| a.name.cmp(&b.name));
    for m in &metas {
        out.push_str(&format!("metasignal {} {}\n", m.name, m.speed));
    }
    for rule in machine.rules() {
        let lhs: Vec<&str> = rule.inputs.iter().map(|s| s.as_str()).collect();
        let rhs: Vec<&str> = rule.outputs.iter().map(|s| s.as_str()).collect();
        if rhs.is_empty() {
            out.push_str(&format!("rule {} ->\n", lhs.join("+")));
        } else {
            out.push_str(&format!("rule {} -> {}\n", lhs.join("+"), rhs.join("+")));
        }
    }
    let mut placements = config.placements.clone();
    placements.sort_by(|a, b| a.position.cmp(&b.position));
    for p in &placements {
        out.push_str(&format!("initial {} {}\n", p.position, p.metasignal));
    }
    out
}
