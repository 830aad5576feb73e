//! Deterministic Turing machines: model, direct interpreter, compiler
//! onto signal machines, and result decoder.
//!
//! The tape model is semi-infinite: cell 0 holds the head marker `^`,
//! the input follows, and the tape grows rightward on demand with blank
//! `#` cells. A machine halts by entering a final state; by convention
//! final transitions move left, and in the compiled signal machine the
//! final-state head then sweeps leftward out of the computation — every
//! collision on its way out is blank, so the verdict "diffuses" freely
//! and can be read off the final configuration.
//!
//! # Encoding
//!
//! Each tape cell is a standing (speed 0) symbol signal at an integer
//! position. For every state `q` there are two head meta-signals,
//! `q-R` at speed 1 and `q-L` at speed -1. Reading cell `i` is the
//! collision of the head signal with the symbol signal there; the rule
//! writes the replacement symbol and sends the successor head onward.
//!
//! Five more meta-signals manage the tape: the `border` standing one
//! cell right of the written tape, and the extension crew `x`, `y`,
//! `z`, `zp`. When a head reads the border (a blank read), the rule
//! writes the new cell and lets the crew rebuild the border one cell
//! further right: `x` (speed -4) bounces off the neighbouring cell into
//! `y` (speed +4), which catches a drifter launched from the collision
//! (speed 4/3) exactly one cell spacing right of the old border. `z` is
//! the drifter used when the head leaves the border moving left, `zp`
//! its counterpart when the head continues right; the split makes the
//! two extension cases distinguishable in a diagram. The meeting point
//! is determined by speed ratios alone, so the construction also works
//! on scaled copies of a tape, where the cell spacing is not 1.
//!
//! The meta-signal count of a compiled machine is exactly
//! `2|Q| + |Γ| + 5`.

use crate::engine::SpaceTimeDiagram;
use crate::machine::{Configuration, SignalMachine};
use crate::rational::{rat, Rational};
use std::collections::{BTreeMap, BTreeSet};

/// Movement of the head after a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Left,
    Right,
}

/// Verdict carried by a final state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Accept,
    Reject,
}

/// One transition: next state, written symbol, head move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub state: String,
    pub write: char,
    pub direction: Direction,
}

/// A deterministic Turing machine over single-character symbols.
/// `#` (blank) and `^` (head marker) are always in the alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: BTreeSet<String>,
    pub initial: String,
    pub symbols: BTreeSet<char>,
    pub transitions: BTreeMap<(String, char), Transition>,
    pub finals: BTreeMap<String, Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TmError {
    #[error("input symbol `{0}` is not in the tape alphabet")]
    BadInputSymbol(char),
    #[error("no transition from state `{state}` on `{symbol}`")]
    Stuck { state: String, symbol: char },
    #[error("head moved left off the tape in non-final state `{0}`")]
    LeftEdgeEscape(String),
    #[error("step limit {0} exceeded")]
    StepLimitExceeded(usize),
    #[error("machine is not well formed: {0}")]
    Invalid(String),
}

/// Outcome of a completed deterministic run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmOutcome {
    pub verdict: Verdict,
    pub final_state: String,
    pub final_tape: Vec<char>,
    pub steps: usize,
}

impl TuringMachine {
    /// Full alphabet: declared symbols plus the implicit `#` and `^`.
    pub fn alphabet(&self) -> BTreeSet<char> {
        let mut a = self.symbols.clone();
        a.insert('#');
        a.insert('^');
        a
    }

    pub fn is_final(&self, state: &str) -> bool {
        self.finals.contains_key(state)
    }

    /// Structural checks: initial state declared, transitions reference
    /// declared states and symbols, no transitions out of final states.
    pub fn validate(&self) -> Result<(), TmError> {
        if !self.states.contains(&self.initial) {
            return Err(TmError::Invalid(format!(
                "initial state `{}` is not declared",
                self.initial
            )));
        }
        let alphabet = self.alphabet();
        for ((state, symbol), t) in &self.transitions {
            if self.is_final(state) {
                return Err(TmError::Invalid(format!(
                    "final state `{state}` has an outgoing transition"
                )));
            }
            if !self.states.contains(state) || !self.states.contains(&t.state) {
                return Err(TmError::Invalid(format!(
                    "transition {state}/{symbol} references an undeclared state"
                )));
            }
            if !alphabet.contains(symbol) || !alphabet.contains(&t.write) {
                return Err(TmError::Invalid(format!(
                    "transition {state}/{symbol} references an undeclared symbol"
                )));
            }
        }
        Ok(())
    }

    pub fn check_input(&self, input: &str) -> Result<(), TmError> {
        let alphabet = self.alphabet();
        for c in input.chars() {
            if c == '#' || c == '^' || !alphabet.contains(&c) {
                return Err(TmError::BadInputSymbol(c));
            }
        }
        Ok(())
    }
}

/// Runs the machine directly on a framed tape `^ input`, extending with
/// `#` on demand. This is the brute-force oracle the compiled signal
/// machines are checked against.
pub fn run_tm_direct(tm: &TuringMachine, input: &str, step_limit: usize) -> Result<TmOutcome, TmError> {
    tm.validate()?;
    tm.check_input(input)?;
    let mut tape: Vec<char> = std::iter::once('^').chain(input.chars()).collect();
    let mut head: usize = 0;
    let mut state = tm.initial.clone();
    let mut steps = 0usize;
    while !tm.is_final(&state) {
        if steps >= step_limit {
            return Err(TmError::StepLimitExceeded(step_limit));
        }
        if head >= tape.len() {
            tape.resize(head + 1, '#');
        }
        let symbol = tape[head];
        let t = tm
            .transitions
            .get(&(state.clone(), symbol))
            .ok_or(TmError::Stuck {
                state: state.clone(),
                symbol,
            })?
            .clone();
        tape[head] = t.write;
        match t.direction {
            Direction::Right => head += 1,
            Direction::Left => {
                if head == 0 {
                    if tm.is_final(&t.state) {
                        // The verdict leaves the tape to the left; the
                        // tape itself is complete at this point.
                        state = t.state;
                        steps += 1;
                        break;
                    }
                    return Err(TmError::LeftEdgeEscape(t.state));
                }
                head -= 1;
            }
        }
        state = t.state;
        steps += 1;
    }
    let verdict = tm.finals[&state];
    Ok(TmOutcome {
        verdict,
        final_state: state,
        final_tape: tape,
        steps,
    })
}

// ---- naming convention shared by the TM and ATM compilers ----

pub(crate) fn sym_name(prefix: &str, c: char) -> String {
    match c {
        '^' => format!("{prefix}sym-caret"),
        '#' => format!("{prefix}sym-blank"),
        other => format!("{prefix}sym-{other}"),
    }
}

pub(crate) fn head_name(prefix: &str, state: &str, dir: Direction) -> String {
    match dir {
        Direction::Right => format!("{prefix}{state}-R"),
        Direction::Left => format!("{prefix}{state}-L"),
    }
}

pub(crate) fn border_name(prefix: &str) -> String {
    format!("{prefix}border")
}

pub(crate) fn crew_speeds() -> [(&'static str, Rational); 4] {
    [
        ("x", rat(-4, 1)),
        ("y", rat(4, 1)),
        ("z", rat(4, 3)),
        ("zp", rat(4, 3)),
    ]
}

/// Decodes a head meta-signal name back to `(state, direction)` given
/// a namespace prefix.
pub(crate) fn parse_head_name<'a>(prefix: &str, name: &'a str) -> Option<(&'a str, Direction)> {
    let rest = name.strip_prefix(prefix)?;
    if let Some(state) = rest.strip_suffix("-R") {
        Some((state, Direction::Right))
    } else {
        rest.strip_suffix("-L").map(|state| (state, Direction::Left))
    }
}

pub(crate) fn parse_sym_name(prefix: &str, name: &str) -> Option<char> {
    let rest = name.strip_prefix(prefix)?;
    let tail = rest.strip_prefix("sym-")?;
    match tail {
        "caret" => Some('^'),
        "blank" => Some('#'),
        other => {
            let mut it = other.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Some(c),
                _ => None,
            }
        }
    }
}

/// The meta-signal and rule family of one TM, namespaced by `prefix`.
/// Shared by [`compile_tm`] and the alternating-machine compiler, which
/// instantiates one family per branch copy.
pub(crate) struct TmFamily {
    pub metasignals: Vec<(String, Rational)>,
    pub rules: Vec<(Vec<String>, Vec<String>)>,
}

/// Emits the family, skipping read rules for the `(state, symbol)`
/// pairs in `skip`: those are the branching reads that the alternating
/// compiler wires to the copy scaffold instead.
pub(crate) fn tm_family(tm: &TuringMachine, prefix: &str, skip: &BTreeSet<(String, char)>) -> TmFamily {
    let mut metasignals: Vec<(String, Rational)> = Vec::new();
    for state in &tm.states {
        metasignals.push((head_name(prefix, state, Direction::Right), Rational::int(1)));
        metasignals.push((head_name(prefix, state, Direction::Left), Rational::int(-1)));
    }
    for c in tm.alphabet() {
        metasignals.push((sym_name(prefix, c), Rational::zero()));
    }
    for (name, speed) in crew_speeds() {
        metasignals.push((format!("{prefix}{name}"), speed));
    }
    metasignals.push((border_name(prefix), Rational::zero()));

    let mut rules: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    for ((state, symbol), t) in &tm.transitions {
        if skip.contains(&(state.clone(), *symbol)) {
            continue;
        }
        let next = head_name(prefix, &t.state, t.direction);
        for dir in [Direction::Right, Direction::Left] {
            let head = head_name(prefix, state, dir);
            rules.push((
                vec![head.clone(), sym_name(prefix, *symbol)],
                vec![sym_name(prefix, t.write), next.clone()],
            ));
            if dir == Direction::Right && *symbol == '#' {
                // Reading the border: write the cell and rebuild the
                // border one spacing further right.
                let drifter = match t.direction {
                    Direction::Left => format!("{prefix}z"),
                    Direction::Right => format!("{prefix}zp"),
                };
                rules.push((
                    vec![head.clone(), border_name(prefix)],
                    vec![
                        sym_name(prefix, t.write),
                        next.clone(),
                        format!("{prefix}x"),
                        drifter,
                    ],
                ));
            }
        }
    }
    for c in tm.alphabet() {
        rules.push((
            vec![format!("{prefix}x"), sym_name(prefix, c)],
            vec![sym_name(prefix, c), format!("{prefix}y")],
        ));
    }
    rules.push((
        vec![format!("{prefix}y"), format!("{prefix}z")],
        vec![border_name(prefix)],
    ));
    rules.push((
        vec![format!("{prefix}y"), format!("{prefix}zp")],
        vec![border_name(prefix)],
    ));
    TmFamily { metasignals, rules }
}

/// Tape placements for an input framed `^ input` with the border one
/// cell right of the last written cell. `origin` is where cell 0 sits
/// and `spacing` the cell width (1 for a root tape).
pub(crate) fn tape_placements(
    input: &str,
    prefix: &str,
    origin: &Rational,
    spacing: &Rational,
) -> Vec<(Rational, String)> {
    let mut out = Vec::new();
    let mut pos = origin.clone();
    out.push((pos.clone(), sym_name(prefix, '^')));
    for c in input.chars() {
        pos = &pos + spacing;
        out.push((pos.clone(), sym_name(prefix, c)));
    }
    pos = &pos + spacing;
    out.push((pos, border_name(prefix)));
    out
}

/// Compiles a deterministic machine and its input onto a signal
/// machine. The meta-signal count is exactly `2|Q| + |Γ| + 5`.
pub fn compile_tm(tm: &TuringMachine, input: &str) -> Result<(SignalMachine, Configuration), TmError> {
    tm.validate()?;
    tm.check_input(input)?;
    let family = tm_family(tm, "", &BTreeSet::new());
    let mut machine = SignalMachine::new();
    for (name, speed) in &family.metasignals {
        machine.add_metasignal(name.clone(), speed.clone());
    }
    for (inputs, outputs) in &family.rules {
        machine.add_rule(inputs.iter().cloned(), outputs.iter().cloned());
    }
    let mut placements = tape_placements(input, "", &Rational::zero(), &Rational::one());
    placements.push((
        Rational::int(-1),
        head_name("", &tm.initial, Direction::Right),
    ));
    debug_assert_eq!(
        machine.metasignals().len(),
        2 * tm.states.len() + tm.alphabet().len() + 5
    );
    Ok((machine, Configuration::at_origin(placements)))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("no final state in the diagram; the run was cut off before halting")]
    NoFinalState,
    #[error("result was never collected: {0}")]
    ResultNotCollected(String),
}

/// Reads the outcome of a compiled run back off the diagram: the
/// surviving final-state head gives verdict and state, the standing
/// symbol signals give the tape. Must match [`run_tm_direct`] on the
/// same input.
pub fn decode_tm_result(
    diagram: &SpaceTimeDiagram,
    tm: &TuringMachine,
) -> Result<(Verdict, String, Vec<char>), DecodeError> {
    decode_tm_in_namespace(diagram, tm, "")
}

pub(crate) fn decode_tm_in_namespace(
    diagram: &SpaceTimeDiagram,
    tm: &TuringMachine,
    prefix: &str,
) -> Result<(Verdict, String, Vec<char>), DecodeError> {
    let mut final_state: Option<String> = None;
    for p in &diagram.final_config.placements {
        if let Some((state, _)) = parse_head_name(prefix, &p.metasignal) {
            if tm.is_final(state) {
                final_state = Some(state.to_string());
                break;
            }
        }
    }
    let final_state = final_state.ok_or(DecodeError::NoFinalState)?;
    let mut tape: Vec<(Rational, char)> = diagram
        .final_config
        .placements
        .iter()
        .filter_map(|p| parse_sym_name(prefix, &p.metasignal).map(|c| (p.position.clone(), c)))
        .collect();
    tape.sort_by(|a, b| a.0.cmp(&b.0));
    let verdict = tm.finals[&final_state];
    Ok((verdict, final_state, tape.into_iter().map(|(_, c)| c).collect()))
}

/// Builds a machine from transition rows; shared by tests and the
/// bundled example machines.
pub fn machine_from_rows(
    initial: &str,
    rows: &[(&str, char, &str, char, Direction)],
    finals: &[(&str, Verdict)],
    symbols: &[char],
) -> TuringMachine {
    let mut states: BTreeSet<String> = BTreeSet::new();
    let mut transitions = BTreeMap::new();
    for (from, read, to, write, dir) in rows {
        states.insert(from.to_string());
        states.insert(to.to_string());
        transitions.insert(
            (from.to_string(), *read),
            Transition {
                state: to.to_string(),
                write: *write,
                direction: *dir,
            },
        );
    }
    let mut fin = BTreeMap::new();
    for (name, v) in finals {
        states.insert(name.to_string());
        fin.insert(name.to_string(), *v);
    }
    TuringMachine {
        states,
        initial: initial.to_string(),
        symbols: symbols.iter().copied().collect(),
        transitions,
        finals: fin,
    }
}

/// Parity of zeros: halts accepting in `qtrue1` iff the input has an
/// even number of zeros. States q1, q2, qtrue1, qfalse1; compiled
/// meta-signal count 2*4 + 4 + 5 = 17.
pub fn div2_machine() -> TuringMachine {
    machine_from_rows(
        "q1",
        &[
            ("q1", '^', "q1", '^', Direction::Right),
            ("q1", '0', "q2", '0', Direction::Right),
            ("q1", '1', "q1", '1', Direction::Right),
            ("q1", '#', "qtrue1", '#', Direction::Left),
            ("q2", '0', "q1", '0', Direction::Right),
            ("q2", '1', "q2", '1', Direction::Right),
            ("q2", '#', "qfalse1", '#', Direction::Left),
        ],
        &[("qtrue1", Verdict::Accept), ("qfalse1", Verdict::Reject)],
        &['0', '1'],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunLimits};

    #[test]
    fn div2_hand_traces() {
        let tm = div2_machine();
        let out = run_tm_direct(&tm, "00", 1000).unwrap();
        assert_eq!(out.final_state, "qtrue1");
        assert_eq!(out.verdict, Verdict::Accept);
        let out = run_tm_direct(&tm, "0", 1000).unwrap();
        assert_eq!(out.final_state, "qfalse1");
        // Empty input: zero zeros is even.
        let out = run_tm_direct(&tm, "", 1000).unwrap();
        assert_eq!(out.final_state, "qtrue1");
    }

    #[test]
    fn step_limit_guards_nonhalting() {
        let tm = div2_machine();
        assert_eq!(
            run_tm_direct(&tm, "0101", 3),
            Err(TmError::StepLimitExceeded(3))
        );
    }

    #[test]
    fn compiled_metasignal_count_is_formula() {
        let tm = div2_machine();
        let (sm, _) = compile_tm(&tm, "01").unwrap();
        assert_eq!(sm.metasignals().len(), 17);
        assert!(sm.validate().is_empty());
    }

    #[test]
    fn compiled_initial_configuration_shape() {
        let tm = div2_machine();
        let (sm, cfg) = compile_tm(&tm, "01").unwrap();
        assert!(cfg.validate(&sm).is_empty());
        // head + caret + two input cells + border
        assert_eq!(cfg.len(), 5);
        let names: Vec<&str> = cfg.placements.iter().map(|p| p.metasignal.as_str()).collect();
        assert_eq!(names, vec!["q1-R", "sym-caret", "sym-0", "sym-1", "border"]);
    }

    #[test]
    fn compiled_run_matches_oracle_and_diffuses_left() {
        let tm = div2_machine();
        for input in ["", "0", "00", "01", "110", "0110"] {
            let oracle = run_tm_direct(&tm, input, 10_000).unwrap();
            let (sm, cfg) = compile_tm(&tm, input).unwrap();
            let d = run(&sm, &cfg, &RunLimits::default()).unwrap();
            let (verdict, state, tape) = decode_tm_result(&d, &tm).unwrap();
            assert_eq!(verdict, oracle.verdict, "verdict on {input:?}");
            assert_eq!(state, oracle.final_state, "state on {input:?}");
            assert_eq!(tape, oracle.final_tape, "tape on {input:?}");
            // The verdict head survives, moving left.
            let head = d
                .final_config
                .placements
                .iter()
                .find(|p| parse_head_name("", &p.metasignal).is_some())
                .unwrap();
            assert!(head.metasignal.ends_with("-L"));
        }
    }

    #[test]
    fn truncated_run_decodes_to_no_final_state() {
        let tm = div2_machine();
        let (sm, cfg) = compile_tm(&tm, "00").unwrap();
        let d = run(
            &sm,
            &cfg,
            &RunLimits {
                max_collisions: 1,
                ..RunLimits::default()
            },
        )
        .unwrap();
        assert_eq!(decode_tm_result(&d, &tm), Err(DecodeError::NoFinalState));
    }
}
