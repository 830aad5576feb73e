//! Alternating Turing machines: model, tree-evaluation oracle,
//! compiler onto signal machines, result decoder, and machine
//! statistics.
//!
//! An alternating machine is a Turing machine whose states may carry a
//! quantifier; a quantified state is allowed several successors for one
//! read symbol. A universal state accepts iff every successor accepts,
//! an existential one iff at least one does. The oracle evaluates the
//! computation tree recursively; the compiler realizes the same
//! semantics geometrically.
//!
//! # Compilation
//!
//! The compiled machine starts as an ordinary Turing-machine encoding,
//! plus two standing boundary signals and a midpoint computation kept
//! ready from time zero. A branching read does not read: it *parks* the
//! head (a standing signal recording state and symbol) and emits a copy
//! initiator, which finds the midpoint signal and triggers the copy
//! scaffold. The whole standing configuration is frozen twice — one
//! bundle escaping right, one left — and each bundle is recalled into a
//! fresh, scaled copy on its own side of the result collector that now
//! stands where the midpoint was. Each side's recall restores the park
//! as a different successor: the first branch continues in the right
//! copy, the second in the left.
//!
//! Every copy gets its own namespace of meta-signals (`M2-`, `M3-`,
//! ... , heap-indexed: the children of node `k` are `2k` and `2k+1`),
//! so the two halves run the same program under disjoint names; the
//! meta-signal count grows by roughly a factor of two per branching
//! level, and the compiled set realizes an exponential-in-depth space
//! bound. Namespacing is also what routes results: a left copy's
//! verdict head bounces rightward off its own left boundary (a rule its
//! namespace alone carries), so both sides' verdicts converge on the
//! collector between them. The collector folds the two verdicts with
//! the state's quantifier, `All-Mk-2 -> All-Mk-a1-T/F -> All-Mk-a2-Y/N`;
//! a non-root collector's answer travels on toward its parent's
//! collector, the root's answer stands at the original middle and is
//! what the decoder reads.

use crate::engine::SpaceTimeDiagram;
use crate::machine::{Configuration, SignalMachine};
use crate::rational::{rat, Rational};
use crate::tm::{
    self, border_name, head_name, sym_name, tape_placements, tm_family, DecodeError, Direction,
    Transition, TmError, TuringMachine, Verdict,
};
use crate::toolkit::{
    probe_kit, scaffold_kit, CollectorWiring, Fragment, ParkWiring, ScaffoldNames, ScaffoldParams,
    ScaffoldWiring, ToolkitError,
};
use std::collections::{BTreeMap, BTreeSet};

/// Quantifier carried by a branching state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantifier {
    Universal,
    Existential,
}

/// An alternating Turing machine over single-character symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingTm {
    pub states: BTreeSet<String>,
    pub initial: String,
    pub symbols: BTreeSet<char>,
    pub quantifier: BTreeMap<String, Quantifier>,
    pub branches: BTreeMap<(String, char), Vec<Transition>>,
    pub finals: BTreeMap<String, Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AtmError {
    #[error("machine is not well formed: {0}")]
    Invalid(String),
    #[error("state `{0}` branches but carries no quantifier")]
    MissingQuantifier(String),
    #[error("{0} successors in one transition; the signal-machine backend is binary")]
    UnsupportedBranchingDegree(usize),
    #[error(transparent)]
    Tm(#[from] TmError),
    #[error(transparent)]
    Toolkit(#[from] ToolkitError),
}

/// One node of the computation tree: the configuration at a branch
/// point (or at the end of a branchless run), its children, and the
/// verdict folded up from below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputationTree {
    pub state: String,
    pub tape: Vec<char>,
    pub head: usize,
    pub quantifier: Option<Quantifier>,
    pub children: Vec<ComputationTree>,
    pub accepts: bool,
}

impl ComputationTree {
    /// Tree depth in branching levels plus one: a branchless run is
    /// depth 1.
    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|c| c.depth())
            .max()
            .unwrap_or(0)
    }
}

/// Budgets for the tree evaluation.
#[derive(Clone, Debug)]
pub struct TreeLimits {
    /// Deterministic steps along any single path.
    pub step_limit: usize,
    /// Total branch nodes in the tree.
    pub max_nodes: usize,
}

impl Default for TreeLimits {
    fn default() -> TreeLimits {
        TreeLimits {
            step_limit: 100_000,
            max_nodes: 100_000,
        }
    }
}

impl AlternatingTm {
    pub fn alphabet(&self) -> BTreeSet<char> {
        let mut a = self.symbols.clone();
        a.insert('#');
        a.insert('^');
        a
    }

    pub fn is_final(&self, state: &str) -> bool {
        self.finals.contains_key(state)
    }

    /// The `(state, symbol)` pairs with two or more successors.
    pub fn branching_pairs(&self) -> Vec<(String, char)> {
        self.branches
            .iter()
            .filter(|(_, succ)| succ.len() >= 2)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// States that carry a quantifier.
    pub fn quantified_states(&self) -> BTreeSet<String> {
        self.quantifier.keys().cloned().collect()
    }

    pub fn validate(&self) -> Result<(), AtmError> {
        if !self.states.contains(&self.initial) {
            return Err(AtmError::Invalid(format!(
                "initial state `{}` is not declared",
                self.initial
            )));
        }
        let alphabet = self.alphabet();
        for ((state, symbol), succ) in &self.branches {
            if succ.is_empty() {
                return Err(AtmError::Invalid(format!(
                    "transition {state}/{symbol} has no successors"
                )));
            }
            if self.is_final(state) {
                return Err(AtmError::Invalid(format!(
                    "final state `{state}` has an outgoing transition"
                )));
            }
            if succ.len() >= 2 && !self.quantifier.contains_key(state) {
                return Err(AtmError::MissingQuantifier(state.clone()));
            }
            if !self.states.contains(state) || !alphabet.contains(symbol) {
                return Err(AtmError::Invalid(format!(
                    "transition {state}/{symbol} references undeclared names"
                )));
            }
            for t in succ {
                if !self.states.contains(&t.state) || !alphabet.contains(&t.write) {
                    return Err(AtmError::Invalid(format!(
                        "successor of {state}/{symbol} references undeclared names"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Deterministic view: the single-successor transitions only, as a
    /// Turing machine. Shared with the compiler; also the whole machine
    /// when nothing branches.
    pub fn deterministic_view(&self) -> TuringMachine {
        let transitions = self
            .branches
            .iter()
            .filter(|(_, succ)| succ.len() == 1)
            .map(|(k, succ)| (k.clone(), succ[0].clone()))
            .collect();
        TuringMachine {
            states: self.states.clone(),
            initial: self.initial.clone(),
            symbols: self.symbols.clone(),
            transitions,
            finals: self.finals.clone(),
        }
    }

    pub fn check_input(&self, input: &str) -> Result<(), AtmError> {
        let alphabet = self.alphabet();
        for c in input.chars() {
            if c == '#' || c == '^' || !alphabet.contains(&c) {
                return Err(AtmError::Tm(TmError::BadInputSymbol(c)));
            }
        }
        Ok(())
    }
}

/// Evaluates the computation tree recursively: run deterministically
/// until a final state or a branching read, then recurse per successor
/// and fold with the quantifier. The verdict at the root is the
/// machine's answer.
pub fn eval_atm_direct(
    atm: &AlternatingTm,
    input: &str,
    limits: &TreeLimits,
) -> Result<(bool, ComputationTree), AtmError> {
    atm.validate()?;
    atm.check_input(input)?;
    let tape: Vec<char> = std::iter::once('^').chain(input.chars()).collect();
    let mut nodes = 0usize;
    let tree = eval_path(atm, atm.initial.clone(), tape, 0, limits, &mut nodes)?;
    Ok((tree.accepts, tree))
}

fn eval_path(
    atm: &AlternatingTm,
    mut state: String,
    mut tape: Vec<char>,
    mut head: usize,
    limits: &TreeLimits,
    nodes: &mut usize,
) -> Result<ComputationTree, AtmError> {
    let mut steps = 0usize;
    loop {
        if atm.is_final(&state) {
            return Ok(ComputationTree {
                accepts: atm.finals[&state] == Verdict::Accept,
                state,
                tape,
                head,
                quantifier: None,
                children: Vec::new(),
            });
        }
        if steps >= limits.step_limit {
            return Err(AtmError::Tm(TmError::StepLimitExceeded(limits.step_limit)));
        }
        if head >= tape.len() {
            tape.resize(head + 1, '#');
        }
        let symbol = tape[head];
        let succ = atm
            .branches
            .get(&(state.clone(), symbol))
            .ok_or(TmError::Stuck {
                state: state.clone(),
                symbol,
            })?
            .clone();
        if succ.len() >= 2 {
            *nodes += 1;
            if *nodes > limits.max_nodes {
                return Err(AtmError::Invalid(format!(
                    "computation tree exceeds {} branch nodes",
                    limits.max_nodes
                )));
            }
            let quantifier = atm.quantifier[&state];
            let mut children = Vec::new();
            for t in &succ {
                let mut tape2 = tape.clone();
                tape2[head] = t.write;
                let head2 = match t.direction {
                    Direction::Right => head + 1,
                    Direction::Left => head
                        .checked_sub(1)
                        .ok_or_else(|| AtmError::Tm(TmError::LeftEdgeEscape(t.state.clone())))?,
                };
                children.push(eval_path(atm, t.state.clone(), tape2, head2, limits, nodes)?);
            }
            let accepts = match quantifier {
                Quantifier::Universal => children.iter().all(|c| c.accepts),
                Quantifier::Existential => children.iter().any(|c| c.accepts),
            };
            return Ok(ComputationTree {
                state,
                tape,
                head,
                quantifier: Some(quantifier),
                children,
                accepts,
            });
        }
        let t = &succ[0];
        tape[head] = t.write;
        match t.direction {
            Direction::Right => head += 1,
            Direction::Left => {
                if head == 0 {
                    if atm.is_final(&t.state) {
                        state = t.state.clone();
                        steps += 1;
                        continue;
                    }
                    return Err(AtmError::Tm(TmError::LeftEdgeEscape(t.state.clone())));
                }
                head -= 1;
            }
        }
        state = t.state.clone();
        steps += 1;
    }
}

/// Knobs for [`compile_atm`].
#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    /// How many branching levels to provision copy namespaces for.
    /// `None` sizes the tree by evaluating the oracle on the input
    /// (capped at 6).
    pub branch_levels: Option<usize>,
    pub params: Option<ScaffoldParams>,
}

fn sym_token(c: char) -> String {
    match c {
        '^' => "caret".into(),
        '#' => "blank".into(),
        other => other.to_string(),
    }
}

fn node_prefix(id: u64) -> String {
    if id == 1 {
        String::new()
    } else {
        format!("M{id}-")
    }
}

fn park_name(prefix: &str, state: &str, symbol: char) -> String {
    format!("{prefix}park-{state}-{}", sym_token(symbol))
}

fn stem(prefix_id: u64, q: Quantifier) -> String {
    match q {
        Quantifier::Universal => format!("All-M{prefix_id}"),
        Quantifier::Existential => format!("Any-M{prefix_id}"),
    }
}

/// Compiles an alternating machine and its input onto a signal
/// machine. Branching must be binary. The first successor of a
/// branching transition continues in the right copy, the second in the
/// left.
pub fn compile_atm(
    atm: &AlternatingTm,
    input: &str,
    options: &CompileOptions,
) -> Result<(SignalMachine, Configuration), AtmError> {
    atm.validate()?;
    atm.check_input(input)?;
    for succ in atm.branches.values() {
        if succ.len() > 2 {
            return Err(AtmError::UnsupportedBranchingDegree(succ.len()));
        }
        // Verdict heads must leave the tape leftward to reach collectors.
        for t in succ {
            if atm.is_final(&t.state) && t.direction != Direction::Left {
                return Err(AtmError::Invalid(format!(
                    "transition into final `{}` moves right; verdicts must move left",
                    t.state
                )));
            }
        }
    }

    let params = options.params.clone().unwrap_or_default();
    let levels = match options.branch_levels {
        Some(levels) => levels,
        None => {
            let (_, tree) = eval_atm_direct(atm, input, &TreeLimits::default())?;
            (tree.depth() - 1).min(6)
        }
    };

    let det = atm.deterministic_view();
    let branching = atm.branching_pairs();
    // Crew speed 4 bounds the computation; kicked heads run at 1.
    params.validate(&rat(4, 1), &Rational::one())?;

    let mut fragment = Fragment::default();
    // Node ids form a heap: the root is 1, children of k are 2k, 2k+1.
    let mut queue: Vec<(u64, usize)> = vec![(1, 0)];
    while let Some((id, level)) = queue.pop() {
        let prefix = node_prefix(id);
        let names = ScaffoldNames::new(&prefix);
        let family = tm_family(&det, &prefix, &BTreeSet::new());
        fragment.metasignals.extend(family.metasignals);
        fragment.rules.extend(family.rules);
        fragment.metasignals.push((names.bound_l(), Rational::zero()));
        fragment.metasignals.push((names.bound_r(), Rational::zero()));

        let mirror = id != 1 && id % 2 == 1;
        if mirror {
            // A left copy's verdict head leaves leftward; its own left
            // boundary reflects it back toward the collector.
            for qf in atm.finals.keys() {
                fragment.rules.push((
                    vec![head_name(&prefix, qf, Direction::Left), names.bound_l()],
                    vec![names.bound_l(), head_name(&prefix, qf, Direction::Right)],
                ));
            }
        }

        let can_branch = level < levels && !branching.is_empty();
        if !can_branch {
            continue;
        }
        queue.push((2 * id, level + 1));
        queue.push((2 * id + 1, level + 1));

        fragment.extend(probe_kit(&names, &params, mirror));

        let right_prefix = node_prefix(2 * id);
        let left_prefix = node_prefix(2 * id + 1);
        let child_can_branch = level + 1 < levels;

        // Branch reads park the head and launch the copy initiator.
        let mut parks: Vec<ParkWiring> = Vec::new();
        let mut quantifiers_used: BTreeSet<Quantifier> = BTreeSet::new();
        for (state, symbol) in &branching {
            let q = atm.quantifier[state];
            quantifiers_used.insert(q);
            let ci = match q {
                Quantifier::Universal => names.n("CI-all"),
                Quantifier::Existential => names.n("CI-any"),
            };
            let park = park_name(&prefix, state, *symbol);
            fragment.metasignals.push((park.clone(), Rational::zero()));
            for dir in [Direction::Right, Direction::Left] {
                fragment.rules.push((
                    vec![head_name(&prefix, state, dir), sym_name(&prefix, *symbol)],
                    vec![park.clone(), ci.clone()],
                ));
            }
            if *symbol == '#' {
                fragment.rules.push((
                    vec![head_name(&prefix, state, Direction::Right), border_name(&prefix)],
                    vec![
                        park.clone(),
                        ci.clone(),
                        format!("{prefix}x"),
                        format!("{prefix}z"),
                    ],
                ));
            }
            let succ = &atm.branches[&(state.clone(), *symbol)];
            parks.push(ParkWiring {
                park,
                ci,
                right_kick: vec![
                    sym_name(&right_prefix, succ[0].write),
                    head_name(&right_prefix, &succ[0].state, succ[0].direction),
                ],
                left_kick: vec![
                    sym_name(&left_prefix, succ[1].write),
                    head_name(&left_prefix, &succ[1].state, succ[1].direction),
                ],
            });
        }

        // What each side can deliver to this node's collectors.
        let result_signals = |child_prefix: &str, child_id: u64, bounced: bool| {
            let mut out: Vec<(String, bool)> = Vec::new();
            for (qf, v) in &atm.finals {
                let dir = if bounced { Direction::Right } else { Direction::Left };
                out.push((
                    head_name(child_prefix, qf, dir),
                    *v == Verdict::Accept,
                ));
            }
            if child_can_branch {
                for q in [Quantifier::Universal, Quantifier::Existential] {
                    if atm.quantifier.values().any(|x| *x == q) {
                        let s = stem(child_id, q);
                        out.push((format!("{s}-a2-Y"), true));
                        out.push((format!("{s}-a2-N"), false));
                    }
                }
            }
            out
        };
        let right_results = result_signals(&right_prefix, 2 * id, false);
        let left_results = result_signals(&left_prefix, 2 * id + 1, true);

        // The root's answer stands; a copy's answer travels toward its
        // parent's collector.
        let a2_speed = if id == 1 {
            Rational::zero()
        } else if mirror {
            Rational::one()
        } else {
            Rational::int(-1)
        };
        let collectors: Vec<(String, CollectorWiring)> = quantifiers_used
            .iter()
            .map(|q| {
                let ci = match q {
                    Quantifier::Universal => names.n("CI-all"),
                    Quantifier::Existential => names.n("CI-any"),
                };
                (
                    ci,
                    CollectorWiring {
                        stem: stem(id, *q),
                        universal: *q == Quantifier::Universal,
                        a2_speed: a2_speed.clone(),
                        right_results: right_results.clone(),
                        left_results: left_results.clone(),
                    },
                )
            })
            .collect();

        // Everything standing in this namespace gets copied: tape
        // symbols, the border, the parks.
        let mut freezables: Vec<String> = atm
            .alphabet()
            .into_iter()
            .map(|c| sym_name(&prefix, c))
            .collect();
        freezables.push(border_name(&prefix));
        for p in &parks {
            freezables.push(p.park.clone());
        }

        let reprefix = |name: &str, child: &str| -> String {
            format!("{child}{}", name.strip_prefix(&prefix).unwrap())
        };
        let mut resume_right = BTreeMap::new();
        let mut resume_left = BTreeMap::new();
        for n in freezables.iter().chain([names.bound_l(), names.bound_r()].iter()) {
            resume_right.insert(n.clone(), reprefix(n, &right_prefix));
            resume_left.insert(n.clone(), reprefix(n, &left_prefix));
        }

        let right_finish_extra = if child_can_branch {
            vec![
                format!("{right_prefix}probe-fast"),
                format!("{right_prefix}probe-slow"),
            ]
        } else {
            Vec::new()
        };
        let left_finish_extra = if child_can_branch {
            vec![
                format!("{left_prefix}probe-fast-m"),
                format!("{left_prefix}probe-slow-m"),
            ]
        } else {
            Vec::new()
        };

        let wiring = ScaffoldWiring {
            names: ScaffoldNames::new(&prefix),
            freezables,
            parks,
            resume_right,
            resume_left,
            right_finish_extra,
            left_finish_extra,
            collectors,
        };
        fragment.extend(scaffold_kit(&wiring, &params));
    }

    let mut machine = SignalMachine::new();
    for (name, speed) in &fragment.metasignals {
        machine.add_metasignal(name.clone(), speed.clone());
    }
    for (inputs, outputs) in &fragment.rules {
        machine.add_rule(inputs.iter().cloned(), outputs.iter().cloned());
    }

    // The right boundary carries a 1/17 offset. No speed in the system
    // has a 17 anywhere, so every scaffold coordinate (they all depend
    // on the boundary width) stays off the computation's collision
    // lattice, for every input length; without this, specific lengths
    // line frozen signals up with sweep events and turn defined rules
    // into blank multi-way crossings.
    let n = input.chars().count() as i64;
    let left_bound = Rational::int(-3);
    let right_bound = rat(34 * n + 189, 34);
    let mut placements = tape_placements(input, "", &Rational::zero(), &Rational::one());
    placements.push((Rational::int(-1), head_name("", &atm.initial, Direction::Right)));
    placements.push((left_bound.clone(), "bound-L".into()));
    placements.push((right_bound, "bound-R".into()));
    if levels > 0 && !branching.is_empty() {
        placements.push((&left_bound - &rat(3, 4), "probe-fast".into()));
        placements.push((&left_bound - &rat(1, 4), "probe-slow".into()));
    }
    Ok((machine, Configuration::at_origin(placements)))
}

/// Reads the machine's answer off a compiled run: the root collector's
/// final transition carries it. A run that never branched falls back
/// to the plain verdict head.
pub fn decode_atm_result(
    diagram: &SpaceTimeDiagram,
    atm: &AlternatingTm,
) -> Result<bool, DecodeError> {
    for q in [Quantifier::Universal, Quantifier::Existential] {
        let s = stem(1, q);
        if diagram.first_birth_of(&format!("{s}-a2-Y")).is_some() {
            return Ok(true);
        }
        if diagram.first_birth_of(&format!("{s}-a2-N")).is_some() {
            return Ok(false);
        }
    }
    let det = atm.deterministic_view();
    match tm::decode_tm_result(diagram, &det) {
        Ok((verdict, _, _)) => Ok(verdict == Verdict::Accept),
        Err(DecodeError::NoFinalState) => Err(DecodeError::ResultNotCollected(
            "no collector answer and no surviving verdict head".into(),
        )),
        Err(e) => Err(e),
    }
}

/// Counts reported for a compiled machine next to the source machine's
/// predicted values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineStats {
    pub metasignal_count: usize,
    pub rule_count: usize,
    /// `2|Q| + |Γ| + 5`; for a deterministic compilation this must
    /// equal `metasignal_count` exactly.
    pub predicted_tm_count: usize,
    /// Quantified-state count plus one.
    pub static_depth: usize,
    /// Depth of the actual computation tree on a given input, when one
    /// was evaluated.
    pub dynamic_depth: Option<usize>,
    /// `2^(static_depth - 1)`.
    pub branch_bound: u64,
}

/// The machine a statistics report describes.
pub enum StatsSource<'a> {
    Tm(&'a TuringMachine),
    Atm {
        atm: &'a AlternatingTm,
        tree: Option<&'a ComputationTree>,
    },
}

pub fn machine_stats(sm: &SignalMachine, source: &StatsSource<'_>) -> MachineStats {
    let (states, alphabet, static_depth, dynamic_depth) = match source {
        StatsSource::Tm(tm) => (tm.states.len(), tm.alphabet().len(), 1, None),
        StatsSource::Atm { atm, tree } => (
            atm.states.len(),
            atm.alphabet().len(),
            atm.quantified_states().len() + 1,
            tree.map(|t| t.depth()),
        ),
    };
    MachineStats {
        metasignal_count: sm.metasignals().len(),
        rule_count: sm.rule_count(),
        predicted_tm_count: 2 * states + alphabet + 5,
        static_depth,
        dynamic_depth,
        branch_bound: 1u64 << (static_depth.min(63) - 1),
    }
}

/// The worked example machine: accepts a binary string iff its number
/// of zeros is divisible by both two and three. The initial state is
/// universal and branches into the mod-two and mod-three checkers.
pub fn zeros_div_2_and_3() -> AlternatingTm {
    let t = |state: &str, write: char, dir: Direction| Transition {
        state: state.into(),
        write,
        direction: dir,
    };
    let mut branches: BTreeMap<(String, char), Vec<Transition>> = BTreeMap::new();
    branches.insert(
        ("q0".into(), '^'),
        vec![t("q1", '^', Direction::Right), t("q3", '^', Direction::Right)],
    );
    for (q, on0, fin) in [
        ("q1", "q2", "qtrue1"),
        ("q2", "q1", "qfalse1"),
        ("q3", "q4", "qtrue3"),
        ("q4", "q5", "qfalse3"),
        ("q5", "q3", "qfalse3"),
    ] {
        branches.insert(
            (q.into(), '0'),
            vec![t(on0, '0', Direction::Right)],
        );
        branches.insert((q.into(), '1'), vec![t(q, '1', Direction::Right)]);
        branches.insert((q.into(), '#'), vec![t(fin, '#', Direction::Left)]);
    }
    let states: BTreeSet<String> = [
        "q0", "q1", "q2", "q3", "q4", "q5", "qtrue1", "qfalse1", "qtrue3", "qfalse3",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    AlternatingTm {
        states,
        initial: "q0".into(),
        symbols: ['0', '1'].into_iter().collect(),
        quantifier: [("q0".to_string(), Quantifier::Universal)].into_iter().collect(),
        branches,
        finals: [
            ("qtrue1".to_string(), Verdict::Accept),
            ("qfalse1".to_string(), Verdict::Reject),
            ("qtrue3".to_string(), Verdict::Accept),
            ("qfalse3".to_string(), Verdict::Reject),
        ]
        .into_iter()
        .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, HaltReason, RunLimits};

    fn zeros(s: &str) -> usize {
        s.chars().filter(|c| *c == '0').count()
    }

    #[test]
    fn oracle_accepts_the_reference_strings() {
        let atm = zeros_div_2_and_3();
        for (input, want) in [
            ("1011000100", true),
            ("000000", true),
            ("0110011", false),
            ("0000000", false),
            ("", true),
        ] {
            let (accepts, tree) = eval_atm_direct(&atm, input, &TreeLimits::default()).unwrap();
            assert_eq!(accepts, want, "oracle on {input:?}");
            assert_eq!(tree.depth(), 2);
        }
    }

    #[test]
    fn oracle_is_the_mod_six_predicate() {
        let atm = zeros_div_2_and_3();
        // All binary strings of length <= 12 against a direct count.
        for len in 0..=12usize {
            for bits in 0..(1u32 << len) {
                let s: String = (0..len)
                    .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
                    .collect();
                let (accepts, _) = eval_atm_direct(&atm, &s, &TreeLimits::default()).unwrap();
                assert_eq!(accepts, zeros(&s).is_multiple_of(6), "on {s:?}");
            }
        }
    }

    #[test]
    fn validation_catches_missing_quantifier() {
        let mut atm = zeros_div_2_and_3();
        atm.quantifier.clear();
        assert_eq!(
            atm.validate(),
            Err(AtmError::MissingQuantifier("q0".into()))
        );
    }

    #[test]
    fn compiled_run_answers_yes_on_the_worked_input() {
        let atm = zeros_div_2_and_3();
        let (sm, cfg) = compile_atm(&atm, "000000", &CompileOptions::default()).unwrap();
        assert!(sm.validate().is_empty(), "{:?}", sm.validate());
        assert!(cfg.validate(&sm).is_empty());
        let d = run(&sm, &cfg, &RunLimits::default()).unwrap();
        assert_eq!(d.halt, HaltReason::Quiescent);
        assert_eq!(decode_atm_result(&d, &atm), Ok(true));
    }

    #[test]
    fn compiled_run_answers_no_on_seven_zeros() {
        let atm = zeros_div_2_and_3();
        let (sm, cfg) = compile_atm(&atm, "0000000", &CompileOptions::default()).unwrap();
        let d = run(&sm, &cfg, &RunLimits::default()).unwrap();
        assert_eq!(decode_atm_result(&d, &atm), Ok(false));
    }

    #[test]
    fn parked_machine_copies_resume_with_designated_states() {
        let atm = zeros_div_2_and_3();
        let (sm, cfg) = compile_atm(&atm, "00", &CompileOptions::default()).unwrap();
        let d = run(&sm, &cfg, &RunLimits::default()).unwrap();
        // Right copy resumes in q1, left copy in q3.
        assert!(d.first_birth_of("M2-q1-R").is_some());
        assert!(d.first_birth_of("M3-q3-R").is_some());
        // Both toggles are generated at the same time, on both sides.
        let tr = d.first_birth_of("Toggle-Right").unwrap();
        let tl = d.first_birth_of("Toggle-Left").unwrap();
        assert_eq!(tr.t, tl.t);
    }

    /// Right after both recall sweeps finish, each half's tape is a
    /// copy of the original content: same symbol multiset on both
    /// sides (the parked marker cell resumes as the branch's written
    /// symbol, which this machine writes back unchanged).
    #[test]
    fn copied_halves_carry_the_original_tape() {
        let atm = zeros_div_2_and_3();
        let input = "010";
        let (sm, cfg) = compile_atm(&atm, input, &CompileOptions::default()).unwrap();
        let d = run(&sm, &cfg, &RunLimits::default()).unwrap();
        let resumed_at = ["M2-bound-L", "M3-bound-R"]
            .iter()
            .map(|n| d.first_birth_of(n).unwrap().t.clone())
            .max()
            .unwrap();
        let slice = crate::engine::diagram_slice(&d, &resumed_at);
        let tape_of = |prefix: &str| {
            let mut symbols: Vec<char> = slice
                .placements
                .iter()
                .filter_map(|p| crate::tm::parse_sym_name(prefix, &p.metasignal))
                .collect();
            symbols.sort_unstable();
            symbols
        };
        let mut original: Vec<char> = format!("^{input}").chars().collect();
        original.sort_unstable();
        assert_eq!(tape_of("M2-"), original);
        assert_eq!(tape_of("M3-"), original);
    }

    #[test]
    fn truncated_run_reports_uncollected() {
        let atm = zeros_div_2_and_3();
        let (sm, cfg) = compile_atm(&atm, "00", &CompileOptions::default()).unwrap();
        let d = run(
            &sm,
            &cfg,
            &RunLimits {
                max_collisions: 5,
                ..RunLimits::default()
            },
        )
        .unwrap();
        assert!(matches!(
            decode_atm_result(&d, &atm),
            Err(DecodeError::ResultNotCollected(_))
        ));
    }

    #[test]
    fn stats_report_depth_and_bound() {
        let atm = zeros_div_2_and_3();
        let (sm, _) = compile_atm(&atm, "00", &CompileOptions::default()).unwrap();
        let (_, tree) = eval_atm_direct(&atm, "00", &TreeLimits::default()).unwrap();
        let stats = machine_stats(
            &sm,
            &StatsSource::Atm {
                atm: &atm,
                tree: Some(&tree),
            },
        );
        assert_eq!(stats.static_depth, 2);
        assert_eq!(stats.dynamic_depth, Some(2));
        assert_eq!(stats.branch_bound, 2);
        assert!(stats.metasignal_count > stats.predicted_tm_count);
    }
}
