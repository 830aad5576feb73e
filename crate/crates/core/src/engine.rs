//! The deterministic event loop.
//!
//! From an initial configuration the engine repeatedly finds the
//! earliest future time at which two or more signals coincide, applies
//! the machine's rule for each coincidence group (or lets the signals
//! pass through when no rule is defined), and accumulates the space-time
//! diagram. Everything is exact: no collision is ever missed or invented
//! by rounding.
//!
//! Candidate discovery is incremental: when signals are born, only their
//! intersections against the currently alive signals are computed and
//! queued. [`next_events`] is the pure full-rescan form of the same
//! question; the test suite re-runs diagrams through it to check the
//! incremental path.

use crate::geom::{intersect, Point, Trajectory};
use crate::machine::{Configuration, Placement, RuleOutcome, SignalMachine, Violation};
use crate::rational::Rational;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

/// Why a run stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HaltReason {
    /// No two signals will ever meet again.
    Quiescent,
    /// The collision budget ran out.
    CollisionBudget,
    /// The time horizon was reached.
    TimeBudget,
    /// Too many events inside one sliding window; the run is assumed to
    /// be heading into an accumulation point and is cut off.
    AccumulationSuspected,
}

/// Budgets that keep a run finite on arbitrary input.
#[derive(Clone, Debug)]
pub struct RunLimits {
    pub max_collisions: usize,
    pub max_time: Option<Rational>,
    /// `(time_span, max_events)`: more than `max_events` events within
    /// any window of length `time_span` halts the run.
    pub accumulation_window: (Rational, usize),
}

impl Default for RunLimits {
    fn default() -> RunLimits {
        RunLimits {
            max_collisions: 100_000,
            max_time: None,
            accumulation_window: (Rational::one(), 10_000),
        }
    }
}

/// Whether an event had a defined rule or was a pass-through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    Defined,
    Blank,
}

/// One collision: where, who came in, who went out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionEvent {
    pub at: Point,
    pub incoming: BTreeSet<String>,
    pub outgoing: BTreeSet<String>,
    pub kind: EventKind,
}

/// One signal's segment in the diagram. `death` is absent while the
/// signal is still alive at the end of the run. Blank collisions do not
/// break a segment: the trajectory is unchanged, so the line continues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub metasignal: String,
    pub speed: Rational,
    pub birth: Point,
    pub death: Option<Point>,
}

impl Segment {
    pub fn trajectory(&self) -> Trajectory {
        Trajectory::new(self.birth.clone(), self.speed.clone())
    }

    pub fn alive_at(&self, t: &Rational) -> bool {
        &self.birth.t <= t && self.death.as_ref().is_none_or(|d| &d.t > t)
    }
}

/// The immutable trace of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceTimeDiagram {
    pub segments: Vec<Segment>,
    pub events: Vec<CollisionEvent>,
    pub halt: HaltReason,
    pub final_config: Configuration,
}

impl SpaceTimeDiagram {
    /// Events whose name sets touch a given meta-signal.
    pub fn events_involving<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CollisionEvent> {
        self.events
            .iter()
            .filter(move |e| e.incoming.contains(name) || e.outgoing.contains(name))
    }

    /// The first birth event point of a meta-signal, if any signal of
    /// that kind is ever produced by a rule.
    pub fn first_birth_of(&self, name: &str) -> Option<&Point> {
        self.events
            .iter()
            .find(|e| e.outgoing.contains(name) && !e.incoming.contains(name))
            .map(|e| &e.at)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("machine is not well formed: {0:?}")]
    MachineInvalid(Vec<Violation>),
    #[error("initial configuration is not well formed: {0:?}")]
    ConfigurationInvalid(Vec<String>),
    #[error("isolation violation at {at:?}: outputs {a} and {b} share speed")]
    IsolationViolation { at: Box<Point>, a: String, b: String },
    #[error("diagram integrity check failed: {0}")]
    Integrity(String),
}

/// Coincidence groups at one time: `(position, meta-signal set)` pairs.
pub type EventGroups = Vec<(Rational, BTreeSet<String>)>;

/// The earliest future coincidences of two or more signals.
///
/// Returns the minimal time strictly after `config.time` at which any
/// two signals meet, together with every coincidence group at that
/// time. Each group is maximal: it contains every signal located at
/// that exact point. Returns `None` when no future intersection exists.
///
/// This is the pure, full-rescan form; `run` uses an incremental queue
/// that must agree with it.
pub fn next_events(
    config: &Configuration,
    machine: &SignalMachine,
) -> Option<(Rational, EventGroups)> {
    let trajectories: Vec<(usize, Trajectory)> = config
        .placements
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let speed = machine
                .speed_of(&p.metasignal)
                .expect("configuration validated against machine")
                .clone();
            (i, Trajectory::new(p.birth.clone(), speed))
        })
        .collect();

    let mut best: Option<Rational> = None;
    let mut meets: Vec<(Rational, Rational, usize, usize)> = Vec::new();
    for i in 0..trajectories.len() {
        for j in i + 1..trajectories.len() {
            if let Some(p) = intersect(&trajectories[i].1, &trajectories[j].1) {
                if p.t <= config.time {
                    continue;
                }
                match &best {
                    Some(t) if &p.t > t => continue,
                    Some(t) if &p.t == t => {}
                    _ => best = Some(p.t.clone()),
                }
                meets.push((p.t, p.x, i, j));
            }
        }
    }
    let best = best?;
    let mut groups: BTreeMap<Rational, BTreeSet<usize>> = BTreeMap::new();
    for (t, x, i, j) in meets {
        if t == best {
            let g = groups.entry(x).or_default();
            g.insert(i);
            g.insert(j);
        }
    }
    let result = groups
        .into_iter()
        .map(|(x, ids)| {
            let names: BTreeSet<String> = ids
                .iter()
                .map(|&i| config.placements[i].metasignal.clone())
                .collect();
            assert_eq!(
                names.len(),
                ids.len(),
                "two signals of one meta-signal are parallel and cannot collide"
            );
            (x, names)
        })
        .collect();
    Some((best, result))
}

/// Applies one coincidence group to a configuration, producing the
/// post-event configuration (advanced to the event time) and the event
/// record. Pass-through groups keep their placements' original births;
/// a defined rule removes the incoming placements and births one
/// placement per output at the collision point.
pub fn apply_event(
    config: &Configuration,
    machine: &SignalMachine,
    time: &Rational,
    group: &(Rational, BTreeSet<String>),
) -> Result<(Configuration, CollisionEvent), EngineError> {
    let (position, names) = group;
    let at = Point::new(position.clone(), time.clone());
    let outcome = machine
        .lookup_rule(names)
        .map_err(|e| EngineError::ConfigurationInvalid(vec![e.to_string()]))?;

    let mut placements: Vec<Placement> = Vec::new();
    for p in &config.placements {
        let speed = machine.speed_of(&p.metasignal).unwrap();
        let here = Trajectory::new(p.birth.clone(), speed.clone()).position_at(time);
        if names.contains(&p.metasignal) && &here == position {
            continue; // handled below
        }
        placements.push(Placement {
            position: here,
            metasignal: p.metasignal.clone(),
            birth: p.birth.clone(),
        });
    }

    let event = match outcome {
        RuleOutcome::Defined(outputs) => {
            let outs: Vec<&String> = outputs.iter().collect();
            for i in 0..outs.len() {
                for j in i + 1..outs.len() {
                    if machine.speed_of(outs[i]).unwrap() == machine.speed_of(outs[j]).unwrap() {
                        return Err(EngineError::IsolationViolation {
                            at: Box::new(at),
                            a: outs[i].clone(),
                            b: outs[j].clone(),
                        });
                    }
                }
            }
            for name in &outputs {
                placements.push(Placement {
                    position: position.clone(),
                    metasignal: name.clone(),
                    birth: at.clone(),
                });
            }
            CollisionEvent {
                at,
                incoming: names.clone(),
                outgoing: outputs,
                kind: EventKind::Defined,
            }
        }
        RuleOutcome::Blank(_) => {
            for p in &config.placements {
                let speed = machine.speed_of(&p.metasignal).unwrap();
                let here = Trajectory::new(p.birth.clone(), speed.clone()).position_at(time);
                if names.contains(&p.metasignal) && &here == position {
                    placements.push(Placement {
                        position: here,
                        metasignal: p.metasignal.clone(),
                        birth: p.birth.clone(),
                    });
                }
            }
            CollisionEvent {
                at,
                incoming: names.clone(),
                outgoing: names.clone(),
                kind: EventKind::Blank,
            }
        }
    };

    placements.sort_by(|a, b| a.position.cmp(&b.position).then_with(|| a.metasignal.cmp(&b.metasignal)));
    Ok((
        Configuration {
            time: time.clone(),
            placements,
        },
        event,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    time: Rational,
    position: Rational,
    a: u64,
    b: u64,
}

struct Live {
    name: String,
    traj: Trajectory,
    segment: usize,
}

/// Runs a machine from an initial configuration until quiescence or a
/// budget. Identical inputs always produce identical diagrams:
/// simultaneous groups at distinct positions are applied left to right,
/// and all collections are ordered.
pub fn run(
    machine: &SignalMachine,
    initial: &Configuration,
    limits: &RunLimits,
) -> Result<SpaceTimeDiagram, EngineError> {
    let violations = machine.validate();
    if !violations.is_empty() {
        return Err(EngineError::MachineInvalid(violations));
    }
    let problems = initial.validate(machine);
    if !problems.is_empty() {
        return Err(EngineError::ConfigurationInvalid(problems));
    }

    let mut segments: Vec<Segment> = Vec::new();
    let mut events: Vec<CollisionEvent> = Vec::new();
    let mut alive: BTreeMap<u64, Live> = BTreeMap::new();
    let mut heap: BinaryHeap<Reverse<Candidate>> = BinaryHeap::new();
    let mut next_id: u64 = 0;
    let mut window: VecDeque<Rational> = VecDeque::new();
    let (win_span, win_max) = limits.accumulation_window.clone();

    // Births queue intersection candidates against everything alive. A
    // newborn sharing a line with a live signal would overlap forever
    // without ever colliding; that breaks isolation and is reported.
    let spawn = |alive: &mut BTreeMap<u64, Live>,
                 heap: &mut BinaryHeap<Reverse<Candidate>>,
                 segments: &mut Vec<Segment>,
                 next_id: &mut u64,
                 name: &str,
                 birth: Point|
     -> Result<(), EngineError> {
        let speed = machine.speed_of(name).unwrap().clone();
        let traj = Trajectory::new(birth.clone(), speed.clone());
        for (id, other) in alive.iter() {
            if let Some(p) = intersect(&traj, &other.traj) {
                heap.push(Reverse(Candidate {
                    time: p.t,
                    position: p.x,
                    a: *id,
                    b: *next_id,
                }));
            } else if other.traj.speed == speed && other.traj.position_at(&birth.t) == birth.x {
                return Err(EngineError::IsolationViolation {
                    at: Box::new(birth),
                    a: other.name.clone(),
                    b: name.to_string(),
                });
            }
        }
        segments.push(Segment {
            metasignal: name.to_string(),
            speed,
            birth,
            death: None,
        });
        alive.insert(
            *next_id,
            Live {
                name: name.to_string(),
                traj,
                segment: segments.len() - 1,
            },
        );
        *next_id += 1;
        Ok(())
    };

    for p in &initial.placements {
        spawn(
            &mut alive,
            &mut heap,
            &mut segments,
            &mut next_id,
            &p.metasignal,
            p.birth.clone(),
        )?;
    }

    let mut last_time = initial.time.clone();
    let halt;

    loop {
        // Find the next fresh candidate batch.
        let mut batch: Vec<Candidate> = Vec::new();
        let batch_time: Option<Rational> = loop {
            match heap.peek() {
                None => break None,
                Some(Reverse(c)) => {
                    if alive.contains_key(&c.a) && alive.contains_key(&c.b) {
                        break Some(c.time.clone());
                    }
                    heap.pop();
                }
            }
        };
        let Some(time) = batch_time else {
            halt = HaltReason::Quiescent;
            break;
        };
        if let Some(max_time) = &limits.max_time {
            if &time > max_time {
                last_time = max_time.clone();
                halt = HaltReason::TimeBudget;
                break;
            }
        }
        while let Some(Reverse(c)) = heap.peek() {
            if c.time != time {
                break;
            }
            let c = heap.pop().unwrap().0;
            if alive.contains_key(&c.a) && alive.contains_key(&c.b) {
                batch.push(c);
            }
        }

        // Group by position; members are every signal at the point.
        let mut groups: BTreeMap<Rational, BTreeSet<u64>> = BTreeMap::new();
        for c in batch {
            let g = groups.entry(c.position).or_default();
            g.insert(c.a);
            g.insert(c.b);
        }

        let mut halted = None;
        for (position, ids) in groups {
            if events.len() >= limits.max_collisions {
                halted = Some(HaltReason::CollisionBudget);
                break;
            }
            window.push_back(time.clone());
            while let Some(front) = window.front() {
                if (&time - front) > win_span {
                    window.pop_front();
                } else {
                    break;
                }
            }
            if window.len() > win_max {
                halted = Some(HaltReason::AccumulationSuspected);
                break;
            }

            let names: BTreeSet<String> =
                ids.iter().map(|id| alive[id].name.clone()).collect();
            assert_eq!(
                names.len(),
                ids.len(),
                "two signals of one meta-signal are parallel and cannot collide"
            );
            let at = Point::new(position.clone(), time.clone());
            match machine.lookup_rule(&names).unwrap() {
                RuleOutcome::Defined(outputs) => {
                    for id in &ids {
                        let live = alive.remove(id).unwrap();
                        segments[live.segment].death = Some(at.clone());
                    }
                    let outs: Vec<&String> = outputs.iter().collect();
                    for i in 0..outs.len() {
                        for j in i + 1..outs.len() {
                            if machine.speed_of(outs[i]).unwrap() == machine.speed_of(outs[j]).unwrap() {
                                return Err(EngineError::IsolationViolation {
                                    at: Box::new(at),
                                    a: outs[i].clone(),
                                    b: outs[j].clone(),
                                });
                            }
                        }
                    }
                    for name in &outputs {
                        spawn(
                            &mut alive,
                            &mut heap,
                            &mut segments,
                            &mut next_id,
                            name,
                            at.clone(),
                        )?;
                    }
                    events.push(CollisionEvent {
                        at,
                        incoming: names,
                        outgoing: outputs,
                        kind: EventKind::Defined,
                    });
                }
                RuleOutcome::Blank(_) => {
                    events.push(CollisionEvent {
                        at,
                        incoming: names.clone(),
                        outgoing: names,
                        kind: EventKind::Blank,
                    });
                }
            }
        }
        last_time = time;
        if let Some(reason) = halted {
            halt = reason;
            break;
        }
    }

    let mut placements: Vec<Placement> = alive
        .values()
        .map(|live| Placement {
            position: live.traj.position_at(&last_time),
            metasignal: live.name.clone(),
            birth: live.traj.origin.clone(),
        })
        .collect();
    placements.sort_by(|a, b| a.position.cmp(&b.position).then_with(|| a.metasignal.cmp(&b.metasignal)));
    let diagram = SpaceTimeDiagram {
        segments,
        events,
        halt,
        final_config: Configuration {
            time: last_time,
            placements,
        },
    };
    check_integrity(&diagram)?;
    Ok(diagram)
}

/// Every dead segment's endpoints must satisfy the exact slope
/// equation, and event times must be nondecreasing with distinct
/// positions at equal times. Checked after every run.
fn check_integrity(d: &SpaceTimeDiagram) -> Result<(), EngineError> {
    for s in &d.segments {
        if let Some(death) = &s.death {
            if death.t <= s.birth.t {
                return Err(EngineError::Integrity(format!(
                    "segment `{}` dies at {:?} before its birth {:?}",
                    s.metasignal, death, s.birth
                )));
            }
            let expect = &s.birth.x + &(&s.speed * &(&death.t - &s.birth.t));
            if expect != death.x {
                return Err(EngineError::Integrity(format!(
                    "segment `{}` endpoints break the slope equation",
                    s.metasignal
                )));
            }
        }
    }
    for pair in d.events.windows(2) {
        if pair[1].at.t < pair[0].at.t {
            return Err(EngineError::Integrity("event times decrease".into()));
        }
        if pair[1].at.t == pair[0].at.t && pair[1].at.x == pair[0].at.x {
            return Err(EngineError::Integrity(
                "two events at one point and time".into(),
            ));
        }
    }
    Ok(())
}

/// The configuration at time `t`, computed exactly from the segments
/// alive at `t`. At an event time this is the post-event state: signals
/// dying at `t` are excluded, signals born at `t` included (newborns of
/// one event share its location until they separate).
pub fn diagram_slice(d: &SpaceTimeDiagram, t: &Rational) -> Configuration {
    let mut placements: Vec<Placement> = d
        .segments
        .iter()
        .filter(|s| s.alive_at(t))
        .map(|s| Placement {
            position: s.trajectory().position_at(t),
            metasignal: s.metasignal.clone(),
            birth: s.birth.clone(),
        })
        .collect();
    placements.sort_by(|a, b| a.position.cmp(&b.position).then_with(|| a.metasignal.cmp(&b.metasignal)));
    Configuration {
        time: t.clone(),
        placements,
    }
}
