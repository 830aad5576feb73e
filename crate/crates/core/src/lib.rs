//! Exact simulation of signal machines, with compilers from Turing
//! machines and binary-branching alternating Turing machines.
//!
//! A signal machine is a finite set of *meta-signals*, each with a
//! constant rational speed, and a table of *collision rules* mapping
//! sets of meta-signals to sets of meta-signals. Signals — instances of
//! meta-signals placed on the real line — trace straight lines in the
//! space-time plane; when two or more meet, the rule for their set
//! replaces them (or, with no rule, they pass through unchanged). All
//! arithmetic is exact rational arithmetic, so event order is
//! deterministic and reproducible down to the byte.
//!
//! The crate has three layers:
//!
//! * the machine core and engine ([`machine`], [`engine`], [`text`]) —
//!   define machines, run them, slice and export the resulting
//!   space-time diagrams;
//! * the construction toolkit ([`toolkit`]) — generators for the
//!   geometric building blocks: exact midpoint computation,
//!   freeze/unfreeze of a running computation, scaling, and the
//!   two-sided copy scaffold;
//! * the frontends ([`tm`], [`atm`], [`frontend`]) — deterministic and
//!   alternating Turing machines, their direct interpreters (used as
//!   oracles), compilers onto signal machines, and result decoders.
//!
//! ```
//! use agc::{parse_machine_text, run, RunLimits};
//!
//! let (machine, initial) = parse_machine_text(
//!     "metasignal right 1\n\
//!      metasignal left -1\n\
//!      metasignal spark 0\n\
//!      rule right+left -> spark\n\
//!      initial -1 right\n\
//!      initial 1 left\n",
//! ).unwrap();
//! let diagram = run(&machine, &initial, &RunLimits::default()).unwrap();
//! assert_eq!(diagram.events.len(), 1);
//! assert_eq!(diagram.final_config.len(), 1);
//! ```

pub mod atm;
pub mod engine;
pub mod export;
pub mod frontend;
pub mod geom;
pub mod machine;
pub mod rational;
pub mod svg;
pub mod text;
pub mod tm;
pub mod toolkit;

mod book;

pub use engine::{
    apply_event, diagram_slice, next_events, run, CollisionEvent, EngineError, EventKind,
    HaltReason, RunLimits, Segment, SpaceTimeDiagram,
};
pub use geom::{apply_affine, intersect, AffineMap, Point, Trajectory};
pub use machine::{
    CollisionRule, Configuration, MetaSignal, Placement, RuleOutcome, SignalMachine, Violation,
};
pub use rational::{compare, rat, Rational, RationalError};
pub use text::{parse_machine_text, serialize_machine, ParseError};
