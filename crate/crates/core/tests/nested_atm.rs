//! Nested branching: a branch whose copies branch again. Each copy
//! carries its own scaled scaffold; the grandchildren's verdicts fold
//! at the child collector, whose answer travels on to the root
//! collector. Exercised as a property check over small inputs.

use agc::atm::{
    compile_atm, decode_atm_result, eval_atm_direct, AlternatingTm, CompileOptions, Quantifier,
    TreeLimits,
};
use agc::tm::{Direction, Transition, Verdict};
use agc::{run, RunLimits};
use std::collections::{BTreeMap, BTreeSet};

/// Root branches universally at the head marker; the left branch
/// branches again, existentially, when it reads a zero.
fn two_level_machine() -> AlternatingTm {
    let t = |state: &str, write: char, dir: Direction| Transition {
        state: state.into(),
        write,
        direction: dir,
    };
    let mut branches: BTreeMap<(String, char), Vec<Transition>> = BTreeMap::new();
    branches.insert(
        ("r0".into(), '^'),
        vec![t("p", '^', Direction::Right), t("r", '^', Direction::Right)],
    );
    // p accepts unless the first input symbol is 1.
    branches.insert(("p".into(), '0'), vec![t("ptrue", '0', Direction::Left)]);
    branches.insert(("p".into(), '1'), vec![t("pfalse", '1', Direction::Left)]);
    branches.insert(("p".into(), '#'), vec![t("ptrue", '#', Direction::Left)]);
    // r rejects on 1, accepts on end, and branches existentially on 0
    // into an always-accepting and an always-rejecting scout.
    branches.insert(
        ("r".into(), '0'),
        vec![t("u", '0', Direction::Right), t("v", '0', Direction::Right)],
    );
    branches.insert(("r".into(), '1'), vec![t("rfalse", '1', Direction::Left)]);
    branches.insert(("r".into(), '#'), vec![t("rtrue", '#', Direction::Left)]);
    for c in ['0', '1', '#'] {
        branches.insert(("u".into(), c), vec![t("utrue", c, Direction::Left)]);
        branches.insert(("v".into(), c), vec![t("vfalse", c, Direction::Left)]);
    }
    let states: BTreeSet<String> = [
        "r0", "p", "r", "u", "v", "ptrue", "pfalse", "rtrue", "rfalse", "utrue", "vfalse",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    AlternatingTm {
        states,
        initial: "r0".into(),
        symbols: ['0', '1'].into_iter().collect(),
        quantifier: [
            ("r0".to_string(), Quantifier::Universal),
            ("r".to_string(), Quantifier::Existential),
        ]
        .into_iter()
        .collect(),
        branches,
        finals: [
            ("ptrue".to_string(), Verdict::Accept),
            ("pfalse".to_string(), Verdict::Reject),
            ("rtrue".to_string(), Verdict::Accept),
            ("rfalse".to_string(), Verdict::Reject),
            ("utrue".to_string(), Verdict::Accept),
            ("vfalse".to_string(), Verdict::Reject),
        ]
        .into_iter()
        .collect(),
    }
}

#[test]
fn nested_branching_matches_the_oracle() {
    let atm = two_level_machine();
    for input in ["", "0", "1", "00", "01", "10", "11", "010", "001"] {
        let (want, tree) = eval_atm_direct(&atm, input, &TreeLimits::default()).unwrap();
        let (sm, cfg) = compile_atm(&atm, input, &CompileOptions::default()).unwrap();
        assert!(sm.validate().is_empty());
        let d = run(&sm, &cfg, &RunLimits::default()).unwrap();
        let got = decode_atm_result(&d, &atm);
        assert_eq!(got, Ok(want), "on {input:?} (tree depth {})", tree.depth());
    }
}

#[test]
fn deep_input_uses_two_scaffold_levels() {
    let atm = two_level_machine();
    // "0" branches at the marker and again at the zero: three levels of
    // tree, two of scaffolding; the left child's collector answer is
    // itself collected by the root.
    let (_, tree) = eval_atm_direct(&atm, "0", &TreeLimits::default()).unwrap();
    assert_eq!(tree.depth(), 3);
    let (sm, cfg) = compile_atm(&atm, "0", &CompileOptions::default()).unwrap();
    let d = run(&sm, &cfg, &RunLimits::default()).unwrap();
    // The left copy parks again and resumes grandchildren namespaces.
    assert!(d.first_birth_of("M3-park-r-0").is_some());
    assert!(d.first_birth_of("Any-M3-a2-Y").is_some());
    assert_eq!(decode_atm_result(&d, &atm), Ok(true));
}
