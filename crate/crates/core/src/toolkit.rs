//! Generators for the geometric building blocks: exact midpoint
//! computation, freezing and unfreezing of a running computation,
//! scaling, and the two-sided copy scaffold.
//!
//! Each generator emits a [`Fragment`]: meta-signals, rules and initial
//! placements that are merged into a base machine. Fragment names carry
//! a namespace prefix so merging never collides with computation
//! meta-signals.
//!
//! # Geometry
//!
//! *Midpoint.* Two probes leave the left end, the faster at exactly
//! three times the speed of the slower. The fast probe reflects off the
//! right end and meets the slow one at the exact midpoint, regardless
//! of the common speed unit.
//!
//! *Freezing.* A sweep faster than every computation signal converts
//! each signal it crosses into a frozen variant; all frozen variants
//! share one speed, so the band drifts as a rigid parallel bundle. A
//! parallel unfreezing sweep restores every signal. Because the two
//! sweep lines are parallel, the resumed computation is an exact
//! translate of the original — collisions that would have happened
//! inside the band are re-created intact.
//!
//! *Scaling.* With a second, slower sweep between freeze and unfreeze
//! the bundle is redirected once; freeze and unfreeze lines stay
//! parallel. The composite of the two projections is a uniform scaling
//! of the plane. With freeze sweep speed `w`, frozen drift `-f`,
//! standing redirected bundle, and redirect speed `u`, the factor is
//! `u(f+w) / (w(f+u))`; solving for `u` picks any factor in (0, 1).
//!
//! *Two-sided copy.* A standing configuration between two boundary
//! signals is duplicated: a copy initiator meets the midpoint signal
//! and seven signals emerge — the result collector that replaces the
//! midpoint, two boundary-bound messengers whose arrivals launch the
//! two toggle sweeps, and two pairs of recovery locators. Each toggle
//! crossing freezes a signal one way and leaves a standing continuation
//! for the opposite toggle, so the whole configuration ends up in two
//! frozen bundles, one escaping right and one left. On each side the
//! recovery locators place a recall sweep just outside the escaping
//! bundle; the recall restores every signal, scaled by the factor the
//! recall speed encodes, and dies on the far boundary copy. The parked
//! branch signal is restored specially: each side's recall emits that
//! side's designated continuation.

use crate::engine::SpaceTimeDiagram;
use crate::geom::{AffineMap, Point};
use crate::machine::{Configuration, SignalMachine};
use crate::rational::{rat, Rational};
use std::collections::BTreeMap;

/// A shrink (or identity) factor in (0, 1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleFactor(Rational);

impl ScaleFactor {
    pub fn new(value: Rational) -> Result<ScaleFactor, ToolkitError> {
        if value.is_positive() && value <= Rational::one() {
            Ok(ScaleFactor(value))
        } else {
            Err(ToolkitError::BadScaleFactor(value.to_string()))
        }
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ToolkitError {
    #[error("interval is degenerate: left must be strictly below right")]
    DegenerateInterval,
    #[error("speed ordering violated: {0}")]
    SpeedOrderViolation(String),
    #[error("fragment name `{0}` collides with an existing meta-signal")]
    NameClash(String),
    #[error("scale factor {0} is outside (0, 1]")]
    BadScaleFactor(String),
    #[error("branch signal `{0}` is not declared in the machine")]
    BranchStateUnknown(String),
    #[error("scaffold geometry check failed: {0}")]
    SeparationViolation(String),
}

/// Speed bundle for the copy scaffold and the freeze family.
///
/// The invariants, checked by [`ScaffoldParams::validate`]:
/// `probe_fast = 3 * probe_slow` and `probe_fast` strictly above every
/// other speed; `toggle_speed` above every computation speed;
/// `frozen_speed < toggle_speed < recovery_speed`; `rec2_speed` between
/// `frozen_speed` and `toggle_speed`; and the recall speed must place
/// each resumed half strictly beyond the collector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaffoldParams {
    pub probe_fast: Rational,
    pub probe_slow: Rational,
    pub toggle_speed: Rational,
    pub frozen_speed: Rational,
    pub recovery_speed: Rational,
    pub rec2_speed: Rational,
    pub recall_speed: Rational,
    pub ci_speed: Rational,
}

impl Default for ScaffoldParams {
    /// Defaults sized for compiled Turing machines, whose extension
    /// crew reaches speed 4: toggles at 5, recovery just above at 11/2,
    /// probes at 84/13 and 28/13 (the 13 in the denominator keeps probe
    /// lines off the collision lattice of the computation), and the
    /// recall speed 30/13 that yields a 3/4 scale per copy.
    fn default() -> ScaffoldParams {
        ScaffoldParams {
            probe_fast: rat(84, 13),
            probe_slow: rat(28, 13),
            toggle_speed: rat(5, 1),
            frozen_speed: rat(2, 1),
            recovery_speed: rat(11, 2),
            rec2_speed: rat(5, 2),
            recall_speed: rat(30, 13),
            ci_speed: rat(1, 2),
        }
    }
}

impl ScaffoldParams {
    /// Derives the recall speed for a wanted scale factor `s`:
    /// `r = s*w*f / (w + f - s*w)` with toggle speed `w` and frozen
    /// speed `f`, inverted from `s = r(w+f) / (w(r+f))`.
    pub fn with_scale_factor(mut self, factor: &ScaleFactor) -> ScaffoldParams {
        let w = &self.toggle_speed;
        let f = &self.frozen_speed;
        let s = factor.value();
        let denom = &(w + f) - &(s * w);
        self.recall_speed = (&(s * w) * f)
            .checked_div(&denom)
            .expect("factor at most 1 keeps the denominator positive");
        self
    }

    /// The scale factor the current recall speed produces.
    pub fn scale_factor(&self) -> Rational {
        let w = &self.toggle_speed;
        let f = &self.frozen_speed;
        let r = &self.recall_speed;
        (r * &(w + f))
            .checked_div(&(w * &(r + f)))
            .expect("speeds are positive")
    }

    /// Redirect speed for [`gen_scale`] with factor `s`:
    /// `u = s*w*f / (f + w(1-s))`.
    pub fn redirect_speed(&self, factor: &ScaleFactor) -> Rational {
        let w = &self.toggle_speed;
        let f = &self.frozen_speed;
        let s = factor.value();
        let denom = f + &(w - &(s * w));
        (&(s * w) * f).checked_div(&denom).expect("positive")
    }

    /// Where a resumed half's near edge lands relative to the
    /// collector, in units of the half width. Positive means the half
    /// clears the collector. Derived from the normalized geometry with
    /// the copy-initiation collision at the origin and boundaries at
    /// distance one.
    pub fn half_clearance(&self) -> Rational {
        let w = &self.toggle_speed;
        let f = &self.frozen_speed;
        let r1 = &self.recovery_speed;
        let r2 = &self.rec2_speed;
        let r = &self.recall_speed;
        let t_p = (&Rational::one() - &f.checked_div(r1).unwrap())
            .checked_div(&(r2 - f))
            .unwrap();
        let catch = &(r2 + r) * &t_p;
        let back = (&Rational::int(2) * r).checked_div(w).unwrap();
        let c = (f * &(&catch - &back)).checked_div(&(f + r)).unwrap();
        &c - &self.scale_factor()
    }

    /// `computation_max_speed` bounds every signal the toggles must
    /// outrun; `chaser_max_speed` bounds the signals a freshly resumed
    /// copy can send after its own recall sweep (the kicked head), which
    /// the recall must outrun so every cell is restored before it is
    /// read.
    pub fn validate(
        &self,
        computation_max_speed: &Rational,
        chaser_max_speed: &Rational,
    ) -> Result<(), ToolkitError> {
        let fail = |msg: String| Err(ToolkitError::SpeedOrderViolation(msg));
        if self.probe_fast != &Rational::int(3) * &self.probe_slow {
            return fail("probe_fast must be exactly three times probe_slow".into());
        }
        if self.toggle_speed <= *computation_max_speed {
            return fail(format!(
                "toggle speed {} must exceed the largest computation speed {}",
                self.toggle_speed, computation_max_speed
            ));
        }
        if self.frozen_speed >= self.toggle_speed {
            return fail("frozen speed must stay below the toggle speed".into());
        }
        if self.recovery_speed <= self.toggle_speed {
            return fail("recovery speed must exceed the toggle speed".into());
        }
        if self.rec2_speed <= self.frozen_speed || self.rec2_speed >= self.toggle_speed {
            return fail("second locator speed must lie between frozen and toggle speeds".into());
        }
        if self.recall_speed <= *chaser_max_speed {
            return fail(format!(
                "recall speed {} must exceed the resumed head speed {}",
                self.recall_speed, chaser_max_speed
            ));
        }
        for (name, s) in [
            ("toggle", &self.toggle_speed),
            ("recovery", &self.recovery_speed),
            ("rec2", &self.rec2_speed),
            ("recall", &self.recall_speed),
            ("ci", &self.ci_speed),
        ] {
            if *s >= self.probe_fast {
                return fail(format!("probe_fast must stay strictly above the {name} speed"));
            }
        }
        let s = self.scale_factor();
        if !s.is_positive() || s > Rational::one() {
            return Err(ToolkitError::BadScaleFactor(s.to_string()));
        }
        if !self.half_clearance().is_positive() {
            return Err(ToolkitError::SeparationViolation(format!(
                "resumed halves would overlap the collector (clearance {})",
                self.half_clearance()
            )));
        }
        Ok(())
    }
}

/// Meta-signals, rules and initial placements to merge into a machine.
#[derive(Clone, Debug, Default)]
pub struct Fragment {
    pub metasignals: Vec<(String, Rational)>,
    pub rules: Vec<(Vec<String>, Vec<String>)>,
    pub placements: Vec<(Rational, String)>,
}

impl Fragment {
    pub fn extend(&mut self, other: Fragment) {
        self.metasignals.extend(other.metasignals);
        self.rules.extend(other.rules);
        self.placements.extend(other.placements);
    }

    /// Merges into copies of the base machine and configuration.
    /// Fragment names must not collide with existing meta-signals.
    pub fn merge(
        &self,
        machine: &SignalMachine,
        config: &Configuration,
    ) -> Result<(SignalMachine, Configuration), ToolkitError> {
        let mut m = machine.clone();
        for (name, speed) in &self.metasignals {
            if m.contains(name) {
                return Err(ToolkitError::NameClash(name.clone()));
            }
            m.add_metasignal(name.clone(), speed.clone());
        }
        for (inputs, outputs) in &self.rules {
            m.add_rule(inputs.iter().cloned(), outputs.iter().cloned());
        }
        let mut placements: Vec<(Rational, String)> = config
            .placements
            .iter()
            .map(|p| (p.position.clone(), p.metasignal.clone()))
            .collect();
        placements.extend(self.placements.iter().cloned());
        Ok((m, Configuration::at_origin(placements)))
    }
}

/// Emits the midpoint construction for the interval `[left, right]`:
/// probes launched just left of `left`, a reflector at `right`, and a
/// `mid-Middle` signal born exactly at `(left+right)/2`.
pub fn gen_middle(
    left: &Rational,
    right: &Rational,
    params: &ScaffoldParams,
) -> Result<Fragment, ToolkitError> {
    if left >= right {
        return Err(ToolkitError::DegenerateInterval);
    }
    let u = params.probe_slow.clone();
    let offset = rat(1, 4);
    Ok(Fragment {
        metasignals: vec![
            ("mid-probe-fast".into(), &Rational::int(3) * &u),
            ("mid-probe-slow".into(), u),
            ("mid-probe-back".into(), &Rational::int(-3) * &params.probe_slow),
            ("mid-bound".into(), Rational::zero()),
            ("mid-Middle".into(), Rational::zero()),
        ],
        rules: vec![
            (
                vec!["mid-probe-fast".into(), "mid-bound".into()],
                vec!["mid-bound".into(), "mid-probe-back".into()],
            ),
            (
                vec!["mid-probe-back".into(), "mid-probe-slow".into()],
                vec!["mid-Middle".into()],
            ),
        ],
        placements: vec![
            (left - &(&Rational::int(3) * &offset), "mid-probe-fast".into()),
            (left - &offset, "mid-probe-slow".into()),
            (right.clone(), "mid-bound".into()),
        ],
    })
}

/// Which way the frozen bundle drifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreezeDirection {
    Left,
    Right,
}

/// Where the sweep lines sit: x-intercepts at time zero. For a
/// leftward freeze the sweeps move right and the freezer intercept must
/// be the largest; mirrored for a rightward freeze.
#[derive(Clone, Debug)]
pub struct SweepAnchors {
    pub freezer_intercept: Rational,
    pub unfreezer_intercept: Rational,
    /// Only used by [`gen_scale`].
    pub redirect_intercept: Option<Rational>,
}

fn freeze_name(c: &str) -> String {
    format!("fz-{c}")
}

fn freeze2_name(c: &str) -> String {
    format!("fz2-{c}")
}

/// Freeze/unfreeze fragment: `{freezer, c} -> {freezer, fz-c}` and
/// `{unfreezer, fz-c} -> {unfreezer, c}` for every computation
/// meta-signal, with parallel sweep lines. The resumed computation is
/// the exact translate given by [`expected_translation`].
pub fn gen_freeze_unfreeze(
    computation_names: &[String],
    machine: &SignalMachine,
    direction: FreezeDirection,
    params: &ScaffoldParams,
    anchors: &SweepAnchors,
) -> Result<Fragment, ToolkitError> {
    if params.frozen_speed >= params.toggle_speed {
        return Err(ToolkitError::SpeedOrderViolation(
            "frozen speed must stay below the sweep speed".into(),
        ));
    }
    check_computation_speeds(computation_names, machine, params)?;
    let (sweep, drift) = sweep_speeds(direction, params);
    let mut f = Fragment::default();
    f.metasignals.push(("freezer".into(), sweep.clone()));
    f.metasignals.push(("unfreezer".into(), sweep));
    for c in computation_names {
        f.metasignals.push((freeze_name(c), drift.clone()));
        f.rules.push((
            vec!["freezer".into(), c.clone()],
            vec!["freezer".into(), freeze_name(c)],
        ));
        f.rules.push((
            vec!["unfreezer".into(), freeze_name(c)],
            vec!["unfreezer".into(), c.clone()],
        ));
    }
    f.placements = vec![
        (anchors.freezer_intercept.clone(), "freezer".into()),
        (anchors.unfreezer_intercept.clone(), "unfreezer".into()),
    ];
    Ok(f)
}

/// The translation the freeze/unfreeze pair realizes: projection along
/// the frozen drift from the freezer line to the parallel unfreezer
/// line.
pub fn expected_translation(
    direction: FreezeDirection,
    params: &ScaffoldParams,
    anchors: &SweepAnchors,
) -> AffineMap {
    let (sweep, drift) = sweep_speeds(direction, params);
    // Project (t, x) with x = f + sweep*t along (1, drift) onto
    // x = u + sweep*t: sigma = (f - u) / (sweep - drift).
    let sigma = (&anchors.freezer_intercept - &anchors.unfreezer_intercept)
        .checked_div(&(&sweep - &drift))
        .expect("drift differs from sweep speed");
    AffineMap::translation(&drift * &sigma, sigma)
}

fn sweep_speeds(direction: FreezeDirection, params: &ScaffoldParams) -> (Rational, Rational) {
    match direction {
        FreezeDirection::Left => (params.toggle_speed.clone(), -&params.frozen_speed),
        FreezeDirection::Right => (-&params.toggle_speed, params.frozen_speed.clone()),
    }
}

fn computation_max(names: &[String], machine: &SignalMachine) -> Rational {
    names
        .iter()
        .filter_map(|n| machine.speed_of(n).ok())
        .map(|s| s.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

fn check_computation_speeds(
    names: &[String],
    machine: &SignalMachine,
    params: &ScaffoldParams,
) -> Result<(), ToolkitError> {
    for c in names {
        let speed = machine
            .speed_of(c)
            .map_err(|e| ToolkitError::BranchStateUnknown(e.0.clone()))?;
        if speed.abs() >= params.toggle_speed {
            return Err(ToolkitError::SpeedOrderViolation(format!(
                "computation signal `{c}` at speed {} is not below the toggle speed {}",
                speed, params.toggle_speed
            )));
        }
    }
    Ok(())
}

/// Scaling fragment: freeze, redirect once into a standing bundle,
/// unfreeze along a line parallel to the freeze line. Factor 1 is the
/// plain freeze/unfreeze pair. Generated in the leftward-drift
/// orientation.
pub fn gen_scale(
    computation_names: &[String],
    machine: &SignalMachine,
    factor: &ScaleFactor,
    params: &ScaffoldParams,
    anchors: &SweepAnchors,
) -> Result<Fragment, ToolkitError> {
    if factor.value() == &Rational::one() {
        return gen_freeze_unfreeze(
            computation_names,
            machine,
            FreezeDirection::Left,
            params,
            anchors,
        );
    }
    check_computation_speeds(computation_names, machine, params)?;
    let redirect_speed = params.redirect_speed(factor);
    let sweep = params.toggle_speed.clone();
    let drift = -&params.frozen_speed;
    let redirect_at = anchors
        .redirect_intercept
        .clone()
        .expect("gen_scale needs a redirect intercept");
    let mut f = Fragment::default();
    f.metasignals.push(("freezer".into(), sweep.clone()));
    f.metasignals.push(("redirect".into(), redirect_speed));
    f.metasignals.push(("unfreezer".into(), sweep));
    for c in computation_names {
        f.metasignals.push((freeze_name(c), drift.clone()));
        f.metasignals.push((freeze2_name(c), Rational::zero()));
        f.rules.push((
            vec!["freezer".into(), c.clone()],
            vec!["freezer".into(), freeze_name(c)],
        ));
        f.rules.push((
            vec!["redirect".into(), freeze_name(c)],
            vec!["redirect".into(), freeze2_name(c)],
        ));
        f.rules.push((
            vec!["unfreezer".into(), freeze2_name(c)],
            vec!["unfreezer".into(), c.clone()],
        ));
    }
    f.placements = vec![
        (anchors.freezer_intercept.clone(), "freezer".into()),
        (redirect_at, "redirect".into()),
        (anchors.unfreezer_intercept.clone(), "unfreezer".into()),
    ];
    Ok(f)
}

/// The uniform scaling map the [`gen_scale`] construction realizes,
/// computed by chasing one anchor point through both projections.
pub fn expected_scale_map(
    factor: &ScaleFactor,
    params: &ScaffoldParams,
    anchors: &SweepAnchors,
) -> AffineMap {
    if factor.value() == &Rational::one() {
        return expected_translation(FreezeDirection::Left, params, anchors);
    }
    let w = &params.toggle_speed;
    let phi = &params.frozen_speed;
    let u = params.redirect_speed(factor);
    let a = &anchors.freezer_intercept;
    let b = anchors.redirect_intercept.as_ref().expect("redirect intercept");
    let c = &anchors.unfreezer_intercept;
    // P0 = (t=0, x=a) on the freeze line; drift along (1, -phi) to the
    // redirect line, stand along (1, 0) to the unfreeze line.
    let sigma = (a - b).checked_div(&(&u + phi)).expect("positive speeds");
    let x1 = a - &(phi * &sigma);
    let rho = (&(&x1 - c) - &(w * &sigma)).checked_div(w).expect("sweep nonzero");
    let t2 = &sigma + &rho;
    let s = factor.value();
    AffineMap::new(s.clone(), &x1 - &(s * a), t2)
}

/// Report from [`check_affine_equivalence`].
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub checked: usize,
    /// The first original event (within the region) whose mapped image
    /// is missing from the transformed diagram, with the expected point.
    pub first_mismatch: Option<(crate::engine::CollisionEvent, Point)>,
}

/// Checks that every event of `original` within the time region maps —
/// exactly, under `map` — to an event of `transformed` with the same
/// meta-signal sets and kind. Containment, not bijection: the
/// transformed diagram may hold extra scaffold events.
pub fn check_affine_equivalence(
    original: &SpaceTimeDiagram,
    transformed: &SpaceTimeDiagram,
    region: (&Rational, Option<&Rational>),
    map: &AffineMap,
) -> EquivalenceReport {
    let (lo, hi) = region;
    let mut checked = 0;
    for e in &original.events {
        if &e.at.t < lo {
            continue;
        }
        if let Some(hi) = hi {
            if &e.at.t > hi {
                continue;
            }
        }
        checked += 1;
        let want = map.apply(&e.at);
        let found = transformed.events.iter().any(|f| {
            f.at == want && f.incoming == e.incoming && f.outgoing == e.outgoing && f.kind == e.kind
        });
        if !found {
            return EquivalenceReport {
                equivalent: false,
                checked,
                first_mismatch: Some((e.clone(), want)),
            };
        }
    }
    EquivalenceReport {
        equivalent: true,
        checked,
        first_mismatch: None,
    }
}

// ---- the two-sided copy scaffold ----

/// Scaffold meta-signal names for one namespace prefix.
pub(crate) struct ScaffoldNames {
    pub prefix: String,
}

impl ScaffoldNames {
    pub fn new(prefix: &str) -> ScaffoldNames {
        ScaffoldNames {
            prefix: prefix.to_string(),
        }
    }
    pub fn n(&self, tail: &str) -> String {
        format!("{}{}", self.prefix, tail)
    }
    pub fn middle(&self) -> String {
        self.n("Middle")
    }
    pub fn bound_l(&self) -> String {
        self.n("bound-L")
    }
    pub fn bound_r(&self) -> String {
        self.n("bound-R")
    }
    pub fn cont(&self, name: &str) -> String {
        format!("{}cont-{}", self.prefix, name)
    }
    pub fn fz_right(&self, name: &str) -> String {
        format!("{}fzR-{}", self.prefix, name)
    }
    pub fn fz_left(&self, name: &str) -> String {
        format!("{}fzL-{}", self.prefix, name)
    }
}

/// The probe kit for one namespace: probes, reflection and midpoint
/// rules. `mirror` launches leftward from the right boundary (used by
/// left-hand copies, whose recall sweep finishes at their right edge).
pub(crate) fn probe_kit(names: &ScaffoldNames, params: &ScaffoldParams, mirror: bool) -> Fragment {
    let mut f = Fragment::default();
    let sign = if mirror { Rational::int(-1) } else { Rational::int(1) };
    let (fast, slow, back, reflector) = if mirror {
        (
            names.n("probe-fast-m"),
            names.n("probe-slow-m"),
            names.n("probe-back-m"),
            names.bound_l(),
        )
    } else {
        (
            names.n("probe-fast"),
            names.n("probe-slow"),
            names.n("probe-back"),
            names.bound_r(),
        )
    };
    f.metasignals.push((fast.clone(), &sign * &params.probe_fast));
    f.metasignals.push((slow.clone(), &sign * &params.probe_slow));
    f.metasignals.push((back.clone(), -&(&sign * &params.probe_fast)));
    f.metasignals.push((names.middle(), Rational::zero()));
    f.rules.push((
        vec![fast, reflector.clone()],
        vec![reflector, back.clone()],
    ));
    f.rules.push((vec![back, slow], vec![names.middle()]));
    f
}

/// How one parked branch resumes: the park name (in the parent
/// namespace), the copy initiator it launches, and what each side's
/// recall emits in its place.
#[derive(Clone, Debug)]
pub struct ParkWiring {
    pub park: String,
    pub ci: String,
    pub right_kick: Vec<String>,
    pub left_kick: Vec<String>,
}

/// One result collector: its name stem, fold operation, how its final
/// answer travels, and the result signals each side can deliver.
#[derive(Clone, Debug)]
pub struct CollectorWiring {
    pub stem: String,
    pub universal: bool,
    pub a2_speed: Rational,
    pub right_results: Vec<(String, bool)>,
    pub left_results: Vec<(String, bool)>,
}

impl CollectorWiring {
    pub fn waiting(&self) -> String {
        format!("{}-2", self.stem)
    }
    pub fn one_result(&self, value: bool) -> String {
        format!("{}-a1-{}", self.stem, if value { "T" } else { "F" })
    }
    pub fn answer(&self, value: bool) -> String {
        format!("{}-a2-{}", self.stem, if value { "Y" } else { "N" })
    }
    fn fold(&self, a: bool, b: bool) -> bool {
        if self.universal {
            a && b
        } else {
            a || b
        }
    }
}

/// Full wiring of one copy scaffold.
pub(crate) struct ScaffoldWiring {
    pub names: ScaffoldNames,
    /// Standing computation signals to copy, boundaries excluded.
    pub freezables: Vec<String>,
    pub parks: Vec<ParkWiring>,
    /// Copy-namespace renaming, right and left. Must cover every
    /// freezable and both boundaries.
    pub resume_right: BTreeMap<String, String>,
    pub resume_left: BTreeMap<String, String>,
    /// Extra outputs at the recall death events (probe launches for
    /// copies that can themselves branch).
    pub right_finish_extra: Vec<String>,
    pub left_finish_extra: Vec<String>,
    /// One collector per copy initiator in use, keyed by the initiator
    /// meta-signal name.
    pub collectors: Vec<(String, CollectorWiring)>,
}

/// Emits the scaffold: copy initiators, toggles, freeze family,
/// recovery locators, recall sweeps and collectors.
pub(crate) fn scaffold_kit(w: &ScaffoldWiring, params: &ScaffoldParams) -> Fragment {
    let names = &w.names;
    let mut f = Fragment::default();
    let tog = &params.toggle_speed;

    // Copy initiators, one per quantifier in use, reflecting off the
    // boundaries until they find the midpoint signal. Meeting it births
    // seven signals: the collector plus the six emitted here.
    let six: Vec<String> = vec![
        names.n("MR"),
        names.n("ML"),
        names.n("Rec1-R"),
        names.n("Rec2-R"),
        names.n("Rec1-L"),
        names.n("Rec2-L"),
    ];
    for (ci, collector) in &w.collectors {
        let back = format!("{ci}-back");
        f.metasignals.push((ci.clone(), params.ci_speed.clone()));
        f.metasignals.push((back.clone(), -&params.ci_speed));
        f.rules.push((
            vec![ci.clone(), names.bound_r()],
            vec![names.bound_r(), back.clone()],
        ));
        f.rules.push((
            vec![back.clone(), names.bound_l()],
            vec![names.bound_l(), ci.clone()],
        ));
        let mut outs = six.clone();
        outs.push(collector.waiting());
        f.rules.push((vec![ci.clone(), names.middle()], outs.clone()));
        f.rules.push((vec![back, names.middle()], outs));
    }

    // Messengers and toggles.
    f.metasignals.push((names.n("MR"), tog.clone()));
    f.metasignals.push((names.n("ML"), -tog));
    f.metasignals.push((names.n("Toggle-Right"), -tog));
    f.metasignals.push((names.n("Toggle-Left"), tog.clone()));
    f.rules.push((
        vec![names.n("MR"), names.bound_r()],
        vec![
            names.n("Toggle-Right"),
            names.fz_right(&names.bound_r()),
            names.cont(&names.bound_r()),
        ],
    ));
    f.rules.push((
        vec![names.n("ML"), names.bound_l()],
        vec![
            names.n("Toggle-Left"),
            names.fz_left(&names.bound_l()),
            names.cont(&names.bound_l()),
        ],
    ));

    // Boundary frozen copies and continuations.
    for bound in [names.bound_l(), names.bound_r()] {
        f.metasignals.push((names.cont(&bound), Rational::zero()));
        f.metasignals
            .push((names.fz_right(&bound), params.frozen_speed.clone()));
        f.metasignals
            .push((names.fz_left(&bound), -&params.frozen_speed));
    }
    f.rules.push((
        vec![names.n("Toggle-Right"), names.cont(&names.bound_l())],
        vec![names.fz_right(&names.bound_l())],
    ));
    f.rules.push((
        vec![names.n("Toggle-Left"), names.cont(&names.bound_r())],
        vec![names.fz_left(&names.bound_r())],
    ));

    // Freeze family over the computation signals: first toggle copies
    // and freezes, second toggle freezes the continuation.
    for c in &w.freezables {
        f.metasignals.push((names.cont(c), Rational::zero()));
        f.metasignals
            .push((names.fz_right(c), params.frozen_speed.clone()));
        f.metasignals
            .push((names.fz_left(c), -&params.frozen_speed));
        f.rules.push((
            vec![names.n("Toggle-Right"), c.clone()],
            vec![names.n("Toggle-Right"), names.fz_right(c), names.cont(c)],
        ));
        f.rules.push((
            vec![names.n("Toggle-Left"), c.clone()],
            vec![names.n("Toggle-Left"), names.fz_left(c), names.cont(c)],
        ));
        f.rules.push((
            vec![names.n("Toggle-Right"), names.cont(c)],
            vec![names.n("Toggle-Right"), names.fz_right(c)],
        ));
        f.rules.push((
            vec![names.n("Toggle-Left"), names.cont(c)],
            vec![names.n("Toggle-Left"), names.fz_left(c)],
        ));
    }

    // Recovery locators: Rec1 outruns the messenger to the boundary and
    // converts into Rec3, which rides parallel to the escaping bundle;
    // Rec2 catches Rec3 beyond the boundary and launches the recall.
    for (side, sign) in [("R", Rational::int(1)), ("L", Rational::int(-1))] {
        let rec1 = names.n(&format!("Rec1-{side}"));
        let rec2 = names.n(&format!("Rec2-{side}"));
        let rec3 = names.n(&format!("Rec3-{side}"));
        let recall = names.n(&format!("Recall-{side}"));
        f.metasignals
            .push((rec1.clone(), &sign * &params.recovery_speed));
        f.metasignals.push((rec2.clone(), &sign * &params.rec2_speed));
        f.metasignals.push((rec3.clone(), &sign * &params.frozen_speed));
        f.metasignals
            .push((recall.clone(), -&(&sign * &params.recall_speed)));
        let bound = if side == "R" { names.bound_r() } else { names.bound_l() };
        f.rules.push((vec![rec1, bound.clone()], vec![bound, rec3.clone()]));
        f.rules.push((vec![rec2, rec3], vec![recall]));
    }

    // Recall sweeps: restore each frozen signal into the copy
    // namespace; the parked branch resumes as its designated
    // continuation; the far boundary copy ends the sweep.
    let parks: BTreeMap<&String, &ParkWiring> = w.parks.iter().map(|p| (&p.park, p)).collect();
    let recall_r = names.n("Recall-R");
    let recall_l = names.n("Recall-L");
    for c in w
        .freezables
        .iter()
        .chain([names.bound_r(), names.bound_l()].iter())
    {
        if c == &names.bound_l() {
            let mut outs = vec![w.resume_right[c].clone()];
            outs.extend(w.right_finish_extra.iter().cloned());
            f.rules.push((vec![recall_r.clone(), names.fz_right(c)], outs));
        } else if let Some(p) = parks.get(c) {
            let mut outs = vec![recall_r.clone()];
            outs.extend(p.right_kick.iter().cloned());
            f.rules.push((vec![recall_r.clone(), names.fz_right(c)], outs));
        } else {
            f.rules.push((
                vec![recall_r.clone(), names.fz_right(c)],
                vec![recall_r.clone(), w.resume_right[c].clone()],
            ));
        }
        if c == &names.bound_r() {
            let mut outs = vec![w.resume_left[c].clone()];
            outs.extend(w.left_finish_extra.iter().cloned());
            f.rules.push((vec![recall_l.clone(), names.fz_left(c)], outs));
        } else if let Some(p) = parks.get(c) {
            let mut outs = vec![recall_l.clone()];
            outs.extend(p.left_kick.iter().cloned());
            f.rules.push((vec![recall_l.clone(), names.fz_left(c)], outs));
        } else {
            f.rules.push((
                vec![recall_l.clone(), names.fz_left(c)],
                vec![recall_l.clone(), w.resume_left[c].clone()],
            ));
        }
    }

    // Collectors and their fold rules.
    for (_, col) in &w.collectors {
        f.metasignals.push((col.waiting(), Rational::zero()));
        f.metasignals.push((col.one_result(true), Rational::zero()));
        f.metasignals.push((col.one_result(false), Rational::zero()));
        f.metasignals.push((col.answer(true), col.a2_speed.clone()));
        f.metasignals.push((col.answer(false), col.a2_speed.clone()));
        for (rname, rv) in &col.right_results {
            f.rules.push((
                vec![rname.clone(), col.waiting()],
                vec![col.one_result(*rv)],
            ));
            for first in [true, false] {
                f.rules.push((
                    vec![rname.clone(), col.one_result(first)],
                    vec![col.answer(col.fold(first, *rv))],
                ));
            }
        }
        for (lname, lv) in &col.left_results {
            f.rules.push((
                vec![lname.clone(), col.waiting()],
                vec![col.one_result(*lv)],
            ));
            for first in [true, false] {
                f.rules.push((
                    vec![lname.clone(), col.one_result(first)],
                    vec![col.answer(col.fold(first, *lv))],
                ));
            }
            for (rname, rv) in &col.right_results {
                if rname != lname {
                    f.rules.push((
                        vec![rname.clone(), lname.clone(), col.waiting()],
                        vec![col.answer(col.fold(*rv, *lv))],
                    ));
                }
            }
        }
    }

    f
}

/// Spec-level convenience: a scaffold over `computation_names` standing
/// between boundaries placed at `left` and `right`, with the `park`
/// signal resuming as `branch.1` on the right and `branch.0` on the
/// left, both of which must be declared head signals of the
/// computation. Copies resume under their original names; full
/// renaming and result folding are wired by the alternating-machine
/// compiler.
pub fn gen_copy_scaffold(
    computation_names: &[String],
    machine: &SignalMachine,
    branch: (&str, &str),
    collector_stem: &str,
    params: &ScaffoldParams,
    left: &Rational,
    right: &Rational,
) -> Result<Fragment, ToolkitError> {
    if left >= right {
        return Err(ToolkitError::DegenerateInterval);
    }
    let (left_state, right_state) = branch;
    let mut chaser = Rational::zero();
    for s in [left_state, right_state] {
        match machine.speed_of(s) {
            Ok(speed) => chaser = chaser.max(speed.abs()),
            Err(e) => return Err(ToolkitError::BranchStateUnknown(e.0)),
        }
    }
    params.validate(&computation_max(computation_names, machine), &chaser)?;
    check_computation_speeds(computation_names, machine, params)?;
    let names = ScaffoldNames::new("");
    let park = "park".to_string();
    let mut freezables: Vec<String> = computation_names.to_vec();
    freezables.push(park.clone());
    let identity: BTreeMap<String, String> = freezables
        .iter()
        .cloned()
        .chain([names.bound_l(), names.bound_r()])
        .map(|n| (n.clone(), n))
        .collect();
    let wiring = ScaffoldWiring {
        names: ScaffoldNames::new(""),
        freezables: freezables.clone(),
        parks: vec![ParkWiring {
            park: park.clone(),
            ci: "CI".into(),
            right_kick: vec![right_state.to_string()],
            left_kick: vec![left_state.to_string()],
        }],
        resume_right: identity.clone(),
        resume_left: identity,
        right_finish_extra: vec![],
        left_finish_extra: vec![],
        collectors: vec![(
            "CI".into(),
            CollectorWiring {
                stem: collector_stem.to_string(),
                universal: collector_stem.starts_with("All"),
                a2_speed: Rational::zero(),
                right_results: vec![],
                left_results: vec![],
            },
        )],
    };
    let mut f = Fragment::default();
    f.metasignals.push((names.bound_l(), Rational::zero()));
    f.metasignals.push((names.bound_r(), Rational::zero()));
    f.metasignals.push((park, Rational::zero()));
    f.extend(probe_kit(&names, params, false));
    f.extend(scaffold_kit(&wiring, params));
    f.placements.push((left.clone(), names.bound_l()));
    f.placements.push((right.clone(), names.bound_r()));
    f.placements.push((left - &rat(3, 4), names.n("probe-fast")));
    f.placements.push((left - &rat(1, 4), names.n("probe-slow")));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunLimits};
    use crate::machine::Configuration;

    #[test]
    fn params_default_validates_for_compiled_machines() {
        let p = ScaffoldParams::default();
        p.validate(&Rational::int(4), &Rational::one()).unwrap();
        assert_eq!(p.scale_factor(), rat(3, 4));
        assert!(p.half_clearance().is_positive());
    }

    #[test]
    fn recall_speed_from_factor_round_trips() {
        let p = ScaffoldParams::default().with_scale_factor(&ScaleFactor::new(rat(1, 2)).unwrap());
        assert_eq!(p.scale_factor(), rat(1, 2));
        let p = ScaffoldParams::default().with_scale_factor(&ScaleFactor::new(rat(3, 4)).unwrap());
        assert_eq!(p.recall_speed, rat(30, 13));
    }

    #[test]
    fn scale_factor_domain() {
        assert!(ScaleFactor::new(Rational::zero()).is_err());
        assert!(ScaleFactor::new(rat(5, 4)).is_err());
        assert!(ScaleFactor::new(Rational::one()).is_ok());
    }

    #[test]
    fn middle_lands_exactly_in_the_middle() {
        let params = ScaffoldParams {
            probe_slow: Rational::one(),
            probe_fast: Rational::int(3),
            ..ScaffoldParams::default()
        };
        let frag = gen_middle(&Rational::zero(), &Rational::int(6), &params).unwrap();
        let (m, c) = frag
            .merge(&SignalMachine::new(), &Configuration::empty())
            .unwrap();
        let d = run(&m, &c, &RunLimits::default()).unwrap();
        let birth = d.first_birth_of("mid-Middle").expect("middle born");
        assert_eq!(birth.x, Rational::int(3));
        assert_eq!(birth.t, rat(13, 4));
        assert_eq!(d.halt, crate::engine::HaltReason::Quiescent);
    }

    #[test]
    fn middle_of_tiny_interval() {
        let frag = gen_middle(&Rational::zero(), &rat(1, 3), &ScaffoldParams::default()).unwrap();
        let (m, c) = frag
            .merge(&SignalMachine::new(), &Configuration::empty())
            .unwrap();
        let d = run(&m, &c, &RunLimits::default()).unwrap();
        let birth = d.first_birth_of("mid-Middle").unwrap();
        assert_eq!(birth.x, rat(1, 6));
    }

    #[test]
    fn middle_of_symmetric_interval_is_zero() {
        let frag =
            gen_middle(&Rational::int(-2), &Rational::int(2), &ScaffoldParams::default()).unwrap();
        let (m, c) = frag
            .merge(&SignalMachine::new(), &Configuration::empty())
            .unwrap();
        let d = run(&m, &c, &RunLimits::default()).unwrap();
        assert_eq!(d.first_birth_of("mid-Middle").unwrap().x, Rational::zero());
    }

    #[test]
    fn scale_factor_one_degenerates_to_freeze_pair() {
        let mut m = SignalMachine::new();
        m.add_metasignal("p", Rational::int(1));
        let anchors = SweepAnchors {
            freezer_intercept: Rational::int(-5),
            unfreezer_intercept: Rational::int(-12),
            redirect_intercept: None,
        };
        let one = ScaleFactor::new(Rational::one()).unwrap();
        let frag = gen_scale(
            &["p".into()],
            &m,
            &one,
            &ScaffoldParams::default(),
            &anchors,
        )
        .unwrap();
        // No redirect: just the freeze/unfreeze pair.
        assert!(frag.metasignals.iter().all(|(n, _)| n != "redirect"));
        assert_eq!(frag.metasignals.len(), 3);
        let map = expected_scale_map(&one, &ScaffoldParams::default(), &anchors);
        assert_eq!(map.scale, Rational::one());
    }

    /// One standing cell between two boundaries, parked; after the
    /// scaffold completes, each half holds one copy of the cell plus
    /// its boundaries, and the halves resume with the designated
    /// branch signals.
    #[test]
    fn copy_scaffold_duplicates_a_single_cell() {
        let mut m = SignalMachine::new();
        m.add_metasignal("cell", Rational::zero());
        m.add_metasignal("wake-L", Rational::int(-1));
        m.add_metasignal("wake-R", Rational::int(1));
        let params = ScaffoldParams::default();
        let frag = gen_copy_scaffold(
            &["cell".into()],
            &m,
            ("wake-L", "wake-R"),
            "All-M1",
            &params,
            &Rational::int(-2),
            &rat(43, 17),
        )
        .unwrap();
        assert!(frag.metasignals.iter().any(|(n, _)| n == "All-M1-2"));
        let mut placements = frag.placements.clone();
        // The park is the paused head; the copy initiator starts below
        // left and finds the midpoint signal by reflection.
        placements.push((rat(1, 2), "park".into()));
        placements.push((rat(-5, 2), "CI".into()));
        let frag = Fragment {
            placements,
            ..frag
        };
        let base = Configuration::at_origin([(Rational::zero(), "cell".to_string())]);
        let (m2, c2) = frag.merge(&m, &base).unwrap();
        let d = run(&m2, &c2, &RunLimits::default()).unwrap();
        assert_eq!(d.halt, crate::engine::HaltReason::Quiescent);
        // Toggles launch simultaneously from the two boundaries.
        let tr = d.first_birth_of("Toggle-Right").unwrap();
        let tl = d.first_birth_of("Toggle-Left").unwrap();
        assert_eq!(tr.t, tl.t);
        // Two cell copies at distinct positions, two boundary pairs,
        // one branch signal per side.
        let count = |name: &str| {
            d.final_config
                .placements
                .iter()
                .filter(|p| p.metasignal == name)
                .count()
        };
        assert_eq!(count("cell"), 2);
        assert_eq!(count("bound-L"), 2);
        assert_eq!(count("bound-R"), 2);
        assert_eq!(count("wake-L"), 1);
        assert_eq!(count("wake-R"), 1);
        assert_eq!(count("All-M1-2"), 1);
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert_eq!(
            gen_middle(&Rational::int(2), &Rational::int(2), &ScaffoldParams::default())
                .unwrap_err(),
            ToolkitError::DegenerateInterval
        );
    }

    #[test]
    fn freeze_fragment_shape_matches_contract() {
        // A small hand computation with speeds in [-1, 1].
        let mut m = SignalMachine::new();
        m.add_metasignal("p", Rational::int(1));
        m.add_metasignal("q", Rational::int(-1));
        m.add_metasignal("s", Rational::zero());
        m.add_rule(["p".into(), "q".into()], ["s".into()]);
        let names: Vec<String> = vec!["p".into(), "q".into(), "s".into()];
        let anchors = SweepAnchors {
            freezer_intercept: Rational::int(-10),
            unfreezer_intercept: Rational::int(-17),
            redirect_intercept: None,
        };
        let frag = gen_freeze_unfreeze(
            &names,
            &m,
            FreezeDirection::Left,
            &ScaffoldParams::default(),
            &anchors,
        )
        .unwrap();
        // freezer + unfreezer + one frozen variant per name
        assert_eq!(frag.metasignals.len(), 2 + names.len());
        // freeze + unfreeze rule per name
        assert_eq!(frag.rules.len(), 2 * names.len());
    }

    #[test]
    fn empty_name_list_is_sweeps_only() {
        let m = SignalMachine::new();
        let anchors = SweepAnchors {
            freezer_intercept: Rational::zero(),
            unfreezer_intercept: Rational::int(-7),
            redirect_intercept: None,
        };
        let frag = gen_freeze_unfreeze(
            &[],
            &m,
            FreezeDirection::Left,
            &ScaffoldParams::default(),
            &anchors,
        )
        .unwrap();
        assert_eq!(frag.metasignals.len(), 2);
        assert!(frag.rules.is_empty());
    }

    #[test]
    fn too_fast_computation_rejected() {
        let mut m = SignalMachine::new();
        m.add_metasignal("fast", Rational::int(9));
        let anchors = SweepAnchors {
            freezer_intercept: Rational::zero(),
            unfreezer_intercept: Rational::int(-7),
            redirect_intercept: None,
        };
        let err = gen_freeze_unfreeze(
            &["fast".into()],
            &m,
            FreezeDirection::Left,
            &ScaffoldParams::default(),
            &anchors,
        )
        .unwrap_err();
        assert!(matches!(err, ToolkitError::SpeedOrderViolation(_)));
    }

    /// Freeze and resume a running three-signal computation and check
    /// the resumed collision is the exact translate.
    #[test]
    fn freeze_unfreeze_translates_a_collision() {
        let mut m = SignalMachine::new();
        m.add_metasignal("p", Rational::int(1));
        m.add_metasignal("q", Rational::int(-1));
        m.add_metasignal("s", Rational::zero());
        m.add_rule(["p".into(), "q".into()], ["s".into()]);
        let init = Configuration::at_origin([
            (Rational::int(-4), "p".into()),
            (Rational::int(4), "q".into()),
        ]);
        // Original: collision at (0, 4).
        let original = run(&m, &init, &RunLimits::default()).unwrap();
        assert_eq!(
            original.events[0].at,
            Point::new(Rational::zero(), Rational::int(4))
        );

        let names: Vec<String> = vec!["p".into(), "q".into(), "s".into()];
        let anchors = SweepAnchors {
            // The freezer crosses x=-4 at t=1, well before the collision.
            freezer_intercept: Rational::int(-9),
            unfreezer_intercept: Rational::int(-23),
            redirect_intercept: None,
        };
        let params = ScaffoldParams::default();
        let frag =
            gen_freeze_unfreeze(&names, &m, FreezeDirection::Left, &params, &anchors).unwrap();
        let (m2, c2) = frag.merge(&m, &init).unwrap();
        let frozen_run = run(&m2, &c2, &RunLimits::default()).unwrap();
        let map = expected_translation(FreezeDirection::Left, &params, &anchors);
        // sigma = 14/7 = 2: the collision shifts by (dt, dx) = (2, -4).
        assert_eq!(
            map,
            AffineMap::translation(Rational::int(-4), Rational::int(2))
        );
        let report =
            check_affine_equivalence(&original, &frozen_run, (&Rational::zero(), None), &map);
        assert!(report.equivalent, "mismatch: {:?}", report.first_mismatch);
        assert_eq!(report.checked, 1);
    }

    /// Scale the same computation by 1/2 and check the event image.
    #[test]
    fn scale_halves_a_collision_exactly() {
        let mut m = SignalMachine::new();
        m.add_metasignal("p", Rational::int(1));
        m.add_metasignal("q", Rational::int(-1));
        m.add_metasignal("s", Rational::zero());
        m.add_rule(["p".into(), "q".into()], ["s".into()]);
        let init = Configuration::at_origin([
            (Rational::int(-4), "p".into()),
            (Rational::int(4), "q".into()),
        ]);
        let original = run(&m, &init, &RunLimits::default()).unwrap();

        let names: Vec<String> = vec!["p".into(), "q".into(), "s".into()];
        let factor = ScaleFactor::new(rat(1, 2)).unwrap();
        let params = ScaffoldParams::default();
        let anchors = SweepAnchors {
            freezer_intercept: Rational::int(-9),
            redirect_intercept: Some(Rational::int(-20)),
            unfreezer_intercept: Rational::int(-60),
        };
        let frag = gen_scale(&names, &m, &factor, &params, &anchors).unwrap();
        let (m2, c2) = frag.merge(&m, &init).unwrap();
        let scaled_run = run(&m2, &c2, &RunLimits::default()).unwrap();
        let map = expected_scale_map(&factor, &params, &anchors);
        assert_eq!(map.scale, rat(1, 2));
        let report =
            check_affine_equivalence(&original, &scaled_run, (&Rational::zero(), None), &map);
        assert!(report.equivalent, "mismatch: {:?}", report.first_mismatch);
    }

    #[test]
    fn identity_map_is_equivalent_to_itself() {
        let mut m = SignalMachine::new();
        m.add_metasignal("p", Rational::int(1));
        m.add_metasignal("q", Rational::int(-1));
        m.add_rule(["p".into(), "q".into()], Vec::<String>::new());
        let init = Configuration::at_origin([
            (Rational::int(-1), "p".into()),
            (Rational::int(1), "q".into()),
        ]);
        let d = run(&m, &init, &RunLimits::default()).unwrap();
        let report =
            check_affine_equivalence(&d, &d, (&Rational::zero(), None), &AffineMap::identity());
        assert!(report.equivalent);
        let shifted = AffineMap::translation(Rational::one(), Rational::zero());
        let report = check_affine_equivalence(&d, &d, (&Rational::zero(), None), &shifted);
        assert!(!report.equivalent);
        assert!(report.first_mismatch.is_some());
    }
}
