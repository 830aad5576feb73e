//! Lossless diagram serialization.
//!
//! Two formats: JSON (machine-readable, exact — every rational is a
//! `"p/q"` string, so a reader reconstructs every segment and event
//! bit for bit) and a line-oriented text summary (events in
//! chronological order). Exports are deterministic: identical diagrams
//! serialize to identical bytes.

use crate::engine::{CollisionEvent, EventKind, HaltReason, Segment, SpaceTimeDiagram};
use crate::geom::Point;
use crate::machine::{Configuration, Placement};
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Text,
}

#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error("malformed diagram document: {0}")]
    Malformed(String),
}

#[derive(Serialize, Deserialize)]
struct PointDoc {
    x: Rational,
    t: Rational,
}

impl From<&Point> for PointDoc {
    fn from(p: &Point) -> PointDoc {
        PointDoc {
            x: p.x.clone(),
            t: p.t.clone(),
        }
    }
}

impl From<PointDoc> for Point {
    fn from(p: PointDoc) -> Point {
        Point::new(p.x, p.t)
    }
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    metasignal: String,
    speed: Rational,
    birth: PointDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    death: Option<PointDoc>,
}

#[derive(Serialize, Deserialize)]
struct EventDoc {
    at: PointDoc,
    incoming: Vec<String>,
    outgoing: Vec<String>,
    kind: String,
}

#[derive(Serialize, Deserialize)]
struct PlacementDoc {
    position: Rational,
    metasignal: String,
    birth: PointDoc,
}

#[derive(Serialize, Deserialize)]
struct DiagramDoc {
    segments: Vec<SegmentDoc>,
    events: Vec<EventDoc>,
    halt: String,
    final_time: Rational,
    final_config: Vec<PlacementDoc>,
}

fn halt_str(h: &HaltReason) -> &'static str {
    match h {
        HaltReason::Quiescent => "quiescent",
        HaltReason::CollisionBudget => "collision-budget",
        HaltReason::TimeBudget => "time-budget",
        HaltReason::AccumulationSuspected => "accumulation-suspected",
    }
}

fn halt_from(s: &str) -> Result<HaltReason, ImportError> {
    Ok(match s {
        "quiescent" => HaltReason::Quiescent,
        "collision-budget" => HaltReason::CollisionBudget,
        "time-budget" => HaltReason::TimeBudget,
        "accumulation-suspected" => HaltReason::AccumulationSuspected,
        other => return Err(ImportError::Malformed(format!("unknown halt `{other}`"))),
    })
}

fn to_doc(d: &SpaceTimeDiagram) -> DiagramDoc {
    DiagramDoc {
        segments: d
            .segments
            .iter()
            .map(|s| SegmentDoc {
                metasignal: s.metasignal.clone(),
                speed: s.speed.clone(),
                birth: (&s.birth).into(),
                death: s.death.as_ref().map(Into::into),
            })
            .collect(),
        events: d
            .events
            .iter()
            .map(|e| EventDoc {
                at: (&e.at).into(),
                incoming: e.incoming.iter().cloned().collect(),
                outgoing: e.outgoing.iter().cloned().collect(),
                kind: match e.kind {
                    EventKind::Defined => "defined".into(),
                    EventKind::Blank => "blank".into(),
                },
            })
            .collect(),
        halt: halt_str(&d.halt).into(),
        final_time: d.final_config.time.clone(),
        final_config: d
            .final_config
            .placements
            .iter()
            .map(|p| PlacementDoc {
                position: p.position.clone(),
                metasignal: p.metasignal.clone(),
                birth: (&p.birth).into(),
            })
            .collect(),
    }
}

/// Serializes a diagram. JSON is lossless; text lists the events one
/// per line.
pub fn export_diagram(d: &SpaceTimeDiagram, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => {
            serde_json::to_string_pretty(&to_doc(d)).expect("diagram serializes")
        }
        ExportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "halt: {}", halt_str(&d.halt));
            let _ = writeln!(out, "events: {}", d.events.len());
            for e in &d.events {
                let inc: Vec<&str> = e.incoming.iter().map(|s| s.as_str()).collect();
                let outg: Vec<&str> = e.outgoing.iter().map(|s| s.as_str()).collect();
                let kind = match e.kind {
                    EventKind::Defined => "defined",
                    EventKind::Blank => "blank",
                };
                let _ = writeln!(
                    out,
                    "t={} x={} [{kind}] {} -> {}",
                    e.at.t,
                    e.at.x,
                    inc.join("+"),
                    if outg.is_empty() { "-".to_string() } else { outg.join("+") },
                );
            }
            let _ = writeln!(out, "final: {} signals at t={}", d.final_config.len(), d.final_config.time);
            for p in &d.final_config.placements {
                let _ = writeln!(out, "  {} at {}", p.metasignal, p.position);
            }
            out
        }
    }
}

/// Reconstructs a diagram from its JSON export, exactly.
pub fn import_diagram(json: &str) -> Result<SpaceTimeDiagram, ImportError> {
    let doc: DiagramDoc =
        serde_json::from_str(json).map_err(|e| ImportError::Malformed(e.to_string()))?;
    let halt = halt_from(&doc.halt)?;
    Ok(SpaceTimeDiagram {
        segments: doc
            .segments
            .into_iter()
            .map(|s| Segment {
                metasignal: s.metasignal,
                speed: s.speed,
                birth: s.birth.into(),
                death: s.death.map(Into::into),
            })
            .collect(),
        events: doc
            .events
            .into_iter()
            .map(|e| {
                Ok(CollisionEvent {
                    at: e.at.into(),
                    incoming: e.incoming.into_iter().collect::<BTreeSet<_>>(),
                    outgoing: e.outgoing.into_iter().collect::<BTreeSet<_>>(),
                    kind: match e.kind.as_str() {
                        "defined" => EventKind::Defined,
                        "blank" => EventKind::Blank,
                        other => {
                            return Err(ImportError::Malformed(format!(
                                "unknown event kind `{other}`"
                            )))
                        }
                    },
                })
            })
            .collect::<Result<Vec<_>, _>>()?,
        halt,
        final_config: Configuration {
            time: doc.final_time,
            placements: doc
                .final_config
                .into_iter()
                .map(|p| Placement {
                    position: p.position,
                    metasignal: p.metasignal,
                    birth: p.birth.into(),
                })
                .collect(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunLimits};
    use crate::text::parse_machine_text;

    const SIMPLE: &str = "\
metasignal a 1
metasignal b -1
metasignal c 0
metasignal d 1
rule a+b -> d
rule d+c ->
initial -1 a
initial 1 b
initial 2 c
";

    fn simple_diagram() -> SpaceTimeDiagram {
        let (m, c) = parse_machine_text(SIMPLE).unwrap();
        run(&m, &c, &RunLimits::default()).unwrap()
    }

    #[test]
    fn json_round_trip_is_identity() {
        let d = simple_diagram();
        let json = export_diagram(&d, ExportFormat::Json);
        let back = import_diagram(&json).unwrap();
        assert_eq!(back, d);
        assert_eq!(export_diagram(&back, ExportFormat::Json), json);
    }

    #[test]
    fn json_has_exact_rationals_and_counts() {
        let d = simple_diagram();
        let json = export_diagram(&d, ExportFormat::Json);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["segments"].as_array().unwrap().len(), 4);
        assert_eq!(value["events"].as_array().unwrap().len(), 2);
        assert_eq!(value["halt"], "quiescent");
        assert_eq!(value["segments"][0]["birth"]["x"], "-1");
    }

    #[test]
    fn text_lists_events_chronologically() {
        let d = simple_diagram();
        let text = export_diagram(&d, ExportFormat::Text);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("halt: quiescent"));
        let first = lines.iter().position(|l| l.contains("a+b")).unwrap();
        let second = lines.iter().position(|l| l.contains("c+d")).unwrap();
        assert!(first < second);
    }

    #[test]
    fn export_is_deterministic() {
        let d1 = simple_diagram();
        let d2 = simple_diagram();
        assert_eq!(
            export_diagram(&d1, ExportFormat::Json),
            export_diagram(&d2, ExportFormat::Json)
        );
    }
}
