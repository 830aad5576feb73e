//! SVG rendering of space-time diagrams.
//!
//! Space runs rightward, time upward. One line element per segment,
//! optional circle markers on collision events, a small legend of
//! meta-signal colors. Coordinates stay exact rationals until the final
//! viewport scaling; output is deterministic byte for byte.

use crate::engine::{EventKind, SpaceTimeDiagram};
use crate::rational::Rational;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Visual options. Colors default to a fixed palette assigned to
/// meta-signal names in sorted order; explicit entries override.
#[derive(Clone, Debug)]
pub struct RenderStyle {
    pub width: u32,
    pub height: u32,
    pub colors: BTreeMap<String, String>,
    pub event_markers: bool,
    pub legend: bool,
}

impl Default for RenderStyle {
    fn default() -> RenderStyle {
        RenderStyle {
            width: 800,
            height: 600,
            colors: BTreeMap::new(),
            event_markers: true,
            legend: true,
        }
    }
}

const PALETTE: [&str; 12] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#98df8a",
];

struct Bounds {
    x_min: Rational,
    x_max: Rational,
    t_min: Rational,
    t_max: Rational,
}

fn bounds(d: &SpaceTimeDiagram) -> Bounds {
    let mut xs: Vec<Rational> = Vec::new();
    let mut ts: Vec<Rational> = Vec::new();
    for s in &d.segments {
        xs.push(s.birth.x.clone());
        ts.push(s.birth.t.clone());
        if let Some(death) = &s.death {
            xs.push(death.x.clone());
            ts.push(death.t.clone());
        }
    }
    for p in &d.final_config.placements {
        xs.push(p.position.clone());
    }
    ts.push(d.final_config.time.clone());
    if xs.is_empty() {
        xs.push(Rational::zero());
        xs.push(Rational::one());
    }
    if ts.is_empty() {
        ts.push(Rational::zero());
    }
    let x_min = xs.iter().min().unwrap().clone();
    let x_max = xs.iter().max().unwrap().clone();
    let t_min = ts.iter().min().unwrap().clone().min(Rational::zero());
    let t_max = ts.iter().max().unwrap().clone();
    Bounds {
        x_min,
        x_max,
        t_min,
        t_max: if t_max.is_zero() { Rational::one() } else { t_max },
    }
}

/// Renders the diagram. Open segments (signals still alive at the end)
/// are drawn up to the final configuration's time.
pub fn render_svg(d: &SpaceTimeDiagram, style: &RenderStyle) -> String {
    let b = bounds(d);
    let margin = 40.0;
    let w = f64::from(style.width);
    let h = f64::from(style.height);
    let x_min = b.x_min.to_f64();
    let x_span = (b.x_max.to_f64() - x_min).max(1e-9);
    let t_min = b.t_min.to_f64();
    let t_span = (b.t_max.to_f64() - t_min).max(1e-9);
    let sx = (w - 2.0 * margin) / x_span;
    let st = (h - 2.0 * margin) / t_span;
    let px = |x: f64| margin + (x - x_min) * sx;
    // Time axis points upward.
    let pt = |t: f64| h - margin - (t - t_min) * st;

    let mut names: Vec<&str> = d.segments.iter().map(|s| s.metasignal.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    let color_of = |name: &str| -> String {
        if let Some(c) = style.colors.get(name) {
            return c.clone();
        }
        let i = names.binary_search(&name).unwrap_or(0);
        PALETTE[i % PALETTE.len()].to_string()
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    // Axes: space baseline and time arrow.
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#cccccc"/>"##,
        margin,
        h - margin,
        w - margin,
        h - margin
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#cccccc"/>"##,
        margin,
        h - margin,
        margin,
        margin
    );

    let horizon = d.final_config.time.to_f64();
    for s in &d.segments {
        let (x1, t1) = (s.birth.x.to_f64(), s.birth.t.to_f64());
        let (x2, t2) = match &s.death {
            Some(p) => (p.x.to_f64(), p.t.to_f64()),
            None => {
                let dt = horizon - t1;
                (x1 + s.speed.to_f64() * dt, horizon)
            }
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}" stroke-width="1.5"><title>{}</title></line>"#,
            px(x1),
            pt(t1),
            px(x2),
            pt(t2),
            color_of(&s.metasignal),
            s.metasignal
        );
    }

    if style.event_markers {
        for e in &d.events {
            let fill = match e.kind {
                EventKind::Defined => "#000000",
                EventKind::Blank => "#bbbbbb",
            };
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="{fill}"/>"#,
                px(e.at.x.to_f64()),
                pt(e.at.t.to_f64()),
            );
        }
    }

    if style.legend {
        for (i, name) in names.iter().enumerate() {
            let y = 16.0 + 14.0 * i as f64;
            if y > h - margin {
                break;
            }
            let _ = writeln!(
                svg,
                r#"<text x="8" y="{y:.1}" font-size="11" font-family="monospace" fill="{}">{name}</text>"#,
                color_of(name),
            );
        }
    }

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunLimits};
    use crate::machine::Configuration;
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

    #[test]
    fn four_lines_and_two_markers() {
        let (m, c) = parse_machine_text(SIMPLE).unwrap();
        let d = run(&m, &c, &RunLimits::default()).unwrap();
        let svg = render_svg(&d, &RenderStyle::default());
        // 4 segments + 2 axis lines.
        assert_eq!(svg.matches("<line ").count(), 6);
        assert_eq!(svg.matches("<circle ").count(), 2);
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_diagram_renders_axes_only() {
        let (m, _) = parse_machine_text(SIMPLE).unwrap();
        let d = run(&m, &Configuration::empty(), &RunLimits::default()).unwrap();
        let svg = render_svg(&d, &RenderStyle::default());
        assert_eq!(svg.matches("<line ").count(), 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let (m, c) = parse_machine_text(SIMPLE).unwrap();
        let d1 = run(&m, &c, &RunLimits::default()).unwrap();
        let d2 = run(&m, &c, &RunLimits::default()).unwrap();
        let style = RenderStyle::default();
        assert_eq!(render_svg(&d1, &style), render_svg(&d2, &style));
    }
}
