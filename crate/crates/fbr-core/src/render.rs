//! SVG rendering of instances and solutions: robots as circles,
//! communication edges solid, augmentation edges dashed, displacements as
//! arrows.

use crate::bench::SolveOutput;
use crate::geometry::{Point, TAU_GEO};
use crate::instance::Instance;
use std::fmt::Write;

fn fmt_coord(v: f64) -> String {
    format!("{v:.6}")
}

/// Renders an instance, and optionally a solution on top of it, into a
/// standalone SVG document in data coordinates.
pub fn render_svg(instance: &Instance, solution: Option<&SolveOutput>) -> String {
    let h = instance.h;
    let old = &instance.positions;
    let new: Option<&[Point]> = solution.map(|s| s.solution.new_positions.as_slice());

    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for p in old.iter().chain(new.into_iter().flatten()) {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let pad = h * 0.6;
    let (min_x, min_y) = (min_x - pad, min_y - pad);
    let width = max_x + pad - min_x;
    let height = max_y + pad - min_y;

    let r_robot = h / 15.0;
    let stroke = h / 60.0;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{:.0}">"#,
        fmt_coord(min_x),
        fmt_coord(min_y),
        fmt_coord(width),
        fmt_coord(height),
        (800.0 * height / width).max(1.0),
    )
    .unwrap();
    writeln!(
        svg,
        r##"  <defs>
    <marker id="arrow" markerWidth="8" markerHeight="6" refX="7" refY="3" orient="auto" markerUnits="strokeWidth">
      <path d="M0,0 L8,3 L0,6 z" fill="#c0392b"/>
    </marker>
  </defs>"##
    )
    .unwrap();

    // solid communication edges of the displayed configuration
    let shown: &[Point] = new.unwrap_or(old);
    let mut edge_lines = String::new();
    for i in 0..shown.len() {
        for j in i + 1..shown.len() {
            if shown[i].dist(shown[j]) <= h + TAU_GEO {
                writeln!(
                    edge_lines,
                    r#"    <line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    fmt_coord(shown[i].x),
                    fmt_coord(shown[i].y),
                    fmt_coord(shown[j].x),
                    fmt_coord(shown[j].y),
                )
                .unwrap();
            }
        }
    }
    writeln!(
        svg,
        "  <g stroke=\"#555555\" stroke-width=\"{}\">\n{}  </g>",
        fmt_coord(stroke),
        edge_lines
    )
    .unwrap();

    if let Some(out) = solution {
        // dashed augmentation edges at the new positions
        let mut dashed = String::new();
        for (i, j) in out.augmentation.pairs() {
            writeln!(
                dashed,
                r#"    <line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                fmt_coord(shown[i].x),
                fmt_coord(shown[i].y),
                fmt_coord(shown[j].x),
                fmt_coord(shown[j].y),
            )
            .unwrap();
        }
        writeln!(
            svg,
            "  <g stroke=\"#2980b9\" stroke-width=\"{}\" stroke-dasharray=\"{} {}\">\n{}  </g>",
            fmt_coord(stroke),
            fmt_coord(h / 20.0),
            fmt_coord(h / 30.0),
            dashed
        )
        .unwrap();

        // hollow circles mark the old positions, arrows show displacement
        let mut old_marks = String::new();
        let mut arrows = String::new();
        for (o, n) in old.iter().zip(shown) {
            writeln!(
                old_marks,
                r#"    <circle cx="{}" cy="{}" r="{}"/>"#,
                fmt_coord(o.x),
                fmt_coord(o.y),
                fmt_coord(r_robot),
            )
            .unwrap();
            if o.dist(*n) > TAU_GEO {
                writeln!(
                    arrows,
                    r#"    <line x1="{}" y1="{}" x2="{}" y2="{}" marker-end="url(#arrow)"/>"#,
                    fmt_coord(o.x),
                    fmt_coord(o.y),
                    fmt_coord(n.x),
                    fmt_coord(n.y),
                )
                .unwrap();
            }
        }
        writeln!(
            svg,
            "  <g fill=\"none\" stroke=\"#999999\" stroke-width=\"{}\">\n{}  </g>",
            fmt_coord(stroke),
            old_marks
        )
        .unwrap();
        writeln!(
            svg,
            "  <g stroke=\"#c0392b\" stroke-width=\"{}\">\n{}  </g>",
            fmt_coord(stroke),
            arrows
        )
        .unwrap();
    }

    let mut robots = String::new();
    for p in shown {
        writeln!(
            robots,
            r#"    <circle cx="{}" cy="{}" r="{}"/>"#,
            fmt_coord(p.x),
            fmt_coord(p.y),
            fmt_coord(r_robot),
        )
        .unwrap();
    }
    writeln!(svg, "  <g fill=\"#2c3e50\">\n{}  </g>", robots).unwrap();
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{solve_instance, Algorithm};
    use crate::instance::{gen_instance, DEFAULT_SIDE_FACTOR};

    /// Minimal well-formedness check: every opened tag is closed in order.
    fn assert_balanced_markup(doc: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = doc;
        while let Some(open) = rest.find('<') {
            rest = &rest[open + 1..];
            let close = rest.find('>').expect("unterminated tag");
            let tag = &rest[..close];
            rest = &rest[close + 1..];
            if tag.starts_with('?') || tag.starts_with('!') {
                continue;
            }
            if let Some(name) = tag.strip_prefix('/') {
                assert_eq!(stack.pop().as_deref(), Some(name), "mismatched close tag");
            } else if !tag.ends_with('/') {
                let name = tag.split_whitespace().next().unwrap().to_string();
                stack.push(name);
            }
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    #[test]
    fn instance_only_has_solid_edges_and_no_arrows() {
        let inst = gen_instance(8, 1.0, 21, DEFAULT_SIDE_FACTOR).unwrap();
        let svg = render_svg(&inst, None);
        assert!(svg.contains("<line"));
        assert!(!svg.contains("marker-end"));
        assert!(!svg.contains("stroke-dasharray"));
        assert_balanced_markup(&svg);
    }

    #[test]
    fn solution_adds_arrows_for_moved_robots() {
        let inst = gen_instance(8, 1.0, 21, DEFAULT_SIDE_FACTOR).unwrap();
        let out = solve_instance(&inst, Algorithm::EaScr).unwrap();
        let svg = render_svg(&inst, Some(&out));
        let moved = inst
            .positions
            .iter()
            .zip(&out.solution.new_positions)
            .filter(|(a, b)| a.dist(**b) > TAU_GEO)
            .count();
        let arrows = svg.matches("marker-end").count();
        assert_eq!(arrows, moved);
        assert!(svg.contains("stroke-dasharray"));
        assert_balanced_markup(&svg);
    }

    #[test]
    fn output_is_deterministic() {
        let inst = gen_instance(8, 1.0, 4, DEFAULT_SIDE_FACTOR).unwrap();
        assert_eq!(render_svg(&inst, None), render_svg(&inst, None));
    }
}
