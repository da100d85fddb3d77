//! Standalone SVG charts. Styles are inline; no external references.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::lifecycle::{LifecycleReport, LifecycleState};
use crate::sota::{ActivityRow, SotaMapGrid};

const LABEL_WIDTH: f64 = 200.0;
const HEADER: f64 = 40.0;
const FONT: &str = "font-family=\"sans-serif\" font-size=\"10\"";

/// Viridis anchors at r = 0, 1/8, ..., 1.
const VIRIDIS: [(u8, u8, u8); 9] = [
    (68, 1, 84),
    (71, 44, 122),
    (59, 81, 139),
    (44, 113, 142),
    (33, 144, 141),
    (39, 173, 129),
    (92, 200, 99),
    (170, 220, 50),
    (253, 231, 37),
];

/// Colour for `r`, clamped to [0, 1], as `#rrggbb`.
pub fn viridis(r: f64) -> String {
    let x = if r.is_nan() { 0.0 } else { r.clamp(0.0, 1.0) } * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let t = x - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |p: u8, q: u8| (p as f64 + (q as f64 - p as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
    )
}

/// Months on x, tasks on y. Anchors are vertical dashes, improvements are
/// squares coloured by `r`. A cell with both draws both glyphs.
pub(super) fn sota_map_svg(grid: &SotaMapGrid) -> String {
    const CELL_W: f64 = 10.0;
    const CELL_H: f64 = 12.0;
    let width = LABEL_WIDTH + CELL_W * grid.columns.len() as f64 + 20.0;
    let height = HEADER + CELL_H * grid.rows.len() as f64 + 20.0;
    let col: BTreeMap<&str, usize> = grid.columns.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let row: BTreeMap<&str, usize> = grid.rows.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();

    let mut s = open(width, height);
    for (i, task) in grid.rows.iter().enumerate() {
        let y = HEADER + CELL_H * (i as f64 + 0.75);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\" {FONT}>{}</text>", LABEL_WIDTH - 4.0, escape(task));
    }
    for (i, month) in grid.columns.iter().enumerate() {
        if month.ends_with("-01") {
            let x = LABEL_WIDTH + CELL_W * i as f64;
            let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\" {FONT}>{}</text>", HEADER - 6.0, &month[..4]);
        }
    }
    for cell in &grid.cells {
        let (Some(&ci), Some(&ri)) = (col.get(cell.month.as_str()), row.get(cell.task.as_str())) else {
            continue;
        };
        let x = LABEL_WIDTH + CELL_W * ci as f64;
        let y = HEADER + CELL_H * ri as f64;
        if let Some(r) = cell.max_r {
            let _ = writeln!(
                s,
                "<rect class=\"improvement\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{} {} r={r}</title></rect>",
                x + 1.0,
                y + 1.0,
                CELL_W - 2.0,
                CELL_H - 2.0,
                viridis(r),
                escape(&cell.task),
                cell.month
            );
        }
        if cell.anchors > 0 {
            let cx = x + CELL_W / 2.0;
            let _ = writeln!(
                s,
                "<line class=\"anchor\" x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"1.5\"><title>{} {} anchors={}</title></line>",
                y + 1.0,
                y + CELL_H - 1.0,
                escape(&cell.task),
                cell.month,
                cell.anchors
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn state_colour(state: LifecycleState) -> &'static str {
    match state {
        LifecycleState::New => "#1b9e77",
        LifecycleState::ReportingSota => "#7570b3",
        LifecycleState::NoSotaOrNoResults => "#d95f02",
        LifecycleState::Disbanded => "#666666",
    }
}

/// Largest icon radius; a count equal to the maximum count draws at this size.
pub(super) const LIFECYCLE_MAX_RADIUS: f64 = 5.0;

/// Tasks on y, years on x with one slot per state. Circle area is
/// proportional to the benchmark count; zero counts draw nothing.
pub(super) fn lifecycle_svg(report: &LifecycleReport) -> String {
    const SLOT: f64 = 2.0 * LIFECYCLE_MAX_RADIUS + 2.0;
    const ROW_H: f64 = 2.0 * LIFECYCLE_MAX_RADIUS + 4.0;
    let years: Vec<i32> = (report.table.window.first_year..=report.table.censor_year).collect();
    let year_w = SLOT * LifecycleState::ALL.len() as f64 + 6.0;
    let width = LABEL_WIDTH + year_w * years.len() as f64 + 20.0;
    let height = HEADER + ROW_H * report.tasks.len() as f64 + 20.0;
    let max_count = report.counts.iter().map(|c| c.count).max().unwrap_or(0);
    let row: BTreeMap<&str, usize> = report.tasks.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();

    let mut s = open(width, height);
    for (i, task) in report.tasks.iter().enumerate() {
        let y = HEADER + ROW_H * (i as f64 + 0.7);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\" {FONT}>{}</text>", LABEL_WIDTH - 4.0, escape(task));
    }
    for (i, year) in years.iter().enumerate() {
        let x = LABEL_WIDTH + year_w * i as f64;
        let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\" {FONT}>{year}</text>", HEADER - 6.0);
    }
    for c in &report.counts {
        if c.count == 0 || c.year < report.table.window.first_year {
            continue;
        }
        let Some(&ri) = row.get(c.task.as_str()) else {
            continue;
        };
        let slot = LifecycleState::ALL.iter().position(|s| *s == c.state).unwrap_or(0);
        let cx = LABEL_WIDTH + year_w * (c.year - report.table.window.first_year) as f64 + SLOT * (slot as f64 + 0.5);
        let cy = HEADER + ROW_H * (ri as f64 + 0.5);
        let radius = LIFECYCLE_MAX_RADIUS * (c.count as f64 / max_count as f64).sqrt();
        let _ = writeln!(
            s,
            "<circle class=\"{}\" data-count=\"{}\" cx=\"{cx}\" cy=\"{cy}\" r=\"{radius}\" fill=\"{}\"><title>{} {} {} n={}</title></circle>",
            c.state.as_str(),
            c.count,
            state_colour(c.state),
            escape(&c.task),
            c.year,
            c.state.as_str(),
            c.count
        );
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivitySvgStyle {
    pub panel_width: f64,
    pub panel_height: f64,
}

impl Default for ActivitySvgStyle {
    fn default() -> Self {
        Self { panel_width: 320.0, panel_height: 180.0 }
    }
}

/// One panel per domain with an active line (solid) and a SOTA-reporting line (dashed).
pub(super) fn activity_svg(rows: &[ActivityRow], style: &ActivitySvgStyle) -> String {
    let mut domains: BTreeMap<&str, Vec<&ActivityRow>> = BTreeMap::new();
    for r in rows {
        domains.entry(r.domain.as_str()).or_default().push(r);
    }
    let margin = 30.0;
    let panel_h = style.panel_height + 2.0 * margin;
    let width = style.panel_width + 2.0 * margin;
    let height = panel_h * domains.len().max(1) as f64;
    let mut s = open(width, height);
    for (pi, (domain, series)) in domains.iter().enumerate() {
        let top = pi as f64 * panel_h + margin;
        let first = series.iter().map(|r| r.year).min().unwrap_or(0);
        let last = series.iter().map(|r| r.year).max().unwrap_or(0);
        let peak = series.iter().map(|r| r.active).max().unwrap_or(0).max(1) as f64;
        let span = (last - first).max(1) as f64;
        let x = |year: i32| margin + style.panel_width * (year - first) as f64 / span;
        let y = |v: usize| top + style.panel_height * (1.0 - v as f64 / peak);
        let _ = writeln!(s, "<text x=\"{margin}\" y=\"{}\" {FONT}>{}</text>", top - 8.0, escape(domain));
        let _ = writeln!(
            s,
            "<rect x=\"{margin}\" y=\"{top}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#cccccc\"/>",
            style.panel_width, style.panel_height
        );
        let line = |pick: fn(&ActivityRow) -> usize| -> String {
            series.iter().map(|r| format!("{},{}", x(r.year), y(pick(r)))).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(s, "<polyline class=\"active\" points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>", line(|r| r.active));
        let _ = writeln!(
            s,
            "<polyline class=\"sota\" points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\"/>",
            line(|r| r.sota_reporting)
        );
        let _ = writeln!(s, "<text x=\"{margin}\" y=\"{}\" {FONT}>{first}</text>", top + style.panel_height + 12.0);
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" {FONT}>{last}</text>",
            margin + style.panel_width,
            top + style.panel_height + 12.0
        );
    }
    s.push_str("</svg>\n");
    s
}
