use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynamics::{AlphaLevel, SweepTable};
use crate::error::{Error, Result};
use crate::quantum::TrajectoryRecord;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MARKER_LIMIT: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    /// Mean payoff of each player against alpha.
    Sweep,
    /// Overall payoff against restart index, one line per alpha level.
    Society,
    /// Overall payoff of each listed equilibrium.
    Equilibria,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Axis labels shown at data positions; `None` means evenly spaced numeric ticks.
type Ticks = Option<Vec<(f64, String)>>;

pub fn emit_plot(table: &SweepTable, kind: PlotKind) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Empty("nothing to plot".into()));
    }
    match kind {
        PlotKind::Sweep => sweep_plot(table),
        PlotKind::Society => {
            let mut levels: Vec<AlphaLevel> = Vec::new();
            for row in &table.rows {
                if !levels.contains(&row.alpha) {
                    levels.push(row.alpha);
                }
            }
            let series = levels
                .iter()
                .map(|&level| Series {
                    label: format!("alpha = {level}"),
                    points: table
                        .at(level)
                        .map(|r| (r.restart as f64, r.report.overall))
                        .collect(),
                })
                .collect::<Vec<_>>();
            Ok(render_svg(
                "Overall payoff of each equilibrium",
                "equilibrium index",
                "overall payoff",
                &series,
                None,
            ))
        }
        PlotKind::Equilibria => {
            let points = table
                .rows
                .iter()
                .enumerate()
                .map(|(k, r)| (k as f64, r.report.overall))
                .collect();
            Ok(render_svg(
                "Equilibria",
                "equilibrium index",
                "overall payoff",
                &[Series {
                    label: "overall".into(),
                    points,
                }],
                None,
            ))
        }
    }
}

fn alpha_axis(a: f64) -> f64 {
    (1.0 + a).log10()
}

fn sweep_plot(table: &SweepTable) -> Result<String> {
    // alpha bits -> (alpha, per-player sums, count); ordered by alpha
    let mut groups: BTreeMap<u64, (f64, Vec<f64>, usize)> = BTreeMap::new();
    for row in &table.rows {
        let AlphaLevel::Finite(a) = row.alpha else { continue };
        let entry = groups
            .entry(a.to_bits())
            .or_insert_with(|| (a, vec![0.0; table.player_count], 0));
        for (s, p) in entry.1.iter_mut().zip(&row.report.per_player_payoff) {
            *s += p;
        }
        entry.2 += 1;
    }
    if groups.is_empty() {
        return emit_plot(table, PlotKind::Equilibria);
    }
    let series: Vec<Series> = (0..table.player_count)
        .map(|i| Series {
            label: format!("player {i}"),
            points: groups
                .values()
                .map(|(a, sums, n)| (alpha_axis(*a), sums[i] / *n as f64))
                .collect(),
        })
        .collect();
    let ticks = groups
        .values()
        .map(|(a, _, _)| (alpha_axis(*a), format!("{a}")))
        .collect();
    Ok(render_svg(
        "Payoffs under different selfishness levels",
        "alpha (log scale of 1 + alpha)",
        "expected payoff",
        &series,
        Some(ticks),
    ))
}

/// Rayleigh value of each player against imaginary time.
pub fn trajectory_plot(records: &[TrajectoryRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Empty("nothing to plot".into()));
    }
    let players = records.iter().map(|r| r.player).max().unwrap_or(0) + 1;
    let series: Vec<Series> = (0..players)
        .map(|i| Series {
            label: format!("lambda {i}"),
            points: records
                .iter()
                .filter(|r| r.player == i)
                .map(|r| (r.time, r.lambda))
                .collect(),
        })
        .collect();
    Ok(render_svg(
        "Imaginary-time evolution",
        "time",
        "Rayleigh value",
        &series,
        None,
    ))
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Deterministic line chart; identical input gives identical bytes.
pub fn render_svg(title: &str, xlabel: &str, ylabel: &str, series: &[Series], ticks: Ticks) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = padded_range(all().map(|p| p.0));
    let (y0, y1) = padded_range(all().map(|p| p.1));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    let x_ticks: Vec<(f64, String)> = match ticks {
        Some(t) => {
            let mut kept: Vec<(f64, String)> = Vec::new();
            for (x, label) in t {
                if kept.last().is_none_or(|(px, _)| sx(x) - sx(*px) >= 28.0) {
                    kept.push((x, label));
                }
            }
            kept
        }
        None => (0..=5)
            .map(|k| {
                let x = x0 + (x1 - x0) * k as f64 / 5.0;
                (x, fmt_num(x))
            })
            .collect(),
    };
    for (x, label) in &x_ticks {
        let px = sx(*x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            escape(label)
        );
    }
    for k in 0..=5 {
        let y = y0 + (y1 - y0) * k as f64 / 5.0;
        let py = sy(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{LEFT}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            fmt_num(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(ylabel)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        if s.points.len() <= MARKER_LIMIT {
            for &(x, y) in &s.points {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
