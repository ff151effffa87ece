use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::FlowResult;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
/// Fraction of the energy span added above and below the data.
pub const Y_MARGIN: f64 = 0.05;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotRanges {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

/// Axis ranges: the full grid, and the energy range widened by [`Y_MARGIN`].
pub fn plot_ranges(f: &FlowResult) -> Result<PlotRanges> {
    if f.grid.len() < 2 {
        return Err(Error::invalid("a plot needs at least two grid points"));
    }
    let energies = f.tables.iter().flat_map(|t| t.energies.iter().copied());
    let (lo, hi) = energies.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
        (lo.min(e), hi.max(e))
    });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("no finite energies to plot"));
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    Ok(PlotRanges {
        x: (f.grid[0], f.grid[f.grid.len() - 1]),
        y: (lo - Y_MARGIN * span, hi + Y_MARGIN * span),
    })
}

/// Roughly five round-valued ticks covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Standalone SVG with one polyline per level.
pub fn render_flow_svg(f: &FlowResult) -> Result<String> {
    let PlotRanges {
        x: (x0, x1),
        y: (y0, y1),
    } = plot_ranges(f)?;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;
    let var = f.sweep_kind.variable();

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}: lowest {} levels</text>"#,
        LEFT + pw / 2.0,
        f.sweep_kind.name(),
        f.levels()
    );
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let px = sx(t);
        let _ = writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            tick_label(t)
        );
    }
    for t in ticks(y0, y1) {
        let py = sy(t);
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{var}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 25.0
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">energy / ħ</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for level in 0..f.levels() {
        let color = PALETTE[level % PALETTE.len()];
        let points = f
            .grid
            .iter()
            .zip(f.level_curve(level))
            .map(|(x, e)| format!("{:.2},{:.2}", sx(*x), sy(e)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            w,
            r#"<polyline class="level" data-level="{level}" fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#
        );
        let ly = TOP + 10.0 + 18.0 * level as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">level {level}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

pub fn emit_flow_svg(f: &FlowResult, path: &Path) -> Result<()> {
    let svg = render_flow_svg(f)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{FlowSource, SpectrumTable, SweepKind};

    fn flow(grid: Vec<f64>, k: usize) -> FlowResult {
        let tables = grid
            .iter()
            .map(|x| SpectrumTable::new((0..k).map(|i| i as f64 + x).collect(), 1e-6, 32))
            .collect();
        FlowResult {
            grid,
            tables,
            sweep_kind: SweepKind::RSweep,
            source: FlowSource::Coupling { omega: 1.0, c: 0.0 },
        }
    }

    #[test]
    fn one_polyline_per_level() {
        let svg = render_flow_svg(&flow(vec![0.0, 0.5, 1.0], 7)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 7);
        assert!(svg.contains("level 6"));
        assert!(svg.contains(">r</text>"));
        assert!(svg.contains("energy / ħ"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_point_rejected() {
        assert!(render_flow_svg(&flow(vec![0.5], 3)).is_err());
    }

    #[test]
    fn margin_is_five_percent() {
        let r = plot_ranges(&flow(vec![0.0, 1.0], 3)).unwrap();
        // energies span [0, 3]
        assert!((r.y.0 + 0.15).abs() < 1e-12);
        assert!((r.y.1 - 3.15).abs() < 1e-12);
        assert_eq!(r.x, (0.0, 1.0));
    }

    #[test]
    fn tick_values() {
        assert_eq!(
            ticks(0.0, 1.0),
            [0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]
        );
        assert_eq!(tick_label(0.6000000000000001), "0.6");
        assert_eq!(ticks(-0.15, 3.15), [0.0, 1.0, 2.0, 3.0]);
    }
}
