use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::{fmt_sig6, CsvRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    AvgMults,
    AvgAdds,
    AvgVisited,
    Ver,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::AvgMults, Metric::AvgAdds, Metric::AvgVisited, Metric::Ver];

    pub fn column(self) -> &'static str {
        match self {
            Metric::AvgMults => "avg_mults",
            Metric::AvgAdds => "avg_adds",
            Metric::AvgVisited => "avg_visited",
            Metric::Ver => "ver",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Metric::AvgMults => "Average real multiplications per vector symbol",
            Metric::AvgAdds => "Average real additions per vector symbol",
            Metric::AvgVisited => "Average visited nodes per vector symbol",
            Metric::Ver => "Vector error rate",
        }
    }

    fn value(self, row: &CsvRow) -> f64 {
        match self {
            Metric::AvgMults => row.avg_mults,
            Metric::AvgAdds => row.avg_adds,
            Metric::AvgVisited => row.avg_visited,
            Metric::Ver => row.ver,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.column() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown metric `{s}`")))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Line chart of `metric` against SNR with a log-scaled y-axis and one
/// polyline per decoder.
pub fn render_svg(rows: &[CsvRow], metric: Metric) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        series
            .entry(r.decoder.as_str())
            .or_default()
            .push((r.snr_db, metric.value(r)));
    }
    for pts in series.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let (mut x_lo, mut x_hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.snr_db), hi.max(r.snr_db))
        });
    if x_hi <= x_lo {
        x_lo -= 1.0;
        x_hi += 1.0;
    }

    // Non-positive values (zero error rates) are pinned one decade below
    // the smallest positive value.
    let positive = rows.iter().map(|r| metric.value(r)).filter(|&v| v > 0.0);
    let min_pos = positive.clone().fold(f64::INFINITY, f64::min);
    let max_pos = positive.fold(f64::NEG_INFINITY, f64::max);
    let floor = if min_pos.is_finite() { min_pos / 10.0 } else { 1e-6 };
    let has_floor = rows.iter().any(|r| metric.value(r) <= 0.0);
    let lo_val = if has_floor { floor } else { min_pos.min(floor * 10.0) };
    let hi_val = if max_pos.is_finite() { max_pos } else { 1.0 };
    let y_lo = lo_val.log10().floor();
    let mut y_hi = hi_val.log10().ceil();
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |v: f64| {
        let lv = if v > 0.0 { v.log10() } else { floor.log10() };
        TOP + (y_hi - lv) / (y_hi - y_lo) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(metric.label())
    );

    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        TOP + plot_h
    );

    // decade ticks
    let mut decade = y_lo;
    while decade <= y_hi + 1e-9 {
        let y = TOP + (y_hi - decade) / (y_hi - y_lo) * plot_h;
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">1e{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            decade as i64
        );
        decade += 1.0;
    }

    // SNR ticks at the data points
    let mut snrs: Vec<f64> = rows.iter().map(|r| r.snr_db).collect();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();
    for &x in &snrs {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            px(x),
            TOP + plot_h + 18.0,
            fmt_sig6(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">SNR (dB)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );

    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = pts
            .iter()
            .map(|&(x, v)| format!("{:.2},{:.2}", px(x), py(v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 22.0 * k as f64;
        let lx = LEFT + plot_w + 16.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx:.2}" y="{:.2}" width="18" height="4" fill="{color}"/>"#,
            ly - 2.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_svg(rows: &[CsvRow], metric: Metric, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(rows, metric)?;
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(values: &[(&str, f64, f64)]) -> Vec<CsvRow> {
        values
            .iter()
            .map(|&(d, snr, v)| CsvRow {
                snr_db: snr,
                decoder: d.into(),
                modulation: 4,
                n: 2,
                avg_mults: v,
                avg_adds: v,
                avg_visited: v,
                avg_restarts: 0.0,
                ser: 0.0,
                ver: v / 1000.0,
                trials: 1,
                preprocessing_mults_per_burst: 0.0,
            })
            .collect()
    }

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        let doc = roxmltree::Document::parse(svg).expect("well-formed XML");
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .map(|n| {
                n.attribute("points")
                    .unwrap()
                    .split_whitespace()
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn two_decoders_six_points() {
        let mut data = Vec::new();
        for (i, snr) in [0.0, 4.0, 8.0, 12.0, 16.0, 20.0].into_iter().enumerate() {
            data.push(("conventional", snr, 1000.0 / (i + 1) as f64));
            data.push(("proposed", snr, 200.0 / (i + 1) as f64));
        }
        let svg = render_svg(&rows(&data), Metric::AvgMults).unwrap();
        let lines = polylines(&svg);
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.len() == 6));
        // proposed sits below conventional at every SNR
        for (c, p) in lines[0].iter().zip(&lines[1]) {
            assert!(p.1 > c.1);
        }
    }

    #[test]
    fn constant_metric_is_horizontal() {
        let data: Vec<_> = [0.0, 5.0, 10.0].iter().map(|&s| ("proposed", s, 42.0)).collect();
        let svg = render_svg(&rows(&data), Metric::AvgVisited).unwrap();
        let line = &polylines(&svg)[0];
        assert!(line.iter().all(|p| p.1 == line[0].1));
    }

    #[test]
    fn zero_error_rates_still_render() {
        let data = [("ml", 0.0, 0.0), ("ml", 10.0, 0.0)];
        let svg = render_svg(&rows(&data), Metric::Ver).unwrap();
        assert_eq!(polylines(&svg)[0].len(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(render_svg(&[], Metric::Ver), Err(Error::EmptyRecords)));
        let data = rows(&[("proposed", 0.0, 1.0)]);
        assert!(emit_svg(&data, Metric::Ver, "/nonexistent-dir/x.svg").is_err());
        assert_eq!("avg_adds".parse::<Metric>().unwrap(), Metric::AvgAdds);
        assert!("ser".parse::<Metric>().is_err());
    }
}
