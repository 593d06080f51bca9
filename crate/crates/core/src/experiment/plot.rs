use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::matlib::csv::fmt_f64;
use crate::metrics::ErrorReport;

/// Report column, file stem and title of each figure.
pub const FIGURES: [(&str, &str, &str); 5] = [
    ("l1_rel", "fig_l1", "Relative L1 output error"),
    ("l2_rel", "fig_l2", "Relative L2 output error"),
    ("linf_rel", "fig_linf", "Relative L-infinity output error"),
    ("h2_rel", "fig_h2", "Relative approximate H2 error"),
    ("hinf_rel", "fig_hinf", "Relative H-infinity error"),
];

const Y_MIN_DECADE: i32 = -16;
const Y_MAX_DECADE: i32 = 0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Default)]
pub struct PlotOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Writes `fig_*.dat` tables (columns `n` then one per report) and matching
/// SVG charts into `dir`.
pub fn emit_plot_data(reports: &[ErrorReport], dir: impl AsRef<Path>) -> Result<PlotOutput> {
    let mut out = PlotOutput::default();
    if reports.is_empty() {
        out.warnings.push("no error reports given; nothing to plot".into());
        return Ok(out);
    }
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut orders: Vec<usize> = reports.iter().flat_map(|r| r.rows.iter().map(|row| row.n)).collect();
    orders.sort_unstable();
    orders.dedup();

    for (column, stem, title) in FIGURES {
        let series: Vec<(String, Vec<(usize, f64)>)> = reports
            .iter()
            .map(|r| {
                let vals = r.column(column).expect("known column");
                (r.label.clone(), r.rows.iter().map(|row| row.n).zip(vals).collect())
            })
            .collect();

        let mut table = String::from("# n");
        for (label, _) in &series {
            table.push(' ');
            table.push_str(label);
        }
        table.push('\n');
        for &n in &orders {
            table.push_str(&n.to_string());
            for (_, pts) in &series {
                let v = pts.iter().find(|p| p.0 == n).map_or(f64::NAN, |p| p.1);
                table.push(' ');
                table.push_str(&if v.is_nan() { "nan".to_string() } else { fmt_f64(v) });
            }
            table.push('\n');
        }
        let dat = dir.join(format!("{stem}.dat"));
        fs::write(&dat, table)?;
        out.files.push(dat);

        let svg = dir.join(format!("{stem}.svg"));
        fs::write(&svg, render_svg(title, &series))?;
        out.files.push(svg);
    }
    Ok(out)
}

/// Line chart with a linear x axis and a log y axis spanning
/// `[1e-16, 1]`; values outside are clamped and NaN breaks the line.
pub fn render_svg(title: &str, series: &[(String, Vec<(usize, f64)>)]) -> String {
    let (w, h) = (720.0, 480.0);
    let (left, right, top, bottom) = (80.0, 160.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let xs = series.iter().flat_map(|s| s.1.iter().map(|p| p.0));
    let (mut x0, mut x1) = xs.fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)));
    if x0 > x1 {
        (x0, x1) = (0, 1);
    }
    let span = if x1 > x0 { (x1 - x0) as f64 } else { 1.0 };
    let px = |n: usize| left + pw * (n.saturating_sub(x0)) as f64 / span;
    let decades = f64::from(Y_MAX_DECADE - Y_MIN_DECADE);
    let py = |v: f64| {
        let l = if v > 0.0 { v.log10() } else { f64::from(Y_MIN_DECADE) };
        let l = l.clamp(f64::from(Y_MIN_DECADE), f64::from(Y_MAX_DECADE));
        top + ph * (f64::from(Y_MAX_DECADE) - l) / decades
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for d in Y_MIN_DECADE..=Y_MAX_DECADE {
        let y = py(10f64.powi(d));
        let _ = writeln!(s, r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, left + pw);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{d}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    let xticks = 5usize.min(x1 - x0).max(1);
    for i in 0..=xticks {
        let n = x0 + (x1 - x0) * i / xticks;
        let x = px(n);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{n}</text>"#,
            top + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">reduced order n</text>"#,
        left + pw / 2.0,
        h - 10.0
    );

    for (k, (label, pts)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if !seg.is_empty() {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                    seg.join(" ")
                );
                seg.clear();
            }
        };
        for &(n, v) in pts {
            if v.is_nan() {
                flush(&mut segment, &mut s);
            } else {
                segment.push(format!("{:.2},{:.2}", px(n), py(v)));
            }
        }
        flush(&mut segment, &mut s);
        let ly = top + 20.0 + 18.0 * k as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{ErrorRow, LebesgueNorms};

    fn report(label: &str, orders: std::ops::RangeInclusive<usize>) -> ErrorReport {
        let unit = LebesgueNorms { l1: 1.0, l2: 1.0, linf: 1.0 };
        let rows = orders
            .map(|n| {
                let e = 0.5f64.powi(n as i32);
                ErrorRow::from_norms(n, LebesgueNorms { l1: e, l2: e, linf: e }, unit)
            })
            .collect();
        ErrorReport { label: label.into(), rows }
    }

    #[test]
    fn empty_input_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = emit_plot_data(&[], dir.path().join("plots")).unwrap();
        assert!(out.files.is_empty());
        assert_eq!(out.warnings.len(), 1);
        assert!(!dir.path().join("plots").exists());
    }

    #[test]
    fn one_report_hundred_rows() {
        let dir = tempfile::tempdir().unwrap();
        let out = emit_plot_data(&[report("sylvester", 1..=100)], dir.path()).unwrap();
        assert_eq!(out.files.len(), 10);
        let text = fs::read_to_string(dir.path().join("fig_l2.dat")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 101);
        assert_eq!(lines[0], "# n sylvester");
        assert_eq!(lines[1], "1 5.0000000000000000e-1");
        assert!(fs::read_to_string(dir.path().join("fig_h2.dat")).unwrap().lines().nth(1).unwrap().ends_with("nan"));
    }

    #[test]
    fn svg_has_decade_ticks_and_clamps() {
        let svg = render_svg("t", &[("a".into(), vec![(1, 1e-20), (2, 5.0), (3, f64::NAN), (4, 1e-3)])]);
        for d in -16..=0 {
            assert!(svg.contains(&format!(">1e{d}<")), "missing tick 1e{d}");
        }
        // Clamped points lie on the frame: bottom at y = 430, top at y = 40.
        assert!(svg.contains("80.00,430.00"));
        assert!(svg.contains(",40.00"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn tables_merge_order_sets() {
        let dir = tempfile::tempdir().unwrap();
        emit_plot_data(&[report("a", 1..=2), report("b", 2..=3)], dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("fig_l1.dat")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# n a b");
        assert!(lines[1].ends_with(" nan"));
        assert!(lines[3].starts_with("3 nan "));
    }
}
