//! Self-contained SVG line plots.

use std::fmt::Write as _;

use super::tables::Table;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Final densities against position, each series scaled to unit peak.
    Densities,
    /// `v_fock` against time.
    TimeSeries { log_y: bool },
    /// `min_vfock` against the swept parameter.
    Sweep { log_y: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlotError {
    #[error("cannot plot an empty table")]
    EmptyTable,
    #[error("table has no column `{0}`")]
    MissingColumn(String),
    #[error("no finite data to plot")]
    NoFiniteData,
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

struct Figure {
    title: String,
    x_label: String,
    y_label: String,
    log_y: bool,
    series: Vec<Series>,
}

/// Renders the plot of `kind` for `table`.
pub fn emit_plot(table: &Table, kind: PlotKind) -> Result<String, PlotError> {
    if table.rows.is_empty() {
        return Err(PlotError::EmptyTable);
    }
    let col = |name: &str| table.column(name).ok_or_else(|| PlotError::MissingColumn(name.into()));
    let figure = match kind {
        PlotKind::Densities => {
            let x: Vec<f64> = col("x_m")?.iter().map(|v| v * 1e3).collect();
            let mut series = Vec::new();
            for name in ["atom_density", "photon_density", "condensate_density"] {
                let y = col(name)?;
                let peak = y.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
                let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
                series.push(Series {
                    name: name.into(),
                    points: x.iter().zip(&y).map(|(a, b)| (*a, b * scale)).collect(),
                });
            }
            Figure {
                title: "Final densities".into(),
                x_label: "x (mm)".into(),
                y_label: "density / peak".into(),
                log_y: false,
                series,
            }
        }
        PlotKind::TimeSeries { log_y } => {
            let x: Vec<f64> = col("t_s")?.iter().map(|v| v * 1e3).collect();
            let y = col("v_fock")?;
            Figure {
                title: "v_fock versus time".into(),
                x_label: "t (ms)".into(),
                y_label: "v_fock".into(),
                log_y,
                series: vec![Series {
                    name: "v_fock".into(),
                    points: x.into_iter().zip(y).collect(),
                }],
            }
        }
        PlotKind::Sweep { log_y } => {
            let x = col("param_value")?;
            let y = col("min_vfock")?;
            Figure {
                title: "Minimum v_fock over the sweep".into(),
                x_label: "parameter (rad/s)".into(),
                y_label: "min v_fock".into(),
                log_y,
                series: vec![Series {
                    name: "min_vfock".into(),
                    points: x.into_iter().zip(y).collect(),
                }],
            }
        }
    };
    figure.render()
}

/// Round tick positions covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 7.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        let s = format!("{v:.2e}");
        // 2.50e-3 → 2.5e-3
        let (m, e) = s.split_once('e').expect("exponent form");
        let m = m.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    fn render(&self) -> Result<String, PlotError> {
        let ty = |y: f64| if self.log_y { y.log10() } else { y };
        let usable = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!self.log_y || y > 0.0);
        let pts = self.series.iter().flat_map(|s| s.points.iter().copied()).filter(usable);
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(ty(y));
            y1 = y1.max(ty(y));
        }
        if !x0.is_finite() {
            return Err(PlotError::NoFiniteData);
        }
        if x1 == x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if self.log_y {
            y0 = y0.floor();
            y1 = y1.ceil().max(y0 + 1.0);
        } else {
            if y1 == y0 {
                y0 -= 0.5;
                y1 += 0.5;
            }
            let pad = 0.05 * (y1 - y0);
            y0 -= pad;
            y1 += pad;
        }
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 500" width="800" height="500" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(w, r#"<rect x="0" y="0" width="800" height="500" fill="white"/>"#);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            w,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in nice_ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                w,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 20.0,
                label(t)
            );
        }
        let y_ticks: Vec<(f64, String)> = if self.log_y {
            (y0 as i64..=y1 as i64).map(|e| (e as f64, format!("1e{e}"))).collect()
        } else {
            nice_ticks(y0, y1).into_iter().map(|t| (t, label(t))).collect()
        };
        for (t, text) in y_ticks {
            let y = sy(t);
            let _ = writeln!(
                w,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{text}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            w,
            r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            // break the line at unusable points
            let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for p in &series.points {
                if usable(p) {
                    runs.last_mut().expect("nonempty").push((sx(p.0), sy(ty(p.1))));
                } else if !runs.last().expect("nonempty").is_empty() {
                    runs.push(Vec::new());
                }
            }
            for run in runs.iter().filter(|r| !r.is_empty()) {
                let coords: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    w,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    coords.join(" ")
                );
            }
            let ly = TOP + 18.0 + 18.0 * i as f64;
            let lx = WIDTH - RIGHT - 170.0;
            let _ = writeln!(
                w,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 25.0,
                lx + 32.0,
                ly + 4.0,
                escape(&series.name)
            );
        }
        let _ = writeln!(w, "</svg>");
        Ok(s)
    }
}
