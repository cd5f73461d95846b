//! Minimal static SVG line charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::constants::DAY;
use crate::error::Result;
use crate::guidance::GuidanceLog;

/// File name of the element-history figure.
pub const ELEMENTS_SVG: &str = "elements.svg";
/// File name of the Δv′ and element-error figure.
pub const DV_PRIME_SVG: &str = "dv_prime.svg";

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const PANEL_W: f64 = 720.0;
const PANEL_H: f64 = 220.0;
const MARGIN_L: f64 = 100.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 40.0;

#[derive(Clone, Debug, Default)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
    /// Draw a dot at every point as well as the line.
    pub dots: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
            ..Default::default()
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn with_dots(mut self) -> Self {
        self.dots = true;
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct Panel {
    pub title: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Points circled in black, e.g. reference recomputations.
    pub circles: Vec<(f64, f64)>,
    pub log_y: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub panels: Vec<Panel>,
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

/// Padded axis range and tick positions.
fn axis(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let (lo, hi) = if !(lo.is_finite() && hi.is_finite()) {
        (0.0, 1.0)
    } else if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1e-300) {
        let d = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - d, hi + d)
    } else {
        (lo, hi)
    };
    let step = nice_step(hi - lo, 5);
    let lo = (lo / step).floor() * step;
    let hi = (hi / step).ceil() * step;
    let n = ((hi - lo) / step).round() as usize;
    let ticks = (0..=n).map(|k| lo + k as f64 * step).collect();
    (lo, hi, ticks)
}

fn fmt_tick(v: f64, step: f64) -> String {
    if v.abs() < 1e-9 * step {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        return format!("{v:.1e}");
    }
    let digits = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.digits$}")
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Figure {
    fn x_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.panels {
            for (x, _) in p
                .series
                .iter()
                .flat_map(|s| s.points.iter())
                .chain(p.circles.iter())
            {
                lo = lo.min(*x);
                hi = hi.max(*x);
            }
        }
        (lo, hi)
    }

    pub fn to_svg(&self) -> String {
        let width = MARGIN_L + PANEL_W + MARGIN_R;
        let cell = MARGIN_T + PANEL_H + MARGIN_B;
        let height = 30.0 + cell * self.panels.len().max(1) as f64;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            width / 2.0,
            esc(&self.title)
        );
        let (xl, xh, xticks) = {
            let (lo, hi) = self.x_range();
            axis(lo, hi)
        };
        let xstep = if xticks.len() > 1 {
            xticks[1] - xticks[0]
        } else {
            1.0
        };
        for (k, panel) in self.panels.iter().enumerate() {
            let top = 30.0 + cell * k as f64 + MARGIN_T;
            self.panel_svg(&mut out, panel, top, (xl, xh, &xticks, xstep));
        }
        out.push_str("</svg>\n");
        out
    }

    fn panel_svg(
        &self,
        out: &mut String,
        panel: &Panel,
        top: f64,
        (xl, xh, xticks, xstep): (f64, f64, &[f64], f64),
    ) {
        let ty = |y: f64| {
            if panel.log_y {
                y.max(1e-300).log10()
            } else {
                y
            }
        };
        let ys = panel
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .chain(panel.circles.iter())
            .map(|p| ty(p.1))
            .filter(|y| y.is_finite());
        let (ylo, yhi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
            (a.min(y), b.max(y))
        });
        let (yl, yh, yticks) = axis(ylo, yhi);
        let ystep = if yticks.len() > 1 {
            yticks[1] - yticks[0]
        } else {
            1.0
        };
        let left = MARGIN_L;
        let px = |x: f64| left + (x - xl) / (xh - xl) * PANEL_W;
        let py = |y: f64| top + PANEL_H - (ty(y) - yl) / (yh - yl) * PANEL_H;
        let pyt = |t: f64| top + PANEL_H - (t - yl) / (yh - yl) * PANEL_H;

        let _ = writeln!(out, "<g>");
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
            left + PANEL_W / 2.0,
            top - 8.0,
            esc(&panel.title)
        );
        for &t in xticks {
            let x = px(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                top + PANEL_H,
                top + PANEL_H + 14.0,
                fmt_tick(t, xstep)
            );
        }
        for &t in &yticks {
            let y = pyt(t);
            let label = if panel.log_y {
                format!("1e{}", t.round() as i64)
            } else {
                fmt_tick(t, ystep)
            };
            let _ = writeln!(
                out,
                r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
                left + PANEL_W,
                left - 5.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<rect x="{left:.2}" y="{top:.2}" width="{PANEL_W:.2}" height="{PANEL_H:.2}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            left + PANEL_W / 2.0,
            top + PANEL_H + 30.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            left - 85.0,
            top + PANEL_H / 2.0,
            esc(&panel.y_label)
        );
        for (k, s) in panel.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && ty(p.1).is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let dash = if s.dashed {
                r#" stroke-dasharray="6,4""#
            } else {
                ""
            };
            if pts.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                    pts.join(" ")
                );
            }
            if s.dots || pts.len() == 1 {
                for p in &pts {
                    let (x, y) = p.split_once(',').unwrap();
                    let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
                }
            }
            let ly = top + 12.0 + 16.0 * k as f64;
            let lx = left + PANEL_W + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 20.0,
                lx + 25.0,
                ly + 4.0,
                esc(&s.label)
            );
        }
        for &(x, y) in &panel.circles {
            let _ = writeln!(
                out,
                r#"<circle class="recompute" cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="black" stroke-width="1.5"/>"#,
                px(x),
                py(y)
            );
        }
        let _ = writeln!(out, "</g>");
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_svg())?;
        Ok(())
    }
}

/// Result of [`emit_plots`].
#[derive(Clone, Debug, PartialEq)]
pub enum PlotOutcome {
    Written(Vec<PathBuf>),
    /// Nothing to draw; the message says why.
    Skipped(String),
}

/// Element histories against the references, with recomputations circled.
pub fn elements_figure(log: &GuidanceLog) -> Figure {
    type Get = fn(&crate::guidance::ElementSample) -> f64;
    let rows: [(&str, &str, Get); 3] = [
        ("Semi-major axis", "a [km]", |e| e.a_km),
        ("Inclination", "i [deg]", |e| e.i_deg),
        ("Right ascension of the ascending node", "RAAN [deg]", |e| {
            e.raan_deg
        }),
    ];
    let panels = rows
        .iter()
        .map(|(title, ylabel, get)| {
            let mut series = vec![Series::line(
                "flown",
                log.segments
                    .iter()
                    .map(|s| (s.flown_end.t / DAY, get(&s.flown_end)))
                    .collect(),
            )];
            for (k, r) in log.references.iter().enumerate() {
                let label = if k == 0 {
                    "reference".to_string()
                } else {
                    format!("reference {k}")
                };
                series.push(
                    Series::line(label, r.track.iter().map(|e| (e.t / DAY, get(e))).collect())
                        .dashed(),
                );
            }
            Panel {
                title: title.to_string(),
                y_label: ylabel.to_string(),
                series,
                circles: recompute_points(log, |s| get(&s.flown_end)),
                log_y: false,
            }
        })
        .collect();
    Figure {
        title: "Mean elements".into(),
        x_label: "time [d]".into(),
        panels,
    }
}

/// Δv′ and element errors at segment ends, with recomputations circled.
pub fn dv_prime_figure(log: &GuidanceLog) -> Figure {
    type Get = fn(&crate::guidance::SegmentRecord) -> f64;
    let rows: [(&str, &str, Get); 4] = [
        ("Delta v prime", "dv' [m/s]", |s| s.dv_prime),
        ("Semi-major axis error", "da [km]", |s| {
            s.flown_end.a_km - s.reference_end.a_km
        }),
        ("Inclination error", "di [deg]", |s| {
            s.flown_end.i_deg - s.reference_end.i_deg
        }),
        ("RAAN error", "dRAAN [deg]", |s| {
            s.flown_end.raan_deg - s.reference_end.raan_deg
        }),
    ];
    let panels = rows
        .iter()
        .map(|(title, ylabel, get)| Panel {
            title: title.to_string(),
            y_label: ylabel.to_string(),
            series: vec![Series::line(
                "segment end",
                log.segments
                    .iter()
                    .map(|s| (s.t_end / DAY, get(s)))
                    .collect(),
            )
            .with_dots()],
            circles: recompute_points(log, get),
            log_y: false,
        })
        .collect();
    Figure {
        title: "Tracking errors".into(),
        x_label: "time [d]".into(),
        panels,
    }
}

fn recompute_points(
    log: &GuidanceLog,
    get: impl Fn(&crate::guidance::SegmentRecord) -> f64,
) -> Vec<(f64, f64)> {
    log.segments
        .iter()
        .filter(|s| s.recompute)
        .map(|s| (s.t_end / DAY, get(s)))
        .collect()
}

/// Writes [`ELEMENTS_SVG`] and [`DV_PRIME_SVG`] into `dir`.
pub fn emit_plots(log: &GuidanceLog, dir: &Path) -> Result<PlotOutcome> {
    if log.segments.is_empty() {
        return Ok(PlotOutcome::Skipped(
            "log contains no flown segments; no plots written".into(),
        ));
    }
    std::fs::create_dir_all(dir)?;
    let a = dir.join(ELEMENTS_SVG);
    let b = dir.join(DV_PRIME_SVG);
    elements_figure(log).write(&a)?;
    dv_prime_figure(log).write(&b)?;
    Ok(PlotOutcome::Written(vec![a, b]))
}
