//! CSV tables and SVG heatmaps of phase diagrams.

use std::fmt::Write as _;
use std::io;

use btf_core::experiment::{PhaseDiagram, TrialRecord};
use btf_core::lp::Relaxation;
use btf_core::theory::{threshold_flp, threshold_slp};

pub const DIAGRAM_HEADER: [&str; 9] =
    ["r_w_requested", "r_w_achieved", "p", "relaxation", "trials", "recovered", "rate", "mean_solve_ms", "mean_cut_rounds"];

pub const RECORD_HEADER: [&str; 13] = [
    "r_w_requested",
    "r_w_achieved",
    "p",
    "trial",
    "seed",
    "corrupted",
    "relaxation",
    "recovered",
    "inferred",
    "objective",
    "cut_rounds",
    "solve_ms",
    "error",
];

/// Writes one row per populated cell and relaxation. Without `timing` the
/// `mean_solve_ms` field is left empty, which makes the output a pure
/// function of the configuration.
pub fn write_diagram_csv(d: &PhaseDiagram, out: impl io::Write, timing: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIAGRAM_HEADER)?;
    for r in d.rows() {
        w.write_record([
            r.rw_requested.to_string(),
            r.rw_achieved.to_string(),
            r.p.to_string(),
            r.relaxation.name().to_string(),
            r.trials.to_string(),
            r.recovered.to_string(),
            r.rate.to_string(),
            if timing { format!("{:.3}", r.mean_solve_ms) } else { String::new() },
            r.mean_cut_rounds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Streams per-trial outcomes, flushing after every trial so an
/// interrupted sweep leaves every finished trial on disk.
pub struct RecordWriter<W: io::Write> {
    w: csv::Writer<W>,
}

impl<W: io::Write> RecordWriter<W> {
    pub fn new(out: W) -> csv::Result<Self> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RECORD_HEADER)?;
        w.flush()?;
        Ok(Self { w })
    }

    pub fn write(&mut self, rec: &TrialRecord) -> csv::Result<()> {
        for o in &rec.outcomes {
            self.w.write_record([
                rec.rw_requested.to_string(),
                rec.rw_achieved.to_string(),
                rec.p.to_string(),
                rec.trial.to_string(),
                rec.seed.to_string(),
                rec.corrupted.to_string(),
                o.relaxation.name().to_string(),
                o.recovered.to_string(),
                o.inferred.to_string(),
                if o.objective.is_nan() { String::new() } else { o.objective.to_string() },
                o.cut_rounds.to_string(),
                format!("{:.3}", o.solve_ms),
                o.error.clone().unwrap_or_default(),
            ])?;
        }
        self.w.flush()?;
        Ok(())
    }
}

/// Recovery threshold of `rel` as a function of the tensor density, with
/// equal ratios in the three modes. The complete relaxation has no closed
/// form; the flower threshold is a lower bound for it.
pub fn threshold_curve(rel: Relaxation, rw: f64) -> Option<f64> {
    match rel {
        Relaxation::Slp => {
            let r = rw.cbrt();
            threshold_slp(r, r, r).ok()
        }
        Relaxation::Flp | Relaxation::Clp => threshold_flp(rw).ok(),
    }
}

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const P_MAX: f64 = 0.5;
const CURVE_SAMPLES: usize = 100;

/// Plot coordinates of `(r_w, p)`; `p` grows upwards.
pub fn to_svg(rw: f64, p: f64) -> (f64, f64) {
    (MARGIN + rw * WIDTH, MARGIN + (1.0 - p / P_MAX) * HEIGHT)
}

/// Half the spacing to the neighbours, or `fallback` for a single value.
fn half_widths(grid: &[f64], fallback: f64) -> Vec<(f64, f64)> {
    (0..grid.len())
        .map(|i| {
            let left = if i > 0 { (grid[i] - grid[i - 1]) / 2.0 } else { f64::NAN };
            let right = if i + 1 < grid.len() { (grid[i + 1] - grid[i]) / 2.0 } else { f64::NAN };
            let l = if left.is_nan() { if right.is_nan() { fallback } else { right } } else { left };
            let r = if right.is_nan() { l } else { right };
            (l, r)
        })
        .collect()
}

/// Heatmap of one relaxation: `r_w` on the horizontal axis over `[0, 1]`,
/// `p` on the vertical axis over `[0, 0.5]`, white for rate 1 and black for
/// rate 0. Cells without trials stay transparent. With `overlay` the
/// closed-form threshold is drawn as a dashed curve.
pub fn heatmap_svg(d: &PhaseDiagram, rel: Relaxation, overlay: bool) -> String {
    let (w, h) = (WIDTH + 2.0 * MARGIN, HEIGHT + 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        w / 2.0,
        MARGIN / 2.0,
        rel.name()
    );
    let xs = half_widths(&d.rw_grid, 0.02);
    let ys = half_widths(&d.p_grid, 0.005);
    let _ = writeln!(s, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for (ri, &rw) in d.rw_grid.iter().enumerate() {
        for (pi, &p) in d.p_grid.iter().enumerate() {
            let Some(c) = d.cell(ri, pi, rel).filter(|c| c.trials > 0) else { continue };
            let (x0, y0) = to_svg((rw - xs[ri].0).max(0.0), (p + ys[pi].1).min(P_MAX));
            let (x1, y1) = to_svg((rw + xs[ri].1).min(1.0), (p - ys[pi].0).max(0.0));
            let g = (c.rate() * 255.0).round() as u8;
            let _ = writeln!(
                s,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="rgb({g},{g},{g})"/>"#,
                x1 - x0,
                y1 - y0
            );
        }
    }
    let _ = writeln!(s, "</g>");
    if overlay {
        let pts: Vec<String> = (0..=CURVE_SAMPLES)
            .filter_map(|i| {
                let rw = i as f64 / CURVE_SAMPLES as f64;
                let p = threshold_curve(rel, rw)?;
                let (x, y) = to_svg(rw, p);
                Some(format!("{x:.2},{y:.2}"))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline id="threshold" points="{}" fill="none" stroke="black" stroke-width="2" stroke-dasharray="6 3"/>"#,
            pts.join(" ")
        );
    }
    // Frame and axes.
    let (fx, fy) = to_svg(0.0, P_MAX);
    let _ = writeln!(s, r#"<rect x="{fx}" y="{fy}" width="{WIDTH}" height="{HEIGHT}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let rw = i as f64 / 5.0;
        let (x, y) = to_svg(rw, 0.0);
        let _ = writeln!(s, r#"<line x1="{x}" y1="{y}" x2="{x}" y2="{}" stroke="black"/>"#, y + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{rw:.1}</text>"#,
            y + 20.0
        );
        let p = i as f64 / 10.0;
        let (x, y) = to_svg(0.0, p);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y}" x2="{x}" y2="{y}" stroke="black"/>"#, x - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{p:.1}</text>"#,
            x - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">tensor density r_w</text>"#,
        MARGIN + WIDTH / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{y}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 16 {y})">corruption p</text>"#,
        y = MARGIN + HEIGHT / 2.0
    );
    s.push_str("</svg>\n");
    s
}
