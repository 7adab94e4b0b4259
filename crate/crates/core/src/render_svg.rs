//! Deterministic SVG output for [`DiagramModel`]s.

use std::fmt::Write;

use crate::diagram::{DiagramMode, DiagramModel};
use crate::error::{Error, Result};

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 60.0;
const MARGIN_TOP: f64 = 70.0;
const MARGIN_BOTTOM: f64 = 70.0;
const MARKER_RADIUS: f64 = 5.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub width_px: u32,
    pub height_px: u32,
    pub radial_ticks: u32,
    pub similarity_spokes: Vec<f64>,
    pub show_chord_arcs: bool,
    pub font_size_px: u32,
    /// Defaults to the diagram kind when `None`.
    pub title: Option<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width_px: 720,
            height_px: 720,
            radial_ticks: 4,
            similarity_spokes: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99],
            show_chord_arcs: true,
            font_size_px: 13,
            title: None,
        }
    }
}

/// Maps diagram coordinates to pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub origin_x: f64,
    pub origin_y: f64,
    /// Pixels per radial unit.
    pub scale: f64,
    /// Pixel radius of the outer frame.
    pub frame_radius: f64,
    pub half_circle: bool,
}

impl Viewport {
    pub fn for_model(model: &DiagramModel, opts: &RenderOptions) -> Result<Self> {
        let (w, h) = (opts.width_px as f64, opts.height_px as f64);
        let avail_w = w - MARGIN_LEFT - MARGIN_RIGHT;
        let avail_h = h - MARGIN_TOP - MARGIN_BOTTOM;
        if opts.width_px == 0 || opts.height_px == 0 || avail_w <= 0.0 || avail_h <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "viewport {}x{} px is too small",
                opts.width_px, opts.height_px
            )));
        }
        let half_circle = model.mode == DiagramMode::Taylor && !model.is_quarter();
        let (origin_x, origin_y, frame_radius) = if half_circle {
            let r = (avail_w / 2.0).min(avail_h);
            // Center the half disk vertically in the free space.
            (
                MARGIN_LEFT + avail_w / 2.0,
                MARGIN_TOP + (avail_h + r) / 2.0,
                r,
            )
        } else {
            (MARGIN_LEFT, h - MARGIN_BOTTOM, avail_w.min(avail_h))
        };
        Ok(Self {
            origin_x,
            origin_y,
            scale: frame_radius / model.radial_max,
            frame_radius,
            half_circle,
        })
    }

    pub fn to_px(&self, radius: f64, angle: f64) -> (f64, f64) {
        (
            self.origin_x + self.scale * radius * libm::cos(angle),
            self.origin_y - self.scale * radius * libm::sin(angle),
        )
    }

    /// Inverse of [`Viewport::to_px`], returning `(radius, angle)`.
    pub fn from_px(&self, x: f64, y: f64) -> (f64, f64) {
        let (dx, dy) = (
            (x - self.origin_x) / self.scale,
            (self.origin_y - y) / self.scale,
        );
        (dx.hypot(dy), dy.atan2(dx))
    }

    fn polar_px(&self, px_radius: f64, angle: f64) -> (f64, f64) {
        (
            self.origin_x + px_radius * angle.cos(),
            self.origin_y - px_radius * angle.sin(),
        )
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Tick step from {1, 2, 2.5, 5} x 10^k closest to `raw`.
fn nice_step(raw: f64) -> f64 {
    let exp = raw.log10().floor();
    let base = 10f64.powf(exp);
    let frac = raw / base;
    let nice = [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .min_by(|a, b| (a - frac).abs().total_cmp(&(b - frac).abs()))
        .unwrap_or(1.0);
    nice * base
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn arc_path(vp: &Viewport, px_radius: f64, end_angle: f64) -> String {
    let (x0, y0) = vp.polar_px(px_radius, 0.0);
    let (x1, y1) = vp.polar_px(px_radius, end_angle);
    format!("M {x0:.3} {y0:.3} A {px_radius:.3} {px_radius:.3} 0 0 0 {x1:.3} {y1:.3}")
}

fn spokes(model: &DiagramModel, opts: &RenderOptions, half: bool) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for &s in &opts.similarity_spokes {
        if !s.is_finite() || s.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "similarity spoke {s} outside [-1, 1]"
            )));
        }
        if model.mode == DiagramMode::KernelizedTaylor && s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "similarity spoke {s} is negative; kernelized similarities lie in (0, 1]"
            )));
        }
        if s >= 0.0 || half {
            out.push(s);
        }
        if half && s > 0.0 {
            out.push(-s);
        }
    }
    if half {
        out.push(0.0);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

pub fn render(model: &DiagramModel, opts: &RenderOptions) -> Result<String> {
    let vp = Viewport::for_model(model, opts)?;
    model.validate()?;
    let spokes = spokes(model, opts, vp.half_circle)?;
    let end_angle = if vp.half_circle {
        std::f64::consts::PI
    } else {
        std::f64::consts::FRAC_PI_2
    };
    let fs = opts.font_size_px.max(1) as f64;
    let (w, h) = (opts.width_px, opts.height_px);
    let (angular_name, radial_name, default_title) = match model.mode {
        DiagramMode::Taylor => ("Correlation", "Standard deviation σ", "Taylor diagram"),
        DiagramMode::KernelizedTaylor => (
            "Cosine similarity",
            "Embedding norm ‖μ̂‖",
            "Kernelized Taylor diagram",
        ),
    };
    let title = opts.title.as_deref().unwrap_or(default_title);

    let mut s = String::new();
    // `write!` into a String cannot fail.
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{fs}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="{:.0}" font-weight="bold">{}</text>"#,
        w as f64 / 2.0,
        MARGIN_TOP / 2.0,
        fs * 1.3,
        escape(title)
    );

    // Radial rings and tick labels.
    let _ = writeln!(
        s,
        r##"<g class="radial-grid" fill="none" stroke="#cccccc" stroke-width="1">"##
    );
    let step = nice_step(model.radial_max / opts.radial_ticks.max(1) as f64);
    let mut ticks = Vec::new();
    let mut k = 1;
    while step * k as f64 <= model.radial_max * (1.0 + 1e-12) {
        ticks.push(step * k as f64);
        k += 1;
    }
    for &t in &ticks {
        let _ = writeln!(
            s,
            r#"<path d="{}"/>"#,
            arc_path(&vp, t * vp.scale, end_angle)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="radial-labels" text-anchor="middle">"#);
    for &t in std::iter::once(&0.0).chain(&ticks) {
        let (x, y) = vp.to_px(t, 0.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.3}" y="{:.3}">{}</text>"#,
            y + fs * 1.3,
            fmt_tick(t)
        );
        if vp.half_circle && t > 0.0 {
            let (x, y) = vp.to_px(t, std::f64::consts::PI);
            let _ = writeln!(
                s,
                r#"<text x="{x:.3}" y="{:.3}">{}</text>"#,
                y + fs * 1.3,
                fmt_tick(t)
            );
        }
    }
    let _ = writeln!(s, "</g>");

    // Reference-radius arc.
    let _ = writeln!(
        s,
        r##"<path class="reference-arc" d="{}" fill="none" stroke="#555555" stroke-width="1" stroke-dasharray="2 3"/>"##,
        arc_path(&vp, model.reference.radius * vp.scale, end_angle)
    );

    // Similarity spokes.
    let _ = writeln!(
        s,
        r##"<g class="similarity-spokes" stroke="#dddddd" stroke-width="1">"##
    );
    for &sim in &spokes {
        let a = sim.acos();
        let (x, y) = vp.polar_px(vp.frame_radius, a);
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{x:.3}" y2="{y:.3}"/>"#,
            vp.origin_x, vp.origin_y
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<g class="similarity-labels" font-size="{:.0}">"#,
        fs * 0.85
    );
    for &sim in &spokes {
        let a = sim.acos();
        let (x, y) = vp.polar_px(vp.frame_radius + fs * 0.6, a);
        let anchor = if a > std::f64::consts::FRAC_PI_2 + 1e-9 {
            "end"
        } else {
            "start"
        };
        let _ = writeln!(
            s,
            r#"<text x="{x:.3}" y="{y:.3}" text-anchor="{anchor}">{}</text>"#,
            fmt_tick(sim)
        );
    }
    let _ = writeln!(s, "</g>");

    // Frame.
    let frame = arc_path(&vp, vp.frame_radius, end_angle);
    let (lx, _) = if vp.half_circle {
        vp.polar_px(vp.frame_radius, std::f64::consts::PI)
    } else {
        (vp.origin_x, vp.origin_y)
    };
    let (tx, ty) = vp.polar_px(vp.frame_radius, std::f64::consts::FRAC_PI_2);
    let (rx, ry) = vp.polar_px(vp.frame_radius, 0.0);
    let _ = writeln!(
        s,
        r##"<g class="frame" fill="none" stroke="#000000" stroke-width="1.5">"##
    );
    let _ = writeln!(s, r#"<path d="{frame}"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{lx:.3}" y1="{ry:.3}" x2="{rx:.3}" y2="{ry:.3}"/>"#
    );
    if !vp.half_circle {
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{tx:.3}" y2="{ty:.3}"/>"#,
            vp.origin_x, vp.origin_y
        );
    }
    let _ = writeln!(s, "</g>");

    // Axis titles.
    let (ax, ay) = vp.polar_px(
        vp.frame_radius + fs * 3.0,
        if vp.half_circle {
            std::f64::consts::FRAC_PI_2
        } else {
            std::f64::consts::FRAC_PI_4
        },
    );
    let _ = writeln!(
        s,
        r#"<text class="angular-axis-title" x="{ax:.3}" y="{ay:.3}" text-anchor="middle">{angular_name}</text>"#
    );
    let _ = writeln!(
        s,
        r#"<text class="radial-axis-title" x="{:.3}" y="{:.3}" text-anchor="middle">{radial_name}</text>"#,
        if vp.half_circle {
            vp.origin_x
        } else {
            vp.origin_x + vp.frame_radius / 2.0
        },
        vp.origin_y + fs * 3.2
    );

    let (ref_x, ref_y) = vp.to_px(model.reference.radius, model.reference.angle);
    if opts.show_chord_arcs {
        let _ = writeln!(
            s,
            r##"<g class="chords" stroke="#888888" stroke-width="1" stroke-dasharray="4 3">"##
        );
        for p in &model.points {
            let (x, y) = vp.to_px(p.radius, p.angle);
            let _ = writeln!(
                s,
                r#"<line x1="{ref_x:.3}" y1="{ref_y:.3}" x2="{x:.3}" y2="{y:.3}"/>"#
            );
        }
        let _ = writeln!(s, "</g>");
    }

    // Markers: reference first, then one per population.
    let _ = writeln!(s, r#"<g class="markers">"#);
    let _ = writeln!(
        s,
        r##"<circle class="marker reference" data-label="{}" cx="{ref_x:.3}" cy="{ref_y:.3}" r="{:.1}" fill="#000000" stroke="#000000"/>"##,
        escape(&model.reference.label),
        MARKER_RADIUS + 1.0
    );
    for (i, p) in model.points.iter().enumerate() {
        let (x, y) = vp.to_px(p.radius, p.angle);
        let _ = writeln!(
            s,
            r##"<circle class="marker" data-label="{}" cx="{x:.3}" cy="{y:.3}" r="{MARKER_RADIUS:.1}" fill="{}" stroke="#000000" stroke-width="0.5"/>"##,
            escape(&p.label),
            PALETTE[i % PALETTE.len()]
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="point-labels">"#);
    for (i, p) in model.all_points().enumerate() {
        let (x, y) = vp.to_px(p.radius, p.angle);
        // Alternate label sides so nearly coincident points stay readable.
        let (dx, anchor) = if i % 2 == 0 {
            (8.0, "start")
        } else {
            (-8.0, "end")
        };
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="{anchor}">{}</text>"#,
            x + dx,
            y - 6.0,
            escape(&p.label)
        );
    }
    let _ = writeln!(s, "</g>");

    if let Some(sigma) = model.kernel_sigma {
        let _ = writeln!(
            s,
            r#"<text class="kernel-note" x="{:.3}" y="{:.3}" text-anchor="end" font-size="{:.0}">Gaussian kernel, σ = {}</text>"#,
            w as f64 - 10.0,
            h as f64 - 10.0,
            fs * 0.85,
            fmt_tick(sigma)
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
