//! SVG and CSV rendering of the (S′, U′) plane.

use std::fmt::Write as _;

use crate::geometry::{SegmentAB, SegmentKind, VectorLine};
use crate::model::RatioPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub s_min: f64,
    pub s_max: f64,
    pub u_min: f64,
    pub u_max: f64,
}

impl Viewport {
    /// Smallest box containing `points`, the unit box and the asymptote
    /// crossing, padded by 15% and capped at ±`limit`.
    pub fn fit(points: &[(f64, f64)], theta_l_over_k: f64, limit: f64) -> Self {
        let mut v = Viewport { s_min: -2.0, s_max: 2.0, u_min: -2.0, u_max: 2.0 };
        let mut take = |s: f64, u: f64| {
            if s.is_finite() && u.is_finite() {
                v.s_min = v.s_min.min(s);
                v.s_max = v.s_max.max(s);
                v.u_min = v.u_min.min(u);
                v.u_max = v.u_max.max(u);
            }
        };
        take(-1.0, -theta_l_over_k);
        for &(s, u) in points {
            take(s, u);
        }
        let ps = 0.15 * (v.s_max - v.s_min);
        let pu = 0.15 * (v.u_max - v.u_min);
        Viewport {
            s_min: (v.s_min - ps).max(-limit),
            s_max: (v.s_max + ps).min(limit),
            u_min: (v.u_min - pu).max(-limit),
            u_max: (v.u_max + pu).min(limit),
        }
    }

    fn contains(&self, s: f64, u: f64) -> bool {
        s >= self.s_min && s <= self.s_max && u >= self.u_min && u <= self.u_max
    }
}

/// Everything that can appear in a figure. Only `theta_l_over_k` is required.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub theta_l_over_k: f64,
    pub economy_point: Option<RatioPoint<f64>>,
    pub line: Option<VectorLine<f64>>,
    pub segment: Option<SegmentAB<f64>>,
    pub q: Option<RatioPoint<f64>>,
    pub r: Option<[RatioPoint<f64>; 2]>,
    /// S′ positions drawn as vertical ticks on the horizontal axis.
    pub thresholds: Option<[f64; 2]>,
    pub title: Option<String>,
    pub viewport: Option<Viewport>,
}

/// One plotted coordinate, as written to the companion CSV.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PlottedPoint {
    pub element: &'static str,
    pub label: String,
    pub s: f64,
    pub u: f64,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 560.0;
const MARGIN: f64 = 56.0;

impl Scene {
    fn labelled_points(&self) -> Vec<(&'static str, String, RatioPoint<f64>)> {
        let mut pts = Vec::new();
        if let Some(seg) = &self.segment {
            pts.push(("endpoint", "A".to_string(), seg.point_a));
            pts.push(("endpoint", "B".to_string(), seg.point_b));
        }
        if let Some(q) = self.q {
            pts.push(("special", "Q".to_string(), q));
        }
        if let Some([r1, r2]) = self.r {
            pts.push(("special", "R_L1".to_string(), r1));
            pts.push(("special", "R_L2".to_string(), r2));
        }
        if let Some(p) = self.economy_point {
            pts.push(("economy", "EWS".to_string(), p));
        }
        pts
    }

    pub fn viewport(&self) -> Viewport {
        self.viewport.unwrap_or_else(|| {
            let pts: Vec<(f64, f64)> = self.labelled_points().iter().map(|(_, _, p)| (p.s, p.u)).collect();
            Viewport::fit(&pts, self.theta_l_over_k, 50.0)
        })
    }

    /// Samples of the boundary curve inside the viewport, one polyline per branch.
    fn boundary_branches(&self, vp: &Viewport) -> Vec<Vec<(f64, f64)>> {
        let r = self.theta_l_over_k;
        let n = 400;
        let mut branches = Vec::new();
        for (lo, hi) in [(vp.s_min, -1.0), (-1.0, vp.s_max)] {
            if hi <= lo {
                continue;
            }
            let mut current = Vec::new();
            for k in 0..=n {
                let s = lo + (hi - lo) * k as f64 / n as f64;
                if (s + 1.0).abs() < 1e-9 {
                    continue;
                }
                let u = -r * s / (s + 1.0);
                if vp.contains(s, u) {
                    current.push((s, u));
                } else if current.len() > 1 {
                    branches.push(std::mem::take(&mut current));
                } else {
                    current.clear();
                }
            }
            if current.len() > 1 {
                branches.push(current);
            }
        }
        branches
    }

    /// Pieces of the segment AB clipped to the viewport.
    fn segment_pieces(&self, vp: &Viewport) -> Vec<[(f64, f64); 2]> {
        let (Some(seg), Some(line)) = (&self.segment, &self.line) else {
            return Vec::new();
        };
        let (lo, hi) = seg.s_range();
        let at = |s: f64| (s, line.u_at(s));
        match seg.kind {
            SegmentKind::Finite => vec![[at(lo), at(hi)]],
            SegmentKind::ThroughInfinity => {
                let mut v = Vec::new();
                if vp.s_min < lo {
                    v.push([at(vp.s_min), at(lo)]);
                }
                if vp.s_max > hi {
                    v.push([at(hi), at(vp.s_max)]);
                }
                v
            }
        }
    }

    /// All coordinates that the SVG draws, for the companion CSV.
    pub fn plotted_points(&self) -> Vec<PlottedPoint> {
        let vp = self.viewport();
        let mut out = Vec::new();
        for (k, branch) in self.boundary_branches(&vp).iter().enumerate() {
            for &(s, u) in branch {
                out.push(PlottedPoint { element: "boundary", label: format!("branch{k}"), s, u });
            }
        }
        out.push(PlottedPoint { element: "asymptote", label: "vertical".into(), s: -1.0, u: f64::NAN });
        out.push(PlottedPoint { element: "asymptote", label: "horizontal".into(), s: f64::NAN, u: -self.theta_l_over_k });
        if let Some(line) = &self.line {
            for s in [vp.s_min, vp.s_max] {
                out.push(PlottedPoint { element: "vector_line", label: String::new(), s, u: line.u_at(s) });
            }
        }
        for (k, piece) in self.segment_pieces(&vp).iter().enumerate() {
            for &(s, u) in piece {
                out.push(PlottedPoint { element: "segment", label: format!("piece{k}"), s, u });
            }
        }
        for (element, label, p) in self.labelled_points() {
            out.push(PlottedPoint { element, label, s: p.s, u: p.u });
        }
        if let Some(t) = self.thresholds {
            for (k, s) in t.iter().enumerate() {
                out.push(PlottedPoint { element: "threshold", label: format!("R_L{}", k + 1), s: *s, u: 0.0 });
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in self.plotted_points() {
            w.serialize(&p).expect("in-memory CSV write");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
    }

    pub fn to_svg(&self) -> String {
        let vp = self.viewport();
        let sx = |s: f64| MARGIN + (s - vp.s_min) / (vp.s_max - vp.s_min) * (WIDTH - 2.0 * MARGIN);
        let sy = |u: f64| HEIGHT - MARGIN - (u - vp.u_min) / (vp.u_max - vp.u_min) * (HEIGHT - 2.0 * MARGIN);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        if let Some(t) = &self.title {
            let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(t));
        }
        let (x0, x1, y0, y1) = (sx(vp.s_min), sx(vp.s_max), sy(vp.u_min), sy(vp.u_max));
        let _ = writeln!(svg, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="silver"/>"#, x1 - x0, y0 - y1);

        // axes through the origin
        if vp.contains(0.0, vp.u_min) {
            let _ = writeln!(svg, r#"<line class="axis" x1="{:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y1:.2}" stroke="black"/>"#, sx(0.0), sx(0.0));
        }
        if vp.contains(vp.s_min, 0.0) {
            let _ = writeln!(svg, r#"<line class="axis" x1="{x0:.2}" y1="{:.2}" x2="{x1:.2}" y2="{:.2}" stroke="black"/>"#, sy(0.0), sy(0.0));
        }
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">S′</text>"#, x1 - 4.0, HEIGHT - MARGIN + 28.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">U′</text>"#, MARGIN - 40.0, y1 + 4.0);

        // asymptotes
        let ha = -self.theta_l_over_k;
        if vp.contains(-1.0, vp.u_min) {
            let _ = writeln!(svg, r#"<line class="asymptote" x1="{:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y1:.2}" stroke="gray" stroke-dasharray="6 4"/>"#, sx(-1.0), sx(-1.0));
        }
        if vp.contains(vp.s_min, ha) {
            let _ = writeln!(svg, r#"<line class="asymptote" x1="{x0:.2}" y1="{:.2}" x2="{x1:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#, sy(ha), sy(ha));
        }

        for branch in self.boundary_branches(&vp) {
            let pts: Vec<String> = branch.iter().map(|&(s, u)| format!("{:.2},{:.2}", sx(s), sy(u))).collect();
            let _ = writeln!(svg, r#"<polyline class="boundary" points="{}" fill="none" stroke="navy" stroke-width="1.5"/>"#, pts.join(" "));
        }

        if let Some(line) = &self.line {
            if let Some([(a, b), (c, d)]) = clip_line(line, &vp) {
                let _ = writeln!(svg, r#"<line class="vector-line" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="darkorange" stroke-dasharray="2 3"/>"#, sx(a), sy(b), sx(c), sy(d));
            }
        }
        for [(a, b), (c, d)] in self.segment_pieces(&vp) {
            let (a, b) = clamp_to(&vp, a, b);
            let (c, d) = clamp_to(&vp, c, d);
            let _ = writeln!(svg, r#"<line class="segment" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="3"/>"#, sx(a), sy(b), sx(c), sy(d));
        }

        if let Some(t) = self.thresholds {
            for (k, s) in t.iter().enumerate() {
                if vp.contains(*s, 0.0) {
                    let x = sx(*s);
                    let y = sy(0.0);
                    let _ = writeln!(svg, r#"<line class="threshold" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="green" stroke-width="2"/>"#, y - 8.0, y + 8.0);
                    let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" fill="green">S′(R_L{})</text>"#, y + 22.0, k + 1);
                }
            }
        }

        for (element, label, p) in self.labelled_points() {
            if !vp.contains(p.s, p.u) {
                continue;
            }
            let color = match element {
                "economy" => "black",
                "endpoint" => "crimson",
                _ => "teal",
            };
            let _ = writeln!(svg, r#"<circle class="point" data-label="{label}" cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, sx(p.s), sy(p.u));
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#, sx(p.s) + 6.0, sy(p.u) - 6.0, escape(&label));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn clamp_to(vp: &Viewport, s: f64, u: f64) -> (f64, f64) {
    (s.clamp(vp.s_min, vp.s_max), u.clamp(vp.u_min, vp.u_max))
}

/// Endpoints of the part of U′ = −a1 S′ + b1 inside the viewport.
fn clip_line(line: &VectorLine<f64>, vp: &Viewport) -> Option<[(f64, f64); 2]> {
    let mut lo = vp.s_min;
    let mut hi = vp.s_max;
    if line.a1 != 0.0 {
        // solve for S′ where the line crosses the top and bottom edges
        let s_at = |u: f64| (line.b1 - u) / line.a1;
        let (s1, s2) = (s_at(vp.u_min), s_at(vp.u_max));
        lo = lo.max(s1.min(s2));
        hi = hi.min(s1.max(s2));
    } else if !(line.b1 >= vp.u_min && line.b1 <= vp.u_max) {
        return None;
    }
    (lo < hi).then(|| [(lo, line.u_at(lo)), (hi, line.u_at(hi))])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
