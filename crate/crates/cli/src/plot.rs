//! Static SVG figures. Coordinates are printed with fixed precision so the
//! output is byte-stable for fixed input.

use std::fmt::Write;

use alphastep::geometry::branch_radius;
use alphastep::{Complex64, CriticalProfile, Polynomial, Result, Trace};

const SIZE: f64 = 600.0;
const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];
const UNRESOLVED: &str = "#404040";

/// Square world window mapped onto the canvas, y axis up.
struct Frame {
    cx: f64,
    cy: f64,
    half: f64,
}

impl Frame {
    fn around(points: impl IntoIterator<Item = Complex64>) -> Self {
        let (mut lo, mut hi) = (Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0));
        for z in points.into_iter().filter(|z| z.re.is_finite() && z.im.is_finite()) {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        Self {
            cx: (lo.re + hi.re) / 2.0,
            cy: (lo.im + hi.im) / 2.0,
            half: 1.1 * (hi.re - lo.re).max(hi.im - lo.im) / 2.0,
        }
    }

    fn to_canvas(&self, z: Complex64) -> (f64, f64) {
        let s = SIZE / (2.0 * self.half);
        ((z.re - self.cx + self.half) * s, (self.cy + self.half - z.im) * s)
    }

    fn to_world(&self, x: f64, y: f64) -> Complex64 {
        let s = 2.0 * self.half / SIZE;
        Complex64::new(self.cx - self.half + x * s, self.cy + self.half - y * s)
    }

    fn radius(&self, r: f64) -> f64 {
        r * SIZE / (2.0 * self.half)
    }
}

fn header(svg: &mut String) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
}

fn landmarks(svg: &mut String, frame: &Frame, profile: &CriticalProfile) {
    let (ox, oy) = frame.to_canvas(Complex64::new(0.0, 0.0));
    let _ = writeln!(
        svg,
        r##"<circle class="unit" cx="{ox:.3}" cy="{oy:.3}" r="{:.3}" fill="none" stroke="#999" stroke-dasharray="4 3"/>"##,
        frame.radius(1.0)
    );
    for &zeta in &profile.roots {
        let (x, y) = frame.to_canvas(zeta);
        let _ = writeln!(
            svg,
            r##"<rect class="root" x="{:.3}" y="{:.3}" width="8" height="8" fill="#000"/>"##,
            x - 4.0,
            y - 4.0
        );
    }
    for c in &profile.critical_points {
        let (x, y) = frame.to_canvas(c.c);
        let _ = writeln!(
            svg,
            r##"<path class="critical" d="M{:.3} {:.3}l10 10m0 -10l-10 10" stroke="#c00" stroke-width="2"/>"##,
            x - 5.0,
            y - 5.0
        );
    }
}

/// The iterates `z_0, ..., z_N`.
fn trace_points(trace: &Trace) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = trace.steps.iter().map(|s| s.z).collect();
    if trace.steps.last().is_none_or(|s| s.jump.is_some()) {
        pts.push(trace.z_final);
    }
    pts.retain(|z| z.re.is_finite() && z.im.is_finite());
    pts
}

/// The solver path over the roots and critical points, one marker per
/// iterate.
pub fn trace_svg(profile: &CriticalProfile, trace: &Trace) -> String {
    let pts = trace_points(trace);
    let frame = Frame::around(
        pts.iter()
            .copied()
            .chain(profile.roots.iter().copied())
            .chain(profile.critical_points.iter().map(|c| c.c)),
    );
    let mut svg = String::new();
    header(&mut svg);
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    landmarks(&mut svg, &frame, profile);
    let mut d = String::new();
    for (i, &z) in pts.iter().enumerate() {
        let (x, y) = frame.to_canvas(z);
        let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" });
    }
    let _ = writeln!(svg, r##"<path class="path" d="{d}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##);
    for &z in &pts {
        let (x, y) = frame.to_canvas(z);
        let _ = writeln!(svg, r##"<circle class="step" cx="{x:.3}" cy="{y:.3}" r="3" fill="#1f5fa8"/>"##);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Shades a `grid × grid` lattice of the z-plane by the critical value that
/// bounds the univalence disk of the local branch of `f⁻¹`. Horizontal runs
/// of equal color are merged into one rectangle.
pub fn voronoi_svg(p: &Polynomial, profile: &CriticalProfile, grid: usize) -> Result<String> {
    let frame = Frame::around(
        profile
            .roots
            .iter()
            .copied()
            .chain(profile.critical_points.iter().map(|c| c.c)),
    );
    // critical points over one value share a color
    let values = profile.critical_values();
    let color_of: Vec<usize> = (0..values.len())
        .map(|i| (0..=i).find(|&j| (values[j] - values[i]).norm() <= 1e-10).unwrap_or(i))
        .collect();

    let cell = SIZE / grid as f64;
    let mut svg = String::new();
    header(&mut svg);
    let _ = writeln!(svg, r#"<g class="shading" data-grid="{grid}">"#);
    for row in 0..grid {
        let colors: Vec<&str> = (0..grid)
            .map(|col| {
                let z = frame.to_world((col as f64 + 0.5) * cell, (row as f64 + 0.5) * cell);
                match branch_radius(p, profile, p.eval(z), z) {
                    Ok(b) => b.critical.map_or(PALETTE[0], |k| PALETTE[color_of[k] % PALETTE.len()]),
                    Err(_) => UNRESOLVED,
                }
            })
            .collect();
        let mut start = 0;
        for col in 1..=grid {
            if col == grid || colors[col] != colors[start] {
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{cell:.3}" fill="{}"/>"#,
                    start as f64 * cell,
                    row as f64 * cell,
                    (col - start) as f64 * cell,
                    colors[start]
                );
                start = col;
            }
        }
    }
    svg.push_str("</g>\n");
    landmarks(&mut svg, &frame, profile);
    svg.push_str("</svg>\n");
    Ok(svg)
}
