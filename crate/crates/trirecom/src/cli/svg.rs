//! SVG drawings of partitions on the triangular region.
//!
//! The leftmost corner sits on the left and column `c` is a vertical line of
//! `c` vertices, so the region points left with its right side vertical.
//! District 1 is red, 2 blue, 3 yellow.

use crate::partition::{District, Partition};
use std::fmt::Write;

const SCALE: f64 = 24.0;
const MARGIN: f64 = 16.0;
const CAPTION: f64 = 30.0;
const ROW_HEIGHT: f64 = 0.866_025_403_784_438_6;

fn color(d: District) -> &'static str {
    match d {
        1 => "#d62728",
        2 => "#1f5fbf",
        _ => "#f2c12e",
    }
}

/// Lattice position of `(col, row)` in drawing units.
fn position(n: usize, col: usize, row: usize) -> (f64, f64) {
    let x = (col - 1) as f64 * ROW_HEIGHT;
    let y = (row - 1) as f64 - (col - 1) as f64 / 2.0 + (n - 1) as f64 / 2.0;
    (x * SCALE, y * SCALE)
}

fn frame_size(n: usize) -> (f64, f64) {
    let w = (n - 1) as f64 * ROW_HEIGHT * SCALE + 2.0 * MARGIN;
    let h = (n - 1) as f64 * SCALE + 2.0 * MARGIN + CAPTION;
    (w, h)
}

fn draw_frame(out: &mut String, p: &Partition, dx: f64, dy: f64, caption: &str) {
    let region = p.region();
    let n = region.n();
    let _ = writeln!(out, "<g transform=\"translate({:.2},{:.2})\">", dx + MARGIN, dy + MARGIN);
    for v in 0..region.len() {
        let a = region.vertex(v);
        let (x1, y1) = position(n, a.col, a.row);
        for u in region.neighbor_ids(v).filter(|&u| u > v) {
            let b = region.vertex(u);
            let (x2, y2) = position(n, b.col, b.row);
            let stroke = if p.label_of(u) == p.label_of(v) { color(p.label_of(v)) } else { "#bbbbbb" };
            let _ = writeln!(
                out,
                "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"2\"/>"
            );
        }
    }
    for v in 0..region.len() {
        let a = region.vertex(v);
        let (x, y) = position(n, a.col, a.row);
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.2}\" fill=\"{}\" stroke=\"#333333\" stroke-width=\"0.8\"/>",
            SCALE * 0.28,
            color(p.label_of(v))
        );
    }
    let (_, h) = frame_size(n);
    let top = h - 2.0 * MARGIN - CAPTION + 14.0;
    for (j, line) in caption.lines().enumerate() {
        let _ = writeln!(
            out,
            "<text x=\"0\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"10\">{}</text>",
            top + 12.0 * j as f64,
            escape(line)
        );
    }
    out.push_str("</g>\n");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One frame per state, laid out in rows of at most `per_row` frames.
pub fn render(frames: &[(Partition, String)], per_row: usize) -> String {
    let n = frames.first().map_or(1, |(p, _)| p.region().n()).max(2);
    let (fw, fh) = frame_size(n);
    let cols = frames.len().clamp(1, per_row.max(1));
    let rows = frames.len().div_ceil(cols).max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.2} {:.2}\">",
        fw * cols as f64,
        fh * rows as f64,
        fw * cols as f64,
        fh * rows as f64
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (j, (p, caption)) in frames.iter().enumerate() {
        draw_frame(&mut out, p, (j % cols) as f64 * fw, (j / cols) as f64 * fh, caption);
    }
    out.push_str("</svg>\n");
    out
}
