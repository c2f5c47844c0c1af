//! Deterministic SVG 1.1 rendering.
//!
//! Two figure kinds: a window sandwich as layered horizontal bars (outer
//! hull above, certified inner below, shared axis), and a projected point
//! set as tick marks on a physical axis. Output is a pure function of the
//! inputs — coordinates are formatted with fixed precision and no
//! timestamps or randomness enter the document — so renders are
//! byte-reproducible.

use crate::interval::IntervalSet;
use crate::rat::rat_to_f64;
use crate::window::WindowApprox;

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fxy(v: f64) -> String {
    format!("{v:.4}")
}

fn svg_open(width: u32, height: u32) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" \
         version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
}

struct XMap {
    lo: f64,
    span: f64,
    left: f64,
    width: f64,
}

impl XMap {
    fn new(lo: f64, hi: f64, left: f64, width: f64) -> Self {
        let span = if hi > lo { hi - lo } else { 1.0 };
        XMap {
            lo,
            span,
            left,
            width,
        }
    }
    fn x(&self, v: f64) -> f64 {
        self.left + (v - self.lo) / self.span * self.width
    }
}

fn band(out: &mut String, set: &IntervalSet, map: &XMap, y: f64, h: f64, fill: &str) {
    for iv in set.parts() {
        let x0 = map.x(rat_to_f64(&iv.lo));
        let x1 = map.x(rat_to_f64(&iv.hi));
        // Keep degenerate components visible.
        let w = (x1 - x0).max(0.4);
        out.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>\n",
            fxy(x0),
            fxy(y),
            fxy(w),
            fxy(h)
        ));
    }
}

fn axis(out: &mut String, map: &XMap, y: f64, lo: f64, hi: f64) {
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        fxy(map.x(lo)),
        fxy(y),
        fxy(map.x(hi)),
        fxy(y)
    ));
    for (v, anchor) in [(lo, "start"), (hi, "end")] {
        out.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            fxy(map.x(v)),
            fxy(y - 4.0),
            fxy(y + 4.0)
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\" \
             text-anchor=\"{anchor}\" fill=\"#333333\">{}</text>\n",
            fxy(map.x(v)),
            fxy(y + 16.0),
            fxy(v)
        ));
    }
}

/// Render a window sandwich as two layered bars over a common axis: the
/// outer hull on top, the certified inner approximation below it.
pub fn window_bars_svg(window: &WindowApprox, width: u32, height: u32) -> String {
    let (lo, hi) = window
        .span()
        .map(|(a, b)| (rat_to_f64(&a), rat_to_f64(&b)))
        .unwrap_or((0.0, 1.0));
    let pad = (hi - lo).abs().max(1e-9) * 0.02;
    let map = XMap::new(lo - pad, hi + pad, 42.0, width as f64 - 84.0);
    let h = height as f64;
    let mut out = svg_open(width, height);
    out.push_str(&format!(
        "  <title>{}</title>\n",
        esc(&format!("window sandwich: {}", window.label))
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"monospace\" fill=\"#333333\">{}</text>\n",
        fxy(42.0),
        fxy(0.10 * h),
        esc(&window.label)
    ));
    band(&mut out, &window.outer, &map, 0.18 * h, 0.20 * h, "#a6bddb");
    band(&mut out, &window.inner, &map, 0.46 * h, 0.20 * h, "#2b8cbe");
    for (label, y) in [("outer", 0.18 * h), ("inner", 0.46 * h)] {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\" \
             text-anchor=\"end\" fill=\"#333333\">{label}</text>\n",
            fxy(36.0),
            fxy(y + 0.13 * h)
        ));
    }
    axis(&mut out, &map, 0.80 * h, lo, hi);
    out.push_str("</svg>\n");
    out
}

/// Render a one-dimensional point set as tick marks on the physical axis
/// [−t, t]. Points outside the axis range are dropped.
pub fn point_ticks_svg(points: &[f64], t: f64, width: u32, height: u32) -> String {
    let bound = t.abs().max(1e-9);
    let map = XMap::new(-bound, bound, 42.0, width as f64 - 84.0);
    let h = height as f64;
    let mut out = svg_open(width, height);
    out.push_str(&format!(
        "  <title>{}</title>\n",
        esc(&format!("point set: {} points in [-{t}, {t}]", points.len()))
    ));
    let mut shown = 0usize;
    for &p in points {
        if p < -bound || p > bound {
            continue;
        }
        shown += 1;
        out.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#2b8cbe\" stroke-width=\"1\"/>\n",
            fxy(map.x(p)),
            fxy(0.32 * h),
            fxy(0.62 * h)
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\" fill=\"#333333\">{} ticks</text>\n",
        fxy(42.0),
        fxy(0.16 * h),
        shown
    ));
    axis(&mut out, &map, 0.78 * h, -bound, bound);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{Interval, IntervalSet};
    use crate::rat::rat;

    fn sample_window() -> WindowApprox {
        let set = IntervalSet::from_parts(vec![
            Interval::closed(rat(0, 1), rat(1, 3)),
            Interval::closed(rat(1, 2), rat(1, 1)),
        ]);
        WindowApprox::exact(&set, "two bars & <caret>")
    }

    #[test]
    fn window_render_is_valid_and_deterministic() {
        let w = sample_window();
        let a = window_bars_svg(&w, 640, 160);
        let b = window_bars_svg(&w, 640, 160);
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml version=\"1.0\""));
        assert!(a.contains("version=\"1.1\""));
        assert!(a.contains("xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(a.ends_with("</svg>\n"));
        // One rect per component per layer.
        let rects = a.matches("<rect ").count();
        assert_eq!(rects, w.outer.component_count() + w.inner.component_count());
        // Labels are escaped.
        assert!(a.contains("two bars &amp; &lt;caret&gt;"));
        assert!(!a.contains("<caret>"));
    }

    #[test]
    fn point_render_clips_and_counts() {
        let svg = point_ticks_svg(&[0.0, 1.5, -2.0, 9.0], 2.0, 400, 120);
        assert!(svg.contains("3 ticks"));
        assert_eq!(svg.matches("stroke=\"#2b8cbe\"").count(), 3);
        assert!(svg.contains("version=\"1.1\""));
        let again = point_ticks_svg(&[0.0, 1.5, -2.0, 9.0], 2.0, 400, 120);
        assert_eq!(svg, again);
    }

    #[test]
    fn empty_window_still_renders() {
        let w = WindowApprox::exact(&IntervalSet::empty(), "empty");
        let svg = window_bars_svg(&w, 300, 100);
        assert!(svg.contains("</svg>"));
        assert_eq!(svg.matches("<rect ").count(), 0);
    }
}
