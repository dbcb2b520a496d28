//! Static SVG histograms.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

/// Square-root rule: `ceil(sqrt(count))` equal-width bins over the sample
/// range, capped at 200.
pub fn bin_count(count: usize) -> usize {
    ((count as f64).sqrt().ceil() as usize).clamp(1, 200)
}

/// Density histogram of `values` as a standalone SVG document.
pub fn histogram(values: &[f64], title: &str) -> String {
    let bins = bin_count(values.len());
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / span) * bins as f64) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let peak = counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let bar_w = plot_w / bins as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, &c) in counts.iter().enumerate() {
        let h = plot_h * c as f64 / peak;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4c72b0"/>"##,
            MARGIN + i as f64 * bar_w,
            HEIGHT - MARGIN - h,
            bar_w,
            h
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/>"#,
        y = HEIGHT - MARGIN,
        x2 = WIDTH - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.0}" font-size="12" font-family="sans-serif">{lo:.4}</text>"#,
        HEIGHT - MARGIN + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.0}" y="{:.0}" font-size="12" font-family="sans-serif" text-anchor="end">{hi:.4}</text>"#,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="24" font-size="13" font-family="sans-serif">{} ({bins} bins, square-root rule)</text>"#,
        escape(title)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
