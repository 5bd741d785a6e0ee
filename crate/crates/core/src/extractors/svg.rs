// SPDX-License-Identifier: Apache-2.0

//! Minimal SVG renderings of the plot data.

use std::fmt::Write;

const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Solved cases on x, cumulative seconds on y, one polyline per solver.
pub fn cactus(solvers: &[String], rows: &[(String, usize, f64)]) -> String {
    let max_x = rows.iter().map(|r| r.1).max().unwrap_or(1).max(1) as f64;
    let max_y = rows
        .iter()
        .map(|r| r.2)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let sx = |x: f64| MARGIN + x / max_x * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y / max_y * (H - 2.0 * MARGIN);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{MARGIN}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{r}\" y=\"{t}\" text-anchor=\"end\" font-size=\"12\">solved cases ({max_x})</text>\n\
         <text x=\"{MARGIN}\" y=\"{l}\" font-size=\"12\">cumulative time in s ({max_y:.3})</text>\n",
        b = H - MARGIN,
        r = W - MARGIN,
        t = H - MARGIN / 3.0,
        l = MARGIN - 10.0,
    );
    for (i, s) in solvers.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = std::iter::once((0usize, 0.0))
            .chain(rows.iter().filter(|r| &r.0 == s).map(|r| (r.1, r.2)))
            .map(|(x, y)| format!("{:.1},{:.1}", sx(x as f64), sy(y)))
            .collect();
        writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
            points.join(" ")
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\" font-size=\"12\">{}</text>",
            MARGIN + 10.0,
            MARGIN + 15.0 * (i as f64 + 1.0),
            escape(s)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Two-slice pie.
pub fn pie(matching: usize, rest: usize) -> String {
    let (cx, cy, r) = (W / 2.0, H / 2.0, H / 2.0 - MARGIN);
    let total = (matching + rest) as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    let circle =
        |color: &str| format!("<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"{color}\"/>\n");
    if total == 0.0 || rest == 0 {
        out.push_str(&circle(PALETTE[0]));
    } else if matching == 0 {
        out.push_str(&circle(PALETTE[1]));
    } else {
        out.push_str(&circle(PALETTE[1]));
        let angle = matching as f64 / total * std::f64::consts::TAU;
        let (ex, ey) = (cx + r * angle.sin(), cy - r * angle.cos());
        let large = u8::from(angle > std::f64::consts::PI);
        writeln!(
            out,
            "<path d=\"M{cx},{cy} L{cx},{top} A{r},{r} 0 {large} 1 {ex:.2},{ey:.2} Z\" fill=\"{}\"/>",
            PALETTE[0],
            top = cy - r
        )
        .unwrap();
    }
    writeln!(
        out,
        "<text x=\"10\" y=\"20\" font-size=\"14\" fill=\"{}\">matching: {matching}</text>\n\
         <text x=\"10\" y=\"40\" font-size=\"14\" fill=\"{}\">not matching: {rest}</text>",
        PALETTE[0], PALETTE[1]
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}
