//! Log-log SVG scatter of mean queries against gap from a scaling CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::scaling::{log_slope, Model, CSV_HEADER};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Mean queries per gap for one (model, N) series.
pub type Series = BTreeMap<(String, usize), Vec<(f64, f64)>>;

/// Parses a scaling CSV; errors name the offending line.
pub fn read_series(text: &str) -> Result<Series, String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| format!("line 1: {e}"))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(format!("line 1: expected header {}", CSV_HEADER.join(",")));
    }
    // (model, N) → gap bits → (sum, count)
    let mut sums: BTreeMap<(String, usize), BTreeMap<u64, (f64, usize)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.position() {
            Some(p) => format!("line {}: {e}", p.line()),
            None => e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |field: &str| format!("line {line}: invalid {field}");
        let model: Model = record[0].parse().map_err(|_| bad("model"))?;
        let n: usize = record[1].parse().map_err(|_| bad("n_arms"))?;
        let gap: f64 = record[2].parse().map_err(|_| bad("gap"))?;
        record[3].parse::<f64>().map_err(|_| bad("delta"))?;
        record[4].parse::<usize>().map_err(|_| bad("trial"))?;
        record[5].parse::<u64>().map_err(|_| bad("seed"))?;
        let queries: u64 = record[6].parse().map_err(|_| bad("queries"))?;
        if !matches!(&record[7], "0" | "1") {
            return Err(bad("success"));
        }
        if !(gap > 0.0) {
            return Err(bad("gap"));
        }
        let e = sums.entry((model.name().to_string(), n)).or_default().entry(gap.to_bits()).or_insert((0.0, 0));
        e.0 += queries as f64;
        e.1 += 1;
    }
    if sums.is_empty() {
        return Err("no data rows".into());
    }
    Ok(sums
        .into_iter()
        .map(|(key, by_gap)| {
            let mut pts: Vec<(f64, f64)> = by_gap.into_iter().map(|(g, (s, c))| (f64::from_bits(g), s / c as f64)).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (key, pts)
        })
        .collect())
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

pub fn render_svg(series: &Series) -> String {
    // Zero-query means are drawn at 1 so the log axis stays finite.
    let log_pts = |pts: &[(f64, f64)]| -> Vec<(f64, f64)> { pts.iter().map(|&(g, q)| (g.ln(), q.max(1.0).ln())).collect() };
    let all: Vec<(f64, f64)> = series.values().flat_map(|p| log_pts(p)).collect();
    let (x0, x1) = range(all.iter().map(|p| p.0));
    let (y0, y1) = range(all.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} L{m} {b} L{r} {b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">ln gap</text>"#, WIDTH / 2.0, HEIGHT - 20.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{y}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {y})">ln mean queries</text>"#,
        y = HEIGHT / 2.0
    );
    for (k, ((model, n), pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let lp = log_pts(pts);
        if lp.len() > 1 {
            let path: Vec<String> = lp.iter().map(|&(x, y)| format!("{:.2} {:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<path d="M{}" fill="none" stroke="{color}"/>"#, path.join(" L"));
        }
        for &(x, y) in &lp {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        }
        let mut label = format!("{model} N={n}");
        if let Some(slope) = log_slope(&pts.iter().map(|&(g, q)| (g, q.max(1.0))).collect::<Vec<_>>()) {
            let _ = write!(label, " slope={slope:.3}");
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}">{label}</text>"#,
            WIDTH - MARGIN - 200.0,
            MARGIN + 16.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
