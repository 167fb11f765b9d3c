//! CSV and SVG emission. Both are deterministic for fixed input: fixed
//! point counts, fixed number formatting, no timestamps.

use std::fmt::Write as _;

use resolvent_lab::Cx;

/// Header row plus one line per record, `,`-delimited, `\n`-terminated.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Reads back a CSV written by [`csv`]: the header and the numeric rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let rows = r
        .deserialize::<Vec<f64>>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok((header, rows))
}

pub struct SvgCurve<'a> {
    pub points: &'a [Cx],
    pub stroke: &'a str,
    pub fill: Option<&'a str>,
}

const SIZE: u32 = 480;

/// The unit circle and closed curves, in disk coordinates with the
/// imaginary axis pointing up, without axes.
pub fn svg(title: &str, curves: &[SvgCurve]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="-1.05 -1.05 2.1 2.1">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<g transform="scale(1,-1)">"#);
    let _ = writeln!(
        s,
        r##"<circle cx="0" cy="0" r="1" fill="none" stroke="#000000" stroke-width="0.006"/>"##
    );
    for c in curves {
        if c.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, z) in c.points.iter().enumerate() {
            let _ = write!(d, "{}{:.6} {:.6} ", if k == 0 { "M" } else { "L" }, z.re, z.im);
        }
        d.push('Z');
        let fill = c.fill.unwrap_or("none");
        let opacity = if c.fill.is_some() { r#" fill-opacity="0.35""# } else { "" };
        let _ = writeln!(
            s,
            r#"<path d="{d}" fill="{fill}"{opacity} stroke="{}" stroke-width="0.006" stroke-linejoin="round"/>"#,
            c.stroke
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let text = csv(&["t", "re"], vec![vec![0.0, 0.1], vec![1.5, -2e-17]]);
        assert_eq!(text, "t,re\n0.0,0.1\n1.5,-2e-17\n");
        let (h, rows) = parse_csv(&text).unwrap();
        assert_eq!(h, ["t", "re"]);
        assert_eq!(rows[1][1], -2e-17);
        assert!(parse_csv("a,b\n1\n").is_err());
    }

    #[test]
    fn svg_is_deterministic() {
        let pts = [Cx::new(0.5, 0.0), Cx::new(0.0, 0.5), Cx::new(-0.5, 0.0)];
        let c = [SvgCurve { points: &pts, stroke: "#1f77b4", fill: Some("#1f77b4") }];
        let a = svg("a < b", &c);
        assert_eq!(a, svg("a < b", &c));
        assert!(a.contains("M0.500000 0.000000 L0.000000 0.500000"));
        assert!(a.contains("a &lt; b"));
        assert!(a.contains(r#"r="1""#));
    }
}
