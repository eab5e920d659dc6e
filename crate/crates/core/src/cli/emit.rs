//! Report files: JSON with 17 significant digits, eigenvalue CSV and SVG
//! plots. Output depends only on the document, so reruns are byte-identical.

use super::ReportDocument;
use crate::error::Result;
use crate::inverse::ReconstructionField;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// `d.ddddddddddddddddde±x`: 17 significant digits, exact round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (_, Some(i)) => write!(out, "{i}").unwrap(),
            _ => out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(out, indent + 2);
                write_value(out, x, indent + 2);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(out, x, indent + 2);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON in which every float is printed with 17 significant digits.
/// Non-finite floats become `null`.
pub fn to_json<T: Serialize>(x: &T) -> String {
    let v = serde_json::to_value(x).expect("report serialises");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

pub fn spectrum_csv(eigenvalues: &[f64]) -> String {
    let mut s = String::from("index,value\n");
    for (i, v) in eigenvalues.iter().enumerate() {
        writeln!(s, "{},{}", i + 1, fmt_f64(*v)).unwrap();
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const M: f64 = 48.0;

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
        W / 2.0
    )
}

/// Stem plot of the eigenvalues against their index.
pub fn spectrum_svg(eigenvalues: &[f64], title: &str) -> String {
    let mut s = svg_open(title);
    let top = eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let top = if top > 0.0 { top } else { 1.0 };
    let (x0, x1, y0, y1) = (M, W - M / 2.0, M, H - M);
    let ymid = 0.5 * (y0 + y1);
    let ys = |v: f64| ymid - v / top * 0.5 * (y1 - y0);
    let n = eigenvalues.len().max(1) as f64;
    let xs = |i: usize| x0 + (i as f64 + 0.5) / n * (x1 - x0);
    writeln!(s, "<line x1=\"{x0:.2}\" y1=\"{ymid:.2}\" x2=\"{x1:.2}\" y2=\"{ymid:.2}\" stroke=\"black\"/>").unwrap();
    writeln!(s, "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>").unwrap();
    for (v, y) in [(top, y0), (-top, y1)] {
        writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{v:.3e}</text>",
            x0 - 4.0,
            y + 4.0
        )
        .unwrap();
    }
    for (i, &v) in eigenvalues.iter().enumerate() {
        let (x, y) = (xs(i), ys(v));
        writeln!(s, "<line x1=\"{x:.2}\" y1=\"{ymid:.2}\" x2=\"{x:.2}\" y2=\"{y:.2}\" stroke=\"steelblue\"/>").unwrap();
        writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\" fill=\"steelblue\"/>").unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Heat map of a reconstructed density in light-cone coordinates: `u`
/// to the right, `w` upwards.
pub fn density_svg(f: &ReconstructionField) -> String {
    let mut s = svg_open("recovered density f^2 over (u, w) windows");
    let side = (H - 2.0 * M).min(W - 2.0 * M);
    let x0 = 0.5 * (W - side);
    let cell = side / f.blocks.max(1) as f64;
    let top = f.values.iter().flatten().fold(0.0f64, |a, &v| a.max(v));
    let top = if top > 0.0 { top } else { 1.0 };
    for (j, row) in f.values.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let a = (v / top).clamp(0.0, 1.0);
            // white to dark blue
            let c = |lo: f64, hi: f64| (lo + (hi - lo) * a).round() as u8;
            writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"#{:02x}{:02x}{:02x}\"/>",
                x0 + i as f64 * cell,
                M + side - (j + 1) as f64 * cell,
                c(255.0, 8.0),
                c(255.0, 48.0),
                c(255.0, 107.0)
            )
            .unwrap();
        }
    }
    writeln!(s, "<rect x=\"{x0:.2}\" y=\"{M:.2}\" width=\"{side:.2}\" height=\"{side:.2}\" fill=\"none\" stroke=\"black\"/>")
        .unwrap();
    writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\">max {top:.4e}</text>",
        x0 + side + 6.0,
        M + 10.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

/// Write the requested formats into `outdir` and return the paths written.
pub fn emit_report(doc: &ReportDocument, formats: &[Format], outdir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir)?;
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    let empty = Vec::new();
    let eig = doc.spectrum.as_ref().map_or(&empty, |r| &r.eigenvalues);
    let mut files = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let p = outdir.join(name);
        std::fs::write(&p, body)?;
        files.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            Format::Json => put("report.json", to_json(doc))?,
            Format::Csv => put("spectrum.csv", spectrum_csv(eig))?,
            Format::Svg => {
                put("spectrum.svg", spectrum_svg(eig, &format!("{} spectrum", doc.command.name())))?;
                if let Some(r) = &doc.reconstruction {
                    put("density.svg", density_svg(&r.field))?;
                }
            }
        }
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let x = 1.0 / 3.0;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        let j = to_json(&serde_json::json!({"a": [1.5, 2], "b": {}, "c": f64::NAN}));
        assert_eq!(j, "{\n  \"a\": [\n    1.5000000000000000e0,\n    2\n  ],\n  \"b\": {},\n  \"c\": null\n}\n");
    }

    #[test]
    fn empty_spectrum_files() {
        assert_eq!(spectrum_csv(&[]), "index,value\n");
        assert!(spectrum_svg(&[], "x").ends_with("</svg>\n"));
    }
}
