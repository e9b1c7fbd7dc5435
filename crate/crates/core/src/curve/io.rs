//! Line-oriented text format for curve families.
//!
//! ```text
//! # family: radial segments crossing an annulus
//! # param count=4
//! 1,0 1.5,0 2,0
//! 0,1 0,2
//! ```
//!
//! One curve per line, vertices separated by whitespace, coordinates by
//! commas. Lines starting with `#` carry metadata; blank lines are skipped.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{CurveFamily, Polyline};

pub fn write_family(fam: &CurveFamily) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# family: {}", fam.meta.description);
    for (k, v) in &fam.meta.params {
        let _ = writeln!(s, "# param {k}={v}");
    }
    for c in &fam.curves {
        let line: Vec<String> = c
            .vertices()
            .iter()
            .map(|v| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","))
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_family(text: &str) -> Result<CurveFamily> {
    let mut description = String::new();
    let mut params = Vec::new();
    let mut curves = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            if let Some(d) = meta.strip_prefix("family:") {
                description = d.trim().to_string();
            } else if let Some(kv) = meta.strip_prefix("param ") {
                if let Some((k, v)) = kv.split_once('=') {
                    let v: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("line {}: bad parameter value", lineno + 1)))?;
                    params.push((k.trim().to_string(), v));
                }
            }
            continue;
        }
        let vertices = line
            .split_whitespace()
            .map(|tok| {
                tok.split(',')
                    .map(|x| x.parse::<f64>())
                    .collect::<std::result::Result<Vec<f64>, _>>()
                    .map_err(|_| Error::Config(format!("line {}: bad coordinate in {tok:?}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        curves.push(
            Polyline::new(vertices).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?,
        );
    }
    let mut fam = CurveFamily::new(curves, description)?;
    fam.meta.params.extend(params);
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::radial_family;
    use crate::geom::Annulus;
    use proptest::prelude::*;

    #[test]
    fn parses_handwritten_family() {
        let fam = parse_family("# family: two\n1,0 1.5,0 2,0\n\n0,1 0,2\n").unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.meta.description, "two");
        assert_eq!(fam.curves[0].vertices().len(), 3);
        assert!(parse_family("1,0 1,x\n").is_err());
        assert!(parse_family("1,0\n").is_err());
    }

    proptest! {
        #[test]
        fn text_format_roundtrips(count in 1usize..12, r1 in 0.1f64..1.0, w in 0.1f64..2.0, cx in -1.0f64..1.0) {
            let a = Annulus::new(vec![cx, 0.5], r1, r1 + w).unwrap();
            let fam = radial_family(&a, count, 0.07).unwrap();
            let back = parse_family(&write_family(&fam)).unwrap();
            prop_assert_eq!(back, fam);
        }
    }
}
