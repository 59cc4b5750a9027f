//! File schemas shared by the CLI, and a deterministic JSON writer.
//!
//! Structured data is JSON with complex numbers as [re, im] pairs. Output
//! floats are rendered with a fixed 17-significant-digit scientific format
//! so identical inputs and options produce byte-identical files; the
//! shortest-roundtrip formatting of general-purpose serializers does not
//! guarantee a stable digit count.

use crate::config::ProblemConfig;
use crate::error::{Error, Result};
use crate::potential::{Potential, PotentialRep};
use crate::spectrum::Spectrum;
use num_complex::Complex64;
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;

// ---------------------------------------------------------------------------
// Input schemas
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct ConfigFile {
    alpha: u8,
    beta: u8,
    k: usize,
}

#[derive(Deserialize)]
struct PotentialFile {
    #[serde(rename = "type")]
    kind: String,
    values: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct SpectrumFile {
    values: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct MatrixFile {
    dim: usize,
    values: Vec<[f64; 2]>,
}

fn complex_vec(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

pub fn parse_config(text: &str) -> Result<ProblemConfig> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))?;
    ProblemConfig::new(file.alpha, file.beta, file.k)
}

pub fn parse_potential(text: &str) -> Result<Potential> {
    let file: PotentialFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("potential: {e}")))?;
    let values = complex_vec(&file.values);
    match file.kind.as_str() {
        "grid" => Ok(Potential::from_grid(values)),
        "fourier-cos" => Ok(Potential::from_fourier_cos(values)),
        other => Err(Error::InvalidConfig(format!(
            "potential type must be \"grid\" or \"fourier-cos\", got \"{other}\""
        ))),
    }
}

pub fn parse_spectrum(text: &str, cfg: ProblemConfig) -> Result<Spectrum> {
    let file: SpectrumFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("spectrum: {e}")))?;
    if file.values.is_empty() {
        return Err(Error::InvalidConfig("spectrum: empty value list".into()));
    }
    Ok(Spectrum::new(complex_vec(&file.values), cfg))
}

/// Row-major complex matrix, used for the matrix form of the restriction
/// operator.
pub fn parse_matrix(text: &str) -> Result<(Vec<Complex64>, usize)> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("matrix: {e}")))?;
    if file.values.len() != file.dim * file.dim {
        return Err(Error::GridMismatch {
            expected: file.dim * file.dim,
            got: file.values.len(),
        });
    }
    Ok((complex_vec(&file.values), file.dim))
}

// ---------------------------------------------------------------------------
// Deterministic output
// ---------------------------------------------------------------------------

/// JSON value with insertion-ordered objects and fixed float formatting.
#[derive(Debug, Clone)]
pub enum JVal {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<JVal>),
    Obj(Vec<(String, JVal)>),
}

impl JVal {
    pub fn obj(fields: Vec<(&str, JVal)>) -> JVal {
        JVal::Obj(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn complex(z: Complex64) -> JVal {
        JVal::Arr(vec![JVal::Num(z.re), JVal::Num(z.im)])
    }

    pub fn complex_list(zs: &[Complex64]) -> JVal {
        JVal::Arr(zs.iter().map(|&z| JVal::complex(z)).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            JVal::Null => out.push_str("null"),
            JVal::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            JVal::Int(i) => {
                let _ = write!(out, "{i}");
            }
            JVal::Num(x) => {
                out.push_str(&format_f64(*x));
            }
            JVal::Str(s) => write_json_string(out, s),
            JVal::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out, indent);
                }
                out.push(']');
            }
            JVal::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                let pad = "  ".repeat(indent + 1);
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push_str(",\n");
                    }
                    out.push_str(&pad);
                    write_json_string(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

/// 17 significant digits, lowercase exponent, no signed zero surprises.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn config_json(cfg: &ProblemConfig) -> JVal {
    JVal::obj(vec![
        ("alpha", JVal::Int(cfg.alpha as i64)),
        ("beta", JVal::Int(cfg.beta as i64)),
        ("k", JVal::Int(cfg.k as i64)),
    ])
}

pub fn potential_json(q: &Potential) -> JVal {
    let (kind, values) = match &q.rep {
        PotentialRep::Grid(v) => ("grid", v),
        PotentialRep::FourierCos(v) => ("fourier-cos", v),
    };
    JVal::obj(vec![
        ("type", JVal::Str(kind.into())),
        ("values", JVal::complex_list(values)),
    ])
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_three_schemas() {
        let cfg = parse_config(r#"{"alpha":0,"beta":1,"k":3}"#).unwrap();
        assert_eq!((cfg.alpha, cfg.beta, cfg.k), (0, 1, 3));
        let q = parse_potential(r#"{"type":"fourier-cos","values":[[1.0,0.0],[0.5,-0.5]]}"#)
            .unwrap();
        assert!(q.is_fourier());
        let s = parse_spectrum(r#"{"values":[[0.25,0.0],[2.25,0.0]]}"#, cfg).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_config("{not json").is_err());
        assert!(parse_config(r#"{"alpha":7,"beta":0,"k":1}"#).is_err());
        assert!(parse_potential(r#"{"type":"chebyshev","values":[]}"#).is_err());
        assert!(parse_spectrum(
            r#"{"values":[]}"#,
            ProblemConfig::new(0, 0, 1).unwrap()
        )
        .is_err());
    }

    #[test]
    fn float_format_is_fixed_width_17_digits() {
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(format_f64(0.0), "0.0000000000000000e0");
        assert_eq!(format_f64(-0.0), "0.0000000000000000e0");
        let pi = std::f64::consts::PI;
        assert_eq!(format_f64(pi), "3.1415926535897931e0");
        // rendering round-trips through a standard parser
        let back: f64 = format_f64(pi).parse().unwrap();
        assert_eq!(back, pi);
    }

    #[test]
    fn rendered_json_is_parseable_and_stable() {
        let v = JVal::obj(vec![
            ("name", JVal::Str("x\"y".into())),
            ("vals", JVal::complex_list(&[Complex64::new(1.5, -2.0)])),
            ("empty", JVal::Arr(vec![])),
        ]);
        let text = v.render();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["name"], "x\"y");
        assert_eq!(text, v.render());
    }
}
