//! Plain-text dataset files.
//!
//! One comma-separated row per data point:
//!
//! ```text
//! protocol,a_ms,b_ms,rho_hz,reps,dw_exp,sem
//! pairing,10,,1,60,0.25,0.05
//! pre-post-pre,5,-5,1,60,0.02,0.04
//! quadruplet,5,-50,1,60,0.1,0.05
//! ```
//!
//! | protocol            | a_ms              | b_ms                   |
//! |---------------------|-------------------|------------------------|
//! | `pairing`           | `t_post − t_pre`  | empty                  |
//! | `pre-post-pre`      | `dt1 > 0`         | `dt2 < 0`              |
//! | `post-pre-post`     | `dt1 < 0`         | `dt2 > 0`              |
//! | `quadruplet`        | pair width `dt`   | midpoint separation `T`|
//! | `six:<ordering>`    | `dt1`             | `dt2`                  |
//!
//! Lines starting with `#` are comments; a header row starting with
//! `protocol` is optional. The dataset name is the file stem.

use std::path::Path;

use stdp_core::fitting::{DataPoint, Dataset};
use stdp_core::spike::{SixTripletKind, TripletKind};
use stdp_core::Protocol;

use crate::output::fmt_f64;
use crate::CliError;

pub const HEADER: [&str; 7] = ["protocol", "a_ms", "b_ms", "rho_hz", "reps", "dw_exp", "sem"];

const MS: f64 = 1e-3;

fn line_err(line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("dataset line {line}: {msg}"))
}

fn number(line: u64, column: &str, field: &str) -> Result<f64, CliError> {
    let v: f64 = field
        .parse()
        .map_err(|_| line_err(line, format!("column {column}: {field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(line_err(line, format!("column {column}: {field:?} is not finite")));
    }
    Ok(v)
}

fn protocol(line: u64, tag: &str, a: f64, b: Option<f64>, rho: f64, n: usize) -> Result<Protocol, CliError> {
    let need_b = || b.ok_or_else(|| line_err(line, format!("protocol {tag} needs b_ms")));
    let p = match tag {
        "pairing" => {
            if b.is_some() {
                return Err(line_err(line, "pairing rows leave b_ms empty"));
            }
            Protocol::Pairing {
                dt: a * MS,
                rho,
                n_pairs: n,
            }
        }
        "pre-post-pre" | "post-pre-post" => Protocol::Triplet {
            kind: if tag == "pre-post-pre" {
                TripletKind::PrePostPre
            } else {
                TripletKind::PostPrePost
            },
            dt1: a * MS,
            dt2: need_b()? * MS,
            rho,
            n,
        },
        "quadruplet" => Protocol::Quadruplet {
            dt: a * MS,
            t: need_b()? * MS,
            rho,
            n,
        },
        _ => {
            let kind = tag
                .strip_prefix("six:")
                .and_then(SixTripletKind::from_name)
                .ok_or_else(|| line_err(line, format!("unknown protocol {tag:?}")))?;
            Protocol::SixTriplet {
                kind,
                dt1: a * MS,
                dt2: need_b()? * MS,
                rho,
                n,
            }
        }
    };
    p.generate().map_err(|e| line_err(line, e))?;
    Ok(p)
}

pub fn parse_dataset(name: &str, text: &str) -> Result<Dataset, CliError> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(trimmed.as_bytes())
            .records()
            .next()
            .transpose()
            .map_err(|e| line_err(line, e))?
            .unwrap_or_default();
        if record.get(0) == Some("protocol") && points.is_empty() {
            continue;
        }
        if record.len() != HEADER.len() {
            return Err(line_err(
                line,
                format!(
                    "expected {} columns ({}), found {}",
                    HEADER.len(),
                    HEADER.join(","),
                    record.len()
                ),
            ));
        }
        let a = number(line, "a_ms", &record[1])?;
        let b = if record[2].is_empty() {
            None
        } else {
            Some(number(line, "b_ms", &record[2])?)
        };
        let rho = number(line, "rho_hz", &record[3])?;
        let reps: usize = record[4]
            .parse()
            .map_err(|_| line_err(line, format!("column reps: {:?} is not a count", &record[4])))?;
        let dw_exp = number(line, "dw_exp", &record[5])?;
        let sem = number(line, "sem", &record[6])?;
        if sem <= 0.0 {
            return Err(line_err(line, format!("column sem: must be > 0, got {sem}")));
        }
        points.push(DataPoint {
            protocol: protocol(line, &record[0], a, b, rho, reps)?,
            dw_exp,
            sem,
        });
    }
    if points.is_empty() {
        return Err(CliError::Usage(format!("dataset {name}: no data rows")));
    }
    Dataset::new(name, points).map_err(|e| CliError::Usage(format!("dataset {name}: {e}")))
}

pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read dataset {}: {e}", path.display())))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    parse_dataset(name, &text)
}

/// `(tag, a_ms, b_ms, rho_hz, reps)` of a protocol.
pub fn protocol_fields(p: &Protocol) -> (String, f64, Option<f64>, f64, usize) {
    match *p {
        Protocol::Pairing { dt, rho, n_pairs } => ("pairing".into(), dt / MS, None, rho, n_pairs),
        Protocol::Triplet { kind, dt1, dt2, rho, n } => (kind.name().into(), dt1 / MS, Some(dt2 / MS), rho, n),
        Protocol::Quadruplet { dt, t, rho, n } => ("quadruplet".into(), dt / MS, Some(t / MS), rho, n),
        Protocol::SixTriplet { kind, dt1, dt2, rho, n } => {
            (format!("six:{}", kind.name()), dt1 / MS, Some(dt2 / MS), rho, n)
        }
        Protocol::Poisson { .. } => ("poisson".into(), f64::NAN, None, f64::NAN, 0),
    }
}

/// Dataset in the file format, one row per point.
pub fn format_dataset(ds: &Dataset) -> String {
    let mut out = format!("# {}: {} points\n{}\n", ds.name, ds.points.len(), HEADER.join(","));
    for pt in &ds.points {
        let (tag, a, b, rho, n) = protocol_fields(&pt.protocol);
        out.push_str(&format!(
            "{tag},{},{},{},{n},{},{}\n",
            fmt_f64(a),
            b.map(fmt_f64).unwrap_or_default(),
            fmt_f64(rho),
            fmt_f64(pt.dw_exp),
            fmt_f64(pt.sem)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use stdp_core::fitting::synthetic;
    use stdp_core::TripletParams;

    #[test]
    fn parses_all_protocol_tags() {
        let text = "# comment\nprotocol,a_ms,b_ms,rho_hz,reps,dw_exp,sem\n\
                    pairing,10,,1,60,0.25,0.05\n\
                    pre-post-pre,5,-5,1,60,0.02,0.04\n\
                    post-pre-post,-5,5,1,60,0.3,0.04\n\
                    quadruplet,5,-50,1,60,0.1,0.05\n\
                    six:pre-pre-post,20,10,1,60,0.1,0.05\n";
        let ds = parse_dataset("toy", text).unwrap();
        assert_eq!(ds.points.len(), 5);
        assert_eq!(
            ds.points[0].protocol,
            Protocol::Pairing {
                dt: 10.0 * MS,
                rho: 1.0,
                n_pairs: 60
            }
        );
    }

    #[test]
    fn errors_name_the_line() {
        let text = "pairing,10,,1,60,0.25,0.05\n# note\npairing,ten,,1,60,0.25,0.05\n";
        let err = parse_dataset("toy", text).unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("a_ms"), "{err}");
        let err = parse_dataset("toy", "pairing,10,,1,60,0.25,0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 1") && err.contains("sem"), "{err}");
        let err = parse_dataset("toy", "pairing,10,,1,60\n").unwrap_err().to_string();
        assert!(err.contains("line 1") && err.contains("columns"), "{err}");
        let err = parse_dataset("toy", "pre-post-pre,-5,5,1,60,0.1,0.1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 1"), "{err}");
        let err = parse_dataset("toy", "triplet,5,-5,1,60,0.1,0.1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("unknown protocol"), "{err}");
    }

    #[test]
    fn reserved_name_checks_point_count() {
        assert!(parse_dataset("hippocampal", "pairing,10,,1,60,0.25,0.05\n").is_err());
    }

    #[test]
    fn format_round_trip() {
        let ds = synthetic::hippocampal_dataset(&TripletParams::hippocampal_style());
        let back = parse_dataset("hippocampal", &format_dataset(&ds)).unwrap();
        assert_eq!(back.points.len(), 13);
        for (a, b) in ds.points.iter().zip(&back.points) {
            assert_eq!(a.dw_exp, b.dw_exp);
            assert_eq!(a.sem, b.sem);
            assert_eq!(a.protocol.generate().unwrap(), b.protocol.generate().unwrap());
        }
    }
}
