//! Grid file format and CSV export.
//!
//! `QCGRID v1` is a one-line ASCII header followed by raw
//! little-endian `f64` node values, row-major with the last axis
//! fastest and the component index innermost:
//!
//! ```text
//! QCGRID v1 n=3 res=8,8,8 box=0,1;0,1;0,1
//! <binary node data>
//! ```

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{BoxDomain, FieldError, GridMapping, MapSource};

/// Serialize a mapping's node values (sampling analytic sources).
pub fn write_qcgrid(path: &Path, m: &GridMapping) -> Result<(), FieldError> {
    let sampled = match m.source() {
        MapSource::Sampled(_) => m.clone(),
        _ => m.sample(),
    };
    let values = match sampled.source() {
        MapSource::Sampled(v) => v,
        _ => unreachable!(),
    };
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let res: Vec<String> = m.resolution().iter().map(|r| r.to_string()).collect();
    let box_: Vec<String> = m
        .box_domain()
        .lo
        .iter()
        .zip(&m.box_domain().hi)
        .map(|(a, b)| format!("{a},{b}"))
        .collect();
    writeln!(
        w,
        "QCGRID v1 n={} res={} box={}",
        m.dim(),
        res.join(","),
        box_.join(";")
    )?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Load a sampled mapping from a QCGRID file.
pub fn read_qcgrid(path: &Path) -> Result<GridMapping, FieldError> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let header = header.trim_end();
    let mut n: Option<usize> = None;
    let mut res: Option<Vec<usize>> = None;
    let mut box_: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut words = header.split_whitespace();
    let (magic, version) = (words.next(), words.next());
    if magic != Some("QCGRID") || version != Some("v1") {
        return Err(FieldError::Format(format!(
            "expected 'QCGRID v1' header, got '{header}'"
        )));
    }
    for word in words {
        let (key, value) = word
            .split_once('=')
            .ok_or_else(|| FieldError::Format(format!("malformed header field '{word}'")))?;
        match key {
            "n" => {
                n = Some(value.parse().map_err(|_| {
                    FieldError::Format(format!("bad dimension '{value}'"))
                })?)
            }
            "res" => {
                let parsed: Result<Vec<usize>, _> = value.split(',').map(str::parse).collect();
                res = Some(parsed.map_err(|_| {
                    FieldError::Format(format!("bad resolution list '{value}'"))
                })?);
            }
            "box" => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for axis in value.split(';') {
                    let (a, b) = axis.split_once(',').ok_or_else(|| {
                        FieldError::Format(format!("bad box interval '{axis}'"))
                    })?;
                    lo.push(a.parse().map_err(|_| {
                        FieldError::Format(format!("bad box bound '{a}'"))
                    })?);
                    hi.push(b.parse().map_err(|_| {
                        FieldError::Format(format!("bad box bound '{b}'"))
                    })?);
                }
                box_ = Some((lo, hi));
            }
            other => {
                return Err(FieldError::Format(format!("unknown header field '{other}'")))
            }
        }
    }
    let n = n.ok_or_else(|| FieldError::Format("missing n=".into()))?;
    let res = res.ok_or_else(|| FieldError::Format("missing res=".into()))?;
    let (lo, hi) = box_.ok_or_else(|| FieldError::Format("missing box=".into()))?;
    if res.len() != n || lo.len() != n {
        return Err(FieldError::Format(
            "dimension does not match res/box lists".into(),
        ));
    }
    let nodes: usize = res.iter().map(|r| r + 1).product();
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    let expected = nodes * n * 8;
    if raw.len() != expected {
        return Err(FieldError::Format(format!(
            "expected {expected} bytes of node data, got {}",
            raw.len()
        )));
    }
    let values: Vec<f64> = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridMapping::new(BoxDomain::new(lo, hi)?, res, MapSource::Sampled(values))
}

/// One row per cell: `index,J,op_norm,K,P`.
pub fn field_to_csv(field: &super::DilatationField) -> String {
    let mut out = String::from("index,J,op_norm,K,P\n");
    for cell in 0..field.cell_count() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            cell,
            csv_f64(field.jac_dets[cell]),
            csv_f64(field.op_norms[cell]),
            csv_f64(field.ks[cell]),
            csv_f64(field.ps[cell]),
        ));
    }
    out
}

pub(crate) fn csv_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{:.16e}", x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{dilatation_field, GridMapping};

    #[test]
    fn qcgrid_round_trip() {
        let m = GridMapping::affine_stretch(3.0, 3).unwrap();
        let dir = std::env::temp_dir().join("distortion-lab-test-io");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("stretch.qcgrid");
        write_qcgrid(&path, &m).unwrap();
        let back = read_qcgrid(&path).unwrap();
        assert_eq!(back.dim(), 3);
        assert_eq!(back.resolution(), m.resolution());
        let x = [0.3, 0.5, 0.7];
        let a = m.evaluate(&x);
        let b = back.evaluate(&x);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn header_errors_are_reported() {
        let dir = std::env::temp_dir().join("distortion-lab-test-io");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.qcgrid");
        std::fs::write(&path, b"NOTAGRID v1 n=3\n").unwrap();
        assert!(matches!(read_qcgrid(&path), Err(FieldError::Format(_))));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_has_a_row_per_cell() {
        let m = GridMapping::affine_stretch(2.0, 2).unwrap();
        let f = dilatation_field(&m);
        let csv = field_to_csv(&f);
        assert_eq!(csv.lines().count(), 1 + f.cell_count());
        assert!(csv.starts_with("index,J,op_norm,K,P\n"));
    }
}
