//! CSV exchange formats for curves, histograms, interval unions and
//! discrete measures.
//!
//! Numbers are written with the shortest decimal text that parses back to
//! the same double, so a write/read cycle is lossless.

use std::io::{Read, Write};

use crate::cocycle::LyapunovCurve;
use crate::error::{Error, Result};
use crate::intervals::IntervalUnion;
use crate::potential::DiscreteMeasure;
use crate::spectrum::SpectralMeasure;

pub const CURVE_HEADER: [&str; 3] = ["E", "L", "stderr"];
pub const DOS_HEADER: [&str; 2] = ["bin_center", "weight"];
pub const INTERVALS_HEADER: [&str; 2] = ["l", "r"];
pub const MEASURE_HEADER: [&str; 3] = ["x", "w", "delta"];

/// Shortest round-trip decimal text; exponent notation for very small or
/// very large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn write_rows<W: Write, const N: usize>(out: W, header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_float(x)))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn read_rows<R: Read, const N: usize>(input: R, header: [&str; N]) -> Result<Vec<[f64; N]>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::MalformedCsv(format!(
            "expected header {}, found {}",
            header.join(","),
            found.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != N {
            return Err(Error::MalformedCsv(format!(
                "row {} has {} fields, expected {N}",
                line + 1,
                record.len()
            )));
        }
        let mut row = [0.0; N];
        for (slot, field) in row.iter_mut().zip(record.iter()) {
            *slot =
                field.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                    Error::MalformedCsv(format!("row {}: `{field}` is not a finite number", line + 1))
                })?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_curve<W: Write>(out: W, curve: &LyapunovCurve) -> Result<()> {
    let rows = (0..curve.len()).map(|i| [curve.grid[i], curve.values[i], curve.stderrs[i]]);
    write_rows(out, CURVE_HEADER, rows)
}

pub fn read_curve<R: Read>(input: R) -> Result<LyapunovCurve> {
    let rows = read_rows(input, CURVE_HEADER)?;
    LyapunovCurve::new(
        rows.iter().map(|r| r[0]).collect(),
        rows.iter().map(|r| r[1]).collect(),
        rows.iter().map(|r| r[2]).collect(),
    )
}

pub fn write_dos<W: Write>(out: W, dos: &SpectralMeasure) -> Result<()> {
    let rows = dos.centers().into_iter().zip(&dos.weights).map(|(c, &w)| [c, w]);
    write_rows(out, DOS_HEADER, rows)
}

/// Rebuilds a histogram from equally spaced bin centers.
pub fn read_dos<R: Read>(input: R) -> Result<SpectralMeasure> {
    let rows = read_rows(input, DOS_HEADER)?;
    if rows.len() < 2 {
        return Err(Error::MalformedCsv("a histogram needs at least two bins".into()));
    }
    let first = rows[0][0];
    let width = (rows[rows.len() - 1][0] - first) / (rows.len() - 1) as f64;
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::MalformedCsv("bin centers must increase".into()));
    }
    for (k, row) in rows.iter().enumerate() {
        if (row[0] - (first + k as f64 * width)).abs() > 1e-6 * width {
            return Err(Error::MalformedCsv(format!("bin {} is not equally spaced", k + 1)));
        }
    }
    let edges = (0..=rows.len()).map(|k| first + (k as f64 - 0.5) * width).collect();
    let weights = rows.iter().map(|r| r[1]).collect();
    SpectralMeasure::new(edges, weights, 0).map_err(|e| Error::MalformedCsv(e.to_string()))
}

pub fn write_intervals<W: Write>(out: W, set: &IntervalUnion) -> Result<()> {
    write_rows(out, INTERVALS_HEADER, set.intervals().iter().map(|&(l, r)| [l, r]))
}

pub fn read_intervals<R: Read>(input: R) -> Result<IntervalUnion> {
    let rows = read_rows(input, INTERVALS_HEADER)?;
    IntervalUnion::new(rows.iter().map(|r| (r[0], r[1])).collect())
}

pub fn write_measure<W: Write>(out: W, measure: &DiscreteMeasure) -> Result<()> {
    write_rows(out, MEASURE_HEADER, measure.iter().map(|(x, w, d)| [x, w, d]))
}

pub fn read_measure<R: Read>(input: R) -> Result<DiscreteMeasure> {
    let rows = read_rows(input, MEASURE_HEADER)?;
    DiscreteMeasure::new(
        rows.iter().map(|r| r[0]).collect(),
        rows.iter().map(|r| r[1]).collect(),
        rows.iter().map(|r| r[2]).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_band_prints_plainly() {
        let mut buf = Vec::new();
        write_intervals(&mut buf, &IntervalUnion::interval(1.0, 5.0).unwrap()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "l,r\n1,5\n");
    }

    #[test]
    fn float_text_round_trips() {
        for x in [0.1, -2.5e-300, 1e300, 1.0 / 3.0, 123456.789, -0.0, 5e-6, 3e16] {
            assert_eq!(format_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(format_float(1e-300), "1e-300");
    }

    #[test]
    fn measure_round_trip() {
        let m = DiscreteMeasure::new(vec![-1.0, 0.3, 2.0], vec![0.2, 0.3, 0.5], vec![0.1, 0.2, 1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        write_measure(&mut buf, &m).unwrap();
        assert_eq!(read_measure(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_intervals("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_intervals("l,r\n1,x\n".as_bytes()).is_err());
        assert!(read_intervals("l,r\n2,1\n".as_bytes()).is_err());
        assert!(read_intervals("l,r\n1,inf\n".as_bytes()).is_err());
        assert!(read_curve("E,L,stderr\n1,0,0\n0,0,0\n".as_bytes()).is_err());
        assert!(read_dos("bin_center,weight\n0,0.5\n1,0.25\n5,0.25\n".as_bytes()).is_err());
        assert!(read_dos("bin_center,weight\n0,0.5\n1,0.4\n".as_bytes()).is_err());
    }

    #[test]
    fn dos_round_trip_keeps_bins() {
        let edges = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
        let dos = SpectralMeasure::new(edges.clone(), vec![0.1, 0.4, 0.4, 0.1], 10).unwrap();
        let mut buf = Vec::new();
        write_dos(&mut buf, &dos).unwrap();
        let back = read_dos(buf.as_slice()).unwrap();
        assert_eq!(back.weights, dos.weights);
        for (a, b) in back.bin_edges.iter().zip(&edges) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
