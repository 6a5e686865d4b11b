//! CSV formats for ensembles, summary statistics and replica dumps.
//!
//! Floats are written with `f64`'s shortest round-trip representation, so
//! reading a file back reproduces the values exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::ensemble::LineEnsemble;
use crate::error::{Error, Result};
use crate::lattice::LatticeBridgeSystem;
use crate::lpp::LppSample;

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("row {line}: missing column {i}")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {line}: cannot parse {raw:?}")))
}

/// Rows `line_index,time,value`, line by line in time order.
pub fn write_ensemble<W: Write>(ens: &LineEnsemble, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["line_index", "time", "value"]).map_err(csv_err)?;
    for i in 0..ens.k() {
        for (j, v) in ens.line(i).iter().enumerate() {
            w.write_record(&[i.to_string(), ens.time(j).to_string(), v.to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_ensemble`]. Lines must be listed contiguously and share
/// one uniform grid.
pub fn read_ensemble<R: Read>(input: R) -> Result<LineEnsemble> {
    let mut r = csv::Reader::from_reader(input);
    let mut lines: Vec<Vec<f64>> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = row as u64 + 2;
        let i: usize = field(&rec, 0, row)?;
        let t: f64 = field(&rec, 1, row)?;
        let v: f64 = field(&rec, 2, row)?;
        if i == lines.len() {
            lines.push(Vec::new());
        } else if i + 1 != lines.len() {
            return Err(Error::Parse(format!("row {row}: line {i} out of order")));
        }
        if i == 0 {
            times.push(t);
        }
        let line = lines.last_mut().expect("pushed above");
        if times.get(line.len()) != Some(&t) {
            return Err(Error::Parse(format!("row {row}: line {i} is off the shared grid")));
        }
        line.push(v);
    }
    let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
        return Err(Error::Parse("no ensemble rows".into()));
    };
    let ens = LineEnsemble::new(t0, t1, lines).map_err(|e| Error::Parse(e.to_string()))?;
    let uniform = times
        .iter()
        .enumerate()
        .all(|(j, &t)| (t - ens.time(j)).abs() <= 1e-9 * (1.0 + t.abs()));
    if !uniform {
        return Err(Error::Parse("ensemble grid is not uniform".into()));
    }
    Ok(ens)
}

pub fn write_ensemble_file(ens: &LineEnsemble, path: &Path) -> Result<()> {
    write_ensemble(ens, File::create(path)?)
}

pub fn read_ensemble_file(path: &Path) -> Result<LineEnsemble> {
    read_ensemble(File::open(path)?)
}

/// A lattice snapshot in ensemble format, one row per lattice time.
pub fn write_lattice_snapshot<W: Write>(sys: &LatticeBridgeSystem, out: W) -> Result<()> {
    write_ensemble(&LineEnsemble::from_lattice(sys, sys.steps())?, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatRecord {
    pub statistic: String,
    pub value: f64,
    pub stderr: f64,
    pub n_trials: u64,
    pub seed: u64,
}

pub fn write_stats<W: Write>(records: &[StatRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["statistic", "value", "stderr", "n_trials", "seed"])
        .map_err(csv_err)?;
    for r in records {
        w.write_record(&[
            r.statistic.clone(),
            r.value.to_string(),
            r.stderr.to_string(),
            r.n_trials.to_string(),
            r.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_lpp_samples<W: Write>(samples: &[LppSample], n: usize, q: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replica", "n", "q", "L_n_0", "H_n_0", "K_n", "K_hat"])
        .map_err(csv_err)?;
    for (i, s) in samples.iter().enumerate() {
        w.write_record(&[
            i.to_string(),
            n.to_string(),
            q.to_string(),
            s.l_n_0.to_string(),
            s.h_n_0.to_string(),
            s.k_n.to_string(),
            s.k_hat.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_oracle_samples<W: Write>(samples: &[f64], s: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replica", "s", "lambda_scaled"]).map_err(csv_err)?;
    for (i, x) in samples.iter().enumerate() {
        w.write_record(&[i.to_string(), s.to_string(), x.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensemble_round_trip_is_exact() {
        let ens = LineEnsemble::new(
            -1.0,
            1.0,
            vec![
                vec![0.1, 1.0 / 3.0, -2e-17, 0.0, 7.5],
                vec![-1.0, -0.7, -0.3, -1e300, -9.0],
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_ensemble(&ens, &mut buf).unwrap();
        let back = read_ensemble(buf.as_slice()).unwrap();
        assert_eq!(back, ens);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let bad = "line_index,time,value\n0,0,1\n0,1,x\n";
        assert!(matches!(read_ensemble(bad.as_bytes()), Err(Error::Parse(_))));
        let jumbled = "line_index,time,value\n1,0,1\n";
        assert!(read_ensemble(jumbled.as_bytes()).is_err());
        let ragged = "line_index,time,value\n0,0,1\n0,1,1\n1,0,0\n";
        assert!(read_ensemble(ragged.as_bytes()).is_err());
        assert!(read_ensemble("line_index,time,value\n".as_bytes()).is_err());
    }

    #[test]
    fn stats_header() {
        let mut buf = Vec::new();
        let rec = StatRecord {
            statistic: "p".into(),
            value: 0.5,
            stderr: 0.01,
            n_trials: 100,
            seed: 7,
        };
        write_stats(&[rec], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "statistic,value,stderr,n_trials,seed\np,0.5,0.01,100,7\n"
        );
    }
}
