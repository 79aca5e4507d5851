//! CSV writers and readers for trajectories, spectra and sweep records.
//!
//! Floating-point columns are written with 12 significant digits.

use std::io::Write;
use std::path::Path;

use crate::analysis::{Algorithm, ScalingRecord};
use crate::error::{Error, Result};
use crate::evolution::TrajectorySample;
use crate::spectrum::SpectrumProfile;

/// `x` with 12 significant digits in scientific notation.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Creates or truncates `path` and writes `contents`.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_f64(path: &Path, field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("{}: '{field}' is not a number", path.display())))
}

/// `t,s,p_0,...,p_{N-1}`.
pub fn trajectory_csv(samples: &[TrajectorySample]) -> String {
    let dim = samples.first().map_or(0, |s| s.probabilities.len());
    let mut out = String::from("t,s");
    for i in 0..dim {
        out.push_str(&format!(",p_{i}"));
    }
    out.push('\n');
    for sample in samples {
        out.push_str(&sig12(sample.t));
        out.push(',');
        out.push_str(&sig12(sample.s));
        for p in &sample.probabilities {
            out.push(',');
            out.push_str(&sig12(*p));
        }
        out.push('\n');
    }
    out
}

/// Long format `t,s,index,probability`, one row per basis state and sample.
pub fn trajectory_long_csv(samples: &[TrajectorySample]) -> String {
    let mut out = String::from("t,s,index,probability\n");
    for sample in samples {
        for (i, p) in sample.probabilities.iter().enumerate() {
            out.push_str(&format!("{},{},{i},{}\n", sig12(sample.t), sig12(sample.s), sig12(*p)));
        }
    }
    out
}

pub fn write_trajectory(path: impl AsRef<Path>, samples: &[TrajectorySample]) -> Result<()> {
    write_file(path.as_ref(), &trajectory_csv(samples))
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Vec<TrajectorySample>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut samples = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err(path))?;
        let fields: Vec<f64> = row.iter().map(|f| parse_f64(path, f)).collect::<Result<_>>()?;
        if fields.len() < 3 {
            return Err(Error::Validation(format!("{}: short trajectory row", path.display())));
        }
        samples.push(TrajectorySample {
            t: fields[0],
            s: fields[1],
            probabilities: fields[2..].to_vec(),
        });
    }
    Ok(samples)
}

/// `s,E_0,...,E_{k-1}`.
pub fn spectrum_csv(profile: &SpectrumProfile) -> String {
    let k = profile.levels.first().map_or(0, Vec::len);
    let mut out = String::from("s");
    for i in 0..k {
        out.push_str(&format!(",E_{i}"));
    }
    out.push('\n');
    for (s, levels) in profile.s_grid.iter().zip(&profile.levels) {
        out.push_str(&sig12(*s));
        for e in levels {
            out.push(',');
            out.push_str(&sig12(*e));
        }
        out.push('\n');
    }
    out
}

pub fn write_spectrum(path: impl AsRef<Path>, profile: &SpectrumProfile) -> Result<()> {
    write_file(path.as_ref(), &spectrum_csv(profile))
}

/// Grid and levels of a spectrum CSV.
pub fn read_spectrum(path: impl AsRef<Path>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut grid = Vec::new();
    let mut levels = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err(path))?;
        let fields: Vec<f64> = row.iter().map(|f| parse_f64(path, f)).collect::<Result<_>>()?;
        if fields.len() < 2 {
            return Err(Error::Validation(format!("{}: short spectrum row", path.display())));
        }
        grid.push(fields[0]);
        levels.push(fields[1..].to_vec());
    }
    Ok((grid, levels))
}

pub const SCALING_HEADER: &str = "algorithm,n,instance,seed,T_star,success_prob,steps";

pub fn scaling_row(r: &ScalingRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.algorithm,
        r.n,
        r.instance,
        r.seed,
        sig12(r.t_star),
        sig12(r.success_probability),
        r.steps
    )
}

pub fn scaling_csv(records: &[ScalingRecord]) -> String {
    let mut out = String::from(SCALING_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&scaling_row(r));
        out.push('\n');
    }
    out
}

pub fn write_scaling(path: impl AsRef<Path>, records: &[ScalingRecord]) -> Result<()> {
    write_file(path.as_ref(), &scaling_csv(records))
}

pub fn read_scaling(path: impl AsRef<Path>) -> Result<Vec<ScalingRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let bad = |what: &str| Error::Validation(format!("{}: bad {what}", path.display()));
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err(path))?;
        if row.len() != 7 {
            return Err(bad("row width"));
        }
        records.push(ScalingRecord {
            algorithm: row[0].parse::<Algorithm>().map_err(|_| bad("algorithm"))?,
            n: row[1].parse().map_err(|_| bad("n"))?,
            instance: row[2].parse().map_err(|_| bad("instance"))?,
            seed: row[3].parse().map_err(|_| bad("seed"))?,
            t_star: parse_f64(path, &row[4])?,
            success_probability: parse_f64(path, &row[5])?,
            steps: row[6].parse().map_err(|_| bad("steps"))?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_has_twelve_digits() {
        assert_eq!(sig12(0.125), "1.25000000000e-1");
        assert_eq!(sig12(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(sig12(0.0), "0.00000000000e0");
    }

    #[test]
    fn trajectory_round_trip() {
        let samples = vec![
            TrajectorySample {
                t: 0.0,
                s: 0.0,
                probabilities: vec![0.5, 0.5],
            },
            TrajectorySample {
                t: 1.5,
                s: 1.0,
                probabilities: vec![0.25, 0.75],
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        write_trajectory(&path, &samples).unwrap();
        assert_eq!(read_trajectory(&path).unwrap(), samples);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,s,p_0,p_1\n"));
        assert_eq!(trajectory_long_csv(&samples).lines().count(), 5);
    }

    #[test]
    fn scaling_round_trip() {
        let records = vec![ScalingRecord {
            algorithm: Algorithm::BitSum,
            n: 5,
            instance: 3,
            seed: 1234567890123,
            t_star: 12.5,
            success_probability: 0.1234,
            steps: 99,
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_scaling(&path, &records).unwrap();
        assert_eq!(read_scaling(&path).unwrap(), records);
    }
}
