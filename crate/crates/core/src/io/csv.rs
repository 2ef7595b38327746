use std::fs;
use std::path::Path;

use crate::dynamics::{Mover, Trajectory};
use crate::{Error, Result};

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn mover_label(m: Mover) -> String {
    match m {
        Mover::Player(i) => format!("player_{}", i + 1),
        Mover::All => "all".to_string(),
        Mover::Idle => "idle".to_string(),
    }
}

fn parse_mover(s: &str) -> Option<Mover> {
    match s {
        "all" => Some(Mover::All),
        "idle" => Some(Mover::Idle),
        _ => s.strip_prefix("player_")?.parse::<usize>().ok().filter(|&i| i > 0).map(|i| Mover::Player(i - 1)),
    }
}

fn header(n: usize) -> Vec<String> {
    std::iter::once("t".to_string())
        .chain((1..=n).map(|i| format!("player_{i}")))
        .chain(["w_t", "k_t", "mover"].map(String::from))
        .collect()
}

fn write_rows<A: Clone, W: std::io::Write>(out: W, traj: &Trajectory<A>) -> Result<()> {
    let mut w = ::csv::Writer::from_writer(out);
    w.write_record(header(traj.player_count())).map_err(csv_error)?;
    for (t, p) in traj.points.iter().enumerate() {
        let mut rec: Vec<String> = std::iter::once(t.to_string()).chain(p.iter().map(|v| float(*v))).collect();
        match traj.steps.get(t) {
            Some(s) => rec.extend([float(s.w), s.k.map(float).unwrap_or_default(), mover_label(s.mover)]),
            None => rec.extend([String::new(), String::new(), String::new()]),
        }
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: ::csv::Error) -> Error {
    match e.into_kind() {
        ::csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Renders `t,player_1,…,player_N,w_t,k_t,mover`; row t carries the
/// diagnostics of the step leaving x^t, so the final row has empty diagnostics.
pub fn trajectory_csv<A: Clone>(traj: &Trajectory<A>) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, traj).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn write_trajectory_csv<A: Clone>(path: &Path, traj: &Trajectory<A>) -> Result<()> {
    write_rows(std::io::BufWriter::new(fs::File::create(path)?), traj)
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t: usize,
    pub point: Vec<f64>,
    pub w: Option<f64>,
    pub k: Option<f64>,
    pub mover: Option<Mover>,
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let err = |line: u64, message: String| Error::Parse { path: path.to_path_buf(), line: line as usize, column: 0, message };
    let mut r = ::csv::Reader::from_path(path).map_err(|e| err(0, e.to_string()))?;
    let cols: Vec<String> = r.headers().map_err(|e| err(1, e.to_string()))?.iter().map(String::from).collect();
    if cols.len() < 4 || cols != header(cols.len() - 4) {
        return Err(err(1, format!("unexpected header {cols:?}")));
    }
    let n = cols.len() - 4;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(line, format!("{s:?}: {e}")));
        let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
        let point = (1..=n).map(|j| num(&rec[j])).collect::<Result<Vec<_>>>()?;
        let mover = match &rec[n + 3] {
            "" => None,
            s => Some(parse_mover(s).ok_or_else(|| err(line, format!("unknown mover {s:?}")))?),
        };
        rows.push(CsvRow {
            t: rec[0].parse().map_err(|e| err(line, format!("{:?}: {e}", &rec[0])))?,
            point,
            w: opt(&rec[n + 1])?,
            k: opt(&rec[n + 2])?,
            mover,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{StepRecord, Termination};

    fn sample() -> Trajectory<f64> {
        let points = vec![vec![0.1, 1.0 / 3.0], vec![std::f64::consts::PI, -2.5e-300], vec![7.0, 8.0]];
        Trajectory {
            states: points.clone(),
            points,
            steps: vec![
                StepRecord { mover: Mover::Player(1), w: 0.1 + 0.2, k: Some(0.0), improvement: 1.0 },
                StepRecord { mover: Mover::All, w: 1e-17, k: None, improvement: 0.0 },
            ],
            termination: Termination::Budget,
        }
    }

    #[test]
    fn layout() {
        let csv = trajectory_csv(&sample());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,player_1,player_2,w_t,k_t,mover");
        assert!(lines[1].ends_with(",player_2"));
        assert!(lines[2].ends_with(",,all"));
        assert!(lines[3].ends_with(",,,"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let traj = sample();
        write_trajectory_csv(&path, &traj).unwrap();
        let rows = read_trajectory_csv(&path).unwrap();
        for (row, p) in rows.iter().zip(&traj.points) {
            assert_eq!(&row.point, p);
        }
        assert_eq!(rows[0].w, Some(0.1 + 0.2));
        assert_eq!(rows[0].mover, Some(Mover::Player(1)));
        assert_eq!(rows[1].k, None);
        assert_eq!(rows[2].mover, None);
    }
}
