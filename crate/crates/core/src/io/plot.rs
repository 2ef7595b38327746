use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const CIRCLE_SEGMENTS: usize = 256;

/// Closed polyline of `CIRCLE_SEGMENTS` segments (first point repeated at the end).
pub fn circle_polyline(center: &[f64], radius: f64) -> Vec<[f64; 2]> {
    (0..=CIRCLE_SEGMENTS)
        .map(|k| {
            let th = std::f64::consts::TAU * (k % CIRCLE_SEGMENTS) as f64 / CIRCLE_SEGMENTS as f64;
            [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
        })
        .collect()
}

/// Files written for one view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotFiles {
    pub view: String,
    pub from_step: usize,
    pub trajectories: Vec<PathBuf>,
    pub circle: PathBuf,
}

fn points_text(rows: impl Iterator<Item = (usize, Vec<f64>)>) -> String {
    let mut out = String::new();
    for (t, p) in rows {
        let _ = write!(out, "{t}");
        for v in p {
            let _ = write!(out, " {v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Writes `<view>/<label>.dat` (rows `t x y …` with t ≥ `from_step`) for every
/// trajectory and `<view>/circle.dat` for each view; the full view starts at 0.
pub fn emit_plot_data(
    dir: &Path,
    trajectories: &[(String, Vec<Vec<f64>>)],
    center: &[f64],
    radius: f64,
    tail_from: usize,
) -> Result<Vec<PlotFiles>> {
    if trajectories.is_empty() {
        return Err(Error::domain("plot data needs at least one trajectory"));
    }
    if center.len() != 2 {
        return Err(Error::domain("the trap circle is drawn in two dimensions"));
    }
    let circle: String = circle_polyline(center, radius).iter().map(|[x, y]| format!("{x:.16e} {y:.16e}\n")).collect();
    let mut out = Vec::new();
    for (view, from) in [("full", 0), ("tail", tail_from)] {
        let vdir = dir.join(view);
        fs::create_dir_all(&vdir)?;
        let mut files = Vec::new();
        for (label, points) in trajectories {
            let path = vdir.join(format!("{label}.dat"));
            fs::write(&path, points_text(points.iter().cloned().enumerate().skip(from)))?;
            files.push(path);
        }
        let cpath = vdir.join("circle.dat");
        fs::write(&cpath, &circle)?;
        out.push(PlotFiles { view: view.to_string(), from_step: from, trajectories: files, circle: cpath });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_points_lie_on_the_circle() {
        let c = [100.0 / 3.0, 400.0 / 3.0];
        let pts = circle_polyline(&c, 2.4);
        assert_eq!(pts.len(), CIRCLE_SEGMENTS + 1);
        assert_eq!(pts[0], pts[CIRCLE_SEGMENTS]);
        for p in pts {
            assert!(((p[0] - c[0]).hypot(p[1] - c[1]) - 2.4).abs() < 1e-9);
        }
    }

    #[test]
    fn views_slice_rows() {
        let dir = tempfile::tempdir().unwrap();
        let traj: Vec<Vec<f64>> = (0..10).map(|t| vec![t as f64, 1.0]).collect();
        let constant = vec![vec![2.0, 3.0]; 4];
        let files = emit_plot_data(dir.path(), &[("a".into(), traj), ("b".into(), constant)], &[0.0, 0.0], 1.0, 7).unwrap();
        let tail = fs::read_to_string(&files[1].trajectories[0]).unwrap();
        let ts: Vec<usize> = tail.lines().map(|l| l.split(' ').next().unwrap().parse().unwrap()).collect();
        assert_eq!(ts, vec![7, 8, 9]);
        let full = fs::read_to_string(&files[0].trajectories[1]).unwrap();
        let rows: Vec<&str> = full.lines().map(|l| l.split_once(' ').unwrap().1).collect();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| *r == rows[0]));
        assert!(emit_plot_data(dir.path(), &[], &[0.0, 0.0], 1.0, 7).is_err());
    }
}
