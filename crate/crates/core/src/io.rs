//! CSV persistence for fields and trajectories.
//!
//! Field file: header `# n_points=<n> half_width=<L>`, then one `x,re,im`
//! row per grid point with 17-significant-digit formatting, which round-trips
//! f64 bit-exactly. A trajectory is a directory of `t_<index>.csv` files plus
//! a `times.csv` manifest of `index,time` rows.

use crate::field::Field;
use crate::grid::Grid1D;
use crate::trajectory::Trajectory;
use crate::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

fn fmt_g17(x: f64) -> String {
    // %.17g equivalent: shortest-of-17-significant-digits scientific form
    format!("{:e}", PrecisionWrap(x))
}

struct PrecisionWrap(f64);

impl std::fmt::LowerExp for PrecisionWrap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

pub fn field_to_string(f: &Field) -> String {
    let grid = f.grid();
    let mut out = String::with_capacity(64 * grid.n_points());
    let _ = writeln!(
        out,
        "# n_points={} half_width={}",
        grid.n_points(),
        fmt_g17(grid.half_width())
    );
    for (j, v) in f.values().iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", fmt_g17(grid.x(j)), fmt_g17(v.re), fmt_g17(v.im));
    }
    out
}

pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, field_to_string(f))?;
    Ok(())
}

pub fn field_from_string(text: &str) -> Result<Field> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty field file".into()))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("missing '#' header".into()))?
        .trim();
    let mut n_points: Option<usize> = None;
    let mut half_width: Option<f64> = None;
    for tok in header.split_whitespace() {
        match tok.split_once('=') {
            Some(("n_points", v)) => {
                n_points = Some(v.parse().map_err(|_| Error::Format(format!("bad n_points '{v}'")))?)
            }
            Some(("half_width", v)) => {
                half_width = Some(v.parse().map_err(|_| Error::Format(format!("bad half_width '{v}'")))?)
            }
            _ => return Err(Error::Format(format!("unknown header token '{tok}'"))),
        }
    }
    let n = n_points.ok_or_else(|| Error::Format("header lacks n_points".into()))?;
    let l = half_width.ok_or_else(|| Error::Format("header lacks half_width".into()))?;
    let grid = Grid1D::new(n, l)?;

    let mut values = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (x, re, im) = match (cols.next(), cols.next(), cols.next(), cols.next()) {
            (Some(x), Some(re), Some(im), None) => (x, re, im),
            _ => return Err(Error::Format(format!("row {i}: expected 'x,re,im'"))),
        };
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("row {i}: bad {what} '{s}'")))
        };
        let x: f64 = parse(x, "x")?;
        let re = parse(re, "re")?;
        let im = parse(im, "im")?;
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::Format(format!("row {i}: non-finite sample")));
        }
        let j = values.len();
        if j < n {
            let expect = grid.x(j);
            if (x - expect).abs() > grid.dx() * 1e-6 {
                return Err(Error::Format(format!(
                    "row {i}: x={x} does not match grid point {expect}"
                )));
            }
        }
        values.push(Complex64::new(re, im));
    }
    if values.len() != n {
        return Err(Error::Format(format!(
            "header says {n} points but file carries {}",
            values.len()
        )));
    }
    Field::new(grid, values)
}

pub fn read_field(path: &Path) -> Result<Field> {
    field_from_string(&fs::read_to_string(path)?)
}

pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::new();
    for (i, (t, state)) in traj.times().iter().zip(traj.states()).enumerate() {
        let _ = writeln!(manifest, "{},{}", i, fmt_g17(*t));
        write_field(&dir.join(format!("t_{i}.csv")), state)?;
    }
    fs::write(dir.join("times.csv"), manifest)?;
    Ok(())
}

pub fn read_trajectory(dir: &Path) -> Result<Trajectory> {
    let manifest = fs::read_to_string(dir.join("times.csv"))?;
    let mut times = Vec::new();
    let mut states = Vec::new();
    for line in manifest.lines().filter(|l| !l.trim().is_empty()) {
        let (idx, t) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("times.csv: bad row '{line}'")))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("times.csv: bad index '{idx}'")))?;
        let t: f64 = t
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("times.csv: bad time '{t}'")))?;
        if idx != times.len() {
            return Err(Error::Format(format!(
                "times.csv: index {idx} out of order"
            )));
        }
        times.push(t);
        states.push(read_field(&dir.join(format!("t_{idx}.csv")))?);
    }
    Trajectory::new(times, states)
}

/// Grid metadata for embedding in JSON reports.
pub fn grid_meta(grid: &Arc<Grid1D>) -> serde_json::Value {
    serde_json::json!({
        "n_points": grid.n_points(),
        "half_width": grid.half_width(),
        "dx": grid.dx(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::seeded_field;

    #[test]
    fn round_trip_is_bit_identical() {
        let g = Grid1D::new(128, 6.0).unwrap();
        let f = seeded_field(&g, 11);
        let text = field_to_string(&f);
        let back = field_from_string(&text).unwrap();
        assert!(back.grid().same_grid(f.grid()));
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn nan_entry_rejected() {
        let g = Grid1D::new(8, 1.0).unwrap();
        let f = Field::zero(&g);
        let text = field_to_string(&f).replace("0e0,0e0\n", "NaN,0e0\n");
        assert!(field_from_string(&text).is_err());
    }

    #[test]
    fn row_count_mismatch_rejected() {
        let g = Grid1D::new(8, 1.0).unwrap();
        let f = Field::zero(&g);
        let text = field_to_string(&f);
        let truncated: String = text.lines().take(8).map(|l| format!("{l}\n")).collect();
        assert!(field_from_string(&truncated).is_err());
    }

    #[test]
    fn trajectory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid1D::new(64, 4.0).unwrap();
        let times = vec![0.0, 0.5, 1.25];
        let states: Vec<Field> = (0..3).map(|i| seeded_field(&g, i)).collect();
        let traj = Trajectory::new(times.clone(), states).unwrap();
        write_trajectory(dir.path(), &traj).unwrap();
        let back = read_trajectory(dir.path()).unwrap();
        assert_eq!(back.times(), traj.times());
        for (a, b) in back.states().iter().zip(traj.states()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x, y);
            }
        }
    }
}
