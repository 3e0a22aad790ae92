//! CSV, OBJ and JSON artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use super::IoError;
use crate::calculus::GridField;
use crate::clift::MeshPatch;
use crate::grid::Grid;

/// Positions read back from CSV must match the grid to this tolerance.
const POSITION_TOL: f64 = 1e-12;

fn put(path: &Path, text: String) -> Result<(), IoError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// `x,y,value` rows for every slot (interior nodes, then boundary hits),
/// floats in 17-significant-digit scientific notation.
pub fn field_csv(field: &GridField) -> String {
    let grid = field.grid();
    let mut out = String::from("x,y,value\n");
    for (s, v) in field.values().iter().enumerate() {
        let (x, y) = grid.slot_position(s);
        let _ = writeln!(out, "{x:.16e},{y:.16e},{v:.16e}");
    }
    out
}

pub fn write_field_csv(path: &Path, field: &GridField) -> Result<(), IoError> {
    put(path, field_csv(field))
}

/// Reads a field written by [`write_field_csv`] back onto `grid`.
pub fn read_field_csv(path: &Path, grid: &Arc<Grid>) -> Result<GridField, IoError> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::with_capacity(grid.value_count());
    for (n, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| IoError::Format(format!("{}: line {}: not numeric", path.display(), n + 1)))?;
        let [x, y, v] = cols[..] else {
            return Err(IoError::Format(format!("{}: line {}: expected 3 columns", path.display(), n + 1)));
        };
        let s = values.len();
        if s >= grid.value_count() {
            return Err(IoError::Format(format!("{}: more rows than grid slots", path.display())));
        }
        let (gx, gy) = grid.slot_position(s);
        if (gx - x).abs() > POSITION_TOL || (gy - y).abs() > POSITION_TOL {
            return Err(IoError::Format(format!(
                "{}: row {} at ({x}, {y}) does not match the grid",
                path.display(),
                n + 1
            )));
        }
        values.push(v);
    }
    if values.len() != grid.value_count() {
        return Err(IoError::Format(format!(
            "{}: {} rows, grid has {} slots",
            path.display(),
            values.len(),
            grid.value_count()
        )));
    }
    Ok(GridField::new(grid.clone(), values))
}

/// Wavefront OBJ of a patch: one vertex per valid point, projected onto the
/// three chosen real coordinates, and quads over axes 0 and 1 for every
/// index along axis 2.
pub fn mesh_obj(patch: &MeshPatch, projection: [usize; 3]) -> String {
    let dims = patch.dims();
    let mut vertex_id = vec![0usize; dims.iter().product()];
    let mut out = String::new();
    for (next, (i, p)) in (1..).zip(patch.valid_points()) {
        let r = p.reals();
        let _ = writeln!(
            out,
            "v {:.16e} {:.16e} {:.16e}",
            r[projection[0]], r[projection[1]], r[projection[2]]
        );
        vertex_id[patch.index(i)] = next;
    }
    for i0 in 0..dims[0].saturating_sub(1) {
        for i1 in 0..dims[1].saturating_sub(1) {
            for i2 in 0..dims[2] {
                let corners = [[i0, i1, i2], [i0 + 1, i1, i2], [i0 + 1, i1 + 1, i2], [i0, i1 + 1, i2]];
                let ids: Vec<usize> = corners.iter().map(|c| vertex_id[patch.index(*c)]).collect();
                if ids.iter().all(|&v| v > 0) {
                    let _ = writeln!(out, "f {} {} {} {}", ids[0], ids[1], ids[2], ids[3]);
                }
            }
        }
    }
    out
}

pub fn write_mesh_obj(path: &Path, patch: &MeshPatch, projection: [usize; 3]) -> Result<(), IoError> {
    put(path, mesh_obj(patch, projection))
}

/// Indices and all six real coordinates of every valid point.
pub fn mesh_csv(patch: &MeshPatch) -> String {
    let mut out = String::from("i0,i1,i2,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3\n");
    for (i, p) in patch.valid_points() {
        let r = p.reals();
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            i[0], i[1], i[2], r[0], r[1], r[2], r[3], r[4], r[5]
        );
    }
    out
}

pub fn write_mesh_csv(path: &Path, patch: &MeshPatch) -> Result<(), IoError> {
    put(path, mesh_csv(patch))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| IoError::Format(e.to_string()))?;
    text.push('\n');
    put(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clift::{hl_patch, C3Point};
    use crate::domain::{make_domain, DomainParams};
    use crate::grid::build_grid;
    use num_complex::Complex64;

    #[test]
    fn field_csv_round_trips_exactly() {
        let g = build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), 0.1).unwrap();
        let f = GridField::from_fn(&g, |x, y| (3.0 * x).sin() / 7.0 + y.exp());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_field_csv(&path, &f).unwrap();
        let back = read_field_csv(&path, &g).unwrap();
        assert_eq!(back.values(), f.values());
        let other = build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), 0.125).unwrap();
        assert!(read_field_csv(&path, &other).is_err());
    }

    #[test]
    fn obj_counts() {
        let patch = hl_patch(0.5, (0.1, 1.0), [3, 4, 5]).unwrap();
        let obj = mesh_obj(&patch, [0, 1, 4]);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 60);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 3 * 5);
        let csv = mesh_csv(&patch);
        assert_eq!(csv.lines().count(), 61);
    }

    #[test]
    fn invalid_points_are_dropped() {
        let patch = MeshPatch::from_fn([2, 2, 1], [0.0; 3], [1.0; 3], [false; 3], |a, b, _| {
            (a + b < 2.0).then(|| C3Point::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0), Complex64::new(0.0, 0.0)))
        })
        .unwrap();
        let obj = mesh_obj(&patch, [0, 2, 4]);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 0);
    }
}
