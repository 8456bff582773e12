use std::io::Write;
use std::path::Path;
use std::thread;

use super::experiment::write_with;
use super::{build_objective, io_err, HarnessError, RunConfig};
use crate::objective::ObjectiveFunction;

/// Objective values on a rectangular grid over two coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshGrid {
    pub axes: [usize; 2],
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// `values[i][j]` is the cost at `(axis1[i], axis2[j])`.
    pub values: Vec<Vec<f64>>,
}

impl MeshGrid {
    /// `axis1,axis2,value`, axis 1 outermost.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "axis1,axis2,value")?;
        for (a, row) in self.axis1.iter().zip(&self.values) {
            for (b, v) in self.axis2.iter().zip(row) {
                writeln!(w, "{a:?},{b:?},{v:?}")?;
            }
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Evaluates `objective` on a `resolution × resolution` grid spanning the box
/// along `axes`, other coordinates taken from `fixed`. Rows are computed on
/// worker threads; the result does not depend on the thread count.
pub fn compute_mesh(objective: &ObjectiveFunction, axes: [usize; 2], resolution: usize, fixed: &[f64]) -> MeshGrid {
    let b = objective.bounds();
    let axis1 = linspace(b.lower()[axes[0]], b.upper()[axes[0]], resolution);
    let axis2 = linspace(b.lower()[axes[1]], b.upper()[axes[1]], resolution);
    let row = |a: f64| -> Vec<f64> {
        axis2
            .iter()
            .map(|&v| {
                let mut x = fixed.to_vec();
                x[axes[0]] = a;
                x[axes[1]] = v;
                objective.evaluate(&x)
            })
            .collect()
    };
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(resolution);
    let chunk = resolution.div_ceil(workers);
    let values = thread::scope(|s| {
        let handles: Vec<_> = axis1
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(|&a| row(a)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("mesh worker panicked")).collect()
    });
    MeshGrid { axes, axis1, axis2, values }
}

/// Computes the grid described by `[mesh]` and writes `mesh.csv` into
/// `out_dir`.
pub fn export_mesh(config: &RunConfig, out_dir: &Path) -> Result<MeshGrid, HarnessError> {
    config.validate()?;
    let mesh = config.mesh.as_ref().ok_or_else(|| HarnessError::Validation {
        field: "mesh".into(),
        reason: "section is required for mesh export".into(),
    })?;
    let objective = build_objective(config)?;
    let b = objective.bounds();
    let fixed = mesh.fixed.clone().unwrap_or_else(|| {
        (0..b.dim()).map(|i| 0.5 * (b.lower()[i] + b.upper()[i])).collect()
    });
    let grid = compute_mesh(&objective, mesh.axes, mesh.resolution, &fixed);
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    write_with(&out_dir.join("mesh.csv"), |w| grid.write_csv(w))?;
    Ok(grid)
}
