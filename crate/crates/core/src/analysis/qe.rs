//! The 3×3 QE transform `[r′ g′ b′] = [r g b]·M` and its least-squares fit.
//!
//! Curves are treated as the columns of an `Nλ × 3` matrix `Q`; applying `M`
//! gives `Q·M`, so `r′ = M₁₁·r + M₂₁·g + M₃₁·b`. Fitting solves
//! `min ‖P·M − Y‖_F` for `n × 3` predicted (`P`) and measured (`Y`) channel
//! means, one column of `M` at a time, with a Householder QR of `P`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radiometry::SpectralDistribution;

/// Row-major 3×3 matrix; serializes as a nested JSON array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QeTransform {
    pub m: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct QeFit {
    pub transform: QeTransform,
    /// RMS of `P·M − Y` over all `3n` entries.
    pub residual_rms: f64,
}

impl QeTransform {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("QE transform entries must be finite".into()));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Crosstalk/gain transform calibrated for the reference device.
    pub fn reference() -> Self {
        Self {
            m: [[0.532, 0.0, 0.0], [0.06, 0.70, 0.0], [0.0, 0.36, 0.84]],
        }
    }

    /// Inverse matrix, if the determinant is not tiny.
    pub fn inverse(&self) -> Option<QeTransform> {
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
        let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(det.abs() > 1e-12 * scale.powi(3)) {
            return None;
        }
        let mut inv = [[0.0; 3]; 3];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                // Adjugate: inv[i][j] = C[j][i] / det.
                let (r0, r1) = others(j);
                let (c0, c1) = others(i);
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                *v = sign * cof(r0, r1, c0, c1) / det;
            }
        }
        Some(QeTransform { m: inv })
    }

    /// `[r g b]·M` applied sample by sample to raw values.
    pub fn apply_values(&self, q: [&[f64]; 3]) -> [Vec<f64>; 3] {
        let n = q[0].len();
        std::array::from_fn(|j| (0..n).map(|k| (0..3).map(|i| q[i][k] * self.m[i][j]).sum()).collect())
    }

    /// Transform three QE curves sharing a grid.
    pub fn apply(&self, qe: &[SpectralDistribution; 3]) -> Result<[SpectralDistribution; 3]> {
        let grid = *qe[0].grid();
        if qe.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        let out = self.apply_values([qe[0].values(), qe[1].values(), qe[2].values()]);
        let mut curves = Vec::with_capacity(3);
        for (c, values) in out.into_iter().enumerate() {
            // Round-off from inverse transforms can leave −1e-17 where the
            // exact answer is zero.
            let values = values
                .into_iter()
                .map(|v| if (-1e-12..0.0).contains(&v) { 0.0 } else { v })
                .collect();
            curves.push(
                SpectralDistribution::new(grid, values, qe[c].unit())
                    .map_err(|e| Error::InvalidSpectrum(format!("transformed channel {c}: {e}")))?,
            );
        }
        let [r, g, b]: [SpectralDistribution; 3] = curves.try_into().expect("three channels");
        Ok([r, g, b])
    }

    /// `P·M` for rows of channel means.
    pub fn predict(&self, rows: &[[f64; 3]]) -> Vec<[f64; 3]> {
        rows.iter()
            .map(|p| std::array::from_fn(|j| (0..3).map(|i| p[i] * self.m[i][j]).sum()))
            .collect()
    }

    pub fn residual_rms(&self, predicted: &[[f64; 3]], measured: &[[f64; 3]]) -> f64 {
        let fit = self.predict(predicted);
        let ss: f64 = fit
            .iter()
            .zip(measured)
            .flat_map(|(a, b)| (0..3).map(move |j| (a[j] - b[j]).powi(2)))
            .sum();
        (ss / (3 * predicted.len().max(1)) as f64).sqrt()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: QeTransform = serde_json::from_str(text)?;
        Self::new(t.m)
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Least-squares solution of `A·x ≈ b` for each right-hand side, via
/// Householder QR. `a` is row-major `n × k` with `n ≥ k`.
pub fn least_squares(a: &[Vec<f64>], rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let k = a.first().map_or(0, Vec::len);
    if k == 0 || n < k {
        return Err(Error::Degenerate(format!("need at least {k} rows, got {n}")));
    }
    let mut r: Vec<Vec<f64>> = a.to_vec();
    let mut ys: Vec<Vec<f64>> = rhs.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for j in 0..k {
        let norm = (j..n).map(|i| r[i][j] * r[i][j]).sum::<f64>().sqrt();
        if !(norm > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::Degenerate(format!(
                "predicted matrix is rank deficient (column {j})"
            )));
        }
        let alpha = if r[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| r[i][j]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for c in j..k {
            let d: f64 = (j..n).map(|i| v[i - j] * r[i][c]).sum::<f64>() * 2.0 / vv;
            for i in j..n {
                r[i][c] -= d * v[i - j];
            }
        }
        for y in &mut ys {
            let d: f64 = (j..n).map(|i| v[i - j] * y[i]).sum::<f64>() * 2.0 / vv;
            for i in j..n {
                y[i] -= d * v[i - j];
            }
        }
    }
    let diag_max = (0..k).fold(0.0f64, |m, j| m.max(r[j][j].abs()));
    if (0..k).any(|j| r[j][j].abs() <= 1e-10 * diag_max) {
        return Err(Error::Degenerate("predicted matrix is rank deficient".into()));
    }
    Ok(ys
        .iter()
        .map(|y| {
            let mut x = vec![0.0; k];
            for j in (0..k).rev() {
                let s: f64 = (j + 1..k).map(|c| r[j][c] * x[c]).sum();
                x[j] = (y[j] - s) / r[j][j];
            }
            x
        })
        .collect())
}

fn check_rows(predicted: &[[f64; 3]], measured: &[[f64; 3]]) -> Result<()> {
    if predicted.len() != measured.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predicted rows vs {} measured rows",
            predicted.len(),
            measured.len()
        )));
    }
    if predicted.len() < 3 {
        return Err(Error::Degenerate("at least 3 rows are required".into()));
    }
    Ok(())
}

/// Unconstrained `argmin ‖P·M − Y‖_F`.
pub fn solve_qe_transform(predicted: &[[f64; 3]], measured: &[[f64; 3]]) -> Result<QeFit> {
    check_rows(predicted, measured)?;
    let a: Vec<Vec<f64>> = predicted.iter().map(|p| p.to_vec()).collect();
    let rhs: Vec<Vec<f64>> = (0..3).map(|j| measured.iter().map(|y| y[j]).collect()).collect();
    let cols = least_squares(&a, &rhs)?;
    let mut m = [[0.0; 3]; 3];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..3 {
            m[i][j] = col[i];
        }
    }
    let transform = QeTransform::new(m)?;
    Ok(QeFit {
        residual_rms: transform.residual_rms(predicted, measured),
        transform,
    })
}

/// Unconstrained fit, then entries with `|m| < threshold` are fixed at zero
/// and each column is re-solved over the remaining entries.
pub fn solve_qe_transform_sparse(predicted: &[[f64; 3]], measured: &[[f64; 3]], threshold: f64) -> Result<QeFit> {
    let full = solve_qe_transform(predicted, measured)?;
    let mut m = [[0.0; 3]; 3];
    for j in 0..3 {
        let keep: Vec<usize> = (0..3).filter(|&i| full.transform.m[i][j].abs() >= threshold).collect();
        if keep.is_empty() {
            continue;
        }
        let a: Vec<Vec<f64>> = predicted.iter().map(|p| keep.iter().map(|&i| p[i]).collect()).collect();
        let y: Vec<f64> = measured.iter().map(|y| y[j]).collect();
        let x = least_squares(&a, &[y])?;
        for (idx, &i) in keep.iter().enumerate() {
            m[i][j] = x[0][idx];
        }
    }
    let transform = QeTransform::new(m)?;
    Ok(QeFit {
        residual_rms: transform.residual_rms(predicted, measured),
        transform,
    })
}
