//! Discrete norms, sample statistics and restriction between meshes.

use crate::error::{Error, Result};

/// `vol · Σ |a − b|` over every entry.
pub fn l1_distance(a: &[f64], b: &[f64], vol: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MeshMismatch(format!("{} vs {} values", a.len(), b.len())));
    }
    Ok(vol * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// `max |a − b|`.
pub fn linf_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MeshMismatch(format!("{} vs {} values", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// Per-component l1 distance of interleaved fields `[cell][component]`.
pub fn l1_components(a: &[f64], b: &[f64], n_comp: usize, vol: f64) -> Result<Vec<f64>> {
    if a.len() != b.len() || !a.len().is_multiple_of(n_comp) {
        return Err(Error::MeshMismatch(format!(
            "{} vs {} values with {n_comp} components",
            a.len(),
            b.len()
        )));
    }
    let mut out = vec![0.0; n_comp];
    for (ca, cb) in a.chunks_exact(n_comp).zip(b.chunks_exact(n_comp)) {
        for k in 0..n_comp {
            out[k] += (ca[k] - cb[k]).abs();
        }
    }
    for v in &mut out {
        *v *= vol;
    }
    Ok(out)
}

/// Every `n_comp`-th entry starting at `comp`.
pub fn component(values: &[f64], n_comp: usize, comp: usize) -> Vec<f64> {
    values.iter().skip(comp).step_by(n_comp).copied().collect()
}

/// Weighted mean and standard deviation of equally shaped samples,
/// computed in two passes.
pub fn weighted_mean_std(samples: &[Vec<f64>], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let len = samples.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; len];
    for (s, &w) in samples.iter().zip(weights) {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += w * v;
        }
    }
    let mut var = vec![0.0; len];
    for (s, &w) in samples.iter().zip(weights) {
        for ((acc, m), v) in var.iter_mut().zip(&mean).zip(s) {
            *acc += w * (v - m) * (v - m);
        }
    }
    (mean, var.into_iter().map(f64::sqrt).collect())
}

/// Overlap weights `(fine index, fraction of the coarse cell, offset)` for
/// every cell of a uniform coarse mesh of `n_to` cells covering the same
/// interval as a fine mesh of `n_from` cells. The offset is the overlap
/// centroid relative to the fine cell center, in fine cell widths.
fn overlaps(n_from: usize, n_to: usize) -> Vec<Vec<(usize, f64, f64)>> {
    let (hf, hc) = (1.0 / n_from as f64, 1.0 / n_to as f64);
    (0..n_to)
        .map(|k| {
            let (a, b) = (k as f64 * hc, (k + 1) as f64 * hc);
            let first = ((a / hf).floor() as usize).min(n_from - 1);
            let last = (((b / hf).ceil() as usize).max(first + 1)).min(n_from);
            (first..last)
                .filter_map(|i| {
                    let lo = (i as f64 * hf).max(a);
                    let hi = ((i + 1) as f64 * hf).min(b);
                    let offset = (0.5 * (lo + hi) - (i as f64 + 0.5) * hf) / hf;
                    (hi - lo > 1e-14 * hf).then(|| (i, (hi - lo) / hc, offset))
                })
                .collect()
        })
        .collect()
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Minmod-limited slope per fine cell width of entry `at` along a line of
/// `n` cells spaced `step` apart; zero at the ends.
fn slope(values: &[f64], at: usize, pos: usize, n: usize, step: usize) -> f64 {
    if pos == 0 || pos + 1 == n {
        return 0.0;
    }
    minmod(values[at] - values[at - step], values[at + step] - values[at])
}

/// Conservative restriction of an interleaved 1D field onto a coarser (or
/// equal) uniform mesh. Fine cells are reconstructed piecewise linearly
/// with minmod slopes, so nested meshes reduce to plain averaging.
pub fn restrict_1d(values: &[f64], n_comp: usize, n_from: usize, n_to: usize) -> Result<Vec<f64>> {
    if values.len() != n_from * n_comp {
        return Err(Error::MeshMismatch(format!(
            "{} values for {n_from} cells of {n_comp}",
            values.len()
        )));
    }
    if n_to == 0 || n_from == 0 {
        return Err(Error::MeshMismatch("empty mesh".into()));
    }
    let w = overlaps(n_from, n_to);
    let mut out = vec![0.0; n_to * n_comp];
    for (k, ov) in w.iter().enumerate() {
        for &(i, f, o) in ov {
            for c in 0..n_comp {
                let at = i * n_comp + c;
                out[k * n_comp + c] += f * (values[at] + o * slope(values, at, i, n_from, n_comp));
            }
        }
    }
    Ok(out)
}

/// Two-dimensional counterpart of [`restrict_1d`] for a row-major
/// `[j][i][component]` field, with independent slopes per direction.
pub fn restrict_2d(
    values: &[f64],
    n_comp: usize,
    from: (usize, usize),
    to: (usize, usize),
) -> Result<Vec<f64>> {
    let (fx, fy) = from;
    let (tx, ty) = to;
    if values.len() != fx * fy * n_comp {
        return Err(Error::MeshMismatch(format!(
            "{} values for a {fx}×{fy} grid of {n_comp}",
            values.len()
        )));
    }
    if tx == 0 || ty == 0 || fx == 0 || fy == 0 {
        return Err(Error::MeshMismatch("empty mesh".into()));
    }
    let (wx, wy) = (overlaps(fx, tx), overlaps(fy, ty));
    let mut out = vec![0.0; tx * ty * n_comp];
    for (kj, oy) in wy.iter().enumerate() {
        for (ki, ox) in wx.iter().enumerate() {
            let dst = (kj * tx + ki) * n_comp;
            for &(j, gy, py) in oy {
                for &(i, gx, px) in ox {
                    let src = (j * fx + i) * n_comp;
                    for c in 0..n_comp {
                        let at = src + c;
                        let sx = slope(values, at, i, fx, n_comp);
                        let sy = slope(values, at, j, fy, fx * n_comp);
                        out[dst + c] += gx * gy * (values[at] + px * sx + py * sy);
                    }
                }
            }
        }
    }
    Ok(out)
}
