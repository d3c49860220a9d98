//! Forward primitives and their adjoints.
//!
//! Matrices multiply column vectors from the left: a weight of shape
//! `[out, in]` maps `x ∈ R^in` to `W x ∈ R^out`. Each `*_backward` takes the
//! upstream gradient and returns (or accumulates) gradients for its inputs.

use super::{NnError, Tensor};

fn check_len(op: &'static str, a: usize, b: usize) -> Result<(), NnError> {
    if a == b {
        Ok(())
    } else {
        Err(NnError::ShapeMismatch {
            op,
            left: vec![a],
            right: vec![b],
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `W x` for `W: [out, in]`.
pub fn matvec(w: &Tensor, x: &[f64]) -> Result<Vec<f64>, NnError> {
    if w.shape().len() != 2 || w.cols() != x.len() {
        return Err(NnError::ShapeMismatch {
            op: "matvec",
            left: w.shape().to_vec(),
            right: vec![x.len()],
        });
    }
    Ok((0..w.rows()).map(|r| dot(w.row(r), x)).collect())
}

/// Accumulates `dW += dy xᵀ` and returns `dx = Wᵀ dy`.
pub fn matvec_backward(w: &Tensor, x: &[f64], dy: &[f64], dw: &mut Tensor) -> Vec<f64> {
    let mut dx = vec![0.0; x.len()];
    for (r, &g) in dy.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let wr = w.row(r);
        let dwr = dw.row_mut(r);
        for c in 0..x.len() {
            dwr[c] += g * x[c];
            dx[c] += g * wr[c];
        }
    }
    dx
}

/// `W x + b`.
pub fn affine(w: &Tensor, b: &Tensor, x: &[f64]) -> Result<Vec<f64>, NnError> {
    let mut y = matvec(w, x)?;
    check_len("affine bias", y.len(), b.len())?;
    for (yi, bi) in y.iter_mut().zip(b.data()) {
        *yi += bi;
    }
    Ok(y)
}

/// Accumulates into `dw`, `db`; returns `dx`.
pub fn affine_backward(
    w: &Tensor,
    x: &[f64],
    dy: &[f64],
    dw: &mut Tensor,
    db: &mut Tensor,
) -> Vec<f64> {
    for (d, g) in db.data_mut().iter_mut().zip(dy) {
        *d += g;
    }
    matvec_backward(w, x, dy, dw)
}

/// `A B` for `A: [n, k]`, `B: [k, m]`.
pub fn matmul(a: &Tensor, b: &Tensor) -> Result<Tensor, NnError> {
    if a.shape().len() != 2 || b.shape().len() != 2 || a.cols() != b.rows() {
        return Err(NnError::ShapeMismatch {
            op: "matmul",
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    let mut c = Tensor::zeros(&[n, m]);
    for i in 0..n {
        let ar = a.row(i);
        let cr = c.row_mut(i);
        for (p, &aip) in ar.iter().enumerate().take(k) {
            for (j, bpj) in b.row(p).iter().enumerate() {
                cr[j] += aip * bpj;
            }
        }
    }
    Ok(c)
}

/// Returns `(dA, dB) = (dC Bᵀ, Aᵀ dC)`.
pub fn matmul_backward(a: &Tensor, b: &Tensor, dc: &Tensor) -> Result<(Tensor, Tensor), NnError> {
    if dc.rows() != a.rows() || dc.cols() != b.cols() {
        return Err(NnError::ShapeMismatch {
            op: "matmul_backward",
            left: vec![a.rows(), b.cols()],
            right: dc.shape().to_vec(),
        });
    }
    let mut da = a.zeros_like();
    let mut db = b.zeros_like();
    for i in 0..a.rows() {
        let dcr = dc.row(i);
        for p in 0..a.cols() {
            let br = b.row(p);
            da.row_mut(i)[p] = dot(dcr, br);
            let aip = a.row(i)[p];
            for (j, g) in dcr.iter().enumerate() {
                db.row_mut(p)[j] += aip * g;
            }
        }
    }
    Ok((da, db))
}

pub fn tanh(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.tanh()).collect()
}

/// Adjoint of tanh given its output `y`.
pub fn tanh_backward(y: &[f64], dy: &[f64]) -> Vec<f64> {
    y.iter().zip(dy).map(|(y, g)| g * (1.0 - y * y)).collect()
}

pub fn leaky_relu(x: &[f64], slope: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| if v > 0.0 { v } else { slope * v })
        .collect()
}

/// Adjoint of leaky ReLU given its input `x`.
pub fn leaky_relu_backward(x: &[f64], slope: f64, dy: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(dy)
        .map(|(&v, g)| if v > 0.0 { *g } else { slope * g })
        .collect()
}

pub fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| sigmoid_scalar(v)).collect()
}

/// Adjoint of the logistic function given its output `y`.
pub fn sigmoid_backward(y: &[f64], dy: &[f64]) -> Vec<f64> {
    y.iter().zip(dy).map(|(y, g)| g * y * (1.0 - y)).collect()
}

/// Max-shifted softmax of one row.
pub fn softmax(row: &[f64]) -> Vec<f64> {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Adjoint of softmax given its output `y`: `y ⊙ (dy − ⟨y, dy⟩)`.
pub fn softmax_backward(y: &[f64], dy: &[f64]) -> Vec<f64> {
    let inner = dot(y, dy);
    y.iter().zip(dy).map(|(y, g)| y * (g - inner)).collect()
}

/// Column-wise mean over the rows of `m`.
pub fn mean_rows(m: &Tensor) -> Vec<f64> {
    let n = m.rows() as f64;
    let mut out = vec![0.0; m.cols()];
    for r in 0..m.rows() {
        for (o, v) in out.iter_mut().zip(m.row(r)) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|o| *o /= n);
    out
}

pub fn mean_rows_backward(rows: usize, dy: &[f64]) -> Tensor {
    let n = rows as f64;
    let mut dm = Tensor::zeros(&[rows, dy.len()]);
    for r in 0..rows {
        for (d, g) in dm.row_mut(r).iter_mut().zip(dy) {
            *d = g / n;
        }
    }
    dm
}

pub fn add(a: &[f64], b: &[f64]) -> Result<Vec<f64>, NnError> {
    check_len("add", a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| x + y).collect())
}

pub fn mul(a: &[f64], b: &[f64]) -> Result<Vec<f64>, NnError> {
    check_len("mul", a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| x * y).collect())
}

/// Returns `(da, db)` for the elementwise product.
pub fn mul_backward(a: &[f64], b: &[f64], dy: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let da = b.iter().zip(dy).map(|(b, g)| b * g).collect();
    let db = a.iter().zip(dy).map(|(a, g)| a * g).collect();
    (da, db)
}

pub const MIN_NORM: f64 = 1e-12;

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, NnError> {
    check_len("cosine", u.len(), v.len())?;
    let (nu, nv) = (norm(u), norm(v));
    for n in [nu, nv] {
        if n < MIN_NORM {
            return Err(NnError::DegenerateVector { norm: n });
        }
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Gradients of `c = cos(u, v)` scaled by `dc`:
/// `∂c/∂u = v/(‖u‖‖v‖) − c·u/‖u‖²`, symmetric for `v`.
pub fn cosine_backward(u: &[f64], v: &[f64], dc: f64) -> Result<(Vec<f64>, Vec<f64>), NnError> {
    check_len("cosine", u.len(), v.len())?;
    let (nu, nv) = (norm(u), norm(v));
    for n in [nu, nv] {
        if n < MIN_NORM {
            return Err(NnError::DegenerateVector { norm: n });
        }
    }
    let c = dot(u, v) / (nu * nv);
    let du = u
        .iter()
        .zip(v)
        .map(|(a, b)| dc * (b / (nu * nv) - c * a / (nu * nu)))
        .collect();
    let dv = u
        .iter()
        .zip(v)
        .map(|(a, b)| dc * (a / (nu * nv) - c * b / (nv * nv)))
        .collect();
    Ok((du, dv))
}

/// `−log softmax(scores)[target]`, stabilized by max subtraction.
pub fn softmax_cross_entropy_row(scores: &[f64], target: usize) -> Result<f64, NnError> {
    if target >= scores.len() {
        return Err(NnError::IndexOutOfRange {
            index: target,
            len: scores.len(),
        });
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    Ok(log_sum - (scores[target] - max))
}

/// Gradient with respect to the scores: `softmax(scores) − onehot(target)`.
pub fn softmax_cross_entropy_backward(scores: &[f64], target: usize) -> Result<Vec<f64>, NnError> {
    if target >= scores.len() {
        return Err(NnError::IndexOutOfRange {
            index: target,
            len: scores.len(),
        });
    }
    let mut g = softmax(scores);
    g[target] -= 1.0;
    Ok(g)
}
