//! Hermitian eigensolver: cyclic Jacobi on the real symmetric embedding
//! `[[A, -B], [B, A]]` of `H = A + iB`. Purely real input skips the embedding.

use super::matrix::{CMatrix, C64};
use crate::{tol, Error, Result};

const MAX_SWEEPS: usize = 100;

struct RealEigen {
    values: Vec<f64>,
    /// Column-major: eigenvector `k` is `vectors[k*n..(k+1)*n]`.
    vectors: Option<Vec<f64>>,
    n: usize,
}

/// Cyclic Jacobi on a dense real symmetric row-major matrix. Eigenvalues come back
/// ascending; equal values keep the order of their diagonal positions.
fn jacobi(mut a: Vec<f64>, n: usize, want_vectors: bool) -> RealEigen {
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };
    let threshold = tol::JACOBI * norm;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = v.map(|v| {
        let mut out = Vec::with_capacity(n * n);
        for &col in &order {
            for row in 0..n {
                out.push(v[row * n + col]);
            }
        }
        out
    });
    RealEigen { values, vectors, n }
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Invariant(format!(
            "eigensolver needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let scale = h.data().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let err = h.hermiticity_error();
    if err > tol::HERMITIAN_INPUT * scale {
        return Err(Error::Invariant(format!("matrix is not Hermitian (error {err:e})")));
    }
    Ok(())
}

fn embed(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[i * m + (j + n)] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    s
}

fn real_part(h: &CMatrix) -> Vec<f64> {
    h.data().iter().map(|z| z.re).collect()
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(h: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let n = h.rows();
    if h.is_real() {
        return Ok(jacobi(real_part(h), n, false).values);
    }
    let doubled = jacobi(embed(h), 2 * n, false).values;
    Ok(doubled.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

/// Full eigendecomposition: ascending eigenvalues and unit eigenvectors (one per value).
pub fn eigh(h: &CMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    check_hermitian(h)?;
    let n = h.rows();
    if h.is_real() {
        let e = jacobi(real_part(h), n, true);
        let vecs = e.vectors.unwrap();
        let vectors = (0..n)
            .map(|k| vecs[k * n..(k + 1) * n].iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        return Ok((e.values, vectors));
    }
    let e = jacobi(embed(h), 2 * n, true);
    let m = e.n;
    let vecs = e.vectors.unwrap();
    // Each eigenvalue of H appears twice; the pair spans {(x;y), (-y;x)} and either
    // member yields the same complex eigenvector up to phase.
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for k in (0..m).step_by(2) {
        values.push(0.5 * (e.values[k] + e.values[k + 1]));
        let col = &vecs[k * m..(k + 1) * m];
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(col[i], col[i + n])).collect();
        normalize(&mut v);
        vectors.push(v);
    }
    Ok((values, vectors))
}

fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

/// Minimal eigenvalue and a unit eigenvector, phase-fixed so that its first
/// largest-magnitude component is real and positive.
pub fn eigsh_ground(h: &CMatrix) -> Result<(f64, Vec<C64>)> {
    check_hermitian(h)?;
    let n = h.rows();
    let (value, mut v) = if h.is_real() {
        let e = jacobi(real_part(h), n, true);
        let vecs = e.vectors.unwrap();
        (e.values[0], vecs[..n].iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    } else {
        let e = jacobi(embed(h), 2 * n, true);
        let vecs = e.vectors.unwrap();
        let m = 2 * n;
        let col = &vecs[..m];
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(col[i], col[i + n])).collect();
        normalize(&mut v);
        (0.5 * (e.values[0] + e.values[1]), v)
    };
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    let phase = v[best].conj() / v[best].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    Ok((value, v))
}

/// `‖H‖₁ = Σ|λ|` for Hermitian `H`. Absolute values are summed in sorted order so
/// that `trace_norm(A - B) == trace_norm(B - A)` bit for bit.
pub fn trace_norm(h: &CMatrix) -> Result<f64> {
    check_hermitian(h)?;
    let n = h.rows();
    let (mut abs, halve): (Vec<f64>, bool) = if h.is_real() {
        (jacobi(real_part(h), n, false).values.iter().map(|x| x.abs()).collect(), false)
    } else {
        (jacobi(embed(h), 2 * n, false).values.iter().map(|x| x.abs()).collect(), true)
    };
    abs.sort_by(f64::total_cmp);
    let sum: f64 = abs.iter().sum();
    Ok(if halve { 0.5 * sum } else { sum })
}
