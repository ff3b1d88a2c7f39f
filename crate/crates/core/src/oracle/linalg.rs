use crate::error::{Error, Result};

/// Solves `a x = b` for a dense row-major `n × n` matrix by LU decomposition
/// with partial pivoting. `a` and `b` are consumed as workspace.
pub fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let (piv, piv_abs) = (k..n)
            .map(|r| (r, a[r * n + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= 1e-13 * scale {
            return Err(Error::Numerical(format!("singular matrix at column {k}")));
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            b.swap(k, piv);
        }
        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n..(k + 1) * n];
        let pivot = pivot_row[k];
        for (i, row) in lower.chunks_exact_mut(n).enumerate() {
            let factor = row[k] / pivot;
            if factor == 0.0 {
                continue;
            }
            row[k] = 0.0;
            for (dst, src) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                *dst -= factor * src;
            }
            b[k + 1 + i] -= factor * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let row = &a[k * n..(k + 1) * n];
        let s: f64 = row[k + 1..].iter().zip(&x[k + 1..]).map(|(r, v)| r * v).sum();
        x[k] = (b[k] - s) / row[k];
    }
    Ok(x)
}
