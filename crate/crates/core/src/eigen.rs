//! Dense symmetric eigensolver kernels: Householder reduction to tridiagonal
//! form followed by implicit-shift QL iteration.
//!
//! Eigenvector storage is column-major: column `k` occupies `z[k*n..(k+1)*n]`.

/// Householder reduction of a row-major symmetric matrix.
///
/// Returns `(d, e, z)` with `A = Z T Z^T`, where `T` has diagonal `d` and
/// off-diagonal `e` (`e[i]` couples rows `i` and `i+1`, length `n-1`).
pub(crate) fn householder_tridiagonal(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    debug_assert_eq!(a.len(), n * n);
    // v[i][j] row-major working copy
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
    let mut d: Vec<f64> = v[n - 1].clone();
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);

            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate the orthogonal transformation
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for (dk, row) in d.iter_mut().zip(v.iter()).take(i + 1) {
                *dk = row[i + 1] / h;
            }
            for j in 0..=i {
                let g: f64 = v.iter().take(i + 1).map(|row| row[i + 1] * row[j]).sum();
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;

    let off = e[1..].to_vec();
    let mut z = vec![0.0; n * n];
    for (row, vr) in v.iter().enumerate() {
        for (col, &x) in vr.iter().enumerate() {
            z[col * n + row] = x;
        }
    }
    (d, off, z)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// On entry `d` is the diagonal, `off` the off-diagonal (length `n-1`) and
/// `z` the column-major basis to rotate (identity for a bare tridiagonal
/// problem). On success `d` holds the (unsorted) eigenvalues and the columns
/// of `z` the eigenvectors. Returns `Err(cap)` if the total number of QL
/// sweeps exceeds `cap`.
pub(crate) fn tridiagonal_ql(
    d: &mut [f64],
    off: &[f64],
    z: &mut [f64],
    cap: usize,
) -> Result<usize, usize> {
    let n = d.len();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut sweeps = 0usize;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > cap {
                return Err(cap);
            }

            // Wilkinson-type shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (left, right) = z.split_at_mut((i + 1) * n);
                let zi = &mut left[i * n..];
                let zi1 = &mut right[..n];
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(d: &[f64], e: &[f64], z: &[f64], n: usize) -> Vec<f64> {
        // Z T Z^T
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            t[i * n + i] = d[i];
            if i + 1 < n {
                t[i * n + i + 1] = e[i];
                t[(i + 1) * n + i] = e[i];
            }
        }
        let mut out = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        acc += z[p * n + r] * t[p * n + q] * z[q * n + c];
                    }
                }
                out[r * n + c] = acc;
            }
        }
        out
    }

    #[test]
    fn householder_preserves_matrix() {
        let n = 5;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let dist = (i as i64 - j as i64).unsigned_abs();
                if dist <= 2 {
                    a[i * n + j] = 1.0 / (1.0 + (i + j) as f64) + if i == j { i as f64 } else { 0.0 };
                }
            }
        }
        let (d, e, z) = householder_tridiagonal(&a, n);
        let back = reconstruct(&d, &e, &z, n);
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn ql_two_by_two() {
        let mut d = vec![0.0, 0.0];
        let mut z = vec![1.0, 0.0, 0.0, 1.0];
        tridiagonal_ql(&mut d, &[-2.0], &mut z, 100).unwrap();
        d.sort_by(f64::total_cmp);
        assert!((d[0] + 2.0).abs() < 1e-14);
        assert!((d[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ql_reports_cap() {
        let n = 30;
        let mut d: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        assert_eq!(tridiagonal_ql(&mut d, &vec![1.0; n - 1], &mut z, 1), Err(1));
    }
}
