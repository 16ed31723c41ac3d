//! Small SPD linear algebra kernels for the grounded Laplacian.

/// Symmetric matrix in compressed sparse row form, both triangles stored.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_start: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from unordered `(row, col, value)` triplets; duplicates add.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut col = vec![0; triplets.len()];
        let mut val = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            let slot = fill[r];
            col[slot] = c;
            val[slot] = v;
            fill[r] += 1;
        }
        // merge duplicates within each row
        let mut row_start = vec![0; n + 1];
        let mut out_col = Vec::with_capacity(col.len());
        let mut out_val = Vec::with_capacity(val.len());
        for r in 0..n {
            let mut row: Vec<(usize, f64)> = (counts[r]..counts[r + 1]).map(|k| (col[k], val[k])).collect();
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if out_col.len() > row_start[r] && *out_col.last().unwrap() == c {
                    *out_val.last_mut().unwrap() += v;
                } else {
                    out_col.push(c);
                    out_val.push(v);
                }
            }
            row_start[r + 1] = out_col.len();
        }
        Self {
            n,
            row_start,
            col: out_col,
            val: out_val,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            y[r] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_start[r]..self.row_start[r + 1])
                    .find(|&k| self.col[k] == r)
                    .map_or(0.0, |k| self.val[k])
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.n * self.n];
        for r in 0..self.n {
            for k in self.row_start[r]..self.row_start[r + 1] {
                dense[r * self.n + self.col[k]] += self.val[k];
            }
        }
        dense
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative residual `‖b − Ax‖ / ‖b‖`.
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut ax = vec![0.0; a.dim()];
    a.mul_into(x, &mut ax);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
    let bn = norm(b);
    if bn == 0.0 {
        norm(&r)
    } else {
        norm(&r) / bn
    }
}

/// Dense Cholesky solve of a row-major SPD matrix. `None` if the matrix is
/// not numerically positive definite.
pub fn cholesky_solve(mut a: Vec<f64>, n: usize, b: &[f64]) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[i * n + k] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= a[k * n + i] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    Some(y)
}

pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradient from a zero start.
pub fn preconditioned_cg(a: &CsrMatrix, b: &[f64], tolerance: f64, max_iterations: usize) -> CgOutcome {
    let n = a.dim();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return CgOutcome {
            x,
            iterations: 0,
            relative_residual: 0.0,
        };
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, m)| ri * m).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut rel = 1.0;
    while iterations < max_iterations {
        a.mul_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        iterations += 1;
        rel = norm(&r) / b_norm;
        if rel <= tolerance {
            break;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgOutcome {
        x,
        iterations,
        relative_residual: rel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_path(n: usize) -> CsrMatrix {
        // grounded path Laplacian: tridiagonal with 2 on the diagonal, last entry 1
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, if i + 1 == n { 1.0 } else { 2.0 }));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn cg_and_cholesky_agree() {
        let a = laplacian_path(30);
        let b: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let dense = cholesky_solve(a.to_dense(), 30, &b).unwrap();
        let cg = preconditioned_cg(&a, &b, 1e-13, 1000);
        assert!(cg.relative_residual <= 1e-13);
        for (x, y) in dense.iter().zip(&cg.x) {
            assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 4.0)]);
        assert_eq!(a.diagonal(), vec![3.0, 4.0]);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky_solve(vec![1.0, 2.0, 2.0, 1.0], 2, &[1.0, 1.0]).is_none());
    }
}
