//! Krylov solvers over plain vectors with caller-supplied operators.

use crate::scalar::Real;

/// Compressed sparse rows.
#[derive(Clone, Debug)]
pub(crate) struct Csr<T> {
    pub nrows: usize,
    pub ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> Csr<T> {
    /// Builds from per-row `(column, value)` lists; duplicates are summed.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, T)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in rows.iter().cloned() {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let (c, mut v) = row[k];
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                indices.push(c);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Csr { nrows: rows.len(), ncols, indptr, indices, data }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.nrows)
            .map(|r| {
                let mut acc = T::zero();
                for k in self.indptr[r]..self.indptr[r + 1] {
                    acc += self.data[k] * x[self.indices[k]];
                }
                acc
            })
            .collect()
    }

    pub fn matvec_transpose(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.ncols];
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                out[self.indices[k]] += self.data[k] * y[r];
            }
        }
        out
    }

    /// Diagonal of `A^T diag(w) A`.
    pub fn normal_diagonal(&self, w: &[T]) -> Vec<T> {
        let mut d = vec![T::zero(); self.ncols];
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                d[self.indices[k]] += w[r] * self.data[k] * self.data[k];
            }
        }
        d
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[derive(Clone, Debug)]
pub struct KrylovOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Value of the stopping measure after every iteration (starting with the initial guess).
    pub history: Vec<T>,
}

/// Preconditioned conjugate gradients for a symmetric positive definite
/// operator, stopping once `measure(residual) <= target`.
pub fn pcg<T: Real>(
    apply: impl Fn(&[T]) -> Vec<T>,
    inv_diag: &[T],
    b: &[T],
    target: T,
    max_iter: usize,
    measure: impl Fn(&[T]) -> T,
) -> KrylovOutcome<T> {
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut history = vec![measure(&r)];
    if history[0] <= target {
        return KrylovOutcome { x, iterations: 0, converged: true, history };
    }
    let mut z: Vec<T> = r.iter().zip(inv_diag).map(|(&a, &d)| a * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return KrylovOutcome { x, iterations: it - 1, converged: false, history };
        }
        let a = rz / pap;
        for i in 0..n {
            x[i] += a * p[i];
            r[i] -= a * ap[i];
        }
        let m = measure(&r);
        history.push(m);
        if m <= target {
            return KrylovOutcome { x, iterations: it, converged: true, history };
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    KrylovOutcome { x, iterations: max_iter, converged: false, history }
}
