//! Small dense integer matrices with exact Hermite-style reduction.
//!
//! Entries are `i64` at the API boundary and `i128` during elimination.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_cols(n_rows: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(n_rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i * o.cols + j] += a * o.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Fraction-free Bareiss elimination.
    pub fn determinant(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| self.row(i).into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs() == 1
    }

    pub fn unimodular_inverse(&self) -> Result<IntMatrix> {
        let det = self.determinant();
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        let n = self.rows;
        let cols = (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                solve_integer(self, &e).expect("unimodular systems are solvable")
            })
            .collect::<Vec<_>>();
        Ok(IntMatrix::from_cols(n, &cols))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

type Wide = Vec<Vec<i128>>;

fn widen(m: &IntMatrix) -> Wide {
    (0..m.rows).map(|i| m.row(i).into_iter().map(i128::from).collect()).collect()
}

fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("integer overflow in lattice reduction")
}

fn col_axpy(m: &mut Wide, dst: usize, src: usize, q: i128) {
    for row in m.iter_mut() {
        row[dst] -= q * row[src];
    }
}

fn col_swap(m: &mut Wide, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_negate(m: &mut Wide, a: usize) {
    for row in m.iter_mut() {
        row[a] = -row[a];
    }
}

/// Column echelon form `A U = H` with `U` unimodular. Returns `(H, U, pivot
/// rows)`; column `j < rank` of `H` has a positive pivot at `pivots[j]` and
/// zeros above it, pivot rows strictly increase, and columns past the rank
/// vanish.
fn column_echelon(a: &IntMatrix) -> (Wide, Wide, Vec<usize>) {
    let (m, n) = (a.rows, a.cols);
    let mut h = widen(a);
    let mut u: Wide = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    let mut pivots = Vec::new();
    let mut k = 0;
    for i in 0..m {
        if k == n {
            break;
        }
        loop {
            let best = (k..n).filter(|&j| h[i][j] != 0).min_by_key(|&j| h[i][j].abs());
            let Some(j0) = best else { break };
            col_swap(&mut h, k, j0);
            col_swap(&mut u, k, j0);
            let mut clean = true;
            for j in k + 1..n {
                if h[i][j] != 0 {
                    let q = h[i][j] / h[i][k];
                    col_axpy(&mut h, j, k, q);
                    col_axpy(&mut u, j, k, q);
                    clean &= h[i][j] == 0;
                }
            }
            if clean {
                break;
            }
        }
        if h[i][k] != 0 {
            if h[i][k] < 0 {
                col_negate(&mut h, k);
                col_negate(&mut u, k);
            }
            pivots.push(i);
            k += 1;
        }
    }
    (h, u, pivots)
}

/// One integer solution of `A x = b`, if any.
pub fn solve_integer(a: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch");
    let (h, u, pivots) = column_echelon(a);
    let mut r: Vec<i128> = b.iter().map(|&x| i128::from(x)).collect();
    let mut y = vec![0i128; a.cols];
    for (j, &p) in pivots.iter().enumerate() {
        if r[..p].iter().any(|&x| x != 0) {
            return None;
        }
        if r[p] % h[p][j] != 0 {
            return None;
        }
        y[j] = r[p] / h[p][j];
        for (i, ri) in r.iter_mut().enumerate() {
            *ri -= y[j] * h[i][j];
        }
    }
    if r.iter().any(|&x| x != 0) {
        return None;
    }
    Some(
        (0..a.cols)
            .map(|i| narrow((0..a.cols).map(|j| u[i][j] * y[j]).sum()))
            .collect(),
    )
}

/// Canonical basis of `{x ∈ Z^n : A x = 0}` in Hermite form.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<i64>> {
    let (_, u, pivots) = column_echelon(a);
    let basis: Vec<Vec<i64>> = (pivots.len()..a.cols)
        .map(|j| (0..a.cols).map(|i| narrow(u[i][j])).collect())
        .collect();
    hermite_basis(a.cols, &basis)
}

/// Canonical Hermite basis of the lattice spanned by `vectors` in `Z^dim`:
/// positive leading entries, entries sharing a pivot coordinate reduced into
/// `[0, pivot)`.
pub fn hermite_basis(dim: usize, vectors: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (mut h, _, pivots) = column_echelon(&IntMatrix::from_cols(dim, vectors));
    for (j, &p) in pivots.iter().enumerate() {
        for l in 0..j {
            let q = h[p][l].div_euclid(h[p][j]);
            col_axpy(&mut h, l, j, q);
        }
    }
    (0..pivots.len())
        .map(|j| (0..dim).map(|i| narrow(h[i][j])).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.determinant(), 1);
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(a.mul(&inv), IntMatrix::identity(2));
        assert_eq!(m(&[&[2, 0], &[0, 1]]).determinant(), 2);
        assert!(matches!(m(&[&[2, 0], &[0, 1]]).unimodular_inverse(), Err(Error::NotUnimodular(2))));
        assert_eq!(m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]).determinant(), -1);
    }

    #[test]
    fn diophantine() {
        assert_eq!(solve_integer(&m(&[&[2, 3]]), &[1]).map(|x| 2 * x[0] + 3 * x[1]), Some(1));
        assert_eq!(solve_integer(&m(&[&[2, 4]]), &[1]), None);
        assert_eq!(solve_integer(&m(&[&[1, 0], &[1, 0]]), &[1, 2]), None);
        let x = solve_integer(&m(&[&[1, 1, 0], &[0, 3, 3]]), &[2, 3]).unwrap();
        assert_eq!(x[0] + x[1], 2);
        assert_eq!(3 * x[1] + 3 * x[2], 3);
    }

    #[test]
    fn kernel_is_canonical() {
        assert_eq!(integer_kernel(&m(&[&[1, -1]])), vec![vec![1, 1]]);
        assert_eq!(integer_kernel(&m(&[&[2, 4]])), vec![vec![2, -1]]);
        let k = integer_kernel(&IntMatrix::zeros(1, 3));
        assert_eq!(k, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(integer_kernel(&IntMatrix::identity(2)).is_empty());
    }

    #[test]
    fn hermite_is_basis_independent() {
        let a = hermite_basis(2, &[vec![2, 1], vec![0, 3]]);
        let b = hermite_basis(2, &[vec![2, 4], vec![2, 1], vec![4, 5]]);
        assert_eq!(a, b);
    }
}
