//! Sparse assembly and a direct banded LU solver.
//!
//! The coupled system on a tensor mesh is banded in the natural cell ordering
//! except for the global mass-constraint row/column, which is dense. The
//! factorization therefore splits the matrix as
//!
//! ```text
//!   [ A  b ]      A banded, factored by LU with partial pivoting
//!   [ c' d ]      border eliminated through the Schur complement d - c' A^{-1} b
//! ```
//!
//! Everything is deterministic: triplets are accumulated in assembly order and
//! combined by a stable sort, and the pivoting order depends only on the
//! matrix values.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinSolveError {
    #[error("singular linear system (zero pivot in column {col})")]
    Singular { col: usize },
    #[error("matrix dimension mismatch")]
    Dimension,
}

/// Triplet accumulator; duplicate entries are summed.
#[derive(Debug, Clone)]
pub struct TripletList {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl TripletList {
    pub fn new(n: usize) -> Self {
        TripletList { n, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row as u32, col as u32, value));
    }

    pub fn to_csr(&self) -> SparseMatrix {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by_key(|&k| (self.entries[k].0, self.entries[k].1));
        let mut rows: Vec<usize> = Vec::new();
        let mut col_idx: Vec<usize> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (r, c, v) = self.entries[k];
            let (r, c) = (r as usize, c as usize);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { n: self.n, row_ptr, col_idx, values }
    }
}

/// CSR matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map(|(_, v)| v).unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        y
    }
}

/// LAPACK-style band storage: entry (i, j) lives at `ab[j*ldab + ku + kl + i - j]`
/// with `ldab = 2*kl + ku + 1`; the top `kl` rows hold pivoting fill.
struct BandStorage {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandStorage {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandStorage { n, kl, ku, ldab, ab: vec![0.0; ldab * n] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.ku + self.kl + i - j)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }
}

/// Banded LU factorization with partial pivoting, plus an optional dense
/// border (last row and column) handled by a Schur complement.
pub struct Factorization {
    band: BandStorage,
    ipiv: Vec<usize>,
    /// Border data when the matrix had a dense last row/column.
    border: Option<Border>,
    /// Full system size (band size + 1 when bordered).
    n_total: usize,
}

struct Border {
    /// A^{-1} b for the border column b.
    w: Vec<f64>,
    row: Vec<f64>,
    schur: f64,
}

/// Factor a CSR matrix. With `bordered`, the last row and column are treated
/// as dense and eliminated through the Schur complement; the leading block
/// must then be banded and nonsingular.
pub fn factor(a: &SparseMatrix, bordered: bool) -> Result<Factorization, LinSolveError> {
    let n_total = a.n();
    let nb = if bordered { n_total - 1 } else { n_total };
    if nb == 0 {
        if bordered {
            let d = a.get(0, 0);
            if d == 0.0 {
                return Err(LinSolveError::Singular { col: 0 });
            }
            return Ok(Factorization {
                band: BandStorage::new(0, 0, 0),
                ipiv: Vec::new(),
                border: Some(Border { w: Vec::new(), row: Vec::new(), schur: d }),
                n_total,
            });
        }
        return Err(LinSolveError::Dimension);
    }

    let mut kl = 0usize;
    let mut ku = 0usize;
    for i in 0..nb {
        for (j, _) in a.row(i) {
            if j < nb {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
    }

    let mut band = BandStorage::new(nb, kl, ku);
    let mut col = vec![0.0; nb];
    let mut row = vec![0.0; nb];
    let mut corner = 0.0;
    for i in 0..n_total {
        for (j, v) in a.row(i) {
            match (i < nb, j < nb) {
                (true, true) => band.set(i, j, v),
                (true, false) => col[i] = v,
                (false, true) => row[j] = v,
                (false, false) => corner = v,
            }
        }
    }

    let ipiv = band_lu_in_place(&mut band)?;

    let border = if bordered {
        let mut w = col;
        band_solve(&band, &ipiv, &mut w);
        let schur = corner - row.iter().zip(&w).map(|(r, w)| r * w).sum::<f64>();
        if schur == 0.0 || !schur.is_finite() {
            return Err(LinSolveError::Singular { col: nb });
        }
        Some(Border { w, row, schur })
    } else {
        None
    };

    Ok(Factorization { band, ipiv, border, n_total })
}

impl Factorization {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinSolveError> {
        if rhs.len() != self.n_total {
            return Err(LinSolveError::Dimension);
        }
        match &self.border {
            None => {
                let mut x = rhs.to_vec();
                band_solve(&self.band, &self.ipiv, &mut x);
                Ok(x)
            }
            Some(b) => {
                let nb = self.n_total - 1;
                let mut y = rhs[..nb].to_vec();
                band_solve(&self.band, &self.ipiv, &mut y);
                let t = (rhs[nb] - b.row.iter().zip(&y).map(|(r, y)| r * y).sum::<f64>())
                    / b.schur;
                for i in 0..nb {
                    y[i] -= t * b.w[i];
                }
                y.push(t);
                Ok(y)
            }
        }
    }
}

fn band_lu_in_place(band: &mut BandStorage) -> Result<Vec<usize>, LinSolveError> {
    let n = band.n;
    let kl = band.kl;
    let kband = band.kl + band.ku;
    let mut ipiv = vec![0usize; n];
    for j in 0..n {
        let i_max = (j + kl).min(n - 1);
        let mut jp = j;
        let mut best = band.get(j, j).abs();
        for i in (j + 1)..=i_max {
            let v = band.get(i, j).abs();
            if v > best {
                best = v;
                jp = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(LinSolveError::Singular { col: j });
        }
        ipiv[j] = jp;
        let k_max = (j + kband).min(n - 1);
        if jp != j {
            for k in j..=k_max {
                let a = band.get(j, k);
                let b = band.get(jp, k);
                band.set(j, k, b);
                band.set(jp, k, a);
            }
        }
        let pivot = band.get(j, j);
        for i in (j + 1)..=i_max {
            let m = band.get(i, j) / pivot;
            band.set(i, j, m);
            if m != 0.0 {
                for k in (j + 1)..=k_max {
                    let v = band.get(i, k) - m * band.get(j, k);
                    band.set(i, k, v);
                }
            }
        }
    }
    Ok(ipiv)
}

fn band_solve(band: &BandStorage, ipiv: &[usize], b: &mut [f64]) {
    let n = band.n;
    if n == 0 {
        return;
    }
    let kl = band.kl;
    let kband = band.kl + band.ku;
    for j in 0..n {
        let jp = ipiv[j];
        if jp != j {
            b.swap(j, jp);
        }
        let bj = b[j];
        if bj != 0.0 {
            let i_max = (j + kl).min(n - 1);
            for i in (j + 1)..=i_max {
                b[i] -= band.get(i, j) * bj;
            }
        }
    }
    for j in (0..n).rev() {
        b[j] /= band.get(j, j);
        let bj = b[j];
        if bj != 0.0 {
            let i_min = j.saturating_sub(kband);
            for i in i_min..j {
                b[i] -= band.get(i, j) * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(n: usize, kl: usize, ku: usize, rng: &mut ChaCha8Rng) -> SparseMatrix {
        let mut t = TripletList::new(n);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                let v = if i == j { v + 4.0 } else { v };
                t.push(i, j, v);
            }
        }
        t.to_csr()
    }

    #[test]
    fn triplets_sum_duplicates() {
        let mut t = TripletList::new(3);
        t.push(0, 0, 1.0);
        t.push(1, 2, 2.0);
        t.push(0, 0, 0.5);
        t.push(2, 2, 1.0);
        let a = t.to_csr();
        assert_eq!(a.get(0, 0), 1.5);
        assert_eq!(a.get(1, 2), 2.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn banded_solve_matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &(n, kl, ku) in &[(1usize, 0usize, 0usize), (5, 1, 1), (12, 2, 3), (40, 5, 5), (60, 7, 2)] {
            let a = random_banded(n, kl, ku, &mut rng);
            let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b = a.mul_vec(&x_true);

            let f = factor(&a, false).unwrap();
            let x = f.solve(&b).unwrap();

            // dense oracle
            let mut dense = nalgebra::DMatrix::zeros(n, n);
            for i in 0..n {
                for (j, v) in a.row(i) {
                    dense[(i, j)] = v;
                }
            }
            let xd = dense
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(&b))
                .expect("dense solve");
            for i in 0..n {
                assert!((x[i] - x_true[i]).abs() < 1e-10, "n={n}: {} vs {}", x[i], x_true[i]);
                assert!((x[i] - xd[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] requires a row swap
        let mut t = TripletList::new(2);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        let f = factor(&t.to_csr(), false).unwrap();
        let x = f.solve(&[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_matrix_detected() {
        let mut t = TripletList::new(2);
        t.push(0, 0, 1.0);
        t.push(0, 1, 2.0);
        t.push(1, 0, 2.0);
        t.push(1, 1, 4.0);
        assert!(matches!(factor(&t.to_csr(), false), Err(LinSolveError::Singular { .. })));
    }

    #[test]
    fn bordered_system_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 6, 25] {
            let mut t = TripletList::new(n);
            for i in 0..n - 1 {
                for j in i.saturating_sub(1)..=(i + 1).min(n - 2) {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    t.push(i, j, if i == j { v + 3.0 } else { v });
                }
                // dense border column and row
                t.push(i, n - 1, rng.gen_range(-1.0..1.0));
                t.push(n - 1, i, rng.gen_range(-1.0..1.0));
            }
            t.push(n - 1, n - 1, 2.0);
            let a = t.to_csr();
            let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b = a.mul_vec(&x_true);
            let f = factor(&a, true).unwrap();
            let x = f.solve(&b).unwrap();
            for i in 0..n {
                assert!((x[i] - x_true[i]).abs() < 1e-9, "n={n} i={i}");
            }
        }
    }
}
