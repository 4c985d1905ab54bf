//! Compressed sparse column storage sized for repeated matrix-vector products.

/// Sparse matrix in compressed sparse column form.
///
/// Row indices inside a column are ascending and unique; duplicate triplets
/// are summed at construction. Stored values are finite and nonzero columns
/// can be renormalized without touching the sparsity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(u32, u32, f64)]) -> Self {
        let mut counts = vec![0usize; cols + 1];
        for &(r, c, v) in triplets {
            assert!((r as usize) < rows && (c as usize) < cols, "triplet out of bounds");
            assert!(v.is_finite(), "non-finite triplet value");
            counts[c as usize + 1] += 1;
        }
        for c in 0..cols {
            counts[c + 1] += counts[c];
        }
        let mut tmp_rows = vec![0u32; triplets.len()];
        let mut tmp_vals = vec![0.0f64; triplets.len()];
        let mut cursor = counts.clone();
        for &(r, c, v) in triplets {
            let slot = cursor[c as usize];
            tmp_rows[slot] = r;
            tmp_vals[slot] = v;
            cursor[c as usize] += 1;
        }

        let mut col_ptr = Vec::with_capacity(cols + 1);
        let mut row_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        col_ptr.push(0);
        let mut scratch: Vec<(u32, f64)> = Vec::new();
        for c in 0..cols {
            scratch.clear();
            for i in counts[c]..counts[c + 1] {
                scratch.push((tmp_rows[i], tmp_vals[i]));
            }
            scratch.sort_unstable_by_key(|&(r, _)| r);
            let mut k = 0;
            while k < scratch.len() {
                let (r, mut v) = scratch[k];
                k += 1;
                while k < scratch.len() && scratch[k].0 == r {
                    v += scratch[k].1;
                    k += 1;
                }
                row_idx.push(r);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        CscMatrix { rows, cols, col_ptr, row_idx, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Entries of column `c` as parallel slices of row indices and values.
    pub fn col(&self, c: usize) -> (&[u32], &[f64]) {
        let lo = self.col_ptr[c];
        let hi = self.col_ptr[c + 1];
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn col_nnz(&self, c: usize) -> usize {
        self.col_ptr[c + 1] - self.col_ptr[c]
    }

    pub fn col_sum(&self, c: usize) -> f64 {
        let (_, vals) = self.col(c);
        vals.iter().sum()
    }

    /// Value at (row, col); zero when the slot is not stored.
    pub fn get(&self, row: u32, col: usize) -> f64 {
        let (rows, vals) = self.col(col);
        match rows.binary_search(&row) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Rescales every nonzero column to sum to one; zero columns stay zero.
    pub fn column_normalized(&self) -> CscMatrix {
        let mut out = self.clone();
        for c in 0..self.cols {
            let lo = self.col_ptr[c];
            let hi = self.col_ptr[c + 1];
            let s: f64 = self.values[lo..hi].iter().sum();
            if s > 0.0 {
                for v in &mut out.values[lo..hi] {
                    *v /= s;
                }
            }
        }
        out
    }

    /// out = A * x, overwriting `out`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        out.fill(0.0);
        self.apply_scaled_add(x, 1.0, out);
    }

    /// out += scale * A * x. Columns with zero input are skipped.
    pub fn apply_scaled_add(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for c in 0..self.cols {
            let xc = x[c];
            if xc == 0.0 {
                continue;
            }
            let w = scale * xc;
            let lo = self.col_ptr[c];
            let hi = self.col_ptr[c + 1];
            for k in lo..hi {
                out[self.row_idx[k] as usize] += w * self.values[k];
            }
        }
    }

    /// Row-major dense copy, `rows x cols`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.rows * self.cols];
        for c in 0..self.cols {
            let (rows, vals) = self.col(c);
            for (&r, &v) in rows.iter().zip(vals) {
                m[r as usize * self.cols + c] += v;
            }
        }
        m
    }
}
