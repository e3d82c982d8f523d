//! Minimal compressed-sparse-row matrix: just what the finite-difference
//! operators and Krylov solvers need.

/// CSR matrix with square shape n×n.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

impl Csr {
    /// Builds from per-row (column, value) lists; columns within a row must
    /// be sorted and unique (the assemblers guarantee it).
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(nnz);
        let mut data = Vec::with_capacity(nnz);
        indptr.push(0);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (j, v) in row {
                indices.push(j);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Csr { n, indptr, indices, data }
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.data[k] * x[self.indices[k] as usize];
            }
            out[i] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec(x, &mut out);
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if self.indices[k] as usize == i {
                    d[i] = self.data[k];
                }
            }
        }
        d
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        for k in self.indptr[i]..self.indptr[i + 1] {
            if self.indices[k] as usize == j {
                return self.data[k];
            }
        }
        0.0
    }

    /// x·(A x) accumulated row by row, and the same value rearranged as a
    /// graph quadratic form: Σ_{i<j} (−s_ij)(x_i−x_j)² + Σ_i σ_i x_i² with
    /// s_ij the symmetrized off-diagonal and σ_i the symmetrized row sum.
    /// The two orderings agree to rounding; diagnostics uses the pair as a
    /// summation-by-parts self-check.
    pub fn quadratic_form_both(&self, x: &[f64]) -> (f64, f64) {
        let ax = self.matvec_alloc(x);
        let pairing: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();

        let mut edge_sum = 0.0;
        let mut row_weight = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let j = self.indices[k] as usize;
                let v = self.data[k];
                row_weight[i] += 0.5 * (v + self.entry(j, i));
                if j > i {
                    let s = 0.5 * (v + self.entry(j, i));
                    edge_sum += (-s) * (x[i] - x[j]) * (x[i] - x[j]);
                }
            }
        }
        for i in 0..self.n {
            edge_sum += row_weight[i] * x[i] * x[i];
        }
        (pairing, edge_sum)
    }
}
