//! Exact rank and kernel computations over F_p.
//!
//! Matrices pick a dense or sparse layout at construction: sparse when fewer
//! than 10% of the entries are nonzero. Multiplication maps on monomial bases
//! are usually far sparser than that.

use std::collections::HashMap;

use rayon::prelude::*;

/// Sorted `(column, value)` pairs with nonzero values.
pub type SparseRow = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Storage {
    Dense(Vec<u32>),
    Sparse(Vec<SparseRow>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFp {
    rows: usize,
    cols: usize,
    prime: u32,
    storage: Storage,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

fn prefers_sparse(nnz: usize, rows: usize, cols: usize) -> bool {
    (nnz as u128) * 10 < (rows as u128) * (cols as u128)
}

impl MatrixFp {
    /// Row-major dense entries, reduced mod p.
    pub fn from_dense(rows: usize, cols: usize, prime: u32, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let entries: Vec<u32> = entries.into_iter().map(|v| v % prime).collect();
        let m = MatrixFp {
            rows,
            cols,
            prime,
            storage: Storage::Dense(entries),
        };
        if prefers_sparse(m.nnz(), rows, cols) {
            m.into_sparse()
        } else {
            m
        }
    }

    /// Entries given as `(row, col, value)`; duplicate positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        prime: u32,
        triplets: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Self {
        let p = prime as u64;
        let mut grouped: Vec<SparseRow> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) out of bounds");
            grouped[r].push((c, v % prime));
        }
        for row in &mut grouped {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut merged: SparseRow = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv = ((*lv as u64 + v as u64) % p) as u32,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0);
            *row = merged;
        }
        let m = MatrixFp {
            rows,
            cols,
            prime,
            storage: Storage::Sparse(grouped),
        };
        if prefers_sparse(m.nnz(), rows, cols) {
            m
        } else {
            m.into_dense()
        }
    }

    pub fn identity(n: usize, prime: u32) -> Self {
        Self::from_triplets(n, n, prime, (0..n).map(|i| (i, i, 1)))
    }

    pub fn zeros(rows: usize, cols: usize, prime: u32) -> Self {
        Self::from_triplets(rows, cols, prime, std::iter::empty())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(v) => v.iter().filter(|&&x| x != 0).count(),
            Storage::Sparse(rows) => rows.iter().map(Vec::len).sum(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        match &self.storage {
            Storage::Dense(v) => v[r * self.cols + c],
            Storage::Sparse(rows) => rows[r]
                .binary_search_by_key(&c, |&(col, _)| col)
                .map(|i| rows[r][i].1)
                .unwrap_or(0),
        }
    }

    pub fn into_dense(self) -> Self {
        match self.storage {
            Storage::Dense(_) => self,
            Storage::Sparse(rows) => {
                let mut v = vec![0u32; self.rows * self.cols];
                for (r, row) in rows.iter().enumerate() {
                    for &(c, x) in row {
                        v[r * self.cols + c] = x;
                    }
                }
                MatrixFp {
                    storage: Storage::Dense(v),
                    ..self
                }
            }
        }
    }

    pub fn into_sparse(self) -> Self {
        match self.storage {
            Storage::Sparse(_) => self,
            Storage::Dense(v) => {
                let rows = (0..self.rows)
                    .map(|r| {
                        v[r * self.cols..(r + 1) * self.cols]
                            .iter()
                            .enumerate()
                            .filter(|(_, &x)| x != 0)
                            .map(|(c, &x)| (c, x))
                            .collect()
                    })
                    .collect();
                MatrixFp {
                    storage: Storage::Sparse(rows),
                    ..self
                }
            }
        }
    }

    /// `M * v` over F_p.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.prime as u64;
        (0..self.rows)
            .map(|r| {
                let acc = match &self.storage {
                    Storage::Dense(d) => d[r * self.cols..(r + 1) * self.cols]
                        .iter()
                        .zip(v)
                        .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p),
                    Storage::Sparse(rows) => rows[r]
                        .iter()
                        .fold(0u64, |acc, &(c, a)| (acc + a as u64 * v[c] as u64) % p),
                };
                acc as u32
            })
            .collect()
    }
}

/// Column-by-column elimination on a dense copy; the pivot is the first
/// nonzero entry at or below the current row.
fn dense_rank(rows: usize, cols: usize, p: u64, mut a: Vec<u32>) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in c..cols {
                a.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(a[rank * cols + c] as u64, p);
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols..];
        for row in tail.chunks_mut(cols) {
            let lead = row[c] as u64;
            if lead == 0 {
                continue;
            }
            let factor = lead * inv % p;
            let neg = p - factor;
            for j in c..cols {
                let pv = pivot_row[j] as u64;
                if pv != 0 {
                    row[j] = ((row[j] as u64 + neg * pv) % p) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `a - s * b` for sorted sparse rows.
fn sub_scaled(a: &[(usize, u32)], b: &[(usize, u32)], s: u64, p: u64) -> SparseRow {
    let neg = (p - s % p) % p;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, (neg * b[j].1 as u64 % p) as u32));
            j += 1;
        } else {
            let v = (a[i].1 as u64 + neg * b[j].1 as u64) % p;
            if v != 0 {
                out.push((a[i].0, v as u32));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Each row is reduced against the stored pivots (keyed by leading column)
/// until it vanishes or opens a new pivot column.
fn sparse_rank(rows: &[SparseRow], p: u64) -> usize {
    let mut pivots: HashMap<usize, SparseRow> = HashMap::new();
    for row in rows {
        let mut r = row.clone();
        while let Some(&(lead, val)) = r.first() {
            match pivots.get(&lead) {
                Some(piv) => r = sub_scaled(&r, piv, val as u64, p),
                None => {
                    let inv = inv_mod(val as u64, p);
                    for e in &mut r {
                        e.1 = (e.1 as u64 * inv % p) as u32;
                    }
                    pivots.insert(lead, r);
                    break;
                }
            }
        }
    }
    pivots.len()
}

pub fn rank_fp(m: &MatrixFp) -> usize {
    let p = m.prime as u64;
    match &m.storage {
        Storage::Dense(v) => dense_rank(m.rows, m.cols, p, v.clone()),
        Storage::Sparse(rows) => sparse_rank(rows, p),
    }
}

/// Ranks of independent matrices, evaluated in parallel, returned in input
/// order.
pub fn rank_batch(ms: &[MatrixFp]) -> Vec<usize> {
    ms.par_iter().map(rank_fp).collect()
}

/// Basis of `{v : M v = 0}` read off the reduced row echelon form. One
/// vector per free column, in increasing column order, with a 1 in its own
/// free column.
pub fn kernel_basis_fp(m: &MatrixFp) -> Vec<Vec<u32>> {
    let (rows, cols) = (m.rows, m.cols);
    let p = m.prime as u64;
    let Storage::Dense(mut a) = m.clone().into_dense().storage else {
        unreachable!()
    };
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            a.swap(piv * cols + j, rank * cols + j);
        }
        let inv = inv_mod(a[rank * cols + c] as u64, p);
        for j in 0..cols {
            a[rank * cols + j] = (a[rank * cols + j] as u64 * inv % p) as u32;
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = a[r * cols + c] as u64;
            if factor == 0 {
                continue;
            }
            let neg = p - factor;
            for j in 0..cols {
                let pv = a[rank * cols + j] as u64;
                a[r * cols + j] = ((a[r * cols + j] as u64 + neg * pv) % p) as u32;
            }
        }
        pivot_cols.push(c);
        rank += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u32; cols];
            v[free] = 1;
            for (i, &pc) in pivot_cols.iter().enumerate() {
                let x = a[i * cols + free] as u64;
                v[pc] = ((p - x) % p) as u32;
            }
            v
        })
        .collect()
}
