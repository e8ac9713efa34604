//! Dense linear algebra over the prime field F_p.
//!
//! Everything the library solves "by prime-field linear algebra" goes through
//! here: kernels of additive maps, affine solution sets, and subspace
//! membership. Vectors are plain `Vec<u32>` of residues; coordinate `i` of an
//! extension-field element is its coefficient of `g^i`, so the most
//! significant coordinate for the lexicographic order is the last one.

pub(crate) fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (s % p as u64) as u32
}

pub(crate) fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    add_mod(a, p - b % p, p)
}

pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub(crate) fn pow_mod(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, (p - 2) as u64, p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(p: u32, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = FpMatrix::zeros(p, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc += self.get(i, j) as u64 * v[j] as u64;
                    if acc >= 1 << 62 {
                        acc %= self.p as u64;
                    }
                }
                (acc % self.p as u64) as u32
            })
            .collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = FpMatrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = add_mod(out.get(i, j), mul_mod(a, other.get(k, j), self.p), self.p);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &FpMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = add_mod(*a, *b, self.p);
        }
    }

    /// Row-reduces in place; returns the pivot column of each nonzero row.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, r * self.cols + j);
                }
            }
            let inv = inv_mod(self.get(r, c), p);
            for j in c..self.cols {
                let v = mul_mod(self.get(r, j), inv, p);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = sub_mod(self.get(i, j), mul_mod(f, self.get(r, j), p), p);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// A basis of the right kernel `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m.get(row, free)) % p;
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `M v = rhs`, free variables set to zero.
    pub fn solve(&self, rhs: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = FpMatrix::zeros(self.p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, rhs[i]);
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![0u32; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = aug.get(row, self.cols);
        }
        Some(v)
    }
}

/// Echelon basis of `span(vectors)` with pivots on the most significant
/// (highest-index) coordinates, each pivot entry equal to one and cleared in
/// every other basis vector.
pub(crate) fn echelon_high(p: u32, dim: usize, vectors: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let rows: Vec<Vec<u32>> = vectors
        .iter()
        .map(|v| v.iter().rev().copied().collect())
        .collect();
    let mut m = FpMatrix::zeros(p, rows.len(), dim);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    let rank = m.rref().len();
    (0..rank)
        .map(|i| (0..dim).rev().map(|j| m.get(i, j)).collect())
        .collect()
}

/// Lexicographically least element of `base + span(directions)`, comparing
/// from the highest coordinate down.
pub(crate) fn lex_min_affine(p: u32, base: &[u32], directions: &[Vec<u32>]) -> Vec<u32> {
    let dim = base.len();
    let ech = echelon_high(p, dim, directions);
    let mut x = base.to_vec();
    for v in &ech {
        let piv = (0..dim).rev().find(|&j| v[j] != 0).expect("nonzero basis vector");
        let f = x[piv];
        if f != 0 {
            for j in 0..dim {
                x[j] = sub_mod(x[j], mul_mod(f, v[j], p), p);
            }
        }
    }
    x
}

/// All `p^k` combinations of a basis, sorted lexicographically (highest
/// coordinate most significant).
pub(crate) fn enumerate_span(p: u32, dim: usize, basis: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; dim]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for v in &out {
            for c in 0..p {
                let w: Vec<u32> = v
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| add_mod(x, mul_mod(c, y, p), p))
                    .collect();
                next.push(w);
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_singular_matrix() {
        // rows (1 1 0), (0 1 1) over F_2: kernel spanned by (1 1 1)
        let m = FpMatrix::from_columns(2, 2, &[vec![1, 0], vec![1, 1], vec![0, 1]]);
        let k = m.kernel();
        assert_eq!(k, vec![vec![1, 1, 1]]);
        assert_eq!(m.mul_vec(&k[0]), vec![0, 0]);
    }

    #[test]
    fn solve_and_inconsistent() {
        let m = FpMatrix::from_columns(3, 2, &[vec![1, 0], vec![1, 2]]);
        let x = m.solve(&[1, 0]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![1, 0]);
        let sing = FpMatrix::from_columns(3, 2, &[vec![1, 1], vec![1, 1]]);
        assert!(sing.solve(&[1, 0]).is_none());
    }

    #[test]
    fn lex_min_clears_high_coordinates() {
        // {(0,1) + c (1,1)} over F_2 = {(0,1), (1,0)}: least is (1,0)
        let x = lex_min_affine(2, &[0, 1], &[vec![1, 1]]);
        assert_eq!(x, vec![1, 0]);
    }

    #[test]
    fn span_enumeration_sorted() {
        let all = enumerate_span(2, 2, &[vec![1, 0], vec![0, 1]]);
        assert_eq!(all, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
    }
}
