//! Dense linear algebra over GF(2).
//!
//! Rows are packed into `u64` words and all elimination is word-parallel XOR.
//! Matrices here are small (dimension at most a few dozen), so everything is
//! dense and allocation is per call.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
fn words(cols: usize) -> usize {
    cols.div_ceil(64)
}

/// A `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct MatGF2 {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl MatGF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::SizeMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => {
                        return Err(Error::Parse {
                            token: b.to_string(),
                            reason: "matrix entries must be 0 or 1".into(),
                        })
                    }
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix with at most 64 columns from packed rows, column `j`
    /// at bit `j`.
    pub fn from_packed_rows(cols: usize, rows: &[u64]) -> Self {
        assert!(cols <= 64);
        let mut m = Self::zeros(rows.len(), cols);
        let mask = if cols == 64 { u64::MAX } else { (1u64 << cols) - 1 };
        if cols > 0 {
            for (i, &r) in rows.iter().enumerate() {
                m.data[i] = r & mask;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// Row `i` as a single word; requires `cols <= 64`.
    #[inline]
    pub fn packed_row(&self, i: usize) -> u64 {
        debug_assert!(self.cols <= 64);
        if self.stride == 0 {
            0
        } else {
            self.data[i]
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        for w in 0..s {
            let v = self.data[src * s + w];
            self.data[dst * s + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let s = self.stride;
            for w in 0..s {
                self.data.swap(a * s + w, b * s + w);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::SizeMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let s = out.stride;
                    for w in 0..s {
                        out.data[i * s + w] ^= rhs.data[k * s + w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::SizeMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a ^= b;
        }
        Ok(out)
    }

    /// Reduces to row echelon form in place and returns the pivot columns.
    fn echelonize(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(p, r);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelonize().len()
    }

    /// A basis of the right kernel `{x : M x = 0}`, one vector per row of the
    /// returned matrix.
    pub fn kernel_basis(&self) -> Self {
        let mut e = self.clone();
        let pivots = e.echelonize();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            basis.set(k, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if e.get(r, f) {
                    basis.set(k, p, true);
                }
            }
        }
        basis
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                if self.get(i, j) {
                    m.set(a, b, true);
                }
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    /// `X Xᵀ`: entry `(i,j)` is the parity of the dot product of rows `i`, `j`.
    pub fn gram(&self) -> SymMatGF2 {
        let mut g = MatGF2::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let dot = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| (a & b).count_ones())
                    .sum::<u32>();
                if dot & 1 == 1 {
                    g.set(i, j, true);
                    g.set(j, i, true);
                }
            }
        }
        SymMatGF2(g)
    }
}

impl TryFrom<Vec<Vec<u8>>> for MatGF2 {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u8>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<MatGF2> for Vec<Vec<u8>> {
    fn from(m: MatGF2) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for MatGF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatGF2 {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(" ")?;
            }
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        f.write_str("]")
    }
}

/// A symmetric square matrix over GF(2). The diagonal is unconstrained.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct SymMatGF2(MatGF2);

impl SymMatGF2 {
    pub fn zeros(n: usize) -> Self {
        Self(MatGF2::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(MatGF2::identity(n))
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        MatGF2::from_rows(rows)?.try_into()
    }

    /// Builds the matrix from its upper triangle (diagonal included), listed
    /// row by row: `(0,0), (0,1), ..., (0,n-1), (1,1), ...`, least significant
    /// bit first.
    pub fn from_upper_bits(n: usize, bits: u64) -> Self {
        let mut m = MatGF2::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                if bits >> k & 1 == 1 {
                    m.set(i, j, true);
                    m.set(j, i, true);
                }
                k += 1;
            }
        }
        Self(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.0.get(i, j)
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.0.set(i, j, value);
        self.0.set(j, i, value);
    }

    pub fn as_mat(&self) -> &MatGF2 {
        &self.0
    }

    pub fn into_mat(self) -> MatGF2 {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn has_nonzero_diagonal(&self) -> bool {
        (0..self.n()).any(|i| self.get(i, i))
    }

    /// Off-diagonal part of row `i` as a vertex mask; requires `n <= 64`.
    pub fn flip_mask(&self, i: usize) -> u64 {
        self.0.packed_row(i) & !(1u64 << i)
    }

    pub fn principal(&self, indices: &[usize]) -> Self {
        Self(self.0.submatrix(indices, indices))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.0.add(&rhs.0).map(Self)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.0.to_rows()
    }

    /// `[[a, 0], [0, b]]`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        Self::block(a, &MatGF2::zeros(a.n(), b.n()), b).expect("dimensions agree")
    }

    /// `[[a, c], [cᵀ, b]]`.
    pub fn block(a: &Self, c: &MatGF2, b: &Self) -> Result<Self> {
        if c.rows() != a.n() || c.cols() != b.n() {
            return Err(Error::SizeMismatch {
                expected: a.n() * b.n(),
                found: c.rows() * c.cols(),
            });
        }
        let (r, n) = (a.n(), a.n() + b.n());
        let mut m = MatGF2::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = match (i < r, j < r) {
                    (true, true) => a.get(i, j),
                    (true, false) => c.get(i, j - r),
                    (false, true) => c.get(j, i - r),
                    (false, false) => b.get(i - r, j - r),
                };
                m.set(i, j, v);
            }
        }
        Ok(Self(m))
    }
}

impl TryFrom<MatGF2> for SymMatGF2 {
    type Error = Error;

    fn try_from(m: MatGF2) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::SizeMismatch {
                expected: m.rows,
                found: m.cols,
            });
        }
        for i in 0..m.rows {
            for j in i + 1..m.cols {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::Asymmetric(i, j));
                }
            }
        }
        Ok(Self(m))
    }
}

impl TryFrom<Vec<Vec<u8>>> for SymMatGF2 {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u8>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<SymMatGF2> for Vec<Vec<u8>> {
    fn from(m: SymMatGF2) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for SymMatGF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym{:?}", self.0)
    }
}

pub fn rank(m: &MatGF2) -> usize {
    m.rank()
}

pub fn gram(x: &MatGF2) -> SymMatGF2 {
    x.gram()
}

/// Factors a symmetric `a` of rank `k` as `X Xᵀ` with `rank(X) = k`.
///
/// The width of `X` is `k` unless `a` is nonzero with an all-zero diagonal,
/// in which case no width-`k` factor exists (the rows of such an `X` would
/// all be orthogonal to the all-ones vector while spanning the whole space)
/// and the width is `k + 1`, with `k` even.
///
/// Symmetric elimination peels `x xᵀ` at a diagonal pivot and
/// `x yᵀ + y xᵀ` at an off-diagonal pivot when the diagonal is exhausted.
/// Each hyperbolic pair `(p, q)` is then merged with a rank-one column `e`
/// using `e eᵀ + p qᵀ + q pᵀ = c₁c₁ᵀ + c₂c₂ᵀ + c₃c₃ᵀ` where
/// `c₁ = e+p+q`, `c₂ = e+p`, `c₃ = e+q`. With no rank-one column available
/// the first pair becomes `p, p+q, q`, costing one extra column.
pub fn factor_symmetric(a: &SymMatGF2) -> MatGF2 {
    let n = a.n();
    let mut r = a.as_mat().clone();
    let mut norms: Vec<MatGF2> = Vec::new();
    let mut pairs: Vec<(MatGF2, MatGF2)> = Vec::new();
    let column = |m: &MatGF2, i: usize| m.submatrix(&[i], &(0..n).collect::<Vec<_>>());

    loop {
        if let Some(i) = (0..n).find(|&i| r.get(i, i)) {
            let x = column(&r, i);
            r = r.add(&x.transpose().mul(&x).expect("outer product")).expect("same size");
            norms.push(x);
            continue;
        }
        let pivot = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| r.get(i, j));
        let Some((i, j)) = pivot else { break };
        let x = column(&r, i);
        let y = column(&r, j);
        let xy = x.transpose().mul(&y).expect("outer product");
        r = r.add(&xy).and_then(|m| m.add(&xy.transpose())).expect("same size");
        pairs.push((x, y));
    }

    let sum = |a: &MatGF2, b: &MatGF2| a.add(b).expect("same size");
    let mut cols: Vec<MatGF2> = Vec::new();
    let mut pair_iter = pairs.into_iter();
    let mut carry = if let Some(e) = norms.pop() {
        cols.extend(norms);
        Some(e)
    } else {
        None
    };
    if carry.is_none() {
        if let Some((p, q)) = pair_iter.next() {
            cols.push(p.clone());
            cols.push(sum(&p, &q));
            carry = Some(q);
        }
    }
    for (p, q) in pair_iter {
        let e = carry.take().expect("a rank-one column is available");
        let ep = sum(&e, &p);
        cols.push(sum(&ep, &q));
        cols.push(ep);
        carry = Some(sum(&e, &q));
    }
    cols.extend(carry);

    let mut x = MatGF2::zeros(n, cols.len());
    for (c, col) in cols.iter().enumerate() {
        for v in 0..n {
            if col.get(0, v) {
                x.set(v, c, true);
            }
        }
    }
    x
}

/// How many indices [`full_rank_principal`] should return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrincipalTarget {
    Rank(usize),
    Max,
}

/// Indices `S` such that the principal submatrix `A[S,S]` is nonsingular of
/// the requested size.
///
/// For the maximal size `rank(A)` the indices come from extending a kernel
/// basis of `A` to a basis of the whole space with standard vectors, taken
/// greedily in increasing index order; the standard vectors used are the
/// returned indices. Smaller targets are found by scanning index sets in
/// lexicographic order, which may find none (e.g. size 1 when the diagonal
/// is zero).
pub fn full_rank_principal(a: &SymMatGF2, target: PrincipalTarget) -> Result<Vec<usize>> {
    let n = a.n();
    let rk = a.rank();
    let r = match target {
        PrincipalTarget::Max => rk,
        PrincipalTarget::Rank(r) => r,
    };
    if r > rk {
        return Err(Error::Infeasible(format!(
            "requested a {r}x{r} nonsingular principal submatrix of a rank-{rk} matrix"
        )));
    }
    if r == rk {
        let kernel = a.as_mat().kernel_basis();
        let mut basis: Vec<Vec<u64>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        let insert = |v: Vec<u64>, basis: &mut Vec<Vec<u64>>, pivots: &mut Vec<usize>| -> bool {
            let mut v = v;
            for (b, &p) in basis.iter().zip(pivots.iter()) {
                if v[p / 64] >> (p % 64) & 1 == 1 {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
            }
            match (0..n).find(|&p| v[p / 64] >> (p % 64) & 1 == 1) {
                Some(p) => {
                    basis.push(v);
                    pivots.push(p);
                    true
                }
                None => false,
            }
        };
        for k in 0..kernel.rows() {
            let inserted = insert(kernel.row(k).to_vec(), &mut basis, &mut pivots);
            debug_assert!(inserted);
        }
        let mut chosen = Vec::with_capacity(r);
        for i in 0..n {
            if chosen.len() == r {
                break;
            }
            let mut e = vec![0u64; words(n)];
            e[i / 64] |= 1 << (i % 64);
            if insert(e, &mut basis, &mut pivots) {
                chosen.push(i);
            }
        }
        debug_assert_eq!(chosen.len(), r);
        return Ok(chosen);
    }
    (0..n)
        .combinations(r)
        .find(|s| a.principal(s).rank() == r)
        .ok_or_else(|| {
            Error::Infeasible(format!("no nonsingular {r}x{r} principal submatrix exists"))
        })
}

/// Inverse of a nonsingular symmetric matrix by Gauss-Jordan elimination.
pub fn inverse_full_rank(a: &SymMatGF2) -> Result<SymMatGF2> {
    let n = a.n();
    let mut m = a.as_mat().clone();
    let mut inv = MatGF2::identity(n);
    for c in 0..n {
        let p = (c..n).find(|&i| m.get(i, c)).ok_or(Error::Singular)?;
        m.swap_rows(p, c);
        inv.swap_rows(p, c);
        for i in 0..n {
            if i != c && m.get(i, c) {
                m.xor_row_into(c, i);
                inv.xor_row_into(c, i);
            }
        }
    }
    inv.try_into()
}

/// Block elimination of `[[a', c], [cᵀ, b]]`: returns `b + cᵀ a'⁻¹ c`.
pub fn schur_update(a_prime: &SymMatGF2, c: &MatGF2, b: &SymMatGF2) -> Result<SymMatGF2> {
    if c.rows() != a_prime.n() {
        return Err(Error::SizeMismatch {
            expected: a_prime.n(),
            found: c.rows(),
        });
    }
    if c.cols() != b.n() {
        return Err(Error::SizeMismatch {
            expected: b.n(),
            found: c.cols(),
        });
    }
    let inv = inverse_full_rank(a_prime)?;
    let update = c.transpose().mul(inv.as_mat())?.mul(c)?;
    let update: SymMatGF2 = update.try_into()?;
    b.add(&update)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[u8]]) -> MatGF2 {
        MatGF2::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn s(rows: &[&[u8]]) -> SymMatGF2 {
        m(rows).try_into().unwrap()
    }

    /// Row reduction on plain bytes, independent of the packed routines.
    fn naive_rank(rows: &[Vec<u8>]) -> usize {
        let mut a: Vec<Vec<u8>> = rows.to_vec();
        let cols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..a.len()).find(|&i| a[i][c] == 1) {
                a.swap(p, rank);
                for i in 0..a.len() {
                    if i != rank && a[i][c] == 1 {
                        for j in 0..cols {
                            a[i][j] ^= a[rank][j];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(MatGF2::identity(3).rank(), 3);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).rank(), 2);
        assert_eq!(m(&[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(MatGF2::zeros(0, 0).rank(), 0);
        assert_eq!(MatGF2::zeros(3, 0).rank(), 0);
    }

    #[test]
    fn rank_matches_naive_oracle_exhaustively_small() {
        for (r, c) in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 4)] {
            for bits in 0u64..1 << (r * c) {
                let rows: Vec<Vec<u8>> = (0..r)
                    .map(|i| (0..c).map(|j| (bits >> (i * c + j) & 1) as u8).collect())
                    .collect();
                assert_eq!(MatGF2::from_rows(&rows).unwrap().rank(), naive_rank(&rows));
            }
        }
    }

    proptest! {
        #[test]
        fn rank_matches_naive_oracle_5x5(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 5), 5)) {
            prop_assert_eq!(MatGF2::from_rows(&rows).unwrap().rank(), naive_rank(&rows));
        }

        #[test]
        fn rank_wide_rows(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 70), 1..8)) {
            prop_assert_eq!(MatGF2::from_rows(&rows).unwrap().rank(), naive_rank(&rows));
        }

        #[test]
        fn gram_rank_bounded(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 4), 1..7)) {
            let x = MatGF2::from_rows(&rows).unwrap();
            prop_assert!(x.gram().rank() <= x.rank());
        }
    }

    #[test]
    fn gram_examples() {
        assert_eq!(m(&[&[1], &[1], &[0]]).gram(), s(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 0]]));
        assert_eq!(MatGF2::identity(4).gram(), SymMatGF2::identity(4));
        assert_eq!(m(&[&[1, 1, 0], &[0, 1, 1]]).gram(), s(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn factor_examples() {
        let x = factor_symmetric(&SymMatGF2::identity(3));
        assert_eq!(x, MatGF2::identity(3));
        let x = factor_symmetric(&s(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 0]]));
        assert_eq!(x, m(&[&[1], &[1], &[0]]));
        let h = s(&[&[0, 1], &[1, 0]]);
        let x = factor_symmetric(&h);
        assert_eq!(x.cols(), 3);
        assert_eq!(x.rank(), 2);
        assert_eq!(x.gram(), h);
        assert_eq!(factor_symmetric(&SymMatGF2::zeros(3)).cols(), 0);
    }

    #[test]
    fn hyperbolic_plane_has_no_width_two_factor() {
        let h = s(&[&[0, 1], &[1, 0]]);
        for bits in 0u64..16 {
            let x = MatGF2::from_packed_rows(2, &[bits & 3, bits >> 2]);
            assert_ne!(x.gram(), h);
        }
    }

    #[test]
    fn factor_exhaustive_up_to_4() {
        for n in 0..=4usize {
            let tri = n * (n + 1) / 2;
            for bits in 0u64..1 << tri {
                let a = SymMatGF2::from_upper_bits(n, bits);
                let k = a.rank();
                let x = factor_symmetric(&a);
                assert_eq!(x.gram(), a, "{a:?}");
                assert_eq!(x.rank(), k);
                let expected = if k > 0 && !a.has_nonzero_diagonal() { k + 1 } else { k };
                assert_eq!(x.cols(), expected, "{a:?}");
                if x.cols() == k + 1 {
                    assert_eq!(k % 2, 0);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn factor_random_up_to_12(n in 0usize..=12, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut a = SymMatGF2::zeros(n);
            let zero_diag = rng.gen_bool(0.3);
            for i in 0..n {
                for j in i..n {
                    if (i != j || !zero_diag) && rng.gen_bool(0.5) {
                        a.set(i, j, true);
                    }
                }
            }
            let x = factor_symmetric(&a);
            prop_assert_eq!(x.gram(), a.clone());
            prop_assert_eq!(x.rank(), a.rank());
            prop_assert!(x.cols() == a.rank() || (x.cols() == a.rank() + 1 && a.rank().is_multiple_of(2)));
        }
    }

    #[test]
    fn principal_examples() {
        let a = s(&[&[1, 1], &[1, 1]]);
        assert_eq!(full_rank_principal(&a, PrincipalTarget::Rank(1)).unwrap(), vec![0]);
        let i3 = SymMatGF2::identity(3);
        assert_eq!(full_rank_principal(&i3, PrincipalTarget::Rank(3)).unwrap(), vec![0, 1, 2]);
        let h = s(&[&[0, 1], &[1, 0]]);
        assert_eq!(full_rank_principal(&h, PrincipalTarget::Rank(2)).unwrap(), vec![0, 1]);
        assert!(matches!(
            full_rank_principal(&h, PrincipalTarget::Rank(1)),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            full_rank_principal(&a, PrincipalTarget::Rank(2)),
            Err(Error::Infeasible(_))
        ));
        assert_eq!(full_rank_principal(&a, PrincipalTarget::Max).unwrap(), vec![0]);
    }

    #[test]
    fn principal_exhaustive_up_to_5() {
        for n in 0..=5usize {
            let tri = n * (n + 1) / 2;
            for bits in 0u64..1 << tri {
                let a = SymMatGF2::from_upper_bits(n, bits);
                let k = a.rank();
                let s_max = full_rank_principal(&a, PrincipalTarget::Max).unwrap();
                assert_eq!(s_max.len(), k);
                assert_eq!(a.principal(&s_max).rank(), k);
                for r in 0..=k {
                    if let Ok(s) = full_rank_principal(&a, PrincipalTarget::Rank(r)) {
                        assert_eq!(s.len(), r);
                        assert_eq!(a.principal(&s).rank(), r);
                    } else {
                        // infeasible only when no r-subset works at all
                        assert!((0..n).combinations(r).all(|s| a.principal(&s).rank() < r));
                    }
                }
                if k >= 2 {
                    // every symmetric matrix of rank >= 2 has a nonsingular 2x2 principal block
                    assert!(full_rank_principal(&a, PrincipalTarget::Rank(2)).is_ok());
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse_full_rank(&SymMatGF2::identity(3)).unwrap(), SymMatGF2::identity(3));
        let h = s(&[&[0, 1], &[1, 0]]);
        assert_eq!(inverse_full_rank(&h).unwrap(), h);
        let a = s(&[&[1, 1], &[1, 0]]);
        let inv = inverse_full_rank(&a).unwrap();
        assert_eq!(inv, s(&[&[0, 1], &[1, 1]]));
        assert_eq!(a.as_mat().mul(inv.as_mat()).unwrap(), MatGF2::identity(2));
        assert_eq!(inverse_full_rank(&s(&[&[1, 1], &[1, 1]])), Err(Error::Singular));
    }

    #[test]
    fn schur_examples() {
        let b = s(&[&[1, 0], &[0, 1]]);
        let a = SymMatGF2::identity(1);
        assert_eq!(schur_update(&a, &MatGF2::zeros(1, 2), &b).unwrap(), b);

        let a = SymMatGF2::identity(2);
        let c = m(&[&[1], &[1]]);
        let b = s(&[&[0]]);
        let b2 = schur_update(&a, &c, &b).unwrap();
        assert_eq!(b2, s(&[&[0]]));
        let full = SymMatGF2::block(&a, &c, &b).unwrap();
        assert_eq!(full, s(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]]));
        assert_eq!(full.rank(), 2);

        let one = s(&[&[1]]);
        assert_eq!(schur_update(&one, &m(&[&[1]]), &one).unwrap(), s(&[&[0]]));

        assert!(matches!(
            schur_update(&one, &MatGF2::zeros(2, 1), &one),
            Err(Error::SizeMismatch { .. })
        ));
        assert_eq!(
            schur_update(&s(&[&[0]]), &m(&[&[1]]), &one),
            Err(Error::Singular)
        );
    }

    proptest! {
        #[test]
        fn schur_rank_identity(r in 1usize..6, mdim in 0usize..6, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = loop {
                let a = SymMatGF2::from_upper_bits(r, rng.gen());
                if a.rank() == r {
                    break a;
                }
            };
            let b = SymMatGF2::from_upper_bits(mdim, rng.gen());
            let mut c = MatGF2::zeros(r, mdim);
            for i in 0..r {
                for j in 0..mdim {
                    c.set(i, j, rng.gen());
                }
            }
            let b2 = schur_update(&a, &c, &b).unwrap();
            let full = SymMatGF2::block(&a, &c, &b).unwrap();
            prop_assert_eq!(full.rank(), r + b2.rank());
        }
    }

    #[test]
    fn kernel_basis_is_kernel() {
        let a = m(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 0]]);
        let k = a.kernel_basis();
        assert_eq!(k.rows(), 2);
        assert!(a.mul(&k.transpose()).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip() {
        let a = s(&[&[0, 1], &[1, 0]]);
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(j, "[[0,1],[1,0]]");
        assert_eq!(serde_json::from_str::<SymMatGF2>(&j).unwrap(), a);
        assert!(serde_json::from_str::<SymMatGF2>("[[0,1],[0,0]]").is_err());
    }
}
