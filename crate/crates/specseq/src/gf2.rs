//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors and matrix rows pack 64 coefficients per machine word. Matrices
//! act on column vectors (`m.mul_vec(v)` computes `m * v`), and subspaces of
//! `F_2^n` are stored as row bases in reduced row-echelon form. Echelon form
//! is the canonical representative: two subspaces are equal iff their stored
//! bases are bit-identical, so `PartialEq` on [`F2Subspace`] is semantic
//! equality.
//!
//! Everything here is exact; there is no tolerance anywhere in the crate.

use std::fmt;

const WORD_BITS: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Bit vector over GF(2) with a fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vec {
    len: usize,
    words: Vec<u64>,
}

impl F2Vec {
    pub fn zeros(len: usize) -> Self {
        F2Vec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from 0/1 entries.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = F2Vec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Unit coordinate vector `e_i` in ambient dimension `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = F2Vec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &F2Vec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit, if any.
    pub fn leading_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterates over the indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// Dense GF(2) matrix, row-major, each row bit-packed.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    bits: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        F2Matrix {
            rows,
            cols,
            wpr,
            bits: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = F2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. All rows must have equal
    /// length; `cols` disambiguates the zero-row case.
    pub fn from_bit_rows(cols: usize, rows: &[Vec<u8>]) -> Self {
        let mut m = F2Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[F2Vec]) -> Self {
        let mut m = F2Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.bits[i * m.wpr..(i + 1) * m.wpr].copy_from_slice(&r.words);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.bits[r * self.wpr + c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.bits[r * self.wpr + c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> F2Vec {
        assert!(r < self.rows, "row {r} out of range {}", self.rows);
        F2Vec {
            len: self.cols,
            words: self.bits[r * self.wpr..(r + 1) * self.wpr].to_vec(),
        }
    }

    pub fn set_row(&mut self, r: usize, v: &F2Vec) {
        assert_eq!(v.len, self.cols, "row length mismatch");
        self.bits[r * self.wpr..(r + 1) * self.wpr].copy_from_slice(&v.words);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (a, b) = (a.min(b), a.max(b));
        let (top, bottom) = self.bits.split_at_mut(b * self.wpr);
        top[a * self.wpr..(a + 1) * self.wpr].swap_with_slice(&mut bottom[..self.wpr]);
    }

    /// Adds row `src` into row `dst` (GF(2) sum).
    fn row_xor(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        let (lo, hi) = (dst.min(src), dst.max(src));
        let (top, bottom) = self.bits.split_at_mut(hi * self.wpr);
        let (lo_slice, hi_slice) = (
            &top[lo * self.wpr..(lo + 1) * self.wpr],
            &mut bottom[..self.wpr],
        );
        if dst > src {
            for (d, s) in hi_slice.iter_mut().zip(lo_slice) {
                *d ^= s;
            }
        } else {
            // Split borrows force the copy; rows are short.
            let src_copy = hi_slice.to_vec();
            let top_mut = &mut top[lo * self.wpr..(lo + 1) * self.wpr];
            for (d, s) in top_mut.iter_mut().zip(&src_copy) {
                *d ^= s;
            }
        }
    }

    /// Matrix product `self * rhs` (composition of linear maps).
    pub fn mul(&self, rhs: &F2Matrix) -> F2Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = F2Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let base = i * out.wpr;
            for j in self.row(i).ones() {
                let rb = j * rhs.wpr;
                for w in 0..rhs.wpr {
                    out.bits[base + w] ^= rhs.bits[rb + w];
                }
            }
        }
        out
    }

    /// Matrix-vector product; `v` is a column vector of length `cols`.
    pub fn mul_vec(&self, v: &F2Vec) -> F2Vec {
        assert_eq!(self.cols, v.len, "vector length mismatch");
        let mut out = F2Vec::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = 0u64;
            for (w, &vw) in self.bits[i * self.wpr..(i + 1) * self.wpr]
                .iter()
                .zip(&v.words)
            {
                acc ^= w & vw;
            }
            if acc.count_ones() % 2 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    pub fn add(&self, rhs: &F2Matrix) -> F2Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(&rhs.bits) {
            *a ^= b;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut out = F2Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).ones() {
                out.set(j, i, true);
            }
        }
        out
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn stack(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.cols, "column mismatch in stack");
        let mut out = F2Matrix::zeros(self.rows + other.rows, self.cols);
        out.bits[..self.bits.len()].copy_from_slice(&self.bits);
        out.bits[self.bits.len()..].copy_from_slice(&other.bits);
        out
    }

    /// Reduced row-echelon form together with the pivot column list.
    /// The result is canonical for the row space.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.row_xor(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Kernel of the column action `v -> self * v`, as a subspace of
    /// `F_2^{cols}`. dim ker + rank = cols.
    pub fn kernel(&self) -> F2Subspace {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = F2Vec::unit(self.cols, free);
            for (row, &pc) in pivots.iter().enumerate() {
                if r.get(row, free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        F2Subspace::from_spanning(self.cols, &basis)
    }

    /// Image of the column action, as a subspace of `F_2^{rows}`.
    pub fn image(&self) -> F2Subspace {
        let t = self.transpose();
        let rows: Vec<F2Vec> = (0..t.rows).map(|i| t.row(i)).collect();
        F2Subspace::from_spanning(self.rows, &rows)
    }

    /// Solves `self * x = rhs`; returns any solution, or `None` when the
    /// system is inconsistent.
    pub fn solve(&self, rhs: &F2Vec) -> Option<F2Vec> {
        assert_eq!(rhs.len, self.rows, "rhs length mismatch");
        // Augment with rhs as an extra column and reduce.
        let mut aug = F2Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            let mut row = F2Vec::zeros(self.cols + 1);
            for j in self.row(i).ones() {
                row.set(j, true);
            }
            if rhs.get(i) {
                row.set(self.cols, true);
            }
            aug.set_row(i, &row);
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = F2Vec::zeros(self.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            if r.get(row, self.cols) {
                x.set(pc, true);
            }
        }
        Some(x)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Subspace of `F_2^{ambient}` held as a reduced row-echelon basis.
///
/// The basis is canonical, so derived equality is subspace equality.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Subspace {
    ambient: usize,
    basis: F2Matrix,
    pivots: Vec<usize>,
}

impl F2Subspace {
    pub fn zero(ambient: usize) -> Self {
        F2Subspace {
            ambient,
            basis: F2Matrix::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let mut rows = Vec::with_capacity(ambient);
        for i in 0..ambient {
            rows.push(F2Vec::unit(ambient, i));
        }
        F2Subspace {
            ambient,
            basis: F2Matrix::from_rows(ambient, &rows),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given vectors, reduced to canonical form.
    pub fn from_spanning(ambient: usize, vectors: &[F2Vec]) -> Self {
        let m = F2Matrix::from_rows(ambient, vectors);
        Self::from_spanning_matrix(&m)
    }

    /// Span of the rows of `m`.
    pub fn from_spanning_matrix(m: &F2Matrix) -> Self {
        let (r, pivots) = m.rref();
        let dim = pivots.len();
        let mut basis = F2Matrix::zeros(dim, m.cols);
        for i in 0..dim {
            basis.set_row(i, &r.row(i));
        }
        F2Subspace {
            ambient: m.cols,
            basis,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    /// Canonical echelon basis, one vector per row.
    pub fn basis_matrix(&self) -> &F2Matrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> impl Iterator<Item = F2Vec> + '_ {
        (0..self.basis.rows).map(|i| self.basis.row(i))
    }

    /// Reduces `v` against the echelon basis; the remainder is zero iff
    /// `v` lies in the subspace.
    pub fn reduce(&self, v: &F2Vec) -> F2Vec {
        assert_eq!(v.len, self.ambient, "ambient mismatch");
        let mut rem = v.clone();
        for (row, &pc) in self.pivots.iter().enumerate() {
            if rem.get(pc) {
                rem.xor_assign(&self.basis.row(row));
            }
        }
        rem
    }

    pub fn contains(&self, v: &F2Vec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &F2Subspace) -> bool {
        other.basis_rows().all(|v| self.contains(&v))
    }

    /// Coordinates of `v` in the echelon basis, or `None` if outside.
    pub fn coordinates(&self, v: &F2Vec) -> Option<F2Vec> {
        assert_eq!(v.len, self.ambient, "ambient mismatch");
        let mut rem = v.clone();
        let mut coords = F2Vec::zeros(self.dim());
        for (row, &pc) in self.pivots.iter().enumerate() {
            if rem.get(pc) {
                rem.xor_assign(&self.basis.row(row));
                coords.set(row, true);
            }
        }
        if rem.is_zero() {
            Some(coords)
        } else {
            None
        }
    }

    pub fn sum(&self, other: &F2Subspace) -> F2Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        F2Subspace::from_spanning_matrix(&self.basis.stack(&other.basis))
    }

    /// Intersection via the Zassenhaus block construction: reduce
    /// `[a | a]` over `[b | 0]`; rows whose left half vanishes carry an
    /// intersection basis in the right half.
    pub fn intersect(&self, other: &F2Subspace) -> F2Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        let n = self.ambient;
        let rows_total = self.dim() + other.dim();
        let mut block = F2Matrix::zeros(rows_total, 2 * n);
        for (i, v) in self.basis_rows().enumerate() {
            for j in v.ones() {
                block.set(i, j, true);
                block.set(i, n + j, true);
            }
        }
        for (i, v) in other.basis_rows().enumerate() {
            for j in v.ones() {
                block.set(self.dim() + i, j, true);
            }
        }
        let (r, _) = block.rref();
        let mut inter_rows = Vec::new();
        for i in 0..rows_total {
            let row = r.row(i);
            let left_zero = (0..n).all(|j| !row.get(j));
            if left_zero {
                let mut right = F2Vec::zeros(n);
                for j in n..2 * n {
                    if row.get(j) {
                        right.set(j - n, true);
                    }
                }
                if !right.is_zero() {
                    inter_rows.push(right);
                }
            }
        }
        F2Subspace::from_spanning(n, &inter_rows)
    }

    /// Annihilator `{u : v . u = 0 for all v in self}`. Over GF(2) with the
    /// standard pairing, ann(ann(S)) = S.
    pub fn annihilator(&self) -> F2Subspace {
        self.basis.kernel()
    }

    /// Image of the subspace under the column action of `m`.
    pub fn image_under(&self, m: &F2Matrix) -> F2Subspace {
        assert_eq!(m.cols, self.ambient, "ambient mismatch");
        let rows: Vec<F2Vec> = self.basis_rows().map(|v| m.mul_vec(&v)).collect();
        F2Subspace::from_spanning(m.rows, &rows)
    }
}

impl fmt::Debug for F2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F2Subspace(dim {} in F2^{}):\n{:?}",
            self.dim(),
            self.ambient,
            self.basis
        )
    }
}

/// Preimage `{v : m * v in target}` as a subspace of the domain.
///
/// Computed as the kernel of `Q * m` where the rows of `Q` span the
/// annihilator of `target`: `m v` lies in `target` iff it pairs to zero
/// with every annihilator vector.
pub fn preimage_subspace(m: &F2Matrix, target: &F2Subspace) -> F2Subspace {
    assert_eq!(
        m.rows,
        target.ambient_dim(),
        "target must live in the codomain of m"
    );
    let ann = target.annihilator();
    if ann.dim() == 0 {
        return F2Subspace::full(m.cols);
    }
    ann.basis_matrix().mul(m).kernel()
}

/// Sum, intersection, and the dimension of `(a+b) / (c meet (a+b))` in
/// one call. All three must share the ambient space.
pub fn sum_intersect_quotient(
    a: &F2Subspace,
    b: &F2Subspace,
    c: &F2Subspace,
) -> (F2Subspace, F2Subspace, usize) {
    assert_eq!(a.ambient_dim(), b.ambient_dim(), "ambient mismatch");
    assert_eq!(a.ambient_dim(), c.ambient_dim(), "ambient mismatch");
    let s = a.sum(b);
    let i = a.intersect(b);
    let c_in_s = c.intersect(&s);
    let q = s.dim() - c_in_s.dim();
    (s, i, q)
}

/// Growable row-echelon basis with cheap per-vector insertion and
/// reduction, for incremental span computations where rebuilding a full
/// RREF per insert would be quadratic in the number of inserts.
///
/// Rows are kept sorted by pivot column and forward-reduced only (each row
/// is reduced against the rows already present at insertion time); this is
/// enough for membership tests and for extracting a complement basis.
pub struct EchelonBasis {
    ambient: usize,
    rows: Vec<F2Vec>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(ambient: usize) -> Self {
        EchelonBasis {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Starts from the rows of an existing echelon basis.
    pub fn from_subspace(s: &F2Subspace) -> Self {
        let mut eb = EchelonBasis::new(s.ambient_dim());
        for v in s.basis_rows() {
            eb.insert(&v);
        }
        eb
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after eliminating all current pivots.
    pub fn reduce(&self, v: &F2Vec) -> F2Vec {
        assert_eq!(v.len(), self.ambient, "ambient mismatch");
        let mut rem = v.clone();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if rem.get(pc) {
                rem.xor_assign(row);
            }
        }
        rem
    }

    pub fn contains(&self, v: &F2Vec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`'s residue if it enlarges the span; returns the residue
    /// when it was inserted, `None` when `v` was already in the span.
    pub fn insert(&mut self, v: &F2Vec) -> Option<F2Vec> {
        let rem = self.reduce(v);
        let pivot = rem.leading_one()?;
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.rows.insert(at, rem.clone());
        self.pivots.insert(at, pivot);
        Some(rem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: rank via the size of the row span, enumerating all 2^rows
    /// row combinations. Usable for rows <= 16.
    fn brute_rank(m: &F2Matrix) -> usize {
        assert!(m.rows() <= 16);
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..1 << m.rows() {
            let mut acc = F2Vec::zeros(m.cols());
            for i in 0..m.rows() {
                if mask >> i & 1 == 1 {
                    acc.xor_assign(&m.row(i));
                }
            }
            seen.insert(acc);
        }
        // |row space| = 2^rank.
        seen.len().trailing_zeros() as usize
    }

    /// Oracle: all kernel vectors by exhaustive search over the domain.
    fn brute_kernel(m: &F2Matrix) -> Vec<F2Vec> {
        assert!(m.cols() <= 16);
        let mut out = Vec::new();
        for mask in 0u32..1 << m.cols() {
            let mut v = F2Vec::zeros(m.cols());
            for j in 0..m.cols() {
                if mask >> j & 1 == 1 {
                    v.set(j, true);
                }
            }
            if m.mul_vec(&v).is_zero() {
                out.push(v);
            }
        }
        out
    }

    /// Oracle: number of vectors in a subspace by exhaustive membership.
    fn brute_count(s: &F2Subspace) -> usize {
        assert!(s.ambient_dim() <= 16);
        let n = s.ambient_dim();
        (0u32..1 << n)
            .filter(|mask| {
                let mut v = F2Vec::zeros(n);
                for j in 0..n {
                    if mask >> j & 1 == 1 {
                        v.set(j, true);
                    }
                }
                s.contains(&v)
            })
            .count()
    }

    fn mat(cols: usize, rows: &[&[u8]]) -> F2Matrix {
        let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
        F2Matrix::from_bit_rows(cols, &rows)
    }

    #[test]
    fn rank_of_dependent_rows() {
        // Third row is the sum of the first two; oracle value frozen at 2.
        let m = mat(3, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        assert_eq!(brute_rank(&m), 2);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn echelon_basis_matches_subspace_arithmetic() {
        // Incremental inserts must agree with from_spanning on span
        // membership, dimension, and residue behavior.
        let vectors = [
            F2Vec::from_bits(&[1, 1, 0, 0, 1]),
            F2Vec::from_bits(&[0, 1, 1, 0, 0]),
            F2Vec::from_bits(&[1, 0, 1, 0, 1]),
            F2Vec::from_bits(&[0, 0, 0, 1, 1]),
        ];
        let mut eb = EchelonBasis::new(5);
        assert!(eb.insert(&vectors[0]).is_some());
        assert!(eb.insert(&vectors[1]).is_some());
        // Third vector is the sum of the first two.
        assert!(eb.insert(&vectors[2]).is_none());
        assert!(eb.insert(&vectors[3]).is_some());
        assert_eq!(eb.dim(), 3);

        let s = F2Subspace::from_spanning(5, &vectors);
        assert_eq!(s.dim(), 3);
        for mask in 0u32..32 {
            let mut v = F2Vec::zeros(5);
            for j in 0..5 {
                if mask >> j & 1 == 1 {
                    v.set(j, true);
                }
            }
            assert_eq!(eb.contains(&v), s.contains(&v), "mask {mask}");
            assert_eq!(eb.reduce(&v).is_zero(), s.reduce(&v).is_zero());
        }
    }

    #[test]
    fn echelon_basis_complement_extraction() {
        // Extending a subspace basis to a larger span: residues returned by
        // insert form a complement basis of the old space in the new one.
        let denom = F2Subspace::from_spanning(
            4,
            &[F2Vec::from_bits(&[1, 1, 0, 0]), F2Vec::from_bits(&[0, 0, 1, 1])],
        );
        let big = F2Subspace::full(4);
        let mut eb = EchelonBasis::from_subspace(&denom);
        assert_eq!(eb.dim(), denom.dim());
        let mut complement = Vec::new();
        for v in big.basis_rows() {
            if let Some(residue) = eb.insert(&v) {
                complement.push(residue);
            }
        }
        assert_eq!(complement.len(), big.dim() - denom.dim());
        // Residues are independent modulo denom.
        let joint = denom.sum(&F2Subspace::from_spanning(4, &complement));
        assert_eq!(joint.dim(), denom.dim() + complement.len());
    }

    #[test]
    fn kernel_of_dependent_rows() {
        // Frozen oracle: kernel = {0, (1,1,1)}.
        let m = mat(3, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let brute = brute_kernel(&m);
        assert_eq!(brute.len(), 2);
        assert!(brute.contains(&F2Vec::from_bits(&[1, 1, 1])));
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&F2Vec::from_bits(&[1, 1, 1])));
        assert_eq!(k.dim() + m.rank(), m.cols());
    }

    #[test]
    fn empty_shapes() {
        // 0 x n: every domain vector maps to the empty vector.
        let zero_rows = F2Matrix::zeros(0, 4);
        assert_eq!(zero_rows.rank(), 0);
        assert_eq!(zero_rows.kernel().dim(), 4);
        assert_eq!(zero_rows.kernel(), F2Subspace::full(4));
        // n x 0: the domain itself is zero.
        let zero_cols = F2Matrix::zeros(4, 0);
        assert_eq!(zero_cols.rank(), 0);
        assert_eq!(zero_cols.kernel().dim(), 0);
        assert_eq!(zero_cols.kernel().ambient_dim(), 0);
    }

    #[test]
    fn identity_across_word_boundaries() {
        for n in [63, 64, 65, 130] {
            let id = F2Matrix::identity(n);
            assert_eq!(id.rank(), n);
            assert_eq!(id.kernel().dim(), 0);
            let (r, pivots) = id.rref();
            assert_eq!(r, id);
            assert_eq!(pivots.len(), n);
        }
    }

    #[test]
    fn all_ones_block() {
        let m = mat(4, &[&[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel().dim(), 3);
        assert_eq!(brute_rank(&m), 1);
    }

    #[test]
    fn mul_matches_composition_on_vectors() {
        let a = mat(3, &[&[1, 0, 1], &[0, 1, 1]]);
        let b = mat(4, &[&[1, 1, 0, 0], &[0, 0, 1, 1], &[1, 0, 1, 0]]);
        let ab = a.mul(&b);
        assert_eq!(ab.rows(), 2);
        assert_eq!(ab.cols(), 4);
        for mask in 0u32..16 {
            let mut v = F2Vec::zeros(4);
            for j in 0..4 {
                if mask >> j & 1 == 1 {
                    v.set(j, true);
                }
            }
            assert_eq!(ab.mul_vec(&v), a.mul_vec(&b.mul_vec(&v)));
        }
    }

    #[test]
    fn preimage_example() {
        // m: F_2^3 -> F_2^2, m = [[1,0,1],[0,1,1]]; target = span{(1,0)}.
        // Oracle by enumeration: v in {000, 001+?...}; frozen dimension 2,
        // membership checked explicitly below.
        let m = mat(3, &[&[1, 0, 1], &[0, 1, 1]]);
        let target = F2Subspace::from_spanning(2, &[F2Vec::from_bits(&[1, 0])]);
        let pre = preimage_subspace(&m, &target);
        // Exhaustive check of the defining property.
        for mask in 0u32..8 {
            let mut v = F2Vec::zeros(3);
            for j in 0..3 {
                if mask >> j & 1 == 1 {
                    v.set(j, true);
                }
            }
            assert_eq!(pre.contains(&v), target.contains(&m.mul_vec(&v)));
        }
        assert_eq!(pre.dim(), 2);
    }

    #[test]
    fn preimage_of_full_and_zero() {
        let m = mat(3, &[&[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(preimage_subspace(&m, &F2Subspace::full(2)), F2Subspace::full(3));
        assert_eq!(preimage_subspace(&m, &F2Subspace::zero(2)), m.kernel());
    }

    #[test]
    fn sum_intersect_quotient_example() {
        // a = span{e0, e1}, b = span{e1+e2}, c = span{e0} in F_2^3.
        // Frozen oracle values: dim(a+b) = 3, dim(a cap b) = 1 (spanned by
        // e1+e2? no: a cap b = span{} unless e1+e2 in a, which it is not;
        // recomputed exhaustively below), quotient = 2.
        let a = F2Subspace::from_spanning(
            3,
            &[F2Vec::from_bits(&[1, 0, 0]), F2Vec::from_bits(&[0, 1, 0])],
        );
        let b = F2Subspace::from_spanning(3, &[F2Vec::from_bits(&[0, 1, 1])]);
        let c = F2Subspace::from_spanning(3, &[F2Vec::from_bits(&[1, 0, 0])]);
        let (s, i, q) = sum_intersect_quotient(&a, &b, &c);
        assert_eq!(brute_count(&s), 8);
        assert_eq!(brute_count(&i), 1);
        assert_eq!(s.dim(), 3);
        assert_eq!(i.dim(), 0);
        // c lies inside a+b, so the quotient drops exactly dim c.
        assert_eq!(q, 2);
    }

    #[test]
    fn echelon_basis_is_canonical() {
        // Two spanning sets of the same plane.
        let s1 = F2Subspace::from_spanning(
            4,
            &[F2Vec::from_bits(&[1, 1, 0, 0]), F2Vec::from_bits(&[0, 0, 1, 1])],
        );
        let s2 = F2Subspace::from_spanning(
            4,
            &[
                F2Vec::from_bits(&[1, 1, 1, 1]),
                F2Vec::from_bits(&[0, 0, 1, 1]),
                F2Vec::from_bits(&[1, 1, 0, 0]),
            ],
        );
        assert_eq!(s1, s2);
        assert_eq!(s1.basis_matrix(), s2.basis_matrix());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = mat(3, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        // rhs in the image.
        let rhs = F2Vec::from_bits(&[1, 1, 0]);
        let x = m.solve(&rhs).expect("consistent system");
        assert_eq!(m.mul_vec(&x), rhs);
        // rhs outside the image: image is 2-dimensional, (1,1,1) has odd
        // pairing with the kernel of the transpose.
        let bad = F2Vec::from_bits(&[1, 0, 0]);
        assert!(m.image().contains(&rhs));
        if !m.image().contains(&bad) {
            assert!(m.solve(&bad).is_none());
        }
    }

    #[test]
    fn annihilator_is_involutive() {
        let s = F2Subspace::from_spanning(
            5,
            &[
                F2Vec::from_bits(&[1, 0, 1, 0, 1]),
                F2Vec::from_bits(&[0, 1, 1, 1, 0]),
            ],
        );
        let ann = s.annihilator();
        assert_eq!(ann.dim(), 3);
        assert_eq!(ann.annihilator(), s);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix(max_dim: usize) -> impl Strategy<Value = F2Matrix> {
            (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(0u8..2, c), r)
                    .prop_map(move |rows| F2Matrix::from_bit_rows(c, &rows))
            })
        }

        fn arb_subspace(ambient: usize) -> impl Strategy<Value = F2Subspace> {
            proptest::collection::vec(proptest::collection::vec(0u8..2, ambient), 0..=ambient)
                .prop_map(move |rows| {
                    let vecs: Vec<F2Vec> = rows.iter().map(|r| F2Vec::from_bits(r)).collect();
                    F2Subspace::from_spanning(ambient, &vecs)
                })
        }

        proptest! {
            #[test]
            fn rank_nullity(m in arb_matrix(12)) {
                prop_assert_eq!(m.rank() + m.kernel().dim(), m.cols());
            }

            #[test]
            fn rank_matches_brute_force(m in arb_matrix(8)) {
                prop_assert_eq!(m.rank(), brute_rank(&m));
            }

            #[test]
            fn echelon_canonical_under_reordering(m in arb_matrix(10), seed in any::<u64>()) {
                let rows: Vec<F2Vec> = (0..m.rows()).map(|i| m.row(i)).collect();
                let mut shuffled = rows.clone();
                // Cheap deterministic shuffle.
                let mut s = seed;
                for i in (1..shuffled.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let j = (s >> 33) as usize % (i + 1);
                    shuffled.swap(i, j);
                }
                let s1 = F2Subspace::from_spanning(m.cols(), &rows);
                let s2 = F2Subspace::from_spanning(m.cols(), &shuffled);
                prop_assert_eq!(s1.basis_matrix(), s2.basis_matrix());
            }

            /// dim(a+b) + dim(a cap b) = dim a + dim b, with dims checked
            /// against exhaustive membership counts (ambient <= 12).
            #[test]
            fn dimension_formula_vs_enumeration(
                (a, b) in (1usize..=12).prop_flat_map(|n| (arb_subspace(n), arb_subspace(n)))
            ) {
                let s = a.sum(&b);
                let i = a.intersect(&b);
                prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
                prop_assert_eq!(brute_count(&s), 1usize << s.dim());
                prop_assert_eq!(brute_count(&i), 1usize << i.dim());
            }

            #[test]
            fn preimage_defining_property(m in arb_matrix(6), rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 6), 0..3)) {
                // Target lives in the codomain; pad/truncate rows to fit.
                let vecs: Vec<F2Vec> = rows.iter().map(|r| {
                    let mut v = F2Vec::zeros(m.rows());
                    for (j, &bit) in r.iter().take(m.rows()).enumerate() {
                        if bit == 1 { v.set(j, true); }
                    }
                    v
                }).collect();
                let target = F2Subspace::from_spanning(m.rows(), &vecs);
                let pre = preimage_subspace(&m, &target);
                for mask in 0u32..1 << m.cols() {
                    let mut v = F2Vec::zeros(m.cols());
                    for j in 0..m.cols() {
                        if mask >> j & 1 == 1 { v.set(j, true); }
                    }
                    prop_assert_eq!(pre.contains(&v), target.contains(&m.mul_vec(&v)));
                }
            }
        }
    }
}
