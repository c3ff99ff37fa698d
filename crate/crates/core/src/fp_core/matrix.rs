//! Dense matrices over F_p and the elimination routines everything else is
//! built on.

use std::fmt;

use crate::error::{Error, Result};
use crate::fp_core::field::{FpScalar, PrimeField};

/// A dense row-major matrix over F_p.
///
/// Column `j` is the image of the `j`-th basis vector, so `m.apply(v)` is the
/// usual matrix-vector product.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`FpMatrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub rank: usize,
    /// Column index of the pivot in each nonzero row of `reduced`.
    pub pivot_cols: Vec<usize>,
    /// Reduced row echelon form (same shape as the input).
    pub reduced: FpMatrix,
    /// Basis of the null space, one vector per free column.
    pub kernel_basis: Vec<Vec<u32>>,
    /// The pivot columns of the original matrix; a basis of its column space.
    pub image_basis: Vec<Vec<u32>>,
}

impl FpMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing mod p.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut m = Self::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = field.reduce(x);
            }
        }
        m
    }

    /// Builds a matrix from columns of residues.
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &x) in col.iter().enumerate() {
                m.data[i * m.cols + j] = x % field.p();
            }
        }
        m
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(field: PrimeField, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(field, n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p();
    }

    pub fn scalar_at(&self, i: usize, j: usize) -> FpScalar {
        self.field.scalar(self.get(i, j) as i64)
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(k, &v)| (k / self.cols, k % self.cols, v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    fn check_same_shape(&self, other: &FpMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.check_same_shape(other)?;
        let f = self.field;
        Ok(self.with_data(
            self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        ))
    }

    pub fn try_sub(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.check_same_shape(other)?;
        let f = self.field;
        Ok(self.with_data(
            self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        ))
    }

    fn with_data(&self, data: Vec<u32>) -> FpMatrix {
        FpMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn try_mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let p = f.p() as u64;
        let mut out = FpMatrix::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                for (slot, &b) in acc.iter_mut().zip(brow) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (j, &a) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = a as u32;
            }
        }
        Ok(out)
    }

    /// Panicking product for internal use where shapes are known to agree.
    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        self.try_mul(other).expect("matrix shapes")
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        self.try_add(other).expect("matrix shapes")
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        self.try_sub(other).expect("matrix shapes")
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let f = self.field;
        self.with_data(self.data.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn neg(&self) -> FpMatrix {
        self.scale(self.field.p() - 1)
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = FpMatrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.field.p() as u64;
        (0..self.rows)
            .map(|i| {
                let s = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |s, (&a, &b)| (s + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    /// The submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.field, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.data[a * cols.len() + b] = self.get(i, j);
            }
        }
        m
    }

    /// Block diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.field, other.field);
        let mut m = FpMatrix::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        for (i, j, v) in self.entries() {
            m.set(i, j, v);
        }
        for (i, j, v) in other.entries() {
            m.set(self.rows + i, self.cols + j, v);
        }
        m
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kronecker(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.field, other.field);
        let f = self.field;
        let mut m = FpMatrix::zeros(f, self.rows * other.rows, self.cols * other.cols);
        for (i, j, a) in self.entries() {
            for (k, l, b) in other.entries() {
                m.set(i * other.rows + k, j * other.cols + l, f.mul(a, b));
            }
        }
        m
    }

    /// Gauss-Jordan elimination.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut r = self.clone();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&i| r.get(i, col) != 0) else {
                continue;
            };
            r.swap_rows(piv, row);
            let inv = f.inv(r.get(row, col));
            r.scale_row(row, inv);
            for i in 0..self.rows {
                if i != row {
                    let c = r.get(i, col);
                    if c != 0 {
                        r.add_row_multiple(i, row, f.neg(c));
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
        let rank = pivot_cols.len();

        let mut is_pivot = vec![false; self.cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let kernel_basis = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1;
                for (i, &pc) in pivot_cols.iter().enumerate() {
                    v[pc] = f.neg(r.get(i, free));
                }
                v
            })
            .collect();
        let image_basis = pivot_cols.iter().map(|&c| self.column(c)).collect();
        Rref {
            rank,
            pivot_cols,
            reduced: r,
            kernel_basis,
            image_basis,
        }
    }

    pub fn rank(&self) -> usize {
        // Row reduction on the shorter side is cheaper.
        if self.rows < self.cols {
            self.transpose().rank_inner()
        } else {
            self.rank_inner()
        }
    }

    fn rank_inner(&self) -> usize {
        let f = self.field;
        let mut r = self.clone();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&i| r.get(i, col) != 0) else {
                continue;
            };
            r.swap_rows(piv, row);
            let inv = f.inv(r.get(row, col));
            r.scale_row(row, inv);
            for i in row + 1..self.rows {
                let c = r.get(i, col);
                if c != 0 {
                    r.add_row_multiple(i, row, f.neg(c));
                }
            }
            row += 1;
        }
        row
    }

    pub fn kernel(&self) -> Vec<Vec<u32>> {
        self.rref().kernel_basis
    }

    /// Some `x` with `self * x = b`, if one exists.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let f = self.field;
        let mut aug = FpMatrix::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.data[i * (self.cols + 1) + j] = self.get(i, j);
            }
            aug.data[i * (self.cols + 1) + self.cols] = b[i] % f.p();
        }
        let rr = aug.rref();
        if rr.pivot_cols.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (i, &pc) in rr.pivot_cols.iter().enumerate() {
            x[pc] = rr.reduced.get(i, self.cols);
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: u32) {
        let f = self.field;
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *x = f.mul(*x, c);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: u32) {
        let f = self.field;
        let cols = self.cols;
        for j in 0..cols {
            let s = self.data[src * cols + j];
            if s != 0 {
                let d = &mut self.data[dst * cols + j];
                *d = f.mul_add(*d, c, s);
            }
        }
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix {}x{} over F_{} [", self.rows, self.cols, self.field.p())?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// A subspace of F_p^n held as a reduced echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    // Rows in echelon form with leading coefficient 1.
    rows: Vec<Vec<u32>>,
    leads: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            leads: Vec::new(),
        }
    }

    pub fn spanned_by<I, V>(field: PrimeField, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[u32]>,
    {
        let mut s = Subspace::zero(field, ambient);
        for v in vectors {
            s.insert(v.as_ref());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut w: Vec<u32> = v.iter().map(|&x| x % f.p()).collect();
        for (row, &lead) in self.rows.iter().zip(&self.leads) {
            let c = w[lead];
            if c != 0 {
                let c = f.neg(c);
                for (x, &r) in w.iter_mut().zip(row) {
                    if r != 0 {
                        *x = f.mul_add(*x, c, r);
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = self.field;
        let mut w = self.reduce(v);
        let Some(lead) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[lead]);
        w.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        // Keep the basis fully reduced so `reduce` is a single pass.
        for row in &mut self.rows {
            let c = row[lead];
            if c != 0 {
                let c = f.neg(c);
                for (x, &r) in row.iter_mut().zip(&w) {
                    if r != 0 {
                        *x = f.mul_add(*x, c, r);
                    }
                }
            }
        }
        let pos = self.leads.partition_point(|&l| l < lead);
        self.leads.insert(pos, lead);
        self.rows.insert(pos, w);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r);
        }
        s
    }
}

/// Jordan type of a nilpotent matrix with `t^p = 0`, as block sizes in
/// decreasing order.
///
/// The number of blocks of size at least `k` is `rank(t^{k-1}) - rank(t^k)`.
pub fn nilpotent_partition(t: &FpMatrix) -> Result<Vec<usize>> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "nilpotent_partition needs a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let p = t.field().p() as u64;
    let n = t.rows();
    // ranks[j] = rank(t^j)
    let mut ranks = vec![n];
    let mut power = FpMatrix::identity(t.field(), n);
    for _ in 0..p.min(n as u64 + 1).max(1) {
        power = power.mul(t);
        ranks.push(power.rank());
        if *ranks.last().unwrap() == 0 {
            break;
        }
    }
    if *ranks.last().unwrap() != 0 || ranks.len() - 1 > p as usize {
        return Err(Error::NotNilpotent);
    }
    let at_least = |k: usize| -> usize {
        if k >= ranks.len() {
            0
        } else {
            ranks[k - 1] - ranks[k]
        }
    };
    let mut sizes = Vec::new();
    for k in (1..ranks.len()).rev() {
        let exactly = at_least(k) - at_least(k + 1);
        sizes.extend(std::iter::repeat_n(k, exactly));
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn identity_rref() {
        let r = FpMatrix::identity(f(3), 3).rref();
        assert_eq!(r.rank, 3);
        assert!(r.kernel_basis.is_empty());
        assert_eq!(r.image_basis.len(), 3);
    }

    #[test]
    fn zero_map_rref() {
        let r = FpMatrix::zeros(f(5), 2, 4).rref();
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel_basis.len(), 4);
        assert!(r.image_basis.is_empty());
    }

    #[test]
    fn empty_matrix() {
        let m = FpMatrix::zeros(f(7), 0, 0);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.rref().rank, 0);
        assert!(m.kernel().is_empty());
        let m = FpMatrix::zeros(f(7), 0, 3);
        assert_eq!(m.kernel().len(), 3);
    }

    #[test]
    fn rank_one_example() {
        let fld = f(5);
        let m = FpMatrix::from_rows(fld, &[[1, 2], [2, 4]]);
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel_basis.len(), 1);
        // Every null vector over F_5, by enumeration of all 25 vectors.
        let null: Vec<[u32; 2]> = (0..5)
            .flat_map(|a| (0..5).map(move |b| [a, b]))
            .filter(|v| m.apply(v).iter().all(|&x| x == 0))
            .collect();
        assert_eq!(null.len(), 5);
        assert!(null.contains(&[3, 1]));
        let k = &r.kernel_basis[0];
        // kernel vector is a nonzero multiple of (3,1)
        assert!(null.contains(&[k[0], k[1]]) && k != &vec![0, 0]);
        let c = k[1];
        assert_eq!(vec![fld.mul(3, c), c], *k);
    }

    #[test]
    fn solve_and_inconsistent() {
        let fld = f(7);
        let m = FpMatrix::from_rows(fld, &[[1, 1], [2, 2]]);
        assert!(m.solve(&[1, 3]).is_none());
        let x = m.solve(&[3, 6]).unwrap();
        assert_eq!(m.apply(&x), vec![3, 6]);
    }

    #[test]
    fn subspace_ops() {
        let fld = f(3);
        let mut s = Subspace::zero(fld, 3);
        assert!(s.insert(&[1, 1, 0]));
        assert!(!s.insert(&[2, 2, 0]));
        assert!(s.insert(&[0, 1, 1]));
        assert!(s.contains(&[1, 2, 1]));
        assert!(!s.contains(&[0, 0, 1]));
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn partition_of_zero() {
        let t = FpMatrix::zeros(f(3), 4, 4);
        assert_eq!(nilpotent_partition(&t).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn partition_of_single_block() {
        let t = FpMatrix::from_rows(f(3), &[[0, 1, 0], [0, 0, 1], [0, 0, 0]]);
        assert_eq!(nilpotent_partition(&t).unwrap(), vec![3]);
    }

    #[test]
    fn partition_of_regular_rep() {
        let fld = f(5);
        let cycle = FpMatrix::permutation(fld, &[1, 2, 3, 4, 0]);
        let t = cycle.sub(&FpMatrix::identity(fld, 5));
        // brute-force ranks of powers: 4,3,2,1,0
        let ranks: Vec<usize> = (1..=5).map(|k| t.pow(k).rank()).collect();
        assert_eq!(ranks, vec![4, 3, 2, 1, 0]);
        assert_eq!(nilpotent_partition(&t).unwrap(), vec![5]);
    }

    #[test]
    fn partition_rejects_non_nilpotent() {
        let fld = f(3);
        assert!(matches!(
            nilpotent_partition(&FpMatrix::identity(fld, 2)),
            Err(Error::NotNilpotent)
        ));
        // nilpotent of order 4 > p = 3
        let mut t = FpMatrix::zeros(fld, 4, 4);
        for i in 0..3 {
            t.set(i, i + 1, 1);
        }
        assert!(matches!(nilpotent_partition(&t), Err(Error::NotNilpotent)));
    }
}
