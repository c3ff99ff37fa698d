//! Matrices over F_p(u) and their rank.

use crate::fp_core::field::PrimeField;
use crate::fp_core::matrix::FpMatrix;
use crate::fp_core::poly::{Poly, RatFun};

/// Dense matrix with rational-function entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<RatFun>,
}

impl RatMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        RatMatrix {
            field,
            rows,
            cols,
            data: vec![RatFun::zero(field); rows * cols],
        }
    }

    pub fn from_rows(field: PrimeField, rows: Vec<Vec<RatFun>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        RatMatrix {
            field,
            rows: r,
            cols: c,
            data,
        }
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

    pub fn get(&self, i: usize, j: usize) -> &RatFun {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFun) {
        self.data[i * self.cols + j] = v;
    }

    /// Adds `coeff * m` into the block whose top-left corner is `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, m: &FpMatrix, coeff: &RatFun) {
        for (i, j, v) in m.entries() {
            let term = coeff.mul(&RatFun::constant(self.field, v));
            let cur = self.get(r0 + i, c0 + j).add(&term);
            self.set(r0 + i, c0 + j, cur);
        }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        RatMatrix {
            field: self.field,
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFun::is_zero)
    }

    /// Specialization `u = x`; `None` if `x` is a pole of some entry.
    pub fn eval(&self, x: u32) -> Option<FpMatrix> {
        let mut m = FpMatrix::zeros(self.field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).eval(x)?);
            }
        }
        Some(m)
    }

    /// Clears denominators row by row. Scaling a row by a nonzero polynomial
    /// does not change the rank.
    fn to_poly_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let mut lcm = Poly::one(self.field);
                for e in row {
                    let d = e.denominator();
                    if !d.is_one() {
                        let g = lcm.gcd(d);
                        lcm = lcm.mul(&d.div_exact(&g).expect("gcd divides"));
                    }
                }
                row.iter()
                    .map(|e| {
                        let scale = lcm.div_exact(e.denominator()).expect("lcm");
                        e.numerator().mul(&scale)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Rank over F_p(u), by fraction-free (Bareiss) elimination on the matrix with
/// denominators cleared.
///
/// Every intermediate entry is a minor of the input, so the division by the
/// previous pivot is exact and no fractions are ever formed.
pub fn ratfun_rank(m: &RatMatrix) -> usize {
    let mut a = m.to_poly_rows();
    let rows = m.rows;
    let cols = m.cols;
    let field = m.field;
    let mut prev = Poly::one(field);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        // Prefer the lowest-degree pivot to keep entries small.
        let piv = (rank..rows)
            .filter(|&i| !a[i][col].is_zero())
            .min_by_key(|&i| a[i][col].degree());
        let Some(piv) = piv else { continue };
        a.swap(piv, rank);
        let pivot = a[rank][col].clone();
        for i in rank + 1..rows {
            let lead = a[i][col].clone();
            for j in col + 1..cols {
                let t = pivot.mul(&a[i][j]).sub(&lead.mul(&a[rank][j]));
                a[i][j] = if prev.is_one() {
                    t
                } else {
                    t.div_exact(&prev)
                        .expect("Bareiss step divides exactly by the previous pivot")
                };
            }
            a[i][col] = Poly::zero(field);
        }
        prev = pivot;
        rank += 1;
    }
    rank
}
