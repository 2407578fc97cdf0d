//! Dense matrices of [`Poly`] entries.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::poly::{Poly, VarTag};
use crate::weyl::Algebra;

#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    alg: Algebra,
    tag: VarTag,
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl PolyMatrix {
    pub fn from_fn(alg: &Algebra, tag: VarTag, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let e = f(r, c);
                assert!(e.tag() == tag, "entry tag mismatch");
                data.push(e);
            }
        }
        PolyMatrix {
            alg: alg.clone(),
            tag,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(alg: &Algebra, tag: VarTag, rows: usize, cols: usize) -> Self {
        Self::from_fn(alg, tag, rows, cols, |_, _| Poly::zero(alg, tag))
    }

    pub fn identity(alg: &Algebra, tag: VarTag, size: usize) -> Self {
        Self::scalar(alg, tag, size, &Poly::one(alg, tag))
    }

    /// `s · Id`.
    pub fn scalar(alg: &Algebra, tag: VarTag, size: usize, s: &Poly) -> Self {
        Self::from_fn(alg, tag, size, size, |r, c| {
            if r == c {
                s.clone()
            } else {
                Poly::zero(alg, tag)
            }
        })
    }

    /// Constant matrix from integer entries.
    pub fn from_ints(alg: &Algebra, tag: VarTag, size: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        Self::from_fn(alg, tag, size, size, |r, c| Poly::from_int(alg, tag, f(r, c)))
    }

    /// The symplectic form `ω`.
    pub fn omega(alg: &Algebra, tag: VarTag) -> Self {
        Self::from_ints(alg, tag, alg.nvars(), |i, j| alg.omega(i, j))
    }

    /// The elementary matrix `E_{ij}`.
    pub fn unit(alg: &Algebra, tag: VarTag, size: usize, i: usize, j: usize) -> Self {
        Self::from_ints(alg, tag, size, |r, c| (r == i && c == j) as i64)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn tag(&self) -> VarTag {
        self.tag
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Poly] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Poly] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Poly> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.alg, self.tag, self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        let data: Vec<Poly> = self.data.iter().map(f).collect();
        let tag = data.first().map_or(self.tag, Poly::tag);
        PolyMatrix {
            alg: self.alg.clone(),
            tag,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&self, s: &Poly) -> Self {
        self.map(|e| e * s)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        *self == -self.transpose()
    }

    /// Entrywise Frobenius twist (see [`Poly::frobenius_twist`]).
    pub fn frobenius_twist(&self) -> Self {
        let mut m = self.map(Poly::frobenius_twist);
        m.tag = VarTag::X;
        m
    }

    fn zip(&self, other: &Self, f: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        assert!(self.rows == other.rows && self.cols == other.cols, "shape mismatch");
        Self::from_fn(&self.alg, self.tag, self.rows, self.cols, |r, c| {
            f(&self[(r, c)], &other[(r, c)])
        })
    }

    fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        Self::from_fn(&self.alg, self.tag, self.rows, other.cols, |r, c| {
            let mut acc = Poly::zero(&self.alg, self.tag);
            for k in 0..self.cols {
                let (a, b) = (&self[(r, k)], &other[(k, c)]);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.cols, "shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Poly::zero(&self.alg, self.tag);
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Poly {
        let mut acc = Poly::zero(&self.alg, self.tag);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + &self[(i, i)];
        }
        acc
    }

    /// Determinant: cofactor expansion up to size 4, fraction-free Bareiss
    /// elimination above.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows <= 4 {
            let idx: Vec<usize> = (0..self.rows).collect();
            self.cofactor_det(0, &idx)
        } else {
            self.bareiss_det()
        }
    }

    fn cofactor_det(&self, row: usize, cols: &[usize]) -> Poly {
        if cols.is_empty() {
            return Poly::one(&self.alg, self.tag);
        }
        let mut acc = Poly::zero(&self.alg, self.tag);
        for (k, &c) in cols.iter().enumerate() {
            let e = &self[(row, c)];
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = e * &self.cofactor_det(row + 1, &rest);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    fn bareiss_det(&self) -> Poly {
        let n = self.rows;
        let mut a: Vec<Vec<Poly>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut sign_flip = false;
        let mut prev = Poly::one(&self.alg, self.tag);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign_flip = !sign_flip;
                    }
                    None => return Poly::zero(&self.alg, self.tag),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign_flip {
            -d
        } else {
            d
        }
    }
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Poly;
    fn index(&self, (r, c): (usize, usize)) -> &Poly {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Poly {
        &mut self.data[r * self.cols + c]
    }
}

macro_rules! mat_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&PolyMatrix> for &PolyMatrix {
            type Output = PolyMatrix;
            fn $method(self, rhs: &PolyMatrix) -> PolyMatrix {
                $body(self, rhs)
            }
        }
        impl $tr<PolyMatrix> for PolyMatrix {
            type Output = PolyMatrix;
            fn $method(self, rhs: PolyMatrix) -> PolyMatrix {
                $body(&self, &rhs)
            }
        }
    };
}

mat_binop!(Add, add, |a: &PolyMatrix, b: &PolyMatrix| a.zip(b, |x, y| x + y));
mat_binop!(Sub, sub, |a: &PolyMatrix, b: &PolyMatrix| a.zip(b, |x, y| x - y));
mat_binop!(Mul, mul, |a: &PolyMatrix, b: &PolyMatrix| a.matmul(b));

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.map(|e| -e)
    }
}

impl Neg for PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.map(|e| -e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::tests::y;
    use crate::weyl::tests::alg;
    use proptest::prelude::*;

    #[test]
    fn omega_squares_to_minus_identity() {
        for n in 1..=3 {
            let a = alg(n, 5);
            let w = PolyMatrix::omega(&a, VarTag::X);
            assert!(w.is_antisymmetric());
            assert_eq!(&w * &w, -PolyMatrix::identity(&a, VarTag::X, 2 * n));
            assert_eq!(w.det(), Poly::one(&a, VarTag::X));
        }
    }

    fn random_matrix(a: &Algebra, size: usize, seeds: &[i64]) -> PolyMatrix {
        let mut it = seeds.iter().cycle();
        PolyMatrix::from_fn(a, VarTag::Y, size, size, |_, _| {
            let c0 = *it.next().unwrap();
            let c1 = *it.next().unwrap();
            let v = (*it.next().unwrap()).rem_euclid(4) as usize;
            &Poly::from_int(a, VarTag::Y, c0) + &y(a, v + 1).scale_int(c1)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn bareiss_matches_cofactor_and_is_multiplicative(
            seeds in prop::collection::vec(-3i64..4, 7..40),
            seeds2 in prop::collection::vec(-3i64..4, 7..40),
        ) {
            let a = alg(2, 5);
            for size in 1..=4 {
                let m = random_matrix(&a, size, &seeds);
                prop_assert_eq!(m.cofactor_det(0, &(0..size).collect::<Vec<_>>()), m.bareiss_det());
            }
            let m = random_matrix(&a, 5, &seeds);
            let n = random_matrix(&a, 5, &seeds2);
            prop_assert_eq!((&m * &n).det(), &m.det() * &n.det());
        }
    }
}
