//! Integer and rational lattices: Hermite and Smith normal forms,
//! membership denominators, indices and kernels.
//!
//! Vectors are rows. A lattice is stored by an echelon basis in Hermite
//! normal form (positive pivots, entries above each pivot reduced into
//! `[0, pivot)`), so that equality of lattices is equality of bases.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn row_axpy(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    // rows[dst] -= q * rows[src]
    if q.is_zero() {
        return;
    }
    let s = rows[src].clone();
    for (d, x) in rows[dst].iter_mut().zip(&s) {
        *d -= q * x;
    }
}

/// Row-style Hermite normal form with a unimodular transform `T`
/// (`T * input = output`). Zero rows are moved to the bottom and kept, so
/// `output.len() == input.len()`.
pub fn hnf_with_transform(input: &[Vec<BigInt>]) -> (IntMatrix, IntMatrix) {
    let m = input.len();
    let n = input.first().map_or(0, |r| r.len());
    let mut a: IntMatrix = input.to_vec();
    let mut t = identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // Euclid down column c among rows r..m
        loop {
            let piv = (r..m).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs());
            let Some(pi) = piv else { break };
            a.swap(r, pi);
            t.swap(r, pi);
            let mut clean = true;
            for i in r + 1..m {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    row_axpy(&mut a, i, r, &q);
                    row_axpy(&mut t, i, r, &q);
                    if !a[i][c].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
            for x in t[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            row_axpy(&mut a, i, r, &q);
            row_axpy(&mut t, i, r, &q);
        }
        r += 1;
    }
    (a, t)
}

/// Hermite normal form of the row lattice, zero rows dropped.
pub fn hnf(input: &[Vec<BigInt>]) -> IntMatrix {
    let (a, _) = hnf_with_transform(input);
    a.into_iter().filter(|row| row.iter().any(|x| !x.is_zero())).collect()
}

/// Basis of the integer row kernel `{c : c * A = 0}`, in Hermite form.
pub fn integer_kernel(a: &[Vec<BigInt>]) -> IntMatrix {
    let (h, t) = hnf_with_transform(a);
    let ker: IntMatrix = h
        .iter()
        .zip(t)
        .filter(|(row, _)| row.iter().all(|x| x.is_zero()))
        .map(|(_, tr)| tr)
        .collect();
    hnf(&ker)
}

/// Smith normal form `U * A * V = D` of an integer matrix. Returns the
/// diagonal (length `min(rows, cols)`, each dividing the next) and `V`.
pub fn smith(a: &[Vec<BigInt>]) -> (Vec<BigInt>, IntMatrix) {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut d: IntMatrix = a.to_vec();
    let mut v = identity(n);
    let col_axpy = |mat: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
        for row in mat.iter_mut() {
            let s = row[src].clone();
            row[dst] -= q * s;
        }
    };
    let col_swap = |mat: &mut IntMatrix, i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };
    let k = m.min(n);
    for s in 0..k {
        loop {
            // smallest nonzero entry in the lower-right block
            let mut best: Option<(usize, usize)> = None;
            for i in s..m {
                for j in s..n {
                    if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            d.swap(s, bi);
            col_swap(&mut d, s, bj);
            col_swap(&mut v, s, bj);
            let mut done = true;
            for i in s + 1..m {
                let q = d[i][s].div_floor(&d[s][s]);
                row_axpy(&mut d, i, s, &q);
                if !d[i][s].is_zero() {
                    done = false;
                }
            }
            for j in s + 1..n {
                let q = d[s][j].div_floor(&d[s][s]);
                col_axpy(&mut d, j, s, &q);
                col_axpy(&mut v, j, s, &q);
                if !d[s][j].is_zero() {
                    done = false;
                }
            }
            if !done {
                continue;
            }
            // divisibility condition
            let mut bad = None;
            'outer: for i in s + 1..m {
                for j in s + 1..n {
                    if !d[i][j].is_multiple_of(&d[s][s]) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    // add row i to row s and continue reducing
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, s, i, &minus_one);
                }
                None => break,
            }
        }
        if d[s][s].is_negative() {
            d[s][s] = -&d[s][s];
            // row negation only affects U, which is not returned
        }
    }
    let diag = (0..k).map(|i| d[i][i].clone()).collect();
    (diag, v)
}

/// Determinant of a square integer matrix (fraction-free elimination).
pub fn determinant(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let (h, t) = hnf_with_transform(a);
    if n == 0 {
        return BigInt::one();
    }
    let mut det = BigInt::one();
    for (i, row) in h.iter().enumerate() {
        det *= &row[i];
    }
    // det(T) = +-1: find it by elimination over Q
    det * rational_det_sign(&t)
}

fn rational_det_sign(t: &[Vec<BigInt>]) -> BigInt {
    let m: RatMatrix = t.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let d = rational_determinant(&m);
    d.to_integer()
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn rational_determinant(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m: RatMatrix = a.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            for j in c..n {
                let x = &f * &m[c][j];
                m[i][j] -= x;
            }
        }
    }
    det
}

/// Solves `x * A = b` for `x` when `A` has linearly independent rows;
/// `None` if `b` is outside the row span.
pub fn solve_left(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    // Gaussian elimination on the transpose system A^T x^T = b^T.
    let k = a.len();
    let n = b.len();
    let mut aug: RatMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..k).map(|i| a[i][j].clone()).collect();
            row.push(b[j].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !aug[i][c].is_zero()) else { continue };
        aug.swap(r, p);
        let piv = aug[r][c].clone();
        for x in aug[r].iter_mut() {
            *x /= &piv;
        }
        for i in 0..n {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=k {
                    let x = &f * &aug[r][j];
                    aug[i][j] -= x;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() < k {
        return None;
    }
    if aug[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut x = alloc::vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][k].clone();
    }
    Some(x)
}

fn common_denominator(rows: &[Vec<BigRational>]) -> BigInt {
    rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// A lattice in `Q^n` given by an HNF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    basis: RatMatrix,
}

impl Lattice {
    /// Z-span of the given rational vectors.
    pub fn from_generators(dim: usize, gens: &[Vec<BigRational>]) -> Result<Self> {
        if gens.iter().any(|g| g.len() != dim) {
            return Err(Error::InconsistentDimensions(alloc::format!("expected vectors of length {dim}")));
        }
        let den = common_denominator(gens);
        let denq = BigRational::from_integer(den.clone());
        let ints: IntMatrix = gens.iter().map(|g| g.iter().map(|x| (x * &denq).to_integer()).collect()).collect();
        let h = hnf(&ints);
        let basis = h.into_iter().map(|r| r.into_iter().map(|x| BigRational::new(x, den.clone())).collect()).collect();
        Ok(Lattice { dim, basis })
    }

    pub fn from_integer_generators(dim: usize, gens: &[Vec<BigInt>]) -> Result<Self> {
        let q: RatMatrix = gens.iter().map(|g| g.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        Self::from_generators(dim, &q)
    }

    /// The standard lattice `Z^n`.
    pub fn standard(dim: usize) -> Self {
        let gens: IntMatrix = identity(dim);
        Self::from_integer_generators(dim, &gens).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let gens: RatMatrix = self.basis.iter().map(|r| r.iter().map(|x| x * q).collect()).collect();
        Self::from_generators(self.dim, &gens).unwrap()
    }

    /// Coordinates of `v` in the basis, if `v` lies in the Q-span.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        solve_left(&self.basis, v)
    }

    /// Least positive integer `d` with `d*v` in the lattice; `None` if `v`
    /// is not in the Q-span.
    pub fn membership_denominator(&self, v: &[BigRational]) -> Option<BigInt> {
        let c = self.coordinates(v)?;
        Some(c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())))
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.membership_denominator(v).is_some_and(|d| d.is_one())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// The generalized index `|self : sub|` for lattices of equal rank and
    /// Q-span (a positive rational; an integer when `sub` is contained).
    pub fn index_of(&self, sub: &Lattice) -> Result<BigRational> {
        if self.rank() != sub.rank() {
            return Err(Error::RankMismatch);
        }
        let mut coords = Vec::with_capacity(sub.rank());
        for v in &sub.basis {
            coords.push(self.coordinates(v).ok_or(Error::RankMismatch)?);
        }
        Ok(rational_determinant(&coords).abs())
    }

    /// Sub-lattice `{x in L : x * map = 0}` for a linear map given by its
    /// matrix acting on row vectors.
    pub fn kernel_of(&self, map: &[Vec<BigRational>]) -> Result<Lattice> {
        if map.len() != self.dim {
            return Err(Error::InconsistentDimensions(alloc::format!("map has {} rows, lattice dimension {}", map.len(), self.dim)));
        }
        let cols = map.first().map_or(0, |r| r.len());
        let images: RatMatrix = self
            .basis
            .iter()
            .map(|b| (0..cols).map(|j| b.iter().zip(map).fold(BigRational::zero(), |acc, (x, row)| acc + x * &row[j])).collect())
            .collect();
        let den = common_denominator(&images);
        let denq = BigRational::from_integer(den);
        let ints: IntMatrix = images.iter().map(|r| r.iter().map(|x| (x * &denq).to_integer()).collect()).collect();
        let ker = integer_kernel(&ints);
        let gens: RatMatrix = ker
            .iter()
            .map(|c| {
                (0..self.dim)
                    .map(|j| c.iter().zip(&self.basis).fold(BigRational::zero(), |acc, (ci, b)| acc + BigRational::from_integer(ci.clone()) * &b[j]))
                    .collect()
            })
            .collect();
        Lattice::from_generators(self.dim, &gens)
    }

    /// Sum of two lattices.
    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        Lattice::from_generators(self.dim, &gens).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn rats(rows: &[&[i64]]) -> RatMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect()
    }

    #[test]
    fn membership_and_index() {
        let two = Lattice::from_generators(2, &rats(&[&[2, 0], &[0, 2]])).unwrap();
        let z2 = Lattice::standard(2);
        let v = rats(&[&[1, 0]]).remove(0);
        assert!(!two.contains(&v));
        assert_eq!(two.membership_denominator(&v), Some(BigInt::from(2)));
        assert_eq!(z2.index_of(&two).unwrap(), BigRational::from_integer(BigInt::from(4)));
        assert_eq!(two.index_of(&z2).unwrap(), BigRational::new(BigInt::one(), BigInt::from(4)));
    }

    #[test]
    fn smith_form() {
        let (d, _) = smith(&ints(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(d, ints(&[&[2, 6, 12]]).remove(0));
        let (d, _) = smith(&ints(&[&[3], &[0]]));
        assert_eq!(d, ints(&[&[3]]).remove(0));
    }

    #[test]
    fn kernel_of_map() {
        // x * [[1],[1]] = 0  ->  span (1,-1)
        let l = Lattice::standard(2);
        let k = l.kernel_of(&rats(&[&[1], &[1]])).unwrap();
        assert_eq!(k.rank(), 1);
        assert!(k.contains(&rats(&[&[1, -1]]).remove(0)));
        // everything in the kernel of the zero map
        assert_eq!(l.kernel_of(&rats(&[&[0], &[0]])).unwrap(), l);
        // nothing in the kernel of the identity
        assert_eq!(l.kernel_of(&rats(&[&[1, 0], &[0, 1]])).unwrap().rank(), 0);
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
        prop::collection::vec(prop::collection::vec((-9i64..=9).prop_map(BigInt::from), cols), rows)
    }

    proptest! {
        #[test]
        fn hnf_is_idempotent(m in small_matrix(4, 3)) {
            let h = hnf(&m);
            prop_assert_eq!(hnf(&h), h);
        }

        #[test]
        fn transform_is_consistent(m in small_matrix(4, 3)) {
            let (h, t) = hnf_with_transform(&m);
            for (i, trow) in t.iter().enumerate() {
                for j in 0..3 {
                    let s = trow.iter().zip(&m).fold(BigInt::zero(), |acc, (c, r)| acc + c * &r[j]);
                    prop_assert_eq!(&s, &h[i][j]);
                }
            }
            prop_assert!(rational_det_sign(&t).abs().is_one());
        }

        #[test]
        fn index_is_multiplicative(a in small_matrix(2, 2), b in small_matrix(2, 2)) {
            let l1 = Lattice::standard(2);
            let l2 = Lattice::from_integer_generators(2, &a).unwrap();
            prop_assume!(l2.rank() == 2);
            // l3 = b * l2 basis
            let g: IntMatrix = (0..2).map(|i| (0..2).map(|j| (0..2).fold(BigInt::zero(), |acc, k| acc + &b[i][k] * &a[k][j])).collect()).collect();
            let l3 = Lattice::from_integer_generators(2, &g).unwrap();
            prop_assume!(l3.rank() == 2);
            let i12 = l1.index_of(&l2).unwrap();
            let i23 = l2.index_of(&l3).unwrap();
            let i13 = l1.index_of(&l3).unwrap();
            prop_assert_eq!(i13, i12 * i23);
        }

        #[test]
        fn smith_product_matches_determinant(m in small_matrix(3, 3)) {
            let (d, _) = smith(&m);
            let prod = d.iter().fold(BigInt::one(), |acc, x| acc * x);
            prop_assert_eq!(prod, determinant(&m).abs());
            for w in d.windows(2) {
                prop_assert!(w[0].is_zero() && w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
            }
        }
    }
}
