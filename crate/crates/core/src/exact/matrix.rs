//! Dense matrices over the Gaussian rationals with exact elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::scalar::{Gauss, Rat};
use super::vector;
use super::ExactError;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gauss>,
}

/// Solution set `particular + span(kernel)` of `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub particular: Vec<Gauss>,
    pub kernel: Vec<Vec<Gauss>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Gauss::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Gauss::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Gauss>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix with the given column vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Gauss>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Gauss] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Gauss> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Gauss::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(Gauss::is_real)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Gauss]) -> Vec<Gauss> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| vector::dot(self.row(i), v)).collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Gauss) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| c * a).collect() }
    }

    pub fn commutator(&self, rhs: &Matrix) -> Matrix {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn trace(&self) -> Gauss {
        let mut t = Gauss::zero();
        for i in 0..self.rows.min(self.cols) {
            t += &self[(i, i)];
        }
        t
    }

    /// Entries in row-major order, used for span membership of matrices.
    pub fn flatten(&self) -> Vec<Gauss> {
        self.data.clone()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let d = &f * &m[(r, j)];
                    m[(i, j)] -= &d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Null space basis; the basis vectors have a 1 in their free column.
    pub fn kernel(&self) -> Vec<Vec<Gauss>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vector::zeros(self.cols);
                v[f] = Gauss::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&r[(row, f)];
                }
                v
            })
            .collect()
    }

    /// Solves `self * x = b`; the result is checked by substitution.
    pub fn solve(&self, b: &[Gauss]) -> Result<LinearSolution, ExactError> {
        if b.len() != self.rows {
            return Err(ExactError::DimensionMismatch(format!(
                "rhs has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(ExactError::Inconsistent);
        }
        let mut x = vector::zeros(self.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        if self.mul_vec(&x) != b {
            return Err(ExactError::Inconsistent);
        }
        Ok(LinearSolution { particular: x, kernel: self.kernel() })
    }

    /// Unique solution of a square or overdetermined full-column-rank system.
    pub fn solve_unique(&self, b: &[Gauss]) -> Result<Vec<Gauss>, ExactError> {
        let s = self.solve(b)?;
        if !s.kernel.is_empty() {
            return Err(ExactError::DimensionMismatch("solution is not unique".into()));
        }
        Ok(s.particular)
    }

    pub fn inverse(&self) -> Result<Matrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Gauss::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.get(n.wrapping_sub(1)).is_some_and(|&p| p != n - 1) {
            return Err(ExactError::DivisionByZero);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Gauss {
        assert!(self.is_square(), "determinant of non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Gauss::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Gauss::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] * &inv;
                for j in c..n {
                    let d = &f * &m[(c, j)];
                    m[(i, j)] -= &d;
                }
            }
        }
        det
    }

    /// Leading principal minors `d_1, ..., d_n`, computed as explicit determinants.
    pub fn leading_minors(&self) -> Vec<Gauss> {
        assert!(self.is_square());
        (1..=self.rows)
            .map(|k| {
                let sub = Matrix::from_rows((0..k).map(|i| self.row(i)[..k].to_vec()).collect());
                sub.det()
            })
            .collect()
    }

    /// Characteristic polynomial `det(x I - A)` of a rational matrix, coefficients
    /// from the constant term up (Faddeev-LeVerrier).
    pub fn charpoly(&self) -> Result<Vec<Rat>, ExactError> {
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch("charpoly of non-square matrix".into()));
        }
        if !self.is_real() {
            return Err(ExactError::NonRationalSpectrum("matrix has non-real entries".into()));
        }
        let n = self.rows;
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::one();
        let mut m = Matrix::zeros(n, n);
        for k in 1..=n {
            let mut next = self.mul(&m);
            let c = Gauss::real(coeffs[n - k + 1].clone());
            for i in 0..n {
                next[(i, i)] += &c;
            }
            let t = self.mul(&next).trace();
            coeffs[n - k] = -(t.re / Rat::from_integer(BigInt::from(k)));
            m = next;
        }
        Ok(coeffs)
    }

    /// Eigenvalues with algebraic multiplicity; fails unless every root is rational.
    pub fn rational_eigenvalues(&self) -> Result<Vec<(Rat, usize)>, ExactError> {
        let cp = self.charpoly()?;
        rational_roots(&cp)
    }

    /// `exp(self)` for nilpotent matrices, as a finite sum.
    pub fn exp_nilpotent(&self) -> Result<Matrix, ExactError> {
        let n = self.rows;
        let mut out = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..=n + 1 {
            term = term.mul(self).scale(&Gauss::from_ratio(1, k as i64));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term);
        }
        Err(ExactError::NotNilpotent)
    }
}

/// Rational roots of a polynomial (coefficients from the constant term up),
/// with multiplicity; errors if an irrational or complex factor remains.
pub fn rational_roots(coeffs: &[Rat]) -> Result<Vec<(Rat, usize)>, ExactError> {
    let mut p: Vec<Rat> = coeffs.to_vec();
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        return Err(ExactError::NonRationalSpectrum("zero polynomial".into()));
    }
    let mut roots: Vec<(Rat, usize)> = Vec::new();
    fn push(r: Rat, roots: &mut Vec<(Rat, usize)>) {
        if let Some(e) = roots.iter_mut().find(|(x, _)| *x == r) {
            e.1 += 1;
        } else {
            roots.push((r, 1));
        }
    }
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        push(Rat::zero(), &mut roots);
    }
    while p.len() > 1 {
        let ints = integer_coefficients(&p);
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        let Some(r) = candidate_roots(&a0, &an)?.into_iter().find(|c| eval(&p, c).is_zero()) else {
            return Err(ExactError::NonRationalSpectrum(format!(
                "factor of degree {} has no rational root",
                p.len() - 1
            )));
        };
        while p.len() > 1 && eval(&p, &r).is_zero() {
            p = deflate(&p, &r);
            push(r.clone(), &mut roots);
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(roots)
}

fn integer_coefficients(p: &[Rat]) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect()
}

const DIVISOR_LIMIT: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, ExactError> {
    let n: u64 = n
        .try_into()
        .ok()
        .filter(|&v: &u64| v <= DIVISOR_LIMIT)
        .ok_or_else(|| ExactError::NonRationalSpectrum("coefficients too large to factor".into()))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

fn candidate_roots(a0: &BigInt, an: &BigInt) -> Result<Vec<Rat>, ExactError> {
    let mut out = Vec::new();
    for p in divisors(a0)? {
        for q in divisors(an)? {
            let r = Rat::new(p.clone(), q);
            out.push(r.clone());
            out.push(-r);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

fn deflate(p: &[Rat], r: &Rat) -> Vec<Rat> {
    let n = p.len() - 1;
    let mut q = vec![Rat::zero(); n];
    let mut carry = Rat::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + carry * r;
        q[i] = carry.clone();
    }
    q
}

impl Index<(usize, usize)> for Matrix {
    type Output = Gauss;
    fn index(&self, (i, j): (usize, usize)) -> &Gauss {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Gauss {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
